//! Suite runner: configuration, seeded execution of the registered checks
//! and report emission.

pub mod checks;
pub mod sample;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{FiniteFamily, DEFAULT_TARGETS, ORDER_BUDGET};
use crate::lattice::{standard_lattices, LEVEL_BUDGET};
use crate::scalar::Prime;
use crate::space::{ExactSpace, Family};
use checks::{checks_for, find_check, Arity, CheckDef, Ctx, Outcome};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identity,
    Cayley,
    Fiber,
    Level,
    Hypothesis,
    Lattice,
    Decomposition,
    FiniteDuality,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Identity,
        Suite::Cayley,
        Suite::Fiber,
        Suite::Level,
        Suite::Hypothesis,
        Suite::Lattice,
        Suite::Decomposition,
        Suite::FiniteDuality,
    ];

    fn default_targets(self) -> Vec<(Family, usize)> {
        match self {
            Suite::Level => vec![(Family::Symplectic, 2), (Family::Hermitian, 1)],
            Suite::Decomposition => vec![(Family::Symplectic, 2)],
            Suite::FiniteDuality => vec![],
            _ => Family::ALL.iter().map(|&f| (f, 2)).collect(),
        }
    }

    /// Default `(N, k)`.
    fn default_precision(self) -> (u32, u32) {
        match self {
            Suite::Decomposition => (3, 1),
            _ => (2, 1),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().expect("kebab-case string"))
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
            .map_err(|_| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// A finite group given as `family:n:p`, e.g. `sp:2:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub family: FiniteFamily,
    pub dim: usize,
    pub p: u64,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.family, self.dim, self.p)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [family, dim, p] = parts[..] else {
            return Err(Error::Config(format!("group {s:?} is not family:n:p")));
        };
        let num = |t: &str| t.parse::<u64>().map_err(|_| Error::Config(format!("bad number {t:?} in {s:?}")));
        Ok(GroupSpec { family: family.parse()?, dim: num(dim)? as usize, p: num(p)? })
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingPolicy {
    Warn,
    #[default]
    Fail,
}

impl FromStr for FindingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warn" => Ok(FindingPolicy::Warn),
            "fail" => Ok(FindingPolicy::Fail),
            _ => Err(Error::Config(format!("findings must be warn or fail, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtTag {
    Split,
    Inert,
}

impl FromStr for ExtTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(ExtTag::Split),
            "inert" | "unramified" => Ok(ExtTag::Inert),
            _ => Err(Error::Config(format!("ext must be split or inert, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(Error::Config(format!("format must be json or markdown, got {s:?}"))),
        }
    }
}

/// Run parameters. Unset optional fields fall back to per-suite defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub families: Option<Vec<Family>>,
    pub dim: Option<usize>,
    pub prime: u64,
    pub ext: Option<ExtTag>,
    pub precision: Option<u32>,
    pub level: Option<u32>,
    pub samples: u64,
    pub cosets: u64,
    pub seed: u64,
    pub groups: Option<Vec<GroupSpec>>,
    pub findings: FindingPolicy,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            families: None,
            dim: None,
            prime: 3,
            ext: None,
            precision: None,
            level: None,
            samples: 1000,
            cosets: 20,
            seed: 1,
            groups: None,
            findings: FindingPolicy::Fail,
            timing: false,
        }
    }
}

/// Parses comma-separated lists, accepting `all` for every family.
pub fn parse_families(s: &str) -> Result<Vec<Family>> {
    if s.trim() == "all" {
        return Ok(Family::ALL.to_vec());
    }
    s.split(',').map(|t| t.trim().parse()).collect()
}

pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    if s.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse()).collect()
}

pub fn parse_groups(s: &str) -> Result<Vec<GroupSpec>> {
    s.split(',').map(|t| t.parse()).collect()
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("invalid value {v:?} for {key}")))
}

impl SuiteConfig {
    /// Applies `key = value` settings on top of `self`.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in settings {
            match k.as_str() {
                "suite" | "suites" => self.suites = parse_suites(v)?,
                "family" => self.families = Some(parse_families(v)?),
                "dim" => self.dim = Some(parse_value(k, v)?),
                "prime" => self.prime = parse_value(k, v)?,
                "ext" => self.ext = Some(v.parse()?),
                "precision" => self.precision = Some(parse_value(k, v)?),
                "level" => self.level = Some(parse_value(k, v)?),
                "samples" => self.samples = parse_value(k, v)?,
                "cosets" => self.cosets = parse_value(k, v)?,
                "seed" => self.seed = parse_value(k, v)?,
                "groups" => self.groups = Some(parse_groups(v)?),
                "findings" => self.findings = v.parse()?,
                "timing" => self.timing = parse_value(k, v)?,
                "format" | "output" => {}
                _ => return Err(Error::Config(format!("unknown configuration key {k:?}"))),
            }
        }
        Ok(())
    }

    fn groups(&self) -> Vec<GroupSpec> {
        self.groups
            .clone()
            .unwrap_or_else(|| DEFAULT_TARGETS.iter().map(|&(family, dim, p)| GroupSpec { family, dim, p }).collect())
    }
}

/// A validated, ready-to-run suite.
pub struct SuitePlan {
    pub suite: Suite,
    pub contexts: Vec<Ctx>,
    pub parameters: BTreeMap<String, String>,
}

fn budget(p: u64, exponent: usize, limit: u128) -> Result<()> {
    let size = u128::from(p).checked_pow(exponent as u32).unwrap_or(u128::MAX);
    if size > limit {
        return Err(Error::Budget { size, budget: limit });
    }
    Ok(())
}

/// Validates the configuration against every module budget before anything runs.
pub fn plan(config: &SuiteConfig) -> Result<Vec<SuitePlan>> {
    let prime = Prime::new(config.prime)?;
    let mut plans = Vec::new();
    for &suite in &config.suites {
        let (default_n, default_k) = suite.default_precision();
        let precision = config.precision.unwrap_or(default_n);
        let level = config.level.unwrap_or(default_k);
        if level == 0 || level >= precision {
            return Err(Error::Config(format!(
                "suite {suite}: level {level} must satisfy 1 <= level < precision {precision}"
            )));
        }
        let mut parameters = BTreeMap::new();
        parameters.insert("prime".to_string(), config.prime.to_string());
        parameters.insert("seed".to_string(), config.seed.to_string());
        if suite == Suite::FiniteDuality {
            let groups = config.groups();
            for g in &groups {
                Prime::new(g.p)?;
                let deg = if matches!(g.family, FiniteFamily::U | FiniteFamily::Gu) { 2 } else { 1 };
                budget(g.p, g.dim * g.dim * deg, ORDER_BUDGET)?;
            }
            let names: Vec<String> = groups.iter().map(|g| g.to_string()).collect();
            parameters.insert("groups".to_string(), names.join(","));
            let ctx = Ctx::new(Family::GeneralLinear, 1, prime, precision, level, config.seed, groups)?;
            plans.push(SuitePlan { suite, contexts: vec![ctx], parameters });
            continue;
        }
        let targets: Vec<(Family, usize)> = match &config.families {
            Some(fams) => fams.iter().map(|&f| (f, config.dim.unwrap_or(2))).collect(),
            None => suite.default_targets().into_iter().map(|(f, n)| (f, config.dim.unwrap_or(n))).collect(),
        };
        let mut contexts = Vec::new();
        for (family, dim) in targets {
            if let Some(ext) = config.ext {
                if family.needs_inert() != (ext == ExtTag::Inert) {
                    return Err(Error::Config(format!("family {family} does not use a {ext:?} extension")));
                }
            }
            let ctx = Ctx::new(family, dim, prime, precision, level, config.seed, vec![])?;
            let deg = ctx.exact().ext().degree();
            match suite {
                Suite::Level => budget(config.prime, (precision - level) as usize * dim * dim * deg, LEVEL_BUDGET)?,
                Suite::Decomposition => {
                    let rank = standard_lattices(ctx.exact())?.l_dot.rank();
                    budget(config.prime, (precision - level) as usize * rank, LEVEL_BUDGET)?
                }
                Suite::Fiber => {
                    let rank = gu_rank(ctx.exact())?;
                    budget(config.prime, precision as usize * rank, LEVEL_BUDGET)?
                }
                _ => {}
            }
            contexts.push(ctx);
        }
        let targets: Vec<String> = contexts.iter().map(|c| c.target()).collect();
        parameters.insert("targets".to_string(), targets.join(","));
        if matches!(suite, Suite::Level | Suite::Decomposition | Suite::Fiber) {
            parameters.insert("precision".to_string(), precision.to_string());
            parameters.insert("level".to_string(), level.to_string());
        }
        if suite == Suite::Decomposition {
            parameters.insert("cosets".to_string(), config.cosets.to_string());
        }
        if checks_for(suite).any(|c| c.arity == Arity::Samples) {
            parameters.insert("samples".to_string(), config.samples.to_string());
        }
        plans.push(SuitePlan { suite, contexts, parameters });
    }
    Ok(plans)
}

fn gu_rank(exact: &ExactSpace) -> Result<usize> {
    Ok(standard_lattices(exact)?.l_dot.rank())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Finding,
}

/// Everything needed to re-run one failing index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub family: Family,
    pub dim: usize,
    pub prime: u64,
    pub precision: u32,
    pub level: u32,
    pub seed: u64,
    pub index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub input: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub check: String,
    pub target: String,
    pub status: Status,
    pub runs: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub pass: usize,
    pub fail: usize,
    pub finding: usize,
}

impl Summary {
    fn of<'a>(rows: impl IntoIterator<Item = &'a Row>) -> Summary {
        let mut s = Summary::default();
        for r in rows {
            s.rows += 1;
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Finding => s.finding += 1,
            }
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suites: Vec<SuiteReport>) -> Report {
        let summary = Summary::of(suites.iter().flat_map(|s| &s.rows));
        Report { schema_version: SCHEMA_VERSION, suites, summary }
    }

    /// 0 when every row passes (findings count as failures under `Fail`).
    pub fn exit_code(&self, findings: FindingPolicy) -> i32 {
        let finding_fails = findings == FindingPolicy::Fail && self.summary.finding > 0;
        i32::from(self.summary.fail > 0 || finding_fails)
    }

    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.suites.iter().flat_map(|s| &s.rows)
    }
}

fn run_check(
    def: &CheckDef,
    ctx: &Ctx,
    indices: std::ops::Range<u64>,
    target: String,
    group: Option<GroupSpec>,
    timing: bool,
) -> Row {
    let start = Instant::now();
    let mut failures = 0;
    let mut status = Status::Pass;
    let mut counterexample = None;
    let runs = indices.end - indices.start;
    for index in indices {
        let (st, input, message) = match def.run(ctx, index) {
            Outcome::Pass => continue,
            Outcome::Fail { input, message } => (Status::Fail, input, message),
            Outcome::Finding { input, message } => (Status::Finding, input, message),
        };
        failures += 1;
        if status != Status::Fail {
            status = st;
        }
        counterexample.get_or_insert_with(|| Counterexample {
            check: def.name.to_string(),
            family: ctx.family,
            dim: ctx.dim,
            prime: ctx.prime.get(),
            precision: ctx.precision,
            level: ctx.level,
            seed: ctx.seed,
            index: if group.is_some() { 0 } else { index },
            group,
            input,
            message,
        });
    }
    Row {
        check: def.name.to_string(),
        target,
        status,
        runs,
        failures,
        counterexample,
        millis: timing.then(|| start.elapsed().as_millis() as u64),
    }
}

pub fn run_plan(plan: &SuitePlan, config: &SuiteConfig) -> SuiteReport {
    let mut rows = Vec::new();
    for def in checks_for(plan.suite) {
        for ctx in &plan.contexts {
            match def.arity {
                Arity::Groups => {
                    for (i, g) in ctx.groups.iter().enumerate() {
                        let name = g.family.group_name(g.dim, g.p);
                        let i = i as u64;
                        rows.push(run_check(def, ctx, i..i + 1, name, Some(*g), config.timing));
                    }
                }
                arity => {
                    let count = match arity {
                        Arity::Samples => config.samples,
                        Arity::Cosets => config.cosets,
                        _ => 1,
                    };
                    rows.push(run_check(def, ctx, 0..count, ctx.target(), None, config.timing));
                }
            }
        }
    }
    let summary = Summary::of(&rows);
    SuiteReport { suite: plan.suite, parameters: plan.parameters.clone(), rows, summary }
}

/// Plans and runs every selected suite. Configuration errors surface before any check runs.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    let plans = plan(config)?;
    Ok(Report::new(plans.iter().map(|p| run_plan(p, config)).collect()))
}

/// Re-runs the single index a counterexample names.
pub fn replay(cx: &Counterexample) -> Result<Report> {
    let def = find_check(&cx.check).ok_or_else(|| Error::Config(format!("unknown check {:?}", cx.check)))?;
    let prime = Prime::new(cx.prime)?;
    let groups = cx.group.into_iter().collect();
    let ctx = Ctx::new(cx.family, cx.dim, prime, cx.precision, cx.level, cx.seed, groups)?;
    let target = match cx.group {
        Some(g) => g.family.group_name(g.dim, g.p),
        None => ctx.target(),
    };
    let row = run_check(def, &ctx, cx.index..cx.index + 1, target, cx.group, false);
    let mut parameters = BTreeMap::new();
    parameters.insert("replay".to_string(), cx.check.clone());
    let summary = Summary::of([&row]);
    Ok(Report::new(vec![SuiteReport { suite: def.suite, parameters, rows: vec![row], summary }]))
}

pub fn emit_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn emit_markdown(report: &Report) -> String {
    let mut out = format!("# Report (schema {})\n\n", report.schema_version);
    let s = &report.summary;
    out.push_str(&format!("{} rows: {} pass, {} fail, {} finding\n", s.rows, s.pass, s.fail, s.finding));
    for suite in &report.suites {
        out.push_str(&format!("\n## {}\n\n", suite.suite));
        for (k, v) in &suite.parameters {
            out.push_str(&format!("- {k}: {v}\n"));
        }
        out.push_str("\n| check | target | status | runs | failures | counterexample | millis |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for r in &suite.rows {
            let cx = r
                .counterexample
                .as_ref()
                .map(|c| cell(&format!("index {}: {} ({})", c.index, c.input, c.message)))
                .unwrap_or_default();
            let status = serde_json::to_value(r.status).expect("status serializes");
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                r.check,
                r.target,
                status.as_str().unwrap_or_default(),
                r.runs,
                r.failures,
                cx,
                r.millis.map(|m| m.to_string()).unwrap_or_default()
            ));
        }
    }
    out
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => emit_json(report),
        Format::Markdown => emit_markdown(report),
    }
}
