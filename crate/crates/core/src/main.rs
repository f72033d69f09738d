use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dualinv::decompose::{decompose, Bucket, CosetSet, DecompositionChecks, DecompositionContext, Provenance};
use dualinv::finite::{build_group, verify_class_inversion, DualityReport};
use dualinv::harness::{
    emit_json, emit_report, parse_config_text, replay, run_suite, Counterexample, FindingPolicy, Format, Report,
    SuiteConfig, SCHEMA_VERSION,
};
use dualinv::involution::ConjugatorScope;
use dualinv::lattice::LieLattice;
use dualinv::scalar::Prime;
use dualinv::space::{ExactSpace, Family};
use dualinv::Error;

#[derive(Parser)]
#[command(name = "dualinv", version, about = "Exact checks for similitude Cayley maps and dualizing involutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites (all of them when none are named).
    Verify {
        suites: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Decompose one coset b c(p^k L) modulo p^N.
    Decompose {
        /// Base point as matrix text, rows separated by ';'.
        #[arg(long, default_value = "1 0; 0 1")]
        base: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Class-inversion check for finite groups.
    FiniteDual {
        /// Finite family: sp, gsp, u, gu, o+, o-, o, gl.
        #[arg(long)]
        group: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Re-run a counterexample payload, or every counterexample in a report.
    Replay {
        file: PathBuf,
        #[arg(long)]
        format: Option<String>,
    },
}

#[derive(Args, Default)]
struct Opts {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    ext: Option<String>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    cosets: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated suite list; combined with positional suites.
    #[arg(long)]
    suite: Option<String>,
    /// Finite groups as family:n:p, comma-separated.
    #[arg(long)]
    groups: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Key-value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Whether findings fail the run: warn or fail.
    #[arg(long)]
    findings: Option<String>,
    /// Include wall-clock timings (reports are then no longer byte-stable).
    #[arg(long)]
    timing: bool,
}

struct Resolved {
    config: SuiteConfig,
    format: Format,
    output: Option<PathBuf>,
}

fn resolve(opts: &Opts, positional: &[String]) -> dualinv::Result<Resolved> {
    let mut settings = BTreeMap::new();
    if let Some(path) = &opts.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        settings = parse_config_text(&text)?;
    }
    let mut flag = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            settings.insert(k.to_string(), v);
        }
    };
    flag("family", opts.family.clone());
    flag("dim", opts.dim.map(|v| v.to_string()));
    flag("prime", opts.prime.map(|v| v.to_string()));
    flag("ext", opts.ext.clone());
    flag("precision", opts.precision.map(|v| v.to_string()));
    flag("level", opts.level.map(|v| v.to_string()));
    flag("samples", opts.samples.map(|v| v.to_string()));
    flag("cosets", opts.cosets.map(|v| v.to_string()));
    flag("seed", opts.seed.map(|v| v.to_string()));
    flag("groups", opts.groups.clone());
    flag("findings", opts.findings.clone());
    flag("format", opts.format.clone());
    if opts.timing {
        flag("timing", Some("true".into()));
    }
    let mut suites: Vec<String> = positional.to_vec();
    suites.extend(opts.suite.clone());
    if !suites.is_empty() {
        settings.insert("suite".into(), suites.join(","));
    }
    let format = settings.get("format").map(|f| f.parse()).transpose()?.unwrap_or_default();
    let output = opts.output.clone().or_else(|| settings.get("output").map(PathBuf::from));
    let mut config = SuiteConfig::default();
    config.apply(&settings)?;
    Ok(Resolved { config, format, output })
}

fn write_out(text: &str, output: &Option<PathBuf>) -> Result<(), ExitCode> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(2)
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_error(e: Error) -> ExitCode {
    eprintln!("configuration error: {e}");
    ExitCode::from(2)
}

fn finish(report: &Report, format: Format, output: &Option<PathBuf>, findings: FindingPolicy) -> ExitCode {
    if let Err(code) = write_out(&emit_report(report, format), output) {
        return code;
    }
    ExitCode::from(report.exit_code(findings) as u8)
}

fn verify(suites: &[String], opts: &Opts) -> ExitCode {
    let r = match resolve(opts, suites) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    match run_suite(&r.config) {
        Ok(report) => finish(&report, r.format, &r.output, r.config.findings),
        Err(e) => config_error(e),
    }
}

#[derive(Serialize)]
struct PieceOut {
    size: usize,
    witness: String,
    provenance: Provenance,
}

#[derive(Serialize)]
struct DecomposeOut {
    schema_version: u32,
    family: Family,
    dim: usize,
    prime: u64,
    precision: u32,
    level: u32,
    base: String,
    members: usize,
    neighborhoods: usize,
    buckets: Vec<Bucket>,
    pieces: Vec<PieceOut>,
    checks: DecompositionChecks,
}

fn decompose_markdown(d: &DecomposeOut) -> String {
    let mut out = format!(
        "# Decomposition of b c(p^{} L) mod {}^{}\n\n- family: {} n={}\n- base: {}\n- members: {}\n- checks: {:?}\n\n",
        d.level, d.prime, d.precision, d.family, d.dim, d.base, d.members, d.checks
    );
    out.push_str("| piece | size | witness | a | x_a | level |\n|---|---|---|---|---|---|\n");
    for (i, p) in d.pieces.iter().enumerate() {
        out.push_str(&format!(
            "| {i} | {} | {} | {} | {} | {} |\n",
            p.size, p.witness, p.provenance.a, p.provenance.x_a, p.provenance.level
        ));
    }
    out
}

fn run_decompose(base: &str, opts: &Opts) -> ExitCode {
    let r = match resolve(opts, &[]) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    let c = &r.config;
    let family = c.families.as_ref().and_then(|f| f.first().copied()).unwrap_or(Family::Symplectic);
    let dim = c.dim.unwrap_or(2);
    let precision = c.precision.unwrap_or(3);
    let level = c.level.unwrap_or(1);
    let setup = || -> dualinv::Result<(DecompositionContext, CosetSet)> {
        let exact = ExactSpace::standard(family, dim, Prime::new(c.prime)?)?;
        let ctx = DecompositionContext::new(exact, precision, LieLattice::Similitude, ConjugatorScope::Similitude)?;
        let b = ctx.space().certify_group(ctx.space().parse_matrix(base)?)?;
        let coset = CosetSet::new(&ctx, b, level)?;
        Ok((ctx, coset))
    };
    let (ctx, coset) = match setup() {
        Ok(v) => v,
        Err(e) => return config_error(e),
    };
    let d = match decompose(&ctx, &coset) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("decomposition failed: {e}");
            return ExitCode::from(1);
        }
    };
    let ok = d.checks.all();
    let out = DecomposeOut {
        schema_version: SCHEMA_VERSION,
        family,
        dim,
        prime: c.prime,
        precision,
        level,
        base: coset.base().mat().to_string(),
        members: coset.len(),
        neighborhoods: d.neighborhoods,
        buckets: d.buckets,
        pieces: d
            .pieces
            .iter()
            .map(|p| PieceOut {
                size: p.len(),
                witness: p.witness().mat().to_string(),
                provenance: p.provenance().clone(),
            })
            .collect(),
        checks: d.checks,
    };
    let text = match r.format {
        Format::Json => emit_json(&out),
        Format::Markdown => decompose_markdown(&out),
    };
    if let Err(code) = write_out(&text, &r.output) {
        return code;
    }
    ExitCode::from(u8::from(!ok))
}

#[derive(Serialize)]
struct FiniteOut {
    schema_version: u32,
    reports: Vec<DualityReport>,
}

fn finite_markdown(out: &FiniteOut) -> String {
    let mut s = String::new();
    for r in &out.reports {
        s.push_str(&format!(
            "## {} (order {}, {} classes, {}/{} pass)\n\n",
            r.group,
            r.order,
            r.class_count,
            r.passing_classes(),
            r.rows.len()
        ));
        s.push_str(
            "| representative | size | iota class | inverse class | status | conjugator |\n|---|---|---|---|---|---|\n",
        );
        for row in &r.rows {
            let status = serde_json::to_value(&row.status).expect("status serializes");
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                row.representative,
                row.size,
                row.iota_class,
                row.inverse_class,
                status.as_str().unwrap_or_default(),
                row.conjugator.clone().unwrap_or_default()
            ));
        }
        s.push('\n');
    }
    s
}

fn run_finite(group: &Option<String>, opts: &Opts) -> ExitCode {
    let r = match resolve(opts, &[]) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    let specs = match group {
        Some(g) => format!("{g}:{}:{}", r.config.dim.unwrap_or(2), r.config.prime).parse().map(|s| vec![s]),
        None => Ok(r.config.groups.clone().unwrap_or_else(|| {
            dualinv::finite::DEFAULT_TARGETS
                .iter()
                .map(|&(family, dim, p)| dualinv::harness::GroupSpec { family, dim, p })
                .collect()
        })),
    };
    let specs: Vec<dualinv::harness::GroupSpec> = match specs {
        Ok(s) => s,
        Err(e) => return config_error(e),
    };
    let mut reports = Vec::new();
    for s in specs {
        match build_group(s.family, s.dim, s.p) {
            Ok(t) => reports.push(verify_class_inversion(&t)),
            Err(e) => return config_error(e),
        }
    }
    let failed = reports.iter().any(|r| !r.passed());
    let out = FiniteOut { schema_version: SCHEMA_VERSION, reports };
    let text = match r.format {
        Format::Json => emit_json(&out),
        Format::Markdown => finite_markdown(&out),
    };
    if let Err(code) = write_out(&text, &r.output) {
        return code;
    }
    ExitCode::from(u8::from(failed && r.config.findings == FindingPolicy::Fail))
}

fn counterexamples(value: serde_json::Value) -> dualinv::Result<Vec<Counterexample>> {
    if value.get("check").is_some() {
        return serde_json::from_value(value).map(|c| vec![c]).map_err(|e| Error::Parse(e.to_string()));
    }
    let mut out = Vec::new();
    for suite in value.get("suites").and_then(|s| s.as_array()).into_iter().flatten() {
        for row in suite.get("rows").and_then(|r| r.as_array()).into_iter().flatten() {
            if let Some(cx) = row.get("counterexample") {
                out.push(serde_json::from_value(cx.clone()).map_err(|e| Error::Parse(e.to_string()))?);
            }
        }
    }
    Ok(out)
}

fn run_replay(file: &PathBuf, format: &Option<String>) -> ExitCode {
    let load = || -> dualinv::Result<(Vec<Counterexample>, Format)> {
        let text = fs::read_to_string(file).map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let format = format.as_deref().map(str::parse).transpose()?.unwrap_or_default();
        Ok((counterexamples(value)?, format))
    };
    let (cxs, format) = match load() {
        Ok(v) => v,
        Err(e) => return config_error(e),
    };
    let mut suites = Vec::new();
    for cx in &cxs {
        match replay(cx) {
            Ok(r) => suites.extend(r.suites),
            Err(e) => return config_error(e),
        }
    }
    let report = Report::new(suites);
    finish(&report, format, &None, FindingPolicy::Fail)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify { suites, opts } => verify(suites, opts),
        Command::Decompose { base, opts } => run_decompose(base, opts),
        Command::FiniteDual { group, opts } => run_finite(group, opts),
        Command::Replay { file, format } => run_replay(file, format),
    }
}
