//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dualinv::finite::{build_group, verify_class_inversion, DEFAULT_TARGETS};
use dualinv::harness::{emit_json, replay, run_suite, Counterexample, Report, Status, Suite, SuiteConfig};
use dualinv::lattice::{check_cayley_level, LevelVariant};
use dualinv::scalar::Prime;
use dualinv::space::{ExactSpace, Family};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn config(suite: Suite, samples: u64) -> SuiteConfig {
    SuiteConfig { suites: vec![suite], samples, seed: 1, ..SuiteConfig::default() }
}

fn failures(report: &Report) -> Vec<String> {
    report
        .rows()
        .filter(|r| r.status != Status::Pass)
        .map(|r| {
            let msg = r.counterexample.as_ref().map(|c| c.message.clone()).unwrap_or_default();
            format!("{} {}: {msg}", r.check, r.target)
        })
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn multiplier_identity() -> Verdict {
    let mut worst = Duration::ZERO;
    let mut bad = Vec::new();
    for family in Family::ALL {
        let cfg = SuiteConfig { families: Some(vec![family]), ..config(Suite::Cayley, 1000) };
        let (report, took) = timed(|| run_suite(&cfg));
        let report = match report {
            Ok(r) => r,
            Err(e) => return verdict(false, e.to_string()),
        };
        let row = report.rows().find(|r| r.check == "multiplier-identity");
        match row {
            Some(r) if r.status == Status::Pass && r.runs >= 1000 => {}
            _ => bad.push(format!("{family}: {:?}", failures(&report))),
        }
        worst = worst.max(took);
        if took >= Duration::from_secs(5) {
            bad.push(format!("{family} took {}", secs(took)));
        }
    }
    let ok = bad.is_empty();
    verdict(
        ok,
        if ok { format!("1000 samples x 5 families exact, slowest family {}", secs(worst)) } else { bad.join("; ") },
    )
}

fn fiber_analysis() -> Verdict {
    let (report, took) = timed(|| run_suite(&config(Suite::Fiber, 500)));
    let report = match report {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let exhaustive = report.rows().any(|r| r.check == "fiber-exhaustive" && r.target == "symplectic/2");
    let bad = failures(&report);
    let ok = bad.is_empty() && exhaustive && took < Duration::from_secs(30);
    let detail = if ok {
        format!("500 samples per family plus exhaustive symplectic/2 mod 9 bucketing, {}", secs(took))
    } else {
        format!("{bad:?}, exhaustive row present: {exhaustive}, {}", secs(took))
    };
    verdict(ok, detail)
}

fn level_bijection() -> Verdict {
    let p = Prime::new(3).unwrap();
    let (result, took) = timed(|| -> dualinv::Result<Vec<(String, bool, usize, usize)>> {
        let mut out = Vec::new();
        for (family, n) in [(Family::Symplectic, 2), (Family::Hermitian, 1)] {
            let space = ExactSpace::standard(family, n, p)?;
            for variant in [LevelVariant::Similitude, LevelVariant::Isometry] {
                let c = check_cayley_level(&space, 1, 2, variant)?;
                out.push((format!("{family}/{n} {variant:?}"), c.passed(), c.image_count, c.group_count));
            }
        }
        Ok(out)
    });
    let rows = match result {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let suite_ok = run_suite(&config(Suite::Level, 1)).map(|r| failures(&r).is_empty()).unwrap_or(false);
    let count = |name: &str| rows.iter().find(|r| r.0 == name).map(|r| (r.2, r.3));
    let ok = suite_ok
        && rows.iter().all(|r| r.1)
        && count("symplectic/2 Similitude") == Some((81, 81))
        && count("hermitian/1 Isometry") == Some((3, 3))
        && took < Duration::from_secs(10);
    let counts: Vec<String> = rows.iter().map(|(name, _, i, g)| format!("{name} {i} = {g}")).collect();
    verdict(ok, format!("{}, {}", counts.join(", "), secs(took)))
}

fn suite_verdict(suite: Suite, samples: u64, limit: u64, what: &str) -> Verdict {
    let (report, took) = timed(|| run_suite(&config(suite, samples)));
    let report = match report {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let bad = failures(&report);
    let short = report.rows().filter(|r| r.runs < samples && r.runs > 1).count();
    let ok = bad.is_empty() && short == 0 && took < Duration::from_secs(limit);
    let detail = if ok { format!("{what}, {}", secs(took)) } else { format!("{bad:?}, {}", secs(took)) };
    verdict(ok, detail)
}

fn decomposition() -> Verdict {
    let mut worst = Duration::ZERO;
    let mut bad = Vec::new();
    let cosets = 20;
    for index in 0..cosets {
        let cx = Counterexample {
            check: "decomposition-coset".into(),
            family: Family::Symplectic,
            dim: 2,
            prime: 3,
            precision: 3,
            level: 1,
            seed: 1,
            index,
            group: None,
            input: String::new(),
            message: String::new(),
        };
        let (report, took) = timed(|| replay(&cx));
        worst = worst.max(took);
        match report {
            Ok(r) => bad.extend(failures(&r)),
            Err(e) => bad.push(e.to_string()),
        }
        if took >= Duration::from_secs(60) {
            bad.push(format!("coset {index} took {}", secs(took)));
        }
    }
    let examples = run_suite(&SuiteConfig { cosets: 0, ..config(Suite::Decomposition, 0) })
        .map(|r| failures(&r))
        .unwrap_or_else(|e| vec![e.to_string()]);
    bad.extend(examples);
    let ok = bad.is_empty();
    verdict(
        ok,
        if ok {
            format!("{cosets} cosets b c(3L) mod 27 partitioned and verified, slowest {}", secs(worst))
        } else {
            bad.join("; ")
        },
    )
}

fn finite_duality() -> Verdict {
    let (result, took) = timed(|| -> dualinv::Result<Vec<(String, usize, usize)>> {
        DEFAULT_TARGETS
            .iter()
            .map(|&(family, n, q)| {
                let report = verify_class_inversion(&build_group(family, n, q)?);
                Ok((report.group.clone(), report.passing_classes(), report.class_count))
            })
            .collect()
    });
    let rows = match result {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let ok = rows.iter().all(|(_, pass, total)| pass == total) && took < Duration::from_secs(120);
    let counts: Vec<String> = rows.iter().map(|(g, pass, total)| format!("{g} {pass}/{total}")).collect();
    verdict(ok, format!("{}, {}", counts.join(", "), secs(took)))
}

fn determinism() -> Verdict {
    let cfg = SuiteConfig {
        suites: vec![Suite::Identity, Suite::Cayley, Suite::Lattice, Suite::FiniteDuality],
        samples: 50,
        seed: 7,
        ..SuiteConfig::default()
    };
    let runs: Vec<String> = (0..2).map(|_| run_suite(&cfg).map(|r| emit_json(&r)).unwrap_or_default()).collect();
    let ok = !runs[0].is_empty() && runs[0] == runs[1];
    verdict(ok, format!("two runs, {} bytes each, identical: {}", runs[0].len(), runs[0] == runs[1]))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("multiplier identity", multiplier_identity),
        ("fiber analysis", fiber_analysis),
        ("level bijection", level_bijection),
        ("hypothesis suite", || suite_verdict(Suite::Hypothesis, 1000, 30, "1000 samples per check and family")),
        ("lattice identities", || suite_verdict(Suite::Lattice, 100, 30, "100 samples per check and family")),
        ("decomposition", decomposition),
        ("finite duality", finite_duality),
        ("determinism", determinism),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        all &= v.ok;
        println!("[{}] {} {name}: {}", if v.ok { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
