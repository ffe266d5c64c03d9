//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! print.

mod common;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use ltloracle::checker::{check, check_reference, verify_counterexample, Outcome};
use ltloracle::learners::{accuracy, auc, Algorithm};
use ltloracle::pipeline::{
    bench_report, cmd_e2e, cmd_features, cmd_generate, cmd_label, cmd_sweep, cmd_train_eval,
    timing_path, Config, E2eResult,
};
use ltloracle::smv::{emit_smv, external_check, parse_nusmv_output, resolve_binary};
use sha2::{Digest, Sha256};

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn desk_config() -> Config {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.conf");
    Config::from_text(&fs::read_to_string(p).expect("desk config")).expect("valid desk config")
}

fn checker_correctness() -> Verdict {
    let start = Instant::now();
    let fs = catalog();
    let (mut cases, mut disagree, mut bad_cex) = (0usize, 0usize, 0usize);
    let mut tally = |k: &ltloracle::logic::KripkeStructure, f: &ltloracle::logic::Formula| {
        let a = check(k, f).expect("check");
        let b = check_reference(k, f).expect("reference");
        cases += 1;
        if a.outcome() != b.outcome() {
            disagree += 1;
        }
        if a.outcome() == Outcome::Violated && !verify_counterexample(k, f, &a).unwrap_or(false) {
            bad_cex += 1;
        }
        if b.outcome() == Outcome::Violated && !verify_counterexample(k, f, &b).unwrap_or(false) {
            bad_cex += 1;
        }
    };
    let structures = exhaustive_structures();
    for k in &structures {
        for f in &fs {
            tally(k, f);
        }
    }
    for seed in 0..1000 {
        let (k, f) = random_instance(seed);
        tally(&k, &f);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        disagree == 0 && bad_cex == 0 && secs < 300.0 && structures.len() == 3391,
        format!(
            "{cases} cases ({} structures x {} formulas + 1000 random), {disagree} disagreements, \
             {bad_cex} invalid counterexamples, {secs:.1} s (< 300 s)",
            structures.len(),
            fs.len()
        ),
    )
}

fn metric_oracles() -> Verdict {
    let labels = [0u8, 0, 1, 1];
    let perfect = auc(&[0.1, 0.2, 0.8, 0.9], &labels).unwrap();
    let reversed = auc(&[0.9, 0.8, 0.2, 0.1], &labels).unwrap();
    let tied = auc(&[0.5; 4], &labels).unwrap();
    let mut pred = vec![1u8; 44];
    pred[0] = 0;
    let acc = accuracy(&pred, &[1u8; 44]).unwrap();
    let printed = format!("{acc:.4}");
    verdict(
        perfect == 1.0 && reversed == 0.0 && tied == 0.5 && printed == "0.9773",
        format!("auc {perfect} / {reversed} / {tied}; accuracy 43/44 = {printed}"),
    )
}

fn ratio_math() -> Verdict {
    let rows: [(f64, [f64; 4], [u64; 4]); 2] = [
        (
            0.015,
            [0.000031, 0.001352, 0.000044, 0.000046],
            [484, 11, 341, 326],
        ),
        (
            227.28,
            [0.000032, 0.380051, 0.000055, 0.000041],
            [7_102_500, 598, 4_132_364, 5_543_415],
        ),
    ];
    let mut got = Vec::new();
    let mut pass = true;
    for (t1, t2s, want) in rows {
        for (a, (t2, w)) in Algorithm::ALL.into_iter().zip(t2s.iter().zip(want)) {
            let r = bench_report(a, None, t1, *t2).unwrap();
            pass &= r.ratio_t1_over_t2 == w;
            got.push(r.ratio_t1_over_t2.to_string());
        }
    }
    verdict(pass, format!("t1/t2 = {}", got.join(", ")))
}

fn lr_gradient() -> Verdict {
    let worst = (0..20).map(max_fd_relative_error).fold(0.0, f64::max);
    verdict(
        worst < 1e-5,
        format!("max relative error {worst:.2e} over 20 instances (< 1e-5)"),
    )
}

/// Ten desk-scale end-to-end runs with disjoint instance seeds.
fn desk_runs() -> (Vec<E2eResult>, f64) {
    let start = Instant::now();
    let base = desk_config();
    let runs = (0..10u64)
        .map(|m| {
            let mut cfg = base.clone();
            cfg.seed = base.seed + m * 10_000;
            let dir = tempfile::tempdir().unwrap();
            cmd_e2e(&cfg, dir.path()).expect("desk e2e")
        })
        .collect();
    (runs, start.elapsed().as_secs_f64())
}

fn desk_accuracy(runs: &[E2eResult], secs: f64) -> Verdict {
    let n = runs.len() as f64;
    let prevalence = runs.iter().map(|r| r.majority_prevalence).sum::<f64>() / n;
    let mut pass = secs < 600.0;
    let mut best_margin = f64::NEG_INFINITY;
    let mut detail = format!("majority prevalence {prevalence:.4};");
    for (i, a) in Algorithm::ALL.into_iter().enumerate() {
        let mean = runs.iter().map(|r| r.reports[i].accuracy).sum::<f64>() / n;
        pass &= mean >= prevalence;
        best_margin = best_margin.max(mean - prevalence);
        let _ = write!(detail, " {a} {mean:.4}");
    }
    pass &= best_margin > 0.05;
    let _ = write!(
        detail,
        "; best margin {:+.4} (> 0.05); {secs:.1} s (< 600 s)",
        best_margin
    );
    verdict(pass, detail)
}

fn speedup(runs: &[E2eResult]) -> Verdict {
    let n = runs.len() as f64;
    let t1 = runs.iter().map(|r| r.benches[0].t1_mean_seconds).sum::<f64>() / n;
    let mut pass = true;
    let mut detail = format!("t1 {t1:.2e} s;");
    for (i, a) in Algorithm::ALL.into_iter().enumerate() {
        let t2 = runs.iter().map(|r| r.benches[i].t2_mean_seconds).sum::<f64>() / n;
        let ratio = t1 / t2;
        if matches!(a, Algorithm::Dt | Algorithm::Rf | Algorithm::Lr) {
            pass &= ratio >= 10.0;
        }
        if matches!(a, Algorithm::Dt | Algorithm::Lr) {
            pass &= t2 < 1e-3;
        }
        let _ = write!(detail, " {a} t2 {t2:.2e} s t1/t2 {ratio:.0}");
    }
    verdict(pass, detail)
}

/// SHA-256 of every file under `dir` except timing artifacts.
fn digests(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".timing") || name.ends_with(".timing.txt") {
            continue;
        }
        let h = Sha256::digest(fs::read(&p).unwrap());
        out.insert(name, format!("{h:x}"));
    }
    out
}

fn run_all_commands(cfg: &Config, dir: &Path) {
    let inst = dir.join("instances.txt");
    let ds = dir.join("dataset.txt");
    cmd_generate(cfg, &inst).unwrap();
    cmd_label(&inst, &ds, cfg).unwrap();
    cmd_features(&ds, &dir.join("features.csv")).unwrap();
    cmd_train_eval(
        &ds,
        cfg,
        &dir.join("report.json"),
        Some(&dir.join("model.json")),
    )
    .unwrap();
    let sweep_dir = dir.join("sweep");
    cmd_sweep(&ds, cfg, &sweep_dir).unwrap();
    for e in fs::read_dir(&sweep_dir).unwrap() {
        let p = e.unwrap().path();
        fs::rename(&p, dir.join(format!("sweep_{}", p.file_name().unwrap().to_string_lossy())))
            .unwrap();
    }
    fs::remove_dir(sweep_dir).unwrap();
    let e2e_dir = dir.join("e2e");
    cmd_e2e(cfg, &e2e_dir).unwrap();
    for e in fs::read_dir(&e2e_dir).unwrap() {
        let p = e.unwrap().path();
        fs::rename(&p, dir.join(format!("e2e_{}", p.file_name().unwrap().to_string_lossy())))
            .unwrap();
    }
    fs::remove_dir(e2e_dir).unwrap();
}

fn reproducibility() -> Verdict {
    let mut cfg = desk_config();
    cfg.sweep_seeds = vec![1, 2];
    cfg.sweep_fractions = vec![0.86, 0.88];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_all_commands(&cfg, a.path());
    cfg.workers = 1;
    run_all_commands(&cfg, b.path());
    let (da, db) = (digests(a.path()), digests(b.path()));
    let differing: Vec<&String> = da
        .iter()
        .filter(|(k, v)| db.get(*k) != Some(*v))
        .map(|(k, _)| k)
        .collect();
    let timing_ok = timing_path(&a.path().join("dataset.txt")).exists();
    verdict(
        differing.is_empty() && da.len() == db.len() && da.len() >= 20 && timing_ok,
        format!(
            "{} files hashed across two runs (default pool vs 1 worker), {} differ{}",
            da.len(),
            differing.len(),
            if differing.is_empty() {
                String::new()
            } else {
                format!(": {differing:?}")
            }
        ),
    )
}

fn smv_bridge() -> Verdict {
    let (ka, fa) = fixture_a();
    let (kb, fb) = fixture_b();
    let golden_ok = emit_smv(&ka, &fa) == golden("fixture_a.smv")
        && emit_smv(&kb, &fb) == golden("fixture_b.smv");
    let parse_ok = parse_nusmv_output("-- specification G p is true").ok() == Some(Outcome::Holds)
        && parse_nusmv_output("-- specification G p is false").ok() == Some(Outcome::Violated);
    let live = match resolve_binary(None).filter(|b| b.exists()) {
        None => Ok("live suite skipped: no NuSMV binary configured".to_string()),
        Some(bin) => {
            let mut agree = 0;
            for seed in 0..200 {
                let (k, f) = random_instance(seed);
                let ext = external_check(&k, &f, &bin, Duration::from_secs(60)).map(|r| r.0);
                if ext.ok() == Some(check(&k, &f).unwrap().outcome()) {
                    agree += 1;
                }
            }
            if agree == 200 {
                Ok("live agreement 200/200".to_string())
            } else {
                Err(format!("live agreement {agree}/200"))
            }
        }
    };
    let live_ok = live.is_ok();
    verdict(
        golden_ok && parse_ok && live_ok,
        format!(
            "golden files {}, output fixtures {}, {}",
            if golden_ok { "match" } else { "differ" },
            if parse_ok { "parsed" } else { "misparsed" },
            live.unwrap_or_else(|e| e)
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut report = |n, name, v: Verdict| {
        println!(
            "criterion {n} [{name}]: {} — {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        results.push((n, name, v));
    };
    report(1, "checker correctness", checker_correctness());
    report(2, "metric oracles", metric_oracles());
    report(3, "speedup ratio math", ratio_math());
    report(4, "LR gradient check", lr_gradient());
    let (runs, secs) = desk_runs();
    report(5, "desk-scale accuracy", desk_accuracy(&runs, secs));
    report(6, "speedup direction", speedup(&runs));
    report(7, "reproducibility", reproducibility());
    report(8, "SMV bridge", smv_bridge());
    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
