use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::bench::{bench_report, percent, BenchReport};
use super::config::{Config, LabelerChoice};
use super::dataset::{parse_timing, timing_path, Dataset, Failure, Label, Labeler, Record};
use super::PipelineError;
use crate::checker::check_with;
use crate::features::{extract, read_feature_csv, write_feature_csv, LabeledFeatures};
use crate::learners::{evaluate, split, train, Algorithm, EvalReport, SplitSpec, TrainedModel};
use crate::logic::{random_formula, random_kripke};
use crate::smv::{external_check_with, resolve_binary, ExternalOptions};

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a dataset and, when present, its timing sidecar.
pub fn read_dataset(path: &Path) -> Result<Dataset, PipelineError> {
    let parse_err = |source| PipelineError::Parse {
        path: path.to_path_buf(),
        source,
    };
    let mut ds = Dataset::parse(&read(path)?).map_err(parse_err)?;
    let tp = timing_path(path);
    if tp.exists() {
        let text = read(&tp)?;
        ds.apply_timing(&text).map_err(|source| PipelineError::Parse {
            path: tp.clone(),
            source,
        })?;
    }
    Ok(ds)
}

/// Writes a dataset and, if any record carries a label time, its sidecar.
pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<(), PipelineError> {
    write(path, &ds.to_text())?;
    let timing = ds.timing_text();
    if !timing.is_empty() {
        write(&timing_path(path), &timing)?;
    }
    Ok(())
}

/// `count` unlabeled instances; instance `i` is generated from seed
/// `cfg.seed + i`.
pub fn generate(cfg: &Config) -> Result<Dataset, PipelineError> {
    cfg.validate()?;
    let records = (0..cfg.count)
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i as u64);
            let spec = cfg.gen_spec(seed);
            let kripke = random_kripke(&spec)?;
            let formula = random_formula(&spec, &kripke.alphabet)?;
            Ok(Record {
                index: i,
                seed,
                kripke,
                formula,
                label: None,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(Dataset {
        records,
        failures: Vec::new(),
    })
}

pub fn cmd_generate(cfg: &Config, out: &Path) -> Result<Dataset, PipelineError> {
    let ds = generate(cfg)?;
    write_dataset(out, &ds)?;
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelSummary {
    pub labeled: usize,
    pub holds: usize,
    pub failed: usize,
}

impl fmt::Display for LabelSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "holds: {}/{}", self.holds, self.labeled)?;
        if self.failed > 0 {
            write!(f, "\nfailed: {} (excluded)", self.failed)?;
        }
        Ok(())
    }
}

impl LabelSummary {
    pub fn of(ds: &Dataset) -> Self {
        LabelSummary {
            labeled: ds.records.len(),
            holds: ds.holds_count(),
            failed: ds.failures.len(),
        }
    }
}

fn label_one(r: &Record, cfg: &Config, external: Option<&Path>) -> Result<Label, String> {
    let use_external = match cfg.labeler {
        LabelerChoice::Builtin => false,
        LabelerChoice::External => true,
        LabelerChoice::Auto => {
            external.is_some() && r.formula.length() > cfg.builtin_max_length
        }
    };
    if use_external {
        let binary = external.expect("binary resolved before labeling");
        let opts = ExternalOptions {
            binary: binary.to_path_buf(),
            timeout: Duration::from_secs_f64(cfg.timeout_seconds),
            keep_temps: cfg.keep_temps,
        };
        let run = external_check_with(&r.kripke, &r.formula, &opts).map_err(|e| e.to_string())?;
        return Ok(Label {
            outcome: run.outcome,
            labeler: Labeler::External,
            lasso: None,
            seconds: Some(run.seconds),
        });
    }
    let start = Instant::now();
    let v = check_with(&r.kripke, &r.formula, &cfg.limits()).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(Label {
        outcome: v.outcome(),
        labeler: Labeler::Builtin,
        lasso: v.counterexample().cloned(),
        seconds: Some(seconds),
    })
}

/// Labels every record on a pool of `cfg.workers` threads (0 = one per
/// core). Output order follows input order; failed records move to
/// `failures`.
pub fn label(input: &Dataset, cfg: &Config) -> Result<Dataset, PipelineError> {
    let external: Option<PathBuf> = match cfg.labeler {
        LabelerChoice::Builtin => None,
        LabelerChoice::External => Some(resolve_binary(cfg.nusmv.as_deref()).ok_or_else(|| {
            PipelineError::Config(
                "labeler = external needs a NuSMV binary (set `nusmv` or LTLORACLE_NUSMV)".into(),
            )
        })?),
        LabelerChoice::Auto => resolve_binary(cfg.nusmv.as_deref()).filter(|p| p.exists()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| PipelineError::Config(format!("worker pool: {e}")))?;
    let results: Vec<Result<Label, String>> = pool.install(|| {
        input
            .records
            .par_iter()
            .map(|r| label_one(r, cfg, external.as_deref()))
            .collect()
    });
    let mut out = Dataset {
        records: Vec::new(),
        failures: input.failures.clone(),
    };
    for (r, res) in input.records.iter().zip(results) {
        match res {
            Ok(l) => out.records.push(Record {
                label: Some(l),
                ..r.clone()
            }),
            Err(message) => out.failures.push(Failure {
                index: r.index,
                message,
            }),
        }
    }
    if out.records.is_empty() {
        return Err(PipelineError::AllFailed(input.records.len()));
    }
    Ok(out)
}

pub fn cmd_label(input: &Path, output: &Path, cfg: &Config) -> Result<LabelSummary, PipelineError> {
    let ds = label(&read_dataset(input)?, cfg)?;
    write_dataset(output, &ds)?;
    Ok(LabelSummary::of(&ds))
}

/// Feature rows with labels (1 = holds).
pub fn featurize(ds: &Dataset) -> Result<LabeledFeatures, PipelineError> {
    if !ds.is_labeled() {
        return Err(PipelineError::Data(
            "dataset is not labeled; run `label` first".into(),
        ));
    }
    let rows = ds
        .records
        .iter()
        .map(|r| extract(&r.kripke, &r.formula).values)
        .collect();
    let labels = ds
        .outcomes()
        .iter()
        .map(|o| u8::from(o.holds()))
        .collect();
    Ok(LabeledFeatures { rows, labels })
}

pub fn cmd_features(dataset: &Path, out: &Path) -> Result<usize, PipelineError> {
    let data = featurize(&read_dataset(dataset)?)?;
    let mut buf = Vec::new();
    write_feature_csv(&mut buf, &data).map_err(|source| PipelineError::Features {
        path: out.to_path_buf(),
        source,
    })?;
    write(out, &String::from_utf8(buf).expect("CSV is UTF-8"))?;
    Ok(data.rows.len())
}

pub fn read_features(path: &Path) -> Result<LabeledFeatures, PipelineError> {
    read_feature_csv(read(path)?.as_bytes()).map_err(|source| PipelineError::Features {
        path: path.to_path_buf(),
        source,
    })
}

/// Minimum dataset size for training.
pub const MIN_RECORDS: usize = 10;

fn ensure_trainable(data: &LabeledFeatures) -> Result<(), PipelineError> {
    if data.rows.len() < MIN_RECORDS {
        return Err(PipelineError::Data(format!(
            "need at least {MIN_RECORDS} labeled records, got {}",
            data.rows.len()
        )));
    }
    let holds = data.labels.iter().filter(|&&l| l == 1).count();
    if holds == 0 || holds == data.labels.len() {
        let class = if holds == 0 { "violated" } else { "holds" };
        return Err(PipelineError::Data(format!(
            "single-class dataset: all {} records are `{class}`; change seed, \
             formula_length or operator_weights to get both verdicts",
            data.labels.len()
        )));
    }
    Ok(())
}

/// Split → fit scaler and model on the training part → evaluate on the rest.
pub fn train_eval(
    data: &LabeledFeatures,
    algorithm: Algorithm,
    spec: SplitSpec,
    cfg: &Config,
) -> Result<(EvalReport, TrainedModel), PipelineError> {
    ensure_trainable(data)?;
    let (tr, te) = split(data.rows.len(), &spec)?;
    let pick = |ix: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            ix.iter().map(|&i| data.rows[i].clone()).collect(),
            ix.iter().map(|&i| data.labels[i]).collect(),
        )
    };
    let (xtr, ytr) = pick(&tr);
    let (xte, yte) = pick(&te);
    let model = train(algorithm, &xtr, &ytr, &cfg.params(spec.seed))?;
    let report = evaluate(&model, &xte, &yte, tr.len(), spec)?;
    Ok((report, model))
}

/// Writes `report` without its timing to `path` and the timing to the
/// sidecar.
pub fn write_report(path: &Path, report: &EvalReport) -> Result<(), PipelineError> {
    let stable = EvalReport {
        per_record_predict_seconds: None,
        ..report.clone()
    };
    let mut text = serde_json::to_string_pretty(&stable).expect("report serializes");
    text.push('\n');
    write(path, &text)?;
    if let Some(t) = report.per_record_predict_seconds {
        write(&timing_path(path), &format!("per_record_predict_seconds {t}\n"))?;
    }
    Ok(())
}

pub fn read_report(path: &Path) -> Result<EvalReport, PipelineError> {
    let mut r: EvalReport = serde_json::from_str(&read(path)?).map_err(|e| {
        PipelineError::Data(format!("report {}: {e}", path.display()))
    })?;
    let tp = timing_path(path);
    if tp.exists() {
        let t = parse_timing(&read(&tp)?).map_err(|source| PipelineError::Parse {
            path: tp.clone(),
            source,
        })?;
        if let Some(&s) = t.get("per_record_predict_seconds") {
            r.per_record_predict_seconds = Some(s);
        }
    }
    Ok(r)
}

pub fn cmd_train_eval(
    dataset: &Path,
    cfg: &Config,
    report_path: &Path,
    model_path: Option<&Path>,
) -> Result<EvalReport, PipelineError> {
    let data = featurize(&read_dataset(dataset)?)?;
    let (report, model) = train_eval(&data, cfg.algorithm, cfg.split_spec(), cfg)?;
    write_report(report_path, &report)?;
    if let Some(p) = model_path {
        write(p, &model.to_text())?;
    }
    Ok(report)
}

/// Mean label time of a dataset (t₁).
pub fn mean_label_seconds(ds: &Dataset) -> Result<f64, PipelineError> {
    let times: Vec<f64> = ds
        .records
        .iter()
        .filter_map(|r| r.label.as_ref().and_then(|l| l.seconds))
        .collect();
    if times.is_empty() || times.len() != ds.records.len() {
        return Err(PipelineError::MissingTiming(
            "dataset has no label times (is its .timing sidecar present?)".into(),
        ));
    }
    Ok(times.iter().sum::<f64>() / times.len() as f64)
}

pub fn bench(ds: &Dataset, report: &EvalReport) -> Result<BenchReport, PipelineError> {
    let t1 = mean_label_seconds(ds)?;
    let t2 = report.per_record_predict_seconds.ok_or_else(|| {
        PipelineError::MissingTiming(
            "report has no prediction time (is its .timing sidecar present?)".into(),
        )
    })?;
    bench_report(report.algorithm, ds.length_class(), t1, t2)
}

pub fn cmd_bench(dataset: &Path, report: &Path) -> Result<BenchReport, PipelineError> {
    bench(&read_dataset(dataset)?, &read_report(report)?)
}

#[derive(Debug)]
pub struct SweepResult {
    pub best: EvalReport,
    pub best_model: TrainedModel,
    /// Every cell, fractions outer and seeds inner.
    pub grid: Vec<EvalReport>,
}

// Higher accuracy, then higher AUC (absent counts lowest), then smaller seed.
fn better(a: &EvalReport, b: &EvalReport) -> bool {
    let auc = |r: &EvalReport| r.auc.unwrap_or(f64::NEG_INFINITY);
    if a.accuracy != b.accuracy {
        return a.accuracy > b.accuracy;
    }
    if auc(a) != auc(b) {
        return auc(a) > auc(b);
    }
    a.split.seed < b.split.seed
}

/// Runs [`train_eval`] over every (fraction, seed) cell and keeps the best
/// cell: highest accuracy, ties → highest AUC, then smallest seed, then
/// earliest fraction.
pub fn sweep(
    data: &LabeledFeatures,
    algorithm: Algorithm,
    fractions: &[f64],
    seeds: &[u64],
    cfg: &Config,
) -> Result<SweepResult, PipelineError> {
    if fractions.is_empty() || seeds.is_empty() {
        return Err(PipelineError::Config("sweep grids must be nonempty".into()));
    }
    let mut grid = Vec::new();
    let mut best: Option<(EvalReport, TrainedModel)> = None;
    for &fraction in fractions {
        for &seed in seeds {
            let (r, m) = train_eval(data, algorithm, SplitSpec { fraction, seed }, cfg)?;
            grid.push(r.clone());
            if best.as_ref().is_none_or(|(b, _)| better(&r, b)) {
                best = Some((r, m));
            }
        }
    }
    let (best, best_model) = best.expect("nonempty grid");
    Ok(SweepResult {
        best,
        best_model,
        grid,
    })
}

/// Audit CSV of a sweep grid.
pub fn grid_csv(grid: &[EvalReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record([
        "algorithm",
        "fraction",
        "seed",
        "train_count",
        "test_count",
        "accuracy",
        "auc",
    ]);
    for r in grid {
        let _ = w.write_record([
            r.algorithm.to_string(),
            r.split.fraction.to_string(),
            r.split.seed.to_string(),
            r.train_count.to_string(),
            r.test_count.to_string(),
            r.accuracy.to_string(),
            r.auc.map(|a| a.to_string()).unwrap_or_default(),
        ]);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
}

fn write_sweep(out_dir: &Path, s: &SweepResult) -> Result<(), PipelineError> {
    let a = s.best.algorithm;
    write(&out_dir.join(format!("grid_{a}.csv")), &grid_csv(&s.grid))?;
    write_report(&out_dir.join(format!("report_{a}.json")), &s.best)?;
    write(&out_dir.join(format!("model_{a}.json")), &s.best_model.to_text())
}

pub fn cmd_sweep(dataset: &Path, cfg: &Config, out_dir: &Path) -> Result<SweepResult, PipelineError> {
    let data = featurize(&read_dataset(dataset)?)?;
    let s = sweep(&data, cfg.algorithm, &cfg.sweep_fractions, &cfg.sweep_seeds, cfg)?;
    write_sweep(out_dir, &s)?;
    Ok(s)
}

#[derive(Debug)]
pub struct E2eResult {
    /// Master seed of the dataset actually used.
    pub master_seed: u64,
    pub regenerations: usize,
    pub dataset: Dataset,
    /// Share of the majority class in the labeled dataset.
    pub majority_prevalence: f64,
    /// Best sweep cell per algorithm, in [`Algorithm::ALL`] order.
    pub reports: Vec<EvalReport>,
    pub benches: Vec<BenchReport>,
    pub warnings: Vec<String>,
}

fn majority_share(ds: &Dataset) -> f64 {
    let n = ds.records.len() as f64;
    let h = ds.holds_count() as f64;
    h.max(n - h) / n
}

/// Generates and labels a dataset, regenerating with master seed
/// `seed + count·attempt` while one class exceeds `balance_threshold`
/// (up to `balance_retries` times when `balance_regenerate` is on).
pub fn balanced_dataset(
    cfg: &Config,
) -> Result<(Dataset, Dataset, u64, usize, Vec<String>), PipelineError> {
    let mut warnings = Vec::new();
    let mut attempt = 0usize;
    loop {
        let mut c = cfg.clone();
        c.seed = cfg
            .seed
            .wrapping_add((cfg.count as u64).wrapping_mul(attempt as u64));
        let instances = generate(&c)?;
        let labeled = label(&instances, &c)?;
        let share = majority_share(&labeled);
        if share <= cfg.balance_threshold {
            return Ok((instances, labeled, c.seed, attempt, warnings));
        }
        let s = LabelSummary::of(&labeled);
        warnings.push(format!(
            "class imbalance with master seed {}: {s} (majority {:.1}% > {:.1}%)",
            c.seed,
            share * 100.0,
            cfg.balance_threshold * 100.0
        ));
        if cfg.balance_regenerate && attempt < cfg.balance_retries {
            attempt += 1;
            continue;
        }
        return Ok((instances, labeled, c.seed, attempt, warnings));
    }
}

/// Summary table: one column per algorithm, rows for counts,
/// per-record time (optional), accuracy, AUC, seed and fraction.
pub fn summary_table(reports: &[EvalReport], with_timing: bool) -> String {
    let mut rows: Vec<(String, Vec<String>)> = vec![(
        "ML Algorithms".into(),
        reports.iter().map(|r| r.algorithm.name().to_uppercase()).collect(),
    )];
    let mut row = |name: &str, f: &dyn Fn(&EvalReport) -> String| {
        rows.push((name.into(), reports.iter().map(f).collect()));
    };
    row("Training record #", &|r| r.train_count.to_string());
    row("Testing record #", &|r| r.test_count.to_string());
    if with_timing {
        row("Running time per record (in second)", &|r| {
            r.per_record_predict_seconds
                .map(seconds)
                .unwrap_or_else(|| "n/a".into())
        });
    }
    row("Prediction Accuracy", &|r| format!("{:.4}", r.accuracy));
    row("AUC", &|r| {
        r.auc
            .map(|a| format!("{a:.4}"))
            .unwrap_or_else(|| "n/a".into())
    });
    row("Seed #", &|r| r.split.seed.to_string());
    row("Fraction", &|r| r.split.fraction.to_string());
    render_rows(&rows)
}

/// Six decimals, or three significant digits in scientific notation below
/// 10 µs.
pub fn seconds(t: f64) -> String {
    if t == 0.0 || t >= 1e-5 {
        format!("{t:.6}")
    } else {
        format!("{t:.2e}")
    }
}

fn render_rows(rows: &[(String, Vec<String>)]) -> String {
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let wc = rows
        .iter()
        .flat_map(|r| r.1.iter().map(String::len))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (name, cells) in rows {
        let _ = write!(out, "{name:<w0$}");
        for c in cells {
            let _ = write!(out, "  {c:>wc$}");
        }
        out.push('\n');
    }
    out
}

/// t₁, t₂ and their ratios per algorithm.
pub fn bench_table(benches: &[BenchReport]) -> String {
    let mut rows = vec![(
        "ML algorithm".to_string(),
        vec!["t1 (s)".into(), "t2 (s)".into(), "t2/t1".into(), "t1/t2".into()],
    )];
    for b in benches {
        rows.push((
            b.algorithm.name().to_uppercase(),
            vec![
                seconds(b.t1_mean_seconds),
                seconds(b.t2_mean_seconds),
                percent(b.ratio_t2_over_t1),
                b.ratio_t1_over_t2.to_string(),
            ],
        ));
    }
    render_rows(&rows)
}

/// Generate → label → featurize → sweep all four algorithms → summarize.
///
/// Files written under `out_dir`: `instances.txt`, `dataset.txt`,
/// `features.csv`, `grid_<alg>.csv`, `report_<alg>.json`, `model_<alg>.json`
/// and `summary.txt`, all reproducible; wall-clock data goes to `.timing`
/// sidecars and `summary.timing.txt`.
pub fn cmd_e2e(cfg: &Config, out_dir: &Path) -> Result<E2eResult, PipelineError> {
    cfg.validate()?;
    let (instances, labeled, master_seed, regenerations, warnings) = balanced_dataset(cfg)?;
    write_dataset(&out_dir.join("instances.txt"), &instances)?;
    write_dataset(&out_dir.join("dataset.txt"), &labeled)?;
    let data = featurize(&labeled)?;
    let mut buf = Vec::new();
    let csv_path = out_dir.join("features.csv");
    write_feature_csv(&mut buf, &data).map_err(|source| PipelineError::Features {
        path: csv_path.clone(),
        source,
    })?;
    write(&csv_path, &String::from_utf8(buf).expect("CSV is UTF-8"))?;

    let mut reports = Vec::new();
    let mut benches = Vec::new();
    for a in Algorithm::ALL {
        let s = sweep(&data, a, &cfg.sweep_fractions, &cfg.sweep_seeds, cfg)?;
        write_sweep(out_dir, &s)?;
        benches.push(bench(&labeled, &s.best)?);
        reports.push(s.best);
    }
    let summary = LabelSummary::of(&labeled);
    let prevalence = majority_share(&labeled);
    let header = format!(
        "master seed {master_seed}, {} records, {summary}, majority class {:.4}\n\n",
        labeled.records.len(),
        prevalence
    );
    write(
        &out_dir.join("summary.txt"),
        &format!("{header}{}", summary_table(&reports, false)),
    )?;
    write(
        &out_dir.join("summary.timing.txt"),
        &format!(
            "{header}{}\n{}",
            summary_table(&reports, true),
            bench_table(&benches)
        ),
    )?;
    Ok(E2eResult {
        master_seed,
        regenerations,
        dataset: labeled,
        majority_prevalence: prevalence,
        reports,
        benches,
        warnings,
    })
}
