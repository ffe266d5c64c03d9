//! `ltloracle` — generate, label, featurize, train, evaluate, benchmark and
//! sweep LTL verdict predictors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ltloracle::pipeline::{self, bench_table, summary_table, Config, PipelineError};

#[derive(Parser)]
#[command(name = "ltloracle", version, about)]
struct Cli {
    #[command(flatten)]
    opts: ConfigOpts,
    #[command(subcommand)]
    command: Option<Cmd>,
}

/// Config sources, applied in order: defaults, `--config`, named flags,
/// `--set`.
#[derive(Args)]
struct ConfigOpts {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    count: Option<String>,
    #[arg(long, global = true)]
    formula_length: Option<String>,
    /// builtin | external | auto
    #[arg(long, global = true)]
    labeler: Option<String>,
    /// Path to the NuSMV binary.
    #[arg(long, global = true)]
    nusmv: Option<String>,
    #[arg(long, global = true)]
    timeout_seconds: Option<String>,
    /// Keep external-checker temp files.
    #[arg(long, global = true)]
    keep_temps: bool,
    /// Labeling threads (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<String>,
    /// rf | knn | dt | lr
    #[arg(long, global = true)]
    algorithm: Option<String>,
    #[arg(long, global = true)]
    fraction: Option<String>,
    #[arg(long, global = true)]
    split_seed: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write `count` unlabeled instances.
    Generate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Label instances with a model checker.
    Label {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the feature CSV of a labeled dataset.
    Features {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split, train one algorithm and evaluate it.
    TrainEval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Compare checking time with prediction time.
    Bench {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Also write the result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train-evaluate over the fraction × seed grid and keep the best cell.
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Full pipeline over all four algorithms.
    E2e {
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn resolve(opts: &ConfigOpts) -> Result<Config, PipelineError> {
    let mut cfg = Config::default();
    if let Some(p) = &opts.config {
        let text = fs::read_to_string(p).map_err(|source| PipelineError::Io {
            path: p.clone(),
            source,
        })?;
        cfg.apply_text(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", p.display())))?;
    }
    let named = [
        ("seed", &opts.seed),
        ("count", &opts.count),
        ("formula_length", &opts.formula_length),
        ("labeler", &opts.labeler),
        ("nusmv", &opts.nusmv),
        ("timeout_seconds", &opts.timeout_seconds),
        ("workers", &opts.workers),
        ("algorithm", &opts.algorithm),
        ("fraction", &opts.fraction),
        ("split_seed", &opts.split_seed),
    ];
    for (k, v) in named {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if opts.keep_temps {
        cfg.keep_temps = true;
    }
    for kv in &opts.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = resolve(&cli.opts)?;
    if cli.opts.show_config {
        print!("{}", cfg.render());
        return Ok(());
    }
    let Some(cmd) = cli.command else {
        return Err(PipelineError::Config(
            "no subcommand given (see --help)".into(),
        ));
    };
    match cmd {
        Cmd::Generate { out } => {
            let ds = pipeline::cmd_generate(&cfg, &out)?;
            println!("generated {} instances -> {}", ds.records.len(), out.display());
        }
        Cmd::Label { input, out } => {
            let s = pipeline::cmd_label(&input, &out, &cfg)?;
            println!("{s}");
        }
        Cmd::Features { dataset, out } => {
            let n = pipeline::cmd_features(&dataset, &out)?;
            println!("{n} feature rows -> {}", out.display());
        }
        Cmd::TrainEval {
            dataset,
            report,
            model,
        } => {
            let r = pipeline::cmd_train_eval(&dataset, &cfg, &report, model.as_deref())?;
            print!("{}", summary_table(&[r], true));
        }
        Cmd::Bench {
            dataset,
            report,
            out,
        } => {
            let b = pipeline::cmd_bench(&dataset, &report)?;
            print!("{}", bench_table(std::slice::from_ref(&b)));
            if let Some(p) = out {
                write_json(&p, &b)?;
            }
        }
        Cmd::Sweep { dataset, out_dir } => {
            let s = pipeline::cmd_sweep(&dataset, &cfg, &out_dir)?;
            print!("{}", summary_table(&[s.best], true));
        }
        Cmd::E2e { out_dir } => {
            let r = pipeline::cmd_e2e(&cfg, &out_dir)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", fs::read_to_string(out_dir.join("summary.timing.txt")).unwrap_or_default());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
