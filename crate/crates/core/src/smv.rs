//! Bridge to an external NuSMV binary: model emission, invocation and
//! outcome parsing.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::checker::Outcome;
use crate::logic::{write_formula, Formula, KripkeStructure, Spelling};

/// Environment variable that overrides the configured binary path.
pub const BINARY_ENV: &str = "LTLORACLE_NUSMV";

const NUSMV: Spelling = Spelling {
    t: "TRUE",
    f: "FALSE",
    not: "!",
    and: "&",
    or: "|",
    implies: "->",
    next: "X",
    finally: "F",
    globally: "G",
    until: "U",
    release: "V",
};

// Lower-case words NuSMV reserves, plus our own state variable.
const SMV_RESERVED: &[&str] = &[
    "state", "case", "esac", "init", "next", "mod", "xor", "xnor", "self", "union", "in", "word",
    "array", "of", "boolean", "integer", "real", "signed", "unsigned", "extend", "resize",
    "sizeof", "toint", "bool", "count", "abs", "max", "min", "floor", "process", "running",
    "swconst", "uwconst", "word1", "clock", "time",
];

/// Name under which an atom appears in the emitted model. Reserved words and
/// names already starting with `ap_` get an `ap_` prefix, which keeps the
/// mapping injective.
pub fn smv_atom_name(name: &str) -> String {
    if SMV_RESERVED.contains(&name) || name.starts_with("ap_") {
        format!("ap_{name}")
    } else {
        name.to_string()
    }
}

fn rename_atoms(f: &Formula) -> Formula {
    use Formula::*;
    let r = |x: &Formula| Box::new(rename_atoms(x));
    match f {
        True => True,
        False => False,
        Atom(a) => Atom(smv_atom_name(a)),
        Not(a) => Not(r(a)),
        Next(a) => Next(r(a)),
        Finally(a) => Finally(r(a)),
        Globally(a) => Globally(r(a)),
        And(a, b) => And(r(a), r(b)),
        Or(a, b) => Or(r(a), r(b)),
        Implies(a, b) => Implies(r(a), r(b)),
        Until(a, b) => Until(r(a), r(b)),
        Release(a, b) => Release(r(a), r(b)),
    }
}

fn state_set(states: &[usize]) -> String {
    let names: Vec<String> = states.iter().map(|s| format!("s{s}")).collect();
    format!("{{{}}}", names.join(", "))
}

/// SMV model whose single `LTLSPEC` is `f` over the structure `k`.
/// The output is a pure function of its inputs.
pub fn emit_smv(k: &KripkeStructure, f: &Formula) -> String {
    let n = k.state_count();
    let mut out = String::new();
    out.push_str("MODULE main\nVAR\n");
    let all: Vec<usize> = (0..n).collect();
    let _ = writeln!(out, "  state : {};", state_set(&all));
    out.push_str("ASSIGN\n");
    let _ = writeln!(out, "  init(state) := {};", state_set(&k.initial));
    out.push_str("  next(state) :=\n    case\n");
    for (s, succ) in k.successors.iter().enumerate() {
        let _ = writeln!(out, "      state = s{s} : {};", state_set(succ));
    }
    out.push_str("    esac;\n");
    if !k.alphabet.is_empty() {
        out.push_str("DEFINE\n");
        for (i, a) in k.alphabet.iter().enumerate() {
            let holders: Vec<String> = (0..n)
                .filter(|&s| k.labels[s].contains(i))
                .map(|s| format!("state = s{s}"))
                .collect();
            let body = if holders.is_empty() {
                "FALSE".to_string()
            } else {
                holders.join(" | ")
            };
            let _ = writeln!(out, "  {} := {body};", smv_atom_name(a));
        }
    }
    out.push_str("LTLSPEC\n  ");
    write_formula(&mut out, &rename_atoms(f), &NUSMV);
    out.push('\n');
    out
}

#[derive(Debug, Error)]
pub enum SmvError {
    #[error("cannot start `{binary}`: {source}")]
    Spawn {
        binary: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("external checker timed out after {seconds:.6} s")]
    Timeout { seconds: f64 },
    #[error("unrecognized checker output: {0}")]
    UnrecognizedOutput(String),
    #[error("temporary file: {0}")]
    Io(#[from] io::Error),
}

/// Outcome reported by the first `-- specification ... is true|false` line.
pub fn parse_nusmv_output(text: &str) -> Result<Outcome, SmvError> {
    for line in text.lines() {
        let line = line.trim();
        if !line.starts_with("-- specification ") {
            continue;
        }
        if line.ends_with(" is true") {
            return Ok(Outcome::Holds);
        }
        if line.ends_with(" is false") {
            return Ok(Outcome::Violated);
        }
    }
    let excerpt: String = text.chars().take(200).collect();
    Err(SmvError::UnrecognizedOutput(if excerpt.trim().is_empty() {
        "no specification result line (empty output)".to_string()
    } else {
        format!("no specification result line in {excerpt:?}")
    }))
}

/// Binary to run: the environment override, else `configured`, else
/// `NuSMV` found on `PATH`.
pub fn resolve_binary(configured: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = std::env::var_os(BINARY_ENV).filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(p));
    }
    if let Some(p) = configured {
        return Some(p.to_path_buf());
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join("NuSMV"))
        .find(|p| p.is_file())
}

#[derive(Debug, Clone)]
pub struct ExternalOptions {
    pub binary: PathBuf,
    pub timeout: Duration,
    /// Keep the model and output files instead of deleting them.
    pub keep_temps: bool,
}

#[derive(Debug, Clone)]
pub struct ExternalRun {
    pub outcome: Outcome,
    pub seconds: f64,
    /// Directory holding `model.smv` and `output.txt` when temps are kept.
    pub kept: Option<PathBuf>,
}

/// Runs `<binary> <model.smv>` and returns its outcome with wall time.
pub fn external_check(
    k: &KripkeStructure,
    f: &Formula,
    binary: &Path,
    timeout: Duration,
) -> Result<(Outcome, f64), SmvError> {
    let run = external_check_with(
        k,
        f,
        &ExternalOptions {
            binary: binary.to_path_buf(),
            timeout,
            keep_temps: false,
        },
    )?;
    Ok((run.outcome, run.seconds))
}

pub fn external_check_with(
    k: &KripkeStructure,
    f: &Formula,
    opts: &ExternalOptions,
) -> Result<ExternalRun, SmvError> {
    let dir = tempfile::Builder::new().prefix("ltloracle-smv-").tempdir()?;
    let model = dir.path().join("model.smv");
    let output = dir.path().join("output.txt");
    fs::write(&model, emit_smv(k, f))?;
    let (text, seconds) = run_binary(&opts.binary, &model, &output, opts.timeout)?;
    let outcome = parse_nusmv_output(&text)?;
    let kept = opts.keep_temps.then(|| dir.keep());
    Ok(ExternalRun {
        outcome,
        seconds,
        kept,
    })
}

fn spawn(binary: &Path, model: &Path, out: &Path) -> Result<std::process::Child, SmvError> {
    let mut attempts = 0;
    loop {
        let stdout = fs::File::create(out)?;
        let r = Command::new(binary)
            .arg(model)
            .stdin(Stdio::null())
            .stdout(stdout)
            .stderr(Stdio::piped())
            .spawn();
        match r {
            // A freshly written executable can be briefly busy while another
            // thread's fork still holds its write handle.
            Err(e) if e.kind() == io::ErrorKind::ExecutableFileBusy && attempts < 50 => {
                attempts += 1;
                thread::sleep(Duration::from_millis(10));
            }
            Err(source) => {
                return Err(SmvError::Spawn {
                    binary: binary.to_path_buf(),
                    source,
                })
            }
            Ok(child) => return Ok(child),
        }
    }
}

fn run_binary(
    binary: &Path,
    model: &Path,
    out: &Path,
    timeout: Duration,
) -> Result<(String, f64), SmvError> {
    let start = Instant::now();
    let mut child = spawn(binary, model, out)?;
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let drain = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = io::Read::read_to_end(&mut stderr, &mut buf);
        buf
    });
    let mut pause = Duration::from_micros(200);
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SmvError::Timeout {
                seconds: timeout.as_secs_f64(),
            });
        }
        thread::sleep(pause.min(timeout.saturating_sub(start.elapsed())));
        pause = (pause * 2).min(Duration::from_millis(20));
    }
    let seconds = start.elapsed().as_secs_f64();
    if seconds > timeout.as_secs_f64() {
        return Err(SmvError::Timeout {
            seconds: timeout.as_secs_f64(),
        });
    }
    let err = drain.join().unwrap_or_default();
    let mut text = fs::read_to_string(out)?;
    if parse_nusmv_output(&text).is_err() && !err.is_empty() {
        text.push_str(&String::from_utf8_lossy(&err));
    }
    Ok((text, seconds))
}
