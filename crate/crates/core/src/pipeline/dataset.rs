//! Instance and dataset files.
//!
//! ```text
//! format ltloracle-dataset 1
//! records 2
//! failure 5 resource limit exceeded: product states above 2000000
//!
//! record 0
//! seed 17
//! formula (G (p -> (X q)))
//! verdict violated builtin
//! lasso 0 | 1 2
//! states 3
//! init 0
//! ap p q
//! s 0 labels p succ 1
//! s 1 labels succ 2
//! s 2 labels q succ 1
//! end
//! ```
//!
//! Unlabeled instance files omit the `verdict` and `lasso` lines. Label
//! wall times live in a `<file>.timing` sidecar so the dataset itself is
//! reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::checker::{Lasso, Outcome};
use crate::logic::{format_ltl, parse_kripke_at, parse_ltl, Formula, KripkeStructure};

const MAGIC: &str = "format ltloracle-dataset 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeler {
    Builtin,
    External,
}

impl Labeler {
    pub fn name(self) -> &'static str {
        match self {
            Labeler::Builtin => "builtin",
            Labeler::External => "external",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub outcome: Outcome,
    pub labeler: Labeler,
    pub lasso: Option<Lasso>,
    /// Wall time of the labeling check; lives in the timing sidecar.
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// Position in the generated instance file.
    pub index: usize,
    pub seed: u64,
    pub kripke: KripkeStructure,
    pub formula: Formula,
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub records: Vec<Record>,
    pub failures: Vec<Failure>,
}

impl Dataset {
    pub fn is_labeled(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.label.is_some())
    }

    pub fn outcomes(&self) -> Vec<Outcome> {
        self.records
            .iter()
            .filter_map(|r| r.label.as_ref().map(|l| l.outcome))
            .collect()
    }

    pub fn holds_count(&self) -> usize {
        self.outcomes().iter().filter(|o| o.holds()).count()
    }

    /// The common formula length, if all records share one.
    pub fn length_class(&self) -> Option<usize> {
        let first = self.records.first()?.formula.length();
        self.records
            .iter()
            .all(|r| r.formula.length() == first)
            .then_some(first)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "records {}", self.records.len());
        for f in &self.failures {
            let _ = writeln!(out, "failure {} {}", f.index, f.message.replace('\n', " "));
        }
        for r in &self.records {
            let _ = writeln!(out, "\nrecord {}", r.index);
            let _ = writeln!(out, "seed {}", r.seed);
            let _ = writeln!(out, "formula {}", format_ltl(&r.formula));
            if let Some(l) = &r.label {
                let v = if l.outcome.holds() { "holds" } else { "violated" };
                let _ = writeln!(out, "verdict {v} {}", l.labeler.name());
                if let Some(lasso) = &l.lasso {
                    let join = |xs: &[usize]| {
                        xs.iter().map(|x| format!(" {x}")).collect::<String>()
                    };
                    let _ = writeln!(out, "lasso{} |{}", join(&lasso.stem), join(&lasso.cycle));
                }
            }
            out.push_str(&r.kripke.to_text());
            out.push_str("end\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Dataset, DatasetParseError> {
        Parser {
            lines: text.lines().collect(),
            pos: 0,
        }
        .dataset()
    }

    /// Timing sidecar text: one `label_seconds <record> <seconds>` line per
    /// record with a known time.
    pub fn timing_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            if let Some(s) = r.label.as_ref().and_then(|l| l.seconds) {
                let _ = writeln!(out, "label_seconds {} {s}", r.index);
            }
        }
        out
    }

    /// Fills label times from a sidecar.
    pub fn apply_timing(&mut self, text: &str) -> Result<(), DatasetParseError> {
        let times = parse_timing(text)?;
        for r in &mut self.records {
            if let (Some(l), Some(&s)) = (&mut r.label, times.get(&format!("label_seconds {}", r.index))) {
                l.seconds = Some(s);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct DatasetParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, DatasetParseError> {
    Err(DatasetParseError {
        line,
        message: message.into(),
    })
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let l = self.lines[self.pos].trim();
            self.pos += 1;
            if !l.is_empty() && !l.starts_with('#') {
                return Some((self.pos, l));
            }
        }
        None
    }

    fn keyword(&mut self, kw: &str) -> Result<(usize, &'a str), DatasetParseError> {
        match self.next() {
            Some((ln, l)) => match l.split_once(' ') {
                Some((k, rest)) if k == kw => Ok((ln, rest.trim())),
                _ => err(ln, format!("expected `{kw}` line")),
            },
            None => err(self.lines.len(), format!("unexpected end of file, expected `{kw}`")),
        }
    }

    fn dataset(mut self) -> Result<Dataset, DatasetParseError> {
        match self.next() {
            Some((_, l)) if l == MAGIC => {}
            Some((ln, _)) => return err(ln, format!("expected `{MAGIC}`")),
            None => return err(1, "empty file"),
        }
        let (ln, n) = self.keyword("records")?;
        let n: usize = n
            .parse()
            .or_else(|_| err(ln, format!("bad record count `{n}`")))?;
        let mut ds = Dataset::default();
        while let Some((ln, l)) = self.next() {
            if let Some(rest) = l.strip_prefix("failure ") {
                let (ix, msg) = rest.split_once(' ').unwrap_or((rest, ""));
                let index = ix
                    .parse()
                    .or_else(|_| err(ln, format!("bad failure index `{ix}`")))?;
                ds.failures.push(Failure {
                    index,
                    message: msg.to_string(),
                });
                continue;
            }
            self.pos -= 1;
            break;
        }
        for _ in 0..n {
            ds.records.push(self.record()?);
        }
        if let Some((ln, _)) = self.next() {
            return err(ln, format!("trailing content after {n} records"));
        }
        Ok(ds)
    }

    fn record(&mut self) -> Result<Record, DatasetParseError> {
        let (ln, ix) = self.keyword("record")?;
        let index = ix
            .parse()
            .or_else(|_| err(ln, format!("bad record index `{ix}`")))?;
        let (ln, s) = self.keyword("seed")?;
        let seed = s.parse().or_else(|_| err(ln, format!("bad seed `{s}`")))?;
        let (formula_line, formula_text) = self.keyword("formula")?;
        let mut label = None;
        let (mut ln, mut l) = self
            .next()
            .ok_or_else(|| DatasetParseError {
                line: self.lines.len(),
                message: "truncated record".into(),
            })?;
        if let Some(rest) = l.strip_prefix("verdict ") {
            let outcome = match rest.split_whitespace().next() {
                Some("holds") => Outcome::Holds,
                Some("violated") => Outcome::Violated,
                _ => return err(ln, "verdict must be `holds` or `violated`"),
            };
            let labeler = match rest.split_whitespace().nth(1) {
                Some("builtin") => Labeler::Builtin,
                Some("external") => Labeler::External,
                _ => return err(ln, "labeler must be `builtin` or `external`"),
            };
            label = Some(Label {
                outcome,
                labeler,
                lasso: None,
                seconds: None,
            });
            (ln, l) = self.next().ok_or_else(|| DatasetParseError {
                line: self.lines.len(),
                message: "truncated record".into(),
            })?;
            if let Some(rest) = l.strip_prefix("lasso") {
                let (stem, cycle) = rest
                    .split_once('|')
                    .ok_or_else(|| DatasetParseError {
                        line: ln,
                        message: "lasso needs `stem | cycle`".into(),
                    })?;
                let ints = |s: &str| -> Result<Vec<usize>, DatasetParseError> {
                    s.split_whitespace()
                        .map(|t| t.parse().or_else(|_| err(ln, format!("bad state `{t}`"))))
                        .collect()
                };
                let lasso = Lasso {
                    stem: ints(stem)?,
                    cycle: ints(cycle)?,
                };
                if let Some(lb) = &mut label {
                    lb.lasso = Some(lasso);
                }
                (ln, l) = self.next().ok_or_else(|| DatasetParseError {
                    line: self.lines.len(),
                    message: "truncated record".into(),
                })?;
            }
        }
        let kripke_start = ln;
        let mut block = String::new();
        loop {
            if l == "end" {
                break;
            }
            block.push_str(l);
            block.push('\n');
            (_, l) = self.next().ok_or_else(|| DatasetParseError {
                line: self.lines.len(),
                message: "missing `end`".into(),
            })?;
        }
        // Blank lines are skipped above, so line numbers inside the block are
        // approximate only when blank lines interleave it.
        let kripke = parse_kripke_at(&block, kripke_start).map_err(|e| DatasetParseError {
            line: e.line,
            message: e.message,
        })?;
        let formula = parse_ltl(formula_text, &kripke.alphabet).map_err(|e| DatasetParseError {
            line: formula_line,
            message: e.to_string(),
        })?;
        Ok(Record {
            index,
            seed,
            kripke,
            formula,
            label,
        })
    }
}

/// `key value` lines; the key is everything before the last space.
pub fn parse_timing(text: &str) -> Result<BTreeMap<String, f64>, DatasetParseError> {
    let mut out = BTreeMap::new();
    for (i, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l.rsplit_once(' ').ok_or_else(|| DatasetParseError {
            line: i + 1,
            message: "expected `key value`".into(),
        })?;
        let v: f64 = v.parse().or_else(|_| err(i + 1, format!("bad number `{v}`")))?;
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

/// Path of the timing sidecar of `p`.
pub fn timing_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".timing");
    PathBuf::from(s)
}
