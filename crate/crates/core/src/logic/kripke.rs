//! Kripke structures, their validation and the line-oriented text format:
//!
//! ```text
//! states 2
//! init 0
//! ap p q
//! s 0 labels p succ 1
//! s 1 labels q succ 0 1
//! ```

use std::fmt;

use thiserror::Error;

/// Largest supported alphabet; labels are stored as 64-bit masks.
pub const MAX_ALPHABET: usize = 64;

/// Words the text formats use as keywords; they cannot name propositions.
pub const RESERVED_NAMES: [&str; 4] = ["true", "false", "labels", "succ"];

/// A subset of the alphabet, bit `i` standing for `alphabet[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LabelSet(pub u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_indices(ix: impl IntoIterator<Item = usize>) -> Self {
        LabelSet(ix.into_iter().fold(0u64, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KripkeStructure {
    pub alphabet: Vec<String>,
    pub initial: Vec<usize>,
    pub successors: Vec<Vec<usize>>,
    pub labels: Vec<LabelSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    LabelCountMismatch { states: usize, labels: usize },
    EmptyInitial,
    InitialOutOfRange { state: usize },
    NonTotal { state: usize },
    SuccessorOutOfRange { state: usize, target: usize },
    LabelOutOfAlphabet { state: usize },
    AlphabetTooLarge { size: usize },
    InvalidApName { index: usize, name: String },
    DuplicateAp { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "no states"),
            Violation::LabelCountMismatch { states, labels } => {
                write!(f, "{labels} label sets for {states} states")
            }
            Violation::EmptyInitial => write!(f, "empty initial set"),
            Violation::InitialOutOfRange { state } => {
                write!(f, "initial state {state} out of range")
            }
            Violation::NonTotal { state } => write!(f, "non-total at state {state}"),
            Violation::SuccessorOutOfRange { state, target } => {
                write!(f, "state {state} has successor {target} out of range")
            }
            Violation::LabelOutOfAlphabet { state } => {
                write!(f, "state {state} is labeled outside the alphabet")
            }
            Violation::AlphabetTooLarge { size } => {
                write!(f, "alphabet of {size} exceeds {MAX_ALPHABET} propositions")
            }
            Violation::InvalidApName { index, name } => {
                write!(f, "proposition {index} has invalid name `{name}`")
            }
            Violation::DuplicateAp { name } => write!(f, "duplicate proposition `{name}`"),
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Reports every invariant breach; an empty list means the structure is valid.
pub fn validate_kripke(k: &KripkeStructure) -> Vec<Violation> {
    let mut v = Vec::new();
    let n = k.successors.len();
    if n == 0 {
        v.push(Violation::NoStates);
    }
    if k.labels.len() != n {
        v.push(Violation::LabelCountMismatch {
            states: n,
            labels: k.labels.len(),
        });
    }
    if k.initial.is_empty() {
        v.push(Violation::EmptyInitial);
    }
    for &i in &k.initial {
        if i >= n {
            v.push(Violation::InitialOutOfRange { state: i });
        }
    }
    for (s, succ) in k.successors.iter().enumerate() {
        if succ.is_empty() {
            v.push(Violation::NonTotal { state: s });
        }
        for &t in succ {
            if t >= n {
                v.push(Violation::SuccessorOutOfRange { state: s, target: t });
            }
        }
    }
    let m = k.alphabet.len();
    if m > MAX_ALPHABET {
        v.push(Violation::AlphabetTooLarge { size: m });
    }
    let allowed = if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
    for (s, l) in k.labels.iter().enumerate() {
        if l.0 & !allowed != 0 {
            v.push(Violation::LabelOutOfAlphabet { state: s });
        }
    }
    for (i, name) in k.alphabet.iter().enumerate() {
        if !is_identifier(name) || RESERVED_NAMES.contains(&name.as_str()) {
            v.push(Violation::InvalidApName {
                index: i,
                name: name.clone(),
            });
        }
        if k.alphabet[..i].contains(name) {
            v.push(Violation::DuplicateAp { name: name.clone() });
        }
    }
    v
}

impl KripkeStructure {
    pub fn state_count(&self) -> usize {
        self.successors.len()
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == name)
    }

    pub fn is_edge(&self, from: usize, to: usize) -> bool {
        self.successors.get(from).is_some_and(|s| s.contains(&to))
    }

    pub fn label_names(&self, state: usize) -> Vec<&str> {
        self.labels[state]
            .indices()
            .filter_map(|i| self.alphabet.get(i).map(String::as_str))
            .collect()
    }

    /// Serializes into the line-oriented text format (trailing newline
    /// included).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("states {}\n", self.state_count()));
        out.push_str("init");
        for i in &self.initial {
            out.push_str(&format!(" {i}"));
        }
        out.push('\n');
        out.push_str("ap");
        for a in &self.alphabet {
            out.push(' ');
            out.push_str(a);
        }
        out.push('\n');
        for s in 0..self.state_count() {
            out.push_str(&format!("s {s} labels"));
            for name in self.label_names(s) {
                out.push(' ');
                out.push_str(name);
            }
            out.push_str(" succ");
            for t in &self.successors[s] {
                out.push_str(&format!(" {t}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct KripkeParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> KripkeParseError {
    KripkeParseError {
        line,
        message: message.into(),
    }
}

fn parse_index(line: usize, tok: &str) -> Result<usize, KripkeParseError> {
    tok.parse()
        .map_err(|_| perr(line, format!("expected a state index, found `{tok}`")))
}

/// Parses the text format. Line numbers in errors are 1-based and offset by
/// `first_line - 1`, so callers embedding the block can report file lines.
pub fn parse_kripke_at(text: &str, first_line: usize) -> Result<KripkeStructure, KripkeParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + first_line, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut expect = |kw: &str| -> Result<(usize, Vec<&str>), KripkeParseError> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| perr(first_line, format!("missing `{kw}` line")))?;
        let mut toks = l.split_whitespace();
        if toks.next() != Some(kw) {
            return Err(perr(ln, format!("expected `{kw}` line")));
        }
        Ok((ln, toks.collect()))
    };

    let (ln, toks) = expect("states")?;
    let n = match toks.as_slice() {
        [t] => parse_index(ln, t)?,
        _ => return Err(perr(ln, "`states` takes exactly one count")),
    };
    let (ln, toks) = expect("init")?;
    let initial = toks
        .iter()
        .map(|t| parse_index(ln, t))
        .collect::<Result<Vec<_>, _>>()?;
    let (_, toks) = expect("ap")?;
    let alphabet: Vec<String> = toks.iter().map(|s| s.to_string()).collect();

    let mut successors: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut labels = vec![LabelSet::EMPTY; n];
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 4 || toks[0] != "s" || toks[2] != "labels" {
            return Err(perr(ln, "expected `s <id> labels ... succ ...`"));
        }
        let id = parse_index(ln, toks[1])?;
        if id >= n {
            return Err(perr(ln, format!("state {id} out of range for {n} states")));
        }
        if successors[id].is_some() {
            return Err(perr(ln, format!("state {id} listed twice")));
        }
        let succ_at = toks
            .iter()
            .position(|t| *t == "succ")
            .ok_or_else(|| perr(ln, "missing `succ`"))?;
        let mut set = LabelSet::EMPTY;
        for name in &toks[3..succ_at] {
            let i = alphabet
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| perr(ln, format!("label `{name}` not in alphabet")))?;
            set.insert(i);
        }
        labels[id] = set;
        let succ = toks[succ_at + 1..]
            .iter()
            .map(|t| parse_index(ln, t))
            .collect::<Result<Vec<_>, _>>()?;
        successors[id] = Some(succ);
    }
    let successors = successors
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| perr(first_line, format!("state {i} is not described"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KripkeStructure {
        alphabet,
        initial,
        successors,
        labels,
    })
}

pub fn parse_kripke(text: &str) -> Result<KripkeStructure, KripkeParseError> {
    parse_kripke_at(text, 1)
}
