use std::fmt;

/// LTL abstract syntax tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

/// Node kinds, in the fixed order used by the generator and the feature
/// schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Atom,
    True,
    False,
    Not,
    Next,
    Finally,
    Globally,
    And,
    Or,
    Implies,
    Until,
    Release,
}

impl NodeKind {
    pub const ALL: [NodeKind; 12] = [
        NodeKind::Atom,
        NodeKind::True,
        NodeKind::False,
        NodeKind::Not,
        NodeKind::Next,
        NodeKind::Finally,
        NodeKind::Globally,
        NodeKind::And,
        NodeKind::Or,
        NodeKind::Implies,
        NodeKind::Until,
        NodeKind::Release,
    ];

    pub fn arity(self) -> usize {
        match self {
            NodeKind::Atom | NodeKind::True | NodeKind::False => 0,
            NodeKind::Not | NodeKind::Next | NodeKind::Finally | NodeKind::Globally => 1,
            NodeKind::And
            | NodeKind::Or
            | NodeKind::Implies
            | NodeKind::Until
            | NodeKind::Release => 2,
        }
    }

    pub fn is_temporal(self) -> bool {
        matches!(
            self,
            NodeKind::Next
                | NodeKind::Finally
                | NodeKind::Globally
                | NodeKind::Until
                | NodeKind::Release
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Atom => "atom",
            NodeKind::True => "true",
            NodeKind::False => "false",
            NodeKind::Not => "not",
            NodeKind::Next => "next",
            NodeKind::Finally => "finally",
            NodeKind::Globally => "globally",
            NodeKind::And => "and",
            NodeKind::Or => "or",
            NodeKind::Implies => "implies",
            NodeKind::Until => "until",
            NodeKind::Release => "release",
        }
    }

    pub fn from_name(s: &str) -> Option<NodeKind> {
        NodeKind::ALL.iter().copied().find(|k| k.name() == s)
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Formula::True => NodeKind::True,
            Formula::False => NodeKind::False,
            Formula::Atom(_) => NodeKind::Atom,
            Formula::Not(_) => NodeKind::Not,
            Formula::And(..) => NodeKind::And,
            Formula::Or(..) => NodeKind::Or,
            Formula::Implies(..) => NodeKind::Implies,
            Formula::Next(_) => NodeKind::Next,
            Formula::Finally(_) => NodeKind::Finally,
            Formula::Globally(_) => NodeKind::Globally,
            Formula::Until(..) => NodeKind::Until,
            Formula::Release(..) => NodeKind::Release,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Next(a) | Formula::Finally(a) | Formula::Globally(a) => {
                vec![a]
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => vec![a, b],
        }
    }

    /// Pre-order traversal of every node.
    pub fn nodes(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            let ch = f.children();
            stack.extend(ch.into_iter().rev());
        }
        out
    }

    /// Total AST node count.
    pub fn length(&self) -> usize {
        self.nodes().len()
    }

    /// Height of the tree; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Distinct atom names in first-occurrence order.
    pub fn atoms(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for n in self.nodes() {
            if let Formula::Atom(a) = n {
                if !seen.contains(&a.as_str()) {
                    seen.push(a.as_str());
                }
            }
        }
        seen
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.nodes().iter().filter(|n| n.kind() == kind).count()
    }

    pub fn temporal_count(&self) -> usize {
        self.nodes().iter().filter(|n| n.kind().is_temporal()).count()
    }
}

pub fn formula_length(f: &Formula) -> usize {
    f.length()
}

/// Operator spellings for printing.
pub(crate) struct Spelling {
    pub t: &'static str,
    pub f: &'static str,
    pub not: &'static str,
    pub and: &'static str,
    pub or: &'static str,
    pub implies: &'static str,
    pub next: &'static str,
    pub finally: &'static str,
    pub globally: &'static str,
    pub until: &'static str,
    pub release: &'static str,
}

pub(crate) const CANONICAL: Spelling = Spelling {
    t: "true",
    f: "false",
    not: "!",
    and: "&",
    or: "|",
    implies: "->",
    next: "X",
    finally: "F",
    globally: "G",
    until: "U",
    release: "R",
};

pub(crate) fn write_formula(out: &mut String, f: &Formula, sp: &Spelling) {
    let unary = |out: &mut String, op: &str, a: &Formula| {
        out.push('(');
        out.push_str(op);
        out.push(' ');
        write_formula(out, a, sp);
        out.push(')');
    };
    let binary = |out: &mut String, op: &str, a: &Formula, b: &Formula| {
        out.push('(');
        write_formula(out, a, sp);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(out, b, sp);
        out.push(')');
    };
    match f {
        Formula::True => out.push_str(sp.t),
        Formula::False => out.push_str(sp.f),
        Formula::Atom(a) => out.push_str(a),
        Formula::Not(a) => unary(out, sp.not, a),
        Formula::Next(a) => unary(out, sp.next, a),
        Formula::Finally(a) => unary(out, sp.finally, a),
        Formula::Globally(a) => unary(out, sp.globally, a),
        Formula::And(a, b) => binary(out, sp.and, a, b),
        Formula::Or(a, b) => binary(out, sp.or, a, b),
        Formula::Implies(a, b) => binary(out, sp.implies, a, b),
        Formula::Until(a, b) => binary(out, sp.until, a, b),
        Formula::Release(a, b) => binary(out, sp.release, a, b),
    }
}

/// Fully parenthesized canonical text, e.g. `(G p)` or `(p U (X q))`.
pub fn format_ltl(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, &CANONICAL);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_ltl(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn canonical_text() {
        assert_eq!(format_ltl(&Formula::globally(p())), "(G p)");
        assert_eq!(format_ltl(&Formula::until(p(), q())), "(p U q)");
        assert_eq!(
            format_ltl(&Formula::implies(Formula::not(p()), Formula::True)),
            "((! p) -> true)"
        );
    }

    #[test]
    fn lengths() {
        assert_eq!(formula_length(&p()), 1);
        assert_eq!(formula_length(&Formula::until(p(), Formula::next(q()))), 4);
        assert_eq!(Formula::until(p(), Formula::next(q())).depth(), 3);
        assert_eq!(p().depth(), 1);
    }

    #[test]
    fn kind_arity_matches_children() {
        let f = Formula::release(Formula::finally(p()), Formula::or(q(), Formula::False));
        for n in f.nodes() {
            assert_eq!(n.kind().arity(), n.children().len());
        }
    }

    #[test]
    fn atoms_first_occurrence() {
        let f = Formula::and(q(), Formula::or(p(), q()));
        assert_eq!(f.atoms(), vec!["q", "p"]);
    }
}
