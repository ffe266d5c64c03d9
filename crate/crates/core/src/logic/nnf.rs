use super::formula::Formula;

/// Negation normal form: `Implies` eliminated, negations pushed onto atoms,
/// negated constants folded.
pub fn to_nnf(f: &Formula) -> Formula {
    pos(f)
}

fn pos(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => neg(a),
        Formula::And(a, b) => Formula::and(pos(a), pos(b)),
        Formula::Or(a, b) => Formula::or(pos(a), pos(b)),
        Formula::Implies(a, b) => Formula::or(neg(a), pos(b)),
        Formula::Next(a) => Formula::next(pos(a)),
        Formula::Finally(a) => Formula::finally(pos(a)),
        Formula::Globally(a) => Formula::globally(pos(a)),
        Formula::Until(a, b) => Formula::until(pos(a), pos(b)),
        Formula::Release(a, b) => Formula::release(pos(a), pos(b)),
    }
}

/// NNF of `!f`.
fn neg(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(_) => Formula::not(f.clone()),
        Formula::Not(a) => pos(a),
        Formula::And(a, b) => Formula::or(neg(a), neg(b)),
        Formula::Or(a, b) => Formula::and(neg(a), neg(b)),
        Formula::Implies(a, b) => Formula::and(pos(a), neg(b)),
        Formula::Next(a) => Formula::next(neg(a)),
        Formula::Finally(a) => Formula::globally(neg(a)),
        Formula::Globally(a) => Formula::finally(neg(a)),
        Formula::Until(a, b) => Formula::release(neg(a), neg(b)),
        Formula::Release(a, b) => Formula::until(neg(a), neg(b)),
    }
}

/// True when negation only sits directly on atoms and no `Implies` remains.
pub fn is_nnf(f: &Formula) -> bool {
    f.nodes().iter().all(|n| match n {
        Formula::Implies(..) => false,
        Formula::Not(a) => matches!(**a, Formula::Atom(_)),
        _ => true,
    })
}
