//! Recursive-descent parser for LTL text.
//!
//! ```text
//! formula  ::= implies
//! implies  ::= or ( "->" implies )?
//! or       ::= and ( "|" or )?
//! and      ::= binary ( "&" and )?
//! binary   ::= unary ( ( "U" | "R" ) binary )?
//! unary    ::= ( "!" | "X" | "F" | "G" ) unary | primary
//! primary  ::= "true" | "false" | ident | "(" formula ")"
//! ident    ::= [a-z][a-z0-9_]*
//! ```
//!
//! All binary operators are right-associative. Whitespace is insignificant.

use super::formula::Formula;
use super::LtlError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    Release,
    LParen,
    RParen,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Implies => "`->`".into(),
        Tok::Next => "`X`".into(),
        Tok::Finally => "`F`".into(),
        Tok::Globally => "`G`".into(),
        Tok::Until => "`U`".into(),
        Tok::Release => "`R`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LtlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Tok::Implies
                } else {
                    return Err(LtlError::syntax(start, "expected `->`"));
                }
            }
            b'X' => Tok::Next,
            b'F' => Tok::Finally,
            b'G' => Tok::Globally,
            b'U' => Tok::Until,
            b'R' => Tok::Release,
            b'a'..=b'z' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_lowercase() || bytes[j].is_ascii_digit() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = &text[i..j];
                i = j;
                out.push((
                    start,
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    },
                ));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(LtlError::syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn implies(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.and()?;
        if self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.or()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.binary()?;
        if self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.and()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn binary(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.bump();
                let rhs = self.binary()?;
                Ok(Formula::until(lhs, rhs))
            }
            Some(Tok::Release) => {
                self.bump();
                let rhs = self.binary()?;
                Ok(Formula::release(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        let ctor: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Next) => Formula::next,
            Some(Tok::Finally) => Formula::finally,
            Some(Tok::Globally) => Formula::globally,
            _ => return self.primary(),
        };
        self.bump();
        Ok(ctor(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, LtlError> {
        let at = self.offset();
        match self.bump() {
            Some((_, Tok::True)) => Ok(Formula::True),
            Some((_, Tok::False)) => Ok(Formula::False),
            Some((_, Tok::Ident(name))) => {
                if self.alphabet.contains(&name) {
                    Ok(Formula::Atom(name))
                } else {
                    Err(LtlError::UnknownAtom { name, position: at })
                }
            }
            Some((_, Tok::LParen)) => {
                let inner = self.implies()?;
                let close = self.offset();
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((_, t)) => Err(LtlError::syntax(
                        close,
                        format!("expected `)`, found {}", describe(&t)),
                    )),
                    None => Err(LtlError::syntax(close, "expected `)`, found end of input")),
                }
            }
            Some((_, t)) => Err(LtlError::syntax(
                at,
                format!("expected a formula, found {}", describe(&t)),
            )),
            None => Err(LtlError::syntax(at, "expected a formula, found end of input")),
        }
    }
}

/// Parses `text` into a formula whose atoms must all occur in `alphabet`.
pub fn parse_ltl(text: &str, alphabet: &[String]) -> Result<Formula, LtlError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(LtlError::syntax(0, "empty formula"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        alphabet,
    };
    let f = p.implies()?;
    if let Some(t) = p.peek().cloned() {
        return Err(LtlError::syntax(
            p.offset(),
            format!("unexpected trailing {}", describe(&t)),
        ));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::format_ltl;

    fn ab(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn globally_atom() {
        let f = parse_ltl("G p", &ab(&["p"])).unwrap();
        assert_eq!(f, Formula::globally(Formula::atom("p")));
    }

    #[test]
    fn until_next() {
        let f = parse_ltl("p U (X q)", &ab(&["p", "q"])).unwrap();
        assert_eq!(
            f,
            Formula::until(Formula::atom("p"), Formula::next(Formula::atom("q")))
        );
    }

    #[test]
    fn unknown_atom_is_named() {
        match parse_ltl("G (p -> X q)", &ab(&["p"])) {
            Err(LtlError::UnknownAtom { name, position }) => {
                assert_eq!(name, "q");
                assert_eq!(position, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let a = ab(&["p", "q", "r"]);
        assert_eq!(
            format_ltl(&parse_ltl("p -> q -> r", &a).unwrap()),
            "(p -> (q -> r))"
        );
        assert_eq!(
            format_ltl(&parse_ltl("p | q & r", &a).unwrap()),
            "(p | (q & r))"
        );
        assert_eq!(
            format_ltl(&parse_ltl("p & q U r", &a).unwrap()),
            "(p & (q U r))"
        );
        assert_eq!(
            format_ltl(&parse_ltl("p U q R r", &a).unwrap()),
            "(p U (q R r))"
        );
        assert_eq!(
            format_ltl(&parse_ltl("!p U X q", &a).unwrap()),
            "((! p) U (X q))"
        );
        assert_eq!(format_ltl(&parse_ltl("GFp", &a).unwrap()), "(G (F p))");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let a = ab(&["p"]);
        match parse_ltl("p &", &a) {
            Err(LtlError::Syntax { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_ltl("(p", &a) {
            Err(LtlError::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_ltl("p # p", &a) {
            Err(LtlError::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_ltl("p p", &a), Err(LtlError::Syntax { .. })));
        assert!(matches!(parse_ltl("   ", &a), Err(LtlError::Syntax { .. })));
        assert!(matches!(parse_ltl("p - p", &a), Err(LtlError::Syntax { .. })));
    }

    #[test]
    fn constants() {
        let f = parse_ltl("true U false", &[]).unwrap();
        assert_eq!(f, Formula::until(Formula::True, Formula::False));
    }
}
