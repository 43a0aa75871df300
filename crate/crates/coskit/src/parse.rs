//! Hand-rolled recursive-descent parsers for the five input languages.
//!
//! Shared ASCII grammar: atoms `[a-z][a-z0-9_]*`, negated atom `-a`, general
//! negation `-(...)` (classical and MLL only), units `t`/`f`/`o`, par or
//! disjunction `[A, B, ...]`, copar or conjunction `(A, B, ...)`. LKp uses
//! infix `&`, `|`, `->` and prefix `-`; MLL uses infix `*` (tensor) and `%`
//! (par); sequents are written `G1, G2 |- D1, D2` with either side possibly
//! empty.

use crate::error::Error;
use crate::syntax::{
    canon, Atom, ClassicalUnit, Formula, LbvUnit, LkpFormula, MllFormula, MllSequent, RawTerm,
    Sequent, Structure, Units,
};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn ident(&mut self) -> Result<String, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let ok = if self.pos == start {
                c.is_ascii_lowercase()
            } else {
                c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_'
            };
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an atom name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn finish(&mut self) -> Result<(), Error> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing input"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Deep-inference term grammar (classical and LBV)
// ---------------------------------------------------------------------------

trait UnitLexer: Units {
    fn lex_unit(name: &str) -> Option<Self>;
    /// Whether `-(...)` general negation is accepted by the parser.
    const GENERAL_NEG: bool;
}

impl UnitLexer for ClassicalUnit {
    fn lex_unit(name: &str) -> Option<Self> {
        match name {
            "t" => Some(ClassicalUnit::True),
            "f" => Some(ClassicalUnit::False),
            _ => None,
        }
    }
    const GENERAL_NEG: bool = true;
}

impl UnitLexer for LbvUnit {
    fn lex_unit(name: &str) -> Option<Self> {
        (name == "o").then_some(LbvUnit)
    }
    const GENERAL_NEG: bool = false;
}

fn term<U: UnitLexer>(cur: &mut Cursor) -> Result<RawTerm<U>, Error> {
    match cur.peek() {
        Some(b'[') => {
            cur.bump();
            let items = comma_list(cur, b']', term::<U>)?;
            Ok(RawTerm::Or(items))
        }
        Some(b'(') => {
            cur.bump();
            let items = comma_list(cur, b')', term::<U>)?;
            Ok(RawTerm::And(items))
        }
        Some(b'-') => {
            cur.bump();
            match cur.peek() {
                Some(b'[') | Some(b'(') if U::GENERAL_NEG => {
                    Ok(RawTerm::Neg(Box::new(term::<U>(cur)?)))
                }
                Some(b'-') if U::GENERAL_NEG => Ok(RawTerm::Neg(Box::new(term::<U>(cur)?))),
                _ => {
                    let name = cur.ident()?;
                    if U::lex_unit(&name).is_some() {
                        if U::GENERAL_NEG {
                            return Ok(RawTerm::Neg(Box::new(RawTerm::Unit(
                                U::lex_unit(&name).unwrap(),
                            ))));
                        }
                        return Err(cur.err("cannot negate the unit"));
                    }
                    Ok(RawTerm::Atom(Atom::neg(name)))
                }
            }
        }
        Some(c) if c.is_ascii_lowercase() => {
            let name = cur.ident()?;
            if let Some(u) = U::lex_unit(&name) {
                Ok(RawTerm::Unit(u))
            } else {
                Ok(RawTerm::Atom(Atom::pos(name)))
            }
        }
        Some(c) => Err(cur.err(format!("unexpected `{}`", c as char))),
        None => Err(cur.err("unexpected end of input")),
    }
}

fn comma_list<T>(
    cur: &mut Cursor,
    close: u8,
    mut item: impl FnMut(&mut Cursor) -> Result<T, Error>,
) -> Result<Vec<T>, Error> {
    let mut items = Vec::new();
    if cur.eat(close) {
        return Ok(items);
    }
    loop {
        items.push(item(cur)?);
        if cur.eat(b',') {
            continue;
        }
        cur.expect(close)?;
        return Ok(items);
    }
}

/// Parse a classical formula; the result is canonical.
pub fn parse_formula(text: &str) -> Result<Formula, Error> {
    let mut cur = Cursor::new(text);
    let raw = term::<ClassicalUnit>(&mut cur)?;
    cur.finish()?;
    Ok(canon(&raw))
}

/// Parse an LBV structure; the result is canonical.
pub fn parse_structure(text: &str) -> Result<Structure, Error> {
    let mut cur = Cursor::new(text);
    let raw = term::<LbvUnit>(&mut cur)?;
    cur.finish()?;
    Ok(canon(&raw))
}

// ---------------------------------------------------------------------------
// LKp grammar: imp (right assoc) < or < and < neg, parentheses
// ---------------------------------------------------------------------------

fn lkp_imp(cur: &mut Cursor) -> Result<LkpFormula, Error> {
    let lhs = lkp_or(cur)?;
    if cur.eat_str("->") {
        let rhs = lkp_imp(cur)?;
        Ok(LkpFormula::imp(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn lkp_or(cur: &mut Cursor) -> Result<LkpFormula, Error> {
    let mut lhs = lkp_and(cur)?;
    while cur.peek() == Some(b'|') && !cur.starts_with("|-") {
        cur.bump();
        let rhs = lkp_and(cur)?;
        lhs = LkpFormula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn lkp_and(cur: &mut Cursor) -> Result<LkpFormula, Error> {
    let mut lhs = lkp_atomic(cur)?;
    while cur.eat(b'&') {
        let rhs = lkp_atomic(cur)?;
        lhs = LkpFormula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn lkp_atomic(cur: &mut Cursor) -> Result<LkpFormula, Error> {
    match cur.peek() {
        Some(b'-') => {
            // reject `->` here so `a -> b` does not lex the arrow as a negation
            if cur.starts_with("->") {
                return Err(cur.err("unexpected `->`"));
            }
            cur.bump();
            Ok(LkpFormula::neg(lkp_atomic(cur)?))
        }
        Some(b'(') => {
            cur.bump();
            let inner = lkp_imp(cur)?;
            cur.expect(b')')?;
            Ok(inner)
        }
        Some(c) if c.is_ascii_lowercase() => Ok(LkpFormula::Atom(cur.ident()?)),
        Some(c) => Err(cur.err(format!("unexpected `{}`", c as char))),
        None => Err(cur.err("unexpected end of input")),
    }
}

/// Parse an LKp formula.
pub fn parse_lkp(text: &str) -> Result<LkpFormula, Error> {
    let mut cur = Cursor::new(text);
    let f = lkp_imp(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

/// Parse a two-sided sequent `G1, G2 |- D1, D2`; either side may be empty.
pub fn parse_sequent(text: &str) -> Result<Sequent, Error> {
    let mut cur = Cursor::new(text);
    let seq = sequent_body(&mut cur)?;
    cur.finish()?;
    Ok(seq)
}

fn sequent_body(cur: &mut Cursor) -> Result<Sequent, Error> {
    let mut left = Vec::new();
    if !cur.starts_with("|-") {
        loop {
            left.push(lkp_imp(cur)?);
            if cur.eat(b',') {
                continue;
            }
            break;
        }
    }
    if !cur.eat_str("|-") {
        return Err(cur.err("expected `|-`"));
    }
    let mut right = Vec::new();
    if cur.peek().is_some() {
        loop {
            right.push(lkp_imp(cur)?);
            if cur.eat(b',') {
                continue;
            }
            break;
        }
    }
    Ok(Sequent::new(left, right))
}

// ---------------------------------------------------------------------------
// MLL grammar: `%` (par) < `*` (tensor) < atoms; `-(...)` resolved by De Morgan
// ---------------------------------------------------------------------------

fn mll_parr(cur: &mut Cursor) -> Result<MllFormula, Error> {
    let mut lhs = mll_tensor(cur)?;
    while cur.eat(b'%') {
        let rhs = mll_tensor(cur)?;
        lhs = MllFormula::parr(lhs, rhs);
    }
    Ok(lhs)
}

fn mll_tensor(cur: &mut Cursor) -> Result<MllFormula, Error> {
    let mut lhs = mll_atomic(cur)?;
    while cur.eat(b'*') {
        let rhs = mll_atomic(cur)?;
        lhs = MllFormula::tensor(lhs, rhs);
    }
    Ok(lhs)
}

fn mll_atomic(cur: &mut Cursor) -> Result<MllFormula, Error> {
    match cur.peek() {
        Some(b'-') => {
            cur.bump();
            let inner = mll_atomic(cur)?;
            Ok(inner.negate())
        }
        Some(b'(') => {
            cur.bump();
            let inner = mll_parr(cur)?;
            cur.expect(b')')?;
            Ok(inner)
        }
        Some(c) if c.is_ascii_lowercase() => Ok(MllFormula::Atom(Atom::pos(cur.ident()?))),
        Some(c) => Err(cur.err(format!("unexpected `{}`", c as char))),
        None => Err(cur.err("unexpected end of input")),
    }
}

/// Parse an MLL formula (negation normal by construction).
pub fn parse_mll(text: &str) -> Result<MllFormula, Error> {
    let mut cur = Cursor::new(text);
    let f = mll_parr(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

/// Parse a one-sided MLL sequent; the `|-` prefix is optional.
pub fn parse_mll_sequent(text: &str) -> Result<MllSequent, Error> {
    let mut cur = Cursor::new(text);
    let _ = cur.eat_str("|-");
    let mut items = Vec::new();
    if cur.peek().is_some() {
        loop {
            items.push(mll_parr(&mut cur)?);
            if cur.eat(b',') {
                continue;
            }
            break;
        }
    }
    cur.finish()?;
    Ok(MllSequent(items))
}

/// Parsed object of any dialect, as returned by the dispatching [`parse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Classical(Formula),
    Lbv(Structure),
    Lkp(LkpFormula),
    Mll(MllFormula),
    Sequent(Sequent),
}

impl std::fmt::Display for Parsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parsed::Classical(x) => write!(f, "{x}"),
            Parsed::Lbv(x) => write!(f, "{x}"),
            Parsed::Lkp(x) => write!(f, "{x}"),
            Parsed::Mll(x) => write!(f, "{x}"),
            Parsed::Sequent(x) => write!(f, "{x}"),
        }
    }
}

/// Parse `text` in the named dialect. Classical and LBV results are
/// canonicalized; MLL negation is eliminated by De Morgan at parse time.
pub fn parse(text: &str, dialect: &str) -> Result<Parsed, Error> {
    match dialect {
        "classical" => Ok(Parsed::Classical(parse_formula(text)?)),
        "lbv" => Ok(Parsed::Lbv(parse_structure(text)?)),
        "lkp" => Ok(Parsed::Lkp(parse_lkp(text)?)),
        "mll" => Ok(Parsed::Mll(parse_mll(text)?)),
        "sequent" => Ok(Parsed::Sequent(parse_sequent(text)?)),
        other => Err(Error::UnknownDialect(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    #[test]
    fn lbv_pair() {
        let s = parse_structure("[a, -a]").unwrap();
        assert_eq!(
            s,
            Term::or(vec![Structure::pos("a"), Structure::negatom("a")])
        );
    }

    #[test]
    fn lkp_example() {
        let f = parse_lkp("(a & b) -> (b & a)").unwrap();
        assert_eq!(
            f,
            LkpFormula::imp(
                LkpFormula::and(LkpFormula::atom("a"), LkpFormula::atom("b")),
                LkpFormula::and(LkpFormula::atom("b"), LkpFormula::atom("a")),
            )
        );
    }

    #[test]
    fn classical_unit_law_applied() {
        assert_eq!(parse_formula("[f, a]").unwrap(), Formula::pos("a"));
    }

    #[test]
    fn unknown_dialect() {
        assert!(matches!(
            parse("a", "prolog"),
            Err(Error::UnknownDialect(_))
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_formula("[a, ]") {
            Err(Error::Syntax { pos, .. }) => assert!(pos >= 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn lbv_rejects_general_negation() {
        assert!(parse_structure("-(a, b)").is_err());
        assert!(parse_structure("-o").is_err());
    }

    #[test]
    fn mll_negation_eliminated() {
        let f = parse_mll("-(a * b)").unwrap();
        assert_eq!(
            f,
            MllFormula::parr(
                MllFormula::Atom(Atom::neg("a")),
                MllFormula::Atom(Atom::neg("b"))
            )
        );
    }

    #[test]
    fn sequent_sides_optional() {
        let s = parse_sequent("a, b |- c").unwrap();
        assert_eq!(s.left.len(), 2);
        assert_eq!(s.right.len(), 1);
        assert!(parse_sequent("|-").unwrap().left.is_empty());
        let only_left = parse_sequent("a |-").unwrap();
        assert!(only_left.right.is_empty());
    }

    #[test]
    fn display_roundtrip_lkp() {
        for src in [
            "a -> b -> c",
            "(a -> b) -> c",
            "-(a & b) | -c",
            "a & (b | c) & -d",
            "a | (b | c)",
        ] {
            let f = parse_lkp(src).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_lkp(&printed).unwrap(), f, "{src} -> {printed}");
        }
    }

    #[test]
    fn display_roundtrip_mll() {
        for src in ["a * (b % -c)", "a % b % c", "a * (b * c)", "-(a % b) * c"] {
            let f = parse_mll(src).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_mll(&printed).unwrap(), f, "{src} -> {printed}");
        }
    }
}
