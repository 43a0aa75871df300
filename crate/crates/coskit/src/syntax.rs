//! Formula and structure languages.
//!
//! Two deep-inference languages share one generic term shape: classical
//! formulas (units `t`/`f`, used by SKSg/SKS/KS) and LBV structures (single
//! unit `o`). Both are kept in canonical form modulo their equational
//! theories: negation normal form, flattened associativity, unit laws and a
//! fixed total order on the children of every n-ary node. Equality of
//! canonical terms therefore decides equivalence, and no explicit `=` steps
//! ever appear in stored derivations.
//!
//! The shallow languages (LKp formulas and sequents, MLL formulas) live here
//! too; LKp formulas are deliberately *not* normalized, since the LKp rules
//! are syntax-directed on `¬`, `∧`, `∨`, `→`.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use crate::error::Error;

/// A signed propositional atom. Negating twice yields the original atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub negated: bool,
}

impl Atom {
    pub fn new(name: impl Into<String>, negated: bool) -> Self {
        let name = name.into();
        debug_assert!(valid_atom_name(&name), "bad atom name: {name}");
        Atom { name, negated }
    }

    pub fn pos(name: impl Into<String>) -> Self {
        Self::new(name, false)
    }

    pub fn neg(name: impl Into<String>) -> Self {
        Self::new(name, true)
    }

    pub fn negate(&self) -> Self {
        Atom {
            name: self.name.clone(),
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

pub fn valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Dialect tag carried by errors and the parser.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Classical,
    Lbv,
    Lkp,
    Mll,
    Sequent,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dialect::Classical => "classical",
            Dialect::Lbv => "lbv",
            Dialect::Lkp => "lkp",
            Dialect::Mll => "mll",
            Dialect::Sequent => "sequent",
        };
        f.write_str(s)
    }
}

/// Unit alphabet of a deep-inference language.
///
/// Canonicalization is expressed through two designated units: the identity
/// of the disjunctive connective (dropped inside `[..]`) and the identity of
/// the conjunctive connective (dropped inside `(..)`). Duplicate copies of a
/// non-identity unit merge, which is exactly `[t,t] = t` and `(f,f) = f` for
/// the classical theory. For LBV both identities coincide in `o`.
pub trait Units: Copy + Eq + Ord + Hash + fmt::Debug + 'static {
    const DIALECT: Dialect;
    fn or_identity() -> Self;
    fn and_identity() -> Self;
    fn negate(self) -> Self;
    fn symbol(self) -> &'static str;
}

/// Classical units: `t` (true) and `f` (false).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalUnit {
    False,
    True,
}

impl Units for ClassicalUnit {
    const DIALECT: Dialect = Dialect::Classical;

    fn or_identity() -> Self {
        ClassicalUnit::False
    }

    fn and_identity() -> Self {
        ClassicalUnit::True
    }

    fn negate(self) -> Self {
        match self {
            ClassicalUnit::False => ClassicalUnit::True,
            ClassicalUnit::True => ClassicalUnit::False,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            ClassicalUnit::False => "f",
            ClassicalUnit::True => "t",
        }
    }
}

// Ties in the child order break by printed form: "f" < "t".
impl PartialOrd for ClassicalUnit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ClassicalUnit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbol().cmp(other.symbol())
    }
}

/// The single LBV unit `o`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LbvUnit;

impl Units for LbvUnit {
    const DIALECT: Dialect = Dialect::Lbv;

    fn or_identity() -> Self {
        LbvUnit
    }

    fn and_identity() -> Self {
        LbvUnit
    }

    fn negate(self) -> Self {
        LbvUnit
    }

    fn symbol(self) -> &'static str {
        "o"
    }
}

/// Canonical n-ary term over a unit alphabet.
///
/// Invariants (enforced by the `or`/`and` constructors, never by hand):
/// negation only on atoms, no `Or` child of an `Or` or `And` child of an
/// `And`, identity units absent, duplicate non-identity units merged, n-ary
/// nodes have at least two children, children sorted by [`Term::cmp`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term<U: Units> {
    Unit(U),
    Atom(Atom),
    Or(Vec<Term<U>>),
    And(Vec<Term<U>>),
}

/// Classical formula (SKSg/SKS/KS). `Or` is disjunction, `And` conjunction.
pub type Formula = Term<ClassicalUnit>;

/// LBV structure. `Or` is par, `And` copar.
pub type Structure = Term<LbvUnit>;

impl Formula {
    pub const TRUE: Formula = Term::Unit(ClassicalUnit::True);
    pub const FALSE: Formula = Term::Unit(ClassicalUnit::False);
}

impl Structure {
    pub const ONE: Structure = Term::Unit(LbvUnit);
}

impl<U: Units> Term<U> {
    pub fn atom(a: Atom) -> Self {
        Term::Atom(a)
    }

    pub fn pos(name: &str) -> Self {
        Term::Atom(Atom::pos(name))
    }

    pub fn negatom(name: &str) -> Self {
        Term::Atom(Atom::neg(name))
    }

    /// Canonicalizing n-ary disjunction/par constructor.
    pub fn or(children: Vec<Term<U>>) -> Self {
        Self::build(false, children)
    }

    /// Canonicalizing n-ary conjunction/copar constructor.
    pub fn and(children: Vec<Term<U>>) -> Self {
        Self::build(true, children)
    }

    fn build(conj: bool, children: Vec<Term<U>>) -> Self {
        let identity = if conj { U::and_identity() } else { U::or_identity() };
        let merged = if conj { U::or_identity() } else { U::and_identity() };
        let mut out: Vec<Term<U>> = Vec::with_capacity(children.len());
        let mut saw_merged = false;
        for child in children {
            match child {
                Term::Unit(u) if u == identity => {}
                Term::Unit(u) if u == merged => saw_merged = true,
                Term::Or(cs) if !conj => out.extend(cs),
                Term::And(cs) if conj => out.extend(cs),
                other => out.push(other),
            }
        }
        // Flattened children are canonical already, but merged unit copies
        // may have been contributed by several of them.
        if saw_merged || out.iter().any(|c| matches!(c, Term::Unit(_))) {
            let before = out.len();
            out.retain(|c| !matches!(c, Term::Unit(_)));
            let dropped_units = before != out.len();
            if saw_merged || dropped_units {
                out.push(Term::Unit(merged));
            }
        }
        out.sort();
        match out.len() {
            0 => Term::Unit(identity),
            1 => out.pop().unwrap(),
            _ => {
                if conj {
                    Term::And(out)
                } else {
                    Term::Or(out)
                }
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Term::Unit(_))
    }

    /// Negation: De Morgan on n-ary nodes, involution on atoms and units.
    pub fn negate(&self) -> Term<U> {
        match self {
            Term::Unit(u) => Term::Unit(u.negate()),
            Term::Atom(a) => Term::Atom(a.negate()),
            Term::Or(cs) => Term::and(cs.iter().map(|c| c.negate()).collect()),
            Term::And(cs) => Term::or(cs.iter().map(|c| c.negate()).collect()),
        }
    }

    /// Atom-counting length: units weigh 0, atoms 1, nodes sum their children.
    pub fn size(&self) -> usize {
        match self {
            Term::Unit(_) => 0,
            Term::Atom(_) => 1,
            Term::Or(cs) | Term::And(cs) => cs.iter().map(Term::size).sum(),
        }
    }

    /// Distinct atom names occurring in the term.
    pub fn atom_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.collect_names(&mut names);
        names.sort();
        names.dedup();
        names
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self {
            Term::Unit(_) => {}
            Term::Atom(a) => out.push(a.name.clone()),
            Term::Or(cs) | Term::And(cs) => {
                for c in cs {
                    c.collect_names(out);
                }
            }
        }
    }

    pub fn max_arity(&self) -> usize {
        match self {
            Term::Unit(_) | Term::Atom(_) => 0,
            Term::Or(cs) | Term::And(cs) => cs
                .iter()
                .map(Term::max_arity)
                .max()
                .unwrap_or(0)
                .max(cs.len()),
        }
    }

    /// Children viewed as an `Or`-multiset: an `Or` node yields its children,
    /// the or-identity unit yields nothing, anything else yields itself.
    pub fn or_view(&self) -> Vec<Term<U>> {
        match self {
            Term::Or(cs) => cs.clone(),
            Term::Unit(u) if *u == U::or_identity() => Vec::new(),
            other => vec![other.clone()],
        }
    }

    /// Dual of [`Term::or_view`].
    pub fn and_view(&self) -> Vec<Term<U>> {
        match self {
            Term::And(cs) => cs.clone(),
            Term::Unit(u) if *u == U::and_identity() => Vec::new(),
            other => vec![other.clone()],
        }
    }

    fn order_rank(&self) -> u8 {
        match self {
            Term::Unit(_) => 0,
            Term::Atom(_) => 1,
            Term::Or(_) => 2,
            Term::And(_) => 3,
        }
    }
}

// Total child order: units < atoms (by name, positive before negative)
// < Or < And, recursively by the same order.
impl<U: Units> Ord for Term<U> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.order_rank().cmp(&other.order_rank()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match (self, other) {
            (Term::Unit(a), Term::Unit(b)) => a.cmp(b),
            (Term::Atom(a), Term::Atom(b)) => {
                a.name.cmp(&b.name).then(a.negated.cmp(&b.negated))
            }
            (Term::Or(a), Term::Or(b)) | (Term::And(a), Term::And(b)) => a.cmp(b),
            _ => unreachable!("rank already compared"),
        }
    }
}

impl<U: Units> PartialOrd for Term<U> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<U: Units> fmt::Display for Term<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Unit(u) => f.write_str(u.symbol()),
            Term::Atom(a) => write!(f, "{a}"),
            Term::Or(cs) => {
                f.write_str("[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
            Term::And(cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Unnormalized term tree as produced by the parser or a random generator:
/// arbitrary arity, explicit negation nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm<U: Units> {
    Unit(U),
    Atom(Atom),
    Neg(Box<RawTerm<U>>),
    Or(Vec<RawTerm<U>>),
    And(Vec<RawTerm<U>>),
}

pub type RawFormula = RawTerm<ClassicalUnit>;
pub type RawStructure = RawTerm<LbvUnit>;

/// Canonicalize a raw tree: push negation to the atoms, flatten, apply unit
/// laws, sort. Idempotent; two raw trees related by any single equation of
/// the theory canonicalize identically.
pub fn canon<U: Units>(raw: &RawTerm<U>) -> Term<U> {
    canon_signed(raw, false)
}

fn canon_signed<U: Units>(raw: &RawTerm<U>, neg: bool) -> Term<U> {
    match raw {
        RawTerm::Unit(u) => Term::Unit(if neg { u.negate() } else { *u }),
        RawTerm::Atom(a) => Term::Atom(if neg { a.negate() } else { a.clone() }),
        RawTerm::Neg(inner) => canon_signed(inner, !neg),
        RawTerm::Or(cs) => {
            let children = cs.iter().map(|c| canon_signed(c, neg)).collect();
            if neg {
                Term::and(children)
            } else {
                Term::or(children)
            }
        }
        RawTerm::And(cs) => {
            let children = cs.iter().map(|c| canon_signed(c, neg)).collect();
            if neg {
                Term::or(children)
            } else {
                Term::and(children)
            }
        }
    }
}

impl<U: Units> From<Term<U>> for RawTerm<U> {
    fn from(t: Term<U>) -> Self {
        match t {
            Term::Unit(u) => RawTerm::Unit(u),
            Term::Atom(a) => RawTerm::Atom(a),
            Term::Or(cs) => RawTerm::Or(cs.into_iter().map(RawTerm::from).collect()),
            Term::And(cs) => RawTerm::And(cs.into_iter().map(RawTerm::from).collect()),
        }
    }
}

/// Truth-table evaluation of a classical formula.
pub fn eval_formula(f: &Formula, assignment: &BTreeMap<String, bool>) -> Result<bool, Error> {
    match f {
        Term::Unit(ClassicalUnit::True) => Ok(true),
        Term::Unit(ClassicalUnit::False) => Ok(false),
        Term::Atom(a) => {
            let v = assignment
                .get(&a.name)
                .copied()
                .ok_or_else(|| Error::MissingAssignment(a.name.clone()))?;
            Ok(if a.negated { !v } else { v })
        }
        Term::Or(cs) => {
            let mut acc = false;
            for c in cs {
                acc |= eval_formula(c, assignment)?;
            }
            Ok(acc)
        }
        Term::And(cs) => {
            let mut acc = true;
            for c in cs {
                acc &= eval_formula(c, assignment)?;
            }
            Ok(acc)
        }
    }
}

// ---------------------------------------------------------------------------
// LKp formulas and sequents
// ---------------------------------------------------------------------------

/// LKp formula: binary connectives, unrestricted negation, no units, no
/// normalization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LkpFormula {
    Atom(String),
    Neg(Box<LkpFormula>),
    And(Box<LkpFormula>, Box<LkpFormula>),
    Or(Box<LkpFormula>, Box<LkpFormula>),
    Imp(Box<LkpFormula>, Box<LkpFormula>),
}

impl LkpFormula {
    pub fn atom(name: &str) -> Self {
        LkpFormula::Atom(name.to_string())
    }

    pub fn neg(f: LkpFormula) -> Self {
        LkpFormula::Neg(Box::new(f))
    }

    pub fn and(l: LkpFormula, r: LkpFormula) -> Self {
        LkpFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: LkpFormula, r: LkpFormula) -> Self {
        LkpFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: LkpFormula, r: LkpFormula) -> Self {
        LkpFormula::Imp(Box::new(l), Box::new(r))
    }

    pub fn atom_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.collect_names(&mut names);
        names.sort();
        names.dedup();
        names
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self {
            LkpFormula::Atom(n) => out.push(n.clone()),
            LkpFormula::Neg(f) => f.collect_names(out),
            LkpFormula::And(l, r) | LkpFormula::Or(l, r) | LkpFormula::Imp(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            LkpFormula::Atom(_) | LkpFormula::Neg(_) => 3,
            LkpFormula::And(..) => 2,
            LkpFormula::Or(..) => 1,
            LkpFormula::Imp(..) => 0,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.prec();
        let parens = me < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            LkpFormula::Atom(n) => f.write_str(n)?,
            LkpFormula::Neg(inner) => {
                f.write_str("-")?;
                inner.fmt_prec(f, 3)?;
            }
            // Left-associative: the right operand needs strictly higher
            // precedence to reparse into the same tree.
            LkpFormula::And(l, r) => {
                l.fmt_prec(f, 2)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, 3)?;
            }
            LkpFormula::Or(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, 2)?;
            }
            // Right-associative.
            LkpFormula::Imp(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(" -> ")?;
                r.fmt_prec(f, 0)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for LkpFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Evaluation of an LKp formula under an assignment.
pub fn eval_lkp(f: &LkpFormula, assignment: &BTreeMap<String, bool>) -> Result<bool, Error> {
    match f {
        LkpFormula::Atom(n) => assignment
            .get(n)
            .copied()
            .ok_or_else(|| Error::MissingAssignment(n.clone())),
        LkpFormula::Neg(inner) => Ok(!eval_lkp(inner, assignment)?),
        LkpFormula::And(l, r) => Ok(eval_lkp(l, assignment)? && eval_lkp(r, assignment)?),
        LkpFormula::Or(l, r) => Ok(eval_lkp(l, assignment)? || eval_lkp(r, assignment)?),
        LkpFormula::Imp(l, r) => Ok(!eval_lkp(l, assignment)? || eval_lkp(r, assignment)?),
    }
}

/// Two-sided sequent over LKp formulas. Order and multiplicity matter: the
/// structural rules are positional.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub left: Vec<LkpFormula>,
    pub right: Vec<LkpFormula>,
}

impl Sequent {
    pub fn new(left: Vec<LkpFormula>, right: Vec<LkpFormula>) -> Self {
        Sequent { left, right }
    }

    pub fn atom_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for f in self.left.iter().chain(self.right.iter()) {
            names.extend(f.atom_names());
        }
        names.sort();
        names.dedup();
        names
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[LkpFormula]| -> fmt::Result {
            for (i, x) in fs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        };
        join(f, &self.left)?;
        if self.left.is_empty() {
            f.write_str("|-")?;
        } else {
            f.write_str(" |-")?;
        }
        if !self.right.is_empty() {
            f.write_str(" ")?;
            join(f, &self.right)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// MLL formulas and one-sided sequents
// ---------------------------------------------------------------------------

/// MLL formula in negation normal form: binary tensor/par over signed atoms.
/// General negation is eliminated at parse time by De Morgan.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MllFormula {
    Atom(Atom),
    Tensor(Box<MllFormula>, Box<MllFormula>),
    Parr(Box<MllFormula>, Box<MllFormula>),
}

impl MllFormula {
    pub fn atom(a: Atom) -> Self {
        MllFormula::Atom(a)
    }

    pub fn tensor(l: MllFormula, r: MllFormula) -> Self {
        MllFormula::Tensor(Box::new(l), Box::new(r))
    }

    pub fn parr(l: MllFormula, r: MllFormula) -> Self {
        MllFormula::Parr(Box::new(l), Box::new(r))
    }

    /// De Morgan dual; involutive.
    pub fn negate(&self) -> MllFormula {
        match self {
            MllFormula::Atom(a) => MllFormula::Atom(a.negate()),
            MllFormula::Tensor(l, r) => MllFormula::parr(l.negate(), r.negate()),
            MllFormula::Parr(l, r) => MllFormula::tensor(l.negate(), r.negate()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            MllFormula::Atom(_) => 1,
            MllFormula::Tensor(l, r) | MllFormula::Parr(l, r) => l.size() + r.size(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            MllFormula::Atom(_) => 2,
            MllFormula::Tensor(..) => 1,
            MllFormula::Parr(..) => 0,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.prec();
        let parens = me < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            MllFormula::Atom(a) => write!(f, "{a}")?,
            MllFormula::Tensor(l, r) => {
                l.fmt_prec(f, 1)?;
                f.write_str(" * ")?;
                r.fmt_prec(f, 2)?;
            }
            MllFormula::Parr(l, r) => {
                l.fmt_prec(f, 0)?;
                f.write_str(" % ")?;
                r.fmt_prec(f, 1)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for MllFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// One-sided MLL sequent `|- F1, ..., Fn` (possibly empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MllSequent(pub Vec<MllFormula>);

impl fmt::Display for MllSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|-")?;
        for (i, x) in self.0.iter().enumerate() {
            if i == 0 {
                f.write_str(" ")?;
            } else {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_structure};

    #[test]
    fn unit_laws_collapse() {
        // [f, a] = a
        assert_eq!(parse_formula("[f, a]").unwrap(), Formula::pos("a"));
        // (t, [t, t]) = t
        assert_eq!(parse_formula("(t, [t, t])").unwrap(), Formula::TRUE);
        // duplicate units merge but [t, a] is kept
        assert_eq!(
            parse_formula("[t, t, a]").unwrap(),
            Formula::or(vec![Formula::TRUE, Formula::pos("a")])
        );
        assert_eq!(
            parse_formula("(f, f, a)").unwrap(),
            Formula::and(vec![Formula::FALSE, Formula::pos("a")])
        );
    }

    #[test]
    fn negation_pushes_to_atoms() {
        // -[a, b] = (-a, -b)
        let f = parse_formula("-[a, b]").unwrap();
        assert_eq!(
            f,
            Formula::and(vec![Formula::negatom("a"), Formula::negatom("b")])
        );
        assert_eq!(parse_formula("-t").unwrap(), Formula::FALSE);
    }

    #[test]
    fn negation_involutive() {
        let f = parse_formula("[a, -b, (c, [t, d])]").unwrap();
        assert_eq!(f.negate().negate(), f);
        let s = parse_structure("[a, (-b, c)]").unwrap();
        assert_eq!(s.negate().negate(), s);
    }

    #[test]
    fn lbv_units_vanish() {
        assert_eq!(parse_structure("[a, o]").unwrap(), Structure::pos("a"));
        assert_eq!(parse_structure("(o, o)").unwrap(), Structure::ONE);
        assert_eq!(
            parse_structure("[(a, o), o]").unwrap(),
            Structure::pos("a")
        );
    }

    #[test]
    fn sizes() {
        assert_eq!(Structure::ONE.size(), 0);
        assert_eq!(parse_structure("[a, (b, c)]").unwrap().size(), 3);
        assert_eq!(Structure::negatom("a").size(), 1);
        assert_eq!(Formula::TRUE.size(), 0);
    }

    #[test]
    fn eval_examples() {
        let mut asg = BTreeMap::new();
        asg.insert("a".to_string(), true);
        let f = parse_formula("[a, -a]").unwrap();
        assert!(eval_formula(&f, &asg).unwrap());
        asg.insert("b".to_string(), false);
        let g = parse_formula("(a, b)").unwrap();
        assert!(!eval_formula(&g, &asg).unwrap());

        let mut asg2 = BTreeMap::new();
        asg2.insert("a".to_string(), false);
        let h = LkpFormula::imp(LkpFormula::atom("a"), LkpFormula::atom("a"));
        assert!(eval_lkp(&h, &asg2).unwrap());
    }

    #[test]
    fn eval_missing_atom_errors() {
        let f = parse_formula("[a, b]").unwrap();
        let asg = BTreeMap::new();
        assert!(eval_formula(&f, &asg).is_err());
    }

    #[test]
    fn child_order_is_total() {
        let f = parse_formula("[(b, c), a, -a, t]").unwrap();
        match &f {
            Term::Or(cs) => {
                assert_eq!(cs[0], Formula::TRUE);
                assert_eq!(cs[1], Formula::pos("a"));
                assert_eq!(cs[2], Formula::negatom("a"));
                assert!(matches!(cs[3], Term::And(_)));
            }
            _ => panic!("expected disjunction"),
        }
    }
}
