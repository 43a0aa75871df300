//! One-hole contexts and exhaustive occurrence enumeration.
//!
//! A context is a term with exactly one hole, printed `*`. Saturation
//! substitutes a term at the hole and re-canonicalizes. Because matching is
//! modulo associativity and commutativity, occurrences range not only over
//! subtrees but over sub-multisets of every n-ary node's children, regrouped
//! under the same connective; that is how the switch rule sees `[a, b]`
//! inside `[a, b, c]`. Sub-multiset enumeration is exponential in node
//! arity, so a configurable cap guards it.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::syntax::{Atom, Term, Units};

/// Default bound on the arity of nodes whose sub-multisets are enumerated.
pub const DEFAULT_ARITY_CAP: usize = 8;

/// Term tree in which `Hole` leaves may occur. Only trees of order 1 are
/// contexts proper; [`order`] on arbitrary trees is the degenerate-input
/// guard.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContextTree<U: Units> {
    Hole,
    Unit(U),
    Atom(Atom),
    Or(Vec<ContextTree<U>>),
    And(Vec<ContextTree<U>>),
}

impl<U: Units> ContextTree<U> {
    pub fn from_term(t: &Term<U>) -> Self {
        match t {
            Term::Unit(u) => ContextTree::Unit(*u),
            Term::Atom(a) => ContextTree::Atom(a.clone()),
            Term::Or(cs) => ContextTree::Or(cs.iter().map(Self::from_term).collect()),
            Term::And(cs) => ContextTree::And(cs.iter().map(Self::from_term).collect()),
        }
    }

    /// Number of holes in the tree.
    pub fn order(&self) -> usize {
        match self {
            ContextTree::Hole => 1,
            ContextTree::Unit(_) | ContextTree::Atom(_) => 0,
            ContextTree::Or(cs) | ContextTree::And(cs) => cs.iter().map(Self::order).sum(),
        }
    }

    fn fill(&self, w: &Term<U>) -> Term<U> {
        match self {
            ContextTree::Hole => w.clone(),
            ContextTree::Unit(u) => Term::Unit(*u),
            ContextTree::Atom(a) => Term::Atom(a.clone()),
            ContextTree::Or(cs) => Term::or(cs.iter().map(|c| c.fill(w)).collect()),
            ContextTree::And(cs) => Term::and(cs.iter().map(|c| c.fill(w)).collect()),
        }
    }

    /// Light normalization so that equal contexts compare equal: children
    /// sorted (the hole path first), same-connective nesting along the hole
    /// path flattened, identity-unit siblings dropped, singleton nodes
    /// collapsed. Saturation is invariant under all of these.
    fn normalize(self) -> Self {
        match self {
            ContextTree::Or(cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.normalize() {
                        ContextTree::Or(inner) => out.extend(inner),
                        ContextTree::Unit(u) if u == U::or_identity() => {}
                        other => out.push(other),
                    }
                }
                out.sort();
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    ContextTree::Or(out)
                }
            }
            ContextTree::And(cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.normalize() {
                        ContextTree::And(inner) => out.extend(inner),
                        ContextTree::Unit(u) if u == U::and_identity() => {}
                        other => out.push(other),
                    }
                }
                out.sort();
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    ContextTree::And(out)
                }
            }
            other => other,
        }
    }
}

impl<U: Units> fmt::Display for ContextTree<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextTree::Hole => f.write_str("*"),
            ContextTree::Unit(u) => f.write_str(u.symbol()),
            ContextTree::Atom(a) => write!(f, "{a}"),
            ContextTree::Or(cs) => {
                f.write_str("[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
            ContextTree::And(cs) => {
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

/// A validated one-hole context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Context<U: Units> {
    tree: ContextTree<U>,
}

impl<U: Units> Context<U> {
    pub fn new(tree: ContextTree<U>) -> Result<Self, Error> {
        match tree.order() {
            1 => Ok(Context {
                tree: tree.normalize(),
            }),
            n => Err(Error::BadContextOrder(n)),
        }
    }

    /// The empty context, a bare hole.
    pub fn hole() -> Self {
        Context {
            tree: ContextTree::Hole,
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self.tree, ContextTree::Hole)
    }

    pub fn tree(&self) -> &ContextTree<U> {
        &self.tree
    }

    /// Textual substitution of `w` at the hole followed by canonicalization.
    pub fn saturate(&self, w: &Term<U>) -> Term<U> {
        self.tree.fill(w)
    }

    /// Wrap this context in a par frame with extra siblings.
    pub fn within_or(&self, siblings: Vec<Term<U>>) -> Self {
        let mut cs: Vec<ContextTree<U>> =
            siblings.iter().map(ContextTree::from_term).collect();
        cs.push(self.tree.clone());
        Context {
            tree: ContextTree::Or(cs).normalize(),
        }
    }

    /// Wrap this context in a copar frame with extra siblings.
    pub fn within_and(&self, siblings: Vec<Term<U>>) -> Self {
        let mut cs: Vec<ContextTree<U>> =
            siblings.iter().map(ContextTree::from_term).collect();
        cs.push(self.tree.clone());
        Context {
            tree: ContextTree::And(cs).normalize(),
        }
    }

    /// Plug another context into the hole, composing them.
    pub fn compose(&self, inner: &Context<U>) -> Self {
        fn go<U: Units>(tree: &ContextTree<U>, inner: &ContextTree<U>) -> ContextTree<U> {
            match tree {
                ContextTree::Hole => inner.clone(),
                ContextTree::Unit(u) => ContextTree::Unit(*u),
                ContextTree::Atom(a) => ContextTree::Atom(a.clone()),
                ContextTree::Or(cs) => {
                    ContextTree::Or(cs.iter().map(|c| go(c, inner)).collect())
                }
                ContextTree::And(cs) => {
                    ContextTree::And(cs.iter().map(|c| go(c, inner)).collect())
                }
            }
        }
        Context {
            tree: go(&self.tree, &inner.tree).normalize(),
        }
    }
}

impl<U: Units> fmt::Display for Context<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tree)
    }
}

/// A decomposition `saturate(context, focus) == original`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence<U: Units> {
    pub context: Context<U>,
    pub focus: Term<U>,
    /// Advisory `@ i.j.k / m1,m2` location: child indices in canonical order
    /// plus the selected sub-multiset, when the focus is one.
    pub path: OccPath,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct OccPath {
    pub indices: Vec<usize>,
    pub submultiset: Option<Vec<usize>>,
}

impl fmt::Display for OccPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() && self.submultiset.is_none() {
            return f.write_str("root");
        }
        let dotted: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", dotted.join("."))?;
        if let Some(ms) = &self.submultiset {
            let parts: Vec<String> = ms.iter().map(|i| i.to_string()).collect();
            write!(f, " / {}", parts.join(","))?;
        }
        Ok(())
    }
}

/// Enumerate every decomposition of `f` into a context and a focus: `f`
/// itself, each subtree, and each sub-multiset of size >= 1 of every n-ary
/// node's children regrouped under the node's connective. No duplicates.
pub fn enumerate_occurrences<U: Units>(
    f: &Term<U>,
    arity_cap: usize,
) -> Result<Vec<Occurrence<U>>, Error> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<(ContextTree<U>, Term<U>)> = BTreeSet::new();
    collect(f, &Context::hole(), &[], arity_cap, &mut out, &mut seen)?;
    Ok(out)
}

fn collect<U: Units>(
    f: &Term<U>,
    outer: &Context<U>,
    path: &[usize],
    cap: usize,
    out: &mut Vec<Occurrence<U>>,
    seen: &mut BTreeSet<(ContextTree<U>, Term<U>)>,
) -> Result<(), Error> {
    let mut push = |ctx: Context<U>, focus: Term<U>, p: OccPath, out: &mut Vec<Occurrence<U>>| {
        if seen.insert((ctx.tree.clone(), focus.clone())) {
            out.push(Occurrence {
                context: ctx,
                focus,
                path: p,
            });
        }
    };

    push(
        outer.clone(),
        f.clone(),
        OccPath {
            indices: path.to_vec(),
            submultiset: None,
        },
        out,
    );

    let (conj, cs) = match f {
        Term::Or(cs) => (false, cs),
        Term::And(cs) => (true, cs),
        _ => return Ok(()),
    };
    let n = cs.len();
    if n > cap {
        return Err(Error::ArityCap { arity: n, cap });
    }

    // Sub-multiset occurrences, proper and nonempty.
    for mask in 1u32..((1u32 << n) - 1) {
        let mut chosen = Vec::new();
        let mut rest: Vec<ContextTree<U>> = Vec::new();
        let mut idxs = Vec::new();
        for (i, c) in cs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                chosen.push(c.clone());
                idxs.push(i);
            } else {
                rest.push(ContextTree::from_term(c));
            }
        }
        let focus = if conj {
            Term::and(chosen)
        } else {
            Term::or(chosen)
        };
        rest.push(ContextTree::Hole);
        let frame = if conj {
            ContextTree::And(rest)
        } else {
            ContextTree::Or(rest)
        };
        let ctx = outer.compose(&Context {
            tree: frame.normalize(),
        });
        let indices = if idxs.len() == 1 {
            let mut p = path.to_vec();
            p.push(idxs[0]);
            p
        } else {
            path.to_vec()
        };
        let sub = if idxs.len() > 1 { Some(idxs) } else { None };
        push(
            ctx,
            focus,
            OccPath {
                indices,
                submultiset: sub,
            },
            out,
        );
    }

    // Recurse into children.
    for (i, c) in cs.iter().enumerate() {
        let mut rest: Vec<ContextTree<U>> = Vec::new();
        for (j, other) in cs.iter().enumerate() {
            if j != i {
                rest.push(ContextTree::from_term(other));
            }
        }
        rest.push(ContextTree::Hole);
        let frame = if conj {
            ContextTree::And(rest)
        } else {
            ContextTree::Or(rest)
        };
        let child_outer = outer.compose(&Context {
            tree: frame.normalize(),
        });
        let mut child_path = path.to_vec();
        child_path.push(i);
        collect(c, &child_outer, &child_path, cap, out, seen)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_structure};
    use crate::syntax::{Formula, Structure};

    fn ctx_s(text: &str) -> Context<crate::syntax::LbvUnit> {
        parse_context_structure(text)
    }

    /// Tiny test-only context reader: `*` marks the hole.
    fn parse_context_structure(text: &str) -> Context<crate::syntax::LbvUnit> {
        // piggyback on the structure parser by substituting a reserved atom
        let s = text.replace('*', "hole_marker");
        let t = parse_structure(&s).unwrap();
        fn to_ctx(t: &Structure) -> ContextTree<crate::syntax::LbvUnit> {
            match t {
                Term::Atom(a) if a.name == "hole_marker" => ContextTree::Hole,
                Term::Unit(u) => ContextTree::Unit(*u),
                Term::Atom(a) => ContextTree::Atom(a.clone()),
                Term::Or(cs) => ContextTree::Or(cs.iter().map(to_ctx).collect()),
                Term::And(cs) => ContextTree::And(cs.iter().map(to_ctx).collect()),
            }
        }
        Context::new(to_ctx(&t)).unwrap()
    }

    #[test]
    fn saturate_examples() {
        // C = [a, (*, c)], w = -b
        let c = ctx_s("[a, (*, c)]");
        assert_eq!(
            c.saturate(&Structure::negatom("b")),
            parse_structure("[a, (-b, c)]").unwrap()
        );
        // empty context
        let hole = Context::hole();
        let p = parse_structure("[a, b]").unwrap();
        assert_eq!(hole.saturate(&p), p);
        // saturate then unit law: C = (a, *), w = o
        let c2 = ctx_s("(a, *)");
        assert_eq!(c2.saturate(&Structure::ONE), Structure::pos("a"));
    }

    #[test]
    fn order_counts_holes() {
        assert_eq!(ContextTree::<crate::syntax::LbvUnit>::Hole.order(), 1);
        let no_hole = ContextTree::from_term(&parse_structure("[a, b]").unwrap());
        assert_eq!(no_hole.order(), 0);
        assert_eq!(ctx_s("[*, a]").tree().order(), 1);
        let two = ContextTree::Or(vec![
            ContextTree::<crate::syntax::LbvUnit>::Hole,
            ContextTree::Hole,
        ]);
        assert!(Context::new(two).is_err());
    }

    #[test]
    fn occurrences_of_atom() {
        let a = Structure::pos("a");
        let occs = enumerate_occurrences(&a, 8).unwrap();
        assert_eq!(occs.len(), 1);
        assert!(occs[0].context.is_hole());
        assert_eq!(occs[0].focus, a);
    }

    #[test]
    fn occurrences_of_pair() {
        let f = parse_structure("[a, b]").unwrap();
        let occs = enumerate_occurrences(&f, 8).unwrap();
        assert_eq!(occs.len(), 3);
        for occ in &occs {
            assert_eq!(occ.context.saturate(&occ.focus), f);
        }
    }

    #[test]
    fn submultiset_occurrence_present() {
        let f = parse_structure("[a, b, c]").unwrap();
        let occs = enumerate_occurrences(&f, 8).unwrap();
        let want_focus = parse_structure("[a, b]").unwrap();
        let want_ctx = ctx_s("[*, c]");
        assert!(occs
            .iter()
            .any(|o| o.focus == want_focus && o.context == want_ctx));
    }

    #[test]
    fn saturation_roundtrip_exhaustive() {
        for text in ["[a, (b, c), -d]", "(a, [b, c])", "[a, a, (b, [c, d])]"] {
            let f = parse_structure(text).unwrap();
            for occ in enumerate_occurrences(&f, 8).unwrap() {
                assert_eq!(occ.context.saturate(&occ.focus), f, "context {}", occ.context);
            }
        }
        for text in ["[t, a, (b, f)]", "(a, [b, t], f)"] {
            let f = parse_formula(text).unwrap();
            for occ in enumerate_occurrences(&f, 8).unwrap() {
                assert_eq!(occ.context.saturate(&occ.focus), f);
            }
        }
    }

    #[test]
    fn occurrence_count_flat_node() {
        // A flat ternary node: 1 whole + (2^3 - 2) sub-multisets + 3 child
        // occurrences, minus the 3 singleton duplicates = 1 + 6.
        let f = parse_structure("[a, b, c]").unwrap();
        let occs = enumerate_occurrences(&f, 8).unwrap();
        assert_eq!(occs.len(), 7);
    }

    #[test]
    fn arity_cap_enforced() {
        let f = parse_structure("[a1, a2, a3, a4, a5, a6, a7, a8, a9]").unwrap();
        assert!(matches!(
            enumerate_occurrences(&f, 8),
            Err(Error::ArityCap { arity: 9, cap: 8 })
        ));
        assert!(enumerate_occurrences(&f, 9).is_ok());
    }

    #[test]
    fn brute_force_crosscheck_small() {
        // Occurrence count for size <= 6: every enumerated pair must
        // saturate back, and distinct pairs must be distinct.
        for text in ["[a, b, (c, d)]", "([a, b], c, d)", "[(a, b), (c, d)]"] {
            let f = parse_structure(text).unwrap();
            let occs = enumerate_occurrences(&f, 8).unwrap();
            let as_set: BTreeSet<_> = occs
                .iter()
                .map(|o| (o.context.clone(), o.focus.clone()))
                .collect();
            assert_eq!(as_set.len(), occs.len(), "duplicates in {text}");
            for occ in &occs {
                assert_eq!(occ.context.saturate(&occ.focus), f);
            }
        }
    }
}
