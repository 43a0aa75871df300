//! LBV transformations: locality, splitting, cut elimination, the MLL+mix
//! checker and the LBV/MLL translations.
//!
//! Splitting is the proof-theoretic substitute for sequent-style case
//! analysis: a provable `[(R,T), P]` splits `P` into provable halves for `R`
//! and `T`. The implementation follows the lexicographic (size, height)
//! recursion over the last rule instance, trying the candidate
//! decompositions of that instance and validating every certificate it
//! emits, so a wrong branch fails loudly instead of mis-building.

use std::collections::BTreeSet;

use crate::context::{enumerate_occurrences, Context, ContextTree, DEFAULT_ARITY_CAP};
use crate::derivation::{CheckReport, DeepDerivation, LbvDerivation, MllProof};
use crate::error::Error;
use crate::rules::{RuleName, SystemId};
use crate::sks::{
    ctx_extrude, enumerate_markings, find_instance, find_marked_intro, fresh_marker, subst_atom,
    trace_markers, MarkerMap,
};
use crate::syntax::{Atom, LbvUnit, MllFormula, MllSequent, Structure, Term};

const CAP: usize = DEFAULT_ARITY_CAP;

fn one() -> Structure {
    Structure::ONE
}

// ---------------------------------------------------------------------------
// MLL+mix checker
// ---------------------------------------------------------------------------

fn multiset_sub_mll(view: &[MllFormula], minus: &[MllFormula]) -> Option<Vec<MllFormula>> {
    let mut rest = view.to_vec();
    for m in minus {
        let i = rest.iter().position(|x| x == m)?;
        rest.remove(i);
    }
    Some(rest)
}

fn same_multiset_mll(a: &[MllFormula], b: &[MllFormula]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Verify an MLL+mix proof tree: `id` on dual pairs, `tensor` splitting the
/// context as sub-multisets, `parr` fusing two formulas, `mix`
/// concatenating. Failures report the preorder node index.
pub fn check_mll(t: &MllProof) -> CheckReport {
    let mut index = 0;
    match check_mll_node(t, &mut index) {
        Ok(()) => CheckReport::Ok,
        Err((index, reason)) => CheckReport::Failed { index, reason },
    }
}

fn check_mll_node(t: &MllProof, index: &mut usize) -> Result<(), (usize, String)> {
    let my = *index;
    *index += 1;
    let fail = |m: String| Err((my, m));
    let c = &t.conclusion.0;
    match t.rule.as_str() {
        "id" => {
            if !t.children.is_empty() {
                return fail("id has no premises".into());
            }
            if c.len() != 2 || c[1] != c[0].negate() {
                return fail("id must conclude a dual pair".into());
            }
        }
        "parr" => {
            if t.children.len() != 1 {
                return fail("parr takes one premise".into());
            }
            let kid = &t.children[0].conclusion.0;
            let ok = c.iter().enumerate().any(|(i, f)| match f {
                MllFormula::Parr(p, q) => {
                    let mut rest: Vec<MllFormula> = c
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, x)| x.clone())
                        .collect();
                    rest.push((**p).clone());
                    rest.push((**q).clone());
                    same_multiset_mll(&rest, kid)
                }
                _ => false,
            });
            if !ok {
                return fail("parr premise does not fuse two formulas of the conclusion".into());
            }
        }
        "tensor" => {
            if t.children.len() != 2 {
                return fail("tensor takes two premises".into());
            }
            let k1 = &t.children[0].conclusion.0;
            let k2 = &t.children[1].conclusion.0;
            let ok = c.iter().enumerate().any(|(i, f)| match f {
                MllFormula::Tensor(p, q) => {
                    let rest: Vec<MllFormula> = c
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, x)| x.clone())
                        .collect();
                    let Some(g1) = multiset_sub_mll(k1, &[(**p).clone()]) else {
                        return false;
                    };
                    let Some(g2) = multiset_sub_mll(k2, &[(**q).clone()]) else {
                        return false;
                    };
                    let mut joined = g1;
                    joined.extend(g2);
                    same_multiset_mll(&joined, &rest)
                }
                _ => false,
            });
            if !ok {
                return fail("tensor contexts do not split the conclusion".into());
            }
        }
        "mix" => {
            if t.children.len() != 2 {
                return fail("mix takes two premises".into());
            }
            let mut joined = t.children[0].conclusion.0.clone();
            joined.extend(t.children[1].conclusion.0.clone());
            if !same_multiset_mll(&joined, c) {
                return fail("mix premises do not concatenate to the conclusion".into());
            }
        }
        other => return fail(format!("unknown MLL rule `{other}`")),
    }
    for k in &t.children {
        check_mll_node(k, index)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Translations
// ---------------------------------------------------------------------------

/// Homomorphic map from MLL formulas to LBV structures.
pub fn to_lbv(f: &MllFormula) -> Structure {
    match f {
        MllFormula::Atom(a) => Term::Atom(a.clone()),
        MllFormula::Parr(l, r) => Term::or(vec![to_lbv(l), to_lbv(r)]),
        MllFormula::Tensor(l, r) => Term::and(vec![to_lbv(l), to_lbv(r)]),
    }
}

/// A sequent maps to the par of its members; the empty sequent to the unit.
pub fn to_lbv_sequent(s: &MllSequent) -> Structure {
    Term::or(s.0.iter().map(to_lbv).collect())
}

/// Inverse map with a fixed right-nested re-binarization. The unit has no
/// image.
pub fn to_mll(s: &Structure) -> Result<MllFormula, Error> {
    match s {
        Term::Unit(_) => Err(Error::shape("the unit has no MLL image")),
        Term::Atom(a) => Ok(MllFormula::Atom(a.clone())),
        Term::Or(cs) => {
            let mut out = to_mll(cs.last().unwrap())?;
            for c in cs[..cs.len() - 1].iter().rev() {
                out = MllFormula::parr(to_mll(c)?, out);
            }
            Ok(out)
        }
        Term::And(cs) => {
            let mut out = to_mll(cs.last().unwrap())?;
            for c in cs[..cs.len() - 1].iter().rev() {
                out = MllFormula::tensor(to_mll(c)?, out);
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Locality: atomizing the interaction rules
// ---------------------------------------------------------------------------

fn grow_i_down_lbv(out: &mut LbvDerivation, ctx: &Context<LbvUnit>, p: &Structure) {
    match p {
        Term::Unit(_) => {}
        Term::Atom(a) => {
            let pair = Term::or(vec![Term::Atom(a.clone()), Term::Atom(a.negate())]);
            out.push(RuleName::AiDown, ctx.saturate(&pair));
        }
        Term::Or(cs) => {
            let r = cs[0].clone();
            let s = Term::or(cs[1..].to_vec());
            let (nr, ns) = (r.negate(), s.negate());
            grow_i_down_lbv(out, ctx, &r);
            let pair_r = Term::or(vec![r.clone(), nr.clone()]);
            let inner = ctx.compose(&Context::hole().within_and(vec![pair_r]));
            grow_i_down_lbv(out, &inner, &s);
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![
                    Term::and(vec![Term::or(vec![s.clone(), ns.clone()]), nr.clone()]),
                    r.clone(),
                ])),
            );
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![Term::and(vec![nr, ns]), r, s])),
            );
        }
        Term::And(cs) => {
            let r = cs[0].clone();
            let s = Term::and(cs[1..].to_vec());
            let (nr, ns) = (r.negate(), s.negate());
            grow_i_down_lbv(out, ctx, &r);
            let pair_r = Term::or(vec![r.clone(), nr.clone()]);
            let inner = ctx.compose(&Context::hole().within_and(vec![pair_r]));
            grow_i_down_lbv(out, &inner, &s);
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![
                    Term::and(vec![Term::or(vec![s.clone(), ns.clone()]), r.clone()]),
                    nr.clone(),
                ])),
            );
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![Term::and(vec![r, s]), nr, ns])),
            );
        }
    }
}

fn expand_i_down_lbv(ctx: &Context<LbvUnit>, p: &Structure) -> LbvDerivation {
    let mut out = DeepDerivation::single(SystemId::LBVCut, ctx.saturate(&one()));
    grow_i_down_lbv(&mut out, ctx, p);
    out
}

fn negate_ctx(c: &Context<LbvUnit>) -> Context<LbvUnit> {
    fn go(t: &ContextTree<LbvUnit>) -> ContextTree<LbvUnit> {
        match t {
            ContextTree::Hole => ContextTree::Hole,
            ContextTree::Unit(u) => ContextTree::Unit(*u),
            ContextTree::Atom(a) => ContextTree::Atom(a.negate()),
            ContextTree::Or(cs) => ContextTree::And(cs.iter().map(go).collect()),
            ContextTree::And(cs) => ContextTree::Or(cs.iter().map(go).collect()),
        }
    }
    Context::new(go(c.tree())).expect("negation preserves the hole")
}

/// Replace general interaction and co-interaction instances by their
/// structurally recursive `{ai_down, ai_up, s}` expansions.
pub fn lbv_atomize(d: &LbvDerivation) -> Result<LbvDerivation, Error> {
    let mut out = DeepDerivation::single(SystemId::LBVCut, d.premise.clone());
    let mut prev = d.premise.clone();
    for step in &d.steps {
        match step.rule {
            RuleName::IDown => {
                let (ctx, sub) = find_instance(RuleName::IDown, &prev, &step.result, CAP)?
                    .ok_or_else(|| Error::shape("invalid i_down step"))?;
                let p = sub.term("P").unwrap().clone();
                let expansion = expand_i_down_lbv(&ctx, &p);
                debug_assert_eq!(expansion.premise, prev);
                debug_assert_eq!(expansion.conclusion(), &step.result);
                for e in &expansion.steps {
                    out.push(e.rule, e.result.clone());
                }
            }
            RuleName::IUp => {
                let (ctx, sub) = find_instance(RuleName::IUp, &prev, &step.result, CAP)?
                    .ok_or_else(|| Error::shape("invalid i_up step"))?;
                let p = sub.term("P").unwrap().clone();
                let down = expand_i_down_lbv(&negate_ctx(&ctx), &p.negate());
                let expansion = down.dual()?;
                debug_assert_eq!(expansion.premise, prev);
                debug_assert_eq!(expansion.conclusion(), &step.result);
                for e in &expansion.steps {
                    out.push(e.rule, e.result.clone());
                }
            }
            r => out.push(r, step.result.clone()),
        }
        prev = step.result.clone();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// MLL proofs to LBV proofs
// ---------------------------------------------------------------------------

/// Translate a checked MLL+mix proof into an LBV proof of the translated
/// sequent: identities become (atomized) interactions, pars are absorbed by
/// canonical forms, tensors contribute two switches, mixes concatenate under
/// a par embedding.
pub fn mll_proof_to_lbv(t: &MllProof) -> Result<LbvDerivation, Error> {
    let target = to_lbv_sequent(&t.conclusion);
    let out = match t.rule.as_str() {
        "id" => {
            let v = to_lbv(&t.conclusion.0[0]);
            let mut d = DeepDerivation::single(SystemId::LBVg, one());
            d.push(RuleName::IDown, Term::or(vec![v.clone(), v.negate()]));
            lbv_atomize(&d)?
        }
        "parr" => mll_proof_to_lbv(&t.children[0])?,
        "tensor" => {
            let k1 = mll_proof_to_lbv(&t.children[0])?;
            let k2 = mll_proof_to_lbv(&t.children[1])?;
            let (p, q, gamma, delta) = tensor_parts(t)?;
            let ctx = Context::hole().within_and(vec![k2.conclusion().clone()]);
            let mut d = k2.clone();
            d = d.concat(&k1.embed(&ctx))?;
            let left = Term::or(vec![p.clone(), gamma.clone()]);
            d.push(
                RuleName::Switch,
                Term::or(vec![Term::and(vec![left, q.clone()]), delta.clone()]),
            );
            d.push(
                RuleName::Switch,
                Term::or(vec![Term::and(vec![p, q]), gamma, delta]),
            );
            d
        }
        "mix" => {
            let k1 = mll_proof_to_lbv(&t.children[0])?;
            let k2 = mll_proof_to_lbv(&t.children[1])?;
            let ctx = Context::hole().within_or(vec![k1.conclusion().clone()]);
            k1.concat(&k2.embed(&ctx))?
        }
        other => return Err(Error::shape(format!("unknown MLL rule `{other}`"))),
    };
    if out.conclusion() != &target {
        return Err(Error::shape(format!(
            "translated proof concludes `{}`, expected `{}`",
            out.conclusion(),
            target
        )));
    }
    Ok(out.into_system(SystemId::LBV))
}

fn tensor_parts(t: &MllProof) -> Result<(Structure, Structure, Structure, Structure), Error> {
    let c = &t.conclusion.0;
    let k1 = &t.children[0].conclusion.0;
    let k2 = &t.children[1].conclusion.0;
    for f in c {
        if let MllFormula::Tensor(p, q) = f {
            if let (Some(g1), Some(g2)) = (
                multiset_sub_mll(k1, &[(**p).clone()]),
                multiset_sub_mll(k2, &[(**q).clone()]),
            ) {
                let mut joined = g1.clone();
                joined.extend(g2.clone());
                let rest: Vec<MllFormula> = {
                    let mut r = c.clone();
                    let i = r.iter().position(|x| x == f).unwrap();
                    r.remove(i);
                    r
                };
                if same_multiset_mll(&joined, &rest) {
                    return Ok((
                        to_lbv(p),
                        to_lbv(q),
                        to_lbv_sequent(&MllSequent(g1)),
                        to_lbv_sequent(&MllSequent(g2)),
                    ));
                }
            }
        }
    }
    Err(Error::shape("tensor node does not split its conclusion"))
}

// ---------------------------------------------------------------------------
// Shallow splitting
// ---------------------------------------------------------------------------

/// Certificates produced by splitting a provable `[(R,T), P]`.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub p1: Structure,
    pub p2: Structure,
    /// Derivation from `[p1, p2]` down to `P`.
    pub context_derivation: LbvDerivation,
    /// Proof of `[R, p1]`.
    pub proof1: LbvDerivation,
    /// Proof of `[T, p2]`.
    pub proof2: LbvDerivation,
}

fn multiset_sub(view: &[Structure], minus: &[Structure]) -> Option<Vec<Structure>> {
    let mut rest = view.to_vec();
    for m in minus {
        let i = rest.iter().position(|x| x == m)?;
        rest.remove(i);
    }
    Some(rest)
}

/// Split on the leftmost copar of the conclusion (first child versus the
/// rest).
pub fn shallow_splitting(phi: &LbvDerivation) -> Result<SplitResult, Error> {
    let conclusion = phi.conclusion().clone();
    let view = conclusion.or_view();
    let copar = view
        .iter()
        .find(|c| matches!(c, Term::And(_)))
        .ok_or_else(|| Error::shape("conclusion has no copar to split"))?
        .clone();
    let parts = copar.and_view();
    let r = parts[0].clone();
    let t = Term::and(parts[1..].to_vec());
    let p = Term::or(multiset_sub(&view, &[copar]).unwrap());
    shallow_splitting_parts(phi, &r, &t, &p)
}

/// Shallow splitting with an explicit designation `conclusion = [(r,t), p]`.
pub fn shallow_splitting_parts(
    phi: &LbvDerivation,
    r: &Structure,
    t: &Structure,
    p: &Structure,
) -> Result<SplitResult, Error> {
    let expected = Term::or(vec![Term::and(vec![r.clone(), t.clone()]), p.clone()]);
    if phi.conclusion() != &expected {
        return Err(Error::shape(format!(
            "conclusion `{}` is not of shape `{}`",
            phi.conclusion(),
            expected
        )));
    }
    let out = ssp(phi, r, t, p, 0)?;
    debug_assert!(validate_split(&out, r, t, p));
    Ok(out)
}

fn validate_split(out: &SplitResult, r: &Structure, t: &Structure, p: &Structure) -> bool {
    out.context_derivation.premise == Term::or(vec![out.p1.clone(), out.p2.clone()])
        && out.context_derivation.conclusion() == p
        && out.context_derivation.check(CAP).is_ok()
        && out.proof1.is_proof()
        && out.proof1.conclusion() == &Term::or(vec![r.clone(), out.p1.clone()])
        && out.proof1.check(CAP).is_ok()
        && out.proof2.is_proof()
        && out.proof2.conclusion() == &Term::or(vec![t.clone(), out.p2.clone()])
        && out.proof2.check(CAP).is_ok()
}

fn prefix_of(phi: &LbvDerivation) -> LbvDerivation {
    let mut d = DeepDerivation::single(phi.system, phi.premise.clone());
    for s in &phi.steps[..phi.steps.len() - 1] {
        d.push(s.rule, s.result.clone());
    }
    d
}

fn ssp(
    phi: &LbvDerivation,
    r: &Structure,
    t: &Structure,
    p: &Structure,
    depth: usize,
) -> Result<SplitResult, Error> {
    if depth > 4000 {
        return Err(Error::shape("splitting recursion too deep"));
    }
    // Trivial designations.
    if *r == one() {
        return Ok(SplitResult {
            p1: one(),
            p2: p.clone(),
            context_derivation: DeepDerivation::single(SystemId::LBV, p.clone()),
            proof1: DeepDerivation::single(SystemId::LBV, one()),
            proof2: phi.clone().into_system(SystemId::LBV),
        });
    }
    if *t == one() {
        return Ok(SplitResult {
            p1: p.clone(),
            p2: one(),
            context_derivation: DeepDerivation::single(SystemId::LBV, p.clone()),
            proof1: phi.clone().into_system(SystemId::LBV),
            proof2: DeepDerivation::single(SystemId::LBV, one()),
        });
    }
    if phi.length() == 0 {
        return Err(Error::shape(
            "nontrivial copar conclusion cannot be the axiom",
        ));
    }

    let prefix = prefix_of(phi);
    let g = prefix.conclusion().clone();
    let f = phi.conclusion().clone();
    let rule = phi.steps.last().unwrap().rule;
    let k = Term::and(vec![r.clone(), t.clone()]);
    let g_view = g.or_view();
    let mut last_err = Error::shape("no candidate decomposition");

    // (a) the step happened inside P
    if let Some(rest) = multiset_sub(&g_view, &[k.clone()]) {
        let p0 = Term::or(rest);
        if crate::rules::check_step_rule(rule, &p0, p, CAP).unwrap_or(false) {
            match ssp(&prefix, r, t, &p0, depth + 1) {
                Ok(mut res) => {
                    res.context_derivation.push(rule, p.clone());
                    return Ok(res);
                }
                Err(e) => last_err = e,
            }
        }
    }

    // (b)/(c) the step happened inside R or T
    if let Some(rest) = multiset_sub(&g_view, &p.or_view()) {
        if rest.len() == 1 {
            let x = rest[0].clone();
            if let Some(r_parts) = multiset_sub(&x.and_view(), &t.and_view()) {
                let r0 = Term::and(r_parts);
                if crate::rules::check_step_rule(rule, &r0, r, CAP).unwrap_or(false) {
                    match ssp(&prefix, &r0, t, p, depth + 1) {
                        Ok(mut res) => {
                            res.proof1
                                .push(rule, Term::or(vec![r.clone(), res.p1.clone()]));
                            return Ok(res);
                        }
                        Err(e) => last_err = e,
                    }
                }
            }
            if let Some(t_parts) = multiset_sub(&x.and_view(), &r.and_view()) {
                let t0 = Term::and(t_parts);
                if crate::rules::check_step_rule(rule, &t0, t, CAP).unwrap_or(false) {
                    match ssp(&prefix, r, &t0, p, depth + 1) {
                        Ok(mut res) => {
                            res.proof2
                                .push(rule, Term::or(vec![t.clone(), res.p2.clone()]));
                            return Ok(res);
                        }
                        Err(e) => last_err = e,
                    }
                }
            }
        }
    }

    // (d)/(e) the last switch interacts with the designated copar
    if rule == RuleName::Switch {
        for (a_part, b_part, d_part, e_part) in switch_root_instances(&g, &f)? {
            let redex_copar = Term::and(vec![a_part.clone(), b_part.clone()]);
            if redex_copar == k {
                match split_case_merge(&prefix, r, t, p, &a_part, &b_part, &d_part, &e_part, depth)
                {
                    Ok(res) => return Ok(res),
                    Err(e) => last_err = e,
                }
            }
            if d_part.or_view().contains(&k) {
                match split_case_inside_par(
                    &prefix, r, t, p, &a_part, &b_part, &d_part, &e_part, depth,
                ) {
                    Ok(res) => return Ok(res),
                    Err(e) => last_err = e,
                }
            }
        }
    }

    Err(Error::shape(format!(
        "splitting stuck on `{f}` from `{g}` via {rule}: {last_err}"
    )))
}

/// All root-level switch instances connecting `g` to `f`: quadruples
/// `(A, B, D, E)` with `f = [(A,B), D, E]` and `g = [(A,[B,D]), E]`.
fn switch_root_instances(
    g: &Structure,
    f: &Structure,
) -> Result<Vec<(Structure, Structure, Structure, Structure)>, Error> {
    let sch = crate::rules::schema::<LbvUnit>(RuleName::Switch);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for occ in enumerate_occurrences(f, CAP)? {
        let siblings: Vec<Structure> = match occ.context.tree() {
            ContextTree::Hole => Vec::new(),
            ContextTree::Or(cs) if cs.iter().any(|c| matches!(c, ContextTree::Hole)) => cs
                .iter()
                .filter(|c| !matches!(c, ContextTree::Hole))
                .map(tree_to_term)
                .collect(),
            _ => continue,
        };
        for sub in crate::rules::match_pattern(&sch.conclusion, &occ.focus) {
            let premise = occ
                .context
                .saturate(&crate::rules::apply(&sch.premise, &sub));
            if premise != *g {
                continue;
            }
            let a = sub.term("P").unwrap().clone();
            let b = sub.term("Q").unwrap().clone();
            let d = sub.term("R").unwrap().clone();
            let e = Term::or(siblings.clone());
            if seen.insert((a.clone(), b.clone(), d.clone(), e.clone())) {
                out.push((a, b, d, e));
            }
        }
    }
    Ok(out)
}

fn tree_to_term(tree: &ContextTree<LbvUnit>) -> Structure {
    match tree {
        ContextTree::Hole => one(),
        ContextTree::Unit(u) => Term::Unit(*u),
        ContextTree::Atom(a) => Term::Atom(a.clone()),
        ContextTree::Or(cs) => Term::or(cs.iter().map(tree_to_term).collect()),
        ContextTree::And(cs) => Term::and(cs.iter().map(tree_to_term).collect()),
    }
}

/// All splits of `part`'s children into two groups drawable from the two
/// pools.
fn consistent_splits_against(
    part: &Structure,
    left_pool: &Structure,
    right_pool: &Structure,
) -> Vec<(Structure, Structure)> {
    let parts = part.and_view();
    let n = parts.len();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (i, x) in parts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                l.push(x.clone());
            } else {
                r.push(x.clone());
            }
        }
        let lt = Term::and(l);
        let rt = Term::and(r);
        if multiset_sub(&left_pool.and_view(), &lt.and_view()).is_some()
            && multiset_sub(&right_pool.and_view(), &rt.and_view()).is_some()
            && seen.insert((lt.clone(), rt.clone()))
        {
            out.push((lt, rt));
        }
    }
    out
}

/// Case: the final switch assembled the designated copar out of `B` (moved
/// beside `D`) and `A`; three inductive splittings recombine.
#[allow(clippy::too_many_arguments)]
fn split_case_merge(
    prefix: &LbvDerivation,
    r: &Structure,
    t: &Structure,
    p: &Structure,
    a_part: &Structure,
    b_part: &Structure,
    d_part: &Structure,
    e_part: &Structure,
    depth: usize,
) -> Result<SplitResult, Error> {
    let x = Term::or(vec![b_part.clone(), d_part.clone()]);
    let rec1 = ssp(prefix, &x, a_part, e_part, depth + 1)?;
    let p1p = rec1.p1.clone();
    let p2p = rec1.p2.clone();
    let mut last_err = Error::shape("no consistent split of the merged copar");
    for (r1, t1) in consistent_splits_against(b_part, r, t) {
        for (r2, t2) in consistent_splits_against(a_part, r, t) {
            if Term::and(vec![r1.clone(), r2.clone()]) != *r
                || Term::and(vec![t1.clone(), t2.clone()]) != *t
            {
                continue;
            }
            let inner_p = Term::or(vec![d_part.clone(), p1p.clone()]);
            let rec2 = match ssp(&rec1.proof1, &r1, &t1, &inner_p, depth + 1) {
                Ok(v) => v,
                Err(e) => {
                    last_err = e;
                    continue;
                }
            };
            let rec3 = match ssp(&rec1.proof2, &r2, &t2, &p2p, depth + 1) {
                Ok(v) => v,
                Err(e) => {
                    last_err = e;
                    continue;
                }
            };

            let p1 = Term::or(vec![rec2.p1.clone(), rec3.p1.clone()]);
            let p2 = Term::or(vec![rec2.p2.clone(), rec3.p2.clone()]);

            // [p1,p2] ->* [rec2.p1, rec2.p2, p2'] ->* [d, p1', p2'] ->* [d, e] = p
            let build = || -> Result<LbvDerivation, Error> {
                let mut ctx_der = DeepDerivation::single(
                    SystemId::LBV,
                    Term::or(vec![p1.clone(), p2.clone()]),
                );
                let frame3 =
                    Context::hole().within_or(vec![rec2.p1.clone(), rec2.p2.clone()]);
                ctx_der = ctx_der.concat(&rec3.context_derivation.embed(&frame3))?;
                let frame2 = Context::hole().within_or(vec![p2p.clone()]);
                ctx_der = ctx_der.concat(&rec2.context_derivation.embed(&frame2))?;
                let frame1 = Context::hole().within_or(vec![d_part.clone()]);
                ctx_der = ctx_der.concat(&rec1.context_derivation.embed(&frame1))?;
                Ok(ctx_der)
            };
            let Ok(ctx_der) = build() else {
                last_err = Error::shape("merge case: context derivation failed to chain");
                continue;
            };
            if ctx_der.conclusion() != p {
                last_err = Error::shape("merge case: context derivation misses P");
                continue;
            }

            let proof1 = assemble_half(&rec3.proof1, &rec2.proof1, &r2, &rec3.p1, r, &p1);
            let proof2 = assemble_half(&rec3.proof2, &rec2.proof2, &t2, &rec3.p2, t, &p2);
            let (Ok(proof1), Ok(proof2)) = (proof1, proof2) else {
                last_err = Error::shape("merge case: half assembly failed");
                continue;
            };

            let res = SplitResult {
                p1,
                p2,
                context_derivation: ctx_der,
                proof1,
                proof2,
            };
            if validate_split(&res, r, t, p) {
                return Ok(res);
            }
            last_err = Error::shape("merge case certificates failed validation");
        }
    }
    Err(last_err)
}

/// Compose proofs of `[outer_r, outer_p]` and `[inner_r, inner_p]` into a
/// proof of `[whole_r, p_joined]` with one switch.
fn assemble_half(
    outer: &LbvDerivation,
    inner: &LbvDerivation,
    outer_r: &Structure,
    outer_p: &Structure,
    whole_r: &Structure,
    p_joined: &Structure,
) -> Result<LbvDerivation, Error> {
    let mut d = outer.clone().into_system(SystemId::LBV);
    let frame = Context::hole()
        .within_and(vec![outer_r.clone()])
        .within_or(vec![outer_p.clone()]);
    d = d.concat(&inner.embed(&frame))?;
    d.push(
        RuleName::Switch,
        Term::or(vec![whole_r.clone(), p_joined.clone()]),
    );
    if d.conclusion() != &Term::or(vec![whole_r.clone(), p_joined.clone()]) {
        return Err(Error::shape("half assembly missed its target"));
    }
    Ok(d)
}

/// Case: the designated copar sits inside the par the final switch split.
#[allow(clippy::too_many_arguments)]
fn split_case_inside_par(
    prefix: &LbvDerivation,
    r: &Structure,
    t: &Structure,
    p: &Structure,
    a_part: &Structure,
    b_part: &Structure,
    d_part: &Structure,
    e_part: &Structure,
    depth: usize,
) -> Result<SplitResult, Error> {
    let k = Term::and(vec![r.clone(), t.clone()]);
    let u_prime = Term::or(multiset_sub(&d_part.or_view(), &[k.clone()]).unwrap());
    let x = Term::or(vec![b_part.clone(), d_part.clone()]);
    let rec1 = ssp(prefix, &x, a_part, e_part, depth + 1)?;
    let (u1, u2) = (rec1.p1.clone(), rec1.p2.clone());
    // rec1.proof1 proves [x, u1] = [(r,t), b, u', u1]
    let inner_p = Term::or(vec![b_part.clone(), u_prime.clone(), u1.clone()]);
    let rec2 = ssp(&rec1.proof1, r, t, &inner_p, depth + 1)?;

    // [p1,p2] ->* [b, u', u1] ->* [(b,[a,u2]), u', u1] -s->
    // [(a,b), u2, u', u1] ->* [(a,b), u', e] = p
    let mut ctx_der = rec2.context_derivation.clone();
    let embed_ctx = Context::hole()
        .within_and(vec![b_part.clone()])
        .within_or(vec![u_prime.clone(), u1.clone()]);
    ctx_der = ctx_der.concat(&rec1.proof2.embed(&embed_ctx))?;
    let copar_ab = Term::and(vec![a_part.clone(), b_part.clone()]);
    ctx_der.push(
        RuleName::Switch,
        Term::or(vec![
            copar_ab.clone(),
            u2.clone(),
            u_prime.clone(),
            u1.clone(),
        ]),
    );
    let frame = Context::hole().within_or(vec![copar_ab, u_prime]);
    ctx_der = ctx_der.concat(&rec1.context_derivation.embed(&frame))?;
    if ctx_der.conclusion() != p {
        return Err(Error::shape(
            "inside-par case: context derivation misses P",
        ));
    }
    let res = SplitResult {
        p1: rec2.p1,
        p2: rec2.p2,
        context_derivation: ctx_der,
        proof1: rec2.proof1,
        proof2: rec2.proof2,
    };
    if validate_split(&res, r, t, p) {
        Ok(res)
    } else {
        Err(Error::shape("inside-par certificates failed validation"))
    }
}

// ---------------------------------------------------------------------------
// Context reduction and full splitting
// ---------------------------------------------------------------------------

/// Builder for the derivations `[K, X] ->* C{X}`, one layer per recursion
/// step of the context reduction.
#[derive(Clone, Debug)]
pub enum CtxPlan {
    /// `C` is the hole or a plain par frame: a single line suffices.
    Leaf,
    /// `C = (C', Q)`: rebuild inside, then prove `Q` beside the result.
    AndFrame {
        inner: Box<CtxPlan>,
        inner_ctx: Context<LbvUnit>,
        q_proof: LbvDerivation,
    },
    /// `C = [(C'', Q'), Q]`: one splitting of `Q`, one switch, recurse.
    ParSplit {
        inner: Box<CtxPlan>,
        inner_ctx: Context<LbvUnit>,
        q_prime: Structure,
        q1: Structure,
        q2: Structure,
        qq_proof: LbvDerivation,
        q_der: LbvDerivation,
    },
}

#[derive(Clone, Debug)]
pub struct CtxReduction {
    pub k: Structure,
    pub plan: CtxPlan,
    /// Proof of `[K, P]`.
    pub proof: LbvDerivation,
    ctx: Context<LbvUnit>,
}

impl CtxReduction {
    /// The derivation `[K, X] ->* C{X}` for an arbitrary structure `X`.
    pub fn derivation_for(&self, x: &Structure) -> LbvDerivation {
        build_plan(&self.plan, &self.k, &self.ctx, x)
    }
}

fn build_plan(
    plan: &CtxPlan,
    k: &Structure,
    ctx: &Context<LbvUnit>,
    x: &Structure,
) -> LbvDerivation {
    match plan {
        CtxPlan::Leaf => {
            let d =
                DeepDerivation::single(SystemId::LBV, Term::or(vec![k.clone(), x.clone()]));
            debug_assert_eq!(d.conclusion(), &ctx.saturate(x));
            d
        }
        CtxPlan::AndFrame {
            inner,
            inner_ctx,
            q_proof,
        } => {
            let mut d = build_plan(inner, k, inner_ctx, x);
            let inner_filled = inner_ctx.saturate(x);
            let frame = Context::hole().within_and(vec![inner_filled]);
            d = d
                .concat(&q_proof.embed(&frame))
                .expect("frame proof concatenates");
            debug_assert_eq!(d.conclusion(), &ctx.saturate(x));
            d
        }
        CtxPlan::ParSplit {
            inner,
            inner_ctx,
            q_prime,
            q1,
            q2,
            qq_proof,
            q_der,
        } => {
            let inner_target_ctx = inner_ctx.within_or(vec![q1.clone()]);
            let mut d = build_plan(inner, k, &inner_target_ctx, x);
            let cxx = inner_ctx.saturate(x);
            let embed_ctx = Context::hole()
                .within_and(vec![cxx.clone()])
                .within_or(vec![q1.clone()]);
            d = d
                .concat(&qq_proof.embed(&embed_ctx))
                .expect("q' proof concatenates");
            let copar = Term::and(vec![cxx, q_prime.clone()]);
            d.push(
                RuleName::Switch,
                Term::or(vec![copar.clone(), q2.clone(), q1.clone()]),
            );
            let frame = Context::hole().within_or(vec![copar]);
            d = d
                .concat(&q_der.embed(&frame))
                .expect("q derivation concatenates");
            debug_assert_eq!(d.conclusion(), &ctx.saturate(x));
            d
        }
    }
}

/// Split a proof of a copar into proofs of designated halves of its
/// children: every step of the chain acts inside one half, so the chain
/// projects.
pub fn split_copar_proof(
    phi: &LbvDerivation,
    a: &Structure,
    b: &Structure,
) -> Result<(LbvDerivation, LbvDerivation), Error> {
    debug_assert_eq!(phi.conclusion(), &Term::and(vec![a.clone(), b.clone()]));
    let lines: Vec<Structure> = phi.lines().into_iter().cloned().collect();
    let rules: Vec<RuleName> = phi.steps.iter().map(|s| s.rule).collect();
    let mut a_cur = a.clone();
    let mut b_cur = b.clone();
    let mut a_steps: Vec<(RuleName, Structure)> = Vec::new();
    let mut b_steps: Vec<(RuleName, Structure)> = Vec::new();
    for j in (0..rules.len()).rev() {
        let g = &lines[j];
        let rule = rules[j];
        let mut assigned = false;
        if let Some(parts) = multiset_sub(&g.and_view(), &b_cur.and_view()) {
            let a_prev = Term::and(parts);
            if a_prev != a_cur && crate::rules::check_step_rule(rule, &a_prev, &a_cur, CAP)? {
                a_steps.push((rule, a_cur.clone()));
                a_cur = a_prev;
                assigned = true;
            }
        }
        if !assigned {
            if let Some(parts) = multiset_sub(&g.and_view(), &a_cur.and_view()) {
                let b_prev = Term::and(parts);
                if b_prev != b_cur
                    && crate::rules::check_step_rule(rule, &b_prev, &b_cur, CAP)?
                {
                    b_steps.push((rule, b_cur.clone()));
                    b_cur = b_prev;
                    assigned = true;
                }
            }
        }
        if !assigned {
            return Err(Error::shape(format!(
                "copar projection stuck at `{g}` ({rule})"
            )));
        }
    }
    if a_cur != one() || b_cur != one() {
        return Err(Error::shape("copar projection does not reach the axiom"));
    }
    let mut pa = DeepDerivation::single(SystemId::LBV, one());
    for (rule, f) in a_steps.into_iter().rev() {
        pa.push(rule, f);
    }
    let mut pb = DeepDerivation::single(SystemId::LBV, one());
    for (rule, f) in b_steps.into_iter().rev() {
        pb.push(rule, f);
    }
    Ok((pa, pb))
}

/// Reduce the context of a provable `C{P}` to a single par partner `K`.
pub fn context_reduction(
    phi: &LbvDerivation,
    ctx: &Context<LbvUnit>,
    focus: &Structure,
) -> Result<CtxReduction, Error> {
    debug_assert_eq!(phi.conclusion(), &ctx.saturate(focus));
    if ctx.is_hole() {
        return Ok(CtxReduction {
            k: one(),
            plan: CtxPlan::Leaf,
            proof: phi.clone().into_system(SystemId::LBV),
            ctx: ctx.clone(),
        });
    }
    match ctx.tree() {
        ContextTree::And(cs) => {
            let (hole_child, siblings) = frame_split(cs);
            let inner_ctx = Context::new(hole_child.clone())?;
            let q = Term::and(siblings);
            let inner_filled = inner_ctx.saturate(focus);
            let (proof_inner, q_proof) = split_copar_proof(phi, &inner_filled, &q)?;
            let rec = context_reduction(&proof_inner, &inner_ctx, focus)?;
            Ok(CtxReduction {
                k: rec.k,
                plan: CtxPlan::AndFrame {
                    inner: Box::new(rec.plan),
                    inner_ctx,
                    q_proof,
                },
                proof: rec.proof,
                ctx: ctx.clone(),
            })
        }
        ContextTree::Or(cs) => {
            let (hole_child, siblings) = frame_split(cs);
            let q = Term::or(siblings);
            if matches!(hole_child, ContextTree::Hole) {
                return Ok(CtxReduction {
                    k: q,
                    plan: CtxPlan::Leaf,
                    proof: phi.clone().into_system(SystemId::LBV),
                    ctx: ctx.clone(),
                });
            }
            let ContextTree::And(inner_cs) = hole_child else {
                return Err(Error::shape("malformed context"));
            };
            let (inner_hole, inner_siblings) = frame_split(inner_cs);
            let c_dd = Context::new(inner_hole.clone())?;
            let q_prime = Term::and(inner_siblings);
            let r_filled = c_dd.saturate(focus);
            let spl = shallow_splitting_parts(phi, &r_filled, &q_prime, &q)?;
            let (q1, q2) = (spl.p1.clone(), spl.p2.clone());
            let new_ctx = c_dd.within_or(vec![q1.clone()]);
            if spl.proof1.conclusion() != &new_ctx.saturate(focus) {
                return Err(Error::shape("context reduction shape drift"));
            }
            let rec = context_reduction(&spl.proof1, &new_ctx, focus)?;
            Ok(CtxReduction {
                k: rec.k,
                plan: CtxPlan::ParSplit {
                    inner: Box::new(rec.plan),
                    inner_ctx: c_dd,
                    q_prime,
                    q1,
                    q2,
                    qq_proof: spl.proof2,
                    q_der: spl.context_derivation,
                },
                proof: rec.proof,
                ctx: ctx.clone(),
            })
        }
        _ => Err(Error::shape("context hole cannot sit under a leaf")),
    }
}

fn frame_split(cs: &[ContextTree<LbvUnit>]) -> (&ContextTree<LbvUnit>, Vec<Structure>) {
    let mut hole_child = None;
    let mut siblings = Vec::new();
    for c in cs {
        if c.order() == 1 {
            hole_child = Some(c);
        } else {
            siblings.push(tree_to_term(c));
        }
    }
    (hole_child.expect("one hole"), siblings)
}

/// Full splitting: context reduction followed by shallow splitting.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub s1: Structure,
    pub s2: Structure,
    /// Proof of `[P, s1]`.
    pub proof1: LbvDerivation,
    /// Proof of `[Q, s2]`.
    pub proof2: LbvDerivation,
    k_der: LbvDerivation,
    reduction: CtxReduction,
}

impl Splitting {
    /// The derivation `[X, s1, s2] ->* C{X}` for an arbitrary `X`.
    pub fn derivation_for(&self, x: &Structure) -> Result<LbvDerivation, Error> {
        let start = Term::or(vec![x.clone(), self.s1.clone(), self.s2.clone()]);
        let mut d = DeepDerivation::single(SystemId::LBV, start);
        let frame = Context::hole().within_or(vec![x.clone()]);
        d = d.concat(&self.k_der.embed(&frame))?;
        d = d.concat(&self.reduction.derivation_for(x))?;
        Ok(d)
    }
}

/// Split a provable `C{(P,Q)}` at the designated copar occurrence.
pub fn splitting(
    phi: &LbvDerivation,
    ctx: &Context<LbvUnit>,
    p: &Structure,
    q: &Structure,
) -> Result<Splitting, Error> {
    let focus = Term::and(vec![p.clone(), q.clone()]);
    let reduction = context_reduction(phi, ctx, &focus)?;
    let spl = shallow_splitting_parts(&reduction.proof, p, q, &reduction.k)?;
    Ok(Splitting {
        s1: spl.p1,
        s2: spl.p2,
        proof1: spl.proof1,
        proof2: spl.proof2,
        k_der: spl.context_derivation,
        reduction,
    })
}

// ---------------------------------------------------------------------------
// Cut elimination
// ---------------------------------------------------------------------------

/// Erase the interaction partner of a designated root atom: from a proof of
/// `[lit, S]`, find where the atom is introduced, cut that interaction off,
/// and drop the partner from everything below. Returns the proof of the
/// erased remainder and the context of the partner inside `S`.
fn erase_intro(
    pi: &LbvDerivation,
    lit: &Atom,
) -> Result<(LbvDerivation, Context<LbvUnit>), Error> {
    let marker_name = fresh_marker(pi, 7);
    let marker = Atom::pos(&marker_name);
    let markers = MarkerMap {
        entries: vec![(marker_name.clone(), lit.clone())],
    };
    let conclusion = pi.conclusion().clone();
    let mut view = conclusion.or_view();
    let pos = view
        .iter()
        .position(|x| *x == Term::Atom(lit.clone()))
        .ok_or_else(|| Error::shape("designated atom is not at the root"))?;
    view[pos] = Term::Atom(marker.clone());
    let marked_conclusion = Term::or(view);
    let traced = trace_markers(pi, &marked_conclusion, &markers)?;

    // the intro step: the last line without the marker
    let traced_lines: Vec<Structure> = traced.lines().into_iter().cloned().collect();
    let rules: Vec<RuleName> = traced.steps.iter().map(|s| s.rule).collect();
    let intro = (0..rules.len())
        .find(|&j| {
            crate::sks::count_atom(&traced_lines[j], &marker_name) == 0
                && crate::sks::count_atom(&traced_lines[j + 1], &marker_name) == 1
        })
        .ok_or_else(|| Error::shape("traced atom has no interaction intro"))?;

    // mark the partner downward from the intro
    let partner_lit = lit.negate();
    let partner_marker = marker.negate();
    let mut marked: Vec<Structure> = traced_lines.clone();
    let with_partner = enumerate_markings(&traced_lines[intro + 1], &partner_lit, &partner_marker)
        .into_iter()
        .filter(|c| {
            crate::sks::count_atom(c, &marker_name) == 2
        })
        .find(|c| {
            find_marked_intro(&traced_lines[intro], c, &markers)
                .ok()
                .flatten()
                .map(|(_, x, y)| x.name == marker_name && y.name == marker_name)
                .unwrap_or(false)
        })
        .ok_or_else(|| Error::shape("cannot pair the intro redex"))?;
    marked[intro + 1] = with_partner;
    for j in intro + 2..traced_lines.len() {
        let prev = marked[j - 1].clone();
        let found = enumerate_markings(&traced_lines[j], &partner_lit, &partner_marker)
            .into_iter()
            .filter(|c| crate::sks::count_atom(c, &marker_name) == 2)
            .find(|c| crate::rules::check_step_rule(rules[j - 1], &prev, c, CAP).unwrap_or(false))
            .ok_or_else(|| Error::shape("partner trace stuck"))?;
        marked[j] = found;
    }

    // extract the partner context from the final line
    let final_marked = marked.last().unwrap().clone();
    let mut final_view = final_marked.or_view();
    let mpos = final_view
        .iter()
        .position(|x| *x == Term::Atom(marker.clone()))
        .ok_or_else(|| Error::shape("designated marker lost"))?;
    final_view.remove(mpos);
    let s_marked = Term::or(final_view);
    let occ = enumerate_occurrences(&s_marked, CAP)?
        .into_iter()
        .find(|o| o.focus == Term::Atom(partner_marker.clone()))
        .ok_or_else(|| Error::shape("partner marker lost"))?;
    let partner_ctx = occ.context;

    // erase both marker polarities
    let mut out = DeepDerivation::single(SystemId::LBV, one());
    for j in 0..intro {
        out.push(rules[j], traced_lines[j + 1].clone());
    }
    // the intro step vanishes: erased(marked[intro + 1]) == lines[intro]
    for j in intro + 1..rules.len() {
        let erased = subst_atom(&marked[j + 1], &marker_name, &one());
        out.push(rules[j], erased);
    }
    let expected = partner_ctx.saturate(&one());
    if out.conclusion() != &expected {
        return Err(Error::shape(format!(
            "erasure concludes `{}`, expected `{}`",
            out.conclusion(),
            expected
        )));
    }
    if !out.check(CAP).is_ok() {
        return Err(Error::shape("erased proof fails to check"));
    }
    Ok((out, partner_ctx))
}

/// Remove every co-interaction, topmost first: split the proof above the
/// cut, erase the two atom flows, and reassemble with one interaction and
/// two context extrusions.
pub fn lbv_elim_cut(phi: &LbvDerivation) -> Result<LbvDerivation, Error> {
    let mut cur = phi.clone();
    loop {
        let Some(i) = cur.steps.iter().position(|s| s.rule == RuleName::AiUp) else {
            break;
        };
        let lines: Vec<Structure> = cur.lines().into_iter().cloned().collect();
        let cut_premise = lines[i].clone();
        let cut_conclusion = lines[i + 1].clone();
        let (ctx, sub) = find_instance(RuleName::AiUp, &cut_premise, &cut_conclusion, CAP)?
            .ok_or_else(|| Error::shape("invalid ai_up step"))?;
        let a = sub.atom("a").unwrap().clone();
        let mut prefix = DeepDerivation::single(SystemId::LBV, lines[0].clone());
        for s in &cur.steps[..i] {
            prefix.push(s.rule, s.result.clone());
        }
        let spl = splitting(
            &prefix,
            &ctx,
            &Term::Atom(a.clone()),
            &Term::Atom(a.negate()),
        )?;
        let (psi1, c1) = erase_intro(&spl.proof1, &a)?;
        let (psi2, c2) = erase_intro(&spl.proof2, &a.negate())?;

        let mut d = psi1.clone();
        d = d.concat(&psi2.embed(&c1))?;
        let composed = c1.compose(&c2);
        d.push(
            RuleName::AiDown,
            composed.saturate(&Term::or(vec![
                Term::Atom(a.clone()),
                Term::Atom(a.negate()),
            ])),
        );
        let inner_extr = ctx_extrude(
            SystemId::LBV,
            &c2,
            &Term::Atom(a.clone()),
            &Term::Atom(a.negate()),
        );
        d = d.concat(&inner_extr.embed(&c1))?;
        let s2 = c2.saturate(&Term::Atom(a.clone()));
        let outer_extr = ctx_extrude(SystemId::LBV, &c1, &Term::Atom(a.negate()), &s2);
        d = d.concat(&outer_extr)?;
        d = d.concat(&spl.derivation_for(&one())?)?;
        if d.conclusion() != &cut_conclusion {
            return Err(Error::shape(format!(
                "cut reassembly concludes `{}`, expected `{}`",
                d.conclusion(),
                cut_conclusion
            )));
        }
        for s in &cur.steps[i + 1..] {
            d.push(s.rule, s.result.clone());
        }
        cur = d.into_system(SystemId::LBV);
    }
    let report = cur.check(CAP);
    if !report.is_ok() {
        return Err(Error::shape(format!("eliminated proof fails: {report}")));
    }
    Ok(cur)
}
