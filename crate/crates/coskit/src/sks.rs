//! Constructive transformations for SKSg/SKS/KS: deduction theorem, medial
//! derivability, atomization, up-rule elimination and cut elimination down
//! to KS.
//!
//! Atom-occurrence tracing is implemented by renaming the designated
//! occurrence to a fresh marker atom throughout the derivation; canonical
//! multisets lose positional identity, so the marker is what ties an
//! occurrence to its contraction copies. Marker atoms are always stored
//! positive and carry a map back to the literal they stand for.

use crate::context::{enumerate_occurrences, Context, ContextTree, DEFAULT_ARITY_CAP};
use crate::derivation::{ClassicalDerivation, DeepDerivation};
use crate::error::Error;
use crate::rules::{apply, match_pattern, schema, RuleName, Subst, SystemId};
use crate::syntax::{Atom, Formula, Term, Units};

const CAP: usize = DEFAULT_ARITY_CAP;

// ---------------------------------------------------------------------------
// Instance search
// ---------------------------------------------------------------------------

/// First decomposition of `premise -> conclusion` as an instance of `rule`,
/// in deterministic enumeration order.
pub fn find_instance<U: Units>(
    rule: RuleName,
    premise: &Term<U>,
    conclusion: &Term<U>,
    arity_cap: usize,
) -> Result<Option<(Context<U>, Subst<U>)>, Error> {
    let sch = schema::<U>(rule);
    let (ctv, cav) = sch.conclusion.vars();
    let (ptv, pav) = sch.premise.vars();
    if ptv.is_subset(&ctv) && pav.is_subset(&cav) {
        for occ in enumerate_occurrences(conclusion, arity_cap)? {
            for sub in match_pattern(&sch.conclusion, &occ.focus) {
                if occ.context.saturate(&apply(&sch.premise, &sub)) == *premise {
                    return Ok(Some((occ.context, sub)));
                }
            }
        }
    }
    if ctv.is_subset(&ptv) && cav.is_subset(&pav) {
        for occ in enumerate_occurrences(premise, arity_cap)? {
            for sub in match_pattern(&sch.premise, &occ.focus) {
                if occ.context.saturate(&apply(&sch.conclusion, &sub)) == *conclusion {
                    return Ok(Some((occ.context, sub)));
                }
            }
        }
    }
    Ok(None)
}

fn negate_context<U: Units>(c: &Context<U>) -> Context<U> {
    fn go<U: Units>(t: &ContextTree<U>) -> ContextTree<U> {
        match t {
            ContextTree::Hole => ContextTree::Hole,
            ContextTree::Unit(u) => ContextTree::Unit(u.negate()),
            ContextTree::Atom(a) => ContextTree::Atom(a.negate()),
            ContextTree::Or(cs) => ContextTree::And(cs.iter().map(go).collect()),
            ContextTree::And(cs) => ContextTree::Or(cs.iter().map(go).collect()),
        }
    }
    Context::new(go(c.tree())).expect("negation preserves the hole")
}

// ---------------------------------------------------------------------------
// Deduction theorem
// ---------------------------------------------------------------------------

/// From a derivation `P -> Q` build the proof of `[neg P, Q]`: interaction
/// on `P` at the root, then the whole derivation inside the context
/// `[neg P, hole]`.
pub fn deduction_fwd(d: &ClassicalDerivation) -> Result<ClassicalDerivation, Error> {
    let p = d.premise.clone();
    let np = p.negate();
    let mut out = DeepDerivation::single(SystemId::SKSg, Formula::TRUE);
    out.push(RuleName::IDown, Term::or(vec![np.clone(), p]));
    let ctx = Context::hole().within_or(vec![np]);
    out.concat(&d.embed(&ctx).into_system(SystemId::SKSg))
}

/// From a proof of `[neg P, Q]` recover the derivation `P -> Q`: run the
/// proof beside `P`, switch the pair together, cut it away.
pub fn deduction_bwd(
    phi: &ClassicalDerivation,
    p: &Formula,
) -> Result<ClassicalDerivation, Error> {
    let np = p.negate();
    let conc = phi.conclusion().clone();
    let mut rest = conc.or_view();
    for part in np.or_view() {
        match rest.iter().position(|x| *x == part) {
            Some(i) => {
                rest.remove(i);
            }
            None => {
                return Err(Error::shape(format!(
                    "conclusion `{conc}` is not of the shape [neg({p}), Q]"
                )))
            }
        }
    }
    let q = Term::or(rest);
    let ctx = Context::hole().within_and(vec![p.clone()]);
    let mut out = d_embed_start(p.clone(), phi, &ctx);
    out.push(
        RuleName::Switch,
        Term::or(vec![Term::and(vec![p.clone(), np]), q.clone()]),
    );
    out.push(RuleName::IUp, q);
    Ok(out)
}

fn d_embed_start(
    start: Formula,
    phi: &ClassicalDerivation,
    ctx: &Context<crate::syntax::ClassicalUnit>,
) -> ClassicalDerivation {
    let mut out = DeepDerivation::single(SystemId::SKSg, start);
    for step in &phi.steps {
        out.push(step.rule, ctx.saturate(&step.result));
    }
    out
}

// ---------------------------------------------------------------------------
// Medial from contraction and weakening
// ---------------------------------------------------------------------------

/// The five-step derivation of a medial instance from `{c_down, w_down}`:
/// four weakenings fill both disjuncts up to `([P,R],[Q,S])`, one
/// contraction collapses them.
pub fn derive_medial_cw(
    p: &Formula,
    q: &Formula,
    r: &Formula,
    s: &Formula,
    ctx: &Context<crate::syntax::ClassicalUnit>,
) -> ClassicalDerivation {
    let pq = Term::and(vec![p.clone(), q.clone()]);
    let rs = Term::and(vec![r.clone(), s.clone()]);
    let qs = Term::or(vec![q.clone(), s.clone()]);
    let pr = Term::or(vec![p.clone(), r.clone()]);
    let target = Term::and(vec![pr.clone(), qs.clone()]);
    let lines = [
        Term::or(vec![pq.clone(), rs.clone()]),
        Term::or(vec![pq.clone(), Term::and(vec![r.clone(), qs.clone()])]),
        Term::or(vec![pq.clone(), target.clone()]),
        Term::or(vec![Term::and(vec![p.clone(), qs.clone()]), target.clone()]),
        Term::or(vec![target.clone(), target.clone()]),
        target,
    ];
    let rules = [
        RuleName::WDown,
        RuleName::WDown,
        RuleName::WDown,
        RuleName::WDown,
        RuleName::CDown,
    ];
    let mut out = DeepDerivation::single(SystemId::SKSg, ctx.saturate(&lines[0]));
    for (i, rule) in rules.iter().enumerate() {
        out.push(*rule, ctx.saturate(&lines[i + 1]));
    }
    out
}

// ---------------------------------------------------------------------------
// Atomization (SKSg -> SKS)
// ---------------------------------------------------------------------------

fn or_split<U: Units>(children: &[Term<U>]) -> (Term<U>, Term<U>) {
    (children[0].clone(), Term::or(children[1..].to_vec()))
}

fn and_split<U: Units>(children: &[Term<U>]) -> (Term<U>, Term<U>) {
    (children[0].clone(), Term::and(children[1..].to_vec()))
}

/// `C{t} ->* C{[p, neg p]}` in `{ai_down, s}` by structural recursion on p.
fn expand_i_down(
    ctx: &Context<crate::syntax::ClassicalUnit>,
    p: &Formula,
) -> ClassicalDerivation {
    let mut out = DeepDerivation::single(SystemId::SKS, ctx.saturate(&Formula::TRUE));
    grow_i_down(&mut out, ctx, p);
    out
}

fn grow_i_down(
    out: &mut ClassicalDerivation,
    ctx: &Context<crate::syntax::ClassicalUnit>,
    p: &Formula,
) {
    match p {
        Term::Unit(_) => {}
        Term::Atom(a) => {
            let pair = Term::or(vec![Term::Atom(a.clone()), Term::Atom(a.negate())]);
            out.push(RuleName::AiDown, ctx.saturate(&pair));
        }
        Term::Or(cs) => {
            let (q, r) = or_split(cs);
            let (nq, nr) = (q.negate(), r.negate());
            grow_i_down(out, ctx, &r);
            let pair_r = Term::or(vec![nr.clone(), r.clone()]);
            let inner = ctx.compose(&Context::hole().within_and(vec![pair_r.clone()]));
            grow_i_down(out, &inner, &q);
            let pair_q = Term::or(vec![nq.clone(), q.clone()]);
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![
                    Term::and(vec![pair_q.clone(), nr.clone()]),
                    r.clone(),
                ])),
            );
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![
                    Term::and(vec![nq, nr]),
                    q.clone(),
                    r.clone(),
                ])),
            );
        }
        Term::And(cs) => {
            let (q, r) = and_split(cs);
            let (nq, nr) = (q.negate(), r.negate());
            grow_i_down(out, ctx, &r);
            let pair_r = Term::or(vec![r.clone(), nr.clone()]);
            let inner = ctx.compose(&Context::hole().within_and(vec![pair_r.clone()]));
            grow_i_down(out, &inner, &q);
            let pair_q = Term::or(vec![q.clone(), nq.clone()]);
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![
                    Term::and(vec![pair_q, r.clone()]),
                    nr.clone(),
                ])),
            );
            out.push(
                RuleName::Switch,
                ctx.saturate(&Term::or(vec![
                    Term::and(vec![q, r]),
                    nq,
                    nr,
                ])),
            );
        }
    }
}

/// `C{f} ->* C{p}` in `{aw_down, s}`.
fn expand_w_down(
    ctx: &Context<crate::syntax::ClassicalUnit>,
    p: &Formula,
) -> ClassicalDerivation {
    let mut out = DeepDerivation::single(SystemId::SKS, ctx.saturate(&Formula::FALSE));
    grow_w_down(&mut out, ctx, p);
    out
}

fn grow_w_down(
    out: &mut ClassicalDerivation,
    ctx: &Context<crate::syntax::ClassicalUnit>,
    p: &Formula,
) {
    match p {
        Term::Unit(crate::syntax::ClassicalUnit::False) => {}
        Term::Unit(crate::syntax::ClassicalUnit::True) => {
            // C{f} = C{(f,[t,t])} -s-> C{[(f,t),t]} = C{t}
            out.push(RuleName::Switch, ctx.saturate(&Formula::TRUE));
        }
        Term::Atom(a) => {
            out.push(RuleName::AwDown, ctx.saturate(&Term::Atom(a.clone())));
        }
        Term::Or(cs) => {
            let (q, r) = or_split(cs);
            grow_w_down(out, ctx, &q);
            let inner = ctx.compose(&Context::hole().within_or(vec![q]));
            grow_w_down(out, &inner, &r);
        }
        Term::And(cs) => {
            let (q, r) = and_split(cs);
            let inner_q = ctx.compose(&Context::hole().within_and(vec![Formula::FALSE]));
            grow_w_down(out, &inner_q, &q);
            let inner_r = ctx.compose(&Context::hole().within_and(vec![q]));
            grow_w_down(out, &inner_r, &r);
        }
    }
}

/// `C{[p,p]} ->* C{p}` in `{ac_down, m}`.
fn expand_c_down(
    ctx: &Context<crate::syntax::ClassicalUnit>,
    p: &Formula,
) -> ClassicalDerivation {
    let start = ctx.saturate(&Term::or(vec![p.clone(), p.clone()]));
    let mut out = DeepDerivation::single(SystemId::SKS, start);
    grow_c_down(&mut out, ctx, p);
    out
}

fn grow_c_down(
    out: &mut ClassicalDerivation,
    ctx: &Context<crate::syntax::ClassicalUnit>,
    p: &Formula,
) {
    match p {
        Term::Unit(_) => {}
        Term::Atom(a) => {
            out.push(RuleName::AcDown, ctx.saturate(&Term::Atom(a.clone())));
        }
        Term::Or(cs) => {
            let (q, r) = or_split(cs);
            let inner_q = ctx.compose(&Context::hole().within_or(vec![r.clone(), r.clone()]));
            grow_c_down(out, &inner_q, &q);
            let inner_r = ctx.compose(&Context::hole().within_or(vec![q]));
            grow_c_down(out, &inner_r, &r);
        }
        Term::And(cs) => {
            let (q, r) = and_split(cs);
            let qq = Term::or(vec![q.clone(), q.clone()]);
            let rr = Term::or(vec![r.clone(), r.clone()]);
            out.push(
                RuleName::Medial,
                ctx.saturate(&Term::and(vec![qq, rr.clone()])),
            );
            let inner_q = ctx.compose(&Context::hole().within_and(vec![rr]));
            grow_c_down(out, &inner_q, &q);
            let inner_r = ctx.compose(&Context::hole().within_and(vec![q]));
            grow_c_down(out, &inner_r, &r);
        }
    }
}

fn expand_general(
    rule: RuleName,
    premise: &Formula,
    conclusion: &Formula,
) -> Result<ClassicalDerivation, Error> {
    let no_instance = || {
        Error::shape(format!(
            "no {rule} instance connects `{premise}` to `{conclusion}`"
        ))
    };
    match rule {
        RuleName::IDown => {
            let (ctx, sub) =
                find_instance(rule, premise, conclusion, CAP)?.ok_or_else(no_instance)?;
            Ok(expand_i_down(&ctx, sub.term("P").unwrap()))
        }
        RuleName::WDown => {
            let (ctx, sub) =
                find_instance(rule, premise, conclusion, CAP)?.ok_or_else(no_instance)?;
            Ok(expand_w_down(&ctx, sub.term("P").unwrap()))
        }
        RuleName::CDown => {
            let (ctx, sub) =
                find_instance(rule, premise, conclusion, CAP)?.ok_or_else(no_instance)?;
            Ok(expand_c_down(&ctx, sub.term("P").unwrap()))
        }
        RuleName::IUp | RuleName::WUp | RuleName::CUp => {
            let down = expand_general(rule.dual(), &conclusion.negate(), &premise.negate())?;
            down.dual()
        }
        other => Err(Error::shape(format!("{other} is not a general rule"))),
    }
}

/// Replace every instance of a general rule by its structurally recursive
/// atomic expansion; the result is an SKS derivation with the same
/// endpoints.
pub fn atomize(d: &ClassicalDerivation) -> Result<ClassicalDerivation, Error> {
    let mut out = DeepDerivation::single(SystemId::SKS, d.premise.clone());
    let mut prev = d.premise.clone();
    for step in &d.steps {
        if step.rule.is_general() {
            let expansion = expand_general(step.rule, &prev, &step.result)?;
            debug_assert_eq!(expansion.premise, prev);
            debug_assert_eq!(expansion.conclusion(), &step.result);
            for e in &expansion.steps {
                out.push(e.rule, e.result.clone());
            }
        } else {
            out.push(step.rule, step.result.clone());
        }
        prev = step.result.clone();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Up rules from their duals
// ---------------------------------------------------------------------------

/// Replace one instance of an up rule by the four-step derivation through
/// its dual: interaction, switch, the dual rule at depth, co-interaction.
/// Self-dual rules come back unchanged.
pub fn derive_up_from_down(
    rule: RuleName,
    premise: &Formula,
    conclusion: &Formula,
) -> Result<ClassicalDerivation, Error> {
    if matches!(rule, RuleName::Switch | RuleName::Medial) {
        let mut out = DeepDerivation::single(SystemId::SKSg, premise.clone());
        out.push(rule, conclusion.clone());
        return Ok(out);
    }
    if !rule.is_up() {
        return Err(Error::shape(format!("{rule} is not an up rule")));
    }
    let (ctx, sub) = find_instance(rule, premise, conclusion, CAP)?.ok_or_else(|| {
        Error::shape(format!(
            "no {rule} instance connects `{premise}` to `{conclusion}`"
        ))
    })?;
    let sch = schema::<crate::syntax::ClassicalUnit>(rule);
    let p = apply(&sch.premise, &sub);
    let q = apply(&sch.conclusion, &sub);
    let (np, nq) = (p.negate(), q.negate());
    let mut out = DeepDerivation::single(SystemId::SKSg, premise.clone());
    out.push(
        RuleName::IDown,
        ctx.saturate(&Term::and(vec![
            p.clone(),
            Term::or(vec![nq.clone(), q.clone()]),
        ])),
    );
    out.push(
        RuleName::Switch,
        ctx.saturate(&Term::or(vec![
            Term::and(vec![p.clone(), nq.clone()]),
            q.clone(),
        ])),
    );
    out.push(
        rule.dual(),
        ctx.saturate(&Term::or(vec![Term::and(vec![p, np]), q.clone()])),
    );
    out.push(RuleName::IUp, ctx.saturate(&q));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Context extrusion
// ---------------------------------------------------------------------------

/// Derivation from `C{[p, q]}` to `[C{p}, q]` using only switch: par frames
/// embed, copar frames contribute one switch each.
pub fn ctx_extrude<U: Units>(
    system: SystemId,
    ctx: &Context<U>,
    p: &Term<U>,
    q: &Term<U>,
) -> DeepDerivation<U> {
    fn go<U: Units>(
        system: SystemId,
        tree: &ContextTree<U>,
        p: &Term<U>,
        q: &Term<U>,
    ) -> DeepDerivation<U> {
        match tree {
            ContextTree::Hole => {
                DeepDerivation::single(system, Term::or(vec![p.clone(), q.clone()]))
            }
            ContextTree::Or(cs) => {
                let (hole_child, siblings) = split_frame(cs);
                let inner = go(system, hole_child, p, q);
                let frame = Context::hole().within_or(siblings);
                inner.embed(&frame)
            }
            ContextTree::And(cs) => {
                let (hole_child, siblings) = split_frame(cs);
                let inner = go(system, hole_child, p, q);
                let frame = Context::hole().within_and(siblings.clone());
                let mut out = inner.embed(&frame);
                // (R, [D{p}, q]) -s-> [(R, D{p}), q]
                let inner_filled = fill_tree(hole_child, p);
                let mut parts = siblings;
                parts.push(inner_filled);
                out.push(
                    RuleName::Switch,
                    Term::or(vec![Term::and(parts), q.clone()]),
                );
                out
            }
            _ => unreachable!("the hole path passes through n-ary nodes only"),
        }
    }
    go(system, ctx.tree(), p, q)
}

fn split_frame<U: Units>(cs: &[ContextTree<U>]) -> (&ContextTree<U>, Vec<Term<U>>) {
    let mut hole_child = None;
    let mut siblings = Vec::new();
    for c in cs {
        if c.order() == 1 {
            hole_child = Some(c);
        } else {
            siblings.push(fill_tree(c, &Term::Unit(U::or_identity())));
        }
    }
    (hole_child.expect("exactly one hole"), siblings)
}

fn fill_tree<U: Units>(tree: &ContextTree<U>, w: &Term<U>) -> Term<U> {
    Context::new(tree.clone())
        .map(|c| c.saturate(w))
        .unwrap_or_else(|_| match tree {
            ContextTree::Unit(u) => Term::Unit(*u),
            ContextTree::Atom(a) => Term::Atom(a.clone()),
            ContextTree::Or(cs) => Term::or(cs.iter().map(|c| fill_tree(c, w)).collect()),
            ContextTree::And(cs) => Term::and(cs.iter().map(|c| fill_tree(c, w)).collect()),
            ContextTree::Hole => unreachable!(),
        })
}

/// Whether a cut instance context is already shallow (the co-interaction
/// happens beside the rest of the structure, at the root).
fn is_shallow<U: Units>(ctx: &Context<U>) -> bool {
    match ctx.tree() {
        ContextTree::Hole => true,
        ContextTree::Or(cs) => cs.iter().all(|c| matches!(c, ContextTree::Hole) || c.order() == 0),
        _ => false,
    }
}

/// Rewrite every atomic cut into a shallow one: extrude the context with
/// switches, then cut at the root.
pub fn make_shallow_cuts(phi: &ClassicalDerivation) -> Result<ClassicalDerivation, Error> {
    let mut out = DeepDerivation::single(phi.system, phi.premise.clone());
    let mut prev = phi.premise.clone();
    for step in &phi.steps {
        if step.rule == RuleName::AiUp {
            let (ctx, sub) = find_instance(RuleName::AiUp, &prev, &step.result, CAP)?
                .ok_or_else(|| Error::shape("invalid ai_up step"))?;
            if is_shallow(&ctx) {
                out.push(step.rule, step.result.clone());
            } else {
                let a = sub.atom("a").unwrap().clone();
                let pair = Term::and(vec![Term::Atom(a.clone()), Term::Atom(a.negate())]);
                let extrusion = ctx_extrude(
                    phi.system,
                    &ctx,
                    &Term::Unit(crate::syntax::ClassicalUnit::False),
                    &pair,
                );
                debug_assert_eq!(extrusion.premise, prev);
                for e in &extrusion.steps {
                    out.push(e.rule, e.result.clone());
                }
                out.push(RuleName::AiUp, step.result.clone());
            }
        } else {
            out.push(step.rule, step.result.clone());
        }
        prev = step.result.clone();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Atom-occurrence tracing
// ---------------------------------------------------------------------------

/// A marker name and the literal occurrence it stands for. Markers are
/// stored as positive atoms.
#[derive(Clone, Debug)]
pub struct MarkerMap {
    pub entries: Vec<(String, Atom)>,
}

impl MarkerMap {
    fn literal(&self, marker: &str) -> Option<&Atom> {
        self.entries
            .iter()
            .find(|(m, _)| m == marker)
            .map(|(_, l)| l)
    }

    fn is_marker(&self, name: &str) -> bool {
        self.entries.iter().any(|(m, _)| m == name)
    }

    pub fn unmark<U: Units>(&self, f: &Term<U>) -> Term<U> {
        let mut out = f.clone();
        for (m, lit) in &self.entries {
            out = subst_atom(&out, m, &Term::Atom(lit.clone()));
        }
        out
    }
}

/// Replace every occurrence of atom `name` by `x` (negated occurrences by
/// `neg x`), re-canonicalizing.
pub fn subst_atom<U: Units>(t: &Term<U>, name: &str, x: &Term<U>) -> Term<U> {
    match t {
        Term::Unit(u) => Term::Unit(*u),
        Term::Atom(a) if a.name == name => {
            if a.negated {
                x.negate()
            } else {
                x.clone()
            }
        }
        Term::Atom(a) => Term::Atom(a.clone()),
        Term::Or(cs) => Term::or(cs.iter().map(|c| subst_atom(c, name, x)).collect()),
        Term::And(cs) => Term::and(cs.iter().map(|c| subst_atom(c, name, x)).collect()),
    }
}

fn subst_context(
    ctx: &Context<crate::syntax::ClassicalUnit>,
    name: &str,
    x: &Formula,
) -> Context<crate::syntax::ClassicalUnit> {
    fn go(
        t: &ContextTree<crate::syntax::ClassicalUnit>,
        name: &str,
        x: &Formula,
    ) -> ContextTree<crate::syntax::ClassicalUnit> {
        match t {
            ContextTree::Hole => ContextTree::Hole,
            ContextTree::Unit(u) => ContextTree::Unit(*u),
            ContextTree::Atom(a) if a.name == name => {
                let v = if a.negated { x.negate() } else { x.clone() };
                ContextTree::from_term(&v)
            }
            ContextTree::Atom(a) => ContextTree::Atom(a.clone()),
            ContextTree::Or(cs) => ContextTree::Or(cs.iter().map(|c| go(c, name, x)).collect()),
            ContextTree::And(cs) => ContextTree::And(cs.iter().map(|c| go(c, name, x)).collect()),
        }
    }
    Context::new(go(ctx.tree(), name, x)).expect("substitution preserves the hole")
}

/// All distinct ways of replacing a subset of the occurrences of `lit` in
/// `t` by the marker atom.
pub fn enumerate_markings<U: Units>(t: &Term<U>, lit: &Atom, marker: &Atom) -> Vec<Term<U>> {
    match t {
        Term::Atom(a) if a == lit => {
            vec![t.clone(), Term::Atom(marker.clone())]
        }
        Term::Unit(_) | Term::Atom(_) => vec![t.clone()],
        Term::Or(cs) | Term::And(cs) => {
            let conj = matches!(t, Term::And(_));
            let mut variants: Vec<Vec<Term<U>>> = vec![Vec::new()];
            for c in cs {
                let child_opts = enumerate_markings(c, lit, marker);
                let mut next = Vec::new();
                for v in &variants {
                    for o in &child_opts {
                        let mut v2 = v.clone();
                        v2.push(o.clone());
                        next.push(v2);
                    }
                }
                variants = next;
            }
            let mut out: Vec<Term<U>> = variants
                .into_iter()
                .map(|v| if conj { Term::and(v) } else { Term::or(v) })
                .collect();
            out.sort();
            out.dedup();
            out
        }
    }
}

/// The interaction intro of a traced atom: `C{t} -> C{[x, y]}` where the
/// unmarked images of the pair are dual literals and at least one side is a
/// marker. Returns the context and the partner atom.
pub fn find_marked_intro<U: Units>(
    premise: &Term<U>,
    conclusion: &Term<U>,
    markers: &MarkerMap,
) -> Result<Option<(Context<U>, Atom, Atom)>, Error> {
    for occ in enumerate_occurrences(conclusion, CAP)? {
        let (x, y) = match &occ.focus {
            Term::Or(cs) if cs.len() == 2 => match (&cs[0], &cs[1]) {
                (Term::Atom(x), Term::Atom(y)) => (x.clone(), y.clone()),
                _ => continue,
            },
            _ => continue,
        };
        if !markers.is_marker(&x.name) && !markers.is_marker(&y.name) {
            continue;
        }
        let ux: Term<U> = markers.unmark(&Term::Atom(x.clone()));
        let uy: Term<U> = markers.unmark(&Term::Atom(y.clone()));
        if ux.negate() != uy {
            continue;
        }
        if occ.context.saturate(&Term::Unit(U::and_identity())) == *premise {
            return Ok(Some((occ.context, x, y)));
        }
    }
    Ok(None)
}

/// Whether the pair is a valid marked step: a normal instance with markers
/// treated as ordinary atoms, or an interaction intro of a traced atom.
pub fn marked_step_ok<U: Units>(
    rule: RuleName,
    premise: &Term<U>,
    conclusion: &Term<U>,
    markers: &MarkerMap,
) -> Result<bool, Error> {
    if premise == conclusion {
        return Ok(true);
    }
    if crate::rules::check_step_rule(rule, premise, conclusion, CAP)? {
        return Ok(true);
    }
    if rule == RuleName::AiDown {
        return Ok(find_marked_intro(premise, conclusion, markers)?.is_some());
    }
    Ok(false)
}

/// Rename designated atom occurrences (given by a marked conclusion) through
/// the whole proof, following copies through contractions up to the points
/// where interactions introduce them.
pub fn trace_markers<U: Units>(
    phi: &DeepDerivation<U>,
    marked_conclusion: &Term<U>,
    markers: &MarkerMap,
) -> Result<DeepDerivation<U>, Error> {
    debug_assert_eq!(&markers.unmark(marked_conclusion), phi.conclusion());
    let lines: Vec<Term<U>> = phi.lines().into_iter().cloned().collect();
    let rules: Vec<RuleName> = phi.steps.iter().map(|s| s.rule).collect();
    let n = lines.len();
    let mut marked: Vec<Term<U>> = vec![Term::Unit(U::and_identity()); n];
    marked[n - 1] = marked_conclusion.clone();
    for j in (0..n - 1).rev() {
        let mut candidates = vec![lines[j].clone()];
        for (m, lit) in &markers.entries {
            let marker_atom = Atom::pos(m.as_str());
            let mut next = Vec::new();
            for c in &candidates {
                next.extend(enumerate_markings(c, lit, &marker_atom));
            }
            next.sort();
            next.dedup();
            candidates = next;
        }
        // fewest markers first keeps the trace minimal
        candidates.sort_by_key(|c| {
            (
                markers
                    .entries
                    .iter()
                    .map(|(m, _)| count_atom(c, m))
                    .sum::<usize>(),
                c.clone(),
            )
        });
        let mut found = None;
        for c in candidates {
            if marked_step_ok(rules[j], &c, &marked[j + 1], markers)? {
                found = Some(c);
                break;
            }
        }
        marked[j] = found.ok_or_else(|| {
            Error::shape(format!(
                "marker trace stuck at line {j}: `{}` -> `{}`",
                lines[j],
                marked[j + 1]
            ))
        })?;
    }
    let mut out = DeepDerivation::single(phi.system, marked[0].clone());
    for (j, rule) in rules.iter().enumerate() {
        out.push(*rule, marked[j + 1].clone());
    }
    Ok(out)
}

pub fn count_atom<U: Units>(t: &Term<U>, name: &str) -> usize {
    match t {
        Term::Atom(a) if a.name == name => 1,
        Term::Unit(_) | Term::Atom(_) => 0,
        Term::Or(cs) | Term::And(cs) => cs.iter().map(|c| count_atom(c, name)).sum(),
    }
}

/// Substitute `replacement` for one traced marker throughout a marked proof,
/// rewriting the affected instances: contractions generalize, weakenings
/// generalize (or become switches at units), and interaction intros are
/// replaced by the supplied payload derivation `t ->* [replacement,
/// partner]` spliced in context.
pub fn replace_marker(
    phi: &ClassicalDerivation,
    marker: &str,
    replacement: &Formula,
    payload: &dyn Fn(&Atom) -> Result<ClassicalDerivation, Error>,
    markers: &MarkerMap,
) -> Result<ClassicalDerivation, Error> {
    let sub = |f: &Formula| subst_atom(f, marker, replacement);
    let mut out = DeepDerivation::single(phi.system, sub(&phi.premise));
    let mut prev = phi.premise.clone();
    for step in &phi.steps {
        let a = sub(&prev);
        let b = sub(&step.result);
        if a == b {
            prev = step.result.clone();
            continue;
        }
        let mut emitted = false;
        let fallbacks: &[RuleName] = match step.rule {
            RuleName::AcDown => &[RuleName::AcDown, RuleName::CDown],
            RuleName::AwDown => &[RuleName::AwDown, RuleName::WDown, RuleName::Switch],
            RuleName::AiDown => &[RuleName::AiDown],
            r => {
                // self-dual and already-general rules survive substitution
                emitted = false;
                let single = [r];
                let ok = crate::rules::check_step_rule(r, &a, &b, CAP)?;
                if ok {
                    out.push(r, b.clone());
                    prev = step.result.clone();
                    continue;
                }
                &single.to_vec().leak()[..]
            }
        };
        for r in fallbacks {
            if crate::rules::check_step_rule(*r, &a, &b, CAP)? {
                out.push(*r, b.clone());
                emitted = true;
                break;
            }
        }
        if !emitted {
            // interaction intro of the traced marker
            if let Some((ctx, x, y)) = find_marked_intro(&prev, &step.result, markers)? {
                let partner = if x.name == marker { y } else { x };
                if partner.name == marker {
                    return Err(Error::shape("a marker cannot pair with itself"));
                }
                let ctx_t = subst_context(&ctx, marker, replacement);
                let chain = payload(&partner)?;
                debug_assert_eq!(chain.premise, Formula::TRUE);
                let spliced = chain.embed(&ctx_t);
                debug_assert_eq!(spliced.premise, a);
                for e in &spliced.steps {
                    out.push(e.rule, e.result.clone());
                }
                if out.conclusion() != &b {
                    return Err(Error::shape(format!(
                        "intro payload does not land on `{b}`"
                    )));
                }
                emitted = true;
            }
        }
        if !emitted {
            return Err(Error::shape(format!(
                "replacement breaks step {} : `{a}` -> `{b}`",
                step.rule
            )));
        }
        prev = step.result.clone();
    }
    Ok(out)
}

/// Lemma: a KS proof of `C{a}` becomes a KS proof of `C{t}` by replacing
/// the designated occurrence and its contraction copies with `t`.
pub fn replace_atom_true(
    phi: &ClassicalDerivation,
    ctx: &Context<crate::syntax::ClassicalUnit>,
    literal: &Atom,
) -> Result<ClassicalDerivation, Error> {
    if ctx.saturate(&Term::Atom(literal.clone())) != *phi.conclusion() {
        return Err(Error::shape(
            "designated occurrence is not present in the conclusion",
        ));
    }
    let marker = fresh_marker(phi, 0);
    let markers = MarkerMap {
        entries: vec![(marker.clone(), literal.clone())],
    };
    let marked_conclusion = ctx.saturate(&Term::Atom(Atom::pos(&marker)));
    let traced = trace_markers(phi, &marked_conclusion, &markers)?;
    let payload = |partner: &Atom| -> Result<ClassicalDerivation, Error> {
        // t = [t, f] -aw_down-> [t, partner]
        let mut d = DeepDerivation::single(SystemId::SKS, Formula::TRUE);
        d.push(
            RuleName::AwDown,
            Term::or(vec![Formula::TRUE, Term::Atom(partner.clone())]),
        );
        Ok(d)
    };
    replace_marker(&traced, &marker, &Formula::TRUE, &payload, &markers)
}

pub fn fresh_marker<U: Units>(phi: &DeepDerivation<U>, salt: usize) -> String {
    let names: std::collections::BTreeSet<String> = phi
        .lines()
        .iter()
        .flat_map(|l| l.atom_names())
        .collect();
    let mut i = salt;
    loop {
        let cand = format!("zz_mark{i}");
        if !names.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

// ---------------------------------------------------------------------------
// SKS -> KS cut elimination
// ---------------------------------------------------------------------------

/// Pipeline: reduce up rules to atomic cuts, make cuts shallow, then remove
/// them topmost-first by splitting the proof above each cut into the two
/// atom-erased halves and substituting one into the other; a final
/// atomization removes the general rules the substitution reintroduces.
pub fn sks_to_ks(phi: &ClassicalDerivation) -> Result<ClassicalDerivation, Error> {
    // 1. aw_up / ac_up via their duals (introduces general interactions)
    let mut cur = DeepDerivation::single(SystemId::SKSg, phi.premise.clone());
    let mut prev = phi.premise.clone();
    for step in &phi.steps {
        match step.rule {
            RuleName::AwUp | RuleName::AcUp => {
                let chain = derive_up_from_down(step.rule, &prev, &step.result)?;
                for e in &chain.steps {
                    cur.push(e.rule, e.result.clone());
                }
            }
            r => cur.push(r, step.result.clone()),
        }
        prev = step.result.clone();
    }
    // 2. atomize the general rules; ai_up instances survive untouched
    let mut cur = atomize(&cur)?;
    // 3. shallow cuts
    cur = make_shallow_cuts(&cur)?;

    // 4. eliminate cuts topmost-first
    loop {
        let Some(i) = cur.steps.iter().position(|s| s.rule == RuleName::AiUp) else {
            break;
        };
        let lines: Vec<Formula> = cur.lines().into_iter().cloned().collect();
        let cut_premise = lines[i].clone();
        let r_formula = lines[i + 1].clone();
        // identify the cut pair [R, (a, -a)]
        let (_, sub) = find_instance(RuleName::AiUp, &cut_premise, &r_formula, CAP)?
            .ok_or_else(|| Error::shape("invalid ai_up step"))?;
        let a = sub.atom("a").unwrap().clone();

        let mut prefix = DeepDerivation::single(SystemId::SKS, lines[0].clone());
        for s in &cur.steps[..i] {
            prefix.push(s.rule, s.result.clone());
        }

        // double trace: m1 follows -a, m2 follows a
        let m1 = fresh_marker(&prefix, 0);
        let m2 = fresh_marker(&prefix, 1);
        let markers = MarkerMap {
            entries: vec![
                (m1.clone(), a.negate()),
                (m2.clone(), a.clone()),
            ],
        };
        let marked_pair = Term::and(vec![
            Term::Atom(Atom::pos(&m2)),
            Term::Atom(Atom::pos(&m1)),
        ]);
        let marked_conclusion = Term::or(vec![r_formula.clone(), marked_pair]);
        if markers.unmark(&marked_conclusion) != cut_premise {
            return Err(Error::shape("cut premise is not shallow"));
        }
        let traced = trace_markers(&prefix, &marked_conclusion, &markers)?;

        let aw_payload = |partner: &Atom| -> Result<ClassicalDerivation, Error> {
            let mut d = DeepDerivation::single(SystemId::SKS, Formula::TRUE);
            d.push(
                RuleName::AwDown,
                Term::or(vec![Formula::TRUE, Term::Atom(partner.clone())]),
            );
            Ok(d)
        };

        // Pi2: erase the a side (m2 -> t), restore m1 to the literal -a
        let pi2 = {
            let t_replaced = replace_marker(&traced, &m2, &Formula::TRUE, &aw_payload, &markers)?;
            let mut d = DeepDerivation::single(SystemId::SKS, t_replaced.premise.clone());
            for s in &t_replaced.steps {
                d.push(
                    s.rule,
                    subst_atom(&s.result, &m1, &Term::Atom(a.negate())),
                );
            }
            d
        };
        debug_assert_eq!(
            pi2.conclusion(),
            &Term::or(vec![r_formula.clone(), Term::Atom(a.negate())])
        );

        // Pi1 (still marked with m2): erase the -a side (m1 -> t)
        let pi1 = replace_marker(&traced, &m1, &Formula::TRUE, &aw_payload, &markers)?;
        // Pi3: substitute R for the traced a in Pi1; intros splice Pi2
        let r_payload = |partner: &Atom| -> Result<ClassicalDerivation, Error> {
            if *partner == a.negate() {
                Ok(pi2.clone())
            } else {
                Err(Error::shape(format!(
                    "unexpected interaction partner `{partner}` for the traced atom"
                )))
            }
        };
        let pi3 = replace_marker(&pi1, &m2, &r_formula, &r_payload, &markers)?;
        debug_assert_eq!(
            pi3.conclusion(),
            &Term::or(vec![r_formula.clone(), r_formula.clone()])
        );

        let mut next = pi3;
        next.push(RuleName::CDown, r_formula.clone());
        for s in &cur.steps[i + 1..] {
            next.push(s.rule, s.result.clone());
        }
        cur = next;
    }

    // 5. remove the reintroduced general rules
    let out = atomize(&cur)?;
    debug_assert_eq!(out.conclusion(), phi.conclusion());
    Ok(out.into_system(SystemId::KS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::CheckReport;
    use crate::parse::parse_formula;

    fn fof(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn ctx_of(outer: &str) -> Context<crate::syntax::ClassicalUnit> {
        // test helper: `*` is the hole
        let replaced = outer.replace('*', "zz_hole");
        let t = parse_formula(&replaced).unwrap();
        fn conv(t: &Formula) -> ContextTree<crate::syntax::ClassicalUnit> {
            match t {
                Term::Atom(a) if a.name == "zz_hole" => ContextTree::Hole,
                Term::Unit(u) => ContextTree::Unit(*u),
                Term::Atom(a) => ContextTree::Atom(a.clone()),
                Term::Or(cs) => ContextTree::Or(cs.iter().map(conv).collect()),
                Term::And(cs) => ContextTree::And(cs.iter().map(conv).collect()),
            }
        }
        Context::new(conv(&t)).unwrap()
    }

    #[test]
    fn deduction_fwd_examples() {
        // single formula a: proof of [-a, a]
        let d = ClassicalDerivation::single(SystemId::SKSg, fof("a"));
        let p = deduction_fwd(&d).unwrap();
        assert!(p.is_proof());
        assert_eq!(p.conclusion(), &fof("[-a, a]"));
        assert_eq!(p.check(8), CheckReport::Ok);

        // one contraction step [a,a] -> a: proof of [(-a,-a), a]
        let mut d2 = ClassicalDerivation::single(SystemId::SKSg, fof("[a, a]"));
        d2.push(RuleName::CDown, fof("a"));
        let p2 = deduction_fwd(&d2).unwrap();
        assert_eq!(p2.conclusion(), &fof("[(-a, -a), a]"));
        assert_eq!(p2.check(8), CheckReport::Ok);

        // identity on t: [f, t] collapses to t
        let d3 = ClassicalDerivation::single(SystemId::SKSg, Formula::TRUE);
        let p3 = deduction_fwd(&d3).unwrap();
        assert_eq!(p3.conclusion(), &Formula::TRUE);
        assert_eq!(p3.length(), 0);
    }

    #[test]
    fn deduction_roundtrip() {
        let mut phi = ClassicalDerivation::single(SystemId::SKSg, Formula::TRUE);
        phi.push(RuleName::IDown, fof("[-a, a]"));
        let d = deduction_bwd(&phi, &fof("a")).unwrap();
        assert_eq!(d.premise, fof("a"));
        assert_eq!(d.conclusion(), &fof("a"));
        assert_eq!(d.check(8), CheckReport::Ok);

        // mismatched P errors
        assert!(deduction_bwd(&phi, &fof("b")).is_err());

        // Q = t case
        let mut phi2 = ClassicalDerivation::single(SystemId::SKSg, Formula::TRUE);
        phi2.push(RuleName::IDown, fof("[-a, a]"));
        phi2.push(RuleName::WUp, fof("[-a, t]"));
        assert_eq!(phi2.check(8), CheckReport::Ok);
        let d2 = deduction_bwd(&phi2, &fof("a")).unwrap();
        assert_eq!(d2.premise, fof("a"));
        assert_eq!(d2.conclusion(), &Formula::TRUE);
        assert_eq!(d2.check(8), CheckReport::Ok);
    }

    #[test]
    fn medial_derivation() {
        let d = derive_medial_cw(&fof("a"), &fof("b"), &fof("c"), &fof("d"), &Context::hole());
        assert_eq!(d.premise, fof("[(a, b), (c, d)]"));
        assert_eq!(d.conclusion(), &fof("([a, c], [b, d])"));
        assert_eq!(d.length(), 5);
        assert_eq!(d.check(8), CheckReport::Ok);

        // embedded in a context
        let c = ctx_of("[x, *]");
        let d2 = derive_medial_cw(&fof("a"), &fof("b"), &fof("c"), &fof("d"), &c);
        assert_eq!(d2.check(8), CheckReport::Ok);

        // degenerate instance still checks
        let t = Formula::TRUE;
        let d3 = derive_medial_cw(&t, &t, &t, &t, &Context::hole());
        assert_eq!(d3.check(8), CheckReport::Ok);
    }

    #[test]
    fn atomize_identity_on_atom() {
        let mut d = ClassicalDerivation::single(SystemId::SKSg, Formula::TRUE);
        d.push(RuleName::IDown, fof("[a, -a]"));
        let a = atomize(&d).unwrap();
        assert_eq!(a.length(), 1);
        assert_eq!(a.steps[0].rule, RuleName::AiDown);
        assert_eq!(a.check(8), CheckReport::Ok);
    }

    #[test]
    fn atomize_identity_on_disjunction() {
        let mut d = ClassicalDerivation::single(SystemId::SKSg, Formula::TRUE);
        d.push(RuleName::IDown, fof("[a, b, (-a, -b)]"));
        assert_eq!(d.check(8), CheckReport::Ok);
        let a = atomize(&d).unwrap();
        assert_eq!(a.check(8), CheckReport::Ok);
        assert_eq!(a.conclusion(), d.conclusion());
        assert!(a.steps.iter().all(|s| !s.rule.is_general()));
        // the two-switch expansion plus two atomic interactions
        assert_eq!(
            a.rule_multiset(),
            vec![
                RuleName::AiDown,
                RuleName::AiDown,
                RuleName::Switch,
                RuleName::Switch
            ]
        );
    }

    #[test]
    fn atomize_contraction_on_conjunction_uses_medial() {
        let mut d = ClassicalDerivation::single(SystemId::SKSg, fof("[(a, b), (a, b)]"));
        d.push(RuleName::CDown, fof("(a, b)"));
        let a = atomize(&d).unwrap();
        assert_eq!(a.check(8), CheckReport::Ok);
        assert_eq!(a.premise, d.premise);
        assert_eq!(a.conclusion(), d.conclusion());
        assert!(a.rule_multiset().contains(&RuleName::Medial));
    }

    #[test]
    fn atomize_weakening_cases() {
        for (prem, conc) in [("f", "[a, (b, c)]"), ("f", "t"), ("(x, f)", "(x, [a, b])")] {
            let mut d = ClassicalDerivation::single(SystemId::SKSg, fof(prem));
            d.push(RuleName::WDown, fof(conc));
            assert_eq!(d.check(8), CheckReport::Ok, "{prem} -> {conc}");
            let a = atomize(&d).unwrap();
            assert_eq!(a.check(8), CheckReport::Ok);
            assert_eq!(a.premise, d.premise);
            assert_eq!(a.conclusion(), d.conclusion());
            assert!(a.steps.iter().all(|s| !s.rule.is_general()));
        }
    }

    #[test]
    fn atomize_up_rules_by_duality() {
        let mut d = ClassicalDerivation::single(SystemId::SKSg, fof("(a, [b, c])"));
        d.push(RuleName::CUp, fof("((a, [b, c]), (a, [b, c]))"));
        d.push(RuleName::WUp, fof("(a, [b, c])"));
        assert_eq!(d.check(8), CheckReport::Ok);
        let a = atomize(&d).unwrap();
        assert_eq!(a.check(8), CheckReport::Ok);
        assert_eq!(a.premise, d.premise);
        assert_eq!(a.conclusion(), d.conclusion());
        assert!(a.steps.iter().all(|s| !s.rule.is_general()));
    }

    #[test]
    fn dual_commutes_with_atomize() {
        let mut d = ClassicalDerivation::single(SystemId::SKSg, Formula::TRUE);
        d.push(RuleName::IDown, fof("[(a, b), (-a, -b)]"));
        let lhs = atomize(&d).unwrap().dual().unwrap();
        let rhs = atomize(&d.dual().unwrap()).unwrap();
        assert_eq!(lhs.premise, rhs.premise);
        assert_eq!(lhs.conclusion(), rhs.conclusion());
        assert_eq!(lhs.rule_multiset(), rhs.rule_multiset());
        assert_eq!(lhs.check(8), CheckReport::Ok);
        assert_eq!(rhs.check(8), CheckReport::Ok);
    }

    #[test]
    fn up_from_down_chain() {
        // aw_up instance (x, a) -> x
        let prem = fof("(x, a)");
        let conc = fof("x");
        let chain = derive_up_from_down(RuleName::AwUp, &prem, &conc).unwrap();
        assert_eq!(chain.premise, prem);
        assert_eq!(chain.conclusion(), &conc);
        assert_eq!(chain.check_in(SystemId::SKSg, 8), CheckReport::Ok);
        assert_eq!(chain.length(), 4);

        // s instance is returned unchanged
        let sp = fof("(a, [b, c])");
        let sc = fof("[(a, b), c]");
        let schain = derive_up_from_down(RuleName::Switch, &sp, &sc).unwrap();
        assert_eq!(schain.length(), 1);

        // ac_up
        let prem2 = fof("[x, a]");
        let conc2 = fof("[x, (a, a)]");
        let chain2 = derive_up_from_down(RuleName::AcUp, &prem2, &conc2).unwrap();
        assert_eq!(chain2.check_in(SystemId::SKSg, 8), CheckReport::Ok);
        assert_eq!(chain2.premise, prem2);
        assert_eq!(chain2.conclusion(), &conc2);
    }

    #[test]
    fn extrusion_cases() {
        // hole context: empty derivation
        let d = ctx_extrude(
            SystemId::SKS,
            &Context::hole(),
            &fof("a"),
            &fof("b"),
        );
        assert_eq!(d.length(), 0);
        assert_eq!(d.premise, fof("[a, b]"));

        // one copar frame: a single switch
        let c = ctx_of("(r, *)");
        let d2 = ctx_extrude(SystemId::SKS, &c, &fof("p"), &fof("q"));
        assert_eq!(d2.premise, fof("(r, [p, q])"));
        assert_eq!(d2.conclusion(), &fof("[(r, p), q]"));
        assert_eq!(d2.length(), 1);
        assert_eq!(d2.check(8), CheckReport::Ok);

        // par above copar
        let c2 = ctx_of("[r, (x, *)]");
        let d3 = ctx_extrude(SystemId::SKS, &c2, &fof("p"), &fof("q"));
        assert_eq!(d3.premise, fof("[r, (x, [p, q])]"));
        assert_eq!(d3.conclusion(), &fof("[r, (x, p), q]"));
        assert_eq!(d3.length(), 1);
        assert_eq!(d3.check(8), CheckReport::Ok);
    }

    #[test]
    fn shallow_cut_rewrite() {
        // proof: t -> [a,-a] -> [a,-a,b,-b] -> [(b,(a,-a)), ... build simpler:
        // t -> [b,-b] -> [b, (-b, [a,-a])] -> [b, (-b, a), -a]; then a deep cut
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[b, -b]"));
        phi.push(RuleName::AiDown, fof("[b, (-b, [a, -a])]"));
        phi.push(RuleName::Switch, fof("[b, (-b, (a, -a)), f]"));
        // hmm: instead make the cut inside a copar context directly
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[b, -b]"));
        phi.push(RuleName::AiDown, fof("[b, (-b, [a, -a])]"));
        phi.push(RuleName::AiUp, fof("[b, (-b, f)]"));
        assert_eq!(phi.check(8), CheckReport::Ok, "{phi}");
        let shallow = make_shallow_cuts(&phi).unwrap();
        assert_eq!(shallow.check(8), CheckReport::Ok);
        assert_eq!(shallow.conclusion(), phi.conclusion());
        // every remaining cut is shallow
        let lines: Vec<Formula> = shallow.lines().into_iter().cloned().collect();
        for (i, s) in shallow.steps.iter().enumerate() {
            if s.rule == RuleName::AiUp {
                let (ctx, _) =
                    find_instance(RuleName::AiUp, &lines[i], &lines[i + 1], 8)
                        .unwrap()
                        .unwrap();
                assert!(is_shallow(&ctx), "cut at {} is not shallow", i);
            }
        }
    }

    #[test]
    fn replace_atom_true_on_interaction() {
        // proof of [a, -a]; replacing a gives a proof of [t, -a] ending in aw_down
        let mut phi = ClassicalDerivation::single(SystemId::KS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[a, -a]"));
        let ctx = ctx_of("[*, -a]");
        let out = replace_atom_true(&phi, &ctx, &Atom::pos("a")).unwrap();
        assert_eq!(out.conclusion(), &fof("[t, -a]"));
        assert_eq!(out.check(8), CheckReport::Ok);
        assert_eq!(out.steps.last().unwrap().rule, RuleName::AwDown);
    }

    #[test]
    fn replace_atom_true_traces_contraction() {
        // t -> [a,-a] -> [a,-a,a? no: use contraction downward: [a,a] appears
        // above: t -> [a,-a] -> [[a,a],-a] via ac_down read upward; build
        // downward instead: t -> [a,-a]; -a is kept, duplicate a via ac_down
        // premise [a,a]: chain: t -> [a, a, -a] (interaction inserts beside a)
        // needs two steps:
        let mut phi = ClassicalDerivation::single(SystemId::KS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[a, -a]"));
        phi.push(RuleName::AwDown, fof("[a, a, -a]"));
        phi.push(RuleName::AcDown, fof("[a, -a]"));
        assert_eq!(phi.check(8), CheckReport::Ok);
        let ctx = ctx_of("[*, -a]");
        let out = replace_atom_true(&phi, &ctx, &Atom::pos("a")).unwrap();
        assert_eq!(out.conclusion(), &fof("[t, -a]"));
        assert_eq!(out.check(8), CheckReport::Ok);
    }

    #[test]
    fn replace_atom_from_weakening() {
        let mut phi = ClassicalDerivation::single(SystemId::KS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[b, -b]"));
        phi.push(RuleName::AwDown, fof("[b, -b, a]"));
        let ctx = ctx_of("[b, -b, *]");
        let out = replace_atom_true(&phi, &ctx, &Atom::pos("a")).unwrap();
        assert_eq!(out.conclusion(), &fof("[b, -b, t]"));
        assert_eq!(out.check(8), CheckReport::Ok);
    }

    #[test]
    fn sks_to_ks_small_cut() {
        // a proof with one shallow cut, built by composing two interactions
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[b, -b]"));
        phi.push(RuleName::AiDown, fof("[b, (-b, [a, -a])]"));
        phi.push(RuleName::Switch, fof("[b, (-b, a), -a]"));
        phi.push(RuleName::Switch, fof("[b, ((-b, a), -a)]"));
        // hmm, prefer the canonical composition: [S,(a,-a)] -> [S]
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[a, -a]"));
        phi.push(RuleName::AiDown, fof("[a, (-a, [b, -b])]"));
        phi.push(RuleName::Switch, fof("[a, (-a, b), -b]"));
        phi.push(RuleName::Switch, fof("[a, -b, ((-a), b)]"));
        assert_eq!(phi.check(8), CheckReport::Ok);
        // add a cut: [a, -b, (-a, b)] contains no dual copar; skip to the
        // canonical cut fixture instead
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[x, -x]"));
        phi.push(RuleName::AiDown, fof("[x, -x, [a, -a]]"));
        // group (a, -a) beside the rest via switch on a unit is impossible;
        // instead build the standard composition through a copar context:
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[x, -x]"));
        phi.push(RuleName::AiDown, fof("[x, (-x, [a, -a])]"));
        phi.push(RuleName::Switch, fof("[x, [(-x, a), -a]]"));
        phi.push(RuleName::AiDown, fof("[x, (-x, a), (-a, [b, -b])]"));
        phi.push(RuleName::Switch, fof("[x, (-x, a), (-a, b), -b]"));
        assert_eq!(phi.check(8), CheckReport::Ok);
        let conclusion = phi.conclusion().clone();
        let ks = sks_to_ks(&phi).unwrap();
        assert_eq!(ks.conclusion(), &conclusion);
        assert_eq!(ks.check(8), CheckReport::Ok);
        assert!(ks.steps.iter().all(|s| !s.rule.is_up()));
    }

    #[test]
    fn sks_to_ks_with_real_cut() {
        // cut composition: prove [x, -x] twice and cut them together
        // t -> [a,-a] -> [a, (-a, [x,-x])] -> [a, (-a,x), -x]
        //   -> insert the dual pair and cut:
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[a, -a]"));
        phi.push(RuleName::AiDown, fof("[a, (-a, [x, -x])]"));
        phi.push(RuleName::Switch, fof("[a, (-a, x), -x]"));
        phi.push(RuleName::AiUp, fof("[a, f, -x]"));
        // (-a, x)? that is not dual. Use (x, -x) instead:
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[a, -a]"));
        phi.push(RuleName::AiDown, fof("[a, (-a, [x, -x])]"));
        phi.push(RuleName::Switch, fof("[a, [(-a, x), -x]]"));
        phi.push(RuleName::AiDown, fof("[a, (-a, x), (-x, [x, -x])]"));
        phi.push(RuleName::Switch, fof("[a, (-a, x), [(-x, x), -x]]"));
        phi.push(RuleName::AiUp, fof("[a, (-a, x), -x]"));
        assert_eq!(phi.check(8), CheckReport::Ok, "{phi}");
        let conclusion = phi.conclusion().clone();
        assert!(crate::search::tautology(&conclusion));
        let ks = sks_to_ks(&phi).unwrap();
        assert_eq!(ks.conclusion(), &conclusion);
        assert_eq!(ks.check(8), CheckReport::Ok, "{ks}");
        assert!(ks.steps.iter().all(|s| !s.rule.is_up()));
        assert!(crate::search::tautology(ks.conclusion()));
    }

    #[test]
    fn sks_to_ks_cut_free_unchanged() {
        let mut phi = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        phi.push(RuleName::AiDown, fof("[a, -a]"));
        let ks = sks_to_ks(&phi).unwrap();
        assert_eq!(ks.conclusion(), phi.conclusion());
        assert_eq!(ks.length(), 1);
    }
}
