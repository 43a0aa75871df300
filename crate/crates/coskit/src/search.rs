//! Bounded backward proof search and the independent oracles.
//!
//! Deep systems search bottom-up over `step_instances` with a visited set
//! keyed on canonical forms (the AC-equivalence loops are cut off by
//! canonicity). Premise size is bounded by the goal size plus a slack of 4,
//! since interaction and contraction grow premises; the slack is a knob, and
//! `Refuted` is only reported when the premise space was exhausted without
//! any bound interfering. The sequent systems search backward cut-free,
//! which terminates by the subformula property.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::derivation::{DeepDerivation, LkpProof, MllProof};
use crate::error::Error;
use crate::lkp as lkp_ops;
use crate::rules::{step_instances, RuleName, SystemId};
use crate::syntax::{
    eval_formula, eval_lkp, Formula, LkpFormula, MllFormula, MllSequent, Sequent, Term, Units,
};

/// How far a backward search may go.
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_nodes: usize,
    pub arity_cap: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 4096,
            max_nodes: 2_000_000,
            arity_cap: crate::context::DEFAULT_ARITY_CAP,
        }
    }
}

/// Premise growth allowed over the goal size (interaction and contraction
/// push premises above the conclusion).
pub const SIZE_SLACK: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Proved(T),
    /// The bounded premise space is exhausted and provably suffices.
    Refuted,
    /// Limits interfered; absence of a proof is not a refutation.
    Exhausted,
}

impl<T> SearchOutcome<T> {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchOutcome::Proved(_))
    }

    pub fn proof(self) -> Option<T> {
        match self {
            SearchOutcome::Proved(t) => Some(t),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Truth-table oracle
// ---------------------------------------------------------------------------

pub fn all_assignments(names: &[String]) -> Vec<BTreeMap<String, bool>> {
    assert!(names.len() <= 20, "truth table over too many atoms");
    let mut out = Vec::with_capacity(1 << names.len());
    for bits in 0u32..(1 << names.len()) {
        let mut asg = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            asg.insert(n.clone(), bits & (1 << i) != 0);
        }
        out.push(asg);
    }
    out
}

pub fn tautology(f: &Formula) -> bool {
    let names = f.atom_names();
    all_assignments(&names)
        .iter()
        .all(|asg| eval_formula(f, asg).unwrap())
}

pub fn tautology_lkp(f: &LkpFormula) -> bool {
    let names = f.atom_names();
    all_assignments(&names)
        .iter()
        .all(|asg| eval_lkp(f, asg).unwrap())
}

/// A sequent read as conjunction-of-left implies disjunction-of-right.
pub fn sequent_tautology(s: &Sequent) -> bool {
    let names = s.atom_names();
    all_assignments(&names).iter().all(|asg| {
        let left = s.left.iter().all(|f| eval_lkp(f, asg).unwrap());
        let right = s.right.iter().any(|f| eval_lkp(f, asg).unwrap());
        !left || right
    })
}

// ---------------------------------------------------------------------------
// Deep-inference backward search
// ---------------------------------------------------------------------------

/// Cross-query memo: proved formulas keep the step that proves them (so
/// chains can be rebuilt), refuted formulas remember the size cap their
/// refutation is valid for.
pub struct DeepCache<U: Units> {
    proved: BTreeMap<Term<U>, (RuleName, Term<U>)>,
    refuted_cap: BTreeMap<Term<U>, usize>,
}

impl<U: Units> Default for DeepCache<U> {
    fn default() -> Self {
        DeepCache {
            proved: BTreeMap::new(),
            refuted_cap: BTreeMap::new(),
        }
    }
}

impl<U: Units> DeepCache<U> {
    pub fn new() -> Self {
        Self::default()
    }

    fn is_refuted_at(&self, f: &Term<U>, cap: usize) -> bool {
        self.refuted_cap.get(f).is_some_and(|&c| c >= cap)
    }

    fn rebuild(&self, system: SystemId, f: &Term<U>) -> DeepDerivation<U> {
        let unit = Term::Unit(U::and_identity());
        let mut chain: Vec<(RuleName, Term<U>)> = Vec::new();
        let mut cur = f.clone();
        while cur != unit {
            let (rule, prem) = self
                .proved
                .get(&cur)
                .expect("proved cache chains reach the axiom")
                .clone();
            chain.push((rule, cur));
            cur = prem;
        }
        let mut d = DeepDerivation::single(system, unit);
        for (rule, formula) in chain.into_iter().rev() {
            d.push(rule, formula);
        }
        d
    }
}

/// Backward proof search in a deep system, bottom-up over `step_instances`,
/// deterministic under the fixed rule order.
pub fn prove_deep<U: Units>(
    system: SystemId,
    goal: &Term<U>,
    limits: &SearchLimits,
    cache: &mut DeepCache<U>,
) -> Result<SearchOutcome<DeepDerivation<U>>, Error> {
    let unit = Term::Unit(U::and_identity());
    let size_cap = goal.size() + SIZE_SLACK;
    if *goal == unit || cache.proved.contains_key(goal) {
        return Ok(SearchOutcome::Proved(cache.rebuild(system, goal)));
    }
    if cache.is_refuted_at(goal, size_cap) {
        return Ok(SearchOutcome::Refuted);
    }

    let mut visited: BTreeSet<Term<U>> = BTreeSet::new();
    let mut down_link: BTreeMap<Term<U>, (RuleName, Term<U>)> = BTreeMap::new();
    let mut queue: VecDeque<(Term<U>, usize)> = VecDeque::new();
    visited.insert(goal.clone());
    queue.push_back((goal.clone(), 0));
    let mut size_pruned = false;
    let mut hard_pruned = false;
    let mut nodes = 0usize;

    let mut found: Option<Term<U>> = None;
    'outer: while let Some((f, depth)) = queue.pop_front() {
        if depth >= limits.max_depth {
            hard_pruned = true;
            continue;
        }
        nodes += 1;
        if nodes > limits.max_nodes {
            hard_pruned = true;
            break;
        }
        for inst in step_instances(system, &f, limits.arity_cap)? {
            let p = inst.premise;
            if p.size() > size_cap {
                size_pruned = true;
                continue;
            }
            if visited.contains(&p) || cache.is_refuted_at(&p, size_cap) {
                continue;
            }
            if p == unit || cache.proved.contains_key(&p) {
                down_link.insert(p.clone(), (inst.rule, f.clone()));
                found = Some(p);
                break 'outer;
            }
            visited.insert(p.clone());
            down_link.insert(p.clone(), (inst.rule, f.clone()));
            queue.push_back((p, depth + 1));
        }
    }

    if let Some(start) = found {
        // Record the discovered segment in the proved cache, then rebuild.
        let mut cur = start;
        while let Some((rule, below)) = down_link.get(&cur) {
            cache
                .proved
                .entry(below.clone())
                .or_insert_with(|| (*rule, cur.clone()));
            cur = below.clone();
            if cur == *goal {
                break;
            }
        }
        return Ok(SearchOutcome::Proved(cache.rebuild(system, goal)));
    }
    if hard_pruned {
        return Ok(SearchOutcome::Exhausted);
    }
    // The search saturated; everything visited is unprovable within the cap.
    for v in visited {
        let e = cache.refuted_cap.entry(v).or_insert(0);
        *e = (*e).max(size_cap);
    }
    if size_pruned {
        Ok(SearchOutcome::Exhausted)
    } else {
        Ok(SearchOutcome::Refuted)
    }
}

pub fn prove_classical(
    system: SystemId,
    goal: &Formula,
    limits: &SearchLimits,
) -> Result<SearchOutcome<DeepDerivation<crate::syntax::ClassicalUnit>>, Error> {
    prove_deep(system, goal, limits, &mut DeepCache::new())
}

pub fn prove_lbv(
    goal: &crate::syntax::Structure,
    limits: &SearchLimits,
) -> Result<SearchOutcome<DeepDerivation<crate::syntax::LbvUnit>>, Error> {
    prove_deep(SystemId::LBV, goal, limits, &mut DeepCache::new())
}

/// Exhaustive BFS over the premise graph with a visited set; the oracle twin
/// of `prove_deep`, kept plain on purpose.
pub fn provable_bruteforce<U: Units>(
    system: SystemId,
    goal: &Term<U>,
    size_bound: usize,
    arity_cap: usize,
) -> Result<bool, Error> {
    let unit = Term::Unit(U::and_identity());
    if *goal == unit {
        return Ok(true);
    }
    let mut visited: BTreeSet<Term<U>> = BTreeSet::new();
    let mut queue: VecDeque<Term<U>> = VecDeque::new();
    visited.insert(goal.clone());
    queue.push_back(goal.clone());
    while let Some(f) = queue.pop_front() {
        for inst in step_instances(system, &f, arity_cap)? {
            if inst.premise == unit {
                return Ok(true);
            }
            if inst.premise.size() > size_bound || visited.contains(&inst.premise) {
                continue;
            }
            visited.insert(inst.premise.clone());
            queue.push_back(inst.premise);
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Forward saturation (provable-set tables)
// ---------------------------------------------------------------------------

/// All formulas provable through lines of size `<= size_cap` over the given
/// atoms, built by forward closure from the axiom unit. Complete for systems
/// whose rules never shrink going down (LBV), where every provable structure
/// of size n has a proof staying within size n.
pub struct ForwardTable<U: Units> {
    pub system: SystemId,
    parent: BTreeMap<Term<U>, Option<(RuleName, Term<U>)>>,
}

impl<U: Units> ForwardTable<U> {
    pub fn provable(&self, f: &Term<U>) -> bool {
        self.parent.contains_key(f)
    }

    pub fn members(&self) -> impl Iterator<Item = &Term<U>> {
        self.parent.keys()
    }

    pub fn proof(&self, f: &Term<U>) -> Option<DeepDerivation<U>> {
        if !self.provable(f) {
            return None;
        }
        let mut chain = Vec::new();
        let mut cur = f.clone();
        loop {
            match self.parent.get(&cur).unwrap() {
                Some((rule, prem)) => {
                    chain.push((*rule, cur.clone()));
                    cur = prem.clone();
                }
                None => break,
            }
        }
        let mut d = DeepDerivation::single(self.system, cur);
        for (rule, formula) in chain.into_iter().rev() {
            d.push(rule, formula);
        }
        Some(d)
    }
}

pub fn forward_table<U: Units>(
    system: SystemId,
    atom_names: &[&str],
    size_cap: usize,
    arity_cap: usize,
) -> Result<ForwardTable<U>, Error> {
    let unit = Term::Unit(U::and_identity());
    let mut parent: BTreeMap<Term<U>, Option<(RuleName, Term<U>)>> = BTreeMap::new();
    parent.insert(unit.clone(), None);
    let mut queue: VecDeque<Term<U>> = VecDeque::new();
    queue.push_back(unit);
    while let Some(f) = queue.pop_front() {
        for (rule, conc) in crate::rules::conclusions(system, &f, atom_names, &[], arity_cap)? {
            if conc.size() > size_cap || parent.contains_key(&conc) {
                continue;
            }
            parent.insert(conc.clone(), Some((rule, f.clone())));
            queue.push_back(conc);
        }
    }
    Ok(ForwardTable { system, parent })
}

// ---------------------------------------------------------------------------
// LKp backward search (cut-free)
// ---------------------------------------------------------------------------

type LkpState = (Vec<LkpFormula>, Vec<LkpFormula>);

fn lkp_state(s: &Sequent) -> LkpState {
    let mut left = s.left.clone();
    let mut right = s.right.clone();
    left.sort();
    right.sort();
    (left, right)
}

fn state_sequent(st: &LkpState) -> Sequent {
    Sequent::new(st.0.clone(), st.1.clone())
}

enum LkpMove {
    Close(LkpFormula),
    RuleR(usize),
    RuleR2(usize),
    RuleL(usize),
    RuleL2(usize),
    ContL(usize),
    ContR(usize),
}

/// Backward cut-free proof search in LKp. The cut rule is excluded: by the
/// subformula property the reachable states range over subformulas of the
/// goal only (contraction is capped at multiplicity 2), so the space is
/// finite and saturation is a refutation.
pub fn prove_lkp(goal: &Sequent, limits: &SearchLimits) -> SearchOutcome<LkpProof> {
    let mut memo_proved: BTreeMap<LkpState, LkpProof> = BTreeMap::new();
    let mut memo_refuted: BTreeSet<LkpState> = BTreeSet::new();
    let mut nodes = 0usize;
    let mut pruned = false;
    let st = lkp_state(goal);
    let result = lkp_search(
        &st,
        &mut memo_proved,
        &mut memo_refuted,
        &mut BTreeSet::new(),
        limits,
        0,
        &mut nodes,
        &mut pruned,
    );
    match result {
        Some(t) => SearchOutcome::Proved(lkp_ops::bridge(t, goal)),
        None if pruned => SearchOutcome::Exhausted,
        None => SearchOutcome::Refuted,
    }
}

#[allow(clippy::too_many_arguments)]
fn lkp_search(
    st: &LkpState,
    proved: &mut BTreeMap<LkpState, LkpProof>,
    refuted: &mut BTreeSet<LkpState>,
    on_path: &mut BTreeSet<LkpState>,
    limits: &SearchLimits,
    depth: usize,
    nodes: &mut usize,
    pruned: &mut bool,
) -> Option<LkpProof> {
    if let Some(t) = proved.get(st) {
        return Some(t.clone());
    }
    if refuted.contains(st) || on_path.contains(st) {
        return None;
    }
    if depth >= limits.max_depth || *nodes >= limits.max_nodes {
        *pruned = true;
        return None;
    }
    *nodes += 1;
    on_path.insert(st.clone());
    let mut dependent = false;
    let result = (|| {
        let (left, right) = st;
        let target = state_sequent(st);
        let mut moves: Vec<LkpMove> = Vec::new();
        if let Some(p) = left.iter().find(|p| right.contains(p)) {
            moves.push(LkpMove::Close(p.clone()));
        }
        for (i, f) in right.iter().enumerate() {
            match f {
                LkpFormula::And(..) | LkpFormula::Imp(..) | LkpFormula::Neg(..) => {
                    moves.push(LkpMove::RuleR(i));
                }
                LkpFormula::Or(..) => {
                    moves.push(LkpMove::RuleR(i));
                    moves.push(LkpMove::RuleR2(i));
                }
                LkpFormula::Atom(_) => {}
            }
        }
        for (i, f) in left.iter().enumerate() {
            match f {
                LkpFormula::Or(..) | LkpFormula::Imp(..) | LkpFormula::Neg(..) => {
                    moves.push(LkpMove::RuleL(i));
                }
                LkpFormula::And(..) => {
                    moves.push(LkpMove::RuleL(i));
                    moves.push(LkpMove::RuleL2(i));
                }
                LkpFormula::Atom(_) => {}
            }
        }
        for (i, f) in left.iter().enumerate() {
            if !matches!(f, LkpFormula::Atom(_))
                && left.iter().filter(|x| *x == f).count() < 2
                && left.len() < 8
            {
                moves.push(LkpMove::ContL(i));
            }
        }
        for (i, f) in right.iter().enumerate() {
            if !matches!(f, LkpFormula::Atom(_))
                && right.iter().filter(|x| *x == f).count() < 2
                && right.len() < 8
            {
                moves.push(LkpMove::ContR(i));
            }
        }

        for mv in moves {
            let mut recurse = |states: Vec<LkpState>| -> Option<Vec<LkpProof>> {
                let mut out = Vec::new();
                for s in states {
                    match lkp_search(&s, proved, refuted, on_path, limits, depth + 1, nodes, pruned)
                    {
                        Some(t) => out.push(t),
                        None => {
                            if on_path.contains(&s) || *pruned {
                                dependent = true;
                            }
                            return None;
                        }
                    }
                }
                Some(out)
            };
            let candidate: Option<LkpProof> = match &mv {
                LkpMove::Close(p) => Some(lkp_ops::bridge(lkp_ops::ax(p.clone()), &target)),
                LkpMove::RuleR(i) | LkpMove::RuleR2(i) => {
                    let second = matches!(mv, LkpMove::RuleR2(_));
                    let f = &right[*i];
                    let mut rest = right.clone();
                    rest.remove(*i);
                    match f {
                        LkpFormula::And(p, q) => {
                            let s1 = sorted_state(left.clone(), with(&rest, (**p).clone()));
                            let s2 = sorted_state(left.clone(), with(&rest, (**q).clone()));
                            recurse(vec![s1, s2]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(left.clone(), front(&rest, (**p).clone())),
                                );
                                let t2 = lkp_ops::bridge(
                                    kids[1].clone(),
                                    &Sequent::new(left.clone(), front(&rest, (**q).clone())),
                                );
                                lkp_ops::bridge(lkp_ops::and_r(t1, t2).unwrap(), &target)
                            })
                        }
                        LkpFormula::Or(p, q) => {
                            let (used, other, builder): (
                                LkpFormula,
                                LkpFormula,
                                fn(LkpProof, LkpFormula) -> Result<LkpProof, Error>,
                            ) = if second {
                                ((**q).clone(), (**p).clone(), lkp_ops::or_r2)
                            } else {
                                ((**p).clone(), (**q).clone(), lkp_ops::or_r1)
                            };
                            let s1 = sorted_state(left.clone(), with(&rest, used.clone()));
                            recurse(vec![s1]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(left.clone(), front(&rest, used.clone())),
                                );
                                lkp_ops::bridge(builder(t1, other.clone()).unwrap(), &target)
                            })
                        }
                        LkpFormula::Imp(p, q) => {
                            let s1 = sorted_state(
                                with(left, (**p).clone()),
                                with(&rest, (**q).clone()),
                            );
                            recurse(vec![s1]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(
                                        with(left, (**p).clone()),
                                        front(&rest, (**q).clone()),
                                    ),
                                );
                                lkp_ops::bridge(lkp_ops::imp_r(t1).unwrap(), &target)
                            })
                        }
                        LkpFormula::Neg(p) => {
                            let s1 = sorted_state(with(left, (**p).clone()), rest.clone());
                            recurse(vec![s1]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(with(left, (**p).clone()), rest.clone()),
                                );
                                lkp_ops::bridge(lkp_ops::neg_r(t1).unwrap(), &target)
                            })
                        }
                        LkpFormula::Atom(_) => None,
                    }
                }
                LkpMove::RuleL(i) | LkpMove::RuleL2(i) => {
                    let second = matches!(mv, LkpMove::RuleL2(_));
                    let f = &left[*i];
                    let mut rest = left.clone();
                    rest.remove(*i);
                    match f {
                        LkpFormula::And(p, q) => {
                            let (used, other, builder): (
                                LkpFormula,
                                LkpFormula,
                                fn(LkpProof, LkpFormula) -> Result<LkpProof, Error>,
                            ) = if second {
                                ((**q).clone(), (**p).clone(), lkp_ops::and_l2)
                            } else {
                                ((**p).clone(), (**q).clone(), lkp_ops::and_l1)
                            };
                            let s1 = sorted_state(with(&rest, used.clone()), right.clone());
                            recurse(vec![s1]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(with(&rest, used.clone()), right.clone()),
                                );
                                lkp_ops::bridge(builder(t1, other.clone()).unwrap(), &target)
                            })
                        }
                        LkpFormula::Or(p, q) => {
                            let s1 = sorted_state(with(&rest, (**p).clone()), right.clone());
                            let s2 = sorted_state(with(&rest, (**q).clone()), right.clone());
                            recurse(vec![s1, s2]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(with(&rest, (**p).clone()), right.clone()),
                                );
                                let t2 = lkp_ops::bridge(
                                    kids[1].clone(),
                                    &Sequent::new(with(&rest, (**q).clone()), right.clone()),
                                );
                                lkp_ops::bridge(lkp_ops::or_l(t1, t2).unwrap(), &target)
                            })
                        }
                        LkpFormula::Imp(p, q) => {
                            let s1 = sorted_state(rest.clone(), with(right, (**p).clone()));
                            let s2 = sorted_state(with(&rest, (**q).clone()), right.clone());
                            recurse(vec![s1, s2]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(rest.clone(), front(right, (**p).clone())),
                                );
                                let t2 = lkp_ops::bridge(
                                    kids[1].clone(),
                                    &Sequent::new(with(&rest, (**q).clone()), right.clone()),
                                );
                                lkp_ops::bridge(lkp_ops::imp_l(t1, t2).unwrap(), &target)
                            })
                        }
                        LkpFormula::Neg(p) => {
                            let s1 = sorted_state(rest.clone(), with(right, (**p).clone()));
                            recurse(vec![s1]).map(|kids| {
                                let t1 = lkp_ops::bridge(
                                    kids[0].clone(),
                                    &Sequent::new(rest.clone(), front(right, (**p).clone())),
                                );
                                lkp_ops::bridge(lkp_ops::neg_l(t1).unwrap(), &target)
                            })
                        }
                        LkpFormula::Atom(_) => None,
                    }
                }
                LkpMove::ContL(i) => {
                    let x = left[*i].clone();
                    let s1 = sorted_state(with(left, x.clone()), right.clone());
                    recurse(vec![s1]).map(|kids| {
                        let mut l = left.clone();
                        l.remove(*i);
                        l.push(x.clone());
                        l.push(x.clone());
                        let t1 =
                            lkp_ops::bridge(kids[0].clone(), &Sequent::new(l, right.clone()));
                        lkp_ops::bridge(lkp_ops::cont_l(t1).unwrap(), &target)
                    })
                }
                LkpMove::ContR(i) => {
                    let s1 = sorted_state(left.clone(), with(right, right[*i].clone()));
                    recurse(vec![s1]).map(|kids| {
                        let mut r = vec![right[*i].clone(), right[*i].clone()];
                        for (j, x) in right.iter().enumerate() {
                            if j != *i {
                                r.push(x.clone());
                            }
                        }
                        let t1 =
                            lkp_ops::bridge(kids[0].clone(), &Sequent::new(left.clone(), r));
                        lkp_ops::bridge(lkp_ops::cont_r(t1).unwrap(), &target)
                    })
                }
            };
            if let Some(t) = candidate {
                return Some(t);
            }
        }
        None
    })();
    on_path.remove(st);
    match &result {
        Some(t) => {
            proved.insert(st.clone(), t.clone());
        }
        None => {
            // Only cache refutations that did not depend on path pruning or
            // resource limits.
            if !dependent && !*pruned {
                refuted.insert(st.clone());
            }
        }
    }
    result
}

fn with(list: &[LkpFormula], extra: LkpFormula) -> Vec<LkpFormula> {
    let mut v = list.to_vec();
    v.push(extra);
    v
}

fn front(list: &[LkpFormula], extra: LkpFormula) -> Vec<LkpFormula> {
    let mut v = vec![extra];
    v.extend_from_slice(list);
    v
}

fn sorted_state(mut left: Vec<LkpFormula>, mut right: Vec<LkpFormula>) -> LkpState {
    left.sort();
    right.sort();
    (left, right)
}

// ---------------------------------------------------------------------------
// MLL+mix backward search
// ---------------------------------------------------------------------------

type MllState = Vec<MllFormula>;

/// Backward search in MLL+mix. Par is invertible and applied eagerly; tensor
/// enumerates context splits and mix nonempty partitions. States shrink, so
/// saturation refutes.
pub fn prove_mll(goal: &MllSequent, limits: &SearchLimits) -> SearchOutcome<MllProof> {
    let mut proved: BTreeMap<MllState, MllProof> = BTreeMap::new();
    let mut refuted: BTreeSet<MllState> = BTreeSet::new();
    let mut nodes = 0usize;
    let mut pruned = false;
    let mut st = goal.0.clone();
    st.sort();
    match mll_search(&st, &mut proved, &mut refuted, limits, 0, &mut nodes, &mut pruned) {
        Some(t) => SearchOutcome::Proved(t),
        None if pruned => SearchOutcome::Exhausted,
        None => SearchOutcome::Refuted,
    }
}

fn mll_search(
    st: &MllState,
    proved: &mut BTreeMap<MllState, MllProof>,
    refuted: &mut BTreeSet<MllState>,
    limits: &SearchLimits,
    depth: usize,
    nodes: &mut usize,
    pruned: &mut bool,
) -> Option<MllProof> {
    if let Some(t) = proved.get(st) {
        return Some(t.clone());
    }
    if refuted.contains(st) {
        return None;
    }
    if depth >= limits.max_depth || *nodes >= limits.max_nodes {
        *pruned = true;
        return None;
    }
    *nodes += 1;
    let conclusion = MllSequent(st.clone());
    let was_pruned_before = *pruned;

    // id
    if st.len() == 2 && st[1] == st[0].negate() {
        let t = MllProof::leaf("id", conclusion);
        proved.insert(st.clone(), t.clone());
        return Some(t);
    }
    // par, invertible: reduce the first one eagerly
    if let Some(i) = st
        .iter()
        .position(|f| matches!(f, MllFormula::Parr(..)))
    {
        let (p, q) = match &st[i] {
            MllFormula::Parr(p, q) => ((**p).clone(), (**q).clone()),
            _ => unreachable!(),
        };
        let mut sub = st.clone();
        sub.remove(i);
        sub.push(p);
        sub.push(q);
        sub.sort();
        let result = mll_search(&sub, proved, refuted, limits, depth + 1, nodes, pruned)
            .map(|child| MllProof::node("parr", conclusion, vec![child]));
        finish_mll(st, result, proved, refuted, *pruned && !was_pruned_before)
    } else {
        // tensor on every position with every context split
        for i in 0..st.len() {
            let (p, q) = match &st[i] {
                MllFormula::Tensor(p, q) => ((**p).clone(), (**q).clone()),
                _ => continue,
            };
            let rest: Vec<MllFormula> = st
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, f)| f.clone())
                .collect();
            let n = rest.len();
            for mask in 0u32..(1 << n) {
                let mut a: Vec<MllFormula> = vec![p.clone()];
                let mut b: Vec<MllFormula> = vec![q.clone()];
                for (j, f) in rest.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        a.push(f.clone());
                    } else {
                        b.push(f.clone());
                    }
                }
                a.sort();
                b.sort();
                let ta = mll_search(&a, proved, refuted, limits, depth + 1, nodes, pruned);
                let Some(ta) = ta else { continue };
                let tb = mll_search(&b, proved, refuted, limits, depth + 1, nodes, pruned);
                let Some(tb) = tb else { continue };
                let t = MllProof::node("tensor", conclusion.clone(), vec![ta, tb]);
                return finish_mll(st, Some(t), proved, refuted, false);
            }
        }
        // mix: nonempty binary partitions
        if st.len() >= 2 {
            let n = st.len();
            for mask in 1u32..((1 << n) - 1) {
                // canonical: first element stays in part a
                if mask & 1 == 0 {
                    continue;
                }
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (j, f) in st.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        a.push(f.clone());
                    } else {
                        b.push(f.clone());
                    }
                }
                let ta = mll_search(&a, proved, refuted, limits, depth + 1, nodes, pruned);
                let Some(ta) = ta else { continue };
                let tb = mll_search(&b, proved, refuted, limits, depth + 1, nodes, pruned);
                let Some(tb) = tb else { continue };
                let t = MllProof::node("mix", conclusion.clone(), vec![ta, tb]);
                return finish_mll(st, Some(t), proved, refuted, false);
            }
        }
        finish_mll(st, None, proved, refuted, *pruned && !was_pruned_before)
    }
}

fn finish_mll(
    st: &MllState,
    result: Option<MllProof>,
    proved: &mut BTreeMap<MllState, MllProof>,
    refuted: &mut BTreeSet<MllState>,
    pruned_here: bool,
) -> Option<MllProof> {
    match &result {
        Some(t) => {
            proved.insert(st.clone(), t.clone());
        }
        None => {
            if !pruned_here {
                refuted.insert(st.clone());
            }
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::CheckReport;
    use crate::parse::{parse_formula, parse_lkp, parse_mll_sequent, parse_sequent, parse_structure};

    #[test]
    fn tautology_examples() {
        assert!(tautology(&parse_formula("[a, -a]").unwrap()));
        assert!(!tautology(&parse_formula("a").unwrap()));
        assert!(tautology_lkp(
            &parse_lkp("(a & b) -> (b & a)").unwrap()
        ));
    }

    #[test]
    fn prove_ks_example_formula() {
        // the worked example formula
        let goal = parse_formula("[-a, -b, (b, a)]").unwrap();
        let out = prove_classical(SystemId::KS, &goal, &SearchLimits::default()).unwrap();
        let proof = out.proof().expect("provable");
        assert_eq!(proof.check(8), CheckReport::Ok);
        assert!(proof.is_proof());
        assert_eq!(proof.conclusion(), &goal);
    }

    #[test]
    fn prove_ks_unit_goal() {
        let out = prove_classical(SystemId::KS, &Formula::TRUE, &SearchLimits::default()).unwrap();
        assert!(out.is_proved());
        assert!(provable_bruteforce(SystemId::KS, &Formula::TRUE, 6, 8).unwrap());
    }

    #[test]
    fn lbv_refutations_are_saturations() {
        let s = parse_structure("[a, b]").unwrap();
        assert_eq!(
            prove_lbv(&s, &SearchLimits::default()).unwrap(),
            SearchOutcome::Refuted
        );
        let cop = parse_structure("(a, -a)").unwrap();
        assert_eq!(
            prove_lbv(&cop, &SearchLimits::default()).unwrap(),
            SearchOutcome::Refuted
        );
        assert!(!provable_bruteforce(SystemId::LBV, &cop, 10, 8).unwrap());
        let pair = parse_structure("[a, -a]").unwrap();
        assert!(prove_lbv(&pair, &SearchLimits::default()).unwrap().is_proved());
        assert!(provable_bruteforce(SystemId::LBV, &pair, 10, 8).unwrap());
    }

    #[test]
    fn ks_cache_is_reusable() {
        let mut cache = DeepCache::new();
        let limits = SearchLimits::default();
        let g1 = parse_formula("[a, -a, b]").unwrap();
        let g2 = parse_formula("[-a, a]").unwrap();
        assert!(prove_deep(SystemId::KS, &g1, &limits, &mut cache)
            .unwrap()
            .is_proved());
        let again = prove_deep(SystemId::KS, &g2, &limits, &mut cache).unwrap();
        let proof = again.proof().unwrap();
        assert_eq!(proof.check(8), CheckReport::Ok);
        // refutation caching
        let bad = parse_formula("[a, b]").unwrap();
        assert_eq!(
            prove_deep(SystemId::KS, &bad, &limits, &mut cache).unwrap(),
            SearchOutcome::Refuted
        );
        assert_eq!(
            prove_deep(SystemId::KS, &bad, &limits, &mut cache).unwrap(),
            SearchOutcome::Refuted
        );
    }

    #[test]
    fn prove_lkp_worked_example() {
        let goal = parse_sequent("|- (a & b) -> (b & a)").unwrap();
        let out = prove_lkp(&goal, &SearchLimits::default());
        let t = out.proof().expect("provable");
        assert_eq!(t.conclusion, goal);
        assert_eq!(crate::lkp::check_lkp(&t), CheckReport::Ok);
    }

    #[test]
    fn prove_lkp_needs_contraction() {
        let goal = parse_sequent("|- a | (a -> b)").unwrap();
        let out = prove_lkp(&goal, &SearchLimits::default());
        let t = out.proof().expect("classically provable");
        assert_eq!(crate::lkp::check_lkp(&t), CheckReport::Ok);
    }

    #[test]
    fn lkp_empty_sequent_refuted() {
        let goal = parse_sequent("|-").unwrap();
        let mut limits = SearchLimits::default();
        limits.max_depth = 12;
        assert_eq!(prove_lkp(&goal, &limits), SearchOutcome::Refuted);
    }

    #[test]
    fn lkp_non_tautologies_refuted() {
        for s in ["|- a", "a |- b", "|- a & -a"] {
            let goal = parse_sequent(s).unwrap();
            let out = prove_lkp(&goal, &SearchLimits::default());
            assert!(!out.is_proved(), "{s}");
        }
    }

    #[test]
    fn prove_mll_examples() {
        let yes = parse_mll_sequent("|- a * b, -a, -b").unwrap();
        let out = prove_mll(&yes, &SearchLimits::default());
        let t = out.proof().expect("provable");
        assert!(crate::lbv::check_mll(&t).is_ok());
        // mix is required here
        let mix = parse_mll_sequent("|- a, -a, b, -b").unwrap();
        assert!(prove_mll(&mix, &SearchLimits::default()).is_proved());
        // tensor of duals is not provable
        let no = parse_mll_sequent("|- a * -a").unwrap();
        assert_eq!(prove_mll(&no, &SearchLimits::default()), SearchOutcome::Refuted);
    }

    #[test]
    fn forward_table_lbv_small() {
        let table = forward_table::<crate::syntax::LbvUnit>(SystemId::LBV, &["a", "b"], 4, 8)
            .unwrap();
        let pair = parse_structure("[a, -a]").unwrap();
        assert!(table.provable(&pair));
        let proof = table.proof(&pair).unwrap();
        assert_eq!(proof.check(8), CheckReport::Ok);
        let cop = parse_structure("(a, -a)").unwrap();
        assert!(!table.provable(&cop));
        // every member's proof checks and concludes the member
        for m in table.members().take(50) {
            let p = table.proof(m).unwrap();
            assert_eq!(p.check(8), CheckReport::Ok);
            assert_eq!(p.conclusion(), m);
        }
    }
}
