//! Rule schemas, matching modulo AC-unit, and step enumeration.
//!
//! Schemas are small pattern trees over formula metavariables (`P`, `Q`,
//! ...) and atom metavariables (`a`). Matching is modulo associativity,
//! commutativity and the unit laws: a metavariable may absorb a sub-multiset
//! of an n-ary node's children and may match a unit, so that for instance
//! the switch instance `C{f} -> C{t}` obtained with `P = f, Q = R = t`
//! type-checks. A substitution is accepted exactly when applying it to the
//! pattern and canonicalizing reproduces the matched term.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::context::{enumerate_occurrences, OccPath};
use crate::error::Error;
use crate::syntax::{Atom, ClassicalUnit, Dialect, Term, Units};


// ---------------------------------------------------------------------------
// Rule and system identifiers
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleName {
    AiDown,
    AiUp,
    AwDown,
    AwUp,
    AcDown,
    AcUp,
    IDown,
    IUp,
    WDown,
    WUp,
    CDown,
    CUp,
    Switch,
    Medial,
}

impl RuleName {
    pub fn dual(self) -> RuleName {
        use RuleName::*;
        match self {
            AiDown => AiUp,
            AiUp => AiDown,
            AwDown => AwUp,
            AwUp => AwDown,
            AcDown => AcUp,
            AcUp => AcDown,
            IDown => IUp,
            IUp => IDown,
            WDown => WUp,
            WUp => WDown,
            CDown => CUp,
            CUp => CDown,
            Switch => Switch,
            Medial => Medial,
        }
    }

    pub fn is_up(self) -> bool {
        use RuleName::*;
        matches!(self, AiUp | AwUp | AcUp | IUp | WUp | CUp)
    }

    /// General (non-atomic) structural rules, eliminated by atomization.
    pub fn is_general(self) -> bool {
        use RuleName::*;
        matches!(self, IDown | IUp | WDown | WUp | CDown | CUp)
    }

    pub fn as_str(self) -> &'static str {
        use RuleName::*;
        match self {
            AiDown => "ai_down",
            AiUp => "ai_up",
            AwDown => "aw_down",
            AwUp => "aw_up",
            AcDown => "ac_down",
            AcUp => "ac_up",
            IDown => "i_down",
            IUp => "i_up",
            WDown => "w_down",
            WUp => "w_up",
            CDown => "c_down",
            CUp => "c_up",
            Switch => "s",
            Medial => "m",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        use RuleName::*;
        Ok(match s {
            "ai_down" => AiDown,
            "ai_up" => AiUp,
            "aw_down" => AwDown,
            "aw_up" => AwUp,
            "ac_down" => AcDown,
            "ac_up" => AcUp,
            "i_down" => IDown,
            "i_up" => IUp,
            "w_down" => WDown,
            "w_up" => WUp,
            "c_down" => CDown,
            "c_up" => CUp,
            "s" => Switch,
            "m" => Medial,
            other => return Err(Error::UnknownRule(other.to_string())),
        })
    }
}

/// Deductive system identifier with a fixed rule inventory.
///
/// `LBVg` is the generalized LBV variant whose interaction rules are not
/// restricted to atomic form; it is the input language of `lbv_atomize`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemId {
    SKSg,
    SKS,
    KS,
    LBVg,
    LBV,
    LBVCut,
    LKP,
    MllMix,
}

impl SystemId {
    /// Deep-inference rule inventory in search-preference order (cheapest
    /// first: interaction, switch, medial, weakening, contraction).
    pub fn rules(self) -> &'static [RuleName] {
        use RuleName::*;
        match self {
            SystemId::SKSg => &[IDown, Switch, WDown, CDown, IUp, WUp, CUp],
            SystemId::SKS => &[AiDown, Switch, Medial, AwDown, AcDown, AiUp, AwUp, AcUp],
            SystemId::KS => &[AiDown, Switch, Medial, AwDown, AcDown],
            SystemId::LBVg => &[IDown, AiDown, Switch, IUp, AiUp],
            SystemId::LBV => &[AiDown, Switch],
            SystemId::LBVCut => &[AiDown, Switch, AiUp],
            SystemId::LKP | SystemId::MllMix => &[],
        }
    }

    pub fn contains(self, rule: RuleName) -> bool {
        self.rules().contains(&rule)
    }

    pub fn dialect(self) -> Dialect {
        match self {
            SystemId::SKSg | SystemId::SKS | SystemId::KS => Dialect::Classical,
            SystemId::LBVg | SystemId::LBV | SystemId::LBVCut => Dialect::Lbv,
            SystemId::LKP => Dialect::Lkp,
            SystemId::MllMix => Dialect::Mll,
        }
    }

    /// The smallest inventory containing all duals of this system's rules,
    /// used to report where a failed dualization would land.
    pub fn symmetric_closure(self) -> SystemId {
        match self {
            SystemId::KS => SystemId::SKS,
            SystemId::LBV => SystemId::LBVCut,
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SystemId::SKSg => "SKSg",
            SystemId::SKS => "SKS",
            SystemId::KS => "KS",
            SystemId::LBVg => "LBVg",
            SystemId::LBV => "LBV",
            SystemId::LBVCut => "LBV_cut",
            SystemId::LKP => "LKP",
            SystemId::MllMix => "MLL_MIX",
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sksg" => SystemId::SKSg,
            "sks" => SystemId::SKS,
            "ks" => SystemId::KS,
            "lbvg" => SystemId::LBVg,
            "lbv" => SystemId::LBV,
            "lbv_cut" | "lbvcut" | "lbv-cut" => SystemId::LBVCut,
            "lkp" => SystemId::LKP,
            "mll_mix" | "mll" | "mllmix" | "mll-mix" => SystemId::MllMix,
            other => return Err(Error::UnknownSystem(other.to_string())),
        })
    }
}

// ---------------------------------------------------------------------------
// Patterns and substitutions
// ---------------------------------------------------------------------------

pub type MetaVar = &'static str;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern<U: Units> {
    Unit(U),
    /// Formula metavariable.
    Var(MetaVar),
    /// The negation of what a formula metavariable is bound to.
    NegVar(MetaVar),
    /// Atom metavariable (binds atoms of either polarity).
    AtomVar(MetaVar),
    /// The dual of a bound atom metavariable.
    NegAtomVar(MetaVar),
    Or(Vec<Pattern<U>>),
    And(Vec<Pattern<U>>),
}

impl<U: Units> Pattern<U> {
    fn term_vars(&self, out: &mut BTreeSet<MetaVar>) {
        match self {
            Pattern::Var(v) | Pattern::NegVar(v) => {
                out.insert(v);
            }
            Pattern::Or(ps) | Pattern::And(ps) => {
                for p in ps {
                    p.term_vars(out);
                }
            }
            _ => {}
        }
    }

    fn atom_vars(&self, out: &mut BTreeSet<MetaVar>) {
        match self {
            Pattern::AtomVar(v) | Pattern::NegAtomVar(v) => {
                out.insert(v);
            }
            Pattern::Or(ps) | Pattern::And(ps) => {
                for p in ps {
                    p.atom_vars(out);
                }
            }
            _ => {}
        }
    }

    pub fn vars(&self) -> (BTreeSet<MetaVar>, BTreeSet<MetaVar>) {
        let mut tv = BTreeSet::new();
        let mut av = BTreeSet::new();
        self.term_vars(&mut tv);
        self.atom_vars(&mut av);
        (tv, av)
    }
}

/// Metavariable assignment; domain exactly the pattern's metavariables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subst<U: Units> {
    pub terms: Vec<(MetaVar, Term<U>)>,
    pub atoms: Vec<(MetaVar, Atom)>,
}

impl<U: Units> Default for Subst<U> {
    fn default() -> Self {
        Subst {
            terms: Vec::new(),
            atoms: Vec::new(),
        }
    }
}

impl<U: Units> Subst<U> {
    pub fn term(&self, v: MetaVar) -> Option<&Term<U>> {
        self.terms.iter().find(|(k, _)| *k == v).map(|(_, t)| t)
    }

    pub fn atom(&self, v: MetaVar) -> Option<&Atom> {
        self.atoms.iter().find(|(k, _)| *k == v).map(|(_, a)| a)
    }

    pub fn bind_term(&mut self, v: MetaVar, t: Term<U>) -> bool {
        match self.term(v) {
            Some(existing) => *existing == t,
            None => {
                self.terms.push((v, t));
                true
            }
        }
    }

    pub fn bind_atom(&mut self, v: MetaVar, a: Atom) -> bool {
        match self.atom(v) {
            Some(existing) => *existing == a,
            None => {
                self.atoms.push((v, a));
                true
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.terms.sort();
        self.atoms.sort();
        self
    }
}

/// Apply a substitution; all variables must be bound. The result is
/// canonical by construction.
pub fn apply<U: Units>(pat: &Pattern<U>, sub: &Subst<U>) -> Term<U> {
    match pat {
        Pattern::Unit(u) => Term::Unit(*u),
        Pattern::Var(v) => sub.term(v).expect("unbound term var").clone(),
        Pattern::NegVar(v) => sub.term(v).expect("unbound term var").negate(),
        Pattern::AtomVar(v) => Term::Atom(sub.atom(v).expect("unbound atom var").clone()),
        Pattern::NegAtomVar(v) => Term::Atom(sub.atom(v).expect("unbound atom var").negate()),
        Pattern::Or(ps) => Term::or(ps.iter().map(|p| apply(p, sub)).collect()),
        Pattern::And(ps) => Term::and(ps.iter().map(|p| apply(p, sub)).collect()),
    }
}

/// All substitutions `s` with `canon(s(pattern)) == term`.
pub fn match_pattern<U: Units>(pat: &Pattern<U>, term: &Term<U>) -> Vec<Subst<U>> {
    let mut out = Vec::new();
    match_into(pat, term, Subst::default(), &mut out);
    let mut seen = BTreeSet::new();
    out.retain(|s| seen.insert(s.clone().normalized()));
    debug_assert!(out.iter().all(|s| apply(pat, s) == *term));
    out
}

fn match_into<U: Units>(pat: &Pattern<U>, term: &Term<U>, sub: Subst<U>, out: &mut Vec<Subst<U>>) {
    match pat {
        Pattern::Unit(u) => {
            if *term == Term::Unit(*u) {
                out.push(sub);
            }
        }
        Pattern::Var(v) => {
            let mut sub = sub;
            if sub.bind_term(v, term.clone()) {
                out.push(sub);
            }
        }
        Pattern::NegVar(v) => {
            let mut sub = sub;
            if sub.bind_term(v, term.negate()) {
                out.push(sub);
            }
        }
        Pattern::AtomVar(v) => {
            if let Term::Atom(a) = term {
                let mut sub = sub;
                if sub.bind_atom(v, a.clone()) {
                    out.push(sub);
                }
            }
        }
        Pattern::NegAtomVar(v) => {
            if let Term::Atom(a) = term {
                let mut sub = sub;
                if sub.bind_atom(v, a.negate()) {
                    out.push(sub);
                }
            }
        }
        Pattern::Or(slots) => match_nary(false, slots, term, sub, out),
        Pattern::And(slots) => match_nary(true, slots, term, sub, out),
    }
}

/// Matching against an n-ary pattern: distribute the term's children over
/// the pattern slots in every way, padding empty slots with the identity
/// unit. The mergeable unit (`t` in a disjunction, `f` in a conjunction) may
/// additionally be replicated into any nonempty set of slots, mirroring the
/// `[t,t] = t` and `(f,f) = f` equations.
fn match_nary<U: Units>(
    conj: bool,
    slots: &[Pattern<U>],
    term: &Term<U>,
    sub: Subst<U>,
    out: &mut Vec<Subst<U>>,
) {
    let elems = if conj { term.and_view() } else { term.or_view() };
    let mergeable = if conj { U::or_identity() } else { U::and_identity() };
    let identity = if conj { U::and_identity() } else { U::or_identity() };
    // In LBV the two designated units coincide and are always dropped, so
    // the view never contains one.
    let has_mergeable = mergeable != identity && elems.contains(&Term::Unit(mergeable));
    let base: Vec<Term<U>> = if has_mergeable {
        elems
            .iter()
            .filter(|e| **e != Term::Unit(mergeable))
            .cloned()
            .collect()
    } else {
        elems
    };

    let k = slots.len();
    let mut assignment = vec![0usize; base.len()];
    loop {
        let unit_masks: std::ops::Range<u32> = if has_mergeable { 1..(1 << k) } else { 0..1 };
        for unit_mask in unit_masks {
            let mut groups: Vec<Vec<Term<U>>> = vec![Vec::new(); k];
            for (e, &slot) in base.iter().zip(assignment.iter()) {
                groups[slot].push(e.clone());
            }
            for (i, group) in groups.iter_mut().enumerate() {
                if unit_mask & (1 << i) != 0 {
                    group.push(Term::Unit(mergeable));
                }
            }
            let values: Vec<Term<U>> = groups
                .into_iter()
                .map(|g| if conj { Term::and(g) } else { Term::or(g) })
                .collect();
            match_slots(slots, &values, sub.clone(), out);
        }
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return;
            }
            assignment[i] += 1;
            if assignment[i] < k {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

fn match_slots<U: Units>(
    slots: &[Pattern<U>],
    values: &[Term<U>],
    sub: Subst<U>,
    out: &mut Vec<Subst<U>>,
) {
    if slots.is_empty() {
        out.push(sub);
        return;
    }
    let mut firsts = Vec::new();
    match_into(&slots[0], &values[0], sub, &mut firsts);
    for s in firsts {
        match_slots(&slots[1..], &values[1..], s, out);
    }
}

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RuleSchema<U: Units> {
    pub name: RuleName,
    pub premise: Pattern<U>,
    pub conclusion: Pattern<U>,
}

/// Schema of a deep-inference rule over units `U`. The unit-bearing rules
/// (interaction, weakening) use the dialect's own units, so one table serves
/// both the classical and the LBV languages.
pub fn schema<U: Units>(name: RuleName) -> RuleSchema<U> {
    use Pattern::*;
    let t = || Unit(U::and_identity());
    let f = || Unit(U::or_identity());
    let (premise, conclusion) = match name {
        RuleName::IDown => (t(), Or(vec![Var("P"), NegVar("P")])),
        RuleName::IUp => (And(vec![Var("P"), NegVar("P")]), f()),
        RuleName::WDown => (f(), Var("P")),
        RuleName::WUp => (Var("P"), t()),
        RuleName::CDown => (Or(vec![Var("P"), Var("P")]), Var("P")),
        RuleName::CUp => (Var("P"), And(vec![Var("P"), Var("P")])),
        RuleName::AiDown => (t(), Or(vec![AtomVar("a"), NegAtomVar("a")])),
        RuleName::AiUp => (And(vec![AtomVar("a"), NegAtomVar("a")]), f()),
        RuleName::AwDown => (f(), AtomVar("a")),
        RuleName::AwUp => (AtomVar("a"), t()),
        RuleName::AcDown => (Or(vec![AtomVar("a"), AtomVar("a")]), AtomVar("a")),
        RuleName::AcUp => (AtomVar("a"), And(vec![AtomVar("a"), AtomVar("a")])),
        RuleName::Switch => (
            And(vec![Var("P"), Or(vec![Var("Q"), Var("R")])]),
            Or(vec![And(vec![Var("P"), Var("Q")]), Var("R")]),
        ),
        RuleName::Medial => (
            Or(vec![
                And(vec![Var("P"), Var("Q")]),
                And(vec![Var("R"), Var("S")]),
            ]),
            And(vec![
                Or(vec![Var("P"), Var("R")]),
                Or(vec![Var("Q"), Var("S")]),
            ]),
        ),
    };
    RuleSchema {
        name,
        premise,
        conclusion,
    }
}

// ---------------------------------------------------------------------------
// Step enumeration and checking
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct StepInstance<U: Units> {
    pub rule: RuleName,
    pub premise: Term<U>,
    pub path: OccPath,
}

/// All premises reachable bottom-up from `conclusion` by one rule of the
/// system; trivial steps (premise equal to the conclusion) are dropped and
/// duplicate premises merged, keeping the first occurrence annotation.
///
/// Rules whose premise introduces metavariables absent from the conclusion
/// (co-weakening and the interaction-up family) are not enumerable
/// bottom-up and are skipped here; `check_step` still verifies them via the
/// premise side.
pub fn step_instances<U: Units>(
    system: SystemId,
    conclusion: &Term<U>,
    arity_cap: usize,
) -> Result<Vec<StepInstance<U>>, Error> {
    let occs = enumerate_occurrences(conclusion, arity_cap)?;
    let mut out: Vec<StepInstance<U>> = Vec::new();
    let mut seen: BTreeSet<(RuleName, Term<U>)> = BTreeSet::new();
    for &rule in system.rules() {
        let sch = schema::<U>(rule);
        let (conc_tv, conc_av) = sch.conclusion.vars();
        let (prem_tv, prem_av) = sch.premise.vars();
        if !prem_tv.is_subset(&conc_tv) || !prem_av.is_subset(&conc_av) {
            continue;
        }
        for occ in &occs {
            // A redex whose canonical image is a bare unit occupies no
            // syntactic material in the conclusion; the only instances it
            // admits are unit-juggling ones, useless for backward search.
            if occ.focus.is_unit() {
                continue;
            }
            for sub in match_pattern(&sch.conclusion, &occ.focus) {
                let premise = occ.context.saturate(&apply(&sch.premise, &sub));
                if &premise == conclusion {
                    continue;
                }
                if seen.insert((rule, premise.clone())) {
                    out.push(StepInstance {
                        rule,
                        premise,
                        path: occ.path.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// All conclusions reachable top-down from `premise` by one rule of the
/// system. Atom metavariables the premise leaves unbound are instantiated
/// over `atom_names` (both polarities); unbound formula metavariables over
/// `formula_pool`. Unit-premise rules additionally apply at every insertion
/// point where the unit would be absorbed.
pub fn conclusions<U: Units>(
    system: SystemId,
    premise: &Term<U>,
    atom_names: &[&str],
    formula_pool: &[Term<U>],
    arity_cap: usize,
) -> Result<Vec<(RuleName, Term<U>)>, Error> {
    let occs = enumerate_occurrences(premise, arity_cap)?;
    let mut out: Vec<(RuleName, Term<U>)> = Vec::new();
    let mut seen: BTreeSet<(RuleName, Term<U>)> = BTreeSet::new();
    for &rule in system.rules() {
        let sch = schema::<U>(rule);
        let mut sites: Vec<(crate::context::Context<U>, Vec<Subst<U>>)> = Vec::new();
        for occ in &occs {
            let subs = match_pattern(&sch.premise, &occ.focus);
            if !subs.is_empty() {
                sites.push((occ.context.clone(), subs));
            }
        }
        if let Pattern::Unit(u) = &sch.premise {
            // Insertion points: wrapping any occurrence in a frame where the
            // unit is absorbed yields a context C with C{u} == premise.
            for occ in &occs {
                let wrap_or = crate::context::Context::hole().within_or(vec![occ.focus.clone()]);
                let wrap_and = crate::context::Context::hole().within_and(vec![occ.focus.clone()]);
                if *u == U::or_identity() {
                    sites.push((occ.context.compose(&wrap_or), vec![Subst::default()]));
                }
                if *u == U::and_identity() {
                    sites.push((occ.context.compose(&wrap_and), vec![Subst::default()]));
                }
            }
        }
        for (ctx, subs) in sites {
            for sub in subs {
                for sub in complete(&sch.conclusion, sub, atom_names, formula_pool) {
                    let conclusion = ctx.saturate(&apply(&sch.conclusion, &sub));
                    if &conclusion == premise {
                        continue;
                    }
                    if seen.insert((rule, conclusion.clone())) {
                        out.push((rule, conclusion));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn complete<U: Units>(
    target: &Pattern<U>,
    sub: Subst<U>,
    atom_names: &[&str],
    formula_pool: &[Term<U>],
) -> Vec<Subst<U>> {
    let (tv, av) = target.vars();
    let mut partial = vec![sub];
    for v in av {
        if partial.iter().all(|s| s.atom(v).is_some()) {
            continue;
        }
        let mut next = Vec::new();
        for s in partial {
            for name in atom_names {
                for negated in [false, true] {
                    let mut s2 = s.clone();
                    if s2.bind_atom(v, Atom::new(*name, negated)) {
                        next.push(s2);
                    }
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            return partial;
        }
    }
    for v in tv {
        if partial.iter().all(|s| s.term(v).is_some()) {
            continue;
        }
        let mut next = Vec::new();
        for s in partial {
            for t in formula_pool {
                let mut s2 = s.clone();
                if s2.bind_term(v, t.clone()) {
                    next.push(s2);
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            return partial;
        }
    }
    partial
}

/// Whether `premise -> conclusion` is one valid instance of `rule`.
pub fn check_step_rule<U: Units>(
    rule: RuleName,
    premise: &Term<U>,
    conclusion: &Term<U>,
    arity_cap: usize,
) -> Result<bool, Error> {
    let sch = schema::<U>(rule);
    let (conc_tv, conc_av) = sch.conclusion.vars();
    let (prem_tv, prem_av) = sch.premise.vars();

    // Bottom-up: decompose the conclusion, rebuild the premise.
    if prem_tv.is_subset(&conc_tv) && prem_av.is_subset(&conc_av) {
        for occ in enumerate_occurrences(conclusion, arity_cap)? {
            for sub in match_pattern(&sch.conclusion, &occ.focus) {
                if occ.context.saturate(&apply(&sch.premise, &sub)) == *premise {
                    return Ok(true);
                }
            }
        }
    }
    // Top-down: decompose the premise, rebuild the conclusion.
    if conc_tv.is_subset(&prem_tv) && conc_av.is_subset(&prem_av) {
        for occ in enumerate_occurrences(premise, arity_cap)? {
            for sub in match_pattern(&sch.premise, &occ.focus) {
                if occ.context.saturate(&apply(&sch.conclusion, &sub)) == *conclusion {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Whether `premise -> conclusion` is a valid step of the system. Equal
/// formulas always pass: canonical forms absorb the `=` rule, and repeated
/// lines in hand-written files are treated as no-ops.
pub fn check_step<U: Units>(
    system: SystemId,
    premise: &Term<U>,
    conclusion: &Term<U>,
    arity_cap: usize,
) -> Result<bool, Error> {
    if premise == conclusion {
        return Ok(true);
    }
    for &rule in system.rules() {
        if check_step_rule(rule, premise, conclusion, arity_cap)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Used by the classical schemas in tests.
pub type ClassicalPattern = Pattern<ClassicalUnit>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_structure};
    use crate::syntax::{eval_formula, Formula, Structure};
    use std::collections::BTreeMap;

    fn fsub(pairs: &[(&'static str, &str)]) -> Subst<ClassicalUnit> {
        Subst {
            terms: pairs
                .iter()
                .map(|(v, t)| (*v, parse_formula(t).unwrap()))
                .collect(),
            atoms: Vec::new(),
        }
        .normalized()
    }

    #[test]
    fn match_switch_premise_ac() {
        // (P,[Q,R]) vs (a,[b,c]) includes both AC readings
        let pat: Pattern<ClassicalUnit> = Pattern::And(vec![
            Pattern::Var("P"),
            Pattern::Or(vec![Pattern::Var("Q"), Pattern::Var("R")]),
        ]);
        let t = parse_formula("(a, [b, c])").unwrap();
        let subs: Vec<_> = match_pattern(&pat, &t)
            .into_iter()
            .map(|s| s.normalized())
            .collect();
        assert!(subs.contains(&fsub(&[("P", "a"), ("Q", "b"), ("R", "c")])));
        assert!(subs.contains(&fsub(&[("P", "a"), ("Q", "c"), ("R", "b")])));
    }

    #[test]
    fn match_atomic_interaction() {
        let sch = schema::<ClassicalUnit>(RuleName::AiDown);
        let t = parse_formula("[x, -x]").unwrap();
        let subs = match_pattern(&sch.conclusion, &t);
        assert!(subs.iter().any(|s| s.atom("a") == Some(&Atom::pos("x"))));
    }

    #[test]
    fn match_units_absorbed() {
        // (P,[Q,R]) vs a accepts {P->a, Q->t, R->t} since canon((a,[t,t])) = a
        let pat: Pattern<ClassicalUnit> = Pattern::And(vec![
            Pattern::Var("P"),
            Pattern::Or(vec![Pattern::Var("Q"), Pattern::Var("R")]),
        ]);
        let a = parse_formula("a").unwrap();
        let subs: Vec<_> = match_pattern(&pat, &a)
            .into_iter()
            .map(|s| s.normalized())
            .collect();
        assert!(subs.contains(&fsub(&[("P", "a"), ("Q", "t"), ("R", "t")])));
        for s in &subs {
            assert_eq!(apply(&pat, s), a);
        }
    }

    #[test]
    fn step_instances_ks_interaction() {
        let conc = parse_formula("[a, -a]").unwrap();
        let steps = step_instances(SystemId::KS, &conc, 8).unwrap();
        assert!(steps
            .iter()
            .any(|s| s.rule == RuleName::AiDown && s.premise == Formula::TRUE));
    }

    #[test]
    fn step_instances_lbv_switch() {
        let conc = parse_structure("[(a, b), c]").unwrap();
        let steps = step_instances(SystemId::LBV, &conc, 8).unwrap();
        let want = parse_structure("(a, [b, c])").unwrap();
        assert!(steps
            .iter()
            .any(|s| s.rule == RuleName::Switch && s.premise == want));
    }

    #[test]
    fn step_instances_bare_t_empty() {
        let steps = step_instances(SystemId::KS, &Formula::TRUE, 8).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn check_step_examples() {
        let t = Formula::TRUE;
        let pair = parse_formula("[a, -a]").unwrap();
        assert!(check_step(SystemId::KS, &t, &pair, 8).unwrap());
        let f = Formula::FALSE;
        let a = parse_formula("a").unwrap();
        assert!(check_step(SystemId::KS, &f, &a, 8).unwrap());
        // ai_up not in LBV
        let one = Structure::ONE;
        let cop = parse_structure("(a, -a)").unwrap();
        assert!(!check_step(SystemId::LBV, &one, &cop, 8).unwrap());
        // but the cut step (a,-a) -> o is fine in LBV_cut
        assert!(check_step(SystemId::LBVCut, &cop, &one, 8).unwrap());
    }

    #[test]
    fn check_step_up_rules_via_premise_side() {
        // aw_up: C{a} -> C{t}
        let prem = parse_formula("(x, [a, b])").unwrap();
        let conc = parse_formula("(x, [t, b])").unwrap();
        assert!(check_step_rule(RuleName::AwUp, &prem, &conc, 8).unwrap());
        // w_up: C{P} -> C{t}
        let prem2 = parse_formula("(x, [a, b])").unwrap();
        let conc2 = parse_formula("x").unwrap();
        assert!(check_step_rule(RuleName::WUp, &prem2, &conc2, 8).unwrap());
    }

    #[test]
    fn deep_switch_instance() {
        // the f-case weakening replacement: C{f} -> C{t} is a switch instance
        let prem = parse_formula("[x, f]").unwrap(); // = x
        let conc = parse_formula("[x, t]").unwrap();
        assert!(check_step_rule(RuleName::Switch, &prem, &conc, 8).unwrap());
    }

    #[test]
    fn soundness_ks_steps_small() {
        // premise entails conclusion by truth table for every enumerated step
        let samples = [
            "[a, -a]",
            "[(a, b), c]",
            "[a, b, (a, -b)]",
            "([a, b], [c, a])",
            "[t, (a, -a)]",
            "(a, [b, -a, c])",
        ];
        for text in samples {
            let conc = parse_formula(text).unwrap();
            let names = conc.atom_names();
            for inst in step_instances(SystemId::KS, &conc, 8).unwrap() {
                for bits in 0..(1u32 << names.len()) {
                    let mut asg = BTreeMap::new();
                    for (i, n) in names.iter().enumerate() {
                        asg.insert(n.clone(), bits & (1 << i) != 0);
                    }
                    let p = eval_formula(&inst.premise, &asg).unwrap();
                    let c = eval_formula(&conc, &asg).unwrap();
                    assert!(
                        !p || c,
                        "{} -> {} unsound under {:?} via {}",
                        inst.premise,
                        conc,
                        asg,
                        inst.rule
                    );
                }
            }
        }
    }

    #[test]
    fn duality_of_steps() {
        // for every SKS step premise -> conclusion, the negated reversal is a
        // valid step of the dual rule
        let samples = ["[a, -a, b]", "[(a, b), -a]", "(a, [b, c])"];
        for text in samples {
            let conc = parse_formula(text).unwrap();
            for inst in step_instances(SystemId::SKS, &conc, 8).unwrap() {
                let dual_prem = conc.negate();
                let dual_conc = inst.premise.negate();
                assert!(
                    check_step_rule(inst.rule.dual(), &dual_prem, &dual_conc, 8).unwrap(),
                    "dual of {} fails: {} -> {}",
                    inst.rule,
                    dual_prem,
                    dual_conc
                );
            }
        }
    }

    #[test]
    fn rule_name_roundtrip() {
        for r in [
            RuleName::AiDown,
            RuleName::AiUp,
            RuleName::AwDown,
            RuleName::AwUp,
            RuleName::AcDown,
            RuleName::AcUp,
            RuleName::IDown,
            RuleName::IUp,
            RuleName::WDown,
            RuleName::WUp,
            RuleName::CDown,
            RuleName::CUp,
            RuleName::Switch,
            RuleName::Medial,
        ] {
            assert_eq!(r.as_str().parse::<RuleName>().unwrap(), r);
            assert_eq!(r.dual().dual(), r);
        }
    }

    #[test]
    fn forward_conclusions_insertion() {
        // from o, interaction introduces [a, -a] anywhere
        let one = Structure::ONE;
        let concs = conclusions(SystemId::LBV, &one, &["a"], &[], 8).unwrap();
        let pair = parse_structure("[a, -a]").unwrap();
        assert!(concs
            .iter()
            .any(|(r, c)| *r == RuleName::AiDown && *c == pair));
        // from [a, -a], deep insertion reaches [a, (-a, [b, -b])]
        let concs2 = conclusions(SystemId::LBV, &pair, &["b"], &[], 8).unwrap();
        let deep = parse_structure("[a, (-a, [b, -b])]").unwrap();
        assert!(concs2.iter().any(|(_, c)| *c == deep));
    }
}
