//! Derivation objects and checking.
//!
//! Deep-inference derivations are degenerate trees, stored as chains of
//! canonical formulas with a rule label between adjacent lines, premise
//! first. Proofs are derivations whose premise is the axiom unit. Sequent
//! calculi use genuine trees with a rule name at every node.
//!
//! File formats: `.drv` is line-oriented (`%system`, `%kind`, then formula
//! lines alternating with `> rule [@ path]` lines); `.sqp` is an indented
//! tree of `rule : sequent` lines, two spaces per level.

use std::fmt;

use crate::context::Context;
use crate::error::Error;
use crate::parse::{parse_formula, parse_mll_sequent, parse_sequent, parse_structure};
use crate::rules::{check_step, RuleName, SystemId};
use crate::syntax::{ClassicalUnit, LbvUnit, MllSequent, Sequent, Term, Units};

// ---------------------------------------------------------------------------
// Deep derivations (chains)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step<U: Units> {
    pub rule: RuleName,
    pub result: Term<U>,
    /// Advisory occurrence annotation, not authoritative.
    pub annotation: Option<String>,
}

/// A chain `F0 -> F1 -> ... -> Fn` of canonical formulas with per-step rule
/// labels; `F0` is the premise, `Fn` the conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeepDerivation<U: Units> {
    pub system: SystemId,
    pub premise: Term<U>,
    pub steps: Vec<Step<U>>,
}

pub type ClassicalDerivation = DeepDerivation<ClassicalUnit>;
pub type LbvDerivation = DeepDerivation<LbvUnit>;

/// Checker verdict; failures are values, not errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckReport {
    Ok,
    Failed {
        /// Index of the first formula that does not follow from its
        /// predecessor (1-based over the chain lines).
        index: usize,
        reason: String,
    },
}

impl CheckReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, CheckReport::Ok)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckReport::Ok => f.write_str("ok"),
            CheckReport::Failed { index, reason } => {
                write!(f, "failed at index {index}: {reason}")
            }
        }
    }
}

impl<U: Units> DeepDerivation<U> {
    pub fn single(system: SystemId, formula: Term<U>) -> Self {
        DeepDerivation {
            system,
            premise: formula,
            steps: Vec::new(),
        }
    }

    /// Append a step; a step whose result equals the current conclusion is a
    /// canonical no-op and is dropped.
    pub fn push(&mut self, rule: RuleName, result: Term<U>) {
        self.push_annotated(rule, result, None);
    }

    pub fn push_annotated(&mut self, rule: RuleName, result: Term<U>, annotation: Option<String>) {
        if *self.conclusion() == result {
            return;
        }
        self.steps.push(Step {
            rule,
            result,
            annotation,
        });
    }

    pub fn conclusion(&self) -> &Term<U> {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.premise)
    }

    pub fn length(&self) -> usize {
        self.steps.len()
    }

    /// Chain of all formulas, premise first.
    pub fn lines(&self) -> Vec<&Term<U>> {
        let mut v = Vec::with_capacity(self.steps.len() + 1);
        v.push(&self.premise);
        v.extend(self.steps.iter().map(|s| &s.result));
        v
    }

    /// A proof is a derivation from the axiom unit.
    pub fn is_proof(&self) -> bool {
        self.premise == Term::Unit(U::and_identity())
    }

    /// Verify every adjacent pair against the system's rules.
    pub fn check(&self, arity_cap: usize) -> CheckReport {
        let mut prev = &self.premise;
        for (i, step) in self.steps.iter().enumerate() {
            if !self.system.contains(step.rule) && prev != &step.result {
                return CheckReport::Failed {
                    index: i + 1,
                    reason: format!("rule {} not in system {}", step.rule, self.system),
                };
            }
            match crate::rules::check_step_rule(step.rule, prev, &step.result, arity_cap) {
                Ok(true) => {}
                Ok(false) => {
                    if prev == &step.result {
                        // explicit no-op line in a hand-written file
                    } else {
                        return CheckReport::Failed {
                            index: i + 1,
                            reason: format!(
                                "{} does not derive `{}` from `{}`",
                                step.rule, step.result, prev
                            ),
                        };
                    }
                }
                Err(e) => {
                    return CheckReport::Failed {
                        index: i + 1,
                        reason: e.to_string(),
                    };
                }
            }
            prev = &step.result;
        }
        CheckReport::Ok
    }

    /// Loose check that also accepts steps by any rule of the symmetric
    /// closure; used internally by transformations that label intermediate
    /// chains before the target system is fixed.
    pub fn check_in(&self, system: SystemId, arity_cap: usize) -> CheckReport {
        let mut relabeled = self.clone();
        relabeled.system = system;
        relabeled.check(arity_cap)
    }

    /// Formulas negated, order reversed, each rule replaced by its dual.
    /// Fails when some used rule has no dual inside the system.
    pub fn dual(&self) -> Result<DeepDerivation<U>, Error> {
        for step in &self.steps {
            if !self.system.contains(step.rule.dual()) {
                return Err(Error::NoDualInSystem {
                    rule: step.rule.to_string(),
                    system: self.system.to_string(),
                    target: self.system.symmetric_closure().to_string(),
                });
            }
        }
        let lines = self.lines();
        let mut out = DeepDerivation::single(self.system, lines.last().unwrap().negate());
        for i in (0..self.steps.len()).rev() {
            out.push(self.steps[i].rule.dual(), lines[i].negate());
        }
        Ok(out)
    }

    /// Replace every line `Fi` by `saturate(C, Fi)`. Deep inference is
    /// closed under contexts, so the result checks whenever the input does;
    /// steps that collapse under the context become no-ops and are dropped.
    pub fn embed(&self, ctx: &Context<U>) -> DeepDerivation<U> {
        let mut out = DeepDerivation::single(self.system, ctx.saturate(&self.premise));
        for step in &self.steps {
            out.push(step.rule, ctx.saturate(&step.result));
        }
        out
    }

    /// Chain concatenation; the first derivation's conclusion must equal the
    /// second's premise.
    pub fn concat(&self, other: &DeepDerivation<U>) -> Result<DeepDerivation<U>, Error> {
        if self.conclusion() != &other.premise {
            return Err(Error::EndpointMismatch {
                left: self.conclusion().to_string(),
                right: other.premise.to_string(),
            });
        }
        let mut out = self.clone();
        for step in &other.steps {
            out.push_annotated(step.rule, step.result.clone(), step.annotation.clone());
        }
        Ok(out)
    }

    /// Relabel into another system of the same dialect (inventory is checked
    /// by `check`, not here).
    pub fn into_system(mut self, system: SystemId) -> Self {
        self.system = system;
        self
    }

    pub fn rule_multiset(&self) -> Vec<RuleName> {
        let mut rules: Vec<RuleName> = self.steps.iter().map(|s| s.rule).collect();
        rules.sort();
        rules
    }
}

impl<U: Units> fmt::Display for DeepDerivation<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "%system {}", self.system)?;
        writeln!(
            f,
            "%kind {}",
            if self.is_proof() { "proof" } else { "derivation" }
        )?;
        writeln!(f, "{}", self.premise)?;
        for step in &self.steps {
            match &step.annotation {
                Some(ann) => writeln!(f, "> {} @ {}", step.rule, ann)?,
                None => writeln!(f, "> {}", step.rule)?,
            }
            writeln!(f, "{}", step.result)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Derivation files
// ---------------------------------------------------------------------------

/// A parsed `.drv` file, classical or LBV depending on `%system`.
#[derive(Clone, Debug)]
pub enum DerivationFile {
    Classical(ClassicalDerivation),
    Lbv(LbvDerivation),
}

impl DerivationFile {
    pub fn system(&self) -> SystemId {
        match self {
            DerivationFile::Classical(d) => d.system,
            DerivationFile::Lbv(d) => d.system,
        }
    }

    pub fn check(&self, arity_cap: usize) -> CheckReport {
        match self {
            DerivationFile::Classical(d) => d.check(arity_cap),
            DerivationFile::Lbv(d) => d.check(arity_cap),
        }
    }
}

impl fmt::Display for DerivationFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationFile::Classical(d) => write!(f, "{d}"),
            DerivationFile::Lbv(d) => write!(f, "{d}"),
        }
    }
}

pub fn parse_derivation_file(text: &str) -> Result<DerivationFile, Error> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::File("empty file".into()))?;
    let system: SystemId = header
        .strip_prefix("%system")
        .ok_or_else(|| Error::File("expected `%system` header".into()))?
        .trim()
        .parse()?;
    let mut rest: Vec<&str> = lines.collect();
    if let Some(first) = rest.first() {
        if first.starts_with("%kind") {
            rest.remove(0);
        }
    }
    let mut formulas: Vec<&str> = Vec::new();
    let mut rules: Vec<(RuleName, Option<String>)> = Vec::new();
    for line in rest {
        if let Some(r) = line.strip_prefix('>') {
            let r = r.trim();
            let (name, ann) = match r.split_once('@') {
                Some((n, a)) => (n.trim(), Some(a.trim().to_string())),
                None => (r, None),
            };
            rules.push((name.parse()?, ann));
        } else {
            formulas.push(line);
        }
    }
    if formulas.len() != rules.len() + 1 {
        return Err(Error::File(format!(
            "{} formulas do not interleave with {} rule lines",
            formulas.len(),
            rules.len()
        )));
    }

    fn assemble<U: Units>(
        system: SystemId,
        formulas: &[Term<U>],
        rules: &[(RuleName, Option<String>)],
    ) -> DeepDerivation<U> {
        let mut d = DeepDerivation::single(system, formulas[0].clone());
        for (i, (rule, ann)) in rules.iter().enumerate() {
            d.push_annotated(*rule, formulas[i + 1].clone(), ann.clone());
        }
        d
    }

    match system.dialect() {
        crate::syntax::Dialect::Classical => {
            let fs = formulas
                .iter()
                .map(|t| parse_formula(t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DerivationFile::Classical(assemble(system, &fs, &rules)))
        }
        crate::syntax::Dialect::Lbv => {
            let fs = formulas
                .iter()
                .map(|t| parse_structure(t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DerivationFile::Lbv(assemble(system, &fs, &rules)))
        }
        _ => Err(Error::File(format!(
            "system {system} does not use the chain format"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Sequent proof trees
// ---------------------------------------------------------------------------

/// Sequent-labelled tree with rule names at the nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree<S> {
    pub rule: String,
    pub conclusion: S,
    pub children: Vec<ProofTree<S>>,
}

pub type LkpProof = ProofTree<Sequent>;
pub type MllProof = ProofTree<MllSequent>;

impl<S> ProofTree<S> {
    pub fn leaf(rule: impl Into<String>, conclusion: S) -> Self {
        ProofTree {
            rule: rule.into(),
            conclusion,
            children: Vec::new(),
        }
    }

    pub fn node(rule: impl Into<String>, conclusion: S, children: Vec<ProofTree<S>>) -> Self {
        ProofTree {
            rule: rule.into(),
            conclusion,
            children,
        }
    }

    /// Tree height: axioms are 0, inner nodes 1 + max over children.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn iter_nodes(&self) -> Vec<&ProofTree<S>> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let node: &ProofTree<S> = out[i];
            out.extend(node.children.iter());
            i += 1;
        }
        out
    }
}

impl<S: fmt::Display> ProofTree<S> {
    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        writeln!(
            f,
            "{}{} : {}",
            "  ".repeat(depth),
            self.rule,
            self.conclusion
        )?;
        for c in &self.children {
            c.fmt_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl<S: fmt::Display> fmt::Display for ProofTree<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

/// A parsed `.sqp` file.
#[derive(Clone, Debug)]
pub enum SequentProofFile {
    Lkp(LkpProof),
    Mll(MllProof),
}

pub fn write_sequent_proof_file(p: &SequentProofFile) -> String {
    match p {
        SequentProofFile::Lkp(t) => format!("%system LKP\n%kind proof\n{t}"),
        SequentProofFile::Mll(t) => format!("%system MLL_MIX\n%kind proof\n{t}"),
    }
}

pub fn parse_sequent_proof_file(text: &str) -> Result<SequentProofFile, Error> {
    let mut lines: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .collect();
    if lines.is_empty() {
        return Err(Error::File("empty file".into()));
    }
    let system: SystemId = lines
        .remove(0)
        .trim()
        .strip_prefix("%system")
        .ok_or_else(|| Error::File("expected `%system` header".into()))?
        .trim()
        .parse()?;
    if let Some(first) = lines.first() {
        if first.trim_start().starts_with("%kind") {
            lines.remove(0);
        }
    }

    fn indent_of(line: &str) -> usize {
        let spaces = line.len() - line.trim_start().len();
        spaces / 2
    }

    fn build<S, F>(lines: &[&str], pos: &mut usize, depth: usize, parse: &F) -> Result<ProofTree<S>, Error>
    where
        F: Fn(&str) -> Result<S, Error>,
    {
        let line = lines[*pos];
        if indent_of(line) != depth {
            return Err(Error::File(format!(
                "bad indentation at line `{}`",
                line.trim()
            )));
        }
        let body = line.trim();
        let (rule, seq_text) = body
            .split_once(':')
            .ok_or_else(|| Error::File(format!("expected `rule : sequent` in `{body}`")))?;
        let conclusion = parse(seq_text.trim())?;
        *pos += 1;
        let mut children = Vec::new();
        while *pos < lines.len() && indent_of(lines[*pos]) == depth + 1 {
            children.push(build(lines, pos, depth + 1, parse)?);
        }
        Ok(ProofTree {
            rule: rule.trim().to_string(),
            conclusion,
            children,
        })
    }

    let mut pos = 0;
    let file = match system {
        SystemId::LKP => SequentProofFile::Lkp(build(&lines, &mut pos, 0, &parse_sequent)?),
        SystemId::MllMix => SequentProofFile::Mll(build(&lines, &mut pos, 0, &|s| {
            parse_mll_sequent(s)
        })?),
        other => {
            return Err(Error::File(format!(
                "system {other} does not use the sequent-tree format"
            )))
        }
    };
    if pos != lines.len() {
        return Err(Error::File("trailing lines after the proof tree".into()));
    }
    Ok(file)
}

/// Whether every adjacent pair in `lines` is a valid step (helper shared by
/// test fixtures).
pub fn chain_of<U: Units>(
    system: SystemId,
    lines: &[Term<U>],
    rules: &[RuleName],
) -> DeepDerivation<U> {
    assert_eq!(lines.len(), rules.len() + 1);
    let mut d = DeepDerivation::single(system, lines[0].clone());
    for (i, r) in rules.iter().enumerate() {
        d.push(*r, lines[i + 1].clone());
    }
    d
}

/// Convenience wrapper for checking a single candidate step.
pub fn valid_step<U: Units>(
    system: SystemId,
    premise: &Term<U>,
    conclusion: &Term<U>,
    arity_cap: usize,
) -> bool {
    check_step(system, premise, conclusion, arity_cap).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{Context, ContextTree};
    use crate::parse::parse_formula;
    use crate::syntax::Formula;

    fn fig_sf_cos_proof() -> ClassicalDerivation {
        // The example proof of [-a, -b, (b, a)], transcribed onto canonical
        // forms: equivalence steps vanish, leaving interactions and switches.
        let l0 = Formula::TRUE;
        let l1 = parse_formula("[a, -a]").unwrap();
        let l2 = parse_formula("([a, -a], [b, -b])").unwrap();
        let l3 = parse_formula("[([a, -a], b), -b]").unwrap();
        let l4 = parse_formula("[(b, a), -a, -b]").unwrap();
        chain_of(
            SystemId::KS,
            &[l0, l1, l2, l3, l4],
            &[
                RuleName::AiDown,
                RuleName::AiDown,
                RuleName::Switch,
                RuleName::Switch,
            ],
        )
    }

    #[test]
    fn example_proof_checks() {
        let d = fig_sf_cos_proof();
        assert!(d.is_proof());
        assert_eq!(d.check(8), CheckReport::Ok);
        assert_eq!(
            d.conclusion(),
            &parse_formula("[-a, -b, (b, a)]").unwrap()
        );
    }

    #[test]
    fn single_formula_checks() {
        let d = ClassicalDerivation::single(SystemId::KS, parse_formula("(a, [b, c])").unwrap());
        assert_eq!(d.check(8), CheckReport::Ok);
        assert_eq!(d.length(), 0);
    }

    #[test]
    fn bad_step_reports_index() {
        let mut d = ClassicalDerivation::single(SystemId::SKS, Formula::TRUE);
        d.push(RuleName::AiUp, parse_formula("[x, y]").unwrap());
        match d.check(8) {
            CheckReport::Failed { index, .. } => assert_eq!(index, 1),
            CheckReport::Ok => panic!("expected failure"),
        }
    }

    #[test]
    fn dual_roundtrip() {
        let d = fig_sf_cos_proof().into_system(SystemId::SKS);
        let dd = d.dual().unwrap();
        assert_eq!(dd.check(8), CheckReport::Ok);
        assert_eq!(dd.premise, d.conclusion().negate());
        assert_eq!(dd.conclusion(), &Formula::FALSE);
        assert_eq!(dd.length(), d.length());
        assert_eq!(dd.dual().unwrap(), d);
    }

    #[test]
    fn dual_outside_system_errors() {
        let d = fig_sf_cos_proof(); // KS: ai_down has no dual in KS
        match d.dual() {
            Err(Error::NoDualInSystem { target, .. }) => assert_eq!(target, "SKS"),
            other => panic!("expected NoDualInSystem, got {other:?}"),
        }
    }

    #[test]
    fn dual_single_formula() {
        let p = parse_formula("[a, (b, c)]").unwrap();
        let d = ClassicalDerivation::single(SystemId::SKS, p.clone());
        let dd = d.dual().unwrap();
        assert_eq!(dd.premise, p.negate());
        assert_eq!(dd.length(), 0);
    }

    #[test]
    fn embed_keeps_checking() {
        let d = fig_sf_cos_proof();
        let ctx = Context::new(ContextTree::Or(vec![
            ContextTree::Atom(crate::syntax::Atom::neg("x")),
            ContextTree::Hole,
        ]))
        .unwrap();
        let e = d.embed(&ctx);
        assert_eq!(e.check(8), CheckReport::Ok);
        assert_eq!(
            e.premise,
            parse_formula("[-x, t]").unwrap(),
            "premise [x-bar, t] keeps its unit"
        );
        let hole = Context::hole();
        assert_eq!(d.embed(&hole), d);
    }

    #[test]
    fn concat_and_commute_with_embed() {
        let d = fig_sf_cos_proof();
        let lines = d.lines();
        let mid = lines[2].clone();
        let mut first = ClassicalDerivation::single(SystemId::KS, d.premise.clone());
        first.push(RuleName::AiDown, lines[1].clone());
        first.push(RuleName::AiDown, mid.clone());
        let mut second = ClassicalDerivation::single(SystemId::KS, mid);
        second.push(RuleName::Switch, lines[3].clone());
        second.push(RuleName::Switch, lines[4].clone());
        let joined = first.concat(&second).unwrap();
        assert_eq!(joined, d);

        let ctx = Context::new(ContextTree::Or(vec![
            ContextTree::Atom(crate::syntax::Atom::pos("z")),
            ContextTree::Hole,
        ]))
        .unwrap();
        let lhs = joined.embed(&ctx);
        let rhs = first.embed(&ctx).concat(&second.embed(&ctx)).unwrap();
        assert_eq!(lhs, rhs);

        let single = ClassicalDerivation::single(SystemId::KS, d.conclusion().clone());
        assert_eq!(d.concat(&single).unwrap(), d);
        assert!(second.concat(&first).is_err());
    }

    #[test]
    fn drv_file_roundtrip() {
        let d = fig_sf_cos_proof();
        let text = d.to_string();
        match parse_derivation_file(&text).unwrap() {
            DerivationFile::Classical(parsed) => {
                assert_eq!(parsed.premise, d.premise);
                assert_eq!(
                    parsed.steps.iter().map(|s| &s.result).collect::<Vec<_>>(),
                    d.steps.iter().map(|s| &s.result).collect::<Vec<_>>()
                );
                assert_eq!(parsed.check(8), CheckReport::Ok);
            }
            _ => panic!("wrong dialect"),
        }
    }

    #[test]
    fn drv_file_example_format() {
        let text = "%system KS\n%kind proof\nt\n> ai_down\n[a, -a]\n";
        let file = parse_derivation_file(text).unwrap();
        assert!(file.check(8).is_ok());
        assert_eq!(file.system(), SystemId::KS);
    }

    #[test]
    fn sqp_roundtrip() {
        let ax = LkpProof::leaf(
            "ax",
            crate::parse::parse_sequent("a |- a").unwrap(),
        );
        let tree = LkpProof::node(
            "neg_r",
            crate::parse::parse_sequent("|- -a, a").unwrap(),
            vec![ax],
        );
        let file = SequentProofFile::Lkp(tree.clone());
        let text = write_sequent_proof_file(&file);
        match parse_sequent_proof_file(&text).unwrap() {
            SequentProofFile::Lkp(parsed) => assert_eq!(parsed, tree),
            _ => panic!("wrong branch"),
        }
    }

    #[test]
    fn heights() {
        let ax = LkpProof::leaf("ax", crate::parse::parse_sequent("a |- a").unwrap());
        assert_eq!(ax.height(), 0);
        let one =
            LkpProof::node("and_r", crate::parse::parse_sequent("a |- a & a").unwrap(), vec![
                ax.clone(),
                ax.clone(),
            ]);
        assert_eq!(one.height(), 1);
        let mut chain = ClassicalDerivation::single(SystemId::KS, Formula::TRUE);
        chain.push(RuleName::AiDown, parse_formula("[a, -a]").unwrap());
        assert_eq!(chain.length(), 1);
    }
}
