//! Proof kernel for the calculus of logical axioms `A1`–`A24` and rules
//! `R1`–`R5`, plus a model-based soundness probe.
//!
//! Formulas are compared by their canonical forms: `0·φ` is identified with
//! `0·1` and bound variables are α-normalized. No other rewriting happens;
//! every algebraic identity has to be cited as an axiom.

mod axioms;
mod soundness;

pub use axioms::{
    axiom_instances, check_bindings, match_axiom, AxiomError, AxiomId, Binding, BindingKind, Bindings, UnknownAxiom,
};
pub use soundness::{soundness_probe, ModelReport, RejectedScript, SoundnessReport, StepViolation};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::syntax::{check_formula, Condition, Formula, Quantifier, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    /// Transitivity.
    R1,
    /// Adding the same formula to both sides.
    R2,
    /// Scaling both sides by `r ≥ 0`.
    R3,
    /// `sup` monotonicity.
    R4,
    /// `int` monotonicity.
    R5,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "R1" => RuleId::R1,
            "R2" => RuleId::R2,
            "R3" => RuleId::R3,
            "R4" => RuleId::R4,
            "R5" => RuleId::R5,
            _ => return Err(s.to_string()),
        })
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Hyp,
    Axiom { axiom: AxiomId, bindings: Bindings },
    Rule { rule: RuleId, premises: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub id: u64,
    pub condition: Condition,
    pub justification: Justification,
}

/// A derivation from the hypotheses `Γ`. The last step is the conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofScript {
    pub signature: Signature,
    pub hypotheses: Vec<Condition>,
    pub steps: Vec<Step>,
}

impl ProofScript {
    pub fn conclusion(&self) -> Option<&Condition> {
        self.steps.last().map(|s| &s.condition)
    }
}

/// Why a step does not check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason")]
pub enum StepFailure {
    NotInHypotheses,
    AxiomMismatch { axiom: AxiomId },
    SideCondition { axiom: AxiomId, message: String },
    NotSubstitutable { var: String, captured: String },
    MalformedBindings { message: String },
    RuleMismatch { rule: RuleId, message: String },
    NegativeScalar { scalar: String },
    FreeVariableSideCondition { var: String, hypothesis: String },
    DanglingPremise { premise: u64 },
    WrongPremiseCount { rule: RuleId, found: usize },
    DuplicateStepId,
    IllFormed { message: String },
    PremiseFailed { premise: u64 },
    EmptyScript,
}

impl StepFailure {
    /// Stable name of the failure kind.
    pub fn name(&self) -> &'static str {
        match self {
            StepFailure::NotInHypotheses => "NotInHypotheses",
            StepFailure::AxiomMismatch { .. } => "AxiomMismatch",
            StepFailure::SideCondition { .. } => "SideCondition",
            StepFailure::NotSubstitutable { .. } => "NotSubstitutable",
            StepFailure::MalformedBindings { .. } => "MalformedBindings",
            StepFailure::RuleMismatch { .. } => "RuleMismatch",
            StepFailure::NegativeScalar { .. } => "NegativeScalar",
            StepFailure::FreeVariableSideCondition { .. } => "FreeVariableSideCondition",
            StepFailure::DanglingPremise { .. } => "DanglingPremise",
            StepFailure::WrongPremiseCount { .. } => "WrongPremiseCount",
            StepFailure::DuplicateStepId => "DuplicateStepId",
            StepFailure::IllFormed { .. } => "IllFormed",
            StepFailure::PremiseFailed { .. } => "PremiseFailed",
            StepFailure::EmptyScript => "EmptyScript",
        }
    }
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepFailure::NotInHypotheses => write!(f, "condition is not among the hypotheses"),
            StepFailure::AxiomMismatch { axiom } => write!(f, "condition is not the cited instance of {axiom}"),
            StepFailure::SideCondition { axiom, message } => write!(f, "side condition of {axiom} fails: {message}"),
            StepFailure::NotSubstitutable { var, captured } => {
                write!(f, "term is not substitutable for {var}: {captured} would be captured")
            }
            StepFailure::MalformedBindings { message } => write!(f, "malformed bindings: {message}"),
            StepFailure::RuleMismatch { rule, message } => write!(f, "not an instance of {rule}: {message}"),
            StepFailure::NegativeScalar { scalar } => write!(f, "scalar {scalar} is negative"),
            StepFailure::FreeVariableSideCondition { var, hypothesis } => {
                write!(f, "{var} is free in the hypothesis {hypothesis}")
            }
            StepFailure::DanglingPremise { premise } => write!(f, "premise {premise} is not an earlier step"),
            StepFailure::WrongPremiseCount { rule, found } => write!(f, "{rule} cannot take {found} premise(s)"),
            StepFailure::DuplicateStepId => write!(f, "step id is used twice"),
            StepFailure::IllFormed { message } => write!(f, "ill-formed condition: {message}"),
            StepFailure::PremiseFailed { premise } => write!(f, "premise {premise} does not check"),
            StepFailure::EmptyScript => write!(f, "the script has no steps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepStatus {
    pub id: u64,
    pub condition: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<StepFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirstFailure {
    pub step: u64,
    pub failure: StepFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    pub steps: Vec<StepStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<FirstFailure>,
}

struct Checked {
    ok: bool,
    /// Indices into `Γ` of the hypotheses this step depends on.
    uses: BTreeSet<usize>,
}

/// Checks every step. A script is accepted iff it has at least one step and
/// every step checks; it then witnesses `Γ ⊢` its last condition.
pub fn check_proof(script: &ProofScript) -> Verdict {
    let gamma: Vec<Condition> = script.hypotheses.iter().map(Condition::canonical).collect();
    let mut done: HashMap<u64, Checked> = HashMap::new();
    let mut by_id: HashMap<u64, &Step> = HashMap::new();
    let mut statuses = Vec::with_capacity(script.steps.len());
    let mut first_failure = None;

    for step in &script.steps {
        let result = if done.contains_key(&step.id) {
            Err(StepFailure::DuplicateStepId)
        } else {
            check_step(script, &gamma, step, &done, &by_id)
        };
        let (ok, uses, failure) = match result {
            Ok(uses) => (true, uses, None),
            Err(f) => (false, BTreeSet::new(), Some(f)),
        };
        if let (None, Some(f)) = (&first_failure, &failure) {
            first_failure = Some(FirstFailure { step: step.id, failure: f.clone() });
        }
        statuses.push(StepStatus { id: step.id, condition: step.condition.to_string(), ok, failure });
        if let std::collections::hash_map::Entry::Vacant(e) = done.entry(step.id) {
            e.insert(Checked { ok, uses });
            by_id.insert(step.id, step);
        }
    }
    if script.steps.is_empty() {
        first_failure = Some(FirstFailure { step: 0, failure: StepFailure::EmptyScript });
    }
    Verdict {
        accepted: first_failure.is_none(),
        conclusion: script.conclusion().map(|c| c.to_string()),
        steps: statuses,
        first_failure,
    }
}

fn check_step(
    script: &ProofScript,
    gamma: &[Condition],
    step: &Step,
    done: &HashMap<u64, Checked>,
    by_id: &HashMap<u64, &Step>,
) -> Result<BTreeSet<usize>, StepFailure> {
    let sig = &script.signature;
    for side in [&step.condition.lhs, &step.condition.rhs] {
        check_formula(sig, side).map_err(|e| StepFailure::IllFormed { message: e.to_string() })?;
    }
    match &step.justification {
        Justification::Hyp => {
            let target = step.condition.canonical();
            gamma
                .iter()
                .position(|h| *h == target)
                .map(|i| BTreeSet::from([i]))
                .ok_or(StepFailure::NotInHypotheses)
        }
        Justification::Axiom { axiom, bindings } => {
            axioms::check_axiom(sig, &step.condition, *axiom, bindings).map(|()| BTreeSet::new())
        }
        Justification::Rule { rule, premises } => {
            let mut prem = Vec::with_capacity(premises.len());
            let mut uses = BTreeSet::new();
            for &p in premises {
                let (Some(checked), Some(s)) = (done.get(&p), by_id.get(&p)) else {
                    return Err(StepFailure::DanglingPremise { premise: p });
                };
                if !checked.ok {
                    return Err(StepFailure::PremiseFailed { premise: p });
                }
                uses.extend(checked.uses.iter().copied());
                prem.push(&s.condition);
            }
            check_rule(script, *rule, &prem, &step.condition, &uses)?;
            Ok(uses)
        }
    }
}

fn same(a: &Condition, b: &Condition) -> bool {
    a.canonical() == b.canonical()
}

fn check_rule(
    script: &ProofScript,
    rule: RuleId,
    premises: &[&Condition],
    concl: &Condition,
    uses: &BTreeSet<usize>,
) -> Result<(), StepFailure> {
    let mismatch = |message: &str| StepFailure::RuleMismatch { rule, message: message.to_string() };
    let count = || StepFailure::WrongPremiseCount { rule, found: premises.len() };
    match rule {
        RuleId::R1 => {
            let [a, b] = premises else { return Err(count()) };
            if !same(&Condition::new(a.rhs.clone(), Formula::One), &Condition::new(b.lhs.clone(), Formula::One)) {
                return Err(mismatch("the premises do not chain"));
            }
            if !same(concl, &Condition::new(a.lhs.clone(), b.rhs.clone())) {
                return Err(mismatch("the conclusion does not join the outer sides"));
            }
        }
        RuleId::R2 => {
            let [p] = premises else { return Err(count()) };
            let Formula::Add(_, theta) = &concl.lhs else {
                return Err(mismatch("the conclusion is not a sum"));
            };
            let want = Condition::new(
                Formula::add(p.lhs.clone(), (**theta).clone()),
                Formula::add(p.rhs.clone(), (**theta).clone()),
            );
            if !same(concl, &want) {
                return Err(mismatch("the conclusion does not add the same formula to both sides"));
            }
        }
        RuleId::R3 => {
            let Formula::Scale(r, _) = &concl.lhs else {
                return Err(mismatch("the conclusion is not scaled"));
            };
            let p = match premises {
                [p] => p,
                [nonneg, p] => {
                    let zero = nonneg.lhs.zero_normalized().as_constant();
                    let bound = nonneg.rhs.zero_normalized().as_constant();
                    if !(zero.is_some_and(|z| z.is_zero()) && bound.as_ref() == Some(r)) {
                        return Err(mismatch(&format!("the first premise is not 0 <= {r}")));
                    }
                    p
                }
                _ => return Err(count()),
            };
            if r.is_negative() {
                return Err(StepFailure::NegativeScalar { scalar: r.to_string() });
            }
            let want = Condition::new(Formula::scale(r.clone(), p.lhs.clone()), Formula::scale(r.clone(), p.rhs.clone()));
            if !same(concl, &want) {
                return Err(mismatch("the conclusion does not scale both sides of the premise"));
            }
        }
        RuleId::R4 | RuleId::R5 => {
            let [p] = premises else { return Err(count()) };
            let want_q = if rule == RuleId::R4 { Quantifier::Sup } else { Quantifier::Int };
            let binder = match &concl.lhs {
                Formula::Quant(q, x, _) if *q == want_q => x.clone(),
                _ => return Err(mismatch(&format!("the conclusion does not start with {}", want_q.keyword()))),
            };
            // The binder may be an α-variant of the premise variable.
            let quantifies = |x: &str| {
                same(concl, &Condition::new(Formula::quant(want_q, x, p.lhs.clone()), Formula::quant(want_q, x, p.rhs.clone())))
            };
            let candidates = std::iter::once(binder).chain(p.free_vars());
            let Some(x) = candidates.into_iter().find(|x| quantifies(x)) else {
                return Err(mismatch("the conclusion does not quantify both sides of the premise"));
            };
            let x = &x;
            // only hypotheses the premise depends on constrain the variable
            if let Some(&i) = uses.iter().find(|&&i| script.hypotheses[i].has_free(x)) {
                return Err(StepFailure::FreeVariableSideCondition {
                    var: x.clone(),
                    hypothesis: script.hypotheses[i].to_string(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_condition;
    use crate::rational::q;

    fn sig() -> Signature {
        Signature::new().with_constant("c").unwrap()
    }

    fn cond(text: &str) -> Condition {
        parse_condition(&sig(), text).unwrap().remove(0)
    }

    fn hyp(id: u64, text: &str) -> Step {
        Step { id, condition: cond(text), justification: Justification::Hyp }
    }

    fn rule(id: u64, text: &str, rule: RuleId, premises: &[u64]) -> Step {
        Step { id, condition: cond(text), justification: Justification::Rule { rule, premises: premises.to_vec() } }
    }

    fn axiom(id: u64, text: &str, n: u8, bindings: Vec<(&str, Binding)>) -> Step {
        Step {
            id,
            condition: cond(text),
            justification: Justification::Axiom {
                axiom: AxiomId::new(n).unwrap(),
                bindings: bindings.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            },
        }
    }

    fn script(hyps: &[&str], steps: Vec<Step>) -> ProofScript {
        ProofScript { signature: sig(), hypotheses: hyps.iter().map(|h| cond(h)).collect(), steps }
    }

    #[test]
    fn a15_one_liner() {
        let s = script(&[], vec![axiom(1, "int x. 1 <= 1", 15, vec![("x", Binding::Var("x".into()))])]);
        let v = check_proof(&s);
        assert!(v.accepted, "{v:?}");
    }

    #[test]
    fn transitivity_and_scaling() {
        let s = script(
            &["d(x,y) <= 1/2", "1/2 <= d(x,c)"],
            vec![
                hyp(1, "d(x,y) <= 1/2"),
                hyp(2, "1/2 <= d(x,c)"),
                rule(3, "d(x,y) <= d(x,c)", RuleId::R1, &[1, 2]),
                rule(4, "2 * d(x,y) <= 2 * d(x,c)", RuleId::R3, &[3]),
                rule(5, "2 * d(x,y) + 1 <= 2 * d(x,c) + 1", RuleId::R2, &[4]),
            ],
        );
        let v = check_proof(&s);
        assert!(v.accepted, "{v:?}");
    }

    #[test]
    fn r3_with_explicit_nonnegativity_premise() {
        let s = script(
            &["d(x,y) <= d(y,c)"],
            vec![
                axiom(1, "0 <= 3/2", 1, vec![("r", Binding::Rational(q(0, 1))), ("s", Binding::Rational(q(3, 2)))]),
                hyp(2, "d(x,y) <= d(y,c)"),
                rule(3, "3/2 * d(x,y) <= 3/2 * d(y,c)", RuleId::R3, &[1, 2]),
            ],
        );
        assert!(check_proof(&s).accepted);
        let bad = script(
            &["d(x,y) <= d(y,c)"],
            vec![hyp(1, "d(x,y) <= d(y,c)"), rule(2, "-1 * d(x,y) <= -1 * d(y,c)", RuleId::R3, &[1])],
        );
        let v = check_proof(&bad);
        assert_eq!(v.first_failure.unwrap().failure.name(), "NegativeScalar");
    }

    #[test]
    fn free_variable_side_condition() {
        let s = script(
            &["d(x,c) <= 1/2"],
            vec![hyp(1, "d(x,c) <= 1/2"), rule(2, "sup x. d(x,c) <= sup x. 1/2", RuleId::R4, &[1])],
        );
        let v = check_proof(&s);
        assert!(!v.accepted);
        assert_eq!(v.first_failure.unwrap().failure.name(), "FreeVariableSideCondition");

        // x is free in an unused hypothesis only: still accepted
        let ok = script(
            &["d(y,c) <= 1/2", "d(x,c) <= 0"],
            vec![hyp(1, "d(y,c) <= 1/2"), rule(2, "int x. d(y,c) <= int x. 1/2", RuleId::R5, &[1])],
        );
        assert!(check_proof(&ok).accepted);
    }

    #[test]
    fn quantifier_rules_accept_renamed_binders() {
        let vacuous_binder = script(
            &["d(x,c) <= 1"],
            vec![hyp(1, "d(x,c) <= 1"), rule(2, "int z. d(x,c) <= int z. 1", RuleId::R5, &[1])],
        );
        assert!(check_proof(&vacuous_binder).accepted);
        // `int z. d(z,c)` is `int x. d(x,c)` renamed, so `x` is still the
        // generalized variable.
        let renamed = script(
            &["d(x,c) <= 1"],
            vec![hyp(1, "d(x,c) <= 1"), rule(2, "int z. d(z,c) <= int z. 1", RuleId::R5, &[1])],
        );
        let v = check_proof(&renamed);
        assert_eq!(v.first_failure.unwrap().failure.name(), "FreeVariableSideCondition");
        let closed = script(
            &["0 <= 1"],
            vec![
                hyp(1, "0 <= 1"),
                rule(2, "0 + d(x,c) <= 1 + d(x,c)", RuleId::R2, &[1]),
                rule(3, "int z. (0 + d(z,c)) <= int z. (1 + d(z,c))", RuleId::R5, &[2]),
            ],
        );
        let v = check_proof(&closed);
        assert!(v.accepted, "{:?}", v.first_failure);
    }

    #[test]
    fn structural_failures() {
        let s = script(&[], vec![rule(1, "1 <= 1", RuleId::R1, &[7])]);
        assert_eq!(check_proof(&s).first_failure.unwrap().failure, StepFailure::DanglingPremise { premise: 7 });
        let s = script(&["1 <= 1"], vec![hyp(1, "1 <= 1"), hyp(1, "1 <= 1")]);
        assert_eq!(check_proof(&s).first_failure.unwrap().failure, StepFailure::DuplicateStepId);
        let s = script(&[], vec![hyp(1, "1 <= 1")]);
        assert_eq!(check_proof(&s).first_failure.unwrap().failure, StepFailure::NotInHypotheses);
        let v = check_proof(&script(&[], vec![]));
        assert!(!v.accepted);
        let s = script(
            &["1 <= 1"],
            vec![hyp(1, "1 <= 1"), rule(2, "d(x,y) + 1 <= 1 + 1", RuleId::R2, &[1])],
        );
        assert_eq!(check_proof(&s).first_failure.unwrap().failure.name(), "RuleMismatch");
    }

    #[test]
    fn failures_propagate() {
        let s = script(&[], vec![hyp(1, "1 <= 0"), rule(2, "1 + 1 <= 0 + 1", RuleId::R2, &[1])]);
        let v = check_proof(&s);
        assert_eq!(v.steps[1].failure, Some(StepFailure::PremiseFailed { premise: 1 }));
    }

    #[test]
    fn alpha_equivalent_hypotheses() {
        let s = script(&["sup y. d(x,y) <= 1"], vec![hyp(1, "sup z. d(x,z) <= 1")]);
        assert!(check_proof(&s).accepted);
    }
}
