//! Mixture solving over finite model families and the type-functional
//! toolkit on finite structures.

pub mod lp;
mod types;

pub use lp::{find_mixture, LpMethod};
pub use types::{
    automorphisms, bounded_elementary_check, check_fubini, iterated_charge, plus_map, realized_type, type_classes,
    type_distance, ElementaryError, ElementaryReport, ElementaryViolation, FamilyMiss, FubiniCase, FubiniReport,
    RealizedType, TypeClasses, TypeDistance, TypeLawReport,
};

use serde::Serialize;

use crate::rational::Q;
use crate::semantics::{check_condition, eval_formula, Environment, EvalError, FiniteChargedStructure};
use crate::syntax::{Condition, Signature};
use crate::ultramean::{build_ultramean, UltrachargeSpace, UltrameanError};

/// Sentence conditions evaluated in each model of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixtureProblem {
    /// `gaps[i][j] = ψᵢ^{Mⱼ} − φᵢ^{Mⱼ}` for condition `φᵢ ≤ ψᵢ`.
    pub gaps: Vec<Vec<Q>>,
}

impl MixtureProblem {
    pub fn new(models: &[FiniteChargedStructure], theory: &[Condition]) -> Result<Self, MixtureError> {
        if models.is_empty() {
            return Err(MixtureError::NoModels);
        }
        if let Some(index) = theory.iter().position(|c| !c.is_closed()) {
            return Err(MixtureError::OpenCondition { index });
        }
        let env = Environment::new();
        let gaps = theory
            .iter()
            .map(|c| {
                models
                    .iter()
                    .map(|m| Ok(&eval_formula(m, &c.rhs, &env)? - &eval_formula(m, &c.lhs, &env)?))
                    .collect::<Result<Vec<Q>, EvalError>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(MixtureProblem { gaps })
    }

    /// `Σⱼ wⱼ·gaps[i][j]` for every condition.
    pub fn margins(&self, w: &[Q]) -> Vec<Q> {
        self.gaps.iter().map(|row| row.iter().zip(w).map(|(g, x)| g * x).sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MixtureError {
    #[error("the model family is empty")]
    NoModels,
    #[error("condition {index} has free variables")]
    OpenCondition { index: usize },
    #[error("no mixture of these {models} models satisfies the theory (relative to this family only)")]
    Infeasible { models: usize },
    #[error("the ultramean violates condition {index} with margin {margin}")]
    VerificationFailed { index: usize, margin: Q },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ultramean(#[from] UltrameanError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixtureSolution {
    pub weights: Vec<Q>,
    pub method: LpMethod,
    /// Margins `ψ − φ` of each condition in the ultramean.
    pub margins: Vec<Q>,
}

/// Finds weights `w` whose ultramean of `models` satisfies the sentence
/// theory, and verifies that by evaluating the theory in the ultramean.
/// The uniform mixture is returned when it works.
pub fn solve_mixture(
    sig: &Signature,
    models: &[FiniteChargedStructure],
    theory: &[Condition],
    cap: usize,
) -> Result<MixtureSolution, MixtureError> {
    let problem = MixtureProblem::new(models, theory)?;
    let method = lp::default_method(theory.len());
    solve_problem(sig, models, theory, &problem, method, cap)
}

pub fn solve_mixture_with(
    sig: &Signature,
    models: &[FiniteChargedStructure],
    theory: &[Condition],
    method: LpMethod,
    cap: usize,
) -> Result<MixtureSolution, MixtureError> {
    let problem = MixtureProblem::new(models, theory)?;
    solve_problem(sig, models, theory, &problem, method, cap)
}

fn solve_problem(
    sig: &Signature,
    models: &[FiniteChargedStructure],
    theory: &[Condition],
    problem: &MixtureProblem,
    method: LpMethod,
    cap: usize,
) -> Result<MixtureSolution, MixtureError> {
    let uniform = UltrachargeSpace::uniform(models.len()).weights().to_vec();
    let weights = if problem.margins(&uniform).iter().all(|m| !m.is_negative()) {
        uniform
    } else {
        let rows: Vec<Vec<Q>> = problem.gaps.iter().map(|r| r.iter().map(|g| -g).collect()).collect();
        lp::find_mixture(&rows, models.len(), method).ok_or(MixtureError::Infeasible { models: models.len() })?
    };
    let ws = UltrachargeSpace::new(weights.clone())?;
    let u = build_ultramean(sig, &ws, models, cap)?;
    let mut margins = Vec::with_capacity(theory.len());
    for (index, c) in theory.iter().enumerate() {
        let margin = check_condition(&u.structure, c)?.margin;
        if margin.is_negative() {
            return Err(MixtureError::VerificationFailed { index, margin });
        }
        margins.push(margin);
    }
    Ok(MixtureSolution { weights, method, margins })
}
