use serde::Serialize;

use super::{check_proof, ProofScript, Verdict};
use crate::rational::Q;
use crate::semantics::{check_condition, FiniteChargedStructure};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the script is rejected by the kernel")]
pub struct RejectedScript(pub Verdict);

/// A derived step that fails in a model of the hypotheses. Any instance is a
/// kernel bug.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepViolation {
    pub model: usize,
    pub step: u64,
    pub margin: Q,
    pub witness: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub model: usize,
    /// The model does not satisfy every hypothesis, so it says nothing.
    pub vacuous: bool,
    /// Margin of the conclusion, when the model is not vacuous.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion_margin: Option<Q>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub sound: bool,
    pub models: Vec<ModelReport>,
    pub violations: Vec<StepViolation>,
}

/// Evaluates an accepted script in each model. Models satisfying every
/// hypothesis under all assignments must satisfy every step.
pub fn soundness_probe(script: &ProofScript, models: &[FiniteChargedStructure]) -> Result<SoundnessReport, RejectedScript> {
    let verdict = check_proof(script);
    if !verdict.accepted {
        return Err(RejectedScript(verdict));
    }
    let mut reports = Vec::with_capacity(models.len());
    let mut violations = Vec::new();
    for (i, m) in models.iter().enumerate() {
        let mut report = ModelReport { model: i, vacuous: false, conclusion_margin: None, error: None };
        let gamma: Result<Vec<bool>, _> = script.hypotheses.iter().map(|h| check_condition(m, h).map(|c| c.holds)).collect();
        match gamma {
            Err(e) => report.error = Some(e.to_string()),
            Ok(holds) if holds.iter().any(|h| !h) => report.vacuous = true,
            Ok(_) => {
                for step in &script.steps {
                    match check_condition(m, &step.condition) {
                        Ok(c) => {
                            if c.margin.is_negative() {
                                violations.push(StepViolation {
                                    model: i,
                                    step: step.id,
                                    margin: c.margin.clone(),
                                    witness: c.witness,
                                });
                            }
                            report.conclusion_margin = Some(c.margin);
                        }
                        Err(e) => {
                            report.error = Some(e.to_string());
                            report.conclusion_margin = None;
                            break;
                        }
                    }
                }
            }
        }
        reports.push(report);
    }
    Ok(SoundnessReport { sound: violations.is_empty(), models: reports, violations })
}
