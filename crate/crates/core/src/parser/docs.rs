use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{parse_condition_at, parse_formula, parse_term, ParseError, SourceSpan};
use crate::proof::{AxiomId, Binding, BindingKind, Bindings, Justification, ProofScript, RuleId, Step};
use crate::rational::Q;
use crate::semantics::FiniteChargedStructure;
use crate::syntax::{Signature, SignatureDoc, Term};

pub(crate) fn json_error(e: serde_json::Error) -> ParseError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => ParseError::Syntax {
            span: SourceSpan::new("<json>", e.line(), e.column()),
            message: e.to_string(),
        },
        Category::Data | Category::Io => ParseError::Schema(e.to_string()),
    }
}

/// A point label: written as a JSON number or string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelDoc {
    Index(u64),
    Name(String),
}

/// Serialized structure (`.alstr`). Function and relation tables are flat
/// row-major lists over argument tuples, first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<SignatureDoc>,
    pub points: Vec<LabelDoc>,
    pub metric: Vec<Vec<Q>>,
    pub charge: Vec<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<Q>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, Vec<Q>>,
}

fn structure_from_doc(sig: &Signature, doc: StructureDoc) -> Result<FiniteChargedStructure, ParseError> {
    let dim = |e: crate::semantics::DimensionError| ParseError::DimensionMismatch(e.0);
    let labels = doc
        .points
        .into_iter()
        .map(|p| match p {
            LabelDoc::Index(i) => i.to_string(),
            LabelDoc::Name(s) => s,
        })
        .collect::<Vec<_>>();
    let mut seen = HashSet::new();
    if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
        return Err(ParseError::Schema(format!("point label `{dup}` is used twice")));
    }
    let mut s = FiniteChargedStructure::new(labels, doc.metric, doc.charge).map_err(dim)?;
    if let Some(mass) = doc.mass {
        s = s.with_mass(mass);
    }
    for c in sig.constants() {
        let &point = doc.constants.get(c).ok_or_else(|| ParseError::Schema(format!("constant `{c}` is not interpreted")))?;
        s = s.with_constant(c, point).map_err(dim)?;
    }
    for f in sig.functions() {
        let values = doc
            .functions
            .get(&f.name)
            .ok_or_else(|| ParseError::Schema(format!("function `{}` is not interpreted", f.name)))?;
        s = s.with_function(&f.name, f.arity, values.clone()).map_err(dim)?;
    }
    for r in sig.relations() {
        let values = doc
            .relations
            .get(&r.name)
            .ok_or_else(|| ParseError::Schema(format!("relation `{}` is not interpreted", r.name)))?;
        s = s.with_relation(&r.name, r.arity, values.clone()).map_err(dim)?;
    }
    let extra = doc
        .constants
        .keys()
        .filter(|c| !sig.is_constant(c))
        .chain(doc.functions.keys().filter(|f| sig.function(f).is_err()))
        .chain(doc.relations.keys().filter(|r| sig.relation(r).is_err()))
        .next();
    if let Some(name) = extra {
        return Err(ParseError::Schema(format!("`{name}` is interpreted but not declared in the signature")));
    }
    Ok(s)
}

/// Parses an unvalidated structure over `sig`. An embedded `signature`
/// field, if present, must equal `sig`.
pub fn parse_structure(sig: &Signature, text: &str) -> Result<FiniteChargedStructure, ParseError> {
    let doc: StructureDoc = serde_json::from_str(text).map_err(json_error)?;
    if let Some(embedded) = &doc.signature {
        if Signature::from_doc(embedded.clone())? != *sig {
            return Err(ParseError::Schema("embedded signature differs from the given one".into()));
        }
    }
    structure_from_doc(sig, doc)
}

/// Parses a structure over its embedded signature (empty if absent).
pub fn parse_structure_with_signature(text: &str) -> Result<(Signature, FiniteChargedStructure), ParseError> {
    let doc: StructureDoc = serde_json::from_str(text).map_err(json_error)?;
    let sig = Signature::from_doc(doc.signature.clone().unwrap_or_default())?;
    let s = structure_from_doc(&sig, doc)?;
    Ok((sig, s))
}

pub fn structure_to_doc(sig: Option<&Signature>, s: &FiniteChargedStructure) -> StructureDoc {
    let total: Q = s.charges().iter().sum();
    StructureDoc {
        signature: sig.filter(|g| !g.is_empty()).map(Signature::to_doc),
        points: s
            .labels()
            .iter()
            .map(|l| match l.parse::<u64>() {
                Ok(i) if i.to_string() == *l => LabelDoc::Index(i),
                _ => LabelDoc::Name(l.clone()),
            })
            .collect(),
        metric: s.metric_rows(),
        charge: s.charges().to_vec(),
        mass: (s.mass() != &total).then(|| s.mass().clone()),
        constants: s.constants().clone(),
        functions: s.functions().iter().map(|(k, t)| (k.clone(), t.values.clone())).collect(),
        relations: s.relations().iter().map(|(k, t)| (k.clone(), t.values.clone())).collect(),
    }
}

/// Pretty-printed JSON for a structure; deterministic.
pub fn structure_to_json(sig: Option<&Signature>, s: &FiniteChargedStructure) -> String {
    let mut out = serde_json::to_string_pretty(&structure_to_doc(sig, s)).expect("structure docs serialize");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BindingDoc {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomDoc {
    pub axiom: String,
    #[serde(default)]
    pub bindings: BTreeMap<String, BindingDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub rule: String,
    pub premises: Vec<u64>,
}

/// `"hyp"`, `{"axiom": .., "bindings": {..}}` or `{"rule": .., "premises": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JustificationDoc {
    Keyword(String),
    Axiom(AxiomDoc),
    Rule(RuleDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub id: u64,
    pub condition: String,
    pub justification: JustificationDoc,
}

/// Serialized proof script (`.alpf`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<SignatureDoc>,
    #[serde(default)]
    pub hypotheses: Vec<String>,
    pub steps: Vec<StepDoc>,
}

fn parse_binding(sig: &Signature, step: u64, name: &str, kind: BindingKind, doc: &BindingDoc) -> Result<Binding, ParseError> {
    let malformed = |message: String| ParseError::MalformedBindings { step, message: format!("`{name}`: {message}") };
    let ctx = |e: ParseError| malformed(e.to_string());
    let one = |doc: &BindingDoc| match doc {
        BindingDoc::One(s) => Ok(s.clone()),
        BindingDoc::Many(_) => Err(malformed(format!("expected a single {kind}"))),
    };
    Ok(match kind {
        BindingKind::Formula => Binding::Formula(parse_formula(sig, &one(doc)?).map_err(ctx)?),
        BindingKind::Term => Binding::Term(parse_term(sig, &one(doc)?).map_err(ctx)?),
        BindingKind::Var => match parse_term(sig, &one(doc)?).map_err(ctx)? {
            Term::Var(x) => Binding::Var(x),
            other => return Err(malformed(format!("`{other}` is not a variable"))),
        },
        BindingKind::Rational => {
            let text = one(doc)?;
            Binding::Rational(text.parse::<Q>().map_err(|e| malformed(e.to_string()))?)
        }
        BindingKind::Symbol => Binding::Symbol(one(doc)?.trim().to_string()),
        BindingKind::Terms => {
            let texts = match doc {
                BindingDoc::One(s) => vec![s.clone()],
                BindingDoc::Many(v) => v.clone(),
            };
            Binding::Terms(texts.iter().map(|t| parse_term(sig, t).map_err(ctx)).collect::<Result<_, _>>()?)
        }
    })
}

fn proof_from_doc(sig: Signature, doc: ProofDoc) -> Result<ProofScript, ParseError> {
    let mut hypotheses = Vec::new();
    for (i, h) in doc.hypotheses.iter().enumerate() {
        hypotheses.extend(parse_condition_at(&sig, h, &format!("hypothesis {}", i + 1), 1)?);
    }
    let mut earlier = HashSet::new();
    let mut steps = Vec::with_capacity(doc.steps.len());
    for s in doc.steps {
        let file = format!("step {}", s.id);
        let mut conds = parse_condition_at(&sig, &s.condition, &file, 1)?;
        if conds.len() != 1 {
            return Err(ParseError::Schema(format!("step {}: a step proves a single inequality", s.id)));
        }
        let condition = conds.remove(0);
        let justification = match s.justification {
            JustificationDoc::Keyword(k) if k == "hyp" => Justification::Hyp,
            JustificationDoc::Keyword(k) => {
                return Err(ParseError::Schema(format!("step {}: unknown justification `{k}`", s.id)))
            }
            JustificationDoc::Axiom(a) => {
                let axiom: AxiomId = a
                    .axiom
                    .parse()
                    .map_err(|_| ParseError::UnknownAxiomName { step: s.id, name: a.axiom.clone() })?;
                let mut bindings = Bindings::new();
                for (name, kind) in axiom.metavariables() {
                    let value = a.bindings.get(*name).ok_or_else(|| ParseError::MalformedBindings {
                        step: s.id,
                        message: format!("{axiom} needs `{name}`"),
                    })?;
                    bindings.insert(name.to_string(), parse_binding(&sig, s.id, name, *kind, value)?);
                }
                if let Some(extra) = a.bindings.keys().find(|k| axiom.kind_of(k).is_none()) {
                    return Err(ParseError::MalformedBindings {
                        step: s.id,
                        message: format!("{axiom} has no metavariable `{extra}`"),
                    });
                }
                Justification::Axiom { axiom, bindings }
            }
            JustificationDoc::Rule(r) => {
                let rule: RuleId =
                    r.rule.parse().map_err(|name| ParseError::UnknownRuleName { step: s.id, name })?;
                if let Some(&premise) = r.premises.iter().find(|p| !earlier.contains(*p)) {
                    return Err(ParseError::DanglingPremiseId { step: s.id, premise });
                }
                Justification::Rule { rule, premises: r.premises }
            }
        };
        earlier.insert(s.id);
        steps.push(Step { id: s.id, condition, justification });
    }
    Ok(ProofScript { signature: sig, hypotheses, steps })
}

/// Parses a proof script over `sig`. Premises must cite earlier steps.
pub fn parse_proof(sig: &Signature, text: &str) -> Result<ProofScript, ParseError> {
    let doc: ProofDoc = serde_json::from_str(text).map_err(json_error)?;
    if let Some(embedded) = &doc.signature {
        if Signature::from_doc(embedded.clone())? != *sig {
            return Err(ParseError::Schema("embedded signature differs from the given one".into()));
        }
    }
    proof_from_doc(sig.clone(), doc)
}

/// Parses a proof script over its embedded signature (empty if absent).
pub fn parse_proof_with_signature(text: &str) -> Result<ProofScript, ParseError> {
    let doc: ProofDoc = serde_json::from_str(text).map_err(json_error)?;
    let sig = Signature::from_doc(doc.signature.clone().unwrap_or_default())?;
    proof_from_doc(sig, doc)
}

fn binding_to_doc(b: &Binding) -> BindingDoc {
    match b {
        Binding::Terms(ts) => BindingDoc::Many(ts.iter().map(|t| t.to_string()).collect()),
        other => BindingDoc::One(other.to_string()),
    }
}

pub fn proof_to_doc(script: &ProofScript) -> ProofDoc {
    ProofDoc {
        signature: (!script.signature.is_empty()).then(|| script.signature.to_doc()),
        hypotheses: script.hypotheses.iter().map(|h| h.to_string()).collect(),
        steps: script
            .steps
            .iter()
            .map(|s| StepDoc {
                id: s.id,
                condition: s.condition.to_string(),
                justification: match &s.justification {
                    Justification::Hyp => JustificationDoc::Keyword("hyp".into()),
                    Justification::Axiom { axiom, bindings } => JustificationDoc::Axiom(AxiomDoc {
                        axiom: axiom.to_string(),
                        bindings: bindings.iter().map(|(k, v)| (k.clone(), binding_to_doc(v))).collect(),
                    }),
                    Justification::Rule { rule, premises } => {
                        JustificationDoc::Rule(RuleDoc { rule: rule.to_string(), premises: premises.clone() })
                    }
                },
            })
            .collect(),
    }
}

pub fn proof_to_json(script: &ProofScript) -> String {
    let mut out = serde_json::to_string_pretty(&proof_to_doc(script)).expect("proof docs serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_proof;
    use crate::rational::q;

    const TWO_POINT: &str = r#"{"points": [0, 1], "metric": [["0", "1"], ["1", "0"]], "charge": ["1/2", "1/2"]}"#;

    #[test]
    fn two_point_structure() {
        let s = parse_structure(&Signature::new(), TWO_POINT).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.charge(1), &q(1, 2));
        assert_eq!(s.dist(0, 1), &Q::one());
        let again = parse_structure(&Signature::new(), &structure_to_json(None, &s)).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn structure_errors() {
        let sig = Signature::new();
        let short = r#"{"points": [0, 1], "metric": [["0", "1"], ["1", "0"]], "charge": ["1/2"]}"#;
        assert!(matches!(parse_structure(&sig, short), Err(ParseError::DimensionMismatch(_))));
        let asym = r#"{"points": [0, 1], "metric": [["0", "1"], ["2", "0"]], "charge": ["1/2", "1/2"]}"#;
        assert!(parse_structure(&sig, asym).is_ok());
        let extra = r#"{"points": [0], "metric": [["0"]], "charge": ["1"], "colour": 3}"#;
        assert!(matches!(parse_structure(&sig, extra), Err(ParseError::Schema(_))));
        let undeclared = r#"{"points": [0], "metric": [["0"]], "charge": ["1"], "constants": {"c": 0}}"#;
        assert!(matches!(parse_structure(&sig, undeclared), Err(ParseError::Schema(_))));
        assert!(matches!(parse_structure(&sig, "{"), Err(ParseError::Syntax { .. })));
        let float = r#"{"points": [0], "metric": [[0.0]], "charge": ["1"]}"#;
        assert!(matches!(parse_structure(&sig, float), Err(ParseError::Schema(_))));
    }

    #[test]
    fn structure_with_symbols() {
        let text = r#"{
            "signature": {"constants": ["c"], "functions": [{"name": "F", "arity": 1, "lipschitz": "1"}],
                          "relations": [{"name": "R", "arity": 2, "lipschitz": "1"}]},
            "points": ["a", "b"],
            "metric": [["0", "1/2"], ["1/2", "0"]],
            "charge": ["1/3", "2/3"],
            "constants": {"c": 1},
            "functions": {"F": [1, 0]},
            "relations": {"R": ["0", "1/4", "1/4", "0"]}
        }"#;
        let (sig, s) = parse_structure_with_signature(text).unwrap();
        assert_eq!(s.constant("c"), Some(1));
        assert_eq!(s.relate("R", &[0, 1]), Some(&q(1, 4)));
        let round = parse_structure(&sig, &structure_to_json(Some(&sig), &s)).unwrap();
        assert_eq!(round, s);
        let bad = text.replace("\"F\": [1, 0]", "\"F\": [1]");
        assert!(matches!(parse_structure_with_signature(&bad), Err(ParseError::DimensionMismatch(_))));
    }

    const A15: &str = r#"{"steps": [{"id": 1, "condition": "int x. 1 <= 1",
        "justification": {"axiom": "A15", "bindings": {"x": "x"}}}]}"#;

    #[test]
    fn proofs() {
        let p = parse_proof_with_signature(A15).unwrap();
        assert_eq!(p.steps.len(), 1);
        assert!(check_proof(&p).accepted);
        assert_eq!(parse_proof_with_signature(&proof_to_json(&p)).unwrap(), p);

        let three = r#"{"hypotheses": ["d(x,y) <= 1/2", "1/2 <= d(y,z)"], "steps": [
            {"id": 1, "condition": "d(x,y) <= 1/2", "justification": "hyp"},
            {"id": 2, "condition": "1/2 <= d(y,z)", "justification": "hyp"},
            {"id": 3, "condition": "d(x,y) <= d(y,z)", "justification": {"rule": "R1", "premises": [1, 2]}}]}"#;
        let p = parse_proof_with_signature(three).unwrap();
        assert_eq!(p.steps.len(), 3);
        assert!(check_proof(&p).accepted);
    }

    #[test]
    fn proof_errors() {
        let dangling = r#"{"steps": [{"id": 1, "condition": "1 <= 1", "justification": {"rule": "R1", "premises": [99]}}]}"#;
        assert_eq!(
            parse_proof_with_signature(dangling).unwrap_err(),
            ParseError::DanglingPremiseId { step: 1, premise: 99 }
        );
        let unknown = A15.replace("A15", "A99");
        assert!(matches!(parse_proof_with_signature(&unknown), Err(ParseError::UnknownAxiomName { .. })));
        let missing = A15.replace(r#""x": "x""#, "");
        assert!(matches!(parse_proof_with_signature(&missing), Err(ParseError::MalformedBindings { .. })));
        let eq = A15.replace("<=", "=");
        assert!(matches!(parse_proof_with_signature(&eq), Err(ParseError::Schema(_))));
        let bad_rule = dangling.replace("R1", "R9");
        assert!(matches!(parse_proof_with_signature(&bad_rule), Err(ParseError::UnknownRuleName { .. })));
        let syntax = A15.replace("int x. 1 <= 1", "d(x,y) <");
        assert!(matches!(parse_proof_with_signature(&syntax), Err(ParseError::Syntax { .. })));
    }
}
