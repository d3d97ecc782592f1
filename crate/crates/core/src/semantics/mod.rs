//! Finite charged metric structures and exact evaluation of formulas.

mod quotient;
mod structure;
mod table;
mod validate;

pub use quotient::{quotient_structure, Quotient, QuotientError};
pub use structure::{tuple_from_index, tuple_index, DimensionError, FiniteChargedStructure, FunctionTable, RelationTable};
pub use table::TableEvaluator;
pub use validate::{validate_structure, ValidationOptions, Violation};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::rational::Q;
use crate::syntax::{formula_lipschitz_bound, Condition, Formula, Quantifier, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("symbol `{0}` has no interpretation in the structure")]
    MissingInterpretation(String),
}

/// Assignment of points to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment(BTreeMap<String, usize>);

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: &str, point: usize) -> Self {
        self.0.insert(x.to_string(), point);
        self
    }

    pub fn insert(&mut self, x: &str, point: usize) {
        self.0.insert(x.to_string(), point);
    }

    pub fn get(&self, x: &str) -> Option<usize> {
        self.0.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &usize)> {
        self.0.iter()
    }
}

impl<S: AsRef<str>> FromIterator<(S, usize)> for Environment {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Environment(iter.into_iter().map(|(k, v)| (k.as_ref().to_string(), v)).collect())
    }
}

struct Scope<'e, 'f> {
    env: &'e Environment,
    stack: Vec<(&'f str, usize)>,
}

impl<'f> Scope<'_, 'f> {
    fn lookup(&self, x: &str) -> Result<usize, EvalError> {
        self.stack
            .iter()
            .rev()
            .find(|(y, _)| *y == x)
            .map(|&(_, a)| a)
            .or_else(|| self.env.get(x))
            .ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
    }
}

fn term_value(s: &FiniteChargedStructure, t: &Term, scope: &Scope) -> Result<usize, EvalError> {
    match t {
        Term::Var(x) => scope.lookup(x),
        Term::Const(c) => s.constant(c).ok_or_else(|| EvalError::MissingInterpretation(c.clone())),
        Term::App(f, args) => {
            let vals = args.iter().map(|a| term_value(s, a, scope)).collect::<Result<Vec<_>, _>>()?;
            s.apply(f, &vals).ok_or_else(|| EvalError::MissingInterpretation(f.clone()))
        }
    }
}

pub fn eval_term(s: &FiniteChargedStructure, t: &Term, env: &Environment) -> Result<usize, EvalError> {
    term_value(s, t, &Scope { env, stack: Vec::new() })
}

fn value<'f>(s: &FiniteChargedStructure, phi: &'f Formula, scope: &mut Scope<'_, 'f>) -> Result<Q, EvalError> {
    match phi {
        Formula::One => Ok(Q::one()),
        Formula::Rel(r, args) => {
            let vals = args.iter().map(|a| term_value(s, a, scope)).collect::<Result<Vec<_>, _>>()?;
            s.relate(r, &vals).cloned().ok_or_else(|| EvalError::MissingInterpretation(r.clone()))
        }
        Formula::Dist(a, b) => {
            let (a, b) = (term_value(s, a, scope)?, term_value(s, b, scope)?);
            Ok(s.dist(a, b).clone())
        }
        Formula::Add(a, b) => Ok(value(s, a, scope)? + value(s, b, scope)?),
        Formula::Scale(r, a) => Ok(r * &value(s, a, scope)?),
        Formula::Quant(q, y, body) => {
            let mut acc: Option<Q> = None;
            for b in 0..s.len() {
                scope.stack.push((y.as_str(), b));
                let v = value(s, body, scope);
                scope.stack.pop();
                let v = v?;
                acc = Some(match (q, acc) {
                    (Quantifier::Int, acc) => acc.unwrap_or_default() + s.charge(b) * &v,
                    (_, None) => v,
                    (Quantifier::Inf, Some(m)) => m.min(v),
                    (Quantifier::Sup, Some(m)) => m.max(v),
                });
            }
            Ok(acc.unwrap_or_default())
        }
    }
}

/// Value of `phi` at `env`: `inf`/`sup` range over all points and `int y`
/// sums `μ(b)·φ(…, b)` over all points `b`.
pub fn eval_formula(s: &FiniteChargedStructure, phi: &Formula, env: &Environment) -> Result<Q, EvalError> {
    value(s, phi, &mut Scope { env, stack: Vec::new() })
}

/// Floating-point evaluation for large grid demos. Not used for any exact
/// check.
pub fn eval_formula_approx(s: &FiniteChargedStructure, phi: &Formula, env: &Environment) -> Result<f64, EvalError> {
    fn go<'f>(s: &FiniteChargedStructure, phi: &'f Formula, scope: &mut Scope<'_, 'f>) -> Result<f64, EvalError> {
        match phi {
            Formula::One => Ok(1.0),
            Formula::Rel(..) | Formula::Dist(..) => value(s, phi, scope).map(|v| v.to_f64()),
            Formula::Add(a, b) => Ok(go(s, a, scope)? + go(s, b, scope)?),
            Formula::Scale(r, a) => Ok(r.to_f64() * go(s, a, scope)?),
            Formula::Quant(q, y, body) => {
                let mut acc = match q {
                    Quantifier::Inf => f64::INFINITY,
                    Quantifier::Sup => f64::NEG_INFINITY,
                    Quantifier::Int => 0.0,
                };
                for b in 0..s.len() {
                    scope.stack.push((y.as_str(), b));
                    let v = go(s, body, scope);
                    scope.stack.pop();
                    let v = v?;
                    acc = match q {
                        Quantifier::Inf => acc.min(v),
                        Quantifier::Sup => acc.max(v),
                        Quantifier::Int => acc + s.charge(b).to_f64() * v,
                    };
                }
                Ok(acc)
            }
        }
    }
    go(s, phi, &mut Scope { env, stack: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub formula: String,
    pub value: Q,
}

/// A formula value together with its syntactic Lipschitz constant and bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueReport {
    pub formula: String,
    pub value: Q,
    pub lipschitz: Q,
    pub bound: Q,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
}

/// Evaluates `phi` and, when `trace` is set, every subformula whose free
/// variables are bound by `env`.
pub fn value_report(
    sig: &Signature,
    s: &FiniteChargedStructure,
    phi: &Formula,
    env: &Environment,
    trace: bool,
) -> Result<ValueReport, ValueReportError> {
    let (lipschitz, bound) = formula_lipschitz_bound(sig, phi)?;
    let value = eval_formula(s, phi, env)?;
    let mut entries = Vec::new();
    if trace {
        for sub in phi.subformulas().into_iter().skip(1) {
            if let Ok(v) = eval_formula(s, sub, env) {
                entries.push(TraceEntry { formula: sub.to_string(), value: v });
            }
        }
    }
    Ok(ValueReport { formula: phi.to_string(), value, lipschitz, bound, trace: entries })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValueReportError {
    #[error(transparent)]
    Syntax(#[from] crate::syntax::SyntaxError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Outcome of checking an open condition under every assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// Minimum of `rhs − lhs` over all assignments of the free variables.
    pub margin: Q,
    /// An assignment attaining the margin.
    pub witness: Vec<(String, usize)>,
}

pub fn check_condition(s: &FiniteChargedStructure, cond: &Condition) -> Result<ConditionCheck, EvalError> {
    let vars: Vec<String> = cond.free_vars().into_iter().collect();
    let mut ev = TableEvaluator::new(s, &vars);
    let lhs = ev.table(&cond.lhs)?;
    let rhs = ev.table(&cond.rhs)?;
    let (best, margin) = lhs
        .iter()
        .zip(rhs.iter())
        .map(|(l, r)| r - l)
        .enumerate()
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("structures are nonempty");
    let witness = vars
        .iter()
        .cloned()
        .zip(tuple_from_index(s.len(), vars.len(), best))
        .collect();
    Ok(ConditionCheck { holds: !margin.is_negative(), margin, witness })
}

/// Whether every condition holds under every assignment.
pub fn satisfies(s: &FiniteChargedStructure, theory: &[Condition]) -> Result<bool, EvalError> {
    for c in theory {
        if !check_condition(s, c)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::parser::{parse_condition, parse_formula};
    use crate::rational::q;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn two_point_integral_is_one_half() {
        let m = two_point();
        let phi = Formula::int("y", Formula::dist(v("x"), v("y")));
        for a in 0..2 {
            assert_eq!(eval_formula(&m, &phi, &Environment::new().with("x", a)).unwrap(), q(1, 2));
        }
    }

    #[test]
    fn sup_of_self_distance_is_zero() {
        let phi = Formula::sup("x", Formula::dist(v("x"), v("x")));
        assert_eq!(eval_formula(&two_point(), &phi, &Environment::new()).unwrap(), Q::zero());
        assert_eq!(eval_formula(&grid(5), &phi, &Environment::new()).unwrap(), Q::zero());
    }

    #[test]
    fn grid_approximates_unit_interval() {
        let g = grid(100);
        let phi = Formula::int("y", Formula::dist(v("x"), v("y")));
        let k = 49;
        let x = q(k, 99);
        let exact = &(&x * &x - &x) + &q(1, 2);
        let got = eval_formula(&g, &phi, &Environment::new().with("x", k as usize)).unwrap();
        assert!((&got - &exact).abs() <= q(1, 100), "{got} vs {exact}");
        let approx = eval_formula_approx(&g, &phi, &Environment::new().with("x", k as usize)).unwrap();
        assert!((approx - got.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn term_evaluation() {
        let m = two_point()
            .with_constant("c", 0)
            .unwrap()
            .with_function("F", 1, vec![0, 1])
            .unwrap();
        let env = Environment::new().with("x", 1);
        assert_eq!(eval_term(&m, &v("x"), &env).unwrap(), 1);
        assert_eq!(eval_term(&m, &Term::constant("c"), &env).unwrap(), 0);
        assert_eq!(eval_term(&m, &Term::app("F", vec![Term::constant("c")]), &env).unwrap(), 0);
        assert_eq!(eval_term(&m, &v("z"), &env), Err(EvalError::UnboundVariable("z".into())));
        assert_eq!(
            eval_term(&m, &Term::constant("e"), &env),
            Err(EvalError::MissingInterpretation("e".into()))
        );
    }

    #[test]
    fn condition_examples() {
        let sig = Signature::new();
        let m = two_point();
        let eq = parse_condition(&sig, "int y. d(x,y) = 1/2 * 1").unwrap();
        for c in &eq {
            let r = check_condition(&m, c).unwrap();
            assert_eq!((r.holds, r.margin), (true, Q::zero()));
        }
        let bad = &parse_condition(&sig, "1 <= 0*1").unwrap()[0];
        let r = check_condition(&m, bad).unwrap();
        assert_eq!((r.holds, r.margin), (false, Q::from_integer(-1)));
        let ok = &parse_condition(&sig, "0*1 <= 1").unwrap()[0];
        assert_eq!(check_condition(&m, ok).unwrap().margin, Q::one());
    }

    #[test]
    fn open_conditions_quantify_over_all_assignments() {
        let sig = Signature::new();
        let m = two_point();
        let c = &parse_condition(&sig, "d(x,y) <= 1/2").unwrap()[0];
        let r = check_condition(&m, c).unwrap();
        assert!(!r.holds);
        assert_eq!(r.margin, q(-1, 2));
        let (a, b) = (r.witness[0].1, r.witness[1].1);
        assert_ne!(a, b);
    }

    #[test]
    fn report_and_trace() {
        let sig = Signature::new();
        let phi = parse_formula(&sig, "1 + int y. d(x,y)").unwrap();
        let rep = value_report(&sig, &two_point(), &phi, &Environment::new().with("x", 0), true).unwrap();
        assert_eq!(rep.value, q(3, 2));
        assert_eq!((rep.lipschitz.clone(), rep.bound.clone()), (Q::from_integer(2), Q::from_integer(2)));
        // `d(x,y)` alone is not evaluable at this environment
        assert_eq!(rep.trace.len(), 2);
    }
}
