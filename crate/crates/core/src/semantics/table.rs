use std::collections::HashMap;
use std::rc::Rc;

use super::{EvalError, FiniteChargedStructure};
use crate::rational::Q;
use crate::syntax::{Formula, Quantifier, Term};

/// Evaluates formulas simultaneously at every assignment of a fixed variable
/// list, producing a table indexed like [`super::tuple_index`] (first
/// variable most significant).
///
/// Subformula tables are memoized, so evaluating a large family of formulas
/// that share structure costs one table operation per distinct subformula.
pub struct TableEvaluator<'s> {
    s: &'s FiniteChargedStructure,
    vars: Vec<String>,
    strides: Vec<usize>,
    size: usize,
    cache: HashMap<Formula, Rc<[Q]>>,
    cache_depth: Option<usize>,
    children: HashMap<String, TableEvaluator<'s>>,
}

impl<'s> TableEvaluator<'s> {
    pub fn new<S: AsRef<str>>(s: &'s FiniteChargedStructure, vars: &[S]) -> Self {
        let n = s.len();
        let k = vars.len();
        let mut strides = vec![1; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * n;
        }
        TableEvaluator {
            s,
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            strides,
            size: n.pow(k as u32),
            cache: HashMap::new(),
            cache_depth: None,
            children: HashMap::new(),
        }
    }

    /// Only memoize formulas of depth at most `depth`.
    pub fn with_cache_depth(mut self, depth: usize) -> Self {
        self.cache_depth = Some(depth);
        self
    }

    pub fn structure(&self) -> &'s FiniteChargedStructure {
        self.s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of assignments, `n^k`.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
        self.children.clear();
    }

    fn position(&self, x: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == x)
    }

    fn digit(&self, idx: usize, pos: usize) -> usize {
        (idx / self.strides[pos]) % self.s.len()
    }

    fn term_table(&self, t: &Term) -> Result<Vec<usize>, EvalError> {
        match t {
            Term::Var(x) => {
                let pos = self.position(x).ok_or_else(|| EvalError::UnboundVariable(x.clone()))?;
                Ok((0..self.size).map(|i| self.digit(i, pos)).collect())
            }
            Term::Const(c) => {
                let a = self.s.constant(c).ok_or_else(|| EvalError::MissingInterpretation(c.clone()))?;
                Ok(vec![a; self.size])
            }
            Term::App(f, args) => {
                let cols = args.iter().map(|a| self.term_table(a)).collect::<Result<Vec<_>, _>>()?;
                let mut buf = vec![0; args.len()];
                (0..self.size)
                    .map(|i| {
                        for (slot, col) in buf.iter_mut().zip(&cols) {
                            *slot = col[i];
                        }
                        self.s.apply(f, &buf).ok_or_else(|| EvalError::MissingInterpretation(f.clone()))
                    })
                    .collect()
            }
        }
    }

    /// Values of `phi` at every assignment. Every free variable of `phi`
    /// must be among the evaluator's variables.
    pub fn table(&mut self, phi: &Formula) -> Result<Rc<[Q]>, EvalError> {
        if let Some(t) = self.cache.get(phi) {
            return Ok(t.clone());
        }
        let t = self.compute(phi)?;
        if self.cache_depth.is_none_or(|d| phi.depth() <= d) {
            self.cache.insert(phi.clone(), t.clone());
        }
        Ok(t)
    }

    /// Value of `phi` at one assignment, given as points in variable order.
    pub fn value(&mut self, phi: &Formula, tuple: &[usize]) -> Result<Q, EvalError> {
        let idx = super::tuple_index(self.s.len(), tuple);
        Ok(self.table(phi)?[idx].clone())
    }

    fn compute(&mut self, phi: &Formula) -> Result<Rc<[Q]>, EvalError> {
        let n = self.s.len();
        Ok(match phi {
            Formula::One => vec![Q::one(); self.size].into(),
            Formula::Dist(a, b) => {
                let (ta, tb) = (self.term_table(a)?, self.term_table(b)?);
                ta.iter().zip(&tb).map(|(&x, &y)| self.s.dist(x, y).clone()).collect()
            }
            Formula::Rel(r, args) => {
                let cols = args.iter().map(|a| self.term_table(a)).collect::<Result<Vec<_>, _>>()?;
                let mut buf = vec![0; args.len()];
                (0..self.size)
                    .map(|i| {
                        for (slot, col) in buf.iter_mut().zip(&cols) {
                            *slot = col[i];
                        }
                        self.s.relate(r, &buf).cloned().ok_or_else(|| EvalError::MissingInterpretation(r.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?
                    .into()
            }
            Formula::Add(a, b) => {
                let (ta, tb) = (self.table(a)?, self.table(b)?);
                ta.iter().zip(tb.iter()).map(|(x, y)| x + y).collect()
            }
            Formula::Scale(r, a) => {
                let ta = self.table(a)?;
                if r.is_zero() {
                    vec![Q::zero(); self.size].into()
                } else {
                    ta.iter().map(|x| r * x).collect()
                }
            }
            Formula::Quant(q, y, body) => match self.position(y) {
                Some(pos) => {
                    let tb = self.table(body)?;
                    let stride = self.strides[pos];
                    let mut out = Vec::with_capacity(self.size);
                    for i in 0..self.size {
                        let base = i - self.digit(i, pos) * stride;
                        out.push(aggregate(self.s, *q, (0..n).map(|b| &tb[base + b * stride])));
                    }
                    out.into()
                }
                None => {
                    let s = self.s;
                    let depth = self.cache_depth;
                    let mut child_vars = self.vars.clone();
                    child_vars.push(y.clone());
                    let child = self.children.entry(y.clone()).or_insert_with(|| {
                        let mut c = TableEvaluator::new(s, &child_vars);
                        c.cache_depth = depth;
                        c
                    });
                    let tb = child.table(body)?;
                    tb.chunks(n).map(|block| aggregate(s, *q, block.iter())).collect()
                }
            },
        })
    }
}

fn aggregate<'a>(s: &FiniteChargedStructure, q: Quantifier, values: impl Iterator<Item = &'a Q>) -> Q {
    match q {
        Quantifier::Inf => values.min().cloned().unwrap_or_default(),
        Quantifier::Sup => values.max().cloned().unwrap_or_default(),
        Quantifier::Int => values
            .zip(s.charges())
            .filter(|(_, m)| !m.is_zero())
            .map(|(v, m)| m * v)
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::two_point;
    use super::super::{eval_formula, tuple_from_index, Environment};
    use super::*;
    use crate::parser::parse_formula;
    use crate::rational::q;
    use crate::syntax::{FormulaEnumerator, Signature};

    fn three_point() -> FiniteChargedStructure {
        FiniteChargedStructure::numbered(
            vec![
                vec![q(0, 1), q(1, 2), q(1, 1)],
                vec![q(1, 2), q(0, 1), q(1, 1)],
                vec![q(1, 1), q(1, 1), q(0, 1)],
            ],
            vec![q(1, 4), q(3, 4), q(0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn agrees_with_direct_evaluation() {
        let sig = Signature::new();
        for s in [two_point(), three_point()] {
            let formulas = FormulaEnumerator::new(&sig, &["x", "y"], &FormulaEnumerator::default_scalars()).up_to_depth(2);
            let mut ev = TableEvaluator::new(&s, &["x", "y"]);
            for phi in &formulas {
                let t = ev.table(phi).unwrap();
                for (i, v) in t.iter().enumerate() {
                    let tup = tuple_from_index(s.len(), 2, i);
                    let env = Environment::new().with("x", tup[0]).with("y", tup[1]);
                    assert_eq!(v, &eval_formula(&s, phi, &env).unwrap(), "{phi}");
                }
            }
        }
    }

    #[test]
    fn quantifiers_over_fresh_variables() {
        let sig = Signature::new();
        let s = three_point();
        let phi = parse_formula(&sig, "int z. sup w. d(x,z) + d(z,w)").unwrap();
        let mut ev = TableEvaluator::new(&s, &["x"]).with_cache_depth(1);
        for a in 0..3 {
            assert_eq!(
                ev.value(&phi, &[a]).unwrap(),
                eval_formula(&s, &phi, &Environment::new().with("x", a)).unwrap()
            );
        }
    }

    #[test]
    fn unbound_variables_are_reported() {
        let s = two_point();
        let mut ev = TableEvaluator::new(&s, &["x"]);
        let phi = Formula::dist(Term::var("x"), Term::var("y"));
        assert_eq!(ev.table(&phi).unwrap_err(), EvalError::UnboundVariable("y".into()));
    }
}
