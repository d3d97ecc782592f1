use super::{Formula, Quantifier, Signature, Term};
use crate::rational::Q;

/// Exhaustive enumeration of formulas by AST depth.
///
/// Atomic formulas are `1`, `d(s,t)` and `R(t̄)` with argument terms drawn
/// from the given variables and the signature's constants. Compound levels
/// use `+` over all ordered pairs, `r·` over the scalar set and the three
/// quantifiers over the given variables.
#[derive(Debug, Clone)]
pub struct FormulaEnumerator {
    atom_terms: Vec<Term>,
    vars: Vec<String>,
    scalars: Vec<Q>,
    relations: Vec<(String, usize)>,
}

impl FormulaEnumerator {
    pub fn new(sig: &Signature, vars: &[&str], scalars: &[Q]) -> Self {
        let mut atom_terms: Vec<Term> = vars.iter().map(|v| Term::var(v)).collect();
        atom_terms.extend(sig.constants().iter().map(|c| Term::constant(c)));
        FormulaEnumerator {
            atom_terms,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            scalars: scalars.to_vec(),
            relations: sig.relations().iter().map(|r| (r.name.clone(), r.arity)).collect(),
        }
    }

    /// The default scalar set `{-1, 0, 1/2, 1}`.
    pub fn default_scalars() -> Vec<Q> {
        vec![Q::from_integer(-1), Q::zero(), Q::new(1, 2), Q::one()]
    }

    fn tuples(&self, arity: usize) -> Vec<Vec<Term>> {
        let mut out = vec![Vec::new()];
        for _ in 0..arity {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    self.atom_terms.iter().map(move |t| {
                        let mut next = prefix.clone();
                        next.push(t.clone());
                        next
                    })
                })
                .collect();
        }
        out
    }

    pub fn atoms(&self) -> Vec<Formula> {
        let mut out = vec![Formula::One];
        for a in &self.atom_terms {
            for b in &self.atom_terms {
                out.push(Formula::dist(a.clone(), b.clone()));
            }
        }
        for (r, arity) in &self.relations {
            for args in self.tuples(*arity) {
                out.push(Formula::Rel(r.clone(), args));
            }
        }
        out
    }

    /// Number of formulas of depth at most `depth`, computed without
    /// materializing them.
    pub fn count_up_to(&self, depth: usize) -> u128 {
        if depth == 0 {
            return 0;
        }
        let atoms = self.atoms().len() as u128;
        let (mut prev_total, mut total, mut newest) = (0u128, atoms, atoms);
        for _ in 2..=depth {
            let adds = total.saturating_mul(total) - prev_total.saturating_mul(prev_total);
            let unary = (self.scalars.len() as u128 + 3 * self.vars.len() as u128).saturating_mul(newest);
            newest = adds.saturating_add(unary);
            prev_total = total;
            total = total.saturating_add(newest);
        }
        total
    }

    /// All formulas of depth at most `depth`, shallow levels first.
    pub fn up_to_depth(&self, depth: usize) -> Vec<Formula> {
        if depth == 0 {
            return Vec::new();
        }
        let mut all = self.atoms();
        let mut level_start = 0;
        for _ in 2..=depth {
            let level_end = all.len();
            let mut next = Vec::new();
            for i in 0..level_end {
                for j in 0..level_end {
                    if i >= level_start || j >= level_start {
                        next.push(Formula::add(all[i].clone(), all[j].clone()));
                    }
                }
            }
            for f in &all[level_start..level_end] {
                for r in &self.scalars {
                    next.push(Formula::scale(r.clone(), f.clone()));
                }
                for q in [Quantifier::Inf, Quantifier::Sup, Quantifier::Int] {
                    for x in &self.vars {
                        next.push(Formula::quant(q, x, f.clone()));
                    }
                }
            }
            level_start = level_end;
            all.extend(next);
        }
        all
    }
}
