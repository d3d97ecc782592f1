//! Seeded generators for structures, formulas and accepted proof scripts.
//!
//! Every structure produced satisfies the structural axioms for
//! [`Generator::signature`] with total mass 1.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::proof::{axiom_instances, check_proof, AxiomId, Binding, Bindings, Justification, ProofScript, RuleId, Step};
use crate::rational::{q, Q};
use crate::semantics::{tuple_from_index, FiniteChargedStructure};
use crate::syntax::{Condition, Formula, Quantifier, Signature, Term};

pub struct Generator {
    rng: ChaCha8Rng,
    sig: Signature,
    vars: Vec<String>,
}

/// Constant `c`, unary function `f` and unary relation `P`, all 1-Lipschitz.
pub fn default_signature() -> Signature {
    Signature::new()
        .with_constant("c")
        .and_then(|s| s.with_function("f", 1, Q::one()))
        .and_then(|s| s.with_relation("P", 1, Q::one()))
        .expect("fixed signature is well formed")
}

const SCALARS: [(i64, i64); 6] = [(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1)];

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator::with_signature(seed, default_signature())
    }

    /// Function symbols must have Lipschitz constant at least 1 and relation
    /// symbols at least 1 as well; interpretations are projections,
    /// constants and distance profiles.
    pub fn with_signature(seed: u64, sig: Signature) -> Self {
        assert!(
            sig.functions().iter().all(|f| f.lipschitz >= Q::one())
                && sig.relations().iter().all(|r| r.lipschitz >= Q::one()),
            "generated interpretations need Lipschitz constants of at least 1"
        );
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), sig, vars: vec!["x".into(), "y".into(), "z".into()] }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn scalar(&mut self) -> Q {
        let &(n, d) = SCALARS.choose(&mut self.rng).expect("nonempty");
        q(n, d)
    }

    /// A structure with between 1 and `max_points` points.
    pub fn structure(&mut self, max_points: usize) -> FiniteChargedStructure {
        let n = self.rng.gen_range(1..=max_points.max(1));
        let metric = self.metric(n);
        let mut weights: Vec<i64> = (0..n).map(|_| self.rng.gen_range(0..=3)).collect();
        if weights.iter().all(|&w| w == 0) {
            weights[self.rng.gen_range(0..n)] = 1;
        }
        let total: i64 = weights.iter().sum();
        let charge = weights.iter().map(|&w| q(w, total)).collect();
        let mut s = FiniteChargedStructure::numbered(metric, charge).expect("square metric");
        for c in self.sig.constants().to_vec() {
            s = s.with_constant(&c, self.rng.gen_range(0..n)).expect("in range");
        }
        for f in self.sig.functions().to_vec() {
            let values = self.function_table(n, f.arity);
            s = s.with_function(&f.name, f.arity, values).expect("sized table");
        }
        for r in self.sig.relations().to_vec() {
            let values = self.relation_table(&s, r.arity);
            s = s.with_relation(&r.name, r.arity, values).expect("sized table");
        }
        s
    }

    /// Either points on a line with quarter spacing (distinct positions) or
    /// distances drawn from `[1/2, 1]`, which always satisfy the triangle
    /// inequality.
    fn metric(&mut self, n: usize) -> Vec<Vec<Q>> {
        if self.rng.gen_bool(0.5) {
            let mut slots: Vec<i64> = (0..=4).collect();
            slots.shuffle(&mut self.rng);
            let pos: Vec<i64> = if n <= 5 { slots[..n].to_vec() } else { (0..n as i64).collect() };
            let scale = pos.iter().max().copied().unwrap_or(0).max(4);
            (0..n).map(|i| (0..n).map(|j| q((pos[i] - pos[j]).abs(), scale)).collect()).collect()
        } else {
            let mut m = vec![vec![Q::zero(); n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = [q(1, 2), q(3, 4), Q::one()].choose(&mut self.rng).expect("nonempty").clone();
                    m[i][j] = d.clone();
                    m[j][i] = d;
                }
            }
            m
        }
    }

    /// Constant maps and projections are 1-Lipschitz for the sum metric.
    fn function_table(&mut self, n: usize, arity: usize) -> Vec<usize> {
        let size = n.pow(arity as u32);
        if self.rng.gen_bool(0.5) {
            vec![self.rng.gen_range(0..n); size]
        } else {
            let i = self.rng.gen_range(0..arity);
            (0..size).map(|idx| tuple_from_index(n, arity, idx)[i]).collect()
        }
    }

    /// A constant, `ρ(xᵢ,p)` or `1 − ρ(xᵢ,p)`: values in `[0,1]`, 1-Lipschitz.
    fn relation_table(&mut self, s: &FiniteChargedStructure, arity: usize) -> Vec<Q> {
        let n = s.len();
        let size = n.pow(arity as u32);
        let i = self.rng.gen_range(0..arity);
        let p = self.rng.gen_range(0..n);
        match self.rng.gen_range(0..3) {
            0 => vec![q(self.rng.gen_range(0..=4), 4); size],
            1 => (0..size).map(|idx| s.dist(tuple_from_index(n, arity, idx)[i], p).clone()).collect(),
            _ => (0..size).map(|idx| &Q::one() - s.dist(tuple_from_index(n, arity, idx)[i], p)).collect(),
        }
    }

    pub fn term(&mut self, depth: usize) -> Term {
        let funcs = self.sig.functions().to_vec();
        if depth > 0 && !funcs.is_empty() && self.rng.gen_bool(0.25) {
            let f = funcs.choose(&mut self.rng).expect("nonempty");
            let args = (0..f.arity).map(|_| self.term(depth - 1)).collect();
            return Term::app(&f.name, args);
        }
        let consts = self.sig.constants().to_vec();
        if !consts.is_empty() && self.rng.gen_bool(0.2) {
            Term::constant(consts.choose(&mut self.rng).expect("nonempty"))
        } else {
            Term::var(self.vars.choose(&mut self.rng).expect("nonempty"))
        }
    }

    fn atom(&mut self) -> Formula {
        let rels = self.sig.relations().to_vec();
        match self.rng.gen_range(0..5) {
            0 => Formula::One,
            1 if !rels.is_empty() => {
                let r = rels.choose(&mut self.rng).expect("nonempty");
                let args = (0..r.arity).map(|_| self.term(1)).collect();
                Formula::rel(&r.name, args)
            }
            _ => Formula::dist(self.term(1), self.term(1)),
        }
    }

    /// A formula of depth at most `depth` over the variables `x, y, z`.
    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth <= 1 || self.rng.gen_bool(0.2) {
            return self.atom();
        }
        match self.rng.gen_range(0..4) {
            0 => Formula::add(self.formula(depth - 1), self.formula(depth - 1)),
            1 => Formula::scale(self.scalar(), self.formula(depth - 1)),
            _ => {
                let q = [Quantifier::Inf, Quantifier::Sup, Quantifier::Int].choose(&mut self.rng).copied().expect("nonempty");
                let x = self.vars.choose(&mut self.rng).expect("nonempty").clone();
                Formula::quant(q, &x, self.formula(depth - 1))
            }
        }
    }

    /// A formula with no free variables.
    pub fn sentence(&mut self, depth: usize) -> Formula {
        let mut phi = self.formula(depth);
        for x in crate::syntax::free_vars(&phi) {
            let q = [Quantifier::Inf, Quantifier::Sup, Quantifier::Int].choose(&mut self.rng).copied().expect("nonempty");
            phi = Formula::quant(q, &x, phi);
        }
        phi
    }

    fn binding_for(&mut self, kind: crate::proof::BindingKind, axiom: AxiomId) -> Binding {
        use crate::proof::BindingKind as K;
        match kind {
            K::Formula => Binding::Formula(self.formula(2)),
            K::Var => Binding::Var(self.vars.choose(&mut self.rng).expect("nonempty").clone()),
            K::Term => Binding::Term(self.term(1)),
            K::Rational => Binding::Rational(self.scalar()),
            K::Symbol => {
                let mut names: Vec<String> = match axiom.number() {
                    22 => self.sig.functions().iter().map(|f| f.name.clone()).collect(),
                    23 => self.sig.relations().iter().map(|r| r.name.clone()).collect(),
                    _ => self.sig.relations().iter().map(|r| r.name.clone()).chain(["d".to_string()]).collect(),
                };
                if names.is_empty() {
                    names.push("d".into());
                }
                Binding::Symbol(names.choose(&mut self.rng).expect("nonempty").clone())
            }
            K::Terms => Binding::Terms(Vec::new()),
        }
    }

    fn arity_of(&self, symbol: &str) -> usize {
        if symbol == "d" {
            return 2;
        }
        self.sig
            .functions()
            .iter()
            .find(|f| f.name == symbol)
            .map(|f| f.arity)
            .or_else(|| self.sig.relations().iter().find(|r| r.name == symbol).map(|r| r.arity))
            .unwrap_or(0)
    }

    /// A random axiom instance, or `None` when the drawn bindings violate a
    /// side condition or the signature lacks the needed symbols.
    pub fn axiom_step(&mut self) -> Option<(Condition, AxiomId, Bindings)> {
        let axiom = *AxiomId::ALL.choose(&mut self.rng).expect("nonempty");
        let mut bindings = Bindings::new();
        for &(name, kind) in axiom.metavariables() {
            let b = self.binding_for(kind, axiom);
            bindings.insert(name.to_string(), b);
        }
        if let Some(Binding::Symbol(sym)) = bindings.get("symbol").cloned() {
            let arity = self.arity_of(&sym);
            for key in ["xs", "ys"] {
                if bindings.contains_key(key) {
                    let ts = (0..arity).map(|_| self.term(1)).collect();
                    bindings.insert(key.to_string(), Binding::Terms(ts));
                }
            }
        }
        let instances = axiom_instances(&self.sig, axiom, &bindings).ok()?;
        let cond = instances.choose(&mut self.rng)?.clone();
        Some((cond, axiom, bindings))
    }

    /// Up to three hypotheses of the form `φ ≤ r`.
    pub fn hypotheses(&mut self) -> Vec<Condition> {
        let k = self.rng.gen_range(0..=2);
        (0..k)
            .map(|_| {
                let bound = [Q::zero(), q(1, 2), Q::one(), q(2, 1)].choose(&mut self.rng).expect("nonempty").clone();
                Condition::new(self.formula(2), Formula::constant(bound))
            })
            .collect()
    }

    /// A script the kernel accepts, with at most `max_steps` steps and at
    /// least one rule application when possible.
    pub fn accepted_script(&mut self, max_steps: usize) -> ProofScript {
        loop {
            let script = self.candidate_script(max_steps.max(2));
            if check_proof(&script).accepted {
                return script;
            }
        }
    }

    fn candidate_script(&mut self, max_steps: usize) -> ProofScript {
        let hypotheses = self.hypotheses();
        let mut steps: Vec<Step> = Vec::new();
        let target = self.rng.gen_range(2..=max_steps);
        let mut attempts = 0;
        while steps.len() < target && attempts < 50 * max_steps {
            attempts += 1;
            let id = steps.len() as u64 + 1;
            let derived = !steps.is_empty() && self.rng.gen_bool(0.55);
            let step = if derived {
                self.rule_step(id, &steps, &hypotheses)
            } else if !hypotheses.is_empty() && self.rng.gen_bool(0.2) {
                let h = hypotheses.choose(&mut self.rng).expect("nonempty").clone();
                Some(Step { id, condition: h, justification: Justification::Hyp })
            } else {
                self.axiom_step().map(|(condition, axiom, bindings)| Step {
                    id,
                    condition,
                    justification: Justification::Axiom { axiom, bindings },
                })
            };
            if let Some(s) = step {
                steps.push(s);
            }
        }
        ProofScript { signature: self.sig.clone(), hypotheses, steps }
    }

    fn rule_step(&mut self, id: u64, steps: &[Step], hypotheses: &[Condition]) -> Option<Step> {
        let rule = [RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5].choose(&mut self.rng).copied()?;
        let p = steps.choose(&mut self.rng)?;
        let (lhs, rhs) = (p.condition.lhs.clone(), p.condition.rhs.clone());
        let (condition, premises) = match rule {
            RuleId::R1 => {
                let key = crate::syntax::canonicalize(&rhs);
                let next = steps.iter().filter(|s| crate::syntax::canonicalize(&s.condition.lhs) == key).collect::<Vec<_>>();
                let b = next.choose(&mut self.rng)?;
                (Condition::new(lhs, b.condition.rhs.clone()), vec![p.id, b.id])
            }
            RuleId::R2 => {
                let theta = self.formula(2);
                (Condition::new(Formula::add(lhs, theta.clone()), Formula::add(rhs, theta)), vec![p.id])
            }
            RuleId::R3 => {
                let r = [Q::zero(), q(1, 2), Q::one(), q(2, 1), q(3, 1)].choose(&mut self.rng)?.clone();
                (Condition::new(Formula::scale(r.clone(), lhs), Formula::scale(r, rhs)), vec![p.id])
            }
            RuleId::R4 | RuleId::R5 => {
                let x = self.vars.choose(&mut self.rng)?.clone();
                if hypotheses.iter().any(|h| h.has_free(&x)) {
                    return None;
                }
                let q = if rule == RuleId::R4 { Quantifier::Sup } else { Quantifier::Int };
                (Condition::new(Formula::quant(q, &x, lhs), Formula::quant(q, &x, rhs)), vec![p.id])
            }
        };
        Some(Step { id, condition, justification: Justification::Rule { rule, premises } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::validate_structure;

    #[test]
    fn structures_validate() {
        let mut g = Generator::new(7);
        for _ in 0..200 {
            let s = g.structure(4);
            let v = validate_structure(g.signature(), &s, Default::default());
            assert!(v.is_empty(), "{v:?}");
            assert!(s.mass().is_one());
        }
    }

    #[test]
    fn scripts_are_accepted_and_deterministic() {
        let mut a = Generator::new(3);
        let mut b = Generator::new(3);
        for _ in 0..20 {
            let s = a.accepted_script(6);
            assert!(check_proof(&s).accepted);
            assert_eq!(s, b.accepted_script(6));
        }
    }

    #[test]
    fn sentences_are_closed() {
        let mut g = Generator::new(11);
        for _ in 0..50 {
            assert!(g.sentence(3).is_sentence());
        }
    }
}
