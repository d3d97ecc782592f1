#![allow(dead_code)]

use std::path::PathBuf;

use alint::gen::Generator;
use alint::semantics::{eval_formula, Environment, FiniteChargedStructure};
use alint::syntax::{formula_lipschitz_bound, free_vars, Formula};
use alint::{q, Q};
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// `{0,1}`, distance 1, charge `1/2` each.
pub fn two_point() -> FiniteChargedStructure {
    FiniteChargedStructure::numbered(vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]], vec![q(1, 2), q(1, 2)])
        .unwrap()
}

/// `n` equally spaced points of `[0,1]`, charge `1/n` each.
pub fn grid(n: usize) -> FiniteChargedStructure {
    let step = q(1, n as i64 - 1);
    let metric = (0..n)
        .map(|i| (0..n).map(|j| &step * &Q::from_integer((i as i64 - j as i64).abs())).collect())
        .collect();
    FiniteChargedStructure::numbered(metric, vec![q(1, n as i64); n]).unwrap()
}

#[derive(Debug, Default)]
pub struct InvariantTally {
    pub cases: usize,
    pub bound_violations: usize,
    pub lipschitz_violations: usize,
    pub first_failure: Option<String>,
}

/// Seeded cases of `|φ(ā)| ≤ b_φ` and `|φ(ā) − φ(b̄)| ≤ λ_φ·Σρ(aᵢ,bᵢ)`,
/// with `ā`, `b̄` ranging over the free variables of `φ`.
pub fn bound_and_lipschitz(seed: u64, cases: usize) -> InvariantTally {
    let mut g = Generator::new(seed);
    let mut tally = InvariantTally::default();
    while tally.cases < cases {
        let s = g.structure(4);
        for _ in 0..20 {
            let depth = g.rng().gen_range(1..=4);
            let phi = g.formula(depth);
            check_case(&mut g, &s, &phi, &mut tally);
            tally.cases += 1;
            if tally.cases == cases {
                break;
            }
        }
    }
    tally
}

fn check_case(g: &mut Generator, s: &FiniteChargedStructure, phi: &Formula, tally: &mut InvariantTally) {
    let (lambda, bound) = formula_lipschitz_bound(g.signature(), phi).unwrap();
    let vars: Vec<String> = free_vars(phi).into_iter().collect();
    let draw = |g: &mut Generator| -> Vec<usize> { vars.iter().map(|_| g.rng().gen_range(0..s.len())).collect() };
    let (a, b) = (draw(g), draw(g));
    let env = |t: &[usize]| -> Environment { vars.iter().cloned().zip(t.iter().copied()).collect() };
    let va = eval_formula(s, phi, &env(&a)).unwrap();
    let vb = eval_formula(s, phi, &env(&b)).unwrap();
    if va.abs() > bound {
        tally.bound_violations += 1;
        tally.first_failure.get_or_insert(format!("|{phi}| = {} > {bound}", va.abs()));
    }
    let gap = (&va - &vb).abs();
    let allowed = &lambda * &s.tuple_dist(&a, &b);
    if gap > allowed {
        tally.lipschitz_violations += 1;
        tally.first_failure.get_or_insert(format!("{phi} at {a:?} vs {b:?}: gap {gap} > {allowed}"));
    }
}
