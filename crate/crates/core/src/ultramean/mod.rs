//! Ultrameans of finitely many finite structures over a finite index set.
//!
//! The product carries the pseudometric `Σ wᵢ ρᵢ`, functions act
//! coordinatewise, relations are `w`-averaged and the charge is the product
//! charge `⊗ μᵢ` pushed forward to the metric quotient. Since every factor is
//! a metric space, two product points are at distance 0 exactly when they
//! agree on every coordinate of positive weight, so the quotient is the
//! product of the positive-weight factors.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::rational::Q;
use crate::semantics::{tuple_from_index, tuple_index, EvalError, FiniteChargedStructure, TableEvaluator};
use crate::syntax::{Formula, Signature};

pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

/// Upper bound on `points²` for a materialized ultramean metric.
pub const MAX_METRIC_ENTRIES: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UltrameanError {
    #[error("{weights} weights for {models} models")]
    SizeMismatch { weights: usize, models: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("the raw product has {size} points, above the cap of {cap}")]
    ProductTooLarge { size: u128, cap: usize },
    #[error("the quotient has {points} points; its metric would be too large")]
    MetricTooLarge { points: usize },
    #[error("model {model} does not interpret `{symbol}`")]
    MissingInterpretation { model: usize, symbol: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Finite index set with a charge given by nonnegative weights summing to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrachargeSpace {
    weights: Vec<Q>,
}

impl UltrachargeSpace {
    pub fn new(weights: Vec<Q>) -> Result<Self, UltrameanError> {
        if weights.is_empty() {
            return Err(UltrameanError::InvalidWeights("the index set is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(UltrameanError::InvalidWeights(format!("weight {w} is negative")));
        }
        let total: Q = weights.iter().sum();
        if !total.is_one() {
            return Err(UltrameanError::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(UltrachargeSpace { weights })
    }

    pub fn uniform(m: usize) -> Self {
        let w = Q::new(1, m as i64);
        UltrachargeSpace { weights: vec![w; m] }
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// An ultramean together with the quotient map from the raw product.
#[derive(Debug, Clone)]
pub struct Ultramean {
    pub structure: FiniteChargedStructure,
    weights: Vec<Q>,
    sizes: Vec<usize>,
    /// Coordinates of positive weight, ascending.
    active: Vec<usize>,
}

impl Ultramean {
    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn factor_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Coordinates with positive weight.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn raw_size(&self) -> u128 {
        self.sizes.iter().map(|&n| n as u128).product()
    }

    /// Class of a raw product point given by its coordinates.
    pub fn class_of(&self, raw: &[usize]) -> usize {
        self.active.iter().fold(0, |acc, &i| acc * self.sizes[i] + raw[i])
    }

    /// Coordinates of the raw point with index `idx` (coordinate 0 most
    /// significant).
    pub fn raw_point(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &n) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    /// First raw point of a class: zero-weight coordinates are 0.
    pub fn representative(&self, mut class: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for &i in self.active.iter().rev() {
            out[i] = class % self.sizes[i];
            class /= self.sizes[i];
        }
        out
    }

    /// Class of the diagonal point `(a, …, a)`.
    pub fn diagonal(&self, a: usize) -> usize {
        self.class_of(&vec![a; self.sizes.len()])
    }
}

fn check_inputs(
    sig: &Signature,
    ws: &UltrachargeSpace,
    models: &[FiniteChargedStructure],
    cap: usize,
) -> Result<u128, UltrameanError> {
    if ws.len() != models.len() {
        return Err(UltrameanError::SizeMismatch { weights: ws.len(), models: models.len() });
    }
    for (model, m) in models.iter().enumerate() {
        let missing = sig
            .constants()
            .iter()
            .find(|c| m.constant(c).is_none())
            .or_else(|| sig.functions().iter().map(|f| &f.name).find(|f| !m.functions().contains_key(*f)))
            .or_else(|| sig.relations().iter().map(|r| &r.name).find(|r| !m.relations().contains_key(*r)));
        if let Some(symbol) = missing {
            return Err(UltrameanError::MissingInterpretation { model, symbol: symbol.clone() });
        }
    }
    let size: u128 = models.iter().map(|m| m.len() as u128).product();
    if size > cap as u128 {
        return Err(UltrameanError::ProductTooLarge { size, cap });
    }
    Ok(size)
}

fn label(models: &[FiniteChargedStructure], raw: &[usize]) -> String {
    if models.len() == 1 {
        return models[0].label(raw[0]).to_string();
    }
    let parts: Vec<&str> = models.iter().zip(raw).map(|(m, &a)| m.label(a)).collect();
    format!("({})", parts.join(","))
}

/// The ultramean `∏ Mᵢ` over the charge `ws`, computed directly on the
/// metric quotient.
pub fn build_ultramean(
    sig: &Signature,
    ws: &UltrachargeSpace,
    models: &[FiniteChargedStructure],
    cap: usize,
) -> Result<Ultramean, UltrameanError> {
    check_inputs(sig, ws, models, cap)?;
    let weights = ws.weights().to_vec();
    let sizes: Vec<usize> = models.iter().map(|m| m.len()).collect();
    let active: Vec<usize> = (0..models.len()).filter(|&i| !weights[i].is_zero()).collect();
    let k: usize = active.iter().map(|&i| sizes[i]).product();
    if k.saturating_mul(k) > MAX_METRIC_ENTRIES {
        return Err(UltrameanError::MetricTooLarge { points: k });
    }
    let mut shell = Ultramean {
        structure: FiniteChargedStructure::numbered(vec![vec![Q::zero()]], vec![Q::one()]).expect("one point"),
        weights,
        sizes,
        active,
    };
    let u = &shell;
    let reps: Vec<Vec<usize>> = (0..k).map(|c| u.representative(c)).collect();

    let metric = reps
        .iter()
        .map(|a| {
            reps.iter()
                .map(|b| u.active.iter().map(|&i| &u.weights[i] * models[i].dist(a[i], b[i])).sum())
                .collect()
        })
        .collect();
    let passive_mass: Q = (0..models.len())
        .filter(|i| !u.active.contains(i))
        .fold(Q::one(), |acc, i| &acc * models[i].mass());
    let charge = reps
        .iter()
        .map(|a| u.active.iter().fold(passive_mass.clone(), |acc, &i| &acc * models[i].charge(a[i])))
        .collect();
    let labels = reps.iter().map(|a| label(models, a)).collect();
    let mass = models.iter().fold(Q::one(), |acc, m| &acc * m.mass());
    let mut s = FiniteChargedStructure::new(labels, metric, charge)
        .expect("dimensions agree by construction")
        .with_mass(mass);

    for c in sig.constants() {
        let raw: Vec<usize> = models.iter().map(|m| m.constant(c).expect("checked")).collect();
        s = s.with_constant(c, u.class_of(&raw)).expect("class in range");
    }
    for f in sig.functions() {
        let values = (0..k.pow(f.arity as u32))
            .map(|idx| {
                let args: Vec<&Vec<usize>> = tuple_from_index(k, f.arity, idx).into_iter().map(|c| &reps[c]).collect();
                let mut image = vec![0; models.len()];
                for &i in &u.active {
                    let coords: Vec<usize> = args.iter().map(|a| a[i]).collect();
                    image[i] = models[i].apply(&f.name, &coords).expect("checked");
                }
                u.class_of(&image)
            })
            .collect();
        s = s.with_function(&f.name, f.arity, values).expect("dimensions agree by construction");
    }
    for r in sig.relations() {
        let values = (0..k.pow(r.arity as u32))
            .map(|idx| {
                let args: Vec<&Vec<usize>> = tuple_from_index(k, r.arity, idx).into_iter().map(|c| &reps[c]).collect();
                u.active
                    .iter()
                    .map(|&i| {
                        let coords: Vec<usize> = args.iter().map(|a| a[i]).collect();
                        &u.weights[i] * models[i].relate(&r.name, &coords).expect("checked")
                    })
                    .sum()
            })
            .collect();
        s = s.with_relation(&r.name, r.arity, values).expect("dimensions agree by construction");
    }
    shell.structure = s;
    Ok(shell)
}

/// The ultramean of `M` with itself, once per index.
pub fn build_powermean(
    sig: &Signature,
    ws: &UltrachargeSpace,
    m: &FiniteChargedStructure,
    cap: usize,
) -> Result<Ultramean, UltrameanError> {
    build_ultramean(sig, ws, &vec![m.clone(); ws.len()], cap)
}

/// The raw product before the quotient: a prestructure whose pseudometric
/// vanishes between points that differ only on zero-weight coordinates.
pub fn raw_product(
    sig: &Signature,
    ws: &UltrachargeSpace,
    models: &[FiniteChargedStructure],
    cap: usize,
) -> Result<FiniteChargedStructure, UltrameanError> {
    let size = check_inputs(sig, ws, models, cap)? as usize;
    if size.saturating_mul(size) > MAX_METRIC_ENTRIES {
        return Err(UltrameanError::MetricTooLarge { points: size });
    }
    let w = ws.weights();
    let sizes: Vec<usize> = models.iter().map(|m| m.len()).collect();
    let decode = |mut idx: usize| {
        let mut out = vec![0; sizes.len()];
        for (slot, &n) in out.iter_mut().zip(&sizes).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    };
    let encode = |raw: &[usize]| raw.iter().zip(&sizes).fold(0, |acc, (&a, &n)| acc * n + a);
    let points: Vec<Vec<usize>> = (0..size).map(decode).collect();
    let metric = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| (0..models.len()).map(|i| &w[i] * models[i].dist(a[i], b[i])).sum())
                .collect()
        })
        .collect();
    let charge = points
        .iter()
        .map(|a| (0..models.len()).fold(Q::one(), |acc, i| &acc * models[i].charge(a[i])))
        .collect();
    let labels = points.iter().map(|a| label(models, a)).collect();
    let mut s = FiniteChargedStructure::new(labels, metric, charge)
        .expect("dimensions agree by construction")
        .with_mass(models.iter().fold(Q::one(), |acc, m| &acc * m.mass()));
    for c in sig.constants() {
        let raw: Vec<usize> = models.iter().map(|m| m.constant(c).expect("checked")).collect();
        s = s.with_constant(c, encode(&raw)).expect("in range");
    }
    for f in sig.functions() {
        let values = (0..size.pow(f.arity as u32))
            .map(|idx| {
                let args = tuple_from_index(size, f.arity, idx);
                let image: Vec<usize> = (0..models.len())
                    .map(|i| {
                        let coords: Vec<usize> = args.iter().map(|&p| points[p][i]).collect();
                        models[i].apply(&f.name, &coords).expect("checked")
                    })
                    .collect();
                encode(&image)
            })
            .collect();
        s = s.with_function(&f.name, f.arity, values).expect("dimensions agree by construction");
    }
    for r in sig.relations() {
        let values = (0..size.pow(r.arity as u32))
            .map(|idx| {
                let args = tuple_from_index(size, r.arity, idx);
                (0..models.len())
                    .map(|i| {
                        let coords: Vec<usize> = args.iter().map(|&p| points[p][i]).collect();
                        &w[i] * models[i].relate(&r.name, &coords).expect("checked")
                    })
                    .sum()
            })
            .collect();
        s = s.with_relation(&r.name, r.arity, values).expect("dimensions agree by construction");
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LosWitness {
    pub formula: String,
    /// Raw product points, one per variable.
    pub tuple: Vec<Vec<usize>>,
    pub ultramean: Q,
    pub average: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LosReport {
    pub formulas: usize,
    pub tuples: usize,
    pub max_residual: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<LosWitness>,
}

impl LosReport {
    pub fn holds(&self) -> bool {
        self.max_residual.is_zero()
    }
}

/// For every formula and every tuple of product points, compares the value
/// in the ultramean with the `w`-average of the factor values.
///
/// Tuples are enumerated through class representatives: raw points in one
/// class differ only on zero-weight coordinates, which enter the average
/// with weight 0.
pub fn verify_los(
    u: &Ultramean,
    models: &[FiniteChargedStructure],
    formulas: &[Formula],
    vars: &[&str],
) -> Result<LosReport, EvalError> {
    let max_depth = formulas.iter().map(Formula::depth).max().unwrap_or(0);
    let cache_depth = max_depth.saturating_sub(1);
    let k = u.structure.len();
    let arity = vars.len();
    let count = k.pow(arity as u32);
    let active = u.active();

    let mut factor_index: Vec<Vec<usize>> = vec![Vec::with_capacity(count); active.len()];
    for idx in 0..count {
        let reps: Vec<Vec<usize>> = tuple_from_index(k, arity, idx).into_iter().map(|c| u.representative(c)).collect();
        for (slot, &i) in factor_index.iter_mut().zip(active) {
            let coords: Vec<usize> = reps.iter().map(|r| r[i]).collect();
            slot.push(tuple_index(models[i].len(), &coords));
        }
    }

    let mut ev_u = TableEvaluator::new(&u.structure, vars).with_cache_depth(cache_depth);
    let mut ev_f: Vec<TableEvaluator> =
        active.iter().map(|&i| TableEvaluator::new(&models[i], vars).with_cache_depth(cache_depth)).collect();
    let mut max_residual = Q::zero();
    let mut worst = None;
    for phi in formulas {
        let tu = ev_u.table(phi)?;
        let tf = ev_f.iter_mut().map(|e| e.table(phi)).collect::<Result<Vec<_>, _>>()?;
        for idx in 0..count {
            let mut average = Q::zero();
            for (j, &i) in active.iter().enumerate() {
                average += &u.weights()[i] * &tf[j][factor_index[j][idx]];
            }
            let residual = (&tu[idx] - &average).abs();
            if residual > max_residual {
                max_residual = residual;
                worst = Some(LosWitness {
                    formula: phi.to_string(),
                    tuple: tuple_from_index(k, arity, idx).into_iter().map(|c| u.representative(c)).collect(),
                    ultramean: tu[idx].clone(),
                    average,
                });
            }
        }
    }
    Ok(LosReport { formulas: formulas.len(), tuples: count, max_residual, worst })
}

/// Builds the ultramean and runs [`verify_los`].
pub fn verify_ultramean_theorem(
    sig: &Signature,
    ws: &UltrachargeSpace,
    models: &[FiniteChargedStructure],
    formulas: &[Formula],
    vars: &[&str],
    cap: usize,
) -> Result<LosReport, UltrameanError> {
    let u = build_ultramean(sig, ws, models, cap)?;
    Ok(verify_los(&u, models, formulas, vars)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalFailure {
    pub formula: String,
    pub tuple: Vec<usize>,
    pub base: Q,
    pub image: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalReport {
    /// `map[a]` is the class of `(a, …, a)`.
    pub map: Vec<usize>,
    pub checked: usize,
    pub failures: Vec<DiagonalFailure>,
}

/// The diagonal map into the powermean, checked to preserve every formula
/// of `family` at every tuple.
pub fn diagonal_embedding(
    sig: &Signature,
    ws: &UltrachargeSpace,
    m: &FiniteChargedStructure,
    family: &[Formula],
    vars: &[&str],
    cap: usize,
) -> Result<DiagonalReport, UltrameanError> {
    let p = build_powermean(sig, ws, m, cap)?;
    let map: Vec<usize> = (0..m.len()).map(|a| p.diagonal(a)).collect();
    let mut ev_m = TableEvaluator::new(m, vars);
    let mut ev_p = TableEvaluator::new(&p.structure, vars);
    let n = m.len();
    let mut failures = Vec::new();
    let mut checked = 0;
    for phi in family {
        let (tm, tp) = (ev_m.table(phi)?, ev_p.table(phi)?);
        for (idx, base) in tm.iter().enumerate() {
            let tuple = tuple_from_index(n, vars.len(), idx);
            let image_idx = tuple_index(p.structure.len(), &tuple.iter().map(|&a| map[a]).collect::<Vec<_>>());
            checked += 1;
            if base != &tp[image_idx] {
                failures.push(DiagonalFailure {
                    formula: phi.to_string(),
                    tuple,
                    base: base.clone(),
                    image: tp[image_idx].clone(),
                });
            }
        }
    }
    Ok(DiagonalReport { map, checked, failures })
}

/// Charges of the ultramean's points, keyed by label. Convenience for
/// reports.
pub fn atom_charges(u: &Ultramean) -> BTreeMap<String, Q> {
    u.structure
        .labels()
        .iter()
        .zip(u.structure.charges())
        .map(|(l, c)| (l.clone(), c.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::rational::q;
    use crate::semantics::{eval_formula, quotient_structure, validate_structure, Environment};
    use crate::syntax::FormulaEnumerator;

    fn two_point() -> FiniteChargedStructure {
        FiniteChargedStructure::numbered(
            vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]],
            vec![q(1, 2), q(1, 2)],
        )
        .unwrap()
    }

    fn half() -> UltrachargeSpace {
        UltrachargeSpace::new(vec![q(1, 2), q(1, 2)]).unwrap()
    }

    fn sig_r() -> Signature {
        Signature::new()
            .with_constant("c")
            .unwrap()
            .with_function("F", 1, Q::one())
            .unwrap()
            .with_relation("R", 1, Q::one())
            .unwrap()
    }

    fn with_symbols(m: FiniteChargedStructure, r: Vec<Q>, f: Vec<usize>) -> FiniteChargedStructure {
        m.with_constant("c", 0).unwrap().with_relation("R", 1, r).unwrap().with_function("F", 1, f).unwrap()
    }

    #[test]
    fn weights_are_checked() {
        assert!(UltrachargeSpace::new(vec![]).is_err());
        assert!(UltrachargeSpace::new(vec![q(1, 2)]).is_err());
        assert!(UltrachargeSpace::new(vec![q(3, 2), q(-1, 2)]).is_err());
        assert_eq!(UltrachargeSpace::uniform(4).weights()[3], q(1, 4));
    }

    #[test]
    fn half_plus_half() {
        let m = two_point();
        let n = build_powermean(&Signature::new(), &half(), &m, DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(n.structure.len(), 4);
        assert!(n.structure.charges().iter().all(|c| c == &q(1, 4)));
        assert!(validate_structure(&Signature::new(), &n.structure, Default::default()).is_empty());
        let phi = parse_formula(&Signature::new(), "int y. d(x,y)").unwrap();
        for a in 0..4 {
            assert_eq!(eval_formula(&n.structure, &phi, &Environment::new().with("x", a)).unwrap(), q(1, 2));
        }
    }

    #[test]
    fn identity_and_zero_weight() {
        let m = with_symbols(two_point(), vec![q(1, 4), q(3, 4)], vec![1, 0]);
        let one = UltrachargeSpace::new(vec![Q::one()]).unwrap();
        let u = build_ultramean(&sig_r(), &one, &[m.clone()], DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(u.structure, m);
        let lopsided = UltrachargeSpace::new(vec![Q::one(), Q::zero()]).unwrap();
        let p = build_powermean(&sig_r(), &lopsided, &m, DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(p.structure.len(), 2);
        assert_eq!(p.structure.metric_rows(), m.metric_rows());
        assert_eq!(p.structure.charges(), m.charges());
        assert_eq!(p.structure.relations(), m.relations());
        assert_eq!(p.structure.functions(), m.functions());
    }

    #[test]
    fn agrees_with_quotient_of_raw_product() {
        let m0 = with_symbols(two_point(), vec![q(1, 4), q(3, 4)], vec![1, 0]);
        let m1 = with_symbols(
            FiniteChargedStructure::numbered(
                vec![
                    vec![q(0, 1), q(1, 2), q(1, 1)],
                    vec![q(1, 2), q(0, 1), q(1, 2)],
                    vec![q(1, 1), q(1, 2), q(0, 1)],
                ],
                vec![q(1, 4), q(1, 2), q(1, 4)],
            )
            .unwrap(),
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![1, 1, 2],
        );
        let sig = sig_r();
        for w in [vec![q(1, 3), q(2, 3)], vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]] {
            let ws = UltrachargeSpace::new(w).unwrap();
            let models = [m0.clone(), m1.clone()];
            let u = build_ultramean(&sig, &ws, &models, DEFAULT_PRODUCT_CAP).unwrap();
            let raw = raw_product(&sig, &ws, &models, DEFAULT_PRODUCT_CAP).unwrap();
            let qt = quotient_structure(&raw).unwrap();
            assert_eq!(qt.structure, u.structure);
            for (idx, &c) in qt.class_of.iter().enumerate() {
                assert_eq!(u.class_of(&u.raw_point(idx)), c);
            }
            assert!(validate_structure(&sig, &u.structure, Default::default()).is_empty());
        }
    }

    #[test]
    fn los_on_small_family() {
        let sig = sig_r();
        let m0 = with_symbols(two_point(), vec![q(1, 4), q(3, 4)], vec![1, 0]);
        let m1 = with_symbols(two_point(), vec![q(1, 2), q(1, 2)], vec![0, 0]);
        let formulas = FormulaEnumerator::new(&sig, &["x", "y"], &[q(-1, 1), q(1, 2)]).up_to_depth(2);
        let ws = UltrachargeSpace::new(vec![q(1, 4), q(3, 4)]).unwrap();
        let r = verify_ultramean_theorem(&sig, &ws, &[m0, m1], &formulas, &["x", "y"], DEFAULT_PRODUCT_CAP).unwrap();
        assert!(r.holds(), "{:?}", r.worst);
        assert_eq!(r.tuples, 16);
    }

    #[test]
    fn diagonal() {
        let sig = Signature::new();
        let fam = vec![
            parse_formula(&sig, "d(x,y)").unwrap(),
            parse_formula(&sig, "int y. d(x,y)").unwrap(),
            Formula::One,
        ];
        let r = diagonal_embedding(&sig, &half(), &two_point(), &fam, &["x", "y"], DEFAULT_PRODUCT_CAP).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.map, vec![0, 3]);
    }

    #[test]
    fn caps_and_sizes() {
        let m = two_point();
        let ws = UltrachargeSpace::uniform(3);
        assert!(matches!(
            build_powermean(&Signature::new(), &ws, &m, 4),
            Err(UltrameanError::ProductTooLarge { size: 8, cap: 4 })
        ));
        assert!(matches!(
            build_ultramean(&Signature::new(), &ws, &[m], 10),
            Err(UltrameanError::SizeMismatch { .. })
        ));
    }
}
