use std::collections::HashMap;

use serde::Serialize;

use crate::rational::Q;
use crate::semantics::{
    eval_formula, tuple_from_index, tuple_index, Environment, EvalError, FiniteChargedStructure, TableEvaluator,
};
use crate::syntax::{alpha_normalize, Formula, FormulaEnumerator, Signature};

/// The evaluation functional `φ ↦ φ^S(ā)` on a finite formula family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizedType {
    pub vars: Vec<String>,
    pub tuple: Vec<usize>,
    pub entries: Vec<(Formula, Q)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not in the type's formula family")]
pub struct FamilyMiss(pub String);

/// Outcome of checking the defining laws of a type on its family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeLawReport {
    /// `p(1) = 1`, vacuous when `1` is not in the family.
    pub unit: bool,
    /// Formulas nonnegative on every assignment get a nonnegative value.
    pub positive: bool,
    /// `p(φ+ψ) = p(φ)+p(ψ)` and `p(rφ) = r·p(φ)` whenever all parts are in
    /// the family.
    pub linear: bool,
}

impl RealizedType {
    pub fn get(&self, phi: &Formula) -> Option<&Q> {
        let key = alpha_normalize(phi);
        self.entries.iter().find(|(f, _)| alpha_normalize(f) == key).map(|(_, v)| v)
    }

    pub fn values(&self) -> Vec<Q> {
        self.entries.iter().map(|(_, v)| v.clone()).collect()
    }

    /// Adds `phi` to the family, evaluated at the same tuple.
    pub fn extend(&mut self, s: &FiniteChargedStructure, phi: Formula) -> Result<Q, EvalError> {
        if let Some(v) = self.get(&phi) {
            return Ok(v.clone());
        }
        let v = eval_formula(s, &phi, &self.env())?;
        self.entries.push((phi, v.clone()));
        Ok(v)
    }

    fn env(&self) -> Environment {
        self.vars.iter().zip(&self.tuple).map(|(x, &a)| (x.clone(), a)).collect()
    }

    pub fn check_laws(&self, s: &FiniteChargedStructure) -> Result<TypeLawReport, EvalError> {
        let unit = self.get(&Formula::One).is_none_or(Q::is_one);
        let mut ev = TableEvaluator::new(s, &self.vars);
        let mut positive = true;
        for (phi, v) in &self.entries {
            if v.is_negative() && ev.table(phi)?.iter().all(|x| !x.is_negative()) {
                positive = false;
            }
        }
        let mut linear = true;
        for (phi, v) in &self.entries {
            let expected = match phi {
                Formula::Add(a, b) => match (self.get(a), self.get(b)) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                },
                Formula::Scale(r, a) => self.get(a).map(|x| r * x),
                _ => None,
            };
            if expected.is_some_and(|e| &e != v) {
                linear = false;
            }
        }
        Ok(TypeLawReport { unit, positive, linear })
    }
}

/// The type of `tuple` (assigned to `vars`) restricted to `family`.
pub fn realized_type<S: AsRef<str>>(
    s: &FiniteChargedStructure,
    vars: &[S],
    tuple: &[usize],
    family: &[Formula],
) -> Result<RealizedType, EvalError> {
    assert_eq!(vars.len(), tuple.len(), "one point per variable");
    let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    let env: Environment = vars.iter().zip(tuple).map(|(x, &a)| (x.clone(), a)).collect();
    let entries = family
        .iter()
        .map(|phi| Ok((phi.clone(), eval_formula(s, phi, &env)?)))
        .collect::<Result<_, EvalError>>()?;
    Ok(RealizedType { vars, tuple: tuple.to_vec(), entries })
}

/// `p⁺(φ) = p(∫φ dy)`; the integral must be in the type's family.
pub fn plus_map(p: &RealizedType, phi: &Formula, y: &str) -> Result<Q, FamilyMiss> {
    let target = Formula::int(y, phi.clone());
    p.get(&target).cloned().ok_or_else(|| FamilyMiss(target.to_string()))
}

/// `Σ_{x̄ ∈ Sⁿ} ∏μ(xᵢ)·φ(x̄)`, the other free variables of `phi` taken from
/// `env`.
pub fn iterated_charge<S: AsRef<str>>(
    s: &FiniteChargedStructure,
    phi: &Formula,
    vars: &[S],
    env: &Environment,
) -> Result<Q, EvalError> {
    let n = s.len();
    let mut env = env.clone();
    let mut total = Q::zero();
    for idx in 0..n.pow(vars.len() as u32) {
        let tuple = tuple_from_index(n, vars.len(), idx);
        let weight = tuple.iter().fold(Q::one(), |acc, &a| &acc * s.charge(a));
        if weight.is_zero() {
            continue;
        }
        for (x, &a) in vars.iter().zip(&tuple) {
            env.insert(x.as_ref(), a);
        }
        total += &weight * &eval_formula(s, phi, &env)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FubiniCase {
    pub assignment: Vec<(String, usize)>,
    pub xy: Q,
    pub yx: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FubiniReport {
    pub max_residual: Q,
    pub cases: Vec<FubiniCase>,
}

/// Compares `∫∫φ dy dx` with `∫∫φ dx dy` at each assignment.
pub fn check_fubini(
    s: &FiniteChargedStructure,
    phi: &Formula,
    x: &str,
    y: &str,
    assignments: &[Environment],
) -> Result<FubiniReport, EvalError> {
    let xy = Formula::int(x, Formula::int(y, phi.clone()));
    let yx = Formula::int(y, Formula::int(x, phi.clone()));
    let mut max_residual = Q::zero();
    let mut cases = Vec::with_capacity(assignments.len());
    for env in assignments {
        let a = eval_formula(s, &xy, env)?;
        let b = eval_formula(s, &yx, env)?;
        max_residual = max_residual.max((&a - &b).abs());
        cases.push(FubiniCase { assignment: env.iter().map(|(k, &v)| (k.clone(), v)).collect(), xy: a, yx: b });
    }
    Ok(FubiniReport { max_residual, cases })
}

/// All automorphisms of `s`: permutations preserving metric, charge and
/// every interpretation. Search stops after `limit` permutations are found.
pub fn automorphisms(s: &FiniteChargedStructure, limit: usize) -> Vec<Vec<usize>> {
    fn extend(s: &FiniteChargedStructure, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let a = perm.len();
        if a == s.len() {
            if preserves_symbols(s, perm) {
                out.push(perm.clone());
            }
            return;
        }
        for b in 0..s.len() {
            if used[b] || s.charge(a) != s.charge(b) {
                continue;
            }
            if (0..a).any(|c| s.dist(a, c) != s.dist(b, perm[c])) || s.dist(a, a) != s.dist(b, b) {
                continue;
            }
            used[b] = true;
            perm.push(b);
            extend(s, perm, used, out, limit);
            perm.pop();
            used[b] = false;
        }
    }
    let mut out = Vec::new();
    extend(s, &mut Vec::new(), &mut vec![false; s.len()], &mut out, limit);
    out
}

fn preserves_symbols(s: &FiniteChargedStructure, perm: &[usize]) -> bool {
    let n = s.len();
    s.constants().values().all(|&c| perm[c] == c)
        && s.functions().iter().all(|(name, t)| {
            (0..n.pow(t.arity as u32)).all(|idx| {
                let args = tuple_from_index(n, t.arity, idx);
                let image: Vec<usize> = args.iter().map(|&a| perm[a]).collect();
                s.apply(name, &image) == s.apply(name, &args).map(|v| perm[v])
            })
        })
        && s.relations().iter().all(|(name, t)| {
            (0..n.pow(t.arity as u32)).all(|idx| {
                let args = tuple_from_index(n, t.arity, idx);
                let image: Vec<usize> = args.iter().map(|&a| perm[a]).collect();
                s.relate(name, &image) == s.relate(name, &args)
            })
        })
}

/// Partition of `Sⁿ` by depth-bounded types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeClasses {
    pub arity: usize,
    pub depth: usize,
    pub formulas: usize,
    /// `class_of[tuple_index]`, classes numbered by first occurrence.
    pub class_of: Vec<usize>,
    /// The partition equals the automorphism orbits on `Sⁿ`, so the classes
    /// are the exact realized types.
    pub orbits_match: bool,
}

/// Groups `n`-tuples by their values on every formula of depth at most
/// `depth` in `x1..xn` (with one extra bound variable `y`) over the default
/// scalars.
pub fn type_classes(sig: &Signature, s: &FiniteChargedStructure, arity: usize, depth: usize) -> Result<TypeClasses, EvalError> {
    let vars: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    let mut all: Vec<&str> = vars.iter().map(String::as_str).collect();
    all.push("y");
    let family: Vec<Formula> = FormulaEnumerator::new(sig, &all, &FormulaEnumerator::default_scalars())
        .up_to_depth(depth)
        .into_iter()
        .filter(|f| !f.has_free("y"))
        .collect();
    let mut ev = TableEvaluator::new(s, &vars).with_cache_depth(depth.saturating_sub(1));
    let count = ev.len();
    let mut signatures: Vec<Vec<Q>> = vec![Vec::with_capacity(family.len()); count];
    for phi in &family {
        let t = ev.table(phi)?;
        for (sig, v) in signatures.iter_mut().zip(t.iter()) {
            sig.push(v.clone());
        }
    }
    let mut ids: HashMap<&[Q], usize> = HashMap::new();
    let class_of: Vec<usize> = signatures
        .iter()
        .map(|v| {
            let next = ids.len();
            *ids.entry(v.as_slice()).or_insert(next)
        })
        .collect();

    let n = s.len();
    let autos = automorphisms(s, 50_000);
    let mut parent: Vec<usize> = (0..count).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for perm in &autos {
        for idx in 0..count {
            let image: Vec<usize> = tuple_from_index(n, arity, idx).iter().map(|&a| perm[a]).collect();
            let (a, b) = (root(&mut parent, idx), root(&mut parent, tuple_index(n, &image)));
            parent[a.max(b)] = a.min(b);
        }
    }
    let orbit_of: Vec<usize> = (0..count).map(|i| root(&mut parent, i)).collect();
    let orbits_match = (0..count).all(|i| (0..count).all(|j| (class_of[i] == class_of[j]) == (orbit_of[i] == orbit_of[j])));
    Ok(TypeClasses { arity, depth, formulas: family.len(), class_of, orbits_match })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeDistance {
    pub distance: Q,
    /// Realizations attaining the distance.
    pub witness: (Vec<usize>, Vec<usize>),
    /// The classes are automorphism orbits; see [`TypeClasses`].
    pub exact: bool,
}

/// `min Σρ(a′ᵢ,b′ᵢ)` over `ā′` realizing the depth-bounded type of `ā` and
/// `b̄′` realizing that of `b̄`.
pub fn type_distance(
    sig: &Signature,
    s: &FiniteChargedStructure,
    a: &[usize],
    b: &[usize],
    depth: usize,
) -> Result<TypeDistance, EvalError> {
    assert_eq!(a.len(), b.len(), "tuples of equal length");
    let classes = type_classes(sig, s, a.len(), depth)?;
    Ok(distance_in(s, &classes, a, b))
}

impl TypeClasses {
    pub fn distance(&self, s: &FiniteChargedStructure, a: &[usize], b: &[usize]) -> TypeDistance {
        distance_in(s, self, a, b)
    }
}

fn distance_in(s: &FiniteChargedStructure, classes: &TypeClasses, a: &[usize], b: &[usize]) -> TypeDistance {
    let n = s.len();
    let k = a.len();
    let (ca, cb) = (classes.class_of[tuple_index(n, a)], classes.class_of[tuple_index(n, b)]);
    let members = |c: usize| -> Vec<Vec<usize>> {
        (0..classes.class_of.len()).filter(|&i| classes.class_of[i] == c).map(|i| tuple_from_index(n, k, i)).collect()
    };
    let (ra, rb) = (members(ca), members(cb));
    let mut best: Option<(Q, Vec<usize>, Vec<usize>)> = None;
    for x in &ra {
        for y in &rb {
            let d = s.tuple_dist(x, y);
            if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
                best = Some((d, x.clone(), y.clone()));
            }
        }
    }
    let (distance, wa, wb) = best.expect("classes are nonempty");
    TypeDistance { distance, witness: (wa, wb), exact: classes.orbits_match }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementaryViolation {
    pub formula: String,
    pub tuple: Vec<usize>,
    pub source: Q,
    pub target: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementaryReport {
    pub depth: usize,
    pub formulas: usize,
    pub tuples: usize,
    pub violation_count: usize,
    /// The first violations found, at most [`MAX_REPORTED`].
    pub violations: Vec<ElementaryViolation>,
}

pub const MAX_REPORTED: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElementaryError {
    #[error("{formulas} formulas × {tuples} tuples exceeds the budget of {budget} checks")]
    BudgetExceeded { formulas: u128, tuples: u128, budget: u128 },
    #[error("the map has {got} entries for {expected} points")]
    MapSize { expected: usize, got: usize },
    #[error("the map sends {point} outside the target")]
    MapRange { point: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Checks `φ^M(ā) = φ^N(f(ā))` for every formula of depth at most `depth` in
/// `vars` and every tuple of `M`.
pub fn bounded_elementary_check(
    sig: &Signature,
    m: &FiniteChargedStructure,
    n: &FiniteChargedStructure,
    f: &[usize],
    vars: &[&str],
    depth: usize,
    budget: u128,
) -> Result<ElementaryReport, ElementaryError> {
    if f.len() != m.len() {
        return Err(ElementaryError::MapSize { expected: m.len(), got: f.len() });
    }
    if let Some(point) = f.iter().position(|&b| b >= n.len()) {
        return Err(ElementaryError::MapRange { point });
    }
    let enumerator = FormulaEnumerator::new(sig, vars, &FormulaEnumerator::default_scalars());
    let formulas = enumerator.count_up_to(depth);
    let tuples = (m.len() as u128).pow(vars.len() as u32);
    if formulas.saturating_mul(tuples) > budget {
        return Err(ElementaryError::BudgetExceeded { formulas, tuples, budget });
    }
    let family = enumerator.up_to_depth(depth);
    let cache = depth.saturating_sub(1);
    let mut ev_m = TableEvaluator::new(m, vars).with_cache_depth(cache);
    let mut ev_n = TableEvaluator::new(n, vars).with_cache_depth(cache);
    let image: Vec<usize> = (0..ev_m.len())
        .map(|idx| {
            let t: Vec<usize> = tuple_from_index(m.len(), vars.len(), idx).into_iter().map(|a| f[a]).collect();
            tuple_index(n.len(), &t)
        })
        .collect();
    let mut violations = Vec::new();
    let mut violation_count = 0;
    for phi in &family {
        let (tm, tn) = (ev_m.table(phi)?, ev_n.table(phi)?);
        for (idx, &j) in image.iter().enumerate() {
            if tm[idx] != tn[j] {
                violation_count += 1;
                if violations.len() < MAX_REPORTED {
                    violations.push(ElementaryViolation {
                        formula: phi.to_string(),
                        tuple: tuple_from_index(m.len(), vars.len(), idx),
                        source: tm[idx].clone(),
                        target: tn[j].clone(),
                    });
                }
            }
        }
    }
    Ok(ElementaryReport { depth, formulas: family.len(), tuples: image.len(), violation_count, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::rational::q;
    use crate::semantics::fixtures::two_point;
    use crate::ultramean::{build_powermean, UltrachargeSpace, DEFAULT_PRODUCT_CAP};

    fn sig_c() -> Signature {
        Signature::new().with_constant("c0").unwrap()
    }

    #[test]
    fn realized_type_table() {
        let s = two_point().with_constant("c0", 0).unwrap();
        let fam = vec![
            parse_formula(&sig_c(), "d(x,c0)").unwrap(),
            parse_formula(&sig_c(), "int y. d(x,y)").unwrap(),
            Formula::One,
        ];
        let p = realized_type(&s, &["x"], &[0], &fam).unwrap();
        assert_eq!(p.values(), vec![Q::zero(), q(1, 2), Q::one()]);
        let laws = p.check_laws(&s).unwrap();
        assert!(laws.unit && laws.positive && laws.linear);
    }

    #[test]
    fn linearity_on_sums() {
        let s = two_point();
        let sig = Signature::new();
        let a = parse_formula(&sig, "int y. d(x,y)").unwrap();
        let b = parse_formula(&sig, "sup y. d(x,y)").unwrap();
        let fam = vec![a.clone(), b.clone(), Formula::add(a, b.clone()), Formula::scale(q(-3, 2), b)];
        let p = realized_type(&s, &["x"], &[1], &fam).unwrap();
        assert_eq!(p.values()[2], &p.values()[0] + &p.values()[1]);
        assert!(p.check_laws(&s).unwrap().linear);
    }

    #[test]
    fn plus_map_values() {
        let s = two_point();
        let sig = Signature::new();
        let dist = parse_formula(&sig, "d(x,y)").unwrap();
        let closed = parse_formula(&sig, "int x. d(x,x)").unwrap();
        let mut p = realized_type(&s, &["x"], &[0], &[closed.clone()]).unwrap();
        assert_eq!(plus_map(&p, &dist, "y"), Err(FamilyMiss("int y. d(x,y)".into())));
        p.extend(&s, Formula::int("y", dist.clone())).unwrap();
        p.extend(&s, Formula::int("y", Formula::One)).unwrap();
        p.extend(&s, Formula::int("y", closed.clone())).unwrap();
        assert_eq!(plus_map(&p, &dist, "y").unwrap(), q(1, 2));
        assert_eq!(plus_map(&p, &Formula::One, "y").unwrap(), Q::one());
        assert_eq!(plus_map(&p, &closed, "y").unwrap(), *p.get(&closed).unwrap());
    }

    #[test]
    fn iterated_and_fubini() {
        let s = two_point();
        let sig = Signature::new();
        let d = parse_formula(&sig, "d(x1,x2)").unwrap();
        assert_eq!(iterated_charge(&s, &d, &["x1", "x2"], &Environment::new()).unwrap(), q(1, 2));
        assert_eq!(iterated_charge(&s, &d, &["x2", "x1"], &Environment::new()).unwrap(), q(1, 2));
        assert_eq!(iterated_charge(&s, &Formula::One, &["x1", "x2", "x3"], &Environment::new()).unwrap(), Q::one());
        let r = check_fubini(&s, &parse_formula(&sig, "d(x,y) + 1").unwrap(), "x", "y", &[Environment::new()]).unwrap();
        assert!(r.max_residual.is_zero());
        assert_eq!(r.cases[0].xy, q(3, 2));
    }

    #[test]
    fn type_distance_cases() {
        let sig = Signature::new();
        let s = two_point();
        let d = type_distance(&sig, &s, &[0], &[1], 2).unwrap();
        assert!(d.exact);
        assert_eq!(d.distance, Q::zero());
        assert_eq!(type_distance(&sig, &s, &[1], &[1], 2).unwrap().distance, Q::zero());
        let lopsided =
            FiniteChargedStructure::numbered(vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]], vec![q(1, 4), q(3, 4)])
                .unwrap();
        let d = type_distance(&sig, &lopsided, &[0], &[1], 2).unwrap();
        assert_eq!(d.distance, Q::one());
        assert!(d.exact);
        let single = FiniteChargedStructure::numbered(vec![vec![Q::zero()]], vec![Q::one()]).unwrap();
        assert_eq!(type_distance(&sig, &single, &[0, 0], &[0, 0], 2).unwrap().distance, Q::zero());
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&two_point(), 10).len(), 2);
        let pinned = two_point().with_constant("c", 0).unwrap();
        assert_eq!(automorphisms(&pinned, 10), vec![vec![0, 1]]);
    }

    #[test]
    fn elementary_checks() {
        let sig = Signature::new();
        let m = two_point();
        let r = bounded_elementary_check(&sig, &m, &m, &[0, 1], &["x", "y"], 3, 1 << 30).unwrap();
        assert_eq!(r.violation_count, 0);
        let n = FiniteChargedStructure::numbered(m.metric_rows(), vec![Q::one(), Q::zero()]).unwrap();
        let r = bounded_elementary_check(&sig, &m, &n, &[0, 1], &["x", "y"], 2, 1 << 30).unwrap();
        let target = parse_formula(&sig, "int y. d(x,y)").unwrap().to_string();
        assert!(r.violations.iter().any(|v| v.formula == target && v.tuple[0] == 0 && v.target.is_zero()));
        assert!(matches!(
            bounded_elementary_check(&sig, &m, &m, &[0, 1], &["x", "y"], 3, 10),
            Err(ElementaryError::BudgetExceeded { .. })
        ));
        let p = build_powermean(&sig, &UltrachargeSpace::uniform(2), &m, DEFAULT_PRODUCT_CAP).unwrap();
        let diag: Vec<usize> = (0..m.len()).map(|a| p.diagonal(a)).collect();
        let r = bounded_elementary_check(&sig, &m, &p.structure, &diag, &["x", "y"], 3, 1 << 30).unwrap();
        assert_eq!(r.violation_count, 0);
    }
}
