use super::{tuple_from_index, tuple_index, DimensionError, FiniteChargedStructure};
use crate::rational::Q;

/// The metric quotient of a prestructure together with its projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub structure: FiniteChargedStructure,
    /// `class_of[a]` is the point of `structure` that `a` collapses to.
    pub class_of: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error("points {a} and {b} are at distance 0 but `{symbol}` separates them")]
    IllDefined { symbol: String, a: usize, b: usize },
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, a: usize) -> usize {
        let mut root = a;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = a;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    // the smaller index stays the root
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
    }
}

/// Identifies points at distance 0. Classes are numbered by their smallest
/// member, which also supplies the label and the interpretations; charges
/// are summed per class.
///
/// Merged points must agree on every metric, function and relation value,
/// otherwise the result would depend on the representative.
pub fn quotient_structure(p: &FiniteChargedStructure) -> Result<Quotient, QuotientError> {
    let n = p.len();
    let mut uf = UnionFind((0..n).collect());
    for a in 0..n {
        for b in (a + 1)..n {
            if p.dist(a, b).is_zero() && p.dist(b, a).is_zero() {
                uf.union(a, b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|a| uf.find(a)).collect();
    let mut reps = Vec::new();
    let mut class_of = vec![0; n];
    for a in 0..n {
        if roots[a] == a {
            reps.push(a);
        }
        class_of[a] = reps.iter().position(|&r| r == roots[a]).expect("root precedes its members");
    }

    for a in 0..n {
        let r = roots[a];
        if r != a && (0..n).any(|c| p.dist(a, c) != p.dist(r, c) || p.dist(c, a) != p.dist(c, r)) {
            return Err(QuotientError::IllDefined { symbol: "d".into(), a: r, b: a });
        }
    }

    let k = reps.len();
    let metric = reps.iter().map(|&a| reps.iter().map(|&b| p.dist(a, b).clone()).collect()).collect();
    let mut charge = vec![Q::zero(); k];
    for a in 0..n {
        charge[class_of[a]] += p.charge(a);
    }
    let labels = reps.iter().map(|&a| p.label(a).to_string()).collect();
    let mut out = FiniteChargedStructure::new(labels, metric, charge)?.with_mass(p.mass().clone());

    for (name, &c) in p.constants() {
        out = out.with_constant(name, class_of[c])?;
    }
    for (name, table) in p.functions() {
        let mut values = vec![usize::MAX; k.pow(table.arity as u32)];
        for (i, &v) in table.values.iter().enumerate() {
            let args = tuple_from_index(n, table.arity, i);
            let cls: Vec<usize> = args.iter().map(|&a| class_of[a]).collect();
            let slot = &mut values[tuple_index(k, &cls)];
            if *slot == usize::MAX {
                *slot = class_of[v];
            } else if *slot != class_of[v] {
                return Err(ill_defined(name, &args, &roots));
            }
        }
        out = out.with_function(name, table.arity, values)?;
    }
    for (name, table) in p.relations() {
        let mut values: Vec<Option<Q>> = vec![None; k.pow(table.arity as u32)];
        for (i, v) in table.values.iter().enumerate() {
            let args = tuple_from_index(n, table.arity, i);
            let cls: Vec<usize> = args.iter().map(|&a| class_of[a]).collect();
            match &mut values[tuple_index(k, &cls)] {
                slot @ None => *slot = Some(v.clone()),
                Some(w) if w == v => {}
                Some(_) => return Err(ill_defined(name, &args, &roots)),
            }
        }
        out = out.with_relation(name, table.arity, values.into_iter().map(|v| v.expect("every class is hit")).collect())?;
    }
    Ok(Quotient { structure: out, class_of })
}

fn ill_defined(symbol: &str, args: &[usize], roots: &[usize]) -> QuotientError {
    let b = args.iter().copied().find(|&a| roots[a] != a).unwrap_or(args[0]);
    QuotientError::IllDefined { symbol: symbol.to_string(), a: roots[b], b }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::two_point;
    use super::super::{eval_formula, Environment};
    use super::*;
    use crate::rational::q;
    use crate::syntax::{FormulaEnumerator, Signature};

    fn pseudo() -> FiniteChargedStructure {
        // points 0 and 2 coincide
        FiniteChargedStructure::numbered(
            vec![
                vec![q(0, 1), q(1, 2), q(0, 1)],
                vec![q(1, 2), q(0, 1), q(1, 2)],
                vec![q(0, 1), q(1, 2), q(0, 1)],
            ],
            vec![q(1, 4), q(1, 2), q(1, 4)],
        )
        .unwrap()
    }

    #[test]
    fn merges_zero_distance_points() {
        let p = FiniteChargedStructure::numbered(vec![vec![Q::zero(); 2]; 2], vec![q(1, 4), q(3, 4)]).unwrap();
        let k = quotient_structure(&p).unwrap();
        assert_eq!(k.structure.len(), 1);
        assert_eq!(k.structure.charge(0), &Q::one());
        assert_eq!(k.class_of, vec![0, 0]);
    }

    #[test]
    fn metric_spaces_are_unchanged() {
        let m = two_point().with_relation("R", 1, vec![q(1, 3), q(2, 3)]).unwrap();
        let k = quotient_structure(&m).unwrap();
        assert_eq!(k.structure, m);
        assert_eq!(k.class_of, vec![0, 1]);
    }

    #[test]
    fn idempotent_and_value_preserving() {
        let p = pseudo()
            .with_relation("R", 1, vec![q(1, 5), q(3, 5), q(1, 5)])
            .unwrap()
            .with_function("F", 1, vec![1, 2, 1])
            .unwrap();
        let k = quotient_structure(&p).unwrap();
        assert_eq!(k.structure.len(), 2);
        assert_eq!(k.class_of, vec![0, 1, 0]);
        assert_eq!(k.structure.charge(0), &q(1, 2));
        assert_eq!(quotient_structure(&k.structure).unwrap().structure, k.structure);

        let sig = Signature::new()
            .with_function("F", 1, Q::one())
            .unwrap()
            .with_relation("R", 1, Q::one())
            .unwrap();
        let formulas = FormulaEnumerator::new(&sig, &["x", "y"], &[q(-1, 1), q(1, 2)]).up_to_depth(2);
        for phi in &formulas {
            for a in 0..3 {
                for b in 0..3 {
                    let e = Environment::new().with("x", a).with("y", b);
                    let e2 = Environment::new().with("x", k.class_of[a]).with("y", k.class_of[b]);
                    assert_eq!(eval_formula(&p, phi, &e).unwrap(), eval_formula(&k.structure, phi, &e2).unwrap(), "{phi}");
                }
            }
        }
    }

    #[test]
    fn disagreement_is_reported() {
        let p = pseudo().with_relation("R", 1, vec![q(1, 5), q(3, 5), q(2, 5)]).unwrap();
        assert_eq!(
            quotient_structure(&p).unwrap_err(),
            QuotientError::IllDefined { symbol: "R".into(), a: 0, b: 2 }
        );
    }
}
