use std::collections::BTreeMap;

use crate::rational::Q;

/// Interpretation of an `arity`-ary function symbol, row-major over argument
/// tuples (first argument most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    pub arity: usize,
    pub values: Vec<usize>,
}

/// Interpretation of an `arity`-ary relation symbol, row-major like
/// [`FunctionTable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    pub arity: usize,
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("dimension mismatch: {0}")]
pub struct DimensionError(pub String);

/// A finite metric structure carrying a charge on its points.
///
/// Instances are built unvalidated; [`super::validate_structure`] reports
/// every violated axiom. Evaluation assumes a validated structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteChargedStructure {
    labels: Vec<String>,
    metric: Vec<Q>,
    charge: Vec<Q>,
    mass: Q,
    constants: BTreeMap<String, usize>,
    functions: BTreeMap<String, FunctionTable>,
    relations: BTreeMap<String, RelationTable>,
}

/// Row-major index of a tuple of points.
pub fn tuple_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`tuple_index`].
pub fn tuple_from_index(n: usize, arity: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

impl FiniteChargedStructure {
    /// A structure over the empty signature. The declared mass defaults to
    /// the total charge.
    pub fn new(labels: Vec<String>, metric: Vec<Vec<Q>>, charge: Vec<Q>) -> Result<Self, DimensionError> {
        let n = labels.len();
        if n == 0 {
            return Err(DimensionError("a structure needs at least one point".into()));
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(DimensionError(format!("metric must be {n}x{n}")));
        }
        if charge.len() != n {
            return Err(DimensionError(format!("charge has {} entries for {n} points", charge.len())));
        }
        let mass = charge.iter().sum();
        Ok(FiniteChargedStructure {
            labels,
            metric: metric.into_iter().flatten().collect(),
            charge,
            mass,
            constants: BTreeMap::new(),
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
        })
    }

    /// Labels `0..n` as strings.
    pub fn numbered(metric: Vec<Vec<Q>>, charge: Vec<Q>) -> Result<Self, DimensionError> {
        let labels = (0..charge.len()).map(|i| i.to_string()).collect();
        Self::new(labels, metric, charge)
    }

    pub fn with_mass(mut self, mass: Q) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_constant(mut self, name: &str, point: usize) -> Result<Self, DimensionError> {
        if point >= self.len() {
            return Err(DimensionError(format!("constant `{name}` names point {point} of {}", self.len())));
        }
        self.constants.insert(name.to_string(), point);
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize, values: Vec<usize>) -> Result<Self, DimensionError> {
        let n = self.len();
        let want = n.checked_pow(arity as u32).unwrap_or(usize::MAX);
        if values.len() != want {
            return Err(DimensionError(format!(
                "function `{name}` has {} entries, expected {n}^{arity} = {want}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|&&v| v >= n) {
            return Err(DimensionError(format!("function `{name}` maps to point {bad} of {n}")));
        }
        self.functions.insert(name.to_string(), FunctionTable { arity, values });
        Ok(self)
    }

    pub fn with_relation(mut self, name: &str, arity: usize, values: Vec<Q>) -> Result<Self, DimensionError> {
        let n = self.len();
        let want = n.checked_pow(arity as u32).unwrap_or(usize::MAX);
        if values.len() != want {
            return Err(DimensionError(format!(
                "relation `{name}` has {} entries, expected {n}^{arity} = {want}",
                values.len()
            )));
        }
        self.relations.insert(name.to_string(), RelationTable { arity, values });
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    /// Finds a point by label, falling back to a numeric index.
    pub fn point(&self, key: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == key)
            .or_else(|| key.parse::<usize>().ok().filter(|&i| i < self.len()))
    }

    pub fn dist(&self, a: usize, b: usize) -> &Q {
        &self.metric[a * self.len() + b]
    }

    /// Sum metric on tuples.
    pub fn tuple_dist(&self, a: &[usize], b: &[usize]) -> Q {
        a.iter().zip(b).map(|(&x, &y)| self.dist(x, y)).sum()
    }

    pub fn metric_rows(&self) -> Vec<Vec<Q>> {
        self.metric.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn charge(&self, a: usize) -> &Q {
        &self.charge[a]
    }

    pub fn charges(&self) -> &[Q] {
        &self.charge
    }

    /// Declared total charge.
    pub fn mass(&self) -> &Q {
        &self.mass
    }

    pub fn constants(&self) -> &BTreeMap<String, usize> {
        &self.constants
    }

    pub fn functions(&self) -> &BTreeMap<String, FunctionTable> {
        &self.functions
    }

    pub fn relations(&self) -> &BTreeMap<String, RelationTable> {
        &self.relations
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn apply(&self, f: &str, args: &[usize]) -> Option<usize> {
        let table = self.functions.get(f)?;
        (table.arity == args.len()).then(|| table.values[tuple_index(self.len(), args)])
    }

    pub fn relate(&self, r: &str, args: &[usize]) -> Option<&Q> {
        let table = self.relations.get(r)?;
        (table.arity == args.len()).then(|| &table.values[tuple_index(self.len(), args)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn tuple_indexing_round_trips() {
        for idx in 0..27 {
            let t = tuple_from_index(3, 3, idx);
            assert_eq!(tuple_index(3, &t), idx);
        }
        assert_eq!(tuple_from_index(3, 2, 5), vec![1, 2]);
    }

    #[test]
    fn dimension_checks() {
        let half = q(1, 2);
        assert!(FiniteChargedStructure::numbered(
            vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]],
            vec![half.clone()]
        )
        .is_err());
        let s = FiniteChargedStructure::numbered(
            vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]],
            vec![half.clone(), half],
        )
        .unwrap();
        assert_eq!(s.mass(), &Q::one());
        assert!(s.clone().with_function("F", 1, vec![0]).is_err());
        assert!(s.clone().with_function("F", 1, vec![0, 2]).is_err());
        assert!(s.clone().with_constant("c", 2).is_err());
        assert!(s.clone().with_relation("R", 2, vec![Q::zero(); 4]).is_ok());
        assert_eq!(s.point("1"), Some(1));
        assert_eq!(s.point("7"), None);
    }
}
