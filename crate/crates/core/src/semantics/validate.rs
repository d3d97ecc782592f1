use std::fmt;

use serde::Serialize;

use super::{tuple_from_index, FiniteChargedStructure};
use crate::rational::Q;
use crate::syntax::Signature;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Accept any total charge in `[0, 1]` instead of exactly 1.
    pub allow_submass: bool,
    /// Accept distinct points at distance 0.
    pub allow_pseudometric: bool,
}

/// A violated structure axiom with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    EmptyCarrier,
    Reflexivity { point: usize, value: Q },
    Symmetry { a: usize, b: usize, ab: Q, ba: Q },
    Triangle { a: usize, b: usize, c: usize },
    DistanceOutOfRange { a: usize, b: usize, value: Q },
    IdentityOfIndiscernibles { a: usize, b: usize },
    FunctionLipschitz { symbol: String, args: Vec<usize>, other: Vec<usize> },
    RelationLipschitz { symbol: String, args: Vec<usize>, other: Vec<usize> },
    RelationOutOfRange { symbol: String, args: Vec<usize>, value: Q },
    NegativeCharge { point: usize, value: Q },
    MassMismatch { declared: Q, total: Q },
    MassOutOfRange { mass: Q },
    MissingInterpretation { symbol: String },
    UnexpectedInterpretation { symbol: String },
    ArityMismatch { symbol: String, expected: usize, found: usize },
}

impl Violation {
    /// The axiom of the calculus this violation contradicts, if any.
    pub fn axiom(&self) -> Option<&'static str> {
        Some(match self {
            Violation::Reflexivity { .. } => "A19",
            Violation::Symmetry { .. } => "A20",
            Violation::Triangle { .. } => "A21",
            Violation::FunctionLipschitz { .. } => "A22",
            Violation::RelationLipschitz { .. } => "A23",
            Violation::DistanceOutOfRange { .. } | Violation::RelationOutOfRange { .. } => "A24",
            Violation::MassMismatch { .. } | Violation::MassOutOfRange { .. } => "A15",
            _ => return None,
        })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(ax) = self.axiom() {
            write!(f, "[{ax}] ")?;
        }
        match self {
            Violation::EmptyCarrier => write!(f, "the carrier is empty"),
            Violation::Reflexivity { point, value } => write!(f, "d({point},{point}) = {value}"),
            Violation::Symmetry { a, b, ab, ba } => write!(f, "d({a},{b}) = {ab} but d({b},{a}) = {ba}"),
            Violation::Triangle { a, b, c } => write!(f, "d({a},{c}) > d({a},{b}) + d({b},{c})"),
            Violation::DistanceOutOfRange { a, b, value } => write!(f, "d({a},{b}) = {value} lies outside [0,1]"),
            Violation::IdentityOfIndiscernibles { a, b } => write!(f, "distinct points {a} and {b} are at distance 0"),
            Violation::FunctionLipschitz { symbol, args, other } => {
                write!(f, "`{symbol}` exceeds its Lipschitz constant between {args:?} and {other:?}")
            }
            Violation::RelationLipschitz { symbol, args, other } => {
                write!(f, "`{symbol}` exceeds its Lipschitz constant between {args:?} and {other:?}")
            }
            Violation::RelationOutOfRange { symbol, args, value } => {
                write!(f, "`{symbol}`{args:?} = {value} lies outside [0,1]")
            }
            Violation::NegativeCharge { point, value } => write!(f, "charge of point {point} is {value}"),
            Violation::MassMismatch { declared, total } => {
                write!(f, "declared mass {declared} but charges sum to {total}")
            }
            Violation::MassOutOfRange { mass } => write!(f, "total mass {mass} is not allowed"),
            Violation::MissingInterpretation { symbol } => write!(f, "`{symbol}` is not interpreted"),
            Violation::UnexpectedInterpretation { symbol } => write!(f, "`{symbol}` is not in the signature"),
            Violation::ArityMismatch { symbol, expected, found } => {
                write!(f, "`{symbol}` has arity {found}, signature says {expected}")
            }
        }
    }
}

/// Checks every structure axiom exhaustively and reports all violations.
pub fn validate_structure(sig: &Signature, s: &FiniteChargedStructure, opts: ValidationOptions) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.len();
    if n == 0 {
        out.push(Violation::EmptyCarrier);
        return out;
    }
    let zero = Q::zero();
    let one = Q::one();
    for a in 0..n {
        if !s.dist(a, a).is_zero() {
            out.push(Violation::Reflexivity { point: a, value: s.dist(a, a).clone() });
        }
        for b in 0..n {
            let ab = s.dist(a, b);
            if ab < &zero || ab > &one {
                out.push(Violation::DistanceOutOfRange { a, b, value: ab.clone() });
            }
            if a < b {
                if ab != s.dist(b, a) {
                    out.push(Violation::Symmetry { a, b, ab: ab.clone(), ba: s.dist(b, a).clone() });
                }
                if ab.is_zero() && !opts.allow_pseudometric {
                    out.push(Violation::IdentityOfIndiscernibles { a, b });
                }
            }
        }
    }
    // (a,b,c) and (c,b,a) are reported once, as the triple with a < c
    for a in 0..n {
        for c in (a + 1)..n {
            for b in 0..n {
                if s.dist(a, c) > &(s.dist(a, b) + s.dist(b, c)) || s.dist(c, a) > &(s.dist(c, b) + s.dist(b, a)) {
                    out.push(Violation::Triangle { a, b, c });
                }
            }
        }
    }

    for c in sig.constants() {
        if s.constant(c).is_none() {
            out.push(Violation::MissingInterpretation { symbol: c.clone() });
        }
    }
    for c in s.constants().keys() {
        if !sig.is_constant(c) {
            out.push(Violation::UnexpectedInterpretation { symbol: c.clone() });
        }
    }
    for f in sig.functions() {
        let Some(table) = s.functions().get(&f.name) else {
            out.push(Violation::MissingInterpretation { symbol: f.name.clone() });
            continue;
        };
        if table.arity != f.arity {
            out.push(Violation::ArityMismatch { symbol: f.name.clone(), expected: f.arity, found: table.arity });
            continue;
        }
        let size = table.values.len();
        for i in 0..size {
            let args = tuple_from_index(n, f.arity, i);
            for j in (i + 1)..size {
                let other = tuple_from_index(n, f.arity, j);
                let lhs = s.dist(table.values[i], table.values[j]);
                if lhs > &(&f.lipschitz * &s.tuple_dist(&args, &other)) {
                    out.push(Violation::FunctionLipschitz { symbol: f.name.clone(), args: args.clone(), other });
                }
            }
        }
    }
    for r in sig.relations() {
        let Some(table) = s.relations().get(&r.name) else {
            out.push(Violation::MissingInterpretation { symbol: r.name.clone() });
            continue;
        };
        if table.arity != r.arity {
            out.push(Violation::ArityMismatch { symbol: r.name.clone(), expected: r.arity, found: table.arity });
            continue;
        }
        let size = table.values.len();
        for i in 0..size {
            let args = tuple_from_index(n, r.arity, i);
            let v = &table.values[i];
            if v < &zero || v > &one {
                out.push(Violation::RelationOutOfRange { symbol: r.name.clone(), args: args.clone(), value: v.clone() });
            }
            for j in (i + 1)..size {
                let other = tuple_from_index(n, r.arity, j);
                let gap = (v - &table.values[j]).abs();
                if gap > &r.lipschitz * &s.tuple_dist(&args, &other) {
                    out.push(Violation::RelationLipschitz { symbol: r.name.clone(), args: args.clone(), other });
                }
            }
        }
    }
    for name in s.functions().keys().chain(s.relations().keys()) {
        if sig.lookup(name).is_none() {
            out.push(Violation::UnexpectedInterpretation { symbol: name.clone() });
        }
    }

    for (point, m) in s.charges().iter().enumerate() {
        if m.is_negative() {
            out.push(Violation::NegativeCharge { point, value: m.clone() });
        }
    }
    let total: Q = s.charges().iter().sum();
    if &total != s.mass() {
        out.push(Violation::MassMismatch { declared: s.mass().clone(), total });
    }
    let mass = s.mass();
    let mass_ok = if opts.allow_submass { !mass.is_negative() && mass <= &one } else { mass.is_one() };
    if !mass_ok {
        out.push(Violation::MassOutOfRange { mass: mass.clone() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{grid, two_point};
    use super::*;
    use crate::rational::q;

    fn rows(m: &[&[(i64, i64)]]) -> Vec<Vec<Q>> {
        m.iter().map(|r| r.iter().map(|&(a, b)| q(a, b)).collect()).collect()
    }

    #[test]
    fn valid_examples() {
        let sig = Signature::new();
        assert!(validate_structure(&sig, &two_point(), Default::default()).is_empty());
        assert!(validate_structure(&sig, &grid(12), Default::default()).is_empty());
    }

    #[test]
    fn asymmetric_metric() {
        let s = FiniteChargedStructure::numbered(
            rows(&[&[(0, 1), (1, 1)], &[(1, 2), (0, 1)]]),
            vec![q(1, 2), q(1, 2)],
        )
        .unwrap();
        let v = validate_structure(&Signature::new(), &s, Default::default());
        assert!(matches!(v.as_slice(), [Violation::Symmetry { a: 0, b: 1, .. }]), "{v:?}");
        assert_eq!(v[0].axiom(), Some("A20"));
    }

    #[test]
    fn triangle_failure() {
        // distances scaled into [0,1]: 1/5, 1/5 and 1 break the triangle
        let s = FiniteChargedStructure::numbered(
            rows(&[&[(0, 1), (1, 5), (1, 1)], &[(1, 5), (0, 1), (1, 5)], &[(1, 1), (1, 5), (0, 1)]]),
            vec![q(1, 3); 3],
        )
        .unwrap();
        let v = validate_structure(&Signature::new(), &s, Default::default());
        assert_eq!(v, vec![Violation::Triangle { a: 0, b: 1, c: 2 }]);
    }

    #[test]
    fn out_of_range_distances_are_caught() {
        let s = FiniteChargedStructure::numbered(
            rows(&[&[(0, 1), (1, 1), (5, 1)], &[(1, 1), (0, 1), (1, 1)], &[(5, 1), (1, 1), (0, 1)]]),
            vec![q(1, 3); 3],
        )
        .unwrap();
        let v = validate_structure(&Signature::new(), &s, Default::default());
        assert!(v.contains(&Violation::Triangle { a: 0, b: 1, c: 2 }));
        assert!(v.iter().any(|x| x.axiom() == Some("A24")));
    }

    #[test]
    fn charge_and_mass() {
        let s = two_point().with_mass(q(1, 2));
        let v = validate_structure(&Signature::new(), &s, Default::default());
        assert_eq!(v.len(), 2, "{v:?}");
        let half = FiniteChargedStructure::numbered(rows(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]), vec![q(1, 4), q(1, 4)])
            .unwrap();
        assert_eq!(validate_structure(&Signature::new(), &half, Default::default()).len(), 1);
        let opts = ValidationOptions { allow_submass: true, ..Default::default() };
        assert!(validate_structure(&Signature::new(), &half, opts).is_empty());
    }

    #[test]
    fn symbols() {
        let sig = Signature::new()
            .with_constant("c")
            .unwrap()
            .with_function("F", 1, Q::one())
            .unwrap()
            .with_relation("R", 1, q(1, 2))
            .unwrap();
        let good = two_point()
            .with_constant("c", 0)
            .unwrap()
            .with_function("F", 1, vec![1, 0])
            .unwrap()
            .with_relation("R", 1, vec![q(1, 4), q(3, 4)])
            .unwrap();
        assert!(validate_structure(&sig, &good, Default::default()).is_empty());
        let steep = good.clone().with_relation("R", 1, vec![Q::zero(), Q::one()]).unwrap();
        let v = validate_structure(&sig, &steep, Default::default());
        assert!(matches!(v.as_slice(), [Violation::RelationLipschitz { .. }]), "{v:?}");
        let missing = two_point().with_constant("c", 0).unwrap();
        assert_eq!(validate_structure(&sig, &missing, Default::default()).len(), 2);
        let sig0 = Signature::new().with_function("F", 1, Q::zero()).unwrap();
        let m = two_point().with_function("F", 1, vec![1, 0]).unwrap();
        assert!(matches!(
            validate_structure(&sig0, &m, Default::default()).as_slice(),
            [Violation::FunctionLipschitz { .. }]
        ));
    }

    #[test]
    fn pseudometric_zeros() {
        let s = FiniteChargedStructure::numbered(rows(&[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]]), vec![q(1, 4), q(3, 4)])
            .unwrap();
        let sig = Signature::new();
        assert_eq!(
            validate_structure(&sig, &s, Default::default()),
            vec![Violation::IdentityOfIndiscernibles { a: 0, b: 1 }]
        );
        let opts = ValidationOptions { allow_pseudometric: true, ..Default::default() };
        assert!(validate_structure(&sig, &s, opts).is_empty());
    }
}
