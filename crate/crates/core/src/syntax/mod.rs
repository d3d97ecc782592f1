//! Signatures, terms and formulas of affine integration logic, together with
//! the syntactic Lipschitz-constant and bound calculus.

mod enumerate;
mod formula;
mod signature;

pub use enumerate::FormulaEnumerator;
pub use formula::{Condition, Formula, Quantifier, Term};
pub use signature::{FunctionSymbol, RelationSymbol, Signature, SignatureDoc, Symbol};

use std::collections::BTreeSet;

use crate::rational::Q;

/// Name of the metric symbol in concrete syntax. It is binary, has Lipschitz
/// constant 1 and can never be declared by a signature.
pub const METRIC_SYMBOL: &str = "d";

/// Words that cannot be used as symbol or variable names.
pub const RESERVED_WORDS: &[&str] = &["d", "inf", "sup", "int"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("`{0}` is declared more than once")]
    DuplicateSymbol(String),
    #[error("`{0}` is reserved")]
    ReservedSymbol(String),
    #[error("symbol `{0}` needs arity at least 1")]
    ZeroArity(String),
    #[error("Lipschitz constant of `{0}` is negative")]
    NegativeLipschitz(String),
    #[error("`{symbol}` is a {actual}, not a {wanted}")]
    WrongKind { symbol: String, wanted: &'static str, actual: &'static str },
    #[error("term is not substitutable for `{var}`: `{captured}` would be captured")]
    NotSubstitutable { var: String, captured: String },
}

/// Lipschitz constant of a term: 1 for variables, 0 for constants and
/// `λ_F · Σ λ_tᵢ` for applications.
pub fn term_lipschitz(sig: &Signature, t: &Term) -> Result<Q, SyntaxError> {
    match t {
        Term::Var(_) => Ok(Q::one()),
        Term::Const(c) => match sig.lookup(c) {
            Some(Symbol::Constant) => Ok(Q::zero()),
            Some(other) => Err(SyntaxError::WrongKind {
                symbol: c.clone(),
                wanted: "constant",
                actual: other.kind(),
            }),
            None => Err(SyntaxError::UnknownSymbol(c.clone())),
        },
        Term::App(f, args) => {
            let sym = sig.function(f)?;
            if sym.arity != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: f.clone(),
                    expected: sym.arity,
                    found: args.len(),
                });
            }
            let mut total = Q::zero();
            for a in args {
                total += term_lipschitz(sig, a)?;
            }
            Ok(&sym.lipschitz * &total)
        }
    }
}

/// Lipschitz constant and bound `(λ_φ, b_φ)` of a formula.
pub fn formula_lipschitz_bound(sig: &Signature, phi: &Formula) -> Result<(Q, Q), SyntaxError> {
    match phi {
        Formula::One => Ok((Q::zero(), Q::one())),
        Formula::Rel(r, args) => {
            let sym = sig.relation(r)?;
            if sym.arity != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: r.clone(),
                    expected: sym.arity,
                    found: args.len(),
                });
            }
            let mut total = Q::zero();
            for a in args {
                total += term_lipschitz(sig, a)?;
            }
            Ok((&sym.lipschitz * &total, Q::one()))
        }
        Formula::Dist(a, b) => {
            let total = term_lipschitz(sig, a)? + term_lipschitz(sig, b)?;
            Ok((total, Q::one()))
        }
        Formula::Add(a, b) => {
            let (la, ba) = formula_lipschitz_bound(sig, a)?;
            let (lb, bb) = formula_lipschitz_bound(sig, b)?;
            Ok((la + lb, ba + bb))
        }
        Formula::Scale(r, a) => {
            let (l, b) = formula_lipschitz_bound(sig, a)?;
            let r = r.abs();
            Ok((&r * &l, &r * &b))
        }
        Formula::Quant(_, _, body) => formula_lipschitz_bound(sig, body),
    }
}

/// Checks that every symbol occurrence is declared with the right arity.
pub fn check_formula(sig: &Signature, phi: &Formula) -> Result<(), SyntaxError> {
    formula_lipschitz_bound(sig, phi).map(|_| ())
}

pub fn check_term(sig: &Signature, t: &Term) -> Result<(), SyntaxError> {
    term_lipschitz(sig, t).map(|_| ())
}

pub fn free_vars(phi: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    phi.collect_free(&mut Vec::new(), &mut out);
    out
}

/// Capture-free substitution `φ[t/x]`.
pub fn substitute(phi: &Formula, x: &str, t: &Term) -> Result<Formula, SyntaxError> {
    let tvars = t.vars();
    formula::subst(phi, x, t, &tvars, &mut Vec::new())
}

/// Renames bound variables canonically so that α-equivalent formulas become
/// identical. The `k`-th nesting level of binders gets the `k`-th name from
/// `v0, v1, ...` that is not free in the formula.
pub fn alpha_normalize(phi: &Formula) -> Formula {
    let free = free_vars(phi);
    let mut names = Vec::new();
    formula::rename_bound(phi, &free, &mut names, &mut Vec::new())
}

/// Kernel normal form: every `0·φ` becomes the constant formula `0·1`, then
/// bound variables are α-normalized. Two formulas are identified by the
/// proof kernel iff their canonical forms coincide.
pub fn canonicalize(phi: &Formula) -> Formula {
    alpha_normalize(&phi.zero_normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn sig() -> Signature {
        Signature::new()
            .with_constant("c")
            .unwrap()
            .with_function("F", 2, Q::from_integer(2))
            .unwrap()
            .with_relation("R", 1, q(1, 2))
            .unwrap()
    }

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn term_constants() {
        let s = sig();
        assert_eq!(term_lipschitz(&s, &v("x")).unwrap(), Q::one());
        assert_eq!(term_lipschitz(&s, &Term::constant("c")).unwrap(), Q::zero());
        let fxy = Term::app("F", vec![v("x"), v("y")]);
        assert_eq!(term_lipschitz(&s, &fxy).unwrap(), Q::from_integer(4));
        let nested = Term::app("F", vec![fxy, Term::constant("c")]);
        assert_eq!(term_lipschitz(&s, &nested).unwrap(), Q::from_integer(8));
    }

    #[test]
    fn term_errors() {
        let s = sig();
        assert_eq!(
            term_lipschitz(&s, &Term::app("G", vec![v("x")])),
            Err(SyntaxError::UnknownSymbol("G".into()))
        );
        assert!(matches!(
            term_lipschitz(&s, &Term::app("F", vec![v("x")])),
            Err(SyntaxError::ArityMismatch { expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn formula_constants() {
        let s = sig();
        assert_eq!(formula_lipschitz_bound(&s, &Formula::One).unwrap(), (Q::zero(), Q::one()));
        let dxy = Formula::dist(v("x"), v("y"));
        assert_eq!(formula_lipschitz_bound(&s, &dxy).unwrap(), (Q::from_integer(2), Q::one()));
        let int = Formula::int("y", dxy.clone());
        assert_eq!(
            formula_lipschitz_bound(&s, &int).unwrap(),
            formula_lipschitz_bound(&s, &dxy).unwrap()
        );
        let mixed = Formula::add(Formula::scale(q(-3, 2), dxy), Formula::rel("R", vec![v("x")]));
        assert_eq!(
            formula_lipschitz_bound(&s, &mixed).unwrap(),
            (Q::from_integer(3) + q(1, 2), q(5, 2))
        );
        assert!(matches!(
            formula_lipschitz_bound(&s, &Formula::rel("R", vec![])),
            Err(SyntaxError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn free_variable_examples() {
        let dxy = Formula::dist(v("x"), v("y"));
        assert_eq!(free_vars(&dxy), ["x", "y"].iter().map(|s| s.to_string()).collect());
        assert_eq!(free_vars(&Formula::int("y", dxy)), ["x".to_string()].into());
        assert!(free_vars(&Formula::One).is_empty());
    }

    #[test]
    fn substitution_examples() {
        let dxy = Formula::dist(v("x"), v("y"));
        assert_eq!(
            substitute(&dxy, "x", &Term::constant("c")).unwrap(),
            Formula::dist(Term::constant("c"), v("y"))
        );
        let int = Formula::int("y", dxy.clone());
        assert_eq!(
            substitute(&int, "x", &v("y")),
            Err(SyntaxError::NotSubstitutable { var: "x".into(), captured: "y".into() })
        );
        assert_eq!(substitute(&Formula::One, "x", &v("z")).unwrap(), Formula::One);
        // bound occurrences are untouched and cannot capture
        let shadow = Formula::sup("x", Formula::int("y", dxy));
        assert_eq!(substitute(&shadow, "x", &v("y")).unwrap(), shadow);
    }

    #[test]
    fn alpha_examples() {
        let a = Formula::sup("y", Formula::dist(v("x"), v("y")));
        let b = Formula::sup("z", Formula::dist(v("x"), v("z")));
        let expected = Formula::sup("v0", Formula::dist(v("x"), v("v0")));
        assert_eq!(alpha_normalize(&a), expected);
        assert_eq!(alpha_normalize(&b), expected);
        let plain = Formula::dist(v("x"), v("y"));
        assert_eq!(alpha_normalize(&plain), plain);
    }

    #[test]
    fn alpha_avoids_free_names() {
        let phi = Formula::sup("y", Formula::dist(v("v0"), v("y")));
        let n = alpha_normalize(&phi);
        assert_eq!(n, Formula::sup("v1", Formula::dist(v("v0"), v("v1"))));
        assert_eq!(free_vars(&n), free_vars(&phi));
    }

    #[test]
    fn canonical_zero() {
        let phi = Formula::scale(Q::zero(), Formula::dist(v("x"), v("y")));
        assert_eq!(canonicalize(&phi), Formula::zero());
        let nested = Formula::add(Formula::One, Formula::scale(Q::zero(), Formula::One));
        assert_eq!(canonicalize(&nested), Formula::add(Formula::One, Formula::zero()));
    }
}
