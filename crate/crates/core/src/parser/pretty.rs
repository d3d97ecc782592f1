//! Concrete syntax printing. The output always reparses to the same AST.

use std::fmt;

use crate::syntax::{Condition, Formula, Term, METRIC_SYMBOL};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => f.write_str(x),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// Quantifier bodies extend maximally to the right, so a quantifier used as
// an operand is always parenthesized.
fn operand(phi: &Formula, f: &mut fmt::Formatter<'_>, right_of_plus: bool) -> fmt::Result {
    match phi {
        Formula::Quant(..) => write!(f, "({phi})"),
        Formula::Add(..) if right_of_plus => write!(f, "({phi})"),
        _ => write!(f, "{phi}"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::One => f.write_str("1"),
            Formula::Rel(r, args) => write!(f, "{}", Term::App(r.clone(), args.clone())),
            Formula::Dist(a, b) => write!(f, "{METRIC_SYMBOL}({a},{b})"),
            Formula::Add(a, b) => {
                operand(a, f, false)?;
                f.write_str(" + ")?;
                operand(b, f, true)
            }
            Formula::Scale(r, body) => {
                write!(f, "{r} * ")?;
                match **body {
                    Formula::Add(..) | Formula::Quant(..) => write!(f, "({body})"),
                    _ => write!(f, "{body}"),
                }
            }
            Formula::Quant(q, x, body) => write!(f, "{} {x}. {body}", q.keyword()),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

/// Formulas and conditions serialize as their concrete syntax.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
