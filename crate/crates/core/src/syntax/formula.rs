use std::collections::BTreeSet;

use super::SyntaxError;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Inf,
    Sup,
    Int,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Inf => "inf",
            Quantifier::Sup => "sup",
            Quantifier::Int => "int",
        }
    }
}

/// An AL∫ formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    One,
    Rel(String, Vec<Term>),
    Dist(Term, Term),
    Add(Box<Formula>, Box<Formula>),
    Scale(Q, Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

/// The condition `lhs ≤ rhs`. An equation is represented as two conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.mentions(x)),
        }
    }

    fn replace(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => t.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.replace(x, t)).collect()),
        }
    }

    fn rename(&self, scope: &[(String, String)]) -> Term {
        match self {
            Term::Var(y) => match scope.iter().rev().find(|(old, _)| old == y) {
                Some((_, new)) => Term::Var(new.clone()),
                None => self.clone(),
            },
            Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(scope)).collect()),
        }
    }
}

impl Formula {
    pub fn dist(a: Term, b: Term) -> Formula {
        Formula::Dist(a, b)
    }

    pub fn rel(r: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(r.to_string(), args)
    }

    pub fn add(a: Formula, b: Formula) -> Formula {
        Formula::Add(Box::new(a), Box::new(b))
    }

    pub fn scale(r: Q, a: Formula) -> Formula {
        Formula::Scale(r, Box::new(a))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::scale(Q::from_integer(-1), a)
    }

    pub fn quant(q: Quantifier, x: &str, body: Formula) -> Formula {
        Formula::Quant(q, x.to_string(), Box::new(body))
    }

    pub fn inf(x: &str, body: Formula) -> Formula {
        Formula::quant(Quantifier::Inf, x, body)
    }

    pub fn sup(x: &str, body: Formula) -> Formula {
        Formula::quant(Quantifier::Sup, x, body)
    }

    pub fn int(x: &str, body: Formula) -> Formula {
        Formula::quant(Quantifier::Int, x, body)
    }

    /// The constant formula `r`, written `r·1`.
    pub fn constant(r: Q) -> Formula {
        Formula::scale(r, Formula::One)
    }

    /// The constant formula `0 = 0·1`.
    pub fn zero() -> Formula {
        Formula::constant(Q::zero())
    }

    /// Left-associated sum; the empty sum is `0`.
    pub fn sum<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::add)
            .unwrap_or_else(Formula::zero)
    }

    /// The value of a constant formula (`1` or `r·1`), if this is one.
    pub fn as_constant(&self) -> Option<Q> {
        match self {
            Formula::One => Some(Q::one()),
            Formula::Scale(r, body) if **body == Formula::One => Some(r.clone()),
            _ => None,
        }
    }

    /// AST depth; atomic formulas have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::One | Formula::Rel(..) | Formula::Dist(..) => 1,
            Formula::Add(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Scale(_, a) | Formula::Quant(_, _, a) => 1 + a.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::One | Formula::Rel(..) | Formula::Dist(..) => 1,
            Formula::Add(a, b) => 1 + a.size() + b.size(),
            Formula::Scale(_, a) | Formula::Quant(_, _, a) => 1 + a.size(),
        }
    }

    pub fn is_sentence(&self) -> bool {
        super::free_vars(self).is_empty()
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Formula::One => false,
            Formula::Rel(_, args) => args.iter().any(|a| a.mentions(x)),
            Formula::Dist(a, b) => a.mentions(x) || b.mentions(x),
            Formula::Add(a, b) => a.has_free(x) || b.has_free(x),
            Formula::Scale(_, a) => a.has_free(x),
            Formula::Quant(_, y, body) => y != x && body.has_free(x),
        }
    }

    pub(super) fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add_term = |t: &Term, bound: &Vec<String>| {
            for v in t.vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::One => {}
            Formula::Rel(_, args) => args.iter().for_each(|a| add_term(a, bound)),
            Formula::Dist(a, b) => {
                add_term(a, bound);
                add_term(b, bound);
            }
            Formula::Add(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Scale(_, a) => a.collect_free(bound, out),
            Formula::Quant(_, y, body) => {
                bound.push(y.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Replaces every subformula `0·φ` by `0·1`.
    pub fn zero_normalized(&self) -> Formula {
        match self {
            Formula::Scale(r, _) if r.is_zero() => Formula::zero(),
            Formula::One | Formula::Rel(..) | Formula::Dist(..) => self.clone(),
            Formula::Add(a, b) => Formula::add(a.zero_normalized(), b.zero_normalized()),
            Formula::Scale(r, a) => Formula::scale(r.clone(), a.zero_normalized()),
            Formula::Quant(q, x, body) => Formula::Quant(*q, x.clone(), Box::new(body.zero_normalized())),
        }
    }

    /// Every subformula, in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Add(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                Formula::Scale(_, a) | Formula::Quant(_, _, a) => stack.push(a),
                _ => {}
            }
        }
        out
    }
}

fn subst_terms(
    terms: &[&Term],
    x: &str,
    t: &Term,
    tvars: &BTreeSet<String>,
    binders: &[String],
) -> Result<Vec<Term>, SyntaxError> {
    if terms.iter().any(|a| a.mentions(x)) {
        if let Some(captured) = binders.iter().rev().find(|b| tvars.contains(*b)) {
            return Err(SyntaxError::NotSubstitutable { var: x.to_string(), captured: captured.clone() });
        }
    }
    Ok(terms.iter().map(|a| a.replace(x, t)).collect())
}

pub(super) fn subst(
    phi: &Formula,
    x: &str,
    t: &Term,
    tvars: &BTreeSet<String>,
    binders: &mut Vec<String>,
) -> Result<Formula, SyntaxError> {
    Ok(match phi {
        Formula::One => Formula::One,
        Formula::Rel(r, args) => {
            let refs: Vec<&Term> = args.iter().collect();
            Formula::Rel(r.clone(), subst_terms(&refs, x, t, tvars, binders)?)
        }
        Formula::Dist(a, b) => {
            let mut out = subst_terms(&[a, b], x, t, tvars, binders)?;
            let b = out.pop().expect("two terms");
            let a = out.pop().expect("two terms");
            Formula::Dist(a, b)
        }
        Formula::Add(a, b) => Formula::add(subst(a, x, t, tvars, binders)?, subst(b, x, t, tvars, binders)?),
        Formula::Scale(r, a) => Formula::scale(r.clone(), subst(a, x, t, tvars, binders)?),
        Formula::Quant(_, y, _) if y == x => phi.clone(),
        Formula::Quant(q, y, body) => {
            binders.push(y.clone());
            let body = subst(body, x, t, tvars, binders);
            binders.pop();
            Formula::Quant(*q, y.clone(), Box::new(body?))
        }
    })
}

fn canonical_name(level: usize, free: &BTreeSet<String>, names: &mut Vec<String>) -> String {
    while names.len() <= level {
        let mut k = names.last().map_or(0, |last| last[1..].parse::<usize>().expect("vN") + 1);
        while free.contains(&format!("v{k}")) {
            k += 1;
        }
        names.push(format!("v{k}"));
    }
    names[level].clone()
}

pub(super) fn rename_bound(
    phi: &Formula,
    free: &BTreeSet<String>,
    names: &mut Vec<String>,
    scope: &mut Vec<(String, String)>,
) -> Formula {
    match phi {
        Formula::One => Formula::One,
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| a.rename(scope)).collect()),
        Formula::Dist(a, b) => Formula::Dist(a.rename(scope), b.rename(scope)),
        Formula::Add(a, b) => Formula::add(
            rename_bound(a, free, names, scope),
            rename_bound(b, free, names, scope),
        ),
        Formula::Scale(r, a) => Formula::scale(r.clone(), rename_bound(a, free, names, scope)),
        Formula::Quant(q, y, body) => {
            let fresh = canonical_name(scope.len(), free, names);
            scope.push((y.clone(), fresh.clone()));
            let body = rename_bound(body, free, names, scope);
            scope.pop();
            Formula::Quant(*q, fresh, Box::new(body))
        }
    }
}

impl Condition {
    pub fn new(lhs: Formula, rhs: Formula) -> Condition {
        Condition { lhs, rhs }
    }

    /// `lhs = rhs` as the pair `{lhs ≤ rhs, rhs ≤ lhs}`.
    pub fn equation(lhs: Formula, rhs: Formula) -> [Condition; 2] {
        [Condition::new(lhs.clone(), rhs.clone()), Condition::new(rhs, lhs)]
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = super::free_vars(&self.lhs);
        out.extend(super::free_vars(&self.rhs));
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn canonical(&self) -> Condition {
        Condition::new(super::canonicalize(&self.lhs), super::canonicalize(&self.rhs))
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.lhs.has_free(x) || self.rhs.has_free(x)
    }
}
