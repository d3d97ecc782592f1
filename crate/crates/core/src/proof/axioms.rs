use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::StepFailure;
use crate::rational::Q;
use crate::syntax::{
    check_formula, check_term, substitute, Condition, Formula, Signature, Symbol, SyntaxError, Term, METRIC_SYMBOL,
    RESERVED_WORDS,
};

/// One of the logical axioms `A1`–`A24`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxiomId(u8);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown axiom `{0}`")]
pub struct UnknownAxiom(pub String);

impl AxiomId {
    pub const ALL: [AxiomId; 24] = {
        let mut out = [AxiomId(1); 24];
        let mut i = 0;
        while i < 24 {
            out[i] = AxiomId(i as u8 + 1);
            i += 1;
        }
        out
    };

    pub fn new(n: u8) -> Option<AxiomId> {
        (1..=24).contains(&n).then_some(AxiomId(n))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Metavariables of the schema with the kind of value each one takes.
    pub fn metavariables(self) -> &'static [(&'static str, BindingKind)] {
        use BindingKind::*;
        match self.0 {
            1 => &[("r", Rational), ("s", Rational)],
            2 => &[("phi", Formula), ("psi", Formula), ("theta", Formula)],
            3 => &[("phi", Formula), ("psi", Formula)],
            4 | 8 | 9 => &[("phi", Formula)],
            5 => &[("r", Rational), ("phi", Formula), ("psi", Formula)],
            6 | 7 => &[("r", Rational), ("s", Rational), ("phi", Formula)],
            10 => &[("phi", Formula), ("x", Var), ("t", Term)],
            11 | 12 | 16 => &[("x", Var), ("phi", Formula), ("psi", Formula)],
            13 | 17 => &[("x", Var), ("r", Rational), ("phi", Formula)],
            14 | 18 => &[("x", Var), ("phi", Formula)],
            15 => &[("x", Var)],
            19 => &[("x", Term)],
            20 => &[("x", Term), ("y", Term)],
            21 => &[("x", Term), ("y", Term), ("z", Term)],
            22 | 23 => &[("symbol", Symbol), ("xs", Terms), ("ys", Terms)],
            24 => &[("symbol", Symbol), ("xs", Terms)],
            _ => unreachable!("axiom ids are 1..=24"),
        }
    }

    pub fn kind_of(self, name: &str) -> Option<BindingKind> {
        self.metavariables().iter().find(|(n, _)| *n == name).map(|&(_, k)| k)
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

impl FromStr for AxiomId {
    type Err = UnknownAxiom;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('A')
            .and_then(|n| if n.starts_with('0') { None } else { n.parse::<u8>().ok() })
            .and_then(AxiomId::new)
            .ok_or_else(|| UnknownAxiom(s.to_string()))
    }
}

impl Serialize for AxiomId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingKind {
    Formula,
    Var,
    Term,
    Rational,
    /// A function or relation name; `d` is allowed where the schema ranges
    /// over relations including the metric.
    Symbol,
    Terms,
}

impl fmt::Display for BindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BindingKind::Formula => "formula",
            BindingKind::Var => "variable",
            BindingKind::Term => "term",
            BindingKind::Rational => "rational",
            BindingKind::Symbol => "symbol",
            BindingKind::Terms => "term list",
        })
    }
}

/// Value of one schema metavariable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Formula(Formula),
    Var(String),
    Term(Term),
    Rational(Q),
    Symbol(String),
    Terms(Vec<Term>),
}

impl Binding {
    pub fn kind(&self) -> BindingKind {
        match self {
            Binding::Formula(_) => BindingKind::Formula,
            Binding::Var(_) => BindingKind::Var,
            Binding::Term(_) => BindingKind::Term,
            Binding::Rational(_) => BindingKind::Rational,
            Binding::Symbol(_) => BindingKind::Symbol,
            Binding::Terms(_) => BindingKind::Terms,
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Formula(phi) => write!(f, "{phi}"),
            Binding::Var(x) | Binding::Symbol(x) => f.write_str(x),
            Binding::Term(t) => write!(f, "{t}"),
            Binding::Rational(r) => write!(f, "{r}"),
            Binding::Terms(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

pub type Bindings = BTreeMap<String, Binding>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error(transparent)]
    UnknownAxiom(#[from] UnknownAxiom),
    #[error("malformed bindings: {0}")]
    MalformedBindings(String),
}

struct Args<'a> {
    axiom: AxiomId,
    b: &'a Bindings,
}

impl Args<'_> {
    fn malformed(&self, msg: String) -> StepFailure {
        StepFailure::MalformedBindings { message: format!("{}: {msg}", self.axiom) }
    }

    fn formula(&self, name: &str) -> Result<Formula, StepFailure> {
        match self.b.get(name) {
            Some(Binding::Formula(f)) => Ok(f.clone()),
            _ => Err(self.malformed(format!("`{name}` must be a formula"))),
        }
    }

    fn var(&self, name: &str) -> Result<String, StepFailure> {
        match self.b.get(name) {
            Some(Binding::Var(x)) => Ok(x.clone()),
            _ => Err(self.malformed(format!("`{name}` must be a variable"))),
        }
    }

    fn term(&self, name: &str) -> Result<Term, StepFailure> {
        match self.b.get(name) {
            Some(Binding::Term(t)) => Ok(t.clone()),
            Some(Binding::Var(x)) => Ok(Term::var(x)),
            _ => Err(self.malformed(format!("`{name}` must be a term"))),
        }
    }

    fn rational(&self, name: &str) -> Result<Q, StepFailure> {
        match self.b.get(name) {
            Some(Binding::Rational(r)) => Ok(r.clone()),
            _ => Err(self.malformed(format!("`{name}` must be a rational"))),
        }
    }

    fn symbol(&self, name: &str) -> Result<String, StepFailure> {
        match self.b.get(name) {
            Some(Binding::Symbol(s)) => Ok(s.clone()),
            _ => Err(self.malformed(format!("`{name}` must be a symbol"))),
        }
    }

    fn terms(&self, name: &str) -> Result<Vec<Term>, StepFailure> {
        match self.b.get(name) {
            Some(Binding::Terms(ts)) => Ok(ts.clone()),
            Some(Binding::Term(t)) => Ok(vec![t.clone()]),
            _ => Err(self.malformed(format!("`{name}` must be a term list"))),
        }
    }
}

/// Checks that the bindings name exactly the schema's metavariables with
/// values of the right kind that are well formed over `sig`.
pub fn check_bindings(sig: &Signature, axiom: AxiomId, bindings: &Bindings) -> Result<(), StepFailure> {
    let malformed = |message: String| StepFailure::MalformedBindings { message: format!("{axiom}: {message}") };
    for (name, kind) in axiom.metavariables() {
        let Some(value) = bindings.get(*name) else {
            return Err(malformed(format!("missing metavariable `{name}`")));
        };
        let ok = match (kind, value) {
            (BindingKind::Term, Binding::Var(_)) | (BindingKind::Terms, Binding::Term(_)) => true,
            (k, v) => *k == v.kind(),
        };
        if !ok {
            return Err(malformed(format!("`{name}` must be a {kind}, got a {}", value.kind())));
        }
        let wf = match value {
            Binding::Formula(f) => check_formula(sig, f),
            Binding::Term(t) => check_term(sig, t),
            Binding::Terms(ts) => ts.iter().try_for_each(|t| check_term(sig, t)),
            Binding::Var(x) => match sig.lookup(x) {
                Some(sym) => Err(SyntaxError::WrongKind { symbol: x.clone(), wanted: "variable", actual: sym.kind() }),
                None if RESERVED_WORDS.contains(&x.as_str()) => Err(SyntaxError::ReservedSymbol(x.clone())),
                None => Ok(()),
            },
            Binding::Rational(_) | Binding::Symbol(_) => Ok(()),
        };
        wf.map_err(|e| malformed(format!("`{name}`: {e}")))?;
    }
    if let Some(extra) = bindings.keys().find(|k| axiom.kind_of(k).is_none()) {
        return Err(malformed(format!("unexpected metavariable `{extra}`")));
    }
    Ok(())
}

fn both_ways(lhs: Formula, rhs: Formula) -> Vec<Condition> {
    Condition::equation(lhs, rhs).into()
}

fn side(axiom: AxiomId, message: impl Into<String>) -> StepFailure {
    StepFailure::SideCondition { axiom, message: message.into() }
}

fn metric_sum(xs: &[Term], ys: &[Term]) -> Formula {
    Formula::sum(xs.iter().zip(ys).map(|(x, y)| Formula::dist(x.clone(), y.clone())))
}

/// The conditions the schema instance stands for: one for an inequality, both
/// directions for an equation, and the two bounds for `A24`. Side conditions
/// are enforced here.
pub fn axiom_instances(sig: &Signature, axiom: AxiomId, bindings: &Bindings) -> Result<Vec<Condition>, StepFailure> {
    check_bindings(sig, axiom, bindings)?;
    let a = Args { axiom, b: bindings };
    use Formula as F;
    let zero = F::zero;
    Ok(match axiom.0 {
        1 => {
            let (r, s) = (a.rational("r")?, a.rational("s")?);
            if r > s {
                return Err(side(axiom, format!("{r} <= {s} is false")));
            }
            vec![Condition::new(F::constant(r), F::constant(s))]
        }
        2 => {
            let (p, q, t) = (a.formula("phi")?, a.formula("psi")?, a.formula("theta")?);
            both_ways(F::add(p.clone(), F::add(q.clone(), t.clone())), F::add(F::add(p, q), t))
        }
        3 => {
            let (p, q) = (a.formula("phi")?, a.formula("psi")?);
            both_ways(F::add(p.clone(), q.clone()), F::add(q, p))
        }
        4 => {
            let p = a.formula("phi")?;
            both_ways(F::add(zero(), p.clone()), p)
        }
        5 => {
            let (r, p, q) = (a.rational("r")?, a.formula("phi")?, a.formula("psi")?);
            both_ways(F::scale(r.clone(), F::add(p.clone(), q.clone())), F::add(F::scale(r.clone(), p), F::scale(r, q)))
        }
        6 => {
            let (r, s, p) = (a.rational("r")?, a.rational("s")?, a.formula("phi")?);
            both_ways(F::scale(&r + &s, p.clone()), F::add(F::scale(r, p.clone()), F::scale(s, p)))
        }
        7 => {
            let (r, s, p) = (a.rational("r")?, a.rational("s")?, a.formula("phi")?);
            both_ways(F::scale(r.clone(), F::scale(s.clone(), p.clone())), F::scale(&r * &s, p))
        }
        8 => {
            let p = a.formula("phi")?;
            both_ways(F::scale(Q::one(), p.clone()), p)
        }
        9 => {
            let p = a.formula("phi")?;
            both_ways(F::scale(Q::zero(), p), zero())
        }
        10 => {
            let (p, x, t) = (a.formula("phi")?, a.var("x")?, a.term("t")?);
            let inst = substitute(&p, &x, &t).map_err(|e| match e {
                SyntaxError::NotSubstitutable { var, captured } => StepFailure::NotSubstitutable { var, captured },
                other => a.malformed(other.to_string()),
            })?;
            vec![Condition::new(inst, F::sup(&x, p))]
        }
        11 => {
            let (x, p, q) = (a.var("x")?, a.formula("phi")?, a.formula("psi")?);
            if q.has_free(&x) {
                return Err(side(axiom, format!("{x} is free in {q}")));
            }
            both_ways(F::sup(&x, F::add(p.clone(), q.clone())), F::add(F::sup(&x, p), q))
        }
        12 => {
            let (x, p, q) = (a.var("x")?, a.formula("phi")?, a.formula("psi")?);
            vec![Condition::new(F::sup(&x, F::add(p.clone(), q.clone())), F::add(F::sup(&x, p), F::sup(&x, q)))]
        }
        13 => {
            let (x, r, p) = (a.var("x")?, a.rational("r")?, a.formula("phi")?);
            if r.is_negative() {
                return Err(side(axiom, format!("scalar {r} is negative")));
            }
            both_ways(F::sup(&x, F::scale(r.clone(), p.clone())), F::scale(r, F::sup(&x, p)))
        }
        14 => {
            let (x, p) = (a.var("x")?, a.formula("phi")?);
            both_ways(F::sup(&x, p.clone()), F::neg(F::inf(&x, F::neg(p))))
        }
        15 => {
            let x = a.var("x")?;
            both_ways(F::int(&x, F::One), F::One)
        }
        16 => {
            let (x, p, q) = (a.var("x")?, a.formula("phi")?, a.formula("psi")?);
            both_ways(F::int(&x, F::add(p.clone(), q.clone())), F::add(F::int(&x, p), F::int(&x, q)))
        }
        17 => {
            let (x, r, p) = (a.var("x")?, a.rational("r")?, a.formula("phi")?);
            both_ways(F::int(&x, F::scale(r.clone(), p.clone())), F::scale(r, F::int(&x, p)))
        }
        18 => {
            let (x, p) = (a.var("x")?, a.formula("phi")?);
            if p.has_free(&x) {
                return Err(side(axiom, format!("{x} is free in {p}")));
            }
            both_ways(F::int(&x, p.clone()), p)
        }
        19 => {
            let x = a.term("x")?;
            both_ways(F::dist(x.clone(), x), zero())
        }
        20 => {
            let (x, y) = (a.term("x")?, a.term("y")?);
            both_ways(F::dist(x.clone(), y.clone()), F::dist(y, x))
        }
        21 => {
            let (x, y, z) = (a.term("x")?, a.term("y")?, a.term("z")?);
            vec![Condition::new(
                F::dist(x.clone(), z.clone()),
                F::add(F::dist(x, y.clone()), F::dist(y, z)),
            )]
        }
        22 => {
            let (f, xs, ys) = (a.symbol("symbol")?, a.terms("xs")?, a.terms("ys")?);
            let sym = sig.function(&f).map_err(|e| a.malformed(e.to_string()))?;
            if xs.len() != sym.arity || ys.len() != sym.arity {
                return Err(a.malformed(format!("`{f}` takes {} arguments", sym.arity)));
            }
            vec![Condition::new(
                F::dist(Term::app(&f, xs.clone()), Term::app(&f, ys.clone())),
                F::scale(sym.lipschitz.clone(), metric_sum(&xs, &ys)),
            )]
        }
        23 => {
            let (r, xs, ys) = (a.symbol("symbol")?, a.terms("xs")?, a.terms("ys")?);
            let sym = sig.relation(&r).map_err(|e| a.malformed(e.to_string()))?;
            if xs.len() != sym.arity || ys.len() != sym.arity {
                return Err(a.malformed(format!("`{r}` takes {} arguments", sym.arity)));
            }
            vec![Condition::new(
                F::add(F::rel(&r, xs.clone()), F::neg(F::rel(&r, ys.clone()))),
                F::scale(sym.lipschitz.clone(), metric_sum(&xs, &ys)),
            )]
        }
        24 => {
            let (r, xs) = (a.symbol("symbol")?, a.terms("xs")?);
            let atom = if r == METRIC_SYMBOL {
                match xs.as_slice() {
                    [s, t] => F::dist(s.clone(), t.clone()),
                    _ => return Err(a.malformed(format!("`{METRIC_SYMBOL}` takes 2 arguments"))),
                }
            } else {
                let sym = match sig.lookup(&r) {
                    Some(Symbol::Relation(sym)) => sym,
                    _ => return Err(a.malformed(format!("`{r}` is not a relation symbol"))),
                };
                if xs.len() != sym.arity {
                    return Err(a.malformed(format!("`{r}` takes {} arguments", sym.arity)));
                }
                F::rel(&r, xs)
            };
            vec![Condition::new(zero(), atom.clone()), Condition::new(atom, F::One)]
        }
        _ => unreachable!("axiom ids are 1..=24"),
    })
}

/// Whether `cond` is the instance of `axiom` given by `bindings`, compared
/// modulo α-renaming and `0·φ = 0`. Failed side conditions yield `false`.
pub fn match_axiom(sig: &Signature, cond: &Condition, axiom: &str, bindings: &Bindings) -> Result<bool, AxiomError> {
    let id: AxiomId = axiom.parse()?;
    match check_axiom(sig, cond, id, bindings) {
        Ok(()) => Ok(true),
        Err(StepFailure::MalformedBindings { message }) => Err(AxiomError::MalformedBindings(message)),
        Err(_) => Ok(false),
    }
}

pub(crate) fn check_axiom(sig: &Signature, cond: &Condition, axiom: AxiomId, bindings: &Bindings) -> Result<(), StepFailure> {
    if axiom.0 == 1 {
        return check_a1(sig, cond, bindings);
    }
    let target = cond.canonical();
    let instances = axiom_instances(sig, axiom, bindings)?;
    if instances.iter().any(|c| c.canonical() == target) {
        Ok(())
    } else {
        Err(StepFailure::AxiomMismatch { axiom })
    }
}

// `1` and `r·1` both denote constants, so either spelling is accepted.
fn check_a1(sig: &Signature, cond: &Condition, bindings: &Bindings) -> Result<(), StepFailure> {
    let axiom = AxiomId(1);
    axiom_instances(sig, axiom, bindings)?;
    let a = Args { axiom, b: bindings };
    let (r, s) = (a.rational("r")?, a.rational("s")?);
    let l = cond.lhs.zero_normalized().as_constant();
    let rhs = cond.rhs.zero_normalized().as_constant();
    if l == Some(r) && rhs == Some(s) {
        Ok(())
    } else {
        Err(StepFailure::AxiomMismatch { axiom })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_condition, parse_formula, parse_term};
    use crate::rational::q;

    fn sig() -> Signature {
        Signature::new()
            .with_constant("c")
            .unwrap()
            .with_function("F", 2, q(2, 1))
            .unwrap()
            .with_relation("R", 1, q(1, 2))
            .unwrap()
    }

    fn cond(text: &str) -> Condition {
        parse_condition(&sig(), text).unwrap().remove(0)
    }

    fn f(text: &str) -> Binding {
        Binding::Formula(parse_formula(&sig(), text).unwrap())
    }

    fn t(text: &str) -> Binding {
        Binding::Term(parse_term(&sig(), text).unwrap())
    }

    fn var(x: &str) -> Binding {
        Binding::Var(x.into())
    }

    fn r(a: i64, b: i64) -> Binding {
        Binding::Rational(q(a, b))
    }

    fn b(pairs: Vec<(&str, Binding)>) -> Bindings {
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn ok(text: &str, axiom: &str, bindings: Bindings) -> bool {
        match_axiom(&sig(), &cond(text), axiom, &bindings).unwrap()
    }

    #[test]
    fn names() {
        assert_eq!("A15".parse::<AxiomId>().unwrap().number(), 15);
        for bad in ["A0", "A25", "A01", "B3", "15", "A"] {
            assert!(bad.parse::<AxiomId>().is_err(), "{bad}");
        }
        assert_eq!(AxiomId::ALL.len(), 24);
        assert_eq!(AxiomId::ALL[23].to_string(), "A24");
    }

    #[test]
    fn a15_both_directions() {
        assert!(ok("int x. 1 <= 1", "A15", b(vec![("x", var("x"))])));
        assert!(ok("1 <= int y. 1", "A15", b(vec![("x", var("x"))])));
        assert!(!ok("int x. 1 <= 1/2", "A15", b(vec![("x", var("x"))])));
    }

    #[test]
    fn a1_arithmetic() {
        assert!(ok("2 * 1 <= 3 * 1", "A1", b(vec![("r", r(2, 1)), ("s", r(3, 1))])));
        assert!(ok("1 <= 3/2", "A1", b(vec![("r", r(1, 1)), ("s", r(3, 2))])));
        assert!(!ok("3 <= 2", "A1", b(vec![("r", r(3, 1)), ("s", r(2, 1))])));
        assert!(!ok("1 <= 2", "A1", b(vec![("r", r(1, 2)), ("s", r(2, 1))])));
    }

    #[test]
    fn a10_substitution() {
        let bind = b(vec![("phi", f("d(x,y)")), ("x", var("x")), ("t", t("c"))]);
        assert!(ok("d(c,y) <= sup x. d(x,y)", "A10", bind));
        let capture = b(vec![("phi", f("int y. d(x,y)")), ("x", var("x")), ("t", t("y"))]);
        assert!(!ok("int y. d(y,y) <= sup x. int y. d(x,y)", "A10", capture.clone()));
        assert_eq!(
            check_axiom(&sig(), &cond("int y. d(y,y) <= sup x. int y. d(x,y)"), AxiomId(10), &capture),
            Err(StepFailure::NotSubstitutable { var: "x".into(), captured: "y".into() })
        );
    }

    #[test]
    fn quantifier_side_conditions() {
        assert!(ok(
            "sup x. d(x,y) + d(y,c) <= (sup x. d(x,y)) + d(y,c)",
            "A11",
            b(vec![("x", var("x")), ("phi", f("d(x,y)")), ("psi", f("d(y,c)"))])
        ));
        assert!(!ok(
            "sup x. d(x,y) + d(x,c) <= (sup x. d(x,y)) + d(x,c)",
            "A11",
            b(vec![("x", var("x")), ("phi", f("d(x,y)")), ("psi", f("d(x,c)"))])
        ));
        assert!(!ok(
            "sup x. -1 * d(x,y) <= -1 * sup x. d(x,y)",
            "A13",
            b(vec![("x", var("x")), ("r", r(-1, 1)), ("phi", f("d(x,y)"))])
        ));
        assert!(ok("int x. d(y,c) <= d(y,c)", "A18", b(vec![("x", var("x")), ("phi", f("d(y,c)"))])));
        assert!(!ok("int x. d(x,c) <= d(x,c)", "A18", b(vec![("x", var("x")), ("phi", f("d(x,c)"))])));
    }

    #[test]
    fn alpha_invariance() {
        let bind = b(vec![("x", var("x")), ("phi", f("int z. d(x,z)"))]);
        assert!(ok("sup x. int z. d(x,z) <= -1 * inf x. -1 * int z. d(x,z)", "A14", bind.clone()));
        assert!(ok("sup w. int u. d(w,u) <= -1 * inf v. -1 * int q. d(v,q)", "A14", bind));
    }

    #[test]
    fn zero_normalization() {
        assert!(ok("0 * d(x,y) <= 0", "A9", b(vec![("phi", f("d(x,y)"))])));
        assert!(ok("0 * 1 + d(x,y) <= d(x,y)", "A4", b(vec![("phi", f("d(x,y)"))])));
    }

    #[test]
    fn lipschitz_and_bounds() {
        let xs = Binding::Terms(vec![Term::var("x"), Term::var("y")]);
        let ys = Binding::Terms(vec![Term::var("u"), Term::var("v")]);
        assert!(ok(
            "d(F(x,y),F(u,v)) <= 2 * (d(x,u) + d(y,v))",
            "A22",
            b(vec![("symbol", Binding::Symbol("F".into())), ("xs", xs.clone()), ("ys", ys.clone())])
        ));
        assert!(ok(
            "R(x) + -1 * R(u) <= 1/2 * d(x,u)",
            "A23",
            b(vec![("symbol", Binding::Symbol("R".into())), ("xs", t("x")), ("ys", t("u"))])
        ));
        let bind = b(vec![("symbol", Binding::Symbol("d".into())), ("xs", xs)]);
        assert!(ok("0 <= d(x,y)", "A24", bind.clone()));
        assert!(ok("d(x,y) <= 1", "A24", bind.clone()));
        assert!(!ok("d(x,y) <= 0", "A24", bind));
        assert!(ok("d(c,c) <= 0", "A19", b(vec![("x", t("c"))])));
        assert!(ok("d(x,z) <= d(x,y) + d(y,z)", "A21", b(vec![("x", var("x")), ("y", var("y")), ("z", var("z"))])));
    }

    #[test]
    fn malformed_bindings() {
        let err = match_axiom(&sig(), &cond("1 <= 1"), "A15", &Bindings::new()).unwrap_err();
        assert!(matches!(err, AxiomError::MalformedBindings(_)));
        let err = match_axiom(&sig(), &cond("1 <= 1"), "A15", &b(vec![("x", f("1"))])).unwrap_err();
        assert!(matches!(err, AxiomError::MalformedBindings(_)));
        let extra = b(vec![("x", var("x")), ("y", var("y"))]);
        assert!(match_axiom(&sig(), &cond("1 <= 1"), "A15", &extra).is_err());
        assert!(matches!(
            match_axiom(&sig(), &cond("1 <= 1"), "A99", &Bindings::new()),
            Err(AxiomError::UnknownAxiom(_))
        ));
    }
}
