//! Text formats: the formula grammar, theories, signatures, weights, and the
//! JSON documents for structures (`.alstr`) and proof scripts (`.alpf`).

mod docs;
mod expr;
mod pretty;

pub use docs::{
    parse_proof, parse_proof_with_signature, parse_structure, parse_structure_with_signature, proof_to_doc,
    proof_to_json, structure_to_doc, structure_to_json, AxiomDoc, BindingDoc, JustificationDoc, LabelDoc, ProofDoc,
    RuleDoc, StepDoc, StructureDoc,
};

use std::fmt;

use crate::rational::Q;
use crate::syntax::{Condition, Formula, Signature, SignatureDoc, SyntaxError, Term};

/// A position in a source text (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(file: &str, line: usize, column: usize) -> Self {
        SourceSpan { file: file.to_string(), line: line.max(1), column: column.max(1) }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: unknown symbol `{name}`")]
    UnknownSymbol { span: SourceSpan, name: String },
    #[error("{span}: `{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch { span: SourceSpan, symbol: String, expected: usize, found: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("step {step} cites premise {premise}, which is not an earlier step")]
    DanglingPremiseId { step: u64, premise: u64 },
    #[error("step {step}: unknown axiom `{name}`")]
    UnknownAxiomName { step: u64, name: String },
    #[error("step {step}: unknown rule `{name}`")]
    UnknownRuleName { step: u64, name: String },
    #[error("step {step}: malformed bindings: {message}")]
    MalformedBindings { step: u64, message: String },
    #[error("invalid signature: {0}")]
    Signature(#[from] SyntaxError),
}

impl ParseError {
    /// Attributes a span-carrying error to `file`.
    pub fn in_file(self, file: &str) -> Self {
        match self {
            ParseError::Syntax { mut span, message } => {
                span.file = file.to_string();
                ParseError::Syntax { span, message }
            }
            ParseError::UnknownSymbol { mut span, name } => {
                span.file = file.to_string();
                ParseError::UnknownSymbol { span, name }
            }
            ParseError::ArityMismatch { mut span, symbol, expected, found } => {
                span.file = file.to_string();
                ParseError::ArityMismatch { span, symbol, expected, found }
            }
            other => other,
        }
    }
}

const INPUT: &str = "<input>";

pub fn parse_formula(sig: &Signature, text: &str) -> Result<Formula, ParseError> {
    let mut p = expr::Parser::new(sig, text, INPUT, 1)?;
    let f = p.expr()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(sig: &Signature, text: &str) -> Result<Term, ParseError> {
    let mut p = expr::Parser::new(sig, text, INPUT, 1)?;
    let t = p.parse_term()?;
    p.finish()?;
    Ok(t)
}

/// Parses `phi <= psi` (one condition), `phi >= psi`, or `phi = psi` (two).
pub fn parse_condition(sig: &Signature, text: &str) -> Result<Vec<Condition>, ParseError> {
    parse_condition_at(sig, text, INPUT, 1)
}

pub(crate) fn parse_condition_at(
    sig: &Signature,
    text: &str,
    file: &str,
    line: usize,
) -> Result<Vec<Condition>, ParseError> {
    let mut p = expr::Parser::new(sig, text, file, line)?;
    let c = p.condition()?;
    p.finish()?;
    Ok(c)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// A theory file (`.alth`): one condition per line, `#` starts a comment.
pub fn parse_theory(sig: &Signature, text: &str, file: &str) -> Result<Vec<Condition>, ParseError> {
    let mut out = Vec::new();
    for (line_no, line) in content_lines(text) {
        out.extend(parse_condition_at(sig, line, file, line_no)?);
    }
    Ok(out)
}

/// A formula list (`.alf`): one formula per line, `#` starts a comment.
pub fn parse_formula_list(sig: &Signature, text: &str, file: &str) -> Result<Vec<Formula>, ParseError> {
    let mut out = Vec::new();
    for (line_no, line) in content_lines(text) {
        let mut p = expr::Parser::new(sig, line, file, line_no)?;
        let f = p.expr()?;
        p.finish()?;
        out.push(f);
    }
    Ok(out)
}

/// A signature file (`.alsig`), JSON.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let doc: SignatureDoc = serde_json::from_str(text).map_err(docs::json_error)?;
    Ok(Signature::from_doc(doc)?)
}

/// A weights file (`.alw`): either a JSON array or whitespace/comma separated
/// rationals.
pub fn parse_weights(text: &str) -> Result<Vec<Q>, ParseError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(docs::json_error);
    }
    content_lines(text)
        .flat_map(|(line_no, line)| {
            line.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(move |tok| {
                    tok.parse::<Q>().map_err(|_| ParseError::Syntax {
                        span: SourceSpan::new("<weights>", line_no, 1),
                        message: format!("invalid rational `{tok}`"),
                    })
                })
        })
        .collect()
}

pub fn weights_to_text(weights: &[Q]) -> String {
    let mut out = String::new();
    for w in weights {
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::syntax::alpha_normalize;

    fn sig() -> Signature {
        Signature::new()
            .with_constant("c")
            .unwrap()
            .with_function("F", 1, Q::one())
            .unwrap()
            .with_relation("R", 2, Q::one())
            .unwrap()
    }

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn formula_examples() {
        let s = sig();
        assert_eq!(
            parse_formula(&s, "int y. d(x,y)").unwrap(),
            Formula::int("y", Formula::dist(v("x"), v("y")))
        );
        assert_eq!(
            parse_formula(&s, "1/2 * 1 + sup x. d(x,c)").unwrap(),
            Formula::add(
                Formula::scale(q(1, 2), Formula::One),
                Formula::sup("x", Formula::dist(v("x"), Term::constant("c")))
            )
        );
        assert!(matches!(
            parse_formula(&s, "d(x)"),
            Err(ParseError::ArityMismatch { expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn literals_and_precedence() {
        let s = sig();
        assert_eq!(parse_formula(&s, "1").unwrap(), Formula::One);
        assert_eq!(parse_formula(&s, "0").unwrap(), Formula::zero());
        assert_eq!(parse_formula(&s, "0.25").unwrap(), Formula::constant(q(1, 4)));
        assert_eq!(parse_formula(&s, "-1 * 1").unwrap(), Formula::scale(q(-1, 1), Formula::One));
        assert_eq!(
            parse_formula(&s, "2 * d(x,y) + 1").unwrap(),
            Formula::add(Formula::scale(q(2, 1), Formula::dist(v("x"), v("y"))), Formula::One)
        );
        assert_eq!(
            parse_formula(&s, "R(x,y) - R(y,x)").unwrap(),
            Formula::add(
                Formula::rel("R", vec![v("x"), v("y")]),
                Formula::neg(Formula::rel("R", vec![v("y"), v("x")]))
            )
        );
        assert_eq!(
            parse_formula(&s, "sup x. d(x,y) + 1").unwrap(),
            Formula::sup("x", Formula::add(Formula::dist(v("x"), v("y")), Formula::One))
        );
        assert_eq!(
            parse_formula(&s, "d(F(x), c)").unwrap(),
            Formula::dist(Term::app("F", vec![v("x")]), Term::constant("c"))
        );
    }

    #[test]
    fn formula_errors() {
        let s = sig();
        assert!(matches!(parse_formula(&s, "G(x)"), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_formula(&s, "d(G(x), x)"), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_formula(&s, "R(x)"), Err(ParseError::ArityMismatch { .. })));
        assert!(matches!(parse_formula(&s, "x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula(&s, "sup c. 1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula(&s, "1 +"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula(&s, "(1"), Err(ParseError::Syntax { .. })));
        match parse_formula(&s, "1 +\n  ?") {
            Err(ParseError::Syntax { span, .. }) => assert_eq!((span.line, span.column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn condition_examples() {
        let s = sig();
        assert_eq!(
            parse_condition(&s, "1 <= 1").unwrap(),
            vec![Condition::new(Formula::One, Formula::One)]
        );
        let int1 = Formula::int("x", Formula::One);
        assert_eq!(
            parse_condition(&s, "int x. 1 = 1").unwrap(),
            vec![Condition::new(int1.clone(), Formula::One), Condition::new(Formula::One, int1)]
        );
        assert!(matches!(parse_condition(&s, "d(x,y) <"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn pretty_round_trips() {
        let s = sig();
        for text in [
            "int y. d(x,y)",
            "1/2 * 1 + sup x. d(x,c)",
            "(sup x. d(x,y)) + -3/4 * (1 + R(x,c))",
            "1 + (1 + 1)",
            "2 * (inf z. d(F(z),x))",
            "-1 * -1 * 1",
            "0",
        ] {
            let f = parse_formula(&s, text).unwrap();
            let printed = f.to_string();
            let again = parse_formula(&s, &printed).unwrap();
            assert_eq!(again, f, "{text} -> {printed}");
            assert_eq!(alpha_normalize(&again), alpha_normalize(&f));
        }
    }

    #[test]
    fn theory_and_weights_files() {
        let s = sig();
        let th = parse_theory(&s, "# comment\nint x. 1 = 1\n\nd(x,y) <= 1 # trailing\n", "t.alth").unwrap();
        assert_eq!(th.len(), 3);
        match parse_theory(&s, "1 <= 1\nd(x <= 1\n", "t.alth") {
            Err(ParseError::Syntax { span, .. }) => assert_eq!((span.file.as_str(), span.line), ("t.alth", 2)),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_weights("1/2\n1/2\n").unwrap(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(parse_weights("[\"1/4\", \"3/4\"]").unwrap(), vec![q(1, 4), q(3, 4)]);
        assert_eq!(parse_weights("0.5, 0.5").unwrap(), vec![q(1, 2), q(1, 2)]);
        assert!(parse_weights("1/2 x").is_err());
        let w = vec![q(1, 3), q(2, 3)];
        assert_eq!(parse_weights(&weights_to_text(&w)).unwrap(), w);
    }
}
