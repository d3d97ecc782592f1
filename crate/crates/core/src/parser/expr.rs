//! Recursive-descent parser for formulas and conditions.
//!
//! ```text
//! condition := expr ("<=" | ">=" | "=") expr
//! expr      := term (("+" | "-") term)*
//! term      := rational ["*" term] | "-" term | atom
//! atom      := "1" | "(" expr ")" | ("inf" | "sup" | "int") IDENT "." expr
//!            | "d" "(" t "," t ")" | REL "(" t ("," t)* ")"
//! t         := IDENT | FUNC "(" t ("," t)* ")"
//! ```
//!
//! A bare rational `r` other than `1` denotes the constant formula `r·1`.

use super::{ParseError, SourceSpan};
use crate::rational::Q;
use crate::syntax::{Condition, Formula, Quantifier, Signature, Symbol, Term, METRIC_SYMBOL};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Dot,
    Le,
    Ge,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

fn tokenize(text: &str, file: &str, line0: usize) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: line0, column: 1 };
    let mut out = Vec::new();
    loop {
        while matches!(lx.chars.peek(), Some(c) if c.is_whitespace()) {
            lx.bump();
        }
        let span = SourceSpan::new(file, lx.line, lx.column);
        let Some(&c) = lx.chars.peek() else {
            out.push((Tok::Eof, span));
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = lx.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            let mut seen_dot = false;
            while let Some(&c) = lx.chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    lx.bump();
                } else if c == '.' && !seen_dot {
                    // `1.` followed by a non-digit is a number then a dot
                    let mut look = lx.chars.clone();
                    look.next();
                    if matches!(look.peek(), Some(d) if d.is_ascii_digit()) {
                        seen_dot = true;
                        s.push(c);
                        lx.bump();
                    } else {
                        break;
                    }
                } else {
                    break;
                }
            }
            Tok::Number(s)
        } else {
            lx.bump();
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '=' => Tok::Eq,
                '<' if lx.chars.peek() == Some(&'=') => {
                    lx.bump();
                    Tok::Le
                }
                '>' if lx.chars.peek() == Some(&'=') => {
                    lx.bump();
                    Tok::Ge
                }
                '≤' => Tok::Le,
                '≥' => Tok::Ge,
                other => {
                    return Err(ParseError::Syntax {
                        span,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push((tok, span));
    }
}

pub(super) struct Parser<'s> {
    sig: &'s Signature,
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl<'s> Parser<'s> {
    pub(super) fn new(sig: &'s Signature, text: &str, file: &str, line0: usize) -> Result<Self, ParseError> {
        Ok(Parser { sig, toks: tokenize(text, file, line0)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1.clone()
    }

    fn advance(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { span: self.span(), message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    pub(super) fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek().describe()))
        }
    }

    pub(super) fn condition(&mut self) -> Result<Vec<Condition>, ParseError> {
        let lhs = self.expr()?;
        let op = self.peek().clone();
        match op {
            Tok::Le | Tok::Ge | Tok::Eq => {
                self.advance();
            }
            other => return self.error(format!("expected `<=`, `>=` or `=`, found {}", other.describe())),
        }
        let rhs = self.expr()?;
        Ok(match op {
            Tok::Le => vec![Condition::new(lhs, rhs)],
            Tok::Ge => vec![Condition::new(rhs, lhs)],
            _ => Condition::equation(lhs, rhs).to_vec(),
        })
    }

    pub(super) fn expr(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    let rhs = self.term()?;
                    acc = Formula::add(acc, rhs);
                }
                Tok::Minus => {
                    self.advance();
                    let rhs = self.term()?;
                    acc = Formula::add(acc, Formula::neg(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn rational(&mut self, negative: bool) -> Result<Q, ParseError> {
        let (tok, span) = self.advance();
        let Tok::Number(mut text) = tok else {
            return Err(ParseError::Syntax { span, message: "expected a number".into() });
        };
        if *self.peek() == Tok::Slash {
            self.advance();
            match self.advance() {
                (Tok::Number(d), _) => {
                    text.push('/');
                    text.push_str(&d);
                }
                (other, span) => {
                    return Err(ParseError::Syntax {
                        span,
                        message: format!("expected a denominator, found {}", other.describe()),
                    })
                }
            }
        }
        let value: Q = text
            .parse()
            .map_err(|_| ParseError::Syntax { span, message: format!("invalid rational `{text}`") })?;
        Ok(if negative { -value } else { value })
    }

    fn scaled(&mut self, r: Q) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Star {
            self.advance();
            Ok(Formula::scale(r, self.term()?))
        } else if r.is_one() {
            Ok(Formula::One)
        } else {
            Ok(Formula::constant(r))
        }
    }

    fn term(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Minus if matches!(self.peek_at(1), Tok::Number(_)) => {
                self.advance();
                let r = self.rational(true)?;
                self.scaled(r)
            }
            Tok::Minus => {
                self.advance();
                Ok(Formula::neg(self.term()?))
            }
            Tok::Number(_) => {
                let r = self.rational(false)?;
                self.scaled(r)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let f = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(word) => {
                let quant = match word.as_str() {
                    "inf" => Some(Quantifier::Inf),
                    "sup" => Some(Quantifier::Sup),
                    "int" => Some(Quantifier::Int),
                    _ => None,
                };
                self.advance();
                if let Some(q) = quant {
                    let var = self.variable_name()?;
                    self.expect(Tok::Dot)?;
                    let body = self.expr()?;
                    return Ok(Formula::Quant(q, var, Box::new(body)));
                }
                if *self.peek() != Tok::LParen {
                    return Err(ParseError::Syntax {
                        span,
                        message: format!("`{word}` is not a formula"),
                    });
                }
                let args = self.arguments()?;
                if word == METRIC_SYMBOL {
                    if args.len() != 2 {
                        return Err(ParseError::ArityMismatch {
                            span,
                            symbol: word,
                            expected: 2,
                            found: args.len(),
                        });
                    }
                    let mut it = args.into_iter();
                    let a = it.next().expect("two");
                    let b = it.next().expect("two");
                    return Ok(Formula::Dist(a, b));
                }
                match self.sig.lookup(&word) {
                    Some(Symbol::Relation(r)) => {
                        if r.arity != args.len() {
                            return Err(ParseError::ArityMismatch {
                                span,
                                symbol: word,
                                expected: r.arity,
                                found: args.len(),
                            });
                        }
                        Ok(Formula::Rel(word, args))
                    }
                    Some(other) => Err(ParseError::Syntax {
                        span,
                        message: format!("`{word}` is a {}, not a relation", other.kind()),
                    }),
                    None => Err(ParseError::UnknownSymbol { span, name: word }),
                }
            }
            other => self.error(format!("expected a formula, found {}", other.describe())),
        }
    }

    fn variable_name(&mut self) -> Result<String, ParseError> {
        let span = self.span();
        match self.advance() {
            (Tok::Ident(x), _) => {
                if crate::syntax::RESERVED_WORDS.contains(&x.as_str()) || self.sig.lookup(&x).is_some() {
                    Err(ParseError::Syntax { span, message: format!("`{x}` cannot be used as a variable") })
                } else {
                    Ok(x)
                }
            }
            (other, _) => Err(ParseError::Syntax {
                span,
                message: format!("expected a variable, found {}", other.describe()),
            }),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.parse_term()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            args.push(self.parse_term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    pub(super) fn parse_term(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        let Tok::Ident(name) = self.peek().clone() else {
            return self.error(format!("expected a term, found {}", self.peek().describe()));
        };
        self.advance();
        if *self.peek() == Tok::LParen {
            let args = self.arguments()?;
            return match self.sig.lookup(&name) {
                Some(Symbol::Function(f)) if f.arity == args.len() => Ok(Term::App(name, args)),
                Some(Symbol::Function(f)) => Err(ParseError::ArityMismatch {
                    span,
                    symbol: name,
                    expected: f.arity,
                    found: args.len(),
                }),
                Some(other) => Err(ParseError::Syntax {
                    span,
                    message: format!("`{name}` is a {}, not a function", other.kind()),
                }),
                None => Err(ParseError::UnknownSymbol { span, name }),
            };
        }
        if crate::syntax::RESERVED_WORDS.contains(&name.as_str()) {
            return Err(ParseError::Syntax { span, message: format!("`{name}` is not a term") });
        }
        match self.sig.lookup(&name) {
            Some(Symbol::Constant) => Ok(Term::Const(name)),
            Some(other) => Err(ParseError::Syntax {
                span,
                message: format!("`{name}` is a {} and needs arguments", other.kind()),
            }),
            None => Ok(Term::Var(name)),
        }
    }
}
