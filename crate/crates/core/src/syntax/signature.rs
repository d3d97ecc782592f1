use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{SyntaxError, RESERVED_WORDS};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSymbol {
    pub name: String,
    pub arity: usize,
    pub lipschitz: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
    pub lipschitz: Q,
}

/// What a name denotes in a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol<'a> {
    Constant,
    Function(&'a FunctionSymbol),
    Relation(&'a RelationSymbol),
}

impl Symbol<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            Symbol::Constant => "constant",
            Symbol::Function(_) => "function",
            Symbol::Relation(_) => "relation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Constant,
    Function(usize),
    Relation(usize),
}

/// A Lipschitz signature. The metric symbol is implicit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    constants: Vec<String>,
    functions: Vec<FunctionSymbol>,
    relations: Vec<RelationSymbol>,
    index: HashMap<String, Slot>,
}

/// Serialized form of a signature (`.alsig`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureDoc {
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub functions: Vec<FunctionSymbol>,
    #[serde(default)]
    pub relations: Vec<RelationSymbol>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Signature {
    /// The empty signature (only the metric).
    pub fn new() -> Self {
        Self::default()
    }

    fn claim(&mut self, name: &str, slot: Slot) -> Result<(), SyntaxError> {
        if RESERVED_WORDS.contains(&name) || !valid_identifier(name) {
            return Err(SyntaxError::ReservedSymbol(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(SyntaxError::DuplicateSymbol(name.to_string()));
        }
        self.index.insert(name.to_string(), slot);
        Ok(())
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self, SyntaxError> {
        self.claim(name, Slot::Constant)?;
        self.constants.push(name.to_string());
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize, lipschitz: Q) -> Result<Self, SyntaxError> {
        if arity == 0 {
            return Err(SyntaxError::ZeroArity(name.to_string()));
        }
        if lipschitz.is_negative() {
            return Err(SyntaxError::NegativeLipschitz(name.to_string()));
        }
        self.claim(name, Slot::Function(self.functions.len()))?;
        self.functions.push(FunctionSymbol { name: name.to_string(), arity, lipschitz });
        Ok(self)
    }

    pub fn with_relation(mut self, name: &str, arity: usize, lipschitz: Q) -> Result<Self, SyntaxError> {
        if arity == 0 {
            return Err(SyntaxError::ZeroArity(name.to_string()));
        }
        if lipschitz.is_negative() {
            return Err(SyntaxError::NegativeLipschitz(name.to_string()));
        }
        self.claim(name, Slot::Relation(self.relations.len()))?;
        self.relations.push(RelationSymbol { name: name.to_string(), arity, lipschitz });
        Ok(self)
    }

    pub fn from_doc(doc: SignatureDoc) -> Result<Self, SyntaxError> {
        let mut sig = Signature::new();
        for c in &doc.constants {
            sig = sig.with_constant(c)?;
        }
        for f in doc.functions {
            sig = sig.with_function(&f.name, f.arity, f.lipschitz)?;
        }
        for r in doc.relations {
            sig = sig.with_relation(&r.name, r.arity, r.lipschitz)?;
        }
        Ok(sig)
    }

    pub fn to_doc(&self) -> SignatureDoc {
        SignatureDoc {
            constants: self.constants.clone(),
            functions: self.functions.clone(),
            relations: self.relations.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn functions(&self) -> &[FunctionSymbol] {
        &self.functions
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol<'_>> {
        self.index.get(name).map(|slot| match *slot {
            Slot::Constant => Symbol::Constant,
            Slot::Function(i) => Symbol::Function(&self.functions[i]),
            Slot::Relation(i) => Symbol::Relation(&self.relations[i]),
        })
    }

    pub fn is_constant(&self, name: &str) -> bool {
        matches!(self.index.get(name), Some(Slot::Constant))
    }

    pub fn function(&self, name: &str) -> Result<&FunctionSymbol, SyntaxError> {
        match self.lookup(name) {
            Some(Symbol::Function(f)) => Ok(f),
            Some(other) => Err(SyntaxError::WrongKind {
                symbol: name.to_string(),
                wanted: "function",
                actual: other.kind(),
            }),
            None => Err(SyntaxError::UnknownSymbol(name.to_string())),
        }
    }

    pub fn relation(&self, name: &str) -> Result<&RelationSymbol, SyntaxError> {
        match self.lookup(name) {
            Some(Symbol::Relation(r)) => Ok(r),
            Some(other) => Err(SyntaxError::WrongKind {
                symbol: name.to_string(),
                wanted: "relation",
                actual: other.kind(),
            }),
            None => Err(SyntaxError::UnknownSymbol(name.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_declarations() {
        assert_eq!(
            Signature::new().with_constant("d").unwrap_err(),
            SyntaxError::ReservedSymbol("d".into())
        );
        assert_eq!(
            Signature::new().with_constant("c").unwrap().with_relation("c", 1, Q::one()).unwrap_err(),
            SyntaxError::DuplicateSymbol("c".into())
        );
        assert_eq!(
            Signature::new().with_function("F", 1, Q::from_integer(-1)).unwrap_err(),
            SyntaxError::NegativeLipschitz("F".into())
        );
        assert_eq!(
            Signature::new().with_relation("R", 0, Q::one()).unwrap_err(),
            SyntaxError::ZeroArity("R".into())
        );
        assert!(Signature::new().with_constant("2x").is_err());
    }

    #[test]
    fn doc_round_trip() {
        let sig = Signature::new()
            .with_constant("c")
            .unwrap()
            .with_function("F", 1, Q::one())
            .unwrap()
            .with_relation("P", 2, Q::new(1, 2))
            .unwrap();
        let json = serde_json::to_string(&sig.to_doc()).unwrap();
        let back = Signature::from_doc(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, sig);
    }
}
