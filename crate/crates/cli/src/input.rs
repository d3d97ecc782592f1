use std::fs;
use std::path::{Path, PathBuf};

use alint::parser::{self, ParseError};
use alint::semantics::{Environment, FiniteChargedStructure};
use alint::syntax::Signature;
use alint::ultramean::DEFAULT_PRODUCT_CAP;

/// An I/O, parse or usage error; exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<ParseError> for InputError {
    fn from(e: ParseError) -> Self {
        InputError(e.to_string())
    }
}

pub fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(ParseError) -> InputError + '_ {
    move |e| match e {
        ParseError::Syntax { .. } | ParseError::UnknownSymbol { .. } | ParseError::ArityMismatch { .. } => {
            InputError(e.in_file(&path.display().to_string()).to_string())
        }
        other => InputError(format!("{}: {other}", path.display())),
    }
}

pub fn signature(path: Option<&Path>) -> Result<Option<Signature>, InputError> {
    path.map(|p| parser::parse_signature(&read(p)?).map_err(in_file(p))).transpose()
}

/// Loads a structure over `sig`, or over its embedded signature.
pub fn structure(sig: Option<&Signature>, path: &Path) -> Result<(Signature, FiniteChargedStructure), InputError> {
    let text = read(path)?;
    match sig {
        Some(sig) => Ok((sig.clone(), parser::parse_structure(sig, &text).map_err(in_file(path))?)),
        None => parser::parse_structure_with_signature(&text).map_err(in_file(path)),
    }
}

/// Loads structures that must share one signature.
pub fn structures(sig: Option<&Signature>, paths: &[PathBuf]) -> Result<(Signature, Vec<FiniteChargedStructure>), InputError> {
    let mut common: Option<Signature> = sig.cloned();
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        let (s_sig, s) = structure(common.as_ref(), p)?;
        common.get_or_insert(s_sig);
        out.push(s);
    }
    Ok((common.unwrap_or_default(), out))
}

/// The `.alstr` files of a directory, sorted by name.
pub fn model_dir(dir: &Path) -> Result<Vec<PathBuf>, InputError> {
    let entries = fs::read_dir(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "alstr"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(InputError(format!("{}: no .alstr files", dir.display())));
    }
    Ok(paths)
}

pub fn theory(sig: &Signature, path: &Path) -> Result<Vec<alint::syntax::Condition>, InputError> {
    Ok(parser::parse_theory(sig, &read(path)?, &path.display().to_string())?)
}

pub fn formulas(sig: &Signature, path: &Path) -> Result<Vec<alint::syntax::Formula>, InputError> {
    Ok(parser::parse_formula_list(sig, &read(path)?, &path.display().to_string())?)
}

pub fn weights(path: &Path) -> Result<Vec<alint::Q>, InputError> {
    parser::parse_weights(&read(path)?).map_err(in_file(path))
}

pub fn point(s: &FiniteChargedStructure, key: &str) -> Result<usize, InputError> {
    s.point(key.trim()).ok_or_else(|| InputError(format!("no point `{key}`")))
}

/// Splits each argument at commas outside parentheses, so product labels
/// such as `(0,1)` stay whole.
pub fn split_list(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for arg in args {
        let (mut depth, mut start) = (0i32, 0);
        for (i, ch) in arg.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    out.push(arg[start..i].to_string());
                    start = i + 1;
                }
                _ => {}
            }
        }
        out.push(arg[start..].to_string());
    }
    out
}

/// Parses `var=point` pairs.
pub fn assignment(s: &FiniteChargedStructure, pairs: &[String]) -> Result<Environment, InputError> {
    let mut env = Environment::new();
    for pair in &split_list(pairs) {
        let (x, p) = pair.split_once('=').ok_or_else(|| InputError(format!("expected VAR=POINT, got `{pair}`")))?;
        env.insert(x.trim(), point(s, p)?);
    }
    Ok(env)
}

pub fn product_cap(flag: Option<usize>) -> Result<usize, InputError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("AL_PRODUCT_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| InputError(format!("AL_PRODUCT_CAP: not a count: `{v}`"))),
        Err(_) => Ok(DEFAULT_PRODUCT_CAP),
    }
}

pub fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}
