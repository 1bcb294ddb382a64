//! Plain-text model files.
//!
//! ```text
//! # function=sincos
//! mixed 8 3 2 1
//! 0.0000000000000000e0
//! 3.8268343236508978e-1
//! ...
//! ```
//!
//! Optional `#` comment lines, then a header `kind n d` (plus `d1 d2` for
//! `mixed`), then one sample per line in lattice order with 17 significant
//! digits, so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use multibern_core::{BernsteinModel, Domain};

use crate::FormatError;

/// A model together with the comment lines that preceded its header.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub comments: Vec<String>,
    pub model: BernsteinModel,
}

pub fn header(model: &BernsteinModel) -> String {
    let (n, d) = (model.degree(), model.dim());
    match model.domain() {
        Domain::Mixed { simplex_dims } => {
            format!("mixed {n} {d} {simplex_dims} {}", d - simplex_dims)
        }
        dom => format!("{} {n} {d}", dom.name()),
    }
}

pub fn to_string(model: &BernsteinModel, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "# {c}").unwrap();
    }
    writeln!(out, "{}", header(model)).unwrap();
    for v in model.samples() {
        writeln!(out, "{v:.16e}").unwrap();
    }
    out
}

pub fn write<W: Write>(mut w: W, model: &BernsteinModel, comments: &[String]) -> Result<(), FormatError> {
    w.write_all(to_string(model, comments).as_bytes())?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn parse_header(line: usize, text: &str) -> Result<(Domain, usize, usize), FormatError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let num = |i: usize| -> Result<usize, FormatError> {
        let tok = fields.get(i).ok_or_else(|| parse_err(line, "header too short"))?;
        tok.parse()
            .map_err(|_| parse_err(line, format!("bad integer `{tok}` in header")))
    };
    let kind = *fields.first().ok_or_else(|| parse_err(line, "missing header"))?;
    let (n, d) = (num(1)?, num(2)?);
    let (domain, len) = match kind {
        "cube" => (Domain::Cube, 3),
        "simplex" => (Domain::Simplex, 3),
        "mixed" => {
            let (d1, d2) = (num(3)?, num(4)?);
            if d1 + d2 != d {
                return Err(parse_err(line, format!("d1 + d2 = {} but d = {d}", d1 + d2)));
            }
            (Domain::Mixed { simplex_dims: d1 }, 5)
        }
        other => return Err(parse_err(line, format!("unknown kind `{other}`"))),
    };
    if fields.len() != len {
        return Err(parse_err(line, "unexpected trailing header fields"));
    }
    Ok((domain, n, d))
}

pub fn read<R: BufRead>(r: R) -> Result<ModelFile, FormatError> {
    let mut comments = Vec::new();
    let mut head = None;
    let mut samples = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if head.is_none() {
            if let Some(c) = text.strip_prefix('#') {
                comments.push(c.trim().to_string());
            } else {
                head = Some(parse_header(lineno, text)?);
            }
            continue;
        }
        let v: f64 = text
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad sample `{text}`")))?;
        samples.push(v);
    }
    let (domain, n, d) = head.ok_or_else(|| parse_err(0, "missing header"))?;
    let model = BernsteinModel::from_samples(domain, n, d, samples)?;
    Ok(ModelFile { comments, model })
}

pub fn from_str(s: &str) -> Result<ModelFile, FormatError> {
    read(s.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_forms() {
        let m = BernsteinModel::build(&|x: &[f64]| x[0], Domain::Mixed { simplex_dims: 2 }, 3, 3).unwrap();
        assert_eq!(header(&m), "mixed 3 3 2 1");
        let c = BernsteinModel::build(&|x: &[f64]| x[0], Domain::Cube, 2, 1).unwrap();
        assert_eq!(to_string(&c, &[]), "cube 2 1\n0.0000000000000000e0\n5.0000000000000000e-1\n1.0000000000000000e0\n");
    }

    #[test]
    fn comments_survive() {
        let c = BernsteinModel::build(&|_: &[f64]| 2.0, Domain::Simplex, 1, 2).unwrap();
        let text = to_string(&c, &["function=const1".into()]);
        let back = from_str(&text).unwrap();
        assert_eq!(back.comments, vec!["function=const1".to_string()]);
        assert_eq!(back.model, c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(from_str("box 2 1\n0\n0\n0\n"), Err(FormatError::Parse { line: 1, .. })));
        assert!(matches!(from_str("cube 2 1\n0\nx\n0\n"), Err(FormatError::Parse { line: 3, .. })));
        assert!(matches!(from_str("cube 2 1\n0\n0\n"), Err(FormatError::Core(_))));
        assert!(from_str("mixed 2 3 1 1\n").is_err());
        assert!(from_str("").is_err());
    }
}
