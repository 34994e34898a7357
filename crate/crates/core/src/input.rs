//! Input documents.
//!
//! ```text
//! # unit square
//! points: [[0,0],[1,0],[1,1],[0,1]]
//! symmetry: [[1,2,3,0]]
//! ```
//!
//! `#` starts a comment. Each key starts a line and its value, a JSON array
//! of integer arrays, may span several lines.

use std::fmt;

use thiserror::Error;

use crate::symmetry::SymmetryError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InputDocument {
    pub points: Vec<Vec<i64>>,
    pub symmetry: Option<Vec<Vec<i64>>>,
}

impl InputDocument {
    /// Symmetry generators as label permutations; negative entries are
    /// rejected here, everything else by `expand_group`.
    pub fn generators(&self) -> Result<Vec<Vec<usize>>, SymmetryError> {
        let Some(gens) = &self.symmetry else {
            return Ok(Vec::new());
        };
        gens.iter()
            .enumerate()
            .map(|(k, g)| {
                g.iter()
                    .map(|&x| usize::try_from(x).map_err(|_| SymmetryError::NotPermutation(k)))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for InputDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |rows: &[Vec<i64>]| {
            let inner: Vec<String> = rows
                .iter()
                .map(|r| {
                    let xs: Vec<String> = r.iter().map(ToString::to_string).collect();
                    format!("[{}]", xs.join(","))
                })
                .collect();
            format!("[{}]", inner.join(","))
        };
        writeln!(f, "points: {}", list(&self.points))?;
        if let Some(s) = &self.symmetry {
            writeln!(f, "symmetry: {}", list(s))?;
        }
        Ok(())
    }
}

pub fn parse_input(text: &str) -> Result<InputDocument, ParseError> {
    let err = |line: usize, column: usize, message: String| ParseError {
        line,
        column,
        message,
    };

    // Comments become blanks so that positions are preserved.
    let lines: Vec<String> = text
        .lines()
        .map(|l| match l.find('#') {
            Some(k) => format!("{}{}", &l[..k], " ".repeat(l.len() - k)),
            None => l.to_string(),
        })
        .collect();

    // (key, line, column of the value start, value text)
    let mut sections: Vec<(String, usize, usize, String)> = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        let trimmed = l.trim_start();
        let indent = l.len() - trimmed.len();
        let key_len = trimmed
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(trimmed.len());
        let is_key = key_len > 0
            && trimmed.as_bytes()[0].is_ascii_alphabetic()
            && trimmed[key_len..].trim_start().starts_with(':');
        if is_key {
            let colon = indent + key_len + trimmed[key_len..].find(':').unwrap();
            sections.push((
                trimmed[..key_len].to_string(),
                i + 1,
                colon + 2,
                l[colon + 1..].to_string(),
            ));
        } else if let Some(last) = sections.last_mut() {
            last.3.push('\n');
            last.3.push_str(l);
        } else if !trimmed.is_empty() {
            return Err(err(i + 1, indent + 1, "expected `points:`".into()));
        }
    }

    let mut doc = InputDocument::default();
    let mut have_points = false;
    for (key, line, column, value) in sections {
        let parsed: Vec<Vec<i64>> = serde_json::from_str(&value).map_err(|e| {
            let (l, c) = (e.line().max(1), e.column());
            if l == 1 {
                err(line, column - 1 + c.max(1), e.to_string())
            } else {
                err(line + l - 1, c.max(1), e.to_string())
            }
        })?;
        match key.as_str() {
            "points" if !have_points => {
                doc.points = parsed;
                have_points = true;
            }
            "symmetry" if doc.symmetry.is_none() => doc.symmetry = Some(parsed),
            "points" | "symmetry" => return Err(err(line, 1, format!("duplicate key `{key}`"))),
            _ => return Err(err(line, 1, format!("unknown key `{key}`"))),
        }
    }
    if !have_points {
        return Err(err(lines.len().max(1), 1, "missing `points:`".into()));
    }
    Ok(doc)
}
