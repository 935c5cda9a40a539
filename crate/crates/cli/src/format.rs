//! Instance and assignment files.
//!
//! Instance format: first a token for the job count `n`, then the machine
//! count `m`, then exactly `n` integer durations. Tokens are separated by
//! arbitrary whitespace (canonically "n m" on one line, durations on the
//! next); `#` starts a comment that runs to the end of the line.
//!
//! Assignment files list one 1-based machine index per job, in the original
//! job order of the instance file, with the same whitespace and comment
//! rules.

use pcmax::instance::{Instance, InstanceError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// A parsed instance plus the permutation mapping sorted job positions back
/// to their positions in the input file.
#[derive(Debug, Clone)]
pub struct ParsedInstance {
    pub instance: Instance,
    /// `permutation[k]` is the input position of the job at sorted position `k`.
    pub permutation: Vec<usize>,
}

impl ParsedInstance {
    /// Translates an assignment over sorted jobs into the input job order,
    /// with 1-based machine indices.
    pub fn assignment_in_input_order(&self, sorted_assignment: &[usize]) -> Vec<usize> {
        let mut original = vec![0; sorted_assignment.len()];
        for (sorted_pos, &machine) in sorted_assignment.iter().enumerate() {
            original[self.permutation[sorted_pos]] = machine + 1;
        }
        original
    }

    /// Translates a 1-based assignment in input order into sorted job order,
    /// 0-based.
    pub fn assignment_in_sorted_order(
        &self,
        input_assignment: &[usize],
    ) -> Result<Vec<usize>, FormatError> {
        if input_assignment.len() != self.instance.jobs() {
            return Err(InstanceError::LengthMismatch {
                expected: self.instance.jobs(),
                got: input_assignment.len(),
            }
            .into());
        }
        Ok(self
            .permutation
            .iter()
            .map(|&input_pos| input_assignment[input_pos].wrapping_sub(1))
            .collect())
    }
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (line_index, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for piece in content.split(|c: char| c.is_whitespace()) {
            if !piece.is_empty() {
                let offset = piece.as_ptr() as usize - content.as_ptr() as usize;
                tokens.push(Token {
                    text: piece,
                    line: line_index + 1,
                    column: offset + 1,
                });
            }
        }
    }
    tokens
}

fn syntax(token: Option<&Token<'_>>, text_lines: usize, message: impl Into<String>) -> FormatError {
    match token {
        Some(t) => FormatError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        },
        None => FormatError::Syntax {
            line: text_lines.max(1),
            column: 1,
            message: message.into(),
        },
    }
}

fn parse_token<T: std::str::FromStr>(
    tokens: &[Token<'_>],
    index: usize,
    lines: usize,
    what: &str,
) -> Result<T, FormatError> {
    let token = tokens.get(index);
    let t = token.ok_or_else(|| syntax(None, lines, format!("missing {what}")))?;
    t.text
        .parse::<T>()
        .map_err(|_| syntax(Some(t), lines, format!("invalid {what} `{}`", t.text)))
}

/// Parses an instance file; durations are sorted non-increasingly and the
/// sort permutation is kept so results can be reported in input order.
pub fn parse_instance(text: &str) -> Result<ParsedInstance, FormatError> {
    let tokens = tokenize(text);
    let lines = text.lines().count();
    let jobs: usize = parse_token(&tokens, 0, lines, "job count")?;
    let machines: usize = parse_token(&tokens, 1, lines, "machine count")?;
    if tokens.len() != jobs + 2 {
        let got = tokens.len().saturating_sub(2);
        return Err(syntax(
            tokens.get(jobs + 2).or(tokens.last()),
            lines,
            format!("expected {jobs} durations, found {got}"),
        ));
    }
    let mut weights = Vec::with_capacity(jobs);
    for index in 0..jobs {
        weights.push(parse_token::<i64>(&tokens, index + 2, lines, "duration")?);
    }
    let (instance, permutation) = Instance::normalize(&weights, machines)?;
    Ok(ParsedInstance {
        instance,
        permutation,
    })
}

/// Canonical text form: `n m` on the first line, the sorted durations on the
/// second. `parse_instance(serialize_instance(i))` reproduces `i` exactly.
pub fn serialize_instance(instance: &Instance) -> String {
    let durations: Vec<String> = instance.weights().iter().map(u64::to_string).collect();
    format!(
        "{} {}\n{}\n",
        instance.jobs(),
        instance.machines(),
        durations.join(" ")
    )
}

/// Parses an assignment file: `expected` 1-based machine indices.
pub fn parse_assignment(text: &str, expected: usize) -> Result<Vec<usize>, FormatError> {
    let tokens = tokenize(text);
    let lines = text.lines().count();
    if tokens.len() != expected {
        return Err(syntax(
            tokens.get(expected).or(tokens.last()),
            lines,
            format!("expected {expected} machine indices, found {}", tokens.len()),
        ));
    }
    (0..expected)
        .map(|i| parse_token::<usize>(&tokens, i, lines, "machine index"))
        .collect()
}
