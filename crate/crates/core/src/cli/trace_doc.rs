//! JSON encoding of descent traces.
//!
//! Integers are decimal strings: an optional `-` followed by digits with no
//! leading zeros. Anything else is refused so that re-encoding a parsed
//! document reproduces it byte for byte.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::descent::{DescentStep, DescentTrace, Form, SeedMultiple, StepKind};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub schema_version: String,
    pub form: String,
    #[serde(rename = "N")]
    pub target: String,
    pub seed: SeedDocument,
    pub steps: Vec<StepDocument>,
    pub result: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedDocument {
    #[serde(rename = "N")]
    pub target: String,
    pub roots: Vec<String>,
    pub n: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDocument {
    pub kind: String,
    pub n: String,
    pub roots_in: Vec<String>,
    pub residues: Vec<String>,
    pub quotients: Vec<String>,
    pub composed: Vec<String>,
    pub n_next: String,
    pub roots_out: Vec<String>,
}

/// Parse failure with the path (or line/column) where it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ParseError {}

fn perr(location: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError { location: location.into(), message: message.into() }
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn serialize_trace(t: &DescentTrace) -> TraceDocument {
    TraceDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        form: t.form.as_str().to_string(),
        target: t.target.to_string(),
        seed: SeedDocument {
            target: t.seed.target.to_string(),
            roots: strs(&t.seed.roots),
            n: t.seed.n.to_string(),
        },
        steps: t
            .steps
            .iter()
            .map(|s| StepDocument {
                kind: s.kind.as_str().to_string(),
                n: s.n.to_string(),
                roots_in: strs(&s.roots_in),
                residues: strs(&s.residues),
                quotients: strs(&s.quotients),
                composed: strs(&s.composed),
                n_next: s.n_next.to_string(),
                roots_out: strs(&s.roots_out),
            })
            .collect(),
        result: strs(&t.result),
    }
}

fn decimal(location: &str, s: &str) -> Result<BigInt, ParseError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|c| c.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && !(s.starts_with('-') && digits == "0");
    if !canonical {
        return Err(perr(location, format!("{s:?} is not a decimal integer")));
    }
    s.parse().map_err(|_| perr(location, format!("{s:?} is not a decimal integer")))
}

fn decimals(location: &str, v: &[String]) -> Result<Vec<BigInt>, ParseError> {
    v.iter()
        .enumerate()
        .map(|(i, s)| decimal(&format!("{location}[{i}]"), s))
        .collect()
}

/// Structural decoding only; the arithmetic is left to `verify_trace`.
pub fn parse_trace(doc: &TraceDocument) -> Result<DescentTrace, ParseError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(perr(
            "schema_version",
            format!("unsupported version {:?}, expected {SCHEMA_VERSION:?}", doc.schema_version),
        ));
    }
    let form: Form = doc.form.parse().map_err(|e: crate::Error| perr("form", e.to_string()))?;
    let target = decimal("N", &doc.target)?;
    let seed_target = decimal("seed.N", &doc.seed.target)?;
    if seed_target != target {
        return Err(perr("seed.N", "differs from N"));
    }
    let seed = SeedMultiple {
        form,
        target: seed_target,
        roots: decimals("seed.roots", &doc.seed.roots)?,
        n: decimal("seed.n", &doc.seed.n)?,
    };
    let mut steps = Vec::with_capacity(doc.steps.len());
    for (i, s) in doc.steps.iter().enumerate() {
        let at = |field: &str| format!("steps[{i}].{field}");
        let kind: StepKind = s.kind.parse().map_err(|e: crate::Error| perr(at("kind"), e.to_string()))?;
        steps.push(DescentStep {
            kind,
            n: decimal(&at("n"), &s.n)?,
            roots_in: decimals(&at("roots_in"), &s.roots_in)?,
            residues: decimals(&at("residues"), &s.residues)?,
            quotients: decimals(&at("quotients"), &s.quotients)?,
            composed: decimals(&at("composed"), &s.composed)?,
            n_next: decimal(&at("n_next"), &s.n_next)?,
            roots_out: decimals(&at("roots_out"), &s.roots_out)?,
        });
    }
    Ok(DescentTrace { form, target, seed, steps, result: decimals("result", &doc.result)? })
}

/// Compact JSON with a trailing newline.
pub fn to_json(doc: &TraceDocument) -> String {
    let mut s = serde_json::to_string(doc).expect("string-only document");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<TraceDocument, ParseError> {
    serde_json::from_str(text)
        .map_err(|e| perr(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

/// Decodes a JSON text straight to a trace.
pub fn trace_from_json(text: &str) -> Result<DescentTrace, ParseError> {
    parse_trace(&from_json(text)?)
}

pub fn trace_to_json(t: &DescentTrace) -> String {
    to_json(&serialize_trace(t))
}
