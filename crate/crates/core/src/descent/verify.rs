//! Independent recheck of a [`DescentTrace`].
//!
//! Nothing recorded in the trace is trusted: every residue, quotient,
//! composition and norm is recomputed and compared exactly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{compose_parts, standard_parts, DescentStep, DescentTrace, Form, StepKind};
use crate::identities::{self, FormKind, Quad};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Malformed(String),
    SeedNormMismatch,
    ChainBroken,
    ResiduesNotCentered,
    QuotientsInconsistent,
    ResidueNormMismatch,
    ComposedInconsistent,
    OutputInconsistent,
    NoProgress,
    Incomplete,
    FinalNormMismatch,
    ResultMismatch,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(why) => write!(f, "malformed trace: {why}"),
            RejectReason::SeedNormMismatch => f.write_str("seed norm differs from N * n"),
            RejectReason::ChainBroken => f.write_str("step does not continue the previous state"),
            RejectReason::ResiduesNotCentered => f.write_str("residues are not centered remainders"),
            RejectReason::QuotientsInconsistent => f.write_str("quotients inconsistent with roots"),
            RejectReason::ResidueNormMismatch => f.write_str("residue norm differs from n * n_next"),
            RejectReason::ComposedInconsistent => f.write_str("composed values inconsistent"),
            RejectReason::OutputInconsistent => f.write_str("output roots inconsistent"),
            RejectReason::NoProgress => f.write_str("n_next is not below n"),
            RejectReason::Incomplete => f.write_str("descent does not end at n = 1"),
            RejectReason::FinalNormMismatch => f.write_str("final norm mismatch"),
            RejectReason::ResultMismatch => f.write_str("result differs from the final roots"),
        }
    }
}

/// Rejection with the index of the first failing step (`None` for seed or result).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub step: Option<usize>,
    pub reason: RejectReason,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Verdict::Accept => None,
            Verdict::Reject(r) => Some(r),
        }
    }
}

pub fn verify_trace(t: &DescentTrace) -> Verdict {
    match check(t) {
        Ok(()) => Verdict::Accept,
        Err(r) => Verdict::Reject(r),
    }
}

fn check(t: &DescentTrace) -> Result<(), Rejection> {
    let fail = |step: Option<usize>, reason: RejectReason| Rejection { step, reason };
    let malformed = |step: Option<usize>, why: &str| fail(step, RejectReason::Malformed(why.into()));
    let form = t.form;
    let arity = form.arity();

    if t.seed.form != form {
        return Err(malformed(None, "seed form differs from trace form"));
    }
    if t.seed.target != t.target {
        return Err(malformed(None, "seed target differs from trace target"));
    }
    if !t.target.is_positive() {
        return Err(malformed(None, "target must be positive"));
    }
    if t.seed.roots.len() != arity {
        return Err(malformed(None, "seed has the wrong number of roots"));
    }
    if !t.seed.n.is_positive() {
        return Err(malformed(None, "seed multiple must be positive"));
    }
    if form.norm(&t.seed.roots) != Some(&t.target * &t.seed.n) {
        return Err(fail(None, RejectReason::SeedNormMismatch));
    }

    let mut n = t.seed.n.clone();
    let mut roots = t.seed.roots.clone();
    for (i, step) in t.steps.iter().enumerate() {
        let at = Some(i);
        if step.roots_in.len() != arity || step.roots_out.len() != arity {
            return Err(malformed(at, "step has the wrong number of roots"));
        }
        if step.n != n || step.roots_in != roots {
            return Err(fail(at, RejectReason::ChainBroken));
        }
        if !step.n_next.is_positive() || step.n_next >= step.n {
            return Err(fail(at, RejectReason::NoProgress));
        }
        match step.kind {
            StepKind::Standard => check_standard(form, step).map_err(|r| fail(at, r))?,
            StepKind::Halve => check_halve(form, step).map_err(|r| fail(at, r))?,
            StepKind::Quarter => check_quarter(form, step).map_err(|r| fail(at, r))?,
            StepKind::GcdReduce => check_gcd_reduce(step).map_err(|r| fail(at, r))?,
        }
        if form.norm(&step.roots_out) != Some(&t.target * &step.n_next) {
            return Err(fail(at, RejectReason::OutputInconsistent));
        }
        n = step.n_next.clone();
        roots = step.roots_out.clone();
    }
    if !n.is_one() {
        return Err(fail(None, RejectReason::Incomplete));
    }
    if t.result.len() != arity {
        return Err(malformed(None, "result has the wrong number of roots"));
    }
    if form.norm(&t.result) != Some(t.target.clone()) {
        return Err(fail(None, RejectReason::FinalNormMismatch));
    }
    if t.result != form.canonical(&roots) {
        return Err(fail(None, RejectReason::ResultMismatch));
    }
    Ok(())
}

fn check_standard(form: Form, s: &DescentStep) -> Result<(), RejectReason> {
    let arity = form.arity();
    if s.residues.len() != arity || s.quotients.len() != arity || s.composed.len() != arity {
        return Err(RejectReason::Malformed("standard step field lengths".into()));
    }
    let (residues, _, norm) =
        standard_parts(form, &s.n, &s.roots_in).map_err(|e| RejectReason::Malformed(e.to_string()))?;
    if residues != s.residues {
        return Err(RejectReason::ResiduesNotCentered);
    }
    let consistent = s
        .roots_in
        .iter()
        .zip(&s.residues)
        .zip(&s.quotients)
        .all(|((root, a), q)| *root == a + &s.n * q);
    if !consistent {
        return Err(RejectReason::QuotientsInconsistent);
    }
    if norm != &s.n * &s.n_next {
        return Err(RejectReason::ResidueNormMismatch);
    }
    let composed =
        compose_parts(form, &s.residues, &s.quotients).map_err(|e| RejectReason::Malformed(e.to_string()))?;
    if composed != s.composed {
        return Err(RejectReason::ComposedInconsistent);
    }
    let mut expected = s.composed.clone();
    expected[0] += &s.n_next;
    if expected != s.roots_out {
        return Err(RejectReason::OutputInconsistent);
    }
    Ok(())
}

fn check_halve(form: Form, s: &DescentStep) -> Result<(), RejectReason> {
    if form != Form::Four {
        return Err(RejectReason::Malformed("halve step outside four squares".into()));
    }
    if !(s.residues.is_empty() && s.quotients.is_empty() && s.composed.is_empty()) {
        return Err(RejectReason::Malformed("halve step carries extra fields".into()));
    }
    if s.n_next.clone() * 2 != s.n {
        return Err(RejectReason::NoProgress);
    }
    let q = Quad::from_slice(&s.roots_in).expect("arity checked");
    match identities::halve_four(&q) {
        Ok(h) if h.to_vec() == s.roots_out => Ok(()),
        _ => Err(RejectReason::OutputInconsistent),
    }
}

fn check_quarter(form: Form, s: &DescentStep) -> Result<(), RejectReason> {
    if form != Form::Binary(FormKind::Three) {
        return Err(RejectReason::Malformed("quarter step outside x^2 + 3y^2".into()));
    }
    if s.residues.len() != 2 || s.quotients.len() != 2 || !s.composed.is_empty() {
        return Err(RejectReason::Malformed("quarter step field lengths".into()));
    }
    if s.n_next.clone() * 4 != s.n {
        return Err(RejectReason::NoProgress);
    }
    let four = BigInt::from(4);
    for ((root, rep), m) in s.roots_in.iter().zip(&s.residues).zip(&s.quotients) {
        if rep.abs() != root.abs() || rep.mod_floor(&four) != BigInt::one() {
            return Err(RejectReason::ResiduesNotCentered);
        }
        if *rep != m * 4 + 1 {
            return Err(RejectReason::QuotientsInconsistent);
        }
    }
    let (r, sq) = (&s.quotients[0], &s.quotients[1]);
    let expected = vec![BigInt::one() + r + sq * 3, r - sq];
    if expected != s.roots_out {
        return Err(RejectReason::OutputInconsistent);
    }
    Ok(())
}

fn check_gcd_reduce(s: &DescentStep) -> Result<(), RejectReason> {
    if !(s.residues.is_empty() && s.composed.is_empty() && s.quotients.len() == 1) {
        return Err(RejectReason::Malformed("gcd_reduce step field lengths".into()));
    }
    let g = &s.quotients[0];
    if *g <= BigInt::one() {
        return Err(RejectReason::QuotientsInconsistent);
    }
    let divides = s.roots_in.iter().all(|r| (r % g).is_zero());
    if !divides || s.n_next.clone() * g * g != s.n {
        return Err(RejectReason::QuotientsInconsistent);
    }
    let expected: Vec<BigInt> = s.roots_in.iter().map(|r| r / g).collect();
    if expected != s.roots_out {
        return Err(RejectReason::OutputInconsistent);
    }
    if s.roots_out.iter().all(Zero::is_zero) {
        return Err(RejectReason::OutputInconsistent);
    }
    Ok(())
}
