//! Descent engines for `x^2 + D y^2` (D = 1, 2, 3) and for sums of four squares.
//!
//! Each engine starts from a seed relation `N n = weighted sum of squares` and
//! repeatedly replaces it by `N n' = ...` with `n' < n` until `n = 1`. Every
//! step is recorded in a [`DescentTrace`] that [`verify_trace`] can recheck
//! from scratch.
//!
//! A standard step writes each root as `residue + n * quotient` with centered
//! residues, sets `n n' = norm(residues)`, composes residues with quotients and
//! emits `(n' + A, B[, C, D])`. Special cases:
//!
//! * four squares, `n` even: halve the quadruple (`n' = n / 2`);
//! * `x^2 + 3y^2`, both roots odd and `4 | n`: quarter reduction (`n' = n / 4`);
//! * `x^2 + 3y^2`, standard step stuck at `n' = n`: divide by the common
//!   factor `g` of the roots (`n' = n / g^2`). Only reachable for even targets.

mod verify;

pub use verify::{verify_trace, RejectReason, Rejection, Verdict};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Budget};
use crate::error::{Error, Result};
use crate::identities::{self, FormKind, FormPair, Quad};

/// Which weighted sum of squares a seed or trace refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Binary(FormKind),
    Four,
}

impl Form {
    pub fn arity(self) -> usize {
        match self {
            Form::Binary(_) => 2,
            Form::Four => 4,
        }
    }

    /// Weighted sum of squares; `None` when `roots` has the wrong length.
    pub fn norm(self, roots: &[BigInt]) -> Option<BigInt> {
        if roots.len() != self.arity() {
            return None;
        }
        Some(match self {
            Form::Binary(kind) => kind.norm(&roots[0], &roots[1]),
            Form::Four => roots.iter().map(|r| r * r).sum(),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Form::Binary(FormKind::One) => "d1",
            Form::Binary(FormKind::Two) => "d2",
            Form::Binary(FormKind::Three) => "d3",
            Form::Four => "four",
        }
    }

    /// Canonical orientation of a final representation: absolute values,
    /// sorted descending for four squares and for `x^2 + y^2`.
    pub fn canonical(self, roots: &[BigInt]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = roots.iter().map(|r| r.abs()).collect();
        if matches!(self, Form::Four | Form::Binary(FormKind::One)) {
            out.sort_by(|a, b| b.cmp(a));
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d1" => Ok(Form::Binary(FormKind::One)),
            "d2" => Ok(Form::Binary(FormKind::Two)),
            "d3" => Ok(Form::Binary(FormKind::Three)),
            "four" => Ok(Form::Four),
            other => Err(Error::InvalidInput(format!("unknown form {other:?}"))),
        }
    }
}

/// A relation `target * n = norm(roots)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedMultiple {
    pub form: Form,
    pub target: BigInt,
    pub roots: Vec<BigInt>,
    pub n: BigInt,
}

impl SeedMultiple {
    /// Builds a seed, computing `n = norm(roots) / target`.
    pub fn new(form: Form, target: BigInt, roots: Vec<BigInt>) -> Result<Self> {
        if !target.is_positive() {
            return Err(Error::Seed(format!("target {target} must be positive")));
        }
        let norm = form.norm(&roots).ok_or_else(|| {
            Error::Seed(format!("{} roots given, {} expected", roots.len(), form.arity()))
        })?;
        let (n, rem) = norm.div_rem(&target);
        if !rem.is_zero() {
            return Err(Error::Seed(format!("{target} does not divide the seed norm {norm}")));
        }
        let seed = SeedMultiple { form, target, roots, n };
        seed.validate()?;
        Ok(seed)
    }

    /// The same relation with every root replaced by its centered remainder
    /// mod the target, which brings `n` below the target for odd targets.
    pub fn reduced(&self) -> Result<Self> {
        let roots = self
            .roots
            .iter()
            .map(|r| arith::centered_rem(r, &self.target))
            .collect::<Result<Vec<_>>>()?;
        if roots.iter().all(Zero::is_zero) {
            return Err(Error::Seed(format!("every root is divisible by {}", self.target)));
        }
        SeedMultiple::new(self.form, self.target.clone(), roots)
    }

    fn validate(&self) -> Result<()> {
        let norm = self
            .form
            .norm(&self.roots)
            .ok_or_else(|| Error::Seed(format!("{} roots given, {} expected", self.roots.len(), self.form.arity())))?;
        if !self.target.is_positive() {
            return Err(Error::Seed(format!("target {} must be positive", self.target)));
        }
        if !self.n.is_positive() {
            return Err(Error::Seed("seed multiple n must be at least 1".into()));
        }
        if norm != &self.target * &self.n {
            return Err(Error::Seed(format!(
                "norm {norm} differs from {} * {}",
                self.target, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Standard,
    Halve,
    Quarter,
    GcdReduce,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Standard => "standard",
            StepKind::Halve => "halve",
            StepKind::Quarter => "quarter",
            StepKind::GcdReduce => "gcd_reduce",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(StepKind::Standard),
            "halve" => Ok(StepKind::Halve),
            "quarter" => Ok(StepKind::Quarter),
            "gcd_reduce" => Ok(StepKind::GcdReduce),
            other => Err(Error::InvalidInput(format!("unknown step kind {other:?}"))),
        }
    }
}

/// One reduction `N n = norm(roots_in)` to `N n_next = norm(roots_out)`.
///
/// Field usage per kind:
///
/// | kind         | residues        | quotients       | composed         |
/// |--------------|-----------------|-----------------|------------------|
/// | `standard`   | centered roots  | `(root - r)/n`  | `A, B[, C, D]`   |
/// | `quarter`    | roots as `4m+1` | `r, s`          | empty            |
/// | `gcd_reduce` | empty           | `g`             | empty            |
/// | `halve`      | empty           | empty           | empty            |
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentStep {
    pub kind: StepKind,
    pub n: BigInt,
    pub roots_in: Vec<BigInt>,
    pub residues: Vec<BigInt>,
    pub quotients: Vec<BigInt>,
    pub composed: Vec<BigInt>,
    pub n_next: BigInt,
    pub roots_out: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentTrace {
    pub form: Form,
    pub target: BigInt,
    pub seed: SeedMultiple,
    pub steps: Vec<DescentStep>,
    /// Final roots in canonical orientation.
    pub result: Vec<BigInt>,
}

impl DescentTrace {
    /// The chain `n0, n1, ..., 1`.
    pub fn n_chain(&self) -> Vec<BigInt> {
        let mut chain = vec![self.seed.n.clone()];
        chain.extend(self.steps.iter().map(|s| s.n_next.clone()));
        chain
    }
}

/// `N = x^2 + D y^2` with `x, y >= 0` (and `x >= y` when `D = 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormRep {
    pub target: BigInt,
    pub kind: FormKind,
    pub x: BigInt,
    pub y: BigInt,
}

impl FormRep {
    pub fn norm(&self) -> BigInt {
        self.kind.norm(&self.x, &self.y)
    }

    pub fn is_valid(&self) -> bool {
        !self.x.is_negative() && !self.y.is_negative() && self.norm() == self.target
    }

    pub fn as_pair(&self) -> FormPair {
        FormPair { kind: self.kind, x: self.x.clone(), y: self.y.clone() }
    }
}

/// `N = a^2 + b^2 + c^2 + d^2` with `a >= b >= c >= d >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadRep {
    pub target: BigInt,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl QuadRep {
    /// Canonicalizes any quadruple (absolute values, sorted descending).
    pub fn from_quad(target: BigInt, q: &Quad) -> Self {
        let v = Form::Four.canonical(&q.to_vec());
        QuadRep { target, a: v[0].clone(), b: v[1].clone(), c: v[2].clone(), d: v[3].clone() }
    }

    pub fn as_quad(&self) -> Quad {
        Quad::new(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }

    pub fn to_vec(&self) -> Vec<BigInt> {
        self.as_quad().to_vec()
    }

    pub fn is_valid(&self) -> bool {
        let v = self.to_vec();
        v.windows(2).all(|w| w[0] >= w[1])
            && !self.d.is_negative()
            && self.as_quad().norm() == self.target
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DescentOptions {
    /// Attempt composite targets; failures are reported instead of looping.
    pub best_effort: bool,
    pub budget: Budget,
}

/// Descends a seed for `x^2 + D y^2` to a representation of its target.
pub fn descend_form(
    kind: FormKind,
    seed: &SeedMultiple,
    opts: &DescentOptions,
) -> Result<(FormRep, DescentTrace)> {
    if seed.form != Form::Binary(kind) {
        return Err(Error::Seed(format!("seed is for {}, not {}", seed.form, Form::Binary(kind))));
    }
    let trace = run(seed, opts)?;
    let rep = FormRep {
        target: seed.target.clone(),
        kind,
        x: trace.result[0].clone(),
        y: trace.result[1].clone(),
    };
    Ok((rep, trace))
}

/// Descends a four-square seed to a representation of its target.
pub fn descend_four(seed: &SeedMultiple, opts: &DescentOptions) -> Result<(QuadRep, DescentTrace)> {
    if seed.form != Form::Four {
        return Err(Error::Seed(format!("seed is for {}, not four squares", seed.form)));
    }
    let trace = run(seed, opts)?;
    let q = Quad::from_slice(&trace.result).expect("four roots");
    Ok((QuadRep::from_quad(seed.target.clone(), &q), trace))
}

fn run(seed: &SeedMultiple, opts: &DescentOptions) -> Result<DescentTrace> {
    seed.validate()?;
    let target = &seed.target;
    let prime = arith::is_prime(target)?;
    if !prime && !opts.best_effort {
        return Err(Error::Domain(format!(
            "{target} is not prime; descent is only guaranteed for prime targets"
        )));
    }
    if seed.form == Form::Binary(FormKind::Three) && *target == BigInt::from(2) && !opts.best_effort {
        return Err(Error::Domain("x^2 + 3y^2 descent needs an odd prime target".into()));
    }
    let roots_gcd = seed.roots.iter().fold(BigInt::zero(), |g, r| g.gcd(r));
    let shares_factor = match seed.form {
        Form::Binary(_) => !roots_gcd.gcd(target).is_one(),
        Form::Four => (&roots_gcd % target).is_zero(),
    };
    if shares_factor {
        return Err(Error::Seed(format!(
            "roots {} share the factor {} with the target",
            fmt_list(&seed.roots),
            roots_gcd.gcd(target)
        )));
    }

    // From n >= N the chain can land on n = N with every root divisible by
    // N, where no residue information is left. Starting below N avoids it.
    let seed = if seed.n >= *target { seed.reduced()? } else { seed.clone() };

    let cap = if prime {
        opts.budget.descent_steps
    } else {
        (4 * arith::bit_length(&seed.n)).max(4) as usize
    };

    let mut steps = Vec::new();
    let mut roots = seed.roots.clone();
    let mut n = seed.n.clone();
    while !n.is_one() {
        if steps.len() >= cap {
            return Err(if prime {
                Error::Budget(format!("descent exceeded {cap} steps"))
            } else {
                Error::DescentFailed(format!("no representation reached within {cap} steps"))
            });
        }
        let step = next_step(seed.form, &n, &roots)?;
        roots = step.roots_out.clone();
        n = step.n_next.clone();
        steps.push(step);
    }

    let form = seed.form;
    Ok(DescentTrace {
        form,
        target: target.clone(),
        seed,
        steps,
        result: form.canonical(&roots),
    })
}

fn next_step(form: Form, n: &BigInt, roots: &[BigInt]) -> Result<DescentStep> {
    if form == Form::Four && n.is_even() {
        return halve_step(n, roots);
    }
    if form == Form::Binary(FormKind::Three) && roots[0].is_odd() && roots[1].is_odd() && (n % 4u32).is_zero() {
        return quarter_step(n, roots);
    }
    let step = standard_step(form, n, roots)?;
    if step.n_next.is_zero() {
        return Err(Error::DescentFailed(format!(
            "all roots {} are divisible by {n}",
            fmt_list(roots)
        )));
    }
    if step.n_next < *n {
        return Ok(step);
    }
    match form {
        Form::Binary(FormKind::Three) => break_form3_tie(n, roots),
        _ => Err(Error::DescentFailed(format!("no reduction below n = {n}"))),
    }
}

pub(crate) fn standard_parts(
    form: Form,
    n: &BigInt,
    roots: &[BigInt],
) -> Result<(Vec<BigInt>, Vec<BigInt>, BigInt)> {
    let residues = roots
        .iter()
        .map(|r| arith::centered_rem(r, n))
        .collect::<Result<Vec<_>>>()?;
    let quotients: Vec<BigInt> = roots.iter().zip(&residues).map(|(r, a)| (r - a) / n).collect();
    let norm = form.norm(&residues).expect("arity checked by caller");
    Ok((residues, quotients, norm))
}

pub(crate) fn compose_parts(form: Form, residues: &[BigInt], quotients: &[BigInt]) -> Result<Vec<BigInt>> {
    match form {
        Form::Binary(kind) => {
            let u = FormPair { kind, x: residues[0].clone(), y: residues[1].clone() };
            let v = FormPair { kind, x: quotients[0].clone(), y: quotients[1].clone() };
            let w = identities::compose_form(kind, &u, &v)?;
            Ok(vec![w.x, w.y])
        }
        Form::Four => {
            let u = Quad::from_slice(residues).expect("four residues");
            let v = Quad::from_slice(quotients).expect("four quotients");
            Ok(identities::compose_four(&u, &v).to_vec())
        }
    }
}

fn standard_step(form: Form, n: &BigInt, roots: &[BigInt]) -> Result<DescentStep> {
    let (residues, quotients, norm) = standard_parts(form, n, roots)?;
    let (n_next, rem) = norm.div_rem(n);
    if !rem.is_zero() {
        return Err(Error::DescentFailed(format!("{n} does not divide residue norm {norm}")));
    }
    let composed = compose_parts(form, &residues, &quotients)?;
    let mut roots_out = composed.clone();
    roots_out[0] += &n_next;
    Ok(DescentStep {
        kind: StepKind::Standard,
        n: n.clone(),
        roots_in: roots.to_vec(),
        residues,
        quotients,
        composed,
        n_next,
        roots_out,
    })
}

fn halve_step(n: &BigInt, roots: &[BigInt]) -> Result<DescentStep> {
    let q = Quad::from_slice(roots).expect("four roots");
    let h = identities::halve_four(&q)?;
    Ok(DescentStep {
        kind: StepKind::Halve,
        n: n.clone(),
        roots_in: roots.to_vec(),
        residues: vec![],
        quotients: vec![],
        composed: vec![],
        n_next: n / 2,
        roots_out: h.to_vec(),
    })
}

fn quarter_step(n: &BigInt, roots: &[BigInt]) -> Result<DescentStep> {
    let (p, q) = (&roots[0], &roots[1]);
    let (rp, r) = identities::one_mod_four_representative(p)?;
    let (rq, s) = identities::one_mod_four_representative(q)?;
    let out = identities::quarter_form3(p, q)?;
    Ok(DescentStep {
        kind: StepKind::Quarter,
        n: n.clone(),
        roots_in: roots.to_vec(),
        residues: vec![rp, rq],
        quotients: vec![r, s],
        composed: vec![],
        n_next: n / 4,
        roots_out: vec![out.x, out.y],
    })
}

fn break_form3_tie(n: &BigInt, roots: &[BigInt]) -> Result<DescentStep> {
    let (p, q) = (&roots[0], &roots[1]);
    let g = p.gcd(q);
    if g > BigInt::one() && (n % (&g * &g)).is_zero() {
        return Ok(DescentStep {
            kind: StepKind::GcdReduce,
            n: n.clone(),
            roots_in: roots.to_vec(),
            residues: vec![],
            quotients: vec![g.clone()],
            composed: vec![],
            n_next: n / (&g * &g),
            roots_out: vec![p / &g, q / &g],
        });
    }
    Err(Error::DescentFailed(format!(
        "x^2 + 3y^2 descent stuck at n = {n} with roots {}",
        fmt_list(roots)
    )))
}

pub(crate) fn fmt_list(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}
