//! Composition identities for the norm forms `x^2 + D y^2` (D = 1, 2, 3) and
//! for sums of four squares, plus the two parity reductions used by the
//! descent engines.
//!
//! The compositions return the raw formulas without sign normalization so that
//! a recorded trace can be rechecked literally.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};

/// The coefficient `D` of the form `x^2 + D y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormKind {
    One,
    Two,
    Three,
}

impl FormKind {
    pub const ALL: [FormKind; 3] = [FormKind::One, FormKind::Two, FormKind::Three];

    pub fn d(self) -> u32 {
        match self {
            FormKind::One => 1,
            FormKind::Two => 2,
            FormKind::Three => 3,
        }
    }

    pub fn from_d(d: u32) -> Result<Self> {
        match d {
            1 => Ok(FormKind::One),
            2 => Ok(FormKind::Two),
            3 => Ok(FormKind::Three),
            other => Err(Error::Domain(format!(
                "form x^2 + {other}y^2 is not supported (D must be 1, 2 or 3)"
            ))),
        }
    }

    /// `x^2 + D y^2`.
    pub fn norm(self, x: &BigInt, y: &BigInt) -> BigInt {
        x * x + y * y * self.d()
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^2 + {}y^2", self.d())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormPair {
    pub kind: FormKind,
    pub x: BigInt,
    pub y: BigInt,
}

impl FormPair {
    pub fn new(kind: FormKind, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        FormPair { kind, x: x.into(), y: y.into() }
    }

    pub fn norm(&self) -> BigInt {
        self.kind.norm(&self.x, &self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Quad {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Self {
        Quad { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn from_slice(v: &[BigInt]) -> Option<Self> {
        match v {
            [a, b, c, d] => Some(Quad::new(a.clone(), b.clone(), c.clone(), d.clone())),
            _ => None,
        }
    }

    pub fn to_vec(&self) -> Vec<BigInt> {
        vec![self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }
}

/// Two-square style composition: `(a, b) x (alpha, beta) -> (a alpha + D b beta, a beta - b alpha)`,
/// with `A^2 + D B^2 = (a^2 + D b^2)(alpha^2 + D beta^2)`.
pub fn compose_form(kind: FormKind, u: &FormPair, v: &FormPair) -> Result<FormPair> {
    if u.kind != kind || v.kind != kind {
        return Err(Error::Domain(format!(
            "cannot compose {} with {} under {}",
            u.kind, v.kind, kind
        )));
    }
    let x = &u.x * &v.x + &u.y * &v.y * kind.d();
    let y = &u.x * &v.y - &u.y * &v.x;
    Ok(FormPair { kind, x, y })
}

/// Four-square composition whose cross products cancel pairwise.
pub fn compose_four(u: &Quad, v: &Quad) -> Quad {
    let (a, b, c, d) = (&u.a, &u.b, &u.c, &u.d);
    let (al, be, ga, de) = (&v.a, &v.b, &v.c, &v.d);
    Quad {
        a: a * al + b * be + c * ga + d * de,
        b: a * be - b * al - c * de + d * ga,
        c: a * ga + b * de - c * al - d * be,
        d: a * de - b * ga + c * be - d * al,
    }
}

/// Halves the norm of a quadruple with even norm.
///
/// Entries are stably reordered odd-first, then paired `(p, q), (r, s)` and
/// mapped to `((p+q)/2, (p-q)/2, (r+s)/2, (r-s)/2)`.
pub fn halve_four(q: &Quad) -> Result<Quad> {
    let mut entries = q.to_vec();
    let odd = entries.iter().filter(|e| e.is_odd()).count();
    if odd % 2 == 1 {
        return Err(Error::NotHalvable(q.norm().to_string()));
    }
    entries.sort_by_key(|e| e.is_even());
    let half = |x: BigInt| -> BigInt { x / 2 };
    let (p, qq, r, s) = (&entries[0], &entries[1], &entries[2], &entries[3]);
    Ok(Quad {
        a: half(p + qq),
        b: half(p - qq),
        c: half(r + s),
        d: half(r - s),
    })
}

/// Odd `v` rewritten as `4m + 1` up to sign: returns `(sign * v, m)`.
pub fn one_mod_four_representative(v: &BigInt) -> Result<(BigInt, BigInt)> {
    if v.is_even() {
        return Err(Error::Parity(format!("{v} is even")));
    }
    let rep = if v.mod_floor(&BigInt::from(4)) == BigInt::from(1) { v.clone() } else { -v };
    let m = (&rep - 1) / 4;
    Ok((rep, m))
}

/// For odd `p, q`, writes `+-p = 4r + 1`, `+-q = 4s + 1` and returns
/// `(1 + r + 3s, r - s)`, whose norm under `x^2 + 3y^2` is `(p^2 + 3q^2) / 4`.
pub fn quarter_form3(p: &BigInt, q: &BigInt) -> Result<FormPair> {
    let (_, r) = one_mod_four_representative(p)?;
    let (_, s) = one_mod_four_representative(q)?;
    Ok(FormPair {
        kind: FormKind::Three,
        x: BigInt::from(1) + &r + &s * 3,
        y: r - s,
    })
}
