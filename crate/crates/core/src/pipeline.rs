//! End-to-end solvers: factor, seed each prime, descend, and compose.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Budget};
use crate::congruence;
use crate::descent::{self, DescentOptions, DescentTrace, Form, SeedMultiple};
use crate::error::{Error, Result};
use crate::identities::{self, FormKind, FormPair, Quad};

pub use crate::descent::{FormRep, QuadRep};

fn opts(budget: &Budget) -> DescentOptions {
    DescentOptions { best_effort: false, budget: *budget }
}

/// Seed `(x, y, 1, 0)` with `x^2 + y^2 + 1 = 0 (mod p)` for an odd prime `p`;
/// `(1, 1, 0, 0)` for `p = 2`.
pub fn four_square_seed(p: &BigInt, budget: &Budget) -> Result<SeedMultiple> {
    if !arith::is_prime(p)? {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let roots = if *p == BigInt::from(2) {
        vec![BigInt::one(), BigInt::one(), BigInt::zero(), BigInt::zero()]
    } else {
        let minus_one = -BigInt::one();
        let (x, y) = congruence::solve_lagrange(&minus_one, &minus_one, p, budget)?;
        vec![x, y, BigInt::one(), BigInt::zero()]
    };
    SeedMultiple::new(Form::Four, p.clone(), roots)
}

/// Seed `(s, 1)` with `s^2 + D = 0 (mod p)`, or `None` when `-D` is a
/// non-residue. The prime 2 has no seed for `x^2 + 3y^2`.
pub fn form_seed(kind: FormKind, p: &BigInt) -> Result<Option<SeedMultiple>> {
    if kind == FormKind::Three && *p == BigInt::from(2) {
        return Ok(None);
    }
    let d = BigInt::from(kind.d());
    let Some(s) = arith::sqrt_mod(&-d, p)? else {
        return Ok(None);
    };
    SeedMultiple::new(Form::Binary(kind), p.clone(), vec![s, BigInt::one()]).map(Some)
}

/// Four-square representation of a prime with its descent certificate.
pub fn decompose_prime(p: &BigInt, budget: &Budget) -> Result<(QuadRep, DescentTrace)> {
    let seed = four_square_seed(p, budget)?;
    descent::descend_four(&seed, &opts(budget))
}

/// Four-square representation of any `N >= 0`.
///
/// Primes are decomposed in ascending order and folded left to right with the
/// four-square composition, one factor per unit of exponent.
pub fn four_squares(n: &BigInt, budget: &Budget) -> Result<(QuadRep, Vec<DescentTrace>)> {
    if n.is_negative() {
        return Err(Error::InvalidInput(format!("{n} is negative")));
    }
    if n.is_zero() {
        return Ok((QuadRep::from_quad(BigInt::zero(), &Quad::new(0, 0, 0, 0)), Vec::new()));
    }
    let factors = arith::factorize(n, budget)?;
    let mut acc = Quad::new(1, 0, 0, 0);
    let mut traces = Vec::with_capacity(factors.factors.len());
    for (p, e) in factors.iter() {
        let (rep, trace) = decompose_prime(p, budget)?;
        traces.push(trace);
        let q = rep.as_quad();
        for _ in 0..*e {
            acc = identities::compose_four(&acc, &q);
        }
    }
    let rep = QuadRep::from_quad(n.clone(), &acc);
    debug_assert!(rep.is_valid());
    Ok((rep, traces))
}

/// Representation of `N >= 1` as `x^2 + D y^2`, or `None` when there is none.
///
/// Each prime with a seed is descended; a prime without one must occur to an
/// even power and is absorbed as a common factor of `x` and `y`. Prime
/// representations are composed in ascending order, preferring at each fold
/// the orientation that keeps `gcd(x, y) = 1`.
pub fn represent_form(
    kind: FormKind,
    n: &BigInt,
    budget: &Budget,
) -> Result<Option<(FormRep, Vec<DescentTrace>)>> {
    if !n.is_positive() {
        return Err(Error::InvalidInput(format!("{n} must be at least 1")));
    }
    let factors = arith::factorize(n, budget)?;
    let mut acc = FormPair::new(kind, 1, 0);
    let mut scale = BigInt::one();
    let mut traces = Vec::new();
    for (p, e) in factors.iter() {
        match form_seed(kind, p)? {
            Some(seed) => {
                let (rep, trace) = descent::descend_form(kind, &seed, &opts(budget))?;
                traces.push(trace);
                let v = rep.as_pair();
                for _ in 0..*e {
                    acc = fold_form(kind, &acc, &v)?;
                }
            }
            None if e % 2 == 0 => scale *= num_traits::pow(p.clone(), (*e / 2) as usize),
            None => return Ok(None),
        }
    }
    let mut roots = [(&acc.x * &scale).abs(), (&acc.y * &scale).abs()];
    if kind == FormKind::One && roots[0] < roots[1] {
        roots.swap(0, 1);
    }
    let rep = FormRep { target: n.clone(), kind, x: roots[0].clone(), y: roots[1].clone() };
    debug_assert!(rep.is_valid());
    Ok(Some((rep, traces)))
}

fn fold_form(kind: FormKind, acc: &FormPair, v: &FormPair) -> Result<FormPair> {
    let direct = identities::compose_form(kind, acc, v)?;
    if direct.x.gcd(&direct.y).is_one() {
        return Ok(direct);
    }
    let conj = FormPair { kind, x: v.x.clone(), y: -&v.y };
    let other = identities::compose_form(kind, acc, &conj)?;
    if other.x.gcd(&other.y).is_one() {
        Ok(other)
    } else {
        Ok(direct)
    }
}
