//! Brute-force ground truth for the engines.
//!
//! These enumerations use plain nested loops over machine integers and share
//! no code with the descent or congruence modules, so agreement between the
//! two is meaningful.

use crate::error::{Error, Result};
use crate::identities::FormKind;

pub const FORM_LIMIT: u64 = 100_000_000;
pub const FOUR_LIMIT: u64 = 1_000_000;
pub const TERNARY_LIST_LIMIT: u64 = 1_000;
pub const TERNARY_SEARCH_LIMIT: u64 = 10_000;
pub const TRIANGULAR_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepKind {
    Form(FormKind),
    Four,
}

/// Every representation of `target`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepSet {
    pub target: u64,
    pub kind: RepKind,
    pub reps: Vec<Vec<u64>>,
}

impl RepSet {
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn contains(&self, rep: &[u64]) -> bool {
        self.reps.iter().any(|r| r == rep)
    }
}

fn over_limit(what: &str, value: u64, limit: u64) -> Error {
    Error::Budget(format!("{what} {value} exceeds the oracle bound {limit}"))
}

fn square_root_if_square(v: u64) -> Option<u64> {
    let r = v.isqrt();
    (r * r == v).then_some(r)
}

/// All `(x, y)` with `x, y >= 0` and `x^2 + D y^2 = N`.
pub fn enum_form_reps(kind: FormKind, target: u64) -> Result<RepSet> {
    if target > FORM_LIMIT {
        return Err(over_limit("N", target, FORM_LIMIT));
    }
    let d = kind.d() as u64;
    let mut reps = Vec::new();
    let mut x = 0u64;
    while x * x <= target {
        let rest = target - x * x;
        if rest % d == 0 {
            if let Some(y) = square_root_if_square(rest / d) {
                reps.push(vec![x, y]);
            }
        }
        x += 1;
    }
    Ok(RepSet { target, kind: RepKind::Form(kind), reps })
}

/// All `a >= b >= c >= d >= 0` with `a^2 + b^2 + c^2 + d^2 = N`.
pub fn enum_four_reps(target: u64) -> Result<RepSet> {
    if target > FOUR_LIMIT {
        return Err(over_limit("N", target, FOUR_LIMIT));
    }
    let mut reps = Vec::new();
    let mut a = 0u64;
    while a * a <= target {
        for b in 0..=a {
            for c in 0..=b {
                let used = a * a + b * b + c * c;
                if used > target {
                    break;
                }
                if let Some(d) = square_root_if_square(target - used) {
                    if d <= c {
                        reps.push(vec![a, b, c, d]);
                    }
                }
            }
        }
        a += 1;
    }
    reps.sort();
    Ok(RepSet { target, kind: RepKind::Four, reps })
}

/// All `(x, y, z)` in `[1, (N-1)/2]^3` with `lambda x^2 + mu y^2 + nu z^2 = 0 (mod N)`.
pub fn exhaustive_ternary(lambda: u64, mu: u64, nu: u64, modulus: u64) -> Result<Vec<(u64, u64, u64)>> {
    if modulus >= TERNARY_LIST_LIMIT {
        return Err(over_limit("N", modulus, TERNARY_LIST_LIMIT));
    }
    let mut out = Vec::new();
    let half = modulus.saturating_sub(1) / 2;
    for x in 1..=half {
        for y in 1..=half {
            for z in 1..=half {
                if (lambda * x * x + mu * y * y + nu * z * z) % modulus == 0 {
                    out.push((x, y, z));
                }
            }
        }
    }
    Ok(out)
}

/// First triple [`exhaustive_ternary`] would list, scanning the same space
/// but stopping early; usable for larger moduli.
pub fn first_exhaustive_ternary(
    lambda: u64,
    mu: u64,
    nu: u64,
    modulus: u64,
) -> Result<Option<(u64, u64, u64)>> {
    if modulus >= TERNARY_SEARCH_LIMIT {
        return Err(over_limit("N", modulus, TERNARY_SEARCH_LIMIT));
    }
    let half = modulus.saturating_sub(1) / 2;
    for x in 1..=half {
        for y in 1..=half {
            for z in 1..=half {
                if (lambda * x * x + mu * y * y + nu * z * z) % modulus == 0 {
                    return Ok(Some((x, y, z)));
                }
            }
        }
    }
    Ok(None)
}

/// Integer solutions `(a, b, c, t)` of `a^2 + b^2 + c^2 = 7 t^2` with
/// `a >= b >= c >= 0` and `1 <= t <= bound`.
///
/// A rational solution of `1 = x^2 + x + y^2 + y + z^2 + z` gives one: multiply
/// by 4 and complete the squares to get `7 = (2x+1)^2 + (2y+1)^2 + (2z+1)^2`,
/// then clear the common denominator `t` of `x, y, z`, so `a = 2u + t` where
/// `x = u / t`. The list is expected to be empty.
pub fn rational_triangular_search(bound: u64) -> Result<Vec<(u64, u64, u64, u64)>> {
    if bound > TRIANGULAR_LIMIT {
        return Err(over_limit("bound", bound, TRIANGULAR_LIMIT));
    }
    let mut found = Vec::new();
    for t in 1..=bound {
        let target = 7 * t * t;
        let mut a = 0u64;
        while a * a <= target {
            for b in 0..=a {
                let used = a * a + b * b;
                if used > target {
                    break;
                }
                if let Some(c) = square_root_if_square(target - used) {
                    if c <= b {
                        found.push((a, b, c, t));
                    }
                }
            }
            a += 1;
        }
    }
    Ok(found)
}
