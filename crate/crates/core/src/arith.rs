//! Exact integer plumbing: centered remainders, gcd, modular powers,
//! primality, factorization and square roots modulo a prime.
//!
//! Every quantity is a [`BigInt`]; nothing here rounds or overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Miller-Rabin with the first thirteen prime bases is exact below this bound
/// (3 317 044 064 679 887 385 961 981, Sorenson and Webster).
pub const PRIMALITY_EXACT_LIMIT: &str = "3317044064679887385961981";

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Work limits for the operations whose cost grows with input size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest trial divisor tried before switching to Pollard rho.
    pub trial_division_limit: u64,
    /// Iterations of Brent's cycle search per rho attempt.
    pub rho_iterations: u64,
    /// Number of rho attempts (distinct polynomial constants) per cofactor.
    pub rho_attempts: u32,
    /// Hard cap on descent steps for prime targets.
    pub descent_steps: usize,
    /// Largest modulus for which O(N) table-based congruence solvers run.
    pub table_limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            trial_division_limit: 1 << 16,
            rho_iterations: 1 << 22,
            rho_attempts: 16,
            descent_steps: 100_000,
            table_limit: 1 << 20,
        }
    }
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(BigInt, u32)> {
        self.factors.iter()
    }
}

fn check_modulus(m: &BigInt) -> Result<()> {
    if m.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidModulus(m.to_string()))
    }
}

/// Residue of `x` modulo `m` in `(-m/2, m/2]`; a tie at exactly `m/2` goes to `+m/2`.
pub fn centered_rem(x: &BigInt, m: &BigInt) -> Result<BigInt> {
    check_modulus(m)?;
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        Ok(r - m)
    } else {
        Ok(r)
    }
}

/// Nonnegative gcd with `gcd(0, 0) = 0`.
pub fn gcd(x: &BigInt, y: &BigInt) -> BigInt {
    x.gcd(y)
}

/// `b^e mod m` in `[0, m)`.
pub fn mod_pow(b: &BigInt, e: &BigInt, m: &BigInt) -> Result<BigInt> {
    check_modulus(m)?;
    if e.is_negative() {
        return Err(Error::InvalidInput(format!("negative exponent {e}")));
    }
    let base = b.mod_floor(m);
    Ok(base.modpow(e, m))
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<Option<BigInt>> {
    check_modulus(m)?;
    let ext = a.mod_floor(m).extended_gcd(m);
    if !ext.gcd.is_one() {
        return Ok(None);
    }
    Ok(Some(ext.x.mod_floor(m)))
}

/// Exact primality for `n` below [`PRIMALITY_EXACT_LIMIT`].
///
/// Larger inputs return a budget error instead of a probabilistic answer.
pub fn is_prime(n: &BigInt) -> Result<bool> {
    if n < &BigInt::from(2) {
        return Ok(false);
    }
    for &p in &MR_BASES {
        let p = BigInt::from(p);
        if *n == p {
            return Ok(true);
        }
        if (n % &p).is_zero() {
            return Ok(false);
        }
    }
    let limit: BigInt = PRIMALITY_EXACT_LIMIT.parse().expect("constant parses");
    if *n >= limit {
        return Err(Error::Budget(format!(
            "primality of {n} is outside the exact range (< {PRIMALITY_EXACT_LIMIT})"
        )));
    }
    let one = BigInt::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

fn require_prime(p: &BigInt) -> Result<()> {
    if is_prime(p)? {
        Ok(())
    } else {
        Err(Error::Domain(format!("{p} is not prime")))
    }
}

/// Complete factorization of `n >= 1` by trial division followed by Brent's
/// variant of Pollard rho on the remaining cofactor.
pub fn factorize(n: &BigInt, budget: &Budget) -> Result<Factorization> {
    if !n.is_positive() {
        return Err(Error::InvalidInput(format!("cannot factorize {n}")));
    }
    let mut primes: Vec<BigInt> = Vec::new();
    let mut rest = n.clone();

    let push_div = |rest: &mut BigInt, d: &BigInt, primes: &mut Vec<BigInt>| {
        while (&*rest % d).is_zero() {
            *rest /= d;
            primes.push(d.clone());
        }
    };

    push_div(&mut rest, &BigInt::from(2), &mut primes);
    let mut d = 3u64;
    while d <= budget.trial_division_limit {
        let dd = BigInt::from(d);
        if &dd * &dd > rest {
            break;
        }
        push_div(&mut rest, &dd, &mut primes);
        d += 2;
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_prime(&m)? {
                primes.push(m);
                continue;
            }
            if let Some(root) = exact_sqrt(&m) {
                stack.push(root.clone());
                stack.push(root);
                continue;
            }
            let f = pollard_brent(&m, budget)?;
            let cofactor = &m / &f;
            stack.push(f);
            stack.push(cofactor);
        }
    }
    primes.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { factors })
}

fn exact_sqrt(m: &BigInt) -> Option<BigInt> {
    let r = m.sqrt();
    (&r * &r == *m).then_some(r)
}

fn pollard_brent(n: &BigInt, budget: &Budget) -> Result<BigInt> {
    let one = BigInt::one();
    for attempt in 1..=budget.rho_attempts {
        let c = BigInt::from(attempt);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut spent: u64 = 0;
        const BATCH: u64 = 128;
        while g.is_one() && spent < budget.rho_iterations {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = q * (&x - &y).abs() % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            spent += r;
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g > one && g < *n {
            return Ok(g);
        }
    }
    Err(Error::Budget(format!("could not split {n} within the factorization budget")))
}

/// Smaller square root of `a` modulo the prime `p`, or `None` for a non-residue.
///
/// Uses `a^((p+1)/4)` when `p = 3 (mod 4)` and Tonelli-Shanks otherwise.
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Result<Option<BigInt>> {
    require_prime(p)?;
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Ok(Some(a));
    }
    if *p == BigInt::from(2) {
        return Ok(Some(a));
    }
    let one = BigInt::one();
    let p_minus_one = p - &one;
    let half = &p_minus_one >> 1;
    if a.modpow(&half, p) != one {
        return Ok(None);
    }
    let root = if (p % 4u32) == BigInt::from(3) {
        a.modpow(&((p + &one) >> 2), p)
    } else {
        tonelli_shanks(&a, p)
    };
    let other = p - &root;
    Ok(Some(root.min(other)))
}

fn tonelli_shanks(a: &BigInt, p: &BigInt) -> BigInt {
    let one = BigInt::one();
    let p_minus_one = p - &one;
    let mut q = p_minus_one.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let half = &p_minus_one >> 1;
    let mut z = BigInt::from(2);
    while z.modpow(&half, p) != p_minus_one {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = &t2 * &t2 % p;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = &b * &b % p;
        }
        m = i;
        c = &b * &b % p;
        t = t * &c % p;
        r = r * b % p;
    }
    r
}

/// Legendre symbol style residue test modulo an odd prime: `Some(true)` for a
/// nonzero residue, `Some(false)` for a non-residue, `None` for zero.
pub(crate) fn residue_class(a: &BigInt, p: &BigInt) -> Option<bool> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return None;
    }
    let half = (p - 1u32) >> 1;
    Some(a.modpow(&half, p).is_one())
}

/// Number of bits in `|n|`; zero for zero.
pub fn bit_length(n: &BigInt) -> u64 {
    n.bits()
}
