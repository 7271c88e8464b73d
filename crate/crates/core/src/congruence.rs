//! Quadratic residue classes and the congruence solvers that seed the descents:
//! three squares summing to zero modulo a prime, `lambda x^2 + mu y^2 + nu z^2 = 0`
//! modulo a prime, and `p^2 - B q^2 - C = 0` modulo a prime.
//!
//! Every solver is a deterministic search, so its answers double as test vectors.
//! Small moduli use an O(N) table of square roots; larger ones fall back to
//! [`arith::sqrt_mod`] with the same search order and therefore the same output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, Budget};
use crate::error::{Error, Result};

/// Partition of `[1, N-1]` into quadratic residues and non-residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareClasses {
    pub modulus: u64,
    pub residues: Vec<u64>,
    pub nonresidues: Vec<u64>,
}

impl SquareClasses {
    pub fn is_residue(&self, v: u64) -> bool {
        self.residues.binary_search(&(v % self.modulus)).is_ok()
    }
}

/// A nonzero solution of `lambda x^2 + mu y^2 + nu z^2 = 0 (mod N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernarySolution {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    pub lambda: BigInt,
    pub mu: BigInt,
    pub nu: BigInt,
    pub modulus: BigInt,
    /// True when none of `x, y, z` is divisible by the modulus.
    pub coprime: bool,
}

impl TernarySolution {
    fn new(x: BigInt, y: BigInt, z: BigInt, coeffs: (&BigInt, &BigInt, &BigInt), modulus: &BigInt) -> Self {
        let coprime = [&x, &y, &z].iter().all(|v| !(*v % modulus).is_zero());
        TernarySolution {
            x,
            y,
            z,
            lambda: coeffs.0.clone(),
            mu: coeffs.1.clone(),
            nu: coeffs.2.clone(),
            modulus: modulus.clone(),
            coprime,
        }
    }

    /// `lambda x^2 + mu y^2 + nu z^2`, before reduction.
    pub fn value(&self) -> BigInt {
        &self.lambda * &self.x * &self.x + &self.mu * &self.y * &self.y + &self.nu * &self.z * &self.z
    }

    pub fn verifies(&self) -> bool {
        let nonzero = [&self.x, &self.y, &self.z].iter().any(|v| !(*v % &self.modulus).is_zero());
        nonzero && (self.value() % &self.modulus).is_zero()
    }
}

/// Smallest square roots modulo a prime, tabulated when the prime is small.
enum RootFinder {
    Table { modulus: BigInt, roots: Vec<Option<u32>> },
    Direct { modulus: BigInt },
}

impl RootFinder {
    fn new(p: &BigInt, budget: &Budget) -> Self {
        match p.to_u64() {
            Some(m) if m <= budget.table_limit && m <= u32::MAX as u64 => {
                let mut roots = vec![None; m as usize];
                for k in (0..m).rev() {
                    roots[((k * k) % m) as usize] = Some(k as u32);
                }
                RootFinder::Table { modulus: p.clone(), roots }
            }
            _ => RootFinder::Direct { modulus: p.clone() },
        }
    }

    fn modulus(&self) -> &BigInt {
        match self {
            RootFinder::Table { modulus, .. } | RootFinder::Direct { modulus } => modulus,
        }
    }

    fn smallest_root(&self, v: &BigInt) -> Option<BigInt> {
        match self {
            RootFinder::Table { modulus, roots } => {
                let idx = v.mod_floor(modulus).to_usize().expect("reduced below table size");
                roots[idx].map(BigInt::from)
            }
            RootFinder::Direct { modulus } => arith::sqrt_mod(v, modulus).expect("modulus is prime"),
        }
    }
}

fn require_odd_prime(n: &BigInt) -> Result<()> {
    if n.is_odd() && arith::is_prime(n)? {
        Ok(())
    } else {
        Err(Error::Domain(format!("{n} is not an odd prime")))
    }
}

fn require_prime(n: &BigInt) -> Result<()> {
    if arith::is_prime(n)? {
        Ok(())
    } else {
        Err(Error::Domain(format!("{n} is not prime")))
    }
}

fn table_size(n: &BigInt, budget: &Budget) -> Result<u64> {
    n.to_u64()
        .filter(|&m| m <= budget.table_limit)
        .ok_or_else(|| Error::Budget(format!("modulus {n} exceeds the table limit {}", budget.table_limit)))
}

/// Residues `{k^2 mod N : 1 <= k <= (N-1)/2}` and their complement in `[1, N-1]`.
pub fn square_classes(n: &BigInt, budget: &Budget) -> Result<SquareClasses> {
    require_odd_prime(n)?;
    let m = table_size(n, budget)?;
    let mut is_residue = vec![false; m as usize];
    for k in 1..=(m - 1) / 2 {
        is_residue[((k * k) % m) as usize] = true;
    }
    let (residues, nonresidues): (Vec<u64>, Vec<u64>) = (1..m).partition(|&v| is_residue[v as usize]);
    Ok(SquareClasses { modulus: m, residues, nonresidues })
}

/// `x^2 + y^2 + z^2 = 0 (mod N)` with not all of `x, y, z` divisible by `N`.
///
/// Returns the lexicographically smallest triple with every entry in
/// `[1, N-1]` when one exists, and otherwise the smallest `(x, y, 0)`.
pub fn find_three_squares(n: &BigInt, budget: &Budget) -> Result<TernarySolution> {
    require_prime(n)?;
    let one = BigInt::one();
    let coeffs = (&one, &one, &one);
    let finder = RootFinder::new(n, budget);
    let mut x = BigInt::one();
    while x < *n {
        let mut y = BigInt::one();
        while y < *n {
            let v = -(&x * &x + &y * &y);
            if !(&v % n).is_zero() {
                if let Some(z) = finder.smallest_root(&v) {
                    return Ok(TernarySolution::new(x, y, z, coeffs, n));
                }
            }
            y += 1;
        }
        x += 1;
    }
    let mut x = BigInt::zero();
    while x < *n {
        let v = -(&x * &x);
        if let Some(y) = finder.smallest_root(&v) {
            if !(x.is_zero() && y.is_zero()) {
                return Ok(TernarySolution::new(x, y, BigInt::zero(), coeffs, n));
            }
        }
        x += 1;
    }
    Err(Error::Domain(format!("no nonzero sum of three squares vanishes modulo {n}")))
}

/// Smallest nontrivial `(p, q)` (ordered by `q`, then `p`) with
/// `p^2 - B q^2 - C = 0 (mod A)`, both in `[0, (A-1)/2]`.
///
/// The value sets `{p^2}` and `{B q^2 + C}` each have `(A+1)/2` elements, so
/// they meet whenever `B` is prime to `A`.
pub fn solve_lagrange(b: &BigInt, c: &BigInt, a: &BigInt, budget: &Budget) -> Result<(BigInt, BigInt)> {
    require_odd_prime(a)?;
    let b_red = b.mod_floor(a);
    let c_red = c.mod_floor(a);
    if b_red.is_zero() {
        return Err(Error::Domain(format!("B = {b} must be prime to {a}")));
    }
    if c_red.is_zero() && arith::residue_class(&b_red, a) == Some(false) {
        return Err(Error::Domain(format!(
            "p^2 = {b} q^2 has only the trivial solution modulo {a}"
        )));
    }
    let finder = RootFinder::new(a, budget);
    solve_lagrange_with(&b_red, &c_red, &finder)
}

fn solve_lagrange_with(b: &BigInt, c: &BigInt, finder: &RootFinder) -> Result<(BigInt, BigInt)> {
    let a = finder.modulus();
    let mut q = BigInt::zero();
    while q < *a {
        let target = b * &q * &q + c;
        if let Some(p) = finder.smallest_root(&target) {
            if !(p.is_zero() && q.is_zero()) {
                return Ok((p, q));
            }
        }
        q += 1;
    }
    Err(Error::Domain(format!("p^2 - {b} q^2 - {c} has no nontrivial root modulo {a}")))
}

/// `(1, theta mu, theta nu) mod N` with `theta = lambda^-1 (mod N)`.
pub fn normalize_coefficients(
    lambda: &BigInt,
    mu: &BigInt,
    nu: &BigInt,
    n: &BigInt,
) -> Result<(BigInt, BigInt, BigInt)> {
    require_odd_prime(n)?;
    let theta = arith::mod_inverse(lambda, n)?
        .ok_or_else(|| Error::Domain(format!("lambda = {lambda} is divisible by {n}")))?;
    Ok((BigInt::one(), (&theta * mu).mod_floor(n), (&theta * nu).mod_floor(n)))
}

/// Solves `lambda x^2 + mu y^2 + nu z^2 = 0 (mod N)` with `z = 1`.
///
/// After normalizing to `x^2 + mu' y^2 + nu'`, scans `y` upward and looks up
/// `x^2 = -(mu' y^2 + nu')`. A first pass keeps `x, y` nonzero; if it finds
/// nothing no coprime solution exists at all (any one rescales to `z = 1`).
pub fn solve_ternary(
    lambda: &BigInt,
    mu: &BigInt,
    nu: &BigInt,
    n: &BigInt,
    require_coprime: bool,
    budget: &Budget,
) -> Result<TernarySolution> {
    require_odd_prime(n)?;
    for (name, c) in [("lambda", lambda), ("mu", mu), ("nu", nu)] {
        if (c % n).is_zero() {
            return Err(Error::Domain(format!("{name} = {c} must be prime to {n}")));
        }
    }
    let (_, mu_n, nu_n) = normalize_coefficients(lambda, mu, nu, n)?;
    let finder = RootFinder::new(n, budget);
    let coeffs = (lambda, mu, nu);

    let mut y = BigInt::one();
    while y < *n {
        let v = -(&mu_n * &y * &y + &nu_n);
        if !(&v % n).is_zero() {
            if let Some(x) = finder.smallest_root(&v) {
                return Ok(TernarySolution::new(x, y, BigInt::one(), coeffs, n));
            }
        }
        y += 1;
    }
    if require_coprime {
        return Err(Error::NoCoprimeSolution(n.to_string()));
    }
    let mut y = BigInt::zero();
    while y < *n {
        let v = -(&mu_n * &y * &y + &nu_n);
        if let Some(x) = finder.smallest_root(&v) {
            return Ok(TernarySolution::new(x, y, BigInt::one(), coeffs, n));
        }
        y += 1;
    }
    unreachable!("value sets of size (N+1)/2 always intersect")
}

/// Rescales a solution so that its third entry becomes `f`:
/// `(v x, v y, f) mod N` with `v = f z^-1`.
pub fn rescale_solution(s: &TernarySolution, f: &BigInt) -> Result<TernarySolution> {
    let n = &s.modulus;
    let z_inv = arith::mod_inverse(&s.z, n)?.ok_or_else(|| Error::NotRescalable(n.to_string()))?;
    let f = f.mod_floor(n);
    if f.is_zero() {
        return Err(Error::InvalidInput(format!("f must be prime to {n}")));
    }
    let v = (&f * z_inv).mod_floor(n);
    let x = (&v * &s.x).mod_floor(n);
    let y = (&v * &s.y).mod_floor(n);
    Ok(TernarySolution::new(x, y, f, (&s.lambda, &s.mu, &s.nu), n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn triple(s: &TernarySolution) -> (i64, i64, i64) {
        (s.x.to_i64().unwrap(), s.y.to_i64().unwrap(), s.z.to_i64().unwrap())
    }

    fn odd_primes_below(limit: u64) -> Vec<u64> {
        (3..limit).step_by(2).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
    }

    #[test]
    fn square_classes_examples() {
        let bud = Budget::default();
        let c = square_classes(&b(7), &bud).unwrap();
        assert_eq!((c.residues, c.nonresidues), (vec![1, 2, 4], vec![3, 5, 6]));
        let c = square_classes(&b(3), &bud).unwrap();
        assert_eq!((c.residues, c.nonresidues), (vec![1], vec![2]));
        let c = square_classes(&b(5), &bud).unwrap();
        assert_eq!((c.residues, c.nonresidues), (vec![1, 4], vec![2, 3]));
        assert!(matches!(square_classes(&b(2), &bud), Err(Error::Domain(_))));
        assert!(matches!(square_classes(&b(9), &bud), Err(Error::Domain(_))));
    }

    #[test]
    fn class_closure_for_odd_primes_below_500() {
        let bud = Budget::default();
        for p in odd_primes_below(500) {
            let c = square_classes(&b(p as i64), &bud).unwrap();
            assert_eq!(c.residues.len() as u64, (p - 1) / 2);
            assert_eq!(c.nonresidues.len() as u64, (p - 1) / 2);
            for &r in &c.residues {
                for &s in &c.residues {
                    assert!(c.is_residue(r * s % p));
                }
                for &a in &c.nonresidues {
                    assert!(!c.is_residue(r * a % p));
                }
            }
            for &a in &c.nonresidues {
                for &e in &c.nonresidues {
                    assert!(c.is_residue(a * e % p));
                }
            }
        }
    }

    #[test]
    fn find_three_squares_examples() {
        let bud = Budget::default();
        let s = find_three_squares(&b(7), &bud).unwrap();
        assert_eq!(triple(&s), (1, 2, 3));
        assert!(s.coprime);
        assert_eq!(s.value(), b(14));
        let s = find_three_squares(&b(3), &bud).unwrap();
        assert_eq!(triple(&s), (1, 1, 1));
        assert!(s.coprime);
        let s = find_three_squares(&b(5), &bud).unwrap();
        assert_eq!(triple(&s), (1, 2, 0));
        assert!(!s.coprime);
        let s = find_three_squares(&b(2), &bud).unwrap();
        assert_eq!(triple(&s), (1, 1, 0));
        assert!(matches!(find_three_squares(&b(15), &bud), Err(Error::Domain(_))));
    }

    #[test]
    fn solve_lagrange_examples() {
        let bud = Budget::default();
        assert_eq!(solve_lagrange(&b(2), &b(3), &b(7), &bud).unwrap(), (b(2), b(2)));
        assert_eq!(solve_lagrange(&b(-1), &b(-1), &b(11), &bud).unwrap(), (b(3), b(1)));
        assert_eq!(solve_lagrange(&b(1), &b(0), &b(5), &bud).unwrap(), (b(1), b(1)));
        assert_eq!(solve_lagrange(&b(-1), &b(-1), &b(23), &bud).unwrap(), (b(8), b(2)));
        assert!(matches!(solve_lagrange(&b(1), &b(1), &b(9), &bud), Err(Error::Domain(_))));
        assert!(matches!(solve_lagrange(&b(1), &b(1), &b(2), &bud), Err(Error::Domain(_))));
        assert!(matches!(solve_lagrange(&b(0), &b(3), &b(7), &bud), Err(Error::Domain(_))));
        // 2 is a non-residue mod 5, so p^2 = 2 q^2 forces p = q = 0
        assert!(matches!(solve_lagrange(&b(2), &b(0), &b(5), &bud), Err(Error::Domain(_))));
    }

    #[test]
    fn solve_lagrange_table_and_direct_routes_agree() {
        let table = Budget::default();
        let direct = Budget { table_limit: 0, ..Budget::default() };
        for p in odd_primes_below(400) {
            let pb = b(p as i64);
            for (bb, cc) in [(-1, -1), (1, 1), (2, 3), (3, 0), (p as i64 - 1, 5)] {
                let t = solve_lagrange(&b(bb), &b(cc), &pb, &table);
                let d = solve_lagrange(&b(bb), &b(cc), &pb, &direct);
                assert_eq!(t, d, "B={bb} C={cc} A={p}");
            }
        }
    }

    #[test]
    fn solve_lagrange_total_for_small_primes() {
        let bud = Budget::default();
        for p in odd_primes_below(100) {
            let pb = b(p as i64);
            for bb in 1..p as i64 {
                for cc in 0..p as i64 {
                    let r = solve_lagrange(&b(bb), &b(cc), &pb, &bud);
                    let trivial_only = cc == 0 && arith::residue_class(&b(bb), &pb) == Some(false);
                    match r {
                        Ok((x, y)) => {
                            assert!(!trivial_only);
                            assert!(((&x * &x - b(bb) * &y * &y - b(cc)) % &pb).is_zero());
                            assert!(&x * 2 < pb && &y * 2 < pb);
                        }
                        Err(_) => assert!(trivial_only, "B={bb} C={cc} A={p}"),
                    }
                }
            }
        }
    }

    #[test]
    fn x2_y2_plus_one_solvable_below_2000() {
        let bud = Budget::default();
        for p in odd_primes_below(2000) {
            let pb = b(p as i64);
            let (x, y) = solve_lagrange(&b(-1), &b(-1), &pb, &bud).unwrap();
            assert!(((&x * &x + &y * &y + BigInt::one()) % &pb).is_zero());
        }
    }

    #[test]
    fn solve_ternary_examples() {
        let bud = Budget::default();
        let s = solve_ternary(&b(1), &b(2), &b(3), &b(7), false, &bud).unwrap();
        assert_eq!(triple(&s), (3, 1, 1));
        assert_eq!(s.value(), b(14));
        let s = solve_ternary(&b(1), &b(1), &b(1), &b(3), false, &bud).unwrap();
        assert_eq!(triple(&s), (1, 1, 1));
        let e = solve_ternary(&b(1), &b(1), &b(1), &b(5), true, &bud);
        assert!(matches!(e, Err(Error::NoCoprimeSolution(_))));
        let s = solve_ternary(&b(1), &b(1), &b(1), &b(5), false, &bud).unwrap();
        assert!(s.verifies());
        assert!(!s.coprime);
        assert!(matches!(solve_ternary(&b(0), &b(1), &b(1), &b(5), false, &bud), Err(Error::Domain(_))));
        assert!(matches!(solve_ternary(&b(1), &b(1), &b(1), &b(4), false, &bud), Err(Error::Domain(_))));
    }

    #[test]
    fn rescale_examples() {
        let bud = Budget::default();
        let s = solve_ternary(&b(1), &b(2), &b(3), &b(7), false, &bud).unwrap();
        let r = rescale_solution(&s, &b(2)).unwrap();
        assert_eq!(triple(&r), (6, 2, 2));
        assert_eq!(r.value(), b(56));
        assert_eq!(rescale_solution(&s, &s.z).unwrap(), s);

        let s = find_three_squares(&b(7), &bud).unwrap();
        let r = rescale_solution(&s, &b(1)).unwrap();
        assert_eq!(triple(&r), (5, 3, 1));
        assert_eq!(r.value(), b(35));

        let s = find_three_squares(&b(5), &bud).unwrap();
        assert!(matches!(rescale_solution(&s, &b(1)), Err(Error::NotRescalable(_))));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_coefficients(&b(2), &b(3), &b(4), &b(7)).unwrap(), (b(1), b(5), b(2)));
        assert_eq!(normalize_coefficients(&b(1), &b(4), &b(9), &b(11)).unwrap(), (b(1), b(4), b(9)));
        assert_eq!(normalize_coefficients(&b(3), &b(1), &b(1), &b(5)).unwrap(), (b(1), b(2), b(2)));
        assert!(matches!(normalize_coefficients(&b(5), &b(1), &b(1), &b(5)), Err(Error::Domain(_))));
    }

    #[test]
    fn normalize_preserves_solution_sets() {
        let n = 11i64;
        for (l, m, v) in [(2, 3, 4), (5, 7, 10), (3, 3, 3)] {
            let (_, m2, v2) = normalize_coefficients(&b(l), &b(m), &b(v), &b(n)).unwrap();
            let (m2, v2) = (m2.to_i64().unwrap(), v2.to_i64().unwrap());
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let orig = (l * x * x + m * y * y + v * z * z) % n == 0;
                        let norm = (x * x + m2 * y * y + v2 * z * z) % n == 0;
                        assert_eq!(orig, norm);
                    }
                }
            }
        }
    }

    #[test]
    fn rescale_preserves_validity() {
        let bud = Budget::default();
        for p in odd_primes_below(60) {
            let pb = b(p as i64);
            if [2, 3, 5].contains(&p) {
                continue;
            }
            let s = solve_ternary(&b(2), &b(3), &b(5), &pb, false, &bud).unwrap();
            for f in 1..p as i64 {
                let r = rescale_solution(&s, &b(f)).unwrap();
                assert!(r.verifies(), "p={p} f={f}");
                assert_eq!(r.z, b(f));
            }
        }
    }
}
