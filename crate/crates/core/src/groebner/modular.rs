//! Word-size prime arithmetic for exact rational linear algebra: solve modulo
//! many primes, combine by CRT, reconstruct rationals, then verify over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numkernel::Rational;

/// Primes below 2^62, so sums of two residues never overflow.
const START: u64 = (1 << 62) - 1;
/// Give up on the modular route after this many primes.
const MAX_PRIMES: usize = 4096;

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in decreasing order starting just below 2^62.
#[derive(Debug, Clone)]
pub(crate) struct Primes {
    next: u64,
}

impl Primes {
    pub(crate) fn new() -> Self {
        Self { next: START }
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next > 3 {
            let n = self.next;
            self.next -= 2;
            if is_prime(n) {
                return Some(n);
            }
        }
        None
    }
}

fn big_mod(x: &BigInt, p: u64) -> u64 {
    Limbs::new(x).residue(p)
}

/// Image of `q` in Z/p, or `None` when p divides the denominator.
pub(crate) fn rational_mod(q: &Rational, p: u64) -> Option<u64> {
    let d = big_mod(q.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mul_mod(big_mod(q.numer(), p), inv_mod(d, p), p))
}

/// The rational `n/d` with `|n|, d <= sqrt(m/2)` congruent to `a` mod `m`, if any.
pub(crate) fn reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// An integer kept as little-endian 64-bit limbs for fast reduction modulo
/// word-size primes.
struct Limbs {
    negative: bool,
    digits: Vec<u64>,
}

impl Limbs {
    fn new(x: &BigInt) -> Self {
        Self {
            negative: x.is_negative(),
            digits: x.magnitude().to_u64_digits(),
        }
    }

    fn residue(&self, p: u64) -> u64 {
        let r = self
            .digits
            .iter()
            .rev()
            .fold(0u128, |r, &d| ((r << 64) | d as u128) % p as u128) as u64;
        if self.negative && r != 0 {
            p - r
        } else {
            r
        }
    }
}

/// A rational vector over a common denominator, preprocessed for reduction.
struct ClearedVector {
    den: BigInt,
    entries: Vec<(usize, BigInt)>,
    den_limbs: Limbs,
    entry_limbs: Vec<(usize, Limbs)>,
}

impl ClearedVector {
    fn new(v: &[Rational]) -> Self {
        let den = v.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let entries: Vec<(usize, BigInt)> = v
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(i, q)| (i, q.numer() * (&den / q.denom())))
            .collect();
        Self {
            den_limbs: Limbs::new(&den),
            entry_limbs: entries.iter().map(|(i, x)| (*i, Limbs::new(x))).collect(),
            den,
            entries,
        }
    }
}

/// One prefix system: find `c` with `Σ_{j<k} c_j cols[j] = rhs`.
pub(crate) struct PrefixSystem {
    pub k: usize,
    pub rhs: Vec<Rational>,
}

/// Solves every prefix system modulo `p` with one forward elimination over the
/// columns in order. `None` when `p` is unlucky for this data.
fn solve_mod(cols: &[ClearedVector], rhs: &[ClearedVector], ks: &[usize], rows: usize, p: u64) -> Option<Vec<Vec<u64>>> {
    let width = cols.len() + rhs.len();
    let mut a = vec![vec![0u64; width]; rows];
    for (j, col) in cols.iter().chain(rhs).enumerate() {
        let d = col.den_limbs.residue(p);
        if d == 0 {
            return None;
        }
        let inv = inv_mod(d, p);
        for (i, x) in &col.entry_limbs {
            a[*i][j] = mul_mod(x.residue(p), inv, p);
        }
    }
    let mut pivots: Vec<usize> = Vec::with_capacity(cols.len());
    let mut is_pivot = vec![false; rows];
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by_key(|&s| ks[s]);
    let mut next = 0;
    let mut out = vec![Vec::new(); ks.len()];
    for j in 0..=cols.len() {
        // systems whose prefix is complete: pivots 0..j are final
        while next < order.len() && ks[order[next]] == j {
            let s = order[next];
            let c = cols.len() + s;
            if (0..rows).any(|i| !is_pivot[i] && a[i][c] != 0) {
                return None;
            }
            let mut x = vec![0u64; j];
            for l in (0..j).rev() {
                let r = pivots[l];
                let mut v = a[r][c];
                for (m, xm) in x.iter().enumerate().take(j).skip(l + 1) {
                    v = sub_mod(v, mul_mod(a[r][m], *xm, p), p);
                }
                x[l] = mul_mod(v, inv_mod(a[r][l], p), p);
            }
            out[s] = x;
            next += 1;
        }
        if j == cols.len() {
            break;
        }
        let r = (0..rows).find(|&i| !is_pivot[i] && a[i][j] != 0)?;
        is_pivot[r] = true;
        pivots.push(r);
        let inv = inv_mod(a[r][j], p);
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if is_pivot[i] || row[j] == 0 {
                continue;
            }
            let f = mul_mod(row[j], inv, p);
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(j) {
                if y != 0 {
                    *x = sub_mod(*x, mul_mod(f, y, p), p);
                }
            }
        }
    }
    Some(out)
}

/// Exact check of `Σ c_j cols[j] = rhs` in integers over one common denominator.
fn verify(cols: &[ClearedVector], rhs: &ClearedVector, c: &[Rational], rows: usize) -> bool {
    let terms: Vec<(&ClearedVector, &Rational, BigInt)> = cols
        .iter()
        .zip(c)
        .filter(|(_, cj)| !cj.is_zero())
        .map(|(col, cj)| (col, cj, cj.denom() * &col.den))
        .collect();
    let common = terms.iter().fold(rhs.den.clone(), |l, (_, _, d)| l.lcm(d));
    let mut acc = vec![BigInt::zero(); rows];
    for (col, cj, d) in &terms {
        let scale = cj.numer() * (&common / d);
        for (i, x) in &col.entries {
            acc[*i] += &scale * x;
        }
    }
    let scale = &common / &rhs.den;
    let mut expected = vec![BigInt::zero(); rows];
    for (i, x) in &rhs.entries {
        expected[*i] = &scale * x;
    }
    acc == expected
}

/// Exact solutions of all prefix systems, or `None` if the modular route
/// fails (some system inconsistent over Q, or too many primes needed).
/// The columns must be linearly independent over Q.
pub(crate) fn solve_prefix_systems(
    cols: &[Vec<Rational>],
    systems: &[PrefixSystem],
) -> Option<Vec<Vec<Rational>>> {
    if systems.is_empty() {
        return Some(Vec::new());
    }
    let mut residues: Vec<Vec<BigInt>> = systems.iter().map(|s| vec![BigInt::zero(); s.k]).collect();
    let mut modulus = BigInt::one();
    let mut used = 0;
    let mut target = 4;
    let mut unlucky = 0;
    let mut primes = Primes::new();
    let rows = cols.first().map_or(0, Vec::len);
    let cleared: Vec<ClearedVector> = cols.iter().map(|c| ClearedVector::new(c)).collect();
    let rhs: Vec<ClearedVector> = systems.iter().map(|s| ClearedVector::new(&s.rhs)).collect();
    let ks: Vec<usize> = systems.iter().map(|s| s.k).collect();
    loop {
        while used < target {
            let p = primes.next()?;
            let Some(sol) = solve_mod(&cleared, &rhs, &ks, rows, p) else {
                unlucky += 1;
                // a system with no rational solution fails modulo every prime
                if unlucky > 8 && unlucky > used {
                    return None;
                }
                continue;
            };
            // CRT: x = r + M ((s - r) M^{-1} mod p)
            let m_inv = inv_mod(big_mod(&modulus, p), p);
            for (res, s) in residues.iter_mut().zip(&sol) {
                for (r, &v) in res.iter_mut().zip(s) {
                    let t = mul_mod(sub_mod(v, big_mod(r, p), p), m_inv, p);
                    *r += &modulus * t;
                }
            }
            modulus *= p;
            used += 1;
        }
        let candidate: Option<Vec<Vec<Rational>>> = residues
            .iter()
            .map(|res| res.iter().map(|r| reconstruct(r, &modulus)).collect())
            .collect();
        if let Some(c) = candidate {
            if rhs.iter().zip(&c).all(|(r, c)| verify(&cleared, r, c, rows)) {
                return Some(c);
            }
        }
        if target >= MAX_PRIMES {
            return None;
        }
        target *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;

    #[test]
    fn primes_descend_from_two_to_the_62() {
        let ps: Vec<u64> = Primes::new().take(3).collect();
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| p < 1 << 62 && is_prime(p)));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_prime(2_305_843_009_213_693_951));
    }

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let m = BigInt::from(1_000_003i64) * BigInt::from(998_244_353i64);
        for q in [ratio(-3, 7), ratio(22, 5), ratio(0, 1), ratio(1, 1)] {
            let a1 = rational_mod(&q, 1_000_003).unwrap();
            let a2 = rational_mod(&q, 998_244_353).unwrap();
            let (p1, p2) = (1_000_003u64, 998_244_353u64);
            let t = mul_mod(sub_mod(a2, a1 % p2, p2), inv_mod(p1 % p2, p2), p2);
            let a = BigInt::from(a1) + BigInt::from(p1) * t;
            assert_eq!(reconstruct(&a, &m), Some(q));
        }
    }

    #[test]
    fn prefix_systems_solved_exactly() {
        // columns (1, 0, 2), (0, 3, 1); rhs = 1/2 col0 - 5/3 col1
        let cols = vec![
            vec![ratio(1, 1), ratio(0, 1), ratio(2, 1)],
            vec![ratio(0, 1), ratio(3, 1), ratio(1, 1)],
        ];
        let rhs: Vec<Rational> = (0..3)
            .map(|i| ratio(1, 2) * &cols[0][i] - ratio(5, 3) * &cols[1][i])
            .collect();
        let short = PrefixSystem {
            k: 1,
            rhs: vec![ratio(4, 1), ratio(0, 1), ratio(8, 1)],
        };
        let sol = solve_prefix_systems(&cols, &[PrefixSystem { k: 2, rhs }, short]).unwrap();
        assert_eq!(sol[0], vec![ratio(1, 2), ratio(-5, 3)]);
        assert_eq!(sol[1], vec![ratio(4, 1)]);
    }

    #[test]
    fn inconsistent_system_rejected() {
        let cols = vec![vec![ratio(1, 1), ratio(0, 1)]];
        let sys = PrefixSystem {
            k: 1,
            rhs: vec![ratio(1, 1), ratio(1, 1)],
        };
        assert!(solve_prefix_systems(&cols, &[sys]).is_none());
    }
}
