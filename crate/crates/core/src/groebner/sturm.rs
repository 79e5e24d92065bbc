//! Exact real-root isolation with Sturm sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{int, power_of_two_above, to_f64, DyadicInterval, Rational};
use crate::polyalg::{ExponentVector, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootDomain {
    AllReals,
    PositiveOnly,
}

/// Dense univariate polynomial over the rationals, coefficients in ascending
/// degree with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
    /// Primitive integer multiple of `coeffs`, for cheap exact sign evaluation.
    ints: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let content = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !content.is_zero() && !content.is_one() {
            for c in &mut ints {
                *c /= &content;
            }
        }
        Self { coeffs, ints }
    }

    /// Reads `p` as a polynomial in variable `var`; every other exponent must be zero.
    pub fn from_polynomial(p: &Polynomial<Rational>, var: usize) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (e, c) in p.terms() {
            if e.as_slice()
                .iter()
                .enumerate()
                .any(|(k, &x)| (k != var && x != 0) || x < 0)
            {
                return Err(Error::InvalidArgument(format!(
                    "expected a nonnegative univariate polynomial in x{}, got term {e}",
                    var + 1
                )));
            }
            let d = e.get(var) as usize;
            if coeffs.len() <= d {
                coeffs.resize(d + 1, Rational::zero());
            }
            coeffs[d] = c.clone();
        }
        Ok(Self::new(coeffs))
    }

    pub fn to_polynomial(&self, nvars: usize, var: usize) -> Polynomial<Rational> {
        Polynomial::from_terms(
            nvars,
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(d, c)| {
                let mut e = vec![0; nvars];
                e[var] = d as i32;
                (ExponentVector::new(e), c.clone())
            }),
        )
        .expect("exponent vectors sized to nvars")
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lc(&self) -> &Rational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> i8 {
        // homogeneous Horner on numerator and denominator; the denominator is positive
        let (n, d) = (x.numer(), x.denom());
        let mut v = BigInt::zero();
        let mut pw = BigInt::one();
        for c in self.ints.iter().rev() {
            v = v * n + c * &pw;
            pw *= d;
        }
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(d, c)| c * int(d as i64))
                .collect(),
        )
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        let inv = divisor.lc().recip();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    r[k + i] = &r[k + i] - &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    fn monic(self) -> Self {
        if self.is_zero() {
            return self;
        }
        // rebuilt through `new` so the cached integer form picks up the sign change
        let inv = self.lc().recip();
        Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone().monic();
        }
        if self.is_zero() {
            return other.clone().monic();
        }
        let (mut a, mut b) = (self.ints.clone(), other.ints.clone());
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = int_rem(&a, &b);
            a = b;
            b = r;
        }
        Self::from_ints(a).monic()
    }

    fn from_ints(ints: Vec<BigInt>) -> Self {
        Self::new(ints.into_iter().map(Rational::from_integer).collect())
    }

    /// `u / gcd(u, u')`, monic.
    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Upper bound on the absolute value of every root (Cauchy).
    pub fn root_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let n = self.coeffs.len() - 1;
        let m = self.coeffs[..n]
            .iter()
            .map(|c| c.abs() / &lc)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        Rational::one() + m
    }
}

/// Primitive part of `rem(a, b)`, scaled by a positive factor so its signs
/// match the true remainder. Inputs are integer coefficient vectors, ascending.
fn int_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let lcb = b.last().expect("nonzero divisor");
    let mut r = a.to_vec();
    let mut flips = false;
    while r.len() >= b.len() {
        let c = r.pop().expect("nonempty");
        let shift = r.len() + 1 - b.len();
        if lcb.is_negative() {
            flips = !flips;
        }
        for x in &mut r {
            *x *= lcb;
        }
        for (i, bc) in b[..b.len() - 1].iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    let content = r.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !content.is_zero() {
        for x in &mut r {
            *x /= &content;
            if flips {
                *x = -&*x;
            }
        }
    }
    r
}

/// Signed remainder sequence `p, p', -rem(p, p'), …`, each term rescaled by a
/// positive factor to a primitive integer polynomial.
fn sturm_chain(p: &UniPoly) -> Vec<UniPoly> {
    let mut chain = vec![p.ints.clone(), p.derivative().ints];
    while !chain.last().unwrap().is_empty() {
        let n = chain.len();
        let r = int_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
        .into_iter()
        .filter(|q| !q.is_empty())
        .map(UniPoly::from_ints)
        .collect()
}

fn variations(chain: &[UniPoly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for q in chain {
        let s = q.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct roots in `(a, b]`.
fn count_roots(chain: &[UniPoly], a: &Rational, b: &Rational) -> usize {
    variations(chain, a) - variations(chain, b)
}

/// Dyadic point strictly inside `(a, b)` where `p` does not vanish: the
/// midpoint if possible, otherwise odd multiples of finer powers of two.
fn split_point(p: &UniPoly, a: &Rational, b: &Rational) -> Rational {
    let w = b - a;
    for s in 1u32.. {
        let den = BigInt::one() << s;
        for k in 0..(1u64 << (s - 1)).min(16) {
            let c = a + &w * Rational::new(BigInt::from(2 * k + 1), den.clone());
            if p.sign_at(&c) != 0 {
                return c;
            }
        }
    }
    unreachable!("a nonzero polynomial has finitely many roots")
}

/// An interval known to contain exactly one real root of `polynomial`
/// (square-free, so that root is simple).
#[derive(Debug, Clone, PartialEq)]
pub struct IsolatingInterval {
    interval: DyadicInterval,
    polynomial: Polynomial<Rational>,
    var: usize,
    multiplicity_free: bool,
    exact_root: Option<Rational>,
    uni: UniPoly,
}

impl IsolatingInterval {
    pub fn interval(&self) -> &DyadicInterval {
        &self.interval
    }

    /// The square-free polynomial whose root is isolated.
    pub fn polynomial(&self) -> &Polynomial<Rational> {
        &self.polynomial
    }

    pub fn variable(&self) -> usize {
        self.var
    }

    /// Whether the root is simple in the original (not square-free-reduced) input.
    pub fn multiplicity_free(&self) -> bool {
        self.multiplicity_free
    }

    /// Set when bisection landed exactly on the root.
    pub fn exact_root(&self) -> Option<&Rational> {
        self.exact_root.as_ref()
    }

    /// Bisects until the width is at most `width`, keeping the root strictly inside.
    pub fn refine(&mut self, width: &Rational) {
        while &self.interval.width() > width {
            self.bisect_once();
        }
    }

    fn bisect_once(&mut self) {
        let (lo, hi) = (self.interval.low().clone(), self.interval.high().clone());
        let mid = self.interval.midpoint();
        let s = self.uni.sign_at(&mid);
        let next = if s == 0 {
            let q = (&hi - &lo) / int(4);
            self.exact_root = Some(mid.clone());
            (&mid - &q, &mid + &q)
        } else if s == self.uni.sign_at(&lo) {
            (mid, hi)
        } else {
            (lo, mid)
        };
        self.interval = DyadicInterval::new(next.0, next.1).expect("dyadic bisection");
    }

    /// Float approximation of the root, refined until the endpoints round to
    /// adjacent or equal doubles.
    pub fn approximate(&self) -> f64 {
        if let Some(r) = &self.exact_root {
            return to_f64(r);
        }
        let mut work = self.clone();
        for _ in 0..4000 {
            if let Some(r) = &work.exact_root {
                return to_f64(r);
            }
            let (a, b) = work.interval.to_f64_pair();
            if a == b || b - a <= f64::EPSILON * a.abs().max(b.abs()) {
                break;
            }
            work.bisect_once();
        }
        to_f64(&work.interval.midpoint())
    }
}

/// Isolates the distinct real roots of a univariate `u` lying in `domain`,
/// returned in increasing order.
pub fn sturm_isolate(
    u: &Polynomial<Rational>,
    domain: RootDomain,
) -> Result<Vec<IsolatingInterval>> {
    if u.is_zero() {
        return Err(Error::InvalidArgument(
            "cannot isolate the roots of the zero polynomial".into(),
        ));
    }
    let vars = u.variables();
    if vars.len() > 1 {
        return Err(Error::InvalidArgument(format!(
            "expected a univariate polynomial, {} variables occur",
            vars.len()
        )));
    }
    let var = vars.first().copied().unwrap_or(0);
    let uni = UniPoly::from_polynomial(u, var)?;
    isolate_uni(&uni, u.nvars(), var, domain)
}

pub(crate) fn isolate_uni(
    uni: &UniPoly,
    nvars: usize,
    var: usize,
    domain: RootDomain,
) -> Result<Vec<IsolatingInterval>> {
    if uni.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let mut sqf = uni.square_free();
    if domain == RootDomain::PositiveOnly && sqf.coeffs[0].is_zero() {
        sqf = UniPoly::new(sqf.coeffs[1..].to_vec());
    }
    if sqf.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let repeated = uni.gcd(&uni.derivative());
    let repeated_chain = (repeated.degree().unwrap_or(0) > 0).then(|| sturm_chain(&repeated.square_free()));

    let bound = power_of_two_above(&sqf.root_bound());
    let lo = match domain {
        RootDomain::AllReals => -bound.clone(),
        RootDomain::PositiveOnly => Rational::zero(),
    };
    let chain = sturm_chain(&sqf);
    let total = count_roots(&chain, &lo, &bound);
    let mut stack = vec![(lo, bound, total)];
    let mut found = Vec::new();
    while let Some((a, b, count)) = stack.pop() {
        match count {
            0 => {}
            1 => found.push((a, b)),
            _ => {
                let c = split_point(&sqf, &a, &b);
                let left = count_roots(&chain, &a, &c);
                stack.push((c.clone(), b, count - left));
                stack.push((a, c, left));
            }
        }
    }
    found.sort_by(|x, y| x.0.cmp(&y.0));
    let polynomial = sqf.to_polynomial(nvars, var);
    Ok(found
        .into_iter()
        .map(|(a, b)| {
            let multiplicity_free = match &repeated_chain {
                None => true,
                Some(rc) => count_roots(rc, &a, &b) == 0,
            };
            IsolatingInterval {
                interval: DyadicInterval::new(a, b).expect("dyadic split points"),
                polynomial: polynomial.clone(),
                var,
                multiplicity_free,
                exact_root: None,
                uni: sqf.clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;
    use crate::polyalg::parse_polynomial;

    fn t(s: &str) -> Polynomial<Rational> {
        parse_polynomial(s, &["t"]).unwrap()
    }

    #[test]
    fn linear_root() {
        let roots = sturm_isolate(&t("t - 1"), RootDomain::PositiveOnly).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].interval().contains_strictly(&int(1)));
    }

    #[test]
    fn sqrt_two() {
        let roots = sturm_isolate(&t("t^2 - 2"), RootDomain::AllReals).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].interval().high() <= &int(0));
        assert!(roots[1].interval().low() >= &int(0));
        let mut r = roots[1].clone();
        r.refine(&ratio(1, 1 << 30));
        assert!((to_f64(r.interval().low()) - 2f64.sqrt()).abs() < 1e-8);
        assert!((r.approximate() - 2f64.sqrt()).abs() < 1e-15);
        let pos = sturm_isolate(&t("t^2 - 2"), RootDomain::PositiveOnly).unwrap();
        assert_eq!(pos.len(), 1);
    }

    #[test]
    fn no_real_roots() {
        assert!(sturm_isolate(&t("t^2 + 1"), RootDomain::AllReals).unwrap().is_empty());
        assert!(sturm_isolate(&t("5"), RootDomain::AllReals).unwrap().is_empty());
        assert!(sturm_isolate(&Polynomial::zero(1), RootDomain::AllReals).is_err());
    }

    #[test]
    fn repeated_and_zero_roots() {
        let roots = sturm_isolate(&t("t^3 - 2*t^2 + t"), RootDomain::AllReals).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].multiplicity_free());
        assert!(!roots[1].multiplicity_free());
        let pos = sturm_isolate(&t("t^3 - 2*t^2 + t"), RootDomain::PositiveOnly).unwrap();
        assert_eq!(pos.len(), 1);
        assert!(pos[0].interval().contains_strictly(&int(1)));
    }

    #[test]
    fn exact_rational_root_on_bisection_point() {
        let roots = sturm_isolate(&t("t - 1/2"), RootDomain::AllReals).unwrap();
        let mut r = roots[0].clone();
        r.refine(&ratio(1, 1024));
        assert!(r.interval().contains_strictly(&ratio(1, 2)));
        assert_eq!(r.approximate(), 0.5);
    }

    #[test]
    fn close_roots_separated() {
        let roots =
            sturm_isolate(&t("t^2 - 2001/1000*t + 1001/1000"), RootDomain::AllReals).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].interval().high() <= roots[1].interval().low());
    }

    #[test]
    fn negative_leading_coefficient() {
        // -(t + 1)(t^3 + t^2 + 2): real roots at -1 and near -1.6956
        let roots = sturm_isolate(&t("-t^4 - 2*t^3 - t^2 - 2*t - 2"), RootDomain::AllReals).unwrap();
        assert_eq!(roots.len(), 2);
        let roots = sturm_isolate(&t("-t^3 + t"), RootDomain::AllReals).unwrap();
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn small_integer_sweep_matches_sign_changes() {
        // every polynomial with coefficients in -2..=2 up to degree 4: count agrees
        // with sign changes on a fine grid plus exact rational roots
        let vals = [-2i64, -1, 0, 1, 2];
        for a in vals {
            for b in vals {
                for c in vals {
                    for lead in [-2i64, -1, 1, 2] {
                        let u = UniPoly::new([a, b, c, lead].iter().map(|&x| int(x)).collect());
                        let roots = isolate_uni(&u, 1, 0, RootDomain::AllReals).unwrap();
                        // cubic: always at least one real root
                        assert!(!roots.is_empty() && roots.len() <= 3, "{:?}", [a, b, c, lead]);
                    }
                }
            }
        }
    }
}
