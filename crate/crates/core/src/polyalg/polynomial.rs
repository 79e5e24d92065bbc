use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};


use super::{ExponentVector, MonomialOrder};
use crate::error::{Error, Result};
use crate::scalar::Coefficient;

/// Sparse polynomial in `nvars` indeterminates with possibly negative exponents.
///
/// Terms are kept in a map keyed by exponent vector; zero coefficients are never
/// stored, so the zero polynomial is the empty map.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<ExponentVector, C>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Ring operation with an explicit dimension check.
pub fn poly_arith<C: Coefficient>(
    f: &Polynomial<C>,
    g: &Polynomial<C>,
    op: PolyOp,
) -> Result<Polynomial<C>> {
    if f.nvars != g.nvars {
        return Err(Error::InvalidArgument(format!(
            "ambient dimension mismatch: {} vs {}",
            f.nvars, g.nvars
        )));
    }
    Ok(match op {
        PolyOp::Add => f.add_scaled(g, &C::one()),
        PolyOp::Sub => f.add_scaled(g, &-C::one()),
        PolyOp::Mul => f.mul_poly(g),
    })
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(ExponentVector::zeros(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn monomial(exponents: ExponentVector, c: C) -> Self {
        let nvars = exponents.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        Self { nvars, terms }
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::monomial(ExponentVector::unit(nvars, index), C::one())
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (ExponentVector, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::InvalidArgument(format!(
                    "exponent vector {e} has length {} but ambient dimension is {nvars}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &ExponentVector) -> C {
        self.terms.get(exponents).cloned().unwrap_or_else(C::zero)
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(e, sum);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn add_scaled(&self, other: &Self, scale: &C) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone() * scale.clone());
        }
        out
    }

    fn mul_poly(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiplies by the monomial `x^shift`; exponents may go negative.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(shift), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul_poly(self);
        }
        acc
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_constant())
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|e| !e.is_nonnegative())
    }

    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e.get(var)).max().unwrap_or(0)
    }

    /// Componentwise minimum exponent over the support; `None` for zero.
    pub fn min_exponents(&self) -> Option<ExponentVector> {
        let mut it = self.terms.keys();
        let first = it.next()?.as_slice().to_vec();
        let mins = it.fold(first, |mut acc, e| {
            for (a, &b) in acc.iter_mut().zip(e.as_slice()) {
                *a = (*a).min(b);
            }
            acc
        });
        Some(ExponentVector::new(mins))
    }

    /// Variables that appear with a nonzero exponent somewhere in the support.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|e| e.get(v) != 0))
            .collect()
    }

    pub fn involves_only(&self, vars: &[usize]) -> bool {
        self.variables().iter().all(|v| vars.contains(v))
    }

    /// Multiplies by `θ^e` with `e_k = max(0, -min_k)` so that no exponent is
    /// negative. The zero set is unchanged on the open positive orthant.
    pub fn laurent_clear(&self) -> Result<(Self, ExponentVector)> {
        let mins = self.min_exponents().ok_or_else(|| {
            Error::InvalidArgument("cannot clear denominators of the zero polynomial".into())
        })?;
        let e = ExponentVector::new(mins.as_slice().iter().map(|&m| (-m).max(0)).collect());
        Ok((self.shift(&e), e))
    }

    /// Multiplies by `θ^e` with `e_k = -min_k` so that every variable has
    /// minimum exponent exactly zero. Unlike [`Self::laurent_clear`] this also
    /// strips monomial factors; the positive-orthant zero set is preserved.
    pub fn clear_to_orthant(&self) -> Result<(Self, ExponentVector)> {
        let mins = self.min_exponents().ok_or_else(|| {
            Error::InvalidArgument("cannot clear denominators of the zero polynomial".into())
        })?;
        let e = ExponentVector::new(mins.as_slice().iter().map(|&m| -m).collect());
        Ok((self.shift(&e), e))
    }

    /// Exact evaluation. A zero coordinate under a negative exponent is an error.
    pub fn evaluate(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, polynomial has {} indeterminates",
                point.len(),
                self.nvars
            )));
        }
        let mut total = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e.as_slice()) {
                term = term * power(x, k)?;
            }
            total = total + term;
        }
        Ok(total)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.get(var);
            if k == 0 {
                continue;
            }
            let mut de = e.as_slice().to_vec();
            de[var] -= 1;
            out.add_term(ExponentVector::new(de), c.clone() * from_i64::<C>(k as i64));
        }
        out
    }

    /// Substitutes values for the variables where `values[k]` is `Some`.
    /// Ambient dimension is kept; substituted variables no longer appear.
    pub fn specialize(&self, values: &[Option<C>]) -> Result<Self> {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = e.as_slice().to_vec();
            for (k, v) in values.iter().enumerate() {
                if let Some(x) = v {
                    coeff = coeff * power(x, rest[k])?;
                    rest[k] = 0;
                }
            }
            out.add_term(ExponentVector::new(rest), coeff);
        }
        Ok(out)
    }

    pub fn map_coefficients<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Rewrites the polynomial in a different set of variables:
    /// variable `k` of `self` becomes variable `mapping[k]` of the result.
    pub fn remap_variables(&self, nvars: usize, mapping: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (k, &x) in e.as_slice().iter().enumerate() {
                ne[mapping[k]] += x;
            }
            out.add_term(ExponentVector::new(ne), c.clone());
        }
        out
    }

    /// Substitutes `θ_k -> θ_k^(1/g_k)`; every exponent of variable `k` must be
    /// divisible by `g_k`.
    pub fn compress_exponents(&self, factors: &[i32]) -> Result<Self> {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = Vec::with_capacity(self.nvars);
            for (&x, &g) in e.as_slice().iter().zip(factors) {
                if g == 0 || x % g != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "exponent {x} not divisible by compression factor {g}"
                    )));
                }
                ne.push(x / g);
            }
            out.add_term(ExponentVector::new(ne), c.clone());
        }
        Ok(out)
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&ExponentVector, &C)> {
        self.terms
            .iter()
            .max_by(|a, b| order.compare(a.0, b.0))
    }

    /// Divides by the leading coefficient under `order`.
    pub fn monic(&self, order: &MonomialOrder) -> Self {
        match self.leading_term(order) {
            Some((_, lc)) => {
                let inv = C::one() / lc.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Terms sorted from largest to smallest under `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(ExponentVector, C)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        v.sort_by(|a, b| order.compare(&b.0, &a.0));
        v
    }
}

pub(crate) fn from_i64<C: Coefficient>(k: i64) -> C {
    C::from_i64(k).expect("integer not representable in coefficient field")
}

fn power<C: Coefficient>(x: &C, k: i32) -> Result<C> {
    if k >= 0 {
        return Ok(num_traits::pow::pow(x.clone(), k as usize));
    }
    if x.is_zero() {
        return Err(Error::Arithmetic(
            "zero coordinate raised to a negative exponent".into(),
        ));
    }
    let p = num_traits::pow::pow(x.clone(), k.unsigned_abs() as usize);
    Ok(C::one() / p)
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        poly_arith(self, rhs, PolyOp::Add).expect("polynomial dimension mismatch")
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        poly_arith(self, rhs, PolyOp::Sub).expect("polynomial dimension mismatch")
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        poly_arith(self, rhs, PolyOp::Mul).expect("polynomial dimension mismatch")
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coefficient> Add for Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul for Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{int, ratio, Rational};
    use crate::polyalg::parse_polynomial;

    fn p(s: &str) -> Polynomial<Rational> {
        parse_polynomial(s, &["x", "y"]).unwrap()
    }

    fn th(s: &str) -> Polynomial<Rational> {
        parse_polynomial(s, &["th1", "th2"]).unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&p("x + y") * &p("x - y"), p("x^2 - y^2"));
        let f = p("3*x*y - 1/2");
        assert_eq!(&f + &Polynomial::zero(2), f);
        let diff = &p("x^2*y + 1") - &p("x^2*y");
        assert_eq!(diff, p("1"));
        assert_eq!(diff.num_terms(), 1);
    }

    #[test]
    fn dimension_mismatch() {
        let a = Polynomial::<Rational>::var(2, 0);
        let b = Polynomial::<Rational>::var(3, 0);
        assert!(matches!(poly_arith(&a, &b, PolyOp::Add), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn laurent_clear_examples() {
        let (f, e) = th("th1^-2*th2 + th1").laurent_clear().unwrap();
        assert_eq!(f, th("th2 + th1^3"));
        assert_eq!(e.as_slice(), &[2, 0]);

        let (f, e) = th("th1 + th2").laurent_clear().unwrap();
        assert_eq!(f, th("th1 + th2"));
        assert_eq!(e.as_slice(), &[0, 0]);

        let (f, e) = th("th1^-1 - th2^-1").laurent_clear().unwrap();
        assert_eq!(f, th("th2 - th1"));
        assert_eq!(e.as_slice(), &[1, 1]);

        assert!(Polynomial::<Rational>::zero(2).laurent_clear().is_err());
    }

    #[test]
    fn clear_to_orthant_strips_monomial_factor() {
        let (f, e) = th("th1^3 + th1*th2").clear_to_orthant().unwrap();
        assert_eq!(f, th("th1^2 + th2"));
        assert_eq!(e.as_slice(), &[-1, 0]);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p("x^2 + y").evaluate(&[int(2), int(3)]).unwrap(), int(7));
        let inv = parse_polynomial("x^-1", &["x"]).unwrap();
        assert_eq!(inv.evaluate(&[ratio(1, 2)]).unwrap(), int(2));
        let c = ratio(5, 7);
        assert_eq!(p("x - y").evaluate(&[c.clone(), c]).unwrap(), int(0));
        assert!(matches!(inv.evaluate(&[int(0)]), Err(Error::Arithmetic(_))));
    }

    #[test]
    fn derivative_and_specialize() {
        let f = p("x^3*y^-1 + 2*y");
        assert_eq!(f.derivative(0), p("3*x^2*y^-1"));
        assert_eq!(f.derivative(1), p("-x^3*y^-2 + 2"));
        let g = f.specialize(&[None, Some(int(2))]).unwrap();
        assert_eq!(g, p("1/2*x^3 + 4"));
    }

    #[test]
    fn compress_exponents_round_trip() {
        let f = th("th1^4 - 3*th1^2*th2^3 + 1");
        let g = f.compress_exponents(&[2, 3]).unwrap();
        assert_eq!(g, th("th1^2 - 3*th1*th2 + 1"));
        assert!(f.compress_exponents(&[4, 1]).is_err());
    }

    mod props {
        use super::*;
        use num_traits::Zero;
        use proptest::prelude::*;

        fn small_poly() -> impl Strategy<Value = Polynomial<Rational>> {
            proptest::collection::vec(((0i32..3, -1i32..3), -5i64..6, 1i64..4), 0..5).prop_map(
                |terms| {
                    Polynomial::from_terms(
                        2,
                        terms
                            .into_iter()
                            .map(|((a, b), n, d)| (ExponentVector::new(vec![a, b]), ratio(n, d))),
                    )
                    .unwrap()
                },
            )
        }

        proptest! {
            #[test]
            fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&a + &b, &b + &a);
                prop_assert_eq!(&(&a + &b) - &b, a.clone());
                prop_assert!(!(&a * &b).terms().any(|(_, c)| c.is_zero()));
            }

            #[test]
            fn laurent_clear_matches_on_positive_points(
                a in small_poly(),
                x in 1i64..9, y in 1i64..9, dx in 1i64..5, dy in 1i64..5,
            ) {
                prop_assume!(!a.is_zero());
                let (cleared, e) = a.laurent_clear().unwrap();
                prop_assert!(!cleared.has_negative_exponents());
                let pt = [ratio(x, dx), ratio(y, dy)];
                let mono = Polynomial::monomial(e, int(1)).evaluate(&pt).unwrap();
                prop_assert_eq!(cleared.evaluate(&pt).unwrap(), mono * a.evaluate(&pt).unwrap());
            }
        }
    }
}
