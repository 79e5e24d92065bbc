use std::cmp::Ordering;


use super::{ExponentVector, MonomialOrder, Polynomial};
use crate::error::{Error, Result};
use crate::scalar::Coefficient;

/// Terms sorted from largest to smallest under a fixed monomial order, so the
/// leading term is `terms[0]`. Working representation for division and
/// Buchberger's algorithm.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct OrderedPoly<C> {
    pub(crate) terms: Vec<(ExponentVector, C)>,
}

impl<C: Coefficient> OrderedPoly<C> {
    pub(crate) fn from_poly(p: &Polynomial<C>, order: &MonomialOrder) -> Self {
        Self {
            terms: p.sorted_terms(order),
        }
    }

    pub(crate) fn to_poly(&self, nvars: usize) -> Polynomial<C> {
        Polynomial::from_terms(nvars, self.terms.iter().cloned())
            .expect("ordered terms share the ambient dimension")
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn leading(&self) -> Option<&(ExponentVector, C)> {
        self.terms.first()
    }

    pub(crate) fn lm(&self) -> &ExponentVector {
        &self.terms[0].0
    }

    pub(crate) fn lc(&self) -> &C {
        &self.terms[0].1
    }

    pub(crate) fn total_degree(&self) -> i64 {
        self.terms
            .iter()
            .map(|(e, _)| e.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn make_monic(&mut self) {
        if let Some((_, lc)) = self.terms.first() {
            if lc.is_one() {
                return;
            }
            let inv = C::one() / lc.clone();
            for (_, c) in &mut self.terms {
                *c = c.clone() * inv.clone();
            }
        }
    }

    /// `self - c * x^shift * g`, merging the two sorted term lists.
    /// `skip` leading terms of `self` are dropped first.
    pub(crate) fn sub_scaled(
        &self,
        skip: usize,
        c: &C,
        shift: &ExponentVector,
        g: &Self,
        order: &MonomialOrder,
    ) -> Self {
        let a = &self.terms[skip..];
        let mut out = Vec::with_capacity(a.len() + g.terms.len());
        let (mut i, mut j) = (0, 0);
        let mut shifted: Option<ExponentVector> = None;
        while i < a.len() || j < g.terms.len() {
            if shifted.is_none() && j < g.terms.len() {
                shifted = Some(g.terms[j].0.add(shift));
            }
            let ord = match (i < a.len(), &shifted) {
                (true, Some(s)) => order.compare(&a[i].0, s),
                (true, None) => Ordering::Greater,
                (false, _) => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let e = shifted.take().expect("pending shifted term");
                    out.push((e, -(c.clone() * g.terms[j].1.clone())));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = shifted.take().expect("pending shifted term");
                    let v = a[i].1.clone() - c.clone() * g.terms[j].1.clone();
                    if !v.is_zero() {
                        out.push((e, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Self { terms: out }
    }

    /// Full reduction of `self` modulo `basis` (every term of the result is
    /// irreducible). Divisors are tried in list order.
    pub(crate) fn reduce(&self, basis: &[&Self], order: &MonomialOrder) -> Self {
        let mut p = self.clone();
        let mut remainder = Vec::new();
        let mut pos = 0;
        while pos < p.terms.len() {
            let (lead_e, lead_c) = &p.terms[pos];
            let divisor = basis
                .iter()
                .find(|g| !g.is_zero() && g.lm().divides(lead_e));
            match divisor {
                Some(g) => {
                    let coeff = lead_c.clone() / g.lc().clone();
                    let shift = lead_e.sub(g.lm());
                    p = p.sub_scaled(pos, &coeff, &shift, g, order);
                    pos = 0;
                }
                None => {
                    remainder.push(p.terms[pos].clone());
                    pos += 1;
                }
            }
        }
        Self { terms: remainder }
    }
}

/// Multivariate division: returns `(q, r)` with `f = Σ q_i d_i + r` and no term
/// of `r` divisible by any leading term of the divisors. Divisors are tried in
/// the given list order, so the remainder depends on that order.
pub fn multivariate_divide<C: Coefficient>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    order: &MonomialOrder,
) -> Result<(Vec<Polynomial<C>>, Polynomial<C>)> {
    let n = f.nvars();
    if order.nvars() != n {
        return Err(Error::InvalidArgument(format!(
            "order ranks {} variables, polynomial has {n}",
            order.nvars()
        )));
    }
    if f.has_negative_exponents() {
        return Err(Error::InvalidArgument(
            "division requires nonnegative exponents; clear the Laurent polynomial first".into(),
        ));
    }
    let mut ds = Vec::with_capacity(divisors.len());
    for d in divisors {
        if d.nvars() != n {
            return Err(Error::InvalidArgument("divisor dimension mismatch".into()));
        }
        if d.is_zero() {
            return Err(Error::InvalidArgument("division by the zero polynomial".into()));
        }
        if d.has_negative_exponents() {
            return Err(Error::InvalidArgument(
                "division requires nonnegative exponents; clear the Laurent polynomial first"
                    .into(),
            ));
        }
        ds.push(OrderedPoly::from_poly(d, order));
    }

    let mut quotients = vec![Polynomial::zero(n); ds.len()];
    let mut remainder = Polynomial::zero(n);
    let mut p = OrderedPoly::from_poly(f, order);
    while let Some((lead_e, lead_c)) = p.leading().cloned() {
        match ds.iter().position(|d| d.lm().divides(&lead_e)) {
            Some(k) => {
                let coeff = lead_c / ds[k].lc().clone();
                let shift = lead_e.sub(ds[k].lm());
                quotients[k].add_term(shift.clone(), coeff.clone());
                p = p.sub_scaled(0, &coeff, &shift, &ds[k], order);
            }
            None => {
                remainder.add_term(lead_e, lead_c);
                p.terms.remove(0);
            }
        }
    }
    Ok((quotients, remainder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::Rational;
    use crate::polyalg::parse_polynomial;

    fn p(s: &str) -> Polynomial<Rational> {
        parse_polynomial(s, &["x", "y"]).unwrap()
    }

    fn check_identity(f: &Polynomial<Rational>, ds: &[Polynomial<Rational>], order: &MonomialOrder) {
        let (qs, r) = multivariate_divide(f, ds, order).unwrap();
        let mut recombined = r.clone();
        for (q, d) in qs.iter().zip(ds) {
            recombined = &recombined + &(q * d);
        }
        assert_eq!(&recombined, f);
        for (e, _) in r.terms() {
            for d in ds {
                let (lm, _) = d.leading_term(order).unwrap();
                assert!(!lm.divides(e), "remainder term {e} divisible by {lm}");
            }
        }
    }

    #[test]
    fn textbook_division() {
        let f = p("x^2*y + x*y^2 + y^2");
        let ds = [p("x*y - 1"), p("y^2 - 1")];
        let order = MonomialOrder::lex(2);
        let (qs, r) = multivariate_divide(&f, &ds, &order).unwrap();
        assert_eq!(r, p("x + y + 1"));
        assert_eq!(qs[0], p("x + y"));
        assert_eq!(qs[1], p("1"));
        check_identity(&f, &ds, &order);
    }

    #[test]
    fn trivial_divisions() {
        let order = MonomialOrder::lex(2);
        let (_, r) = multivariate_divide(&p("x*y - 1"), &[p("x*y - 1")], &order).unwrap();
        assert!(r.is_zero());
        let (_, r) = multivariate_divide(&p("1"), &[p("x")], &order).unwrap();
        assert_eq!(r, p("1"));
    }

    #[test]
    fn laurent_input_rejected() {
        let order = MonomialOrder::lex(2);
        let err = multivariate_divide(&p("x^-1 + y"), &[p("y")], &order).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(multivariate_divide(&p("x"), &[Polynomial::zero(2)], &order).is_err());
    }

    mod props {
        use super::*;
        use crate::numkernel::ratio;
        use proptest::prelude::*;

        fn poly() -> impl Strategy<Value = Polynomial<Rational>> {
            proptest::collection::vec(((0i32..4, 0i32..4), -4i64..5), 1..5).prop_map(|terms| {
                Polynomial::from_terms(
                    2,
                    terms
                        .into_iter()
                        .map(|((a, b), c)| (ExponentVector::new(vec![a, b]), ratio(c, 1))),
                )
                .unwrap()
            })
        }

        proptest! {
            #[test]
            fn division_identity_holds(f in poly(), d1 in poly(), d2 in poly(), grevlex in any::<bool>()) {
                prop_assume!(!d1.is_zero() && !d2.is_zero());
                let order = if grevlex { MonomialOrder::grevlex(2) } else { MonomialOrder::lex(2) };
                check_identity(&f, &[d1, d2], &order);
            }
        }
    }
}
