//! Debug text format: `3/2*x1^2*x2^-1 - x1 + 4`.

use std::fmt;

use num_traits::{One, Zero};

use super::{ExponentVector, Polynomial};
use crate::error::{Error, Result};
use crate::numkernel::{parse_rational, Rational};
use crate::scalar::Coefficient;

/// Parses a polynomial written over the given variable names.
pub fn parse_polynomial(text: &str, names: &[&str]) -> Result<Polynomial<Rational>> {
    let n = names.len();
    let mut poly = Polynomial::zero(n);
    for (negative, body) in split_terms(text)? {
        let mut coeff = Rational::one();
        let mut exps = vec![0i32; n];
        for factor in body.split('*').map(str::trim) {
            if factor.is_empty() {
                return Err(Error::InvalidArgument(format!("empty factor in {text:?}")));
            }
            if factor.starts_with(|c: char| c.is_ascii_digit()) {
                coeff = coeff * parse_rational(factor)?;
                continue;
            }
            let factor = match factor.split_once('/') {
                Some((head, den)) => {
                    let den = parse_rational(den)?;
                    if den.is_zero() {
                        return Err(Error::Arithmetic(format!("division by zero in {factor:?}")));
                    }
                    coeff = coeff / den;
                    head.trim()
                }
                None => factor,
            };
            let (name, power) = match factor.split_once('^') {
                Some((name, p)) => (
                    name.trim(),
                    p.trim().parse::<i32>().map_err(|_| {
                        Error::InvalidArgument(format!("bad exponent in {factor:?}"))
                    })?,
                ),
                None => (factor, 1),
            };
            let idx = names.iter().position(|&v| v == name).ok_or_else(|| {
                Error::InvalidArgument(format!("unknown variable {name:?}"))
            })?;
            exps[idx] += power;
        }
        if negative {
            coeff = -coeff;
        }
        poly.add_term(ExponentVector::new(exps), coeff);
    }
    Ok(poly)
}

fn split_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev = None;
    for ch in text.chars() {
        if ch.is_whitespace() {
            continue;
        }
        if (ch == '+' || ch == '-') && prev != Some('^') {
            if current.is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                out.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            }
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if current.is_empty() {
        if out.is_empty() {
            return Err(Error::InvalidArgument("empty polynomial text".into()));
        }
        return Err(Error::InvalidArgument(format!("dangling sign in {text:?}")));
    }
    out.push((negative, current));
    Ok(out)
}

/// Display adapter with caller-chosen variable names.
pub struct Named<'a, C> {
    poly: &'a Polynomial<C>,
    names: Vec<String>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn display_with<'a>(&'a self, names: &[&str]) -> Named<'a, C> {
        Named {
            poly: self,
            names: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn default_names(&self, prefix: &str) -> Vec<String> {
        (1..=self.nvars()).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn write_poly<C: Coefficient>(
    f: &mut fmt::Formatter<'_>,
    poly: &Polynomial<C>,
    names: &[String],
) -> fmt::Result {
    if poly.is_zero() {
        return write!(f, "0");
    }
    for (i, (e, c)) in poly.terms().rev().enumerate() {
        let negative = *c < C::zero();
        let mag = if negative { -c.clone() } else { c.clone() };
        match (i, negative) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mut factors = Vec::new();
        if !mag.is_one() || e.is_constant() {
            factors.push(mag.to_string());
        }
        for (k, &x) in e.as_slice().iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(names[k].clone()),
                _ => factors.push(format!("{}^{}", names[k], x)),
            }
        }
        write!(f, "{}", factors.join("*"))?;
    }
    Ok(())
}

impl<C: Coefficient> fmt::Display for Named<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.poly, &self.names)
    }
}

impl<C: Coefficient> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, &self.default_names("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;

    #[test]
    fn parse_and_print() {
        let f = parse_polynomial("3/2*x1^2*x2^-1 - x1 + 4", &["x1", "x2"]).unwrap();
        assert_eq!(f.num_terms(), 3);
        assert_eq!(
            f.coefficient(&ExponentVector::new(vec![2, -1])),
            ratio(3, 2)
        );
        assert_eq!(f.to_string(), "3/2*x1^2*x2^-1 - x1 + 4");
        let h = parse_polynomial("-1/2 + x1/2", &["x1"]).unwrap();
        assert_eq!(h.to_string(), "1/2*x1 - 1/2");
        let g = parse_polynomial(&f.to_string(), &["x1", "x2"]).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn binomial_prints_like_toric_generator() {
        let f = parse_polynomial("x1*x4 - x2*x3", &["x1", "x2", "x3", "x4"]).unwrap();
        assert_eq!(f.to_string(), "x1*x4 - x2*x3");
        assert_eq!(
            f.display_with(&["a", "b", "c", "d"]).to_string(),
            "a*d - b*c"
        );
    }

    #[test]
    fn leading_minus_and_zero() {
        let f = parse_polynomial("-x + -1", &["x"]).unwrap();
        assert_eq!(f.to_string(), "-x1 - 1");
        assert_eq!(Polynomial::<Rational>::zero(2).to_string(), "0");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("x +", &["x"]).is_err());
        assert!(parse_polynomial("z", &["x"]).is_err());
        assert!(parse_polynomial("x^a", &["x"]).is_err());
        assert!(parse_polynomial("", &["x"]).is_err());
    }
}
