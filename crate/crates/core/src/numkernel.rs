//! Exact rational arithmetic and dyadic intervals.
//!
//! Rationals are `num_rational::BigRational`, which is always kept in lowest
//! terms with a positive denominator. Nothing in this module touches floating
//! point except the explicit conversion helpers at the bottom.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact binary operation on rationals; division by zero is an error instead of a panic.
pub fn rational_arith(a: &Rational, b: &Rational, op: ArithOp) -> Result<Rational> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => {
            if b.is_zero() {
                return Err(Error::Arithmetic("division by zero".into()));
            }
            a / b
        }
    })
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("malformed rational {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Arithmetic(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

/// Formats as `"num/den"`, or just `"num"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Arithmetic(format!("non-finite value {x}")))
}

pub fn is_power_of_two(n: &BigInt) -> bool {
    if !n.is_positive() {
        return false;
    }
    let tz = n.trailing_zeros().unwrap_or(0);
    (n >> tz as usize).is_one()
}

pub fn is_dyadic(q: &Rational) -> bool {
    is_power_of_two(q.denom())
}

/// Smallest power of two strictly greater than `q` (and at least 1).
pub fn power_of_two_above(q: &Rational) -> Rational {
    let mut p = Rational::one();
    while &p <= q {
        p = &p * int(2);
    }
    p
}

/// Closed interval `[low, high]` with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    low: Rational,
    high: Rational,
}

impl DyadicInterval {
    pub fn new(low: Rational, high: Rational) -> Result<Self> {
        if low > high {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints out of order: [{low}, {high}]"
            )));
        }
        if !is_dyadic(&low) || !is_dyadic(&high) {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints must be dyadic: [{low}, {high}]"
            )));
        }
        Ok(Self { low, high })
    }

    pub fn low(&self) -> &Rational {
        &self.low
    }

    pub fn high(&self) -> &Rational {
        &self.high
    }

    pub fn width(&self) -> Rational {
        &self.high - &self.low
    }

    pub fn midpoint(&self) -> Rational {
        (&self.low + &self.high) / int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.low <= x && x <= &self.high
    }

    pub fn contains_strictly(&self, x: &Rational) -> bool {
        &self.low < x && x < &self.high
    }

    /// Splits at the midpoint. Both halves share the midpoint.
    pub fn bisect(&self) -> Result<(Self, Self)> {
        if self.low == self.high {
            return Err(Error::InvalidArgument(
                "cannot bisect a degenerate interval".into(),
            ));
        }
        let mid = self.midpoint();
        Ok((
            Self {
                low: self.low.clone(),
                high: mid.clone(),
            },
            Self {
                low: mid,
                high: self.high.clone(),
            },
        ))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.low), to_f64(&self.high))
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.low),
            format_rational(&self.high)
        )
    }
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduced(q: &Rational) -> bool {
        q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
    }

    #[test]
    fn arith_examples() {
        assert_eq!(
            rational_arith(&ratio(1, 2), &ratio(1, 3), ArithOp::Add).unwrap(),
            ratio(5, 6)
        );
        let zero = rational_arith(&ratio(3, 4), &ratio(3, 4), ArithOp::Sub).unwrap();
        assert_eq!(zero, int(0));
        assert_eq!(zero.denom(), &BigInt::one());
        let third = rational_arith(&ratio(2, 6), &int(1), ArithOp::Mul).unwrap();
        assert_eq!((third.numer().clone(), third.denom().clone()), (BigInt::from(1), BigInt::from(3)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let err = rational_arith(&int(1), &int(0), ArithOp::Div).unwrap_err();
        assert!(matches!(err, Error::Arithmetic(_)));
    }

    #[test]
    fn bisect_examples() {
        let cases = [
            ((0, 1), (0, 1), (1, 2), (1, 1)),
            ((1, 2), (1, 1), (3, 2), (2, 1)),
            ((-2, -1), (-2, 1), (-3, 2), (-1, 1)),
        ];
        for ((lo, hi), (a, b), (c, d), (e, g)) in cases {
            let iv = DyadicInterval::new(int(lo), int(hi)).unwrap();
            let (left, right) = iv.bisect().unwrap();
            assert_eq!(left.low(), &ratio(a, b));
            assert_eq!(left.high(), &ratio(c, d));
            assert_eq!(right.low(), &ratio(c, d));
            assert_eq!(right.high(), &ratio(e, g));
            assert_eq!(left.width() * int(2), iv.width());
            assert!(is_dyadic(left.high()));
        }
    }

    #[test]
    fn degenerate_bisect_rejected() {
        let iv = DyadicInterval::new(int(1), int(1)).unwrap();
        assert!(matches!(iv.bisect(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn non_dyadic_endpoint_rejected() {
        assert!(DyadicInterval::new(ratio(1, 3), int(1)).is_err());
        assert!(DyadicInterval::new(int(2), int(1)).is_err());
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(parse_rational("9/2").unwrap(), ratio(9, 2));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(format_rational(&ratio(9, 2)), "9/2");
        assert_eq!(format_rational(&int(-3)), "-3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn power_of_two_bound() {
        assert_eq!(power_of_two_above(&ratio(5, 2)), int(4));
        assert_eq!(power_of_two_above(&int(4)), int(8));
        assert_eq!(power_of_two_above(&ratio(-1, 2)), int(1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat() -> impl Strategy<Value = Rational> {
            (-1000i64..1000, 1i64..200).prop_map(|(n, d)| ratio(n, d))
        }

        proptest! {
            #[test]
            fn add_sub_inverse(a in rat(), b in rat()) {
                let s = rational_arith(&a, &b, ArithOp::Add).unwrap();
                let back = rational_arith(&s, &b, ArithOp::Sub).unwrap();
                prop_assert!(reduced(&s));
                prop_assert_eq!(back, a);
            }

            #[test]
            fn mul_div_inverse(a in rat(), b in rat()) {
                prop_assume!(!b.is_zero());
                let p = rational_arith(&a, &b, ArithOp::Mul).unwrap();
                let back = rational_arith(&p, &b, ArithOp::Div).unwrap();
                prop_assert!(reduced(&p));
                prop_assert_eq!(back, a);
            }

            #[test]
            fn format_parse_round_trip(a in rat()) {
                prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
            }
        }
    }
}
