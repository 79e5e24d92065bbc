//! Toric ideals and the toric-model membership test.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::feasibility::{augmented, rref};
use super::Distribution;
use crate::error::{Error, Result};
use crate::groebner::{buchberger, eliminate};
use crate::numkernel::{int, ratio, to_f64, Rational};
use crate::polyalg::{ExponentVector, MonomialOrder, Polynomial};

const MAX_TORIC_M: usize = 8;
const MAX_TORIC_D: usize = 5;

/// Integer matrix `A` (`d × m`) with positive weights `h`, describing the
/// model `p_j ∝ h_j θ^{a_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricSpec {
    a: Vec<Vec<i64>>,
    h: Vec<Rational>,
}

impl ToricSpec {
    pub fn new(a: Vec<Vec<i64>>, h: Vec<Rational>) -> Result<Self> {
        let m = h.len();
        if m == 0 {
            return Err(Error::InvalidArgument("toric spec needs at least one column".into()));
        }
        if a.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidArgument(format!(
                "every row of A must have {m} entries"
            )));
        }
        if h.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidArgument("weights h must be positive".into()));
        }
        Ok(Self { a, h })
    }

    /// `h = (1/m, …, 1/m)`.
    pub fn uniform(a: Vec<Vec<i64>>, m: usize) -> Result<Self> {
        Self::new(a, vec![ratio(1, m.max(1) as i64); m])
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn h(&self) -> &[Rational] {
        &self.h
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }
}

/// Generators of the toric ideal of `A` in `x_1..x_m`: the kernel of
/// `x_j ↦ θ^{a_j}`, obtained by eliminating `θ` (and an inverse variable `w`
/// when `A` has negative entries) from `x_j θ^{a_j^-} - θ^{a_j^+}`.
pub fn toric_ideal(spec: &ToricSpec) -> Result<Vec<Polynomial<Rational>>> {
    let (m, d) = (spec.m(), spec.d());
    if m > MAX_TORIC_M {
        return Err(Error::SizeGuard {
            what: "toric ideal columns",
            observed: m,
            limit: MAX_TORIC_M,
        });
    }
    if d > MAX_TORIC_D {
        return Err(Error::SizeGuard {
            what: "toric ideal rows",
            observed: d,
            limit: MAX_TORIC_D,
        });
    }
    let negative = spec.a.iter().flatten().any(|&x| x < 0);
    // variables: θ_1..θ_d, [w], x_1..x_m; lex with identity ranking puts θ, w first
    let extra = usize::from(negative);
    let n = d + extra + m;
    let mut gens = Vec::with_capacity(m + extra);
    for j in 0..m {
        let mut plus = vec![0i32; n];
        let mut minus = vec![0i32; n];
        for (i, row) in spec.a.iter().enumerate() {
            let v = i32::try_from(row[j]).map_err(|_| {
                Error::InvalidArgument(format!("entry {} of A is too large", row[j]))
            })?;
            if v > 0 {
                plus[i] = v;
            } else {
                minus[i] = -v;
            }
        }
        minus[d + extra + j] = 1;
        gens.push(
            &Polynomial::monomial(ExponentVector::new(minus), int(1))
                - &Polynomial::monomial(ExponentVector::new(plus), int(1)),
        );
    }
    if negative {
        let mut e = vec![0i32; n];
        for x in e.iter_mut().take(d + 1) {
            *x = 1;
        }
        gens.push(&Polynomial::monomial(ExponentVector::new(e), int(1)) - &Polynomial::one(n));
    }
    let gb = buchberger(&gens, &MonomialOrder::lex(n))?;
    let skip = d + extra;
    Ok(eliminate(&gb, m)?
        .into_iter()
        .map(|g| {
            Polynomial::from_terms(
                m,
                g.terms()
                    .map(|(e, c)| (ExponentVector::new(e.as_slice()[skip..].to_vec()), c.clone())),
            )
            .expect("x block has m variables")
        })
        .collect())
}

/// Basis of the integer kernel `{u ∈ ℤ^m : A u = 0}` (one primitive vector per
/// free column of the reduced echelon form). It spans the rational kernel, which
/// is all the log-domain membership test needs.
pub fn kernel_lattice(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .map(|row| row.iter().map(|&x| int(x)).collect())
        .collect();
    let pivots = rref(&mut rows);
    let mut basis = Vec::new();
    for free in (0..m).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); m];
        v[free] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -rows[r][free].clone();
        }
        let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        basis.push(
            ints.iter()
                .map(|x| (x / &g).to_i64().expect("kernel entries fit in i64"))
                .collect(),
        );
    }
    basis
}

/// Outcome of [`toric_membership`].
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Kernel vector whose binomial relation fails, when not a member.
    pub witness: Option<Vec<i64>>,
    /// Largest `|Σ_j u_j ln(p_j / h_j)|` over the kernel basis.
    pub max_deviation: f64,
}

/// Tests whether `p` lies on the toric model of `spec`: every kernel vector `u`
/// of `A` augmented with the all-ones row must satisfy
/// `|Σ_j u_j ln(p_j / h_j)| <= tol`.
pub fn toric_membership(p: &Distribution<f64>, spec: &ToricSpec, tol: f64) -> Result<Membership> {
    if p.len() != spec.m() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} entries, spec has {} columns",
            p.len(),
            spec.m()
        )));
    }
    if !p.is_strictly_positive() {
        return Err(Error::InvalidArgument(
            "membership is tested on the open simplex; p has a zero entry".into(),
        ));
    }
    let aug: Vec<Vec<i64>> = augmented(&spec.a, spec.m())
        .into_iter()
        .map(|row| row.iter().map(|q| q.to_integer().to_i64().expect("integer entries")).collect())
        .collect();
    let logs: Vec<f64> = p
        .probs()
        .iter()
        .zip(&spec.h)
        .map(|(&pj, h)| pj.ln() - to_f64(h).ln())
        .collect();
    let mut result = Membership {
        member: true,
        witness: None,
        max_deviation: 0.0,
    };
    for u in kernel_lattice(&aug) {
        let dev = u
            .iter()
            .zip(&logs)
            .map(|(&k, &l)| k as f64 * l)
            .sum::<f64>()
            .abs();
        if dev > result.max_deviation {
            result.max_deviation = dev;
        }
        if dev > tol && result.member {
            result.member = false;
            result.witness = Some(u);
        }
    }
    Ok(result)
}
