//! Polynomial systems whose positive zeros encode the estimate.
//!
//! Every builder multiplies each equation by the monomial that makes all
//! exponents nonnegative with minimum zero per variable, so constant monomial
//! factors (which never vanish on the open orthant) are stripped as well.

use std::fmt;

use num_traits::Zero;

use super::{sample_sums, MaxEntProblem};
use crate::error::{Error, Result};
use crate::numkernel::{int, Rational};
use crate::polyalg::{ExponentVector, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// `Σ_j (t_i(j) - T_i) θ^{t(j)} = 0`.
    Direct,
    /// Gradient of `Σ_j θ^{t(j) - T}`, integer targets only.
    Dual,
    /// Gradient of `Σ_j θ̃^{σ - N t(j)}` built from sample sums.
    SampleDual,
    /// `Σ_j r_j (t_i(j) - T_i) θ^{t(j)} = 0`.
    MinIDiv,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Direct => "direct",
            Provenance::Dual => "dual",
            Provenance::SampleDual => "sample-dual",
            Provenance::MinIDiv => "min-i-div",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    nvars: usize,
    equations: Vec<Polynomial<Rational>>,
    provenance: Provenance,
    clearing: Vec<ExponentVector>,
    sample_size: Option<usize>,
}

impl PolySystem {
    fn from_laurent(
        nvars: usize,
        laurent: Vec<Polynomial<Rational>>,
        provenance: Provenance,
        sample_size: Option<usize>,
    ) -> Result<Self> {
        let mut equations = Vec::with_capacity(laurent.len());
        let mut clearing = Vec::with_capacity(laurent.len());
        for f in laurent {
            if f.is_zero() {
                clearing.push(ExponentVector::zeros(nvars));
                equations.push(f);
            } else {
                let (g, e) = f.clear_to_orthant()?;
                clearing.push(e);
                equations.push(g);
            }
        }
        Ok(Self {
            nvars,
            equations,
            provenance,
            clearing,
            sample_size,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn equations(&self) -> &[Polynomial<Rational>] {
        &self.equations
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Monomial each Laurent equation was multiplied by.
    pub fn clearing(&self) -> &[ExponentVector] {
        &self.clearing
    }

    /// `N` for sample-dual systems.
    pub fn sample_size(&self) -> Option<usize> {
        self.sample_size
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

fn monomial(exponents: Vec<i32>, c: Rational) -> Polynomial<Rational> {
    Polynomial::monomial(ExponentVector::new(exponents), c)
}

fn exponent(k: i64) -> Result<i32> {
    i32::try_from(k).map_err(|_| Error::SizeGuard {
        what: "exponent magnitude",
        observed: k.unsigned_abs() as usize,
        limit: i32::MAX as usize,
    })
}

fn column_exponents(problem: &MaxEntProblem, j: usize) -> Result<Vec<i32>> {
    problem.column(j).into_iter().map(exponent).collect()
}

fn weighted_moment_system(
    problem: &MaxEntProblem,
    weights: &[Rational],
    provenance: Provenance,
) -> Result<PolySystem> {
    let d = problem.d();
    let targets = problem.effective_targets()?;
    let mut eqs = Vec::with_capacity(d);
    for (i, target) in targets.iter().enumerate() {
        let mut f = Polynomial::zero(d);
        for (j, w) in weights.iter().enumerate() {
            let c = w * (int(problem.features()[i][j]) - target);
            if !c.is_zero() {
                f = &f + &monomial(column_exponents(problem, j)?, c);
            }
        }
        eqs.push(f);
    }
    PolySystem::from_laurent(d, eqs, provenance, None)
}

/// Moment equations `Σ_j (t_i(j) - T_i) ∏_k θ_k^{t_k(j)} = 0`, one per
/// constraint. Targets may be any rationals. Samples are replaced by their
/// empirical means.
pub fn build_direct_system(problem: &MaxEntProblem) -> Result<PolySystem> {
    weighted_moment_system(problem, &vec![int(1); problem.m()], Provenance::Direct)
}

/// Minimum I-divergence analogue: `Σ_j r_j (t_i(j) - T_i) ∏_k θ_k^{t_k(j)} = 0`.
pub fn build_minidiv_system(problem: &MaxEntProblem) -> Result<PolySystem> {
    let prior = problem.prior().ok_or_else(|| {
        Error::InvalidArgument("the minimum I-divergence system needs a prior".into())
    })?;
    weighted_moment_system(problem, prior, Provenance::MinIDiv)
}

/// Stationarity of `Ψ(θ) = Σ_j ∏_i θ_i^{t_i(j) - T_i}`: the derivative in
/// `θ_i` is `Σ_j (t_i(j) - T_i) θ^{t(j) - T - e_i}`. Needs integer targets so
/// that the exponents are integers.
pub fn build_dual_system(problem: &MaxEntProblem) -> Result<PolySystem> {
    let d = problem.d();
    let targets = problem.effective_targets()?;
    let mut shift = Vec::with_capacity(d);
    for (i, t) in targets.iter().enumerate() {
        if !t.is_integer() {
            return Err(Error::Convention(format!(
                "dual system needs integer targets, T{} = {t}; use the direct or sample-dual route",
                i + 1
            )));
        }
        let k: i64 = t.to_integer().try_into().map_err(|_| {
            Error::InvalidArgument(format!("target T{} out of range", i + 1))
        })?;
        shift.push(exponent(k)?);
    }
    let mut eqs = Vec::with_capacity(d);
    for i in 0..d {
        let mut f = Polynomial::zero(d);
        for j in 0..problem.m() {
            let c = int(problem.features()[i][j]) - &targets[i];
            if c.is_zero() {
                continue;
            }
            let mut e = column_exponents(problem, j)?;
            for (x, s) in e.iter_mut().zip(&shift) {
                *x -= s;
            }
            e[i] -= 1;
            f = &f + &monomial(e, c);
        }
        eqs.push(f);
    }
    PolySystem::from_laurent(d, eqs, Provenance::Dual, None)
}

/// Sample-sum dual: stationarity of `Ψ̃(θ̃) = Σ_j ∏_i θ̃_i^{σ_i - N t_i(j)}`,
/// i.e. `Σ_j (σ_i - N t_i(j)) θ̃^{σ - N t(j) - e_i} = 0`. Exponents are
/// integers for integer features whatever the sample. Positive zeros relate
/// to the direct parameters by `θ = θ̃^{-N}`.
pub fn build_sample_dual_system(problem: &MaxEntProblem) -> Result<PolySystem> {
    let samples = problem.samples().ok_or_else(|| {
        Error::InvalidArgument("the sample-dual system needs samples".into())
    })?;
    let sums = sample_sums(samples, problem.features())?;
    let n = sums.n as i64;
    let d = problem.d();
    let mut eqs = Vec::with_capacity(d);
    for i in 0..d {
        let mut f = Polynomial::zero(d);
        for j in 0..problem.m() {
            let c = sums.sigma[i] - n * problem.features()[i][j];
            if c == 0 {
                continue;
            }
            let mut e = Vec::with_capacity(d);
            for k in 0..d {
                e.push(exponent(sums.sigma[k] - n * problem.features()[k][j])?);
            }
            e[i] -= 1;
            f = &f + &monomial(e, int(c));
        }
        eqs.push(f);
    }
    PolySystem::from_laurent(d, eqs, Provenance::SampleDual, Some(sums.n))
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
    fn direct_examples() {
        let p = MaxEntProblem::with_targets(2, vec![vec![0, 1]], vec![ratio(1, 2)]).unwrap();
        assert_eq!(build_direct_system(&p).unwrap().equations(), &[t("-1/2 + t/2")]);

        let die = MaxEntProblem::with_targets(6, vec![(1..=6).collect()], vec![ratio(9, 2)]).unwrap();
        let sys = build_direct_system(&die).unwrap();
        assert_eq!(
            sys.equations(),
            &[t("-7/2 - 5/2*t - 3/2*t^2 - 1/2*t^3 + 1/2*t^4 + 3/2*t^5")]
        );
        assert_eq!(sys.clearing()[0], ExponentVector::new(vec![-1]));

        let free = MaxEntProblem::with_targets(3, vec![], vec![]).unwrap();
        assert!(build_direct_system(&free).unwrap().is_empty());
    }

    #[test]
    fn dual_examples() {
        let p = MaxEntProblem::with_targets(3, vec![vec![0, 1, 2]], vec![int(1)]).unwrap();
        assert_eq!(build_dual_system(&p).unwrap().equations(), &[t("t^2 - 1")]);
        let boundary = MaxEntProblem::with_targets(2, vec![vec![0, 1]], vec![int(1)]).unwrap();
        // -θ^{-2}: a monomial, no positive zero
        assert!(build_dual_system(&boundary).unwrap().equations()[0].is_constant());
        let frac = MaxEntProblem::with_targets(2, vec![vec![0, 1]], vec![ratio(1, 2)]).unwrap();
        assert!(matches!(build_dual_system(&frac), Err(Error::Convention(_))));
    }

    #[test]
    fn dual_matches_direct_after_clearing() {
        let p = MaxEntProblem::with_targets(
            4,
            vec![vec![0, 1, 2, 3], vec![1, 0, 1, 2]],
            vec![int(1), int(1)],
        )
        .unwrap();
        assert_eq!(
            build_dual_system(&p).unwrap().equations(),
            build_direct_system(&p).unwrap().equations()
        );
    }

    #[test]
    fn sample_dual_example() {
        let p = MaxEntProblem::with_samples(2, vec![vec![0, 1]], vec![1, 2]).unwrap();
        let sys = build_sample_dual_system(&p).unwrap();
        assert_eq!(sys.equations(), &[t("t^2 - 1")]);
        assert_eq!(sys.sample_size(), Some(2));
    }

    #[test]
    fn minidiv_examples() {
        let base = MaxEntProblem::with_targets(2, vec![vec![0, 1]], vec![ratio(1, 2)]).unwrap();
        assert!(build_minidiv_system(&base).is_err());
        let p = base.clone().prior_set(vec![ratio(1, 4), ratio(3, 4)]).unwrap();
        assert_eq!(build_minidiv_system(&p).unwrap().equations(), &[t("-1/8 + 3/8*t")]);
        let uniform = base.prior_set(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let direct = build_direct_system(&uniform).unwrap();
        let minidiv = build_minidiv_system(&uniform).unwrap();
        assert_eq!(direct.equations()[0].scale(&ratio(1, 2)), minidiv.equations()[0]);
    }
}
