//! Maximum-entropy problems over a finite sample space `[m]`.
//!
//! Features are integer valued, `t_i(j)` for `i < d`, `j < m`. The exponential
//! family is written multiplicatively: `p_j ∝ r_j ∏_i θ_i^{t_i(j)}` with
//! `θ_i = exp(-ξ_i)`, and `r` the prior (uniform when absent).

mod estimate;
mod feasibility;
mod systems;
mod toric;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::groebner::IsolatingInterval;
use crate::numkernel::{ratio, to_f64, Rational};
use crate::scalar::Real;

pub use estimate::{estimate, estimate_with, EstimateOptions};
pub use feasibility::{check_feasibility, classify_target, feature_rank, Feasibility};
pub use systems::{
    build_direct_system, build_dual_system, build_minidiv_system, build_sample_dual_system,
    PolySystem, Provenance,
};
pub use toric::{kernel_lattice, toric_ideal, toric_membership, Membership, ToricSpec};

/// Estimation data: feature matrix plus targets or samples, optionally a prior.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntProblem {
    m: usize,
    features: Vec<Vec<i64>>,
    targets: Option<Vec<Rational>>,
    samples: Option<Vec<usize>>,
    prior: Option<Vec<Rational>>,
}

impl MaxEntProblem {
    /// Validates and builds a problem. `samples` are 1-based outcome labels.
    /// Targets and samples are mutually exclusive; both may be absent when the
    /// problem only describes a model (toric computations).
    pub fn new(
        m: usize,
        features: Vec<Vec<i64>>,
        targets: Option<Vec<Rational>>,
        samples: Option<Vec<usize>>,
        prior: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample space needs at least 2 outcomes, got {m}"
            )));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidArgument(format!(
                    "feature {} has {} values, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let d = features.len();
        if targets.is_some() && samples.is_some() {
            return Err(Error::InvalidArgument(
                "give either targets or samples, not both".into(),
            ));
        }
        if let Some(t) = &targets {
            if t.len() != d {
                return Err(Error::InvalidArgument(format!(
                    "{} targets for {d} features",
                    t.len()
                )));
            }
        }
        if let Some(s) = &samples {
            if s.is_empty() {
                return Err(Error::InvalidArgument("sample list is empty".into()));
            }
            if let Some(bad) = s.iter().find(|&&o| o == 0 || o > m) {
                return Err(Error::InvalidArgument(format!(
                    "observation {bad} outside 1..={m}"
                )));
            }
        }
        if let Some(r) = &prior {
            if r.len() != m {
                return Err(Error::InvalidArgument(format!(
                    "prior has {} entries, expected {m}",
                    r.len()
                )));
            }
            if r.iter().any(|x| !x.is_positive()) {
                return Err(Error::InvalidArgument(
                    "prior entries must be strictly positive".into(),
                ));
            }
            let total: Rational = r.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidArgument(format!(
                    "prior sums to {total}, not 1"
                )));
            }
        }
        Ok(Self {
            m,
            features,
            targets,
            samples,
            prior,
        })
    }

    pub fn with_targets(m: usize, features: Vec<Vec<i64>>, targets: Vec<Rational>) -> Result<Self> {
        Self::new(m, features, Some(targets), None, None)
    }

    pub fn with_samples(m: usize, features: Vec<Vec<i64>>, samples: Vec<usize>) -> Result<Self> {
        Self::new(m, features, None, Some(samples), None)
    }

    /// Same problem with a prior attached.
    pub fn prior_set(self, prior: Vec<Rational>) -> Result<Self> {
        Self::new(self.m, self.features, self.targets, self.samples, Some(prior))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of constraints.
    pub fn d(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[Vec<i64>] {
        &self.features
    }

    pub fn targets(&self) -> Option<&[Rational]> {
        self.targets.as_deref()
    }

    pub fn samples(&self) -> Option<&[usize]> {
        self.samples.as_deref()
    }

    pub fn prior(&self) -> Option<&[Rational]> {
        self.prior.as_deref()
    }

    /// Column `j` of the feature matrix, `t(j)`.
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.features.iter().map(|row| row[j]).collect()
    }

    /// The stated targets, or the empirical means `σ/N` of the samples.
    pub fn effective_targets(&self) -> Result<Vec<Rational>> {
        match (&self.targets, &self.samples) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(s)) => Ok(sample_sums(s, &self.features)?.t_bar),
            (None, None) => Err(Error::InvalidArgument(
                "problem has neither targets nor samples".into(),
            )),
        }
    }

    /// The prior, or the uniform distribution.
    pub fn prior_or_uniform(&self) -> Vec<Rational> {
        self.prior
            .clone()
            .unwrap_or_else(|| vec![ratio(1, self.m as i64); self.m])
    }

    /// Replaces samples by the equivalent targets `σ/N`.
    pub fn targets_from_samples(&self) -> Result<Self> {
        Self::new(
            self.m,
            self.features.clone(),
            Some(self.effective_targets()?),
            None,
            self.prior.clone(),
        )
    }
}

/// Point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    fn sum_tolerance(m: usize) -> T {
        T::lit(1e-12).max(T::epsilon() * T::lit(64.0 * m as f64))
    }

    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty distribution".into()));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < T::zero()) {
            return Err(Error::InvalidArgument(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total = probs.iter().fold(T::zero(), |a, &b| a + b);
        if (total - T::one()).abs() > Self::sum_tolerance(probs.len()) {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let total = weights.iter().fold(T::zero(), |a, &b| a + b);
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::InvalidArgument(
                "weights must have a positive finite sum".into(),
            ));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    /// Normalizes log-weights without overflow.
    pub fn from_log_weights(logw: &[T]) -> Result<Self> {
        let top = logw.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        Self::from_weights(logw.iter().map(|&l| (l - top).exp()).collect())
    }

    pub fn uniform(m: usize) -> Self {
        Self {
            probs: vec![T::one() / T::lit(m as f64); m],
        }
    }

    pub fn from_rationals(values: &[Rational]) -> Result<Self> {
        let total: Rational = values.iter().sum();
        if !total.is_one() || values.iter().any(Signed::is_negative) {
            return Err(Error::InvalidArgument(
                "exact probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        Self::new(values.iter().map(|q| T::lit(to_f64(q))).collect())
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > T::zero())
    }

    pub fn cast<U: Real>(&self) -> Distribution<U> {
        Distribution {
            probs: self
                .probs
                .iter()
                .map(|p| U::lit(p.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    pub fn linf_distance(&self, other: &Self) -> T {
        self.probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

/// `p_j ∝ r_j ∏_i θ_i^{t_i(j)}`, computed in the log domain.
pub fn parametrize<T: Real>(theta: &[T], problem: &MaxEntProblem) -> Result<Distribution<T>> {
    Ok(parametrize_with_normalizer(theta, problem)?.0)
}

/// As [`parametrize`], also returning `Z = Σ_j w_j ∏_i θ_i^{t_i(j)}` where `w`
/// is the prior when one is given and all ones otherwise.
pub fn parametrize_with_normalizer<T: Real>(
    theta: &[T],
    problem: &MaxEntProblem,
) -> Result<(Distribution<T>, T)> {
    if theta.len() != problem.d() {
        return Err(Error::InvalidArgument(format!(
            "{} parameters for {} constraints",
            theta.len(),
            problem.d()
        )));
    }
    if theta.iter().any(|&t| !(t > T::zero()) || !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "parameters must be strictly positive".into(),
        ));
    }
    let ln_theta: Vec<T> = theta.iter().map(|t| t.ln()).collect();
    let logw: Vec<T> = (0..problem.m())
        .map(|j| {
            let base = match problem.prior() {
                Some(r) => T::lit(to_f64(&r[j])).ln(),
                None => T::zero(),
            };
            problem
                .features()
                .iter()
                .zip(&ln_theta)
                .fold(base, |acc, (row, &l)| acc + T::lit(row[j] as f64) * l)
        })
        .collect();
    let top = logw.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let shifted: T = logw.iter().fold(T::zero(), |a, &l| a + (l - top).exp());
    let z = top.exp() * shifted;
    Ok((Distribution::from_log_weights(&logw)?, z))
}

/// Exact version of [`parametrize`] for rational parameters.
pub fn parametrize_exact(theta: &[Rational], problem: &MaxEntProblem) -> Result<Vec<Rational>> {
    if theta.len() != problem.d() || theta.iter().any(|t| !t.is_positive()) {
        return Err(Error::InvalidArgument(
            "parameters must be d strictly positive rationals".into(),
        ));
    }
    let r = problem.prior_or_uniform();
    let weights: Vec<Rational> = (0..problem.m())
        .map(|j| {
            problem
                .features()
                .iter()
                .zip(theta)
                .fold(r[j].clone(), |acc, (row, t)| {
                    let k = row[j];
                    let p = num_traits::pow(t.clone(), k.unsigned_abs() as usize);
                    if k >= 0 {
                        acc * p
                    } else {
                        acc / p
                    }
                })
        })
        .collect();
    let total: Rational = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / &total).collect())
}

/// Shannon entropy `-Σ p ln p` with `0 ln 0 = 0`.
pub fn entropy<T: Real>(p: &Distribution<T>) -> T {
    p.probs()
        .iter()
        .filter(|&&x| x > T::zero())
        .fold(T::zero(), |acc, &x| acc - x * x.ln())
}

/// `I(p‖r) = Σ p_j ln(p_j / r_j)`.
pub fn kl_divergence<T: Real>(p: &Distribution<T>, r: &Distribution<T>) -> Result<T> {
    if p.len() != r.len() {
        return Err(Error::InvalidArgument("distributions differ in length".into()));
    }
    let mut total = T::zero();
    for (&a, &b) in p.probs().iter().zip(r.probs()) {
        if a > T::zero() {
            if !(b > T::zero()) {
                return Err(Error::InvalidArgument(
                    "reference distribution vanishes where p is positive".into(),
                ));
            }
            total = total + a * (a / b).ln();
        }
    }
    Ok(total.max(T::zero()))
}

/// `E_p[t_i]` for every feature.
pub fn moments<T: Real>(p: &Distribution<T>, features: &[Vec<i64>]) -> Vec<T> {
    features
        .iter()
        .map(|row| {
            row.iter()
                .zip(p.probs())
                .fold(T::zero(), |acc, (&t, &pj)| acc + T::lit(t as f64) * pj)
        })
        .collect()
}

/// `Σ_j t_i(j) p_j - T_i` for every constraint.
pub fn residuals<T: Real>(p: &Distribution<T>, problem: &MaxEntProblem) -> Result<Vec<T>> {
    if p.len() != problem.m() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} entries, problem has {} outcomes",
            p.len(),
            problem.m()
        )));
    }
    let targets = problem.effective_targets()?;
    Ok(moments(p, problem.features())
        .into_iter()
        .zip(&targets)
        .map(|(e, t)| e - T::lit(to_f64(t)))
        .collect())
}

/// Sufficient statistics of a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSums {
    pub sigma: Vec<i64>,
    pub t_bar: Vec<Rational>,
    pub n: usize,
}

/// `σ_i = Σ_l t_i(O_l)`, `T̃_i = σ_i / N` for 1-based observations.
pub fn sample_sums(samples: &[usize], features: &[Vec<i64>]) -> Result<SampleSums> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("sample list is empty".into()));
    }
    let m = features.first().map(Vec::len);
    let mut sigma = vec![0i64; features.len()];
    for &o in samples {
        if o == 0 || m.is_some_and(|m| o > m) {
            return Err(Error::InvalidArgument(format!(
                "observation {o} outside the sample space"
            )));
        }
        for (s, row) in sigma.iter_mut().zip(features) {
            *s += row[o - 1];
        }
    }
    let n = samples.len();
    let t_bar = sigma
        .iter()
        .map(|&s| Rational::new(BigInt::from(s), BigInt::from(n)))
        .collect();
    Ok(SampleSums { sigma, t_bar, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Dual,
    SampleDual,
    MinIDiv,
    Kc,
    Newton,
    Gis,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Direct,
        Method::Dual,
        Method::SampleDual,
        Method::MinIDiv,
        Method::Kc,
        Method::Newton,
        Method::Gis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Dual => "dual",
            Method::SampleDual => "sample-dual",
            Method::MinIDiv => "min-i-div",
            Method::Kc => "kc",
            Method::Newton => "newton",
            Method::Gis => "gis",
        }
    }

    /// Whether the method goes through a polynomial system and Gröbner basis.
    pub fn is_algebraic(self) -> bool {
        matches!(
            self,
            Method::Direct | Method::Dual | Method::SampleDual | Method::MinIDiv
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Solver-specific bookkeeping attached to a [`Solution`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Number of positive roots of the polynomial system.
    pub positive_roots: Option<usize>,
    pub basis_size: Option<usize>,
    pub eliminant_degree: Option<usize>,
    pub saturated: bool,
    /// The sample-dual recovery needed `θ = θ̃^N` rather than `θ̃^{-N}`.
    pub sign_flip: bool,
    pub cycles: Option<usize>,
    pub iterations: Option<usize>,
    pub gradient_norm: Option<f64>,
    pub backtracks: Option<usize>,
    /// GIS row-sum constant after shifting and slack augmentation.
    pub gis_constant: Option<f64>,
    pub certificates: Vec<IsolatingInterval>,
    pub notes: Vec<String>,
}

/// Estimated distribution with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub distribution: Distribution<f64>,
    /// Exact probabilities when the parameters turned out rational.
    pub distribution_exact: Option<Vec<Rational>>,
    pub theta: Vec<f64>,
    /// `ξ_i = -ln θ_i`.
    pub xi: Vec<f64>,
    pub normalizer: f64,
    pub method: Method,
    pub residuals: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl Solution {
    /// Assembles a solution from parameters, recomputing everything else.
    pub fn from_theta(
        theta: Vec<f64>,
        problem: &MaxEntProblem,
        method: Method,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let (distribution, normalizer) = parametrize_with_normalizer(&theta, problem)?;
        Self::assemble(distribution, theta, normalizer, problem, method, diagnostics)
    }

    /// Solution for a distribution produced directly by an iterative method;
    /// `theta` must parametrize it.
    pub(crate) fn assemble(
        distribution: Distribution<f64>,
        theta: Vec<f64>,
        normalizer: f64,
        problem: &MaxEntProblem,
        method: Method,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let residuals = residuals(&distribution, problem)?;
        let xi = theta.iter().map(|t| -t.ln()).collect();
        Ok(Self {
            distribution,
            distribution_exact: None,
            theta,
            xi,
            normalizer,
            method,
            residuals,
            diagnostics,
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.distribution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::int;

    fn binary(t: Rational) -> MaxEntProblem {
        MaxEntProblem::with_targets(2, vec![vec![0, 1]], vec![t]).unwrap()
    }

    #[test]
    fn parametrize_examples() {
        let p = parametrize(&[1.0], &binary(ratio(1, 2))).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5]);
        let p = parametrize(&[3.0], &binary(ratio(1, 2))).unwrap();
        assert!((p.probs()[0] - 0.25).abs() < 1e-16 && (p.probs()[1] - 0.75).abs() < 1e-16);

        let prior: Vec<Rational> = [1, 2, 3, 4, 5, 6].iter().map(|&k| ratio(k, 21)).collect();
        let die = MaxEntProblem::with_targets(6, vec![vec![1, 2, 3, 4, 5, 6]], vec![ratio(9, 2)])
            .unwrap()
            .prior_set(prior.clone())
            .unwrap();
        let p = parametrize(&[1.0], &die).unwrap();
        for (a, b) in p.probs().iter().zip(&prior) {
            assert!((a - to_f64(b)).abs() < 1e-16);
        }
        assert!(parametrize(&[0.0], &die).is_err());
        assert_eq!(parametrize_exact(&[int(3)], &binary(ratio(1, 2))).unwrap(), vec![ratio(1, 4), ratio(3, 4)]);
    }

    #[test]
    fn normalizer_matches_sum() {
        let (_, z) = parametrize_with_normalizer(&[2.0], &binary(ratio(1, 2))).unwrap();
        assert!((z - 3.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let u2 = Distribution::<f64>::uniform(2);
        assert!((entropy(&u2) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&Distribution::new(vec![1.0, 0.0]).unwrap()), 0.0);
        assert!((entropy(&Distribution::<f64>::uniform(6)) - 6f64.ln()).abs() < 1e-15);
        let u32 = Distribution::<f32>::uniform(2);
        assert!((entropy(&u32) - 2f32.ln()).abs() < 1e-6);
    }

    #[test]
    fn kl_examples() {
        let p = Distribution::new(vec![0.5, 0.5]).unwrap();
        let r = Distribution::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert!((kl_divergence(&p, &r).unwrap() - 0.14384103622589046).abs() < 1e-15);
        let one = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!((kl_divergence(&one, &p).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(kl_divergence(&p, &one).is_err());
    }

    #[test]
    fn residual_examples() {
        let prob = binary(ratio(1, 2));
        let r = |v: Vec<f64>| residuals(&Distribution::new(v).unwrap(), &prob).unwrap()[0];
        assert_eq!(r(vec![0.5, 0.5]), 0.0);
        assert_eq!(r(vec![1.0, 0.0]), -0.5);
        assert_eq!(r(vec![0.25, 0.75]), 0.25);
        let bare = MaxEntProblem::new(2, vec![vec![0, 1]], None, None, None).unwrap();
        assert!(residuals(&Distribution::<f64>::uniform(2), &bare).is_err());
    }

    #[test]
    fn sample_sum_examples() {
        let s = sample_sums(&[2, 2, 1], &[vec![0, 1]]).unwrap();
        assert_eq!((s.sigma.clone(), s.t_bar.clone(), s.n), (vec![2], vec![ratio(2, 3)], 3));
        let f = vec![vec![4, 7, 9], vec![-1, 0, 2]];
        assert_eq!(sample_sums(&[1], &f).unwrap().sigma, vec![4, -1]);
        let m = 6;
        let series: Vec<usize> = (1..=m).collect();
        let s = sample_sums(&series, &[(1..=m as i64).collect()]).unwrap();
        assert_eq!(s.sigma, vec![21]);
        assert!(sample_sums(&[3], &[vec![0, 1]]).is_err());
        assert!(sample_sums(&[], &[vec![0, 1]]).is_err());
    }

    #[test]
    fn problem_validation() {
        assert!(MaxEntProblem::with_targets(1, vec![vec![0]], vec![int(0)]).is_err());
        assert!(MaxEntProblem::with_targets(2, vec![vec![0, 1, 2]], vec![int(0)]).is_err());
        assert!(MaxEntProblem::new(2, vec![vec![0, 1]], Some(vec![int(0)]), Some(vec![1]), None).is_err());
        let p = binary(ratio(1, 2));
        assert!(p.clone().prior_set(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(p.clone().prior_set(vec![int(1), int(0)]).is_err());
        assert!(p.prior_set(vec![ratio(1, 3), ratio(2, 3)]).is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("simplex".parse::<Method>().is_err());
    }
}
