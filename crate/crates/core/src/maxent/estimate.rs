use log::debug;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{
    build_direct_system, build_dual_system, build_minidiv_system, build_sample_dual_system,
    check_feasibility, kl_divergence, parametrize_exact, Diagnostics, Distribution, MaxEntProblem,
    Method, Solution,
};
use crate::error::{Error, Result};
use crate::groebner::{GroebnerLimits, IsolatingInterval, PositiveSolver};
use crate::kc::{kc_iterate, KcOptions};
use crate::numbaseline::{gis, newton_dual};
use crate::numkernel::{int, to_f64, Rational};
use crate::polyalg::Polynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    /// Bound on `max_i |E_p[t_i] - T_i|` for the returned solution.
    pub tol: f64,
    /// Residual bound handed to the polynomial solver (equations are scaled to
    /// unit max coefficient first).
    pub poly_tol: f64,
    pub limits: GroebnerLimits,
    pub max_cycles: usize,
    pub max_iters: usize,
    /// Certify every KC root with an exact Sturm count.
    pub certify: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            poly_tol: 1e-8,
            limits: GroebnerLimits::default(),
            max_cycles: 500,
            max_iters: 1_000_000,
            certify: false,
        }
    }
}

/// Estimates the distribution with `method`; the residuals of the result are
/// at most `tol` in absolute value.
pub fn estimate(problem: &MaxEntProblem, method: Method, tol: f64) -> Result<Solution> {
    estimate_with(
        problem,
        method,
        &EstimateOptions {
            tol,
            ..EstimateOptions::default()
        },
    )
}

pub fn estimate_with(
    problem: &MaxEntProblem,
    method: Method,
    opts: &EstimateOptions,
) -> Result<Solution> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    match method {
        Method::Direct | Method::Dual | Method::SampleDual if problem.prior().is_some() => {
            return Err(Error::Convention(format!(
                "the {method} route maximizes entropy and ignores priors; use min-i-div"
            )));
        }
        Method::MinIDiv if problem.prior().is_none() => {
            return Err(Error::InvalidArgument(
                "min-i-div needs a prior distribution".into(),
            ));
        }
        Method::SampleDual if problem.samples().is_none() => {
            return Err(Error::InvalidArgument(
                "sample-dual needs samples rather than targets".into(),
            ));
        }
        _ => {}
    }
    if problem.d() == 0 {
        return unconstrained(problem, method);
    }
    check_feasibility(problem)?;
    let solution = match method {
        Method::Direct | Method::Dual | Method::SampleDual | Method::MinIDiv => {
            algebraic(problem, method, opts)?
        }
        Method::Kc => {
            let kc = KcOptions {
                max_cycles: opts.max_cycles,
                tol: opts.tol,
                certify: opts.certify,
            };
            crate::kc::kc_solution(problem, kc_iterate::<f64>(problem, &kc)?)?
        }
        Method::Newton => newton_dual(problem, opts.tol)?.0,
        Method::Gis => gis(problem, opts.max_iters, opts.tol)?.0,
    };
    let worst = solution.max_residual();
    if !(worst <= opts.tol) {
        return Err(Error::Convergence {
            iterations: 0,
            residual: worst,
            last: solution.distribution.probs().to_vec(),
        });
    }
    Ok(solution)
}

fn unconstrained(problem: &MaxEntProblem, method: Method) -> Result<Solution> {
    let exact = problem.prior_or_uniform();
    let distribution = Distribution::from_rationals(&exact)?;
    let mut solution = Solution::assemble(
        distribution,
        Vec::new(),
        1.0,
        problem,
        method,
        Diagnostics {
            notes: vec!["no constraints: the estimate is the reference distribution".into()],
            ..Diagnostics::default()
        },
    )?;
    solution.distribution_exact = Some(exact);
    Ok(solution)
}

fn scale_to_unit(f: &Polynomial<Rational>) -> Polynomial<Rational> {
    let top = f
        .terms()
        .map(|(_, c)| c.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    if top.is_zero() {
        f.clone()
    } else {
        f.scale(&top.recip())
    }
}

fn algebraic(problem: &MaxEntProblem, method: Method, opts: &EstimateOptions) -> Result<Solution> {
    let system = match method {
        Method::Direct => build_direct_system(problem)?,
        Method::Dual => build_dual_system(problem)?,
        Method::SampleDual => build_sample_dual_system(problem)?,
        Method::MinIDiv => build_minidiv_system(problem)?,
        _ => unreachable!("numeric methods are dispatched elsewhere"),
    };
    let scaled: Vec<_> = system.equations().iter().map(scale_to_unit).collect();
    let solver = PositiveSolver {
        limits: opts.limits,
        ..PositiveSolver::new(opts.poly_tol)
    };
    let report = match solver.solve(&scaled) {
        Err(Error::NoPositiveSolution) => {
            return Err(Error::Infeasible(
                "the polynomial system has no positive root".into(),
            ))
        }
        other => other?,
    };
    if report.solutions.is_empty() {
        return Err(Error::Infeasible(
            "the polynomial system has no positive root".into(),
        ));
    }
    let n = system.sample_size().unwrap_or(1) as f64;
    let recover = |theta: &[f64], exponent: f64| -> Vec<f64> {
        theta.iter().map(|t| t.powf(exponent)).collect()
    };
    let orientation = if method == Method::SampleDual { -n } else { 1.0 };

    let prior = Distribution::from_rationals(&problem.prior_or_uniform())?;
    let score = |s: &Solution| -> f64 {
        if method == Method::MinIDiv {
            -kl_divergence(&s.distribution, &prior).unwrap_or(f64::INFINITY)
        } else {
            s.entropy()
        }
    };
    let pick = |exponent: f64| -> Result<(Solution, usize)> {
        let mut best: Option<(Solution, usize)> = None;
        for (k, root) in report.solutions.iter().enumerate() {
            let s = Solution::from_theta(
                recover(&root.theta, exponent),
                problem,
                method,
                Diagnostics::default(),
            )?;
            if best.as_ref().is_none_or(|(b, _)| score(&s) > score(b)) {
                best = Some((s, k));
            }
        }
        Ok(best.expect("at least one root"))
    };
    let (mut solution, mut index) = pick(orientation)?;
    let mut sign_flip = false;
    if method == Method::SampleDual && !(solution.max_residual() <= opts.tol) {
        let (flipped, k) = pick(-orientation)?;
        if flipped.max_residual() < solution.max_residual() {
            debug!("sample-dual: recovering θ with the opposite exponent sign");
            solution = flipped;
            index = k;
            sign_flip = true;
        }
    }
    let roots = report.solutions.len();
    let mut notes = Vec::new();
    if roots > 1 {
        notes.push(format!(
            "{roots} positive roots; selected root {} by {}",
            index + 1,
            if method == Method::MinIDiv { "minimum divergence" } else { "maximum entropy" }
        ));
    }
    if report.compression.iter().any(|&g| g != 1) {
        notes.push(format!("exponents compressed by {:?}", report.compression));
    }
    solution.diagnostics = Diagnostics {
        positive_roots: Some(roots),
        basis_size: Some(report.basis_size),
        eliminant_degree: Some(report.eliminant_degree),
        saturated: report.saturated,
        sign_flip,
        certificates: refined(&report.solutions[index].certificates),
        notes,
        ..Diagnostics::default()
    };
    solution.distribution_exact = exact_distribution(problem, &solution.theta)?;
    Ok(solution)
}

/// Isolating intervals shrunk to width at most 2^-40 for reporting.
fn refined(certificates: &[IsolatingInterval]) -> Vec<IsolatingInterval> {
    let width = Rational::new(BigInt::one(), BigInt::one() << 40);
    certificates
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.refine(&width);
            c
        })
        .collect()
}

/// Best rational approximation with denominator at most `max_den`.
fn rational_approximation(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    (k1 > 0).then(|| Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Exact probabilities when every parameter is (numerically) a small-height
/// rational that solves the moment equations exactly.
fn exact_distribution(problem: &MaxEntProblem, theta: &[f64]) -> Result<Option<Vec<Rational>>> {
    let mut exact = Vec::with_capacity(theta.len());
    for &t in theta {
        match rational_approximation(t, 1_000_000) {
            Some(q) if q.is_positive() && (to_f64(&q) - t).abs() <= 1e-12 * t.abs() => exact.push(q),
            _ => return Ok(None),
        }
    }
    let p = parametrize_exact(&exact, problem)?;
    let targets = problem.effective_targets()?;
    let satisfied = problem.features().iter().zip(&targets).all(|(row, target)| {
        let mean: Rational = row
            .iter()
            .zip(&p)
            .map(|(&t, pj)| pj * int(t))
            .sum();
        &mean == target
    });
    Ok(satisfied.then_some(p))
}
