//! Purely numeric estimators used to cross-check the algebraic routes:
//! damped Newton on the convex dual and generalized iterative scaling.

use log::debug;

use crate::error::{Error, Result};
use crate::linalg::solve_linear;
use crate::maxent::{check_feasibility, Diagnostics, Distribution, MaxEntProblem, Method, Solution};
use crate::numkernel::to_f64;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerReport {
    pub iterations: usize,
    /// `max_i |E_p[t_i] - T_i|` at the returned point.
    pub gradient_norm: f64,
    pub backtracks: usize,
    pub converged: bool,
}

/// Result of a numeric fit in precision `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericFit<T> {
    /// `ξ_i = -ln θ_i`.
    pub xi: Vec<T>,
    pub distribution: Distribution<T>,
    pub report: OptimizerReport,
}

struct Data<T> {
    features: Vec<Vec<T>>,
    targets: Vec<T>,
    log_prior: Vec<T>,
}

fn data<T: Real>(problem: &MaxEntProblem) -> Result<Data<T>> {
    Ok(Data {
        features: problem
            .features()
            .iter()
            .map(|row| row.iter().map(|&x| T::lit(x as f64)).collect())
            .collect(),
        targets: problem
            .effective_targets()?
            .iter()
            .map(|t| T::lit(to_f64(t)))
            .collect(),
        log_prior: match problem.prior() {
            Some(r) => r.iter().map(|q| T::lit(to_f64(q)).ln()).collect(),
            None => vec![T::zero(); problem.m()],
        },
    })
}

fn to_f64_lossy<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dual objective `Ψ(ξ) = ln Σ_j r_j exp(-ξ·t(j)) + ξ·T` with its gradient
/// `T - E_p[t]`, Hessian `Cov_p[t]` and the distribution `p(ξ)`.
struct DualEval<T> {
    value: T,
    gradient: Vec<T>,
    hessian: Vec<Vec<T>>,
    logw: Vec<T>,
}

fn dual_eval<T: Real>(data: &Data<T>, xi: &[T]) -> DualEval<T> {
    let d = xi.len();
    let m = data.log_prior.len();
    let logw: Vec<T> = (0..m)
        .map(|j| {
            (0..d).fold(data.log_prior[j], |acc, i| acc - xi[i] * data.features[i][j])
        })
        .collect();
    let top = logw.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let w: Vec<T> = logw.iter().map(|&l| (l - top).exp()).collect();
    let total = w.iter().fold(T::zero(), |a, &b| a + b);
    let p: Vec<T> = w.iter().map(|&x| x / total).collect();
    let mean: Vec<T> = data
        .features
        .iter()
        .map(|row| row.iter().zip(&p).fold(T::zero(), |a, (&t, &pj)| a + t * pj))
        .collect();
    let mut hessian = vec![vec![T::zero(); d]; d];
    for (a, row_a) in hessian.iter_mut().enumerate() {
        for (b, h) in row_a.iter_mut().enumerate() {
            *h = (0..m).fold(T::zero(), |acc, j| {
                acc + p[j] * (data.features[a][j] - mean[a]) * (data.features[b][j] - mean[b])
            });
        }
    }
    let value = top
        + total.ln()
        + xi.iter().zip(&data.targets).fold(T::zero(), |a, (&x, &t)| a + x * t);
    DualEval {
        value,
        gradient: data.targets.iter().zip(&mean).map(|(&t, &e)| t - e).collect(),
        hessian,
        logw,
    }
}

/// Value and gradient of the dual objective, exposed for derivative checks.
pub fn dual_objective<T: Real>(problem: &MaxEntProblem, xi: &[T]) -> Result<(T, Vec<T>)> {
    if xi.len() != problem.d() {
        return Err(Error::InvalidArgument(format!(
            "{} multipliers for {} constraints",
            xi.len(),
            problem.d()
        )));
    }
    let e = dual_eval(&data::<T>(problem)?, xi);
    Ok((e.value, e.gradient))
}

fn norm_inf<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Damped Newton with Armijo backtracking (factor 1/2, constant 1e-4) from `ξ = 0`.
pub fn newton_dual_in<T: Real>(problem: &MaxEntProblem, tol: T, max_iters: usize) -> Result<NumericFit<T>> {
    check_feasibility(problem)?;
    let data = data::<T>(problem)?;
    let mut xi = vec![T::zero(); problem.d()];
    let mut backtracks = 0;
    let mut cur = dual_eval(&data, &xi);
    for iteration in 0..=max_iters {
        let gnorm = norm_inf(&cur.gradient);
        if gnorm <= tol || iteration == max_iters {
            let report = OptimizerReport {
                iterations: iteration,
                gradient_norm: to_f64_lossy(gnorm),
                backtracks,
                converged: gnorm <= tol,
            };
            if !report.converged {
                return Err(Error::Convergence {
                    iterations: iteration,
                    residual: report.gradient_norm,
                    last: Distribution::from_log_weights(&cur.logw)?
                        .probs()
                        .iter()
                        .map(|&x| to_f64_lossy(x))
                        .collect(),
                });
            }
            debug!("newton converged in {iteration} iterations, |g| = {gnorm}");
            return Ok(NumericFit {
                xi,
                distribution: Distribution::from_log_weights(&cur.logw)?,
                report,
            });
        }
        let neg: Vec<T> = cur.gradient.iter().map(|&g| -g).collect();
        let step = solve_linear(&cur.hessian, &neg).ok_or_else(|| {
            Error::Conditioning("singular Hessian in the dual Newton step".into())
        })?;
        let slope = step.iter().zip(&cur.gradient).fold(T::zero(), |a, (&s, &g)| a + s * g);
        let slack = T::epsilon() * T::lit(16.0) * cur.value.abs().max(T::one());
        let mut t = T::one();
        loop {
            let trial: Vec<T> = xi.iter().zip(&step).map(|(&x, &s)| x + t * s).collect();
            let next = dual_eval(&data, &trial);
            if next.value <= cur.value + T::lit(1e-4) * t * slope + slack {
                xi = trial;
                cur = next;
                break;
            }
            t = t / T::lit(2.0);
            backtracks += 1;
            if t < T::lit(1e-20) {
                return Err(Error::Conditioning(
                    "line search failed to decrease the dual objective".into(),
                ));
            }
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Double-precision Newton baseline, at most 100 iterations.
pub fn newton_dual(problem: &MaxEntProblem, tol: f64) -> Result<(Solution, OptimizerReport)> {
    let fit = newton_dual_in::<f64>(problem, tol, 100)?;
    let theta: Vec<f64> = fit.xi.iter().map(|x| (-x).exp()).collect();
    let diagnostics = Diagnostics {
        iterations: Some(fit.report.iterations),
        gradient_norm: Some(fit.report.gradient_norm),
        backtracks: Some(fit.report.backtracks),
        ..Diagnostics::default()
    };
    let normalizer = crate::maxent::parametrize_with_normalizer(&theta, problem)?.1;
    let solution = Solution::assemble(fit.distribution, theta, normalizer, problem, Method::Newton, diagnostics)?;
    Ok((solution, fit.report))
}

/// Generalized iterative scaling. Features are shifted to be nonnegative and a
/// slack feature brings every column sum to the constant `C`; each sweep
/// multiplies `p_j` by `∏_k (G_k / E_k)^{F_k(j) / C}`.
pub fn gis_in<T: Real>(problem: &MaxEntProblem, max_iters: usize, tol: T) -> Result<(NumericFit<T>, T)> {
    check_feasibility(problem)?;
    let data = data::<T>(problem)?;
    let (d, m) = (problem.d(), problem.m());
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(d + 1);
    let mut goals: Vec<T> = Vec::with_capacity(d + 1);
    for (row, &t) in data.features.iter().zip(&data.targets) {
        let shift = row.iter().fold(T::infinity(), |a, &b| a.min(b));
        rows.push(row.iter().map(|&x| x - shift).collect());
        goals.push(t - shift);
    }
    let sums: Vec<T> = (0..m).map(|j| rows.iter().fold(T::zero(), |a, r| a + r[j])).collect();
    let c = sums.iter().fold(T::zero(), |a, &b| a.max(b));
    if !(c > T::zero()) {
        return Err(Error::Conditioning("all features are constant".into()));
    }
    let slack = sums.iter().any(|&s| s != c);
    if slack {
        rows.push(sums.iter().map(|&s| c - s).collect());
        goals.push(c - goals.iter().fold(T::zero(), |a, &b| a + b));
    }
    let log_goals: Vec<T> = goals.iter().map(|g| g.ln()).collect();
    let mut lambda = vec![T::zero(); rows.len()];
    let mut logp = data.log_prior.clone();
    for iteration in 0..=max_iters {
        let p = Distribution::from_log_weights(&logp)?;
        let expect: Vec<T> = rows
            .iter()
            .map(|r| r.iter().zip(p.probs()).fold(T::zero(), |a, (&f, &pj)| a + f * pj))
            .collect();
        let worst = expect[..d]
            .iter()
            .zip(&goals)
            .fold(T::zero(), |w, (&e, &g)| w.max((e - g).abs()));
        if worst <= tol || iteration == max_iters {
            let report = OptimizerReport {
                iterations: iteration,
                gradient_norm: to_f64_lossy(worst),
                backtracks: 0,
                converged: worst <= tol,
            };
            if !report.converged {
                return Err(Error::Convergence {
                    iterations: iteration,
                    residual: report.gradient_norm,
                    last: p.probs().iter().map(|&x| to_f64_lossy(x)).collect(),
                });
            }
            debug!("gis converged in {iteration} sweeps, residual {worst}");
            let base = if slack { lambda[d] } else { T::zero() };
            let xi = lambda[..d].iter().map(|&l| base - l).collect();
            return Ok((NumericFit { xi, distribution: p, report }, c));
        }
        let delta: Vec<T> = log_goals
            .iter()
            .zip(&expect)
            .map(|(&g, &e)| (g - e.ln()) / c)
            .collect();
        for (l, &dl) in lambda.iter_mut().zip(&delta) {
            *l = *l + dl;
        }
        for (j, lp) in logp.iter_mut().enumerate() {
            *lp = rows.iter().zip(&delta).fold(*lp, |a, (r, &dl)| a + r[j] * dl);
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Double-precision GIS baseline.
pub fn gis(problem: &MaxEntProblem, max_iters: usize, tol: f64) -> Result<(Solution, OptimizerReport)> {
    let (fit, c) = gis_in::<f64>(problem, max_iters, tol)?;
    let theta: Vec<f64> = fit.xi.iter().map(|x| (-x).exp()).collect();
    let diagnostics = Diagnostics {
        iterations: Some(fit.report.iterations),
        gradient_norm: Some(fit.report.gradient_norm),
        gis_constant: Some(c),
        ..Diagnostics::default()
    };
    let normalizer = crate::maxent::parametrize_with_normalizer(&theta, problem)?.1;
    let solution = Solution::assemble(fit.distribution, theta, normalizer, problem, Method::Gis, diagnostics)?;
    Ok((solution, fit.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxent::parametrize;
    use crate::numkernel::ratio;

    fn die() -> MaxEntProblem {
        MaxEntProblem::with_targets(6, vec![(1..=6).collect()], vec![ratio(9, 2)]).unwrap()
    }

    #[test]
    fn newton_die() {
        let (s, report) = newton_dual(&die(), 1e-13).unwrap();
        assert!(report.converged);
        assert!(report.iterations < 20);
        assert!((s.xi[0] + 0.37104893808103334).abs() < 1e-12);
    }

    #[test]
    fn gis_die() {
        let (s, report) = gis(&die(), 1_000_000, 1e-12).unwrap();
        assert!(report.converged);
        assert!((s.theta[0] - 1.449253995360700594).abs() < 1e-9);
        assert_eq!(s.diagnostics.gis_constant, Some(5.0));
        let p = parametrize(&s.theta, &die()).unwrap();
        assert!(p.linf_distance(&s.distribution) < 1e-12);
    }

    #[test]
    fn gis_and_newton_agree_with_prior() {
        let p = MaxEntProblem::with_targets(
            4,
            vec![vec![0, 1, 2, 3], vec![1, 0, 0, 1]],
            vec![ratio(3, 2), ratio(1, 3)],
        )
        .unwrap()
        .prior_set(vec![ratio(1, 10), ratio(2, 10), ratio(3, 10), ratio(4, 10)])
        .unwrap();
        let (a, _) = newton_dual(&p, 1e-12).unwrap();
        let (b, _) = gis(&p, 1_000_000, 1e-12).unwrap();
        assert!(a.distribution.linf_distance(&b.distribution) < 1e-10);
        for (x, y) in a.theta.iter().zip(&b.theta) {
            assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = MaxEntProblem::with_targets(
            4,
            vec![vec![0, 1, 2, 3], vec![1, 0, 0, 1]],
            vec![ratio(3, 2), ratio(1, 3)],
        )
        .unwrap();
        let xi = [0.3f64, -0.2];
        let (_, g) = dual_objective(&p, &xi).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut up = xi;
            let mut down = xi;
            up[i] += h;
            down[i] -= h;
            let fd = (dual_objective(&p, &up).unwrap().0 - dual_objective(&p, &down).unwrap().0) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-7, "{fd} vs {}", g[i]);
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        assert!(matches!(gis(&die(), 3, 1e-14), Err(Error::Convergence { .. })));
    }

    #[test]
    fn single_precision_newton() {
        let fit = newton_dual_in::<f32>(&die(), 1e-5, 50).unwrap();
        assert!((fit.xi[0] + 0.371049).abs() < 1e-4);
    }
}
