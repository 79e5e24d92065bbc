//! Kullback-Csiszár cyclic I-projection.
//!
//! Each step enforces a single constraint exactly by tilting the current
//! distribution, `p'_j ∝ p_j ζ^{t_i(j)}`, where `ζ > 0` is the unique positive
//! root of `Σ_j p_j (t_i(j) - T_i) ζ^{t_i(j)}`. Sweeping through the
//! constraints converges to the I-projection of the starting point (the prior,
//! or the uniform distribution) onto the constraint set.

use log::{debug, trace};

use crate::error::{Error, Result};
use crate::groebner::{sturm_isolate, IsolatingInterval, RootDomain};
use crate::maxent::{check_feasibility, residuals, Diagnostics, Distribution, MaxEntProblem, Method, Solution};
use crate::numkernel::{from_f64, int, to_f64, Rational};
use crate::polyalg::{ExponentVector, Polynomial};
use crate::scalar::Real;

/// Iterate of the cyclic projection.
#[derive(Debug, Clone, PartialEq)]
pub struct KcState<T> {
    steps: usize,
    p: Distribution<T>,
    /// `ln` of the accumulated multiplier per constraint; `p ∝ r ∏ ζ_i^{t_i}`.
    log_zeta: Vec<T>,
    /// `Z^{(k)} = Σ_j p_j ζ^{t_i(j)}` of every step so far.
    normalizers: Vec<T>,
    certificate: Option<IsolatingInterval>,
}

impl<T: Real> KcState<T> {
    /// Number of single-constraint steps taken.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn distribution(&self) -> &Distribution<T> {
        &self.p
    }

    pub fn log_zeta(&self) -> &[T] {
        &self.log_zeta
    }

    /// Accumulated multipliers, the model parameters `θ` of the iterate.
    pub fn zeta(&self) -> Vec<T> {
        self.log_zeta.iter().map(|l| l.exp()).collect()
    }

    pub fn normalizers(&self) -> &[T] {
        &self.normalizers
    }

    /// Sturm certificate of the last step, if certification was requested.
    pub fn certificate(&self) -> Option<&IsolatingInterval> {
        self.certificate.as_ref()
    }
}

/// Starts from the prior, or the uniform distribution without one.
pub fn kc_init<T: Real>(problem: &MaxEntProblem) -> Result<KcState<T>> {
    let p = match problem.prior() {
        Some(r) => Distribution::<T>::from_rationals(r)?,
        None => Distribution::uniform(problem.m()),
    };
    Ok(KcState {
        steps: 0,
        p,
        log_zeta: vec![T::zero(); problem.d()],
        normalizers: Vec::new(),
        certificate: None,
    })
}

/// Tilted log-weights `ln p_j + u t_j` and derived moments.
struct Tilt<T> {
    mean: T,
    variance: T,
    log_z: T,
    logw: Vec<T>,
}

fn tilt<T: Real>(logp: &[T], t: &[T], u: T) -> Tilt<T> {
    let logw: Vec<T> = logp.iter().zip(t).map(|(&l, &x)| l + u * x).collect();
    let top = logw.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let (mut s0, mut s1, mut s2) = (T::zero(), T::zero(), T::zero());
    for (&l, &x) in logw.iter().zip(t) {
        let w = (l - top).exp();
        s0 = s0 + w;
        s1 = s1 + w * x;
        s2 = s2 + w * x * x;
    }
    let mean = s1 / s0;
    Tilt {
        mean,
        variance: (s2 / s0 - mean * mean).max(T::zero()),
        log_z: top + s0.ln(),
        logw,
    }
}

/// Enforces constraint `i` (0-based) exactly.
pub fn kc_step<T: Real>(
    state: &KcState<T>,
    problem: &MaxEntProblem,
    i: usize,
    certify: bool,
) -> Result<KcState<T>> {
    if i >= problem.d() {
        return Err(Error::InvalidArgument(format!(
            "constraint index {i} out of range for d = {}",
            problem.d()
        )));
    }
    let targets = problem.effective_targets()?;
    let row = &problem.features()[i];
    let target = T::lit(to_f64(&targets[i]));
    let t: Vec<T> = row.iter().map(|&x| T::lit(x as f64)).collect();
    let support: Vec<usize> = (0..row.len()).filter(|&j| state.p.probs()[j] > T::zero()).collect();
    let lo_t = support.iter().map(|&j| row[j]).min();
    let hi_t = support.iter().map(|&j| row[j]).max();
    let (Some(lo_t), Some(hi_t)) = (lo_t, hi_t) else {
        return Err(Error::Infeasible("distribution has empty support".into()));
    };
    if !(int(lo_t) < targets[i] && targets[i] < int(hi_t)) {
        return Err(Error::Infeasible(format!(
            "constraint {} cannot be met by tilting: target outside ({lo_t}, {hi_t})",
            i + 1
        )));
    }
    let logp: Vec<T> = state.p.probs().iter().map(|p| p.ln()).collect();
    let scale = T::lit(lo_t.unsigned_abs().max(hi_t.unsigned_abs()).max(1) as f64);
    let g = |u: T| tilt(&logp, &t, u).mean - target;

    // bracket the root of the increasing function u ↦ E[t] - T
    let (mut lo, mut hi) = (-T::one(), T::one());
    for _ in 0..2000 {
        if g(lo) < T::zero() {
            break;
        }
        lo = lo + lo;
    }
    for _ in 0..2000 {
        if g(hi) > T::zero() {
            break;
        }
        hi = hi + hi;
    }
    if !(g(lo) <= T::zero() && g(hi) >= T::zero()) {
        return Err(Error::Conditioning(format!(
            "could not bracket the multiplier of constraint {}",
            i + 1
        )));
    }

    let tiny = T::epsilon() * scale * T::lit(4.0);
    let mut u = T::zero();
    let mut iterations = 0;
    loop {
        let cur = tilt(&logp, &t, u);
        let gu = cur.mean - target;
        if gu.abs() <= tiny || iterations >= 200 {
            break;
        }
        if gu < T::zero() {
            lo = u;
        } else {
            hi = u;
        }
        let newton = u - gu / cur.variance;
        let next = if cur.variance > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        iterations += 1;
        if (next - u).abs() <= T::epsilon() * u.abs().max(T::one()) {
            u = next;
            break;
        }
        u = next;
    }
    trace!("kc step {i}: ln ζ = {u} after {iterations} iterations");

    let result = tilt(&logp, &t, u);
    let p = Distribution::from_log_weights(&result.logw)?;
    let mut log_zeta = state.log_zeta.clone();
    log_zeta[i] = log_zeta[i] + u;
    let mut normalizers = state.normalizers.clone();
    normalizers.push(result.log_z.exp());
    let certificate = if certify {
        Some(certify_step(state.p.probs(), row, &targets[i], u.exp())?)
    } else {
        None
    };
    Ok(KcState {
        steps: state.steps + 1,
        p,
        log_zeta,
        normalizers,
        certificate,
    })
}

/// Isolates the unique positive root of `Σ_j p_j (t_j - T) ζ^{t_j - min t}`
/// with exact arithmetic on the (rationalized) current probabilities and checks
/// that the numeric multiplier lies in its interval.
fn certify_step<T: Real>(p: &[T], row: &[i64], target: &Rational, zeta: T) -> Result<IsolatingInterval> {
    let base = *row.iter().min().expect("nonempty row");
    let mut f = Polynomial::<Rational>::zero(1);
    for (&pj, &tj) in p.iter().zip(row) {
        let Some(q) = pj.to_f64().and_then(|x| from_f64(x).ok()) else {
            continue;
        };
        let e = i32::try_from(tj - base).map_err(|_| Error::SizeGuard {
            what: "feature range",
            observed: (tj - base).unsigned_abs() as usize,
            limit: i32::MAX as usize,
        })?;
        f = &f + &Polynomial::monomial(ExponentVector::new(vec![e]), q * (int(tj) - target));
    }
    let mut roots = sturm_isolate(&f, RootDomain::PositiveOnly)?;
    if roots.len() != 1 {
        return Err(Error::Conditioning(format!(
            "tilting polynomial has {} positive roots, expected exactly one",
            roots.len()
        )));
    }
    let mut root = roots.pop().expect("one root");
    let z = zeta.to_f64().unwrap_or(f64::NAN);
    let width = from_f64(z.abs().max(1.0) * 1e-12)?;
    root.refine(&width);
    let (a, b) = (to_f64(root.interval().low()), to_f64(root.interval().high()));
    let slack = 1e-9 * z.abs().max(1.0);
    if !(a - slack <= z && z <= b + slack) {
        return Err(Error::Convergence {
            iterations: 0,
            residual: (z - root.approximate()).abs(),
            last: p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        });
    }
    Ok(root)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KcOptions {
    pub max_cycles: usize,
    /// Stop once every residual is at most this in absolute value.
    pub tol: f64,
    pub certify: bool,
}

impl Default for KcOptions {
    fn default() -> Self {
        Self {
            max_cycles: 500,
            tol: 1e-10,
            certify: false,
        }
    }
}

/// Sweeps `i = 0..d` cyclically until the residuals are within tolerance.
/// Returns the final state and the number of completed cycles.
pub fn kc_iterate<T: Real>(problem: &MaxEntProblem, opts: &KcOptions) -> Result<(KcState<T>, usize)> {
    if problem.d() > 0 {
        check_feasibility(problem)?;
    }
    let tol = T::lit(opts.tol);
    let mut state = kc_init::<T>(problem)?;
    let mut cycles = 0;
    loop {
        let worst = residuals(&state.p, problem)?
            .into_iter()
            .fold(T::zero(), |m, r| m.max(r.abs()));
        if worst <= tol {
            debug!("kc converged after {cycles} cycles, residual {worst}");
            return Ok((state, cycles));
        }
        if cycles == opts.max_cycles {
            return Err(Error::Convergence {
                iterations: cycles,
                residual: worst.to_f64().unwrap_or(f64::NAN),
                last: state.p.probs().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            });
        }
        for i in 0..problem.d() {
            state = kc_step(&state, problem, i, opts.certify)?;
        }
        cycles += 1;
    }
}

/// Packs a finished iteration as a [`Solution`].
pub fn kc_solution<T: Real>(problem: &MaxEntProblem, (state, cycles): (KcState<T>, usize)) -> Result<Solution> {
    let probs: Vec<f64> = state.p.probs().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let distribution = Distribution::new(probs)?;
    let theta: Vec<f64> = state.zeta().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let normalizer = crate::maxent::parametrize_with_normalizer(&theta, problem)?.1;
    let diagnostics = Diagnostics {
        cycles: Some(cycles),
        iterations: Some(state.steps),
        certificates: state.certificate.into_iter().collect(),
        ..Diagnostics::default()
    };
    Solution::assemble(distribution, theta, normalizer, problem, Method::Kc, diagnostics)
}

/// Runs the cyclic projection in double precision.
pub fn kc_run(problem: &MaxEntProblem, max_cycles: usize, tol: f64) -> Result<Solution> {
    let opts = KcOptions {
        max_cycles,
        tol,
        certify: false,
    };
    kc_solution(problem, kc_iterate::<f64>(problem, &opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;

    fn die() -> MaxEntProblem {
        MaxEntProblem::with_targets(6, vec![(1..=6).collect()], vec![ratio(9, 2)]).unwrap()
    }

    #[test]
    fn single_constraint_takes_one_step() {
        let (state, cycles) = kc_iterate::<f64>(&die(), &KcOptions { certify: true, ..KcOptions::default() }).unwrap();
        assert_eq!(cycles, 1);
        assert_eq!(state.steps(), 1);
        assert!((state.zeta()[0] - 1.449253995360700594).abs() < 1e-13);
        let cert = state.certificate().unwrap();
        assert!((cert.approximate() - 1.449253995360700594).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_when_target_is_current_mean() {
        let p = MaxEntProblem::with_targets(3, vec![vec![0, 1, 2]], vec![int(1)]).unwrap();
        let s0 = kc_init::<f64>(&p).unwrap();
        let s1 = kc_step(&s0, &p, 0, false).unwrap();
        assert_eq!(s1.log_zeta(), &[0.0]);
        assert_eq!(s1.distribution(), s0.distribution());
    }

    #[test]
    fn two_constraints_converge() {
        let p = MaxEntProblem::with_targets(
            4,
            vec![vec![0, 1, 0, 1], vec![0, 0, 1, 1]],
            vec![ratio(1, 3), ratio(3, 5)],
        )
        .unwrap();
        let s = kc_run(&p, 500, 1e-12).unwrap();
        assert!(s.max_residual() <= 1e-12);
        // independent binary features: the product of the marginals
        let expect = [4.0 / 15.0, 2.0 / 15.0, 2.0 / 5.0, 1.0 / 5.0];
        for (a, b) in s.distribution.probs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_runs() {
        let (state, _) = kc_iterate::<f32>(&die(), &KcOptions { tol: 1e-5, ..KcOptions::default() }).unwrap();
        assert!((state.zeta()[0] - 1.449254).abs() < 1e-4);
    }

    #[test]
    fn prior_is_fixed_when_target_matches() {
        let prior = vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)];
        let p = MaxEntProblem::with_targets(3, vec![vec![0, 1, 2]], vec![ratio(4, 3)])
            .unwrap()
            .prior_set(prior)
            .unwrap();
        let s = kc_run(&p, 10, 1e-12).unwrap();
        assert_eq!(s.diagnostics.cycles, Some(0));
        assert!((s.theta[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_index() {
        let s = kc_init::<f64>(&die()).unwrap();
        assert!(kc_step(&s, &die(), 1, false).is_err());
    }
}
