//! Zero-dimensional solving on the open positive orthant.
//!
//! Pipeline: clear denominators and monomial factors, compress exponents by
//! their per-variable gcd, grevlex Gröbner basis converted to lex, Sturm isolation of the
//! eliminant in the last variable, back-substitution level by level, Newton
//! polishing against the original system.

use std::cmp::Ordering;

use log::debug;
use num_integer::Integer;

use super::sturm::{isolate_uni, UniPoly};
use super::{buchberger_with_limits, fglm, fglm_subring, BuchbergerStats, GroebnerBasis, GroebnerLimits};
use super::{IsolatingInterval, RootDomain};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, solve_linear};
use crate::numkernel::{from_f64, to_f64, Rational};
use crate::polyalg::{ExponentVector, MonomialOrder, OrderKind, Polynomial};

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSolution {
    pub theta: Vec<f64>,
    /// Isolating intervals for the last coordinate, from the exact eliminant.
    pub certificates: Vec<IsolatingInterval>,
    /// `max_i |f_i(θ)|` over the input system, in floating point.
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<PositiveSolution>,
    pub basis_size: usize,
    pub eliminant_degree: usize,
    /// Whether the coordinate hyperplanes had to be saturated away.
    pub saturated: bool,
    /// Per-variable exponent gcd used to compress the system.
    pub compression: Vec<i32>,
    pub stats: BuchbergerStats,
}

/// Configurable front end for [`solve_positive`].
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSolver {
    pub tol: f64,
    pub limits: GroebnerLimits,
    pub newton_iterations: usize,
    /// Relative tolerance used to accept a back-substituted candidate against
    /// the remaining basis elements.
    pub filter_tol: f64,
}

impl PositiveSolver {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            limits: GroebnerLimits::default(),
            newton_iterations: 60,
            filter_tol: 1e-6,
        }
    }

    pub fn solve(&self, system: &[Polynomial<Rational>]) -> Result<SolveReport> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        let Some(first) = system.first() else {
            return Err(Error::Dimension("no equations".into()));
        };
        let d = first.nvars();
        if d == 0 || system.iter().any(|p| p.nvars() != d) {
            return Err(Error::InvalidArgument(
                "system polynomials must share a positive number of indeterminates".into(),
            ));
        }
        let nonzero: Vec<_> = system.iter().filter(|p| !p.is_zero()).collect();
        if nonzero.is_empty() {
            return Err(Error::Dimension("every equation is identically zero".into()));
        }
        let mut cleared = Vec::with_capacity(nonzero.len());
        for p in &nonzero {
            cleared.push(p.clear_to_orthant()?.0);
        }
        // a monomial never vanishes on the open orthant
        if cleared.iter().any(|p| p.is_constant()) {
            return Err(Error::NoPositiveSolution);
        }
        let compression: Vec<i32> = (0..d)
            .map(|k| {
                cleared
                    .iter()
                    .flat_map(|p| p.terms().map(move |(e, _)| e.get(k)))
                    .fold(0i32, |g, x| g.gcd(&x))
            })
            .collect();
        if let Some(k) = compression.iter().position(|&g| g == 0) {
            return Err(Error::Dimension(format!(
                "variable x{} does not occur in the system",
                k + 1
            )));
        }
        let compressed = cleared
            .iter()
            .map(|p| p.compress_exponents(&compression))
            .collect::<Result<Vec<_>>>()?;

        let grevlex = buchberger_with_limits(&compressed, &MonomialOrder::grevlex(d), &self.limits)?;
        let mut stats = grevlex.stats;
        let mut saturated = false;
        if grevlex.is_unit_ideal() {
            return Err(Error::NoPositiveSolution);
        }
        let gb = if is_zero_dimensional(&grevlex) {
            fglm(&grevlex, &MonomialOrder::lex(d))?
        } else {
            debug!("basis not zero-dimensional, saturating by the coordinate product");
            saturated = true;
            saturate(&compressed, d, &self.limits, &mut stats)?
        };
        if gb.is_unit_ideal() {
            return Err(Error::NoPositiveSolution);
        }

        let eliminant = gb
            .generators()
            .iter()
            .find(|g| g.involves_only(&[d - 1]))
            .expect("zero-dimensional lex basis has a univariate eliminant");
        let eliminant_degree = eliminant.degree_in(d - 1) as usize;

        // exact roots of the last variable
        let uni = UniPoly::from_polynomial(eliminant, d - 1)?;
        let roots = isolate_uni(&uni, d, d - 1, RootDomain::PositiveOnly)?;
        let certificates = if compression[d - 1] == 1 {
            roots.clone()
        } else {
            let g = compression[d - 1];
            let up = Polynomial::from_terms(
                d,
                eliminant.terms().map(|(e, c)| {
                    let mut ne = e.as_slice().to_vec();
                    ne[d - 1] *= g;
                    (ExponentVector::new(ne), c.clone())
                }),
            )?;
            isolate_uni(
                &UniPoly::from_polynomial(&up, d - 1)?,
                d,
                d - 1,
                RootDomain::PositiveOnly,
            )?
        };

        let float_basis: Vec<Polynomial<f64>> = gb
            .generators()
            .iter()
            .map(|g| g.map_coefficients(to_f64))
            .collect();
        let mut partial: Vec<(Vec<f64>, usize)> = roots
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut y = vec![0.0; d];
                y[d - 1] = r.approximate();
                (y, i)
            })
            .collect();
        for k in (0..d - 1).rev() {
            let mut next = Vec::new();
            for (y, cert) in &partial {
                for v in self.back_substitute(&gb, &float_basis, k, y)? {
                    let mut y2 = y.clone();
                    y2[k] = v;
                    next.push((y2, *cert));
                }
            }
            partial = next;
        }

        let original = NumericSystem::new(system);
        let compressed_num = NumericSystem::new(&compressed);
        let mut solutions: Vec<PositiveSolution> = Vec::new();
        for (y, cert) in partial {
            let y = compressed_num.polish(y, self.newton_iterations);
            let theta: Vec<f64> = y
                .iter()
                .zip(&compression)
                .map(|(&v, &g)| if g == 1 { v } else { v.powf(1.0 / g as f64) })
                .collect();
            let theta = original.polish(theta, self.newton_iterations);
            if theta.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
                continue;
            }
            let residual_norm = original.residual_norm(&theta);
            if solutions.iter().any(|s| same_point(&s.theta, &theta)) {
                continue;
            }
            solutions.push(PositiveSolution {
                theta,
                certificates: certificates.get(cert).cloned().into_iter().collect(),
                residual_norm,
            });
        }
        solutions.sort_by(|a, b| lex_cmp(&a.theta, &b.theta));
        if let Some(bad) = solutions.iter().find(|s| !(s.residual_norm <= self.tol)) {
            return Err(Error::Convergence {
                iterations: self.newton_iterations,
                residual: bad.residual_norm,
                last: bad.theta.clone(),
            });
        }
        debug!(
            "solve_positive: {} positive solutions, eliminant degree {eliminant_degree}, basis {}",
            solutions.len(),
            gb.len()
        );
        Ok(SolveReport {
            solutions,
            basis_size: gb.len(),
            eliminant_degree,
            saturated,
            compression,
            stats,
        })
    }

    /// Positive values of variable `k` compatible with the basis, given values
    /// for the variables after `k`.
    fn back_substitute(
        &self,
        gb: &GroebnerBasis<Rational>,
        float_basis: &[Polynomial<f64>],
        k: usize,
        y: &[f64],
    ) -> Result<Vec<f64>> {
        let d = y.len();
        let tail: Vec<usize> = (k..d).collect();
        let values: Vec<Option<f64>> = (0..d).map(|j| (j > k).then(|| y[j])).collect();
        let (pivot, _) = gb
            .generators()
            .iter()
            .enumerate()
            .filter(|(_, g)| g.involves_only(&tail))
            .find(|(_, g)| {
                let (lm, _) = g.leading_term(gb.order()).expect("nonzero basis element");
                lm.single_variable() == Some(k)
            })
            .expect("zero-dimensional lex basis has a pure power in every variable");
        let spec = float_basis[pivot].specialize(&values)?;
        let mut coeffs = vec![Rational::from_integer(0.into()); spec.degree_in(k) as usize + 1];
        for (e, c) in spec.terms() {
            coeffs[e.get(k) as usize] = from_f64(*c)?;
        }
        let uni = UniPoly::new(coeffs);
        let mut candidates: Vec<f64> = isolate_uni(&uni, d, k, RootDomain::PositiveOnly)?
            .iter()
            .map(IsolatingInterval::approximate)
            .collect();
        // tangential roots can vanish under rounding; keep critical points where
        // the polynomial is numerically zero
        for c in isolate_uni(&uni.derivative(), d, k, RootDomain::PositiveOnly)? {
            let x = c.approximate();
            if near_zero(&spec, k, y, x, self.filter_tol) {
                candidates.push(x);
            }
        }
        let others: Vec<_> = float_basis
            .iter()
            .enumerate()
            .filter(|&(i, g)| i != pivot && gb.generators()[i].involves_only(&tail) && !g.is_zero())
            .map(|(_, g)| g)
            .collect();
        candidates.retain(|&x| others.iter().all(|g| near_zero(g, k, y, x, self.filter_tol)));
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()));
        Ok(candidates)
    }
}

/// `|g(point)|` small relative to the sum of absolute term values.
fn near_zero(g: &Polynomial<f64>, k: usize, y: &[f64], x: f64, rel: f64) -> bool {
    let mut point = y.to_vec();
    point[k] = x;
    let (mut value, mut scale) = (0.0, 0.0);
    for (e, c) in g.terms() {
        let t = e
            .as_slice()
            .iter()
            .zip(&point)
            .fold(*c, |acc, (&p, &v)| if p == 0 { acc } else { acc * v.powi(p) });
        value += t;
        scale += t.abs();
    }
    value.abs() <= rel * scale.max(f64::MIN_POSITIVE)
}

fn is_zero_dimensional(gb: &GroebnerBasis<Rational>) -> bool {
    let d = gb.nvars();
    (0..d).all(|k| {
        gb.generators().iter().any(|g| {
            g.leading_term(gb.order())
                .is_some_and(|(lm, _)| lm.single_variable() == Some(k))
        })
    })
}

/// Lex basis of `I : (θ_1⋯θ_d)^∞`, through an extra variable `w` ranked first
/// and the generator `w θ_1⋯θ_d - 1`.
fn saturate(
    system: &[Polynomial<Rational>],
    d: usize,
    limits: &GroebnerLimits,
    stats: &mut BuchbergerStats,
) -> Result<GroebnerBasis<Rational>> {
    let mapping: Vec<usize> = (0..d).collect();
    let mut gens: Vec<_> = system.iter().map(|p| p.remap_variables(d + 1, &mapping)).collect();
    let e = vec![1; d + 1];
    gens.push(
        &Polynomial::monomial(ExponentVector::new(e), Rational::from_integer(1.into()))
            - &Polynomial::one(d + 1),
    );
    // w ranked first; with w last the rational coefficients swell badly
    let ranking: Vec<usize> = std::iter::once(d).chain(0..d).collect();
    let grevlex = MonomialOrder::new(OrderKind::GrevLex, ranking)?;
    let big = buchberger_with_limits(&gens, &grevlex, limits)?;
    stats.pairs_reduced += big.stats.pairs_reduced;
    stats.peak_basis = stats.peak_basis.max(big.stats.peak_basis);
    stats.max_degree = stats.max_degree.max(big.stats.max_degree);
    if big.is_unit_ideal() {
        return Err(Error::NoPositiveSolution);
    }
    if !is_zero_dimensional(&big) {
        return Err(Error::Dimension("positive solution set is not finite".into()));
    }
    // w θ_1⋯θ_d = 1 makes the θ-subring quotient embed in the full one, so the
    // lex basis of the saturation is read off without eliminating w
    let sub = fglm_subring(&big, &MonomialOrder::lex(d + 1), &(0..d).collect::<Vec<_>>())?;
    let kept: Vec<Polynomial<Rational>> = sub
        .generators()
        .iter()
        .map(|g| {
            Polynomial::from_terms(
                d,
                g.terms()
                    .map(|(e, c)| (ExponentVector::new(e.as_slice()[..d].to_vec()), c.clone())),
            )
            .expect("dimension d")
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::Dimension("saturated ideal has no generators".into()));
    }
    Ok(GroebnerBasis {
        generators: kept,
        order: MonomialOrder::lex(d),
        nvars: d,
        stats: *stats,
    })
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Float copy of a (Laurent) system with its Jacobian, for Newton polishing.
struct NumericSystem {
    polys: Vec<Polynomial<f64>>,
    jacobian: Vec<Vec<Polynomial<f64>>>,
}

impl NumericSystem {
    fn new(system: &[Polynomial<Rational>]) -> Self {
        let polys: Vec<Polynomial<f64>> = system
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| p.map_coefficients(to_f64))
            .collect();
        let jacobian = polys
            .iter()
            .map(|p| (0..p.nvars()).map(|k| p.derivative(k)).collect())
            .collect();
        Self { polys, jacobian }
    }

    fn eval(p: &Polynomial<f64>, x: &[f64]) -> f64 {
        p.terms()
            .map(|(e, c)| {
                e.as_slice()
                    .iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &v)| if k == 0 { acc } else { acc * v.powi(k) })
            })
            .sum()
    }

    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.polys.iter().map(|p| Self::eval(p, x)).collect()
    }

    fn residual_norm(&self, x: &[f64]) -> f64 {
        self.residuals(x).iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Damped (Gauss-)Newton that never leaves the positive orthant and only
    /// accepts steps that do not increase the residual.
    fn polish(&self, mut x: Vec<f64>, iterations: usize) -> Vec<f64> {
        let n = x.len();
        let mut norm = self.residual_norm(&x);
        for _ in 0..iterations {
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            let r = self.residuals(&x);
            let j: Vec<Vec<f64>> = self
                .jacobian
                .iter()
                .map(|row| row.iter().map(|p| Self::eval(p, &x)).collect())
                .collect();
            let step = if self.polys.len() == n {
                solve_linear(&j, &r).or_else(|| least_squares(&j, &r))
            } else {
                least_squares(&j, &r)
            };
            let Some(step) = step else { break };
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - t * s).collect();
                if cand.iter().all(|&v| v > 0.0 && v.is_finite()) {
                    let cn = self.residual_norm(&cand);
                    if cn <= norm {
                        accepted = Some((cand, cn));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((cand, cn)) = accepted else { break };
            let moved = cand
                .iter()
                .zip(&x)
                .any(|(a, b)| (a - b).abs() > 4.0 * f64::EPSILON * b.abs());
            x = cand;
            let stalled = cn >= norm;
            norm = cn;
            if !moved || stalled {
                break;
            }
        }
        x
    }
}

/// All solutions of `system` with every coordinate strictly positive, sorted
/// lexicographically. Each has `residual_norm <= tol`.
pub fn solve_positive(system: &[Polynomial<Rational>], tol: f64) -> Result<Vec<PositiveSolution>> {
    let report = PositiveSolver::new(tol).solve(system)?;
    if report.solutions.is_empty() {
        return Err(Error::NoPositiveSolution);
    }
    Ok(report.solutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_polynomial;

    fn sys(eqs: &[&str], names: &[&str]) -> Vec<Polynomial<Rational>> {
        eqs.iter().map(|s| parse_polynomial(s, names).unwrap()).collect()
    }

    #[test]
    fn binary_examples() {
        let s = solve_positive(&sys(&["-1/2 + t/2"], &["t"]), 1e-12).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].theta[0] - 1.0).abs() < 1e-14);
        assert_eq!(s[0].certificates.len(), 1);

        let s = solve_positive(&sys(&["-3/4 + t/4"], &["t"]), 1e-12).unwrap();
        assert!((s[0].theta[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn no_real_roots_signal_infeasibility() {
        let err = solve_positive(&sys(&["t^2 + 1"], &["t"]), 1e-12).unwrap_err();
        assert_eq!(err, Error::NoPositiveSolution);
        let err = solve_positive(&sys(&["t + 1"], &["t"]), 1e-12).unwrap_err();
        assert_eq!(err, Error::NoPositiveSolution);
    }

    #[test]
    fn empty_system_is_a_dimension_error() {
        assert!(matches!(solve_positive(&[], 1e-9), Err(Error::Dimension(_))));
        let err = solve_positive(&sys(&["x - 1"], &["x", "y"]), 1e-9).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn two_variables_with_several_positive_points() {
        // x y = 2, x + y = 3 -> (1, 2) and (2, 1)
        let s = solve_positive(&sys(&["x*y - 2", "x + y - 3"], &["x", "y"]), 1e-10).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0].theta[0] - 1.0).abs() < 1e-12 && (s[0].theta[1] - 2.0).abs() < 1e-12);
        assert!((s[1].theta[0] - 2.0).abs() < 1e-12 && (s[1].theta[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_and_axis_solutions_discarded() {
        // x^2 = 4, x y = 0 has no positive point; x(x - 1) with y = 1 keeps only x = 1
        let err = solve_positive(&sys(&["x^2 - 4", "x*y"], &["x", "y"]), 1e-10).unwrap_err();
        assert_eq!(err, Error::NoPositiveSolution);
        let s = solve_positive(&sys(&["x^2 - x", "y - 1"], &["x", "y"]), 1e-10).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].theta[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn laurent_and_compressed_exponents() {
        // t^2 + t^-2 = 5/2 -> t^2 in {2, 1/2}
        let s = solve_positive(&sys(&["t^2 + t^-2 - 5/2"], &["t"]), 1e-10).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0].theta[0] - 0.5f64.sqrt()).abs() < 1e-13);
        assert!((s[1].theta[0] - 2f64.sqrt()).abs() < 1e-13);
        assert!(s[1].certificates[0].interval().to_f64_pair().0 <= 2f64.sqrt());
    }

    #[test]
    fn saturation_removes_axis_components() {
        // the line x = 0, y = z lies in the variety; the only positive point is (2, 2, 4)
        let s = solve_positive(
            &sys(
                &["x*y - x + y - z", "x*z - 2*x + 2*y - 2*z", "x^2 - x + y - z"],
                &["x", "y", "z"],
            ),
            1e-10,
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        let expect = [2.0, 2.0, 4.0];
        for (a, b) in s[0].theta.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let report = PositiveSolver::new(1e-10)
            .solve(&sys(
                &["x*y - x + y - z", "x*z - 2*x + 2*y - 2*z", "x^2 - x + y - z"],
                &["x", "y", "z"],
            ))
            .unwrap();
        assert!(report.saturated);
    }

    #[test]
    fn deterministic() {
        let s = sys(&["x^2 + y^2 - 5", "x*y - 2"], &["x", "y"]);
        let a = solve_positive(&s, 1e-10).unwrap();
        let b = solve_positive(&s, 1e-10).unwrap();
        assert_eq!(a, b);
        for p in &a {
            for f in &s {
                let v = f.map_coefficients(to_f64).evaluate(&p.theta).unwrap();
                assert!(v.abs() <= 1e-10);
            }
        }
    }
}
