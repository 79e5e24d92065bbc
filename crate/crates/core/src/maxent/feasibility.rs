//! Is the target vector in the interior of the convex hull of the feature
//! columns? Decided exactly with a small rational simplex.

use num_traits::{One, Signed, Zero};

use super::MaxEntProblem;
use crate::error::{Error, Result};
use crate::numkernel::{format_rational, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Interior,
    Boundary,
    Exterior,
}

/// Reduced row echelon form in place; returns the pivot columns.
pub(crate) fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in c..ncols {
                    let v = &rows[r][k] * &f;
                    rows[i][k] = &rows[i][k] - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Features with the all-ones row appended, as rationals.
pub(crate) fn augmented(features: &[Vec<i64>], m: usize) -> Vec<Vec<Rational>> {
    std::iter::once(vec![int(1); m])
        .chain(features.iter().map(|row| row.iter().map(|&x| int(x)).collect()))
        .collect()
}

/// Rank of the feature matrix with the all-ones row appended.
pub fn feature_rank(features: &[Vec<i64>], m: usize) -> usize {
    rref(&mut augmented(features, m)).len()
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for x in self.rows[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..self.rows.len() {
            if i != row && !self.rows[i][col].is_zero() {
                let f = self.rows[i][col].clone();
                for k in 0..self.rows[i].len() {
                    let v = &self.rows[row][k] * &f;
                    self.rows[i][k] = &self.rows[i][k] - v;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · x` with Bland's rule over columns where `allowed`
    /// holds. Returns the optimum, or `None` if unbounded.
    fn maximize(&mut self, cost: &[Rational], allowed: impl Fn(usize) -> bool) -> Option<Rational> {
        let ncols = cost.len();
        loop {
            let entering = (0..ncols).filter(|&j| allowed(j)).find(|&j| {
                let mut rc = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    rc -= &cost[self.basis[i]] * &row[j];
                }
                rc.is_positive()
            });
            let Some(col) = entering else {
                return Some(
                    self.rows
                        .iter()
                        .enumerate()
                        .map(|(i, row)| &cost[self.basis[i]] * &row[ncols])
                        .sum(),
                );
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col].is_positive() {
                    let ratio = &row[ncols] / &row[col];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let (_, row, _) = best?;
            self.pivot(row, col);
        }
    }
}

/// Classifies `targets` against the hull of the feature columns. Assumes the
/// augmented feature matrix has full row rank, so the hull has nonempty interior.
pub fn classify_target(features: &[Vec<i64>], targets: &[Rational]) -> Feasibility {
    let m = features.first().map_or(0, Vec::len);
    let a = augmented(features, m);
    let rhs: Vec<Rational> = std::iter::once(int(1)).chain(targets.iter().cloned()).collect();
    let r = a.len();
    // variables: μ_0..μ_{m-1}, s, artificials a_0..a_{r-1}
    // constraint: A μ + s (A 1) + a = b, sign-normalised so b >= 0
    let s_col = m;
    let ncols = m + 1 + r;
    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = vec![Rational::zero(); ncols + 1];
        row[..m].clone_from_slice(&a[i]);
        row[s_col] = a[i].iter().sum();
        row[m + 1 + i] = Rational::one();
        row[ncols] = rhs[i].clone();
        if rhs[i].is_negative() {
            for (k, x) in row.iter_mut().enumerate() {
                if k != m + 1 + i {
                    *x = -x.clone();
                }
            }
        }
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        basis: (m + 1..ncols).collect(),
    };
    let artificial = |j: usize| j > m;
    let phase1: Vec<Rational> = (0..ncols)
        .map(|j| if artificial(j) { -Rational::one() } else { Rational::zero() })
        .collect();
    let best = tab.maximize(&phase1, |_| true).expect("phase one is bounded");
    if best.is_negative() {
        return Feasibility::Exterior;
    }
    for i in 0..r {
        if artificial(tab.basis[i]) {
            if let Some(col) = (0..=m).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, col);
            }
        }
    }
    let mut phase2 = vec![Rational::zero(); ncols];
    phase2[s_col] = Rational::one();
    let s = tab
        .maximize(&phase2, |j| !artificial(j))
        .expect("s is bounded by 1/m");
    if s.is_positive() {
        Feasibility::Interior
    } else {
        Feasibility::Boundary
    }
}

/// Errors unless the targets lie strictly inside the hull of the feature
/// columns and the features are affinely independent of the constant.
pub fn check_feasibility(problem: &MaxEntProblem) -> Result<()> {
    let d = problem.d();
    if d == 0 {
        return Ok(());
    }
    let targets = problem.effective_targets()?;
    for (i, (row, t)) in problem.features().iter().zip(&targets).enumerate() {
        let lo = int(*row.iter().min().expect("m >= 2"));
        let hi = int(*row.iter().max().expect("m >= 2"));
        if *t < lo || *t > hi {
            return Err(Error::Infeasible(format!(
                "target T{} = {} lies outside [{}, {}]",
                i + 1,
                format_rational(t),
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        if *t == lo || *t == hi {
            return Err(Error::Boundary(format!(
                "target T{} = {} sits on the end of the feature range [{}, {}]; \
                 the maximizer has zero probabilities and no positive parameters",
                i + 1,
                format_rational(t),
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
    }
    let rank = feature_rank(problem.features(), problem.m());
    if rank < d + 1 {
        return Err(Error::Conditioning(format!(
            "features together with the constant have rank {rank} < {}; parameters are not identifiable",
            d + 1
        )));
    }
    match classify_target(problem.features(), &targets) {
        Feasibility::Interior => Ok(()),
        Feasibility::Boundary => Err(Error::Boundary(
            "target lies on a face of the convex hull of the feature columns".into(),
        )),
        Feasibility::Exterior => Err(Error::Infeasible(
            "target lies outside the convex hull of the feature columns".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ratio;

    fn square() -> Vec<Vec<i64>> {
        vec![vec![0, 1, 0, 1], vec![0, 0, 1, 1]]
    }

    #[test]
    fn classify_square() {
        let f = square();
        assert_eq!(classify_target(&f, &[ratio(1, 2), ratio(1, 2)]), Feasibility::Interior);
        assert_eq!(classify_target(&f, &[ratio(1, 2), int(0)]), Feasibility::Boundary);
        assert_eq!(classify_target(&f, &[int(1), int(1)]), Feasibility::Boundary);
        assert_eq!(classify_target(&f, &[ratio(3, 2), ratio(1, 2)]), Feasibility::Exterior);
        assert_eq!(classify_target(&f, &[int(-1), ratio(1, 2)]), Feasibility::Exterior);
    }

    #[test]
    fn classify_triangle_diagonal() {
        // hull of (0,0), (2,0), (0,2): (1,1) is on the hypotenuse, inside each range
        let f = vec![vec![0, 2, 0], vec![0, 0, 2]];
        assert_eq!(classify_target(&f, &[int(1), int(1)]), Feasibility::Boundary);
        assert_eq!(classify_target(&f, &[ratio(1, 2), ratio(1, 2)]), Feasibility::Interior);
        assert_eq!(classify_target(&f, &[ratio(3, 2), ratio(3, 2)]), Feasibility::Exterior);
    }

    #[test]
    fn check_reports_named_errors() {
        let p = |t: Vec<Rational>| MaxEntProblem::with_targets(4, square(), t).unwrap();
        assert!(check_feasibility(&p(vec![ratio(1, 3), ratio(2, 3)])).is_ok());
        assert!(matches!(check_feasibility(&p(vec![ratio(3, 2), ratio(1, 2)])), Err(Error::Infeasible(_))));
        assert!(matches!(check_feasibility(&p(vec![int(0), ratio(1, 2)])), Err(Error::Boundary(_))));
        let tri = MaxEntProblem::with_targets(3, vec![vec![0, 2, 0], vec![0, 0, 2]], vec![int(1), int(1)]).unwrap();
        assert!(matches!(check_feasibility(&tri), Err(Error::Boundary(_))));
        let dependent = MaxEntProblem::with_targets(
            3,
            vec![vec![0, 1, 2], vec![1, 2, 3]],
            vec![int(1), int(2)],
        )
        .unwrap();
        assert!(matches!(check_feasibility(&dependent), Err(Error::Conditioning(_))));
    }

    #[test]
    fn rank_of_die() {
        assert_eq!(feature_rank(&[(1..=6).collect()], 6), 2);
        assert_eq!(feature_rank(&[vec![3, 3, 3]], 3), 1);
    }
}
