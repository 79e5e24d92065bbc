//! Small dense linear algebra over `Real`, enough for Newton steps.

use crate::scalar::Real;

/// Solves `a x = b` by Gaussian elimination with partial pivoting. `a` is
/// row-major `n × n`. Returns `None` when a pivot falls below
/// `eps * max|a_ij|`.
pub(crate) fn solve_linear<T: Real>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut rhs = b.to_vec();
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |acc, &v| acc.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return None;
    }
    let tiny = scale * T::epsilon() * T::lit(n as f64);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(m[pivot][col].abs() > tiny) {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = m[col][k];
                m[row][k] = m[row][k] - f * v;
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Least-squares solution of the `rows × n` system `j x = r` via the normal
/// equations, with a tiny Tikhonov shift so rank-deficient Jacobians still
/// produce a step.
pub(crate) fn least_squares<T: Real>(j: &[Vec<T>], r: &[T]) -> Option<Vec<T>> {
    let n = j.first().map_or(0, Vec::len);
    let mut a = vec![vec![T::zero(); n]; n];
    let mut b = vec![T::zero(); n];
    for (row, &ri) in j.iter().zip(r) {
        for p in 0..n {
            b[p] = b[p] + row[p] * ri;
            for q in 0..n {
                a[p][q] = a[p][q] + row[p] * row[q];
            }
        }
    }
    let diag = (0..n).fold(T::zero(), |acc, p| acc.max(a[p][p]));
    for (p, row) in a.iter_mut().enumerate() {
        row[p] = row[p] + diag * T::epsilon() * T::lit(16.0);
    }
    solve_linear(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a: Vec<Vec<f64>> = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_linear(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let a = vec![vec![1.0f32, 2.0], vec![2.0, 4.0]];
        assert!(solve_linear(&a, &[1.0, 2.0]).is_none());
    }

    #[test]
    fn overdetermined_consistent() {
        let j: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let x = least_squares(&j, &[1.0, 2.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
    }
}
