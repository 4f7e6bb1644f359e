//! Numerical kernels: exact rank, Sturm-sequence bisection for symmetric
//! tridiagonal (and bordered tridiagonal) matrices, block eigendecomposition
//! and composite Simpson quadrature.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::operator::GradedOperator;

/// Rank of a rational matrix by fraction-free (Bareiss) elimination over the
/// integers after clearing row denominators.
pub fn rank_exact(rows: &[Vec<Rational64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| BigInt::from(*x.numer()) * BigInt::from(lcm / x.denom()))
                .collect()
        })
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..nrows {
            for j in col + 1..ncols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Numerical rank via singular values above `tol * max(1, σ_max)`.
pub fn rank_float(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let scale = sv.max().max(1.0);
    sv.iter().filter(|&&s| s > tol * scale).count()
}

/// Symmetric tridiagonal matrix `diag[i]` on the diagonal, `off[i]` at
/// positions `(i, i+1)` and `(i+1, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn pivot_floor(&self) -> f64 {
        let scale = self
            .off
            .iter()
            .chain(&self.diag)
            .fold(1.0_f64, |m, x| m.max(x.abs()));
        f64::MIN_POSITIVE.sqrt() * scale
    }

    /// Runs the LDLᵀ recurrence of `T - mu`; calls `visit(i, d_i, l_{i-1})`.
    fn ldl(&self, mu: f64, mut visit: impl FnMut(usize, f64, f64)) {
        let floor = self.pivot_floor();
        let mut d = 0.0;
        for i in 0..self.len() {
            let (next, l) = if i == 0 {
                (self.diag[0] - mu, 0.0)
            } else {
                let l = self.off[i - 1] / d;
                (self.diag[i] - mu - self.off[i - 1] * l, l)
            };
            d = if next.abs() < floor { -floor } else { next };
            visit(i, d, l);
        }
    }

    /// Number of eigenvalues strictly below `mu` (Sylvester inertia).
    pub fn count_below(&self, mu: f64) -> usize {
        let mut count = 0;
        self.ldl(mu, |_, d, _| count += (d < 0.0) as usize);
        count
    }

    /// Eigenvalues below `mu` of the matrix bordered by one extra last row and
    /// column: `[[T, c], [cᵀ, corner]]`.
    pub fn bordered_count_below(&self, border: &[f64], corner: f64, mu: f64) -> usize {
        assert_eq!(border.len(), self.len());
        let mut count = 0;
        let mut y = 0.0;
        let mut quad = 0.0;
        self.ldl(mu, |i, d, l| {
            count += (d < 0.0) as usize;
            y = border[i] - l * y;
            quad += y * y / d;
        });
        count + ((corner - mu - quad) < 0.0) as usize
    }

    /// Interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        (0..self.len()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = i.checked_sub(1).map_or(0.0, |j| self.off[j].abs())
                + self.off.get(i).map_or(0.0, |x| x.abs());
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        })
    }
}

/// All eigenvalues in `[lo, hi)` of a symmetric matrix given its inertia
/// counter `count(mu) = #{λ < mu}`, ascending, by bisection.
pub fn bisect_eigenvalues(count: impl Fn(f64) -> usize, lo: f64, hi: f64) -> Vec<f64> {
    let (first, last) = (count(lo), count(hi));
    (first..last)
        .map(|k| {
            // find x with count(x) <= k < count(x')
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
                    break;
                }
                if count(m) > k {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solves `T x = rhs` for a tridiagonal `T` without pivoting; fine for the
/// positive definite systems used by inverse iteration.
pub fn solve_tridiagonal(t: &SymTridiagonal, rhs: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut c = vec![0.0; n];
    let mut x = rhs.to_vec();
    let mut denom = t.diag[0];
    for i in 0..n {
        if i > 0 {
            denom = t.diag[i] - t.off[i - 1] * c[i - 1];
            x[i] = (x[i] - t.off[i - 1] * x[i - 1]) / denom;
        } else {
            x[0] /= denom;
        }
        if i + 1 < n {
            c[i] = t.off[i] / denom;
        }
    }
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Eigendecomposition of one connected block of a symmetric sparse operator.
#[derive(Debug, Clone)]
pub struct BlockEigen {
    pub indices: Vec<usize>,
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Eigendecomposes each connected block of a symmetric operator independently.
pub fn block_eigen(op: &GradedOperator<f64>, exec: Execution) -> Result<Vec<BlockEigen>> {
    if !op.is_symmetric() {
        return Err(Error::EigenFailure("operator is not symmetric".into()));
    }
    let components = op.components();
    exec.map(&components, |indices| {
        let m = op.restrict(indices);
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::EigenFailure(format!("no convergence on block {indices:?}")))?;
        if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::EigenFailure("non-finite eigenvalue".into()));
        }
        Ok(BlockEigen {
            indices: indices.clone(),
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    })
    .into_iter()
    .collect()
}

/// Spectral norm of a symmetric operator (largest |eigenvalue|).
pub fn symmetric_norm(op: &GradedOperator<f64>, exec: Execution) -> Result<f64> {
    Ok(block_eigen(op, exec)?
        .iter()
        .flat_map(|b| b.values.iter().map(|x| x.abs()))
        .fold(0.0, f64::max))
}

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            weight * f(a + i as f64 * h)
        })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Relative deviation `|a - b| / max(|b|, tiny)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    /// Plain Gaussian elimination over arbitrary-precision rationals.
    fn rank_oracle(rows: &[Vec<Rational64>]) -> usize {
        let mut a: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::new((*x.numer()).into(), (*x.denom()).into()))
                    .collect()
            })
            .collect();
        let ncols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pivot = a[rank].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != rank && !row[col].is_zero() {
                    let f = &row[col] / &pivot[col];
                    for (x, p) in row.iter_mut().zip(&pivot) {
                        *x -= &f * p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn q(v: &[(i64, i64)]) -> Vec<Rational64> {
        v.iter().map(|&(n, d)| Rational64::new(n, d)).collect()
    }

    #[test]
    fn exact_rank_matches_oracle() {
        let m = vec![
            q(&[(1, 2), (1, 3), (0, 1), (2, 1)]),
            q(&[(1, 1), (2, 3), (0, 1), (4, 1)]),
            q(&[(0, 1), (0, 1), (5, 7), (1, 1)]),
        ];
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(rank_oracle(&m), 2);
        assert_eq!(rank_exact(&[]), 0);
    }

    #[test]
    fn sturm_count_matches_dense() {
        let t = SymTridiagonal::new(vec![2.0, -1.0, 0.5, 3.0], vec![1.0, 0.25, -2.0]);
        let eig = SymmetricEigen::new(t.to_dense()).eigenvalues;
        let mut sorted: Vec<f64> = eig.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = t.gershgorin();
        let bisected = bisect_eigenvalues(|mu| t.count_below(mu), lo - 1.0, hi + 1.0);
        for (a, b) in bisected.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn bordered_count_matches_dense() {
        let t = SymTridiagonal::new(vec![0.0, 0.0, 0.0], vec![1.0, 2.0]);
        let border = [0.5, -1.0, 0.25];
        let mut dense = DMatrix::zeros(4, 4);
        dense.view_mut((0, 0), (3, 3)).copy_from(&t.to_dense());
        for i in 0..3 {
            dense[(i, 3)] = border[i];
            dense[(3, i)] = border[i];
        }
        let mut sorted: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        let bisected = bisect_eigenvalues(|mu| t.bordered_count_below(&border, 0.0, mu), -10.0, 10.0);
        assert_eq!(bisected.len(), 4);
        for (a, b) in bisected.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn tridiagonal_solve() {
        let t = SymTridiagonal::new(vec![4.0, 4.0, 4.0], vec![1.0, 1.0]);
        let x = solve_tridiagonal(&t, &[5.0, 6.0, 5.0]);
        for (a, b) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
