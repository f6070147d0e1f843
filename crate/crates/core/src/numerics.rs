//! Minimal dense linear algebra: row-major matrices, a partial-pivoting
//! solver and symmetric pseudo-inverses.
//!
//! The networks handled by this crate have tens of nodes, so everything here
//! is written for clarity and robustness rather than speed. No sparse
//! storage, no iterative solvers.

use thiserror::Error;

use crate::scalar::{lit, Scalar};

/// Relative pivot threshold below which a linear solve is declared singular.
pub const PIVOT_TOL: f64 = 1e-12;
/// Relative eigenvalue cutoff for the symmetric pseudo-inverse.
pub const EIGENVALUE_CUTOFF: f64 = 1e-10;
/// Relative asymmetry tolerated by [`pinv_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular matrix: pivot below relative threshold at column {column}")]
    SingularMatrix { column: usize },
    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
    #[error("graph is disconnected: Laplacian shift is singular")]
    Disconnected,
}

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Builds a matrix from row-major data, rejecting NaN and infinities.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, NumericsError> {
        assert_eq!(rows * cols, data.len(), "shape does not match data length");
        for (i, x) in data.iter().enumerate() {
            if !x.is_finite() {
                return Err(NumericsError::NonFiniteEntry {
                    row: i / cols,
                    col: i % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, NumericsError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_vec(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == T::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.set(r, c, out.get(r, c) + a * other.get(k, c));
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
    }

    /// Largest absolute difference to the transpose.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with [`NumericsError::SingularMatrix`] when the best available pivot
/// falls below `PIVOT_TOL` relative to the largest entry of `A`.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, NumericsError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "matrix must be square");
    if b.len() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let solutions = solve_many(a, &[b.to_vec()])?;
    Ok(solutions.into_iter().next().unwrap())
}

/// Solves `A x = b` for several right-hand sides with one factorization.
pub fn solve_many<T: Scalar>(a: &Matrix<T>, rhs: &[Vec<T>]) -> Result<Vec<Vec<T>>, NumericsError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "matrix must be square");
    let m = rhs.len();
    // Augmented working copy: n x (n + m).
    let width = n + m;
    let mut w = vec![T::zero(); n * width];
    for r in 0..n {
        w[r * width..r * width + n].copy_from_slice(a.row(r));
        for (j, b) in rhs.iter().enumerate() {
            assert_eq!(b.len(), n, "right-hand side length must match");
            w[r * width + n + j] = b[r];
        }
    }
    let pivot_floor = lit::<T>(PIVOT_TOL) * T::one().max(a.max_abs());
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                w[i * width + col]
                    .abs()
                    .partial_cmp(&w[j * width + col].abs())
                    .unwrap()
            })
            .unwrap();
        if w[pivot_row * width + col].abs() <= pivot_floor {
            return Err(NumericsError::SingularMatrix { column: col });
        }
        if pivot_row != col {
            for j in 0..width {
                w.swap(col * width + j, pivot_row * width + j);
            }
        }
        let pivot = w[col * width + col];
        for r in (col + 1)..n {
            let factor = w[r * width + col] / pivot;
            if factor == T::zero() {
                continue;
            }
            for j in col..width {
                let delta = factor * w[col * width + j];
                w[r * width + j] = w[r * width + j] - delta;
            }
        }
    }
    // Back substitution for each right-hand side.
    let mut out = vec![vec![T::zero(); n]; m];
    for j in 0..m {
        for r in (0..n).rev() {
            let mut acc = w[r * width + n + j];
            for c in (r + 1)..n {
                acc = acc - w[r * width + c] * out[j][c];
            }
            out[j][r] = acc / w[r * width + r];
        }
    }
    Ok(out)
}

fn invert<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, NumericsError> {
    let n = a.rows();
    let unit_columns: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let cols = solve_many(a, &unit_columns)?;
    let mut inv = Matrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            inv.set(i, j, x);
        }
    }
    Ok(inv)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
fn jacobi_eigh<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = T::one().max(m.max_abs());
    let stop = T::epsilon() * scale;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m.get(p, q) * m.get(p, q);
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (lit::<T>(2.0) * apq);
                // Stable rotation: t = sgn(theta) / (|theta| + sqrt(theta^2 + 1)).
                let t = {
                    let abs_t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -abs_t
                    } else {
                        abs_t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let values = (0..n).map(|i| m.get(i, i)).collect();
    (values, v)
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix.
///
/// Eigenvalues with magnitude below `EIGENVALUE_CUTOFF * max|lambda|` are
/// treated as zero. Rejects input whose asymmetry exceeds `SYMMETRY_TOL`
/// relative to the largest entry.
pub fn pinv_symmetric<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, NumericsError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "matrix must be square");
    let asym = a.max_asymmetry();
    let tol = lit::<T>(SYMMETRY_TOL) * T::one().max(a.max_abs());
    if asym > tol {
        return Err(NumericsError::NotSymmetric {
            max_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    // Work on the symmetrized matrix so rotations stay exact.
    let mut sym = a.clone();
    for r in 0..n {
        for c in (r + 1)..n {
            let mean = (a.get(r, c) + a.get(c, r)) / lit::<T>(2.0);
            sym.set(r, c, mean);
            sym.set(c, r, mean);
        }
    }
    let (values, vectors) = jacobi_eigh(&sym);
    let max_mag = values.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let cutoff = lit::<T>(EIGENVALUE_CUTOFF) * max_mag;
    let mut out = Matrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda.abs() <= cutoff || lambda == T::zero() {
            continue;
        }
        let inv_lambda = T::one() / lambda;
        for r in 0..n {
            let vr = vectors.get(r, k);
            if vr == T::zero() {
                continue;
            }
            for c in 0..n {
                out.set(r, c, out.get(r, c) + inv_lambda * vr * vectors.get(c, k));
            }
        }
    }
    Ok(out)
}

/// Pseudo-inverse of the Laplacian of a connected graph.
///
/// Uses the rank-one correction `(L + J/N)^-1 - J/N`, exact whenever `L` has
/// rank `N - 1`; a singular shift therefore signals a disconnected graph.
pub fn laplacian_pinv<T: Scalar>(l: &Matrix<T>) -> Result<Matrix<T>, NumericsError> {
    let n = l.rows();
    assert_eq!(l.cols(), n, "Laplacian must be square");
    let asym = l.max_asymmetry();
    let tol = lit::<T>(SYMMETRY_TOL) * T::one().max(l.max_abs());
    if asym > tol {
        return Err(NumericsError::NotSymmetric {
            max_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    let ninv = T::one() / lit::<T>(n as f64);
    let mut shifted = l.clone();
    for r in 0..n {
        for c in 0..n {
            shifted.set(r, c, shifted.get(r, c) + ninv);
        }
    }
    let inv = invert(&shifted).map_err(|e| match e {
        NumericsError::SingularMatrix { .. } => NumericsError::Disconnected,
        other => other,
    })?;
    let mut out = inv;
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, out.get(r, c) - ninv);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn max_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        let mut worst = 0.0f64;
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                worst = worst.max((a.get(r, c) - b.get(r, c)).abs());
            }
        }
        worst
    }

    fn check_moore_penrose(a: &Matrix<f64>, pinv: &Matrix<f64>, tol: f64) {
        let apa = a.matmul(pinv).matmul(a);
        let pap = pinv.matmul(a).matmul(pinv);
        assert!(
            max_diff(&apa, a) <= tol,
            "A A+ A != A ({})",
            max_diff(&apa, a)
        );
        assert!(max_diff(&pap, pinv) <= tol, "A+ A A+ != A+");
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::<f64>::identity(3);
        let x = solve_linear(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn solve_diagonal() {
        let a = Matrix::diagonal(&[2.0, 4.0]);
        let x = solve_linear(&a, &[2.0, 2.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.5]);
    }

    #[test]
    fn solve_two_by_two() {
        let a = mat(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let b = [3.0, 5.0];
        let x = solve_linear(&a, &b).unwrap();
        // Substitute back: the residual bound is the contract.
        let ax = a.matvec(&x);
        for (got, want) in ax.iter().zip(&b) {
            assert!((got - want).abs() <= 1e-9 * (1.0 + 5.0));
        }
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn solve_rejects_singular() {
        let a = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            solve_linear(&a, &[1.0, 2.0]),
            Err(NumericsError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn solve_rejects_bad_length() {
        let a = Matrix::<f64>::identity(2);
        assert!(matches!(
            solve_linear(&a, &[1.0]),
            Err(NumericsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn residual_bound_on_random_well_conditioned_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5ee1);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let mut a = Matrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    a.set(r, c, rng.random_range(-1.0..1.0));
                }
                // Diagonal dominance keeps the system well conditioned.
                a.set(r, r, a.get(r, r) + n as f64 + 1.0);
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let x = solve_linear(&a, &b).unwrap();
            let ax = a.matvec(&x);
            let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let resid = ax
                .iter()
                .zip(&b)
                .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            assert!(resid <= 1e-9 * (1.0 + bmax), "residual {resid} too large");
        }
    }

    #[test]
    fn pinv_diagonal() {
        let a = Matrix::diagonal(&[2.0, 0.0]);
        let p = pinv_symmetric(&a).unwrap();
        assert!(max_diff(&p, &Matrix::diagonal(&[0.5, 0.0])) < 1e-14);
    }

    #[test]
    fn pinv_zero_matrix() {
        let a = Matrix::<f64>::zeros(2, 2);
        let p = pinv_symmetric(&a).unwrap();
        assert!(max_diff(&p, &Matrix::zeros(2, 2)) == 0.0);
    }

    #[test]
    fn pinv_two_node_laplacian() {
        let a = mat(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let p = pinv_symmetric(&a).unwrap();
        let expected = mat(&[&[0.25, -0.25], &[-0.25, 0.25]]);
        assert!(max_diff(&p, &expected) < 1e-12);
        check_moore_penrose(&a, &p, 1e-8);
    }

    #[test]
    fn pinv_rejects_asymmetric() {
        let a = mat(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            pinv_symmetric(&a),
            Err(NumericsError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn laplacian_pinv_two_node() {
        let l = mat(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let p = laplacian_pinv(&l).unwrap();
        let expected = mat(&[&[0.25, -0.25], &[-0.25, 0.25]]);
        assert!(max_diff(&p, &expected) < 1e-12);
    }

    #[test]
    fn laplacian_pinv_triangle_rows_sum_to_zero() {
        let l = mat(&[&[2.0, -1.0, -1.0], &[-1.0, 2.0, -1.0], &[-1.0, -1.0, 2.0]]);
        let p = laplacian_pinv(&l).unwrap();
        for r in 0..3 {
            let s: f64 = p.row(r).iter().sum();
            assert!(s.abs() < 1e-12, "row {r} sums to {s}");
        }
    }

    #[test]
    fn laplacian_pinv_rejects_disconnected() {
        // Two components: {0,1} and {2,3}.
        let l = mat(&[
            &[1.0, -1.0, 0.0, 0.0],
            &[-1.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, -1.0],
            &[0.0, 0.0, -1.0, 1.0],
        ]);
        assert!(matches!(
            laplacian_pinv(&l),
            Err(NumericsError::Disconnected)
        ));
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert!(matches!(
            Matrix::from_vec(1, 2, vec![1.0, f64::NAN]),
            Err(NumericsError::NonFiniteEntry { row: 0, col: 1 })
        ));
        assert!(matches!(
            Matrix::from_vec(2, 1, vec![1.0, f64::INFINITY]),
            Err(NumericsError::NonFiniteEntry { row: 1, col: 0 })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Random PSD matrix with eigenvalues either exactly zero or in
        /// [0.1, 10], so the rank decision is unambiguous.
        fn random_psd(n: usize, seed: u64) -> Matrix<f64> {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut q = Matrix::<f64>::identity(n);
            for _ in 0..(3 * n) {
                let p = rng.random_range(0..n);
                let r = rng.random_range(0..n);
                if p == r {
                    continue;
                }
                let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let (s, c) = angle.sin_cos();
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
            let eigenvalues: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_range(0.0..1.0) < 0.3 {
                        0.0
                    } else {
                        rng.random_range(0.1..10.0)
                    }
                })
                .collect();
            let mut a = Matrix::zeros(n, n);
            for k in 0..n {
                for r in 0..n {
                    for c in 0..n {
                        a.set(
                            r,
                            c,
                            a.get(r, c) + eigenvalues[k] * q.get(r, k) * q.get(c, k),
                        );
                    }
                }
            }
            a
        }

        proptest! {
            #[test]
            fn moore_penrose_identities_hold(n in 1usize..=8, seed in 0u64..500) {
                let a = random_psd(n, seed);
                let p = pinv_symmetric(&a).unwrap();
                check_moore_penrose(&a, &p, 1e-8);
            }

            #[test]
            fn laplacian_routes_agree(n in 2usize..=8, seed in 0u64..500) {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                // Random connected graph: path backbone plus random extras.
                let mut w = Matrix::zeros(n, n);
                for i in 1..n {
                    let j = rng.random_range(0..i);
                    let weight = rng.random_range(0.1..10.0);
                    w.set(i, j, weight);
                    w.set(j, i, weight);
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        if w.get(i, j) == 0.0 && rng.random_range(0.0..1.0) < 0.3 {
                            let weight = rng.random_range(0.1..10.0);
                            w.set(i, j, weight);
                            w.set(j, i, weight);
                        }
                    }
                }
                let mut l = Matrix::zeros(n, n);
                for i in 0..n {
                    let degree: f64 = (0..n).map(|j| w.get(i, j)).sum();
                    l.set(i, i, degree);
                    for j in 0..n {
                        if i != j {
                            l.set(i, j, -w.get(i, j));
                        }
                    }
                }
                let via_shift = laplacian_pinv(&l).unwrap();
                let via_eigen = pinv_symmetric(&l).unwrap();
                prop_assert!(max_diff(&via_shift, &via_eigen) <= 1e-8);
            }
        }
    }
}
