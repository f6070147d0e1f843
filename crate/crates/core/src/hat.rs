//! The aggregate-model Laplacian, hat matrix and network estimates.

use crate::model::AggregateNetwork;
use crate::numerics::{laplacian_pinv, Matrix, NumericsError};
use crate::scalar::{lit, Scalar};

/// K x K coefficients mapping direct to network estimates.
///
/// Row and column `k` correspond to edge `k` of the originating network, in
/// the network's own ordering and orientation: the entry at `(ab, cd)` is
/// the coefficient of the direct estimate `cd` in the network estimate `ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct HatMatrix<T> {
    treatments: Vec<String>,
    edges: Vec<(usize, usize)>,
    entries: Matrix<T>,
}

impl<T: Scalar> HatMatrix<T> {
    pub fn treatments(&self) -> &[String] {
        &self.treatments
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn entries(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn row(&self, k: usize) -> &[T] {
        self.entries.row(k)
    }

    pub fn edge_label(&self, k: usize) -> String {
        let (u, v) = self.edges[k];
        format!("{}-{}", self.treatments[u], self.treatments[v])
    }

    /// Hat row for the comparison of nodes `a` and `b` (indices).
    ///
    /// When the stored edge is oriented `(b, a)` the row is negated so that
    /// the returned coefficients always describe the walk from `a` to `b`.
    pub fn comparison_row(&self, a: usize, b: usize) -> Option<Vec<T>> {
        self.edges
            .iter()
            .position(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a))
            .map(|k| {
                let flip = self.edges[k] != (a, b);
                self.row(k)
                    .iter()
                    .map(|&h| if flip { -h } else { h })
                    .collect()
            })
    }

    /// Checks the projection property `H H = H` up to `tol`; diagnostics for
    /// tests and the `check` pipeline.
    pub fn idempotence_residual(&self) -> T {
        let hh = self.entries.matmul(&self.entries);
        let mut worst = T::zero();
        for r in 0..self.entries.rows() {
            for c in 0..self.entries.cols() {
                worst = worst.max((hh.get(r, c) - self.entries.get(r, c)).abs());
            }
        }
        worst
    }
}

/// Weighted graph Laplacian `L = B^T W B` of the aggregate network.
pub fn laplacian<T: Scalar>(net: &AggregateNetwork<T>) -> Matrix<T> {
    let n = net.n_treatments();
    let mut l = Matrix::zeros(n, n);
    for (&(u, v), &w) in net.edges().iter().zip(net.weights()) {
        l.set(u, u, l.get(u, u) + w);
        l.set(v, v, l.get(v, v) + w);
        l.set(u, v, l.get(u, v) - w);
        l.set(v, u, l.get(v, u) - w);
    }
    l
}

/// Hat matrix of the aggregate model: `H = B L+ B^T W`.
pub fn hat_matrix<T: Scalar>(net: &AggregateNetwork<T>) -> Result<HatMatrix<T>, NumericsError> {
    let incidence = net.incidence();
    let pinv = laplacian_pinv(&laplacian(net))?;
    // B L+ B^T, then scale columns by the edge weights.
    let mut entries = incidence.matmul(&pinv).matmul(&incidence.transpose());
    for r in 0..entries.rows() {
        for c in 0..entries.cols() {
            entries.set(r, c, entries.get(r, c) * net.weights()[c]);
        }
    }
    Ok(HatMatrix {
        treatments: net.treatments().to_vec(),
        edges: net.edges().to_vec(),
        entries,
    })
}

/// Network estimates `theta_net = H theta_dir`.
pub fn network_estimates<T: Scalar>(
    hat: &HatMatrix<T>,
    theta_dir: &[T],
) -> Result<Vec<T>, NumericsError> {
    if theta_dir.len() != hat.n_edges() {
        return Err(NumericsError::DimensionMismatch {
            expected: hat.n_edges(),
            got: theta_dir.len(),
        });
    }
    Ok(hat.entries.matvec(theta_dir))
}

/// Shifts a direct-estimate vector so that treatment `node` performs worse
/// by `delta` against every treatment it is compared to directly.
///
/// Estimates measure "other minus baseline", so edges with `node` as the
/// baseline gain `delta` and edges with `node` on the other end lose it.
pub fn shift_node_worse<T: Scalar>(
    edges: &[(usize, usize)],
    theta_dir: &[T],
    node: usize,
    delta: T,
) -> Vec<T> {
    edges
        .iter()
        .zip(theta_dir)
        .map(|(&(u, v), &theta)| {
            if u == node {
                theta + delta
            } else if v == node {
                theta - delta
            } else {
                theta
            }
        })
        .collect()
}

/// Largest violation of the flow-conservation laws over all hat rows;
/// used by validation paths rather than on every construction.
pub fn conservation_residual<T: Scalar>(hat: &HatMatrix<T>) -> T {
    let mut worst = T::zero();
    for (k, &(a, b)) in hat.edges().iter().enumerate() {
        let row = hat.row(k);
        let n = hat.treatments.len();
        let mut net_out = vec![T::zero(); n];
        for (&(u, v), &h) in hat.edges().iter().zip(row) {
            net_out[u] = net_out[u] + h;
            net_out[v] = net_out[v] - h;
        }
        for (c, &out) in net_out.iter().enumerate() {
            let expected = if c == a {
                T::one()
            } else if c == b {
                -T::one()
            } else {
                T::zero()
            };
            worst = worst.max((out - expected).abs());
        }
    }
    worst
}

/// Diagonal entries must be coefficients in [0, 1].
pub fn diagonal_in_unit_interval<T: Scalar>(hat: &HatMatrix<T>) -> bool {
    let tol = lit::<T>(1e-10);
    (0..hat.n_edges()).all(|k| {
        let h = hat.entries.get(k, k);
        h >= -tol && h <= T::one() + tol
    })
}
