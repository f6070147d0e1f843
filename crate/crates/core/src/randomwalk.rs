//! Random walks on the aggregate network.
//!
//! A walker hops between treatments with probabilities proportional to the
//! edge weights. For a comparison `a` vs `b` the expected net number of
//! times a walker released at `a` crosses each edge before absorption at
//! `b` equals the corresponding hat-matrix row. Two routes to that value
//! live here: the analytic one (solve the interior-node potential equations
//! and read off currents) and a seeded Monte Carlo ensemble that serves as
//! an independent oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::AggregateNetwork;
use crate::numerics::{solve_linear, Matrix, NumericsError};
use crate::scalar::{lit, Scalar};

/// Hard cap on the length of a single simulated walk.
pub const MAX_WALK_STEPS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("unknown node {label}")]
    UnknownNode { label: String },
    #[error("comparison nodes must differ")]
    DegenerateComparison,
    #[error("no absorbing state set")]
    NoAbsorbingState,
    #[error("walk exceeded {max_steps} steps without absorption")]
    WalkLengthExceeded { max_steps: u64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Row-stochastic hop matrix of the walk, with an optional absorbing node.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    nodes: Vec<String>,
    entries: Matrix<T>,
    absorbing: Option<usize>,
}

impl<T: Scalar> TransitionMatrix<T> {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn entries(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn absorbing(&self) -> Option<usize> {
        self.absorbing
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == label)
    }

    pub fn get(&self, from: usize, to: usize) -> T {
        self.entries.get(from, to)
    }

    /// Largest deviation of a row sum from one.
    pub fn stochasticity_residual(&self) -> T {
        let n = self.nodes.len();
        let mut worst = T::zero();
        for r in 0..n {
            let sum = self
                .entries
                .row(r)
                .iter()
                .fold(T::zero(), |acc, &x| acc + x);
            worst = worst.max((sum - T::one()).abs());
        }
        worst
    }
}

/// Hop probabilities of the aggregate-network walk:
/// `T[c][d] = w_cd / sum_x w_cx` for adjacent nodes, zero elsewhere.
pub fn transition_matrix<T: Scalar>(net: &AggregateNetwork<T>) -> TransitionMatrix<T> {
    let n = net.n_treatments();
    let mut entries = Matrix::zeros(n, n);
    for (&(u, v), &w) in net.edges().iter().zip(net.weights()) {
        entries.set(u, v, w);
        entries.set(v, u, w);
    }
    for c in 0..n {
        let strength = net.node_strength(c);
        for d in 0..n {
            entries.set(c, d, entries.get(c, d) / strength);
        }
    }
    TransitionMatrix {
        nodes: net.treatments().to_vec(),
        entries,
        absorbing: None,
    }
}

/// Turns node `b` into an absorbing state: its row becomes the unit row.
pub fn make_absorbing<T: Scalar>(
    t: &TransitionMatrix<T>,
    b: &str,
) -> Result<TransitionMatrix<T>, WalkError> {
    let bi = t
        .node_index(b)
        .ok_or_else(|| WalkError::UnknownNode { label: b.into() })?;
    let mut out = t.clone();
    for d in 0..out.nodes.len() {
        out.entries
            .set(bi, d, if d == bi { T::one() } else { T::zero() });
    }
    out.absorbing = Some(bi);
    Ok(out)
}

/// Node potentials of the comparison `a` vs `b`: `v_a = 1`, `v_b = 0`, and
/// every interior node harmonic (`v_c = sum_d v_d T_cd`).
///
/// Solved through the reduced `(N-2)`-dimensional system
/// `(I - T_red) v_red = T_{. a}` over the interior nodes.
pub fn dirichlet_potentials<T: Scalar>(
    net: &AggregateNetwork<T>,
    a: &str,
    b: &str,
) -> Result<Vec<T>, WalkError> {
    let ai = net
        .node_index(a)
        .ok_or_else(|| WalkError::UnknownNode { label: a.into() })?;
    let bi = net
        .node_index(b)
        .ok_or_else(|| WalkError::UnknownNode { label: b.into() })?;
    if ai == bi {
        return Err(WalkError::DegenerateComparison);
    }
    let t = transition_matrix(net);
    let n = net.n_treatments();
    let interior: Vec<usize> = (0..n).filter(|&c| c != ai && c != bi).collect();
    let m = interior.len();
    let mut system = Matrix::zeros(m, m);
    let mut rhs = vec![T::zero(); m];
    for (i, &c) in interior.iter().enumerate() {
        for (j, &d) in interior.iter().enumerate() {
            let identity = if i == j { T::one() } else { T::zero() };
            system.set(i, j, identity - t.get(c, d));
        }
        rhs[i] = t.get(c, ai);
    }
    let reduced = if m == 0 {
        Vec::new()
    } else {
        solve_linear(&system, &rhs)?
    };
    let mut potentials = vec![T::zero(); n];
    potentials[ai] = T::one();
    for (i, &c) in interior.iter().enumerate() {
        potentials[c] = reduced[i];
    }
    Ok(potentials)
}

/// Analytic signed edge currents for the comparison `a` vs `b`, one value
/// per network edge in the network's orientation.
///
/// Raw currents `w_cd (v_c - v_d)` are normalized by the total current
/// leaving `a`, which makes the result equal to the hat row of `(a, b)`.
pub fn analytic_currents<T: Scalar>(
    net: &AggregateNetwork<T>,
    a: &str,
    b: &str,
) -> Result<Vec<T>, WalkError> {
    let potentials = dirichlet_potentials(net, a, b)?;
    let ai = net.node_index(a).unwrap();
    let raw: Vec<T> = net
        .edges()
        .iter()
        .zip(net.weights())
        .map(|(&(u, v), &w)| w * (potentials[u] - potentials[v]))
        .collect();
    let total_out_of_a =
        net.edges()
            .iter()
            .zip(&raw)
            .fold(T::zero(), |acc, (&(u, v), &current)| {
                if u == ai {
                    acc + current
                } else if v == ai {
                    acc - current
                } else {
                    acc
                }
            });
    Ok(raw.into_iter().map(|c| c / total_out_of_a).collect())
}

/// Monte Carlo estimate of the expected net crossings per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingEstimate<T> {
    /// Directed edges `(c, d)` the means refer to, as node indices in the
    /// orientation of the originating network.
    pub edges: Vec<(usize, usize)>,
    pub means: Vec<T>,
    pub standard_errors: Vec<T>,
    pub walkers: u64,
    pub seed: u64,
}

impl<T: Scalar> CrossingEstimate<T> {
    /// Mean and standard error for the directed pair `(c, d)`, negating the
    /// mean when the estimate stores the opposite orientation.
    pub fn for_pair(&self, c: usize, d: usize) -> Option<(T, T)> {
        self.edges.iter().position(|&e| e == (c, d)).map_or_else(
            || {
                self.edges
                    .iter()
                    .position(|&e| e == (d, c))
                    .map(|k| (-self.means[k], self.standard_errors[k]))
            },
            |k| Some((self.means[k], self.standard_errors[k])),
        )
    }
}

use crate::scalar::derive_seed;

/// Releases `walkers` independent walkers at `a` and counts signed edge
/// crossings until absorption.
///
/// Each walker runs on its own generator seeded from `(seed, walker index)`,
/// so the result is independent of execution order and reproducible.
pub fn simulate_crossings<T: Scalar>(
    t_abs: &TransitionMatrix<T>,
    a: &str,
    walkers: u64,
    seed: u64,
) -> Result<CrossingEstimate<T>, WalkError> {
    simulate_crossings_capped(t_abs, a, walkers, seed, MAX_WALK_STEPS)
}

pub(crate) fn simulate_crossings_capped<T: Scalar>(
    t_abs: &TransitionMatrix<T>,
    a: &str,
    walkers: u64,
    seed: u64,
    max_steps: u64,
) -> Result<CrossingEstimate<T>, WalkError> {
    assert!(walkers >= 1, "at least one walker required");
    let start = t_abs
        .node_index(a)
        .ok_or_else(|| WalkError::UnknownNode { label: a.into() })?;
    let absorbing = t_abs.absorbing().ok_or(WalkError::NoAbsorbingState)?;
    let n = t_abs.nodes().len();

    // Recover the undirected adjacency, baseline-first orientation.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_of = vec![vec![usize::MAX; n]; n];
    for c in 0..n {
        for d in (c + 1)..n {
            if t_abs.get(c, d) > T::zero() || t_abs.get(d, c) > T::zero() {
                edge_of[c][d] = edges.len();
                edge_of[d][c] = edges.len();
                edges.push((c, d));
            }
        }
    }

    let mut sums = vec![T::zero(); edges.len()];
    let mut sums_sq = vec![T::zero(); edges.len()];
    let mut crossings = vec![0i64; edges.len()];
    for walker in 0..walkers {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, walker));
        crossings.iter_mut().for_each(|c| *c = 0);
        let mut node = start;
        let mut steps = 0u64;
        while node != absorbing {
            if steps >= max_steps {
                return Err(WalkError::WalkLengthExceeded { max_steps });
            }
            steps += 1;
            let u: T = lit(rng.random::<f64>());
            let row = t_abs.entries().row(node);
            let mut cumulative = T::zero();
            let mut next = usize::MAX;
            for (d, &p) in row.iter().enumerate() {
                if p <= T::zero() {
                    continue;
                }
                cumulative = cumulative + p;
                next = d;
                if u < cumulative {
                    break;
                }
            }
            debug_assert!(next != usize::MAX, "row without transitions");
            let k = edge_of[node][next];
            crossings[k] += if (node, next) == edges[k] { 1 } else { -1 };
            node = next;
        }
        for (k, &count) in crossings.iter().enumerate() {
            let x = lit::<T>(count as f64);
            sums[k] = sums[k] + x;
            sums_sq[k] = sums_sq[k] + x * x;
        }
    }

    let w = lit::<T>(walkers as f64);
    let means: Vec<T> = sums.iter().map(|&s| s / w).collect();
    let standard_errors: Vec<T> = sums_sq
        .iter()
        .zip(&means)
        .map(|(&sq, &mean)| {
            if walkers < 2 {
                return T::zero();
            }
            // Sample variance via sum of squares, clamped against rounding.
            let variance = ((sq - w * mean * mean) / (w - T::one())).max(T::zero());
            (variance / w).sqrt()
        })
        .collect();
    Ok(CrossingEstimate {
        edges,
        means,
        standard_errors,
        walkers,
        seed,
    })
}
