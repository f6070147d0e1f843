//! Reference networks used by the test suites and shipped as CSV files.
//!
//! `fictional5` is a small five-treatment network with hand-picked integer
//! weights; `depression` is the published aggregate network of a real
//! eleven-treatment NMA of psychological depression treatments (20 edges,
//! weights quoted to 3 decimal places); `macfadyen` is a four-treatment
//! topical-antibiotics comparison known through its published hat row.
//!
//! Direct estimates for `fictional5` and `depression` are synthetic: the
//! published sources report weights only, and every identity checked against
//! these fixtures holds for arbitrary direct estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::EvidenceFlowNetwork;
use crate::model::{AggregateEdge, AggregateNetwork};
use crate::scalar::{lit, Scalar};

fn network_from<T: Scalar>(
    labels: &[&str],
    edges: &[(&str, &str, f64, f64)],
) -> AggregateNetwork<T> {
    AggregateNetwork::new(
        labels.iter().map(|s| s.to_string()).collect(),
        edges
            .iter()
            .map(|&(a, b, estimate, weight)| AggregateEdge {
                treat_a: a.into(),
                treat_b: b.into(),
                direct_estimate: lit(estimate),
                weight: lit(weight),
            })
            .collect(),
    )
    .expect("fixture network is valid")
}

/// Five treatments, seven edges, weights diag(1, 3, 4, 6, 5, 2, 7).
pub fn fictional5<T: Scalar>() -> AggregateNetwork<T> {
    network_from(
        &["1", "2", "3", "4", "5"],
        &[
            ("1", "2", 0.2, 1.0),
            ("1", "3", -0.4, 3.0),
            ("1", "5", 0.1, 4.0),
            ("2", "3", 0.3, 6.0),
            ("2", "4", -0.2, 5.0),
            ("3", "5", 0.5, 2.0),
            ("4", "5", -0.1, 7.0),
        ],
    )
}

/// Transition matrix for the fictional5 walk from node 1 absorbed at
/// node 2, as exact rationals.
pub fn fictional5_transition_absorb2() -> [[f64; 5]; 5] {
    [
        [0.0, 1.0 / 8.0, 3.0 / 8.0, 0.0, 4.0 / 8.0],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [3.0 / 11.0, 6.0 / 11.0, 0.0, 0.0, 2.0 / 11.0],
        [0.0, 5.0 / 12.0, 0.0, 0.0, 7.0 / 12.0],
        [4.0 / 13.0, 0.0, 2.0 / 13.0, 7.0 / 13.0, 0.0],
    ]
}

pub const DEPRESSION_TREATMENTS: [&str; 11] =
    ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"];

/// `(treat_a, treat_b, weight)` for the 20 published aggregate comparisons.
pub const DEPRESSION_WEIGHTS: [(&str, &str, f64); 20] = [
    ("1", "3", 7.605),
    ("1", "6", 4.432),
    ("1", "7", 1.785),
    ("1", "9", 9.410),
    ("1", "11", 2.322),
    ("2", "6", 36.419),
    ("2", "8", 23.576),
    ("2", "11", 10.474),
    ("3", "4", 13.559),
    ("3", "5", 5.118),
    ("3", "6", 5.187),
    ("3", "9", 87.697),
    ("4", "9", 10.533),
    ("5", "9", 16.946),
    ("6", "7", 1.620),
    ("6", "8", 23.759),
    ("6", "9", 29.714),
    ("6", "11", 12.154),
    ("7", "9", 1.713),
    ("7", "10", 5.894),
];

/// Synthetic direct estimates paired with the published weights (one per
/// edge, in the same order).
pub const DEPRESSION_ESTIMATES: [f64; 20] = [
    0.42, -0.17, 0.33, 0.51, -0.08, 0.24, -0.31, 0.12, 0.45, -0.22, 0.18, 0.37, -0.14, 0.29, -0.41,
    0.08, 0.53, -0.26, 0.11, -0.35,
];

/// Eleven-treatment depression network with published aggregate weights.
pub fn depression<T: Scalar>() -> AggregateNetwork<T> {
    let edges: Vec<(&str, &str, f64, f64)> = DEPRESSION_WEIGHTS
        .iter()
        .zip(DEPRESSION_ESTIMATES)
        .map(|(&(a, b, w), estimate)| (a, b, estimate, w))
        .collect();
    network_from(&DEPRESSION_TREATMENTS, &edges)
}

/// Published hat matrix of the depression network (3 decimal places), rows
/// and columns in the edge order of [`DEPRESSION_WEIGHTS`].
pub fn depression_hat_expected() -> [[f64; 20]; 20] {
    [
        [
            0.353, 0.152, 0.044, 0.380, 0.072, 0.022, 0.007, -0.030, -0.036, -0.024, -0.062,
            -0.526, -0.036, -0.024, -0.016, -0.007, 0.178, -0.042, 0.027, 0.000,
        ],
        [
            0.261, 0.236, 0.052, 0.339, 0.111, 0.035, 0.011, -0.046, 0.010, 0.007, 0.098, 0.146,
            0.010, 0.007, -0.040, -0.011, -0.514, -0.065, 0.012, 0.000,
        ],
        [
            0.185, 0.128, 0.381, 0.245, 0.060, 0.019, 0.006, -0.025, 0.0098, 0.007, 0.024, 0.145,
            0.010, 0.007, 0.299, -0.006, -0.086, -0.035, -0.321, 0.000,
        ],
        [
            0.307, 0.160, 0.046, 0.412, 0.075, 0.024, 0.008, -0.031, 0.020, 0.013, -0.022, 0.296,
            0.020, 0.013, -0.016, -0.008, 0.229, -0.044, 0.030, 0.000,
        ],
        [
            0.235, 0.213, 0.046, 0.305, 0.201, -0.250, -0.081, 0.331, 0.009, 0.006, 0.089, 0.132,
            0.009, 0.006, -0.036, 0.081, -0.463, 0.468, 0.011, 0.000,
        ],
        [
            0.005, 0.004, 0.001, 0.006, -0.016, 0.671, 0.218, 0.111, 0.000, 0.000, 0.002, 0.003,
            0.000, 0.000, -0.001, -0.218, -0.009, -0.095, 0.000, 0.000,
        ],
        [
            0.002, 0.002, 0.000, 0.003, -0.008, 0.337, 0.607, 0.056, 0.000, 0.000, 0.001, 0.001,
            0.000, 0.000, 0.000, 0.393, -0.005, -0.048, 0.000, 0.000,
        ],
        [
            -0.022, -0.020, -0.004, -0.028, 0.073, 0.386, 0.125, 0.489, -0.001, -0.001, -0.008,
            -0.012, -0.001, -0.001, 0.003, -0.125, 0.042, 0.438, -0.001, 0.000,
        ],
        [
            -0.020, 0.003, 0.001, 0.014, 0.002, 0.000, 0.000, -0.001, 0.587, 0.016, 0.017, 0.359,
            -0.413, 0.016, 0.000, 0.000, 0.022, -0.001, 0.001, 0.000,
        ],
        [
            -0.035, 0.006, 0.002, 0.024, 0.003, 0.001, 0.000, -0.001, 0.043, 0.260, 0.031, 0.631,
            0.043, -0.740, 0.000, 0.000, 0.039, -0.002, 0.002, 0.000,
        ],
        [
            -0.091, 0.084, 0.008, -0.041, 0.040, 0.012, 0.004, -0.016, 0.045, 0.030, 0.161, 0.673,
            0.045, 0.030, -0.023, -0.004, -0.692, -0.023, -0.015, 0.000,
        ],
        [
            -0.046, 0.007, 0.003, 0.032, 0.003, 0.001, 0.000, -0.001, 0.056, 0.037, 0.039, 0.822,
            0.056, 0.037, 0.000, 0.000, 0.051, -0.002, 0.003, 0.000,
        ],
        [
            -0.026, 0.004, 0.002, 0.018, 0.002, 0.001, 0.000, -0.001, -0.532, 0.021, 0.022, 0.463,
            0.468, 0.021, 0.000, 0.000, 0.029, -0.001, 0.002, 0.000,
        ],
        [
            -0.012, 0.002, 0.001, 0.007, 0.001, 0.000, 0.000, 0.000, 0.013, -0.223, 0.009, 0.191,
            0.013, 0.777, 0.000, 0.000, 0.012, 0.000, 0.001, 0.000,
        ],
        [
            -0.076, -0.108, 0.329, -0.094, -0.051, -0.016, -0.005, 0.021, 0.000, 0.000, -0.075,
            -0.001, 0.000, 0.000, 0.338, 0.005, 0.428, 0.030, -0.333, 0.000,
        ],
        [
            -0.002, -0.002, 0.000, -0.003, 0.008, -0.334, 0.389, -0.055, 0.000, 0.000, -0.001,
            -0.001, 0.000, 0.000, 0.000, 0.611, 0.005, 0.047, 0.000, 0.000,
        ],
        [
            0.046, -0.077, -0.005, 0.072, -0.036, -0.011, -0.004, 0.015, 0.010, 0.007, -0.121,
            0.150, 0.010, 0.007, 0.023, 0.004, 0.743, 0.021, 0.018, 0.000,
        ],
        [
            -0.026, -0.024, -0.005, -0.034, 0.089, -0.285, -0.093, 0.377, -0.001, -0.001, -0.010,
            -0.015, -0.001, -0.001, 0.004, 0.093, 0.052, 0.533, -0.001, 0.000,
        ],
        [
            0.121, 0.031, -0.334, 0.166, 0.015, 0.005, 0.002, -0.006, 0.010, 0.007, -0.046, 0.151,
            0.010, 0.007, -0.315, -0.002, 0.315, -0.009, 0.351, 0.000,
        ],
        [
            0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000,
            0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 1.000,
        ],
    ]
}

/// Published transition matrix for the walk from 1 to 3 on the depression
/// network (3 decimal places), nodes in label order 1..11.
pub fn depression_transition_13_expected() -> [[f64; 11]; 11] {
    [
        [
            0.0, 0.0, 0.298, 0.0, 0.0, 0.173, 0.070, 0.0, 0.368, 0.0, 0.091,
        ],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.517, 0.0, 0.335, 0.0, 0.0, 0.149],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.563, 0.0, 0.0, 0.0, 0.0, 0.0, 0.437, 0.0, 0.0],
        [0.0, 0.0, 0.232, 0.0, 0.0, 0.0, 0.0, 0.0, 0.768, 0.0, 0.0],
        [
            0.039, 0.321, 0.046, 0.0, 0.0, 0.0, 0.014, 0.210, 0.262, 0.0, 0.107,
        ],
        [
            0.162, 0.0, 0.0, 0.0, 0.0, 0.147, 0.0, 0.0, 0.156, 0.535, 0.0,
        ],
        [0.0, 0.498, 0.0, 0.0, 0.0, 0.502, 0.0, 0.0, 0.0, 0.0, 0.0],
        [
            0.060, 0.0, 0.562, 0.068, 0.109, 0.190, 0.011, 0.0, 0.0, 0.0, 0.0,
        ],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.093, 0.420, 0.0, 0.0, 0.0, 0.487, 0.0, 0.0, 0.0, 0.0, 0.0],
    ]
}

/// Published stream transition matrix for the 1-3 evidence flow network of
/// the depression data (3 decimal places), nodes in label order 1..11.
pub fn depression_stream_transition_13_expected() -> [[f64; 11]; 11] {
    [
        [
            0.0, 0.0, 0.353, 0.0, 0.0, 0.152, 0.044, 0.0, 0.380, 0.0, 0.072,
        ],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.755, 0.0, 0.245, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.259, 0.0, 0.0, 0.0, 0.0, 0.0, 0.741, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.371, 0.0, 0.0, 0.629, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.899, 0.061, 0.040, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.415, 0.0, 0.0, 0.0, 0.585, 0.0, 0.0, 0.0, 0.0, 0.0],
    ]
}

/// Published evidence streams for the depression comparison 1-3: path,
/// analytic flow (4 decimal places) and, where the shortest-first legacy
/// run assigned the path, its flow.
pub fn depression_streams_13_expected() -> Vec<(Vec<&'static str>, f64, Option<f64>)> {
    vec![
        (vec!["1", "3"], 0.3526, Some(0.3526)),
        (vec!["1", "6", "3"], 0.0394, Some(0.0622)),
        (vec!["1", "6", "9", "3"], 0.1015, Some(0.0901)),
        (vec!["1", "6", "9", "4", "3"], 0.0069, None),
        (vec!["1", "6", "9", "5", "3"], 0.0045, None),
        (vec!["1", "7", "6", "3"], 0.0042, None),
        (vec!["1", "7", "6", "9", "3"], 0.0108, None),
        (vec!["1", "7", "6", "9", "4", "3"], 0.0007, None),
        (vec!["1", "7", "6", "9", "5", "3"], 0.0005, Some(0.0162)),
        (vec!["1", "7", "9", "3"], 0.0246, Some(0.0274)),
        (vec!["1", "7", "9", "4", "3"], 0.0017, None),
        (vec!["1", "7", "9", "5", "3"], 0.0011, None),
        (vec!["1", "9", "3"], 0.3414, Some(0.3798)),
        (vec!["1", "9", "4", "3"], 0.0231, None),
        (vec!["1", "9", "5", "3"], 0.0153, None),
        (vec!["1", "11", "2", "6", "3"], 0.0058, None),
        (vec!["1", "11", "2", "6", "9", "3"], 0.0150, None),
        (
            vec!["1", "11", "2", "6", "9", "4", "3"],
            0.0010,
            Some(0.0223),
        ),
        (
            vec!["1", "11", "2", "6", "9", "5", "3"],
            0.0007,
            Some(0.0001),
        ),
        (vec!["1", "11", "2", "8", "6", "3"], 0.0019, None),
        (vec!["1", "11", "2", "8", "6", "9", "3"], 0.0049, None),
        (vec!["1", "11", "2", "8", "6", "9", "4", "3"], 0.0003, None),
        (
            vec!["1", "11", "2", "8", "6", "9", "5", "3"],
            0.0002,
            Some(0.0073),
        ),
        (vec!["1", "11", "6", "3"], 0.0109, None),
        (vec!["1", "11", "6", "9", "3"], 0.0280, Some(0.0288)),
        (vec!["1", "11", "6", "9", "4", "3"], 0.0019, Some(0.0132)),
        (vec!["1", "11", "6", "9", "5", "3"], 0.0013, None),
    ]
}

/// Published proportion contributions (percent) for the depression
/// comparison 1-3, edge order as in [`DEPRESSION_WEIGHTS`].
pub const DEPRESSION_CONTRIBUTIONS_13_PERCENT: [f64; 20] = [
    35.3, 5.6, 1.3, 18.4, 1.7, 0.5, 0.1, 0.6, 1.1, 0.7, 2.7, 22.6, 1.1, 0.7, 0.4, 0.1, 5.1, 1.1,
    0.9, 0.0,
];

pub const MACFADYEN_TREATMENTS: [&str; 4] = ["1", "2", "3", "4"];

/// Undirected edges of the macfadyen network, baseline first.
pub const MACFADYEN_EDGES: [(usize, usize); 5] = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];

/// Published hat row for the macfadyen comparison 1-2 over the edges
/// (1-2, 1-3, 2-3, 2-4, 3-4); signs follow the baseline orientation.
pub const MACFADYEN_HAT_ROW: [f64; 5] = [0.635, 0.365, -0.251, -0.114, 0.114];

/// Evidence flow network for the macfadyen comparison 1-2.
pub fn macfadyen_flow<T: Scalar>() -> EvidenceFlowNetwork<T> {
    let row: Vec<T> = MACFADYEN_HAT_ROW.iter().map(|&h| lit(h)).collect();
    EvidenceFlowNetwork::from_hat_row(
        (0, 1),
        MACFADYEN_TREATMENTS.iter().map(|s| s.to_string()).collect(),
        MACFADYEN_EDGES.to_vec(),
        &row,
    )
    .expect("macfadyen fixture is valid")
}

/// Expected macfadyen streams for comparison 1-2 in enumeration order.
pub fn macfadyen_streams_expected() -> Vec<(Vec<&'static str>, f64)> {
    vec![
        (vec!["1", "2"], 0.635),
        (vec!["1", "3", "2"], 0.251),
        (vec!["1", "3", "4", "2"], 0.114),
    ]
}

/// Expected macfadyen proportion contributions for comparison 1-2, edge
/// order as in [`MACFADYEN_EDGES`].
pub const MACFADYEN_CONTRIBUTIONS: [f64; 5] = [0.635, 0.1635, 0.1255, 0.038, 0.038];

/// Deterministic random connected network for the property and acceptance
/// suites: 2..=`max_nodes` nodes, a random spanning tree plus extra edges,
/// log-uniform weights in [0.1, 100] and uniform direct estimates.
pub fn random_connected_network(seed: u64, max_nodes: usize) -> AggregateNetwork<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = rng.random_range(2..=max_nodes.max(2));
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        pairs.push((u, v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if !pairs.contains(&(u, v)) && rng.random_range(0.0..1.0) < 0.35 {
                pairs.push((u, v));
            }
        }
    }
    pairs.sort_unstable();
    let edges = pairs
        .into_iter()
        .map(|(u, v)| AggregateEdge {
            treat_a: labels[u].clone(),
            treat_b: labels[v].clone(),
            direct_estimate: rng.random_range(-2.0..2.0),
            weight: 10f64.powf(rng.random_range(-1.0..2.0)),
        })
        .collect();
    AggregateNetwork::new(labels, edges).expect("generated network is connected")
}
