//! Evidence flow networks: one hat-matrix row rendered as a directed
//! acyclic graph with non-negative edge flows.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::hat::HatMatrix;
use crate::scalar::{is_positive, lit, Scalar};

/// Hat entries with magnitude below this are structural zeros, not flows.
pub const ZERO_TOL: f64 = 1e-10;
/// Residual bound for the conservation laws.
pub const CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("no hat row for comparison {a}-{b}")]
    RowNotFound { a: String, b: String },
    #[error("unknown node {label}")]
    UnknownNode { label: String },
    #[error("flow present in both directions between {a} and {b}")]
    BothDirections { a: String, b: String },
    #[error("non-positive flow between {a} and {b}")]
    NonPositiveFlow { a: String, b: String },
    #[error("comparison nodes must differ")]
    DegenerateComparison,
}

/// Directed acyclic flow graph for one treatment comparison.
///
/// `flows` maps directed node-index pairs to strictly positive flow values;
/// at most one direction per pair is present. `network_edges` keeps the full
/// undirected edge list of the originating network so downstream consumers
/// can report zero contributions for comparisons the flow never touches.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceFlowNetwork<T> {
    comparison: (usize, usize),
    treatments: Vec<String>,
    network_edges: Vec<(usize, usize)>,
    flows: BTreeMap<(usize, usize), T>,
    isolated: BTreeSet<usize>,
}

impl<T: Scalar> EvidenceFlowNetwork<T> {
    /// Builds a flow network from explicit directed flows, enforcing the
    /// structural invariants (positive flows, one direction per pair).
    pub fn new(
        comparison: (usize, usize),
        treatments: Vec<String>,
        network_edges: Vec<(usize, usize)>,
        flows: BTreeMap<(usize, usize), T>,
    ) -> Result<Self, FlowError> {
        if comparison.0 == comparison.1 {
            return Err(FlowError::DegenerateComparison);
        }
        for (&(c, d), &f) in &flows {
            if !is_positive(f) {
                return Err(FlowError::NonPositiveFlow {
                    a: treatments[c].clone(),
                    b: treatments[d].clone(),
                });
            }
            if flows.contains_key(&(d, c)) && c < d {
                return Err(FlowError::BothDirections {
                    a: treatments[c].clone(),
                    b: treatments[d].clone(),
                });
            }
        }
        let mut isolated: BTreeSet<usize> = (0..treatments.len()).collect();
        for &(c, d) in flows.keys() {
            isolated.remove(&c);
            isolated.remove(&d);
        }
        isolated.remove(&comparison.0);
        isolated.remove(&comparison.1);
        Ok(Self {
            comparison,
            treatments,
            network_edges,
            flows,
            isolated,
        })
    }

    /// Derives the flow network for `(a, b)` from one hat row: positive
    /// entries flow along the stored orientation, negative entries against
    /// it, entries below [`ZERO_TOL`] are dropped.
    pub fn from_hat_row(
        comparison: (usize, usize),
        treatments: Vec<String>,
        network_edges: Vec<(usize, usize)>,
        row: &[T],
    ) -> Result<Self, FlowError> {
        assert_eq!(
            row.len(),
            network_edges.len(),
            "row length must match edges"
        );
        let tol = lit::<T>(ZERO_TOL);
        let mut flows = BTreeMap::new();
        for (&(u, v), &h) in network_edges.iter().zip(row) {
            if h > tol {
                flows.insert((u, v), h);
            } else if h < -tol {
                flows.insert((v, u), -h);
            }
        }
        Self::new(comparison, treatments, network_edges, flows)
    }

    pub fn comparison(&self) -> (usize, usize) {
        self.comparison
    }

    pub fn source(&self) -> usize {
        self.comparison.0
    }

    pub fn sink(&self) -> usize {
        self.comparison.1
    }

    pub fn treatments(&self) -> &[String] {
        &self.treatments
    }

    pub fn network_edges(&self) -> &[(usize, usize)] {
        &self.network_edges
    }

    pub fn flows(&self) -> &BTreeMap<(usize, usize), T> {
        &self.flows
    }

    pub fn isolated(&self) -> &BTreeSet<usize> {
        &self.isolated
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.treatments.iter().position(|t| t == label)
    }

    pub fn flow_between(&self, from: &str, to: &str) -> Option<T> {
        let c = self.node_index(from)?;
        let d = self.node_index(to)?;
        self.flows.get(&(c, d)).copied()
    }

    pub fn outflow(&self, c: usize) -> T {
        self.flows
            .iter()
            .filter(|(&(from, _), _)| from == c)
            .fold(T::zero(), |acc, (_, &f)| acc + f)
    }

    pub fn inflow(&self, c: usize) -> T {
        self.flows
            .iter()
            .filter(|(&(_, to), _)| to == c)
            .fold(T::zero(), |acc, (_, &f)| acc + f)
    }

    /// Kahn-style topological order over nodes touched by flow;
    /// `None` when a cycle is present.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: BTreeMap<usize, usize> = BTreeMap::new();
        let mut successors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(c, d) in self.flows.keys() {
            indegree.entry(c).or_insert(0);
            *indegree.entry(d).or_insert(0) += 1;
            successors.entry(c).or_default().push(d);
        }
        let mut ready: Vec<usize> = indegree
            .iter()
            .filter(|(_, &deg)| deg == 0)
            .map(|(&n, _)| n)
            .collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(node) = ready.pop() {
            order.push(node);
            for &next in successors.get(&node).into_iter().flatten() {
                let deg = indegree.get_mut(&next).unwrap();
                *deg -= 1;
                if *deg == 0 {
                    ready.push(next);
                }
            }
        }
        (order.len() == indegree.len()).then_some(order)
    }
}

/// Builds the evidence flow network for the comparison `a` vs `b` from the
/// hat matrix. `(a, b)` must name an edge of the network in either
/// orientation; the flow always runs from `a` towards `b`.
pub fn evidence_flow<T: Scalar>(
    hat: &HatMatrix<T>,
    a: &str,
    b: &str,
) -> Result<EvidenceFlowNetwork<T>, FlowError> {
    let ai = hat
        .treatments()
        .iter()
        .position(|t| t == a)
        .ok_or_else(|| FlowError::UnknownNode { label: a.into() })?;
    let bi = hat
        .treatments()
        .iter()
        .position(|t| t == b)
        .ok_or_else(|| FlowError::UnknownNode { label: b.into() })?;
    let row = hat
        .comparison_row(ai, bi)
        .ok_or_else(|| FlowError::RowNotFound {
            a: a.into(),
            b: b.into(),
        })?;
    EvidenceFlowNetwork::from_hat_row(
        (ai, bi),
        hat.treatments().to_vec(),
        hat.edges().to_vec(),
        &row,
    )
}

/// Residuals of the flow conservation laws plus the acyclicity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport<T> {
    pub source_residual: T,
    pub sink_residual: T,
    pub max_interior_residual: T,
    pub acyclic: bool,
}

impl<T: Scalar> ConservationReport<T> {
    pub fn passes(&self) -> bool {
        let tol = lit::<T>(CONSERVATION_TOL);
        self.acyclic
            && self.source_residual <= tol
            && self.sink_residual <= tol
            && self.max_interior_residual <= tol
    }

    pub fn max_residual(&self) -> T {
        self.source_residual
            .max(self.sink_residual)
            .max(self.max_interior_residual)
    }
}

/// Checks unit outflow at the source, unit inflow at the sink, balance at
/// every interior node and acyclicity.
pub fn verify_conservation<T: Scalar>(fnet: &EvidenceFlowNetwork<T>) -> ConservationReport<T> {
    let (a, b) = fnet.comparison();
    let source_residual = (fnet.outflow(a) - T::one()).abs().max(fnet.inflow(a));
    let sink_residual = (fnet.inflow(b) - T::one()).abs().max(fnet.outflow(b));
    let mut max_interior_residual = T::zero();
    for c in 0..fnet.treatments().len() {
        if c == a || c == b {
            continue;
        }
        let residual = (fnet.outflow(c) - fnet.inflow(c)).abs();
        max_interior_residual = max_interior_residual.max(residual);
    }
    ConservationReport {
        source_residual,
        sink_residual,
        max_interior_residual,
        acyclic: fnet.topological_order().is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hat::hat_matrix;
    use crate::model::{AggregateEdge, AggregateNetwork};

    fn two_node_network() -> AggregateNetwork<f64> {
        AggregateNetwork::new(
            vec!["1".into(), "2".into()],
            vec![AggregateEdge {
                treat_a: "1".into(),
                treat_b: "2".into(),
                direct_estimate: 0.5,
                weight: 4.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn two_node_flow_is_direct() {
        let hat = hat_matrix(&two_node_network()).unwrap();
        let fnet = evidence_flow(&hat, "1", "2").unwrap();
        assert_eq!(fnet.flows().len(), 1);
        assert!((fnet.flow_between("1", "2").unwrap() - 1.0).abs() < 1e-12);
        assert!(verify_conservation(&fnet).passes());
    }

    #[test]
    fn reversed_comparison_reverses_flow() {
        let hat = hat_matrix(&two_node_network()).unwrap();
        let fnet = evidence_flow(&hat, "2", "1").unwrap();
        assert!((fnet.flow_between("2", "1").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_row_is_reported() {
        // Path 1-2-3 has no direct 1-3 comparison.
        let net = AggregateNetwork::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                AggregateEdge {
                    treat_a: "1".into(),
                    treat_b: "2".into(),
                    direct_estimate: 0.0,
                    weight: 1.0,
                },
                AggregateEdge {
                    treat_a: "2".into(),
                    treat_b: "3".into(),
                    direct_estimate: 0.0,
                    weight: 1.0,
                },
            ],
        )
        .unwrap();
        let hat = hat_matrix(&net).unwrap();
        assert!(matches!(
            evidence_flow(&hat, "1", "3"),
            Err(FlowError::RowNotFound { .. })
        ));
    }

    #[test]
    fn macfadyen_flow_structure() {
        let fnet = crate::fixtures::macfadyen_flow::<f64>();
        let expect = [
            ("1", "2", 0.635),
            ("1", "3", 0.365),
            ("3", "2", 0.251),
            ("3", "4", 0.114),
            ("4", "2", 0.114),
        ];
        assert_eq!(fnet.flows().len(), expect.len());
        for (from, to, value) in expect {
            let got = fnet.flow_between(from, to).unwrap();
            assert!((got - value).abs() < 1e-12, "{from}->{to}: {got}");
        }
        assert!(verify_conservation(&fnet).passes());
    }

    #[test]
    fn depression_flow_13() {
        let net = crate::fixtures::depression::<f64>();
        let hat = hat_matrix(&net).unwrap();
        let fnet = evidence_flow(&hat, "1", "3").unwrap();
        // The direct comparison of 7 and 10 carries no flow, leaving
        // treatment 10 isolated.
        assert!(fnet.flow_between("7", "10").is_none());
        assert!(fnet.flow_between("10", "7").is_none());
        let ten = fnet.node_index("10").unwrap();
        assert!(fnet.isolated().contains(&ten));
        assert!((fnet.flow_between("1", "3").unwrap() - 0.353).abs() < 5e-4);
        assert!((fnet.flow_between("1", "9").unwrap() - 0.380).abs() < 5e-4);
        assert!((fnet.flow_between("9", "3").unwrap() - 0.526).abs() < 5e-4);
        assert!(verify_conservation(&fnet).passes());
    }

    #[test]
    fn hand_built_violation_fails_conservation() {
        let mut flows = std::collections::BTreeMap::new();
        flows.insert((0, 2), 1.0);
        flows.insert((2, 1), 0.5);
        let fnet: EvidenceFlowNetwork<f64> = EvidenceFlowNetwork::new(
            (0, 1),
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 2), (1, 2)],
            flows,
        )
        .unwrap();
        let report = verify_conservation(&fnet);
        assert!(!report.passes());
        assert!((report.max_interior_residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn both_directions_rejected_at_construction() {
        let mut flows = std::collections::BTreeMap::new();
        flows.insert((0, 2), 1.0);
        flows.insert((2, 3), 1.0);
        flows.insert((3, 2), 0.5);
        let err = EvidenceFlowNetwork::new(
            (0, 1),
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![],
            flows,
        )
        .unwrap_err();
        assert!(matches!(err, FlowError::BothDirections { .. }));
    }

    #[test]
    fn source_has_no_inflow_and_sink_no_outflow() {
        let net = crate::fixtures::fictional5::<f64>();
        let hat = hat_matrix(&net).unwrap();
        for &(a, b) in net.edges() {
            let (la, lb) = (net.treatments()[a].clone(), net.treatments()[b].clone());
            let fnet = evidence_flow(&hat, &la, &lb).unwrap();
            assert_eq!(fnet.inflow(a), 0.0, "source {la} has inflow");
            assert_eq!(fnet.outflow(b), 0.0, "sink {lb} has outflow");
            assert!(verify_conservation(&fnet).passes());
        }
    }

    mod properties {
        use super::*;
        use crate::fixtures::random_connected_network;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn every_row_conserves(seed in 0u64..300) {
                let net = random_connected_network(seed, 8);
                let hat = hat_matrix(&net).unwrap();
                for &(a, b) in net.edges() {
                    let la = net.treatments()[a].clone();
                    let lb = net.treatments()[b].clone();
                    let fnet = evidence_flow(&hat, &la, &lb).unwrap();
                    prop_assert!(verify_conservation(&fnet).passes());
                }
            }

            /// Reversing the stored orientation of an edge flips the signed
            /// hat entry but leaves the directed flow identical.
            #[test]
            fn orientation_invariance(seed in 0u64..200) {
                use crate::model::AggregateEdge;
                let net = random_connected_network(seed, 7);
                let k_flip = seed as usize % net.n_edges();
                let edges: Vec<AggregateEdge<f64>> = net
                    .edges()
                    .iter()
                    .enumerate()
                    .map(|(k, &(u, v))| {
                        let (mut a, mut b) = (u, v);
                        let mut estimate = net.direct_estimates()[k];
                        if k == k_flip {
                            std::mem::swap(&mut a, &mut b);
                            estimate = -estimate;
                        }
                        AggregateEdge {
                            treat_a: net.treatments()[a].clone(),
                            treat_b: net.treatments()[b].clone(),
                            direct_estimate: estimate,
                            weight: net.weights()[k],
                        }
                    })
                    .collect();
                let flipped =
                    AggregateNetwork::new(net.treatments().to_vec(), edges).unwrap();
                let hat_a = hat_matrix(&net).unwrap();
                let hat_b = hat_matrix(&flipped).unwrap();
                for &(a, b) in net.edges() {
                    let la = net.treatments()[a].clone();
                    let lb = net.treatments()[b].clone();
                    let fa = evidence_flow(&hat_a, &la, &lb).unwrap();
                    let fb = evidence_flow(&hat_b, &la, &lb).unwrap();
                    for (key, &flow) in fa.flows() {
                        let other = fb.flows().get(key).copied().unwrap_or(0.0);
                        prop_assert!((flow - other).abs() <= 1e-9);
                    }
                    prop_assert_eq!(fa.flows().len(), fb.flows().len());
                }
            }
        }
    }
}
