//! Trial data ingestion and the aggregate network.
//!
//! Raw evidence arrives as per-study pairwise contrasts (effect and standard
//! error for each treatment pair compared in a trial). This module groups
//! contrasts into studies, adds heterogeneity to the within-trial variances,
//! reweights multi-arm trials so that an equivalent complete sub-network of
//! two-arm trials reproduces their variance structure, and finally pools the
//! per-edge direct estimates into an [`AggregateNetwork`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::numerics::{pinv_symmetric, Matrix, NumericsError};
use crate::scalar::{is_positive, lit, Scalar};

/// Adjusted weights more negative than this are rejected; anything in
/// `(-NEGATIVE_WEIGHT_TOL, 0)` is treated as a numerically-zero weight.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("study {study}: {arms}-arm study needs {expected} contrasts, found {found}")]
    IncompleteMultiArm {
        study: String,
        arms: usize,
        expected: usize,
        found: usize,
    },
    #[error("study {study}: duplicate contrast {a} vs {b}")]
    DuplicateContrast { study: String, a: String, b: String },
    #[error("heterogeneity tau2 must be non-negative")]
    NegativeTau2,
    #[error("study {study}: non-positive variance for {a} vs {b}")]
    NonPositiveVariance { study: String, a: String, b: String },
    #[error(
        "study {study}: adjustment produced negative weight {weight:e} for {a} vs {b}; \
         the variance structure admits no equivalent two-arm network"
    )]
    NegativeAdjustedWeight {
        study: String,
        a: String,
        b: String,
        weight: f64,
    },
    #[error("network is disconnected; components: {}", format_components(.components))]
    DisconnectedNetwork { components: Vec<Vec<String>> },
    #[error("unknown treatment {label}")]
    UnknownTreatment { label: String },
    #[error("no studies supplied")]
    EmptyInput,
    #[error("invalid edge: {message}")]
    InvalidEdge { message: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn format_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| format!("{{{}}}", c.join(", ")))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// One observed pairwise effect: `effect` is the relative effect of
/// `treat_b` versus `treat_a` on the analysis scale, `se` its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastObservation<T> {
    pub study: String,
    pub treat_a: String,
    pub treat_b: String,
    pub effect: T,
    pub se: T,
}

impl<T: Scalar> ContrastObservation<T> {
    pub fn variance(&self) -> T {
        self.se * self.se
    }
}

/// A trial: `arms` treatments and one contrast per unordered treatment pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Study<T> {
    pub id: String,
    pub arms: Vec<String>,
    pub contrasts: Vec<ContrastObservation<T>>,
}

impl<T: Scalar> Study<T> {
    /// Builds a study from its contrasts, deriving the arm list in
    /// first-appearance order and checking completeness.
    pub fn from_contrasts(
        id: String,
        contrasts: Vec<ContrastObservation<T>>,
    ) -> Result<Self, ModelError> {
        let mut arms: Vec<String> = Vec::new();
        for obs in &contrasts {
            for t in [&obs.treat_a, &obs.treat_b] {
                if !arms.contains(t) {
                    arms.push(t.clone());
                }
            }
        }
        let study = Self {
            id,
            arms,
            contrasts,
        };
        study.validate()?;
        Ok(study)
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    /// Checks the one-contrast-per-pair invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.arms.len();
        let expected = n * (n - 1) / 2;
        let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
        for obs in &self.contrasts {
            let key = ordered_pair(&obs.treat_a, &obs.treat_b);
            if !seen.insert(key) {
                return Err(ModelError::DuplicateContrast {
                    study: self.id.clone(),
                    a: obs.treat_a.clone(),
                    b: obs.treat_b.clone(),
                });
            }
        }
        if self.contrasts.len() != expected {
            return Err(ModelError::IncompleteMultiArm {
                study: self.id.clone(),
                arms: n,
                expected,
                found: self.contrasts.len(),
            });
        }
        Ok(())
    }
}

fn ordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

/// Per-study adjusted weights, symmetric in the pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedStudyWeights<T> {
    pub study: String,
    weights: BTreeMap<(String, String), T>,
}

impl<T: Scalar> AdjustedStudyWeights<T> {
    pub fn weight(&self, a: &str, b: &str) -> Option<T> {
        self.weights.get(&ordered_pair(a, b)).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, T)> {
        self.weights
            .iter()
            .map(|((a, b), &w)| (a.as_str(), b.as_str(), w))
    }

    /// Resistance distances of the complete sub-graph defined by the
    /// adjusted weights (conductances), one entry per treatment pair.
    ///
    /// By construction these reproduce the study's total variances; tests
    /// use this as the round-trip check.
    pub fn resistance_distances(
        &self,
        arms: &[String],
    ) -> Result<BTreeMap<(String, String), T>, ModelError> {
        let n = arms.len();
        let mut laplacian = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = self.weight(&arms[i], &arms[j]).unwrap_or_else(T::zero);
                laplacian.set(i, j, -w);
                laplacian.set(i, i, laplacian.get(i, i) + w);
            }
        }
        let pinv = crate::numerics::laplacian_pinv(&laplacian)?;
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let r = pinv.get(i, i) + pinv.get(j, j) - lit::<T>(2.0) * pinv.get(i, j);
                out.insert(ordered_pair(&arms[i], &arms[j]), r);
            }
        }
        Ok(out)
    }
}

/// Options for [`parse_contrasts`] and [`parse_aggregate`].
#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Expect (and validate) a header line.
    pub has_header: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { has_header: true }
    }
}

const CONTRAST_HEADER: [&str; 5] = ["study", "treat1", "treat2", "effect", "se"];
const AGGREGATE_HEADER: [&str; 4] = ["treat1", "treat2", "direct_estimate", "weight"];

fn split_row(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_number<T: Scalar>(field: &str, line: usize, what: &str) -> Result<T, ModelError> {
    let value: f64 = field.parse().map_err(|_| ModelError::MalformedRow {
        line,
        message: format!("cannot parse {what} from {field:?}"),
    })?;
    T::from_f64(value).ok_or(ModelError::MalformedRow {
        line,
        message: format!("{what} {field:?} not representable"),
    })
}

fn check_header(line: &str, expected: &[&str], line_no: usize) -> Result<(), ModelError> {
    let fields = split_row(line);
    let matches = fields.len() == expected.len()
        && fields
            .iter()
            .zip(expected)
            .all(|(f, e)| f.eq_ignore_ascii_case(e));
    if !matches {
        return Err(ModelError::MalformedRow {
            line: line_no,
            message: format!("expected header {:?}", expected.join(",")),
        });
    }
    Ok(())
}

/// Parses contrast-level CSV (`study,treat1,treat2,effect,se`) into studies.
///
/// Rows are grouped by study identifier in first-appearance order; each
/// study must carry one row per unordered pair of its treatments.
pub fn parse_contrasts<T: Scalar>(
    text: &str,
    options: &ParseOptions,
) -> Result<Vec<Study<T>>, ModelError> {
    let mut order: Vec<String> = Vec::new();
    let mut grouped: BTreeMap<String, Vec<ContrastObservation<T>>> = BTreeMap::new();
    let mut lines = text.lines().enumerate();
    if options.has_header {
        match lines.next() {
            Some((i, line)) => check_header(line, &CONTRAST_HEADER, i + 1)?,
            None => return Err(ModelError::EmptyInput),
        }
    }
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_row(line);
        if fields.len() != 5 {
            return Err(ModelError::MalformedRow {
                line: line_no,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let effect = parse_number::<T>(fields[3], line_no, "effect")?;
        let se = parse_number::<T>(fields[4], line_no, "se")?;
        if se <= T::zero() {
            return Err(ModelError::MalformedRow {
                line: line_no,
                message: "standard error must be positive".into(),
            });
        }
        if fields[1] == fields[2] {
            return Err(ModelError::MalformedRow {
                line: line_no,
                message: "contrast compares a treatment with itself".into(),
            });
        }
        let obs = ContrastObservation {
            study: fields[0].to_owned(),
            treat_a: fields[1].to_owned(),
            treat_b: fields[2].to_owned(),
            effect,
            se,
        };
        if !grouped.contains_key(&obs.study) {
            order.push(obs.study.clone());
        }
        grouped.entry(obs.study.clone()).or_default().push(obs);
    }
    if order.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    order
        .into_iter()
        .map(|id| {
            let contrasts = grouped.remove(&id).unwrap();
            Study::from_contrasts(id, contrasts)
        })
        .collect()
}

/// Adds heterogeneity to every contrast variance: `se^2` becomes
/// `se^2 + tau2`. Effects are untouched.
pub fn apply_heterogeneity<T: Scalar>(study: &Study<T>, tau2: T) -> Result<Study<T>, ModelError> {
    if tau2 < T::zero() {
        return Err(ModelError::NegativeTau2);
    }
    let contrasts = study
        .contrasts
        .iter()
        .map(|obs| ContrastObservation {
            se: (obs.se * obs.se + tau2).sqrt(),
            ..obs.clone()
        })
        .collect();
    Ok(Study {
        id: study.id.clone(),
        arms: study.arms.clone(),
        contrasts,
    })
}

/// Reweights a study so that an equivalent network of two-arm trials
/// reproduces its variance structure.
///
/// Two-arm studies get the plain inverse-variance weight. For `n >= 3` arms
/// the pairwise variances are interpreted as resistance distances of a
/// complete sub-graph: double-centering the variance matrix gives the
/// pseudo-inverse of the sought Laplacian, and the negated off-diagonal
/// Laplacian entries are the adjusted weights.
pub fn adjust_multiarm<T: Scalar>(study: &Study<T>) -> Result<AdjustedStudyWeights<T>, ModelError> {
    for obs in &study.contrasts {
        if obs.variance() <= T::zero() {
            return Err(ModelError::NonPositiveVariance {
                study: study.id.clone(),
                a: obs.treat_a.clone(),
                b: obs.treat_b.clone(),
            });
        }
    }
    let mut weights = BTreeMap::new();
    if study.n_arms() == 2 {
        let obs = &study.contrasts[0];
        weights.insert(
            ordered_pair(&obs.treat_a, &obs.treat_b),
            T::one() / obs.variance(),
        );
        return Ok(AdjustedStudyWeights {
            study: study.id.clone(),
            weights,
        });
    }

    let n = study.n_arms();
    let index: BTreeMap<&str, usize> = study
        .arms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut variance = Matrix::zeros(n, n);
    for obs in &study.contrasts {
        let i = index[obs.treat_a.as_str()];
        let j = index[obs.treat_b.as_str()];
        variance.set(i, j, obs.variance());
        variance.set(j, i, obs.variance());
    }
    // Lambda+ = -1/2 C V C with the centering matrix C = I - J/n.
    let ninv = T::one() / lit::<T>(n as f64);
    let mut centering = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let identity = if i == j { T::one() } else { T::zero() };
            centering.set(i, j, identity - ninv);
        }
    }
    let mut pseudo = centering.matmul(&variance).matmul(&centering);
    for i in 0..n {
        for j in 0..n {
            pseudo.set(i, j, -pseudo.get(i, j) / lit::<T>(2.0));
        }
    }
    let laplacian = pinv_symmetric(&pseudo)?;
    let floor = -lit::<T>(NEGATIVE_WEIGHT_TOL);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = -laplacian.get(i, j);
            if w < floor {
                return Err(ModelError::NegativeAdjustedWeight {
                    study: study.id.clone(),
                    a: study.arms[i].clone(),
                    b: study.arms[j].clone(),
                    weight: w.to_f64().unwrap_or(f64::NAN),
                });
            }
            weights.insert(
                ordered_pair(&study.arms[i], &study.arms[j]),
                w.max(T::zero()),
            );
        }
    }
    Ok(AdjustedStudyWeights {
        study: study.id.clone(),
        weights,
    })
}

/// One pooled comparison of the aggregate network.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateEdge<T> {
    pub treat_a: String,
    pub treat_b: String,
    /// Relative effect of `treat_b` versus `treat_a`.
    pub direct_estimate: T,
    pub weight: T,
}

/// The pooled evidence network: ordered treatments, oriented edges with one
/// inverse-variance weight and one direct estimate each.
///
/// Edge `k = (u, v)` is oriented with its baseline `u` first; the incidence
/// matrix carries `+1` at `u` and `-1` at `v`, and `direct_estimates()[k]`
/// measures the effect of `v` relative to `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateNetwork<T> {
    treatments: Vec<String>,
    edges: Vec<(usize, usize)>,
    weights: Vec<T>,
    direct_estimates: Vec<T>,
}

impl<T: Scalar> AggregateNetwork<T> {
    /// Assembles a network from explicit edges, keeping their orientation.
    pub fn new(treatments: Vec<String>, edges: Vec<AggregateEdge<T>>) -> Result<Self, ModelError> {
        let index: BTreeMap<&str, usize> = treatments
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        if index.len() != treatments.len() {
            return Err(ModelError::InvalidEdge {
                message: "duplicate treatment label".into(),
            });
        }
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut idx_edges = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        let mut estimates = Vec::with_capacity(edges.len());
        for e in &edges {
            let u = *index
                .get(e.treat_a.as_str())
                .ok_or_else(|| ModelError::UnknownTreatment {
                    label: e.treat_a.clone(),
                })?;
            let v = *index
                .get(e.treat_b.as_str())
                .ok_or_else(|| ModelError::UnknownTreatment {
                    label: e.treat_b.clone(),
                })?;
            if u == v {
                return Err(ModelError::InvalidEdge {
                    message: format!("self edge on {}", e.treat_a),
                });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ModelError::DuplicateContrast {
                    study: "<aggregate>".into(),
                    a: e.treat_a.clone(),
                    b: e.treat_b.clone(),
                });
            }
            if !is_positive(e.weight) {
                return Err(ModelError::InvalidEdge {
                    message: format!("non-positive weight on {}-{}", e.treat_a, e.treat_b),
                });
            }
            idx_edges.push((u, v));
            weights.push(e.weight);
            estimates.push(e.direct_estimate);
        }
        let net = Self {
            treatments,
            edges: idx_edges,
            weights,
            direct_estimates: estimates,
        };
        let components = net.components();
        if components.len() != 1 {
            return Err(ModelError::DisconnectedNetwork {
                components: components
                    .iter()
                    .map(|c| c.iter().map(|&i| net.treatments[i].clone()).collect())
                    .collect(),
            });
        }
        Ok(net)
    }

    pub fn n_treatments(&self) -> usize {
        self.treatments.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn treatments(&self) -> &[String] {
        &self.treatments
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn direct_estimates(&self) -> &[T] {
        &self.direct_estimates
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.treatments.iter().position(|t| t == label)
    }

    /// Finds the edge joining `a` and `b` in either orientation; the flag is
    /// true when the stored orientation is `(a, b)`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<(usize, bool)> {
        self.edges.iter().enumerate().find_map(|(k, &(u, v))| {
            if (u, v) == (a, b) {
                Some((k, true))
            } else if (u, v) == (b, a) {
                Some((k, false))
            } else {
                None
            }
        })
    }

    pub fn edge_label(&self, k: usize) -> String {
        let (u, v) = self.edges[k];
        format!("{}-{}", self.treatments[u], self.treatments[v])
    }

    /// Edge incidence matrix `B` (K x N): `+1` at the baseline column,
    /// `-1` at the other.
    pub fn incidence(&self) -> Matrix<T> {
        let mut b = Matrix::zeros(self.edges.len(), self.treatments.len());
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            b.set(k, u, T::one());
            b.set(k, v, -T::one());
        }
        b
    }

    /// Diagonal weight matrix `W` (K x K).
    pub fn weight_matrix(&self) -> Matrix<T> {
        Matrix::diagonal(&self.weights)
    }

    /// Sum of edge weights incident to node `c`.
    pub fn node_strength(&self, c: usize) -> T {
        self.edges
            .iter()
            .zip(&self.weights)
            .filter(|(&(u, v), _)| u == c || v == c)
            .fold(T::zero(), |acc, (_, &w)| acc + w)
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.treatments.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut queue = vec![start];
            let mut component = Vec::new();
            seen[start] = true;
            while let Some(node) = queue.pop() {
                component.push(node);
                for &next in &adjacency[node] {
                    if !seen[next] {
                        seen[next] = true;
                        queue.push(next);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }
}

/// Global treatment ordering: numeric ascending when every label parses as
/// an integer, lexicographic otherwise.
pub fn treatment_order(labels: impl IntoIterator<Item = String>) -> Vec<String> {
    let set: BTreeSet<String> = labels.into_iter().collect();
    let mut out: Vec<String> = set.into_iter().collect();
    let numeric: Option<Vec<i64>> = out.iter().map(|s| s.parse().ok()).collect();
    if let Some(keys) = numeric {
        let mut keyed: Vec<(i64, String)> = keys.into_iter().zip(out).collect();
        keyed.sort();
        out = keyed.into_iter().map(|(_, s)| s).collect();
    }
    out
}

/// Pools adjusted per-study weights into the aggregate network.
///
/// For every treatment pair compared in at least one study the direct
/// estimate is the weighted mean of the per-study effects and the edge
/// weight is the sum of the per-study weights. Edge baselines follow the
/// global treatment ordering.
pub fn pool_edges<T: Scalar>(
    adjusted: &[AdjustedStudyWeights<T>],
    studies: &[Study<T>],
) -> Result<AggregateNetwork<T>, ModelError> {
    if studies.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let treatments = treatment_order(studies.iter().flat_map(|s| s.arms.iter().cloned()));
    let index: BTreeMap<&str, usize> = treatments
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let by_study: BTreeMap<&str, &AdjustedStudyWeights<T>> =
        adjusted.iter().map(|a| (a.study.as_str(), a)).collect();

    // Accumulate sum(w) and sum(w * y) per oriented pair (u < v).
    let mut sums: BTreeMap<(usize, usize), (T, T)> = BTreeMap::new();
    for study in studies {
        let weights = by_study
            .get(study.id.as_str())
            .ok_or_else(|| ModelError::InvalidEdge {
                message: format!("no adjusted weights for study {}", study.id),
            })?;
        for obs in &study.contrasts {
            let a = index[obs.treat_a.as_str()];
            let b = index[obs.treat_b.as_str()];
            let w = weights
                .weight(&obs.treat_a, &obs.treat_b)
                .unwrap_or_else(T::zero);
            if !is_positive(w) {
                continue;
            }
            // Orient toward (u, v) with u the baseline: the effect measures
            // treat_b minus treat_a, so flipping the pair negates it.
            let (key, y) = if a < b {
                ((a, b), obs.effect)
            } else {
                ((b, a), -obs.effect)
            };
            let entry = sums.entry(key).or_insert((T::zero(), T::zero()));
            entry.0 = entry.0 + w;
            entry.1 = entry.1 + w * y;
        }
    }

    let edges: Vec<AggregateEdge<T>> = sums
        .into_iter()
        .map(|((u, v), (w, wy))| AggregateEdge {
            treat_a: treatments[u].clone(),
            treat_b: treatments[v].clone(),
            direct_estimate: wy / w,
            weight: w,
        })
        .collect();
    AggregateNetwork::new(treatments, edges)
}

/// Parses aggregate CSV (`treat1,treat2,direct_estimate,weight`) straight
/// into an [`AggregateNetwork`]. Rows listed against the global treatment
/// ordering are re-oriented (estimate negated).
pub fn parse_aggregate<T: Scalar>(
    text: &str,
    options: &ParseOptions,
) -> Result<AggregateNetwork<T>, ModelError> {
    let mut lines = text.lines().enumerate();
    if options.has_header {
        match lines.next() {
            Some((i, line)) => check_header(line, &AGGREGATE_HEADER, i + 1)?,
            None => return Err(ModelError::EmptyInput),
        }
    }
    let mut rows: Vec<(String, String, T, T)> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_row(line);
        if fields.len() != 4 {
            return Err(ModelError::MalformedRow {
                line: line_no,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        if fields[0] == fields[1] {
            return Err(ModelError::MalformedRow {
                line: line_no,
                message: "edge joins a treatment with itself".into(),
            });
        }
        let estimate = parse_number::<T>(fields[2], line_no, "direct_estimate")?;
        let weight = parse_number::<T>(fields[3], line_no, "weight")?;
        if !is_positive(weight) {
            return Err(ModelError::MalformedRow {
                line: line_no,
                message: "weight must be positive".into(),
            });
        }
        rows.push((fields[0].to_owned(), fields[1].to_owned(), estimate, weight));
    }
    if rows.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let treatments = treatment_order(rows.iter().flat_map(|(a, b, _, _)| [a.clone(), b.clone()]));
    let index: BTreeMap<&str, usize> = treatments
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let edges = rows
        .into_iter()
        .map(|(a, b, estimate, weight)| {
            if index[a.as_str()] < index[b.as_str()] {
                AggregateEdge {
                    treat_a: a,
                    treat_b: b,
                    direct_estimate: estimate,
                    weight,
                }
            } else {
                AggregateEdge {
                    treat_a: b,
                    treat_b: a,
                    direct_estimate: -estimate,
                    weight,
                }
            }
        })
        .collect();
    AggregateNetwork::new(treatments, edges)
}
