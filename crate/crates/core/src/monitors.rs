//! Prequential robustness monitors.
//!
//! Node monitors replay the dataset in order. Before row `i` is absorbed the
//! network is instantiated at the Dirichlet posterior means of rows `1..i-1`
//! and the observed value is scored against the resulting marginal (or
//! conditional) distribution. Early indices are volatile while the counts are
//! small; no burn-in is discarded.

use serde::Serialize;

use crate::bayes::{
    config_of, node_log_marginal_likelihood, posterior_mean_bn, predictive_row, CountTable, DirichletSpec,
};
use crate::error::{Error, Result};
use crate::inference::{query, Evidence, Query};
use crate::model::{Dag, Dataset};

/// Cumulative variance at or below this leaves `Z` undefined.
pub const VARIANCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonitorKind {
    Marginal,
    Conditional,
    ParentChild,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorPoint {
    /// Position in the series, starting at 1.
    pub index: usize,
    /// Zero-based row of the dataset this point scores.
    pub row: usize,
    pub observed: usize,
    pub score: f64,
    pub expectation: f64,
    pub variance: f64,
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSeries {
    pub node: usize,
    pub kind: MonitorKind,
    /// Parent values (DAG parent order) for parent-child monitors.
    pub parent_config: Option<Vec<usize>>,
    pub points: Vec<MonitorPoint>,
}

impl MonitorSeries {
    pub fn last_z(&self) -> Option<f64> {
        self.points.last().and_then(|p| p.z)
    }
}

/// Running sums of score, expectation and variance.
#[derive(Debug, Default)]
struct Standardizer {
    score: f64,
    expectation: f64,
    variance: f64,
}

impl Standardizer {
    fn push(&mut self, index: usize, row: usize, dist: &[f64], observed: usize) -> MonitorPoint {
        let score = -dist[observed].ln();
        let (mut expectation, mut second) = (0.0, 0.0);
        for &p in dist.iter().filter(|&&p| p > 0.0) {
            let l = p.ln();
            expectation -= p * l;
            second += p * l * l;
        }
        let variance = second - expectation * expectation;
        self.score += score;
        self.expectation += expectation;
        self.variance += variance;
        let z = (self.variance > VARIANCE_TOLERANCE).then(|| (self.score - self.expectation) / self.variance.sqrt());
        MonitorPoint {
            index,
            row,
            observed,
            score,
            expectation,
            variance,
            z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalMonitorReport {
    /// Negative log contribution of each node, in nats.
    pub scores: Vec<f64>,
}

impl GlobalMonitorReport {
    pub fn total(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// How the global monitor turns data into per-node scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GlobalMethod {
    /// Negative log of the ordered marginal likelihood (prequential).
    #[default]
    Prequential,
    /// Negative log-likelihood at the full-data posterior means.
    PlugIn,
}

fn prepare(dag: &Dag, data: &Dataset, prior: &DirichletSpec) -> Result<()> {
    data.check_matches(dag)?;
    prior.check(dag)
}

pub fn global_monitor(dag: &Dag, data: &Dataset, prior: &DirichletSpec) -> Result<GlobalMonitorReport> {
    global_monitor_with(dag, data, prior, GlobalMethod::Prequential)
}

pub fn global_monitor_with(
    dag: &Dag,
    data: &Dataset,
    prior: &DirichletSpec,
    method: GlobalMethod,
) -> Result<GlobalMonitorReport> {
    prepare(dag, data, prior)?;
    let counts = CountTable::from_dataset(dag, data)?;
    let scores = match method {
        GlobalMethod::Prequential => (0..dag.len())
            .map(|i| -node_log_marginal_likelihood(prior, &counts, i))
            .collect(),
        GlobalMethod::PlugIn => {
            let bn = posterior_mean_bn(dag, prior, &counts)?;
            (0..dag.len())
                .map(|i| -data.rows().iter().map(|row| bn.local_prob(i, row).ln()).sum::<f64>())
                .collect()
        }
    };
    Ok(GlobalMonitorReport { scores })
}

fn node_monitor(
    dag: &Dag,
    data: &Dataset,
    node: usize,
    prior: &DirichletSpec,
    kind: MonitorKind,
) -> Result<MonitorSeries> {
    dag.check_variable(node)?;
    prepare(dag, data, prior)?;
    let mut counts = CountTable::new(dag);
    let mut standardizer = Standardizer::default();
    let mut points = Vec::with_capacity(data.len());
    for (i, row) in data.rows().iter().enumerate() {
        let bn = posterior_mean_bn(dag, prior, &counts)?;
        let q = match kind {
            MonitorKind::Conditional => {
                let evidence: Evidence = row
                    .iter()
                    .enumerate()
                    .filter(|&(v, _)| v != node)
                    .map(|(v, &l)| (v, l))
                    .collect();
                Query::new([node], evidence)?
            }
            _ => Query::marginal(node),
        };
        let dist = query(&bn, &q)?;
        points.push(standardizer.push(i + 1, i, dist.table(), row[node]));
        counts.accumulate(dag, row)?;
    }
    Ok(MonitorSeries {
        node,
        kind,
        parent_config: None,
        points,
    })
}

/// Sequential marginal node monitor.
pub fn seq_marg_monitor(dag: &Dag, data: &Dataset, node: usize, prior: &DirichletSpec) -> Result<MonitorSeries> {
    node_monitor(dag, data, node, prior, MonitorKind::Marginal)
}

/// Sequential conditional node monitor: each value is scored given all other
/// values in its row.
pub fn seq_cond_monitor(dag: &Dag, data: &Dataset, node: usize, prior: &DirichletSpec) -> Result<MonitorSeries> {
    node_monitor(dag, data, node, prior, MonitorKind::Conditional)
}

/// Sequential parent-child monitor for `node` restricted to rows whose parents
/// take `parent_values`. `parent_names` may list the parents in any order;
/// `parent_values` are level labels aligned with it.
pub fn seq_pa_ch_monitor<S: AsRef<str>>(
    dag: &Dag,
    data: &Dataset,
    node: usize,
    parent_names: &[S],
    parent_values: &[S],
    prior: &DirichletSpec,
) -> Result<MonitorSeries> {
    dag.check_variable(node)?;
    if parent_names.len() != parent_values.len() {
        return Err(Error::LengthMismatch {
            expected: parent_names.len(),
            found: parent_values.len(),
        });
    }
    let parents = dag.parents(node);
    let mismatch = || Error::ParentMismatch {
        node: dag.name(node).to_string(),
        expected: parents.iter().map(|&p| dag.name(p).to_string()).collect(),
        found: parent_names.iter().map(|s| s.as_ref().to_string()).collect(),
    };
    if parent_names.len() != parents.len() {
        return Err(mismatch());
    }
    let mut config = vec![usize::MAX; parents.len()];
    for (name, value) in parent_names.iter().zip(parent_values) {
        let var = dag.index_of(name.as_ref())?;
        let pos = parents.iter().position(|&p| p == var).ok_or_else(mismatch)?;
        config[pos] = dag.variable(var).level_index(value.as_ref())?;
    }
    if config.contains(&usize::MAX) {
        return Err(mismatch());
    }
    seq_pa_ch_monitor_indexed(dag, data, node, &config, prior)
}

/// Parent-child monitor with the parent configuration given as level indices
/// in DAG parent order.
pub fn seq_pa_ch_monitor_indexed(
    dag: &Dag,
    data: &Dataset,
    node: usize,
    parent_config: &[usize],
    prior: &DirichletSpec,
) -> Result<MonitorSeries> {
    dag.check_variable(node)?;
    prepare(dag, data, prior)?;
    let parents = dag.parents(node);
    if parent_config.len() != parents.len() {
        return Err(Error::LengthMismatch {
            expected: parents.len(),
            found: parent_config.len(),
        });
    }
    for (&p, &v) in parents.iter().zip(parent_config) {
        dag.check_level(p, v)?;
    }
    let config = parents
        .iter()
        .zip(parent_config)
        .fold(0, |acc, (&p, &v)| acc * dag.cardinality(p) + v);

    let mut counts = CountTable::new(dag);
    let mut standardizer = Standardizer::default();
    let mut points = Vec::new();
    for (i, row) in data.rows().iter().enumerate() {
        if config_of(dag, node, row) != config {
            continue;
        }
        let dist = predictive_row(prior, &counts, node, config);
        points.push(standardizer.push(points.len() + 1, i, &dist, row[node]));
        counts.accumulate(dag, row)?;
    }
    Ok(MonitorSeries {
        node,
        kind: MonitorKind::ParentChild,
        parent_config: Some(parent_config.to_vec()),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceReport {
    /// `|log p(y) − log p(y without row i)|` for each row.
    pub scores: Vec<f64>,
}

/// Influence of each observation on the ordered log marginal likelihood.
///
/// Removing row `i` from an exchangeable Dirichlet-multinomial sequence
/// divides the likelihood by the predictive of that row given all others, so
/// the difference is `Σ_nodes ln((α_ijk + N_ijk − 1) / (α_ij + N_ij − 1))`
/// with the full-data counts.
pub fn influential_obs(dag: &Dag, data: &Dataset, prior: &DirichletSpec) -> Result<InfluenceReport> {
    prepare(dag, data, prior)?;
    let counts = CountTable::from_dataset(dag, data)?;
    let scores = data
        .rows()
        .iter()
        .map(|row| {
            (0..dag.len())
                .map(|node| {
                    let j = config_of(dag, node, row);
                    let k = row[node];
                    let numerator = prior.alpha(node, j, k) + (counts.count(node, j, k) - 1) as f64;
                    let denominator = prior.row_total(node, j) + (counts.row_total(node, j) - 1) as f64;
                    (numerator / denominator).ln()
                })
                .sum::<f64>()
                .abs()
        })
        .collect();
    Ok(InfluenceReport { scores })
}
