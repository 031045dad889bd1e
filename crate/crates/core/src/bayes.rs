//! Dirichlet-multinomial learning: priors, counts, posterior means, one-step
//! predictives and the ordered-sequence marginal likelihood.
//!
//! Tables are stored per node with `config * cardinality + level` layout,
//! matching the CPT row order.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{Cpt, Dag, Dataset, DiscreteBn};

/// Per-node `(parent configurations, cardinality)` shape.
fn shapes(dag: &Dag) -> Vec<(usize, usize)> {
    (0..dag.len())
        .map(|i| (dag.parent_configurations(i), dag.cardinality(i)))
        .collect()
}

/// CPT row of `node` selected by the parent values in a full observation.
pub fn config_of(dag: &Dag, node: usize, observation: &[usize]) -> usize {
    dag.parents(node)
        .iter()
        .fold(0, |acc, &p| acc * dag.cardinality(p) + observation[p])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletSpec {
    shapes: Vec<(usize, usize)>,
    alphas: Vec<Vec<f64>>,
}

/// Default hyperparameters: every `α_ijk` equals the number of levels of node i.
pub fn default_prior(dag: &Dag) -> DirichletSpec {
    let shapes = shapes(dag);
    let alphas = shapes
        .iter()
        .map(|&(configs, card)| vec![card as f64; configs * card])
        .collect();
    DirichletSpec { shapes, alphas }
}

impl DirichletSpec {
    /// The same `α` for every entry of every node.
    pub fn uniform(dag: &Dag, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        let shapes = shapes(dag);
        let alphas = shapes
            .iter()
            .map(|&(configs, card)| vec![alpha; configs * card])
            .collect();
        Ok(Self { shapes, alphas })
    }

    /// Explicit per-node tables, `alphas[node][config * card + level]`.
    pub fn from_tables(dag: &Dag, alphas: Vec<Vec<f64>>) -> Result<Self> {
        let shapes = shapes(dag);
        if alphas.len() != shapes.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} node tables for {} nodes",
                alphas.len(),
                shapes.len()
            )));
        }
        for (i, (table, &(configs, card))) in alphas.iter().zip(&shapes).enumerate() {
            if table.len() != configs * card {
                return Err(Error::ShapeMismatch(format!(
                    "node `{}` needs {} entries, got {}",
                    dag.name(i),
                    configs * card,
                    table.len()
                )));
            }
            if let Some(&bad) = table.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
                return Err(Error::NonPositiveAlpha(bad));
            }
        }
        Ok(Self { shapes, alphas })
    }

    pub fn alpha(&self, node: usize, config: usize, level: usize) -> f64 {
        self.alphas[node][config * self.shapes[node].1 + level]
    }

    /// `α_ij`, the total of one row.
    pub fn row_total(&self, node: usize, config: usize) -> f64 {
        let card = self.shapes[node].1;
        self.alphas[node][config * card..(config + 1) * card].iter().sum()
    }

    pub fn table(&self, node: usize) -> &[f64] {
        &self.alphas[node]
    }

    pub(crate) fn check(&self, dag: &Dag) -> Result<()> {
        if self.shapes != shapes(dag) {
            return Err(Error::ShapeMismatch("prior does not match the DAG".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    shapes: Vec<(usize, usize)>,
    counts: Vec<Vec<u64>>,
    observations: u64,
}

impl CountTable {
    pub fn new(dag: &Dag) -> Self {
        let shapes = shapes(dag);
        let counts = shapes.iter().map(|&(c, k)| vec![0; c * k]).collect();
        Self {
            shapes,
            counts,
            observations: 0,
        }
    }

    /// Batch tabulation of a dataset.
    pub fn from_dataset(dag: &Dag, data: &Dataset) -> Result<Self> {
        data.check_matches(dag)?;
        let mut table = Self::new(dag);
        for row in data.rows() {
            table.accumulate(dag, row)?;
        }
        Ok(table)
    }

    /// Adds one complete observation: exactly one `N_ijk` per node grows by one.
    pub fn accumulate(&mut self, dag: &Dag, observation: &[usize]) -> Result<()> {
        if self.shapes != shapes(dag) {
            return Err(Error::ShapeMismatch("counts do not match the DAG".into()));
        }
        if observation.len() != dag.len() {
            return Err(Error::LengthMismatch {
                expected: dag.len(),
                found: observation.len(),
            });
        }
        for (i, &level) in observation.iter().enumerate() {
            dag.check_level(i, level)?;
        }
        for i in 0..dag.len() {
            let config = config_of(dag, i, observation);
            self.counts[i][config * self.shapes[i].1 + observation[i]] += 1;
        }
        self.observations += 1;
        Ok(())
    }

    pub fn count(&self, node: usize, config: usize, level: usize) -> u64 {
        self.counts[node][config * self.shapes[node].1 + level]
    }

    /// `N_ij`, the total of one row.
    pub fn row_total(&self, node: usize, config: usize) -> u64 {
        let card = self.shapes[node].1;
        self.counts[node][config * card..(config + 1) * card].iter().sum()
    }

    pub fn node_total(&self, node: usize) -> u64 {
        self.counts[node].iter().sum()
    }

    pub fn observations(&self) -> u64 {
        self.observations
    }

    pub fn table(&self, node: usize) -> &[u64] {
        &self.counts[node]
    }
}

fn check_congruent(dag: &Dag, prior: &DirichletSpec, counts: &CountTable) -> Result<()> {
    prior.check(dag)?;
    if counts.shapes != prior.shapes {
        return Err(Error::ShapeMismatch("counts do not match the prior".into()));
    }
    Ok(())
}

/// One-step-ahead predictive `(α_ijk + N_ijk) / (α_ij + N_ij)`.
pub fn predictive_node_prob(
    prior: &DirichletSpec,
    counts: &CountTable,
    node: usize,
    level: usize,
    config: usize,
) -> f64 {
    let numerator = prior.alpha(node, config, level) + counts.count(node, config, level) as f64;
    let denominator = prior.row_total(node, config) + counts.row_total(node, config) as f64;
    numerator / denominator
}

/// Predictive distribution over all levels of `node` in one row.
pub fn predictive_row(prior: &DirichletSpec, counts: &CountTable, node: usize, config: usize) -> Vec<f64> {
    let card = prior.shapes[node].1;
    (0..card)
        .map(|k| predictive_node_prob(prior, counts, node, k, config))
        .collect()
}

/// Network with every CPT entry at its Dirichlet posterior mean.
pub fn posterior_mean_bn(dag: &Dag, prior: &DirichletSpec, counts: &CountTable) -> Result<DiscreteBn> {
    check_congruent(dag, prior, counts)?;
    let cpts = (0..dag.len())
        .map(|i| {
            let rows = (0..dag.parent_configurations(i))
                .map(|j| predictive_row(prior, counts, i, j))
                .collect();
            Cpt::for_dag(dag, i, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteBn::new(dag.clone(), cpts)
}

/// Maximum-likelihood network `N_ijk / N_ij`; unseen parent configurations
/// get a uniform row.
pub fn mle_bn(dag: &Dag, counts: &CountTable) -> Result<DiscreteBn> {
    if counts.shapes != shapes(dag) {
        return Err(Error::ShapeMismatch("counts do not match the DAG".into()));
    }
    let cpts = (0..dag.len())
        .map(|i| {
            let card = dag.cardinality(i);
            let rows = (0..dag.parent_configurations(i))
                .map(|j| {
                    let total = counts.row_total(i, j);
                    if total == 0 {
                        log::info!(
                            "`{}`: parent configuration {j} unseen, using a uniform row",
                            dag.name(i)
                        );
                        vec![1.0 / card as f64; card]
                    } else {
                        (0..card).map(|k| counts.count(i, j, k) as f64 / total as f64).collect()
                    }
                })
                .collect();
            Cpt::for_dag(dag, i, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteBn::new(dag.clone(), cpts)
}

/// Log marginal likelihood of the ordered sequence for one node:
/// `Σ_j [lnΓ(α_ij) − lnΓ(α_ij + N_ij) + Σ_k (lnΓ(α_ijk + N_ijk) − lnΓ(α_ijk))]`.
pub fn node_log_marginal_likelihood(prior: &DirichletSpec, counts: &CountTable, node: usize) -> f64 {
    let (configs, card) = prior.shapes[node];
    let mut total = 0.0;
    for j in 0..configs {
        let n_row = counts.row_total(node, j);
        if n_row == 0 {
            continue;
        }
        let a_row = prior.row_total(node, j);
        total += ln_gamma(a_row) - ln_gamma(a_row + n_row as f64);
        for k in 0..card {
            let n = counts.count(node, j, k);
            if n > 0 {
                let a = prior.alpha(node, j, k);
                total += ln_gamma(a + n as f64) - ln_gamma(a);
            }
        }
    }
    total
}

/// Per-node log marginal likelihood of the ordered dataset; their sum is the
/// total.
pub fn log_marginal_likelihood(dag: &Dag, data: &Dataset, prior: &DirichletSpec) -> Result<Vec<f64>> {
    prior.check(dag)?;
    let counts = CountTable::from_dataset(dag, data)?;
    Ok((0..dag.len())
        .map(|i| node_log_marginal_likelihood(prior, &counts, i))
        .collect())
}
