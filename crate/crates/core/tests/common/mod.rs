//! Random models and brute-force oracles shared by the integration tests.
//! Nothing here calls the library's inference, likelihood or distance code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use bnaudit::bayes::DirichletSpec;
use bnaudit::model::{Dag, Dataset, DiscreteBn, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

pub const MAX_PARENTS: usize = 3;

/// Random DAG over `n` variables: each node takes up to `MAX_PARENTS`
/// parents among the nodes before it in a random order.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, max_card: usize, edge_prob: f64) -> Dag {
    let variables: Vec<Variable> = (0..n)
        .map(|i| {
            let card = rng.gen_range(2..=max_card);
            Variable::new(format!("X{i}"), (0..card).map(|k| format!("s{k}"))).unwrap()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for (pos, &child) in order.iter().enumerate() {
        let mut candidates: Vec<usize> = order[..pos].to_vec();
        candidates.shuffle(rng);
        let mut taken = 0;
        for &p in &candidates {
            if taken < MAX_PARENTS && rng.gen_bool(edge_prob) {
                edges.push((p, child));
                taken += 1;
            }
        }
    }
    Dag::new(variables, edges).unwrap()
}

/// Strictly positive random CPTs for `dag`.
pub fn random_network<R: Rng>(rng: &mut R, dag: Dag) -> DiscreteBn {
    let rows = (0..dag.len())
        .map(|i| {
            (0..dag.parent_configurations(i))
                .map(|_| {
                    let raw: Vec<f64> = (0..dag.cardinality(i)).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let total: f64 = raw.iter().sum();
                    raw.into_iter().map(|x| x / total).collect()
                })
                .collect()
        })
        .collect();
    DiscreteBn::from_rows(dag, rows).unwrap()
}

pub fn random_bn<R: Rng>(rng: &mut R, n: usize, max_card: usize) -> DiscreteBn {
    let dag = random_dag(rng, n, max_card, 0.5);
    random_network(rng, dag)
}

/// Uniformly random categorical rows.
pub fn random_data<R: Rng>(rng: &mut R, dag: &Dag, rows: usize) -> Dataset {
    let data = (0..rows)
        .map(|_| (0..dag.len()).map(|i| rng.gen_range(0..dag.cardinality(i))).collect())
        .collect();
    Dataset::new(dag.variables().to_vec(), data).unwrap()
}

pub fn random_prior<R: Rng>(rng: &mut R, dag: &Dag) -> DirichletSpec {
    let tables = (0..dag.len())
        .map(|i| {
            (0..dag.parent_configurations(i) * dag.cardinality(i))
                .map(|_| rng.gen_range(0.2..4.0))
                .collect()
        })
        .collect();
    DirichletSpec::from_tables(dag, tables).unwrap()
}

/// Row of `node`'s CPT selected by a full assignment (last parent fastest).
pub fn row_of(dag: &Dag, node: usize, assignment: &[usize]) -> usize {
    let mut index = 0;
    for &p in dag.parents(node) {
        index = index * dag.cardinality(p) + assignment[p];
    }
    index
}

/// Every joint assignment in odometer order with the last variable fastest.
pub fn assignments(cards: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = cards.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut values = vec![0; cards.len()];
    for _ in 0..total {
        out.push(values.clone());
        for i in (0..cards.len()).rev() {
            values[i] += 1;
            if values[i] < cards[i] {
                break;
            }
            values[i] = 0;
        }
    }
    out
}

/// `(assignment, probability)` for the full joint, computed from the chain rule.
pub fn joint(bn: &DiscreteBn) -> Vec<(Vec<usize>, f64)> {
    let dag = bn.dag();
    assignments(&dag.cardinalities())
        .into_iter()
        .map(|a| {
            let p = (0..dag.len())
                .map(|i| bn.cpt(i).row(row_of(dag, i, &a))[a[i]])
                .product();
            (a, p)
        })
        .collect()
}

/// `p(targets | evidence)` as a table over the targets (ascending, last
/// fastest), or `None` when the evidence has probability zero.
pub fn conditional(bn: &DiscreteBn, targets: &[usize], evidence: &BTreeMap<usize, usize>) -> Option<Vec<f64>> {
    let dag = bn.dag();
    let cards: Vec<usize> = targets.iter().map(|&t| dag.cardinality(t)).collect();
    let mut out = vec![0.0; cards.iter().product()];
    for (a, p) in joint(bn) {
        if evidence.iter().all(|(&v, &l)| a[v] == l) {
            let idx = targets.iter().fold(0, |acc, &t| acc * dag.cardinality(t) + a[t]);
            out[idx] += p;
        }
    }
    let total: f64 = out.iter().sum();
    (total > 0.0).then(|| out.into_iter().map(|p| p / total).collect())
}

/// `p(outcome | evidence)` by enumeration.
pub fn event(bn: &DiscreteBn, outcome: &BTreeMap<usize, usize>, evidence: &BTreeMap<usize, usize>) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (a, p) in joint(bn) {
        if evidence.iter().all(|(&v, &l)| a[v] == l) {
            den += p;
            if outcome.iter().all(|(&v, &l)| a[v] == l) {
                num += p;
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Log marginal likelihood as the product of one-step predictives, replaying
/// rows in order.
pub fn prequential_log_likelihood(dag: &Dag, data: &Dataset, prior: &DirichletSpec) -> f64 {
    let mut counts: Vec<Vec<f64>> = (0..dag.len())
        .map(|i| vec![0.0; dag.parent_configurations(i) * dag.cardinality(i)])
        .collect();
    let mut total = 0.0;
    for row in data.rows() {
        for i in 0..dag.len() {
            let card = dag.cardinality(i);
            let j = row_of(dag, i, row);
            let k = row[i];
            let alpha_row: f64 = (0..card).map(|l| prior.alpha(i, j, l)).sum();
            let n_row: f64 = counts[i][j * card..(j + 1) * card].iter().sum();
            total += ((prior.alpha(i, j, k) + counts[i][j * card + k]) / (alpha_row + n_row)).ln();
            counts[i][j * card + k] += 1.0;
        }
    }
    total
}

/// CD distance, `KL(p‖q)` and `KL(q‖p)` between two joint tables, `None`
/// where infinite.
pub fn joint_distances(p: &[(Vec<usize>, f64)], q: &[(Vec<usize>, f64)]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut kl, mut rev) = (Some(0.0), Some(0.0));
    let mut finite = true;
    for ((_, a), (_, b)) in p.iter().zip(q) {
        let (a, b) = (*a, *b);
        if a > 0.0 && b > 0.0 {
            let r = (b / a).ln();
            lo = lo.min(r);
            hi = hi.max(r);
            kl = kl.map(|s| s + a * (a / b).ln());
            rev = rev.map(|s| s + b * (b / a).ln());
        } else if a > 0.0 {
            finite = false;
            kl = None;
        } else if b > 0.0 {
            finite = false;
            rev = None;
        }
    }
    let cd = if finite {
        Some(if hi >= lo { hi - lo } else { 0.0 })
    } else {
        None
    };
    (cd, kl, rev)
}

/// Proportional co-variation written out directly.
pub fn proportional(row: &[f64], k: usize, t: f64) -> Vec<f64> {
    row.iter()
        .enumerate()
        .map(|(l, &p)| {
            if l == k {
                t
            } else {
                (p * (1.0 - t) / (1.0 - row[k])).min(1.0)
            }
        })
        .collect()
}

/// All CPT entries `(node, row, level)`.
pub fn parameters(bn: &DiscreteBn) -> Vec<(usize, usize, usize)> {
    let dag = bn.dag();
    (0..dag.len())
        .flat_map(|i| (0..bn.cpt(i).row_count()).flat_map(move |r| (0..dag.cardinality(i)).map(move |k| (i, r, k))))
        .collect()
}

pub fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn approx_opt(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => approx(a, b, tol),
        (None, None) => true,
        _ => false,
    }
}

/// Enumeration over a fixed network that can evaluate events with one CPT
/// row replaced, without rebuilding the network.
pub struct Enumerator<'a> {
    bn: &'a DiscreteBn,
    states: Vec<Vec<usize>>,
    rows: Vec<Vec<usize>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(bn: &'a DiscreteBn) -> Self {
        let dag = bn.dag();
        let states = assignments(&dag.cardinalities());
        let rows = states
            .iter()
            .map(|a| (0..dag.len()).map(|i| row_of(dag, i, a)).collect())
            .collect();
        Self { bn, states, rows }
    }

    pub fn event(
        &self,
        replace: Option<(usize, usize, &[f64])>,
        outcome: &BTreeMap<usize, usize>,
        evidence: &BTreeMap<usize, usize>,
    ) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        for (a, rows) in self.states.iter().zip(&self.rows) {
            if !evidence.iter().all(|(&v, &l)| a[v] == l) {
                continue;
            }
            let mut p = 1.0;
            for (i, &r) in rows.iter().enumerate() {
                p *= match replace {
                    Some((node, row, values)) if node == i && row == r => values[a[i]],
                    _ => self.bn.cpt(i).row(r)[a[i]],
                };
            }
            den += p;
            if outcome.iter().all(|(&v, &l)| a[v] == l) {
                num += p;
            }
        }
        (den > 0.0).then(|| num / den)
    }
}
