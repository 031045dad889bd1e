//! Forward sampling from a parameterized network.

use rand::Rng;

use crate::model::{Dataset, DiscreteBn};

/// Draws `rows` independent observations in topological order.
pub fn forward_sample<R: Rng + ?Sized>(bn: &DiscreteBn, rows: usize, rng: &mut R) -> Dataset {
    let dag = bn.dag();
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut obs = vec![0usize; dag.len()];
        for &node in dag.topological_order() {
            let cpt = bn.cpt(node);
            let parents: Vec<usize> = cpt.parents().iter().map(|&p| obs[p]).collect();
            let row = cpt.row(cpt.parent_config_index(&parents).expect("sampled values are in range"));
            obs[node] = draw(row, rng.gen::<f64>());
        }
        data.push(obs);
    }
    Dataset::new(dag.variables().to_vec(), data).expect("sampled rows are valid")
}

fn draw(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Dag, Variable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frequencies_approach_parameters() {
        let dag = Dag::new(vec![Variable::new("A", ["x", "y", "z"]).unwrap()], []).unwrap();
        let bn = DiscreteBn::from_rows(dag, vec![vec![vec![0.2, 0.0, 0.8]]]).unwrap();
        let data = forward_sample(&bn, 20_000, &mut ChaCha8Rng::seed_from_u64(7));
        let count = |k| data.rows().iter().filter(|r| r[0] == k).count() as f64 / 20_000.0;
        assert!((count(0) - 0.2).abs() < 0.01);
        assert_eq!(count(1), 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let dag = Dag::new(vec![Variable::new("A", ["x", "y"]).unwrap()], []).unwrap();
        let bn = DiscreteBn::from_rows(dag, vec![vec![vec![0.5, 0.5]]]).unwrap();
        let a = forward_sample(&bn, 50, &mut ChaCha8Rng::seed_from_u64(1));
        let b = forward_sample(&bn, 50, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }
}
