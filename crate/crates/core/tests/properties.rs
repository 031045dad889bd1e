mod common;

use std::collections::{BTreeMap, BTreeSet};

use bnaudit::bayes::{self, default_prior, CountTable, DirichletSpec};
use bnaudit::inference::{self, EventQuery, Query};
use bnaudit::io::NetworkFile;
use bnaudit::model::{Dag, Dataset, DiscreteBn, ParamRef, Variable};
use bnaudit::monitors;
use bnaudit::sensitivity::{self, CovariationScheme, DistanceMethod, NewValues};
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Posterior-mean network from raw counts, written out directly.
fn posterior_mean(dag: &Dag, prior: &DirichletSpec, rows: &[Vec<usize>]) -> DiscreteBn {
    let tables = (0..dag.len())
        .map(|i| {
            let card = dag.cardinality(i);
            let mut counts = vec![0.0; dag.parent_configurations(i) * card];
            for r in rows {
                counts[row_of(dag, i, r) * card + r[i]] += 1.0;
            }
            (0..dag.parent_configurations(i))
                .map(|j| {
                    let num: Vec<f64> = (0..card).map(|k| prior.alpha(i, j, k) + counts[j * card + k]).collect();
                    let total: f64 = num.iter().sum();
                    num.into_iter().map(|x| x / total).collect()
                })
                .collect()
        })
        .collect();
    DiscreteBn::from_rows(dag.clone(), tables).unwrap()
}

fn random_evidence<R: Rng>(rng: &mut R, dag: &Dag, exclude: &[usize]) -> BTreeMap<usize, usize> {
    let mut evidence = BTreeMap::new();
    for i in 0..dag.len() {
        if !exclude.contains(&i) && rng.gen_bool(0.3) {
            evidence.insert(i, rng.gen_range(0..dag.cardinality(i)));
        }
    }
    evidence
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covaried_rows_are_distributions(
        raw in prop::collection::vec(0.01f64..1.0, 2..6),
        pick in any::<prop::sample::Index>(),
        t in 0.0f64..=1.0,
    ) {
        let total: f64 = raw.iter().sum();
        let row: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let k = pick.index(row.len());
        for scheme in [CovariationScheme::Proportional, CovariationScheme::Uniform] {
            let out = sensitivity::covary(&row, k, t, scheme).unwrap();
            prop_assert_eq!(out[k], t);
            prop_assert!(out.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let prop = sensitivity::covary(&row, k, t, CovariationScheme::Proportional).unwrap();
        for (a, b) in prop.iter().zip(proportional(&row, k, t)) {
            prop_assert!(approx(*a, b, 1e-12));
        }
        if let Ok(out) = sensitivity::covary(&row, k, t, CovariationScheme::OrderPreserving) {
            prop_assert_eq!(out[k], t);
            prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..row.len() {
                for j in 0..row.len() {
                    if row[i] < row[j] {
                        prop_assert!(out[i] <= out[j] + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn posterior_rows_sum_to_one(seed in any::<u64>(), n in 0usize..40) {
        let mut r = rng(seed);
        let dag = random_dag(&mut r, 5, 3, 0.5);
        let data = random_data(&mut r, &dag, n);
        let prior = random_prior(&mut r, &dag);
        let counts = CountTable::from_dataset(&dag, &data).unwrap();
        let bn = bayes::posterior_mean_bn(&dag, &prior, &counts).unwrap();
        for i in 0..dag.len() {
            for row in bn.cpt(i).rows() {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|&p| p > 0.0));
            }
        }
        let oracle = posterior_mean(&dag, &prior, data.rows());
        for i in 0..dag.len() {
            for (a, b) in bn.cpt(i).table().iter().zip(oracle.cpt(i).table()) {
                prop_assert!(approx(*a, *b, 1e-12));
            }
        }
    }

    #[test]
    fn monitor_moments_are_bounded(seed in any::<u64>(), n in 1usize..40) {
        let mut r = rng(seed);
        let dag = random_dag(&mut r, 4, 4, 0.5);
        let data = random_data(&mut r, &dag, n);
        let prior = random_prior(&mut r, &dag);
        for node in 0..dag.len() {
            let ln_card = (dag.cardinality(node) as f64).ln();
            for series in [
                monitors::seq_marg_monitor(&dag, &data, node, &prior).unwrap(),
                monitors::seq_cond_monitor(&dag, &data, node, &prior).unwrap(),
            ] {
                for p in &series.points {
                    prop_assert!(p.score >= 0.0);
                    prop_assert!(p.expectation >= -1e-12 && p.expectation <= ln_card + 1e-12);
                    prop_assert!(p.variance >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn global_scores_sum_to_log_marginal_likelihood(seed in any::<u64>(), n in 0usize..50) {
        let mut r = rng(seed);
        let dag = random_dag(&mut r, 5, 3, 0.5);
        let data = random_data(&mut r, &dag, n);
        let prior = random_prior(&mut r, &dag);
        let report = monitors::global_monitor(&dag, &data, &prior).unwrap();
        let oracle = prequential_log_likelihood(&dag, &data, &prior);
        prop_assert!(approx(report.total(), -oracle, 1e-9));
        let lml: f64 = bayes::log_marginal_likelihood(&dag, &data, &prior).unwrap().iter().sum();
        prop_assert!(approx(report.total(), -lml, 1e-9));
    }

    #[test]
    fn identical_rows_have_equal_influence(seed in any::<u64>(), n in 2usize..30) {
        let mut r = rng(seed);
        let dag = random_dag(&mut r, 4, 3, 0.5);
        let data = random_data(&mut r, &dag, n);
        let mut rows = data.rows().to_vec();
        rows.push(rows[0].clone());
        let data = data.with_rows(rows).unwrap();
        let report = monitors::influential_obs(&dag, &data, &default_prior(&dag)).unwrap();
        prop_assert!(approx(report.scores[0], report.scores[n], 1e-12));
        prop_assert!(report.scores.iter().all(|s| *s >= 0.0));
    }

    #[test]
    fn cd_distance_is_symmetric_and_nonnegative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_bn(&mut r, 4, 3);
        let q = random_network(&mut r, p.dag().clone());
        let pq = sensitivity::network_distances(&p, &q, None).unwrap();
        let qp = sensitivity::network_distances(&q, &p, None).unwrap();
        let cd = pq.cd.unwrap();
        prop_assert!(cd >= 0.0);
        prop_assert!(approx(cd, qp.cd.unwrap(), 1e-12));
        prop_assert!(pq.kl.unwrap() >= -1e-12);
        prop_assert!(approx(pq.kl.unwrap(), qp.kl_reverse.unwrap(), 1e-12));
        let (ocd, okl, orev) = joint_distances(&joint(&p), &joint(&q));
        prop_assert!(approx_opt(pq.cd, ocd, 1e-9));
        prop_assert!(approx_opt(pq.kl, okl, 1e-9));
        prop_assert!(approx_opt(pq.kl_reverse, orev, 1e-9));
    }

    #[test]
    fn network_documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let bn = random_bn(&mut r, 6, 4);
        let text = NetworkFile::from_network(&bn).to_json();
        let back = NetworkFile::parse(&text).unwrap().network().unwrap().unwrap();
        prop_assert_eq!(back.dag(), bn.dag());
        for i in 0..bn.dag().len() {
            prop_assert_eq!(back.cpt(i).table(), bn.cpt(i).table());
        }
    }

    #[test]
    fn sensitivity_values_are_probabilities_matching_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let bn = random_bn(&mut r, 4, 3);
        let dag = bn.dag();
        let target = r.gen_range(0..dag.len());
        let level = r.gen_range(0..dag.cardinality(target));
        let evidence = random_evidence(&mut r, dag, &[target]);
        let query = EventQuery::single(target, level, evidence.clone()).unwrap();
        let (node, row, k) = *parameters(&bn).choose(&mut r).unwrap();
        let param = ParamRef::new(node, k, bn.cpt(node).parent_config_values(row).unwrap());
        let grid = NewValues::Points(NewValues::grid(11));
        let result = sensitivity::sensitivity(&bn, &query, &param, &grid, CovariationScheme::Proportional).unwrap();
        let enumerator = Enumerator::new(&bn);
        let outcome = BTreeMap::from([(target, level)]);
        let original = bn.cpt(node).row(row).to_vec();
        for point in &result.points {
            if let Some(p) = point.probability {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
            }
            let changed = proportional(&original, k, point.t);
            let oracle = enumerator.event(Some((node, row, &changed)), &outcome, &evidence);
            prop_assert!(approx_opt(point.probability, oracle, 1e-9), "t={} {:?} {:?}", point.t, point.probability, oracle);
        }
    }

    #[test]
    fn ve_is_independent_of_elimination_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let bn = random_bn(&mut r, 6, 3);
        let dag = bn.dag();
        let target = r.gen_range(0..dag.len());
        let evidence = random_evidence(&mut r, dag, &[target]);
        let query = Query::new([target], evidence.clone()).unwrap();
        let reference = inference::query(&bn, &query).unwrap();
        let mut order: Vec<usize> = (0..dag.len()).collect();
        order.shuffle(&mut r);
        let shuffled = inference::query_with_order(&bn, &query, &order).unwrap();
        let oracle = conditional(&bn, &[target], &evidence).unwrap();
        for ((a, b), c) in reference.table().iter().zip(shuffled.table()).zip(&oracle) {
            prop_assert!(approx(*a, *b, 1e-12));
            prop_assert!(approx(*a, *c, 1e-9));
        }
    }

    #[test]
    fn d_separation_implies_numeric_independence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let bn = random_bn(&mut r, 6, 2);
        let dag = bn.dag();
        let a = r.gen_range(0..dag.len());
        let b = (a + r.gen_range(1..dag.len())) % dag.len();
        let given: BTreeSet<usize> = (0..dag.len()).filter(|&v| v != a && v != b && r.gen_bool(0.3)).collect();
        let separated = inference::d_separated(
            dag,
            &BTreeSet::from([a]),
            &BTreeSet::from([b]),
            &given,
        ).unwrap();
        if separated {
            let cards: Vec<usize> = given.iter().map(|&v| dag.cardinality(v)).collect();
            for values in assignments(&cards) {
                let evidence: BTreeMap<usize, usize> = given.iter().copied().zip(values).collect();
                let pair = conditional(&bn, &[a.min(b), a.max(b)], &evidence).unwrap();
                let pa = conditional(&bn, &[a], &evidence).unwrap();
                let pb = conditional(&bn, &[b], &evidence).unwrap();
                let cb = dag.cardinality(a.max(b));
                for (idx, p) in pair.iter().enumerate() {
                    let (lo, hi) = (idx / cb, idx % cb);
                    let (va, vb) = if a < b { (lo, hi) } else { (hi, lo) };
                    prop_assert!(approx(*p, pa[va] * pb[vb], 1e-9));
                }
            }
        }
    }

    #[test]
    fn conditional_monitor_matches_enumeration(seed in any::<u64>(), n in 1usize..15) {
        let mut r = rng(seed);
        let dag = random_dag(&mut r, 4, 3, 0.5);
        let data = random_data(&mut r, &dag, n);
        let prior = random_prior(&mut r, &dag);
        let node = r.gen_range(0..dag.len());
        let series = monitors::seq_cond_monitor(&dag, &data, node, &prior).unwrap();
        prop_assert_eq!(series.points.len(), n);
        for (i, point) in series.points.iter().enumerate() {
            let bn = posterior_mean(&dag, &prior, &data.rows()[..i]);
            let row = data.row(i);
            let evidence: BTreeMap<usize, usize> = (0..dag.len()).filter(|&v| v != node).map(|v| (v, row[v])).collect();
            let dist = conditional(&bn, &[node], &evidence).unwrap();
            prop_assert!(approx(point.score, -dist[row[node]].ln(), 1e-9));
            let e: f64 = dist.iter().map(|p| -p * p.ln()).sum();
            prop_assert!(approx(point.expectation, e, 1e-9));
        }
    }

    #[test]
    fn local_distances_match_enumeration(seed in any::<u64>(), t in 0.01f64..0.99) {
        let mut r = rng(seed);
        let bn = random_bn(&mut r, 4, 3);
        let (node, row, k) = *parameters(&bn).choose(&mut r).unwrap();
        let param = ParamRef::new(node, k, bn.cpt(node).parent_config_values(row).unwrap());
        let values = NewValues::Points(vec![t]);
        let scheme = CovariationScheme::Proportional;
        let local = sensitivity::distances(&bn, &param, &values, scheme, DistanceMethod::Local).unwrap();
        let full = sensitivity::distances(&bn, &param, &values, scheme, DistanceMethod::Enumerate).unwrap();
        prop_assert!(approx_opt(local.points[0].cd, full.points[0].cd, 1e-9));
        prop_assert!(approx_opt(local.points[0].kl, full.points[0].kl, 1e-9));
    }
}

fn binary(name: &str) -> Variable {
    Variable::new(name, ["a", "b"]).unwrap()
}

#[test]
fn root_marginal_monitor_equals_empty_parent_child_monitor() {
    let mut r = rng(11);
    let dag = random_dag(&mut r, 5, 3, 0.5);
    let data = random_data(&mut r, &dag, 60);
    let prior = default_prior(&dag);
    for node in (0..dag.len()).filter(|&v| dag.parents(v).is_empty()) {
        let marginal = monitors::seq_marg_monitor(&dag, &data, node, &prior).unwrap();
        let pa_ch = monitors::seq_pa_ch_monitor_indexed(&dag, &data, node, &[], &prior).unwrap();
        assert_eq!(marginal.points, pa_ch.points);
    }
}

#[test]
fn isolated_vertex_conditional_monitor_equals_marginal() {
    let dag = Dag::new(
        vec![binary("A"), binary("B"), Variable::new("C", ["x", "y", "z"]).unwrap()],
        [(0, 1)],
    )
    .unwrap();
    let mut r = rng(5);
    let data = random_data(&mut r, &dag, 80);
    let prior = default_prior(&dag);
    let marginal = monitors::seq_marg_monitor(&dag, &data, 2, &prior).unwrap();
    let cond = monitors::seq_cond_monitor(&dag, &data, 2, &prior).unwrap();
    for (m, c) in marginal.points.iter().zip(&cond.points) {
        assert!(approx(m.score, c.score, 1e-12));
        assert!(approx(m.expectation, c.expectation, 1e-12));
        assert!(approx(m.variance, c.variance, 1e-12));
    }
}

#[test]
fn influence_matches_refit_without_each_row() {
    let mut r = rng(3);
    let dag = random_dag(&mut r, 4, 3, 0.5);
    let data = random_data(&mut r, &dag, 25);
    let prior = random_prior(&mut r, &dag);
    let full = prequential_log_likelihood(&dag, &data, &prior);
    let report = monitors::influential_obs(&dag, &data, &prior).unwrap();
    for i in 0..data.len() {
        let reduced = prequential_log_likelihood(&dag, &data.without_row(i), &prior);
        assert!(approx(report.scores[i], (full - reduced).abs(), 1e-10));
    }
}

#[test]
fn empty_data_gives_empty_series() {
    let dag = Dag::new(vec![binary("A")], []).unwrap();
    let data = Dataset::empty(&dag);
    let prior = default_prior(&dag);
    assert!(monitors::seq_marg_monitor(&dag, &data, 0, &prior)
        .unwrap()
        .points
        .is_empty());
    assert_eq!(monitors::global_monitor(&dag, &data, &prior).unwrap().total(), 0.0);
}
