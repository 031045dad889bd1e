//! One-way sensitivity analysis: co-variation, sensitivity functions,
//! distances between the original and a perturbed network, and the inverse
//! query that searches for single-parameter changes meeting a target.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inference::{enumerate_joint, event_probability, event_terms, evidence_probability, EventQuery, Evidence};
use crate::model::{DiscreteBn, ParamRef};

/// Number of points in the default `[0, 1]` grid.
pub const DEFAULT_GRID_POINTS: usize = 101;

/// Joint spaces up to this size get KL/Jeffreys by enumeration under
/// [`DistanceMethod::Auto`].
pub const AUTO_ENUMERATION_CAP: usize = 1 << 16;

/// A sensquery suggestion must reproduce the target to within this.
pub const SENSQUERY_TOLERANCE: f64 = 1e-6;

/// Parent configurations this close to certain contribute no unit ratio to
/// the CD distance.
const CERTAIN_CONFIG: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovariationScheme {
    /// Remaining entries keep their relative proportions.
    #[default]
    Proportional,
    /// Remaining mass is split equally.
    Uniform,
    /// Proportional, rejecting values that change the rank order of the row.
    OrderPreserving,
}

/// Sets entry `k` of `row` to `t` and redistributes `1 - t` over the others.
pub fn covary(row: &[f64], k: usize, t: f64, scheme: CovariationScheme) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidNewValue(t));
    }
    if k >= row.len() {
        return Err(Error::LevelOutOfRange {
            variable: "row".into(),
            index: k,
            cardinality: row.len(),
        });
    }
    let theta = row[k];
    let mut out = match scheme {
        CovariationScheme::Proportional | CovariationScheme::OrderPreserving => {
            if theta >= 1.0 {
                if t < 1.0 {
                    return Err(Error::DegenerateRow { index: k, value: theta });
                }
                return Ok(row.to_vec());
            }
            let scale = (1.0 - t) / (1.0 - theta);
            row.iter().map(|&p| p * scale).collect::<Vec<_>>()
        }
        CovariationScheme::Uniform => {
            let others = row.len() - 1;
            if others == 0 {
                if t < 1.0 {
                    return Err(Error::DegenerateRow { index: k, value: theta });
                }
                return Ok(row.to_vec());
            }
            vec![(1.0 - t) / others as f64; row.len()]
        }
    };
    for p in &mut out {
        *p = p.clamp(0.0, 1.0);
    }
    out[k] = t;
    if scheme == CovariationScheme::OrderPreserving && !preserves_order(row, &out) {
        return Err(Error::OrderViolation(t));
    }
    Ok(out)
}

/// Ranks entries by decreasing value, ties by position, and checks that the
/// new row is still non-increasing along that ranking.
fn preserves_order(before: &[f64], after: &[f64]) -> bool {
    let mut rank: Vec<usize> = (0..before.len()).collect();
    rank.sort_by(|&a, &b| before[b].total_cmp(&before[a]).then(a.cmp(&b)));
    rank.windows(2).all(|w| after[w[0]] >= after[w[1]])
}

/// Values at which to evaluate an analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum NewValues {
    /// Equally spaced grid over `[0, 1]` with [`DEFAULT_GRID_POINTS`] points.
    All,
    Points(Vec<f64>),
}

impl NewValues {
    pub fn grid(points: usize) -> Vec<f64> {
        let last = (points.max(2) - 1) as f64;
        (0..points.max(2)).map(|i| i as f64 / last).collect()
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            NewValues::All => Ok(Self::grid(DEFAULT_GRID_POINTS)),
            NewValues::Points(ts) => {
                if let Some(&bad) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(Error::InvalidNewValue(bad));
                }
                Ok(ts.clone())
            }
        }
    }
}

/// `f(t) = (a t + b) / (c t + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalLinear {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl FractionalLinear {
    pub fn eval(&self, t: f64) -> Option<f64> {
        let den = self.c * t + self.d;
        (den != 0.0).then(|| (self.a * t + self.b) / den)
    }

    /// Same function scaled so that `d = 1` (unchanged when `d = 0`).
    pub fn normalized(&self) -> Self {
        if self.d == 0.0 {
            return *self;
        }
        Self {
            a: self.a / self.d,
            b: self.b / self.d,
            c: self.c / self.d,
            d: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityPoint {
    pub t: f64,
    /// `None` where the co-varied row is degenerate or the evidence has zero
    /// probability.
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityResult {
    pub param: ParamRef,
    pub original: f64,
    pub points: Vec<SensitivityPoint>,
    /// Numerator `p(y_O, y_E)` is `a t + b`, denominator `p(y_E)` is `c t + d`.
    pub coefficients: Option<FractionalLinear>,
}

impl SensitivityResult {
    /// Largest gap between the grid values and the fitted function.
    pub fn max_fit_residual(&self) -> Option<f64> {
        let f = self.coefficients?;
        self.points
            .iter()
            .filter_map(|p| Some((p.probability?, f.eval(p.t)?)))
            .map(|(y, fit)| (y - fit).abs())
            .reduce(f64::max)
    }
}

/// Row values along the affine path `t ↦ row(t)` that `scheme` follows, read
/// at `t = 0` and `t = 1`. Entries may leave `[0, 1]`.
fn affine_endpoints(row: &[f64], k: usize, scheme: CovariationScheme) -> Option<(Vec<f64>, Vec<f64>)> {
    let at = |t: f64| -> Option<Vec<f64>> {
        match scheme {
            CovariationScheme::Proportional | CovariationScheme::OrderPreserving => {
                let theta = row[k];
                if theta >= 1.0 {
                    return None;
                }
                let mut out: Vec<f64> = row.iter().map(|&p| p * (1.0 - t) / (1.0 - theta)).collect();
                out[k] = t;
                Some(out)
            }
            CovariationScheme::Uniform => {
                if row.len() < 2 {
                    return None;
                }
                let mut out = vec![(1.0 - t) / (row.len() - 1) as f64; row.len()];
                out[k] = t;
                Some(out)
            }
        }
    };
    Some((at(0.0)?, at(1.0)?))
}

fn coefficients(
    bn: &DiscreteBn,
    query: &EventQuery,
    node: usize,
    row_index: usize,
    k: usize,
    scheme: CovariationScheme,
) -> Option<FractionalLinear> {
    let row = bn.cpt(node).row(row_index);
    let (zero, one) = affine_endpoints(row, k, scheme)?;
    let (n0, d0) = event_terms(bn, query, Some((node, row_index, &zero)));
    let (n1, d1) = event_terms(bn, query, Some((node, row_index, &one)));
    Some(FractionalLinear {
        a: n1 - n0,
        b: n0,
        c: d1 - d0,
        d: d0,
    })
}

/// Output probability `p(y_O | y_E)` as a function of one CPT parameter.
pub fn sensitivity(
    bn: &DiscreteBn,
    query: &EventQuery,
    param: &ParamRef,
    new_values: &NewValues,
    scheme: CovariationScheme,
) -> Result<SensitivityResult> {
    query.validate(bn.dag())?;
    let row_index = param.row_index(bn)?;
    let row = bn.cpt(param.node).row(row_index).to_vec();
    let ts = new_values.values()?;

    let points = ts
        .into_iter()
        .map(|t| {
            let probability = covary(&row, param.value, t, scheme).ok().and_then(|new_row| {
                let (n, d) = event_terms(bn, query, Some((param.node, row_index, &new_row)));
                (d > 0.0).then(|| n / d)
            });
            SensitivityPoint { t, probability }
        })
        .collect();

    Ok(SensitivityResult {
        param: param.clone(),
        original: row[param.value],
        points,
        coefficients: coefficients(bn, query, param.node, row_index, param.value, scheme),
    })
}

/// CD distance, KL divergences and Jeffreys distance between two networks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distances {
    /// `None` when infinite.
    pub cd: Option<f64>,
    /// `KL(p ‖ p')`.
    pub kl: Option<f64>,
    /// `KL(p' ‖ p)`.
    pub kl_reverse: Option<f64>,
}

impl Distances {
    pub fn jeffreys(&self) -> Option<f64> {
        Some(self.kl? + self.kl_reverse?)
    }

    const ZERO: Self = Self {
        cd: Some(0.0),
        kl: Some(0.0),
        kl_reverse: Some(0.0),
    };
}

/// Distances from ratio pairs `(p, p')`, weighting each KL term by `weight`.
/// Pairs with both entries zero carry no mass and are skipped.
fn distances_from_pairs(pairs: impl Iterator<Item = (f64, f64)>, weight: f64, unit_ratio: bool) -> Distances {
    let (mut lo, mut hi) = if unit_ratio {
        (0.0f64, 0.0f64)
    } else {
        (f64::INFINITY, f64::NEG_INFINITY)
    };
    let (mut kl, mut kl_rev) = (Some(0.0), Some(0.0));
    let mut cd_finite = true;
    for (p, q) in pairs {
        match (p > 0.0, q > 0.0) {
            (false, false) => continue,
            (true, true) => {
                let r = p.ln() - q.ln();
                lo = lo.min(r);
                hi = hi.max(r);
                kl = kl.map(|s| s + weight * p * r);
                kl_rev = kl_rev.map(|s| s - weight * q * r);
            }
            (true, false) => {
                cd_finite = false;
                kl = None;
            }
            (false, true) => {
                cd_finite = false;
                kl_rev = None;
            }
        }
    }
    let cd = cd_finite.then_some(if hi >= lo { hi - lo } else { 0.0 });
    Distances {
        cd,
        kl: kl.map(|x: f64| x.max(0.0)),
        kl_reverse: kl_rev.map(|x: f64| x.max(0.0)),
    }
}

/// Distances between two networks over the same variables by enumerating
/// both joint distributions.
pub fn network_distances(p: &DiscreteBn, q: &DiscreteBn, cap: Option<usize>) -> Result<Distances> {
    if p.dag().cardinalities() != q.dag().cardinalities() {
        return Err(Error::ShapeMismatch("networks have different state spaces".into()));
    }
    let jp = enumerate_joint(p, cap)?;
    let jq = enumerate_joint(q, cap)?;
    Ok(distances_from_pairs(
        jp.probs.iter().copied().zip(jq.probs.iter().copied()),
        1.0,
        false,
    ))
}

/// Distances for a single changed row, using the fact that all other CPT
/// entries cancel in the joint ratio. `config_prob` is the marginal
/// probability of the row's parent configuration.
fn local_distances(old_row: &[f64], new_row: &[f64], config_prob: f64) -> Distances {
    if !(config_prob > 0.0) {
        return Distances::ZERO;
    }
    distances_from_pairs(
        old_row.iter().copied().zip(new_row.iter().copied()),
        config_prob,
        config_prob < 1.0 - CERTAIN_CONFIG,
    )
}

fn parent_config_probability(bn: &DiscreteBn, param: &ParamRef) -> Result<f64> {
    let evidence: Evidence = bn
        .dag()
        .parents(param.node)
        .iter()
        .copied()
        .zip(param.parent_config.iter().copied())
        .collect();
    if evidence.is_empty() {
        return Ok(1.0);
    }
    evidence_probability(bn, &evidence)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DistanceMethod {
    /// Closed form from the changed row alone.
    #[default]
    Local,
    /// Full-joint enumeration of both networks.
    Enumerate,
    /// Enumerate when the joint space is at most [`AUTO_ENUMERATION_CAP`].
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistancePoint {
    pub t: f64,
    pub cd: Option<f64>,
    pub kl: Option<f64>,
    pub jeffreys: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceResult {
    pub param: ParamRef,
    pub original: f64,
    pub points: Vec<DistancePoint>,
}

fn check_boundary(bn: &DiscreteBn, param: &ParamRef, row_index: usize, scheme: CovariationScheme) -> Result<()> {
    let theta = bn.cpt(param.node).prob(param.value, row_index);
    let proportional = matches!(
        scheme,
        CovariationScheme::Proportional | CovariationScheme::OrderPreserving
    );
    if proportional && (theta <= 0.0 || theta >= 1.0) {
        let dag = bn.dag();
        return Err(Error::BoundaryParameter {
            node: dag.name(param.node).to_string(),
            level: dag.variable(param.node).level(param.value)?.to_string(),
            row: row_index,
            value: theta,
        });
    }
    Ok(())
}

/// CD, KL and Jeffreys distances between the network and its perturbations
/// along one parameter.
pub fn distances(
    bn: &DiscreteBn,
    param: &ParamRef,
    new_values: &NewValues,
    scheme: CovariationScheme,
    method: DistanceMethod,
) -> Result<DistanceResult> {
    let row_index = param.row_index(bn)?;
    check_boundary(bn, param, row_index, scheme)?;
    let row = bn.cpt(param.node).row(row_index).to_vec();
    let ts = new_values.values()?;
    let enumerate = match method {
        DistanceMethod::Local => false,
        DistanceMethod::Enumerate => true,
        DistanceMethod::Auto => bn.dag().joint_size() <= AUTO_ENUMERATION_CAP as u128,
    };
    let config_prob = if enumerate {
        1.0
    } else {
        parent_config_probability(bn, param)?
    };

    let mut points = Vec::with_capacity(ts.len());
    for t in ts {
        let d = match covary(&row, param.value, t, scheme) {
            Err(_) => None,
            Ok(new_row) if enumerate => {
                let perturbed = bn.with_row(param.node, row_index, new_row)?;
                Some(network_distances(bn, &perturbed, Some(usize::MAX))?)
            }
            Ok(new_row) => Some(local_distances(&row, &new_row, config_prob)),
        };
        points.push(DistancePoint {
            t,
            cd: d.and_then(|d| d.cd),
            kl: d.and_then(|d| d.kl),
            jeffreys: d.and_then(|d| d.jeffreys()),
        });
    }
    Ok(DistanceResult {
        param: param.clone(),
        original: row[param.value],
        points,
    })
}

/// CD distance along one parameter, from the local form.
pub fn cd_distance(
    bn: &DiscreteBn,
    param: &ParamRef,
    new_values: &NewValues,
    scheme: CovariationScheme,
) -> Result<DistanceResult> {
    distances(bn, param, new_values, scheme, DistanceMethod::Local)
}

/// KL divergence `KL(p ‖ p')` (and Jeffreys) along one parameter.
pub fn kl_divergence(
    bn: &DiscreteBn,
    param: &ParamRef,
    new_values: &NewValues,
    scheme: CovariationScheme,
) -> Result<DistanceResult> {
    distances(bn, param, new_values, scheme, DistanceMethod::Auto)
}

/// Jeffreys distance along one parameter; same rows as [`kl_divergence`].
pub fn jeffreys(
    bn: &DiscreteBn,
    param: &ParamRef,
    new_values: &NewValues,
    scheme: CovariationScheme,
) -> Result<DistanceResult> {
    kl_divergence(bn, param, new_values, scheme)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensQueryRow {
    pub param: ParamRef,
    pub original: f64,
    pub suggested: f64,
    pub cd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensQueryResult {
    /// Sorted by ascending CD distance.
    pub rows: Vec<SensQueryRow>,
}

/// All single-parameter changes (proportional co-variation) that bring
/// `p(y_O | y_E)` to `target`.
///
/// Each parameter's sensitivity function is recovered from two evaluations
/// and solved in closed form; candidates strictly inside `(0, 1)` are checked
/// by re-running the query on the changed network. For binary nodes the two
/// entries of a row describe the same change, which is reported once under
/// the level whose probability increases.
pub fn sensquery(bn: &DiscreteBn, query: &EventQuery, target: f64) -> Result<SensQueryResult> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidTarget(target));
    }
    query.validate(bn.dag())?;
    event_probability(bn, query)?;

    let dag = bn.dag();
    let mut rows = Vec::new();
    for node in 0..dag.len() {
        let cpt = bn.cpt(node);
        let card = cpt.cardinality();
        if card < 2 {
            continue;
        }
        for row_index in 0..cpt.row_count() {
            let row = cpt.row(row_index);
            let parent_config = cpt.parent_config_values(row_index)?;
            let mut config_prob = None;
            let mut candidates = Vec::new();
            for k in 0..card {
                let theta = row[k];
                if theta <= 0.0 || theta >= 1.0 {
                    continue;
                }
                let Some(f) = coefficients(bn, query, node, row_index, k, CovariationScheme::Proportional) else {
                    continue;
                };
                let slope = f.a - target * f.c;
                if slope.abs() <= 1e-12 * (f.b.abs() + f.d.abs()) {
                    continue;
                }
                let t = (target * f.d - f.b) / slope;
                if !(t > 0.0 && t < 1.0) {
                    continue;
                }
                let new_row = covary(row, k, t, CovariationScheme::Proportional)?;
                let (n, d) = event_terms(bn, query, Some((node, row_index, &new_row)));
                if !(d > 0.0) || (n / d - target).abs() > SENSQUERY_TOLERANCE {
                    continue;
                }
                let param = ParamRef::new(node, k, parent_config.clone());
                let weight = match config_prob {
                    Some(p) => p,
                    None => {
                        let p = parent_config_probability(bn, &param)?;
                        config_prob = Some(p);
                        p
                    }
                };
                let Some(cd) = local_distances(row, &new_row, weight).cd else {
                    continue;
                };
                candidates.push(SensQueryRow {
                    param,
                    original: theta,
                    suggested: t,
                    cd,
                });
            }
            if card == 2 && candidates.len() > 1 {
                let keep = candidates.iter().position(|c| c.suggested > c.original).unwrap_or(0);
                let chosen = candidates.swap_remove(keep);
                candidates = vec![chosen];
            }
            rows.extend(candidates);
        }
    }
    rows.sort_by(|a, b| a.cd.total_cmp(&b.cd).then_with(|| a.param.cmp(&b.param)));
    Ok(SensQueryResult { rows })
}
