//! Python bindings.

use std::collections::{BTreeMap, HashMap};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bnaudit::bayes::{self, default_prior, CountTable, DirichletSpec};
use bnaudit::inference::{self, EventQuery, Evidence, Query};
use bnaudit::io::{self, MedianTie, NetworkFile};
use bnaudit::model::{mixed_radix_values, Dag, Dataset as CoreDataset, DiscreteBn, ParamRef};
use bnaudit::monitors::{self, MonitorSeries};
use bnaudit::sensitivity::{self, CovariationScheme, DistanceMethod, NewValues};

/// (t, CD, KL, Jeffreys).
type DistanceRow = (f64, Option<f64>, Option<f64>, Option<f64>);
/// (node, level, parent levels, original, suggested, CD).
type SensQueryRow = (String, String, Vec<String>, f64, f64, f64);

fn err(e: bnaudit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scheme(name: &str) -> PyResult<CovariationScheme> {
    match name {
        "proportional" => Ok(CovariationScheme::Proportional),
        "uniform" => Ok(CovariationScheme::Uniform),
        "order-preserving" | "order_preserving" => Ok(CovariationScheme::OrderPreserving),
        other => Err(PyValueError::new_err(format!("unknown co-variation scheme `{other}`"))),
    }
}

fn assignments(dag: &Dag, pairs: &HashMap<String, String>) -> PyResult<Evidence> {
    let mut out = Evidence::new();
    for (name, level) in pairs {
        let node = dag.index_of(name).map_err(err)?;
        out.insert(node, dag.variable(node).level_index(level).map_err(err)?);
    }
    Ok(out)
}

fn prior(dag: &Dag, alpha: Option<f64>) -> PyResult<DirichletSpec> {
    match alpha {
        Some(a) => DirichletSpec::uniform(dag, a).map_err(err),
        None => Ok(default_prior(dag)),
    }
}

fn new_values(values: Option<Vec<f64>>) -> NewValues {
    values.map_or(NewValues::All, NewValues::Points)
}

/// Categorical dataset aligned with a network's variables.
#[pyclass(module = "bnaudit_py", frozen)]
struct Dataset {
    inner: CoreDataset,
}

#[pymethods]
impl Dataset {
    /// Reads a CSV whose header names the network's variables.
    #[staticmethod]
    fn load(path: &str, network: &Network) -> PyResult<Self> {
        let inner = io::load_dataset(path, network.dag.variables()).map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.variables().iter().map(|v| v.name().to_string()).collect()
    }

    /// Rows as lists of level labels.
    fn rows(&self) -> Vec<Vec<String>> {
        let vars = self.inner.variables();
        self.inner
            .rows()
            .iter()
            .map(|r| vars.iter().zip(r).map(|(v, &x)| v.levels()[x].clone()).collect())
            .collect()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = std::fs::File::create(path).map_err(|e| err(e.into()))?;
        io::write_dataset(file, &self.inner).map_err(err)
    }
}

/// A DAG, optionally with CPTs.
#[pyclass(module = "bnaudit_py", frozen)]
struct Network {
    dag: Dag,
    bn: Option<DiscreteBn>,
}

impl Network {
    fn from_file(file: NetworkFile) -> PyResult<Self> {
        let dag = file.dag().map_err(err)?;
        let bn = file.network().map_err(err)?;
        Ok(Self { dag, bn })
    }

    fn bn(&self) -> PyResult<&DiscreteBn> {
        self.bn
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("network has no CPTs; call fit() first"))
    }

    fn param(&self, node: &str, value: &str, parents: Vec<String>) -> PyResult<ParamRef> {
        let n = self.dag.index_of(node).map_err(err)?;
        let v = self.dag.variable(n).level_index(value).map_err(err)?;
        let ps = self.dag.parents(n);
        if parents.len() != ps.len() {
            return Err(PyValueError::new_err(format!(
                "`{node}` has {} parents, {} levels given",
                ps.len(),
                parents.len()
            )));
        }
        let config = ps
            .iter()
            .zip(&parents)
            .map(|(&p, l)| self.dag.variable(p).level_index(l).map_err(err))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(ParamRef::new(n, v, config))
    }

    fn event(&self, interest: &HashMap<String, String>, evidence: &HashMap<String, String>) -> PyResult<EventQuery> {
        let outcome: BTreeMap<usize, usize> = assignments(&self.dag, interest)?;
        EventQuery::new(outcome, assignments(&self.dag, evidence)?).map_err(err)
    }

    fn series(&self, s: MonitorSeries) -> Vec<HashMap<&'static str, Option<f64>>> {
        s.points
            .iter()
            .map(|p| {
                HashMap::from([
                    ("index", Some(p.index as f64)),
                    ("row", Some(p.row as f64)),
                    ("observed", Some(p.observed as f64)),
                    ("score", Some(p.score)),
                    ("expectation", Some(p.expectation)),
                    ("variance", Some(p.variance)),
                    ("z", p.z),
                ])
            })
            .collect()
    }
}

#[pymethods]
impl Network {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::from_file(NetworkFile::read(path).map_err(err)?)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::from_file(NetworkFile::parse(text).map_err(err)?)
    }

    fn to_json(&self) -> String {
        match &self.bn {
            Some(bn) => NetworkFile::from_network(bn).to_json(),
            None => NetworkFile::from_dag(&self.dag).to_json(),
        }
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.dag.variables().iter().map(|v| v.name().to_string()).collect()
    }

    fn parents(&self, node: &str) -> PyResult<Vec<String>> {
        let n = self.dag.index_of(node).map_err(err)?;
        Ok(self
            .dag
            .parents(n)
            .iter()
            .map(|&p| self.dag.name(p).to_string())
            .collect())
    }

    #[getter]
    fn has_cpts(&self) -> bool {
        self.bn.is_some()
    }

    /// CPT rows of `node`, one per parent configuration.
    fn cpt(&self, node: &str) -> PyResult<Vec<Vec<f64>>> {
        let n = self.dag.index_of(node).map_err(err)?;
        Ok(self.bn()?.cpt(n).rows().map(<[f64]>::to_vec).collect())
    }

    /// Network with CPTs estimated from `data` ("mle" or "posterior").
    #[pyo3(signature = (data, estimator = "mle", alpha = None))]
    fn fit(&self, data: &Dataset, estimator: &str, alpha: Option<f64>) -> PyResult<Self> {
        let counts = CountTable::from_dataset(&self.dag, &data.inner).map_err(err)?;
        let bn = match estimator {
            "mle" => bayes::mle_bn(&self.dag, &counts),
            "posterior" => bayes::posterior_mean_bn(&self.dag, &prior(&self.dag, alpha)?, &counts),
            other => return Err(PyValueError::new_err(format!("unknown estimator `{other}`"))),
        }
        .map_err(err)?;
        Ok(Self {
            dag: self.dag.clone(),
            bn: Some(bn),
        })
    }

    /// Posterior marginal of `target` as a level -> probability map.
    #[pyo3(signature = (target, evidence = HashMap::new()))]
    fn query(&self, target: &str, evidence: HashMap<String, String>) -> PyResult<HashMap<String, f64>> {
        let bn = self.bn()?;
        let t = self.dag.index_of(target).map_err(err)?;
        let q = Query::new([t], assignments(&self.dag, &evidence)?).map_err(err)?;
        let f = inference::query(bn, &q).map_err(err)?;
        Ok(self
            .dag
            .variable(t)
            .levels()
            .iter()
            .cloned()
            .zip(f.table().iter().copied())
            .collect())
    }

    /// Joint posterior of several targets as (levels, probability) pairs.
    #[pyo3(signature = (targets, evidence = HashMap::new()))]
    fn joint(&self, targets: Vec<String>, evidence: HashMap<String, String>) -> PyResult<Vec<(Vec<String>, f64)>> {
        let bn = self.bn()?;
        let idx = targets
            .iter()
            .map(|t| self.dag.index_of(t).map_err(err))
            .collect::<PyResult<Vec<_>>>()?;
        let q = Query::new(idx, assignments(&self.dag, &evidence)?).map_err(err)?;
        let f = inference::query(bn, &q).map_err(err)?;
        Ok(f.table()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let values = mixed_radix_values(f.cardinalities(), i);
                let labels = q
                    .targets()
                    .iter()
                    .zip(values)
                    .map(|(&n, v)| self.dag.variable(n).levels()[v].clone())
                    .collect();
                (labels, p)
            })
            .collect())
    }

    /// `p(interest | evidence)`.
    #[pyo3(signature = (interest, evidence = HashMap::new()))]
    fn probability(&self, interest: HashMap<String, String>, evidence: HashMap<String, String>) -> PyResult<f64> {
        inference::event_probability(self.bn()?, &self.event(&interest, &evidence)?).map_err(err)
    }

    /// Per-node ordered log marginal likelihood.
    #[pyo3(signature = (data, alpha = None))]
    fn log_marginal_likelihood(&self, data: &Dataset, alpha: Option<f64>) -> PyResult<Vec<f64>> {
        bayes::log_marginal_likelihood(&self.dag, &data.inner, &prior(&self.dag, alpha)?).map_err(err)
    }

    #[pyo3(signature = (data, alpha = None))]
    fn global_monitor(&self, data: &Dataset, alpha: Option<f64>) -> PyResult<HashMap<String, f64>> {
        let report = monitors::global_monitor(&self.dag, &data.inner, &prior(&self.dag, alpha)?).map_err(err)?;
        Ok(self.variables().into_iter().zip(report.scores).collect())
    }

    /// Marginal or conditional node monitor.
    #[pyo3(signature = (data, node, kind = "marginal", alpha = None))]
    fn node_monitor(
        &self,
        data: &Dataset,
        node: &str,
        kind: &str,
        alpha: Option<f64>,
    ) -> PyResult<Vec<HashMap<&'static str, Option<f64>>>> {
        let n = self.dag.index_of(node).map_err(err)?;
        let p = prior(&self.dag, alpha)?;
        let s = match kind {
            "marginal" => monitors::seq_marg_monitor(&self.dag, &data.inner, n, &p),
            "conditional" => monitors::seq_cond_monitor(&self.dag, &data.inner, n, &p),
            other => return Err(PyValueError::new_err(format!("unknown monitor `{other}`"))),
        }
        .map_err(err)?;
        Ok(self.series(s))
    }

    /// Parent-child monitor; `parents` maps parent names to levels.
    #[pyo3(signature = (data, node, parents, alpha = None))]
    fn pa_ch_monitor(
        &self,
        data: &Dataset,
        node: &str,
        parents: HashMap<String, String>,
        alpha: Option<f64>,
    ) -> PyResult<Vec<HashMap<&'static str, Option<f64>>>> {
        let n = self.dag.index_of(node).map_err(err)?;
        let (names, values): (Vec<String>, Vec<String>) = parents.into_iter().unzip();
        let s = monitors::seq_pa_ch_monitor(&self.dag, &data.inner, n, &names, &values, &prior(&self.dag, alpha)?)
            .map_err(err)?;
        Ok(self.series(s))
    }

    #[pyo3(signature = (data, alpha = None))]
    fn influence(&self, data: &Dataset, alpha: Option<f64>) -> PyResult<Vec<f64>> {
        let r = monitors::influential_obs(&self.dag, &data.inner, &prior(&self.dag, alpha)?).map_err(err)?;
        Ok(r.scores)
    }

    /// Sensitivity function over `new_values` (default: 101-point grid), as
    /// (t, probability or None) pairs.
    #[pyo3(signature = (node, value, parents, interest, evidence = HashMap::new(), new_values = None, covariation = "proportional"))]
    #[allow(clippy::too_many_arguments)]
    fn sensitivity(
        &self,
        node: &str,
        value: &str,
        parents: Vec<String>,
        interest: HashMap<String, String>,
        evidence: HashMap<String, String>,
        new_values: Option<Vec<f64>>,
        covariation: &str,
    ) -> PyResult<Vec<(f64, Option<f64>)>> {
        let bn = self.bn()?;
        let r = sensitivity::sensitivity(
            bn,
            &self.event(&interest, &evidence)?,
            &self.param(node, value, parents)?,
            &crate::new_values(new_values),
            scheme(covariation)?,
        )
        .map_err(err)?;
        Ok(r.points.iter().map(|p| (p.t, p.probability)).collect())
    }

    /// CD distance, KL divergence and Jeffreys distance over `new_values`.
    #[pyo3(signature = (node, value, parents, new_values = None, covariation = "proportional", method = "auto"))]
    fn distances(
        &self,
        node: &str,
        value: &str,
        parents: Vec<String>,
        new_values: Option<Vec<f64>>,
        covariation: &str,
        method: &str,
    ) -> PyResult<Vec<DistanceRow>> {
        let method = match method {
            "local" => DistanceMethod::Local,
            "enumerate" => DistanceMethod::Enumerate,
            "auto" => DistanceMethod::Auto,
            other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
        };
        let r = sensitivity::distances(
            self.bn()?,
            &self.param(node, value, parents)?,
            &crate::new_values(new_values),
            scheme(covariation)?,
            method,
        )
        .map_err(err)?;
        Ok(r.points.iter().map(|p| (p.t, p.cd, p.kl, p.jeffreys)).collect())
    }

    /// Single-parameter changes bringing `p(interest | evidence)` to `target`,
    /// sorted by CD distance.
    #[pyo3(signature = (interest, target, evidence = HashMap::new()))]
    fn sensquery(
        &self,
        interest: HashMap<String, String>,
        target: f64,
        evidence: HashMap<String, String>,
    ) -> PyResult<Vec<SensQueryRow>> {
        let r = sensitivity::sensquery(self.bn()?, &self.event(&interest, &evidence)?, target).map_err(err)?;
        Ok(r.rows
            .iter()
            .map(|row| {
                let p = &row.param;
                let var = self.dag.variable(p.node);
                let parents = self
                    .dag
                    .parents(p.node)
                    .iter()
                    .zip(&p.parent_config)
                    .map(|(&q, &v)| self.dag.variable(q).levels()[v].clone())
                    .collect();
                (
                    var.name().to_string(),
                    var.levels()[p.value].clone(),
                    parents,
                    row.original,
                    row.suggested,
                    row.cd,
                )
            })
            .collect())
    }
}

/// Sets entry `k` of `row` to `t`, redistributing the remaining mass.
#[pyfunction]
#[pyo3(signature = (row, k, t, covariation = "proportional"))]
fn covary(row: Vec<f64>, k: usize, t: f64, covariation: &str) -> PyResult<Vec<f64>> {
    sensitivity::covary(&row, k, t, scheme(covariation)?).map_err(err)
}

/// Complete-case, median-split Pima Indians diabetes data.
#[pyfunction]
#[pyo3(signature = (path, tie = "low"))]
fn prepare_pima(path: &str, tie: &str) -> PyResult<Dataset> {
    let tie = match tie {
        "low" => MedianTie::Low,
        "high" => MedianTie::High,
        other => return Err(PyValueError::new_err(format!("unknown tie rule `{other}`"))),
    };
    Ok(Dataset {
        inner: io::prepare_pima(path, tie).map_err(err)?,
    })
}

#[pymodule]
fn bnaudit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_class::<Dataset>()?;
    m.add_function(wrap_pyfunction!(covary, m)?)?;
    m.add_function(wrap_pyfunction!(prepare_pima, m)?)?;
    Ok(())
}
