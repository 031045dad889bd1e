//! JSON network documents.
//!
//! ```json
//! {
//!   "variables": [{"name": "A", "levels": ["a0", "a1"]}, {"name": "B", "levels": ["b0", "b1"]}],
//!   "edges": [["A", "B"]],
//!   "cpts": [
//!     {"node": "A", "parents": [], "rows": [[0.3, 0.7]]},
//!     {"node": "B", "parents": ["A"], "rows": [[0.9, 0.1], [0.4, 0.6]]}
//!   ]
//! }
//! ```
//!
//! `cpts` is optional. Each CPT lists its parents in variable order and one
//! row per parent configuration, last parent varying fastest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cpt, Dag, DiscreteBn, Variable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptSpec {
    pub node: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpts: Option<Vec<CptSpec>>,
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network documents always serialize")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn from_dag(dag: &Dag) -> Self {
        Self {
            variables: dag
                .variables()
                .iter()
                .map(|v| VariableSpec {
                    name: v.name().to_string(),
                    levels: v.levels().to_vec(),
                })
                .collect(),
            edges: dag
                .edges()
                .iter()
                .map(|&(p, c)| (dag.name(p).to_string(), dag.name(c).to_string()))
                .collect(),
            cpts: None,
        }
    }

    pub fn from_network(bn: &DiscreteBn) -> Self {
        let dag = bn.dag();
        let cpts = bn
            .cpts()
            .iter()
            .map(|cpt| CptSpec {
                node: dag.name(cpt.node()).to_string(),
                parents: cpt.parents().iter().map(|&p| dag.name(p).to_string()).collect(),
                rows: cpt.rows().map(<[f64]>::to_vec).collect(),
            })
            .collect();
        Self {
            cpts: Some(cpts),
            ..Self::from_dag(dag)
        }
    }

    pub fn dag(&self) -> Result<Dag> {
        let variables = self
            .variables
            .iter()
            .map(|v| Variable::new(v.name.clone(), v.levels.iter().cloned()))
            .collect::<Result<Vec<_>>>()?;
        Dag::from_named_edges(variables, &self.edges)
    }

    /// The parameterized network, or `None` when the document has no CPTs.
    pub fn network(&self) -> Result<Option<DiscreteBn>> {
        let Some(specs) = &self.cpts else {
            return Ok(None);
        };
        let dag = self.dag()?;
        if specs.len() != dag.len() {
            return Err(Error::CptCount {
                expected: dag.len(),
                found: specs.len(),
            });
        }
        let mut slots: Vec<Option<Cpt>> = vec![None; dag.len()];
        for spec in specs {
            let node = dag.index_of(&spec.node)?;
            let parents = spec
                .parents
                .iter()
                .map(|p| dag.index_of(p))
                .collect::<Result<Vec<_>>>()?;
            if parents != dag.parents(node) {
                return Err(Error::ParentMismatch {
                    node: spec.node.clone(),
                    expected: dag.parents(node).iter().map(|&p| dag.name(p).to_string()).collect(),
                    found: spec.parents.clone(),
                });
            }
            if slots[node].is_some() {
                return Err(Error::Format(format!("two CPTs given for `{}`", spec.node)));
            }
            slots[node] = Some(Cpt::for_dag(&dag, node, spec.rows.clone())?);
        }
        let cpts = slots.into_iter().map(|c| c.expect("one CPT per node")).collect();
        DiscreteBn::new(dag, cpts).map(Some)
    }
}
