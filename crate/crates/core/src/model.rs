//! Variables, DAGs, conditional probability tables, networks and datasets.
//!
//! Every CPT stores its rows in mixed-radix order over the parents' level
//! indices with the last parent varying fastest. Parents of a node are kept
//! sorted by variable index, so the same convention holds everywhere a parent
//! configuration is turned into a row number.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows whose sum misses 1 by at most this much are renormalized on load.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    name: String,
    levels: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>, L: Into<String>>(name: S, levels: impl IntoIterator<Item = L>) -> Result<Self> {
        let name = name.into();
        let levels: Vec<String> = levels.into_iter().map(Into::into).collect();
        if levels.is_empty() {
            return Err(Error::EmptyLevels(name));
        }
        let mut seen = HashSet::new();
        for level in &levels {
            if !seen.insert(level.as_str()) {
                return Err(Error::DuplicateLevel {
                    variable: name,
                    level: level.clone(),
                });
            }
        }
        Ok(Self { name, levels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn cardinality(&self) -> usize {
        self.levels.len()
    }

    /// Case-sensitive lookup of a level label.
    pub fn level_index(&self, label: &str) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLevel {
                variable: self.name.clone(),
                level: label.to_string(),
            })
    }

    pub fn level(&self, index: usize) -> Result<&str> {
        self.levels
            .get(index)
            .map(String::as_str)
            .ok_or_else(|| Error::LevelOutOfRange {
                variable: self.name.clone(),
                index,
                cardinality: self.levels.len(),
            })
    }
}

/// Row index of `values` in a mixed-radix layout with the last digit fastest.
pub fn mixed_radix_index(cards: &[usize], values: &[usize]) -> Option<usize> {
    if cards.len() != values.len() {
        return None;
    }
    let mut index = 0;
    for (&card, &value) in cards.iter().zip(values) {
        if value >= card {
            return None;
        }
        index = index * card + value;
    }
    Some(index)
}

/// Inverse of [`mixed_radix_index`].
pub fn mixed_radix_values(cards: &[usize], mut index: usize) -> Vec<usize> {
    let mut values = vec![0; cards.len()];
    for (slot, &card) in values.iter_mut().zip(cards).rev() {
        *slot = index % card;
        index /= card;
    }
    values
}

/// Advances `values` to the next mixed-radix configuration. Returns false
/// after wrapping around past the last one.
pub(crate) fn advance(cards: &[usize], values: &mut [usize]) -> bool {
    for pos in (0..cards.len()).rev() {
        values[pos] += 1;
        if values[pos] < cards[pos] {
            return true;
        }
        values[pos] = 0;
    }
    false
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    variables: Vec<Variable>,
    edges: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    topological: Vec<usize>,
    index: HashMap<String, usize>,
}

impl Dag {
    pub fn new(variables: Vec<Variable>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = variables.len();
        let mut index = HashMap::with_capacity(n);
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }

        let mut seen = BTreeSet::new();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (from, to) in edges {
            for endpoint in [from, to] {
                if endpoint >= n {
                    return Err(Error::InvalidEndpoint {
                        index: endpoint,
                        count: n,
                    });
                }
            }
            if from == to {
                return Err(Error::SelfLoop(variables[from].name.clone()));
            }
            if !seen.insert((from, to)) {
                return Err(Error::DuplicateEdge(
                    variables[from].name.clone(),
                    variables[to].name.clone(),
                ));
            }
            parents[to].push(from);
            children[from].push(to);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }

        // Kahn's algorithm, smallest ready index first.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topological = Vec::with_capacity(n);
        while let Some(&next) = ready.iter().next() {
            ready.remove(&next);
            topological.push(next);
            for &child in &children[next] {
                indegree[child] -= 1;
                if indegree[child] == 0 {
                    ready.insert(child);
                }
            }
        }
        if topological.len() != n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            return Err(Error::Cycle(variables[stuck].name.clone()));
        }

        Ok(Self {
            variables,
            edges: seen.into_iter().collect(),
            parents,
            children,
            topological,
            index,
        })
    }

    /// Builds a DAG from `(parent, child)` name pairs.
    pub fn from_named_edges<S: AsRef<str>>(variables: Vec<Variable>, edges: &[(S, S)]) -> Result<Self> {
        let lookup: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.name(), i)).collect();
        let find = |name: &str| {
            lookup
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let indexed = edges
            .iter()
            .map(|(a, b)| Ok((find(a.as_ref())?, find(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(variables, indexed)
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, i: usize) -> &Variable {
        &self.variables[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.variables[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parents of `i`, ascending by variable index.
    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topological
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.variables[i].cardinality()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    pub fn parent_cardinalities(&self, i: usize) -> Vec<usize> {
        self.parents[i].iter().map(|&p| self.cardinality(p)).collect()
    }

    /// Number of parent configurations of `i` (1 for a root).
    pub fn parent_configurations(&self, i: usize) -> usize {
        self.parents[i].iter().map(|&p| self.cardinality(p)).product()
    }

    /// Size of the full joint state space, saturating on overflow.
    pub fn joint_size(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.cardinality() as u128))
    }

    /// `seeds` together with all of their ancestors, as a membership mask.
    pub fn ancestral_mask(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if !mask[v] {
                mask[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        mask
    }

    pub(crate) fn check_variable(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::VariableOutOfRange(i))
        }
    }

    pub(crate) fn check_level(&self, i: usize, level: usize) -> Result<()> {
        self.check_variable(i)?;
        let card = self.cardinality(i);
        if level < card {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                variable: self.name(i).to_string(),
                index: level,
                cardinality: card,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    node: usize,
    parents: Vec<usize>,
    parent_cards: Vec<usize>,
    cardinality: usize,
    table: Vec<f64>,
}

impl Cpt {
    /// Validates and stores a CPT. `rows` must hold one probability vector per
    /// parent configuration, in mixed-radix order with the last parent fastest.
    pub fn new(
        node: usize,
        parents: Vec<usize>,
        parent_cards: Vec<usize>,
        cardinality: usize,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new_named(&format!("#{node}"), node, parents, parent_cards, cardinality, rows)
    }

    /// Builds the CPT of `node` using its parents in `dag`.
    pub fn for_dag(dag: &Dag, node: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        dag.check_variable(node)?;
        Self::new_named(
            dag.name(node),
            node,
            dag.parents(node).to_vec(),
            dag.parent_cardinalities(node),
            dag.cardinality(node),
            rows,
        )
    }

    fn new_named(
        label: &str,
        node: usize,
        parents: Vec<usize>,
        parent_cards: Vec<usize>,
        cardinality: usize,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if parents.len() != parent_cards.len() {
            return Err(Error::Cardinality {
                node: label.to_string(),
                detail: format!(
                    "{} parents but {} parent cardinalities",
                    parents.len(),
                    parent_cards.len()
                ),
            });
        }
        let configs: usize = parent_cards.iter().product();
        if rows.len() != configs {
            return Err(Error::Cardinality {
                node: label.to_string(),
                detail: format!("expected {configs} rows, found {}", rows.len()),
            });
        }
        let mut table = Vec::with_capacity(configs * cardinality);
        for (r, mut row) in rows.into_iter().enumerate() {
            if row.len() != cardinality {
                return Err(Error::Cardinality {
                    node: label.to_string(),
                    detail: format!("row {r} has {} entries, expected {cardinality}", row.len()),
                });
            }
            normalize_row(label, r, &mut row)?;
            table.extend(row);
        }
        Ok(Self {
            node,
            parents,
            parent_cards,
            cardinality,
            table,
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn row_count(&self) -> usize {
        self.table.len() / self.cardinality
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.table[index * self.cardinality..(index + 1) * self.cardinality]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.cardinality)
    }

    /// Flat table, row-major: `table[row * cardinality + level]`.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn prob(&self, level: usize, row: usize) -> f64 {
        self.table[row * self.cardinality + level]
    }

    pub fn parent_config_index(&self, parent_values: &[usize]) -> Result<usize> {
        if parent_values.len() != self.parents.len() {
            return Err(Error::LengthMismatch {
                expected: self.parents.len(),
                found: parent_values.len(),
            });
        }
        for (pos, (&v, &card)) in parent_values.iter().zip(&self.parent_cards).enumerate() {
            if v >= card {
                return Err(Error::LevelOutOfRange {
                    variable: format!("#{}", self.parents[pos]),
                    index: v,
                    cardinality: card,
                });
            }
        }
        Ok(mixed_radix_index(&self.parent_cards, parent_values).expect("checked above"))
    }

    pub fn parent_config_values(&self, row: usize) -> Result<Vec<usize>> {
        if row >= self.row_count() {
            return Err(Error::LevelOutOfRange {
                variable: format!("rows of #{}", self.node),
                index: row,
                cardinality: self.row_count(),
            });
        }
        Ok(mixed_radix_values(&self.parent_cards, row))
    }
}

fn normalize_row(label: &str, r: usize, row: &mut [f64]) -> Result<()> {
    for &p in row.iter() {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability {
                node: label.to_string(),
                row: r,
                value: p,
            });
        }
    }
    let sum: f64 = row.iter().sum();
    let gap = (sum - 1.0).abs();
    if gap > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized {
            node: label.to_string(),
            row: r,
            sum,
        });
    }
    if gap > row.len() as f64 * f64::EPSILON {
        log::debug!("renormalizing CPT row {r} of `{label}` (sum {sum:.17})");
        row.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBn {
    dag: Dag,
    cpts: Vec<Cpt>,
}

/// Validates that `cpts` describe a network over `dag`.
pub fn build_network(dag: Dag, mut cpts: Vec<Cpt>) -> Result<DiscreteBn> {
    if cpts.len() != dag.len() {
        return Err(Error::CptCount {
            expected: dag.len(),
            found: cpts.len(),
        });
    }
    cpts.sort_by_key(Cpt::node);
    for (i, cpt) in cpts.iter().enumerate() {
        if cpt.node != i {
            return Err(Error::CptCount {
                expected: dag.len(),
                found: cpts.len(),
            });
        }
        let names = |ps: &[usize]| -> Vec<String> {
            ps.iter()
                .map(|&p| dag.variables.get(p).map_or(format!("#{p}"), |v| v.name.clone()))
                .collect()
        };
        if cpt.parents != dag.parents(i) {
            return Err(Error::ParentMismatch {
                node: dag.name(i).to_string(),
                expected: names(dag.parents(i)),
                found: names(&cpt.parents),
            });
        }
        if cpt.parent_cards != dag.parent_cardinalities(i) || cpt.cardinality != dag.cardinality(i) {
            return Err(Error::Cardinality {
                node: dag.name(i).to_string(),
                detail: "table shape does not match the variables' level counts".to_string(),
            });
        }
    }
    Ok(DiscreteBn { dag, cpts })
}

impl DiscreteBn {
    pub fn new(dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        build_network(dag, cpts)
    }

    /// Builds a network from per-node row lists.
    pub fn from_rows(dag: Dag, rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if rows.len() != dag.len() {
            return Err(Error::CptCount {
                expected: dag.len(),
                found: rows.len(),
            });
        }
        let cpts = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| Cpt::for_dag(&dag, i, r))
            .collect::<Result<Vec<_>>>()?;
        build_network(dag, cpts)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    /// Conditional probability of `node = level` given the parent values in a
    /// full assignment.
    pub fn local_prob(&self, node: usize, assignment: &[usize]) -> f64 {
        let cpt = &self.cpts[node];
        let mut row = 0;
        for (&p, &card) in cpt.parents.iter().zip(&cpt.parent_cards) {
            row = row * card + assignment[p];
        }
        cpt.prob(assignment[node], row)
    }

    /// Copy of the network with one CPT row replaced, fully revalidated.
    pub fn with_row(&self, node: usize, row: usize, values: Vec<f64>) -> Result<Self> {
        self.dag.check_variable(node)?;
        let cpt = &self.cpts[node];
        if row >= cpt.row_count() {
            return Err(Error::LevelOutOfRange {
                variable: format!("rows of `{}`", self.dag.name(node)),
                index: row,
                cardinality: cpt.row_count(),
            });
        }
        let mut rows: Vec<Vec<f64>> = cpt.rows().map(<[f64]>::to_vec).collect();
        rows[row] = values;
        let replacement = Cpt::for_dag(&self.dag, node, rows)?;
        let mut cpts = self.cpts.clone();
        cpts[node] = replacement;
        Ok(Self {
            dag: self.dag.clone(),
            cpts,
        })
    }
}

/// Address of one CPT entry: `p(node = value | parents = parent_config)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamRef {
    pub node: usize,
    pub value: usize,
    pub parent_config: Vec<usize>,
}

impl ParamRef {
    pub fn new(node: usize, value: usize, parent_config: Vec<usize>) -> Self {
        Self {
            node,
            value,
            parent_config,
        }
    }

    /// Checks the reference against `bn` and returns the CPT row index.
    pub fn row_index(&self, bn: &DiscreteBn) -> Result<usize> {
        let dag = bn.dag();
        dag.check_level(self.node, self.value)?;
        let cpt = bn.cpt(self.node);
        if self.parent_config.len() != cpt.parents().len() {
            return Err(Error::LengthMismatch {
                expected: cpt.parents().len(),
                found: self.parent_config.len(),
            });
        }
        for (&p, &v) in cpt.parents().iter().zip(&self.parent_config) {
            dag.check_level(p, v)?;
        }
        cpt.parent_config_index(&self.parent_config)
    }

    pub fn current_value(&self, bn: &DiscreteBn) -> Result<f64> {
        let row = self.row_index(bn)?;
        Ok(bn.cpt(self.node).prob(self.value, row))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    variables: Vec<Variable>,
    rows: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(variables: Vec<Variable>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut names = HashSet::new();
        for v in &variables {
            if !names.insert(v.name()) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        for row in &rows {
            if row.len() != variables.len() {
                return Err(Error::LengthMismatch {
                    expected: variables.len(),
                    found: row.len(),
                });
            }
            for (v, &x) in variables.iter().zip(row) {
                v.level(x)?;
            }
        }
        Ok(Self { variables, rows })
    }

    /// Empty dataset over the variables of `dag`.
    pub fn empty(dag: &Dag) -> Self {
        Self {
            variables: dag.variables().to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Ensures columns line up with the DAG's variables (names and levels).
    pub fn check_matches(&self, dag: &Dag) -> Result<()> {
        if self.variables.len() != dag.len() {
            return Err(Error::LengthMismatch {
                expected: dag.len(),
                found: self.variables.len(),
            });
        }
        for (i, v) in self.variables.iter().enumerate() {
            let expected = dag.variable(i);
            if v.name != expected.name {
                return Err(Error::UnknownVariable(v.name.clone()));
            }
            if v.levels != expected.levels {
                return Err(Error::Format(format!(
                    "levels of `{}` in data {:?} differ from the network {:?}",
                    v.name, v.levels, expected.levels
                )));
            }
        }
        Ok(())
    }

    /// Re-expresses the dataset with columns ordered as in `dag`.
    pub fn aligned_to(&self, dag: &Dag) -> Result<Self> {
        let mut source = Vec::with_capacity(dag.len());
        let mut remap = Vec::with_capacity(dag.len());
        for target in dag.variables() {
            let col = self
                .variables
                .iter()
                .position(|v| v.name == target.name)
                .ok_or_else(|| Error::UnknownVariable(target.name.clone()))?;
            let levels: Vec<usize> = self.variables[col]
                .levels
                .iter()
                .map(|l| target.level_index(l))
                .collect::<Result<_>>()?;
            source.push(col);
            remap.push(levels);
        }
        if self.variables.len() != dag.len() {
            let extra = self
                .variables
                .iter()
                .find(|v| dag.index_of(&v.name).is_err())
                .map_or_else(String::new, |v| v.name.clone());
            return Err(Error::UnknownVariable(extra));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| source.iter().zip(&remap).map(|(&col, map)| map[row[col]]).collect())
            .collect();
        Ok(Self {
            variables: dag.variables().to_vec(),
            rows,
        })
    }

    /// Rows with row `skip` removed.
    pub fn without_row(&self, skip: usize) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, r)| r.clone())
            .collect();
        Self {
            variables: self.variables.clone(),
            rows,
        }
    }

    pub fn with_rows(&self, rows: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(self.variables.clone(), rows)
    }
}
