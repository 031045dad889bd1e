//! Exact inference: joint evaluation, variable elimination, full-joint
//! enumeration and d-separation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{advance, mixed_radix_index, Cpt, Dag, DiscreteBn};

/// Default cap on the number of joint states [`enumerate_joint`] will visit.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 22;

/// Observed values, keyed by variable index.
pub type Evidence = BTreeMap<usize, usize>;

/// Non-negative table over the joint levels of `scope` (ascending variable
/// indices, last variable fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<usize>,
    cards: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<usize>, cards: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(Error::LengthMismatch {
                expected: scope.len(),
                found: cards.len(),
            });
        }
        if scope.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("factor scope must be strictly ascending".into()));
        }
        let size: usize = cards.iter().product();
        if table.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&x| !(x >= 0.0)) {
            return Err(Error::Format(format!("factor entry {bad} is negative")));
        }
        Ok(Self { scope, cards, table })
    }

    fn unit() -> Self {
        Self {
            scope: Vec::new(),
            cards: Vec::new(),
            table: vec![1.0],
        }
    }

    /// Factor of a CPT, optionally with one row replaced by `row_override`.
    /// The override is not validated: sensitivity coefficients are read off
    /// affine extensions of a row that may leave the simplex.
    fn from_cpt(cpt: &Cpt, row_override: Option<(usize, &[f64])>) -> Self {
        let node = cpt.node();
        let mut scope: Vec<usize> = cpt.parents().to_vec();
        let insert_at = scope.partition_point(|&p| p < node);
        scope.insert(insert_at, node);
        let mut cards = cpt.parent_cardinalities().to_vec();
        cards.insert(insert_at, cpt.cardinality());

        let size: usize = cards.iter().product();
        let mut table = Vec::with_capacity(size);
        let mut values = vec![0; scope.len()];
        let mut parent_values = Vec::with_capacity(scope.len().saturating_sub(1));
        for _ in 0..size {
            parent_values.clear();
            parent_values.extend(
                values
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pos != insert_at)
                    .map(|(_, &v)| v),
            );
            let row = mixed_radix_index(cpt.parent_cardinalities(), &parent_values).expect("parent values in range");
            let level = values[insert_at];
            let p = match row_override {
                Some((r, replacement)) if r == row => replacement[level],
                _ => cpt.prob(level, row),
            };
            table.push(p);
            advance(&cards, &mut values);
        }
        Self { scope, cards, table }
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    /// Entry for the given values of the scope variables (in scope order).
    pub fn value(&self, values: &[usize]) -> Option<f64> {
        mixed_radix_index(&self.cards, values).map(|i| self.table[i])
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    fn product(&self, other: &Factor) -> Factor {
        let mut scope = Vec::with_capacity(self.scope.len() + other.scope.len());
        let mut cards = Vec::with_capacity(scope.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.scope.len() || j < other.scope.len() {
            let take_self = j >= other.scope.len() || (i < self.scope.len() && self.scope[i] <= other.scope[j]);
            if take_self {
                if j < other.scope.len() && self.scope[i] == other.scope[j] {
                    j += 1;
                }
                scope.push(self.scope[i]);
                cards.push(self.cards[i]);
                i += 1;
            } else {
                scope.push(other.scope[j]);
                cards.push(other.cards[j]);
                j += 1;
            }
        }
        let sa = strides_within(&scope, &self.scope, &self.cards);
        let sb = strides_within(&scope, &other.scope, &other.cards);
        let size: usize = cards.iter().product();
        let mut table = Vec::with_capacity(size);
        let mut values = vec![0; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            table.push(self.table[ia] * other.table[ib]);
            for pos in (0..scope.len()).rev() {
                values[pos] += 1;
                ia += sa[pos];
                ib += sb[pos];
                if values[pos] < cards[pos] {
                    break;
                }
                ia -= sa[pos] * cards[pos];
                ib -= sb[pos] * cards[pos];
                values[pos] = 0;
            }
        }
        Factor { scope, cards, table }
    }

    fn split(&self, var: usize) -> Option<(usize, usize, usize, usize)> {
        let pos = self.scope.iter().position(|&v| v == var)?;
        let outer: usize = self.cards[..pos].iter().product();
        let inner: usize = self.cards[pos + 1..].iter().product();
        Some((pos, outer, self.cards[pos], inner))
    }

    fn sum_out(&self, var: usize) -> Factor {
        let Some((pos, outer, card, inner)) = self.split(var) else {
            return self.clone();
        };
        let mut table = vec![0.0; outer * inner];
        for o in 0..outer {
            for v in 0..card {
                let base = (o * card + v) * inner;
                for i in 0..inner {
                    table[o * inner + i] += self.table[base + i];
                }
            }
        }
        self.without(pos, table)
    }

    fn reduce(&self, var: usize, level: usize) -> Factor {
        let Some((pos, outer, card, inner)) = self.split(var) else {
            return self.clone();
        };
        let mut table = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * card + level) * inner;
            table.extend_from_slice(&self.table[base..base + inner]);
        }
        self.without(pos, table)
    }

    fn without(&self, pos: usize, table: Vec<f64>) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        Factor { scope, cards, table }
    }
}

fn strides_within(union: &[usize], scope: &[usize], cards: &[usize]) -> Vec<usize> {
    let mut own = vec![0; scope.len()];
    let mut stride = 1;
    for pos in (0..scope.len()).rev() {
        own[pos] = stride;
        stride *= cards[pos];
    }
    union
        .iter()
        .map(|v| scope.iter().position(|s| s == v).map_or(0, |p| own[p]))
        .collect()
}

/// Request for the distribution of `targets` given `evidence`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    targets: Vec<usize>,
    evidence: Evidence,
}

impl Query {
    /// Targets are stored ascending; the result of [`query`] uses that order.
    pub fn new(targets: impl IntoIterator<Item = usize>, evidence: Evidence) -> Result<Self> {
        let targets: Vec<usize> = targets.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if targets.is_empty() {
            return Err(Error::EmptyTargets);
        }
        if let Some(&shared) = targets.iter().find(|t| evidence.contains_key(t)) {
            return Err(Error::OverlappingSets(format!("#{shared}")));
        }
        Ok(Self { targets, evidence })
    }

    pub fn marginal(target: usize) -> Self {
        Self {
            targets: vec![target],
            evidence: Evidence::new(),
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }

    fn validate(&self, dag: &Dag) -> Result<()> {
        for &t in &self.targets {
            dag.check_variable(t)?;
        }
        for (&v, &level) in &self.evidence {
            dag.check_level(v, level)?;
        }
        Ok(())
    }
}

/// A single outcome `y_O` of interest together with evidence `y_E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventQuery {
    outcome: BTreeMap<usize, usize>,
    evidence: Evidence,
}

impl EventQuery {
    pub fn new(outcome: BTreeMap<usize, usize>, evidence: Evidence) -> Result<Self> {
        if outcome.is_empty() {
            return Err(Error::EmptyTargets);
        }
        if let Some(&shared) = outcome.keys().find(|t| evidence.contains_key(t)) {
            return Err(Error::OverlappingSets(format!("#{shared}")));
        }
        Ok(Self { outcome, evidence })
    }

    pub fn single(node: usize, value: usize, evidence: Evidence) -> Result<Self> {
        Self::new(BTreeMap::from([(node, value)]), evidence)
    }

    pub fn outcome(&self) -> &BTreeMap<usize, usize> {
        &self.outcome
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }

    pub fn validate(&self, dag: &Dag) -> Result<()> {
        for (&v, &level) in self.outcome.iter().chain(&self.evidence) {
            dag.check_level(v, level)?;
        }
        Ok(())
    }

    /// Outcome and evidence merged into one set of observations.
    pub fn joint_evidence(&self) -> Evidence {
        let mut all = self.evidence.clone();
        all.extend(&self.outcome);
        all
    }
}

/// Product of local conditional probabilities for a full assignment.
pub fn joint_probability(bn: &DiscreteBn, assignment: &[usize]) -> Result<f64> {
    let dag = bn.dag();
    if assignment.len() != dag.len() {
        return Err(Error::LengthMismatch {
            expected: dag.len(),
            found: assignment.len(),
        });
    }
    for (i, &level) in assignment.iter().enumerate() {
        dag.check_level(i, level)?;
    }
    Ok((0..dag.len()).map(|i| bn.local_prob(i, assignment)).product())
}

/// Elimination ordering strategy.
#[derive(Debug, Clone, Copy)]
enum Ordering<'a> {
    MinDegree,
    Fixed(&'a [usize]),
}

/// Unnormalized `p(targets, evidence)` over the targets' joint levels.
fn eliminate(
    bn: &DiscreteBn,
    targets: &[usize],
    evidence: &Evidence,
    ordering: Ordering<'_>,
    row_override: Option<(usize, usize, &[f64])>,
) -> Factor {
    let dag = bn.dag();
    let relevant = dag.ancestral_mask(targets.iter().copied().chain(evidence.keys().copied()));

    let mut factors: Vec<Factor> = (0..dag.len())
        .filter(|&i| relevant[i])
        .map(|i| {
            let ovr = match row_override {
                Some((node, row, values)) if node == i => Some((row, values)),
                _ => None,
            };
            let mut f = Factor::from_cpt(bn.cpt(i), ovr);
            for (&var, &level) in evidence {
                f = f.reduce(var, level);
            }
            f
        })
        .collect();

    let mut pending: BTreeSet<usize> = (0..dag.len())
        .filter(|&i| relevant[i] && !evidence.contains_key(&i) && targets.binary_search(&i).is_err())
        .collect();

    let mut fixed = match ordering {
        Ordering::Fixed(order) => order.iter().copied().filter(|v| pending.contains(v)).collect(),
        Ordering::MinDegree => Vec::new(),
    }
    .into_iter();

    while !pending.is_empty() {
        let var = match ordering {
            Ordering::Fixed(_) => fixed
                .next()
                .unwrap_or_else(|| *pending.iter().next().expect("non-empty")),
            Ordering::MinDegree => min_degree_choice(&pending, &factors),
        };
        pending.remove(&var);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&var));
        factors = rest;
        if let Some(merged) = touching.iter().fold(None::<Factor>, |acc, f| {
            Some(match acc {
                None => f.clone(),
                Some(a) => a.product(f),
            })
        }) {
            factors.push(merged.sum_out(var));
        }
    }

    let mut result = factors.iter().fold(Factor::unit(), |acc, f| acc.product(f));
    for &t in targets {
        if !result.scope.contains(&t) {
            let card = dag.cardinality(t);
            result = result.product(&Factor {
                scope: vec![t],
                cards: vec![card],
                table: vec![1.0; card],
            });
        }
    }
    result
}

fn min_degree_choice(pending: &BTreeSet<usize>, factors: &[Factor]) -> usize {
    let mut best = None::<(usize, usize)>;
    for &var in pending {
        let mut neighbours = BTreeSet::new();
        for f in factors.iter().filter(|f| f.scope.contains(&var)) {
            neighbours.extend(f.scope.iter().copied().filter(|&v| v != var));
        }
        let degree = neighbours.len();
        if best.is_none_or(|(d, _)| degree < d) {
            best = Some((degree, var));
        }
    }
    best.expect("pending is non-empty").1
}

fn normalized(mut factor: Factor) -> Result<Factor> {
    let total = factor.total();
    if !(total > 0.0) {
        return Err(Error::ImpossibleEvidence);
    }
    factor.table.iter_mut().for_each(|p| *p /= total);
    Ok(factor)
}

/// Exact conditional distribution of the query targets given the evidence,
/// by variable elimination with a greedy min-degree ordering.
pub fn query(bn: &DiscreteBn, q: &Query) -> Result<Factor> {
    q.validate(bn.dag())?;
    normalized(eliminate(bn, &q.targets, &q.evidence, Ordering::MinDegree, None))
}

/// As [`query`], eliminating variables in the given order. Variables that are
/// not eliminated (targets, evidence, pruned) are skipped; any that `order`
/// misses are eliminated afterwards in index order.
pub fn query_with_order(bn: &DiscreteBn, q: &Query, order: &[usize]) -> Result<Factor> {
    q.validate(bn.dag())?;
    normalized(eliminate(bn, &q.targets, &q.evidence, Ordering::Fixed(order), None))
}

/// Probability of the evidence, `p(y_E)`. Empty evidence gives 1.
pub fn evidence_probability(bn: &DiscreteBn, evidence: &Evidence) -> Result<f64> {
    for (&v, &level) in evidence {
        bn.dag().check_level(v, level)?;
    }
    Ok(eliminate(bn, &[], evidence, Ordering::MinDegree, None).total())
}

/// `p(y_O | y_E)` for an event query.
pub fn event_probability(bn: &DiscreteBn, q: &EventQuery) -> Result<f64> {
    q.validate(bn.dag())?;
    let (numerator, denominator) = event_terms(bn, q, None);
    if !(denominator > 0.0) {
        return Err(Error::ImpossibleEvidence);
    }
    Ok(numerator / denominator)
}

/// `(p(y_O, y_E), p(y_E))`, optionally with CPT row `(node, row)` replaced.
pub(crate) fn event_terms(bn: &DiscreteBn, q: &EventQuery, row_override: Option<(usize, usize, &[f64])>) -> (f64, f64) {
    let numerator = eliminate(bn, &[], &q.joint_evidence(), Ordering::MinDegree, row_override).total();
    let denominator = eliminate(bn, &[], &q.evidence, Ordering::MinDegree, row_override).total();
    (numerator, denominator)
}

/// Full joint distribution in mixed-radix order over all variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub cardinalities: Vec<usize>,
    pub probs: Vec<f64>,
}

impl JointTable {
    /// Conditional distribution of `targets` (ascending) given `evidence`,
    /// obtained by summing matching joint entries.
    pub fn conditional(&self, targets: &[usize], evidence: &Evidence) -> Result<Vec<f64>> {
        let target_cards: Vec<usize> = targets.iter().map(|&t| self.cardinalities[t]).collect();
        let mut out = vec![0.0; target_cards.iter().product()];
        let mut values = vec![0; self.cardinalities.len()];
        let mut picked = vec![0; targets.len()];
        for &p in &self.probs {
            if evidence.iter().all(|(&v, &l)| values[v] == l) {
                for (slot, &t) in picked.iter_mut().zip(targets) {
                    *slot = values[t];
                }
                out[mixed_radix_index(&target_cards, &picked).expect("in range")] += p;
            }
            advance(&self.cardinalities, &mut values);
        }
        let total: f64 = out.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ImpossibleEvidence);
        }
        out.iter_mut().for_each(|p| *p /= total);
        Ok(out)
    }
}

/// Enumerates `p_G(y)` for every joint state, refusing state spaces larger
/// than `cap` (default [`DEFAULT_ENUMERATION_CAP`]).
pub fn enumerate_joint(bn: &DiscreteBn, cap: Option<usize>) -> Result<JointTable> {
    let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let dag = bn.dag();
    let size = dag.joint_size();
    if size > cap as u128 {
        return Err(Error::StateSpaceTooLarge { size, cap });
    }
    let cards = dag.cardinalities();
    let mut probs = Vec::with_capacity(size as usize);
    let mut values = vec![0; dag.len()];
    for _ in 0..size {
        probs.push((0..dag.len()).map(|i| bn.local_prob(i, &values)).product());
        advance(&cards, &mut values);
    }
    Ok(JointTable {
        cardinalities: cards,
        probs,
    })
}

/// Whether `a` and `b` are d-separated given `c`, decided by separation in
/// the moral graph of the ancestral set of `a ∪ b ∪ c`.
pub fn d_separated(dag: &Dag, a: &BTreeSet<usize>, b: &BTreeSet<usize>, c: &BTreeSet<usize>) -> Result<bool> {
    for &v in a.iter().chain(b).chain(c) {
        dag.check_variable(v)?;
    }
    for (x, y) in [(a, b), (a, c), (b, c)] {
        if let Some(&shared) = x.intersection(y).next() {
            return Err(Error::OverlappingSets(dag.name(shared).to_string()));
        }
    }
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }

    let mask = dag.ancestral_mask(a.iter().chain(b).chain(c).copied());
    let mut adj = vec![Vec::new(); dag.len()];
    for v in (0..dag.len()).filter(|&v| mask[v]) {
        let parents = dag.parents(v);
        for (i, &p) in parents.iter().enumerate() {
            adj[v].push(p);
            adj[p].push(v);
            for &q in &parents[i + 1..] {
                adj[p].push(q);
                adj[q].push(p);
            }
        }
    }

    let mut seen = vec![false; dag.len()];
    let mut queue: VecDeque<usize> = a.iter().copied().collect();
    for &v in a {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        if b.contains(&v) {
            return Ok(false);
        }
        for &w in &adj[v] {
            if !seen[w] && !c.contains(&w) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variable;

    fn binary(name: &str) -> Variable {
        Variable::new(name, ["0", "1"]).unwrap()
    }

    fn figure_one() -> DiscreteBn {
        let vars = (1..=5).map(|i| binary(&format!("Y{i}"))).collect();
        let dag = Dag::new(vars, [(0, 2), (0, 3), (1, 3), (2, 4), (3, 4)]).unwrap();
        DiscreteBn::from_rows(
            dag,
            vec![
                vec![vec![0.3, 0.7]],
                vec![vec![0.6, 0.4]],
                vec![vec![0.2, 0.8], vec![0.9, 0.1]],
                vec![vec![0.5, 0.5], vec![0.1, 0.9], vec![0.25, 0.75], vec![0.7, 0.3]],
                vec![vec![0.4, 0.6], vec![0.35, 0.65], vec![0.8, 0.2], vec![0.05, 0.95]],
            ],
        )
        .unwrap()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn independent_uniform_pair() {
        let dag = Dag::new(vec![binary("A"), binary("B")], []).unwrap();
        let bn = DiscreteBn::from_rows(dag, vec![vec![vec![0.5, 0.5]]; 2]).unwrap();
        assert_eq!(joint_probability(&bn, &[0, 0]).unwrap(), 0.25);
    }

    #[test]
    fn factorization_matches_figure_one_terms() {
        let bn = figure_one();
        let y = [1, 0, 1, 1, 0];
        let expected = bn.cpt(4).prob(0, 3) // p(y5 | y3=1, y4=1)
            * bn.cpt(3).prob(1, 2) // p(y4 | y1=1, y2=0)
            * bn.cpt(2).prob(1, 1) // p(y3 | y1=1)
            * bn.cpt(1).prob(0, 0)
            * bn.cpt(0).prob(1, 0);
        assert_eq!(joint_probability(&bn, &y).unwrap(), expected);
    }

    #[test]
    fn incomplete_assignment_is_rejected() {
        assert!(matches!(
            joint_probability(&figure_one(), &[0, 1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn root_marginal_is_its_cpt_row() {
        let bn = figure_one();
        let dist = query(&bn, &Query::marginal(1)).unwrap();
        assert_eq!(dist.table(), &[0.6, 0.4]);
    }

    #[test]
    fn enumeration_single_node() {
        let dag = Dag::new(vec![binary("A")], []).unwrap();
        let bn = DiscreteBn::from_rows(dag, vec![vec![vec![0.3, 0.7]]]).unwrap();
        assert_eq!(enumerate_joint(&bn, None).unwrap().probs, vec![0.3, 0.7]);
    }

    #[test]
    fn enumeration_figure_one_sums_to_one() {
        let joint = enumerate_joint(&figure_one(), None).unwrap();
        assert_eq!(joint.probs.len(), 32);
        assert!((joint.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        assert!(matches!(
            enumerate_joint(&figure_one(), Some(16)),
            Err(Error::StateSpaceTooLarge { size: 32, cap: 16 })
        ));
    }

    #[test]
    fn impossible_evidence_is_an_error() {
        let dag = Dag::new(vec![binary("A"), binary("B")], [(0, 1)]).unwrap();
        let bn = DiscreteBn::from_rows(dag, vec![vec![vec![1.0, 0.0]], vec![vec![0.5, 0.5], vec![0.5, 0.5]]]).unwrap();
        let q = Query::new([1], Evidence::from([(0, 1)])).unwrap();
        assert!(matches!(query(&bn, &q), Err(Error::ImpossibleEvidence)));
    }

    #[test]
    fn overlapping_query_sets_are_rejected() {
        assert!(matches!(
            Query::new([0], Evidence::from([(0, 1)])),
            Err(Error::OverlappingSets(_))
        ));
        assert!(matches!(Query::new([], Evidence::new()), Err(Error::EmptyTargets)));
    }

    #[test]
    fn figure_one_d_separation() {
        let dag = figure_one().dag().clone();
        // Y2 ⊥ Y1
        assert!(d_separated(&dag, &set(&[1]), &set(&[0]), &set(&[])).unwrap());
        // Y5 ⊥ {Y1, Y2} | {Y3, Y4}
        assert!(d_separated(&dag, &set(&[4]), &set(&[0, 1]), &set(&[2, 3])).unwrap());
        // Y3 and Y4 are connected through Y1 and through the collider Y5.
        assert!(!d_separated(&dag, &set(&[2]), &set(&[3]), &set(&[4])).unwrap());
        // Y3 ⊥ Y2 | Y1 and Y4 ⊥ Y3 | {Y1, Y2}
        assert!(d_separated(&dag, &set(&[2]), &set(&[1]), &set(&[0])).unwrap());
        assert!(d_separated(&dag, &set(&[3]), &set(&[2]), &set(&[0, 1])).unwrap());
        assert!(matches!(
            d_separated(&dag, &set(&[1]), &set(&[1]), &set(&[])),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn multi_target_query_matches_enumeration() {
        let bn = figure_one();
        let joint = enumerate_joint(&bn, None).unwrap();
        let evidence = Evidence::from([(4, 1)]);
        let q = Query::new([3, 0], evidence.clone()).unwrap();
        let ve = query(&bn, &q).unwrap();
        let oracle = joint.conditional(&[0, 3], &evidence).unwrap();
        for (a, b) in ve.table().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
