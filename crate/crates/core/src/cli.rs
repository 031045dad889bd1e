//! Command-line front end. Every subcommand loads its inputs, calls one
//! library operation and renders the result as a table.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bayes::{default_prior, mle_bn, posterior_mean_bn, CountTable, DirichletSpec};
use crate::error::{Error, Result};
use crate::inference::{event_probability, query, EventQuery, Evidence, Query};
use crate::io::{self, Cell, LineChart, MedianTie, NetworkFile, Series, Table};
use crate::model::{mixed_radix_values, Dag, Dataset, DiscreteBn, ParamRef};
use crate::monitors::{
    global_monitor_with, influential_obs, seq_cond_monitor, seq_marg_monitor, seq_pa_ch_monitor, GlobalMethod,
    MonitorSeries,
};
use crate::sample::forward_sample;
use crate::sensitivity::{
    distances, sensitivity, sensquery, CovariationScheme, DistanceMethod, DistanceResult, NewValues,
};

/// Z reference band drawn on monitor plots.
const Z_BAND: f64 = 1.96;

#[derive(Debug, Parser)]
#[command(
    name = "bnaudit",
    version,
    about = "Robustness and sensitivity diagnostics for discrete Bayesian networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior probabilities by exact inference.
    Query(QueryArgs),
    /// Estimate CPTs from data.
    Fit(FitArgs),
    /// Prequential monitors.
    #[command(subcommand)]
    Monitor(MonitorCommand),
    /// Leave-one-out influence of each observation on the marginal likelihood.
    Influence(InfluenceArgs),
    /// Sensitivity function of a query probability to one CPT parameter.
    Sensitivity(SensitivityArgs),
    /// CD distance between the network and its one-parameter perturbations.
    Cd(DistanceArgs),
    /// KL divergence and Jeffreys distance for one-parameter perturbations.
    Kl(KlArgs),
    /// Single-parameter changes that bring a query probability to a target.
    Sensquery(SensqueryArgs),
    /// Discretize the raw Pima Indians diabetes file.
    PrepPima(PrepPimaArgs),
    /// Draw a seeded random sample from a parameterized network.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
pub enum MonitorCommand {
    /// Per-node contribution to the negative log marginal likelihood.
    Global(GlobalArgs),
    /// Marginal node monitor.
    Marginal(NodeMonitorArgs),
    /// Conditional node monitor (node given the rest of its row).
    Conditional(NodeMonitorArgs),
    /// Parent-child monitor for one parent configuration.
    PaCh(PaChArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    /// Relative frequencies (uniform rows where a configuration is unseen).
    #[default]
    Mle,
    /// Dirichlet posterior means under the `--alpha` prior.
    Posterior,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum CovariationArg {
    #[default]
    Proportional,
    Uniform,
    OrderPreserving,
}

impl From<CovariationArg> for CovariationScheme {
    fn from(arg: CovariationArg) -> Self {
        match arg {
            CovariationArg::Proportional => CovariationScheme::Proportional,
            CovariationArg::Uniform => CovariationScheme::Uniform,
            CovariationArg::OrderPreserving => CovariationScheme::OrderPreserving,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum QueryType {
    /// Marginal of each target given the evidence.
    #[default]
    Marginal,
    /// Joint of all targets given the evidence.
    Joint,
    /// Targets given every configuration of the evidence variables.
    Conditional,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum GlobalMethodArg {
    #[default]
    Prequential,
    PlugIn,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum TieArg {
    #[default]
    Low,
    High,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum DistanceMethodArg {
    Local,
    Enumerate,
    #[default]
    Auto,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Network document (JSON).
    #[arg(long)]
    pub dag: PathBuf,
    /// Dataset (CSV with a header of variable names).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Every Dirichlet hyperparameter set to this value (default: the number
    /// of levels of the node).
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ParamSourceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// How CPTs are estimated when `--data` is given.
    #[arg(long, value_enum, default_value_t)]
    pub estimator: EstimatorArg,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub source: ParamSourceArgs,
    /// Target variables.
    #[arg(long = "target", value_delimiter = ',', required = true)]
    pub targets: Vec<String>,
    /// Evidence as NAME=level pairs.
    #[arg(long, value_delimiter = ',')]
    pub evidence: Vec<String>,
    #[arg(long = "type", value_enum, default_value_t)]
    pub query_type: QueryType,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: ParamSourceArgs,
    /// `json` writes a network document, `csv` a long-format CPT table.
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t)]
    pub method: GlobalMethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NodeMonitorArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub node: String,
    /// Line chart of Z against the series index.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PaChArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub node: String,
    /// Parent names matching `--value-parents` (default: DAG parent order).
    #[arg(long, value_delimiter = ',')]
    pub parents: Vec<String>,
    /// Parent levels defining the configuration.
    #[arg(long, value_delimiter = ',')]
    pub value_parents: Vec<String>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InfluenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Only the K most influential rows, in decreasing order of score.
    #[arg(long)]
    pub top: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Node whose CPT entry is varied.
    #[arg(long)]
    pub node: String,
    /// Level of the varied entry.
    #[arg(long)]
    pub value_node: String,
    /// Parent levels of the varied row, in DAG parent order.
    #[arg(long, value_delimiter = ',')]
    pub value_parents: Vec<String>,
    /// `all` for 101 points on [0, 1], or a comma-separated list.
    #[arg(long, default_value = "all")]
    pub new_value: String,
    #[arg(long, value_enum, default_value_t)]
    pub covariation: CovariationArg,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub source: ParamSourceArgs,
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long)]
    pub interest_node: String,
    #[arg(long)]
    pub interest_value: String,
    #[arg(long, value_delimiter = ',')]
    pub evidence: Vec<String>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub source: ParamSourceArgs,
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct KlArgs {
    #[command(flatten)]
    pub distance: DistanceArgs,
    #[arg(long, value_enum, default_value_t)]
    pub method: DistanceMethodArg,
}

#[derive(Debug, Args)]
pub struct SensqueryArgs {
    #[command(flatten)]
    pub source: ParamSourceArgs,
    /// Event of interest as NAME=level (alternative to the interest flags).
    #[arg(long, conflicts_with_all = ["interest_node", "interest_value"])]
    pub target: Option<String>,
    #[arg(long, requires = "interest_value")]
    pub interest_node: Option<String>,
    #[arg(long, requires = "interest_node")]
    pub interest_value: Option<String>,
    /// Desired value of the query probability.
    #[arg(long, alias = "value")]
    pub target_value: f64,
    #[arg(long, value_delimiter = ',')]
    pub evidence: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PrepPimaArgs {
    /// Raw 9-column numeric file.
    #[arg(long)]
    pub raw: PathBuf,
    /// Side that values equal to the median fall on.
    #[arg(long, value_enum, default_value_t)]
    pub tie: TieArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: ParamSourceArgs,
    #[arg(long)]
    pub rows: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code: 0 on success, 2 for invalid input, 3 when
/// the computation hits a degenerate model.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_degeneracy() {
                3
            } else {
                2
            }
        }
    }
}

pub fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Query(a) => cmd_query(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Monitor(m) => match m {
            MonitorCommand::Global(a) => cmd_global(a, stdout),
            MonitorCommand::Marginal(a) => cmd_node_monitor(a, false, stdout),
            MonitorCommand::Conditional(a) => cmd_node_monitor(a, true, stdout),
            MonitorCommand::PaCh(a) => cmd_pa_ch(a, stdout),
        },
        Command::Influence(a) => cmd_influence(a, stdout),
        Command::Sensitivity(a) => cmd_sensitivity(a, stdout),
        Command::Cd(a) => cmd_distance(a, None, stdout),
        Command::Kl(a) => {
            let method = match a.method {
                DistanceMethodArg::Local => DistanceMethod::Local,
                DistanceMethodArg::Enumerate => DistanceMethod::Enumerate,
                DistanceMethodArg::Auto => DistanceMethod::Auto,
            };
            cmd_distance(a.distance, Some(method), stdout)
        }
        Command::Sensquery(a) => cmd_sensquery(a, stdout),
        Command::PrepPima(a) => cmd_prep_pima(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    }
}

fn with_context(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => Error::Format(format!("{}: {e}", path.display())),
        other => other,
    }
}

/// Loaded structure, optional data and prior.
struct Model {
    file: NetworkFile,
    dag: Dag,
    data: Option<Dataset>,
    prior: DirichletSpec,
}

impl Model {
    fn load(args: &ModelArgs) -> Result<Self> {
        let file = NetworkFile::read(&args.dag)?;
        let dag = file.dag().map_err(|e| with_context(&args.dag, e))?;
        let data = args
            .data
            .as_ref()
            .map(|path| io::load_dataset(path, dag.variables()))
            .transpose()?;
        let prior = match args.alpha {
            Some(alpha) => DirichletSpec::uniform(&dag, alpha)?,
            None => default_prior(&dag),
        };
        Ok(Self { file, dag, data, prior })
    }

    fn data(&self) -> Result<&Dataset> {
        self.data
            .as_ref()
            .ok_or_else(|| Error::Format("this subcommand needs --data".into()))
    }

    /// CPTs estimated from `--data` when given, otherwise those in the network
    /// document.
    fn network(&self, estimator: EstimatorArg) -> Result<DiscreteBn> {
        match &self.data {
            Some(data) => {
                let counts = CountTable::from_dataset(&self.dag, data)?;
                match estimator {
                    EstimatorArg::Mle => mle_bn(&self.dag, &counts),
                    EstimatorArg::Posterior => posterior_mean_bn(&self.dag, &self.prior, &counts),
                }
            }
            None => self
                .file
                .network()?
                .ok_or_else(|| Error::Format("the network document has no CPTs; pass --data to estimate them".into())),
        }
    }
}

fn load_network(source: &ParamSourceArgs) -> Result<DiscreteBn> {
    Model::load(&source.model)?.network(source.estimator)
}

fn emit(table: &Table, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    let format = match output.format {
        FormatArg::Csv => io::Format::Csv,
        FormatArg::Json => io::Format::Json,
    };
    match &output.out {
        Some(path) => {
            let mut buf = Vec::new();
            table.write(&mut buf, format)?;
            fs::write(path, buf).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
        }
        None => table.write(stdout, format),
    }
}

fn write_text(path: Option<&Path>, text: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display()))),
        None => Ok(stdout.write_all(text)?),
    }
}

fn write_plot(path: Option<&PathBuf>, chart: &LineChart) -> Result<()> {
    if let Some(path) = path {
        fs::write(path, chart.render()).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Parses `NAME=level` pairs.
pub fn parse_assignments(dag: &Dag, pairs: &[String]) -> Result<Evidence> {
    let mut out = Evidence::new();
    for pair in pairs.iter().filter(|p| !p.trim().is_empty()) {
        let (name, level) = pair
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected NAME=level, found `{pair}`")))?;
        let node = dag.index_of(name.trim())?;
        let value = dag.variable(node).level_index(level.trim())?;
        if out.insert(node, value).is_some_and(|v| v != value) {
            return Err(Error::Format(format!("conflicting values for `{}`", name.trim())));
        }
    }
    Ok(out)
}

fn parse_new_values(spec: &str) -> Result<NewValues> {
    if spec.trim() == "all" {
        return Ok(NewValues::All);
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("`{s}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()
        .map(NewValues::Points)
}

fn param_ref(dag: &Dag, args: &ParamArgs) -> Result<ParamRef> {
    let node = dag.index_of(&args.node)?;
    let value = dag.variable(node).level_index(&args.value_node)?;
    let parents = dag.parents(node);
    let given: Vec<&String> = args.value_parents.iter().filter(|s| !s.trim().is_empty()).collect();
    if given.len() != parents.len() {
        return Err(Error::LengthMismatch {
            expected: parents.len(),
            found: given.len(),
        });
    }
    let config = parents
        .iter()
        .zip(given)
        .map(|(&p, label)| dag.variable(p).level_index(label.trim()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParamRef::new(node, value, config))
}

fn level_name(dag: &Dag, node: usize, value: usize) -> String {
    dag.variable(node).levels()[value].clone()
}

fn config_label(dag: &Dag, parents: &[usize], values: &[usize]) -> String {
    parents
        .iter()
        .zip(values)
        .map(|(&p, &v)| format!("{}={}", dag.name(p), level_name(dag, p, v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_query(args: QueryArgs, stdout: &mut dyn Write) -> Result<()> {
    let bn = load_network(&args.source)?;
    let dag = bn.dag();
    let targets = args
        .targets
        .iter()
        .map(|t| dag.index_of(t.trim()))
        .collect::<Result<Vec<_>>>()?;
    let evidence = parse_assignments(dag, &args.evidence)?;
    let names = |nodes: &[usize]| nodes.iter().map(|&n| dag.name(n).to_string()).collect::<Vec<_>>();

    let table = match args.query_type {
        QueryType::Marginal => {
            let mut table = Table::new(["node", "level", "probability"]);
            for &t in &targets {
                let f = query(&bn, &Query::new([t], evidence.clone())?)?;
                for (k, &p) in f.table().iter().enumerate() {
                    table.push(vec![dag.name(t).into(), level_name(dag, t, k).into(), p.into()]);
                }
            }
            table
        }
        QueryType::Joint => {
            let q = Query::new(targets, evidence)?;
            let f = query(&bn, &q)?;
            let scope = q.targets().to_vec();
            let mut table = Table::new(names(&scope).into_iter().chain(["probability".to_string()]));
            for (i, &p) in f.table().iter().enumerate() {
                let values = mixed_radix_values(f.cardinalities(), i);
                let mut row: Vec<Cell> = scope
                    .iter()
                    .zip(&values)
                    .map(|(&n, &v)| level_name(dag, n, v).into())
                    .collect();
                row.push(p.into());
                table.push(row);
            }
            table
        }
        QueryType::Conditional => {
            let given: Vec<usize> = evidence.keys().copied().collect();
            let q = Query::new(targets, Evidence::new())?;
            let scope = q.targets().to_vec();
            for g in &given {
                if scope.contains(g) {
                    return Err(Error::OverlappingSets(dag.name(*g).to_string()));
                }
            }
            let given_cards: Vec<usize> = given.iter().map(|&g| dag.cardinality(g)).collect();
            let mut table = Table::new(
                names(&given)
                    .into_iter()
                    .chain(names(&scope))
                    .chain(["probability".to_string()]),
            );
            let configs: usize = given_cards.iter().product();
            for c in 0..configs {
                let values = mixed_radix_values(&given_cards, c);
                let ev: Evidence = given.iter().copied().zip(values.iter().copied()).collect();
                let f = query(&bn, &Query::new(scope.iter().copied(), ev)?);
                let cards: Vec<usize> = scope.iter().map(|&n| dag.cardinality(n)).collect();
                let size: usize = cards.iter().product();
                for i in 0..size {
                    let tv = mixed_radix_values(&cards, i);
                    let mut row: Vec<Cell> = given
                        .iter()
                        .zip(&values)
                        .map(|(&n, &v)| level_name(dag, n, v).into())
                        .collect();
                    row.extend(scope.iter().zip(&tv).map(|(&n, &v)| Cell::from(level_name(dag, n, v))));
                    row.push(match &f {
                        Ok(f) => f.table()[i].into(),
                        Err(Error::ImpossibleEvidence) => Cell::Num(None),
                        Err(e) => return Err(Error::Format(e.to_string())),
                    });
                    table.push(row);
                }
            }
            table
        }
    };
    emit(&table, &args.output, stdout)
}

fn cmd_fit(args: FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.source.model)?;
    model.data()?;
    let bn = model.network(args.source.estimator)?;
    match args.output.format {
        FormatArg::Json => {
            let text = NetworkFile::from_network(&bn).to_json() + "\n";
            write_text(args.output.out.as_deref(), text.as_bytes(), stdout)
        }
        FormatArg::Csv => {
            let dag = bn.dag();
            let mut table = Table::new(["node", "parents", "level", "probability"]);
            for cpt in bn.cpts() {
                for r in 0..cpt.row_count() {
                    let label = config_label(dag, cpt.parents(), &cpt.parent_config_values(r)?);
                    for (k, &p) in cpt.row(r).iter().enumerate() {
                        table.push(vec![
                            dag.name(cpt.node()).into(),
                            label.clone().into(),
                            level_name(dag, cpt.node(), k).into(),
                            p.into(),
                        ]);
                    }
                }
            }
            emit(&table, &args.output, stdout)
        }
    }
}

fn cmd_global(args: GlobalArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let method = match args.method {
        GlobalMethodArg::Prequential => GlobalMethod::Prequential,
        GlobalMethodArg::PlugIn => GlobalMethod::PlugIn,
    };
    let report = global_monitor_with(&model.dag, model.data()?, &model.prior, method)?;
    let mut table = Table::new(["node", "score"]);
    for (i, &s) in report.scores.iter().enumerate() {
        table.push(vec![model.dag.name(i).into(), s.into()]);
    }
    emit(&table, &args.output, stdout)
}

fn series_table(dag: &Dag, series: &MonitorSeries) -> Table {
    let mut table = Table::new(["index", "row", "observed", "score", "expectation", "variance", "z"]);
    for p in &series.points {
        table.push(vec![
            p.index.into(),
            (p.row + 1).into(),
            level_name(dag, series.node, p.observed).into(),
            p.score.into(),
            p.expectation.into(),
            p.variance.into(),
            p.z.into(),
        ]);
    }
    table
}

fn series_chart(title: String, series: &MonitorSeries) -> LineChart {
    let mut chart = LineChart::new(title, "observation", "Z");
    chart.reference_lines = vec![-Z_BAND, Z_BAND];
    chart.series.push(Series {
        name: "Z".into(),
        points: series.points.iter().map(|p| (p.index as f64, p.z)).collect(),
    });
    chart
}

fn cmd_node_monitor(args: NodeMonitorArgs, conditional: bool, stdout: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let node = model.dag.index_of(&args.node)?;
    let data = model.data()?;
    let series = if conditional {
        seq_cond_monitor(&model.dag, data, node, &model.prior)?
    } else {
        seq_marg_monitor(&model.dag, data, node, &model.prior)?
    };
    let kind = if conditional { "conditional" } else { "marginal" };
    write_plot(
        args.plot.as_ref(),
        &series_chart(format!("{kind} monitor: {}", args.node), &series),
    )?;
    emit(&series_table(&model.dag, &series), &args.output, stdout)
}

fn cmd_pa_ch(args: PaChArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let dag = &model.dag;
    let node = dag.index_of(&args.node)?;
    let parents: Vec<String> = if args.parents.is_empty() {
        dag.parents(node).iter().map(|&p| dag.name(p).to_string()).collect()
    } else {
        args.parents.iter().map(|s| s.trim().to_string()).collect()
    };
    let values: Vec<String> = args.value_parents.iter().map(|s| s.trim().to_string()).collect();
    let series = seq_pa_ch_monitor(dag, model.data()?, node, &parents, &values, &model.prior)?;
    let label = config_label(dag, dag.parents(node), series.parent_config.as_deref().unwrap_or(&[]));
    write_plot(
        args.plot.as_ref(),
        &series_chart(format!("parent-child monitor: {} | {label}", args.node), &series),
    )?;
    emit(&series_table(dag, &series), &args.output, stdout)
}

fn cmd_influence(args: InfluenceArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = Model::load(&args.model)?;
    let report = influential_obs(&model.dag, model.data()?, &model.prior)?;
    let mut order: Vec<usize> = (0..report.scores.len()).collect();
    if let Some(k) = args.top {
        order.sort_by(|&a, &b| report.scores[b].total_cmp(&report.scores[a]).then(a.cmp(&b)));
        order.truncate(k);
    }
    let mut table = Table::new(["row", "score"]);
    for i in order {
        table.push(vec![(i + 1).into(), report.scores[i].into()]);
    }
    emit(&table, &args.output, stdout)
}

fn cmd_sensitivity(args: SensitivityArgs, stdout: &mut dyn Write) -> Result<()> {
    let bn = load_network(&args.source)?;
    let dag = bn.dag();
    let param = param_ref(dag, &args.param)?;
    let interest = dag.index_of(&args.interest_node)?;
    let value = dag.variable(interest).level_index(&args.interest_value)?;
    let q = EventQuery::single(interest, value, parse_assignments(dag, &args.evidence)?)?;
    let result = sensitivity(
        &bn,
        &q,
        &param,
        &parse_new_values(&args.param.new_value)?,
        args.param.covariation.into(),
    )?;
    let mut table = Table::new(["new_value", "probability"]);
    for p in &result.points {
        table.push(vec![p.t.into(), p.probability.into()]);
    }
    let mut chart = LineChart::new(
        format!(
            "p({}={}) as a function of p({}={})",
            args.interest_node, args.interest_value, args.param.node, args.param.value_node
        ),
        "new value",
        "probability",
    );
    chart.series.push(Series {
        name: "probability".into(),
        points: result.points.iter().map(|p| (p.t, p.probability)).collect(),
    });
    write_plot(args.plot.as_ref(), &chart)?;
    emit(&table, &args.output, stdout)
}

fn cmd_distance(args: DistanceArgs, kl: Option<DistanceMethod>, stdout: &mut dyn Write) -> Result<()> {
    let bn = load_network(&args.source)?;
    let param = param_ref(bn.dag(), &args.param)?;
    let new_values = parse_new_values(&args.param.new_value)?;
    let scheme = args.param.covariation.into();
    let result: DistanceResult = distances(&bn, &param, &new_values, scheme, kl.unwrap_or(DistanceMethod::Local))?;
    let title = format!("p({}={}) perturbed", args.param.node, args.param.value_node);
    let (table, chart) = if kl.is_some() {
        let mut table = Table::new(["new_value", "kl", "jeffreys"]);
        let mut chart = LineChart::new(title, "new value", "divergence");
        let mut kl_series = Series {
            name: "KL".into(),
            points: Vec::new(),
        };
        let mut j_series = Series {
            name: "Jeffreys".into(),
            points: Vec::new(),
        };
        for p in &result.points {
            table.push(vec![p.t.into(), p.kl.into(), p.jeffreys.into()]);
            kl_series.points.push((p.t, p.kl));
            j_series.points.push((p.t, p.jeffreys));
        }
        chart.series = vec![kl_series, j_series];
        (table, chart)
    } else {
        let mut table = Table::new(["new_value", "cd"]);
        let mut chart = LineChart::new(title, "new value", "CD distance");
        let mut series = Series {
            name: "CD".into(),
            points: Vec::new(),
        };
        for p in &result.points {
            table.push(vec![p.t.into(), p.cd.into()]);
            series.points.push((p.t, p.cd));
        }
        chart.series = vec![series];
        (table, chart)
    };
    write_plot(args.plot.as_ref(), &chart)?;
    emit(&table, &args.output, stdout)
}

fn cmd_sensquery(args: SensqueryArgs, stdout: &mut dyn Write) -> Result<()> {
    let bn = load_network(&args.source)?;
    let dag = bn.dag();
    let outcome: BTreeMap<usize, usize> = match (&args.target, &args.interest_node, &args.interest_value) {
        (Some(t), _, _) => parse_assignments(dag, std::slice::from_ref(t))?,
        (None, Some(n), Some(v)) => parse_assignments(dag, &[format!("{n}={v}")])?,
        _ => {
            return Err(Error::Format(
                "give --target NAME=level or --interest-node with --interest-value".into(),
            ))
        }
    };
    let q = EventQuery::new(outcome, parse_assignments(dag, &args.evidence)?)?;
    event_probability(&bn, &q)?;
    let result = sensquery(&bn, &q, args.target_value)?;
    let mut table = Table::new(["node", "value", "parents", "original", "suggested", "cd"]);
    for row in &result.rows {
        let p = &row.param;
        table.push(vec![
            dag.name(p.node).into(),
            level_name(dag, p.node, p.value).into(),
            config_label(dag, dag.parents(p.node), &p.parent_config).into(),
            row.original.into(),
            row.suggested.into(),
            row.cd.into(),
        ]);
    }
    emit(&table, &args.output, stdout)
}

fn cmd_prep_pima(args: PrepPimaArgs, stdout: &mut dyn Write) -> Result<()> {
    let tie = match args.tie {
        TieArg::Low => MedianTie::Low,
        TieArg::High => MedianTie::High,
    };
    let data = io::prepare_pima(&args.raw, tie)?;
    let mut buf = Vec::new();
    io::write_dataset(&mut buf, &data)?;
    write_text(args.out.as_deref(), &buf, stdout)
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let bn = load_network(&args.source)?;
    let data = forward_sample(&bn, args.rows, &mut ChaCha8Rng::seed_from_u64(args.seed));
    let mut buf = Vec::new();
    io::write_dataset(&mut buf, &data)?;
    write_text(args.out.as_deref(), &buf, stdout)
}
