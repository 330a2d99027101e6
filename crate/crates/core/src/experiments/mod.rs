//! Experiment harness: configuration, classical and prospect-theoretic
//! solves over parameter sweeps, and CSV/summary output.

mod figures;
mod instance;

pub use figures::{emit_figure_data, figure_csv, Figure};
pub use instance::{builtin_paper_instance, shortest_path_index, PAPER_INSTANCE_JSON};

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{enumerate_paths, incidence, parse_graph, GraphError, Path, SecurityGraph};
use crate::payoff::{
    build_objective_matrix, build_pt_matrix, expected_delivery_time, MixedStrategy, PayoffError,
    PayoffMatrix, Player, ProspectParams,
};
use crate::solver::{solve_pt_security, solve_zero_sum, SolveError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("graph has no origin-to-destination path")]
    NoPaths,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(String),
    #[error("figure {figure} needs run `{run}`, which the report does not contain")]
    MissingRun { figure: String, run: String },
}

fn io_error(path: &FsPath) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const BUILTIN_GRAPH: &str = "builtin:paper";

/// Rationality level at which the vendor loss-multiplier sweep is run
/// unless configured otherwise.
pub const LAMBDA_SWEEP_GAMMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GraphSource {
    Builtin,
    File(PathBuf),
}

impl FromStr for GraphSource {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == BUILTIN_GRAPH {
            Ok(GraphSource::Builtin)
        } else if let Some(other) = s.strip_prefix("builtin:") {
            Err(ExperimentError::Config(format!("unknown built-in graph `{other}`")))
        } else {
            Ok(GraphSource::File(PathBuf::from(s)))
        }
    }
}

impl TryFrom<String> for GraphSource {
    type Error = ExperimentError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GraphSource> for String {
    fn from(g: GraphSource) -> String {
        match g {
            GraphSource::Builtin => BUILTIN_GRAPH.to_string(),
            GraphSource::File(p) => p.display().to_string(),
        }
    }
}

impl GraphSource {
    pub fn load(&self) -> Result<SecurityGraph, ExperimentError> {
        match self {
            GraphSource::Builtin => Ok(builtin_paper_instance().0),
            GraphSource::File(path) => {
                let text = fs::read_to_string(path).map_err(io_error(path))?;
                Ok(parse_graph(&text)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Eut,
    Pt,
    Both,
}

impl Mode {
    fn classical(self) -> bool {
        matches!(self, Mode::Eut | Mode::Both)
    }

    fn prospect(self) -> bool {
        matches!(self, Mode::Pt | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eut" => Ok(Mode::Eut),
            "pt" => Ok(Mode::Pt),
            "both" => Ok(Mode::Both),
            _ => Err(ExperimentError::Config(format!(
                "mode must be eut, pt or both, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Rationality of both players.
    Gamma,
    /// Vendor loss multiplier.
    LambdaVendor,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Gamma => "gamma",
            SweepParameter::LambdaVendor => "lambda_vendor",
        }
    }

    fn apply(
        self,
        value: f64,
        vendor: &ProspectParams,
        attacker: &ProspectParams,
    ) -> (ProspectParams, ProspectParams) {
        match self {
            SweepParameter::Gamma => (
                ProspectParams { gamma: value, ..*vendor },
                ProspectParams { gamma: value, ..*attacker },
            ),
            SweepParameter::LambdaVendor => (ProspectParams { lambda: value, ..*vendor }, *attacker),
        }
    }
}

impl FromStr for SweepParameter {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gamma" => Ok(SweepParameter::Gamma),
            "lambda_vendor" | "lambda-u" | "lambda_u" => Ok(SweepParameter::LambdaVendor),
            _ => Err(ExperimentError::Config(format!(
                "sweep parameter must be gamma or lambda_vendor, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub mode: Mode,
    pub vendor: ProspectParams,
    pub attacker: ProspectParams,
    pub sweep: Option<Sweep>,
    /// Directory for `runs.csv` and `summary.txt`; nothing is written if unset.
    pub output: Option<PathBuf>,
    /// Unused by the current deterministic pipeline.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSource::Builtin,
            mode: Mode::Both,
            vendor: ProspectParams::default(),
            attacker: ProspectParams::default(),
            sweep: None,
            output: None,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |who: &str, e: PayoffError| ExperimentError::Config(format!("{who}: {e}"));
        self.vendor.validate().map_err(|e| bad("vendor", e))?;
        self.attacker.validate().map_err(|e| bad("attacker", e))?;
        if let Some(sweep) = &self.sweep {
            if !self.mode.prospect() {
                return Err(ExperimentError::Config(
                    "a parameter sweep needs mode pt or both".into(),
                ));
            }
            if sweep.values.is_empty() {
                return Err(ExperimentError::Config("sweep has no values".into()));
            }
            for &v in &sweep.values {
                let (vendor, attacker) = sweep.parameter.apply(v, &self.vendor, &self.attacker);
                vendor
                    .validate()
                    .and_then(|_| attacker.validate())
                    .map_err(|e| bad(&format!("sweep {}={v}", sweep.parameter), e))?;
            }
        }
        Ok(())
    }

    /// Parameter points to solve under prospect theory, with their sweep values.
    fn prospect_points(&self) -> Vec<(Option<f64>, ProspectParams, ProspectParams)> {
        match &self.sweep {
            Some(sweep) => sweep
                .values
                .iter()
                .map(|&v| {
                    let (u, a) = sweep.parameter.apply(v, &self.vendor, &self.attacker);
                    (Some(v), u, a)
                })
                .collect(),
            None => vec![(None, self.vendor, self.attacker)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Classical expected-utility game.
    Cgt,
    /// Prospect-theoretic security strategies.
    Pt,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Cgt => "cgt",
            Model::Pt => "pt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub model: Model,
    pub sweep_value: Option<f64>,
    /// `None` for classical runs.
    pub vendor_params: Option<ProspectParams>,
    pub attacker_params: Option<ProspectParams>,
    pub vendor_strategy: MixedStrategy,
    pub attacker_strategy: MixedStrategy,
    /// Value of the vendor's min-max problem (minutes under CGT, subjective under PT).
    pub vendor_value: f64,
    /// Value of the attacker's max-min problem.
    pub attacker_value: f64,
    /// `y^T M x` over the objective matrix.
    pub delivery_time: f64,
    pub exploitability: f64,
    /// Optimum of the vendor-side LP.
    pub mu_primal: f64,
    /// Optimum of the attacker-side LP.
    pub mu_dual: f64,
    /// Constants added before the vendor and attacker solves.
    pub shift_vendor: f64,
    pub shift_attacker: f64,
    pub shortest_path_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub node_ids: Vec<String>,
    pub probabilities: Vec<f64>,
    pub path_labels: Vec<String>,
    pub path_times: Vec<f64>,
    pub shortest_path: usize,
}

impl InstanceSummary {
    fn new(graph: &SecurityGraph, paths: &[Path], shortest_path: usize) -> Self {
        InstanceSummary {
            node_ids: graph.nodes().iter().map(|n| n.id.clone()).collect(),
            probabilities: graph.nodes().iter().map(|n| n.attack_probability).collect(),
            path_labels: paths.iter().map(|p| p.label(graph)).collect(),
            path_times: paths.iter().map(Path::total_time).collect(),
            shortest_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub instance: InstanceSummary,
    pub sweep: Option<Sweep>,
    pub records: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn cgt(&self) -> Option<&RunRecord> {
        self.records.iter().find(|r| r.model == Model::Cgt)
    }

    pub fn prospect_records(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(|r| r.model == Model::Pt)
    }

    /// The prospect-theoretic record at a sweep value.
    pub fn pt_at(&self, value: f64) -> Option<&RunRecord> {
        self.prospect_records()
            .find(|r| r.sweep_value.is_some_and(|v| (v - value).abs() <= 1e-12))
    }

    pub fn runs_csv(&self) -> Result<String, ExperimentError> {
        let mut header: Vec<String> = [
            "model",
            "sweep_parameter",
            "sweep_value",
            "gamma_u",
            "gamma_a",
            "lambda_u",
            "lambda_a",
            "alpha_u",
            "alpha_a",
            "beta_u",
            "beta_a",
            "ref_u",
            "ref_a",
            "vendor_value",
            "attacker_value",
            "delivery_time",
            "exploitability",
            "shortest_path_prob",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=self.instance.path_labels.len()).map(|h| format!("y_{h}")));
        header.extend(self.instance.node_ids.iter().map(|id| format!("x_{id}")));

        let sweep_name = self.sweep.as_ref().map_or("", |s| s.parameter.name());
        let mut rows = vec![header];
        for r in &self.records {
            let param = |f: fn(&ProspectParams) -> f64, p: &Option<ProspectParams>| {
                p.as_ref().map_or(String::new(), |p| format!("{}", f(p)))
            };
            let mut row = vec![
                r.model.name().to_string(),
                if r.sweep_value.is_some() { sweep_name.to_string() } else { String::new() },
                r.sweep_value.map_or(String::new(), |v| format!("{v}")),
                param(|p| p.gamma, &r.vendor_params),
                param(|p| p.gamma, &r.attacker_params),
                param(|p| p.lambda, &r.vendor_params),
                param(|p| p.lambda, &r.attacker_params),
                param(|p| p.alpha, &r.vendor_params),
                param(|p| p.alpha, &r.attacker_params),
                param(|p| p.beta, &r.vendor_params),
                param(|p| p.beta, &r.attacker_params),
                param(|p| p.reference, &r.vendor_params),
                param(|p| p.reference, &r.attacker_params),
                time(r.vendor_value),
                time(r.attacker_value),
                time(r.delivery_time),
                format!("{:.3e}", r.exploitability),
                prob(r.shortest_path_probability),
            ];
            row.extend(r.vendor_strategy.probabilities().iter().map(|&p| prob(p)));
            row.extend(r.attacker_strategy.probabilities().iter().map(|&p| prob(p)));
            rows.push(row);
        }
        to_csv(rows)
    }

    pub fn summary(&self) -> String {
        let inst = &self.instance;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "nodes: {}  paths: {}  shortest path: #{} {} ({} min)",
            inst.node_ids.len(),
            inst.path_labels.len(),
            inst.shortest_path + 1,
            inst.path_labels[inst.shortest_path],
            time(inst.path_times[inst.shortest_path]),
        );
        for r in &self.records {
            let _ = write!(s, "\n[{}]", r.model.name());
            if let (Some(v), Some(sweep)) = (r.sweep_value, &self.sweep) {
                let _ = write!(s, " {}={v}", sweep.parameter);
            }
            let _ = writeln!(s);
            if let (Some(u), Some(a)) = (&r.vendor_params, &r.attacker_params) {
                let _ = writeln!(
                    s,
                    "  vendor   gamma={} lambda={} alpha={} beta={} ref={}",
                    u.gamma, u.lambda, u.alpha, u.beta, u.reference
                );
                let _ = writeln!(
                    s,
                    "  attacker gamma={} lambda={} alpha={} beta={} ref={}",
                    a.gamma, a.lambda, a.alpha, a.beta, a.reference
                );
            }
            let _ = writeln!(
                s,
                "  vendor value {}  attacker value {}  delivery time {} min",
                time(r.vendor_value),
                time(r.attacker_value),
                time(r.delivery_time)
            );
            let _ = writeln!(
                s,
                "  exploitability {:.3e}  shortest-path probability {}",
                r.exploitability,
                prob(r.shortest_path_probability)
            );
            let paths: Vec<String> = r
                .vendor_strategy
                .support_above(5e-7)
                .into_iter()
                .map(|h| format!("#{}:{}", h + 1, prob(r.vendor_strategy.get(h))))
                .collect();
            let nodes: Vec<String> = r
                .attacker_strategy
                .support_above(5e-7)
                .into_iter()
                .map(|n| format!("{}:{}", inst.node_ids[n], prob(r.attacker_strategy.get(n))))
                .collect();
            let _ = writeln!(s, "  paths  {}", paths.join(" "));
            let _ = writeln!(s, "  nodes  {}", nodes.join(" "));
        }
        s
    }
}

pub(crate) fn prob(p: f64) -> String {
    format!("{p:.6}")
}

pub(crate) fn time(t: f64) -> String {
    format!("{t:.4}")
}

pub(crate) fn to_csv(rows: Vec<Vec<String>>) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)
            .map_err(|e| ExperimentError::Csv(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ExperimentError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ExperimentError::Csv(e.to_string()))
}

/// Files written into an output directory. Unless committed, everything
/// written so far is removed when the guard is dropped.
pub struct OutputGuard {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    pub fn new(dir: &FsPath) -> Result<Self, ExperimentError> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        Ok(OutputGuard {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, ExperimentError> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        fs::write(&path, contents).map_err(io_error(&path))?;
        Ok(path)
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// Graph, paths and objective matrix shared by every run of an experiment.
pub struct Prepared {
    pub graph: SecurityGraph,
    pub paths: Vec<Path>,
    pub objective: PayoffMatrix,
    pub shortest_path: usize,
}

impl Prepared {
    pub fn new(graph: SecurityGraph) -> Result<Self, ExperimentError> {
        let paths = enumerate_paths(&graph);
        let shortest_path = shortest_path_index(&paths).ok_or(ExperimentError::NoPaths)?;
        let l = incidence(&graph, &paths);
        let objective = build_objective_matrix(&graph, &paths, &l)?;
        Ok(Prepared {
            graph,
            paths,
            objective,
            shortest_path,
        })
    }

    /// A report with instance data and no runs.
    pub fn empty_report(&self) -> ExperimentReport {
        ExperimentReport {
            instance: InstanceSummary::new(&self.graph, &self.paths, self.shortest_path),
            sweep: None,
            records: Vec::new(),
        }
    }

    pub fn solve_classical(&self) -> Result<RunRecord, ExperimentError> {
        let s = solve_zero_sum(&self.objective)?;
        let delivery_time = expected_delivery_time(&s.y, &s.x, &self.objective)?;
        Ok(RunRecord {
            model: Model::Cgt,
            sweep_value: None,
            vendor_params: None,
            attacker_params: None,
            shortest_path_probability: s.y.get(self.shortest_path),
            vendor_value: s.value,
            attacker_value: s.value_dual,
            delivery_time,
            exploitability: s.exploitability,
            mu_primal: s.mu_primal,
            mu_dual: s.mu_dual,
            shift_vendor: s.shift,
            shift_attacker: s.shift,
            vendor_strategy: s.y,
            attacker_strategy: s.x,
        })
    }

    /// Solves both players' subjective security problems and evaluates the
    /// resulting strategy pair on the objective matrix.
    pub fn solve_prospect(
        &self,
        vendor: &ProspectParams,
        attacker: &ProspectParams,
        sweep_value: Option<f64>,
    ) -> Result<RunRecord, ExperimentError> {
        let l = incidence(&self.graph, &self.paths);
        let m_vendor = build_pt_matrix(Player::Vendor, &self.graph, &self.paths, &l, vendor)?;
        let m_attacker = build_pt_matrix(Player::Attacker, &self.graph, &self.paths, &l, attacker)?;
        let s = solve_pt_security(&m_vendor, &m_attacker)?;
        let y = s.vendor_strategy().clone();
        let x = s.attacker_strategy().clone();
        let delivery_time = expected_delivery_time(&y, &x, &self.objective)?;
        Ok(RunRecord {
            model: Model::Pt,
            sweep_value,
            vendor_params: Some(*vendor),
            attacker_params: Some(*attacker),
            shortest_path_probability: y.get(self.shortest_path),
            vendor_value: s.vendor.value,
            attacker_value: s.attacker.value,
            delivery_time,
            exploitability: s.vendor.exploitability.max(s.attacker.exploitability),
            mu_primal: s.vendor.mu_primal,
            mu_dual: s.attacker.mu_dual,
            shift_vendor: s.vendor.shift,
            shift_attacker: s.attacker.shift,
            vendor_strategy: y,
            attacker_strategy: x,
        })
    }
}

/// Runs every solve the configuration asks for. Records are ordered with
/// the classical run first, then prospect runs in sweep order.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let prepared = Prepared::new(config.graph.load()?)?;

    let mut records = Vec::new();
    if config.mode.classical() {
        records.push(prepared.solve_classical()?);
    }
    if config.mode.prospect() {
        let points = config.prospect_points();
        let solved = points
            .par_iter()
            .map(|(v, u, a)| prepared.solve_prospect(u, a, *v))
            .collect::<Result<Vec<_>, _>>()?;
        records.extend(solved);
    }

    let report = ExperimentReport {
        sweep: config.sweep.clone(),
        records,
        ..prepared.empty_report()
    };
    if let Some(dir) = &config.output {
        write_report(&report, dir)?;
    }
    Ok(report)
}

/// Writes `runs.csv` and `summary.txt`.
pub fn write_report(report: &ExperimentReport, dir: &FsPath) -> Result<Vec<PathBuf>, ExperimentError> {
    let mut out = OutputGuard::new(dir)?;
    out.write("runs.csv", &report.runs_csv()?)?;
    out.write("summary.txt", &report.summary())?;
    Ok(out.commit())
}
