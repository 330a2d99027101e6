use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use interdiction::experiments::{
    emit_figure_data, figure_csv, run, ExperimentConfig, ExperimentError, Figure, GraphSource,
    Mode, OutputGuard, Prepared, Sweep, SweepParameter, LAMBDA_SWEEP_GAMMA,
};
use interdiction::graph::enumerate_paths;
use interdiction::payoff::ProspectParams;

#[derive(Parser)]
#[command(name = "interdict", version, about = "Drone-delivery network interdiction games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every simple origin-to-destination path with its length.
    Paths {
        /// Graph JSON file or `builtin:paper`.
        #[arg(long, default_value = "builtin:paper")]
        graph: String,
        /// Also write `fig3a.csv` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the game once.
    Solve(Common),
    /// Solve over a list of values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `gamma` (both players) or `lambda_vendor`.
        #[arg(long, default_value = "gamma")]
        param: String,
        /// Comma-separated sweep values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Write every figure table (or one, with --figure).
    Figures {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        figure: Option<String>,
        /// Rationality values for the gamma sweep.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
        gammas: Vec<f64>,
        /// Vendor loss multipliers for the lambda sweep.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        lambdas: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Graph JSON file or `builtin:paper`.
    #[arg(long)]
    graph: Option<String>,
    /// eut, pt or both.
    #[arg(long)]
    mode: Option<String>,
    /// Prelec rationality of both players.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "lambda-u")]
    lambda_u: Option<f64>,
    #[arg(long = "lambda-a")]
    lambda_a: Option<f64>,
    /// Gain exponent of both players.
    #[arg(long)]
    alpha: Option<f64>,
    /// Loss exponent of both players.
    #[arg(long)]
    beta: Option<f64>,
    /// Reference delivery time of both players, in minutes.
    #[arg(long = "ref")]
    reference: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
                    path: path.clone(),
                    source,
                })?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(g) = &self.graph {
            cfg.graph = g.parse::<GraphSource>()?;
        }
        if let Some(m) = &self.mode {
            cfg.mode = m.parse::<Mode>()?;
        }
        for p in [&mut cfg.vendor, &mut cfg.attacker] {
            if let Some(v) = self.gamma {
                p.gamma = v;
            }
            if let Some(v) = self.alpha {
                p.alpha = v;
            }
            if let Some(v) = self.beta {
                p.beta = v;
            }
            if let Some(v) = self.reference {
                p.reference = v;
            }
        }
        if let Some(v) = self.lambda_u {
            cfg.vendor.lambda = v;
        }
        if let Some(v) = self.lambda_a {
            cfg.attacker.lambda = v;
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Paths { graph, out } => {
            let graph = graph.parse::<GraphSource>()?.load()?;
            let paths = enumerate_paths(&graph);
            if paths.is_empty() {
                return Err(ExperimentError::NoPaths);
            }
            println!("{:>4}  {:>10}  path", "#", "minutes");
            for (h, p) in paths.iter().enumerate() {
                println!("{:>4}  {:>10.4}  {}", h + 1, p.total_time(), p.label(&graph));
            }
            if let Some(dir) = out {
                let report = Prepared::new(graph)?.empty_report();
                emit_figure_data(&report, Figure::PathLengths, &dir)?;
            }
            Ok(())
        }
        Command::Solve(common) => {
            let report = run(&common.config()?)?;
            print!("{}", report.summary());
            Ok(())
        }
        Command::Sweep {
            common,
            param,
            values,
        } => {
            let mut cfg = common.config()?;
            if cfg.mode == Mode::Eut {
                cfg.mode = Mode::Both;
            }
            cfg.sweep = Some(Sweep {
                parameter: param.parse()?,
                values,
            });
            let report = run(&cfg)?;
            print!("{}", report.summary());
            Ok(())
        }
        Command::Figures {
            common,
            figure,
            gammas,
            lambdas,
        } => {
            let base = common.config()?;
            // the loss-aversion sweep runs at a fixed rationality level
            let lambda_gamma = match (common.gamma, &common.config) {
                (Some(g), _) => g,
                (None, Some(_)) => base.vendor.gamma,
                (None, None) => LAMBDA_SWEEP_GAMMA,
            };
            let dir = base.output.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let base = ExperimentConfig {
                mode: Mode::Both,
                output: None,
                ..base
            };
            let gamma_report = run(&ExperimentConfig {
                sweep: Some(Sweep {
                    parameter: SweepParameter::Gamma,
                    values: gammas,
                }),
                ..base.clone()
            })?;
            let lambda_report = run(&ExperimentConfig {
                sweep: Some(Sweep {
                    parameter: SweepParameter::LambdaVendor,
                    values: lambdas,
                }),
                vendor: ProspectParams { gamma: lambda_gamma, ..base.vendor },
                attacker: ProspectParams { gamma: lambda_gamma, ..base.attacker },
                ..base
            })?;

            let figures = match figure {
                Some(f) => vec![f.parse::<Figure>()?],
                None => Figure::ALL.to_vec(),
            };
            let mut out = OutputGuard::new(&dir)?;
            for f in figures {
                let report = if f.sweep_parameter() == Some(SweepParameter::LambdaVendor) {
                    &lambda_report
                } else {
                    &gamma_report
                };
                let csv = figure_csv(report, f)?;
                let path = out.write(&f.file_name(), &csv)?;
                println!("wrote {}", path.display());
            }
            let summary = format!(
                "== gamma sweep ==\n{}\n== vendor loss-multiplier sweep ==\n{}",
                gamma_report.summary(),
                lambda_report.summary()
            );
            out.write("summary.txt", &summary)?;
            out.commit();
            Ok(())
        }
    }
}

