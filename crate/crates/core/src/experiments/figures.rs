//! CSV tables behind the case-study figures.

use std::fmt;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use super::{prob, time, to_csv, ExperimentError, ExperimentReport, OutputGuard, RunRecord, SweepParameter};
use crate::payoff::prelec_weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Length of every path.
    PathLengths,
    /// Vendor path strategy under CGT and per gamma.
    VendorStrategy,
    /// Objective vs weighted attack probabilities per gamma.
    Weighting,
    /// Attacker node strategy under CGT and per gamma.
    AttackerStrategy,
    /// Delivery time per gamma.
    DeliveryVsGamma,
    /// Shortest-path probability and delivery time per vendor lambda.
    LossAversion,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::PathLengths,
        Figure::VendorStrategy,
        Figure::Weighting,
        Figure::AttackerStrategy,
        Figure::DeliveryVsGamma,
        Figure::LossAversion,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Figure::PathLengths => "3a",
            Figure::VendorStrategy => "3b",
            Figure::Weighting => "4a",
            Figure::AttackerStrategy => "4b",
            Figure::DeliveryVsGamma => "5",
            Figure::LossAversion => "6",
        }
    }

    pub fn file_name(self) -> String {
        format!("fig{}.csv", self.tag())
    }

    /// Sweep the figure's data comes from, if any.
    pub fn sweep_parameter(self) -> Option<SweepParameter> {
        match self {
            Figure::PathLengths | Figure::Weighting => None,
            Figure::LossAversion => Some(SweepParameter::LambdaVendor),
            _ => Some(SweepParameter::Gamma),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Figure {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tag = s.trim_start_matches("fig");
        Figure::ALL
            .into_iter()
            .find(|f| f.tag() == tag)
            .ok_or_else(|| ExperimentError::Config(format!("unknown figure `{s}`")))
    }
}

fn missing(figure: Figure, run: impl Into<String>) -> ExperimentError {
    ExperimentError::MissingRun {
        figure: figure.tag().to_string(),
        run: run.into(),
    }
}

fn cgt(report: &ExperimentReport, figure: Figure) -> Result<&RunRecord, ExperimentError> {
    report.cgt().ok_or_else(|| missing(figure, "cgt"))
}

/// Prospect records for every value of the report's sweep over `parameter`.
fn sweep_records(
    report: &ExperimentReport,
    figure: Figure,
    parameter: SweepParameter,
) -> Result<Vec<(f64, &RunRecord)>, ExperimentError> {
    let sweep = report
        .sweep
        .as_ref()
        .filter(|s| s.parameter == parameter)
        .ok_or_else(|| missing(figure, format!("{parameter} sweep")))?;
    sweep
        .values
        .iter()
        .map(|&v| {
            report
                .pt_at(v)
                .map(|r| (v, r))
                .ok_or_else(|| missing(figure, format!("pt {parameter}={v}")))
        })
        .collect()
}

pub fn figure_csv(report: &ExperimentReport, figure: Figure) -> Result<String, ExperimentError> {
    let inst = &report.instance;
    let mut rows: Vec<Vec<String>> = Vec::new();
    match figure {
        Figure::PathLengths => {
            rows.push(vec!["path".into(), "label".into(), "total_time".into()]);
            for (h, (label, t)) in inst.path_labels.iter().zip(&inst.path_times).enumerate() {
                rows.push(vec![(h + 1).to_string(), label.clone(), time(*t)]);
            }
        }
        Figure::VendorStrategy | Figure::AttackerStrategy => {
            let base = cgt(report, figure)?;
            let runs = sweep_records(report, figure, SweepParameter::Gamma)?;
            let vendor = figure == Figure::VendorStrategy;
            let mut header = if vendor {
                vec!["path".to_string(), "label".to_string()]
            } else {
                vec!["node".to_string()]
            };
            header.push("cgt".into());
            header.extend(runs.iter().map(|(v, _)| format!("gamma_{v}")));
            rows.push(header);
            let labels = if vendor { &inst.path_labels } else { &inst.node_ids };
            let pick = |r: &RunRecord, i: usize| {
                prob(if vendor {
                    r.vendor_strategy.get(i)
                } else {
                    r.attacker_strategy.get(i)
                })
            };
            for (i, label) in labels.iter().enumerate() {
                let mut row = if vendor {
                    vec![(i + 1).to_string(), label.clone()]
                } else {
                    vec![label.clone()]
                };
                row.push(pick(base, i));
                row.extend(runs.iter().map(|(_, r)| pick(r, i)));
                rows.push(row);
            }
        }
        Figure::Weighting => {
            let mut gammas: Vec<f64> = report
                .sweep
                .as_ref()
                .filter(|s| s.parameter == SweepParameter::Gamma)
                .map(|s| s.values.clone())
                .unwrap_or_default();
            if !gammas.contains(&1.0) {
                gammas.push(1.0);
            }
            let mut header = vec!["node".to_string(), "p".to_string()];
            header.extend(gammas.iter().map(|g| format!("w_gamma_{g}")));
            rows.push(header);
            for (id, &p) in inst.node_ids.iter().zip(&inst.probabilities) {
                let mut row = vec![id.clone(), prob(p)];
                for &g in &gammas {
                    row.push(prob(prelec_weight(p, g)?));
                }
                rows.push(row);
            }
        }
        Figure::DeliveryVsGamma | Figure::LossAversion => {
            let base = cgt(report, figure)?;
            let parameter = figure.sweep_parameter().expect("sweep figure");
            let runs = sweep_records(report, figure, parameter)?;
            let mut header = vec![parameter.name().to_string()];
            if figure == Figure::LossAversion {
                header.push("shortest_path_prob".into());
            }
            header.extend(["delivery_time", "cgt_delivery_time", "target"].map(String::from));
            rows.push(header);
            for (v, r) in runs {
                let mut row = vec![format!("{v}")];
                if figure == Figure::LossAversion {
                    row.push(prob(r.shortest_path_probability));
                }
                let target = r.vendor_params.map_or(f64::NAN, |p| p.reference);
                row.extend([time(r.delivery_time), time(base.delivery_time), time(target)]);
                rows.push(row);
            }
        }
    }
    to_csv(rows)
}

/// Writes `fig<tag>.csv` into `dir`.
pub fn emit_figure_data(
    report: &ExperimentReport,
    figure: Figure,
    dir: &FsPath,
) -> Result<PathBuf, ExperimentError> {
    let csv = figure_csv(report, figure)?;
    let mut out = OutputGuard::new(dir)?;
    let path = out.write(&figure.file_name(), &csv)?;
    out.commit();
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run, ExperimentConfig, Mode, Sweep};

    fn gamma_report() -> ExperimentReport {
        run(&ExperimentConfig {
            sweep: Some(Sweep {
                parameter: SweepParameter::Gamma,
                values: vec![0.1, 0.5, 0.9],
            }),
            ..Default::default()
        })
        .unwrap()
    }

    fn lines(csv: &str) -> Vec<Vec<String>> {
        csv.lines()
            .map(|l| l.split(',').map(String::from).collect())
            .collect()
    }

    #[test]
    fn path_lengths() {
        let rows = lines(&figure_csv(&gamma_report(), Figure::PathLengths).unwrap());
        assert_eq!(rows.len(), 19);
        let min = rows[1..]
            .iter()
            .min_by(|a, b| a[2].parse::<f64>().unwrap().total_cmp(&b[2].parse().unwrap()))
            .unwrap();
        assert_eq!(min[0], "8");
    }

    #[test]
    fn weighting_identity_column() {
        let rows = lines(&figure_csv(&gamma_report(), Figure::Weighting).unwrap());
        let col = rows[0].iter().position(|h| h == "w_gamma_1").unwrap();
        let node8 = rows.iter().find(|r| r[0] == "8").unwrap();
        assert_eq!(node8[col], "0.800000");
    }

    #[test]
    fn delivery_vs_gamma_has_one_row_per_gamma() {
        let rows = lines(&figure_csv(&gamma_report(), Figure::DeliveryVsGamma).unwrap());
        assert_eq!(rows.len(), 4);
        let gammas: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
        assert_eq!(gammas, vec!["0.1", "0.5", "0.9"]);
    }

    #[test]
    fn strategy_tables() {
        let report = gamma_report();
        let rows = lines(&figure_csv(&report, Figure::VendorStrategy).unwrap());
        assert_eq!(rows[0], vec!["path", "label", "cgt", "gamma_0.1", "gamma_0.5", "gamma_0.9"]);
        assert_eq!(rows.len(), 19);
        let rows = lines(&figure_csv(&report, Figure::AttackerStrategy).unwrap());
        assert_eq!(rows.len(), 11);
        for col in 1..rows[0].len() {
            let total: f64 = rows[1..].iter().map(|r| r[col].parse::<f64>().unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn missing_runs_are_named() {
        let report = gamma_report();
        match figure_csv(&report, Figure::LossAversion) {
            Err(ExperimentError::MissingRun { run, .. }) => assert_eq!(run, "lambda_vendor sweep"),
            other => panic!("{other:?}"),
        }
        let mut pruned = report.clone();
        pruned.records.retain(|r| r.sweep_value != Some(0.5));
        match figure_csv(&pruned, Figure::DeliveryVsGamma) {
            Err(ExperimentError::MissingRun { run, .. }) => assert_eq!(run, "pt gamma=0.5"),
            other => panic!("{other:?}"),
        }
        let pt_only = run(&ExperimentConfig {
            mode: Mode::Pt,
            sweep: report.sweep.clone(),
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(
            figure_csv(&pt_only, Figure::VendorStrategy),
            Err(ExperimentError::MissingRun { .. })
        ));
    }

    #[test]
    fn figure_tags_parse() {
        for f in Figure::ALL {
            assert_eq!(f.tag().parse::<Figure>().unwrap(), f);
            assert_eq!(f.file_name().trim_end_matches(".csv").parse::<Figure>().unwrap(), f);
        }
        assert!("7".parse::<Figure>().is_err());
    }
}
