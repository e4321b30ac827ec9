//! The `report` command: parse a sweep CSV, print the per-method AUC
//! table, and emit the score-vs-k SVG chart.

use crate::svg::{render_chart, ChartSeries};
use bandgate::error::{Error, Result};
use bandgate::metrics::{bands_auc, BandsCurve};
use clap::Args;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Args)]
pub struct ReportArgs {
    /// Sweep CSV produced by `bandgate sweep`.
    #[arg(long)]
    input: PathBuf,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
    /// Metric to plot.
    #[arg(long, default_value = "oa")]
    metric: String,
}

#[derive(Debug, Default)]
struct SweepData {
    /// (method, k) -> fold values of the chosen metric.
    cells: BTreeMap<(String, usize), Vec<f64>>,
    /// method -> bands_auc rows from the file.
    auc: BTreeMap<String, f64>,
}

fn parse_sweep_csv(text: &str, metric: &str) -> Result<SweepData> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(Error::EmptyInput("sweep CSV is empty".into()));
    };
    if header.trim() != "method,k,fold,metric,value" {
        return Err(Error::DataFormat {
            line: 1,
            msg: format!("unexpected header '{header}'"),
        });
    }
    let mut data = SweepData::default();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::DataFormat {
                line: lineno,
                msg: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let value: f64 = fields[4].parse().map_err(|_| Error::DataFormat {
            line: lineno,
            msg: format!("bad value '{}'", fields[4]),
        })?;
        if fields[3] == "bands_auc" {
            data.auc.insert(fields[0].to_string(), value);
            continue;
        }
        if fields[3] != metric {
            continue;
        }
        let k: usize = fields[1].parse().map_err(|_| Error::DataFormat {
            line: lineno,
            msg: format!("bad band count '{}'", fields[1]),
        })?;
        data.cells
            .entry((fields[0].to_string(), k))
            .or_default()
            .push(value);
    }
    if data.cells.is_empty() {
        return Err(Error::EmptyInput(format!(
            "sweep CSV has no '{metric}' rows"
        )));
    }
    Ok(data)
}

pub fn cmd_report(args: ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    let data = parse_sweep_csv(&text, &args.metric)?;

    // Fold means per (method, k), grouped into per-method curves.
    let mut curves: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for ((method, k), values) in &data.cells {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        curves.entry(method.clone()).or_default().push((*k, mean));
    }

    let mut series = Vec::new();
    println!("{:<14} {:>10}", "method", "bands_auc");
    for (method, points) in &curves {
        let auc = match data.auc.get(method) {
            Some(&v) => Some(v),
            None if points.len() >= 2 => {
                Some(bands_auc(&BandsCurve::new(points.clone())?)?)
            }
            None => None,
        };
        match auc {
            Some(v) => println!("{method:<14} {v:>10.5}"),
            None => println!("{method:<14} {:>10}", "n/a"),
        }
        series.push(ChartSeries {
            name: method.clone(),
            points: points.iter().map(|&(k, v)| (k as f64, v)).collect(),
            auc,
        });
    }

    let y_label = match args.metric.as_str() {
        "oa" => "overall accuracy".to_string(),
        "aa" => "average accuracy".to_string(),
        other => other.to_string(),
    };
    let svg = render_chart(&series, "selected bands (k)", &y_label);
    std::fs::write(&args.out, svg)?;
    println!("wrote chart to {}", args.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "method,k,fold,metric,value\n\
        chbs,2,0,oa,0.8\n\
        chbs,2,1,oa,0.9\n\
        chbs,4,0,oa,0.95\n\
        chbs,4,1,oa,0.97\n\
        chbs,2,0,kappa,0.7\n\
        chbs,,,bands_auc,0.905\n";

    #[test]
    fn parses_cells_and_auc_rows() {
        let data = parse_sweep_csv(SAMPLE, "oa").unwrap();
        assert_eq!(data.cells[&("chbs".to_string(), 2)], vec![0.8, 0.9]);
        assert_eq!(data.cells[&("chbs".to_string(), 4)], vec![0.95, 0.97]);
        assert_eq!(data.auc["chbs"], 0.905);
    }

    #[test]
    fn empty_and_malformed_inputs_error() {
        assert!(matches!(
            parse_sweep_csv("", "oa"),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            parse_sweep_csv("method,k,fold,metric,value\n", "oa"),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            parse_sweep_csv("bad header\nx", "oa"),
            Err(Error::DataFormat { line: 1, .. })
        ));
        assert!(matches!(
            parse_sweep_csv("method,k,fold,metric,value\na,b,c\n", "oa"),
            Err(Error::DataFormat { line: 2, .. })
        ));
    }
}
