//! Experiment reports and their CSV/JSON serialisation.
//!
//! CSV columns, in order: `experiment,n,trial,seed,value,stderr,flag`. One row
//! per trial. Floats use the shortest representation that parses back to the
//! same value, so a report written twice from the same rows is byte-identical.
//! JSON carries the same rows plus the configuration echo, the aggregates and
//! the notes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = ["experiment", "n", "trial", "seed", "value", "stderr", "flag"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub value: f64,
    pub stderr: f64,
    /// Short status such as `ok`, `violation` or `approx`.
    pub flag: String,
}

/// Configuration echoed into every report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub samples: usize,
    pub delta: Option<f64>,
    /// Body descriptors by role (`k`, `l`, `body`, ...), as JSON.
    pub bodies: BTreeMap<String, serde_json::Value>,
    /// Any further experiment-specific parameters.
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ReportConfig,
    pub rows: Vec<TrialRecord>,
    /// Named summary values (medians, quantiles, fitted constants, counts).
    pub aggregates: BTreeMap<String, f64>,
    /// Substitutions and caveats that qualify the numbers.
    pub notes: Vec<String>,
    /// Number of detected violations of statements that must hold exactly.
    pub violations: usize,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: ReportConfig) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            config,
            ..Default::default()
        }
    }

    /// Records an aggregate; non-finite values are skipped so that the JSON
    /// form stays parseable.
    pub fn aggregate(&mut self, name: impl Into<String>, value: f64) {
        if value.is_finite() {
            self.aggregates.insert(name.into(), value);
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.aggregates.get(name).copied()
    }

    /// Values of the rows with dimension `n`, in trial order.
    pub fn values_at(&self, n: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.n == n).map(|r| r.value).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.n.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.value.to_string(),
                r.stderr.to_string(),
                r.flag.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Rows of a CSV produced by [`ExperimentReport::write_csv`].
    pub fn read_csv_rows<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(Error::InvalidArgument(format!("unexpected CSV header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let parse_err = |i: usize| Error::InvalidArgument(format!("bad CSV field {:?}", field(i)));
            rows.push(TrialRecord {
                experiment: field(0).to_string(),
                n: field(1).parse().map_err(|_| parse_err(1))?,
                trial: field(2).parse().map_err(|_| parse_err(2))?,
                seed: field(3).parse().map_err(|_| parse_err(3))?,
                value: field(4).parse().map_err(|_| parse_err(4))?,
                stderr: field(5).parse().map_err(|_| parse_err(5))?,
                flag: field(6).to_string(),
            });
        }
        Ok(rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            write_report(report, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            write_report(report, format, stdout.lock())?;
        }
    }
    Ok(())
}

pub fn write_report<W: Write>(report: &ExperimentReport, format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => report.write_csv(out),
        ReportFormat::Json => report.write_json(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut cfg = ReportConfig {
            seed: 7,
            dims: vec![2, 3],
            trials: 2,
            samples: 100,
            delta: Some(2.0),
            ..Default::default()
        };
        cfg.bodies.insert("k".into(), serde_json::json!({"variant": "lp_ball", "p": 2.0, "n": 2}));
        let mut r = ExperimentReport::new("demo", cfg);
        for n in [2, 3] {
            for t in 0..2 {
                r.rows.push(TrialRecord {
                    experiment: "demo".into(),
                    n,
                    trial: t,
                    seed: 7,
                    value: 0.1 + 1.0 / 3.0 * (n + t) as f64,
                    stderr: 1e-17 * t as f64,
                    flag: "ok".into(),
                });
            }
        }
        r.aggregate("median_n2", std::f64::consts::PI);
        r.aggregate("skipped", f64::NAN);
        r.note("a note, with a comma");
        r
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = ExperimentReport::new("empty", ReportConfig::default());
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "experiment,n,trial,seed,value,stderr,flag\n");
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert!(!r.aggregates.contains_key("skipped"));
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        let back = ExperimentReport::from_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_round_trip_and_row_count() {
        let r = sample();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let rows = ExperimentReport::read_csv_rows(&buf[..]).unwrap();
        assert_eq!(rows.len(), r.config.trials * r.config.dims.len());
        assert_eq!(rows, r.rows);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
