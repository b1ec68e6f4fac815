//! Experiment reports: per-seed metric rows, aggregates, auxiliary tables,
//! and failure records.

use std::io::Write;

use ndarray::Array2;

use crate::error::Result;
use crate::io::csv_schema_line;
use crate::metrics;

/// One measured receptive field (one row per seed and unit).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub seed: u64,
    pub config_id: String,
    pub ipr: f64,
    pub excess_kurtosis: f64,
    pub fit_k: usize,
    pub fit_rel_residual: f64,
    pub peak: usize,
}

impl MetricRow {
    /// Measure one weight vector; `excess_kurtosis` is the stimulus-marginal
    /// estimate attached to the cell, not a property of the weights.
    pub fn measure(seed: u64, config_id: &str, excess_kurtosis: f64, w: &[f64]) -> Result<Self> {
        let fit = metrics::sinusoid_fit(w)?;
        Ok(MetricRow {
            seed,
            config_id: config_id.to_string(),
            ipr: metrics::ipr(w)?,
            excess_kurtosis,
            fit_k: fit.k,
            fit_rel_residual: fit.rel_residual,
            peak: metrics::peak_index(w)?,
        })
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.seed,
            self.config_id,
            self.ipr,
            self.excess_kurtosis,
            self.fit_k,
            self.fit_rel_residual,
            self.peak
        )
    }
}

/// A cell that errored instead of producing rows.
#[derive(Debug, Clone)]
pub struct FailureRow {
    pub seed: u64,
    pub config_id: String,
    pub code: String,
    pub message: String,
}

/// Mean and population standard deviation of IPR per configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub config_id: String,
    pub count: usize,
    pub mean_ipr: f64,
    pub std_ipr: f64,
    pub mean_excess_kurtosis: f64,
}

/// A named numeric side table written as its own CSV.
#[derive(Debug, Clone)]
pub struct AuxTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// A labelled curve for line plots.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Optional symmetric error bars per point.
    pub yerr: Option<Vec<f64>>,
}

/// Everything one experiment run produces.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub id: String,
    pub config_hash: u64,
    pub rows: Vec<MetricRow>,
    pub failures: Vec<FailureRow>,
    pub aggregates: Vec<AggregateRow>,
    pub tables: Vec<AuxTable>,
    pub curves: Vec<Series>,
    /// Final first-layer weights (units by dimension) for heatmap plots.
    pub final_weights: Option<Array2<f64>>,
}

impl ExperimentReport {
    pub fn new(id: &str, config_hash: u64) -> Self {
        ExperimentReport {
            id: id.to_string(),
            config_hash,
            rows: Vec::new(),
            failures: Vec::new(),
            aggregates: Vec::new(),
            tables: Vec::new(),
            curves: Vec::new(),
            final_weights: None,
        }
    }

    /// Recompute aggregates from the rows, preserving first-appearance order
    /// of configurations. Standard deviation is the population one.
    pub fn compute_aggregates(&mut self) {
        let mut order: Vec<String> = Vec::new();
        for row in &self.rows {
            if !order.contains(&row.config_id) {
                order.push(row.config_id.clone());
            }
        }
        self.aggregates = order
            .into_iter()
            .map(|config_id| {
                let iprs: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.config_id == config_id)
                    .map(|r| r.ipr)
                    .collect();
                let kurts: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.config_id == config_id)
                    .map(|r| r.excess_kurtosis)
                    .collect();
                let count = iprs.len();
                let mean_ipr = iprs.iter().sum::<f64>() / count as f64;
                let var =
                    iprs.iter().map(|v| (v - mean_ipr) * (v - mean_ipr)).sum::<f64>() / count as f64;
                AggregateRow {
                    config_id,
                    count,
                    mean_ipr,
                    std_ipr: var.sqrt(),
                    mean_excess_kurtosis: kurts.iter().sum::<f64>() / count as f64,
                }
            })
            .collect();
    }

    pub fn aggregate_for(&self, config_id: &str) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| a.config_id == config_id)
    }

    pub fn table(&self, name: &str) -> Option<&AuxTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn rows_for(&self, config_id: &str) -> Vec<&MetricRow> {
        self.rows.iter().filter(|r| r.config_id == config_id).collect()
    }

    pub fn metrics_csv_header(&self) -> String {
        format!(
            "{}\nseed,config_id,ipr,excess_kurtosis,fit_k,fit_rel_residual,peak",
            csv_schema_line("metrics", self.config_hash)
        )
    }

    pub fn write_metrics_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{}", self.metrics_csv_header())?;
        for row in &self.rows {
            writeln!(out, "{}", row.csv_line())?;
        }
        Ok(())
    }

    pub fn write_aggregates_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{}", csv_schema_line("aggregates", self.config_hash))?;
        writeln!(out, "config_id,count,mean_ipr,std_ipr,mean_excess_kurtosis")?;
        for a in &self.aggregates {
            writeln!(
                out,
                "{},{},{},{},{}",
                a.config_id, a.count, a.mean_ipr, a.std_ipr, a.mean_excess_kurtosis
            )?;
        }
        Ok(())
    }

    pub fn write_failures_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{}", csv_schema_line("failures", self.config_hash))?;
        writeln!(out, "seed,config_id,code,message")?;
        for f in &self.failures {
            writeln!(out, "{},{},{},{:?}", f.seed, f.config_id, f.code, f.message)?;
        }
        Ok(())
    }
}

impl AuxTable {
    pub fn write_csv<W: Write>(&self, out: &mut W, config_hash: u64) -> Result<()> {
        writeln!(out, "{}", csv_schema_line(&self.name, config_hash))?;
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Column index by name (panics on unknown name: tables are internal).
    pub fn col(&self, name: &str) -> usize {
        self.columns.iter().position(|c| c == name).unwrap_or_else(|| {
            panic!("table {} has no column {name:?} (has {:?})", self.name, self.columns)
        })
    }
}

/// One metric row per unit of a final first-layer weight matrix.
pub fn rows_for_weights(
    seed: u64,
    config_id: &str,
    excess_kurtosis: f64,
    w1: &Array2<f64>,
) -> Result<Vec<MetricRow>> {
    w1.rows()
        .into_iter()
        .map(|row| MetricRow::measure(seed, config_id, excess_kurtosis, &row.to_vec()))
        .collect()
}
