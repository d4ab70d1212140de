//! Seeded Monte Carlo experiments over a grid of matrix sizes.
//!
//! Replicate `r` at size `N` always draws from the stream
//! `(master_seed, N, r)`, so a table depends only on the configuration and
//! never on how replicates were scheduled across threads.

mod config;
mod output;

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::metrics::{distance_report, DistanceReport};
use crate::rng::StreamKey;
use crate::sampler::sample_replicate;
use crate::{Error, Result};

pub use output::{
    emit_diagnostics, emit_table, format_sig12, render_svg, table_columns, table_from_csv,
    write_diagnostics, write_svg, write_table,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    DK,
    W1,
    MaxGap,
    GridSup,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::DK, Metric::W1, Metric::MaxGap, Metric::GridSup];

    pub fn name(self) -> &'static str {
        match self {
            Metric::DK => "d_k",
            Metric::W1 => "w1",
            Metric::MaxGap => "max_gap",
            Metric::GridSup => "grid_sup",
        }
    }

    pub fn of(self, report: &DistanceReport) -> f64 {
        match self {
            Metric::DK => report.d_k,
            Metric::W1 => report.w1,
            Metric::MaxGap => report.max_gap,
            Metric::GridSup => report.grid_sup,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown metric {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub master_seed: u64,
    /// Kept sorted in the canonical column order and free of duplicates.
    pub metrics: Vec<Metric>,
    pub moment_orders: Vec<f64>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![16, 32, 64, 128, 256],
            replicates: 300,
            master_seed: 20_140_101,
            metrics: Metric::ALL.to_vec(),
            moment_orders: vec![1.0, 2.0],
            output_format: OutputFormat::Csv,
            output_path: None,
            svg_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&mut self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::invalid("n_grid must not be empty"));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::invalid("every N in n_grid must be at least 1"));
        }
        if self.n_grid.iter().any(|&n| n > u32::MAX as usize) {
            return Err(Error::invalid("N too large"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self
            .moment_orders
            .iter()
            .any(|p| !(*p > 0.0 && p.is_finite()))
        {
            return Err(Error::invalid("moment orders must be positive"));
        }
        self.metrics.sort();
        self.metrics.dedup();
        Ok(())
    }

    pub fn has(&self, metric: Metric) -> bool {
        self.metrics.contains(&metric)
    }
}

/// Mean and standard error of one metric at one N.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    pub metric: Metric,
    pub mean: f64,
    /// Sample standard deviation over `√M`; absent when `M = 1`.
    pub se: Option<f64>,
}

/// Empirical moments of the normalized Kolmogorov distance `(N/log N)·d_K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LpMoment {
    pub p: f64,
    /// `mean |(N/log N)·d_K|^p`.
    pub moment: f64,
    /// `mean |(N/log N)·d_K − 1/π|^p`.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub replicates: usize,
    pub summaries: Vec<MetricSummary>,
    /// Empty when `N = 1` or `d_k` is not selected.
    pub lp: Vec<LpMoment>,
    /// `N·mean(T)/√(32 log N)`; needs `max_gap` and `N ≥ 2`.
    pub gap_stat: Option<f64>,
}

impl RateRow {
    pub fn summary(&self, metric: Metric) -> Option<&MetricSummary> {
        self.summaries.iter().find(|s| s.metric == metric)
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.summary(metric).map(|s| s.mean)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateTable {
    pub metrics: Vec<Metric>,
    pub moment_orders: Vec<f64>,
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn row(&self, n: usize) -> Option<&RateRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Pairwise summation; the rounding error grows like `log M`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `(mean, se)` with `se = s/√M` from the unbiased sample variance.
pub fn summarize(values: &[f64]) -> (f64, Option<f64>) {
    let m = values.len() as f64;
    let mean = pairwise_sum(values) / m;
    if values.len() < 2 {
        return (mean, None);
    }
    let squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&squares) / (m - 1.0);
    (mean, Some((var / m).sqrt()))
}

/// Distance reports for replicates `0..replicates` at size `n`, in
/// replicate order. Work is split across threads; results do not depend on
/// the split.
pub fn collect_reports(
    n: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<DistanceReport>> {
    let run = |r: usize| -> Result<DistanceReport> {
        let (sample, _) = sample_replicate(StreamKey::new(master_seed, n, r))?;
        Ok(distance_report(&sample))
    };
    let threads = std::thread::available_parallelism()
        .map(|t| t.get())
        .unwrap_or(1)
        .min(replicates.max(1));
    if threads <= 1 {
        return (0..replicates).map(run).collect();
    }
    let chunk = replicates.div_ceil(threads);
    let parts: Vec<Result<Vec<DistanceReport>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let run = &run;
                scope.spawn(move || {
                    let start = t * chunk;
                    let end = ((t + 1) * chunk).min(replicates);
                    (start..end).map(run).collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("replicate worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(replicates);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Aggregates one N's reports into a table row.
pub fn aggregate_row(
    n: usize,
    reports: &[DistanceReport],
    metrics: &[Metric],
    moment_orders: &[f64],
) -> RateRow {
    let summaries = metrics
        .iter()
        .map(|&metric| {
            let values: Vec<f64> = reports.iter().map(|r| metric.of(r)).collect();
            let (mean, se) = summarize(&values);
            MetricSummary { metric, mean, se }
        })
        .collect::<Vec<_>>();

    let log_n = (n as f64).ln();
    let lp = if n >= 2 && metrics.contains(&Metric::DK) {
        let scaled: Vec<f64> = reports.iter().map(|r| n as f64 / log_n * r.d_k).collect();
        moment_orders
            .iter()
            .map(|&p| {
                let raw: Vec<f64> = scaled.iter().map(|v| v.abs().powf(p)).collect();
                let dev: Vec<f64> = scaled
                    .iter()
                    .map(|v| (v - 1.0 / PI).abs().powf(p))
                    .collect();
                LpMoment {
                    p,
                    moment: pairwise_sum(&raw) / raw.len() as f64,
                    deviation: pairwise_sum(&dev) / dev.len() as f64,
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let gap_stat = summaries
        .iter()
        .find(|s| s.metric == Metric::MaxGap)
        .filter(|_| n >= 2)
        .map(|s| n as f64 * s.mean / (32.0 * log_n).sqrt());

    RateRow {
        n,
        replicates: reports.len(),
        summaries,
        lp,
        gap_stat,
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RateTable> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let rows = cfg
        .n_grid
        .iter()
        .map(|&n| {
            let reports = collect_reports(n, cfg.replicates, cfg.master_seed)?;
            Ok(aggregate_row(n, &reports, &cfg.metrics, &cfg.moment_orders))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable {
        metrics: cfg.metrics.clone(),
        moment_orders: cfg.moment_orders.clone(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRow {
    pub n: usize,
    /// `N·mean(d_K)/log N`.
    pub ratio_dk: Option<f64>,
    /// `N·mean(W₁)/√(log N)`.
    pub ratio_w1: Option<f64>,
    pub gap_stat: Option<f64>,
    pub lp: Vec<LpMoment>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateDiagnostics {
    pub rows: Vec<DiagnosticRow>,
}

impl RateDiagnostics {
    pub fn row(&self, n: usize) -> Option<&DiagnosticRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Normalized rate statistics; rows with `N = 1` are dropped.
pub fn rate_diagnostics(table: &RateTable) -> Result<RateDiagnostics> {
    if table.rows.len() < 2 {
        return Err(Error::invalid("rate diagnostics need at least two rows"));
    }
    let rows = table
        .rows
        .iter()
        .filter(|r| r.n >= 2)
        .map(|r| {
            let nf = r.n as f64;
            let log_n = nf.ln();
            DiagnosticRow {
                n: r.n,
                ratio_dk: r.mean(Metric::DK).map(|m| nf * m / log_n),
                ratio_w1: r.mean(Metric::W1).map(|m| nf * m / log_n.sqrt()),
                gap_stat: r.gap_stat,
                lp: r.lp.clone(),
            }
        })
        .collect();
    Ok(RateDiagnostics { rows })
}
