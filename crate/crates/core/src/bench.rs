//! Throughput in elements per second, where an element is one sample of one
//! evaluated combination: `C(M, 3) * N` per full search.

use serde::Serialize;

use crate::datamodel::BitPlaneDataset;
use crate::error::{Error, Result};
use crate::kernels::{instruction_count_model, KernelVariant};
use crate::search::{num_combinations, run_search, SearchConfig, SearchResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub variant: String,
    #[serde(rename = "M")]
    pub num_snps: usize,
    #[serde(rename = "N")]
    pub num_samples: usize,
    pub threads: usize,
    #[serde(rename = "elapsed_s")]
    pub elapsed_seconds: f64,
    pub elements: u64,
    #[serde(rename = "eps")]
    pub elements_per_second: f64,
    #[serde(rename = "eps_per_thread")]
    pub elements_per_second_per_thread: f64,
    #[serde(rename = "model_ops")]
    pub model_ops_per_element: u32,
    #[serde(rename = "model_bytes")]
    pub model_bytes_per_element: u32,
    #[serde(rename = "ai")]
    pub estimated_arithmetic_intensity: f64,
    /// Every repeat's wall time; `elapsed_s` is the minimum.
    #[serde(rename = "repeats_s")]
    pub repeats: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const CSV_COLUMNS: [&str; 11] = [
    "variant",
    "M",
    "N",
    "threads",
    "elapsed_s",
    "elements",
    "eps",
    "eps_per_thread",
    "model_ops",
    "model_bytes",
    "ai",
];

impl BenchReport {
    /// Derives every rate and model field from the raw measurement.
    pub fn from_timing(
        variant: KernelVariant,
        num_snps: usize,
        num_samples: usize,
        threads: usize,
        repeats: Vec<f64>,
    ) -> Result<Self> {
        let elapsed = repeats.iter().copied().fold(f64::INFINITY, f64::min);
        if !(elapsed.is_finite() && elapsed > 0.0) || threads == 0 {
            return Err(Error::InvalidParameter(format!(
                "need a positive elapsed time and thread count, got {elapsed} s / {threads}"
            )));
        }
        let elements = num_combinations(num_snps as u64, 3)?
            .checked_mul(num_samples as u64)
            .ok_or_else(|| Error::InvalidParameter("element count overflows".into()))?;
        let eps = elements as f64 / elapsed;
        let model = instruction_count_model(variant);
        Ok(Self {
            variant: variant.short_name().to_string(),
            num_snps,
            num_samples,
            threads,
            elapsed_seconds: elapsed,
            elements,
            elements_per_second: eps,
            elements_per_second_per_thread: eps / threads as f64,
            model_ops_per_element: model.ops_per_element,
            model_bytes_per_element: model.bytes_per_element,
            estimated_arithmetic_intensity: model.arithmetic_intensity(),
            repeats,
        })
    }
}

/// Runs the search `repeats` times and keeps the fastest wall time. Fails if
/// any repeat disagrees with the first.
pub fn measure(
    ds: &BitPlaneDataset,
    cfg: &SearchConfig,
    repeats: usize,
) -> Result<(BenchReport, SearchResult)> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let mut times = Vec::with_capacity(repeats);
    let mut first: Option<SearchResult> = None;
    for _ in 0..repeats {
        let r = run_search(ds, cfg)?;
        times.push(r.stats.elapsed_seconds);
        match &first {
            None => first = Some(r),
            Some(f) if !f.same_outcome(&r) => {
                return Err(Error::InvalidParameter(format!(
                    "repeat disagreed: {:?} vs {:?}",
                    f.best, r.best
                )))
            }
            Some(_) => {}
        }
    }
    let report = BenchReport::from_timing(cfg.variant, ds.num_snps(), ds.num_samples(), cfg.threads, times)?;
    Ok((report, first.expect("at least one repeat")))
}

pub fn emit_report(report: &BenchReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => {
            let r = report;
            format!(
                "{}\n{},{},{},{},{:.9},{},{:.6e},{:.6e},{},{},{:.6}\n",
                CSV_COLUMNS.join(","),
                r.variant,
                r.num_snps,
                r.num_samples,
                r.threads,
                r.elapsed_seconds,
                r.elements,
                r.elements_per_second,
                r.elements_per_second_per_thread,
                r.model_ops_per_element,
                r.model_bytes_per_element,
                r.estimated_arithmetic_intensity,
            )
            .into_bytes()
        }
    }
}
