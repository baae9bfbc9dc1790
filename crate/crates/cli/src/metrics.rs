use std::fs;
use std::path::{Path, PathBuf};

use log::error;
use nightdehaze::imgcore::load_image;
use nightdehaze::metrics::{format_value, region_ciede, MetricRegistry, MetricsReport, Region};
use serde::{Deserialize, Serialize};

use crate::files::resolve;
use crate::ExitStatus;

/// One manifest line. Relative paths are taken from the manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub output: PathBuf,
    #[serde(default)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub name: String,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
}

fn evaluate(entry: &PairEntry, base: &Path, regions: Option<&[Region]>) -> nightdehaze::Result<MetricsReport> {
    let img = load_image(resolve(base, &entry.output))?;
    let reference = entry
        .reference
        .as_ref()
        .map(|r| load_image(resolve(base, r)))
        .transpose()?;
    let mut report = MetricRegistry::builtin().report(&img, reference.as_ref())?;
    if let (Some(reference), Some(regions)) = (&reference, regions) {
        report.ciede2000 = Some(region_ciede(&img, reference, regions)?);
    }
    Ok(report)
}

/// Per-column mean over rows that carry a value.
pub fn summarize(rows: &[MetricsRow]) -> MetricsReport {
    let mean = |f: fn(&MetricsReport) -> Option<f64>| {
        let vals: Vec<f64> = rows.iter().filter_map(|r| r.metrics.as_ref().and_then(f)).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    MetricsReport {
        psnr: mean(|m| m.psnr),
        ssim: mean(|m| m.ssim),
        ag: mean(|m| m.ag),
        ie: mean(|m| m.ie),
        ciede2000: mean(|m| m.ciede2000),
    }
}

fn csv_row(name: &str, status: &str, m: Option<&MetricsReport>, err: &str) -> Vec<String> {
    let m = m.copied().unwrap_or_default();
    vec![
        name.to_string(),
        status.to_string(),
        format_value(m.psnr),
        format_value(m.ssim),
        format_value(m.ag),
        format_value(m.ie),
        format_value(m.ciede2000),
        err.to_string(),
    ]
}

/// Score every pair of a JSON manifest into a CSV with a trailing `mean` row.
pub fn cmd_metrics(manifest: &Path, out_csv: &Path, regions: Option<&Path>) -> anyhow::Result<(Vec<MetricsRow>, ExitStatus)> {
    let text = match fs::read_to_string(manifest) {
        Ok(t) => t,
        Err(e) => {
            error!("{}: {e}", manifest.display());
            return Ok((Vec::new(), ExitStatus::Partial));
        }
    };
    let pairs: Vec<PairEntry> = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => {
            error!("{}: malformed manifest: {e}", manifest.display());
            return Ok((Vec::new(), ExitStatus::ConfigError));
        }
    };
    let regions: Option<Vec<Region>> = match regions {
        None => None,
        Some(p) => match fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string())) {
            Ok(r) => Some(r),
            Err(e) => {
                error!("{}: {e}", p.display());
                return Ok((Vec::new(), ExitStatus::ConfigError));
            }
        },
    };
    let base = manifest.parent().unwrap_or(Path::new("."));
    let rows: Vec<MetricsRow> = pairs
        .iter()
        .map(|entry| {
            let name = entry.output.display().to_string();
            match evaluate(entry, base, regions.as_deref()) {
                Ok(m) => MetricsRow {
                    name,
                    metrics: Some(m),
                    error: None,
                },
                Err(e) => {
                    error!("{name}: {e}");
                    MetricsRow {
                        name,
                        metrics: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();

    let mut w = csv::Writer::from_path(out_csv)?;
    w.write_record(["name", "status", "psnr", "ssim", "ag", "ie", "ciede2000", "error"])?;
    for r in &rows {
        let status = if r.metrics.is_some() { "ok" } else { "failed" };
        w.write_record(csv_row(&r.name, status, r.metrics.as_ref(), r.error.as_deref().unwrap_or("")))?;
    }
    w.write_record(csv_row("mean", "summary", Some(&summarize(&rows)), ""))?;
    w.flush()?;
    let failed = rows.iter().filter(|r| r.metrics.is_none()).count();
    Ok((rows, ExitStatus::from_failures(failed)))
}
