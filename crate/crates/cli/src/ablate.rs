use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::error;
use nightdehaze::imgcore::{load_image, save_image, RgbImage};
use nightdehaze::metrics::{format_value, MetricRegistry, MetricsReport};
use nightdehaze::pipeline::{PipelineConfig, VariantRegistry};
use rayon::prelude::*;

use crate::files::{list_images, stem};
use crate::{thread_pool, ExitStatus};

#[derive(Debug, Clone)]
pub struct AblationRow {
    pub image: String,
    pub variant: &'static str,
    pub label: &'static str,
    pub metrics: Option<MetricsReport>,
    pub total_ms: f64,
    pub error: Option<String>,
}

fn find_reference(dir: &Path, name: &str) -> Option<PathBuf> {
    ["png", "ppm"]
        .iter()
        .map(|ext| dir.join(format!("{name}.{ext}")))
        .find(|p| p.is_file())
}

fn run_image(path: &Path, out_dir: &Path, cfg: &PipelineConfig, reference_dir: Option<&Path>) -> Vec<AblationRow> {
    let registry = VariantRegistry::builtin();
    let name = stem(path);
    let failed_all = |e: String| {
        registry
            .iter()
            .map(|v| AblationRow {
                image: name.clone(),
                variant: v.name(),
                label: v.label(),
                metrics: None,
                total_ms: 0.0,
                error: Some(e.clone()),
            })
            .collect()
    };
    let img = match load_image(path) {
        Ok(i) => i,
        Err(e) => return failed_all(e.to_string()),
    };
    let reference: Option<RgbImage> = match reference_dir.and_then(|d| find_reference(d, &name)) {
        Some(p) => match load_image(&p) {
            Ok(r) => Some(r),
            Err(e) => return failed_all(format!("reference: {e}")),
        },
        None => None,
    };
    registry
        .iter()
        .map(|v| {
            let mut row = AblationRow {
                image: name.clone(),
                variant: v.name(),
                label: v.label(),
                metrics: None,
                total_ms: 0.0,
                error: None,
            };
            let result = v.run(&img, cfg, false).and_then(|out| {
                row.total_ms = out.total_ms;
                save_image(&out.image, out_dir.join(v.name()).join(format!("{name}.png")))?;
                MetricRegistry::builtin().report(&out.image, reference.as_ref())
            });
            match result {
                Ok(m) => row.metrics = Some(m),
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// Run the full model and every ablation on each input; writes one image per
/// variant under `out_dir/<variant>/` and `ablation.csv` with per-variant means.
pub fn cmd_ablate(
    input: &Path,
    out_dir: &Path,
    cfg: &PipelineConfig,
    reference_dir: Option<&Path>,
    threads: usize,
) -> anyhow::Result<(Vec<AblationRow>, ExitStatus)> {
    if let Err(e) = cfg.validate() {
        error!("invalid configuration: {e}");
        return Ok((Vec::new(), ExitStatus::ConfigError));
    }
    let inputs = match list_images(input) {
        Ok(v) => v,
        Err(e) => {
            error!("{}: {e}", input.display());
            return Ok((Vec::new(), ExitStatus::Partial));
        }
    };
    let registry = VariantRegistry::builtin();
    for v in registry.iter() {
        let d = out_dir.join(v.name());
        fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
    }
    let rows: Vec<AblationRow> = thread_pool(threads)?.install(|| {
        inputs
            .par_iter()
            .flat_map_iter(|p| run_image(p, out_dir, cfg, reference_dir))
            .collect()
    });

    let mut w = csv::Writer::from_path(out_dir.join("ablation.csv"))?;
    w.write_record(["image", "variant", "label", "status", "psnr", "ssim", "ag", "ie", "total_ms", "error"])?;
    let record = |image: &str, r: &AblationRow, status: &str, m: Option<&MetricsReport>, ms: f64| {
        let m = m.copied().unwrap_or_default();
        vec![
            image.to_string(),
            r.variant.to_string(),
            r.label.to_string(),
            status.to_string(),
            format_value(m.psnr),
            format_value(m.ssim),
            format_value(m.ag),
            format_value(m.ie),
            format!("{ms:.3}"),
            r.error.clone().unwrap_or_default(),
        ]
    };
    for r in &rows {
        if let Some(e) = &r.error {
            error!("{} [{}]: {e}", r.image, r.variant);
        }
        let status = if r.metrics.is_some() { "ok" } else { "failed" };
        w.write_record(record(&r.image, r, status, r.metrics.as_ref(), r.total_ms))?;
    }
    for v in registry.iter() {
        let mine: Vec<&AblationRow> = rows.iter().filter(|r| r.variant == v.name()).collect();
        let Some(first) = mine.first() else { continue };
        let ok: Vec<(&MetricsReport, f64)> = mine.iter().filter_map(|r| r.metrics.as_ref().map(|m| (m, r.total_ms))).collect();
        let mean = |f: fn(&MetricsReport) -> Option<f64>| {
            let vals: Vec<f64> = ok.iter().filter_map(|(m, _)| f(m)).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        let summary = MetricsReport {
            psnr: mean(|m| m.psnr),
            ssim: mean(|m| m.ssim),
            ag: mean(|m| m.ag),
            ie: mean(|m| m.ie),
            ciede2000: None,
        };
        let ms = if ok.is_empty() { 0.0 } else { ok.iter().map(|(_, t)| t).sum::<f64>() / ok.len() as f64 };
        let blank = AblationRow { error: None, ..(*first).clone() };
        w.write_record(record("mean", &blank, "summary", Some(&summary), ms))?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok((rows, ExitStatus::from_failures(failed)))
}
