use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use nightdehaze::metrics::{format_value, MetricsReport};
use nightdehaze::pipeline::{PipelineConfig, StageTiming};
use serde::Serialize;

/// Pipeline stages in execution order; one CSV column each.
pub const STAGES: [&str; 9] = [
    "global_airlight",
    "transmittance",
    "airlight_map",
    "dehaze",
    "star",
    "enhance_structure",
    "enhance_texture",
    "nonlinear_fuse",
    "linear_fuse",
];

#[derive(Debug, Clone, Serialize)]
pub struct ImageRecord {
    pub name: String,
    pub input: String,
    pub output: Option<String>,
    /// `ok` or `failed`.
    pub status: &'static str,
    pub error: Option<String>,
    pub metrics: MetricsReport,
    pub timings: Vec<StageTiming>,
    pub pipeline_ms: f64,
    /// Decode plus encode.
    pub io_ms: f64,
    pub total_ms: f64,
}

impl ImageRecord {
    pub fn failed(name: String, input: String, error: String) -> Self {
        ImageRecord {
            name,
            input,
            output: None,
            status: "failed",
            error: Some(error),
            metrics: MetricsReport::default(),
            timings: Vec::new(),
            pipeline_ms: 0.0,
            io_ms: 0.0,
            total_ms: 0.0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub variant: String,
    pub config: PipelineConfig,
    pub images: Vec<ImageRecord>,
}

impl RunReport {
    pub fn new(variant: &str, config: PipelineConfig) -> Self {
        RunReport {
            tool: "nightdehaze",
            version: crate::VERSION,
            variant: variant.to_string(),
            config,
            images: Vec::new(),
        }
    }

    pub fn failures(&self) -> usize {
        self.images.iter().filter(|r| !r.is_ok()).count()
    }

    pub fn write_json(&self, path: &Path) -> anyhow::Result<()> {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = ["name", "status", "psnr", "ssim", "ag", "ie", "pipeline_ms", "io_ms", "total_ms"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend(STAGES.iter().map(|s| format!("{s}_ms")));
        h.push("error".to_string());
        h
    }

    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(Self::csv_header())?;
        for r in &self.images {
            let mut row = vec![
                r.name.clone(),
                r.status.to_string(),
                format_value(r.metrics.psnr),
                format_value(r.metrics.ssim),
                format_value(r.metrics.ag),
                format_value(r.metrics.ie),
                format!("{:.3}", r.pipeline_ms),
                format!("{:.3}", r.io_ms),
                format!("{:.3}", r.total_ms),
            ];
            for stage in STAGES {
                let ms = r.timings.iter().find(|t| t.stage == stage).map(|t| t.ms);
                row.push(ms.map(|v| format!("{v:.3}")).unwrap_or_default());
            }
            row.push(r.error.clone().unwrap_or_default());
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
