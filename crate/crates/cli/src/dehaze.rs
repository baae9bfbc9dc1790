use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use log::{error, info, warn};
use nightdehaze::imgcore::{load_image, save_image, save_plane};
use nightdehaze::metrics::MetricRegistry;
use nightdehaze::pipeline::{Intermediates, PipelineConfig, PipelineVariant, VariantRegistry};
use rayon::prelude::*;

use crate::files::{list_images, stem};
use crate::report::{ImageRecord, RunReport};
use crate::{thread_pool, ExitStatus};

#[derive(Debug, Clone)]
pub struct DehazeOptions {
    /// Registered variant name, e.g. `full` or `no-star`.
    pub variant: String,
    /// 0 uses every core.
    pub threads: usize,
    pub debug_dump: bool,
}

impl Default for DehazeOptions {
    fn default() -> Self {
        DehazeOptions {
            variant: "full".to_string(),
            threads: 0,
            debug_dump: false,
        }
    }
}

/// Run one variant over a file or directory and write `<stem>.png` per input,
/// plus `report.json` and `report.csv`.
pub fn cmd_dehaze(
    input: &Path,
    out_dir: &Path,
    cfg: &PipelineConfig,
    opts: &DehazeOptions,
) -> anyhow::Result<(RunReport, ExitStatus)> {
    let mut report = RunReport::new(&opts.variant, *cfg);
    if let Err(e) = cfg.validate() {
        error!("invalid configuration: {e}");
        return Ok((report, ExitStatus::ConfigError));
    }
    let Some(variant) = VariantRegistry::builtin().get(&opts.variant) else {
        error!("unknown variant `{}`", opts.variant);
        return Ok((report, ExitStatus::ConfigError));
    };
    let inputs = match list_images(input) {
        Ok(v) => v,
        Err(e) => {
            error!("{}: {e}", input.display());
            return Ok((report, ExitStatus::Partial));
        }
    };
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    if inputs.is_empty() {
        warn!("no PNG/PPM images found in {}", input.display());
    }

    let debug = opts.debug_dump || cfg.run.debug_dump;
    let threads = if opts.threads > 0 { opts.threads } else { cfg.run.threads };
    let pool = thread_pool(threads)?;
    report.images = pool.install(|| {
        inputs
            .par_iter()
            .map(|path| process_one(path, out_dir, variant.as_ref(), cfg, debug))
            .collect()
    });
    for r in report.images.iter().filter(|r| !r.is_ok()) {
        error!("{}: {}", r.input, r.error.as_deref().unwrap_or("failed"));
    }

    report.write_json(&out_dir.join("report.json"))?;
    report.write_csv(&out_dir.join("report.csv"))?;
    let status = ExitStatus::from_failures(report.failures());
    info!("{} image(s), {} failed", report.images.len(), report.failures());
    Ok((report, status))
}

fn process_one(path: &Path, out_dir: &Path, variant: &dyn PipelineVariant, cfg: &PipelineConfig, debug: bool) -> ImageRecord {
    let start = Instant::now();
    let name = stem(path);
    let input = path.display().to_string();
    let img = match load_image(path) {
        Ok(img) => img,
        Err(e) => return ImageRecord::failed(name, input, e.to_string()),
    };
    let decode_ms = start.elapsed().as_secs_f64() * 1e3;
    let out = match variant.run(&img, cfg, debug) {
        Ok(o) => o,
        Err(e) => return ImageRecord::failed(name, input, e.to_string()),
    };
    let metrics = match MetricRegistry::builtin().report(&out.image, None) {
        Ok(m) => m,
        Err(e) => return ImageRecord::failed(name, input, e.to_string()),
    };
    let encode_start = Instant::now();
    let out_path = out_dir.join(format!("{name}.png"));
    if let Err(e) = save_image(&out.image, &out_path) {
        return ImageRecord::failed(name, input, e.to_string());
    }
    let encode_ms = encode_start.elapsed().as_secs_f64() * 1e3;
    if let Some(inter) = &out.intermediates {
        if let Err(e) = dump_intermediates(&out_dir.join("debug").join(&name), inter) {
            return ImageRecord::failed(name, input, format!("debug dump: {e:#}"));
        }
    }
    ImageRecord {
        name,
        input,
        output: Some(out_path.display().to_string()),
        status: "ok",
        error: None,
        metrics,
        timings: out.timings,
        pipeline_ms: out.total_ms,
        io_ms: decode_ms + encode_ms,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Writes every kept intermediate as PNG plus the STAR objective trace as CSV.
/// Texture planes (range `[0, 2]`) are halved so 1 maps to mid-gray.
pub fn dump_intermediates(dir: &Path, inter: &Intermediates) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };
    save_plane(&inter.transmittance, put("transmittance.png"))?;
    save_image(&inter.airlight, put("airlight.png"))?;
    save_image(&inter.dehazed, put("dehazed.png"))?;
    save_image(&inter.fused, put("fused.png"))?;
    if let Some(s) = &inter.structure_enhanced {
        save_image(s, put("structure_enhanced.png"))?;
    }
    if let Some(t) = &inter.texture_enhanced {
        save_plane(&t.map(|v| 0.5 * v), put("texture_enhanced.png"))?;
    }
    if let Some(star) = &inter.star {
        save_plane(&star.structure, put("structure.png"))?;
        save_plane(&star.texture.map(|v| 0.5 * v), put("texture.png"))?;
        let mut w = csv::Writer::from_path(put("star_trace.csv"))?;
        w.write_record(["iteration", "objective", "structure_cg_iterations", "texture_cg_iterations"])?;
        w.write_record(["0".to_string(), format!("{:.12e}", star.initial_objective), String::new(), String::new()])?;
        for (k, e) in star.objective_trace.iter().enumerate() {
            let it = |j: usize| star.inner_iterations.get(2 * k + j).map(|v| v.to_string()).unwrap_or_default();
            w.write_record([(k + 1).to_string(), format!("{e:.12e}"), it(0), it(1)])?;
        }
        w.flush()?;
    }
    Ok(written)
}
