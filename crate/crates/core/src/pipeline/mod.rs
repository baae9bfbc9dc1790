//! End-to-end composition of the two stages and the fusion, with per-stage timing.

mod config;
mod variant;

pub use config::{AblationFlags, PipelineConfig, RunOptions};
pub use variant::{PipelineVariant, VariantRegistry};

use std::time::Instant;

use serde::Serialize;

use crate::airlight::{estimate_airlight_map, AirlightMap};
use crate::dehaze::{invert_model, DehazedImage};
use crate::enhance::{enhance_structure, enhance_texture};
use crate::error::{Result, StageExt};
use crate::fusion::{linear_fuse, nonlinear_fuse};
use crate::imgcore::{Plane, RgbImage};
use crate::star::{star_yuv, StarDecomposition};
use crate::transmittance::{corrected_transmittance, global_airlight, initial_transmittance, Stage, TransmittanceMap};

/// Lower bound on the uncorrected map so the inversion stays defined.
pub const UNCORRECTED_T_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub ms: f64,
}

/// Intermediate rasters kept for debug dumps.
#[derive(Debug, Clone)]
pub struct Intermediates {
    pub global_airlight: [f64; 3],
    pub transmittance: Plane,
    pub airlight: RgbImage,
    pub dehazed: RgbImage,
    pub star: Option<StarDecomposition>,
    pub structure_enhanced: Option<RgbImage>,
    pub texture_enhanced: Option<Plane>,
    pub fused: RgbImage,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub image: RgbImage,
    pub timings: Vec<StageTiming>,
    pub total_ms: f64,
    pub intermediates: Option<Intermediates>,
}

struct Clock {
    timings: Vec<StageTiming>,
}

impl Clock {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().stage(stage)?;
        self.timings.push(StageTiming {
            stage,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        Ok(out)
    }
}

pub fn run_pipeline(img: &RgbImage, cfg: &PipelineConfig) -> Result<RgbImage> {
    Ok(run_pipeline_detailed(img, cfg, false)?.image)
}

pub fn run_pipeline_detailed(img: &RgbImage, cfg: &PipelineConfig, keep_intermediates: bool) -> Result<PipelineOutput> {
    cfg.validate().stage("config")?;
    let start = Instant::now();
    let mut clock = Clock { timings: Vec::new() };
    let flags = cfg.ablation;
    let cp = &cfg.correction;

    let a_global = clock.time("global_airlight", || Ok(global_airlight(img, &cfg.dcp)))?;
    let t = clock.time("transmittance", || {
        if flags.skip_t_correction {
            let init = initial_transmittance(img, a_global, &cfg.boundary);
            Ok(TransmittanceMap::new(init.t.map(|v| v.max(UNCORRECTED_T_FLOOR)), Stage::Initial))
        } else {
            corrected_transmittance(img, a_global, &cfg.boundary, cp)
        }
    })?;
    let airlight: AirlightMap = clock.time("airlight_map", || estimate_airlight_map(img, &cfg.airlight))?;
    let dehazed: DehazedImage = clock.time("dehaze", || {
        if flags.skip_dehaze {
            Ok(DehazedImage { j: img.clone() })
        } else {
            invert_model(img, &airlight, &t)
        }
    })?;

    let mut star = None;
    let mut structure_enhanced = None;
    let mut texture_enhanced = None;
    let fused = if flags.skip_star {
        dehazed.j.clone()
    } else {
        let layers = clock.time("star", || star_yuv(&dehazed.j, &cfg.star))?;
        let s_z = clock.time("enhance_structure", || enhance_structure(&layers.structure, &cfg.enhance, &cfg.msrcr))?;
        let t_z = clock.time("enhance_texture", || enhance_texture(&layers.texture, &cfg.enhance))?;
        let fused = clock.time("nonlinear_fuse", || nonlinear_fuse(&s_z, &t_z))?;
        if keep_intermediates {
            star = Some(layers.decomposition);
            structure_enhanced = Some(s_z);
            texture_enhanced = Some(t_z);
        }
        fused
    };
    let image = clock.time("linear_fuse", || linear_fuse(&dehazed, &fused, &cfg.fusion))?;

    let intermediates = keep_intermediates.then_some(Intermediates {
        global_airlight: a_global,
        transmittance: t.t,
        airlight: airlight.a,
        dehazed: dehazed.j,
        star,
        structure_enhanced,
        texture_enhanced,
        fused,
    });
    Ok(PipelineOutput {
        image,
        timings: clock.timings,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
        intermediates,
    })
}
