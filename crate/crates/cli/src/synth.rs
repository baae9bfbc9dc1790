use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::{error, warn};
use nightdehaze::airlight::AirlightMap;
use nightdehaze::dehaze::synthesize_haze;
use nightdehaze::imgcore::{load_image, save_image, save_plane};
use nightdehaze::scenes::{night_scene, AirlightField, TransmittanceField};
use nightdehaze::transmittance::{Stage, TransmittanceMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::files::{list_images, stem};
use crate::{thread_pool, ExitStatus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TransmittanceSpec {
    Constant { t: f64 },
    /// `exp(−β d)` with β drawn from `[beta_min, beta_max]` and a random centre.
    Radial { beta_min: f64, beta_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AirlightSpec {
    Constant { color: [f64; 3] },
    /// Colored light-source glow with random color, position and spread.
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazeSpec {
    pub transmittance: TransmittanceSpec,
    pub airlight: AirlightSpec,
}

impl Default for HazeSpec {
    fn default() -> Self {
        HazeSpec {
            transmittance: TransmittanceSpec::Radial {
                beta_min: 0.5,
                beta_max: 1.5,
            },
            airlight: AirlightSpec::Bump,
        }
    }
}

impl HazeSpec {
    pub fn validate(&self) -> Result<(), String> {
        match self.transmittance {
            TransmittanceSpec::Constant { t } if !(t > 0.0 && t <= 1.0) => {
                return Err(format!("constant t must be in (0, 1], got {t}"))
            }
            TransmittanceSpec::Radial { beta_min, beta_max }
                if !(beta_min >= 0.0 && beta_max >= beta_min && beta_max.is_finite()) =>
            {
                return Err(format!("need 0 <= beta_min <= beta_max, got {beta_min}..{beta_max}"))
            }
            _ => {}
        }
        if let AirlightSpec::Constant { color } = self.airlight {
            if color.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(format!("airlight color must be in [0, 1], got {color:?}"));
            }
        }
        Ok(())
    }

    /// Concrete fields for the `index`-th image; independent of processing order.
    pub fn draw(&self, seed: u64, index: usize) -> (TransmittanceField, AirlightField) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let t = match self.transmittance {
            TransmittanceSpec::Constant { t } => TransmittanceField::Constant { t },
            TransmittanceSpec::Radial { beta_min, beta_max } => TransmittanceField::Radial {
                beta: if beta_max > beta_min {
                    rng.gen_range(beta_min..beta_max)
                } else {
                    beta_min
                },
                cx: rng.gen_range(0.3..0.7),
                cy: rng.gen_range(0.3..0.7),
            },
        };
        let a = match self.airlight {
            AirlightSpec::Constant { color } => AirlightField::Constant { color },
            AirlightSpec::Bump => AirlightField::random_bump(&mut rng),
        };
        (t, a)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthEntry {
    pub name: String,
    pub clean: String,
    pub hazy: Option<String>,
    pub transmittance_map: Option<String>,
    pub airlight_map: Option<String>,
    pub transmittance: Option<TransmittanceField>,
    pub airlight: Option<AirlightField>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthManifest {
    pub version: String,
    pub seed: u64,
    pub spec: HazeSpec,
    pub entries: Vec<SynthEntry>,
}

/// Haze every clean image: writes `<stem>.png` and `manifest.json` into
/// `out_dir`, with the `<stem>_t.png` / `<stem>_a.png` maps under `out_dir/maps/`.
pub fn cmd_synth(
    clean: &Path,
    out_dir: &Path,
    spec: &HazeSpec,
    seed: u64,
    threads: usize,
) -> anyhow::Result<(Vec<SynthEntry>, ExitStatus)> {
    if let Err(e) = spec.validate() {
        error!("invalid haze spec: {e}");
        return Ok((Vec::new(), ExitStatus::ConfigError));
    }
    let inputs = match list_images(clean) {
        Ok(v) => v,
        Err(e) => {
            error!("{}: {e}", clean.display());
            return Ok((Vec::new(), ExitStatus::Partial));
        }
    };
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    if inputs.is_empty() {
        warn!("no PNG/PPM images found in {}", clean.display());
    }
    let entries: Vec<SynthEntry> = thread_pool(threads)?.install(|| {
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, path)| synth_one(path, out_dir, spec, seed, i))
            .collect()
    });
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    for e in entries.iter().filter(|e| e.error.is_some()) {
        error!("{}: {}", e.clean, e.error.as_deref().unwrap_or_default());
    }
    let manifest = SynthManifest {
        version: crate::VERSION.to_string(),
        seed,
        spec: *spec,
        entries,
    };
    let f = File::create(out_dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(BufWriter::new(f), &manifest)?;
    Ok((manifest.entries, ExitStatus::from_failures(failed)))
}

fn synth_one(path: &Path, out_dir: &Path, spec: &HazeSpec, seed: u64, index: usize) -> SynthEntry {
    let name = stem(path);
    let mut entry = SynthEntry {
        name: name.clone(),
        clean: path.display().to_string(),
        hazy: None,
        transmittance_map: None,
        airlight_map: None,
        transmittance: None,
        airlight: None,
        error: None,
    };
    let run = || -> nightdehaze::Result<(PathBuf, PathBuf, PathBuf, TransmittanceField, AirlightField)> {
        let img = load_image(path)?;
        let (w, h) = img.dims();
        let (tf, af) = spec.draw(seed, index);
        let t = tf.render(w, h)?;
        let a = af.render(w, h)?;
        let hazy = synthesize_haze(
            &img,
            &AirlightMap { a: a.clone() },
            &TransmittanceMap::new(t.clone(), Stage::Normalized),
        )?;
        let maps = out_dir.join("maps");
        std::fs::create_dir_all(&maps).map_err(|e| nightdehaze::Error::Write {
            path: maps.clone(),
            reason: e.to_string(),
        })?;
        let paths = (
            out_dir.join(format!("{name}.png")),
            maps.join(format!("{name}_t.png")),
            maps.join(format!("{name}_a.png")),
        );
        save_image(&hazy, &paths.0)?;
        save_plane(&t, &paths.1)?;
        save_image(&a, &paths.2)?;
        Ok((paths.0, paths.1, paths.2, tf, af))
    };
    match run() {
        Ok((hz, tp, ap, tf, af)) => {
            entry.hazy = Some(hz.display().to_string());
            entry.transmittance_map = Some(tp.display().to_string());
            entry.airlight_map = Some(ap.display().to_string());
            entry.transmittance = Some(tf);
            entry.airlight = Some(af);
        }
        Err(e) => entry.error = Some(e.to_string()),
    }
    entry
}

/// Writes `count` procedural clean night scenes as `scene_NNN.png`.
pub fn cmd_gen_scenes(out_dir: &Path, count: usize, width: usize, height: usize, seed: u64) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let img = night_scene(width, height, seed.wrapping_add(i as u64))?;
            let p = out_dir.join(format!("scene_{i:03}.png"));
            save_image(&img, &p)?;
            Ok(p)
        })
        .collect()
}
