use std::sync::Arc;

use super::config::PipelineConfig;
use super::{run_pipeline_detailed, PipelineOutput};
use crate::error::Result;
use crate::imgcore::RgbImage;

/// A named way of running the pipeline, selectable at runtime.
pub trait PipelineVariant: Send + Sync {
    fn name(&self) -> &'static str;

    /// Short human-readable label for reports.
    fn label(&self) -> &'static str;

    /// Configuration actually used for this variant, derived from `base`.
    fn configure(&self, base: &PipelineConfig) -> PipelineConfig;

    fn run(&self, img: &RgbImage, base: &PipelineConfig, keep_intermediates: bool) -> Result<PipelineOutput> {
        run_pipeline_detailed(img, &self.configure(base), keep_intermediates)
    }
}

/// Full model or one of the three single-component ablations.
struct Ablation {
    name: &'static str,
    label: &'static str,
    skip_t_correction: bool,
    skip_dehaze: bool,
    skip_star: bool,
}

impl PipelineVariant for Ablation {
    fn name(&self) -> &'static str {
        self.name
    }

    fn label(&self) -> &'static str {
        self.label
    }

    fn configure(&self, base: &PipelineConfig) -> PipelineConfig {
        let mut cfg = *base;
        cfg.ablation.skip_t_correction = self.skip_t_correction;
        cfg.ablation.skip_dehaze = self.skip_dehaze;
        cfg.ablation.skip_star = self.skip_star;
        cfg
    }
}

/// Registered variants, looked up by name.
pub struct VariantRegistry {
    variants: Vec<Arc<dyn PipelineVariant>>,
}

impl VariantRegistry {
    pub fn empty() -> Self {
        VariantRegistry { variants: Vec::new() }
    }

    /// `full`, `no-t`, `no-dehaze`, `no-star`.
    pub fn builtin() -> Self {
        let mut reg = VariantRegistry::empty();
        for (name, label, t, d, s) in [
            ("full", "Full Model", false, false, false),
            ("no-t", "w/o T", true, false, false),
            ("no-dehaze", "w/o Dehaze", false, true, false),
            ("no-star", "w/o STAR", false, false, true),
        ] {
            reg.register(Arc::new(Ablation {
                name,
                label,
                skip_t_correction: t,
                skip_dehaze: d,
                skip_star: s,
            }));
        }
        reg
    }

    /// Replaces any variant already registered under the same name.
    pub fn register(&mut self, variant: Arc<dyn PipelineVariant>) {
        if let Some(slot) = self.variants.iter_mut().find(|v| v.name() == variant.name()) {
            *slot = variant;
        } else {
            self.variants.push(variant);
        }
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn PipelineVariant>> {
        self.variants.iter().find(|v| v.name() == name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.variants.iter().map(|v| v.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn PipelineVariant>> {
        self.variants.iter()
    }
}

impl Default for VariantRegistry {
    fn default() -> Self {
        VariantRegistry::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        let reg = VariantRegistry::builtin();
        assert_eq!(reg.names(), vec!["full", "no-t", "no-dehaze", "no-star"]);
        let cfg = reg.get("no-star").unwrap().configure(&PipelineConfig::default());
        assert!(cfg.ablation.skip_star && !cfg.ablation.skip_dehaze && !cfg.ablation.skip_t_correction);
        assert!(reg.get("w/o everything").is_none());
    }

    #[test]
    fn full_clears_flags() {
        let mut base = PipelineConfig::default();
        base.ablation.skip_dehaze = true;
        let cfg = VariantRegistry::builtin().get("full").unwrap().configure(&base);
        assert_eq!(cfg.ablation, Default::default());
    }
}
