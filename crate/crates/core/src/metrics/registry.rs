use crate::error::Result;
use crate::imgcore::RgbImage;

use super::{average_gradient, information_entropy, psnr, ssim, MetricsReport};

/// A named image-quality measure.
pub trait Metric: Send + Sync {
    fn name(&self) -> &'static str;

    /// Full-reference metrics return `None` when no reference is given.
    fn needs_reference(&self) -> bool;

    fn evaluate(&self, img: &RgbImage, reference: Option<&RgbImage>) -> Result<Option<f64>>;
}

struct Psnr;
struct Ssim;
struct AverageGradient;
struct Entropy;

impl Metric for Psnr {
    fn name(&self) -> &'static str {
        "psnr"
    }
    fn needs_reference(&self) -> bool {
        true
    }
    fn evaluate(&self, img: &RgbImage, reference: Option<&RgbImage>) -> Result<Option<f64>> {
        reference.map(|r| psnr(img, r)).transpose()
    }
}

impl Metric for Ssim {
    fn name(&self) -> &'static str {
        "ssim"
    }
    fn needs_reference(&self) -> bool {
        true
    }
    fn evaluate(&self, img: &RgbImage, reference: Option<&RgbImage>) -> Result<Option<f64>> {
        reference.map(|r| ssim(img, r)).transpose()
    }
}

impl Metric for AverageGradient {
    fn name(&self) -> &'static str {
        "ag"
    }
    fn needs_reference(&self) -> bool {
        false
    }
    fn evaluate(&self, img: &RgbImage, _: Option<&RgbImage>) -> Result<Option<f64>> {
        average_gradient(img).map(Some)
    }
}

impl Metric for Entropy {
    fn name(&self) -> &'static str {
        "ie"
    }
    fn needs_reference(&self) -> bool {
        false
    }
    fn evaluate(&self, img: &RgbImage, _: Option<&RgbImage>) -> Result<Option<f64>> {
        Ok(Some(information_entropy(img)))
    }
}

pub struct MetricRegistry {
    metrics: Vec<Box<dyn Metric>>,
}

impl MetricRegistry {
    pub fn empty() -> Self {
        MetricRegistry { metrics: Vec::new() }
    }

    /// PSNR, SSIM, AG and IE, in report column order.
    pub fn builtin() -> Self {
        let mut reg = MetricRegistry::empty();
        reg.register(Box::new(Psnr));
        reg.register(Box::new(Ssim));
        reg.register(Box::new(AverageGradient));
        reg.register(Box::new(Entropy));
        reg
    }

    pub fn register(&mut self, metric: Box<dyn Metric>) {
        self.metrics.retain(|m| m.name() != metric.name());
        self.metrics.push(metric);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Metric> {
        self.metrics.iter().find(|m| m.name() == name).map(|m| m.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.metrics.iter().map(|m| m.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Metric> {
        self.metrics.iter().map(|m| m.as_ref())
    }

    /// Fill a report from the registered metrics with known names.
    pub fn report(&self, img: &RgbImage, reference: Option<&RgbImage>) -> Result<MetricsReport> {
        let mut out = MetricsReport::default();
        for m in self.iter() {
            let v = m.evaluate(img, reference)?;
            match m.name() {
                "psnr" => out.psnr = v,
                "ssim" => out.ssim = v,
                "ag" => out.ag = v,
                "ie" => out.ie = v,
                _ => {}
            }
        }
        Ok(out)
    }
}

impl Default for MetricRegistry {
    fn default() -> Self {
        MetricRegistry::builtin()
    }
}
