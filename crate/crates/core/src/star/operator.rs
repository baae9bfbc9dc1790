use crate::imgcore::Plane;

/// Forward differences along x and y; the last column/row difference is zero.
pub fn forward_gradient(p: &Plane) -> (Plane, Plane) {
    let (w, h) = p.dims();
    let mut gx = Plane::new(w, h, 0.0);
    let mut gy = Plane::new(w, h, 0.0);
    let d = p.data();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                gx.data_mut()[i] = d[i + 1] - d[i];
            }
            if y + 1 < h {
                gy.data_mut()[i] = d[i + w] - d[i];
            }
        }
    }
    (gx, gy)
}

/// `Σ weight² (∂x p)² + (∂y p)²` over all pixels.
pub fn weighted_gradient_energy(p: &Plane, weight: &Plane) -> f64 {
    let (gx, gy) = forward_gradient(p);
    let mut acc = 0.0;
    for i in 0..p.len() {
        let w = weight.data()[i];
        acc += w * w * (gx.data()[i] * gx.data()[i] + gy.data()[i] * gy.data()[i]);
    }
    acc
}

/// Normal equations of one alternating half-step:
/// `(diag(f²) + λ Dᵀ diag(g²) D) x = f ∘ y` where `f` is the fixed factor and
/// `g` the guidance map of the factor being solved for.
pub struct NormalEquations {
    width: usize,
    height: usize,
    fixed_sq: Vec<f64>,
    /// `λ g²` per pixel.
    edge_weight: Vec<f64>,
    rhs: Vec<f64>,
    diag: Vec<f64>,
}

impl NormalEquations {
    pub fn new(fixed: &Plane, guidance: &Plane, target: &Plane, lambda: f64) -> Self {
        let (w, h) = fixed.dims();
        let fixed_sq: Vec<f64> = fixed.data().iter().map(|f| f * f).collect();
        let edge_weight: Vec<f64> = guidance.data().iter().map(|g| lambda * g * g).collect();
        let rhs = fixed
            .data()
            .iter()
            .zip(target.data())
            .map(|(f, y)| f * y)
            .collect();
        let mut diag = fixed_sq.clone();
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let mut d = 0.0;
                if x + 1 < w {
                    d += edge_weight[i];
                }
                if x > 0 {
                    d += edge_weight[i - 1];
                }
                if y + 1 < h {
                    d += edge_weight[i];
                }
                if y > 0 {
                    d += edge_weight[i - w];
                }
                diag[i] += d;
            }
        }
        NormalEquations {
            width: w,
            height: h,
            fixed_sq,
            edge_weight,
            rhs,
            diag,
        }
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `out = A x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (w, h) = (self.width, self.height);
        for (o, (f, v)) in out.iter_mut().zip(self.fixed_sq.iter().zip(x)) {
            *o = f * v;
        }
        let ew = &self.edge_weight;
        for y in 0..h {
            let row = y * w;
            for xi in 0..w {
                let i = row + xi;
                if xi + 1 < w {
                    let flux = ew[i] * (x[i + 1] - x[i]);
                    out[i] -= flux;
                    out[i + 1] += flux;
                }
                if y + 1 < h {
                    let flux = ew[i] * (x[i + w] - x[i]);
                    out[i] -= flux;
                    out[i + w] += flux;
                }
            }
        }
    }
}
