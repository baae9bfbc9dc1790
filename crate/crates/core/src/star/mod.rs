//! Structure/texture decomposition of a luminance plane.
//!
//! `Y ≈ L ∘ R` with a smooth structure layer `L` and a texture layer `R`,
//! found by alternately minimizing
//!
//! ```text
//! ‖Y − L∘R‖² + α ‖S0 ∇L‖² + β ‖T0 ∇R‖²
//! ```
//!
//! over `L` and `R`. Each half-step is a sparse SPD linear system solved
//! matrix-free with preconditioned conjugate gradient.

mod cg;
mod operator;

pub use cg::{solve_pcg, CgOutcome};
pub use operator::{forward_gradient, weighted_gradient_energy, NormalEquations};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{box_mean, gaussian_filter, rgb_to_yuv, yuv_to_rgb, Plane, RgbImage, YuvImage};

const INIT_SIGMA: f64 = 3.0;
const INIT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarParams {
    pub alpha: f64,
    pub beta: f64,
    pub k_outer: usize,
    pub gamma_s: f64,
    pub gamma_t: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub epsilon_g: f64,
}

impl Default for StarParams {
    fn default() -> Self {
        StarParams {
            alpha: 0.001,
            beta: 0.0001,
            k_outer: 20,
            gamma_s: 0.5,
            gamma_t: 1.5,
            inner_tol: 1e-5,
            inner_max: 200,
            epsilon_g: 1e-4,
        }
    }
}

impl StarParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(Error::invalid("alpha/beta", "must be positive"));
        }
        if self.k_outer < 1 {
            return Err(Error::invalid("k_outer", "must be >= 1"));
        }
        if !(self.inner_tol > 0.0 && self.inner_tol < 1.0) {
            return Err(Error::invalid("inner_tol", "must lie in (0, 1)"));
        }
        if self.inner_max < 1 {
            return Err(Error::invalid("inner_max", "must be >= 1"));
        }
        if !(self.epsilon_g > 0.0 && self.gamma_s > 0.0 && self.gamma_t > 0.0) {
            return Err(Error::invalid("gamma/epsilon_g", "must be positive"));
        }
        Ok(())
    }
}

/// Which factor an inner solve updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Structure,
    Texture,
}

/// Snapshot of one inner linear solve, handed to an observer.
pub struct InnerSolve<'a> {
    pub outer: usize,
    pub factor: Factor,
    /// The factor held fixed during this solve.
    pub fixed: &'a Plane,
    pub guidance: &'a Plane,
    pub lambda: f64,
    pub target: &'a Plane,
    /// Solution before any projection.
    pub solution: &'a [f64],
    pub outcome: CgOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarDecomposition {
    /// Smooth illumination/structure layer `L`.
    pub structure: Plane,
    /// Reflectance/texture layer `R`.
    pub texture: Plane,
    /// Energy after each outer iteration.
    pub objective_trace: Vec<f64>,
    /// Energy of the initial guess.
    pub initial_objective: f64,
    /// `‖L∘R − Y‖ / ‖Y‖`.
    pub relative_residual: f64,
    pub inner_iterations: Vec<usize>,
}

/// Structure and texture guidance weights.
pub fn guidance_maps(y: &Plane, p: &StarParams) -> (Plane, Plane) {
    let (gx, gy) = forward_gradient(y);
    let mag = gx.zip_map(&gy, |a, b| (a * a + b * b).sqrt()).expect("same dims");
    let g = box_mean(&mag, 1);
    let weight = |gamma: f64| {
        let raw = g.map(|v| 1.0 / (v.max(0.0).powf(gamma) + p.epsilon_g));
        let peak = raw.max();
        raw.map(|v| v / peak)
    };
    (weight(p.gamma_s), weight(p.gamma_t))
}

/// Energy of a candidate `(L, R)` pair.
pub fn objective(
    y: &Plane,
    l: &Plane,
    r: &Plane,
    s0: &Plane,
    t0: &Plane,
    alpha: f64,
    beta: f64,
) -> f64 {
    let mut data = 0.0;
    for i in 0..y.len() {
        let e = y.data()[i] - l.data()[i] * r.data()[i];
        data += e * e;
    }
    data + alpha * weighted_gradient_energy(l, s0) + beta * weighted_gradient_energy(r, t0)
}

fn relative_residual(y: &Plane, l: &Plane, r: &Plane) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..y.len() {
        let e = l.data()[i] * r.data()[i] - y.data()[i];
        num += e * e;
        den += y.data()[i] * y.data()[i];
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

pub fn decompose(y: &Plane, p: &StarParams) -> Result<StarDecomposition> {
    p.validate()?;
    if !y.is_finite() {
        return Err(Error::NonFinite);
    }
    let (s0, t0) = guidance_maps(y, p);
    decompose_with_guidance(y, &s0, &t0, p, None)
}

/// Alternating minimization with caller-supplied guidance maps. The optional
/// observer sees every inner solve.
pub fn decompose_with_guidance(
    y: &Plane,
    s0: &Plane,
    t0: &Plane,
    p: &StarParams,
    mut observer: Option<&mut dyn FnMut(&InnerSolve<'_>)>,
) -> Result<StarDecomposition> {
    p.validate()?;
    y.check_same(s0)?;
    y.check_same(t0)?;
    if !(y.is_finite() && s0.is_finite() && t0.is_finite()) {
        return Err(Error::NonFinite);
    }

    let mut l = gaussian_filter(y, INIT_SIGMA)?;
    let mut r = y.zip_map(&l, |yv, lv| yv / (lv + INIT_EPS))?;
    let initial_objective = objective(y, &l, &r, s0, t0, p.alpha, p.beta);
    let mut trace = Vec::with_capacity(p.k_outer);
    let mut inner_iterations = Vec::with_capacity(2 * p.k_outer);

    for outer in 0..p.k_outer {
        for factor in [Factor::Structure, Factor::Texture] {
            let (fixed, guidance, lambda) = match factor {
                Factor::Structure => (&r, s0, p.alpha),
                Factor::Texture => (&l, t0, p.beta),
            };
            let sys = NormalEquations::new(fixed, guidance, y, lambda);
            let mut x = match factor {
                Factor::Structure => l.data().to_vec(),
                Factor::Texture => r.data().to_vec(),
            };
            let outcome = solve_pcg(&sys, &mut x, p.inner_tol, p.inner_max);
            inner_iterations.push(outcome.iterations);
            if let Some(obs) = observer.as_mut() {
                obs(&InnerSolve {
                    outer,
                    factor,
                    fixed,
                    guidance,
                    lambda,
                    target: y,
                    solution: &x,
                    outcome,
                });
            }
            // exact minimizers are non-negative (M-matrix, non-negative rhs);
            // clip round-off
            x.iter_mut().for_each(|v| *v = v.max(0.0));
            let solved = Plane::from_vec(y.width(), y.height(), x)?;
            match factor {
                Factor::Structure => l = solved,
                Factor::Texture => r = solved,
            }
        }
        trace.push(objective(y, &l, &r, s0, t0, p.alpha, p.beta));
    }

    let relative_residual = relative_residual(y, &l, &r);
    Ok(StarDecomposition {
        structure: l,
        texture: r,
        objective_trace: trace,
        initial_objective,
        relative_residual,
        inner_iterations,
    })
}

/// Color image split into a structure layer (decomposed `Y` with the original
/// chroma) and a texture plane.
#[derive(Debug, Clone)]
pub struct StarLayers {
    pub structure: RgbImage,
    pub texture: Plane,
    pub decomposition: StarDecomposition,
}

pub fn star_yuv(img: &RgbImage, p: &StarParams) -> Result<StarLayers> {
    let yuv = rgb_to_yuv(img);
    let decomposition = decompose(&yuv.y, p)?;
    let structure = yuv_to_rgb(&YuvImage {
        y: decomposition.structure.clone(),
        u: yuv.u,
        v: yuv.v,
    });
    Ok(StarLayers {
        structure,
        texture: decomposition.texture.clone(),
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guidance_of_constant_plane() {
        let (s0, t0) = guidance_maps(&Plane::new(6, 5, 0.4), &StarParams::default());
        assert!(s0.data().iter().all(|&v| v == 1.0));
        assert!(t0.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn guidance_penalizes_edges_less() {
        let y = Plane::from_fn(16, 16, |x, _| if x < 8 { 0.2 } else { 0.8 });
        let (s0, t0) = guidance_maps(&y, &StarParams::default());
        assert!(s0.get(7, 8) < s0.get(2, 8));
        assert!(t0.get(7, 8) < t0.get(2, 8));
        // with g < 1 the larger exponent yields the milder edge drop
        assert!(s0.get(7, 8) / s0.get(2, 8) < t0.get(7, 8) / t0.get(2, 8));
    }

    #[test]
    fn operator_matches_diagonal() {
        let f = Plane::from_fn(5, 4, |x, y| 0.3 + 0.1 * x as f64 - 0.05 * y as f64);
        let g = Plane::from_fn(5, 4, |x, y| 1.0 / (1.0 + (x * y) as f64));
        let sys = NormalEquations::new(&f, &g, &f, 0.7);
        let mut e = vec![0.0; 20];
        let mut col = vec![0.0; 20];
        for i in 0..20 {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[i] = 1.0;
            sys.apply(&e, &mut col);
            assert!((col[i] - sys.diagonal()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut y = Plane::new(4, 4, 0.5);
        y.set(1, 1, f64::NAN);
        assert!(matches!(decompose(&y, &StarParams::default()), Err(Error::NonFinite)));
        let p = StarParams {
            k_outer: 0,
            ..Default::default()
        };
        assert!(decompose(&Plane::new(4, 4, 0.5), &p).is_err());
    }

    #[test]
    fn constant_plane_fixed_point() {
        let y = Plane::new(12, 12, 0.6);
        let d = decompose(&y, &StarParams::default()).unwrap();
        let prod = d.structure.zip_map(&d.texture, |a, b| a * b).unwrap();
        assert!(prod.data().iter().all(|v| (v - 0.6).abs() < 1e-3));
        let (gx, gy) = forward_gradient(&d.structure);
        assert!(gx.data().iter().chain(gy.data()).all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn all_black_plane_is_stable() {
        let d = decompose(&Plane::new(8, 8, 0.0), &StarParams::default()).unwrap();
        assert!(d.structure.is_finite() && d.texture.is_finite());
        assert_eq!(d.relative_residual, 0.0);
    }
}
