//! Closed-form harmonic fields over a flat or gently varying bottom.
//!
//! Sums of modes `a cos(k·x + θ) cosh(|k|(y + d)) / cosh(|k| d)` are harmonic
//! in the whole plane and have `φ_y = 0` on `y = -d`. They serve as
//! manufactured solutions whose traces satisfy the nonlocal equations exactly.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, Grid, Wavevector};
use crate::kinematics::SurfaceState;

/// `amp · cos(k·x + phase) · cosh(|k|(y + depth)) / cosh(|k| depth)`; `amp` is the value scale on `y = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicMode {
    pub k: Wavevector,
    pub amp: f64,
    pub phase: f64,
    pub depth: f64,
}

/// `cosh(a)/cosh(b)` and `sinh(a)/cosh(b)` without overflow.
fn hyperbolic_ratio(a: f64, b: f64) -> (f64, f64) {
    let b = b.abs();
    let scale = (a.abs() - b).exp() / (1.0 + (-2.0 * b).exp());
    let tail = (-2.0 * a.abs()).exp();
    (scale * (1.0 + tail), a.signum() * scale * (1.0 - tail))
}

impl HarmonicMode {
    /// `(φ, ∂₁φ, ∂₂φ, φ_y)` at the point `(x, y)`.
    fn eval(&self, x: [f64; 2], y: f64) -> [f64; 4] {
        let kappa = self.k.modulus();
        let arg = self.k.dot(x) + self.phase;
        let (c, s) = (arg.cos(), arg.sin());
        let (ch, sh) = hyperbolic_ratio(kappa * (y + self.depth), kappa * self.depth);
        let a = self.amp;
        [a * c * ch, -a * self.k.0[0] * s * ch, -a * self.k.0[1] * s * ch, a * kappa * c * sh]
    }
}

/// A finite sum of harmonic modes.
#[derive(Clone, Debug, Default)]
pub struct HarmonicField {
    pub modes: Vec<HarmonicMode>,
}

/// Traces of a harmonic field on a curve.
#[derive(Clone, Debug)]
pub struct CurveTraces {
    pub phi: Vec<f64>,
    pub phi_x: Vec<[f64; 2]>,
    pub phi_y: Vec<f64>,
}

impl HarmonicField {
    pub fn new(modes: Vec<HarmonicMode>) -> Self {
        HarmonicField { modes }
    }

    /// `cos(k0 x) cosh(k0 (y + h0))` in one horizontal dimension.
    pub fn single(k0: f64, h0: f64) -> Self {
        HarmonicField::new(vec![HarmonicMode {
            k: Wavevector::one_d(k0),
            amp: (k0 * h0).cosh(),
            phase: 0.0,
            depth: h0,
        }])
    }

    /// The flat-bottom (depth `h0`) extension whose value on `y = 0` is `profile`.
    pub fn from_profile(profile: &Field, h0: f64) -> Self {
        let grid = profile.grid();
        let spec = profile.spectrum();
        let n = grid.len() as f64;
        let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let modes = spec
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-17 * peak)
            .map(|(p, c)| {
                // the DFT is indexed from the corner x = -L
                let k = grid.spectral_wavevector(p);
                let shift: f64 = (0..grid.dim()).map(|a| k.0[a] * grid.half_period(a)).sum();
                HarmonicMode { k, amp: c.norm() / n, phase: c.arg() + shift, depth: h0 }
            })
            .collect();
        HarmonicField { modes }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HarmonicField {
            modes: self.modes.iter().map(|m| HarmonicMode { amp: m.amp * factor, ..*m }).collect(),
        }
    }

    /// `(φ, ∇ₓφ, φ_y)` at a point.
    pub fn eval(&self, x: [f64; 2], y: f64) -> (f64, [f64; 2], f64) {
        let mut acc = [0.0; 4];
        for m in &self.modes {
            let v = m.eval(x, y);
            for i in 0..4 {
                acc[i] += v[i];
            }
        }
        (acc[0], [acc[1], acc[2]], acc[3])
    }

    /// Traces at the points `(xs[j], ys[j])`.
    pub fn on_curve(&self, xs: &[[f64; 2]], ys: &[f64]) -> CurveTraces {
        let mut out = CurveTraces { phi: Vec::new(), phi_x: Vec::new(), phi_y: Vec::new() };
        for (x, &y) in xs.iter().zip(ys) {
            let (p, px, py) = self.eval(*x, y);
            out.phi.push(p);
            out.phi_x.push(px);
            out.phi_y.push(py);
        }
        out
    }

    fn on_graph(&self, surface: &Field) -> CurveTraces {
        let grid = surface.grid();
        let xs: Vec<[f64; 2]> = (0..grid.len()).map(|j| grid.node(j)).collect();
        self.on_curve(&xs, surface.values())
    }

    /// `φ(x, η(x))`.
    pub fn trace(&self, eta: &Field) -> Field {
        Field::new(eta.grid(), self.on_graph(eta).phi).expect("grid length")
    }

    /// `φ(x, -h0 - h(x))`, the bottom potential.
    pub fn bottom_trace(&self, grid: &Arc<Grid>, h0: f64, h: Option<&Field>) -> Field {
        let y = Field::from_fn(grid, |_| -h0);
        let y = match h {
            Some(h) => y.zip_map(h, |a, b| a - b),
            None => y,
        };
        Field::new(grid, self.on_graph(&y).phi).expect("grid length")
    }

    /// Surface data `(η, η_t, φ|_η)` with `η_t` from the kinematic condition
    /// `η_t = φ_y − ∇η·(∇ₓφ − γη e₁)`. `gamma ≠ 0` needs a one-dimensional grid.
    pub fn surface_state(&self, eta: &Field, gamma: f64) -> Result<SurfaceState> {
        let grid = eta.grid();
        if gamma != 0.0 && grid.dim() != 1 {
            return Err(Error::InvalidParameter("vorticity requires a one-dimensional surface".into()));
        }
        let tr = self.on_graph(eta);
        let grad = eta.gradient();
        let eta_t = (0..grid.len())
            .map(|j| {
                let mut v = tr.phi_y[j];
                for (a, g) in grad.iter().enumerate() {
                    let shear = if a == 0 { gamma * eta.values()[j] } else { 0.0 };
                    v -= g.values()[j] * (tr.phi_x[j][a] - shear);
                }
                v
            })
            .collect();
        SurfaceState::new(eta.clone(), Field::new(grid, eta_t)?, Field::new(grid, tr.phi)?, None)
    }

    /// A bottom `y = -h0 - h(x)` that is a streamline of the flow.
    ///
    /// Requires a one-dimensional field whose modes have phase 0 and
    /// positive wavenumbers that are integer multiples of the smallest one.
    /// Then the stream function is `sin(k₁x)·G(x,y)` and the bottom is the
    /// branch of `G = 0` closest to `y = -h0`, found by Newton's method.
    pub fn streamline_bottom(&self, grid: &Arc<Grid>, h0: f64) -> Result<Field> {
        let bad = || Error::InvalidParameter("streamline bottom needs phase-0 modes on multiples of one wavenumber".into());
        if grid.dim() != 1 || self.modes.is_empty() {
            return Err(bad());
        }
        let k1 = self.modes.iter().map(|m| m.k.0[0]).fold(f64::INFINITY, f64::min);
        if !(k1 > 0.0) {
            return Err(bad());
        }
        let mut harmonics = Vec::new();
        for m in &self.modes {
            let r = m.k.0[0] / k1;
            if m.phase != 0.0 || (r - r.round()).abs() > 1e-12 {
                return Err(bad());
            }
            harmonics.push(r.round() as usize);
        }
        let hmax = *harmonics.iter().max().unwrap();
        let mut h = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            let c = (k1 * grid.node(j)[0]).cos();
            // U_{m-1}(cos θ) = sin(mθ)/sin θ
            let mut u = vec![0.0; hmax + 1];
            u[1] = 1.0;
            for i in 2..=hmax {
                u[i] = 2.0 * c * u[i - 1] - u[i - 2];
            }
            let g = |y: f64| {
                let mut val = 0.0;
                let mut der = 0.0;
                for (mode, &m) in self.modes.iter().zip(&harmonics) {
                    let kappa = mode.k.0[0];
                    let (ch, sh) = hyperbolic_ratio(kappa * (y + mode.depth), kappa * mode.depth);
                    val += mode.amp * u[m] * sh;
                    der += mode.amp * u[m] * kappa * ch;
                }
                (val, der)
            };
            let mut y = -h0;
            let mut converged = false;
            for _ in 0..100 {
                let (v, d) = g(y);
                let step = v / d;
                y -= step;
                if step.abs() < 1e-15 * (1.0 + y.abs()) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NonConvergence { iterations: 100, update: g(y).0 });
            }
            h.push(-y - h0);
        }
        Field::new(grid, h)
    }
}
