//! Residuals of the nonlocal (global-relation) equations and of the
//! Bernoulli conditions.
//!
//! Every Fourier residual is reported multiplied by `exp(-|k| M)` with
//! `M = h0 + max|η| + max|h|` (or `max|Y|` for parametric surfaces). All
//! hyperbolic factors are evaluated in that scaled form, so large wavenumbers
//! never overflow and reports for one state share a common normalization.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Grid, Wavevector};
use crate::kinematics::{curvature_term, surface_tension_with_coefficient, ParametricSurface, SurfaceState};

/// How `sigma` enters the surface-tension term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TensionScaling {
    /// `σ/ρ` multiplies the curvature.
    PerDensity,
    /// `σ` multiplies the curvature directly.
    Raw,
}

#[derive(Clone, Debug)]
pub struct PhysicalParams {
    pub g: f64,
    pub h0: f64,
    /// Bottom perturbation; the bottom is `y = -(h0 + h)`.
    pub h: Option<Field>,
    pub sigma: f64,
    pub rho: f64,
    pub gamma: f64,
    pub tension: TensionScaling,
    /// Overflow guard on `|k|`; `None` means `50 / h0`.
    pub kappa_max: Option<f64>,
}

impl PhysicalParams {
    pub fn new(g: f64, h0: f64, sigma: f64, rho: f64, gamma: f64) -> Result<Self> {
        let p = PhysicalParams {
            g,
            h0,
            h: None,
            sigma,
            rho,
            gamma,
            tension: TensionScaling::PerDensity,
            kappa_max: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_bottom(mut self, h: Field) -> Self {
        self.h = Some(h);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return bad("h0 must be positive");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be positive");
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be non-negative");
        }
        if !self.g.is_finite() || !self.gamma.is_finite() {
            return bad("g and gamma must be finite");
        }
        if let Some(k) = self.kappa_max {
            if !(k > 0.0) {
                return bad("kappa_max must be positive");
            }
        }
        Ok(())
    }

    /// The coefficient multiplying curvature in the Bernoulli conditions.
    pub fn tension_coefficient(&self) -> f64 {
        match self.tension {
            TensionScaling::PerDensity => self.sigma / self.rho,
            TensionScaling::Raw => self.sigma,
        }
    }

    pub fn kappa_guard(&self) -> f64 {
        self.kappa_max.unwrap_or(50.0 / self.h0)
    }

    fn require_flat(&self) -> Result<()> {
        match &self.h {
            Some(h) if h.sup_norm() != 0.0 => {
                Err(Error::InvalidParameter("vorticity formulations require a flat bottom".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Fourier residuals per wavevector.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub k_values: Vec<Wavevector>,
    /// Residuals multiplied by `exp(-|k| scale_depth)`.
    pub residuals: Vec<Complex64>,
    pub scale_depth: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSummary {
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub k_max: f64,
}

impl ResidualReport {
    pub fn sup_norm(&self) -> f64 {
        self.residuals.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.residuals.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn k_max(&self) -> f64 {
        self.k_values.iter().map(|k| k.modulus()).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> ResidualSummary {
        ResidualSummary { sup_norm: self.sup_norm(), l2_norm: self.l2_norm(), k_max: self.k_max() }
    }

    /// The residual at `k` without the `exp(-|k| M)` normalization (may overflow).
    pub fn unscaled(&self, i: usize) -> Complex64 {
        self.residuals[i] * (self.k_values[i].modulus() * self.scale_depth).exp()
    }

    /// CSV with columns `k,re,im` (one-dimensional) or `k1,k2,re,im`.
    pub fn to_csv(&self, dim: usize) -> String {
        let mut out = String::new();
        if dim == 1 {
            out.push_str("k,re,im\n");
        } else {
            out.push_str("k1,k2,re,im\n");
        }
        for (k, r) in self.k_values.iter().zip(&self.residuals) {
            if dim == 1 {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", k.0[0], r.re, r.im);
            } else {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", k.0[0], k.0[1], r.re, r.im);
            }
        }
        out
    }
}

/// `(cosh(a), sinh(a)) · exp(-m)` for `|a| ≤ m`.
fn scaled_hyperbolics(a: f64, m: f64) -> (f64, f64) {
    let p = (a - m).exp();
    let q = (-a - m).exp();
    (0.5 * (p + q), 0.5 * (p - q))
}

fn check_kappa(ks: &[Wavevector], guard: f64) -> Result<()> {
    for k in ks {
        let kappa = k.modulus();
        if kappa > guard {
            return Err(Error::KappaTooLarge { kappa, kappa_max: guard });
        }
    }
    Ok(())
}

fn evaluate<F>(grid: &Arc<Grid>, ks: &[Wavevector], scale_depth: f64, integrand: F) -> Result<ResidualReport>
where
    F: Fn(Wavevector, usize) -> Complex64 + Sync,
{
    let residuals = ks
        .par_iter()
        .map(|&k| grid.fourier_sum(k, |j| integrand(k, j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport { k_values: ks.to_vec(), residuals, scale_depth })
}

fn dot_k(k: Wavevector, grads: &[Field], j: usize) -> f64 {
    grads.iter().enumerate().map(|(a, g)| k.0[a] * g.values()[j]).sum()
}

fn state_grid(s: &SurfaceState) -> Result<&Arc<Grid>> {
    let grid = s.grid();
    if grid.dim() > 2 {
        return Err(Error::InvalidParameter("dimension must be 1 or 2".into()));
    }
    Ok(grid)
}

/// Both equations of the irrotational pair, with bottom potential `big_q`.
///
/// First: `∫e^{ik·x}[κη_t sinh(κη) − ik·∇q cosh(κη) + ik·∇Q cosh(κ(h+h0))]`.
/// Second: `∫e^{ik·x}[κη_t cosh(κη) − ik·∇q sinh(κη) − ik·∇Q sinh(κ(h+h0))]`.
pub fn irrotational_residuals(
    s: &SurfaceState,
    big_q: &Field,
    p: &PhysicalParams,
    ks: &[Wavevector],
) -> Result<(ResidualReport, ResidualReport)> {
    let grid = state_grid(s)?;
    if **big_q.grid() != **grid {
        return Err(Error::GridMismatch);
    }
    check_kappa(ks, p.kappa_guard())?;
    let bottom = |j: usize| p.h0 + p.h.as_ref().map_or(0.0, |h| h.values()[j]);
    let m = p.h0 + s.eta.sup_norm() + p.h.as_ref().map_or(0.0, |h| h.sup_norm());
    let gq = s.pot.gradient();
    let gbq = big_q.gradient();
    let eta = s.eta.values();
    let eta_t = s.eta_t.values();
    let first = evaluate(grid, ks, m, |k, j| {
        let kappa = k.modulus();
        let (ce, se) = scaled_hyperbolics(kappa * eta[j], kappa * m);
        let (cb, _) = scaled_hyperbolics(kappa * bottom(j), kappa * m);
        Complex64::new(kappa * eta_t[j] * se, -dot_k(k, &gq, j) * ce + dot_k(k, &gbq, j) * cb)
    })?;
    let second = evaluate(grid, ks, m, |k, j| {
        let kappa = k.modulus();
        let (ce, se) = scaled_hyperbolics(kappa * eta[j], kappa * m);
        let (_, sb) = scaled_hyperbolics(kappa * bottom(j), kappa * m);
        Complex64::new(kappa * eta_t[j] * ce, -dot_k(k, &gq, j) * se - dot_k(k, &gbq, j) * sb)
    })?;
    Ok((first, second))
}

/// `∫e^{ik·x}[κη_t cosh(κ(η+h0)) − ik·∇q sinh(κ(η+h0))]`, the flat-bottom relation.
pub fn flat_bottom_residual(s: &SurfaceState, p: &PhysicalParams, ks: &[Wavevector]) -> Result<ResidualReport> {
    let grid = state_grid(s)?;
    p.require_flat()?;
    check_kappa(ks, p.kappa_guard())?;
    let m = p.h0 + s.eta.sup_norm();
    let gq = s.pot.gradient();
    let eta = s.eta.values();
    let eta_t = s.eta_t.values();
    evaluate(grid, ks, m, |k, j| {
        let kappa = k.modulus();
        let (c, sh) = scaled_hyperbolics(kappa * (eta[j] + p.h0), kappa * m);
        Complex64::new(kappa * eta_t[j] * c, -dot_k(k, &gq, j) * sh)
    })
}

/// `∫e^{ikx}[ξ_x sinh(k(η+h0)) + i(η_t − γηη_x) cosh(k(η+h0))]` with signed `k`.
///
/// For `γ = 0` this equals `i/|k|` times [`flat_bottom_residual`] with `q = ξ`.
pub fn rotational_residual(s: &SurfaceState, p: &PhysicalParams, ks: &[Wavevector]) -> Result<ResidualReport> {
    let grid = state_grid(s)?;
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter("the vorticity relation is one-dimensional".into()));
    }
    p.require_flat()?;
    check_kappa(ks, p.kappa_guard())?;
    let m = p.h0 + s.eta.sup_norm();
    let xx = s.pot.derivative(0, 1);
    let ex = s.eta.derivative(0, 1);
    let (eta, eta_t) = (s.eta.values(), s.eta_t.values());
    evaluate(grid, ks, m, |k, j| {
        let k = k.0[0];
        let (c, sh) = scaled_hyperbolics(k * (eta[j] + p.h0), k.abs() * m);
        let kin = eta_t[j] - p.gamma * eta[j] * ex.values()[j];
        Complex64::new(xx.values()[j] * sh, kin * c)
    })
}

/// `∫e^{ikX}[ξ̇ sinh(k(Y+h0)) + i(ẊY_t − ẎX_t − γYẎ) cosh(k(Y+h0))] dλ`.
pub fn multivalued_residual(
    surface: &ParametricSurface,
    p: &PhysicalParams,
    ks: &[Wavevector],
) -> Result<ResidualReport> {
    p.require_flat()?;
    check_kappa(ks, p.kappa_guard())?;
    surface.speed_squared()?;
    let grid = surface.grid();
    let x = surface.x_values();
    let m = p.h0 + surface.y().sup_norm();
    let (xd, yd, xid) = (surface.x_dot().values(), surface.y_dot().values(), surface.xi_dot().values());
    let (y, xt, yt) = (surface.y().values(), surface.x_t().values(), surface.y_t().values());
    let dl = grid.cell_volume();
    let residuals = ks
        .par_iter()
        .map(|&kv| {
            grid.lattice_index(kv)?;
            let k = kv.0[0];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..grid.len() {
                let (c, sh) = scaled_hyperbolics(k * (y[j] + p.h0), k.abs() * m);
                let kin = xd[j] * yt[j] - yd[j] * xt[j] - p.gamma * y[j] * yd[j];
                acc += Complex64::cis(k * x[j]) * Complex64::new(xid[j] * sh, kin * c);
            }
            Ok(acc * dl)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport { k_values: ks.to_vec(), residuals, scale_depth: m })
}

/// `q_t + ½|∇q|² + gη − (η_t + ∇η·∇q)²/(2(1+|∇η|²)) − f(η)`.
pub fn bernoulli_residual_irrotational(s: &SurfaceState, p: &PhysicalParams) -> Result<Field> {
    let q_t = s.pot_t()?;
    let grid = s.grid();
    let ge = s.eta.gradient();
    let gq = s.pot.gradient();
    let f = surface_tension_with_coefficient(&s.eta, p.tension_coefficient());
    let vals = (0..grid.len())
        .map(|j| {
            let (mut q2, mut e2, mut eq) = (0.0, 0.0, 0.0);
            for a in 0..grid.dim() {
                let (e, q) = (ge[a].values()[j], gq[a].values()[j]);
                q2 += q * q;
                e2 += e * e;
                eq += e * q;
            }
            let w = s.eta_t.values()[j] + eq;
            q_t.values()[j] + 0.5 * q2 + p.g * s.eta.values()[j] - w * w / (2.0 * (1.0 + e2)) - f.values()[j]
        })
        .collect();
    Field::new(grid, vals)
}

/// `ξ_t + ½ξ_x² + gη + γη(2η_tη_x − 2ξ_x + γη)/(2(1+η_x²)) − (η_t + η_xξ_x)²/(2(1+η_x²)) − f(η)`.
pub fn bernoulli_residual_rotational(s: &SurfaceState, p: &PhysicalParams) -> Result<Field> {
    let xi_t = s.pot_t()?;
    let grid = s.grid();
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter("the vorticity formulation is one-dimensional".into()));
    }
    let ex = s.eta.derivative(0, 1);
    let xx = s.pot.derivative(0, 1);
    let f = surface_tension_with_coefficient(&s.eta, p.tension_coefficient());
    let gm = p.gamma;
    let vals = (0..grid.len())
        .map(|j| {
            let (e, et, exj, xj) = (s.eta.values()[j], s.eta_t.values()[j], ex.values()[j], xx.values()[j]);
            let d = 2.0 * (1.0 + exj * exj);
            let w = et + exj * xj;
            xi_t.values()[j] + 0.5 * xj * xj + p.g * e + gm * e * (2.0 * et * exj - 2.0 * xj + gm * e) / d - w * w / d
                - f.values()[j]
        })
        .collect();
    Field::new(grid, vals)
}

/// The Bernoulli condition on a parameterized surface, including the curvature term.
///
/// The vorticity term uses `−2Ẏ²X_t`, which is what the inversion of the
/// kinematic and chain-rule relations gives.
pub fn bernoulli_residual_multivalued(surface: &ParametricSurface, p: &PhysicalParams) -> Result<Field> {
    let d = surface.speed_squared()?;
    let xi_t = surface.xi_t()?.values();
    let curv = curvature_term(surface, p.tension_coefficient())?;
    let (xd, yd, xid) = (surface.x_dot().values(), surface.y_dot().values(), surface.xi_dot().values());
    let (y, xt, yt) = (surface.y().values(), surface.x_t().values(), surface.y_t().values());
    let gm = p.gamma;
    let vals = (0..d.len())
        .map(|j| {
            let vort = gm * y[j] * (2.0 * xd[j] * yd[j] * yt[j] - 2.0 * yd[j] * yd[j] * xt[j] - 2.0 * xid[j] * xd[j]
                + gm * xd[j] * xd[j] * y[j])
                / (2.0 * d[j]);
            let w = xid[j] - xd[j] * xt[j] - yd[j] * yt[j];
            xi_t[j] + p.g * y[j] - 0.5 * xt[j] * xt[j] - 0.5 * yt[j] * yt[j] + vort + w * w / (2.0 * d[j])
                - curv.values()[j]
        })
        .collect();
    Field::new(surface.grid(), vals)
}
