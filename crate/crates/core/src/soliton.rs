//! Travelling waves `ξ = f(X − cT)` of the long-wave equation with vorticity.
//!
//! With `w = f'` the reduction is `w'² = α²w² + βw³ − μw⁴`, solved by
//! `W(z) = Γ₁ / (1 + Γ₂ cosh(αz))` with `Γ₁ = −2α²/β`, `Γ₂ = b√(4μα² + β²)/β`, `b = ±1`.
//! Elevated waves take `b = −1` and depression waves `b = +1`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Grid, Primitive};
use crate::hierarchy::{long3_residual, LongWave};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolitonSpec {
    pub c: f64,
    pub kappa: f64,
    pub sigma_hat: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub mu: f64,
    /// Signed scale; `+√α²` from [`coefficients`], flipped by `G₂`.
    pub alpha: Option<f64>,
}

pub fn coefficients(c: f64, kappa: f64, sigma_hat: f64) -> Result<SolitonSpec> {
    let s = sigma_hat - 1.0 / 3.0;
    if s == 0.0 || !s.is_finite() || !c.is_finite() || !kappa.is_finite() {
        return Err(Error::DispersionlessLimit);
    }
    let alpha2 = (1.0 - c * c) / s;
    Ok(SolitonSpec {
        c,
        kappa,
        sigma_hat,
        alpha2,
        beta: c * (1.0 - kappa * c) / s,
        mu: 1.0 / (2.0 * s),
        alpha: (alpha2 > 0.0).then(|| alpha2.sqrt()),
    })
}

impl SolitonSpec {
    /// `4μα² + β²`.
    pub fn discriminant(&self) -> f64 {
        4.0 * self.mu * self.alpha2 + self.beta * self.beta
    }

    pub fn mu_over_alpha2(&self) -> f64 {
        self.mu / self.alpha2
    }

    pub fn topology(&self) -> Option<Topology> {
        if !(self.alpha2 > 0.0) {
            return None;
        }
        Some(if self.mu > 0.0 { Topology::Hyperbola } else { Topology::Circle })
    }

    fn require_alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| Error::InvalidParameter(format!("α² = {} has no real root", self.alpha2)))
    }

    /// True when the stored constants are those of `(c, κ, σ̂)`.
    pub fn is_consistent(&self) -> bool {
        coefficients(self.c, self.kappa, self.sigma_hat).is_ok_and(|s| {
            s.alpha2 == self.alpha2 && s.beta == self.beta && s.mu == self.mu && s.alpha == self.alpha
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Elevated,
    Depression,
}

impl Family {
    pub fn branch(self) -> f64 {
        match self {
            Family::Elevated => -1.0,
            Family::Depression => 1.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Family::Elevated => "elevated",
            Family::Depression => "depression",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    SubcriticalHighTension,
    SupercriticalLowTension,
    NoRealAlpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Topology {
    Hyperbola,
    Circle,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Hyperbola => "hyperbola",
            Topology::Circle => "circle",
        })
    }
}

/// `κ` thresholds `1/c ∓ (√2/c)√(1 − 1/c²)` of the low-tension case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub elevated_below: f64,
    pub depression_above: f64,
}

pub fn thresholds(c: f64) -> Thresholds {
    let r = std::f64::consts::SQRT_2 / c * (1.0 - 1.0 / (c * c)).sqrt();
    Thresholds { elevated_below: 1.0 / c - r, depression_above: 1.0 / c + r }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExistenceVerdict {
    pub elevated_exists: bool,
    pub depression_exists: bool,
    pub regime: Regime,
    pub binding_inequalities: Option<Thresholds>,
}

impl ExistenceVerdict {
    pub fn admits(&self, family: Family) -> bool {
        match family {
            Family::Elevated => self.elevated_exists,
            Family::Depression => self.depression_exists,
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.elevated_exists, self.depression_exists) {
            (true, true) => "both exist",
            (true, false) => "elevated only",
            (false, true) => "depression only",
            (false, false) => "neither",
        }
    }
}

/// Existence of each family, decided by positivity of the profile denominator
/// `β + b√(4μα² + β²)cosh(αz)` on the whole line.
pub fn classify(c: f64, kappa: f64, sigma_hat: f64) -> ExistenceVerdict {
    let none = |regime| ExistenceVerdict { elevated_exists: false, depression_exists: false, regime, binding_inequalities: None };
    let Ok(spec) = coefficients(c, kappa, sigma_hat) else {
        return none(Regime::NoRealAlpha);
    };
    if spec.alpha.is_none() {
        return none(Regime::NoRealAlpha);
    }
    let d = spec.discriminant();
    if spec.mu > 0.0 {
        // d > β², so the sign of the denominator is b everywhere
        return ExistenceVerdict {
            elevated_exists: true,
            depression_exists: true,
            regime: Regime::SubcriticalHighTension,
            binding_inequalities: None,
        };
    }
    // d < β²: the denominator keeps the sign of β only for the branch b = sign β
    let ok = d > 0.0;
    ExistenceVerdict {
        elevated_exists: ok && spec.beta < 0.0,
        depression_exists: ok && spec.beta > 0.0,
        regime: Regime::SupercriticalLowTension,
        binding_inequalities: Some(thresholds(c)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaPoint {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Sign `b` of the square root in `Γ₂`.
    pub branch: f64,
    pub family: Family,
}

impl GammaPoint {
    /// `Γ₂² − (μ/α²)Γ₁² − 1`.
    pub fn manifold_defect(&self, mu_over_alpha2: f64) -> f64 {
        self.gamma2 * self.gamma2 - mu_over_alpha2 * self.gamma1 * self.gamma1 - 1.0
    }

    /// Position `αz` where `1 + Γ₂cosh(αz)` vanishes, if it does.
    pub fn blow_up(&self) -> Option<f64> {
        (self.gamma2 < 0.0 && self.gamma2 > -1.0).then(|| (1.0 / self.gamma2.abs()).acosh())
    }

    /// Bound on `|W(z)|` for `α|z| ≥ 5`.
    ///
    /// For `Γ₂ > 0` this is `2|Γ₁|e^{−α|z|}/Γ₂`; for `Γ₂ < −1` the constant
    /// in the denominator works against the tail and the bound becomes
    /// `|Γ₁| / (|Γ₂|e^{α|z|}/2 − 1)`.
    pub fn decay_bound(&self, alpha_z: f64) -> f64 {
        let u = alpha_z.abs();
        let g2 = self.gamma2.abs();
        if self.gamma2 > 0.0 {
            2.0 * self.gamma1.abs() * (-u).exp() / g2
        } else {
            self.gamma1.abs() / (0.5 * g2 * u.exp() - 1.0)
        }
    }
}

/// The point of branch `b` on the manifold, without an admission check.
pub fn gamma_point_branch(spec: &SolitonSpec, branch: f64) -> Result<GammaPoint> {
    spec.require_alpha()?;
    let d = spec.discriminant();
    if d < 0.0 {
        return Err(Error::InvalidParameter(format!("4μα² + β² = {d} < 0: no real Γ₂")));
    }
    if spec.beta == 0.0 {
        return Err(Error::InvalidParameter("β = 0: Γ₁ and Γ₂ are unbounded (profile remains regular)".into()));
    }
    let b = branch.signum();
    Ok(GammaPoint {
        gamma1: -2.0 * spec.alpha2 / spec.beta,
        gamma2: b * d.sqrt() / spec.beta,
        branch: b,
        family: if b < 0.0 { Family::Elevated } else { Family::Depression },
    })
}

pub fn gamma_point(spec: &SolitonSpec, family: Family) -> Result<GammaPoint> {
    let v = classify(spec.c, spec.kappa, spec.sigma_hat);
    if !v.admits(family) {
        let reason = match (v.regime, v.binding_inequalities) {
            (Regime::NoRealAlpha, _) => format!("α² = {} is not positive", spec.alpha2),
            (_, Some(t)) => match family {
                Family::Elevated => format!("needs κ < {} at c = {}", t.elevated_below, spec.c),
                Family::Depression => format!("needs κ > {} at c = {}", t.depression_above, spec.c),
            },
            _ => "profile denominator vanishes".into(),
        };
        return Err(Error::FamilyNotAdmitted { family: family.name(), reason });
    }
    gamma_point_branch(spec, family.branch())
}

fn z_nodes(grid: &Arc<Grid>) -> impl Iterator<Item = f64> + '_ {
    (0..grid.len()).map(move |j| grid.node(j)[0])
}

/// `W(z) = −2α² / (β + b√(4μα²+β²) cosh(αz))`, the centred profile of branch `b`.
///
/// Equal to `Γ₁/(1 + Γ₂cosh(αz))` but finite at `β = 0`.
pub fn profile_branch(grid: &Arc<Grid>, spec: &SolitonSpec, branch: f64) -> Result<Field> {
    let alpha = spec.require_alpha()?;
    let d = spec.discriminant();
    if d < 0.0 {
        return Err(Error::InvalidParameter(format!("4μα² + β² = {d} < 0")));
    }
    let root = branch.signum() * d.sqrt();
    if spec.beta != 0.0 {
        let g2 = root / spec.beta;
        if g2 < 0.0 && g2 > -1.0 {
            let az = (1.0 / g2.abs()).acosh();
            if z_nodes(grid).any(|z| (alpha * z).abs() >= az) {
                return Err(Error::BlowUp { alpha_z: az });
            }
        }
    }
    let vals = z_nodes(grid).map(|z| -2.0 * spec.alpha2 / (spec.beta + root * (alpha * z).cosh())).collect();
    Field::new(grid, vals)
}

pub fn profile(grid: &Arc<Grid>, point: &GammaPoint, spec: &SolitonSpec) -> Result<Field> {
    profile_branch(grid, spec, point.branch)
}

/// `±4α³e^{αz} / (4α²μ + β² ∓ 2αβe^{αz} + α²e^{2αz})`, upper sign elevated.
pub fn profile_uncentred(grid: &Arc<Grid>, spec: &SolitonSpec, family: Family) -> Result<Field> {
    let a = spec.require_alpha()?;
    let sgn = -family.branch();
    let d = spec.discriminant();
    let vals = z_nodes(grid)
        .map(|z| {
            let e = (a * z).exp();
            sgn * 4.0 * a.powi(3) * e / (d - sgn * 2.0 * a * spec.beta * e + a * a * e * e)
        })
        .collect();
    Field::new(grid, vals)
}

/// Shift taking the uncentred profile to its mirror image: `α⁻¹ log(4μ + β²/α²)`.
pub fn reflection_shift(spec: &SolitonSpec) -> Result<f64> {
    let a = spec.require_alpha()?;
    Ok((4.0 * spec.mu + spec.beta * spec.beta / spec.alpha2).ln() / a)
}

/// `sup |α²w² + βw³ − μw⁴ − (w')²|`.
pub fn ode_residual(w: &Field, spec: &SolitonSpec) -> f64 {
    let dw = w.derivative(0, 1);
    w.values()
        .iter()
        .zip(dw.values())
        .map(|(&v, &d)| (spec.alpha2 * v * v + spec.beta * v.powi(3) - spec.mu * v.powi(4) - d * d).abs())
        .fold(0.0, f64::max)
}

/// `sup |(c²−1)w + (3c/2)(κc−1)w² + w³ + (σ̂−⅓)w''|`, the once-integrated travelling equation.
pub fn soliton2_residual(w: &Field, spec: &SolitonSpec) -> f64 {
    let (c, k) = (spec.c, spec.kappa);
    let s = spec.sigma_hat - 1.0 / 3.0;
    let d2 = w.derivative(0, 2);
    w.values()
        .iter()
        .zip(d2.values())
        .map(|(&v, &dd)| ((c * c - 1.0) * v + 1.5 * c * (k * c - 1.0) * v * v + v.powi(3) + s * dd).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    /// `(w, β) ↦ (−w, −β)`
    G1,
    /// `α ↦ −α`
    G2,
    /// `z ↦ z + z₀`
    G3,
    /// `z ↦ −z`
    G4,
}

/// Applies one symmetry of the travelling-wave equation; `shift` is used by `G3` only.
pub fn symmetry_orbit(w: &Field, spec: &SolitonSpec, which: Symmetry, shift: f64) -> (Field, SolitonSpec) {
    let mut out = *spec;
    let f = match which {
        Symmetry::G1 => {
            out.beta = -spec.beta;
            w.map(|v| -v)
        }
        Symmetry::G2 => {
            out.alpha = spec.alpha.map(|a| -a);
            w.clone()
        }
        Symmetry::G3 => w.translate(0, shift),
        Symmetry::G4 => {
            let n = w.values().len();
            let vals = (0..n).map(|j| w.values()[(n - j) % n]).collect();
            Field::new(w.grid(), vals).expect("grid length")
        }
    };
    (f, out)
}

/// Residual of the long-wave equation (cubic coefficient 3) for `ξ(X, T) = f(X − cT)`, `f' = W`, at `T = 0`.
///
/// Time derivatives are exact: `ξ_T = −cW`, `ξ_TT = c²W'`.
pub fn travelling_pde_residual(point: &GammaPoint, spec: &SolitonSpec, grid: &Arc<Grid>) -> Result<f64> {
    let w = profile(grid, point, spec)?;
    Ok(travelling_residual_of(&w, spec).sup_norm())
}

pub(crate) fn travelling_residual_of(w: &Field, spec: &SolitonSpec) -> Field {
    let c = spec.c;
    let xi = Primitive::of(w);
    let xi_t = w.map(|v| -c * v);
    let xi_tt = w.derivative(0, 1).map(|v| c * c * v);
    long3_residual(&xi, &xi_t, &xi_tt, &LongWave::new(spec.kappa, spec.sigma_hat))
}

/// One branch of one parameter triple in an atlas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasRow {
    pub c: f64,
    pub kappa: f64,
    pub sigma_hat: f64,
    pub topology: Option<Topology>,
    pub elevated_exists: bool,
    pub depression_exists: bool,
    pub gamma1: f64,
    pub gamma2: f64,
    pub component: Component,
    pub manifold_defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Component {
    Elevated,
    Depression,
    Unphysical,
    Bifurcation,
    None,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Elevated => "elevated",
            Component::Depression => "depression",
            Component::Unphysical => "unphysical",
            Component::Bifurcation => "bifurcation",
            Component::None => "none",
        })
    }
}

/// Component of `(Γ₁, Γ₂)` on a manifold of the given topology.
///
/// On the hyperbola `Γ₂ ≠ 0`; its bifurcations are at `Γ₁ = 0` (`Γ₂ = ±1`, `W ≡ 0`).
/// On the circle `Γ₂ = 0` gives the constant solution and `Γ₂ < 0` blows up.
pub fn component(gamma1: f64, gamma2: f64, topology: Topology) -> Component {
    match topology {
        Topology::Hyperbola => match (gamma1 * gamma2).partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Component::Elevated,
            Some(std::cmp::Ordering::Less) => Component::Depression,
            _ => Component::Bifurcation,
        },
        Topology::Circle => {
            if gamma2 == 0.0 || gamma1 == 0.0 {
                Component::Bifurcation
            } else if gamma2 < 0.0 {
                Component::Unphysical
            } else if gamma1 > 0.0 {
                Component::Elevated
            } else {
                Component::Depression
            }
        }
    }
}

/// Both branches of every parameter triple; triples without a real point give one `none` row.
pub fn gamma_manifold_atlas(specs: &[(f64, f64, f64)]) -> Vec<AtlasRow> {
    specs
        .par_iter()
        .flat_map_iter(|&(c, kappa, sigma_hat)| {
            let v = classify(c, kappa, sigma_hat);
            let blank = AtlasRow {
                c,
                kappa,
                sigma_hat,
                topology: None,
                elevated_exists: v.elevated_exists,
                depression_exists: v.depression_exists,
                gamma1: f64::NAN,
                gamma2: f64::NAN,
                component: Component::None,
                manifold_defect: f64::NAN,
            };
            let rows: Vec<AtlasRow> = match coefficients(c, kappa, sigma_hat) {
                Ok(spec) if spec.topology().is_some() => {
                    let topo = spec.topology().unwrap();
                    [-1.0, 1.0]
                        .iter()
                        .filter_map(|&b| gamma_point_branch(&spec, b).ok())
                        .map(|p| AtlasRow {
                            topology: Some(topo),
                            gamma1: p.gamma1,
                            gamma2: p.gamma2,
                            component: component(p.gamma1, p.gamma2, topo),
                            manifold_defect: p.manifold_defect(spec.mu_over_alpha2()),
                            ..blank.clone()
                        })
                        .collect()
                }
                _ => Vec::new(),
            };
            if rows.is_empty() {
                vec![blank]
            } else {
                rows
            }
        })
        .collect()
}

pub fn atlas_csv(rows: &[AtlasRow]) -> String {
    let mut out = String::from("c,kappa,sigma_hat,topology,elevated_exists,depression_exists,Gamma1,Gamma2,component\n");
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{},{},{},{:.16e},{:.16e},{}\n",
            r.c,
            r.kappa,
            r.sigma_hat,
            r.topology.map_or("none".to_string(), |t| t.to_string()),
            r.elevated_exists,
            r.depression_exists,
            r.gamma1,
            r.gamma2,
            r.component
        ));
    }
    out
}

/// `n` points sampled along the manifold `Γ₂² − mΓ₁² = 1`, `m = μ/α²`.
///
/// The hyperbola is sampled on both sheets with `Γ₁ = sinh(t)/√m`, `|Γ₂| = cosh t`, `|t| ≤ t_max`;
/// the circle (`m < 0`) as an ellipse `Γ₁ = sin θ/√|m|`, `Γ₂ = cos θ`.
pub fn manifold_samples(mu_over_alpha2: f64, n: usize, t_max: f64) -> Result<Vec<(f64, f64, Component)>> {
    if mu_over_alpha2 == 0.0 || !mu_over_alpha2.is_finite() || n < 2 {
        return Err(Error::InvalidParameter("need finite nonzero μ/α² and n ≥ 2".into()));
    }
    let m = mu_over_alpha2;
    let r = m.abs().sqrt();
    let mut out = Vec::with_capacity(n);
    if m > 0.0 {
        let half = n / 2;
        for sheet in [1.0, -1.0] {
            let count = if sheet > 0.0 { half } else { n - half };
            for i in 0..count {
                let t = -t_max + 2.0 * t_max * i as f64 / (count.max(2) - 1) as f64;
                let (g1, g2) = (t.sinh() / r, sheet * t.cosh());
                out.push((g1, g2, component(g1, g2, Topology::Hyperbola)));
            }
        }
    } else {
        for i in 0..n {
            // quarter points exactly, so the four bifurcations are hit when 4 | n
            let (sn, cs) = if (4 * i) % n == 0 {
                [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][4 * i / n]
            } else {
                (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin_cos()
            };
            let (g1, g2) = (sn / r, cs);
            out.push((g1, g2, component(g1, g2, Topology::Circle)));
        }
    }
    Ok(out)
}
