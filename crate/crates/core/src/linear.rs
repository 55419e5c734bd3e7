//! The linear limit over a flat bottom: dispersion, exact linear evolution,
//! and measurements of the quadratic remainders of the linearization.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Grid, Wavevector};
use crate::global::PhysicalParams;
use crate::harmonic::HarmonicField;
use crate::kinematics::{surface_tension_with_coefficient, SurfaceState};

/// Symbols `(a, b)` of the linear system `η̂_t = a q̂`, `q̂_t = −b η̂`.
fn symbols(kappa: f64, p: &PhysicalParams) -> (f64, f64) {
    (kappa * (kappa * p.h0).tanh(), p.g + p.tension_coefficient() * kappa * kappa)
}

/// `ω² = κ g tanh(κ h0) (1 + σκ²/(gρ))`.
pub fn dispersion_omega2(kappa: f64, p: &PhysicalParams) -> f64 {
    let (a, b) = symbols(kappa.abs(), p);
    a * b
}

/// Evolves `(η, q)` for time `t` by rotating each Fourier mode exactly.
pub fn linear_evolve(s0: &SurfaceState, p: &PhysicalParams, t: f64) -> Result<SurfaceState> {
    if p.h.as_ref().is_some_and(|h| h.sup_norm() != 0.0) {
        return Err(Error::InvalidParameter("linear evolution needs a flat bottom".into()));
    }
    let grid = s0.grid().clone();
    let e0 = s0.eta.spectrum();
    let q0 = s0.pot.spectrum();
    let n = grid.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    let mut q = e.clone();
    let mut et = e.clone();
    let mut qt = e.clone();
    for i in 0..n {
        let (a, b) = symbols(grid.spectral_wavevector(i).modulus(), p);
        let w = (a * b).sqrt();
        let (c, sinc) = if w * t.abs() < 1e-8 { (1.0, t) } else { ((w * t).cos(), (w * t).sin() / w) };
        e[i] = e0[i] * c + q0[i] * (a * sinc);
        q[i] = q0[i] * c - e0[i] * (b * sinc);
        et[i] = q[i] * a;
        qt[i] = -e[i] * b;
    }
    SurfaceState::new(
        Field::from_spectrum(&grid, e)?,
        Field::from_spectrum(&grid, et)?,
        Field::from_spectrum(&grid, q)?,
        Some(Field::from_spectrum(&grid, qt)?),
    )
}

/// `Σ_k (b|η̂|² + a|q̂|²)`, invariant under [`linear_evolve`] (DFT normalization).
pub fn linear_energy(s: &SurfaceState, p: &PhysicalParams) -> f64 {
    let grid = s.grid();
    let (e, q) = (s.eta.spectrum(), s.pot.spectrum());
    (0..grid.len())
        .map(|i| {
            let (a, b) = symbols(grid.spectral_wavevector(i).modulus(), p);
            b * e[i].norm_sqr() + a * q[i].norm_sqr()
        })
        .sum()
}

/// `sup_{|k| ≤ kappa_max} |η̂_t − κ tanh(κh0) q̂|` over the dual lattice.
pub fn linear_relation_residual(s: &SurfaceState, p: &PhysicalParams, kappa_max: f64) -> Result<f64> {
    let ks = s.grid().lattice_within(kappa_max);
    let vals = ks
        .par_iter()
        .map(|&k| {
            let (a, _) = symbols(k.modulus(), p);
            Ok((s.eta_t.fourier_integral(k)? - s.pot.fourier_integral(k)? * a).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `N(q,η) = ½|∇q|² + (σ/ρ)∇·(∇η/√(1+|∇η|²) − ∇η) − (η_t + ∇η·∇q)²/(2(1+|∇η|²))`.
pub fn nonlinear_bernoulli_term(s: &SurfaceState, p: &PhysicalParams) -> Field {
    let grid = s.grid();
    let ge = s.eta.gradient();
    let gq = s.pot.gradient();
    let coef = p.tension_coefficient();
    let curv = surface_tension_with_coefficient(&s.eta, coef);
    let lap = s.eta.laplacian();
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
            0.5 * q2 + curv.values()[j] - coef * lap.values()[j] - w * w / (2.0 * (1.0 + e2))
        })
        .collect();
    Field::new(grid, vals).expect("grid length")
}

/// `‖N(q,η)‖_{L¹}` on the box.
pub fn nonlinear_bernoulli_norm(s: &SurfaceState, p: &PhysicalParams) -> f64 {
    nonlinear_bernoulli_term(s, p).l1_norm()
}

/// `½‖∇q‖² + (σ/ρ)‖η‖²_{H²} + ½(‖η_t‖ + ‖∇q‖)²` (L² norms), an upper bound for [`nonlinear_bernoulli_norm`].
pub fn nonlinear_bernoulli_bound(s: &SurfaceState, p: &PhysicalParams) -> f64 {
    let qx = s.pot.gradient().iter().map(|g| g.l2_norm().powi(2)).sum::<f64>().sqrt();
    let et = s.eta_t.l2_norm();
    0.5 * qx * qx + p.tension_coefficient() * s.eta.sobolev_norm(2.0).powi(2) + 0.5 * (et + qx).powi(2)
}

/// The smallness measures entering the linearization.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AprioriNorms {
    pub eta_sup: f64,
    pub eta_h2: f64,
    pub eta_t_l1: f64,
    pub eta_t_l2: f64,
    pub qx_l1: f64,
    pub qx_l2: f64,
}

impl AprioriNorms {
    pub fn of(s: &SurfaceState) -> Self {
        let gq = s.pot.gradient();
        let n = s.grid().len();
        let mag = Field::new(
            s.grid(),
            (0..n).map(|j| gq.iter().map(|g| g.values()[j].powi(2)).sum::<f64>().sqrt()).collect(),
        )
        .expect("grid length");
        AprioriNorms {
            eta_sup: s.eta.sup_norm(),
            eta_h2: s.eta.sobolev_norm(2.0),
            eta_t_l1: s.eta_t.l1_norm(),
            eta_t_l2: s.eta_t.l2_norm(),
            qx_l1: mag.l1_norm(),
            qx_l2: mag.l2_norm(),
        }
    }

    /// Smallest `ε` meeting the hypotheses of both linear estimates, taking
    /// both the L¹ and L² forms of the `∇q` and `η_t` bounds.
    pub fn epsilon(&self) -> f64 {
        [self.eta_sup, self.eta_h2, self.eta_t_l1, self.eta_t_l2, self.qx_l1, self.qx_l2]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `(gap, bound)` for one wavevector: `gap = |∫e^{ik·x} η_t cosh(κ(η+h0))/cosh(κ(ε+h0)) − η̂_t|`
/// and `bound = 2(1 − e^{−2κε})ε` with `ε = max(‖η_t‖_{L¹}, ‖η‖_∞)`.
pub fn kinematic_lemma_gap(s: &SurfaceState, p: &PhysicalParams, k: Wavevector) -> Result<(f64, f64)> {
    let eps = s.eta_t.l1_norm().max(s.eta.sup_norm());
    let kappa = k.modulus();
    let eta = s.eta.values();
    let et = s.eta_t.values();
    let top = kappa * (eps + p.h0);
    let weighted = s.grid().fourier_sum(k, |j| {
        let a = kappa * (eta[j] + p.h0);
        let ratio = ((a - top).exp() + (-a - top).exp()) / (1.0 + (-2.0 * top).exp());
        Complex64::new(et[j] * ratio, 0.0)
    })?;
    let gap = (weighted - s.eta_t.fourier_integral(k)?).norm();
    Ok((gap, 2.0 * (1.0 - (-2.0 * kappa * eps).exp()) * eps))
}

/// `‖η‖_∞ / ‖η‖_{H²}`, a lower estimate of the embedding constant.
pub fn sobolev_ratio(eta: &Field) -> f64 {
    eta.sup_norm() / eta.sobolev_norm(2.0)
}

/// Measured errors against decreasing amplitudes, with the log-log slope.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateSweep {
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
}

impl EstimateSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,error\n");
        for (e, r) in self.epsilons.iter().zip(&self.errors) {
            let _ = writeln!(out, "{e:.16e},{r:.16e}");
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({ "fitted_slope": self.fitted_slope })
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Evaluates `measure(family(ε), ε)` for each amplitude and fits the slope.
pub fn estimate_sweep<S, F, M>(family: F, measure: M, epsilons: &[f64]) -> Result<EstimateSweep>
where
    S: Send,
    F: Fn(f64) -> Result<S> + Sync,
    M: Fn(&S, f64) -> Result<f64> + Sync,
{
    if epsilons.len() < 4 {
        return Err(Error::InvalidParameter("a sweep needs at least four amplitudes".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("amplitudes must be positive and strictly decreasing".into()));
    }
    let errors = epsilons
        .par_iter()
        .map(|&e| measure(&family(e)?, e))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(i) = errors.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::DegenerateSweep(format!("error at epsilon = {} is {}", epsilons[i], errors[i])));
    }
    let fitted_slope = loglog_slope(epsilons, &errors);
    Ok(EstimateSweep { epsilons: epsilons.to_vec(), errors, fitted_slope })
}

/// Amplitude-scaled states `η = εP`, `φ = ε·(flat-bottom extension of R)`,
/// with `q = φ|_η` and `η_t` from the kinematic condition.
#[derive(Clone, Debug)]
pub struct ScaledFamily {
    pub eta_profile: Field,
    pub potential: HarmonicField,
    pub h0: f64,
}

impl ScaledFamily {
    pub fn new(eta_profile: Field, potential_profile: &Field, h0: f64) -> Result<Self> {
        if **eta_profile.grid() != **potential_profile.grid() {
            return Err(Error::GridMismatch);
        }
        let potential = HarmonicField::from_profile(potential_profile, h0);
        Ok(ScaledFamily { eta_profile, potential, h0 })
    }

    /// `P = sech²(x)`, `R = ½ sech(x − 1)` on `[-L, L)`.
    pub fn sech(grid: &Arc<Grid>, h0: f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::InvalidParameter("the sech family is one-dimensional".into()));
        }
        let p = Field::from_fn(grid, |x| 1.0 / x[0].cosh().powi(2));
        let r = Field::from_fn(grid, |x| 0.5 / (x[0] - 1.0).cosh());
        Self::new(p, &r, h0)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.eta_profile.grid()
    }

    pub fn state(&self, eps: f64) -> Result<SurfaceState> {
        let eta = self.eta_profile.map(|v| eps * v);
        self.potential.scaled(eps).surface_state(&eta, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_grid;
    use std::f64::consts::PI;

    fn params(sigma: f64) -> PhysicalParams {
        PhysicalParams::new(9.81, 1.0, sigma, 1.0, 0.0).unwrap()
    }

    #[test]
    fn dispersion_values() {
        let p = params(0.0);
        assert_eq!(dispersion_omega2(0.0, &p), 0.0);
        // 9.81·tanh(1) to 15 digits
        assert!((dispersion_omega2(1.0, &p) - 7.471_238_669_926_054).abs() < 1e-12);
        let p = params(0.07);
        let k = 20.0;
        let limit = 9.81 * (1.0 + 0.07 * k * k / 9.81);
        assert!((dispersion_omega2(k, &p) / k - limit).abs() < 1e-8 * limit);
        assert_eq!(dispersion_omega2(-3.0, &p), dispersion_omega2(3.0, &p));
    }

    #[test]
    fn single_mode_oscillates_at_dispersion_frequency() {
        let g = make_grid(1, PI, 32).unwrap();
        let p = params(0.3);
        let a = 0.01;
        let s0 = SurfaceState::new(
            Field::from_fn(&g, |x| a * (3.0 * x[0]).cos()),
            Field::zeros(&g),
            Field::zeros(&g),
            None,
        )
        .unwrap();
        let w = dispersion_omega2(3.0, &p).sqrt();
        for t in [0.3, 1.7, 10.0] {
            let s = linear_evolve(&s0, &p, t).unwrap();
            for (j, v) in s.eta.values().iter().enumerate() {
                let x = g.node(j)[0];
                assert!((v - a * (w * t).cos() * (3.0 * x).cos()).abs() < 1e-14);
            }
        }
        let full = linear_evolve(&s0, &p, 2.0 * PI / w).unwrap();
        for (u, v) in full.eta.values().iter().zip(s0.eta.values()) {
            assert!((u - v).abs() < 1e-10 * a);
        }
    }

    #[test]
    fn energy_and_translation() {
        let g = make_grid(1, 10.0, 64).unwrap();
        let p = params(0.1);
        let s0 = SurfaceState::new(
            Field::from_fn(&g, |x| (-(x[0] * x[0])).exp()),
            Field::zeros(&g),
            Field::from_fn(&g, |x| 0.3 * (-(x[0] - 1.0).powi(2)).exp()),
            None,
        )
        .unwrap();
        let e0 = linear_energy(&s0, &p);
        let s = linear_evolve(&s0, &p, 100.0).unwrap();
        assert!((linear_energy(&s, &p) - e0).abs() < 1e-12 * e0);

        let zero = linear_evolve(&SurfaceState::rest(&g), &p, 5.0).unwrap();
        assert_eq!(zero.eta.sup_norm(), 0.0);

        let shift = 7.0 * g.spacing(0);
        let shifted = SurfaceState::new(s0.eta.translate(0, shift), s0.eta_t.clone(), s0.pot.translate(0, shift), None)
            .unwrap();
        let a = linear_evolve(&shifted, &p, 3.0).unwrap();
        let b = linear_evolve(&s0, &p, 3.0).unwrap().eta.translate(0, shift);
        for (u, v) in a.eta.values().iter().zip(b.values()) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn sweep_calibration() {
        let eps = [0.02, 0.01, 0.005, 0.0025];
        let lin = estimate_sweep(Ok, |_, e| Ok(3.0 * e), &eps).unwrap();
        assert!((lin.fitted_slope - 1.0).abs() < 1e-10);
        let quad = estimate_sweep(Ok, |_, e| Ok(e * e), &eps).unwrap();
        assert!((quad.fitted_slope - 2.0).abs() < 1e-10);
        assert!(matches!(estimate_sweep(Ok, |_, _| Ok(0.0), &eps), Err(Error::DegenerateSweep(_))));
        assert!(estimate_sweep(Ok, |_, e| Ok(e), &eps[..3]).is_err());
        assert!(estimate_sweep(Ok, |_, e| Ok(e), &[0.01, 0.02, 0.005, 0.001]).is_err());
        assert!(lin.to_csv().starts_with("epsilon,error\n2.0000000000000000e-2,"));
    }

    #[test]
    fn rest_state_has_no_remainder() {
        let g = make_grid(1, PI, 32).unwrap();
        let s = SurfaceState::rest(&g);
        let p = params(0.2);
        assert_eq!(linear_relation_residual(&s, &p, 10.0).unwrap(), 0.0);
        assert_eq!(nonlinear_bernoulli_norm(&s, &p), 0.0);
    }

    #[test]
    fn remainders_are_quadratic() {
        let g = make_grid(1, 40.0, 512).unwrap();
        let fam = ScaledFamily::sech(&g, 1.0).unwrap();
        let p = params(0.05);
        let eps = [0.02, 0.01, 0.005, 0.0025];
        let lin = estimate_sweep(|e| fam.state(e), |s, e| linear_relation_residual(s, &p, 0.1 / e), &eps).unwrap();
        assert!((lin.fitted_slope - 2.0).abs() < 0.2, "{lin:?}");
        let nl = estimate_sweep(|e| fam.state(e), |s, _| Ok(nonlinear_bernoulli_norm(s, &p)), &eps).unwrap();
        assert!((nl.fitted_slope - 2.0).abs() < 0.2, "{nl:?}");
    }

    #[test]
    fn kinematic_lemma_bound_holds() {
        let g = make_grid(1, 40.0, 512).unwrap();
        let fam = ScaledFamily::sech(&g, 1.0).unwrap();
        let p = params(0.0);
        for eps in [0.05, 0.01] {
            let s = fam.state(eps).unwrap();
            for k in g.lattice_within(1.0 / eps) {
                let (gap, bound) = kinematic_lemma_gap(&s, &p, k).unwrap();
                assert!(gap <= bound, "{gap} {bound} {k:?}");
            }
        }
    }

    #[test]
    fn sobolev_ratio_is_bounded_on_family() {
        let g = make_grid(1, 40.0, 512).unwrap();
        let fam = ScaledFamily::sech(&g, 1.0).unwrap();
        let r: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&e| sobolev_ratio(&fam.state(e).unwrap().eta)).collect();
        // the family is a pure rescaling, so the ratio is constant
        assert!(r.iter().all(|v| (v - r[0]).abs() < 1e-12 && v.is_finite() && *v > 0.0));
    }

    #[test]
    fn apriori_norms_are_linear_in_amplitude() {
        let g = make_grid(1, 40.0, 512).unwrap();
        let fam = ScaledFamily::sech(&g, 1.0).unwrap();
        let a = AprioriNorms::of(&fam.state(0.01).unwrap());
        let b = AprioriNorms::of(&fam.state(0.005).unwrap());
        assert!((a.eta_sup / b.eta_sup - 2.0).abs() < 1e-12);
        assert!((a.epsilon() / b.epsilon() - 2.0).abs() < 0.05);
    }

    #[test]
    fn nonlinear_term_respects_bound_chain() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = make_grid(1, PI, 64).unwrap();
        for _ in 0..100 {
            let mut random = |scale: f64| {
                let c: Vec<(f64, f64)> = (1..=4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.3))).collect();
                let amp = scale * rng.gen_range(0.05..1.0);
                Field::from_fn(&g, move |x| {
                    amp * c.iter().enumerate().map(|(m, (a, ph))| a * ((m + 1) as f64 * x[0] + ph).cos()).sum::<f64>()
                })
            };
            let s = SurfaceState::new(random(0.5), random(1.0), random(1.0), None).unwrap();
            let p = params(rng.gen_range(0.0..2.0));
            let n = nonlinear_bernoulli_norm(&s, &p);
            assert!(n <= nonlinear_bernoulli_bound(&s, &p), "{n}");
        }
    }
}
