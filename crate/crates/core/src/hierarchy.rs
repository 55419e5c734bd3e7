//! Graded long-wave systems for two-dimensional flow with constant vorticity.
//!
//! The orders form a chain `(0,0) → (1,0) → (1,1) → (0,2) → (1,2)`; each
//! system contains every term of the previous one plus its own graded term.
//! Each is (or, at `(1,2)` with vorticity, nearly is) of the form
//! `∂_t(η, ξ) = J δH` with `J = [[0, 1], [−1, 0]]`.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Grid, Primitive};

/// One of the implemented orders `(n, m)` of `εⁿδᵐ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrderTag {
    pub n: u32,
    pub m: u32,
}

impl OrderTag {
    pub const CHAIN: [OrderTag; 5] = [
        OrderTag { n: 0, m: 0 },
        OrderTag { n: 1, m: 0 },
        OrderTag { n: 1, m: 1 },
        OrderTag { n: 0, m: 2 },
        OrderTag { n: 1, m: 2 },
    ];

    pub fn new(n: u32, m: u32) -> Result<Self> {
        let t = OrderTag { n, m };
        if Self::CHAIN.contains(&t) {
            Ok(t)
        } else {
            Err(Error::UnimplementedOrder { n, m })
        }
    }

    /// Position in the chain.
    pub fn rank(self) -> usize {
        Self::CHAIN.iter().position(|t| *t == self).expect("implemented order")
    }

    /// The preceding order in the chain.
    pub fn previous(self) -> Option<OrderTag> {
        self.rank().checked_sub(1).map(|r| Self::CHAIN[r])
    }
}

impl fmt::Display for OrderTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

impl std::str::FromStr for OrderTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("order must look like `1,2`, got `{s}`"));
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t.split_once(',').ok_or_else(bad)?;
        OrderTag::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DimensionlessParams {
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
    pub sigma_hat: f64,
    pub kappa_vort: f64,
}

impl DimensionlessParams {
    pub fn new(eps: f64, delta: f64, gamma: f64, sigma_hat: f64) -> Result<Self> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !unit(eps) || !unit(delta) {
            return Err(Error::InvalidParameter("eps and delta must lie in (0, 1)".into()));
        }
        if !(sigma_hat >= 0.0 && sigma_hat.is_finite()) || !gamma.is_finite() {
            return Err(Error::InvalidParameter("sigma_hat must be non-negative and gamma finite".into()));
        }
        Ok(DimensionlessParams { eps, delta, gamma, sigma_hat, kappa_vort: gamma * delta })
    }
}

#[derive(Clone, Debug)]
pub struct HierarchyState {
    pub eta: Field,
    pub xi: Field,
    pub t: f64,
}

impl HierarchyState {
    pub fn new(eta: Field, xi: Field, t: f64) -> Result<Self> {
        if **eta.grid() != **xi.grid() {
            return Err(Error::GridMismatch);
        }
        if eta.grid().dim() != 1 {
            return Err(Error::InvalidParameter("the graded systems are one-dimensional".into()));
        }
        Ok(HierarchyState { eta, xi, t })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.eta.grid()
    }

    /// CSV with columns `x,eta,xi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,eta,xi\n");
        let g = self.grid();
        for j in 0..g.len() {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", g.node(j)[0], self.eta.values()[j], self.xi.values()[j]);
        }
        out
    }
}

/// Fourier symbols `(A, B)` of the linear part `η̂_t = A ξ̂`, `ξ̂_t = −B η̂`.
pub fn linear_symbols(order: OrderTag, p: &DimensionlessParams, k: f64) -> (f64, f64) {
    let k2 = k * k;
    if order.rank() >= 3 {
        let d2 = p.delta * p.delta;
        (k2 - d2 * k2 * k2 / 3.0, 1.0 + d2 * p.sigma_hat * k2)
    } else {
        (k2, 1.0)
    }
}

fn dx(f: &Field, order: u32) -> Field {
    f.derivative(0, order)
}

fn mul(a: &Field, b: &Field) -> Field {
    a.zip_map(b, |x, y| x * y)
}

fn axpy(acc: &mut Field, a: f64, x: &Field) {
    for (v, w) in acc.values_mut().iter_mut().zip(x.values()) {
        *v += a * w;
    }
}

/// The nonlinear terms of the order-`order` system.
fn nonlinear_rhs(eta: &Field, xi: &Field, order: OrderTag, p: &DimensionlessParams) -> (Field, Field) {
    let grid = eta.grid();
    let mut et = Field::zeros(grid);
    let mut xt = Field::zeros(grid);
    let r = order.rank();
    if r == 0 {
        return (et, xt);
    }
    let (e, d, g) = (p.eps, p.delta, p.gamma);
    let xi_x = dx(xi, 1);
    axpy(&mut et, -e, &dx(&mul(eta, &xi_x), 1));
    axpy(&mut xt, -0.5 * e, &mul(&xi_x, &xi_x));
    if r >= 2 {
        let eta_x = dx(eta, 1);
        axpy(&mut et, e * d * g, &mul(eta, &eta_x));
        axpy(&mut xt, e * d * g, &mul(eta, &xi_x));
    }
    if r >= 4 {
        let xi_xx = dx(xi, 2);
        axpy(&mut et, -e * d * d, &dx(&mul(eta, &xi_xx), 2));
        let src = xi_xx.zip_map(eta, |a, b| 0.5 * a * a - g * g * b * b);
        axpy(&mut xt, e * d * d, &src);
    }
    (et, xt)
}

fn apply_linear(eta: &Field, xi: &Field, order: OrderTag, p: &DimensionlessParams) -> (Field, Field) {
    let grid = eta.grid();
    let (es, xs) = (eta.spectrum(), xi.spectrum());
    let mut a = Vec::with_capacity(grid.len());
    let mut b = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let (sa, sb) = linear_symbols(order, p, grid.spectral_wavevector(i).0[0]);
        a.push(xs[i] * sa);
        b.push(es[i] * -sb);
    }
    (Field::from_spectrum(grid, a).unwrap(), Field::from_spectrum(grid, b).unwrap())
}

/// `(η_t, ξ_t)` of the order-`order` system.
pub fn hierarchy_rhs(s: &HierarchyState, order: OrderTag, p: &DimensionlessParams) -> (Field, Field) {
    let (mut le, mut lx) = apply_linear(&s.eta, &s.xi, order, p);
    let (ne, nx) = nonlinear_rhs(&s.eta, &s.xi, order, p);
    axpy(&mut le, 1.0, &ne);
    axpy(&mut lx, 1.0, &nx);
    (le, lx)
}

/// The graded Hamiltonian by box quadrature.
///
/// At `(1,2)` the vorticity term is `½εδ²∫⅓γ²η³`, whose variation is half
/// of the `−γ²η²` term of the evolution system; the two agree only at `γ = 0`.
pub fn hamiltonian(s: &HierarchyState, order: OrderTag, p: &DimensionlessParams) -> f64 {
    let (e, d, g) = (p.eps, p.delta, p.gamma);
    let r = order.rank();
    let eta = s.eta.values();
    let xi_x = dx(&s.xi, 1);
    let xi_xx = dx(&s.xi, 2);
    let eta_x = dx(&s.eta, 1);
    let (xx, xxx, ex) = (xi_x.values(), xi_xx.values(), eta_x.values());
    let xi = s.xi.values();
    let mut acc = 0.0;
    for j in 0..eta.len() {
        let mut h = 0.5 * (eta[j] * eta[j] + xx[j] * xx[j]);
        if r >= 1 {
            h += 0.5 * e * eta[j] * xx[j] * xx[j];
        }
        if r >= 2 {
            h += e * d * g * eta[j] * ex[j] * xi[j];
        }
        if r >= 3 {
            h += 0.5 * d * d * (p.sigma_hat * ex[j] * ex[j] - xxx[j] * xxx[j] / 3.0);
        }
        if r >= 4 {
            h += 0.5 * e * d * d * (g * g * eta[j].powi(3) / 3.0 - xxx[j] * xxx[j] * eta[j]);
        }
        acc += h;
    }
    acc * s.grid().cell_volume()
}

/// A smooth random field made of the lowest `modes` Fourier modes.
fn smooth_probe(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, modes: usize) -> Field {
    let coeffs: Vec<(f64, f64)> = (1..=modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let l = grid.half_period(0);
    let k1 = std::f64::consts::PI / l;
    let c0 = rng.gen_range(-1.0..1.0);
    Field::from_fn(grid, |x| {
        c0 + coeffs
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let k = (m + 1) as f64 * k1;
                a * (k * x[0]).cos() + b * (k * x[0]).sin()
            })
            .sum::<f64>()
    })
}

/// A state whose `η` and `ξ` are random combinations of the lowest `modes` Fourier modes, scaled by `amp`.
pub fn random_smooth_state(grid: &Arc<Grid>, seed: u64, modes: usize, amp: f64) -> Result<HierarchyState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = smooth_probe(grid, &mut rng, modes).map(|v| amp * v);
    let xi = smooth_probe(grid, &mut rng, modes).map(|v| amp * v);
    HierarchyState::new(eta, xi, 0.0)
}

/// Largest relative mismatch between `(η_t, ξ_t)` and `J δH` along random smooth directions.
///
/// For a direction `v = (v_η, v_ξ)` the Gateaux derivative `dH·v` is taken by
/// a fourth-order central difference and compared with `∫(−ξ_t v_η + η_t v_ξ)`;
/// the mismatch is normalized by `‖(ξ_t, η_t)‖·‖v‖`.
pub fn functional_gradient_check(
    s: &HierarchyState,
    order: OrderTag,
    p: &DimensionlessParams,
    probe_count: usize,
    seed: u64,
) -> Result<f64> {
    if probe_count == 0 {
        return Err(Error::InvalidParameter("probe_count must be positive".into()));
    }
    let grid = s.grid().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (et, xt) = hierarchy_rhs(s, order, p);
    let cv = grid.cell_volume();
    let grad_norm = (et.l2_norm().powi(2) + xt.l2_norm().powi(2)).sqrt();
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..probe_count {
        let ve = smooth_probe(&grid, &mut rng, 4);
        let vx = smooth_probe(&grid, &mut rng, 4);
        let shifted = |a: f64| {
            let mut e = s.eta.clone();
            let mut x = s.xi.clone();
            axpy(&mut e, a, &ve);
            axpy(&mut x, a, &vx);
            hamiltonian(&HierarchyState { eta: e, xi: x, t: s.t }, order, p)
        };
        let fd = (8.0 * (shifted(h) - shifted(-h)) - (shifted(2.0 * h) - shifted(-2.0 * h))) / (12.0 * h);
        let pairing: f64 = (0..grid.len())
            .map(|j| -xt.values()[j] * ve.values()[j] + et.values()[j] * vx.values()[j])
            .sum::<f64>()
            * cv;
        let vnorm = (ve.l2_norm().powi(2) + vx.l2_norm().powi(2)).sqrt();
        worst = worst.max((fd - pairing).abs() / (grad_norm * vnorm).max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Tolerance and iteration cap of the implicit solve.
pub const STEP_TOLERANCE: f64 = 1e-12;
pub const STEP_MAX_ITERATIONS: usize = 50;

/// One implicit-midpoint step `u₁ = u₀ + dt·F((u₀+u₁)/2)`.
///
/// The linear part is solved exactly mode by mode; the nonlinear part by
/// fixed-point iteration on the midpoint.
///
/// From rank 3 on, modes with `δ²k² > 3` have `A < 0` and grow; the solve fails
/// once `1 + (dt/2)²AB` nears zero, so grids should keep `δ·k_max < √3`.
pub fn step(s: &HierarchyState, order: OrderTag, p: &DimensionlessParams, dt: f64) -> Result<HierarchyState> {
    if !dt.is_finite() || dt == 0.0 {
        return Err(Error::InvalidParameter("dt must be finite and nonzero".into()));
    }
    let grid = s.grid().clone();
    let n = grid.len();
    let h = 0.5 * dt;
    let symbols: Vec<(f64, f64)> =
        (0..n).map(|i| linear_symbols(order, p, grid.spectral_wavevector(i).0[0])).collect();
    let (e0, x0) = (s.eta.spectrum().to_vec(), s.xi.spectrum().to_vec());
    let mut base_e = Vec::with_capacity(n);
    let mut base_x = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = symbols[i];
        base_e.push(e0[i] + x0[i] * (h * a));
        base_x.push(x0[i] - e0[i] * (h * b));
    }
    let (mut ne, mut nx) = nonlinear_rhs(&s.eta, &s.xi, order, p);
    let mut prev: Option<(Field, Field)> = None;
    let mut update = f64::INFINITY;
    for iteration in 0..STEP_MAX_ITERATIONS {
        let (nes, nxs) = (ne.spectrum(), nx.spectrum());
        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        let mut x1 = e1.clone();
        for i in 0..n {
            let (a, b) = symbols[i];
            let r1 = base_e[i] + nes[i] * dt;
            let r2 = base_x[i] + nxs[i] * dt;
            let det = 1.0 + h * h * a * b;
            if det.abs() < 1e-14 {
                return Err(Error::NonConvergence { iterations: iteration, update: det });
            }
            e1[i] = (r1 + r2 * (h * a)) / det;
            x1[i] = (r2 - r1 * (h * b)) / det;
        }
        let eta1: Field = Field::from_spectrum(&grid, e1)?;
        let xi1: Field = Field::from_spectrum(&grid, x1)?;
        if eta1.values().iter().chain(xi1.values()).any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence { iterations: iteration, update: f64::NAN });
        }
        let scale = 1.0f64.max(eta1.sup_norm()).max(xi1.sup_norm());
        if let Some((pe, px)) = &prev {
            update = eta1
                .values()
                .iter()
                .zip(pe.values())
                .chain(xi1.values().iter().zip(px.values()))
                .map(|(a, b): (&f64, &f64)| (a - b).abs())
                .fold(0.0, f64::max);
            if update <= STEP_TOLERANCE * scale {
                return HierarchyState::new(eta1, xi1, s.t + dt);
            }
        }
        let mid_e = s.eta.zip_map(&eta1, |a, b| 0.5 * (a + b));
        let mid_x = s.xi.zip_map(&xi1, |a, b| 0.5 * (a + b));
        let (a, b) = nonlinear_rhs(&mid_e, &mid_x, order, p);
        ne = a;
        nx = b;
        prev = Some((eta1, xi1));
    }
    Err(Error::NonConvergence { iterations: STEP_MAX_ITERATIONS, update })
}

/// Coefficient of `ξ_x²ξ_xx` in the eliminated long-wave equation, as printed.
pub const CUBIC_PRINTED: f64 = 1.0 / 3.0;
/// The coefficient obtained by eliminating `η` from the `(1,2)` system.
pub const CUBIC_FROM_HIERARCHY: f64 = 1.5;
/// The coefficient consistent with the travelling-wave reduction and its constants `μ`, `(ineq1)`, `(ineq2)`.
pub const CUBIC_SOLITON: f64 = 3.0;

/// `(ξ_t, ξ_tt)` along the order-`order` flow.
///
/// `ξ_tt` is the directional derivative of `ξ_t(u)` along `u_t`; every right
/// hand side is at most quadratic, so a central difference with unit step is exact.
pub fn xi_time_derivatives(s: &HierarchyState, order: OrderTag, p: &DimensionlessParams) -> (Field, Field) {
    let (et, xt) = hierarchy_rhs(s, order, p);
    let shift = |a: f64| {
        let mut e = s.eta.clone();
        let mut x = s.xi.clone();
        axpy(&mut e, a, &et);
        axpy(&mut x, a, &xt);
        hierarchy_rhs(&HierarchyState { eta: e, xi: x, t: s.t }, order, p).1
    };
    let xtt = shift(1.0).zip_map(&shift(-1.0), |a, b| 0.5 * (a - b));
    (xt, xtt)
}

/// Residual of `ξ_tt − ξ_xx + ε(2ξ_xξ_xt + ξ_tξ_xx) + εδγ(2ξ_tξ_xt + ξ_xξ_tt) + Cε²ξ_x²ξ_xx + δ²(σ̂−⅓)ξ_xxxx`.
pub fn eliminate_eta_long(xi: &Field, xi_t: &Field, xi_tt: &Field, p: &DimensionlessParams, cubic: f64) -> Field {
    let (e, d, g, s) = (p.eps, p.delta, p.gamma, p.sigma_hat);
    let (x1, x2, x4) = (dx(xi, 1), dx(xi, 2), dx(xi, 4));
    let xt1 = dx(xi_t, 1);
    let vals = (0..xi.values().len())
        .map(|j| {
            let (a, b, c, f) = (x1.values()[j], x2.values()[j], x4.values()[j], xt1.values()[j]);
            let (t, tt) = (xi_t.values()[j], xi_tt.values()[j]);
            tt - b + e * (2.0 * a * f + t * b) + e * d * g * (2.0 * t * f + a * tt) + cubic * e * e * a * a * b
                + d * d * (s - 1.0 / 3.0) * c
        })
        .collect();
    Field::new(xi.grid(), vals).expect("grid length")
}

/// Parameters of the long-wave equation with `O(1)` vorticity product `κ = γδ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LongWave {
    pub kappa: f64,
    pub sigma_hat: f64,
    pub cubic: f64,
    /// Wavenumbers above this are removed from `ξ_TT`. For `σ̂ < ⅓` the
    /// equation amplifies short waves without bound, so round-off must be filtered.
    pub cutoff: Option<f64>,
}

impl LongWave {
    pub fn new(kappa: f64, sigma_hat: f64) -> Self {
        LongWave { kappa, sigma_hat, cubic: CUBIC_SOLITON, cutoff: None }
    }

    /// `ω² = k² + (σ̂ − ⅓)k⁴` of small plane waves.
    pub fn omega2(&self, k: f64) -> f64 {
        k * k + (self.sigma_hat - 1.0 / 3.0) * k.powi(4)
    }
}

/// `(ξ_T, ξ_TT)` of `ξ_TT − ξ_XX + 2ξ_Xξ_XT + ξ_Tξ_XX + κ(2ξ_Tξ_XT + ξ_Xξ_TT) + Cξ_X²ξ_XX + (σ̂−⅓)ξ_XXXX = 0`,
/// solved pointwise for `ξ_TT`. Only derivatives of `ξ` enter, so `ξ` may carry a linear part.
pub fn boussinesq_rhs_long3(xi: &Primitive, xi_t: &Field, w: &LongWave) -> Result<(Field, Field)> {
    let (x1, x2, x4) = (xi.derivative(1), xi.derivative(2), xi.derivative(4));
    let xt1 = xi_t.derivative(0, 1);
    let s = w.sigma_hat - 1.0 / 3.0;
    let mut out = Vec::with_capacity(x1.values().len());
    for j in 0..x1.values().len() {
        let (a, b, c) = (x1.values()[j], x2.values()[j], x4.values()[j]);
        let (t, f) = (xi_t.values()[j], xt1.values()[j]);
        let coef = 1.0 + w.kappa * a;
        if coef.abs() < 1e-8 {
            return Err(Error::DegenerateCoefficient { index: j, value: coef });
        }
        out.push((b - 2.0 * a * f - t * b - 2.0 * w.kappa * t * f - w.cubic * a * a * b - s * c) / coef);
    }
    let mut tt: Field = Field::new(xi_t.grid(), out)?;
    if let Some(kc) = w.cutoff {
        let g = tt.grid().clone();
        let spec = tt
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, c)| if g.spectral_wavevector(i).modulus() > kc { Complex64::new(0.0, 0.0) } else { *c })
            .collect();
        tt = Field::from_spectrum(&g, spec)?;
    }
    Ok((xi_t.clone(), tt))
}

/// Pointwise residual of the long-wave equation for given `ξ`, `ξ_T`, `ξ_TT`.
pub fn long3_residual(xi: &Primitive, xi_t: &Field, xi_tt: &Field, w: &LongWave) -> Field {
    let (x1, x2, x4) = (xi.derivative(1), xi.derivative(2), xi.derivative(4));
    let xt1 = xi_t.derivative(0, 1);
    let s = w.sigma_hat - 1.0 / 3.0;
    let vals = (0..x1.values().len())
        .map(|j| {
            let (a, b, c) = (x1.values()[j], x2.values()[j], x4.values()[j]);
            let (t, f, tt) = (xi_t.values()[j], xt1.values()[j], xi_tt.values()[j]);
            tt - b + 2.0 * a * f + t * b + w.kappa * (2.0 * t * f + a * tt) + w.cubic * a * a * b + s * c
        })
        .collect();
    Field::new(xi_t.grid(), vals).expect("grid length")
}

/// State `(ξ, ξ_T)` of the long-wave equation.
#[derive(Clone, Debug)]
pub struct LongWaveState {
    pub xi: Primitive,
    pub xi_t: Field,
    pub t: f64,
}

/// Classical RK4 step for the long-wave equation; the linear part of `ξ` is constant in time.
pub fn long3_rk4_step(s: &LongWaveState, w: &LongWave, dt: f64) -> Result<LongWaveState> {
    let with = |base: &LongWaveState, k: &(Field, Field), a: f64| LongWaveState {
        xi: Primitive { slope: base.xi.slope, periodic: base.xi.periodic.zip_map(&k.0, |u, v| u + a * v) },
        xi_t: base.xi_t.zip_map(&k.1, |u, v| u + a * v),
        t: base.t,
    };
    let f = |u: &LongWaveState| boussinesq_rhs_long3(&u.xi, &u.xi_t, w);
    let k1 = f(s)?;
    let k2 = f(&with(s, &k1, 0.5 * dt))?;
    let k3 = f(&with(s, &k2, 0.5 * dt))?;
    let k4 = f(&with(s, &k3, dt))?;
    let comb = |i: usize| {
        let pick = |k: &(Field, Field)| if i == 0 { k.0.clone() } else { k.1.clone() };
        let (a, b, c, d) = (pick(&k1), pick(&k2), pick(&k3), pick(&k4));
        let vals = (0..a.values().len())
            .map(|j| (a.values()[j] + 2.0 * b.values()[j] + 2.0 * c.values()[j] + d.values()[j]) / 6.0)
            .collect();
        Field::new(a.grid(), vals).unwrap()
    };
    let next = with(s, &(comb(0), comb(1)), dt);
    Ok(LongWaveState { t: s.t + dt, ..next })
}

/// `(2ξ_τ + ξ_χ² + (σ̂ − ⅓)ξ_χχχ)_χ`.
pub fn kdv_residual(xi: &Primitive, xi_tau: &Field, sigma_hat: f64) -> Field {
    let (x1, x3) = (xi.derivative(1), xi.derivative(3));
    let s = sigma_hat - 1.0 / 3.0;
    let inner = Field::new(
        xi_tau.grid(),
        (0..x1.values().len())
            .map(|j| 2.0 * xi_tau.values()[j] + x1.values()[j].powi(2) + s * x3.values()[j])
            .collect(),
    )
    .expect("grid length");
    inner.derivative(0, 1)
}

/// Linear symbols of `order` measured from [`hierarchy_rhs`] at lattice wavenumber `k`.
///
/// The response to `±cos(kx)` is differenced so that quadratic terms cancel exactly.
pub fn measured_symbols(grid: &Arc<Grid>, order: OrderTag, p: &DimensionlessParams, k: f64) -> Result<(f64, f64)> {
    grid.lattice_index(crate::field::Wavevector::one_d(k))?;
    let mode = Field::from_fn(grid, |x| (k * x[0]).cos());
    let z = Field::zeros(grid);
    let response = |eta: &Field, xi: &Field| hierarchy_rhs(&HierarchyState { eta: eta.clone(), xi: xi.clone(), t: 0.0 }, order, p);
    let project = |f: &Field| {
        let num: f64 = f.values().iter().zip(mode.values()).map(|(a, b)| a * b).sum();
        let den: f64 = mode.values().iter().map(|b| b * b).sum();
        num / den
    };
    let neg = mode.map(|v| -v);
    let a = project(&response(&z, &mode).0.zip_map(&response(&z, &neg).0, |u, v| 0.5 * (u - v)));
    let b = -project(&response(&mode, &z).1.zip_map(&response(&neg, &z).1, |u, v| 0.5 * (u - v)));
    Ok((a, b))
}

/// `ω²` of small plane waves of the order-`order` system, truncated to the grading of the order:
/// `AB − (A − A₀)(B − B₀)` with `(A₀, B₀)` the lowest-order symbols.
pub fn hierarchy_omega2(grid: &Arc<Grid>, order: OrderTag, p: &DimensionlessParams, k: f64) -> Result<f64> {
    let (a, b) = measured_symbols(grid, order, p, k)?;
    let (a0, b0) = measured_symbols(grid, OrderTag::CHAIN[0], p, k)?;
    Ok(a * b - (a - a0) * (b - b0))
}

/// Time series of a hierarchy run.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub order: OrderTag,
    pub params: DimensionlessParams,
    pub dt: f64,
    pub times: Vec<f64>,
    pub hamiltonian: Vec<f64>,
}

impl Trajectory {
    pub fn max_relative_drift(&self) -> f64 {
        let h0 = self.hamiltonian[0];
        self.hamiltonian.iter().map(|h| ((h - h0) / h0).abs()).fold(0.0, f64::max)
    }
}

/// Integrates `steps` implicit-midpoint steps, recording the Hamiltonian after each.
pub fn evolve(
    s0: &HierarchyState,
    order: OrderTag,
    p: &DimensionlessParams,
    dt: f64,
    steps: usize,
) -> Result<(HierarchyState, Trajectory)> {
    let mut s = s0.clone();
    let mut tr = Trajectory {
        order,
        params: *p,
        dt,
        times: vec![s.t],
        hamiltonian: vec![hamiltonian(&s, order, p)],
    };
    for _ in 0..steps {
        s = step(&s, order, p, dt)?;
        tr.times.push(s.t);
        tr.hamiltonian.push(hamiltonian(&s, order, p));
    }
    Ok((s, tr))
}
