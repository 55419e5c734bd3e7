//! Recovery of interior-field traces on the free surface.
//!
//! Given the surface elevation and the surface (pseudo-)potential, the
//! chain rule and the kinematic condition form a small linear system for
//! the velocity traces at each node. These are solved in closed form here.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{divergence, Field, Grid};

/// Threshold on `Ẋ² + Ẏ²` below which a parameterization is treated as a cusp.
pub const CUSP_THRESHOLD: f64 = 1e-12;

/// Single-valued free surface: `η`, `η_t`, and the surface potential (`q` or `ξ`).
#[derive(Clone, Debug)]
pub struct SurfaceState {
    pub eta: Field,
    pub eta_t: Field,
    pub pot: Field,
    pub pot_t: Option<Field>,
}

fn same_grid(a: &Field, b: &Field) -> Result<()> {
    if **a.grid() == **b.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

impl SurfaceState {
    pub fn new(eta: Field, eta_t: Field, pot: Field, pot_t: Option<Field>) -> Result<Self> {
        same_grid(&eta, &eta_t)?;
        same_grid(&eta, &pot)?;
        if let Some(pt) = &pot_t {
            same_grid(&eta, pt)?;
        }
        Ok(SurfaceState { eta, eta_t, pot, pot_t })
    }

    /// The state at rest: every field zero.
    pub fn rest(grid: &Arc<Grid>) -> Self {
        let z = Field::zeros(grid);
        SurfaceState { eta: z.clone(), eta_t: z.clone(), pot: z.clone(), pot_t: Some(z) }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.eta.grid()
    }

    pub fn pot_t(&self) -> Result<&Field> {
        self.pot_t.as_ref().ok_or(Error::MissingField("pot_t"))
    }

    /// Checks that the layer between the bottom `y = -(h0 + h)` and the surface has positive depth.
    pub fn check_layer(&self, h0: f64, bottom: Option<&Field>) -> Result<()> {
        for (j, &e) in self.eta.values().iter().enumerate() {
            let depth = e + h0 + bottom.map_or(0.0, |b| b.values()[j]);
            if !(depth > 0.0) {
                return Err(Error::DegenerateLayer { index: j, depth });
            }
        }
        Ok(())
    }
}

/// Velocity traces `(∇ₓφ, φ_y)` on a single-valued surface.
#[derive(Clone, Debug)]
pub struct SurfaceGradient {
    /// One component per horizontal axis.
    pub phi_x: Vec<Field>,
    pub phi_y: Field,
}

/// Solves `(I + ∇η⊗∇η)∇ₓφ = ∇q − η_t∇η`, then `φ_y = η_t + ∇η·∇ₓφ`.
pub fn recover_gradient_irrotational(s: &SurfaceState) -> SurfaceGradient {
    let grid = s.grid().clone();
    let grad_eta = s.eta.gradient();
    let grad_q = s.pot.gradient();
    let dim = grid.dim();
    let n = grid.len();
    let mut phi_x = vec![vec![0.0; n]; dim];
    let mut phi_y = vec![0.0; n];
    for j in 0..n {
        let et = s.eta_t.values()[j];
        let mut b = [0.0; 2];
        let mut e = [0.0; 2];
        for a in 0..dim {
            e[a] = grad_eta[a].values()[j];
            b[a] = grad_q[a].values()[j] - et * e[a];
        }
        let e2 = e[0] * e[0] + e[1] * e[1];
        let eb = e[0] * b[0] + e[1] * b[1];
        // Sherman–Morrison inverse of I + e⊗e
        let mut edotphi = 0.0;
        for a in 0..dim {
            let v = b[a] - e[a] * eb / (1.0 + e2);
            phi_x[a][j] = v;
            edotphi += e[a] * v;
        }
        phi_y[j] = et + edotphi;
    }
    SurfaceGradient {
        phi_x: phi_x.into_iter().map(|v| Field::new(&grid, v).expect("grid length")).collect(),
        phi_y: Field::new(&grid, phi_y).expect("grid length"),
    }
}

/// Traces `(φ_x, φ_y)` of the pseudo-potential for constant vorticity `gamma` (1-D surfaces).
pub fn recover_gradient_rotational(s: &SurfaceState, gamma: f64) -> Result<SurfaceGradient> {
    let grid = s.grid().clone();
    if grid.dim() != 1 {
        return Err(Error::InvalidParameter("the rotational formulation is two-dimensional (dim = 1)".into()));
    }
    let eta = s.eta.values();
    let eta_t = s.eta_t.values();
    let ex = s.eta.derivative(0, 1);
    let xx = s.pot.derivative(0, 1);
    let n = grid.len();
    let mut phi_x = Vec::with_capacity(n);
    let mut phi_y = Vec::with_capacity(n);
    for j in 0..n {
        let (e, et, exj, xxj) = (eta[j], eta_t[j], ex.values()[j], xx.values()[j]);
        let d = 1.0 + exj * exj;
        phi_x.push((xxj - et * exj + gamma * e * exj * exj) / d);
        phi_y.push((et + exj * xxj - gamma * e * exj) / d);
    }
    Ok(SurfaceGradient {
        phi_x: vec![Field::new(&grid, phi_x)?],
        phi_y: Field::new(&grid, phi_y)?,
    })
}

/// A parameterized (possibly overturning) surface `x = X(λ,t)`, `y = Y(λ,t)`.
///
/// `X(λ) = x_slope·λ + X̃(λ)` with `X̃` periodic; open surfaces use
/// `x_slope = 1`, closed curves `x_slope = 0`. λ-derivatives are spectral.
#[derive(Clone, Debug)]
pub struct ParametricSurface {
    x_slope: f64,
    x_periodic: Field,
    y: Field,
    x_t: Field,
    y_t: Field,
    xi: Field,
    xi_t: Option<Field>,
    xd: Field,
    yd: Field,
    xdd: Field,
    ydd: Field,
    xid: Field,
}

impl ParametricSurface {
    pub fn new(
        x_slope: f64,
        x_periodic: Field,
        y: Field,
        x_t: Field,
        y_t: Field,
        xi: Field,
        xi_t: Option<Field>,
    ) -> Result<Self> {
        if x_periodic.grid().dim() != 1 {
            return Err(Error::InvalidParameter("parametric surfaces are curves (dim = 1)".into()));
        }
        for f in [&y, &x_t, &y_t, &xi].into_iter().chain(xi_t.as_ref()) {
            same_grid(&x_periodic, f)?;
        }
        let xd = x_periodic.derivative(0, 1).map(|v| v + x_slope);
        let xdd = x_periodic.derivative(0, 2);
        let yd = y.derivative(0, 1);
        let ydd = y.derivative(0, 2);
        let xid = xi.derivative(0, 1);
        Ok(ParametricSurface { x_slope, x_periodic, y, x_t, y_t, xi, xi_t, xd, yd, xdd, ydd, xid })
    }

    /// The graph parameterization `X = λ`, `Y = η(λ)` of a single-valued surface.
    pub fn from_graph(s: &SurfaceState) -> Result<Self> {
        let grid = s.grid();
        Self::new(
            1.0,
            Field::zeros(grid),
            s.eta.clone(),
            Field::zeros(grid),
            s.eta_t.clone(),
            s.pot.clone(),
            s.pot_t.clone(),
        )
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.y.grid()
    }

    pub fn x_slope(&self) -> f64 {
        self.x_slope
    }

    /// `X(λ_j)` at every node.
    pub fn x_values(&self) -> Vec<f64> {
        let grid = self.grid();
        self.x_periodic
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| self.x_slope * grid.node(j)[0] + v)
            .collect()
    }

    pub fn y(&self) -> &Field {
        &self.y
    }
    pub fn x_t(&self) -> &Field {
        &self.x_t
    }
    pub fn y_t(&self) -> &Field {
        &self.y_t
    }
    pub fn xi(&self) -> &Field {
        &self.xi
    }
    pub fn xi_t(&self) -> Result<&Field> {
        self.xi_t.as_ref().ok_or(Error::MissingField("xi_t"))
    }
    /// `Ẋ`.
    pub fn x_dot(&self) -> &Field {
        &self.xd
    }
    /// `Ẏ`.
    pub fn y_dot(&self) -> &Field {
        &self.yd
    }
    /// `Ẍ`.
    pub fn x_ddot(&self) -> &Field {
        &self.xdd
    }
    /// `Ÿ`.
    pub fn y_ddot(&self) -> &Field {
        &self.ydd
    }
    /// `ξ̇`.
    pub fn xi_dot(&self) -> &Field {
        &self.xid
    }

    /// `Ẋ² + Ẏ²` per node, failing near a cusp.
    pub fn speed_squared(&self) -> Result<Vec<f64>> {
        self.xd
            .values()
            .iter()
            .zip(self.yd.values())
            .enumerate()
            .map(|(j, (a, b))| {
                let d = a * a + b * b;
                if d < CUSP_THRESHOLD {
                    Err(Error::NearCusp { index: j, speed2: d })
                } else {
                    Ok(d)
                }
            })
            .collect()
    }
}

/// Traces `(φ_x, φ_y, φ_t)` on a parameterized surface.
#[derive(Clone, Debug)]
pub struct MultivaluedTraces {
    pub phi_x: Field,
    pub phi_y: Field,
    pub phi_t: Field,
}

/// Inverts the kinematic condition together with the λ- and t-chain rules.
pub fn recover_multivalued(p: &ParametricSurface, gamma: f64) -> Result<MultivaluedTraces> {
    let d = p.speed_squared()?;
    let xi_t = p.xi_t()?.values();
    let grid = p.grid().clone();
    let n = grid.len();
    let (xd, yd, xid) = (p.xd.values(), p.yd.values(), p.xid.values());
    let (xt, yt, y) = (p.x_t.values(), p.y_t.values(), p.y.values());
    let mut phi_x = Vec::with_capacity(n);
    let mut phi_y = Vec::with_capacity(n);
    let mut phi_t = Vec::with_capacity(n);
    for j in 0..n {
        let s = yd[j] * (gamma * y[j] + xt[j]) - xd[j] * yt[j];
        phi_x.push((xid[j] * xd[j] + yd[j] * s) / d[j]);
        phi_y.push((xid[j] * yd[j] - xd[j] * s) / d[j]);
        phi_t.push(
            xi_t[j] - (xid[j] * (xd[j] * xt[j] + yd[j] * yt[j]) + (xt[j] * yd[j] - yt[j] * xd[j]) * s) / d[j],
        );
    }
    Ok(MultivaluedTraces {
        phi_x: Field::new(&grid, phi_x)?,
        phi_y: Field::new(&grid, phi_y)?,
        phi_t: Field::new(&grid, phi_t)?,
    })
}

/// `(σ/ρ) ∇·(∇η / √(1 + |∇η|²))`.
pub fn surface_tension_term(eta: &Field, sigma: f64, rho: f64) -> Field {
    surface_tension_with_coefficient(eta, sigma / rho)
}

pub(crate) fn surface_tension_with_coefficient(eta: &Field, coefficient: f64) -> Field {
    if coefficient == 0.0 {
        return Field::zeros(eta.grid());
    }
    let grad = eta.gradient();
    let n = eta.grid().len();
    let norm: Vec<f64> = (0..n)
        .map(|j| (1.0 + grad.iter().map(|g| g.values()[j].powi(2)).sum::<f64>()).sqrt())
        .collect();
    let flux: Vec<Field> = grad
        .iter()
        .map(|g| Field::new(eta.grid(), g.values().iter().zip(&norm).map(|(v, s)| v / s).collect()).unwrap())
        .collect();
    divergence(&flux).map(|v| coefficient * v)
}

/// `σ (ẊŸ − ẎẌ) / (Ẋ² + Ẏ²)^{3/2}`, the surface tension term of a parameterized surface.
pub fn curvature_term(p: &ParametricSurface, sigma: f64) -> Result<Field> {
    let d = p.speed_squared()?;
    let (xd, yd, xdd, ydd) = (p.xd.values(), p.yd.values(), p.xdd.values(), p.ydd.values());
    let vals = (0..d.len())
        .map(|j| sigma * (xd[j] * ydd[j] - yd[j] * xdd[j]) / d[j].powf(1.5))
        .collect();
    Field::new(p.grid(), vals)
}
