//! Periodic grids, sampled fields and spectral calculus.
//!
//! A [`Grid`] is a uniform tensor-product sampling of the box
//! `[-L, L)^dim` (one half-period per axis). Decaying fields on the whole
//! horizontal space are represented by their samples on a box large enough
//! that they have decayed to round-off at the edge. Spectra are the
//! unnormalized forward DFT
//!
//! ```text
//! F_p = Σ_j f_j exp(-2πi p·j / N)
//! ```
//!
//! so that `Σ |f_j|² Δx = (Δx / N) Σ |F_p|²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether a wavevector lies on the lattice.
const LATTICE_TOL: f64 = 1e-9;

/// A horizontal wavevector. One-dimensional grids use only the first component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Wavevector(pub [f64; 2]);

impl Wavevector {
    pub fn one_d(k: f64) -> Self {
        Wavevector([k, 0.0])
    }

    pub fn two_d(k1: f64, k2: f64) -> Self {
        Wavevector([k1, k2])
    }

    /// κ = |k|.
    pub fn modulus(&self) -> f64 {
        self.0[0].hypot(self.0[1])
    }

    pub fn dot(&self, x: [f64; 2]) -> f64 {
        self.0[0] * x[0] + self.0[1] * x[1]
    }

    pub fn neg(&self) -> Self {
        Wavevector([-self.0[0], -self.0[1]])
    }
}

struct Axis {
    half_period: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid on `[-L, L)^dim`, `dim ∈ {1, 2}`.
pub struct Grid {
    axes: Vec<Axis>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Grid");
        s.field("dim", &self.dim());
        for (a, axis) in self.axes.iter().enumerate() {
            s.field(if a == 0 { "axis0" } else { "axis1" }, &(axis.half_period, axis.n));
        }
        s.finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.axes.len() == other.axes.len()
            && self
                .axes
                .iter()
                .zip(&other.axes)
                .all(|(a, b)| a.n == b.n && a.half_period == b.half_period)
    }
}

/// Builds an isotropic grid with `n` samples and half-period `half_period` per axis.
pub fn make_grid(dim: usize, half_period: f64, n: usize) -> Result<Arc<Grid>> {
    Grid::new(&vec![half_period; dim], &vec![n; dim])
}

impl Grid {
    pub fn new(half_periods: &[f64], ns: &[usize]) -> Result<Arc<Grid>> {
        let dim = half_periods.len();
        if dim == 0 || dim > 2 || ns.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2 with one size per axis (got {} half-periods, {} sizes)",
                dim,
                ns.len()
            )));
        }
        let mut planner = FftPlanner::new();
        let mut axes = Vec::with_capacity(dim);
        for (&l, &n) in half_periods.iter().zip(ns) {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidGrid(format!("half-period must be positive, got {l}")));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "samples per axis must be a power of two ≥ 8, got {n}"
                )));
            }
            axes.push(Axis {
                half_period: l,
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            });
        }
        Ok(Arc::new(Grid { axes }))
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n(&self, axis: usize) -> usize {
        self.axes[axis].n
    }

    pub fn half_period(&self, axis: usize) -> f64 {
        self.axes[axis].half_period
    }

    /// Node spacing `2L / N` along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.axes[axis].half_period / self.axes[axis].n as f64
    }

    /// Quadrature weight of one node (product of spacings).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Volume of the periodic box.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| 2.0 * a.half_period).product()
    }

    fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.n).product()
    }

    /// Per-axis integer indices of flat node `idx`.
    fn split(&self, idx: usize) -> [usize; 2] {
        match self.dim() {
            1 => [idx, 0],
            _ => [idx / self.axes[1].n, idx % self.axes[1].n],
        }
    }

    /// Coordinates of flat node `idx` (second component zero in 1-D).
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let ij = self.split(idx);
        let mut x = [0.0; 2];
        for (a, axis) in self.axes.iter().enumerate() {
            x[a] = -axis.half_period + ij[a] as f64 * self.spacing(a);
        }
        x
    }

    /// The `axis` coordinate of every node, in flat order.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.len()).map(|j| self.node(j)[axis]).collect()
    }

    /// Signed lattice integer of DFT index `p` along `axis`, in `[-N/2, N/2)`.
    fn signed_index(&self, axis: usize, p: usize) -> i64 {
        let n = self.axes[axis].n;
        if p < n / 2 {
            p as i64
        } else {
            p as i64 - n as i64
        }
    }

    /// Wavenumber `π m / L` for lattice integer `m`.
    pub fn wavenumber(&self, axis: usize, m: i64) -> f64 {
        PI * m as f64 / self.axes[axis].half_period
    }

    /// Wavevector attached to flat spectral index `p`.
    pub fn spectral_wavevector(&self, p: usize) -> Wavevector {
        let ij = self.split(p);
        let mut k = [0.0; 2];
        for a in 0..self.dim() {
            k[a] = self.wavenumber(a, self.signed_index(a, ij[a]));
        }
        Wavevector(k)
    }

    /// True when `p` is a Nyquist index along `axis`.
    fn is_nyquist(&self, axis: usize, p: usize) -> bool {
        self.split(p)[axis] == self.axes[axis].n / 2
    }

    /// Lattice integers of `k`, or an error when `k` is off the dual lattice.
    pub fn lattice_index(&self, k: Wavevector) -> Result<[i64; 2]> {
        let mut m = [0i64; 2];
        for (a, axis) in self.axes.iter().enumerate() {
            let x = k.0[a] * axis.half_period / PI;
            let r = x.round();
            let half = axis.n as i64 / 2;
            if (x - r).abs() > LATTICE_TOL * r.abs().max(1.0) || (r as i64) < -half || (r as i64) >= half {
                return Err(Error::OffLattice { k: k.0 });
            }
            m[a] = r as i64;
        }
        if self.dim() == 1 && k.0[1] != 0.0 {
            return Err(Error::OffLattice { k: k.0 });
        }
        Ok(m)
    }

    /// Every point of the dual lattice, in DFT order.
    pub fn dual_lattice(&self) -> Vec<Wavevector> {
        (0..self.len()).map(|p| self.spectral_wavevector(p)).collect()
    }

    /// Lattice wavevectors with `|k| ≤ kappa_max`, sorted by lattice integers.
    pub fn lattice_within(&self, kappa_max: f64) -> Vec<Wavevector> {
        let mut ks: Vec<(i64, i64, Wavevector)> = (0..self.len())
            .map(|p| {
                let ij = self.split(p);
                let m0 = self.signed_index(0, ij[0]);
                let m1 = if self.dim() == 2 { self.signed_index(1, ij[1]) } else { 0 };
                (m0, m1, self.spectral_wavevector(p))
            })
            .filter(|(_, _, k)| k.modulus() <= kappa_max * (1.0 + 1e-12))
            .collect();
        ks.sort_by_key(|&(a, b, _)| (a, b));
        ks.into_iter().map(|(_, _, k)| k).collect()
    }

    /// `Σ_j exp(i k·x_j) g_j · cell_volume`, the box quadrature of a Fourier integral.
    ///
    /// `k` must be on the dual lattice; the integrand is supplied per node.
    pub fn fourier_sum<F>(&self, k: Wavevector, integrand: F) -> Result<Complex64>
    where
        F: Fn(usize) -> Complex64,
    {
        self.lattice_index(k)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.len() {
            acc += Complex64::cis(k.dot(self.node(j))) * integrand(j);
        }
        Ok(acc * self.cell_volume())
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let mut scratch = Vec::new();
        for (a, axis) in self.axes.iter().enumerate() {
            let plan = if forward { &axis.forward } else { &axis.inverse };
            let stride = self.stride(a);
            let n = axis.n;
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    plan.process(chunk);
                }
            } else {
                let outer = data.len() / (n * stride);
                scratch.resize(n, Complex64::new(0.0, 0.0));
                for o in 0..outer {
                    for s in 0..stride {
                        let base = o * n * stride + s;
                        for i in 0..n {
                            scratch[i] = data[base + i * stride];
                        }
                        plan.process(&mut scratch);
                        for i in 0..n {
                            data[base + i * stride] = scratch[i];
                        }
                    }
                }
            }
        }
    }
}

/// Scalar sample types a [`Field`] may hold.
pub trait Sample: Copy + Send + Sync + fmt::Debug + 'static {
    const IS_REAL: bool;
    fn to_complex(self) -> Complex64;
    fn from_complex(c: Complex64) -> Self;
}

impl Sample for f64 {
    const IS_REAL: bool = true;
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(c: Complex64) -> Self {
        c.re
    }
}

impl Sample for Complex64 {
    const IS_REAL: bool = false;
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(c: Complex64) -> Self {
        c
    }
}

/// Samples of a function on a [`Grid`], with a lazily cached spectrum.
#[derive(Clone)]
pub struct Field<T: Sample = f64> {
    grid: Arc<Grid>,
    values: Vec<T>,
    spectrum: OnceLock<Vec<Complex64>>,
}

pub type ComplexField = Field<Complex64>;

impl<T: Sample> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("len", &self.values.len())
            .finish()
    }
}

impl<T: Sample> Field<T> {
    pub fn new(grid: &Arc<Grid>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Field { grid: grid.clone(), values, spectrum: OnceLock::new() })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 2]) -> T) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.node(j))).collect();
        Field { grid: grid.clone(), values, spectrum: OnceLock::new() }
    }

    /// Builds a field from a full spectrum (same convention as [`Field::spectrum`]).
    pub fn from_spectrum(grid: &Arc<Grid>, mut spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: spectrum.len() });
        }
        let cached = spectrum.clone();
        grid.transform(&mut spectrum, false);
        let scale = 1.0 / grid.len() as f64;
        let values = spectrum.into_iter().map(|c| T::from_complex(c * scale)).collect();
        let spectrum = if T::IS_REAL { OnceLock::new() } else { OnceLock::from(cached) };
        Ok(Field { grid: grid.clone(), values, spectrum })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Mutable access to the samples; drops the cached spectrum.
    pub fn values_mut(&mut self) -> &mut [T] {
        self.spectrum.take();
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let mut data: Vec<Complex64> = self.values.iter().map(|v| v.to_complex()).collect();
            self.grid.transform(&mut data, true);
            data
        })
    }

    /// Derivative of order `order` along `axis`: multiplication by `(i k)^order`.
    ///
    /// Odd orders drop the Nyquist mode so that real input stays real.
    pub fn derivative(&self, axis: usize, order: u32) -> Self {
        assert!(axis < self.grid.dim(), "axis {axis} out of range");
        if order == 0 {
            return self.clone();
        }
        let spec = self.spectrum();
        let out: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(p, &c)| {
                if order % 2 == 1 && self.grid.is_nyquist(axis, p) {
                    return Complex64::new(0.0, 0.0);
                }
                let k = self.grid.spectral_wavevector(p).0[axis];
                c * Complex64::new(0.0, k).powu(order)
            })
            .collect();
        Self::from_spectrum(&self.grid, out).expect("spectrum length matches grid")
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map<U: Sample, V: Sample>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Field<V> {
        assert!(*self.grid == *other.grid, "fields live on different grids");
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Box quadrature `Σ f_j Δx`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().map(|v| v.to_complex()).sum::<Complex64>() * self.grid.cell_volume()
    }

    /// Box quadrature of `∫ exp(i k·x) f(x) dx` for a lattice wavevector `k`.
    pub fn fourier_integral(&self, k: Wavevector) -> Result<Complex64> {
        self.grid.fourier_sum(k, |j| self.values[j].to_complex())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.to_complex().norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.to_complex().norm()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.to_complex().norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// Sobolev norm `(∫ (1+κ²)^s |f̂|² dk / (2π)^dim)^{1/2}` evaluated on the lattice.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let spec = self.spectrum();
        let sum: f64 = spec
            .iter()
            .enumerate()
            .map(|(p, c)| {
                let k2 = self.grid.spectral_wavevector(p).modulus().powi(2);
                (1.0 + k2).powf(s) * c.norm_sqr()
            })
            .sum();
        (sum * self.grid.cell_volume() / self.grid.len() as f64).sqrt()
    }
}

impl Field<f64> {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        Field { grid: grid.clone(), values: vec![value; grid.len()], spectrum: OnceLock::new() }
    }

    /// `∇f`, one component per horizontal axis.
    pub fn gradient(&self) -> Vec<Field> {
        (0..self.grid.dim()).map(|a| self.derivative(a, 1)).collect()
    }

    pub fn laplacian(&self) -> Field {
        let mut out = self.derivative(0, 2);
        for a in 1..self.grid.dim() {
            let d = self.derivative(a, 2);
            for (o, v) in out.values_mut().iter_mut().zip(d.values()) {
                *o += v;
            }
        }
        out
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Translates a periodic field by `shift` along `axis` (exact for band-limited data).
    pub fn translate(&self, axis: usize, shift: f64) -> Field {
        let out: Vec<Complex64> = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(p, &c)| {
                if self.grid.is_nyquist(axis, p) {
                    let k = self.grid.spectral_wavevector(p).0[axis];
                    return c * (k * shift).cos();
                }
                let k = self.grid.spectral_wavevector(p).0[axis];
                c * Complex64::cis(-k * shift)
            })
            .collect();
        Field::from_spectrum(&self.grid, out).expect("spectrum length matches grid")
    }
}

/// Divergence of a horizontal vector field given by its components.
pub fn divergence(components: &[Field]) -> Field {
    let mut out = components[0].derivative(0, 1);
    for (a, c) in components.iter().enumerate().skip(1) {
        let d = c.derivative(a, 1);
        for (o, v) in out.values_mut().iter_mut().zip(d.values()) {
            *o += v;
        }
    }
    out
}

/// A one-dimensional function `slope·x + P(x)` with `P` periodic.
///
/// Used for antiderivatives of decaying profiles with nonzero mass, whose
/// primitive is not periodic.
#[derive(Clone, Debug)]
pub struct Primitive {
    pub slope: f64,
    pub periodic: Field,
}

impl Primitive {
    /// Spectral antiderivative of `w` in the zero-mean gauge.
    pub fn of(w: &Field) -> Primitive {
        let grid = w.grid().clone();
        assert_eq!(grid.dim(), 1, "primitives are one-dimensional");
        let spec = w.spectrum();
        let slope = spec[0].re / grid.len() as f64;
        let out: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(p, &c)| {
                if p == 0 || grid.is_nyquist(0, p) {
                    return Complex64::new(0.0, 0.0);
                }
                let k = grid.spectral_wavevector(p).0[0];
                c / Complex64::new(0.0, k)
            })
            .collect();
        let periodic = Field::from_spectrum(&grid, out).expect("spectrum length matches grid");
        Primitive { slope, periodic }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.periodic.grid()
    }

    /// Adds a constant (a gauge change).
    pub fn shifted(&self, constant: f64) -> Primitive {
        Primitive { slope: self.slope, periodic: self.periodic.map(|v| v + constant) }
    }

    pub fn values(&self) -> Vec<f64> {
        let grid = self.grid();
        self.periodic
            .values()
            .iter()
            .enumerate()
            .map(|(j, p)| self.slope * grid.node(j)[0] + p)
            .collect()
    }

    /// Derivative of order `order ≥ 1`, which is periodic.
    pub fn derivative(&self, order: u32) -> Field {
        assert!(order >= 1);
        let d = self.periodic.derivative(0, order);
        if order == 1 {
            d.map(|v| v + self.slope)
        } else {
            d
        }
    }
}
