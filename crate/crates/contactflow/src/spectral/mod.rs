//! Uniform periodic grids and Fourier pseudo-spectral scalar fields.
//!
//! Everything downstream (contact operators, time steppers, particle
//! tracking, diagnostics) is built on the types here. Differentiation,
//! Helmholtz inversion `(1 - Δ)^{-1}` and trigonometric interpolation are
//! exact for band-limited data; quadratic nonlinearities are stabilized by
//! 2/3-rule dealiasing (see [`ScalarField::dealias`]).
//!
//! Conventions:
//! - values are stored row-major, last axis contiguous;
//! - axis `a` has size `n_a` (a power of two, at least 8) and period `L_a`;
//! - integer frequencies run over `-n/2+1 ..= n/2`; odd spectral derivatives
//!   zero the Nyquist mode so a real field stays real.

mod fft;
pub mod snapshot;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Uniform periodic grid: axis sizes plus physical period per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dims: Vec<usize>,
    lengths: Vec<f64>,
}

impl Grid {
    /// Grid with explicit periods. Axis sizes must be powers of two >= 8;
    /// periods must be positive and finite.
    pub fn new(dims: &[usize], lengths: &[f64]) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "grid must have 1 to 3 axes, got {}",
                dims.len()
            )));
        }
        if dims.len() != lengths.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: lengths.len(),
            });
        }
        for &n in dims {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidArgument(format!(
                    "axis size {n} must be a power of two >= 8"
                )));
            }
        }
        for &l in lengths {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "axis period {l} must be positive"
                )));
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            lengths: lengths.to_vec(),
        })
    }

    /// Grid with period 2π on every axis.
    pub fn uniform(dims: &[usize]) -> Result<Self> {
        let lengths = vec![TAU; dims.len()];
        Self::new(dims, &lengths)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn size(&self, axis: usize) -> usize {
        self.dims[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.dims[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.ndim())
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Total number of grid points.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Physical volume of the periodic box.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Volume of one grid cell (quadrature weight of the rectangle rule).
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.total() as f64
    }

    /// Node coordinates along one axis: `j * L / n`.
    pub fn coords(&self, axis: usize) -> Vec<f64> {
        let n = self.dims[axis];
        let h = self.spacing(axis);
        (0..n).map(|j| j as f64 * h).collect()
    }

    /// Integer frequency of spectral bin `j` (Nyquist mapped to `+n/2`).
    pub fn freq(n: usize, j: usize) -> i64 {
        if j <= n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Physical wavenumbers `2π f / L` per spectral bin along one axis.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.dims[axis];
        let scale = TAU / self.lengths[axis];
        (0..n).map(|j| scale * Self::freq(n, j) as f64).collect()
    }

    /// Wrap a coordinate into `[0, L)` along one axis.
    pub fn wrap(&self, axis: usize, x: f64) -> f64 {
        let l = self.lengths[axis];
        let mut y = x % l;
        if y < 0.0 {
            y += l;
        }
        // `x % l` can return `l` exactly for tiny negative x.
        if y >= l {
            y -= l;
        }
        y
    }

    fn same_as(&self, other: &Grid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {:?}/{:?} vs {:?}/{:?}",
                self.dims, self.lengths, other.dims, other.lengths
            )));
        }
        Ok(())
    }
}

/// Sup, L² and H¹ norms of a scalar field. `h1` is the square root of
/// `∫ f (f - Δf) dμ`, the geodesic energy norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l_inf: f64,
    pub l2: f64,
    pub h1: f64,
}

/// Real scalar field sampled on a [`Grid`].
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.total()],
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.total()],
        }
    }

    /// Sample a function of the node coordinates.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let coords: Vec<Vec<f64>> = (0..grid.ndim()).map(|a| grid.coords(a)).collect();
        let mut values = Vec::with_capacity(grid.total());
        let mut idx = vec![0usize; grid.ndim()];
        let mut point = vec![0.0f64; grid.ndim()];
        for _ in 0..grid.total() {
            for a in 0..grid.ndim() {
                point[a] = coords[a][idx[a]];
            }
            values.push(f(&point));
            for a in (0..grid.ndim()).rev() {
                idx[a] += 1;
                if idx[a] < grid.dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Wrap an existing value buffer; the shape must match and all entries
    /// must be finite.
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.total() {
            return Err(Error::DimensionMismatch {
                expected: grid.total(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "ScalarField::from_values".into(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Deterministic band-limited random trig polynomial: independent
    /// coefficients on all modes with `|k_a| <= max_mode`, rescaled so the
    /// sup norm equals `amplitude`. Uses a built-in splitmix64 stream so the
    /// result is reproducible across platforms.
    pub fn random_trig(grid: &Grid, max_mode: usize, amplitude: f64, seed: u64) -> Self {
        let mut state = seed;
        let mut next = move || -> f64 {
            // splitmix64
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };

        let mut spec = Spectrum::zeros(grid);
        let m = max_mode as i64;
        let ndim = grid.ndim();
        let mut k = vec![-m; ndim];
        loop {
            // Fill each Hermitian pair once: take the representative whose
            // first nonzero component is positive.
            let lead = k.iter().find(|&&c| c != 0).copied().unwrap_or(0);
            if lead > 0 {
                let re = next();
                let im = next();
                spec.add_mode_pair(&k, Complex64::new(re, im));
            } else if lead == 0 {
                // k = 0: real mean component
                spec.add_mode_pair(&k, Complex64::new(next(), 0.0));
            }
            let mut done = true;
            for a in (0..ndim).rev() {
                k[a] += 1;
                if k[a] <= m {
                    done = false;
                    break;
                }
                k[a] = -m;
            }
            if done {
                break;
            }
        }
        let field = spec.into_field();
        let linf = field.linf();
        if linf > 0.0 {
            field.scaled(amplitude / linf)
        } else {
            field
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Forward transform to spectral coefficients (unnormalized DFT).
    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft::forward(&mut coeffs, &self.grid.dims);
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Exact spectral derivative along `axis`. The Nyquist mode is zeroed so
    /// the output is real; the output mean is zero.
    pub fn partial_derivative(&self, axis: usize) -> Result<ScalarField> {
        if axis >= self.grid.ndim() {
            return Err(Error::AxisOutOfRange {
                axis,
                ndim: self.grid.ndim(),
            });
        }
        let mut spec = self.spectrum();
        spec.scale_along_axis(axis, |n, j| {
            if j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                let k = TAU / self.grid.lengths[axis] * Grid::freq(n, j) as f64;
                Complex64::new(0.0, k)
            }
        });
        Ok(spec.into_field())
    }

    /// Apply a real isotropic Fourier multiplier `g(|k|²)`.
    pub fn apply_isotropic(&self, g: impl Fn(f64) -> f64) -> ScalarField {
        let mut spec = self.spectrum();
        spec.scale_isotropic(g);
        spec.into_field()
    }

    /// Invert the Helmholtz operator: returns `h` with `h - Δh = self`.
    pub fn helmholtz_inverse(&self) -> ScalarField {
        self.apply_isotropic(|k2| 1.0 / (1.0 + k2))
    }

    /// Apply `1 - Δ` spectrally.
    pub fn one_minus_laplacian(&self) -> ScalarField {
        self.apply_isotropic(|k2| 1.0 + k2)
    }

    /// Solve `(Δ - α²) u = self`. For `α = 0` the right-hand side mean is
    /// projected out and the solution gauge is mean zero.
    pub fn solve_shifted_laplacian(&self, alpha2: f64) -> ScalarField {
        self.apply_isotropic(|k2| {
            let denom = -(k2 + alpha2);
            if denom == 0.0 {
                0.0
            } else {
                1.0 / denom
            }
        })
    }

    /// 2/3-rule truncation: zero every mode with an axis frequency above
    /// `⌊n/3⌋`. Idempotent.
    pub fn dealias(&self) -> ScalarField {
        let mut spec = self.spectrum();
        spec.dealias();
        spec.into_field()
    }

    /// Trigonometric interpolation at arbitrary positions (flat buffer of
    /// `ndim`-tuples). Positions are wrapped periodically; exact for
    /// band-limited fields.
    pub fn interpolate(&self, points: &[f64]) -> Result<Vec<f64>> {
        self.spectrum().evaluate(points)
    }

    /// Sup, L² and H¹ norms.
    pub fn norms(&self) -> Norms {
        let l_inf = self.linf();
        let l2 = (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt();
        // h1² = V/N² Σ (1+|k|²)|ĉ|²  (Parseval on the rectangle rule)
        let spec = self.spectrum();
        let mut acc = 0.0;
        spec.for_each_k2(|k2, c| acc += (1.0 + k2) * c.norm_sqr());
        let n = self.grid.total() as f64;
        let h1 = (acc * self.grid.volume() / (n * n)).max(0.0).sqrt();
        Norms { l_inf, l2, h1 }
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Rectangle-rule integral over the box (spectrally accurate for smooth
    /// periodic integrands).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn scaled(&self, a: f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.grid.same_as(&other.grid, "add")?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.grid.same_as(&other.grid, "sub")?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Pointwise product on the grid (callers dealias as needed).
    pub fn product(&self, other: &ScalarField) -> Result<ScalarField> {
        self.grid.same_as(&other.grid, "product")?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// In-place `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &ScalarField) -> Result<()> {
        self.grid.same_as(&x.grid, "axpy")?;
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
        Ok(())
    }
}

/// One scalar component per spatial axis, all on the same grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "vector field needs components".into(),
            ));
        }
        let grid = components[0].grid().clone();
        for c in &components[1..] {
            grid.same_as(c.grid(), "vector components")?;
        }
        Ok(Self { components })
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn ndim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    /// Largest component magnitude over the grid (used for CFL estimates).
    pub fn linf(&self) -> f64 {
        self.components.iter().map(|c| c.linf()).fold(0.0, f64::max)
    }
}

/// Unnormalized DFT coefficients of a real field.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.total()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn flat_index_of(&self, k: &[i64]) -> usize {
        let mut flat = 0usize;
        for (a, &ka) in k.iter().enumerate() {
            let n = self.grid.dims[a] as i64;
            let j = ka.rem_euclid(n) as usize;
            flat = flat * self.grid.dims[a] + j;
        }
        flat
    }

    /// Add `c` at integer frequency `k` and its conjugate at `-k`, keeping
    /// the field real. The coefficient is scaled so a unit `c` contributes
    /// `2 Re[c e^{i k·x}]` of order one to the field.
    pub fn add_mode_pair(&mut self, k: &[i64], c: Complex64) {
        let n = self.grid.total() as f64;
        let idx = self.flat_index_of(k);
        let neg: Vec<i64> = k.iter().map(|&v| -v).collect();
        let jdx = self.flat_index_of(&neg);
        if idx == jdx {
            self.coeffs[idx] += Complex64::new(c.re, 0.0) * n;
        } else {
            self.coeffs[idx] += c * n;
            self.coeffs[jdx] += c.conj() * n;
        }
    }

    /// Inverse transform, enforcing realness by dropping the imaginary part.
    pub fn into_field(mut self) -> ScalarField {
        fft::inverse(&mut self.coeffs, &self.grid.dims);
        ScalarField {
            grid: self.grid,
            values: self.coeffs.iter().map(|c| c.re).collect(),
        }
    }

    /// Multiply each coefficient by a per-axis factor `f(n, j)`.
    fn scale_along_axis(&mut self, axis: usize, f: impl Fn(usize, usize) -> Complex64) {
        let n = self.grid.dims[axis];
        let factors: Vec<Complex64> = (0..n).map(|j| f(n, j)).collect();
        let inner: usize = self.grid.dims[axis + 1..].iter().product();
        for (flat, c) in self.coeffs.iter_mut().enumerate() {
            let j = (flat / inner) % n;
            *c *= factors[j];
        }
    }

    /// Multiply coefficients by a real isotropic symbol `g(|k|²)`.
    pub fn scale_isotropic(&mut self, g: impl Fn(f64) -> f64) {
        let tables: Vec<Vec<f64>> = (0..self.grid.ndim())
            .map(|a| self.grid.wavenumbers(a).iter().map(|k| k * k).collect())
            .collect();
        self.visit_modes_mut(|idx, c| {
            let k2: f64 = idx.iter().zip(&tables).map(|(&j, t)| t[j]).sum();
            *c *= g(k2);
        });
    }

    /// Zero every mode with any axis frequency above `⌊n/3⌋`.
    pub fn dealias(&mut self) {
        let keep: Vec<Vec<bool>> = self
            .grid
            .dims
            .iter()
            .map(|&n| {
                let cut = (n / 3) as i64;
                (0..n).map(|j| Grid::freq(n, j).abs() <= cut).collect()
            })
            .collect();
        self.visit_modes_mut(|idx, c| {
            if !idx.iter().zip(&keep).all(|(&j, k)| k[j]) {
                *c = Complex64::default();
            }
        });
    }

    fn visit_modes_mut(&mut self, mut f: impl FnMut(&[usize], &mut Complex64)) {
        let dims = self.grid.dims.clone();
        let ndim = dims.len();
        let mut idx = vec![0usize; ndim];
        for c in self.coeffs.iter_mut() {
            f(&idx, c);
            for a in (0..ndim).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    fn for_each_k2(&self, mut f: impl FnMut(f64, Complex64)) {
        let tables: Vec<Vec<f64>> = (0..self.grid.ndim())
            .map(|a| self.grid.wavenumbers(a).iter().map(|k| k * k).collect())
            .collect();
        let dims = self.grid.dims.clone();
        let ndim = dims.len();
        let mut idx = vec![0usize; ndim];
        for &c in self.coeffs.iter() {
            let k2: f64 = idx.iter().zip(&tables).map(|(&j, t)| t[j]).sum();
            f(k2, c);
            for a in (0..ndim).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    /// Trigonometric evaluation at arbitrary points (flat `ndim`-tuples).
    pub fn evaluate(&self, points: &[f64]) -> Result<Vec<f64>> {
        let (vals, _) = self.evaluate_impl(points, false)?;
        Ok(vals)
    }

    /// Evaluate the field and its gradient at arbitrary points. Gradients are
    /// returned flat, `ndim` entries per point, and use the same Nyquist-free
    /// derivative convention as [`ScalarField::partial_derivative`].
    pub fn evaluate_with_gradient(&self, points: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (vals, grads) = self.evaluate_impl(points, true)?;
        Ok((vals, grads))
    }

    fn evaluate_impl(&self, points: &[f64], want_grad: bool) -> Result<(Vec<f64>, Vec<f64>)> {
        let ndim = self.grid.ndim();
        if points.len() % ndim != 0 {
            return Err(Error::DimensionMismatch {
                expected: ndim,
                got: points.len() % ndim,
            });
        }
        let npts = points.len() / ndim;

        // Pad leading axes to work with a single 3-D kernel: a row-major
        // [n0, n1, n2] buffer with size-1 leading axes is bit-identical.
        let pad = 3 - ndim;
        let mut dims = [1usize; 3];
        let mut lens = [1.0f64; 3];
        for a in 0..ndim {
            dims[pad + a] = self.grid.dims[a];
            lens[pad + a] = self.grid.lengths[a];
        }

        // Active (exactly nonzero) index set per axis: dealiased spectra have
        // hard zeros outside the retained band, which keeps particle
        // interpolation cheap without any approximation.
        let mut active = [vec![], vec![], vec![]];
        for ax in 0..3 {
            let mut hit = vec![false; dims[ax]];
            let inner: usize = dims[ax + 1..].iter().product();
            for (flat, c) in self.coeffs.iter().enumerate() {
                if c.re != 0.0 || c.im != 0.0 {
                    hit[(flat / inner) % dims[ax]] = true;
                }
            }
            active[ax] = hit
                .iter()
                .enumerate()
                .filter_map(|(j, &h)| h.then_some(j))
                .collect::<Vec<_>>();
        }

        let norm = 1.0 / self.grid.total() as f64;
        let mut vals = vec![0.0f64; npts];
        let mut grads = vec![0.0f64; if want_grad { npts * ndim } else { 0 }];

        // Per-axis phase and derivative factors at one point.
        let mut phase = [vec![], vec![], vec![]];
        let mut dfac = [vec![], vec![], vec![]];
        for p in 0..npts {
            for ax in 0..3 {
                let n = dims[ax];
                let x = if ax >= pad {
                    points[p * ndim + (ax - pad)]
                } else {
                    0.0
                };
                phase[ax].clear();
                dfac[ax].clear();
                for &j in &active[ax] {
                    let fr = Grid::freq(n, j);
                    let k = TAU / lens[ax] * fr as f64;
                    phase[ax].push(Complex64::from_polar(1.0, k * x));
                    dfac[ax].push(if j == n / 2 && n > 1 {
                        Complex64::default()
                    } else {
                        Complex64::new(0.0, k)
                    });
                }
            }

            let stride1 = dims[2];
            let stride0 = dims[1] * dims[2];
            let mut v = Complex64::default();
            let mut g = [Complex64::default(); 3];
            for (i0, &j0) in active[0].iter().enumerate() {
                let p0 = phase[0][i0];
                let mut t00 = Complex64::default(); // Σ c φ1 φ2
                let mut t01 = Complex64::default(); // Σ c φ1 (ik2) φ2
                let mut t10 = Complex64::default(); // Σ c (ik1) φ1 φ2
                for (i1, &j1) in active[1].iter().enumerate() {
                    let p1 = phase[1][i1];
                    let base = j0 * stride0 + j1 * stride1;
                    let mut s0 = Complex64::default();
                    let mut s1 = Complex64::default();
                    if want_grad {
                        for (i2, &j2) in active[2].iter().enumerate() {
                            let cp = self.coeffs[base + j2] * phase[2][i2];
                            s0 += cp;
                            s1 += cp * dfac[2][i2];
                        }
                    } else {
                        for (i2, &j2) in active[2].iter().enumerate() {
                            s0 += self.coeffs[base + j2] * phase[2][i2];
                        }
                    }
                    t00 += s0 * p1;
                    if want_grad {
                        t01 += s1 * p1;
                        t10 += s0 * dfac[1][i1] * p1;
                    }
                }
                v += t00 * p0;
                if want_grad {
                    g[0] += t00 * dfac[0][i0] * p0;
                    g[1] += t10 * p0;
                    g[2] += t01 * p0;
                }
            }
            vals[p] = v.re * norm;
            if want_grad {
                for a in 0..ndim {
                    grads[p * ndim + a] = g[pad + a].re * norm;
                }
            }
        }
        Ok((vals, grads))
    }
}
