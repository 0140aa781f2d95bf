//! The doubled Chebyshev-Chebyshev-Fourier grid.
//!
//! The radius is signed, `r ∈ [-1, 1]`, so every physical point of the
//! cylinder appears twice: as `(r, z, θ)` and as `(-r, z, θ + π)`. Grid
//! values are stored with the radial index fastest, then vertical, then
//! angular, which makes every Fourier slice a contiguous column-major
//! `m × n` block.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transform::{clenshaw, CoeffTensor};
use crate::ultraop::chebyshev_derivative;

/// Sizes of the doubled grid: `m` radial, `n` vertical, `p` angular points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    m: usize,
    n: usize,
    p: usize,
}

impl GridSpec {
    pub fn new(m: usize, n: usize, p: usize) -> Result<Self> {
        if m < 4 || n < 4 {
            return Err(Error::InvalidGrid(format!(
                "need m >= 4 and n >= 4, got m = {m}, n = {n}"
            )));
        }
        if p < 2 || !p.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "p must be even and at least 2, got p = {p}"
            )));
        }
        Ok(Self { m, n, p })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Total number of grid points `m·n·p`.
    pub fn len(&self) -> usize {
        self.m * self.n * self.p
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points per Fourier slice, `m·n`.
    pub fn slice_len(&self) -> usize {
        self.m * self.n
    }

    /// Flat index of `(j, k, ℓ)`.
    #[inline]
    pub fn index(&self, j: usize, k: usize, l: usize) -> usize {
        (l * self.n + k) * self.m + j
    }

    /// Fourier wavenumber carried by slice `ℓ`.
    #[inline]
    pub fn wavenumber(&self, l: usize) -> i64 {
        l as i64 - (self.p / 2) as i64
    }

    /// Slice index holding wavenumber `q`, if it is on the grid.
    pub fn slice_of(&self, q: i64) -> Option<usize> {
        let l = q + (self.p / 2) as i64;
        (0..self.p as i64).contains(&l).then_some(l as usize)
    }

    pub fn radial_points(&self) -> Vec<f64> {
        chebyshev_points(self.m)
    }

    pub fn vertical_points(&self) -> Vec<f64> {
        chebyshev_points(self.n)
    }

    pub fn angular_points(&self) -> Vec<f64> {
        let p = self.p as f64;
        (0..self.p)
            .map(|l| (2.0 * l as f64 - p) * PI / p)
            .collect()
    }
}

/// Chebyshev extreme points `cos((m-1-j)π/(m-1))`, increasing from -1 to 1.
pub fn chebyshev_points(m: usize) -> Vec<f64> {
    match m {
        0 => vec![],
        1 => vec![0.0],
        _ => {
            let last = (m - 1) as f64;
            (0..m)
                .map(|j| {
                    // sin form keeps the points exactly antisymmetric
                    let t = (2.0 * j as f64 - last) * PI / (2.0 * last);
                    t.sin()
                })
                .collect()
        }
    }
}

/// All grid points `(r, z, θ)` in storage order.
pub fn grid_points(spec: &GridSpec) -> Vec<(f64, f64, f64)> {
    let rs = spec.radial_points();
    let zs = spec.vertical_points();
    let ts = spec.angular_points();
    let mut out = Vec::with_capacity(spec.len());
    for &t in &ts {
        for &z in &zs {
            for &r in &rs {
                out.push((r, z, t));
            }
        }
    }
    out
}

/// Real point values on the doubled grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    /// Samples `f(r, z, θ)` at every grid point.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(f64, f64, f64) -> f64) -> Self {
        let values = grid_points(&spec)
            .into_iter()
            .map(|(r, z, t)| f(r, z, t))
            .collect();
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, j: usize, k: usize, l: usize) -> f64 {
        self.values[self.spec.index(j, k, l)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Checks the doubled-point identification `f(j,k,ℓ) = f(m-1-j, k, ℓ+p/2)`.
pub fn check_physical_consistency(field: &GridField, tol: f64) -> bool {
    let s = field.spec;
    let half = s.p / 2;
    for l in 0..s.p {
        let lp = (l + half) % s.p;
        for k in 0..s.n {
            for j in 0..s.m {
                let a = field.get(j, k, l);
                let b = field.get(s.m - 1 - j, k, lp);
                if !((a - b).abs() <= tol) {
                    return false;
                }
            }
        }
    }
    true
}

/// Zeroes every coefficient whose radial degree and wavenumber have
/// opposite parity, i.e. those with `j + (ℓ - ⌊p/2⌋)` odd.
pub fn parity_project(coeffs: &CoeffTensor) -> CoeffTensor {
    let mut out = coeffs.clone();
    parity_project_in_place(&mut out, 0);
    out
}

/// Keeps coefficients with `j + q ≡ shift (mod 2)`. Scalars use `shift = 0`;
/// radial and azimuthal vector components flip sign under the doubling and
/// use `shift = 1`.
pub(crate) fn parity_project_in_place(coeffs: &mut CoeffTensor, shift: usize) {
    let s = *coeffs.spec();
    for l in 0..s.p() {
        let q = s.wavenumber(l).rem_euclid(2) as usize;
        let slice = coeffs.slice_mut(l);
        for k in 0..s.n() {
            for j in 0..s.m() {
                if (j + q + shift) % 2 == 1 {
                    slice[k * s.m() + j] = Default::default();
                }
            }
        }
    }
}

/// Projects coefficients onto fields that are smooth across the axis.
///
/// A smooth scalar has Fourier modes `u_q(r) = r^|q|·g(r²)` near `r = 0`, so
/// `u_q^(k)(0) = 0` for every `k < |q|`. Parity handles half of these; the
/// rest are imposed by the smallest coefficient change that also keeps the
/// wall value `u_q(1)`. Solvers that enforce the axis only weakly leave an
/// irregular remainder at the size of their truncation error, which any
/// later division by `r` on the grid would amplify.
#[derive(Debug, Clone)]
pub struct AxisRegularizer {
    m: usize,
    /// Per `|q|`: admissible radial indices and the projector acting on them.
    projectors: Vec<Option<(Vec<usize>, DMatrix<f64>)>>,
}

impl AxisRegularizer {
    pub fn new(spec: GridSpec) -> Self {
        let m = spec.m();
        // rows[k][j] = T_j^(k)(0)
        let qmax = spec.p() / 2;
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(qmax.max(1));
        let mut basis: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let mut e = vec![0.0; m];
                e[j] = 1.0;
                e
            })
            .collect();
        let mut scratch = vec![0.0; m];
        for _ in 0..qmax.max(1) {
            rows.push(basis.iter().map(|c| clenshaw(c, 0.0)).collect());
            for c in basis.iter_mut() {
                chebyshev_derivative(c, &mut scratch);
                c.copy_from_slice(&scratch);
            }
        }
        let projectors = (0..=qmax)
            .map(|q| {
                let orders: Vec<usize> = (q % 2..q).step_by(2).collect();
                if orders.is_empty() {
                    return None;
                }
                let idx: Vec<usize> = (q % 2..m).step_by(2).collect();
                let nc = orders.len() + 1;
                let mut g = DMatrix::<f64>::zeros(nc, idx.len());
                for (i, &k) in orders.iter().enumerate() {
                    for (c, &j) in idx.iter().enumerate() {
                        g[(i, c)] = rows[k][j];
                    }
                }
                // T_j(1) = 1
                g.row_mut(nc - 1).fill(1.0);
                for mut row in g.row_iter_mut() {
                    let norm = row.norm();
                    if norm > 0.0 {
                        row /= norm;
                    }
                }
                let mut reg = g.clone();
                reg.row_mut(nc - 1).fill(0.0);
                let ggt = &g * g.transpose();
                let pinv = ggt.pseudo_inverse(1e-13).expect("non-negative tolerance");
                let proj = DMatrix::identity(idx.len(), idx.len()) - g.transpose() * pinv * reg;
                Some((idx, proj))
            })
            .collect();
        Self { m, projectors }
    }

    /// Regularizes one `m × n` slice of wavenumber `q` in place.
    pub fn apply_slice(&self, q: i64, slice: &mut [Complex64]) {
        let Some(Some((idx, proj))) = self.projectors.get(q.unsigned_abs() as usize) else {
            return;
        };
        let mut col = vec![Complex64::default(); idx.len()];
        for pencil in slice.chunks_exact_mut(self.m) {
            for (c, &j) in col.iter_mut().zip(idx) {
                *c = pencil[j];
            }
            for (r, &j) in idx.iter().enumerate() {
                pencil[j] = col
                    .iter()
                    .enumerate()
                    .fold(Complex64::default(), |acc, (c, v)| acc + v * proj[(r, c)]);
            }
        }
    }

    pub fn apply(&self, coeffs: &mut CoeffTensor) {
        let spec = *coeffs.spec();
        for l in 0..spec.p() {
            self.apply_slice(spec.wavenumber(l), coeffs.slice_mut(l));
        }
    }
}
