//! Reference heat solvers for benchmarking: second-order finite differences
//! and dense Chebyshev collocation.
//!
//! Both split the angle with a DFT and solve one 2-D problem per Fourier
//! mode. The finite-difference grid uses radial nodes `(i + ½)Δr`, so the
//! axis is a cell face rather than a node, and takes backward Euler steps.
//! The collocation solver works on the same doubled grid as the spectral
//! solver and follows the same BDF schedule, so the two differ only in the
//! spatial discretization.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, LU};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use crate::timestep::{BdfScheme, ForcingMode, HeatConfig};

/// Largest `m·n·p` accepted by [`collocation_heat_run`].
pub const COLLOCATION_LIMIT: usize = 32 * 32 * 32;

/// Equispaced cylinder grid: `m` radial nodes at `(i + ½)Δr` with the wall
/// one step beyond the last, `n` vertical nodes including both walls, `p`
/// angles from `−π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FdGrid {
    m: usize,
    n: usize,
    p: usize,
}

impl FdGrid {
    pub fn new(m: usize, n: usize, p: usize) -> Result<Self> {
        if m < 2 || n < 3 || p < 1 {
            return Err(Error::InvalidGrid(format!(
                "finite-difference grid needs m >= 2, n >= 3, p >= 1 (got {m}, {n}, {p})"
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

    pub fn len(&self) -> usize {
        self.m * self.n * self.p
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dr(&self) -> f64 {
        1.0 / (self.m as f64 + 0.5)
    }

    pub fn dz(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.p as f64
    }

    pub fn radial_points(&self) -> Vec<f64> {
        (0..self.m).map(|i| (i as f64 + 0.5) * self.dr()).collect()
    }

    pub fn vertical_points(&self) -> Vec<f64> {
        (0..self.n).map(|k| -1.0 + k as f64 * self.dz()).collect()
    }

    pub fn angular_points(&self) -> Vec<f64> {
        (0..self.p).map(|l| -PI + l as f64 * self.dtheta()).collect()
    }

    #[inline]
    pub fn index(&self, i: usize, k: usize, l: usize) -> usize {
        (l * self.n + k) * self.m + i
    }
}

/// Node values on an [`FdGrid`], radial index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FdField {
    grid: FdGrid,
    values: Vec<f64>,
}

impl FdField {
    pub fn zeros(grid: FdGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: FdGrid, mut f: impl FnMut(f64, f64, f64) -> f64) -> Self {
        let (r, z, t) = (grid.radial_points(), grid.vertical_points(), grid.angular_points());
        let mut values = Vec::with_capacity(grid.len());
        for &th in &t {
            for &zz in &z {
                for &rr in &r {
                    values.push(f(rr, zz, th));
                }
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &FdGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn max_diff(&self, other: &FdField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}

/// Angular DFT of every line of a field stored with the angle slowest.
struct AngularFft {
    p: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AngularFft {
    fn new(p: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            p,
            forward: planner.plan_fft_forward(p),
            inverse: planner.plan_fft_inverse(p),
        }
    }

    /// Real values to per-bin complex slices, normalized.
    fn forward(&self, values: &[f64], len: usize) -> Vec<Complex64> {
        let p = self.p;
        let mut out = vec![Complex64::default(); len * p];
        let mut buf = vec![Complex64::default(); p];
        for i in 0..len {
            for l in 0..p {
                buf[l] = Complex64::new(values[l * len + i], 0.0);
            }
            self.forward.process(&mut buf);
            for b in 0..p {
                out[b * len + i] = buf[b] / p as f64;
            }
        }
        out
    }

    fn inverse(&self, modes: &[Complex64], len: usize) -> Vec<f64> {
        let p = self.p;
        let mut out = vec![0.0; len * p];
        let mut buf = vec![Complex64::default(); p];
        for i in 0..len {
            for b in 0..p {
                buf[b] = modes[b * len + i];
            }
            self.inverse.process(&mut buf);
            for l in 0..p {
                out[l * len + i] = buf[l].re;
            }
        }
        out
    }
}

/// Signed wavenumber of DFT bin `b`.
fn bin_wavenumber(b: usize, p: usize) -> i64 {
    if 2 * b <= p {
        b as i64
    } else {
        b as i64 - p as i64
    }
}

/// Second-order `I − hα∇²` on the interior nodes of one angular mode, with
/// the three-point angular eigenvalue `−(4/Δθ²)sin²(qΔθ/2)`.
fn fd_mode_matrix(grid: &FdGrid, q: i64, h_alpha: f64) -> BandedMatrix {
    let (m, n) = (grid.m, grid.n);
    let (dr, dz, dt) = (grid.dr(), grid.dz(), grid.dtheta());
    let r = grid.radial_points();
    let ang = -(4.0 / (dt * dt)) * (0.5 * q as f64 * dt).sin().powi(2);
    let size = m * (n - 2);
    let mut a = BandedMatrix::zeros(size, size, m, m);
    for kk in 0..n - 2 {
        for i in 0..m {
            let row = kk * m + i;
            let inner = i as f64 * dr;
            let outer = (i as f64 + 1.0) * dr;
            let lo = inner / (r[i] * dr * dr);
            let hi = outer / (r[i] * dr * dr);
            let zz = 1.0 / (dz * dz);
            let diag = -(lo + hi) + ang / (r[i] * r[i]) - 2.0 * zz;
            a.set(row, row, 1.0 - h_alpha * diag);
            if i > 0 {
                a.set(row, row - 1, -h_alpha * lo);
            }
            if i + 1 < m {
                a.set(row, row + 1, -h_alpha * hi);
            }
            if kk > 0 {
                a.set(row, row - m, -h_alpha * zz);
            }
            if kk + 3 < n {
                a.set(row, row + m, -h_alpha * zz);
            }
        }
    }
    a
}

/// Backward-Euler heat run on an [`FdGrid`] with `u = 0` on the walls.
///
/// `forcing(r, z, θ, t)` is sampled at the new time level. The banded
/// factorization of each mode is computed once. Returns the state after
/// every step, preceded by the initial state.
pub fn fd_heat_run(
    grid: FdGrid,
    config: &HeatConfig,
    initial: &dyn Fn(f64, f64, f64) -> f64,
    forcing: Option<&dyn Fn(f64, f64, f64, f64) -> f64>,
    steps: usize,
) -> Result<Vec<(f64, FdField)>> {
    if !(config.h > 0.0 && config.h.is_finite()) || !(config.alpha >= 0.0 && config.alpha.is_finite()) {
        return Err(Error::Domain("time step must be positive and diffusivity non-negative".into()));
    }
    let (m, n, p) = (grid.m, grid.n, grid.p);
    let plane = m * n;
    let fft = AngularFft::new(p);
    let lus = (0..p)
        .map(|b| {
            let q = bin_wavenumber(b, p);
            fd_mode_matrix(&grid, q, config.h * config.alpha).lu().map_err(|e| e.in_mode(q))
        })
        .collect::<Result<Vec<BandedLu>>>()?;

    let mut u = FdField::from_fn(grid, initial);
    zero_walls(&mut u);
    let mut out = vec![(0.0, u.clone())];
    let mut modes = fft.forward(&u.values, plane);
    let mut t = 0.0;
    let mut rhs = vec![Complex64::default(); m * (n - 2)];
    for step in 1..=steps {
        t += config.h;
        let g = forcing.map(|f| fft.forward(&FdField::from_fn(grid, |r, z, th| f(r, z, th, t)).values, plane));
        for (b, lu) in lus.iter().enumerate() {
            let slot = &mut modes[b * plane..(b + 1) * plane];
            for kk in 0..n - 2 {
                for i in 0..m {
                    let at = (kk + 1) * m + i;
                    let mut v = slot[at];
                    if let Some(g) = &g {
                        v += g[b * plane + at] * config.h;
                    }
                    rhs[kk * m + i] = v;
                }
            }
            lu.solve_in_place(&mut rhs);
            slot[(n - 2 + 1) * m..].fill(Complex64::default());
            slot[..m].fill(Complex64::default());
            slot[m..(n - 1) * m].copy_from_slice(&rhs);
        }
        let values = fft.inverse(&modes, plane);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup { step });
        }
        out.push((t, FdField { grid, values }));
    }
    Ok(out)
}

fn zero_walls(u: &mut FdField) {
    let g = u.grid;
    for l in 0..g.p {
        for i in 0..g.m {
            u.values[g.index(i, 0, l)] = 0.0;
            u.values[g.index(i, g.n - 1, l)] = 0.0;
        }
    }
}

/// Chebyshev differentiation matrix on the given Chebyshev extreme points
/// (any order), from the barycentric formula.
pub fn chebyshev_differentiation_matrix(x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let mut w: Vec<f64> = (0..m).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    w[0] *= 0.5;
    w[m - 1] *= 0.5;
    let mut d = DMatrix::zeros(m, m);
    for i in 0..m {
        let mut sum = 0.0;
        for j in 0..m {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                sum += v;
            }
        }
        d[(i, i)] = -sum;
    }
    d
}

/// Dense collocation heat solver on the doubled CCF grid.
#[derive(Debug)]
pub struct CollocationSolver {
    spec: GridSpec,
    config: HeatConfig,
    /// `∇²` per Fourier mode on all `m·n` points, boundary rows zeroed.
    laplacians: Vec<DMatrix<f64>>,
    boundary: Vec<bool>,
}

impl CollocationSolver {
    pub fn new(spec: GridSpec, config: HeatConfig) -> Result<Self> {
        if spec.len() > COLLOCATION_LIMIT {
            return Err(Error::TooLarge(format!(
                "dense collocation needs m·n·p <= {COLLOCATION_LIMIT}, got {}",
                spec.len()
            )));
        }
        BdfScheme::new(config.order)?;
        let (m, n) = (spec.m(), spec.n());
        let r = spec.radial_points();
        let z = spec.vertical_points();
        let dr = chebyshev_differentiation_matrix(&r);
        let drr = &dr * &dr;
        let dz = chebyshev_differentiation_matrix(&z);
        let dzz = &dz * &dz;
        let size = m * n;
        let mut boundary = vec![false; size];
        for k in 0..n {
            for j in 0..m {
                boundary[k * m + j] = j == 0 || j == m - 1 || k == 0 || k == n - 1;
            }
        }
        let laplacians = (0..spec.p())
            .map(|l| {
                let q = spec.wavenumber(l) as f64;
                let mut a = DMatrix::zeros(size, size);
                for k in 0..n {
                    for j in 0..m {
                        let row = k * m + j;
                        if boundary[row] {
                            continue;
                        }
                        if r[j] == 0.0 {
                            // u_r/r → u_rr for q = 0; regular modes vanish for q ≠ 0
                            if q == 0.0 {
                                for jj in 0..m {
                                    a[(row, k * m + jj)] += 2.0 * drr[(j, jj)];
                                }
                            }
                        } else {
                            for jj in 0..m {
                                a[(row, k * m + jj)] += drr[(j, jj)] + dr[(j, jj)] / r[j];
                            }
                            a[(row, row)] -= q * q / (r[j] * r[j]);
                        }
                        for kk in 0..n {
                            a[(row, kk * m + j)] += dzz[(k, kk)];
                        }
                    }
                }
                a
            })
            .collect();
        Ok(Self {
            spec,
            config,
            laplacians,
            boundary,
        })
    }

    fn factor(&self, l: usize, kappa_alpha: f64) -> LU<f64, nalgebra::Dyn, nalgebra::Dyn> {
        let size = self.spec.slice_len();
        let q = self.spec.wavenumber(l);
        let r = self.spec.radial_points();
        let mut a = DMatrix::identity(size, size) - &self.laplacians[l] * kappa_alpha;
        for row in 0..size {
            let on_axis = r[row % self.spec.m()] == 0.0 && q != 0;
            if self.boundary[row] || on_axis {
                a.row_mut(row).fill(0.0);
                a[(row, row)] = 1.0;
            }
        }
        a.lu()
    }

    /// Runs `steps` BDF steps from `initial` with `u = 0` on the walls,
    /// ramping the order up while the history is short; snapshots every
    /// `every` steps, initial and final included.
    pub fn run(
        &self,
        initial: &GridField,
        forcing: Option<&dyn Fn(f64) -> GridField>,
        steps: usize,
        every: usize,
    ) -> Result<Vec<(f64, GridField)>> {
        let spec = self.spec;
        if *initial.spec() != spec {
            return Err(Error::DimensionMismatch("initial field grid differs from solver grid".into()));
        }
        let (size, p, h) = (spec.slice_len(), spec.p(), self.config.h);
        let fft = AngularFft::new(p);
        // DFT bin of each slice
        let bins: Vec<usize> = (0..p).map(|l| spec.wavenumber(l).rem_euclid(p as i64) as usize).collect();
        let mut factors: Vec<Vec<Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>>> = vec![vec![None; 5]; p];
        let on_axis: Vec<bool> = spec.radial_points().iter().map(|&r| r == 0.0).collect();

        let mut history = vec![fft.forward(initial.values(), size)];
        let mut t = 0.0;
        let every = every.max(1);
        let mut out = vec![(0.0, initial.clone())];
        for step in 1..=steps {
            let order = self.config.order.min(history.len());
            let scheme = BdfScheme::new(order)?;
            let kappa = scheme.kappa(h);
            let ft = match self.config.forcing {
                ForcingMode::Lagged => t,
                ForcingMode::Exact => t + h,
            };
            let g = forcing.map(|f| fft.forward(f(ft).values(), size));
            let mut next = vec![Complex64::default(); size * p];
            for l in 0..p {
                let b = bins[l];
                let q = spec.wavenumber(l);
                let lu = factors[l][order].get_or_insert_with(|| self.factor(l, kappa * self.config.alpha));
                let mut rhs = DMatrix::<f64>::zeros(size, 2);
                for row in 0..size {
                    let mut v = Complex64::default();
                    for (w, past) in scheme.history_weights().iter().zip(&history) {
                        v += past[b * size + row] * *w;
                    }
                    if let Some(g) = &g {
                        v += g[b * size + row] * kappa;
                    }
                    if self.boundary[row] || (on_axis[row % spec.m()] && q != 0) {
                        v = Complex64::default();
                    }
                    rhs[(row, 0)] = v.re;
                    rhs[(row, 1)] = v.im;
                }
                let sol = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Singular(format!("collocation matrix of mode {q}")))?;
                for row in 0..size {
                    next[b * size + row] = Complex64::new(sol[(row, 0)], sol[(row, 1)]);
                }
            }
            if next.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Blowup { step });
            }
            history.insert(0, next);
            history.truncate(self.config.order);
            t += h;
            if step % every == 0 || step == steps {
                let values = fft.inverse(&history[0], size);
                out.push((t, GridField::new(spec, values)?));
            }
        }
        Ok(out)
    }
}

/// Dense-collocation counterpart of [`crate::timestep::heat_run`].
pub fn collocation_heat_run(
    config: &HeatConfig,
    initial: &GridField,
    forcing: Option<&dyn Fn(f64) -> GridField>,
    steps: usize,
    every: usize,
) -> Result<Vec<(f64, GridField)>> {
    CollocationSolver::new(*initial.spec(), config.clone())?.run(initial, forcing, steps, every)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manufactured::HeatSolution;
    use crate::timestep::{heat_run, ForcingMode};

    #[test]
    fn fd_zero_stays_zero() {
        let grid = FdGrid::new(6, 7, 8).unwrap();
        let out = fd_heat_run(grid, &HeatConfig::new(1.0, 0.1, 1), &|_, _, _| 0.0, None, 3).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|(_, u)| u.max_abs() == 0.0));
    }

    #[test]
    fn fd_grid_avoids_axis() {
        let g = FdGrid::new(5, 5, 4).unwrap();
        let r = g.radial_points();
        assert!(r[0] > 0.0);
        assert!((r[4] + g.dr() - 1.0).abs() < 1e-15);
    }

    /// Steady manufactured state: the discrete solution relaxes to the
    /// discrete steady state, so only the spatial error remains.
    fn fd_steady_error(size: usize) -> f64 {
        let sol = HeatSolution::with_tilt(1.0, 0.5);
        let grid = FdGrid::new(size, size + 1, size).unwrap();
        let config = HeatConfig::new(1.0, 1.0, 1);
        let exact = |r: f64, z: f64, th: f64| sol.value(r, z, th, 0.0);
        let g = |r: f64, z: f64, th: f64, _t: f64| -sol.laplacian(r, z, th, 0.0);
        let out = fd_heat_run(grid, &config, &exact, Some(&g), 40).unwrap();
        let reference = FdField::from_fn(grid, exact);
        out.last().unwrap().1.max_diff(&reference) / reference.max_abs()
    }

    #[test]
    fn fd_spatial_order_is_two() {
        let errs: Vec<f64> = [8, 16, 32].iter().map(|&s| fd_steady_error(s)).collect();
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 2.0).abs() < 0.35, "errors {errs:?}");
        }
    }

    #[test]
    fn collocation_zero_stays_zero() {
        let spec = GridSpec::new(7, 6, 4).unwrap();
        let out = collocation_heat_run(&HeatConfig::new(1.0, 0.1, 4), &GridField::zeros(spec), None, 5, 1).unwrap();
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|(_, u)| u.max_abs() == 0.0));
    }

    #[test]
    fn collocation_size_guard() {
        let spec = GridSpec::new(33, 32, 32).unwrap();
        assert!(matches!(
            CollocationSolver::new(spec, HeatConfig::new(1.0, 0.1, 4)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn differentiation_matrix_is_exact_on_cubics() {
        let x = crate::grid::chebyshev_points(6);
        let d = chebyshev_differentiation_matrix(&x);
        for i in 0..6 {
            let got: f64 = (0..6).map(|j| d[(i, j)] * x[j].powi(3)).sum();
            assert!((got - 3.0 * x[i] * x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn collocation_agrees_with_spectral_solver() {
        let spec = GridSpec::new(11, 11, 12).unwrap();
        let sol = HeatSolution::with_tilt(1.0, 0.5);
        let config = HeatConfig::new(1.0, 0.01, 4).with_forcing(ForcingMode::Exact);
        let init = GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, 0.0));
        let f = move |t: f64| GridField::from_fn(spec, |r, z, th| sol.forcing(r, z, th, t));
        let a = collocation_heat_run(&config, &init, Some(&f), 20, 20).unwrap();
        let b = heat_run(&config, &init, Some(&f), 20, 20).unwrap();
        let (ua, ub) = (&a.last().unwrap().1, &b.last().unwrap().1);
        let diff = ua.values().iter().zip(ub.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff / ub.max_abs() < 1e-8, "{diff}");
    }
}
