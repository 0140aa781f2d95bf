//! WebAssembly bindings for the browser demo: a heat-equation slice, the
//! ADI shift plan with its residual history, and a Poisson slice.
//!
//! Slices are sampled on a `res × res` Cartesian lattice over the square
//! `[-1, 1]²`; points outside the disk (or the plane) are NaN.

use cylspec::adi::{adi_solve_with, compute_shifts, spectral_bounds, spectral_bounds_right};
use cylspec::adi::{AdiOptions, SylvesterProblem};
use cylspec::manufactured::{poisson_forcing, poisson_solution, HeatSolution};
use cylspec::solvers::{reduced_operator, BoundaryCondition, SpectralSolver};
use cylspec::timestep::{ForcingMode, HeatConfig, HeatState, HeatStepper};
use cylspec::transform::evaluate_at;
use cylspec::ultraop::assemble_modal_helmholtz;
use cylspec::{CoeffTensor, GridField, GridSpec, TransformPlan};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

const MAX_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq)]
#[wasm_bindgen(getter_with_clone)]
pub struct Slice {
    pub resolution: usize,
    /// Row-major samples, `values[i * res + j]` at `(x_j, y_i)` or `(r_j, z_i)`.
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// Relative max error against the exact solution on the grid.
    pub max_error: f64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[wasm_bindgen(getter_with_clone)]
pub struct AdiReport {
    pub iterations: usize,
    pub left_shifts: Vec<f64>,
    pub right_shifts: Vec<f64>,
    /// `[a, b, c, d]`: spectral intervals of the two sides.
    pub intervals: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn js(e: cylspec::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn checked_spec(m: usize, p: usize) -> cylspec::Result<GridSpec> {
    if m > MAX_SIZE || p > MAX_SIZE {
        return Err(cylspec::Error::Domain(format!("demo sizes are capped at {MAX_SIZE}")));
    }
    GridSpec::new(m, m, p + p % 2)
}

fn rel_error(u: &GridField, exact: &GridField) -> f64 {
    let diff = u
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / exact.max_abs()
}

fn finish(resolution: usize, values: Vec<f64>, max_error: f64, time: f64) -> Slice {
    let finite = values.iter().filter(|v| v.is_finite());
    let min = finite.clone().cloned().fold(f64::INFINITY, f64::min);
    let max = finite.cloned().fold(f64::NEG_INFINITY, f64::max);
    Slice {
        resolution,
        values,
        min,
        max,
        max_error,
        time,
    }
}

fn lattice(i: usize, res: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (res - 1).max(1) as f64
}

/// Disk `z = const` in Cartesian pixels.
fn disk_slice(c: &CoeffTensor, z: f64, res: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(res * res);
    for i in 0..res {
        let y = -lattice(i, res);
        for j in 0..res {
            let x = lattice(j, res);
            let r = x.hypot(y);
            out.push(if r <= 1.0 { evaluate_at(c, (r, z, y.atan2(x))).re } else { f64::NAN });
        }
    }
    out
}

/// Meridional plane through `θ` and `θ + π`: horizontal axis is the signed
/// radius, vertical axis is `z`.
fn meridian_slice(c: &CoeffTensor, theta: f64, res: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(res * res);
    for i in 0..res {
        let z = -lattice(i, res);
        for j in 0..res {
            let s = lattice(j, res);
            let (r, th) = if s >= 0.0 { (s, theta) } else { (-s, theta + std::f64::consts::PI) };
            out.push(evaluate_at(c, (r, z, th)).re);
        }
    }
    out
}

/// Manufactured heat problem after `steps` BDF steps, sliced at height `z`.
pub fn heat_slice_native(m: usize, steps: usize, h: f64, alpha: f64, order: usize, z: f64, res: usize) -> cylspec::Result<Slice> {
    let spec = checked_spec(m, m)?;
    if !(-1.0..=1.0).contains(&z) {
        return Err(cylspec::Error::Domain(format!("z = {z} outside [-1, 1]")));
    }
    let sol = HeatSolution::with_tilt(alpha, 0.5);
    let stepper = HeatStepper::new(spec, HeatConfig::new(alpha, h, order).with_forcing(ForcingMode::Exact))?;
    let plan = stepper.transform();
    let mut state = HeatState::new(plan.analyze(&GridField::from_fn(spec, |r, zz, th| sol.value(r, zz, th, 0.0)))?, 0.0);
    for _ in 0..steps {
        let tf = stepper.forcing_time(&state);
        let g = plan.analyze(&GridField::from_fn(spec, |r, zz, th| sol.forcing(r, zz, th, tf)))?;
        stepper.step(&mut state, Some(&g))?;
    }
    let t = state.time();
    let exact = GridField::from_fn(spec, |r, zz, th| sol.value(r, zz, th, t));
    let err = rel_error(&plan.synthesize(state.current()), &exact);
    Ok(finish(res, disk_slice(state.current(), z, res), err, t))
}

/// Shift plan and ADI residual history for one Fourier mode `q` of the
/// Helmholtz operator `I − scale·∇²` with a seeded random right-hand side.
pub fn adi_report_native(m: usize, q: i64, scale: f64, tol: f64, seed: u64) -> cylspec::Result<AdiReport> {
    let spec = checked_spec(m, 4)?;
    let op = assemble_modal_helmholtz(&spec, q, scale);
    let [a, b, c, d] = reduced_operator(&op);
    let plan = compute_shifts(spectral_bounds(&a, &c)?, spectral_bounds_right(&b, &d)?, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = (0..a.rows() * b.rows())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    let problem = SylvesterProblem::new(a, b, c, d, e)?;
    let opts = AdiOptions {
        tol,
        record_history: true,
        ..Default::default()
    };
    let sol = adi_solve_with(&problem, &plan, &opts)?;
    Ok(AdiReport {
        iterations: plan.iterations,
        left_shifts: plan.u.clone(),
        right_shifts: plan.v.clone(),
        intervals: vec![plan.a, plan.b, plan.c, plan.d],
        residuals: sol.history,
    })
}

/// Manufactured Poisson problem on a meridional plane.
pub fn poisson_slice_native(m: usize, p: usize, theta: f64, res: usize) -> cylspec::Result<Slice> {
    let spec = checked_spec(m, p)?;
    let plan = TransformPlan::new(spec);
    let f = plan.analyze(&GridField::from_fn(spec, poisson_forcing))?;
    let (u, _) = SpectralSolver::new(spec).poisson(&f, &BoundaryCondition::default())?;
    let err = rel_error(&plan.synthesize(&u), &GridField::from_fn(spec, poisson_solution));
    Ok(finish(res, meridian_slice(&u, theta, res), err, 0.0))
}

#[wasm_bindgen]
pub fn heat_slice(m: usize, steps: usize, h: f64, alpha: f64, z: f64, res: usize) -> Result<Slice, JsError> {
    heat_slice_native(m, steps, h, alpha, 4, z, res).map_err(js)
}

#[wasm_bindgen]
pub fn adi_report(m: usize, q: i32, scale: f64, tol: f64) -> Result<AdiReport, JsError> {
    adi_report_native(m, q as i64, scale, tol, 1).map_err(js)
}

#[wasm_bindgen]
pub fn poisson_slice(m: usize, p: usize, theta: f64, res: usize) -> Result<Slice, JsError> {
    poisson_slice_native(m, p, theta, res).map_err(js)
}
