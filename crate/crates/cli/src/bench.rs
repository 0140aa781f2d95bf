//! Heat-equation comparison of the spectral solver against dense
//! collocation and finite differences on the manufactured solution.

use std::io::Write;
use std::time::Instant;

use cylspec::baseline::{collocation_heat_run, fd_heat_run, FdField, FdGrid};
use cylspec::manufactured::HeatSolution;
use cylspec::timestep::{heat_run, ForcingMode, HeatConfig};
use cylspec::{GridField, GridSpec};

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const METHODS: [&str; 3] = ["spectral", "collocation", "finite-difference"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: &'static str,
    pub size: usize,
    pub outcome: std::result::Result<(f64, f64), String>,
}

impl BenchRow {
    pub fn label(&self) -> String {
        format!("{}^3", self.size)
    }
}

/// `s × s × s` grid with `p` rounded up to even.
pub fn bench_grid(s: usize) -> Result<GridSpec> {
    Ok(GridSpec::new(s, s, s + s % 2)?)
}

fn solution(cfg: &RunConfig) -> HeatSolution {
    HeatSolution::with_tilt(cfg.alpha, 0.5)
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

fn rel_error(u: &GridField, sol: &HeatSolution, t: f64) -> f64 {
    let exact = GridField::from_fn(*u.spec(), |r, z, th| sol.value(r, z, th, t));
    let diff = u
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / exact.max_abs()
}

fn spectral_like(cfg: &RunConfig, s: usize, collocation: bool) -> Result<(f64, f64)> {
    let spec = bench_grid(s)?;
    let sol = solution(cfg);
    let config = HeatConfig::new(cfg.alpha, cfg.h, cfg.bdf_order)
        .with_forcing(ForcingMode::Exact)
        .with_tol(cfg.adi_tol);
    let init = GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, 0.0));
    let f = move |t: f64| GridField::from_fn(spec, |r, z, th| sol.forcing(r, z, th, t));
    let steps = cfg.steps;
    let (out, secs) = timed(|| {
        Ok(if collocation {
            collocation_heat_run(&config, &init, Some(&f), steps, steps)?
        } else {
            heat_run(&config, &init, Some(&f), steps, steps)?
        })
    })?;
    let (t, u) = out.last().expect("run keeps the final state");
    Ok((rel_error(u, &sol, *t), secs))
}

fn finite_difference(cfg: &RunConfig, s: usize) -> Result<(f64, f64)> {
    let grid = FdGrid::new(s, s, s)?;
    let sol = solution(cfg);
    let horizon = cfg.h * cfg.steps as f64;
    let config = HeatConfig::new(cfg.alpha, horizon / cfg.fd_steps as f64, 1);
    let (out, secs) = timed(|| {
        Ok(fd_heat_run(
            grid,
            &config,
            &|r, z, th| sol.value(r, z, th, 0.0),
            Some(&|r, z, th, t| sol.forcing(r, z, th, t)),
            cfg.fd_steps,
        )?)
    })?;
    let (t, u) = out.last().expect("run keeps the final state");
    let exact = FdField::from_fn(grid, |r, z, th| sol.value(r, z, th, *t));
    Ok((u.max_diff(&exact) / exact.max_abs(), secs))
}

fn row(method: &'static str, size: usize, result: Result<(f64, f64)>) -> BenchRow {
    BenchRow {
        method,
        size,
        outcome: result.map_err(|e| e.to_string()),
    }
}

/// All rows, spectral and collocation at `bench_sizes`, finite differences at
/// `fd_sizes`. A failing method becomes a row marked as failed.
pub fn run_bench(cfg: &RunConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &s in &cfg.bench_sizes {
        rows.push(row(METHODS[0], s, spectral_like(cfg, s, false)));
    }
    for &s in &cfg.bench_sizes {
        rows.push(row(METHODS[1], s, spectral_like(cfg, s, true)));
    }
    for &s in &cfg.fd_sizes {
        rows.push(row(METHODS[2], s, finite_difference(cfg, s)));
    }
    rows
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "method,N,max_error,seconds")?;
    for r in rows {
        match &r.outcome {
            Ok((err, secs)) => writeln!(out, "{},{},{err:e},{secs}", r.method, r.label())?,
            Err(_) => writeln!(out, "{},{},failed,failed", r.method, r.label())?,
        }
    }
    Ok(())
}

pub(crate) fn csv_bytes(rows: &[BenchRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).map_err(Error::io("<bench csv>"))?;
    Ok(buf)
}
