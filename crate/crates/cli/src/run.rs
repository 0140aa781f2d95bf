//! Pipelines behind each subcommand and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cylspec::manufactured::{poisson_forcing, poisson_solution, HeatSolution};
use cylspec::ptns::{NSState, NsConfig, NsStepper, PTScalars, PtWorkspace};
use cylspec::solvers::{BoundaryCondition, SpectralSolver};
use cylspec::timestep::{ForcingMode, HeatConfig, HeatState, HeatStepper};
use cylspec::{CoeffTensor, GridField, GridSpec, TransformPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bench::{csv_bytes, run_bench};
use crate::config::{Problem, RunConfig};
use crate::error::{Error, Result};
use crate::export::{export_slice_csv, Plane};
use crate::field::{read_field, write_field, FieldData};

pub const MANIFEST: &str = "manifest.json";
const SLICE_RESOLUTION: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// Everything a run reports. Apart from `timings`, identical configs give
/// identical manifests.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub problem: Problem,
    pub status: Status,
    pub error: Option<String>,
    pub parameters: RunConfig,
    pub results: BTreeMap<String, Value>,
    pub artifacts: Vec<String>,
    pub timings: BTreeMap<String, f64>,
}

struct Output<'a> {
    dir: &'a Path,
    manifest: Manifest,
}

impl Output<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn save(&mut self, name: String, data: FieldData) -> Result<()> {
        write_field(&self.path(&name), &data)?;
        self.manifest.artifacts.push(name);
        Ok(())
    }

    fn slice(&mut self, name: &str, data: &FieldData, plane: Plane) -> Result<()> {
        export_slice_csv(data, plane, SLICE_RESOLUTION, &self.path(name))?;
        self.manifest.artifacts.push(name.into());
        Ok(())
    }

    fn result(&mut self, key: &str, value: Value) {
        self.manifest.results.insert(key.into(), value);
    }

    fn timing(&mut self, key: &str, secs: f64) {
        self.manifest.timings.insert(key.into(), secs);
    }
}

/// Applies `CYLSPEC_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(text) = std::env::var("CYLSPEC_THREADS") else {
        return Ok(None);
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Config(format!("CYLSPEC_THREADS must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(Some(threads))
}

/// Validates `config`, runs the selected pipeline and writes artifacts plus
/// `manifest.json` into `config.output_path`. A failed run still writes its
/// manifest, with the diagnostic in `error`.
pub fn run(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let dir = config.output_path.as_path();
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let mut out = Output {
        dir,
        manifest: Manifest {
            problem: config.problem,
            status: Status::Ok,
            error: None,
            parameters: config.clone(),
            results: BTreeMap::new(),
            artifacts: Vec::new(),
            timings: BTreeMap::new(),
        },
    };
    let start = Instant::now();
    let outcome = match config.problem {
        Problem::Heat => heat(config, &mut out),
        Problem::Poisson => poisson(config, &mut out),
        Problem::Ns => navier_stokes(config, &mut out),
        Problem::Bench => bench(config, &mut out),
        Problem::Transform => transform(config, &mut out),
    };
    out.timing("total_seconds", start.elapsed().as_secs_f64());
    if let Err(e) = &outcome {
        out.manifest.status = Status::Failed;
        out.manifest.error = Some(e.to_string());
    }
    let path = out.path(MANIFEST);
    let text = serde_json::to_string_pretty(&out.manifest)?;
    fs::write(&path, text + "\n").map_err(Error::io(&path))?;
    outcome.map(|_| out.manifest)
}

fn grid(cfg: &RunConfig) -> Result<GridSpec> {
    Ok(GridSpec::new(cfg.m, cfg.n, cfg.p)?)
}

fn keep(cfg: &RunConfig, step: usize) -> bool {
    step == cfg.steps || (cfg.output_every > 0 && step.is_multiple_of(cfg.output_every))
}

fn relative_error(u: &GridField, exact: &GridField) -> f64 {
    let diff = u
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / exact.max_abs()
}

fn heat(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let spec = grid(cfg)?;
    let sol = HeatSolution::with_tilt(cfg.alpha, 0.5);
    let config = HeatConfig::new(cfg.alpha, cfg.h, cfg.bdf_order)
        .with_forcing(ForcingMode::Exact)
        .with_tol(cfg.adi_tol);
    let stepper = HeatStepper::new(spec, config)?;
    let plan = stepper.transform();
    let initial = GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, 0.0));
    let mut state = HeatState::new(plan.analyze(&initial)?, 0.0);
    out.save("heat_00000.ccf".into(), initial.into())?;

    let (mut iterations, mut residual) = (0usize, 0.0f64);
    let start = Instant::now();
    for s in 1..=cfg.steps {
        let tf = stepper.forcing_time(&state);
        let g = plan.analyze(&GridField::from_fn(spec, |r, z, th| sol.forcing(r, z, th, tf)))?;
        let stats = stepper.step(&mut state, Some(&g))?;
        iterations = iterations.max(stats.iterations);
        residual = residual.max(stats.residual);
        if keep(cfg, s) {
            out.save(format!("heat_{s:05}.ccf"), plan.synthesize(state.current()).into())?;
        }
    }
    let secs = start.elapsed().as_secs_f64();

    let u = plan.synthesize(state.current());
    let exact = GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, state.time()));
    out.result("final_time", json!(state.time()));
    out.result("max_relative_error", json!(relative_error(&u, &exact)));
    out.result("max_adi_iterations", json!(iterations));
    out.result("max_adi_residual", json!(residual));
    out.timing("stepping_seconds", secs);
    if cfg.steps > 0 {
        out.slice("heat_final_z0.csv", &FieldData::Coeffs(state.current().clone()), Plane::Z(0.0))?;
    }
    Ok(())
}

fn poisson(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let spec = grid(cfg)?;
    let plan = TransformPlan::new(spec);
    let f = plan.analyze(&GridField::from_fn(spec, poisson_forcing))?;
    let solver = SpectralSolver::with_tolerance(spec, cfg.adi_tol);
    let start = Instant::now();
    let (u, stats) = solver.poisson(&f, &BoundaryCondition::default())?;
    out.timing("solve_seconds", start.elapsed().as_secs_f64());
    let values = plan.synthesize(&u);
    let exact = GridField::from_fn(spec, poisson_solution);
    out.result("max_relative_error", json!(relative_error(&values, &exact)));
    out.result("max_adi_iterations", json!(stats.iterations));
    out.result("max_adi_residual", json!(stats.residual));
    out.save("poisson_values.ccf".into(), values.into())?;
    let coeffs = FieldData::Coeffs(u);
    out.slice("poisson_z0.csv", &coeffs, Plane::Z(0.0))?;
    out.save("poisson_coefficients.ccf".into(), coeffs)
}

/// Smooth seeded vorticity scalars `(1−r²)(1−z²)·P(x, y, z)`, `P` a random cubic.
pub fn seeded_vorticity(ws: &PtWorkspace, seed: u64) -> Result<PTScalars> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scalar = || -> Result<CoeffTensor> {
        let mut terms = Vec::new();
        for a in 0..=3 {
            for b in 0..=3 - a {
                for c in 0..=3 - a - b {
                    terms.push((a, b, c, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let field = GridField::from_fn(*ws.spec(), |r, z, th| {
            let (x, y) = (r * th.cos(), r * th.sin());
            let p: f64 = terms.iter().map(|&(a, b, c, w)| w * x.powi(a) * y.powi(b) * z.powi(c)).sum();
            (1.0 - r * r) * (1.0 - z * z) * p
        });
        Ok(ws.transform().analyze(&field)?)
    };
    let lambda = scalar()?;
    let gamma = scalar()?;
    Ok(PTScalars::new(lambda, gamma)?)
}

fn save_omega(out: &mut Output, step: usize, omega: PTScalars) -> Result<()> {
    out.save(format!("ns_{step:05}_lambda.ccf"), omega.lambda.into())?;
    out.save(format!("ns_{step:05}_gamma.ccf"), omega.gamma.into())
}

fn navier_stokes(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let spec = grid(cfg)?;
    let stepper = NsStepper::new(spec, NsConfig::new(cfg.reynolds, cfg.h, cfg.bdf_order).with_tol(cfg.adi_tol))?;
    let omega = seeded_vorticity(stepper.workspace(), cfg.seed)?;
    let mut state = NSState::new(omega.clone(), 0.0);
    save_omega(out, 0, omega)?;

    let (mut divergence, mut iterations, mut residual) = (0.0f64, 0usize, 0.0f64);
    let start = Instant::now();
    for s in 1..=cfg.steps {
        let report = stepper.step(&mut state)?;
        divergence = divergence.max(report.divergence);
        iterations = iterations.max(report.lambda.iterations).max(report.gamma.iterations);
        residual = residual.max(report.lambda.residual).max(report.gamma.residual);
        if keep(cfg, s) {
            save_omega(out, s, state.omega())?;
        }
    }
    out.timing("stepping_seconds", start.elapsed().as_secs_f64());

    let omega = state.omega();
    out.result("final_time", json!(state.time()));
    out.result("max_velocity_divergence", json!(divergence));
    out.result("max_adi_iterations", json!(iterations));
    out.result("max_adi_residual", json!(residual));
    out.result("final_max_lambda", json!(omega.lambda.max_abs()));
    out.result("final_max_gamma", json!(omega.gamma.max_abs()));
    if cfg.steps > 0 {
        out.slice("ns_final_lambda_z0.csv", &FieldData::Coeffs(omega.lambda), Plane::Z(0.0))?;
    }
    Ok(())
}

fn bench(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let rows = run_bench(cfg);
    let mut table = Vec::new();
    for r in &rows {
        let key = format!("{} {}", r.method, r.label());
        match &r.outcome {
            Ok((err, secs)) => {
                table.push(json!({"method": r.method, "N": r.label(), "max_error": err}));
                out.timing(&key, *secs);
            }
            Err(msg) => table.push(json!({"method": r.method, "N": r.label(), "failure": msg})),
        }
    }
    out.result("rows", Value::Array(table));
    let path = out.path("bench.csv");
    fs::write(&path, csv_bytes(&rows)?).map_err(Error::io(&path))?;
    out.manifest.artifacts.push("bench.csv".into());
    Ok(())
}

fn transform(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let input = cfg.input.as_deref().expect("validated");
    let data = read_field(input)?;
    let spec = *data.spec();
    let plan = TransformPlan::new(spec);
    out.result("kind", json!(data.kind()));
    out.result("dims", json!([spec.m(), spec.n(), spec.p()]));
    match data {
        FieldData::Grid(g) => {
            let c = plan.analyze(&g)?;
            let back = plan.synthesize(&c);
            out.result("roundtrip_max_error", json!(relative_error(&back, &g)));
            out.save("transform_coefficients.ccf".into(), c.into())?;
            out.save("transform_roundtrip.ccf".into(), back.into())
        }
        FieldData::Coeffs(c) => {
            let g = plan.synthesize(&c);
            let back = plan.analyze(&g)?;
            out.result("roundtrip_max_error", json!(back.max_diff(&c) / c.max_abs()));
            out.save("transform_values.ccf".into(), g.into())?;
            out.save("transform_roundtrip.ccf".into(), back.into())
        }
    }
}
