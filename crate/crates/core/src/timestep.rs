//! BDF time stepping for the heat equation `∂ₜT = α∇²T + g`.
//!
//! A step of order `b` solves `(1 − κ⁽ᵇ⁾α∇²)T(t+h) = δ⁽ᵇ⁾T(t) + κ⁽ᵇ⁾g` as one
//! modal Helmholtz problem per Fourier slice.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use crate::solvers::{BoundaryCondition, SolveStats, SpectralSolver};
use crate::transform::{CoeffTensor, TransformPlan};

/// History weights (most recent first) and `κ/h` of the BDF family.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfScheme {
    order: usize,
    weights: Vec<f64>,
    kappa_factor: f64,
}

impl BdfScheme {
    pub fn new(order: usize) -> Result<Self> {
        let (weights, kappa_factor) = match order {
            1 => (vec![1.0], 1.0),
            2 => (vec![4.0 / 3.0, -1.0 / 3.0], 2.0 / 3.0),
            3 => (vec![18.0 / 11.0, -9.0 / 11.0, 2.0 / 11.0], 6.0 / 11.0),
            4 => (vec![48.0 / 25.0, -36.0 / 25.0, 16.0 / 25.0, -3.0 / 25.0], 12.0 / 25.0),
            _ => return Err(Error::UnsupportedOrder(order)),
        };
        Ok(Self {
            order,
            weights,
            kappa_factor,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Weights of `δ⁽ᵇ⁾` applied to `X(t), X(t−h), …`.
    pub fn history_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `κ⁽ᵇ⁾` for step size `h`.
    pub fn kappa(&self, h: f64) -> f64 {
        self.kappa_factor * h
    }
}

/// Extrapolation weights for explicit terms, most recent first.
pub fn imex_coefficients(order: usize) -> Result<Vec<f64>> {
    match order {
        1 => Ok(vec![1.0]),
        2 => Ok(vec![2.0, -1.0]),
        3 => Ok(vec![3.0, -3.0, 1.0]),
        4 => Ok(vec![4.0, -6.0, 4.0, -1.0]),
        _ => Err(Error::UnsupportedOrder(order)),
    }
}

/// Weighted sum of the leading entries of `history` (most recent first).
pub fn combine<'a>(history: impl IntoIterator<Item = &'a CoeffTensor>, weights: &[f64]) -> Result<CoeffTensor> {
    let items: Vec<&CoeffTensor> = history.into_iter().take(weights.len()).collect();
    if items.len() < weights.len() {
        return Err(Error::InsufficientHistory {
            needed: weights.len(),
            have: items.len(),
        });
    }
    let mut out = CoeffTensor::zeros(*items[0].spec());
    for (x, &w) in items.iter().zip(weights) {
        out.add_scaled(w, x);
    }
    Ok(out)
}

/// `δ⁽ᵇ⁾X` from the history `X(t), X(t−h), …`.
pub fn bdf_rhs(history: &[CoeffTensor], scheme: &BdfScheme) -> Result<CoeffTensor> {
    combine(history, scheme.history_weights())
}

/// When the forcing is sampled relative to the new time level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForcingMode {
    /// `g(t+h) ≈ g(t)`.
    #[default]
    Lagged,
    /// `g` evaluated at `t+h`.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatConfig {
    pub alpha: f64,
    pub h: f64,
    pub order: usize,
    pub bc: BoundaryCondition,
    pub forcing: ForcingMode,
    pub tol: f64,
}

impl HeatConfig {
    pub fn new(alpha: f64, h: f64, order: usize) -> Self {
        Self {
            alpha,
            h,
            order,
            bc: BoundaryCondition::default(),
            forcing: ForcingMode::default(),
            tol: crate::adi::DEFAULT_TOL,
        }
    }

    pub fn with_forcing(mut self, mode: ForcingMode) -> Self {
        self.forcing = mode;
        self
    }

    pub fn with_bc(mut self, bc: BoundaryCondition) -> Self {
        self.bc = bc;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        BdfScheme::new(self.order)?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {}", self.h)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!("diffusivity must be non-negative, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Coefficient history (most recent first) and the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatState {
    history: VecDeque<CoeffTensor>,
    time: f64,
    steps: usize,
}

impl HeatState {
    pub fn new(initial: CoeffTensor, time: f64) -> Self {
        Self {
            history: VecDeque::from([initial]),
            time,
            steps: 0,
        }
    }

    /// Starts from a known history `X(t), X(t−h), …`, skipping the
    /// low-order startup steps.
    pub fn with_history(history: Vec<CoeffTensor>, time: f64) -> Result<Self> {
        if history.is_empty() {
            return Err(Error::InsufficientHistory { needed: 1, have: 0 });
        }
        Ok(Self {
            history: history.into(),
            time,
            steps: 0,
        })
    }

    pub fn current(&self) -> &CoeffTensor {
        &self.history[0]
    }

    pub fn history(&self) -> &VecDeque<CoeffTensor> {
        &self.history
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub(crate) fn push(&mut self, next: CoeffTensor, keep: usize, h: f64) {
        self.history.push_front(next);
        self.history.truncate(keep.max(1));
        self.time += h;
        self.steps += 1;
    }
}

/// Owns the operator caches for one grid and configuration.
#[derive(Debug)]
pub struct HeatStepper {
    config: HeatConfig,
    solver: SpectralSolver,
    plan: TransformPlan,
}

impl HeatStepper {
    pub fn new(spec: GridSpec, config: HeatConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            solver: SpectralSolver::with_tolerance(spec, config.tol),
            plan: TransformPlan::new(spec),
            config,
        })
    }

    pub fn config(&self) -> &HeatConfig {
        &self.config
    }

    pub fn solver(&self) -> &SpectralSolver {
        &self.solver
    }

    pub fn transform(&self) -> &TransformPlan {
        &self.plan
    }

    /// Order used for the next step: the configured order once enough
    /// history exists, lower orders before that.
    pub fn next_order(&self, state: &HeatState) -> usize {
        self.config.order.min(state.history.len())
    }

    /// Time at which the forcing for the next step should be sampled.
    pub fn forcing_time(&self, state: &HeatState) -> f64 {
        match self.config.forcing {
            ForcingMode::Lagged => state.time,
            ForcingMode::Exact => state.time + self.config.h,
        }
    }

    /// Advances one step with forcing coefficients `g` (sampled at
    /// [`Self::forcing_time`]; `None` means no forcing).
    pub fn step(&self, state: &mut HeatState, g: Option<&CoeffTensor>) -> Result<SolveStats> {
        let scheme = BdfScheme::new(self.next_order(state))?;
        let kappa = scheme.kappa(self.config.h);
        let mut rhs = combine(state.history.iter(), scheme.history_weights())?;
        if let Some(g) = g {
            rhs.add_scaled(kappa, g);
        }
        let (next, stats) = self
            .solver
            .helmholtz(&rhs, kappa * self.config.alpha, &self.config.bc)?;
        if next.data().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Blowup { step: state.steps + 1 });
        }
        state.push(next, self.config.order, self.config.h);
        Ok(stats)
    }

    /// Runs `steps` steps, sampling the forcing callback in value space.
    /// Snapshots (time, coefficients) are kept every `every` steps, always
    /// including the initial and final states.
    pub fn run(
        &self,
        state: &mut HeatState,
        forcing: Option<&dyn Fn(f64) -> GridField>,
        steps: usize,
        every: usize,
    ) -> Result<Vec<(f64, CoeffTensor)>> {
        let every = every.max(1);
        let mut out = vec![(state.time, state.current().clone())];
        for s in 1..=steps {
            let g = match forcing {
                Some(f) => Some(self.plan.analyze(&f(self.forcing_time(state)))?),
                None => None,
            };
            self.step(state, g.as_ref())?;
            if s % every == 0 || s == steps {
                out.push((state.time, state.current().clone()));
            }
        }
        Ok(out)
    }
}

/// Integrates from `initial` for `steps` steps and returns value-space
/// snapshots on the `every`-step cadence (initial and final included).
pub fn heat_run(
    config: &HeatConfig,
    initial: &GridField,
    forcing: Option<&dyn Fn(f64) -> GridField>,
    steps: usize,
    every: usize,
) -> Result<Vec<(f64, GridField)>> {
    let stepper = HeatStepper::new(*initial.spec(), config.clone())?;
    let mut state = HeatState::new(stepper.plan.analyze(initial)?, 0.0);
    let snaps = stepper.run(&mut state, forcing, steps, every)?;
    Ok(snaps
        .into_iter()
        .map(|(t, c)| (t, stepper.plan.synthesize(&c)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manufactured::HeatSolution;
    use crate::transform::analyze;
    use num_complex::Complex64;

    fn spec(m: usize, n: usize, p: usize) -> GridSpec {
        GridSpec::new(m, n, p).unwrap()
    }

    #[test]
    fn scheme_constants() {
        for b in 1..=4 {
            let s = BdfScheme::new(b).unwrap();
            let sum: f64 = s.history_weights().iter().sum();
            assert!((sum - 1.0).abs() < 1e-15);
            assert_eq!(s.history_weights().len(), b);
            let ex: f64 = imex_coefficients(b).unwrap().iter().sum();
            assert!((ex - 1.0).abs() < 1e-15);
        }
        assert_eq!(BdfScheme::new(1).unwrap().kappa(0.1), 0.1);
        assert!((BdfScheme::new(4).unwrap().kappa(1.0) - 12.0 / 25.0).abs() < 1e-16);
        assert!((BdfScheme::new(2).unwrap().kappa(3.0) - 2.0).abs() < 1e-15);
        assert!(matches!(BdfScheme::new(5), Err(Error::UnsupportedOrder(5))));
        assert!(imex_coefficients(0).is_err());
        assert_eq!(imex_coefficients(1).unwrap(), vec![1.0]);
        assert_eq!(imex_coefficients(4).unwrap(), vec![4.0, -6.0, 4.0, -1.0]);
    }

    fn constant(s: GridSpec, v: f64) -> CoeffTensor {
        let mut c = CoeffTensor::zeros(s);
        c.set(0, 0, s.p() / 2, Complex64::new(v, 0.0));
        c
    }

    #[test]
    fn bdf_rhs_examples() {
        let s = spec(4, 4, 2);
        let hist = vec![constant(s, 2.5); 4];
        let out = bdf_rhs(&hist, &BdfScheme::new(4).unwrap()).unwrap();
        assert!((out.get(0, 0, 1).re - 2.5).abs() < 1e-15);
        let out = bdf_rhs(&hist[..1], &BdfScheme::new(1).unwrap()).unwrap();
        assert_eq!(out, hist[0]);
        // samples of f(t) = t at t = 3, 2, 1, 0
        let ramp: Vec<_> = [3.0, 2.0, 1.0, 0.0].iter().map(|&v| constant(s, v)).collect();
        let out = bdf_rhs(&ramp, &BdfScheme::new(4).unwrap()).unwrap();
        assert!((out.get(0, 0, 1).re - 88.0 / 25.0).abs() < 1e-14);
        assert!(matches!(
            bdf_rhs(&ramp[..2], &BdfScheme::new(3).unwrap()),
            Err(Error::InsufficientHistory { needed: 3, have: 2 })
        ));
        let ex = combine(&vec![constant(s, 0.7); 4], &imex_coefficients(4).unwrap()).unwrap();
        assert!((ex.get(0, 0, 1).re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_stays_zero() {
        let s = spec(8, 8, 4);
        let traj = heat_run(&HeatConfig::new(1.0, 0.01, 4), &GridField::zeros(s), None, 5, 1).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(traj.iter().all(|(_, f)| f.max_abs() == 0.0));
        let traj = heat_run(&HeatConfig::new(1.0, 0.01, 4), &GridField::zeros(s), None, 0, 1).unwrap();
        assert_eq!(traj.len(), 1);
    }

    #[test]
    fn no_diffusion_keeps_state() {
        let s = spec(8, 8, 4);
        let init = GridField::from_fn(s, |r, z, t| (1.0 - r * r) * (1.0 - z * z) * (1.0 + 0.3 * r * t.cos()));
        let traj = heat_run(&HeatConfig::new(0.0, 0.1, 4), &init, None, 10, 5).unwrap();
        for (_, f) in &traj {
            let d = f.values().iter().zip(init.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            assert!(d < 1e-13, "{d}");
        }
    }

    #[test]
    fn diffusion_stays_bounded() {
        let s = spec(10, 10, 6);
        let init = GridField::from_fn(s, |r, z, t| (1.0 - r * r) * (1.0 - z * z) * (r * t.sin() + z).exp());
        for h in [0.01, 0.1, 1.0] {
            let stepper = HeatStepper::new(s, HeatConfig::new(1.0, h, 4)).unwrap();
            let mut state = HeatState::new(analyze(&init).unwrap(), 0.0);
            let start = state.current().max_abs();
            for _ in 0..100 {
                stepper.step(&mut state, None).unwrap();
                assert!(state.current().max_abs() <= start * (1.0 + 1e-12), "h = {h}");
            }
            assert!(state.current().max_abs() < 0.5 * start);
        }
    }

    fn manufactured_error(spec: GridSpec, h: f64, steps: usize, order: usize, mode: ForcingMode, seed_history: bool) -> f64 {
        let sol = HeatSolution::with_tilt(1.0, 0.5);
        let cfg = HeatConfig::new(1.0, h, order).with_forcing(mode);
        let stepper = HeatStepper::new(spec, cfg).unwrap();
        let at = |t: f64| analyze(&GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, t))).unwrap();
        let mut state = if seed_history {
            HeatState::with_history((0..order).map(|i| at(-(i as f64) * h)).collect(), 0.0).unwrap()
        } else {
            HeatState::new(at(0.0), 0.0)
        };
        let forcing = move |t: f64| GridField::from_fn(spec, |r, z, th| sol.forcing(r, z, th, t));
        stepper.run(&mut state, Some(&forcing), steps, steps).unwrap();
        let t = state.time();
        let exact = GridField::from_fn(spec, |r, z, th| sol.value(r, z, th, t));
        let num = stepper.transform().synthesize(state.current());
        let err = num.values().iter().zip(exact.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        err / exact.max_abs()
    }

    #[test]
    fn first_order_local_error() {
        let s = spec(8, 8, 4);
        let e1 = manufactured_error(s, 0.02, 1, 1, ForcingMode::Exact, true);
        let e2 = manufactured_error(s, 0.01, 1, 1, ForcingMode::Exact, true);
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "local error ratio {ratio}");
    }

    #[test]
    fn bdf2_order() {
        let s = spec(8, 8, 4);
        let e1 = manufactured_error(s, 0.05, 10, 2, ForcingMode::Exact, true);
        let e2 = manufactured_error(s, 0.025, 20, 2, ForcingMode::Exact, true);
        let slope = (e1 / e2).log2();
        assert!((slope - 2.0).abs() < 0.3, "slope {slope}");
    }
}
