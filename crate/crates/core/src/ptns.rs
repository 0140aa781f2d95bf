//! Poloidal-toroidal fields and the vorticity-form Navier-Stokes stepper.
//!
//! A solenoidal field is written `V = ∇×[λẑ] + ∇×∇×[γẑ]`, so
//!
//! ```text
//! V_r = r⁻¹∂_θλ + ∂_r∂_zγ,   V_θ = −∂_rλ + r⁻¹∂_θ∂_zγ,   V_z = −Δ_hγ
//! ```
//!
//! and the curl of `(λ, γ)` is `(−∇²γ, λ)`. Derivatives are taken in
//! coefficient space; factors of `1/r` are applied pointwise on the grid,
//! which needs `m` even so that `r = 0` is not a grid point.
//!
//! The vorticity equation `∂_tω = ∇×(v×ω) + Re⁻¹∇²ω` then splits into two
//! scalar heat equations for `(λ_ω, γ_ω)` forced by the scalars of
//! `∇×(v×ω)`. Both scalars carry homogeneous Dirichlet conditions; the
//! velocity is recovered from `∇²λ_ψ = −λ_ω`, again with Dirichlet walls.
//! These are not the full no-slip vorticity conditions.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{parity_project_in_place, GridSpec};
use crate::solvers::{BoundaryCondition, HorizontalPoisson, SolveStats, SpectralSolver};
use crate::timestep::{imex_coefficients, HeatConfig, HeatState, HeatStepper};
use crate::transform::{CoeffTensor, TransformPlan};
use crate::ultraop::chebyshev_derivative;

/// Divergence tolerance for [`PtWorkspace::decompose`], relative to the
/// field size.
pub const DIVERGENCE_TOL: f64 = 1e-8;

/// Toroidal (`lambda`) and poloidal (`gamma`) scalars of a solenoidal field.
#[derive(Debug, Clone, PartialEq)]
pub struct PTScalars {
    pub lambda: CoeffTensor,
    pub gamma: CoeffTensor,
}

impl PTScalars {
    pub fn new(lambda: CoeffTensor, gamma: CoeffTensor) -> Result<Self> {
        if lambda.spec() != gamma.spec() {
            return Err(Error::DimensionMismatch("toroidal and poloidal grids differ".into()));
        }
        Ok(Self { lambda, gamma })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            lambda: CoeffTensor::zeros(spec),
            gamma: CoeffTensor::zeros(spec),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.lambda.spec()
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda.max_abs().max(self.gamma.max_abs())
    }

    pub fn max_diff(&self, other: &PTScalars) -> f64 {
        self.lambda.max_diff(&other.lambda).max(self.gamma.max_diff(&other.gamma))
    }

    pub fn add_scaled(&mut self, s: f64, other: &PTScalars) {
        self.lambda.add_scaled(s, &other.lambda);
        self.gamma.add_scaled(s, &other.gamma);
    }
}

/// Cylindrical components of a vector field, each as CCF coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldCoeffs {
    pub comp_r: CoeffTensor,
    pub comp_theta: CoeffTensor,
    pub comp_z: CoeffTensor,
}

impl VectorFieldCoeffs {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            comp_r: CoeffTensor::zeros(spec),
            comp_theta: CoeffTensor::zeros(spec),
            comp_z: CoeffTensor::zeros(spec),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.comp_r.spec()
    }

    pub fn components(&self) -> [&CoeffTensor; 3] {
        [&self.comp_r, &self.comp_theta, &self.comp_z]
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &VectorFieldCoeffs) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }
}

/// `∂_r` of every radial pencil.
pub fn radial_derivative(c: &CoeffTensor) -> CoeffTensor {
    let m = c.spec().m();
    let mut out = CoeffTensor::zeros(*c.spec());
    for (src, dst) in c.data().chunks_exact(m).zip(out.data_mut().chunks_exact_mut(m)) {
        chebyshev_derivative(src, dst);
    }
    out
}

/// `∂_z` of every vertical pencil.
pub fn vertical_derivative(c: &CoeffTensor) -> CoeffTensor {
    let s = *c.spec();
    let (m, n) = (s.m(), s.n());
    let mut out = CoeffTensor::zeros(s);
    let mut buf = vec![Complex64::default(); n];
    let mut der = vec![Complex64::default(); n];
    for l in 0..s.p() {
        let src = c.slice(l);
        let dst = out.slice_mut(l);
        for j in 0..m {
            for k in 0..n {
                buf[k] = src[k * m + j];
            }
            chebyshev_derivative(&buf, &mut der);
            for k in 0..n {
                dst[k * m + j] = der[k];
            }
        }
    }
    out
}

/// `∂_θ`. The unpaired Nyquist slice `q = −p/2` is zeroed, as for any odd
/// derivative of a real trigonometric interpolant.
pub fn angular_derivative(c: &CoeffTensor) -> CoeffTensor {
    let s = *c.spec();
    let mut out = c.clone();
    for l in 0..s.p() {
        let q = s.wavenumber(l);
        let factor = if 2 * q.unsigned_abs() as usize == s.p() {
            Complex64::default()
        } else {
            Complex64::new(0.0, q as f64)
        };
        out.slice_mut(l).iter_mut().for_each(|v| *v *= factor);
    }
    out
}

/// `∂²_θ`.
pub fn angular_second_derivative(c: &CoeffTensor) -> CoeffTensor {
    let s = *c.spec();
    let mut out = c.clone();
    for l in 0..s.p() {
        let q = s.wavenumber(l) as f64;
        out.slice_mut(l).iter_mut().for_each(|v| *v *= -q * q);
    }
    out
}

/// Zeroes the upper third of the spectrum in every direction.
pub fn truncate_two_thirds(c: &mut CoeffTensor) {
    let s = *c.spec();
    let (m, n, p) = (s.m(), s.n(), s.p());
    let (jmax, kmax) = ((2 * m).div_ceil(3), (2 * n).div_ceil(3));
    for l in 0..p {
        let q = s.wavenumber(l).unsigned_abs() as usize;
        let slice = c.slice_mut(l);
        for k in 0..n {
            for j in 0..m {
                if j >= jmax || k >= kmax || 3 * q >= p {
                    slice[k * m + j] = Complex64::default();
                }
            }
        }
    }
}

/// Transforms, solvers and grid data shared by all PT operations on one grid.
#[derive(Debug)]
pub struct PtWorkspace {
    spec: GridSpec,
    plan: TransformPlan,
    horizontal: HorizontalPoisson,
    solver: SpectralSolver,
    radius: Vec<f64>,
}

/// Parity shifts of the three components: `r̂` and `θ̂` flip under the
/// doubling, `ẑ` does not.
const VECTOR_SHIFTS: [usize; 3] = [1, 1, 0];

impl PtWorkspace {
    pub fn new(spec: GridSpec) -> Result<Self> {
        Self::with_tolerance(spec, crate::adi::DEFAULT_TOL)
    }

    pub fn with_tolerance(spec: GridSpec, tol: f64) -> Result<Self> {
        if spec.m() % 2 == 1 {
            return Err(Error::OddRadialSize(spec.m()));
        }
        Ok(Self {
            spec,
            plan: TransformPlan::new(spec),
            horizontal: HorizontalPoisson::new(spec)?,
            solver: SpectralSolver::with_tolerance(spec, tol),
            radius: spec.radial_points(),
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn transform(&self) -> &TransformPlan {
        &self.plan
    }

    pub fn solver(&self) -> &SpectralSolver {
        &self.solver
    }

    fn check(&self, c: &CoeffTensor) -> Result<()> {
        if *c.spec() != self.spec {
            return Err(Error::DimensionMismatch("coefficients live on a different grid".into()));
        }
        Ok(())
    }

    fn values(&self, c: &CoeffTensor) -> Vec<Complex64> {
        self.plan.synthesize_complex(c)
    }

    fn coeffs(&self, values: Vec<Complex64>, shift: usize) -> CoeffTensor {
        let mut c = self.plan.analyze_complex(values);
        parity_project_in_place(&mut c, shift);
        c
    }

    fn divide_by_r(&self, values: &mut [Complex64]) {
        let m = self.spec.m();
        for (i, v) in values.iter_mut().enumerate() {
            *v /= self.radius[i % m];
        }
    }

    /// `(a + b/r)` evaluated on the grid and analyzed with parity `shift`.
    fn plus_over_r(&self, a: Option<&CoeffTensor>, b: &CoeffTensor, shift: usize) -> CoeffTensor {
        let mut vals = self.values(b);
        self.divide_by_r(&mut vals);
        if let Some(a) = a {
            for (v, w) in vals.iter_mut().zip(self.values(a)) {
                *v += w;
            }
        }
        self.coeffs(vals, shift)
    }

    /// `Δ_h u = ∂²_r u + r⁻¹∂_r u + r⁻²∂²_θ u`.
    pub fn horizontal_laplacian(&self, u: &CoeffTensor) -> CoeffTensor {
        let ur = radial_derivative(u);
        let urr = radial_derivative(&ur);
        // r⁻¹(∂_r u + r⁻¹∂²_θ u)
        let inner = self.plus_over_r(Some(&ur), &angular_second_derivative(u), 1);
        let mut vals = self.values(&inner);
        self.divide_by_r(&mut vals);
        for (v, w) in vals.iter_mut().zip(self.values(&urr)) {
            *v += w;
        }
        self.coeffs(vals, 0)
    }

    /// `∇²u = Δ_h u + ∂²_z u`.
    pub fn laplacian(&self, u: &CoeffTensor) -> CoeffTensor {
        let mut out = self.horizontal_laplacian(u);
        out.add_scaled(1.0, &vertical_derivative(&vertical_derivative(u)));
        out
    }

    /// `∇·V`.
    pub fn divergence(&self, v: &VectorFieldCoeffs) -> CoeffTensor {
        let mut sum = v.comp_r.clone();
        sum.add_scaled(1.0, &angular_derivative(&v.comp_theta));
        let mut out = self.plus_over_r(None, &sum, 0);
        out.add_scaled(1.0, &radial_derivative(&v.comp_r));
        out.add_scaled(1.0, &vertical_derivative(&v.comp_z));
        out
    }

    /// Largest pointwise `|∇·V|` on the grid.
    pub fn max_divergence(&self, v: &VectorFieldCoeffs) -> f64 {
        self.values(&self.divergence(v)).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `∇×W` component by component.
    pub fn curl(&self, w: &VectorFieldCoeffs) -> VectorFieldCoeffs {
        let mut neg_dz_wt = vertical_derivative(&w.comp_theta);
        neg_dz_wt.scale(-1.0);
        let comp_r = self.plus_over_r(Some(&neg_dz_wt), &angular_derivative(&w.comp_z), 1);

        let mut comp_theta = vertical_derivative(&w.comp_r);
        comp_theta.add_scaled(-1.0, &radial_derivative(&w.comp_z));

        let mut num = w.comp_theta.clone();
        num.add_scaled(-1.0, &angular_derivative(&w.comp_r));
        let comp_z = self.plus_over_r(Some(&radial_derivative(&w.comp_theta)), &num, 0);
        VectorFieldCoeffs { comp_r, comp_theta, comp_z }
    }

    /// `V = ∇×[λẑ] + ∇×∇×[γẑ]`.
    pub fn synthesize(&self, s: &PTScalars) -> Result<VectorFieldCoeffs> {
        self.check(&s.lambda)?;
        self.check(&s.gamma)?;
        let gz = vertical_derivative(&s.gamma);
        let comp_r = self.plus_over_r(Some(&radial_derivative(&gz)), &angular_derivative(&s.lambda), 1);
        let mut neg_lr = radial_derivative(&s.lambda);
        neg_lr.scale(-1.0);
        let comp_theta = self.plus_over_r(Some(&neg_lr), &angular_derivative(&gz), 1);
        let mut comp_z = self.horizontal_laplacian(&s.gamma);
        comp_z.scale(-1.0);
        Ok(VectorFieldCoeffs { comp_r, comp_theta, comp_z })
    }

    /// Recovers `(λ, γ)` from a solenoidal field through
    /// `ẑ·V = −Δ_hγ` and `ẑ·∇×V = −Δ_hλ`, with both scalars vanishing at
    /// `r = ±1`.
    pub fn decompose(&self, v: &VectorFieldCoeffs) -> Result<PTScalars> {
        for c in v.components() {
            self.check(c)?;
        }
        let div = self.max_divergence(v);
        let size = self.max_derivative_scale(v);
        if div > DIVERGENCE_TOL * size.max(1.0) {
            return Err(Error::NotIncompressible(div));
        }
        self.decompose_unchecked(v)
    }

    fn max_derivative_scale(&self, v: &VectorFieldCoeffs) -> f64 {
        v.components()
            .iter()
            .map(|c| {
                let d = radial_derivative(c).max_abs().max(vertical_derivative(c).max_abs());
                c.max_abs().max(d)
            })
            .fold(0.0, f64::max)
    }

    fn decompose_unchecked(&self, v: &VectorFieldCoeffs) -> Result<PTScalars> {
        let mut rhs = v.comp_z.clone();
        rhs.scale(-1.0);
        let gamma = self.horizontal.solve(&rhs)?;
        let mut rhs = self.curl(v).comp_z;
        rhs.scale(-1.0);
        let lambda = self.horizontal.solve(&rhs)?;
        Ok(PTScalars { lambda, gamma })
    }

    /// Scalars of `∇×V`: `(−∇²γ, λ)`.
    pub fn curl_pt(&self, s: &PTScalars) -> PTScalars {
        let mut lambda = self.laplacian(&s.gamma);
        lambda.scale(-1.0);
        PTScalars { lambda, gamma: s.lambda.clone() }
    }

    /// Velocity scalars from vorticity scalars: `λ_v = γ_ω` and `γ_v = λ_ψ`
    /// with `∇²λ_ψ = −λ_ω` under `bc`.
    pub fn velocity_from_vorticity(&self, omega: &PTScalars, bc: &BoundaryCondition) -> Result<PTScalars> {
        self.check(&omega.lambda)?;
        let mut rhs = omega.lambda.clone();
        rhs.scale(-1.0);
        let (gamma, _) = self.solver.poisson(&rhs, bc)?;
        Ok(PTScalars { lambda: omega.gamma.clone(), gamma })
    }

    /// `γ_ψ` from `∇²γ_ψ = −γ_ω`. The velocity does not need it; it completes
    /// the vector potential for diagnostics.
    pub fn vector_potential_gamma(&self, omega: &PTScalars) -> Result<CoeffTensor> {
        let mut rhs = omega.gamma.clone();
        rhs.scale(-1.0);
        Ok(self.solver.poisson(&rhs, &BoundaryCondition::DirichletHomogeneous)?.0)
    }

    /// Residual of the wall-matching relations
    /// `∂_θλ + r∂_r∂_zγ = rV_r` and `∂_θ∂_zγ − r∂_rλ = rV_θ` at `r = ±1`.
    pub fn boundary_matching_residual(&self, s: &PTScalars, v: &VectorFieldCoeffs) -> f64 {
        let gz = vertical_derivative(&s.gamma);
        let lt = self.values(&angular_derivative(&s.lambda));
        let grz = self.values(&radial_derivative(&gz));
        let gzt = self.values(&angular_derivative(&gz));
        let lr = self.values(&radial_derivative(&s.lambda));
        let vr = self.values(&v.comp_r);
        let vt = self.values(&v.comp_theta);
        let m = self.spec.m();
        let mut worst: f64 = 0.0;
        for i in 0..self.spec.len() {
            let j = i % m;
            if j != 0 && j != m - 1 {
                continue;
            }
            let r = self.radius[j];
            worst = worst
                .max((lt[i] + grz[i] * r - vr[i] * r).norm())
                .max((gzt[i] - lr[i] * r - vt[i] * r).norm());
        }
        worst
    }

    /// Pointwise `v × w`.
    pub fn cross(&self, v: &VectorFieldCoeffs, w: &VectorFieldCoeffs) -> VectorFieldCoeffs {
        let [vr, vt, vz] = v.components().map(|c| self.values(c));
        let [wr, wt, wz] = w.components().map(|c| self.values(c));
        let len = vr.len();
        let (mut cr, mut ct, mut cz) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
        for i in 0..len {
            cr.push(vt[i] * wz[i] - vz[i] * wt[i]);
            ct.push(vz[i] * wr[i] - vr[i] * wz[i]);
            cz.push(vr[i] * wt[i] - vt[i] * wr[i]);
        }
        VectorFieldCoeffs {
            comp_r: self.coeffs(cr, VECTOR_SHIFTS[0]),
            comp_theta: self.coeffs(ct, VECTOR_SHIFTS[1]),
            comp_z: self.coeffs(cz, VECTOR_SHIFTS[2]),
        }
    }

    /// `(v·∇)v` in cylindrical components, including the
    /// `−v_θ²/r` and `v_rv_θ/r` terms.
    pub fn advection(&self, v: &VectorFieldCoeffs) -> VectorFieldCoeffs {
        let [vr, vt, vz] = v.components().map(|c| self.values(c));
        let m = self.spec.m();
        let directional = |c: &CoeffTensor| -> Vec<Complex64> {
            let dr = self.values(&radial_derivative(c));
            let dt = self.values(&angular_derivative(c));
            let dz = self.values(&vertical_derivative(c));
            (0..vr.len())
                .map(|i| vr[i] * dr[i] + vt[i] * dt[i] / self.radius[i % m] + vz[i] * dz[i])
                .collect()
        };
        let mut ar = directional(&v.comp_r);
        let mut at = directional(&v.comp_theta);
        let az = directional(&v.comp_z);
        for i in 0..ar.len() {
            let r = self.radius[i % m];
            ar[i] -= vt[i] * vt[i] / r;
            at[i] += vr[i] * vt[i] / r;
        }
        VectorFieldCoeffs {
            comp_r: self.coeffs(ar, VECTOR_SHIFTS[0]),
            comp_theta: self.coeffs(at, VECTOR_SHIFTS[1]),
            comp_z: self.coeffs(az, VECTOR_SHIFTS[2]),
        }
    }

    /// The vector field `∇×(v×ω)` from velocity and vorticity scalars.
    pub fn cross_curl(&self, v: &PTScalars, omega: &PTScalars, dealias: bool) -> Result<VectorFieldCoeffs> {
        let mut vv = self.synthesize(v)?;
        let mut ww = self.synthesize(omega)?;
        if dealias {
            for c in [&mut vv.comp_r, &mut vv.comp_theta, &mut vv.comp_z, &mut ww.comp_r, &mut ww.comp_theta, &mut ww.comp_z] {
                truncate_two_thirds(c);
            }
        }
        Ok(self.curl(&self.cross(&vv, &ww)))
    }

    /// Scalars `(λ_a, γ_a)` of `∇×(v×ω)`. The discrete curl of an aliased
    /// product is not exactly solenoidal, so the divergence check of
    /// [`Self::decompose`] is skipped; only `ẑ·W` and `ẑ·∇×W` are used.
    pub fn nonlinear_term(&self, v: &PTScalars, omega: &PTScalars, dealias: bool) -> Result<PTScalars> {
        if v.max_abs() == 0.0 || omega.max_abs() == 0.0 {
            return Ok(PTScalars::zeros(self.spec));
        }
        let mut a = self.decompose_unchecked(&self.cross_curl(v, omega, dealias)?)?;
        // the product fills the unpaired Nyquist slice, where ∂_θ∂_θ ≠ ∂²_θ
        if let Some(l) = self.spec.slice_of(-((self.spec.p() / 2) as i64)) {
            a.lambda.slice_mut(l).fill(Complex64::default());
            a.gamma.slice_mut(l).fill(Complex64::default());
        }
        Ok(a)
    }
}

/// `V = ∇×[λẑ] + ∇×∇×[γẑ]` with a one-off workspace.
pub fn pt_synthesize(s: &PTScalars) -> Result<VectorFieldCoeffs> {
    PtWorkspace::new(*s.spec())?.synthesize(s)
}

/// Toroidal and poloidal scalars of a solenoidal field.
pub fn pt_decompose(v: &VectorFieldCoeffs) -> Result<PTScalars> {
    PtWorkspace::new(*v.spec())?.decompose(v)
}

pub fn curl_pt(s: &PTScalars) -> Result<PTScalars> {
    Ok(PtWorkspace::new(*s.spec())?.curl_pt(s))
}

pub fn velocity_from_vorticity(omega: &PTScalars, bc: &BoundaryCondition) -> Result<PTScalars> {
    PtWorkspace::new(*omega.spec())?.velocity_from_vorticity(omega, bc)
}

pub fn nonlinear_term(v: &PTScalars, omega: &PTScalars) -> Result<PTScalars> {
    PtWorkspace::new(*v.spec())?.nonlinear_term(v, omega, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsConfig {
    pub reynolds: f64,
    pub h: f64,
    pub order: usize,
    pub tol: f64,
    /// `false` drops `∇×(v×ω)`, leaving the Stokes problem.
    pub nonlinear: bool,
    pub dealias: bool,
}

impl NsConfig {
    pub fn new(reynolds: f64, h: f64, order: usize) -> Self {
        Self {
            reynolds,
            h,
            order,
            tol: crate::adi::DEFAULT_TOL,
            nonlinear: true,
            dealias: false,
        }
    }

    pub fn stokes(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Vorticity histories and the matching nonlinear-term histories. The
/// nonlinear history holds the terms of every vorticity level except the
/// current one.
#[derive(Debug, Clone)]
pub struct NSState {
    lambda: HeatState,
    gamma: HeatState,
    nonlinear: VecDeque<PTScalars>,
}

impl NSState {
    pub fn new(omega: PTScalars, time: f64) -> Self {
        Self {
            lambda: HeatState::new(omega.lambda, time),
            gamma: HeatState::new(omega.gamma, time),
            nonlinear: VecDeque::new(),
        }
    }

    pub fn omega(&self) -> PTScalars {
        PTScalars {
            lambda: self.lambda.current().clone(),
            gamma: self.gamma.current().clone(),
        }
    }

    pub fn time(&self) -> f64 {
        self.lambda.time()
    }

    pub fn steps_taken(&self) -> usize {
        self.lambda.steps_taken()
    }

    pub fn history_len(&self) -> usize {
        self.lambda.history().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsStepReport {
    /// Largest `|∇·v|` of the velocity used for the nonlinear term.
    pub divergence: f64,
    pub lambda: SolveStats,
    pub gamma: SolveStats,
}

#[derive(Debug)]
pub struct NsStepper {
    config: NsConfig,
    pt: PtWorkspace,
    heat: HeatStepper,
}

impl NsStepper {
    pub fn new(spec: GridSpec, config: NsConfig) -> Result<Self> {
        if !(config.reynolds > 0.0 && config.reynolds.is_finite()) {
            return Err(Error::Domain(format!("Reynolds number must be positive, got {}", config.reynolds)));
        }
        let heat_config = HeatConfig::new(1.0 / config.reynolds, config.h, config.order).with_tol(config.tol);
        Ok(Self {
            pt: PtWorkspace::with_tolerance(spec, config.tol)?,
            heat: HeatStepper::new(spec, heat_config)?,
            config,
        })
    }

    pub fn config(&self) -> &NsConfig {
        &self.config
    }

    pub fn workspace(&self) -> &PtWorkspace {
        &self.pt
    }

    fn forcing(&self, omega: &PTScalars) -> Result<(PTScalars, f64)> {
        let v = self.pt.velocity_from_vorticity(omega, &BoundaryCondition::DirichletHomogeneous)?;
        let divergence = self.pt.max_divergence(&self.pt.synthesize(&v)?);
        let a = if self.config.nonlinear {
            self.pt.nonlinear_term(&v, omega, self.config.dealias)?
        } else {
            PTScalars::zeros(*self.pt.spec())
        };
        Ok((a, divergence))
    }

    /// One IMEX BDF step; the order ramps up while the history is short.
    pub fn step(&self, state: &mut NSState) -> Result<NsStepReport> {
        let (a, divergence) = self.forcing(&state.omega())?;
        state.nonlinear.push_front(a);
        let order = self.heat.next_order(&state.lambda);
        let weights = imex_coefficients(order)?;
        let spec = *self.pt.spec();
        let mut g = PTScalars::zeros(spec);
        for (w, past) in weights.iter().zip(&state.nonlinear) {
            g.add_scaled(*w, past);
        }
        let lambda = self.heat.step(&mut state.lambda, Some(&g.lambda))?;
        let gamma = self.heat.step(&mut state.gamma, Some(&g.gamma))?;
        state.nonlinear.truncate(self.config.order.saturating_sub(1));
        Ok(NsStepReport { divergence, lambda, gamma })
    }

    pub fn run(&self, state: &mut NSState, steps: usize) -> Result<Vec<NsStepReport>> {
        (0..steps).map(|_| self.step(state)).collect()
    }

    /// Builds a full-order history from one vorticity field: each startup
    /// level comes from IMEX Euler with 1-4 substeps, extrapolated to zero
    /// step size, so the startup error is of the same order as the scheme.
    pub fn bootstrap(&self, omega: PTScalars, time: f64) -> Result<NSState> {
        let h = self.config.h;
        let mut levels = vec![omega];
        while levels.len() < self.config.order {
            let last = levels.last().expect("non-empty");
            let next = self.extrapolated_euler(last, h)?;
            levels.push(next);
        }
        let start = time + h * (levels.len() - 1) as f64;
        let nonlinear = levels[..levels.len() - 1]
            .iter()
            .rev()
            .map(|w| self.forcing(w).map(|(a, _)| a))
            .collect::<Result<VecDeque<_>>>()?;
        let (lam, gam): (Vec<_>, Vec<_>) = levels.into_iter().rev().map(|s| (s.lambda, s.gamma)).unzip();
        Ok(NSState {
            lambda: HeatState::with_history(lam, start)?,
            gamma: HeatState::with_history(gam, start)?,
            nonlinear,
        })
    }

    fn euler(&self, omega: &PTScalars, h: f64, substeps: usize) -> Result<PTScalars> {
        let s = h / substeps as f64;
        let solver = self.heat.solver();
        let bc = BoundaryCondition::DirichletHomogeneous;
        let mut w = omega.clone();
        for _ in 0..substeps {
            let (a, _) = self.forcing(&w)?;
            w.add_scaled(s, &a);
            let scale = s / self.config.reynolds;
            w = PTScalars {
                lambda: solver.helmholtz(&w.lambda, scale, &bc)?.0,
                gamma: solver.helmholtz(&w.gamma, scale, &bc)?.0,
            };
        }
        Ok(w)
    }

    fn extrapolated_euler(&self, omega: &PTScalars, h: f64) -> Result<PTScalars> {
        const SUBSTEPS: [usize; 4] = [1, 2, 3, 4];
        let mut table: Vec<PTScalars> = Vec::with_capacity(SUBSTEPS.len());
        for (i, &n) in SUBSTEPS.iter().enumerate() {
            let mut cur = self.euler(omega, h, n)?;
            // Neville recursion for an error expansion in powers of the step
            for k in 1..=i {
                let ratio = n as f64 / SUBSTEPS[i - k] as f64;
                let prev = &table[k - 1];
                let mut next = cur.clone();
                let mut diff = cur.clone();
                diff.add_scaled(-1.0, prev);
                next.add_scaled(1.0 / (ratio - 1.0), &diff);
                table[k - 1] = cur;
                cur = next;
            }
            table.push(cur);
        }
        Ok(table.pop().expect("non-empty"))
    }
}

/// Advances `state` by one step of `stepper`.
pub fn ns_step(stepper: &NsStepper, state: &mut NSState) -> Result<NsStepReport> {
    stepper.step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `(1−r²)(1−z²)·P(x, y, z)` with `P` a random cubic in Cartesian
    /// coordinates: regular at the axis and zero on every wall.
    fn smooth(ws: &PtWorkspace, seed: u64) -> CoeffTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
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
            let p: f64 = terms
                .iter()
                .map(|&(a, b, c, w)| w * x.powi(a) * y.powi(b) * z.powi(c))
                .sum();
            (1.0 - r * r) * (1.0 - z * z) * p
        });
        ws.transform().analyze(&field).unwrap()
    }

    fn random_scalars(ws: &PtWorkspace, seed: u64) -> PTScalars {
        PTScalars::new(smooth(ws, seed), smooth(ws, seed + 1000)).unwrap()
    }

    fn ws(m: usize, n: usize, p: usize) -> PtWorkspace {
        PtWorkspace::new(GridSpec::new(m, n, p).unwrap()).unwrap()
    }

    #[test]
    fn odd_radial_size_is_rejected() {
        let spec = GridSpec::new(9, 8, 8).unwrap();
        assert!(matches!(PtWorkspace::new(spec), Err(Error::OddRadialSize(9))));
    }

    #[test]
    fn zero_scalars_give_zero_field() {
        let w = ws(8, 8, 8);
        let v = w.synthesize(&PTScalars::zeros(*w.spec())).unwrap();
        assert_eq!(v.max_abs(), 0.0);
        let s = w.decompose(&VectorFieldCoeffs::zeros(*w.spec())).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn toroidal_swirl_by_hand() {
        let w = ws(10, 6, 8);
        let lambda = w.transform().analyze(&GridField::from_fn(*w.spec(), |r, _, _| 1.0 - r * r)).unwrap();
        let v = w.synthesize(&PTScalars::new(lambda, CoeffTensor::zeros(*w.spec())).unwrap()).unwrap();
        let swirl = w.transform().analyze(&GridField::from_fn(*w.spec(), |r, _, _| 2.0 * r)).unwrap();
        assert!(v.comp_theta.max_diff(&swirl) < 1e-12);
        assert!(v.comp_r.max_abs() < 1e-12);
        assert!(v.comp_z.max_abs() < 1e-12);
    }

    #[test]
    fn synthesized_fields_are_solenoidal() {
        let w = ws(14, 12, 12);
        for seed in 0..4 {
            let v = w.synthesize(&random_scalars(&w, seed)).unwrap();
            assert!(w.max_divergence(&v) < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn decompose_inverts_synthesize() {
        let w = ws(14, 12, 12);
        for seed in 0..3 {
            let s = random_scalars(&w, seed);
            let v = w.synthesize(&s).unwrap();
            let back = w.decompose(&v).unwrap();
            assert!(back.max_diff(&s) < 1e-10, "seed {seed}: {}", back.max_diff(&s));
            assert!(w.boundary_matching_residual(&back, &v) < 1e-10);
        }
    }

    #[test]
    fn pure_toroidal_and_poloidal_round_trips() {
        let w = ws(12, 10, 8);
        let zero = CoeffTensor::zeros(*w.spec());
        let l0 = PTScalars::new(smooth(&w, 7), zero.clone()).unwrap();
        let g0 = PTScalars::new(zero, smooth(&w, 8)).unwrap();
        for s in [l0, g0] {
            let back = w.decompose(&w.synthesize(&s).unwrap()).unwrap();
            assert!(back.max_diff(&s) < 1e-10);
        }
    }

    #[test]
    fn compressible_field_is_rejected() {
        let w = ws(8, 8, 8);
        let mut v = VectorFieldCoeffs::zeros(*w.spec());
        v.comp_z = w.transform().analyze(&GridField::from_fn(*w.spec(), |_, z, _| z)).unwrap();
        assert!(matches!(w.decompose(&v), Err(Error::NotIncompressible(_))));
    }

    #[test]
    fn curl_of_toroidal_is_poloidal() {
        let w = ws(8, 8, 8);
        let l = smooth(&w, 3);
        let c = w.curl_pt(&PTScalars::new(l.clone(), CoeffTensor::zeros(*w.spec())).unwrap());
        assert!(c.lambda.max_abs() < 1e-12);
        assert_eq!(c.gamma, l);
    }

    #[test]
    fn curl_pt_laplacian_by_hand() {
        let w = ws(10, 10, 4);
        let spec = *w.spec();
        let gamma = w
            .transform()
            .analyze(&GridField::from_fn(spec, |r, z, _| (1.0 - r * r) * (1.0 - z * z)))
            .unwrap();
        let c = w.curl_pt(&PTScalars::new(CoeffTensor::zeros(spec), gamma).unwrap());
        let expected = w
            .transform()
            .analyze(&GridField::from_fn(spec, |r, z, _| 4.0 * (1.0 - z * z) + 2.0 * (1.0 - r * r)))
            .unwrap();
        assert!(c.lambda.max_diff(&expected) < 1e-10);
    }

    #[test]
    fn curl_pt_matches_vector_curl() {
        let w = ws(16, 12, 12);
        for seed in 0..3 {
            let s = random_scalars(&w, seed);
            let direct = w.curl(&w.synthesize(&s).unwrap());
            let via = w.synthesize(&w.curl_pt(&s)).unwrap();
            assert!(direct.max_diff(&via) < 1e-9, "seed {seed}: {}", direct.max_diff(&via));
        }
    }

    #[test]
    fn double_curl_of_potential() {
        let w = ws(16, 12, 12);
        let psi = random_scalars(&w, 11);
        let direct = w.curl(&w.curl(&w.synthesize(&psi).unwrap()));
        let mut lam = w.laplacian(&psi.lambda);
        lam.scale(-1.0);
        let mut gam = w.laplacian(&psi.gamma);
        gam.scale(-1.0);
        let via = w.synthesize(&PTScalars::new(lam, gam).unwrap()).unwrap();
        assert!(direct.max_diff(&via) < 1e-9, "{}", direct.max_diff(&via));
    }

    #[test]
    fn velocity_recovered_from_its_vorticity() {
        let w = ws(14, 12, 12);
        let v0 = random_scalars(&w, 5);
        let omega = w.curl_pt(&v0);
        let v = w.velocity_from_vorticity(&omega, &BoundaryCondition::DirichletHomogeneous).unwrap();
        assert!(v.max_diff(&v0) < 1e-8, "{}", v.max_diff(&v0));
        assert!(w.max_divergence(&w.synthesize(&v).unwrap()) < 1e-10);
        let zero = w
            .velocity_from_vorticity(&PTScalars::zeros(*w.spec()), &BoundaryCondition::DirichletHomogeneous)
            .unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn nonlinear_term_vanishes_for_parallel_fields() {
        let w = ws(12, 10, 8);
        let s = random_scalars(&w, 2);
        assert!(w.nonlinear_term(&s, &s, false).unwrap().max_abs() < 1e-10);
        let zero = PTScalars::zeros(*w.spec());
        assert_eq!(w.nonlinear_term(&s, &zero, false).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn rotational_form_matches_advective_form() {
        // ∇×(v×ω) = −∇×((v·∇)v) for solenoidal v
        let w = ws(24, 20, 24);
        let v = random_scalars(&w, 9);
        let omega = w.curl_pt(&v);
        let rot = w.cross_curl(&v, &omega, false).unwrap();
        let adv = w.curl(&w.advection(&w.synthesize(&v).unwrap()));
        let mut diff: f64 = 0.0;
        for (a, b) in rot.components().iter().zip(adv.components()) {
            let mut s = (*a).clone();
            s.add_scaled(1.0, b);
            diff = diff.max(s.max_abs());
        }
        assert!(diff < 1e-8 * rot.max_abs().max(1.0), "{diff}");
    }

    #[test]
    fn stokes_limit_matches_heat_runs() {
        let spec = GridSpec::new(8, 8, 8).unwrap();
        let stepper = NsStepper::new(spec, NsConfig::new(10.0, 0.01, 4).stokes()).unwrap();
        let omega = random_scalars(stepper.workspace(), 4);
        let mut state = NSState::new(omega.clone(), 0.0);
        stepper.run(&mut state, 10).unwrap();

        let heat = HeatStepper::new(spec, HeatConfig::new(0.1, 0.01, 4)).unwrap();
        for (init, got) in [(omega.lambda, state.omega().lambda), (omega.gamma, state.omega().gamma)] {
            let mut hs = HeatState::new(init, 0.0);
            heat.run(&mut hs, None, 10, 10).unwrap();
            assert!(hs.current().max_diff(&got) < 1e-12);
        }
    }

    #[test]
    fn zero_vorticity_stays_zero() {
        let spec = GridSpec::new(8, 8, 8).unwrap();
        let stepper = NsStepper::new(spec, NsConfig::new(100.0, 0.01, 2)).unwrap();
        let mut state = NSState::new(PTScalars::zeros(spec), 0.0);
        stepper.run(&mut state, 3).unwrap();
        assert_eq!(state.omega().max_abs(), 0.0);
        assert_eq!(state.steps_taken(), 3);
    }

    #[test]
    fn bootstrap_fills_history() {
        let spec = GridSpec::new(8, 8, 8).unwrap();
        let stepper = NsStepper::new(spec, NsConfig::new(100.0, 0.01, 3)).unwrap();
        let omega = random_scalars(stepper.workspace(), 1);
        let state = stepper.bootstrap(omega, 0.0).unwrap();
        assert_eq!(state.history_len(), 3);
        assert!((state.time() - 0.02).abs() < 1e-15);
    }
}
