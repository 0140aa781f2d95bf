//! ADI iteration for banded Sylvester equations `A·X·B + C·X·D = E`.
//!
//! With `Ã = C⁻¹A` and `B̃ = -D·B⁻¹` the equation is `Ã·X − X·B̃ = C⁻¹·E·B⁻¹`.
//! When the spectra of `Ã` and `B̃` lie in disjoint real intervals `[a, b]`
//! and `[c, d]`, shifts built from Zolotarev's rational approximation give
//! geometric convergence. Each iteration is two half-steps:
//!
//! ```text
//! C·X½·(p·B + D)   = (A − p·C)·Xⱼ·B − E          p ∈ [a, b]
//! (A − q·C)·Xⱼ₊₁·B = E + C·X½·(D + q·B)          q ∈ [c, d]
//! ```

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::special::{elliptic_k_complement, jacobi_dn_complement, mobius_from_points};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest `m·n` the dense Kronecker oracle accepts.
pub const DENSE_LIMIT: usize = 4096;

/// `A·X·B + C·X·D = E` with `X` and `E` column-major `m × n`.
#[derive(Debug, Clone)]
pub struct SylvesterProblem {
    pub a: BandedMatrix,
    pub b: BandedMatrix,
    pub c: BandedMatrix,
    pub d: BandedMatrix,
    pub e: Vec<Complex64>,
}

impl SylvesterProblem {
    pub fn new(
        a: BandedMatrix,
        b: BandedMatrix,
        c: BandedMatrix,
        d: BandedMatrix,
        e: Vec<Complex64>,
    ) -> Result<Self> {
        check_dimensions(&a, &b, &c, &d)?;
        if e.len() != a.rows() * b.rows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries, expected {}",
                e.len(),
                a.rows() * b.rows()
            )));
        }
        Ok(Self { a, b, c, d, e })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        sylvester_apply(&self.a, &self.b, &self.c, &self.d, x)
    }

    /// `‖A·X·B + C·X·D − E‖_F / ‖E‖_F`, or the absolute residual when `E = 0`.
    pub fn relative_residual(&self, x: &[Complex64]) -> f64 {
        relative_residual(&self.a, &self.b, &self.c, &self.d, &self.e, x)
    }
}

fn check_dimensions(a: &BandedMatrix, b: &BandedMatrix, c: &BandedMatrix, d: &BandedMatrix) -> Result<()> {
    let m = a.rows();
    let n = b.rows();
    let square = |x: &BandedMatrix, k: usize| x.rows() == k && x.cols() == k;
    if !(square(a, m) && square(c, m) && square(b, n) && square(d, n)) {
        return Err(Error::DimensionMismatch(format!(
            "A {}x{}, C {}x{} must be m x m; B {}x{}, D {}x{} must be n x n",
            a.rows(),
            a.cols(),
            c.rows(),
            c.cols(),
            b.rows(),
            b.cols(),
            d.rows(),
            d.cols()
        )));
    }
    Ok(())
}

pub(crate) fn sylvester_apply(
    a: &BandedMatrix,
    b: &BandedMatrix,
    c: &BandedMatrix,
    d: &BandedMatrix,
    x: &[Complex64],
) -> Vec<Complex64> {
    let m = a.rows();
    let n = b.rows();
    let mut out = b.mul_right(&a.mul_left(x, n), m);
    if !c.bands().is_empty() && !d.bands().is_empty() {
        let second = d.mul_right(&c.mul_left(x, n), m);
        out.iter_mut().zip(second).for_each(|(o, s)| *o += s);
    }
    out
}

fn frobenius(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn relative_residual(
    a: &BandedMatrix,
    b: &BandedMatrix,
    c: &BandedMatrix,
    d: &BandedMatrix,
    e: &[Complex64],
    x: &[Complex64],
) -> f64 {
    let r = sylvester_apply(a, b, c, d, x);
    let num = r
        .iter()
        .zip(e)
        .map(|(u, v)| (u - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den = frobenius(e);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Smallest and largest eigenvalue of `C⁻¹·A`, by a dense eigensolve.
pub fn spectral_bounds(a: &BandedMatrix, c: &BandedMatrix) -> Result<(f64, f64)> {
    if a.rows() != c.rows() || a.cols() != c.cols() || a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("spectral bounds need square A, C of equal size".into()));
    }
    let lu = c.to_dense().lu();
    let m = lu
        .solve(&a.to_dense())
        .ok_or_else(|| Error::Singular("C is singular".into()))?;
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("C is singular".into()));
    }
    real_spectrum(&m)
}

/// Smallest and largest eigenvalue of `−D·B⁻¹` (equivalently of `−B⁻¹·D`).
pub fn spectral_bounds_right(b: &BandedMatrix, d: &BandedMatrix) -> Result<(f64, f64)> {
    spectral_bounds(&d.scaled(-1.0), b)
}

fn real_spectrum(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    let eig: DVector<Complex<f64>> = m.complex_eigenvalues();
    let radius = eig.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in eig.iter() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Singular("non-finite eigenvalue".into()));
        }
        if v.im.abs() > 1e-6 * radius.max(f64::MIN_POSITIVE) {
            return Err(Error::NonRealSpectrum { re: v.re, im: v.im });
        }
        lo = lo.min(v.re);
        hi = hi.max(v.re);
    }
    Ok((lo, hi))
}

/// Shift parameters for one pair of spectral intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPlan {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Cross-ratio `|c−a||d−b| / (|c−b||d−a|)`.
    pub gamma_cr: f64,
    pub alpha_z: f64,
    pub modulus: f64,
    /// `k' = 1/α`, kept separately since `k` rounds to 1 for wide intervals.
    pub complement: f64,
    pub iterations: usize,
    /// Shifts in `[a, b]`.
    pub u: Vec<f64>,
    /// Shifts in `[c, d]`.
    pub v: Vec<f64>,
}

/// Iteration count `⌈log(16γ)·log(4/tol)/π²⌉`.
pub fn iteration_count(gamma: f64, tol: f64) -> usize {
    let j = ((16.0 * gamma).ln() * (4.0 / tol).ln() / (PI * PI)).ceil();
    (j as usize).max(1)
}

pub fn compute_shifts(ab: (f64, f64), cd: (f64, f64), tol: f64) -> Result<ShiftPlan> {
    let (a, b) = ab;
    let (c, d) = cd;
    if ![a, b, c, d, tol].iter().all(|v| v.is_finite()) || a > b || c > d {
        return Err(Error::Domain(format!(
            "intervals must be finite and ordered, got [{a}, {b}] and [{c}, {d}]"
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    if !(b < c || d < a) {
        return Err(Error::OverlappingIntervals { a, b, c, d });
    }
    if a == b || c == d {
        // a point spectrum on either side is annihilated by a single shift there
        return Ok(ShiftPlan {
            a,
            b,
            c,
            d,
            gamma_cr: f64::INFINITY,
            alpha_z: f64::INFINITY,
            modulus: 1.0,
            complement: 0.0,
            iterations: 1,
            u: vec![0.5 * (a + b)],
            v: vec![0.5 * (c + d)],
        });
    }
    let gamma = (c - a).abs() * (d - b).abs() / ((c - b).abs() * (d - a).abs());
    let alpha = -1.0 + 2.0 * gamma + 2.0 * (gamma * gamma - gamma).sqrt();
    let complement = 1.0 / alpha;
    let modulus = ((1.0 - complement) * (1.0 + complement)).sqrt();
    let quarter = elliptic_k_complement(complement)?;
    let iterations = iteration_count(gamma, tol);
    let map = mobius_from_points([-alpha, -1.0, 1.0, alpha], [a, b, c, d])?;
    let mut u = Vec::with_capacity(iterations);
    let mut v = Vec::with_capacity(iterations);
    for j in 0..iterations {
        let arg = (2 * j + 1) as f64 / (2 * iterations) as f64 * quarter;
        let dn = jacobi_dn_complement(arg, complement)?;
        u.push(map.apply_real(-alpha * dn).clamp(a, b));
        v.push(map.apply_real(alpha * dn).clamp(c, d));
    }
    Ok(ShiftPlan {
        a,
        b,
        c,
        d,
        gamma_cr: gamma,
        alpha_z: alpha,
        modulus,
        complement,
        iterations,
        u,
        v,
    })
}

/// Convergence controls for [`AdiSolver::solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiOptions {
    pub tol: f64,
    /// Total iterations are capped at `max_sweeps · J`.
    pub max_sweeps: usize,
    /// Record the relative residual after every iteration.
    pub record_history: bool,
}

impl Default for AdiOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_sweeps: 4,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdiSolution {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Factorizations for one Sylvester operator and shift plan, reusable
/// across right-hand sides.
#[derive(Debug, Clone)]
pub struct AdiSolver {
    a: BandedMatrix,
    b: BandedMatrix,
    c: BandedMatrix,
    d: BandedMatrix,
    plan: ShiftPlan,
    b_lu: BandedLu,
    c_lu: BandedLu,
    left: Vec<BandedLu>,
    right: Vec<BandedLu>,
    operator_scale: f64,
}

impl AdiSolver {
    pub fn new(
        a: BandedMatrix,
        b: BandedMatrix,
        c: BandedMatrix,
        d: BandedMatrix,
        plan: ShiftPlan,
    ) -> Result<Self> {
        check_dimensions(&a, &b, &c, &d)?;
        let b_lu = b.lu().map_err(|_| Error::Singular("B is singular".into()))?;
        let c_lu = c.lu().map_err(|_| Error::Singular("C is singular".into()))?;
        let mut left = Vec::with_capacity(plan.iterations);
        let mut right = Vec::with_capacity(plan.iterations);
        for j in 0..plan.iterations {
            let shifted = a.add_scaled(-plan.v[j], &c);
            left.push(shifted.lu().map_err(|_| Error::SingularShift { iteration: j })?);
            let shifted = d.add_scaled(plan.u[j], &b);
            right.push(shifted.lu().map_err(|_| Error::SingularShift { iteration: j })?);
        }
        let operator_scale = a.frobenius_norm() * b.frobenius_norm() + c.frobenius_norm() * d.frobenius_norm();
        Ok(Self {
            a,
            b,
            c,
            d,
            plan,
            b_lu,
            c_lu,
            left,
            right,
            operator_scale,
        })
    }

    /// Computes bounds and shifts for the operator, then factors it.
    pub fn plan_and_build(
        a: BandedMatrix,
        b: BandedMatrix,
        c: BandedMatrix,
        d: BandedMatrix,
        tol: f64,
    ) -> Result<Self> {
        let ab = spectral_bounds(&a, &c)?;
        let cd = spectral_bounds_right(&b, &d)?;
        let plan = compute_shifts(ab, cd, tol)?;
        Self::new(a, b, c, d, plan)
    }

    pub fn plan(&self) -> &ShiftPlan {
        &self.plan
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    fn iterate(&self, j: usize, x: &mut Vec<Complex64>, e: &[Complex64], scratch: &mut Vec<Complex64>) {
        let m = self.m();
        let n = self.n();
        let p = self.plan.u[j];
        let q = self.plan.v[j];

        // C·X½·(p·B + D) = (A − p·C)·Xⱼ·B − E
        let mut t = self.a.mul_left(x, n);
        let cx = self.c.mul_left(x, n);
        t.iter_mut().zip(&cx).for_each(|(u, v)| *u -= v * p);
        let mut t = self.b.mul_right(&t, m);
        t.iter_mut().zip(e).for_each(|(u, v)| *u -= v);
        self.c_lu.solve_left(&mut t);
        self.right[j].solve_right(&mut t, m, scratch);

        // (A − q·C)·Xⱼ₊₁·B = E + C·X½·(D + q·B)
        let cx = self.c.mul_left(&t, n);
        let mut w = self.d.mul_right(&cx, m);
        let wb = self.b.mul_right(&cx, m);
        w.iter_mut()
            .zip(wb.iter().zip(e))
            .for_each(|(u, (v, f))| *u += v * q + f);
        self.left[j].solve_left(&mut w);
        self.b_lu.solve_right(&mut w, m, scratch);
        *x = w;
    }

    /// Runs ADI from `X₀ = 0`. After the planned `J` iterations the residual
    /// is checked; further sweeps through the shifts run while it is above
    /// `tol` and above the rounding floor of the operator.
    pub fn solve(&self, e: &[Complex64], opts: &AdiOptions) -> Result<AdiSolution> {
        let m = self.m();
        let n = self.n();
        if e.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries, expected {}",
                e.len(),
                m * n
            )));
        }
        let mut x = vec![Complex64::default(); m * n];
        let enorm = frobenius(e);
        if enorm == 0.0 {
            return Ok(AdiSolution {
                x,
                iterations: 0,
                residual: 0.0,
                history: Vec::new(),
            });
        }
        let jmax = self.plan.iterations;
        let mut scratch = Vec::new();
        let mut history = Vec::new();
        let mut count = 0;
        let mut residual = f64::INFINITY;
        for _sweep in 0..opts.max_sweeps.max(1) {
            for j in 0..jmax {
                self.iterate(j, &mut x, e, &mut scratch);
                count += 1;
                if opts.record_history {
                    history.push(self.residual(e, &x));
                }
            }
            if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::NotConverged {
                    iterations: count,
                    residual: f64::NAN,
                    history,
                });
            }
            residual = match history.last() {
                Some(&r) if opts.record_history => r,
                _ => self.residual(e, &x),
            };
            if residual <= opts.tol || residual <= self.rounding_floor(&x, enorm) {
                return Ok(AdiSolution {
                    x,
                    iterations: count,
                    residual,
                    history,
                });
            }
        }
        if residual <= 10.0 * opts.tol {
            return Ok(AdiSolution {
                x,
                iterations: count,
                residual,
                history,
            });
        }
        if history.is_empty() {
            history.push(residual);
        }
        Err(Error::NotConverged {
            iterations: count,
            residual,
            history,
        })
    }

    fn residual(&self, e: &[Complex64], x: &[Complex64]) -> f64 {
        relative_residual(&self.a, &self.b, &self.c, &self.d, e, x)
    }

    /// Relative residual attainable in floating point for this `X`.
    fn rounding_floor(&self, x: &[Complex64], enorm: f64) -> f64 {
        let size = (self.m() * self.n()) as f64;
        64.0 * f64::EPSILON * size.sqrt() * self.operator_scale * frobenius(x) / enorm
    }
}

/// Plans shifts for `problem` and solves it.
pub fn adi_solve(problem: &SylvesterProblem, plan: &ShiftPlan) -> Result<Vec<Complex64>> {
    adi_solve_with(problem, plan, &AdiOptions::default()).map(|s| s.x)
}

pub fn adi_solve_with(problem: &SylvesterProblem, plan: &ShiftPlan, opts: &AdiOptions) -> Result<AdiSolution> {
    let solver = AdiSolver::new(
        problem.a.clone(),
        problem.b.clone(),
        problem.c.clone(),
        problem.d.clone(),
        plan.clone(),
    )?;
    solver.solve(&problem.e, opts)
}

/// `(Bᵀ ⊗ A + Dᵀ ⊗ C)` as a dense matrix.
pub fn kronecker_matrix(
    a: &BandedMatrix,
    b: &BandedMatrix,
    c: &BandedMatrix,
    d: &BandedMatrix,
) -> DMatrix<f64> {
    let m = a.rows();
    let n = b.rows();
    let (ad, bd, cd, dd) = (a.to_dense(), b.to_dense(), c.to_dense(), d.to_dense());
    let mut k = DMatrix::zeros(m * n, m * n);
    // vec(A X B): block (col, row) of size m×m equals B[row_idx, col_idx]·A
    for bj in 0..n {
        for bi in 0..n {
            let sb = bd[(bi, bj)];
            let sd = dd[(bi, bj)];
            if sb == 0.0 && sd == 0.0 {
                continue;
            }
            for j in 0..m {
                for i in 0..m {
                    k[(bj * m + i, bi * m + j)] = sb * ad[(i, j)] + sd * cd[(i, j)];
                }
            }
        }
    }
    k
}

/// Direct solve of the `mn × mn` Kronecker system; a test oracle.
pub fn dense_sylvester_oracle(problem: &SylvesterProblem) -> Result<Vec<Complex64>> {
    let m = problem.m();
    let n = problem.n();
    if m * n > DENSE_LIMIT {
        return Err(Error::TooLarge(format!("m·n = {} exceeds {DENSE_LIMIT}", m * n)));
    }
    let k = kronecker_matrix(&problem.a, &problem.b, &problem.c, &problem.d);
    let lu = k.lu();
    let re = DVector::from_iterator(m * n, problem.e.iter().map(|v| v.re));
    let im = DVector::from_iterator(m * n, problem.e.iter().map(|v| v.im));
    let (xr, xi) = match (lu.solve(&re), lu.solve(&im)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Singular("Kronecker system is singular".into())),
    };
    if xr.iter().chain(xi.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Singular("Kronecker system is singular".into()));
    }
    Ok(xr.iter().zip(xi.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect())
}
