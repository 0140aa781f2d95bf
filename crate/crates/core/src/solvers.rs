//! Helmholtz, Poisson and horizontal Poisson solvers with Dirichlet walls.
//!
//! Homogeneous Dirichlet conditions at `r = ±1` and `z = ±1` are built into
//! the basis `φⱼ = Tⱼ − Tⱼ₊₂`, so `X = S_r·Y·S_zᵀ` and the last two rows of
//! each direction (the ones truncation corrupts) are dropped. The reduced
//! system is still a banded Sylvester equation. Every operator here maps
//! even degrees to even and odd to odd, so each Fourier slice splits into
//! four independent parity blocks.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::adi::{sylvester_apply, AdiOptions, AdiSolver, DEFAULT_TOL};
use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::grid::{parity_project_in_place, AxisRegularizer, GridSpec};
use crate::transform::CoeffTensor;
use crate::ultraop::{assemble_helmholtz_from, assemble_poisson_from, mass_rhs, ModalOperator, OperatorSet};

/// Wall condition for Helmholtz and Poisson solves.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum BoundaryCondition {
    /// `u = 0` on the whole boundary.
    #[default]
    DirichletHomogeneous,
    /// `u = lift` on the boundary; the solution is `lift + w` with `w`
    /// vanishing there. The lift must carry the boundary data.
    DirichletLifted(CoeffTensor),
}

/// `φⱼ = Tⱼ − Tⱼ₊₂` as an `n × (n−2)` matrix.
pub fn recombination(n: usize) -> BandedMatrix {
    assert!(n >= 3, "recombination needs n >= 3");
    BandedMatrix::from_diagonals(n, n - 2, &[(0, vec![1.0; n - 2]), (-2, vec![-1.0; n - 2])])
}

/// `X = S_r·Y·S_zᵀ` for `Y` of size `(m−2) × (n−2)`.
pub fn expand_recombined(y: &[Complex64], m: usize, n: usize) -> Vec<Complex64> {
    let (mr, nr) = (m - 2, n - 2);
    let mut rows = vec![Complex64::default(); m * nr];
    for b in 0..nr {
        for a in 0..mr {
            let v = y[b * mr + a];
            rows[b * m + a] += v;
            rows[b * m + a + 2] -= v;
        }
    }
    let mut x = vec![Complex64::default(); m * n];
    for b in 0..nr {
        for j in 0..m {
            let v = rows[b * m + j];
            x[b * m + j] += v;
            x[(b + 2) * m + j] -= v;
        }
    }
    x
}

fn parity_indices(len: usize, parity: usize) -> Vec<usize> {
    (parity..len).step_by(2).collect()
}

/// One parity block of a reduced modal operator.
#[derive(Debug, Clone)]
enum BlockSolver {
    /// `C = 0` or `D = 0`: `A·Y·B = F` by two banded solves.
    Direct { a: BandedLu, b: BandedLu },
    Adi(Box<AdiSolver>),
}

#[derive(Debug, Clone)]
struct Block {
    rows: Vec<usize>,
    cols: Vec<usize>,
    solver: BlockSolver,
}

/// Outcome statistics of a modal solve.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

impl SolveStats {
    fn merge(&mut self, other: SolveStats) {
        self.iterations += other.iterations;
        self.residual = self.residual.max(other.residual);
    }
}

/// The operator acting on recombined unknowns with the last two rows of
/// each direction dropped, as `[A, B, C, D]` of sizes `m−2` and `n−2`.
pub fn reduced_operator(op: &ModalOperator) -> [BandedMatrix; 4] {
    let m = op.a.rows();
    let n = op.b.rows();
    let (sr, sz) = (recombination(m), recombination(n));
    let head = |k: usize| (0..k - 2).collect::<Vec<_>>();
    let left = |x: &BandedMatrix| x.matmul(&sr).select(&head(m), &head(m));
    // B acts from the right: S_zᵀ·B with the first n−2 columns kept
    let right = |x: &BandedMatrix| sz.transpose().matmul(x).select(&head(n), &head(n));
    [left(&op.a), right(&op.b), left(&op.c), right(&op.d)]
}

/// Factored solver for one modal Sylvester operator under homogeneous
/// Dirichlet conditions.
#[derive(Debug, Clone)]
pub struct ModalSolver {
    op: ModalOperator,
    m: usize,
    n: usize,
    blocks: Vec<Block>,
    opts: AdiOptions,
}

impl ModalSolver {
    /// Builds solvers for the radial parities in `radial` (0 even, 1 odd)
    /// and both vertical parities.
    pub fn new(op: ModalOperator, radial: &[usize], tol: f64) -> Result<Self> {
        let m = op.a.rows();
        let n = op.b.rows();
        let [ar, br, cr, dr] = reduced_operator(&op);
        let direct = op.c.bands().is_empty() || op.d.bands().is_empty();
        let mut blocks = Vec::new();
        for &rp in radial {
            for zp in 0..2 {
                let rows = parity_indices(m - 2, rp);
                let cols = parity_indices(n - 2, zp);
                if rows.is_empty() || cols.is_empty() {
                    continue;
                }
                let a = ar.select(&rows, &rows);
                let b = br.select(&cols, &cols);
                let solver = if direct {
                    BlockSolver::Direct {
                        a: a.lu()?,
                        b: b.lu()?,
                    }
                } else {
                    let c = cr.select(&rows, &rows);
                    let d = dr.select(&cols, &cols);
                    BlockSolver::Adi(Box::new(AdiSolver::plan_and_build(a, b, c, d, tol)?))
                };
                blocks.push(Block { rows, cols, solver });
            }
        }
        Ok(Self {
            op,
            m,
            n,
            blocks,
            opts: AdiOptions {
                tol,
                ..Default::default()
            },
        })
    }

    pub fn operator(&self) -> &ModalOperator {
        &self.op
    }

    /// Iteration counts `J` of the ADI blocks.
    pub fn planned_iterations(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter_map(|b| match &b.solver {
                BlockSolver::Adi(s) => Some(s.plan().iterations),
                BlockSolver::Direct { .. } => None,
            })
            .collect()
    }

    /// Solves `A·X·B + C·X·D = F` for `X` vanishing on the walls. `F` is the
    /// full `m × n` right-hand side; its last two rows and columns are not used.
    pub fn solve(&self, f: &[Complex64]) -> Result<(Vec<Complex64>, SolveStats)> {
        let (m, n) = (self.m, self.n);
        if f.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries, expected {}",
                f.len(),
                m * n
            )));
        }
        let mr = m - 2;
        let mut y = vec![Complex64::default(); mr * (n - 2)];
        let mut stats = SolveStats::default();
        let mut scratch = Vec::new();
        for block in &self.blocks {
            let (bm, bn) = (block.rows.len(), block.cols.len());
            let mut e = Vec::with_capacity(bm * bn);
            for &k in &block.cols {
                for &j in &block.rows {
                    e.push(f[k * m + j]);
                }
            }
            if e.iter().all(|v| *v == Complex64::default()) {
                continue;
            }
            let x = match &block.solver {
                BlockSolver::Direct { a, b } => {
                    let mut x = e;
                    a.solve_left(&mut x);
                    b.solve_right(&mut x, bm, &mut scratch);
                    x
                }
                BlockSolver::Adi(s) => {
                    let sol = s.solve(&e, &self.opts)?;
                    stats.merge(SolveStats {
                        iterations: sol.iterations,
                        residual: sol.residual,
                    });
                    sol.x
                }
            };
            for (bk, &k) in block.cols.iter().enumerate() {
                for (bj, &j) in block.rows.iter().enumerate() {
                    y[k * mr + j] = x[bk * bm + bj];
                }
            }
        }
        Ok((expand_recombined(&y, m, n), stats))
    }
}

/// Solves one modal Helmholtz (or any modal Sylvester) problem with the
/// given wall condition. `lift` is the `m × n` lift slice for inhomogeneous data.
pub fn solve_modal_helmholtz(
    op: &ModalOperator,
    f: &[Complex64],
    lift: Option<&[Complex64]>,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let solver = ModalSolver::new(op.clone(), &[0, 1], tol)?;
    solve_with_lift(&solver, f, lift).map(|(x, _)| x)
}

fn solve_with_lift(
    solver: &ModalSolver,
    f: &[Complex64],
    lift: Option<&[Complex64]>,
) -> Result<(Vec<Complex64>, SolveStats)> {
    match lift {
        None => solver.solve(f),
        Some(l) => {
            let op = solver.operator();
            let applied = sylvester_apply(&op.a, &op.b, &op.c, &op.d, l);
            let g: Vec<_> = f.iter().zip(applied).map(|(a, b)| a - b).collect();
            let (mut x, stats) = solver.solve(&g)?;
            x.iter_mut().zip(l).for_each(|(a, b)| *a += b);
            Ok((x, stats))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum OperatorKind {
    Helmholtz(u64),
    Poisson,
}

/// Per-run solver with cached operators and factorizations, shared across
/// time steps and Fourier modes.
#[derive(Debug)]
pub struct SpectralSolver {
    spec: GridSpec,
    rops: OperatorSet,
    zops: OperatorSet,
    tol: f64,
    parity: bool,
    axis: AxisRegularizer,
    cache: RwLock<HashMap<(OperatorKind, i64), Arc<ModalSolver>>>,
}

impl SpectralSolver {
    pub fn new(spec: GridSpec) -> Self {
        Self::with_tolerance(spec, DEFAULT_TOL)
    }

    pub fn with_tolerance(spec: GridSpec, tol: f64) -> Self {
        Self {
            spec,
            rops: OperatorSet::new(spec.m()),
            zops: OperatorSet::new(spec.n()),
            tol,
            parity: true,
            axis: AxisRegularizer::new(spec),
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// With parity enforcement off, both radial parities are solved and
    /// neither inputs nor outputs are projected.
    pub fn with_parity(mut self, parity: bool) -> Self {
        self.parity = parity;
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn radial_ops(&self) -> &OperatorSet {
        &self.rops
    }

    pub fn vertical_ops(&self) -> &OperatorSet {
        &self.zops
    }

    fn modal(&self, kind: OperatorKind, q: i64) -> Result<Arc<ModalSolver>> {
        let key = (kind, q.abs());
        if let Some(s) = self.cache.read().expect("solver cache poisoned").get(&key) {
            return Ok(s.clone());
        }
        let op = match kind {
            OperatorKind::Helmholtz(bits) => assemble_helmholtz_from(&self.rops, &self.zops, q, f64::from_bits(bits)),
            OperatorKind::Poisson => assemble_poisson_from(&self.rops, &self.zops, q),
        };
        let radial: &[usize] = if self.parity {
            if q.rem_euclid(2) == 0 {
                &[0]
            } else {
                &[1]
            }
        } else {
            &[0, 1]
        };
        let solver = Arc::new(ModalSolver::new(op, radial, self.tol).map_err(|e| e.in_mode(q))?);
        self.cache
            .write()
            .expect("solver cache poisoned")
            .entry(key)
            .or_insert_with(|| solver.clone());
        Ok(solver)
    }

    /// Modal solver for `r²(1 − scale·∇²)` on wavenumber `q`.
    pub fn helmholtz_mode(&self, q: i64, scale: f64) -> Result<Arc<ModalSolver>> {
        self.modal(OperatorKind::Helmholtz(scale.to_bits()), q)
    }

    pub fn poisson_mode(&self, q: i64) -> Result<Arc<ModalSolver>> {
        self.modal(OperatorKind::Poisson, q)
    }

    /// Multiplies every slice by the mass pair, `R2·F·C02ᵀ`.
    pub fn mass(&self, f: &CoeffTensor) -> CoeffTensor {
        let spec = *f.spec();
        let mut out = CoeffTensor::zeros(spec);
        for l in 0..spec.p() {
            let r = mass_rhs(&self.rops, &self.zops, f.slice(l));
            out.slice_mut(l).copy_from_slice(&r);
        }
        out
    }

    /// Solves `(1 − scale·∇²)u = rhs` with `rhs` given as plain coefficients.
    pub fn helmholtz(
        &self,
        rhs: &CoeffTensor,
        scale: f64,
        bc: &BoundaryCondition,
    ) -> Result<(CoeffTensor, SolveStats)> {
        let f = self.mass(rhs);
        self.solve_all(OperatorKind::Helmholtz(scale.to_bits()), &f, bc)
    }

    /// Same as [`Self::helmholtz`] with the right-hand side already multiplied
    /// by the mass pair.
    pub fn helmholtz_premultiplied(
        &self,
        f: &CoeffTensor,
        scale: f64,
        bc: &BoundaryCondition,
    ) -> Result<(CoeffTensor, SolveStats)> {
        self.solve_all(OperatorKind::Helmholtz(scale.to_bits()), f, bc)
    }

    /// Solves `∇²u = rhs`.
    pub fn poisson(&self, rhs: &CoeffTensor, bc: &BoundaryCondition) -> Result<(CoeffTensor, SolveStats)> {
        let f = self.mass(rhs);
        self.solve_all(OperatorKind::Poisson, &f, bc)
    }

    fn solve_all(
        &self,
        kind: OperatorKind,
        f: &CoeffTensor,
        bc: &BoundaryCondition,
    ) -> Result<(CoeffTensor, SolveStats)> {
        let spec = self.spec;
        if *f.spec() != spec {
            return Err(Error::DimensionMismatch("right-hand side grid differs from solver grid".into()));
        }
        if f.data().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            let idx = f.data().iter().position(|v| !v.re.is_finite() || !v.im.is_finite());
            return Err(Error::NonFinite(idx.unwrap_or(0)));
        }
        let lift = match bc {
            BoundaryCondition::DirichletHomogeneous => None,
            BoundaryCondition::DirichletLifted(l) => {
                if *l.spec() != spec {
                    return Err(Error::DimensionMismatch("lift grid differs from solver grid".into()));
                }
                Some(l)
            }
        };
        let mut f = f.clone();
        if self.parity {
            parity_project_in_place(&mut f, 0);
        }
        let p = spec.p();
        let mirrored: Vec<Option<usize>> = (0..p)
            .map(|l| {
                let q = spec.wavenumber(l);
                let partner = spec.slice_of(-q)?;
                let lift_mirrors = lift.is_none_or(|t| is_conjugate(t.slice(l), t.slice(partner)));
                (q < 0 && lift_mirrors && is_conjugate(f.slice(l), f.slice(partner))).then_some(partner)
            })
            .collect();
        let solve_one = |l: usize| -> Result<(Vec<Complex64>, SolveStats)> {
            let q = spec.wavenumber(l);
            let solver = match kind {
                OperatorKind::Helmholtz(_) | OperatorKind::Poisson => self.modal(kind, q)?,
            };
            solve_with_lift(&solver, f.slice(l), lift.map(|t| t.slice(l))).map_err(|e| e.in_mode(q))
        };
        let todo: Vec<usize> = (0..p).filter(|&l| mirrored[l].is_none()).collect();
        let results = map_slices(&todo, solve_one)?;
        let mut out = CoeffTensor::zeros(spec);
        let mut stats = SolveStats::default();
        for (&l, (x, s)) in todo.iter().zip(results) {
            out.slice_mut(l).copy_from_slice(&x);
            stats.merge(s);
        }
        for l in 0..p {
            if let Some(partner) = mirrored[l] {
                let src: Vec<_> = out.slice(partner).iter().map(|v| v.conj()).collect();
                out.slice_mut(l).copy_from_slice(&src);
            }
        }
        if self.parity {
            parity_project_in_place(&mut out, 0);
            self.axis.apply(&mut out);
        }
        Ok((out, stats))
    }
}

fn is_conjugate(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == y.conj())
}

#[cfg(feature = "parallel")]
pub(crate) fn map_slices<T, F>(items: &[usize], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(|&l| f(l)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slices<T, F>(items: &[usize], f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    items.iter().map(|&l| f(l)).collect()
}

/// Solves `∇²u = f` with the given wall condition.
pub fn solve_poisson_3d(f: &CoeffTensor, bc: &BoundaryCondition) -> Result<CoeffTensor> {
    SpectralSolver::new(*f.spec()).poisson(f, bc).map(|(u, _)| u)
}

/// Column solver for `Δ_h u = rhs` with `u(±1) = 0`, one banded LU per
/// wavenumber.
#[derive(Debug)]
pub struct HorizontalPoisson {
    spec: GridSpec,
    rops: OperatorSet,
    r2_c02: BandedMatrix,
    lus: Vec<BandedLu>,
    axis: AxisRegularizer,
}

impl HorizontalPoisson {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let m = spec.m();
        let rops = OperatorSet::new(m);
        let sr = recombination(m);
        let head: Vec<usize> = (0..m - 2).collect();
        let qmax = spec.p() / 2;
        let lus = (0..=qmax as i64)
            .map(|q| {
                let reduced = rops.radial_laplacian(q).matmul(&sr).select(&head, &head);
                reduced.lu().map_err(|e| e.in_mode(q))
            })
            .collect::<Result<Vec<_>>>()?;
        let r2_c02 = rops.r_sq.matmul(&rops.c02).trimmed();
        Ok(Self {
            spec,
            rops,
            r2_c02,
            lus,
            axis: AxisRegularizer::new(spec),
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn radial_ops(&self) -> &OperatorSet {
        &self.rops
    }

    pub fn solve(&self, rhs: &CoeffTensor) -> Result<CoeffTensor> {
        let spec = self.spec;
        if *rhs.spec() != spec {
            return Err(Error::DimensionMismatch("right-hand side grid differs from solver grid".into()));
        }
        let (m, n) = (spec.m(), spec.n());
        let mut out = CoeffTensor::zeros(spec);
        let mut col = vec![Complex64::default(); m];
        for l in 0..spec.p() {
            let q = spec.wavenumber(l);
            let lu = &self.lus[q.unsigned_abs() as usize];
            let src = rhs.slice(l);
            let dst = out.slice_mut(l);
            for k in 0..n {
                let input = &src[k * m..(k + 1) * m];
                if input.iter().all(|v| *v == Complex64::default()) {
                    continue;
                }
                self.r2_c02.matvec(input, &mut col);
                let mut y = col[..m - 2].to_vec();
                lu.solve_in_place(&mut y);
                let out_col = &mut dst[k * m..(k + 1) * m];
                for (a, v) in y.iter().enumerate() {
                    out_col[a] += *v;
                    out_col[a + 2] -= *v;
                }
            }
            self.axis.apply_slice(q, dst);
        }
        Ok(out)
    }
}

/// Solves `Δ_h u = rhs` column by column with `u(±1) = 0`.
pub fn solve_horizontal_poisson(rhs: &CoeffTensor) -> Result<CoeffTensor> {
    HorizontalPoisson::new(*rhs.spec())?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridField;
    use crate::transform::{analyze, evaluate_at, synthesize};
    use crate::ultraop::{assemble_modal_helmholtz, assemble_modal_poisson};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(m: usize, n: usize, p: usize) -> GridSpec {
        GridSpec::new(m, n, p).unwrap()
    }

    fn max_err(a: &GridField, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let b = GridField::from_fn(*a.spec(), f);
        a.values().iter().zip(b.values()).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
    }

    #[test]
    fn recombination_vanishes_on_walls() {
        let m = 8;
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y: Vec<Complex64> = (0..(m - 2) * (n - 2)).map(|_| Complex64::new(rng.gen(), 0.0)).collect();
        let x = expand_recombined(&y, m, n);
        let s = spec(m, n, 2);
        let mut c = CoeffTensor::zeros(s);
        c.slice_mut(1).copy_from_slice(&x);
        for t in [-1.0, -0.3, 0.4, 1.0] {
            assert!(evaluate_at(&c, (1.0, t, 0.0)).norm() < 1e-13);
            assert!(evaluate_at(&c, (-1.0, t, 0.0)).norm() < 1e-13);
            assert!(evaluate_at(&c, (t, 1.0, 0.0)).norm() < 1e-13);
            assert!(evaluate_at(&c, (t, -1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_rhs() {
        let s = spec(10, 10, 4);
        let f = CoeffTensor::zeros(s);
        let (u, _) = SpectralSolver::new(s).helmholtz(&f, 0.1, &BoundaryCondition::default()).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(solve_poisson_3d(&f, &BoundaryCondition::default()).unwrap().max_abs(), 0.0);
        assert_eq!(solve_horizontal_poisson(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn manufactured_helmholtz() {
        // u = (1−r²)(1−z²): ∇²u = −4(1−z²) − 2(1−r²)
        let s = spec(12, 12, 4);
        let ka = 0.3;
        let u = |r: f64, z: f64, _t: f64| (1.0 - r * r) * (1.0 - z * z);
        let rhs = |r: f64, z: f64, t: f64| u(r, z, t) - ka * (-4.0 * (1.0 - z * z) - 2.0 * (1.0 - r * r));
        let f = analyze(&GridField::from_fn(s, rhs)).unwrap();
        let (x, stats) = SpectralSolver::new(s).helmholtz(&f, ka, &BoundaryCondition::default()).unwrap();
        let expect = analyze(&GridField::from_fn(s, u)).unwrap();
        assert!(x.max_diff(&expect) < 1e-10, "{}", x.max_diff(&expect));
        assert!(stats.residual <= 1e-11);
    }

    #[test]
    fn modal_solve_with_lift() {
        // u = 1 + (1−r²)(1−z²)z with lift 1
        let s = spec(10, 10, 2);
        let ka = 0.5;
        let u = |r: f64, z: f64, _t: f64| 1.0 + (1.0 - r * r) * (1.0 - z * z) * z;
        let lap = |r: f64, z: f64| -4.0 * (1.0 - z * z) * z + (1.0 - r * r) * (-6.0 * z);
        let rhs = |r: f64, z: f64, t: f64| u(r, z, t) - ka * lap(r, z);
        let f = analyze(&GridField::from_fn(s, rhs)).unwrap();
        let solver = SpectralSolver::new(s);
        let lift = analyze(&GridField::from_fn(s, |_, _, _| 1.0)).unwrap();
        let (x, _) = solver
            .helmholtz(&f, ka, &BoundaryCondition::DirichletLifted(lift.clone()))
            .unwrap();
        assert!(max_err(&synthesize(&x), u) < 1e-10);

        let l = s.slice_of(0).unwrap();
        let op = assemble_modal_helmholtz(&s, 0, ka);
        let fm = solver.mass(&f);
        let xm = solve_modal_helmholtz(&op, fm.slice(l), Some(lift.slice(l)), 1e-12).unwrap();
        let diff = xm.iter().zip(x.slice(l)).fold(0.0f64, |a, (p, q)| a.max((p - q).norm()));
        assert!(diff < 1e-10);
    }

    #[test]
    fn scale_zero_inverts_mass() {
        let s = spec(9, 8, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op = assemble_modal_helmholtz(&s, 0, 0.0);
        let (m, n) = (9, 8);
        let y: Vec<Complex64> = (0..(m - 2) * (n - 2)).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let x0 = expand_recombined(&y, m, n);
        let f = op.apply(&x0);
        let x = solve_modal_helmholtz(&op, &f, None, 1e-12).unwrap();
        let diff = x.iter().zip(&x0).fold(0.0f64, |a, (p, q)| a.max((p - q).norm()));
        assert!(diff < 1e-11, "{diff}");
    }

    #[test]
    fn poisson_radial() {
        // ∇²(1−r²) = −4, but 1−r² does not vanish at z = ±1; use a lift
        let s = spec(8, 6, 2);
        let lift = analyze(&GridField::from_fn(s, |r, _, _| 1.0 - r * r)).unwrap();
        let f = analyze(&GridField::from_fn(s, |_, _, _| -4.0)).unwrap();
        let u = solve_poisson_3d(&f, &BoundaryCondition::DirichletLifted(lift.clone())).unwrap();
        assert!(u.max_diff(&lift) < 1e-12);
    }

    #[test]
    fn poisson_theta_dependent() {
        // g = r cosθ (1−r²)(1−z²); Δ_h[r cosθ(1−r²)] = −8 r cosθ
        let s = spec(16, 16, 8);
        let g = |r: f64, z: f64, t: f64| r * t.cos() * (1.0 - r * r) * (1.0 - z * z);
        let lap = |r: f64, z: f64, t: f64| {
            let x = r * t.cos();
            -8.0 * x * (1.0 - z * z) - 2.0 * x * (1.0 - r * r)
        };
        let f = analyze(&GridField::from_fn(s, lap)).unwrap();
        let u = solve_poisson_3d(&f, &BoundaryCondition::default()).unwrap();
        assert!(max_err(&synthesize(&u), g) < 1e-9);
    }

    #[test]
    fn poisson_boundary_rows_exact() {
        let s = spec(12, 10, 6);
        let f = analyze(&GridField::from_fn(s, |r, z, t| (r * t.sin() + z).exp())).unwrap();
        let u = solve_poisson_3d(&f, &BoundaryCondition::default()).unwrap();
        for t in [0.1, 1.3, 2.9] {
            for x in [-0.9, 0.2, 0.7] {
                assert!(evaluate_at(&u, (1.0, x, t)).norm() < 1e-12);
                assert!(evaluate_at(&u, (x, 1.0, t)).norm() < 1e-12);
                assert!(evaluate_at(&u, (x, -1.0, t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn modal_poisson_oracle_identities() {
        let s = spec(10, 6, 4);
        // ℓ = 0 applied to 1−r² gives r²·(−4) in mass form
        let op = assemble_modal_poisson(&s, 0);
        let x = analyze(&GridField::from_fn(s, |r, _, _| 1.0 - r * r)).unwrap();
        let l = s.slice_of(0).unwrap();
        let lhs = op.apply(x.slice(l));
        let rops = OperatorSet::new(10);
        let zops = OperatorSet::new(6);
        let four = analyze(&GridField::from_fn(s, |_, _, _| -4.0)).unwrap();
        let rhs = mass_rhs(&rops, &zops, four.slice(l));
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-12);
        }
        // wavenumber 1 applied to r: (∂r² + r⁻¹∂r − r⁻²) r = 0
        let op1 = assemble_modal_poisson(&s, 1);
        let r = analyze(&GridField::from_fn(s, |r, _, _| r)).unwrap();
        assert!(op1.apply(r.slice(l)).iter().all(|v| v.norm() < 1e-13));
        assert!(op1.apply(&vec![Complex64::default(); 60]).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn helmholtz_unit_applied_to_constant() {
        let s = spec(8, 8, 2);
        let op = assemble_modal_helmholtz(&s, 0, 1.0);
        let one = analyze(&GridField::from_fn(s, |_, _, _| 1.0)).unwrap();
        let l = s.slice_of(0).unwrap();
        let lhs = op.apply(one.slice(l));
        let rops = OperatorSet::new(8);
        let zops = OperatorSet::new(8);
        let expect = mass_rhs(&rops, &zops, one.slice(l));
        for (a, b) in lhs.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn horizontal_poisson_examples() {
        let s = spec(10, 6, 4);
        let rhs = analyze(&GridField::from_fn(s, |_, _, _| -1.0)).unwrap();
        let u = solve_horizontal_poisson(&rhs).unwrap();
        let expect = analyze(&GridField::from_fn(s, |r, _, _| (1.0 - r * r) / 4.0)).unwrap();
        assert!(u.max_diff(&expect) < 1e-13);
        for l in 0..s.p() {
            for k in 1..s.n() {
                for j in 0..s.m() {
                    assert!(u.get(j, k, l).norm() < 1e-15);
                }
            }
        }
        // θ-dependent: Δ_h[x(1−r²)] = −8x, times a z profile
        let rhs = analyze(&GridField::from_fn(s, |r, z, t| -8.0 * r * t.cos() * z)).unwrap();
        let u = solve_horizontal_poisson(&rhs).unwrap();
        let expect = analyze(&GridField::from_fn(s, |r, z, t| r * t.cos() * (1.0 - r * r) * z)).unwrap();
        assert!(u.max_diff(&expect) < 1e-12);
    }

    #[test]
    fn linearity_and_mode_decoupling() {
        let s = spec(10, 10, 6);
        let solver = SpectralSolver::new(s);
        let a = analyze(&GridField::from_fn(s, |r, z, t| (r * t.cos() + z * z).sin())).unwrap();
        let b = analyze(&GridField::from_fn(s, |r, z, t| (r * r * (2.0 * t).cos() - z).cos())).unwrap();
        let bc = BoundaryCondition::default();
        let (ua, _) = solver.helmholtz(&a, 0.2, &bc).unwrap();
        let (ub, _) = solver.helmholtz(&b, 0.2, &bc).unwrap();
        let mut ab = a.clone();
        ab.add_scaled(-2.5, &b);
        let (uab, _) = solver.helmholtz(&ab, 0.2, &bc).unwrap();
        let mut expect = ua.clone();
        expect.add_scaled(-2.5, &ub);
        assert!(uab.max_diff(&expect) < 1e-12);

        let l = s.slice_of(2).unwrap();
        let mut pert = a.clone();
        pert.slice_mut(l)[0] += Complex64::new(0.1, 0.0);
        let (up, _) = solver.helmholtz(&pert, 0.2, &bc).unwrap();
        for other in 0..s.p() {
            if other != l {
                let d = up.slice(other).iter().zip(ua.slice(other)).fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()));
                assert!(d == 0.0, "slice {other} changed by {d}");
            }
        }
    }

    #[test]
    fn poisson_geometric_convergence() {
        use crate::manufactured::{poisson_forcing, poisson_solution};
        let mut errs = Vec::new();
        for size in [8usize, 12, 16, 20, 24] {
            let s = spec(size, size, 8);
            let f = analyze(&GridField::from_fn(s, poisson_forcing)).unwrap();
            let u = solve_poisson_3d(&f, &BoundaryCondition::default()).unwrap();
            errs.push(max_err(&synthesize(&u), poisson_solution));
        }
        assert!(errs.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-12), "{errs:?}");
        assert!(errs[4] < 1e-10, "{errs:?}");
    }
}
