//! Sparse ultraspherical operators and the modal Sylvester operators built
//! from them.
//!
//! Coefficient vectors are in the Chebyshev `T` basis; differentiation maps
//! them into the `U = C⁽¹⁾` or `C⁽²⁾` bases, where the operators are banded.
//! The multiplication operator `R` acts on `C⁽²⁾` coefficients.

use num_complex::Complex64;

pub use crate::banded::BandedMatrix;
use crate::grid::GridSpec;

/// `T → U` conversion: `T₀ = U₀`, `T₁ = U₁/2`, `T_k = (U_k − U_{k−2})/2`.
pub fn build_conversion_01(n: usize) -> BandedMatrix {
    assert!(n >= 2, "conversion needs n >= 2");
    let mut main = vec![0.5; n];
    main[0] = 1.0;
    BandedMatrix::from_diagonals(n, n, &[(0, main), (2, vec![-0.5; n.saturating_sub(2)])])
}

/// `U → C⁽²⁾` conversion: `U_k = (C⁽²⁾_k − C⁽²⁾_{k−2}) / (k+1)`.
pub fn build_conversion_12(n: usize) -> BandedMatrix {
    assert!(n >= 2, "conversion needs n >= 2");
    let main = (0..n).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let upper = (2..n).map(|k| -1.0 / (k as f64 + 1.0)).collect();
    BandedMatrix::from_diagonals(n, n, &[(0, main), (2, upper)])
}

/// `T → C⁽²⁾` conversion, `C12 · C01`.
pub fn build_conversion_02(n: usize) -> BandedMatrix {
    build_conversion_12(n).matmul(&build_conversion_01(n)).trimmed()
}

/// Multiplication by `x` on `C⁽²⁾` coefficients, from
/// `x C_k = [(k+1) C_{k+1} + (k+3) C_{k−1}] / (2(k+2))`.
pub fn build_multiplication_r(n: usize) -> BandedMatrix {
    assert!(n >= 2, "multiplication needs n >= 2");
    let upper = (1..n)
        .map(|k| (k as f64 + 3.0) / (2.0 * (k as f64 + 2.0)))
        .collect();
    let lower = (0..n - 1)
        .map(|k| (k as f64 + 1.0) / (2.0 * (k as f64 + 2.0)))
        .collect();
    BandedMatrix::from_diagonals(n, n, &[(-1, lower), (1, upper)])
}

/// `∂ₓ` from `T` to `U`: `T_k' = k U_{k−1}`.
pub fn build_derivative_1(n: usize) -> BandedMatrix {
    assert!(n >= 2, "derivative needs n >= 2");
    let upper = (1..n).map(|k| k as f64).collect();
    BandedMatrix::from_diagonals(n, n, &[(1, upper)])
}

/// `∂ₓ²` from `T` to `C⁽²⁾`: `T_k'' = 2k C⁽²⁾_{k−2}`.
pub fn build_derivative_2(n: usize) -> BandedMatrix {
    assert!(n >= 3, "second derivative needs n >= 3");
    let upper = (2..n).map(|k| 2.0 * k as f64).collect();
    BandedMatrix::from_diagonals(n, n, &[(2, upper)])
}

/// Operators in one direction, built once per size.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub c02: BandedMatrix,
    pub c12: BandedMatrix,
    pub r: BandedMatrix,
    pub r_sq: BandedMatrix,
    pub d1: BandedMatrix,
    pub d2: BandedMatrix,
}

impl OperatorSet {
    pub fn new(n: usize) -> Self {
        let r = build_multiplication_r(n);
        Self {
            c02: build_conversion_02(n),
            c12: build_conversion_12(n),
            r_sq: r.matmul(&r).trimmed(),
            r,
            d1: build_derivative_1(n),
            d2: build_derivative_2(n),
        }
    }

    /// `R2 = R²·C02`, multiplication of a `T` series by `r²` landing in `C⁽²⁾`.
    pub fn r2(&self) -> BandedMatrix {
        self.r_sq.matmul(&self.c02).trimmed()
    }

    /// `r²·(∂r² + r⁻¹∂r − q²r⁻²)`: `R·C12·D1 + R²·D2 − q²·C02`.
    pub fn radial_laplacian(&self, q: i64) -> BandedMatrix {
        let first = self.r.matmul(&self.c12).matmul(&self.d1);
        let second = self.r_sq.matmul(&self.d2);
        first
            .add_scaled(1.0, &second)
            .add_scaled(-((q * q) as f64), &self.c02)
            .trimmed()
    }
}

/// Sylvester quadruple for `A·X·B + C·X·D = F` on one Fourier slice.
/// `B` and `D` are the right multipliers as stored (already transposed).
#[derive(Debug, Clone)]
pub struct ModalOperator {
    pub a: BandedMatrix,
    pub b: BandedMatrix,
    pub c: BandedMatrix,
    pub d: BandedMatrix,
    pub mode: i64,
    pub scale: f64,
}

impl ModalOperator {
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.b.cols()
    }

    /// `A·X·B + C·X·D` for a column-major `m × n` matrix `X`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.m();
        let n = self.n();
        let mut out = self.b.mul_right(&self.a.mul_left(x, n), m);
        let second = self.d.mul_right(&self.c.mul_left(x, n), m);
        out.iter_mut().zip(second).for_each(|(o, s)| *o += s);
        out
    }
}

/// `r²(1 − scale·∇²)` on wavenumber `mode`:
/// `A = R2 − s(R·C12·D1 + R²·D2 − q²C02)`, `B = C02ᵀ`, `C = −s·R2`, `D = D2ᵀ`.
pub fn assemble_modal_helmholtz(spec: &GridSpec, mode: i64, scale: f64) -> ModalOperator {
    let rops = OperatorSet::new(spec.m());
    let zops = OperatorSet::new(spec.n());
    assemble_helmholtz_from(&rops, &zops, mode, scale)
}

pub(crate) fn assemble_helmholtz_from(
    rops: &OperatorSet,
    zops: &OperatorSet,
    mode: i64,
    scale: f64,
) -> ModalOperator {
    let r2 = rops.r2();
    let a = r2.add_scaled(-scale, &rops.radial_laplacian(mode)).trimmed();
    let c = if scale == 0.0 {
        BandedMatrix::zeros(r2.rows(), r2.cols(), 0, 0)
    } else {
        r2.scaled(-scale)
    };
    let d = if scale == 0.0 {
        BandedMatrix::zeros(zops.d2.rows(), zops.d2.cols(), 0, 0)
    } else {
        zops.d2.transpose()
    };
    ModalOperator {
        a,
        b: zops.c02.transpose(),
        c,
        d,
        mode,
        scale,
    }
}

/// `r²∇²` on wavenumber `mode`: `A = R·C12·D1 + R²·D2 − q²C02`, `B = C02ᵀ`,
/// `C = R2`, `D = D2ᵀ`. Right-hand sides are `R2·F·C02ᵀ`.
pub fn assemble_modal_poisson(spec: &GridSpec, mode: i64) -> ModalOperator {
    let rops = OperatorSet::new(spec.m());
    let zops = OperatorSet::new(spec.n());
    assemble_poisson_from(&rops, &zops, mode)
}

pub(crate) fn assemble_poisson_from(rops: &OperatorSet, zops: &OperatorSet, mode: i64) -> ModalOperator {
    ModalOperator {
        a: rops.radial_laplacian(mode),
        b: zops.c02.transpose(),
        c: rops.r2(),
        d: zops.d2.transpose(),
        mode,
        scale: f64::INFINITY,
    }
}

/// Right-hand side `R2·F·C02ᵀ` for a column-major `m × n` coefficient matrix.
pub fn mass_rhs(rops: &OperatorSet, zops: &OperatorSet, f: &[Complex64]) -> Vec<Complex64> {
    let m = rops.r.rows();
    let n = zops.r.rows();
    let left = rops.r2().mul_left(f, n);
    zops.c02.transpose().mul_right(&left, m)
}

/// Coefficients of `f'` for `f = Σ c_k T_k`, in the `T` basis.
pub fn chebyshev_derivative<T>(c: &[T], out: &mut [T])
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = c.len();
    assert_eq!(out.len(), n);
    out.iter_mut().for_each(|v| *v = T::default());
    if n < 2 {
        return;
    }
    out[n - 2] = c[n - 1] * (2.0 * (n - 1) as f64);
    for k in (1..n - 1).rev() {
        let next = if k + 1 < n { out[k + 1] } else { T::default() };
        out[k - 1] = next + c[k] * (2.0 * k as f64);
    }
    out[0] = out[0] * 0.5;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Gegenbauer `C^λ_k(x)` by the three-term recurrence; `λ = 0` means `T_k`.
    fn gegenbauer(lambda: f64, k: usize, x: f64) -> f64 {
        if lambda == 0.0 {
            return (k as f64 * x.acos()).cos();
        }
        let (mut c0, mut c1) = (1.0, 2.0 * lambda * x);
        if k == 0 {
            return c0;
        }
        for j in 1..k {
            let jf = j as f64;
            let c2 = (2.0 * x * (jf + lambda) * c1 - (jf + 2.0 * lambda - 1.0) * c0) / (jf + 1.0);
            c0 = c1;
            c1 = c2;
        }
        c1
    }

    fn eval(lambda: f64, c: &[f64], x: f64) -> f64 {
        c.iter().enumerate().map(|(k, v)| v * gegenbauer(lambda, k, x)).sum()
    }

    fn sample_points(count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn apply(a: &BandedMatrix, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; a.rows()];
        a.matvec(x, &mut y);
        y
    }

    #[test]
    fn conversion_examples() {
        let c = build_conversion_01(6);
        let e = |i: usize| {
            let mut v = vec![0.0; 6];
            v[i] = 1.0;
            v
        };
        assert_eq!(apply(&c, &e(0)), e(0));
        assert_eq!(apply(&c, &e(1)), vec![0.0, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(apply(&c, &e(2)), vec![-0.5, 0.0, 0.5, 0.0, 0.0, 0.0]);

        let c = build_conversion_12(7);
        assert_eq!(c.get(0, 0), 1.0);
        assert!((c.get(2, 2) - 1.0 / 3.0).abs() < 1e-16);
        assert!((c.get(0, 2) + 1.0 / 3.0).abs() < 1e-16);
        assert!((c.get(6, 6) - 1.0 / 7.0).abs() < 1e-16);
        assert_eq!(apply(&c, &e(0)[..].iter().chain([0.0].iter()).copied().collect::<Vec<_>>()), {
            let mut v = vec![0.0; 7];
            v[0] = 1.0;
            v
        });
    }

    #[test]
    fn multiplication_entries() {
        let n = 9;
        let r = build_multiplication_r(n);
        assert!((r.get(1, 0) - 0.25).abs() < 1e-16);
        assert!((r.get(0, 1) - 2.0 / 3.0).abs() < 1e-16);
        assert!((r.get(1, 2) - 5.0 / 8.0).abs() < 1e-16);
        assert!((r.get(2, 1) - 1.0 / 3.0).abs() < 1e-16);
        let nf = n as f64;
        assert!((r.get(n - 2, n - 1) - (nf + 2.0) / (2.0 * nf + 2.0)).abs() < 1e-16);
        assert!((r.get(n - 1, n - 2) - (nf - 1.0) / (2.0 * nf)).abs() < 1e-16);
    }

    #[test]
    fn derivative_entries() {
        let n = 8;
        let d1 = build_derivative_1(n);
        assert_eq!(d1.get(0, 1), 1.0);
        assert_eq!(d1.get(n - 2, n - 1), (n - 1) as f64);
        let d2 = build_derivative_2(n);
        assert_eq!(d2.get(0, 2), 4.0);
        assert_eq!(d2.get(n - 3, n - 1), (2 * n - 2) as f64);
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        assert!(apply(&d1, &e0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn c02_is_product() {
        let n = 10;
        let c02 = build_conversion_02(n);
        let prod = build_conversion_12(n).matmul(&build_conversion_01(n));
        for i in 0..n {
            for j in 0..n {
                assert_eq!(c02.get(i, j), prod.get(i, j));
            }
        }
    }

    #[test]
    fn evaluation_equivalence() {
        let pts = sample_points(50);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [3usize, 8, 17, 64] {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c01a = apply(&build_conversion_01(n), &a);
            let c02a = apply(&build_conversion_02(n), &a);
            let d1a = apply(&build_derivative_1(n), &a);
            let d2a = apply(&build_derivative_2(n), &a);
            let c12a = apply(&build_conversion_12(n), &a);
            for &x in &pts {
                let t = eval(0.0, &a, x);
                assert!((t - eval(1.0, &c01a, x)).abs() < 1e-11, "C01 n={n}");
                assert!((t - eval(2.0, &c02a, x)).abs() < 1e-11, "C02 n={n}");
                assert!((eval(1.0, &a, x) - eval(2.0, &c12a, x)).abs() < 1e-11, "C12 n={n}");
                // derivatives by centred finite differences of the T series
                let h = 1e-5;
                let dt = (eval(0.0, &a, x + h) - eval(0.0, &a, x - h)) / (2.0 * h);
                let scale = (n * n) as f64;
                assert!((dt - eval(1.0, &d1a, x)).abs() < 1e-6 * scale, "D1 n={n}");
                let ddt = (eval(0.0, &a, x + h) - 2.0 * t + eval(0.0, &a, x - h)) / (h * h);
                assert!((ddt - eval(2.0, &d2a, x)).abs() < 1e-3 * scale * scale, "D2 n={n}");
            }
        }
    }

    #[test]
    fn derivatives_match_exact_coefficient_route() {
        // T-basis derivative, then convert: independent of the banded D1/D2.
        let n = 20;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut da = vec![0.0; n];
        chebyshev_derivative(&a, &mut da);
        let mut dda = vec![0.0; n];
        chebyshev_derivative(&da, &mut dda);
        let via_t = apply(&build_conversion_01(n), &da);
        let direct = apply(&build_derivative_1(n), &a);
        for (u, v) in via_t.iter().zip(&direct) {
            assert!((u - v).abs() < 1e-11);
        }
        let via_t = apply(&build_conversion_02(n), &dda);
        let direct = apply(&build_derivative_2(n), &a);
        for (u, v) in via_t.iter().zip(&direct) {
            assert!((u - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn multiplication_is_gegenbauer_recurrence() {
        let n = 16;
        let r = build_multiplication_r(n);
        for k in 0..n - 1 {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let re = apply(&r, &e);
            for &x in &sample_points(20) {
                let lhs = x * gegenbauer(2.0, k, x);
                assert!((lhs - eval(2.0, &re, x)).abs() < 1e-12 * (1.0 + lhs.abs()) * n as f64);
            }
        }
    }

    #[test]
    fn elementary_bandwidths() {
        let n = 12;
        for op in [
            build_conversion_01(n),
            build_conversion_12(n),
            build_conversion_02(n),
            build_multiplication_r(n),
            build_derivative_1(n),
            build_derivative_2(n),
        ] {
            assert!(op.lower() <= 4 && op.upper() <= 4);
            assert!(op.is_finite());
        }
    }

    #[test]
    fn helmholtz_is_mass_minus_scaled_poisson() {
        let spec = GridSpec::new(10, 8, 4).unwrap();
        for q in [0i64, 1, 3] {
            let s = 0.37;
            let h = assemble_modal_helmholtz(&spec, q, s);
            let p = assemble_modal_poisson(&spec, q);
            let mass = assemble_modal_helmholtz(&spec, q, 0.0);
            for i in 0..10 {
                for j in 0..10 {
                    let expect = mass.a.get(i, j) - s * p.a.get(i, j);
                    assert!((h.a.get(i, j) - expect).abs() < 1e-15);
                    assert!((h.c.get(i, j) + s * p.c.get(i, j)).abs() < 1e-15);
                }
            }
            assert_eq!(h.b, p.b);
            assert_eq!(h.d, p.d);
            assert_eq!(mass.c.bands().len(), 0);
        }
        let h = assemble_modal_helmholtz(&spec, 2, 1.0);
        let p0 = assemble_modal_helmholtz(&spec, 0, 1.0);
        let c02 = build_conversion_02(10);
        for i in 0..10 {
            for j in 0..10 {
                assert!((h.a.get(i, j) - p0.a.get(i, j) - 4.0 * c02.get(i, j)).abs() < 1e-14);
            }
        }
    }
}
