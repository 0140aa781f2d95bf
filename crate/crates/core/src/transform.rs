//! Value/coefficient transforms on the doubled grid: DCT-I in `r` and `z`,
//! DFT in `θ`.
//!
//! Coefficients are Chebyshev interpolation coefficients: the DCT-I sums
//! weight the endpoint samples by 1/2 and the first and last coefficients
//! are halved, so that
//!
//! ```text
//! f(r, z, θ) = Σ_j Σ_k Σ_ℓ c[j,k,ℓ] T_j(r) T_k(z) exp(i (ℓ - p/2) θ)
//! ```
//!
//! holds exactly at every grid point.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};

/// `p` Fourier slices of `m × n` Chebyshev coefficients, column-major per slice.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTensor {
    spec: GridSpec,
    data: Vec<Complex64>,
}

impl CoeffTensor {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            data: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub fn from_vec(spec: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                data.len()
            )));
        }
        Ok(Self { spec, data })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, j: usize, k: usize, l: usize) -> Complex64 {
        self.data[self.spec.index(j, k, l)]
    }

    pub fn set(&mut self, j: usize, k: usize, l: usize, v: Complex64) {
        let i = self.spec.index(j, k, l);
        self.data[i] = v;
    }

    /// Coefficient matrix of slice `ℓ`, column-major `m × n`.
    pub fn slice(&self, l: usize) -> &[Complex64] {
        let len = self.spec.slice_len();
        &self.data[l * len..(l + 1) * len]
    }

    pub fn slice_mut(&mut self, l: usize) -> &mut [Complex64] {
        let len = self.spec.slice_len();
        &mut self.data[l * len..(l + 1) * len]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    /// Largest entrywise difference to `other`.
    pub fn max_diff(&self, other: &CoeffTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, s: f64, other: &CoeffTensor) {
        debug_assert_eq!(self.spec, other.spec);
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b * s);
    }

    /// Largest violation of `c[j,k,ℓ] = conj(c[j,k,p-ℓ])`, the symmetry of a real field.
    pub fn hermitian_defect(&self) -> f64 {
        let s = self.spec;
        let mut worst: f64 = 0.0;
        for l in 1..s.p() {
            let lp = s.p() - l;
            for k in 0..s.n() {
                for j in 0..s.m() {
                    let d = (self.get(j, k, l) - self.get(j, k, lp).conj()).norm();
                    worst = worst.max(d);
                }
            }
        }
        // the Nyquist slice is its own partner
        for i in 0..s.slice_len() {
            worst = worst.max(self.slice(0)[i].im.abs());
        }
        worst
    }
}

/// Precomputed FFT plans for one grid size.
#[derive(Clone)]
pub struct TransformPlan {
    spec: GridSpec,
    fft_r: Arc<dyn Fft<f64>>,
    fft_z: Arc<dyn Fft<f64>>,
    fft_t: Arc<dyn Fft<f64>>,
    ifft_t: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformPlan").field("spec", &self.spec).finish()
    }
}

impl TransformPlan {
    pub fn new(spec: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            spec,
            fft_r: planner.plan_fft_forward(2 * (spec.m() - 1)),
            fft_z: planner.plan_fft_forward(2 * (spec.n() - 1)),
            fft_t: planner.plan_fft_forward(spec.p()),
            ifft_t: planner.plan_fft_inverse(spec.p()),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Point values to coefficients.
    pub fn analyze(&self, field: &GridField) -> Result<CoeffTensor> {
        if field.spec() != &self.spec {
            return Err(Error::DimensionMismatch(
                "field spec differs from plan".into(),
            ));
        }
        if let Some(i) = field.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let data = field
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        Ok(self.analyze_complex(data))
    }

    /// Complex point values (storage order) to coefficients.
    pub fn analyze_complex(&self, mut data: Vec<Complex64>) -> CoeffTensor {
        let s = self.spec;
        assert_eq!(data.len(), s.len());
        let (m, n, p) = (s.m(), s.n(), s.p());

        // r pencils are contiguous
        let mut ext = vec![Complex64::default(); 2 * (m - 1)];
        for pencil in data.chunks_exact_mut(m) {
            dct1_forward(pencil, &mut ext, self.fft_r.as_ref());
        }

        // z pencils have stride m
        let mut buf = vec![Complex64::default(); n];
        let mut ext = vec![Complex64::default(); 2 * (n - 1)];
        for l in 0..p {
            for j in 0..m {
                for k in 0..n {
                    buf[k] = data[s.index(j, k, l)];
                }
                dct1_forward(&mut buf, &mut ext, self.fft_z.as_ref());
                for k in 0..n {
                    data[s.index(j, k, l)] = buf[k];
                }
            }
        }

        // θ pencils have stride m·n
        let mn = s.slice_len();
        let mut buf = vec![Complex64::default(); p];
        let inv_p = 1.0 / p as f64;
        for i in 0..mn {
            for l in 0..p {
                buf[l] = data[l * mn + i];
            }
            self.fft_t.process(&mut buf);
            // wavenumber q = l - p/2 lives at FFT bin q mod p; the grid
            // starts at θ = -π, which contributes (-1)^q
            for l in 0..p {
                let q = l as i64 - (p / 2) as i64;
                let bin = q.rem_euclid(p as i64) as usize;
                let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                data[l * mn + i] = buf[bin] * (sign * inv_p);
            }
        }
        CoeffTensor { spec: s, data }
    }

    /// Coefficients to real point values; the imaginary part is dropped,
    /// which is exact for Hermitian-symmetric tensors.
    pub fn synthesize(&self, coeffs: &CoeffTensor) -> GridField {
        let values = self
            .synthesize_complex(coeffs)
            .into_iter()
            .map(|c| c.re)
            .collect();
        GridField::new(self.spec, values).expect("sizes match by construction")
    }

    pub fn synthesize_complex(&self, coeffs: &CoeffTensor) -> Vec<Complex64> {
        let s = self.spec;
        assert_eq!(coeffs.spec(), &s);
        let (m, n, p) = (s.m(), s.n(), s.p());
        let mut data = coeffs.data.clone();

        let mn = s.slice_len();
        let mut buf = vec![Complex64::default(); p];
        for i in 0..mn {
            for l in 0..p {
                let q = l as i64 - (p / 2) as i64;
                let bin = q.rem_euclid(p as i64) as usize;
                let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[bin] = data[l * mn + i] * sign;
            }
            self.ifft_t.process(&mut buf);
            for l in 0..p {
                data[l * mn + i] = buf[l];
            }
        }

        let mut zbuf = vec![Complex64::default(); n];
        let mut ext = vec![Complex64::default(); 2 * (n - 1)];
        for l in 0..p {
            for j in 0..m {
                for k in 0..n {
                    zbuf[k] = data[s.index(j, k, l)];
                }
                dct1_inverse(&mut zbuf, &mut ext, self.fft_z.as_ref());
                for k in 0..n {
                    data[s.index(j, k, l)] = zbuf[k];
                }
            }
        }

        let mut ext = vec![Complex64::default(); 2 * (m - 1)];
        for pencil in data.chunks_exact_mut(m) {
            dct1_inverse(pencil, &mut ext, self.fft_r.as_ref());
        }
        data
    }
}

/// Chebyshev coefficients of the interpolant through values at the points
/// `-cos(jπ/M)`, `j = 0..=M`, in place.
fn dct1_forward(v: &mut [Complex64], ext: &mut [Complex64], fft: &dyn Fft<f64>) {
    let len = v.len();
    let big_m = len - 1;
    ext[..len].copy_from_slice(v);
    for j in 1..big_m {
        ext[2 * big_m - j] = v[j];
    }
    fft.process(ext);
    let scale = 1.0 / big_m as f64;
    for i in 0..len {
        let w = if i == 0 || i == big_m { 0.5 } else { 1.0 };
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        v[i] = ext[i] * (w * sign * scale);
    }
}

/// Inverse of [`dct1_forward`]: evaluates the Chebyshev series at the points.
fn dct1_inverse(v: &mut [Complex64], ext: &mut [Complex64], fft: &dyn Fft<f64>) {
    let len = v.len();
    let big_m = len - 1;
    for i in 0..len {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        ext[i] = v[i] * sign;
    }
    for i in 1..big_m {
        ext[2 * big_m - i] = ext[i];
    }
    let d0 = ext[0];
    let dm = ext[big_m];
    fft.process(ext);
    for j in 0..len {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        v[j] = (ext[j] + d0 + dm * sign) * 0.5;
    }
}

/// Point values to coefficients. Builds a fresh plan; reuse a
/// [`TransformPlan`] when transforming repeatedly.
pub fn analyze(field: &GridField) -> Result<CoeffTensor> {
    TransformPlan::new(*field.spec()).analyze(field)
}

/// Coefficients to real point values.
pub fn synthesize(coeffs: &CoeffTensor) -> GridField {
    TransformPlan::new(*coeffs.spec()).synthesize(coeffs)
}

/// Clenshaw evaluation of `Σ c_i T_i(x)`.
pub fn clenshaw<T>(coeffs: &[T], x: f64) -> T
where
    T: Copy
        + Default
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let mut b1 = T::default();
    let mut b2 = T::default();
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => c0 + b1 * x - b2,
        None => T::default(),
    }
}

/// Evaluates the CCF interpolant at an arbitrary point.
pub fn evaluate_at(coeffs: &CoeffTensor, point: (f64, f64, f64)) -> Complex64 {
    let s = coeffs.spec();
    let (r, z, theta) = point;
    let mut zcol = vec![Complex64::default(); s.n()];
    let mut total = Complex64::default();
    for l in 0..s.p() {
        let slice = coeffs.slice(l);
        for (k, col) in slice.chunks_exact(s.m()).enumerate() {
            zcol[k] = clenshaw(col, r);
        }
        let q = s.wavenumber(l) as f64;
        total += clenshaw(&zcol, z) * Complex64::from_polar(1.0, q * theta);
    }
    total
}

/// Chebyshev `T_k(x)` by the cosine formula on `[-1, 1]`.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    (k as f64 * x.acos()).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{check_physical_consistency, parity_project};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(m: usize, n: usize, p: usize) -> GridSpec {
        GridSpec::new(m, n, p).unwrap()
    }

    #[test]
    fn constant_and_linear_fields() {
        let s = spec(7, 5, 6);
        let half = s.p() / 2;
        let c = analyze(&GridField::from_fn(s, |_, _, _| 1.0)).unwrap();
        for l in 0..s.p() {
            for k in 0..s.n() {
                for j in 0..s.m() {
                    let expect = if (j, k, l) == (0, 0, half) { 1.0 } else { 0.0 };
                    assert!((c.get(j, k, l) - expect).norm() < 1e-14);
                }
            }
        }
        let c = analyze(&GridField::from_fn(s, |r, _, _| r)).unwrap();
        assert!((c.get(1, 0, half) - 1.0).norm() < 1e-14);
        let c = analyze(&GridField::from_fn(s, |_, z, _| z * z)).unwrap();
        assert!((c.get(0, 0, half) - 0.5).norm() < 1e-14);
        assert!((c.get(0, 2, half) - 0.5).norm() < 1e-14);
        assert!((c.get(0, 1, half)).norm() < 1e-14);
    }

    #[test]
    fn delta_synthesizes_to_r() {
        let s = spec(6, 4, 4);
        let mut c = CoeffTensor::zeros(s);
        c.set(1, 0, s.p() / 2, Complex64::new(1.0, 0.0));
        let f = synthesize(&c);
        for (v, (r, _, _)) in f.values().iter().zip(crate::grid::grid_points(&s)) {
            assert!((v - r).abs() < 1e-15);
        }
        assert_eq!(synthesize(&CoeffTensor::zeros(s)), GridField::zeros(s));
    }

    #[test]
    fn fourier_modes_land_on_their_slice() {
        let s = spec(4, 4, 8);
        let f = GridField::from_fn(s, |_, _, t| (2.0 * t).cos() + 3.0 * t.sin());
        let c = analyze(&f).unwrap();
        let at = |q: i64| c.get(0, 0, s.slice_of(q).unwrap());
        assert!((at(2) - 0.5).norm() < 1e-14);
        assert!((at(-2) - 0.5).norm() < 1e-14);
        assert!((at(1) - Complex64::new(0.0, -1.5)).norm() < 1e-14);
        assert!((at(-1) - Complex64::new(0.0, 1.5)).norm() < 1e-14);
    }

    #[test]
    fn evaluate_matches_product() {
        let s = spec(6, 6, 4);
        let c = analyze(&GridField::from_fn(s, |r, z, _| r * z)).unwrap();
        let v = evaluate_at(&c, (0.3, -0.5, 1.0));
        assert!((v - Complex64::new(-0.15, 0.0)).norm() < 1e-14);
        let mut one = CoeffTensor::zeros(s);
        one.set(0, 0, s.p() / 2, Complex64::new(1.0, 0.0));
        assert!((evaluate_at(&one, (0.77, -0.1, 2.0)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn evaluate_agrees_with_synthesize_on_grid() {
        let s = spec(7, 6, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = GridField::from_fn(s, |_, _, _| rng.gen_range(-1.0..1.0));
        let c = analyze(&f).unwrap();
        let pts = crate::grid::grid_points(&s);
        for (i, &pt) in pts.iter().enumerate().step_by(7) {
            let v = evaluate_at(&c, pt);
            assert!((v.re - f.values()[i]).abs() < 1e-12, "point {i}");
        }
    }

    #[test]
    fn round_trip_and_hermitian() {
        let s = spec(9, 8, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = GridField::from_fn(s, |_, _, _| rng.gen_range(-1.0..1.0));
        let plan = TransformPlan::new(s);
        let c = plan.analyze(&f).unwrap();
        assert!(c.hermitian_defect() < 1e-14);
        let g = plan.synthesize(&c);
        let err = f
            .values()
            .iter()
            .zip(g.values())
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(err <= 1e-12 * f.max_abs());
    }

    #[test]
    fn non_finite_rejected() {
        let s = spec(4, 4, 2);
        let mut f = GridField::zeros(s);
        f.values_mut()[5] = f64::NAN;
        assert_eq!(analyze(&f), Err(Error::NonFinite(5)));
    }

    #[test]
    fn physical_fields_survive_parity_projection() {
        let s = spec(10, 6, 8);
        let f = GridField::from_fn(s, |r, z, t| {
            let (x, y) = (r * t.cos(), r * t.sin());
            (x * x * y + 0.3 * y - z * x).exp()
        });
        assert!(check_physical_consistency(&f, 1e-13));
        let c = analyze(&f).unwrap();
        assert!(parity_project(&c).max_diff(&c) < 1e-12);
    }
}
