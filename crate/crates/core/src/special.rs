//! Complete elliptic integral, Jacobi elliptic functions and Möbius maps.
//!
//! Moduli close to 1 lose precision when passed as `k`, so every routine
//! has a variant taking the complementary modulus `k' = √(1-k²)` directly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_AGM_STEPS: usize = 40;

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("modulus must lie in [0, 1), got {k}")));
    }
    Ok(())
}

fn check_complement(kp: f64) -> Result<()> {
    if !(kp > 0.0 && kp <= 1.0) {
        return Err(Error::Domain(format!(
            "complementary modulus must lie in (0, 1], got {kp}"
        )));
    }
    Ok(())
}

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2·AGM(1, k'))`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    Ok(PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt())))
}

/// `K` as a function of the complementary modulus `k'`.
pub fn elliptic_k_complement(kp: f64) -> Result<f64> {
    check_complement(kp)?;
    Ok(PI / (2.0 * agm(1.0, kp)))
}

/// `(sn, cn, dn)` by the descending AGM/Landen scheme.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    check_modulus(k)?;
    Ok(landen(u, k, (1.0 - k * k).sqrt()))
}

/// `(sn, cn, dn)` with the modulus given through `k'`.
pub fn jacobi_sn_cn_dn_complement(u: f64, kp: f64) -> Result<(f64, f64, f64)> {
    check_complement(kp)?;
    // k = √((1-k')(1+k')) avoids the cancellation in 1 - k'²
    let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
    Ok(landen(u, k, kp))
}

pub fn jacobi_dn(u: f64, k: f64) -> Result<f64> {
    jacobi_sn_cn_dn(u, k).map(|(_, _, dn)| dn)
}

pub fn jacobi_dn_complement(u: f64, kp: f64) -> Result<f64> {
    jacobi_sn_cn_dn_complement(u, kp).map(|(_, _, dn)| dn)
}

fn landen(u: f64, k: f64, kp: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    let mut a = vec![1.0];
    let mut c = vec![k];
    let mut b = kp;
    while c.last().unwrap().abs() > f64::EPSILON && a.len() < MAX_AGM_STEPS {
        let an = *a.last().unwrap();
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    let steps = a.len() - 1;
    let mut phi = 2f64.powi(steps as i32) * a[steps] * u;
    let mut prev = phi;
    for n in (1..=steps).rev() {
        prev = phi;
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let ratio = (prev - phi).cos();
    // near the quarter period the Landen ratio is 0/0; dn² = k'² + k²cn² is not
    let dn = if steps == 0 {
        1.0
    } else if ratio.abs() > 0.5 {
        cn / ratio
    } else {
        (kp * kp + k * k * cn * cn).sqrt()
    };
    (sn, cn, dn)
}

/// `t ↦ (a·t + b) / (c·t + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, t: Complex64) -> Complex64 {
        (self.a * t + self.b) / (self.c * t + self.d)
    }

    /// Real part of the image of a real point.
    pub fn apply_real(&self, t: f64) -> f64 {
        self.apply(Complex64::new(t, 0.0)).re
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Sends `z₀ ↦ 0`, `z₁ ↦ 1`, `z₂ ↦ ∞`.
    fn to_standard(z: [f64; 3]) -> Self {
        let [z0, z1, z2] = z.map(|v| Complex64::new(v, 0.0));
        Self {
            a: z1 - z2,
            b: -z0 * (z1 - z2),
            c: z1 - z0,
            d: -z2 * (z1 - z0),
        }
    }
}

/// Cross-ratio `(z₀, z₁; z₂, z₃)` as used to match four points.
pub fn cross_ratio(z: [f64; 4]) -> f64 {
    (z[0] - z[2]) * (z[1] - z[3]) / ((z[0] - z[3]) * (z[1] - z[2]))
}

/// The Möbius map sending `source[i]` to `target[i]`. The map is fixed by the
/// first three pairs; the fourth must be consistent with it.
pub fn mobius_from_points(source: [f64; 4], target: [f64; 4]) -> Result<MobiusMap> {
    for pts in [&source, &target] {
        if pts.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMap("points must be finite".into()));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if pts[i] == pts[j] {
                    return Err(Error::DegenerateMap(format!("repeated point {}", pts[i])));
                }
            }
        }
    }
    let s = MobiusMap::to_standard([source[0], source[1], source[2]]);
    let t = MobiusMap::to_standard([target[0], target[1], target[2]]);
    let map = t.inverse().compose(&s);
    if map.determinant().norm() == 0.0 {
        return Err(Error::DegenerateMap("zero determinant".into()));
    }
    let image = map.apply_real(source[3]);
    let spread = target.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !((image - target[3]).abs() <= 1e-8 * spread.max(1.0)) {
        return Err(Error::DegenerateMap(format!(
            "fourth point maps to {image}, expected {}",
            target[3]
        )));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `K` by Gauss-Legendre-free midpoint quadrature on the smooth
    /// substitution `θ`, accurate for moderate `k`.
    fn quadrature_k(k: f64) -> f64 {
        let n = 20_000;
        let h = 0.5 * PI / n as f64;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                h / (1.0 - k * k * t.sin().powi(2)).sqrt()
            })
            .sum()
    }

    #[test]
    fn k_values() {
        assert!((elliptic_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        let k5 = elliptic_k(0.5).unwrap();
        assert!((k5 - 1.685_750_354_812_596).abs() < 1e-14);
        assert!((k5 - quadrature_k(0.5)).abs() < 1e-12);
        assert!(elliptic_k(0.999_999).unwrap().is_finite());
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
        let kp: f64 = 1e-9;
        let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
        let direct = elliptic_k_complement(kp).unwrap();
        // K ≈ ln(4/k') for small k'
        assert!((direct - (4.0 / kp).ln()).abs() < 1e-9);
        assert!(direct.is_finite() && k <= 1.0);
    }

    #[test]
    fn dn_values() {
        for k in [0.0, 0.3, 0.9] {
            assert_eq!(jacobi_dn(0.0, k).unwrap(), 1.0);
        }
        assert_eq!(jacobi_dn(1.7, 0.0).unwrap(), 1.0);
        let k = 0.3;
        let quarter = elliptic_k(k).unwrap();
        let dn = jacobi_dn(quarter, k).unwrap();
        assert!((dn - (1.0 - k * k).sqrt()).abs() < 1e-14);
        // small-u series: dn ≈ 1 - k²u²/2 + k²(4+k²)u⁴/24
        let u = 0.01;
        let series = 1.0 - k * k * u * u / 2.0 + k * k * (4.0 + k * k) * u.powi(4) / 24.0;
        assert!((jacobi_dn(u, k).unwrap() - series).abs() < 1e-13);
        assert!(jacobi_dn(0.1, 1.0).is_err());
    }

    #[test]
    fn pythagorean_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let k: f64 = rng.gen_range(0.0..0.999);
            let u: f64 = rng.gen_range(-5.0..5.0);
            let (sn, cn, dn) = jacobi_sn_cn_dn(u, k).unwrap();
            assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-12);
            assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
            assert!(dn >= (1.0 - k * k).sqrt() - 1e-14 && dn <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn dn_derivative_matches() {
        // d(sn)/du = cn·dn, checked by central differences
        let (k, u, h) = (0.8, 0.7, 1e-6);
        let (_, cn, dn) = jacobi_sn_cn_dn(u, k).unwrap();
        let sp = jacobi_sn_cn_dn(u + h, k).unwrap().0;
        let sm = jacobi_sn_cn_dn(u - h, k).unwrap().0;
        assert!(((sp - sm) / (2.0 * h) - cn * dn).abs() < 1e-8);
    }

    #[test]
    fn complement_route_agrees() {
        for k in [0.1f64, 0.5, 0.99] {
            let kp = (1.0 - k * k).sqrt();
            let a = jacobi_dn(0.4, k).unwrap();
            let b = jacobi_dn_complement(0.4, kp).unwrap();
            assert!((a - b).abs() < 1e-13);
            assert!((elliptic_k(k).unwrap() - elliptic_k_complement(kp).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn mobius_examples() {
        let p = [-2.0, -1.0, 1.0, 2.0];
        let id = mobius_from_points(p, p).unwrap();
        for t in [0.3, -7.0, 5.5] {
            assert!((id.apply_real(t) - t).abs() < 1e-12);
        }
        let lin = mobius_from_points(p, [-4.0, -2.0, 2.0, 4.0]).unwrap();
        for (s, t) in p.iter().zip([-4.0, -2.0, 2.0, 4.0]) {
            assert!((lin.apply_real(*s) - t).abs() < 1e-12);
        }
        assert!((lin.apply_real(0.75) - 1.5).abs() < 1e-12);
        assert!(matches!(
            mobius_from_points([1.0, 1.0, 2.0, 3.0], p),
            Err(Error::DegenerateMap(_))
        ));
        assert!(mobius_from_points(p, [0.0, 1.0, 2.0, 100.0]).is_err());
    }

    #[test]
    fn mobius_preserves_cross_ratio() {
        let src = [-3.0, -1.0, 1.0, 3.0];
        let cr = cross_ratio(src);
        // pick targets with the same cross-ratio by mapping through a known map
        let known = MobiusMap {
            a: Complex64::new(2.0, 0.0),
            b: Complex64::new(1.0, 0.0),
            c: Complex64::new(0.1, 0.0),
            d: Complex64::new(1.0, 0.0),
        };
        let tgt = src.map(|v| known.apply_real(v));
        let map = mobius_from_points(src, tgt).unwrap();
        let extra = [0.2, 0.5, 2.0, -0.7];
        let img = extra.map(|v| map.apply_real(v));
        assert!((cross_ratio(extra) - cross_ratio(img)).abs() < 1e-12);
        assert!((cross_ratio(tgt) - cr).abs() < 1e-12);
    }

    #[test]
    fn composition_fixes_middle_points() {
        let p = [-5.0, -1.0, 1.0, 5.0];
        let q = [0.5, 1.0, 2.0, 3.0 + 1.0 / 3.0 + 0.0];
        let r = [1.0, 2.0, 4.0, 7.0];
        let cr = cross_ratio(p);
        // adjust the last points so all three sets share a cross-ratio
        let q = fit_last(q, cr);
        let r = fit_last(r, cr);
        let pq = mobius_from_points(p, q).unwrap();
        let rq = mobius_from_points(r, q).unwrap();
        let back = pq.compose(&mobius_from_points(q, p).unwrap());
        for v in q {
            assert!((back.apply_real(v) - v).abs() < 1e-12);
        }
        let via = rq.compose(&mobius_from_points(q, r).unwrap());
        for v in q {
            assert!((via.apply_real(v) - v).abs() < 1e-12);
        }
    }

    fn fit_last(mut z: [f64; 4], cr: f64) -> [f64; 4] {
        // solve (z0-z2)(z1-z3) = cr (z0-z3)(z1-z2) for z3
        let (z0, z1, z2) = (z[0], z[1], z[2]);
        let k = cr * (z1 - z2);
        z[3] = ((z0 - z2) * z1 - k * z0) / ((z0 - z2) - k);
        z
    }
}
