//! Closed-form solutions and forcings for accuracy tests and benchmarks.
//!
//! All fields vanish on the cylinder walls and are smooth across the axis
//! (polynomials in `x = r cosθ`, `y = r sinθ` times functions of `r²`).

/// Manufactured heat solution `T = e^{−t}(1−r²)(1 + a·x)(1−z²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSolution {
    pub alpha: f64,
    /// Amplitude of the `x = r cosθ` factor; 0 gives an axisymmetric field.
    pub tilt: f64,
}

impl HeatSolution {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, tilt: 0.0 }
    }

    pub fn with_tilt(alpha: f64, tilt: f64) -> Self {
        Self { alpha, tilt }
    }

    pub fn value(&self, r: f64, z: f64, theta: f64, t: f64) -> f64 {
        let x = r * theta.cos();
        (-t).exp() * (1.0 - r * r) * (1.0 + self.tilt * x) * (1.0 - z * z)
    }

    /// `∇²T`.
    pub fn laplacian(&self, r: f64, z: f64, theta: f64, t: f64) -> f64 {
        let x = r * theta.cos();
        let h = (1.0 - r * r) * (1.0 + self.tilt * x);
        (-t).exp() * ((1.0 - z * z) * (-4.0 - 8.0 * self.tilt * x) - 2.0 * h)
    }

    /// `g = ∂ₜT − α∇²T`.
    pub fn forcing(&self, r: f64, z: f64, theta: f64, t: f64) -> f64 {
        -self.value(r, z, theta, t) - self.alpha * self.laplacian(r, z, theta, t)
    }
}

/// `u = (1−r²)e^{r²/2}(1+x)(1−z²)eᶻ`: band-limited in θ, not polynomial in r or z.
pub fn poisson_solution(r: f64, z: f64, theta: f64) -> f64 {
    let s = r * r;
    let x = r * theta.cos();
    (1.0 - s) * (0.5 * s).exp() * (1.0 + x) * (1.0 - z * z) * z.exp()
}

/// `∇²` of [`poisson_solution`].
pub fn poisson_forcing(r: f64, z: f64, theta: f64) -> f64 {
    let s = r * r;
    let x = r * theta.cos();
    let e = (0.5 * s).exp();
    let zf = (1.0 - z * z) * z.exp();
    let zpp = z.exp() * (-1.0 - 4.0 * z - z * z);
    let horizontal = (1.0 + x) * e * (-2.0 - 5.0 * s - s * s) + 2.0 * x * e * (-1.0 - s);
    zf * horizontal + (1.0 - s) * e * (1.0 + x) * zpp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cart_laplacian(f: impl Fn(f64, f64, f64) -> f64, r: f64, z: f64, th: f64) -> f64 {
        let g = |x: f64, y: f64, z: f64| f((x * x + y * y).sqrt(), z, y.atan2(x));
        let (x, y) = (r * th.cos(), r * th.sin());
        let h = 1e-3;
        let c = g(x, y, z);
        (g(x + h, y, z) + g(x - h, y, z) + g(x, y + h, z) + g(x, y - h, z) + g(x, y, z + h) + g(x, y, z - h)
            - 6.0 * c)
            / (h * h)
    }

    #[test]
    fn heat_laplacian_matches_differences() {
        let sol = HeatSolution::with_tilt(1.0, 0.7);
        for &(r, z, th) in &[(0.3, 0.2, 0.5), (0.8, -0.6, 2.0), (0.5, 0.9, -1.2)] {
            let num = cart_laplacian(|r, z, th| sol.value(r, z, th, 0.4), r, z, th);
            assert!((num - sol.laplacian(r, z, th, 0.4)).abs() < 1e-5);
        }
    }

    #[test]
    fn poisson_forcing_matches_differences() {
        for &(r, z, th) in &[(0.3, 0.2, 0.5), (0.8, -0.6, 2.0), (0.5, 0.9, -1.2)] {
            let num = cart_laplacian(poisson_solution, r, z, th);
            assert!((num - poisson_forcing(r, z, th)).abs() < 1e-5);
        }
    }

    #[test]
    fn vanish_on_walls() {
        let sol = HeatSolution::with_tilt(1.0, 0.5);
        for t in [-2.0, 0.3, 1.9] {
            assert_eq!(sol.value(1.0, 0.3, t, 0.0), 0.0);
            assert_eq!(poisson_solution(0.4, 1.0, t), 0.0);
            assert_eq!(poisson_solution(-1.0, 0.1, t), 0.0);
        }
    }
}
