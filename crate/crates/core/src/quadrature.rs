//! Gauss–Legendre rules and a product rule on S³ in Hopf coordinates.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| (mid + half * xi, half * wi))
        .collect()
}

/// Product quadrature on the unit S³.
///
/// Uses `x = (√(1−s) cos θ₁, √(1−s) sin θ₁, √s cos θ₂, √s sin θ₂)` with
/// `dσ = ½ ds dθ₁ dθ₂`. Exact for polynomials of degree below
/// `min(angular, 2·radial)`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(radial: usize, angular: usize) -> Self {
        let s_rule = gauss_legendre_on(radial, 0.0, 1.0);
        let dtheta = 2.0 * PI / angular as f64;
        let mut points = Vec::with_capacity(radial * angular * angular);
        let mut weights = Vec::with_capacity(points.capacity());
        for &(s, ws) in &s_rule {
            let (c, sn) = ((1.0 - s).sqrt(), s.sqrt());
            for a in 0..angular {
                let t1 = a as f64 * dtheta;
                for b in 0..angular {
                    let t2 = (b as f64 + 0.5) * dtheta;
                    points.push([c * t1.cos(), c * t1.sin(), sn * t2.cos(), sn * t2.sin()]);
                    weights.push(0.5 * ws * dtheta * dtheta);
                }
            }
        }
        Self { points, weights }
    }

    /// Rule exact for polynomials of total degree `≤ degree`.
    pub fn exact_for(degree: usize) -> Self {
        Self::new(degree / 2 + 2, degree + 2)
    }

    pub fn integrate(&self, f: impl Fn([f64; 4]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}
