//! Numerical evaluators for the analytic inequalities: the improved elliptic
//! inequality `Δ|ω|^{1/2} ≥ 0` and the Moser-iteration product.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd;
use crate::frame::norm4;
use crate::selfdual::SelfDualForm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoserEvaluation {
    pub c: f64,
    pub n: u32,
    /// `Σ_{i≤N} 2^{−i} ln(1 + c 2^i)`.
    pub log_product: f64,
    /// `Π_{i≤N} (1 + c 2^i)^{2^{−i}}`, infinite on overflow.
    pub partial_product: f64,
    /// `e^c`.
    pub claimed_bound: f64,
    pub ratio: f64,
    /// Last factor changed the product by less than 1e-12 relative.
    pub converged: bool,
}

pub const MOSER_CONVERGENCE: f64 = 1e-12;

/// `2^{−i} ln(1 + c 2^i)` without forming `2^i` for large `i`.
fn moser_log_term(c: f64, i: u32) -> f64 {
    let scale = 0.5f64.powi(i as i32);
    let x = c / scale;
    if x <= 1.0 {
        scale * x.ln_1p()
    } else {
        scale * (c.ln() + i as f64 * std::f64::consts::LN_2 + (1.0 / x).ln_1p())
    }
}

pub fn moser_product(c: f64, n: u32) -> Result<MoserEvaluation> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Negative { name: "c", value: c });
    }
    let mut log_product = 0.0;
    let mut last = 0.0;
    for i in 0..=n {
        last = moser_log_term(c, i);
        log_product += last;
    }
    let converged = c == 0.0 || last.abs() <= MOSER_CONVERGENCE * log_product.abs();
    Ok(MoserEvaluation {
        c,
        n,
        log_product,
        partial_product: log_product.exp(),
        claimed_bound: c.exp(),
        ratio: (log_product - c).exp(),
        converged,
    })
}

/// Smallest `N` (up to 4096) at which the product has converged.
pub fn moser_converged(c: f64) -> Result<MoserEvaluation> {
    let mut n = 8;
    loop {
        let e = moser_product(c, n)?;
        if e.converged || n >= 4096 {
            return Ok(e);
        }
        n *= 2;
    }
}

/// Converged evaluations on a grid of `c`, log-spaced when `c_min > 0`.
pub fn moser_sweep(c_min: f64, c_max: f64, points: usize) -> Result<Vec<MoserEvaluation>> {
    if points == 0 || c_max < c_min {
        return Err(Error::Invalid(format!(
            "sweep needs points > 0 and c_min ≤ c_max, got {points} points on [{c_min}, {c_max}]"
        )));
    }
    (0..points)
        .map(|k| {
            let s = if points == 1 { 0.0 } else { k as f64 / (points - 1) as f64 };
            let c = if c_min > 0.0 {
                c_min * (c_max / c_min).powf(s)
            } else {
                c_min + (c_max - c_min) * s
            };
            moser_converged(c)
        })
        .collect()
}

pub const MOSER_CSV_HEADER: &str = "c,converged_product,exp_c,ratio";

pub fn moser_csv(rows: &[MoserEvaluation]) -> String {
    let mut s = format!("{MOSER_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.c, r.partial_product, r.claimed_bound, r.ratio
        ));
    }
    s
}

/// Flat Laplacian of `|ω|^{1/2}` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticCheck {
    /// Richardson combination of the stencils at `h` and `h/2`.
    pub laplacian: f64,
    /// Step-doubling error estimate of the `h/2` stencil, which bounds the
    /// error of the combined value.
    pub error_estimate: f64,
    /// `10·error_estimate` plus a rounding floor `256 u |ω|^{1/2} / h²`.
    pub tolerance: f64,
}

impl EllipticCheck {
    pub fn passes(&self) -> bool {
        self.laplacian >= -self.tolerance
    }
}

pub fn sqrt_elliptic_check(sdf: &SelfDualForm, x: &[f64; 4], h: f64) -> Result<EllipticCheck> {
    let t = norm4(x);
    if t == 0.0 {
        return Err(Error::AtOrigin(*x));
    }
    sdf.check_radius(t, 2.0 * h)?;
    let upper = sdf.upper_at();
    let root = |y: &[f64; 4]| [upper(y).iter().map(|v| v * v).sum::<f64>().sqrt().sqrt()];
    let center = root(x)[0];
    if center * center <= 1e-8 {
        return Err(Error::NearZero(center * center));
    }
    let coarse = fd::laplacian(&root, x, h)[0];
    let fine = fd::laplacian(&root, x, 0.5 * h)[0];
    let error_estimate = (coarse - fine).abs() / 3.0;
    let floor = 256.0 * f64::EPSILON * center / (h * h);
    Ok(EllipticCheck {
        laplacian: (4.0 * fine - coarse) / 3.0,
        error_estimate,
        tolerance: 10.0 * error_estimate + floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn moser_trivial_and_small_c() {
        let z = moser_product(0.0, 10).unwrap();
        assert_eq!((z.partial_product, z.claimed_bound, z.ratio), (1.0, 1.0, 1.0));
        let small = moser_converged(1e-6).unwrap();
        assert!(small.converged);
        assert!(small.ratio >= 1.0 && small.ratio <= 1.0 + 1e-4, "{}", small.ratio);
        assert!(moser_product(-1.0, 3).is_err());
    }

    #[test]
    fn moser_order_one_exceeds_the_exponential() {
        let e = moser_product(1.0, 60).unwrap();
        assert!(e.converged);
        assert!(e.ratio > 1.0);
        // Direct evaluation in ordinary arithmetic.
        let direct: f64 = (0..=60).map(|i| (1.0 + 2f64.powi(i)).powf(0.5f64.powi(i))).product();
        assert!((e.partial_product - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn moser_log_space_matches_direct() {
        for c in [1e-3, 0.1, 0.5, 2.0] {
            let e = moser_product(c, 12).unwrap();
            let direct: f64 = (0..=12).map(|i| (1.0 + c * 2f64.powi(i)).powf(0.5f64.powi(i))).product();
            assert!((e.partial_product - direct).abs() <= 1e-12 * direct);
        }
        let huge = moser_product(1e300, 3000).unwrap();
        assert!(huge.log_product.is_finite());
    }

    #[test]
    fn moser_monotone() {
        let mut prev = 0.0;
        for n in 0..40 {
            let v = moser_product(0.3, n).unwrap().log_product;
            assert!(v >= prev);
            prev = v;
        }
        let sweep = moser_sweep(1e-6, 10.0, 30).unwrap();
        assert!(sweep.windows(2).all(|w| w[1].partial_product > w[0].partial_product));
        assert_eq!(moser_csv(&sweep).lines().count(), 31);
    }

    #[test]
    fn sqrt_of_anti_kahler_norm_is_harmonic() {
        let sdf = SelfDualForm::anti_kahler(0);
        let mut s = Sampler::new(11);
        for _ in 0..50 {
            let x = s.shell_point(0.5, 2.0);
            let c = sqrt_elliptic_check(&sdf, &x, 1e-2).unwrap();
            assert!(c.laplacian >= -1e-6, "{c:?}");
            assert!(c.passes());
        }
    }

    #[test]
    fn constant_norm_gives_zero() {
        let c = sqrt_elliptic_check(&SelfDualForm::kahler(1), &[0.3, 0.9, -0.2, 0.4], 1e-2).unwrap();
        assert!(c.laplacian.abs() < 1e-9);
        assert!(c.passes());
    }

    #[test]
    fn mixed_form_is_subharmonic() {
        let sdf = SelfDualForm::kahler(0).plus(SelfDualForm::anti_kahler(0).scaled(0.05));
        let mut s = Sampler::new(12);
        for _ in 0..200 {
            let x = s.shell_point(0.5, 2.0);
            assert!(sqrt_elliptic_check(&sdf, &x, 1e-2).unwrap().passes());
        }
        assert!(sqrt_elliptic_check(&SelfDualForm::empty(), &[1.0, 0.0, 0.0, 0.0], 1e-2).is_err());
    }
}
