//! Central finite differences on ℝ⁴ for vector-valued functions.

fn offset(x: &[f64; 4], axis: usize, h: f64) -> [f64; 4] {
    let mut y = *x;
    y[axis] += h;
    y
}

/// Second-order central difference `∂_axis f(x)`.
pub fn partial<const N: usize>(
    f: &impl Fn(&[f64; 4]) -> [f64; N],
    x: &[f64; 4],
    axis: usize,
    h: f64,
) -> [f64; N] {
    let p = f(&offset(x, axis, h));
    let m = f(&offset(x, axis, -h));
    std::array::from_fn(|k| (p[k] - m[k]) / (2.0 * h))
}

/// Fourth-order Richardson combination of central differences at `h`, `h/2`.
pub fn partial_richardson<const N: usize>(
    f: &impl Fn(&[f64; 4]) -> [f64; N],
    x: &[f64; 4],
    axis: usize,
    h: f64,
) -> [f64; N] {
    let coarse = partial(f, x, axis, h);
    let fine = partial(f, x, axis, 0.5 * h);
    std::array::from_fn(|k| (4.0 * fine[k] - coarse[k]) / 3.0)
}

/// All four partials, `out[axis][component]`.
pub fn jacobian<const N: usize>(
    f: &impl Fn(&[f64; 4]) -> [f64; N],
    x: &[f64; 4],
    h: f64,
    richardson: bool,
) -> [[f64; N]; 4] {
    std::array::from_fn(|axis| {
        if richardson {
            partial_richardson(f, x, axis, h)
        } else {
            partial(f, x, axis, h)
        }
    })
}

/// Flat Laplacian `Σ_μ ∂_μ² f` by the standard 9-point stencil in ℝ⁴.
pub fn laplacian<const N: usize>(
    f: &impl Fn(&[f64; 4]) -> [f64; N],
    x: &[f64; 4],
    h: f64,
) -> [f64; N] {
    let c = f(x);
    let mut out = [0.0; N];
    for axis in 0..4 {
        let p = f(&offset(x, axis, h));
        let m = f(&offset(x, axis, -h));
        for k in 0..N {
            out[k] += (p[k] - 2.0 * c[k] + m[k]) / (h * h);
        }
    }
    out
}

/// Observed order `log₂(e(h)/e(h/2))`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(x: &[f64; 4]) -> [f64; 1] {
        [x[0].powi(3) + x[1] * x[2] * x[3] + (x[3]).sin()]
    }

    #[test]
    fn partial_orders() {
        let x = [0.3, -0.2, 0.7, 1.1];
        let exact = 3.0 * 0.09;
        let e1 = (partial(&cubic, &x, 0, 1e-2)[0] - exact).abs();
        let e2 = (partial(&cubic, &x, 0, 5e-3)[0] - exact).abs();
        assert!((observed_order(e1, e2) - 2.0).abs() < 0.05);
        let exact3 = 0.2 * 0.7 * 0.0 + (-0.2 * 0.7) + 1.1f64.cos();
        let r = partial_richardson(&cubic, &x, 3, 1e-2)[0];
        assert!((r - exact3).abs() < 1e-9);
    }

    #[test]
    fn laplacian_of_harmonic_function() {
        // 1/|x|² is harmonic on ℝ⁴∖{0}.
        let f = |x: &[f64; 4]| [1.0 / x.iter().map(|v| v * v).sum::<f64>()];
        let x = [0.5, 0.4, -0.3, 0.6];
        assert!(laplacian(&f, &x, 1e-3)[0].abs() < 1e-4);
        let q = |x: &[f64; 4]| [x[0] * x[0] + 2.0 * x[3] * x[3]];
        assert!((laplacian(&q, &x, 1e-2)[0] - 6.0).abs() < 1e-9);
    }
}
