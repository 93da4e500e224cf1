//! Tensor-product Gauss-Legendre quadrature over a square in the complex
//! plane. This is the numerical oracle every closed form in the crate is
//! validated against.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n as f64;
    for i in 0..n {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_{n-1}
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Compensated (Kahan) accumulator for complex sums; keeps parallel
/// reductions deterministic to the last bit for a fixed chunking.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanC64 {
    sum: C64,
    comp: C64,
}

impl KahanC64 {
    pub(crate) fn add(&mut self, v: C64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> C64 {
        self.sum
    }
}

fn tensor_integral<F>(f: &F, radius: f64, n: usize) -> C64
where
    F: Fn(C64) -> C64 + Sync,
{
    let (x, w) = gauss_legendre(n);
    let rows: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yi = radius * x[i];
            let wi = radius * w[i];
            let mut acc = KahanC64::default();
            for j in 0..n {
                let xj = radius * x[j];
                let wj = radius * w[j];
                acc.add(f(C64::new(xj, yi)) * (wi * wj));
            }
            acc.value()
        })
        .collect();
    let mut total = KahanC64::default();
    for r in rows {
        total.add(r);
    }
    total.value()
}

/// `∫ f(γ) d²γ` over the square `[-radius, radius]²`, refined until two
/// consecutive rules agree within `tol` (absolute).
///
/// Intended for Gaussian-enveloped integrands whose tail mass outside the
/// square is below `tol`; the achieved difference between the last two
/// rules is reported on failure.
pub fn quad2d<F>(f: F, radius: f64, tol: f64) -> Result<C64>
where
    F: Fn(C64) -> C64 + Sync,
{
    assert!(radius > 0.0 && tol > 0.0);
    let mut prev = tensor_integral(&f, radius, 160);
    for n in [200usize, 280, 400, 560, 800] {
        let cur = tensor_integral(&f, radius, n);
        if (cur - prev).norm() <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "quad2d did not reach tol {tol:e} at 800 nodes/axis (radius {radius})"
    )))
}
