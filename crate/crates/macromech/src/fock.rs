//! Small truncated Fock-basis reference engine.
//!
//! Everything here works on plain number-state vectors and matrices with an
//! explicit cutoff and is deliberately independent of the closed forms in
//! the rest of the crate; the test suites use it as an oracle. It is not a
//! general-purpose state engine.

use num_complex::Complex64 as C64;

use crate::phase_space::CoherentSuperposition;

/// `|β>` as a Fock vector of length `cutoff + 1` (not re-normalized; the
/// truncation error is the caller's concern).
pub fn coherent(beta: C64, cutoff: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(cutoff + 1);
    let mut amp = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    v.push(amp);
    for n in 1..=cutoff {
        amp *= beta / (n as f64).sqrt();
        v.push(amp);
    }
    v
}

/// Expand a coherent superposition in the Fock basis.
pub fn superposition_vec(state: &CoherentSuperposition, cutoff: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); cutoff + 1];
    for t in state.terms() {
        for (n, c) in coherent(t.amplitude, cutoff).into_iter().enumerate() {
            v[n] += t.weight * c;
        }
    }
    v
}

/// `<u|v>`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Lowering operator: `(a v)_m = sqrt(m+1) v_{m+1}`.
pub fn lower(v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for m in 0..v.len() - 1 {
        out[m] = ((m + 1) as f64).sqrt() * v[m + 1];
    }
    out
}

/// Raising operator: `(a† v)_m = sqrt(m) v_{m-1}`. The top component falls
/// off the truncation.
pub fn raise(v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for m in 1..v.len() {
        out[m] = (m as f64).sqrt() * v[m - 1];
    }
    out
}

/// `D(γ) v` through the normal-ordered factorization
/// `e^{-|γ|²/2} e^{γ a†} e^{-γ* a}`. The lowering series terminates exactly
/// on a truncated vector; the raising series converges factorially.
pub fn displace(v: &[C64], gamma: C64) -> Vec<C64> {
    let dim = v.len();
    let apply_series = |v: &[C64], coef: C64, raise_op: bool| -> Vec<C64> {
        let mut acc = v.to_vec();
        let mut term = v.to_vec();
        for k in 1..=dim {
            term = if raise_op { raise(&term) } else { lower(&term) };
            let s = coef / k as f64;
            let mut biggest = 0.0f64;
            for t in term.iter_mut() {
                *t *= s;
                biggest = biggest.max(t.norm_sqr());
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if biggest < 1e-36 {
                break;
            }
        }
        acc
    };
    let u = apply_series(v, -gamma.conj(), false);
    let mut w = apply_series(&u, gamma, true);
    let scale = (-0.5 * gamma.norm_sqr()).exp();
    for t in w.iter_mut() {
        *t *= scale;
    }
    w
}

/// `<a†a>` of a (normalized) vector.
pub fn mean_n(v: &[C64]) -> f64 {
    v.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
}

/// Dense square matrix on the truncated space.
#[derive(Debug, Clone)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<C64>, // row-major
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = C64::new(x, 0.0);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.data.iter_mut() {
            *v *= s;
        }
    }
}

/// Thermal occupation probabilities `p_n = n̄^n / (n̄+1)^{n+1}`.
pub fn thermal_probs(nbar: f64, cutoff: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(cutoff + 1);
    let ratio = nbar / (nbar + 1.0);
    let mut cur = 1.0 / (nbar + 1.0);
    for _ in 0..=cutoff {
        p.push(cur);
        cur *= ratio;
    }
    p
}

/// Displacement operator as a dense matrix (columns are `D(γ)|n>`).
pub fn displace_op(gamma: C64, cutoff: usize) -> Mat {
    let dim = cutoff + 1;
    let mut m = Mat::zeros(dim);
    for j in 0..dim {
        let mut basis = vec![C64::new(0.0, 0.0); dim];
        basis[j] = C64::new(1.0, 0.0);
        let col = displace(&basis, gamma);
        for i in 0..dim {
            m.data[i * dim + j] = col[i];
        }
    }
    m
}

/// Squeeze operator `S(ζ) = exp[(ζ* a² - ζ a†²)/2]` by scaled-and-squared
/// Taylor expansion of the (anti-Hermitian) generator.
pub fn squeeze_op(zeta: C64, cutoff: usize) -> Mat {
    let dim = cutoff + 1;
    let mut gen = Mat::zeros(dim);
    // a² and a†² matrix elements
    for n in 2..dim {
        let s = ((n * (n - 1)) as f64).sqrt();
        gen.data[(n - 2) * dim + n] += 0.5 * zeta.conj() * s; // a² part
        gen.data[n * dim + (n - 2)] -= 0.5 * zeta * s; // -a†² part
    }
    // matrix 1-norm estimate for scaling
    let norm: f64 = (0..dim)
        .map(|i| (0..dim).map(|j| gen.at(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = norm.log2().ceil().max(0.0) as u32 + 1;
    let scale = 2.0f64.powi(-(s as i32));
    let mut a = gen;
    a.scale(scale);
    // Taylor exp
    let mut result = Mat::from_diag(&vec![1.0; dim]);
    let mut term = Mat::from_diag(&vec![1.0; dim]);
    for k in 1..60 {
        term = term.mul(&a);
        term.scale(1.0 / k as f64);
        let mag: f64 = term.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (r, t) in result.data.iter_mut().zip(&term.data) {
            *r += t;
        }
        if mag < 1e-20 {
            break;
        }
    }
    for _ in 0..s {
        result = result.mul(&result);
    }
    result
}

/// `b† ρ b`, the excitation-conditioned (unnormalized) map used by the
/// photon-subtraction analysis.
pub fn add_excitation_rho(rho: &Mat) -> Mat {
    let n = rho.dim;
    let mut out = Mat::zeros(n);
    for i in 1..n {
        for j in 1..n {
            let s = ((i * j) as f64).sqrt();
            out.data[i * n + j] = s * rho.data[(i - 1) * n + (j - 1)];
        }
    }
    out
}

/// `<a†a>` of a density matrix (not necessarily normalized).
pub fn mean_n_rho(rho: &Mat) -> f64 {
    let tr = rho.trace().re;
    (0..rho.dim).map(|i| i as f64 * rho.at(i, i).re).sum::<f64>() / tr
}

/// `Tr[ρ D(γ)] / Tr[ρ]`.
pub fn char_fn_rho(rho: &Mat, d_op: &Mat) -> C64 {
    let n = rho.dim;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho.data[i * n + j] * d_op.data[j * n + i];
        }
    }
    acc / rho.trace()
}

/// Displaced squeezed thermal state `D(μ) S(ζ) ρ_th S† D†` as a density
/// matrix, the generic Gaussian-state constructor for oracle checks.
pub fn gaussian_rho(mu: C64, zeta: C64, nbar: f64, cutoff: usize) -> Mat {
    let rho_th = Mat::from_diag(&thermal_probs(nbar, cutoff));
    let s = squeeze_op(zeta, cutoff);
    let d = displace_op(mu, cutoff);
    let u = d.mul(&s);
    u.mul(&rho_th).mul(&u.dagger())
}
