//! Macroscopicity of excitation-subtracted Gaussian mechanical states.
//!
//! Subtracting a single photon from the cavity field heralds, through the
//! field-mirror correlations of the subtraction protocol, the
//! creation-operator conditioning `ρ -> b† ρ b / Tr[b b† ρ]` on a Gaussian
//! mechanical state (on a two-mode-squeezed pair, annihilating a photon on
//! one arm acts as `b†` on the other). On a Gaussian Wigner function the
//! map closes into polynomial-times-Gaussian form:
//!
//! ```text
//! W_ps(δ) = N A(v) exp(-½ vᵀ Σ⁻¹ v),     v = δ - μ,
//! A(v)    = |v+μ|² - ½ + ½ (v+μ)ᵀ Σ⁻¹ v + (1/16)(vᵀ Σ⁻² v - tr Σ⁻¹)
//! ```
//!
//! from the Bopp rules `ρ b ↔ (δ - ½∂_{δ*})W`, `b† ρ ↔ (δ* - ½∂_δ)W`, in
//! the convention where vacuum variances are 1/4 and `<b†b> = ∫|δ|² W - ½`.
//! A vacuum input yields the single-excitation Wigner
//! `(2/π)(4|δ|² - 1) e^{-2|δ|²}` exactly. All moment integrals are
//! analytic (Gaussian moments against polynomials); quadrature appears
//! only as a test oracle.
//!
//! The measure is evaluated through the Wigner-derivative route. Passing
//! the definition `I = (1/2π)∫(|γ|²-1)|χ|² d²γ` through the symplectic
//! Parseval identity gives
//!
//! ```text
//! I(ρ) = -(π/2) [ ∫ W ∂²_{δδ*} W d²δ + ∫ W² d²δ ],
//! ```
//!
//! a derivative term plus the purity term `(π/2)∫W² = Tr ρ²/2`. Without
//! the purity term the vacuum would score 1/2 instead of 0; both terms are
//! kept and the equivalence with the characteristic-function route is
//! pinned in the test suites.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Degree cap of the internal polynomial arithmetic.
const MAX_DEG: usize = 8;

/// Polynomial in `(x, p)` with real coefficients, total degree <= MAX_DEG.
#[derive(Debug, Clone, Copy)]
struct Poly2 {
    c: [[f64; MAX_DEG + 1]; MAX_DEG + 1],
}

impl Poly2 {
    fn zero() -> Self {
        Self { c: [[0.0; MAX_DEG + 1]; MAX_DEG + 1] }
    }

    fn constant(v: f64) -> Self {
        let mut p = Self::zero();
        p.c[0][0] = v;
        p
    }

    fn set(mut self, i: usize, j: usize, v: f64) -> Self {
        self.c[i][j] = v;
        self
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..=MAX_DEG {
            for j in 0..=MAX_DEG {
                out.c[i][j] = self.c[i][j] + other.c[i][j];
            }
        }
        out
    }

    fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..=MAX_DEG {
            for j in 0..=MAX_DEG {
                if self.c[i][j] == 0.0 {
                    continue;
                }
                for k in 0..=MAX_DEG - i {
                    for l in 0..=MAX_DEG - j {
                        if other.c[k][l] != 0.0 {
                            out.c[i + k][j + l] += self.c[i][j] * other.c[k][l];
                        }
                    }
                }
            }
        }
        out
    }

    fn dx(&self) -> Self {
        let mut out = Self::zero();
        for i in 1..=MAX_DEG {
            for j in 0..=MAX_DEG {
                out.c[i - 1][j] = i as f64 * self.c[i][j];
            }
        }
        out
    }

    fn dp(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..=MAX_DEG {
            for j in 1..=MAX_DEG {
                out.c[i][j - 1] = j as f64 * self.c[i][j];
            }
        }
        out
    }

    fn laplacian(&self) -> Self {
        self.dx().dx().add(&self.dp().dp())
    }

    fn eval(&self, x: f64, p: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..=MAX_DEG).rev() {
            let mut row = 0.0;
            for j in (0..=MAX_DEG).rev() {
                row = row * p + self.c[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }
}

/// Central moments `E[x^i p^j]` of a zero-mean bivariate Gaussian, via
/// Stein's recursion, tabulated up to total degree `MAX_DEG`.
fn central_moments(cov: [[f64; 2]; 2]) -> [[f64; MAX_DEG + 1]; MAX_DEG + 1] {
    let mut m = [[0.0; MAX_DEG + 1]; MAX_DEG + 1];
    m[0][0] = 1.0;
    for total in 1..=MAX_DEG {
        for i in 0..=total {
            let j = total - i;
            m[i][j] = if i >= 1 {
                let mut v = 0.0;
                if i >= 2 {
                    v += (i - 1) as f64 * cov[0][0] * m[i - 2][j];
                }
                if j >= 1 {
                    v += j as f64 * cov[0][1] * m[i - 1][j - 1];
                }
                v
            } else if j >= 2 {
                (j - 1) as f64 * cov[1][1] * m[0][j - 2]
            } else {
                0.0
            };
        }
    }
    m
}

fn expectation(poly: &Poly2, moments: &[[f64; MAX_DEG + 1]; MAX_DEG + 1]) -> f64 {
    let mut acc = 0.0;
    for i in 0..=MAX_DEG {
        for j in 0..=MAX_DEG {
            if poly.c[i][j] != 0.0 {
                acc += poly.c[i][j] * moments[i][j];
            }
        }
    }
    acc
}

/// A Gaussian state of the mechanical mode in `(Re δ, Im δ)` coordinates:
/// the vacuum has covariance `diag(1/4, 1/4)`, so the uncertainty relation
/// reads `det(cov) >= 1/16`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianState {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        if !(mean.iter().all(|v| v.is_finite()) && cov.iter().flatten().all(|v| v.is_finite())) {
            return Err(Error::Config("non-finite Gaussian state".into()));
        }
        let scale = cov[0][0].abs().max(cov[1][1].abs());
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::Config("covariance matrix must be symmetric".into()));
        }
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if !(cov[0][0] > 0.0 && det > 0.0) {
            return Err(Error::Config("covariance matrix must be positive definite".into()));
        }
        if det < (1.0 / 16.0) * (1.0 - 1e-9) {
            return Err(Error::Config(format!(
                "det(cov) = {det:.6e} violates the uncertainty bound 1/16"
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        Self { mean: [0.0, 0.0], cov: [[0.25, 0.0], [0.0, 0.25]] }
    }

    /// Thermal state with mean occupation `nbar`, optionally displaced.
    pub fn thermal(nbar: f64, mean: [f64; 2]) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Config(format!("nbar = {nbar} must be >= 0")));
        }
        let v = 0.25 * (2.0 * nbar + 1.0);
        Self::new(mean, [[v, 0.0], [0.0, v]])
    }

    /// Squeezed thermal state: variances `(s/4) e^{±2r}` along the axes,
    /// `s = 2 nbar + 1`.
    pub fn squeezed_thermal(nbar: f64, r: f64, mean: [f64; 2]) -> Result<Self> {
        let s = 2.0 * nbar + 1.0;
        Self::new(mean, [[0.25 * s * (2.0 * r).exp(), 0.0], [0.0, 0.25 * s * (-2.0 * r).exp()]])
    }

    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    fn precision(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [[self.cov[1][1] / d, -self.cov[0][1] / d], [-self.cov[1][0] / d, self.cov[0][0] / d]]
    }

    /// Normalized Gaussian Wigner value at `δ`.
    pub fn wigner(&self, delta: C64) -> f64 {
        let v = [delta.re - self.mean[0], delta.im - self.mean[1]];
        let p = self.precision();
        let q = v[0] * v[0] * p[0][0] + 2.0 * v[0] * v[1] * p[0][1] + v[1] * v[1] * p[1][1];
        (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * self.det().sqrt())
    }
}

/// A Wigner function of the form `norm · A(v) · G(v)` with `A` a real
/// polynomial of total degree <= 2 in Gaussian-centered coordinates and
/// `G` the normalized Gaussian of [`GaussianState`].
#[derive(Debug, Clone)]
pub struct GaussPolyWigner {
    poly: Poly2,
    pub gaussian: GaussianState,
    pub norm: f64,
}

impl GaussPolyWigner {
    /// Wigner value at a phase-space point.
    pub fn evaluate(&self, delta: C64) -> f64 {
        let v = [delta.re - self.gaussian.mean[0], delta.im - self.gaussian.mean[1]];
        self.norm * self.poly.eval(v[0], v[1]) * self.gaussian.wigner(delta)
    }

    /// Coefficients of `A` on the basis `1, x, p, x², xp, p²` (centered
    /// coordinates).
    pub fn poly_coefficients(&self) -> [f64; 6] {
        [
            self.poly.c[0][0],
            self.poly.c[1][0],
            self.poly.c[0][1],
            self.poly.c[2][0],
            self.poly.c[1][1],
            self.poly.c[0][2],
        ]
    }
}

/// The excitation-conditioned state heralded by subtracting one photon
/// from the field: `ρ -> b† ρ b / (<b†b> + 1)` on the Gaussian input, in
/// Wigner form.
///
/// A vacuum input returns the Fock-1 Wigner function exactly. Extremely
/// anisotropic covariances (eigenvalue ratio above 1e6) are rejected as
/// near-singular.
pub fn subtract_excitation(g: &GaussianState) -> Result<GaussPolyWigner> {
    let tr = g.cov[0][0] + g.cov[1][1];
    let disc =
        (0.25 * (g.cov[0][0] - g.cov[1][1]).powi(2) + g.cov[0][1] * g.cov[1][0]).max(0.0).sqrt();
    let lmin = 0.5 * tr - disc;
    let lmax = 0.5 * tr + disc;
    if !(lmin > 0.0) || lmax / lmin > 1e6 {
        return Err(Error::Config(format!(
            "covariance too close to singular (eigenvalues {lmin:.3e}, {lmax:.3e})"
        )));
    }

    let p = g.precision();
    let [mx, mp] = g.mean;

    // |v + μ|²
    let abs2 = Poly2::zero()
        .set(0, 0, mx * mx + mp * mp)
        .set(1, 0, 2.0 * mx)
        .set(0, 1, 2.0 * mp)
        .set(2, 0, 1.0)
        .set(0, 2, 1.0);
    // (v + μ)ᵀ P v
    let quad_shift = Poly2::zero()
        .set(2, 0, p[0][0])
        .set(0, 2, p[1][1])
        .set(1, 1, p[0][1] + p[1][0])
        .set(1, 0, mx * p[0][0] + mp * p[1][0])
        .set(0, 1, mx * p[0][1] + mp * p[1][1]);
    // vᵀ P² v
    let p2 = [
        [p[0][0] * p[0][0] + p[0][1] * p[1][0], p[0][0] * p[0][1] + p[0][1] * p[1][1]],
        [p[1][0] * p[0][0] + p[1][1] * p[1][0], p[1][0] * p[0][1] + p[1][1] * p[1][1]],
    ];
    let quad_p2 =
        Poly2::zero().set(2, 0, p2[0][0]).set(0, 2, p2[1][1]).set(1, 1, p2[0][1] + p2[1][0]);
    let tr_p = p[0][0] + p[1][1];

    let a = abs2
        .add(&Poly2::constant(-0.5))
        .add(&quad_shift.scale(0.5))
        .add(&quad_p2.add(&Poly2::constant(-tr_p)).scale(1.0 / 16.0));

    // normalization Tr[b b† ρ] = |μ|² + tr Σ + 1/2
    let z = mx * mx + mp * mp + g.cov[0][0] + g.cov[1][1] + 0.5;
    let out = GaussPolyWigner { poly: a, gaussian: *g, norm: 1.0 / z };

    debug_assert!({
        let m = central_moments(g.cov);
        (expectation(&a, &m) * out.norm - 1.0).abs() < 1e-10
    });
    Ok(out)
}

/// `<b†b> = ∫ |δ|² W d²δ - 1/2` by analytic Gaussian moments.
pub fn mean_excitations_wigner(w: &GaussPolyWigner) -> f64 {
    let [mx, mp] = w.gaussian.mean;
    let abs2 = Poly2::zero()
        .set(0, 0, mx * mx + mp * mp)
        .set(1, 0, 2.0 * mx)
        .set(0, 1, 2.0 * mp)
        .set(2, 0, 1.0)
        .set(0, 2, 1.0);
    let m = central_moments(w.gaussian.cov);
    w.norm * expectation(&abs2.mul(&w.poly), &m) - 0.5
}

/// The macroscopicity measure through the Wigner-derivative route,
/// purity term included (module docs):
/// `I = -(π/2)[∫ W ∂²_{δδ*} W + ∫ W²]`, evaluated analytically.
pub fn measure_I_wigner(w: &GaussPolyWigner) -> f64 {
    let p = w.gaussian.precision();
    let sqrt_det = w.gaussian.det().sqrt();
    let b = w.poly.scale(w.norm);

    let bx = b.dx();
    let bp = b.dp();
    let pv_x = Poly2::zero().set(1, 0, p[0][0]).set(0, 1, p[0][1]);
    let pv_p = Poly2::zero().set(1, 0, p[1][0]).set(0, 1, p[1][1]);
    let grad_pv = bx.mul(&pv_x).add(&bp.mul(&pv_p));

    let p2 = [
        [p[0][0] * p[0][0] + p[0][1] * p[1][0], p[0][0] * p[0][1] + p[0][1] * p[1][1]],
        [p[1][0] * p[0][0] + p[1][1] * p[1][0], p[1][0] * p[0][1] + p[1][1] * p[1][1]],
    ];
    let quad_p2 =
        Poly2::zero().set(2, 0, p2[0][0]).set(0, 2, p2[1][1]).set(1, 1, p2[0][1] + p2[1][0]);
    let tr_p = p[0][0] + p[1][1];

    // B ∇²B - 2 B (∇B)ᵀPv + B² (vᵀP²v - trP), integrated against G²
    let b2 = b.mul(&b);
    let integrand = b
        .mul(&b.laplacian())
        .add(&b.mul(&grad_pv).scale(-2.0))
        .add(&b2.mul(&quad_p2.add(&Poly2::constant(-tr_p))));

    // G² carries 1/(4π √det Σ) times the normalized Gaussian of cov Σ/2
    let half_cov = [
        [0.5 * w.gaussian.cov[0][0], 0.5 * w.gaussian.cov[0][1]],
        [0.5 * w.gaussian.cov[1][0], 0.5 * w.gaussian.cov[1][1]],
    ];
    let m2 = central_moments(half_cov);
    let derivative_term = expectation(&integrand, &m2) / (32.0 * sqrt_det);
    let purity_term = expectation(&b2, &m2) / (8.0 * sqrt_det);
    -derivative_term - purity_term
}

/// One row of a detuning sweep.
#[derive(Debug, Clone, Copy)]
pub struct DetuningPoint {
    pub delta: f64,
    pub macroscopicity: f64,
    pub mean_excitations: f64,
}

/// Result of sweeping the subtraction metrics over a detuning table;
/// `argmax` indexes the row of largest `I`.
#[derive(Debug, Clone)]
pub struct DetuningSweep {
    pub rows: Vec<DetuningPoint>,
    pub argmax: usize,
}

/// Subtract and score every table row (rows processed in parallel,
/// deterministic output order).
pub fn detuning_sweep(table: &[(f64, GaussianState)]) -> Result<DetuningSweep> {
    if table.is_empty() {
        return Err(Error::Config("empty detuning table".into()));
    }
    let rows: Vec<DetuningPoint> = table
        .par_iter()
        .map(|(delta, g)| {
            let w = subtract_excitation(g)?;
            Ok(DetuningPoint {
                delta: *delta,
                macroscopicity: measure_I_wigner(&w),
                mean_excitations: mean_excitations_wigner(&w),
            })
        })
        .collect::<Result<_>>()?;
    let argmax = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.macroscopicity.total_cmp(&b.1.macroscopicity))
        .map(|(i, _)| i)
        .unwrap();
    Ok(DetuningSweep { rows, argmax })
}

/// Synthetic stand-in for the protocol's detuning-to-covariance map: the
/// thermal broadening has a valley at an interior `Δ_opt = 0.7` while a
/// mild axis squeezing grows linearly, so the subtracted state is purest
/// (and `I` largest) strictly inside the sweep range. Quantitatively
/// arbitrary; real covariance tables from the upstream protocol enter
/// through [`read_detuning_table`].
pub fn synthetic_detuning_table(rows: usize) -> Vec<(f64, GaussianState)> {
    assert!(rows >= 3);
    let (lo, hi, d_opt) = (0.05, 2.0, 0.7);
    (0..rows)
        .map(|i| {
            let delta = lo + (hi - lo) * i as f64 / (rows - 1) as f64;
            let n_eff = 0.02 + 0.4 * (delta - d_opt) * (delta - d_opt);
            let r = 0.3 * delta;
            let g = GaussianState::squeezed_thermal(n_eff, r, [0.0, 0.0])
                .expect("synthetic covariance valid");
            (delta, g)
        })
        .collect()
}

/// Read a detuning table from CSV with header
/// `delta,var_x,var_p[,mean_x,mean_p,cov_xp]`.
pub fn read_detuning_table(path: &Path) -> Result<Vec<(f64, GaussianState)>> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header =
        lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty table".into() })?
            .map_err(Error::Io)?;
    let cols: Vec<String> = header.split(',').map(|s| s.trim().to_ascii_lowercase()).collect();
    if cols.len() < 3 || cols[..3] != ["delta", "var_x", "var_p"] {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header must start with delta,var_x,var_p (got {header:?})"),
        });
    }
    let extended = cols.len() == 6;
    if cols.len() != 3 && (!extended || cols[3..6] != ["mean_x", "mean_p", "cov_xp"]) {
        return Err(Error::Parse {
            line: 1,
            msg: "optional columns must be exactly mean_x,mean_p,cov_xp".into(),
        });
    }
    let mut table = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(Error::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad number {f:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        if fields.len() != cols.len() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {} fields, got {}", cols.len(), fields.len()),
            });
        }
        let (mean, cov_xp) =
            if extended { ([fields[3], fields[4]], fields[5]) } else { ([0.0, 0.0], 0.0) };
        let g = GaussianState::new(mean, [[fields[1], cov_xp], [cov_xp, fields[2]]])
            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        table.push((fields[0], g));
    }
    if table.is_empty() {
        return Err(Error::Parse { line: 2, msg: "table has no data rows".into() });
    }
    Ok(table)
}

/// Write sweep results as `delta,I,mean_excitations` (full precision).
pub fn write_sweep_csv(sweep: &DetuningSweep, out: &mut impl Write) -> Result<()> {
    writeln!(out, "delta,I,mean_excitations")?;
    for r in &sweep.rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", r.delta, r.macroscopicity, r.mean_excitations)?;
    }
    Ok(())
}
