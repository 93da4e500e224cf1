//! The time-evolved joint field-mirror state and its conditioning on
//! general-dyne measurements of the cavity field.
//!
//! In dimensionless units (`k = g/ω_m`, `r = ω_o/ω_m`, `τ = ω_m t`) the
//! joint state of an initially coherent cavity `|α>` and mirror `|β>` is
//!
//! ```text
//! |ψ(τ)> = e^{-|α|²/2} Σ_n c_n(α, τ) |n>_c |φ_n(τ)>_m
//! φ_n(τ) = k η n + β e^{-iτ},            η = 1 - e^{-iτ}
//! c_n     = (α e^{ϕ})ⁿ/√(n!) · e^{i k² n² (τ - sin τ) - i r τ n}
//! ϕ       = k (η β* e^{iτ} - η* β e^{-iτ}) / 2
//! ```
//!
//! Projecting the field onto a quadrature eigenstate `|x(θ)>` (homodyne) or
//! a coherent state `|σ>` (heterodyne) leaves the mirror in the coherent
//! superposition `N Σ_n c_n f_M(n) |φ_n>`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::phase_space::{oscillator_wavefunction, CoherentSuperposition, CoherentTerm};

/// Hard cap on the Fock cutoff accepted anywhere in the crate.
pub const MAX_CUTOFF: usize = 200;

/// Tail probability above which [`evolve_joint`] refuses a truncation.
pub const TRUNCATION_TOL: f64 = 1e-8;

/// Dimensionless parameters of the optomechanical evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Initial cavity coherent amplitude.
    pub alpha: C64,
    /// Initial mechanical coherent amplitude (or thermal displacement).
    pub beta: C64,
    /// Coupling `g/ω_m`.
    pub k: f64,
    /// Frequency ratio `ω_o/ω_m`; a Fock-diagonal field rotation that can be
    /// absorbed into the measurement phase, 0 by default.
    pub r: f64,
    /// Evolution time `ω_m t`.
    pub tau: f64,
}

impl SystemParams {
    pub fn new(alpha: C64, beta: C64, k: f64, r: f64, tau: f64) -> Result<Self> {
        let p = Self { alpha, beta, k, r, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::Config("non-finite initial amplitudes".into()));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("coupling k = {} must be >= 0", self.k)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("time tau = {} must be >= 0", self.tau)));
        }
        if !self.r.is_finite() {
            return Err(Error::Config("non-finite frequency ratio r".into()));
        }
        Ok(())
    }

    /// `η = 1 - e^{-iτ}`.
    pub fn eta(&self) -> C64 {
        C64::new(1.0, 0.0) - (-C64::i() * self.tau).exp()
    }

    /// The mechanical amplitude attached to the `n`-photon sector.
    pub fn mech_amplitude(&self, n: usize) -> C64 {
        self.k * self.eta() * n as f64 + self.beta * (-C64::i() * self.tau).exp()
    }

    /// The β-dependent phase `ϕ` entering `c_n` (purely imaginary).
    pub fn varphi(&self) -> C64 {
        let eta = self.eta();
        let rot = (C64::i() * self.tau).exp();
        0.5 * self.k * (eta * self.beta.conj() * rot - eta.conj() * self.beta * rot.conj())
    }
}

/// One Fock sector of the joint state.
#[derive(Debug, Clone, Copy)]
pub struct JointSector {
    pub n: usize,
    /// `c_n(α, τ)`.
    pub coeff: C64,
    /// `φ_n(τ)`.
    pub mech_amplitude: C64,
}

/// The entangled field-mirror state, one coherent mechanical amplitude per
/// photon-number sector.
#[derive(Debug, Clone)]
pub struct JointState {
    pub sectors: Vec<JointSector>,
    /// Global factor `e^{-|α|²/2}`.
    pub prefactor: f64,
}

/// Build the joint state truncated at `n_max` photons.
///
/// Fails when the discarded Poisson tail `Σ_{n>n_max} e^{-|α|²} |α|^{2n}/n!`
/// exceeds [`TRUNCATION_TOL`]; the error suggests a sufficient cutoff.
pub fn evolve_joint(params: &SystemParams, n_max: usize) -> Result<JointState> {
    params.validate()?;
    if n_max < 1 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    if n_max > MAX_CUTOFF {
        return Err(Error::Range(format!("n_max {n_max} exceeds hard cap {MAX_CUTOFF}")));
    }
    let tail = poisson_tail(params.alpha.norm_sqr(), n_max);
    if tail > TRUNCATION_TOL {
        let needed = suggest_cutoff(params.alpha.norm_sqr());
        return Err(Error::Range(format!(
            "truncation tail {tail:.3e} above {TRUNCATION_TOL:e} at n_max = {n_max}; \
             n_max >= {needed} is sufficient"
        )));
    }

    let kerr = params.k * params.k * (params.tau - params.tau.sin());
    let base = params.alpha * params.varphi().exp();
    let mut sectors = Vec::with_capacity(n_max + 1);
    let mut amp = C64::new(1.0, 0.0); // (α e^ϕ)^n / sqrt(n!)
    for n in 0..=n_max {
        if n > 0 {
            amp *= base / (n as f64).sqrt();
        }
        let nf = n as f64;
        let phase = C64::i() * (kerr * nf * nf - params.r * params.tau * nf);
        sectors.push(JointSector {
            n,
            coeff: amp * phase.exp(),
            mech_amplitude: params.mech_amplitude(n),
        });
    }
    Ok(JointState { sectors, prefactor: (-0.5 * params.alpha.norm_sqr()).exp() })
}

fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    let mut term = (-mean).exp();
    let mut kept = term;
    for n in 1..=n_max {
        term *= mean / n as f64;
        kept += term;
    }
    (1.0 - kept).max(0.0)
}

fn suggest_cutoff(mean: f64) -> usize {
    let mut n = 1;
    while poisson_tail(mean, n) > TRUNCATION_TOL && n < MAX_CUTOFF {
        n += 1;
    }
    n
}

/// The projective measurement applied to the cavity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementSetting {
    /// Projection onto the quadrature eigenstate `|x(θ)>`.
    Homodyne { x: f64, theta: f64 },
    /// Projection onto the coherent state `|σ>`.
    Heterodyne { sigma: C64 },
}

impl MeasurementSetting {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Homodyne { x, theta } => x.is_finite() && theta.is_finite(),
            Self::Heterodyne { sigma } => sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config("non-finite measurement setting".into()))
        }
    }
}

/// The measurement amplitude `f_M(n)`:
///
/// * heterodyne: `σ*ⁿ e^{-|σ|²/2} / √(n!)`,
/// * homodyne: `e^{-x²/2 - iθn} H_n(x) / (√(2ⁿ n!) π^{1/4})`, evaluated as
///   `e^{-iθn} ψ_n(x)` with the normalized oscillator recurrence.
pub fn measurement_amplitude(setting: &MeasurementSetting, n: usize) -> C64 {
    match *setting {
        MeasurementSetting::Heterodyne { sigma } => {
            let mut amp = C64::new((-0.5 * sigma.norm_sqr()).exp(), 0.0);
            for m in 1..=n {
                amp *= sigma.conj() / (m as f64).sqrt();
            }
            amp
        }
        MeasurementSetting::Homodyne { x, theta } => {
            (-C64::i() * (theta * n as f64)).exp() * oscillator_wavefunction(n, x)
        }
    }
}

/// Condition the mirror on a field measurement outcome: weights
/// `∝ e^{-|α|²/2} c_n f_M(n)` on the amplitudes `φ_n`, normalized through
/// the Gram matrix.
///
/// A record whose weights all vanish below 1e-300 is rejected as a
/// zero-probability outcome.
pub fn condition(
    joint: &JointState,
    setting: &MeasurementSetting,
) -> Result<CoherentSuperposition> {
    setting.validate()?;
    let mut terms = Vec::with_capacity(joint.sectors.len());
    let mut largest = 0.0f64;
    for s in &joint.sectors {
        let w = joint.prefactor * s.coeff * measurement_amplitude(setting, s.n);
        largest = largest.max(w.norm());
        terms.push(CoherentTerm::new(w, s.mech_amplitude));
    }
    if largest < 1e-300 {
        return Err(Error::DegenerateOutcome(
            "all conditional weights below 1e-300".into(),
        ));
    }
    CoherentSuperposition::new(terms)
}

/// Unnormalized squared norm of the conditional state; for homodyne
/// settings this is the outcome probability density over `x`.
pub fn outcome_density(joint: &JointState, setting: &MeasurementSetting) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for sn in &joint.sectors {
        let wn = sn.coeff * measurement_amplitude(setting, sn.n);
        for sl in &joint.sectors {
            let wl = sl.coeff * measurement_amplitude(setting, sl.n);
            acc += wn
                * wl.conj()
                * crate::phase_space::coherent_overlap(sl.mech_amplitude, sn.mech_amplitude);
        }
    }
    joint.prefactor * joint.prefactor * acc.re
}

/// Smallest cutoff `n_max >= 1` whose discarded measurement-weighted tail
/// `Σ_{n>n_max} |c_n f_M(n)|²` stays below `tol` relative to the total.
///
/// Fails when even the hard cap [`MAX_CUTOFF`] cannot satisfy `tol`.
pub fn choose_cutoff(
    params: &SystemParams,
    setting: &MeasurementSetting,
    tol: f64,
) -> Result<usize> {
    params.validate()?;
    setting.validate()?;
    if !(tol > 0.0 && tol <= 1.0) {
        return Err(Error::Config(format!("tolerance {tol} outside (0, 1]")));
    }
    let horizon = MAX_CUTOFF + 20;
    let amod = params.alpha.norm();
    let mut weights = Vec::with_capacity(horizon + 1);
    let mut cmag = 1.0f64; // |α|^n / sqrt(n!)
    for n in 0..=horizon {
        if n > 0 {
            cmag *= amod / (n as f64).sqrt();
        }
        let f = measurement_amplitude(setting, n).norm();
        weights.push((cmag * f).powi(2));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateOutcome("zero total conditional weight".into()));
    }
    let mut tail = total;
    for (n, w) in weights.iter().enumerate() {
        tail -= w;
        if n >= 1 && tail < tol * total {
            return Ok(n);
        }
    }
    Err(Error::Range(format!(
        "cutoff exceeding hard cap {MAX_CUTOFF} needed for tolerance {tol:e}"
    )))
}

/// Evolve and condition in one call, choosing the cutoff automatically
/// (tolerance 1e-10).
pub fn condition_at(
    params: &SystemParams,
    setting: &MeasurementSetting,
) -> Result<CoherentSuperposition> {
    let n_max = choose_cutoff(params, setting, 1e-10)?;
    let joint = evolve_joint(params, n_max)?;
    condition(&joint, setting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn paper_params() -> SystemParams {
        SystemParams::new(c(0.8, 0.0), c(2.0, 0.0), 1.0, 0.0, PI).unwrap()
    }

    #[test]
    fn joint_state_first_sectors_at_paper_point() {
        let joint = evolve_joint(&paper_params(), 20).unwrap();
        // n = 0: c_0 = 1, φ_0 = β e^{-iπ} = -2
        assert_abs_diff_eq!((joint.sectors[0].coeff - 1.0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            (joint.sectors[0].mech_amplitude - c(-2.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-12
        );
        // n = 1: η(π) = 2, so φ_1 = 2k - 2 = 0
        assert_abs_diff_eq!(joint.sectors[1].mech_amplitude.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn amplitude_law_holds_per_sector() {
        let p = SystemParams::new(c(0.5, 0.3), c(1.0, -2.0), 0.7, 0.4, 2.1).unwrap();
        let joint = evolve_joint(&p, 15).unwrap();
        let eta = p.eta();
        let rot = (-C64::i() * p.tau).exp();
        for s in &joint.sectors {
            let want = p.k * eta * s.n as f64 + p.beta * rot;
            assert_abs_diff_eq!((s.mech_amplitude - want).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn sector_probabilities_sum_to_one() {
        let p = paper_params();
        let joint = evolve_joint(&p, 20).unwrap();
        let total: f64 = joint
            .sectors
            .iter()
            .map(|s| (joint.prefactor * s.coeff).norm_sqr())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_coupling_gives_product_state() {
        let p = SystemParams::new(c(0.8, 0.0), c(2.0, 0.0), 0.0, 0.0, 1.3).unwrap();
        let joint = evolve_joint(&p, 12).unwrap();
        let rot = p.beta * (-C64::i() * p.tau).exp();
        for s in &joint.sectors {
            assert_abs_diff_eq!((s.mech_amplitude - rot).norm(), 0.0, epsilon = 1e-14);
        }
        // conditioning a product state returns |β e^{-iτ}> regardless of outcome
        let st = condition(&joint, &MeasurementSetting::Homodyne { x: 0.7, theta: 0.3 }).unwrap();
        let target = CoherentSuperposition::coherent(rot);
        let f = crate::fidelity::state_fidelity(&st, &target);
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn truncation_violation_reports_needed_cutoff() {
        let p = SystemParams::new(c(3.0, 0.0), c(0.0, 0.0), 0.5, 0.0, 1.0).unwrap();
        let err = evolve_joint(&p, 2).unwrap_err();
        match err {
            Error::Range(msg) => assert!(msg.contains("n_max >=")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn heterodyne_vacuum_projection_selects_n0() {
        let het = MeasurementSetting::Heterodyne { sigma: c(0.0, 0.0) };
        assert_abs_diff_eq!((measurement_amplitude(&het, 0) - 1.0).norm(), 0.0);
        for n in 1..6 {
            assert_abs_diff_eq!(measurement_amplitude(&het, n).norm(), 0.0);
        }
    }

    #[test]
    fn homodyne_odd_order_vanishes_at_origin() {
        let hom = MeasurementSetting::Homodyne { x: 0.0, theta: 0.0 };
        assert_abs_diff_eq!(measurement_amplitude(&hom, 1).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(measurement_amplitude(&hom, 3).norm(), 0.0, epsilon = 1e-15);
        assert!(measurement_amplitude(&hom, 2).norm() > 0.0);
    }

    #[test]
    fn coefficient_profile_at_crossing_matches_reported_shape() {
        // |w_n|² at x̄: n = 1 dominant, n = 0 and 2 comparable, n >= 3 negligible
        let joint = evolve_joint(&paper_params(), 20).unwrap();
        let setting = MeasurementSetting::Homodyne { x: 1.42701, theta: 0.0 };
        let mut w: Vec<f64> = joint
            .sectors
            .iter()
            .map(|s| (s.coeff * measurement_amplitude(&setting, s.n)).norm_sqr())
            .collect();
        let total: f64 = w.iter().sum();
        for v in w.iter_mut() {
            *v /= total;
        }
        let max_idx = w.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(max_idx, 1);
        let ratio = (w[0] - w[2]).abs() / w[2].min(w[0]);
        assert!(ratio < 0.2, "n=0 vs n=2 weights differ by {ratio:.3}");
        let tail: f64 = w[3..].iter().sum();
        assert!(tail < 1e-2, "tail above 1e-2: {tail:.3e}");
    }

    #[test]
    fn theta_shift_by_two_pi_is_exact_identity() {
        let joint = evolve_joint(&paper_params(), 16).unwrap();
        let a = condition(&joint, &MeasurementSetting::Homodyne { x: 0.9, theta: 0.4 }).unwrap();
        let b = condition(
            &joint,
            &MeasurementSetting::Homodyne { x: 0.9, theta: 0.4 + 2.0 * PI },
        )
        .unwrap();
        for (ta, tb) in a.terms().iter().zip(b.terms()) {
            assert_abs_diff_eq!((ta.weight - tb.weight).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn conditional_states_are_normalized_for_random_settings() {
        let joint = evolve_joint(&paper_params(), 18).unwrap();
        let mut rng = crate::tests_support::SplitMix::new(11);
        for i in 0..100 {
            let setting = if i % 2 == 0 {
                MeasurementSetting::Homodyne {
                    x: rng.next_in(-3.0, 3.0),
                    theta: rng.next_in(0.0, 2.0 * PI),
                }
            } else {
                MeasurementSetting::Heterodyne {
                    sigma: c(rng.next_in(-2.0, 2.0), rng.next_in(-2.0, 2.0)),
                }
            };
            let st = condition(&joint, &setting).unwrap();
            assert_abs_diff_eq!(st.norm_sq(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn homodyne_density_integrates_to_one() {
        // projective completeness: ∫ p(x) dx = 1 at fixed θ
        let joint = evolve_joint(&paper_params(), 20).unwrap();
        let (nodes, weights) = crate::quad::gauss_legendre(400);
        let theta = 0.6;
        let mut total = 0.0;
        for (xi, wi) in nodes.iter().zip(&weights) {
            let x = 10.0 * xi;
            let setting = MeasurementSetting::Homodyne { x, theta };
            total += 10.0 * wi * outcome_density(&joint, &setting);
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn cutoff_selection_matches_tail_sums() {
        let p = paper_params();
        let het = MeasurementSetting::Heterodyne { sigma: c(0.25, 0.0) };
        let n_het = choose_cutoff(&p, &het, 1e-10).unwrap();
        assert!(n_het <= 15, "heterodyne cutoff {n_het}");
        let hom = MeasurementSetting::Homodyne { x: 0.0, theta: 0.0 };
        let n_hom = choose_cutoff(&p, &hom, 1e-10).unwrap();
        assert!(n_hom <= 20, "homodyne cutoff {n_hom}");
        // degenerate tolerance
        assert_eq!(choose_cutoff(&p, &hom, 1.0).unwrap(), 1);
        // conditioning at the chosen cutoff really is converged
        let st_a = condition(&evolve_joint(&p, n_hom).unwrap(), &hom).unwrap();
        let st_b =
            condition(&evolve_joint(&p, (n_hom + 8).min(MAX_CUTOFF)).unwrap(), &hom).unwrap();
        let f = crate::fidelity::state_fidelity(&st_a, &st_b);
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-9);
    }
}
