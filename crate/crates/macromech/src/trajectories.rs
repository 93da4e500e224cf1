//! Quantum-jump (Monte-Carlo wave-function) unraveling of the cavity-damped
//! dynamics.
//!
//! Between jumps the joint state keeps the Fock-sector × coherent-state
//! structure, so a trajectory is a list of `(n, coefficient, mechanical
//! amplitude)` triples. Each no-jump step applies the exact sector-wise
//! solution of the damped dynamics over `δτ`:
//!
//! ```text
//! φ  <- k n + (φ - k n) e^{-iδτ}                      (drive + rotation)
//! θ  <- θ + k n [k n δτ + Im((φ - k n)(1 - e^{-iδτ}))] - r n δτ
//! |c| <- |c| e^{-κ n δτ / 2},  then renormalize
//! ```
//!
//! which preserves coherent-state structure with no mechanical truncation
//! and agrees with the first-order non-Hermitian step to `O(δτ²)`. At κ = 0
//! the stepping reproduces the closed-form joint state exactly, sector
//! phases included. A jump applies `C = √κ a`: every sector drops one
//! photon with weight `√n`, mechanical amplitudes carried over, which
//! breaks the `φ_n ∝ n` law from then on.
//!
//! The ensemble-averaged density matrix solves the master equation with
//! dissipator rate `κ/2 (2 a ρ a† - {a†a, ρ})`; the decay law
//! `<a†a>(τ) = |α|² e^{-κτ}` is exact and tested.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::conditioning::{measurement_amplitude, MeasurementSetting, SystemParams};
use crate::error::{Error, Result};
use crate::macroscopicity::MixtureState;
use crate::phase_space::{CoherentSuperposition, CoherentTerm};

/// First-order step validity bound on `κ δτ n_max`.
const STEP_VALIDITY: f64 = 0.01;

/// One photon-number sector of a trajectory state. The coefficient is kept
/// as magnitude and accumulated phase so that stepping is trig-free.
#[derive(Debug, Clone, Copy)]
pub struct Sector {
    pub n: u32,
    mag: f64,
    phase: f64,
    pub mech_amplitude: C64,
}

impl Sector {
    pub fn coefficient(&self) -> C64 {
        C64::from_polar(self.mag, self.phase)
    }
}

/// A pure trajectory state: photon sectors (strictly increasing `n`), each
/// carrying one mechanical coherent amplitude.
#[derive(Debug, Clone)]
pub struct SectorState {
    sectors: Vec<Sector>,
}

impl SectorState {
    /// Initial product state `|α>_c ⊗ |β>_m` truncated at `n_max` photons.
    pub fn from_coherent_field(alpha: C64, mech: C64, n_max: usize) -> Self {
        let mut sectors = Vec::with_capacity(n_max + 1);
        let amod = alpha.norm();
        let aphase = alpha.arg();
        let mut mag = (-0.5 * alpha.norm_sqr()).exp();
        for n in 0..=n_max {
            if n > 0 {
                mag *= amod / (n as f64).sqrt();
            }
            sectors.push(Sector {
                n: n as u32,
                mag,
                phase: aphase * n as f64,
                mech_amplitude: mech,
            });
        }
        let mut st = Self { sectors };
        st.renormalize();
        st
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// `Σ_n |c_n|²`.
    pub fn norm_sq(&self) -> f64 {
        self.sectors.iter().map(|s| s.mag * s.mag).sum()
    }

    /// Field mean photon number `<a†a>`.
    pub fn mean_photons(&self) -> f64 {
        self.sectors.iter().map(|s| s.n as f64 * s.mag * s.mag).sum()
    }

    pub fn renormalize(&mut self) {
        let s = self.norm_sq().sqrt().recip();
        for sec in self.sectors.iter_mut() {
            sec.mag *= s;
        }
    }

    pub fn max_photon_number(&self) -> u32 {
        self.sectors.last().map(|s| s.n).unwrap_or(0)
    }
}

/// Cavity-noise and ensemble parameters.
#[derive(Debug, Clone, Copy)]
pub struct NoiseParams {
    /// Cavity decay rate in units of `ω_m`.
    pub kappa: f64,
    /// Time step (default `π × 10⁻⁵`).
    pub dtau: f64,
    /// Trajectory count.
    pub n_traj: usize,
    /// Base seed; trajectory `i` owns the ChaCha stream `(seed, i)`.
    pub seed: u64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::Config(format!("kappa = {} must be >= 0", self.kappa)));
        }
        if !(self.dtau > 0.0 && self.dtau.is_finite()) {
            return Err(Error::Config(format!("dtau = {} must be > 0", self.dtau)));
        }
        if self.n_traj < 1 {
            return Err(Error::Config("n_traj must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self { kappa: 0.0, dtau: std::f64::consts::PI * 1e-5, n_traj: 500, seed: 0 }
    }
}

/// Displaced thermal initial state of the mechanics; `nbar = 0` is a plain
/// coherent state.
#[derive(Debug, Clone, Copy)]
pub struct ThermalInit {
    pub beta: C64,
    pub nbar: f64,
}

impl ThermalInit {
    pub fn coherent(beta: C64) -> Self {
        Self { beta, nbar: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nbar >= 0.0 && self.nbar.is_finite() && self.beta.is_finite()) {
            return Err(Error::Config(format!("thermal occupation nbar = {} invalid", self.nbar)));
        }
        Ok(())
    }
}

/// Draw a coherent amplitude from the P function of the displaced thermal
/// state: `β + g` with `g` complex Gaussian of variance `nbar/2` per
/// quadrature. `nbar = 0` returns `β` exactly without consuming entropy.
pub fn sample_thermal<R: Rng + ?Sized>(init: &ThermalInit, rng: &mut R) -> C64 {
    if init.nbar == 0.0 {
        return init.beta;
    }
    let s = (0.5 * init.nbar).sqrt();
    let gr: f64 = rng.sample(StandardNormal);
    let gi: f64 = rng.sample(StandardNormal);
    init.beta + C64::new(s * gr, s * gi)
}

/// Jump probability `δp = κ δτ <a†a>` of the current (normalized) state.
pub fn jump_probability(state: &SectorState, kappa: f64, dtau: f64) -> f64 {
    kappa * dtau * state.mean_photons()
}

/// Precomputed per-run constants for the stepping loop.
#[derive(Debug, Clone, Copy)]
pub struct JumpUnraveling {
    pub k: f64,
    pub r: f64,
    pub kappa: f64,
    pub dtau: f64,
    rot: C64,
    one_minus_rot: C64,
}

impl JumpUnraveling {
    pub fn new(k: f64, r: f64, kappa: f64, dtau: f64) -> Self {
        let rot = (-C64::i() * dtau).exp();
        Self { k, r, kappa, dtau, rot, one_minus_rot: C64::new(1.0, 0.0) - rot }
    }

    /// Exact sector-wise no-jump update over one step, then renormalize.
    pub fn no_jump_step(&self, state: &mut SectorState) {
        let damp_base = -0.5 * self.kappa * self.dtau;
        for s in state.sectors.iter_mut() {
            let nf = s.n as f64;
            let kn = self.k * nf;
            let centered = s.mech_amplitude - kn;
            s.mech_amplitude = kn + centered * self.rot;
            s.phase += kn * (kn * self.dtau + (centered * self.one_minus_rot).im)
                - self.r * nf * self.dtau;
            s.mag *= (damp_base * nf).exp();
        }
        state.renormalize();
    }

    /// Apply the jump operator `C = √κ a`: sector `n` becomes `n - 1` with
    /// weight `√n`, mechanical amplitude carried over; renormalizes.
    ///
    /// Jumping a field-vacuum state is a logic error (its probability was
    /// zero).
    pub fn apply_jump(&self, state: &mut SectorState) -> Result<()> {
        if state.max_photon_number() == 0 {
            return Err(Error::Invariant("quantum jump on field vacuum".into()));
        }
        let mut next = Vec::with_capacity(state.sectors.len());
        for s in &state.sectors {
            if s.n == 0 {
                continue;
            }
            next.push(Sector {
                n: s.n - 1,
                mag: s.mag * (s.n as f64).sqrt(),
                phase: s.phase,
                mech_amplitude: s.mech_amplitude,
            });
        }
        state.sectors = next;
        state.renormalize();
        Ok(())
    }

    /// One full MCWF step: draw `ε`, jump when `ε <= δp`, otherwise apply
    /// the no-jump update.
    pub fn step<R: Rng + ?Sized>(&self, state: &mut SectorState, rng: &mut R) -> Result<()> {
        let dp = jump_probability(state, self.kappa, self.dtau);
        let eps: f64 = rng.gen();
        if eps <= dp {
            self.apply_jump(state)?;
        } else {
            self.no_jump_step(state);
        }
        Ok(())
    }
}

/// Run one trajectory from `τ = 0` to `params.tau` with the given initial
/// mechanical amplitude. A pure function of its arguments and the RNG
/// stream.
pub fn run_trajectory<R: Rng + ?Sized>(
    params: &SystemParams,
    noise: &NoiseParams,
    init_mech: C64,
    n_max: usize,
    rng: &mut R,
) -> Result<SectorState> {
    let stepper = JumpUnraveling::new(params.k, params.r, noise.kappa, noise.dtau);
    let steps = (params.tau / noise.dtau).round() as usize;
    let mut state = SectorState::from_coherent_field(params.alpha, init_mech, n_max);
    for _ in 0..steps {
        stepper.step(&mut state, rng)?;
    }
    Ok(state)
}

/// Run the full ensemble in parallel. Trajectory `i` draws from the ChaCha
/// stream `(seed, i)`, so the result is reproducible regardless of thread
/// scheduling; output order is by trajectory index.
pub fn run_ensemble(
    params: &SystemParams,
    noise: &NoiseParams,
    init: &ThermalInit,
) -> Result<Vec<SectorState>> {
    params.validate()?;
    noise.validate()?;
    init.validate()?;
    let n_max = field_cutoff(params.alpha.norm_sqr());
    if noise.kappa * noise.dtau * n_max as f64 >= STEP_VALIDITY {
        return Err(Error::Config(format!(
            "kappa*dtau*n_max = {:.2e} violates the first-order step bound {STEP_VALIDITY}",
            noise.kappa * noise.dtau * n_max as f64
        )));
    }
    (0..noise.n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
            rng.set_stream(i as u64);
            let mech0 = sample_thermal(init, &mut rng);
            run_trajectory(params, noise, mech0, n_max, &mut rng)
        })
        .collect()
}

/// Poisson cutoff for the field expansion (tail below 1e-10).
fn field_cutoff(mean: f64) -> usize {
    let mut term = (-mean).exp();
    let mut kept = term;
    let mut n = 0;
    while 1.0 - kept > 1e-10 && n < crate::conditioning::MAX_CUTOFF {
        n += 1;
        term *= mean / n as f64;
        kept += term;
    }
    n.max(1)
}

/// Ensemble average of `<a†a>` with its Monte-Carlo standard error.
pub fn ensemble_mean_photons(trajs: &[SectorState]) -> (f64, f64) {
    let vals: Vec<f64> = trajs.iter().map(|t| t.mean_photons()).collect();
    let m = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
        / (vals.len().max(2) - 1) as f64;
    (m, (var / vals.len() as f64).sqrt())
}

/// Condition every trajectory on the same field measurement and assemble
/// the Bayesian mixture: component weights are proportional to each
/// trajectory's unnormalized conditional norm.
pub fn ensemble_condition(
    trajs: &[SectorState],
    setting: &MeasurementSetting,
) -> Result<MixtureState> {
    setting.validate()?;
    let mut components = Vec::with_capacity(trajs.len());
    for t in trajs {
        let terms: Vec<CoherentTerm> = t
            .sectors()
            .iter()
            .map(|s| {
                CoherentTerm::new(
                    s.coefficient() * measurement_amplitude(setting, s.n as usize),
                    s.mech_amplitude,
                )
            })
            .collect();
        let raw = CoherentSuperposition::from_unnormalized(terms)?;
        let q = raw.norm_sq();
        if q > 0.0 {
            components.push((q, raw.into_normalized()?));
        }
    }
    if components.is_empty() {
        return Err(Error::DegenerateOutcome(
            "every trajectory has zero conditional norm for this record".into(),
        ));
    }
    MixtureState::from_unnormalized(components)
}
