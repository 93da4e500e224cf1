//! Conditional macroscopic-quantum-state engineering in cavity
//! optomechanics.
//!
//! The crate simulates an optomechanical cavity whose field drives a
//! mechanical mode, conditions the mechanical state through general-dyne
//! (homodyne/heterodyne) measurements of the field or through single-photon
//! subtraction, and quantifies the result: the phase-space macroscopicity
//! measure `I(ρ)`, mean excitation numbers, Wigner functions and cat-state
//! fidelities. Cavity damping is handled by a quantum-jump (Monte-Carlo
//! wave-function) unraveling that preserves the Fock-sector × coherent-state
//! structure of the joint state exactly.
//!
//! Modules:
//!
//! * [`phase_space`] — coherent-state algebra, characteristic functions,
//!   Wigner evaluation and the closed-form Gaussian cross integral;
//! * [`quad`] — the 2D Gauss-Legendre quadrature oracle;
//! * [`conditioning`] — the time-evolved joint state and its conditioning
//!   on homodyne/heterodyne outcomes;
//! * [`macroscopicity`] — `I(ρ)` and mean excitations for pure
//!   superpositions and trajectory mixtures;
//! * [`trajectories`] — the quantum-jump unraveling of the damped cavity;
//! * [`subtraction`] — photon-subtracted Gaussian mechanical states in
//!   Gaussian-times-polynomial Wigner form;
//! * [`fidelity`] — cat states and fidelity optimization;
//! * [`config`]/[`runner`] — the configuration-driven experiment runner
//!   behind the `macromech` binary;
//! * [`fock`] — a small truncated Fock-basis engine used as a test oracle.
//!
//! Runnable scenarios for each capability live in `examples/`.

pub mod config;
pub mod conditioning;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod macroscopicity;
pub mod phase_space;
pub mod quad;
pub mod runner;
pub mod subtraction;
pub mod trajectories;

pub use error::{Error, Result};
pub use phase_space::{CoherentSuperposition, CoherentTerm};

pub(crate) mod tests_support {
    /// SplitMix64: tiny deterministic generator for test inputs.
    pub struct SplitMix {
        state: u64,
    }

    impl SplitMix {
        pub fn new(seed: u64) -> Self {
            Self { state: seed }
        }

        pub fn next_u64(&mut self) -> u64 {
            self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }

        pub fn next_f64(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        }

        pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.next_f64()
        }
    }
}
