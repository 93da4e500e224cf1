//! Cat states, state fidelities and fidelity optimization over the cat
//! amplitude.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase_space::{coherent_overlap, CoherentSuperposition, CoherentTerm};

/// Parity of the coherent-state superposition `|λ> ± |-λ>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A cat-state specification: amplitude and parity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    pub lambda: C64,
    pub parity: Parity,
}

/// `N (|λ> ± |-λ>)` with `N = 1/√(2 ± 2 e^{-2|λ|²})`.
///
/// The odd cat is undefined at `λ = 0`.
pub fn cat_state(spec: &CatSpec) -> Result<CoherentSuperposition> {
    if spec.parity == Parity::Odd && spec.lambda.norm() < 1e-12 {
        return Err(Error::Config("odd cat state undefined at lambda = 0".into()));
    }
    let sign = match spec.parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    CoherentSuperposition::two_component(spec.lambda, sign)
}

/// `F = |<b|a>|²` for two normalized coherent superpositions.
pub fn state_fidelity(a: &CoherentSuperposition, b: &CoherentSuperposition) -> f64 {
    let mut ov = C64::new(0.0, 0.0);
    for tn in a.terms() {
        for tl in b.terms() {
            ov += tl.weight.conj() * tn.weight * coherent_overlap(tl.amplitude, tn.amplitude);
        }
    }
    ov.norm_sqr()
}

/// Result of a cat-amplitude optimization.
#[derive(Debug, Clone, Copy)]
pub struct LambdaOpt {
    pub lambda: C64,
    pub fidelity: f64,
}

/// Maximize the cat fidelity over `λ`: a coarse grid on
/// `Re λ, Im λ ∈ [-4, 4]` with step 0.05, then derivative-free compass
/// refinement down to step 1e-9. Ties on the grid break lexicographically
/// on `(Re λ, Im λ)`; the reported optimum is the canonical representative
/// of the `λ ↔ -λ` degeneracy (`Re λ >= 0`, then `Im λ >= 0`).
pub fn optimize_lambda(state: &CoherentSuperposition, parity: Parity) -> LambdaOpt {
    const STEP: f64 = 0.05;
    const RANGE: f64 = 4.0;
    let n = (2.0 * RANGE / STEP).round() as usize + 1;

    let eval = |lam: C64| -> f64 {
        if parity == Parity::Odd && lam.norm() < 1e-12 {
            return f64::NEG_INFINITY;
        }
        let cat = cat_state(&CatSpec { lambda: lam, parity }).expect("nonzero lambda");
        state_fidelity(state, &cat)
    };

    // grid pass, deterministic lexicographic winner
    let row_best: Vec<(f64, C64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let re = -RANGE + i as f64 * STEP;
            let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
            for j in 0..n {
                let lam = C64::new(re, -RANGE + j as f64 * STEP);
                let f = eval(lam);
                if f > best.0 {
                    best = (f, lam);
                }
            }
            best
        })
        .collect();
    let (mut best_f, mut best_l) = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    for (f, l) in row_best {
        if f > best_f {
            best_f = f;
            best_l = l;
        }
    }

    // compass-search refinement
    let mut step = STEP / 2.0;
    while step > 1e-9 {
        let mut moved = false;
        for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = best_l + C64::new(dx, dy);
            let f = eval(cand);
            if f > best_f {
                best_f = f;
                best_l = cand;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }

    // canonical representative of the sign degeneracy
    if best_l.re < -1e-12 || (best_l.re.abs() <= 1e-12 && best_l.im < 0.0) {
        best_l = -best_l;
    }
    LambdaOpt { lambda: best_l, fidelity: best_f }
}

/// The reduced three-component conditional state
/// `N' (d_0 |φ_0> + μ d_1 |φ_1> + d_2 |φ_2>)`, with the middle weight
/// scaled by `μ ∈ [0, 1]`.
pub fn simplified_state(
    d: [C64; 3],
    mu: f64,
    amplitudes: [C64; 3],
) -> Result<CoherentSuperposition> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Config(format!("mu = {mu} outside [0, 1]")));
    }
    let weights = [d[0], mu * d[1], d[2]];
    if weights.iter().all(|w| w.norm() < 1e-300) {
        return Err(Error::DegenerateOutcome("all simplified-state weights vanish".into()));
    }
    let terms = weights
        .iter()
        .zip(amplitudes.iter())
        .filter(|(w, _)| w.norm() > 0.0)
        .map(|(w, a)| CoherentTerm::new(*w, *a))
        .collect();
    CoherentSuperposition::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cat_normalization_constant() {
        let even = cat_state(&CatSpec { lambda: c(2.0, 0.0), parity: Parity::Even }).unwrap();
        let w = even.terms()[0].weight.norm();
        assert_abs_diff_eq!(w, (2.0 + 2.0 * (-8.0f64).exp()).sqrt().recip(), epsilon = 1e-12);
        assert_abs_diff_eq!(even.norm_sq(), 1.0, epsilon = 1e-12);

        assert!(cat_state(&CatSpec { lambda: c(0.0, 0.0), parity: Parity::Odd }).is_err());
        // small even cat approaches vacuum
        let tiny = cat_state(&CatSpec { lambda: c(1e-4, 0.0), parity: Parity::Even }).unwrap();
        let f = state_fidelity(&tiny, &CoherentSuperposition::coherent(c(0.0, 0.0)));
        assert!(f > 1.0 - 1e-7);
    }

    #[test]
    fn fidelity_basics() {
        let s = cat_state(&CatSpec { lambda: c(1.1, 0.4), parity: Parity::Even }).unwrap();
        assert_abs_diff_eq!(state_fidelity(&s, &s), 1.0, epsilon = 1e-12);

        let vac = CoherentSuperposition::coherent(c(0.0, 0.0));
        let b3 = CoherentSuperposition::coherent(c(3.0, 0.0));
        assert_abs_diff_eq!(state_fidelity(&vac, &b3), (-9.0f64).exp(), epsilon = 1e-14);

        let even = cat_state(&CatSpec { lambda: c(2.0, 0.0), parity: Parity::Even }).unwrap();
        let odd = cat_state(&CatSpec { lambda: c(2.0, 0.0), parity: Parity::Odd }).unwrap();
        assert_abs_diff_eq!(state_fidelity(&even, &odd), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn fidelity_symmetric_and_bounded() {
        let mut rng = crate::tests_support::SplitMix::new(5);
        for _ in 0..20 {
            let a = CoherentSuperposition::new(vec![
                CoherentTerm::new(c(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)), c(rng.next_in(-2.0, 2.0), rng.next_in(-2.0, 2.0))),
                CoherentTerm::new(c(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)), c(rng.next_in(-2.0, 2.0), rng.next_in(-2.0, 2.0))),
            ])
            .unwrap();
            let b = CoherentSuperposition::coherent(c(rng.next_in(-2.0, 2.0), rng.next_in(-2.0, 2.0)));
            let f_ab = state_fidelity(&a, &b);
            let f_ba = state_fidelity(&b, &a);
            assert_abs_diff_eq!(f_ab, f_ba, epsilon = 1e-12);
            assert!((0.0..=1.0 + 1e-10).contains(&f_ab));
        }
    }

    #[test]
    fn optimizer_recovers_cat_amplitude() {
        let lam = c(1.3, 0.0);
        let target = cat_state(&CatSpec { lambda: lam, parity: Parity::Even }).unwrap();
        let opt = optimize_lambda(&target, Parity::Even);
        assert!(opt.fidelity >= 1.0 - 1e-8);
        assert_abs_diff_eq!((opt.lambda - lam).norm(), 0.0, epsilon = 1e-5);
    }

    #[test]
    fn optimizer_self_recovery_random_cats() {
        let mut rng = crate::tests_support::SplitMix::new(9);
        for _ in 0..20 {
            let lam = c(rng.next_in(-3.0, 3.0), rng.next_in(-3.0, 3.0));
            if lam.norm() < 0.3 {
                continue;
            }
            let parity = if rng.next_f64() < 0.5 { Parity::Even } else { Parity::Odd };
            let target = cat_state(&CatSpec { lambda: lam, parity }).unwrap();
            let opt = optimize_lambda(&target, parity);
            assert!(
                opt.fidelity >= 1.0 - 1e-8,
                "self-recovery failed at λ = {lam}, F = {}",
                opt.fidelity
            );
            // canonical representative
            assert!(opt.lambda.re >= -1e-12);
        }
    }

    #[test]
    fn simplified_state_mu_behavior() {
        let d = [c(1.0, 0.0), c(0.0, 1.4), c(-0.98, 0.0)];
        let amps = [c(-2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let full = simplified_state(d, 1.0, amps).unwrap();
        assert_eq!(full.terms().len(), 3);
        let reduced = simplified_state(d, 0.0, amps).unwrap();
        assert_eq!(reduced.terms().len(), 2);
        assert_abs_diff_eq!(reduced.norm_sq(), 1.0, epsilon = 1e-12);
        assert!(simplified_state(d, 1.5, amps).is_err());
        assert!(simplified_state([c(0.0, 0.0); 3], 0.0, amps).is_err());
    }
}
