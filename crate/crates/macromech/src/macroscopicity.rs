//! The phase-space macroscopicity measure
//!
//! ```text
//! I(ρ) = (1/2π) ∫ (|γ|² - 1) |χ(γ)|² d²γ
//! ```
//!
//! evaluated in closed form for coherent superpositions and for statistical
//! mixtures of them. `I` is bounded above by the mean excitation number,
//! with equality attainable only by pure states; coherent states score 0
//! and classical mixtures of coherent states score ≤ 0.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase_space::{coherent_overlap, cross_integral, CoherentSuperposition};

/// Imaginary residue allowed before a result is considered corrupted.
const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Mean excitation number `<b†b> = Σ_{n,l} w_n w_l* φ_n φ_l* <φ_l|φ_n>`.
pub fn mean_excitations(state: &CoherentSuperposition) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for tn in state.terms() {
        for tl in state.terms() {
            acc += tn.weight
                * tl.weight.conj()
                * tn.amplitude
                * tl.amplitude.conj()
                * coherent_overlap(tl.amplitude, tn.amplitude);
        }
    }
    debug_assert!(acc.im.abs() < IMAG_RESIDUE_TOL * (1.0 + acc.re.abs()));
    acc.re
}

/// Phase-space centroid `<b>`.
pub fn mean_amplitude(state: &CoherentSuperposition) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for tn in state.terms() {
        for tl in state.terms() {
            acc += tn.weight
                * tl.weight.conj()
                * tn.amplitude
                * coherent_overlap(tl.amplitude, tn.amplitude);
        }
    }
    acc
}

/// Translate the state so its centroid `<b>` sits at the origin.
pub fn centered(state: &CoherentSuperposition) -> CoherentSuperposition {
    state.displaced(-mean_amplitude(state))
}

/// `I` of a pure coherent superposition, as the quadruple sum of
/// closed-form cross integrals over ordered pairs of coherent pairs.
///
/// The imaginary residue of the sum is asserted below 1e-8.
pub fn measure_I(state: &CoherentSuperposition) -> f64 {
    // dyads (w_n w_l*, ket φ_n, bra φ_l); the second dyad enters conjugated
    let dyads: Vec<(C64, C64, C64)> = state
        .terms()
        .iter()
        .flat_map(|tn| {
            state
                .terms()
                .iter()
                .map(move |tl| (tn.weight * tl.weight.conj(), tn.amplitude, tl.amplitude))
        })
        .collect();
    let mut acc = crate::quad::KahanC64::default();
    for &(u1, a, b) in &dyads {
        for &(u2, cc, d) in &dyads {
            acc.add(u1 * u2.conj() * cross_integral(a, b, cc, d));
        }
    }
    let total = acc.value() / (2.0 * std::f64::consts::PI);
    assert!(
        total.im.abs() < IMAG_RESIDUE_TOL * (1.0 + total.re.abs()),
        "measure_I imaginary residue {:e}",
        total.im
    );
    total.re
}

/// A statistical mixture of coherent superpositions (e.g. a conditioned
/// trajectory ensemble), with probability weights summing to one.
#[derive(Debug, Clone)]
pub struct MixtureState {
    components: Vec<(f64, CoherentSuperposition)>,
}

impl MixtureState {
    /// Weights must be non-negative and sum to 1 within 1e-10; components
    /// must be normalized.
    pub fn new(components: Vec<(f64, CoherentSuperposition)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invariant("mixture with no components".into()));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if components.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::Invariant(format!(
                "mixture weights must be >= 0 and sum to 1 (got {total})"
            )));
        }
        Ok(Self { components })
    }

    /// Wrap a single pure state.
    pub fn pure(state: CoherentSuperposition) -> Self {
        Self { components: vec![(1.0, state)] }
    }

    /// Build from unnormalized weights, rescaling to unit total.
    pub fn from_unnormalized(components: Vec<(f64, CoherentSuperposition)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegenerateOutcome(format!(
                "mixture weight total {total} not positive"
            )));
        }
        Self::new(components.into_iter().map(|(p, s)| (p / total, s)).collect())
    }

    pub fn components(&self) -> &[(f64, CoherentSuperposition)] {
        &self.components
    }

    /// `<b†b>` of the mixture.
    pub fn mean_excitations(&self) -> f64 {
        self.components.iter().map(|(p, s)| p * mean_excitations(s)).sum()
    }

    /// Mixture Wigner function (probability-weighted component sum).
    pub fn wigner(&self, delta: C64) -> f64 {
        self.components.iter().map(|(p, s)| p * s.wigner(delta)).sum()
    }

    /// Coalesce components that are equal up to a global phase: amplitudes
    /// pairwise within `tol` and weight vectors matching within `tol`
    /// (relative) after phase alignment. Within each component, coherent
    /// terms with coinciding amplitudes are merged first.
    ///
    /// Trajectory ensembles produce many bit-identical no-jump components;
    /// this collapses them before the quadratic pair sum.
    pub fn merged(&self, tol: f64) -> Self {
        let mut reps: Vec<(f64, CoherentSuperposition)> = Vec::new();
        'outer: for (p, s) in &self.components {
            let s = s.merged(tol);
            for (q, r) in reps.iter_mut() {
                if states_equal_up_to_phase(r, &s, tol) {
                    *q += *p;
                    continue 'outer;
                }
            }
            reps.push((*p, s));
        }
        Self { components: reps }
    }
}

fn states_equal_up_to_phase(
    a: &CoherentSuperposition,
    b: &CoherentSuperposition,
    tol: f64,
) -> bool {
    let (ta, tb) = (a.terms(), b.terms());
    if ta.len() != tb.len() {
        return false;
    }
    // align on the largest-weight term of `a`
    let i0 = ta
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.weight.norm_sqr().total_cmp(&y.1.weight.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap();
    if tb[i0].weight.norm() < 1e-300 {
        return false;
    }
    let phase = ta[i0].weight / tb[i0].weight;
    let scale = phase.norm();
    if (scale - 1.0).abs() > tol {
        return false;
    }
    ta.iter().zip(tb).all(|(x, y)| {
        (x.amplitude - y.amplitude).norm() <= tol
            && (x.weight - phase * y.weight).norm() <= tol * (1.0 + x.weight.norm())
    })
}

/// `I` of a mixture.
///
/// `|χ|²` expands over ordered component pairs; each pair contributes
/// `Re[<t|b†b|s><s|t> - <t|b†|s><s|b|t>]`, the exact factorization of the
/// quadruple cross-integral sum over the two components' coherent pairs.
/// Pair sums run in deterministic order (compensated, index-ordered).
pub fn measure_I_mixture(mix: &MixtureState) -> f64 {
    let comps = mix.components();
    let m = comps.len();
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|t| {
            let (pt, st) = &comps[t];
            let mut acc = crate::quad::KahanC64::default();
            for (ps, ss) in comps.iter() {
                let x = cross_matrix_elements(st, ss);
                // Re[D·conj(A) - |B|²] with A=<t|s>, B=<t|b†|s>, D=<t|b†b|s>
                let k = (x.nbb * x.one.conj()).re - x.bdag.norm_sqr();
                acc.add(C64::new(pt * ps * k, 0.0));
            }
            acc.value().re
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r;
    }
    total
}

struct CrossElems {
    one: C64,  // <t|s>
    bdag: C64, // <t|b†|s>
    nbb: C64,  // <t|b†b|s>
}

fn cross_matrix_elements(t: &CoherentSuperposition, s: &CoherentSuperposition) -> CrossElems {
    let mut one = C64::new(0.0, 0.0);
    let mut bdag = C64::new(0.0, 0.0);
    let mut nbb = C64::new(0.0, 0.0);
    for tt in t.terms() {
        for ts in s.terms() {
            let g = tt.weight.conj() * ts.weight * coherent_overlap(tt.amplitude, ts.amplitude);
            one += g;
            bdag += g * tt.amplitude.conj();
            nbb += g * tt.amplitude.conj() * ts.amplitude;
        }
    }
    CrossElems { one, bdag, nbb }
}

/// Naive quadruple-sum evaluation of the mixture `I` through
/// [`cross_integral`]; quadratic in the total coherent-pair count, used to
/// pin the factorized path in tests.
pub fn measure_I_mixture_reference(mix: &MixtureState) -> f64 {
    let mut dyads: Vec<(C64, C64, C64)> = Vec::new();
    for (p, s) in mix.components() {
        for tn in s.terms() {
            for tl in s.terms() {
                dyads.push((*p * tn.weight * tl.weight.conj(), tn.amplitude, tl.amplitude));
            }
        }
    }
    let mut acc = crate::quad::KahanC64::default();
    for &(u1, a, b) in &dyads {
        for &(u2, cc, d) in &dyads {
            acc.add(u1 * u2.conj() * cross_integral(a, b, cc, d));
        }
    }
    let total = acc.value() / (2.0 * std::f64::consts::PI);
    assert!(total.im.abs() < IMAG_RESIDUE_TOL * (1.0 + total.re.abs()));
    total.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::CoherentTerm;
    use crate::quad::quad2d;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(
        rng: &mut crate::tests_support::SplitMix,
        max_terms: usize,
        amp: f64,
    ) -> CoherentSuperposition {
        // amplitudes bounded by `amp` in modulus
        let half = amp / std::f64::consts::SQRT_2;
        let m = 1 + (rng.next_u64() as usize) % max_terms;
        let terms = (0..m)
            .map(|_| {
                CoherentTerm::new(
                    c(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)),
                    c(rng.next_in(-half, half), rng.next_in(-half, half)),
                )
            })
            .collect();
        CoherentSuperposition::new(terms).unwrap()
    }

    #[test]
    fn coherent_states_score_zero() {
        for &b in &[c(0.0, 0.0), c(2.0, 0.0), c(-1.3, 0.8)] {
            let st = CoherentSuperposition::coherent(b);
            assert_abs_diff_eq!(measure_I(&st), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(mean_excitations(&st), b.norm_sqr(), epsilon = 1e-10);
        }
    }

    #[test]
    fn mean_excitations_of_even_cat() {
        let st = CoherentSuperposition::two_component(c(2.0, 0.0), 1.0).unwrap();
        let want = 4.0 * 4.0f64.tanh(); // |λ|² tanh |λ|²
        assert_abs_diff_eq!(mean_excitations(&st), want, epsilon = 1e-10);
        let v = crate::fock::superposition_vec(&st, 60);
        assert_abs_diff_eq!(crate::fock::mean_n(&v), want, epsilon = 1e-9);
    }

    #[test]
    fn pure_state_identity_against_moments() {
        // for pure states the quadruple sum collapses to <b†b> - |<b>|²
        let mut rng = crate::tests_support::SplitMix::new(3);
        for _ in 0..25 {
            let st = random_state(&mut rng, 4, 2.0);
            let want = mean_excitations(&st) - mean_amplitude(&st).norm_sqr();
            assert_abs_diff_eq!(measure_I(&st), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn matches_direct_quadrature_of_the_definition() {
        let mut rng = crate::tests_support::SplitMix::new(17);
        for _ in 0..20 {
            let st = random_state(&mut rng, 4, 2.5);
            // |χ|² is peaked at amplitude differences, so the window must
            // span twice the amplitude bound plus Gaussian tails
            let by_quad = quad2d(
                |g| {
                    let chi = st.char_function(g);
                    C64::new((g.norm_sqr() - 1.0) * chi.norm_sqr(), 0.0)
                },
                12.0,
                1e-8,
            )
            .unwrap()
            .re
                / (2.0 * std::f64::consts::PI);
            assert_abs_diff_eq!(measure_I(&st), by_quad, epsilon = 1e-6);
        }
    }

    #[test]
    fn bounded_by_mean_excitations() {
        let mut rng = crate::tests_support::SplitMix::new(29);
        for _ in 0..30 {
            let st = random_state(&mut rng, 5, 2.5);
            assert!(measure_I(&st) <= mean_excitations(&st) + 1e-9);
        }
    }

    #[test]
    fn displacement_invariance_after_centering() {
        // closed-form regression: I in a displaced frame equals I after
        // centering at the weighted centroid
        let mut rng = crate::tests_support::SplitMix::new(41);
        for _ in 0..10 {
            let st = random_state(&mut rng, 4, 2.0);
            let off = c(rng.next_in(-2.0, 2.0), rng.next_in(-2.0, 2.0));
            let moved = st.displaced(off);
            assert_abs_diff_eq!(measure_I(&moved), measure_I(&centered(&moved)), epsilon = 1e-9);
            assert_abs_diff_eq!(measure_I(&moved), measure_I(&st), epsilon = 1e-9);
        }
    }

    #[test]
    fn classical_mixtures_of_coherent_states_score_nonpositive() {
        let mut rng = crate::tests_support::SplitMix::new(53);
        for _ in 0..15 {
            let m = 2 + (rng.next_u64() as usize) % 3;
            let mut comps = Vec::new();
            for _ in 0..m {
                comps.push((
                    rng.next_in(0.1, 1.0),
                    CoherentSuperposition::coherent(c(
                        rng.next_in(-2.0, 2.0),
                        rng.next_in(-2.0, 2.0),
                    )),
                ));
            }
            let mix = MixtureState::from_unnormalized(comps).unwrap();
            assert!(measure_I_mixture(&mix) <= 1e-9);
        }
    }

    #[test]
    fn opposite_coherent_mixture_scores_below_mean_excitations() {
        let mix = MixtureState::new(vec![
            (0.5, CoherentSuperposition::coherent(c(2.0, 0.0))),
            (0.5, CoherentSuperposition::coherent(c(-2.0, 0.0))),
        ])
        .unwrap();
        let i = measure_I_mixture(&mix);
        // analytic value -β² e^{-4β²}
        assert_abs_diff_eq!(i, -4.0 * (-16.0f64).exp(), epsilon = 1e-12);
        assert!(i <= 1e-9 && i < mix.mean_excitations());
        assert_abs_diff_eq!(mix.mean_excitations(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn single_component_mixture_equals_pure_measure() {
        let mut rng = crate::tests_support::SplitMix::new(77);
        let st = random_state(&mut rng, 4, 2.0);
        let mix = MixtureState::pure(st.clone());
        assert_abs_diff_eq!(measure_I_mixture(&mix), measure_I(&st), epsilon = 1e-10);
    }

    #[test]
    fn factorized_mixture_sum_matches_cross_integral_reference() {
        let mut rng = crate::tests_support::SplitMix::new(91);
        for _ in 0..8 {
            let m = 2 + (rng.next_u64() as usize) % 3;
            let comps: Vec<_> =
                (0..m).map(|_| (1.0 / m as f64, random_state(&mut rng, 3, 1.8))).collect();
            let mix = MixtureState::new(comps).unwrap();
            assert_abs_diff_eq!(
                measure_I_mixture(&mix),
                measure_I_mixture_reference(&mix),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn merging_preserves_the_measure() {
        let mut rng = crate::tests_support::SplitMix::new(101);
        let a = random_state(&mut rng, 3, 1.5);
        let b = random_state(&mut rng, 3, 1.5);
        // duplicate `a` with a global phase; merged() must coalesce it
        let a_phase = CoherentSuperposition::new(
            a.terms()
                .iter()
                .map(|t| CoherentTerm::new(t.weight * C64::from_polar(1.0, 0.7), t.amplitude))
                .collect(),
        )
        .unwrap();
        let mix = MixtureState::new(vec![(0.3, a.clone()), (0.2, a_phase), (0.5, b)]).unwrap();
        let merged = mix.merged(1e-9);
        assert_eq!(merged.components().len(), 2);
        assert_abs_diff_eq!(
            measure_I_mixture(&merged),
            measure_I_mixture(&mix),
            epsilon = 1e-9
        );
    }
}
