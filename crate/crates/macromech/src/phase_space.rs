//! Phase-space primitives: coherent-state algebra, displacement matrix
//! elements, the closed-form Gaussian cross integral, characteristic
//! functions and Wigner evaluation for superpositions of coherent states.
//!
//! Conventions used throughout the crate:
//!
//! * `coherent_overlap(a, b)` is `<a|b> = exp(-|a|²/2 - |b|²/2 + a* b)`.
//! * The displacement operator is `D(γ) = exp(γ b† - γ* b)`, so a coherent
//!   state's characteristic function is `exp(-|γ|²/2 + γ β* - γ* β)`.
//! * The Wigner function is the symplectic Fourier transform
//!   `W(δ) = π⁻² ∫ exp(γ* δ - γ δ*) χ(γ) d²γ`, normalized so `∫ W d²δ = 1`
//!   and the vacuum has `W(0) = 2/π` with quadrature variances 1/4 in
//!   `(Re δ, Im δ)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum Hermite order accepted by [`hermite`].
pub const HERMITE_MAX_ORDER: usize = 200;

/// Overlap `<a|b>` of two coherent states.
///
/// `|<a|b>|² = exp(-|a-b|²) ≤ 1`, with equality iff `a = b`.
pub fn coherent_overlap(a: C64, b: C64) -> C64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// Matrix element `<b|D(γ)|a>` of the displacement operator between
/// coherent states.
///
/// Closed form: `exp(-(|a|² + |b|² + |γ|²)/2 + b* a + b* γ - γ* a)`. The real
/// part of the exponent is `-(|a - b - γ|² ...)`-bounded, so the magnitude
/// never exceeds 1 and the evaluation cannot overflow.
pub fn displaced_element(a: C64, b: C64, gamma: C64) -> C64 {
    let expo = -0.5 * (a.norm_sqr() + b.norm_sqr() + gamma.norm_sqr())
        + b.conj() * a
        + b.conj() * gamma
        - gamma.conj() * a;
    expo.exp()
}

/// Closed form of the phase-space cross integral
///
/// ```text
/// ∫ (|γ|² - 1) <b|D(γ)|a> <d|D(γ)|c>* d²γ
///   = π (b - c)* (d - a) exp[ b* d + a c* - (|a|² + |b|² + |c|² + |d|²)/2 ]
/// ```
///
/// obtained by completing the square in the Gaussian integral. The exponent
/// sums all four squared moduli; its real part is
/// `-(|b - d|² + |a - c|²)/2 ≤ 0`, so the result is bounded by
/// `π |b - c| |d - a|`. Validated against [`crate::quad::quad2d`] in the
/// test suite.
pub fn cross_integral(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let expo = b.conj() * d + a * c.conj()
        - 0.5 * (a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr());
    std::f64::consts::PI * (b.conj() - c.conj()) * (d - a) * expo.exp()
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
///
/// Orders above [`HERMITE_MAX_ORDER`] or evaluations that overflow `f64`
/// are reported as range errors.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > HERMITE_MAX_ORDER {
        return Err(Error::Range(format!(
            "Hermite order {n} exceeds cutoff {HERMITE_MAX_ORDER}"
        )));
    }
    let mut h0 = 1.0;
    if n == 0 {
        return Ok(h0);
    }
    let mut h1 = 2.0 * x;
    for m in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * (m as f64) * h0;
        if !h2.is_finite() {
            return Err(Error::Range(format!("H_{}({x}) overflows f64", m + 1)));
        }
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Normalized harmonic-oscillator wavefunction
/// `ψ_n(x) = H_n(x) e^{-x²/2} / sqrt(2^n n! √π)`.
///
/// The normalized recurrence `ψ_{n+1} = x √(2/(n+1)) ψ_n - √(n/(n+1)) ψ_{n-1}`
/// keeps every intermediate bounded, so this is usable at any order where
/// the raw `H_n` would overflow.
pub fn oscillator_wavefunction(n: usize, x: f64) -> f64 {
    let mut p0 = (-0.5 * x * x).exp() / std::f64::consts::PI.powf(0.25);
    if n == 0 {
        return p0;
    }
    let mut p1 = std::f64::consts::SQRT_2 * x * p0;
    for m in 1..n {
        let q = (m as f64 + 1.0).recip();
        let p2 = x * (2.0 * q).sqrt() * p1 - (m as f64 * q).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// One weighted coherent-state component `w |φ>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentTerm {
    pub weight: C64,
    pub amplitude: C64,
}

impl CoherentTerm {
    pub fn new(weight: C64, amplitude: C64) -> Self {
        Self { weight, amplitude }
    }
}

/// A pure mechanical state `Σ_n w_n |φ_n>` expanded over coherent states.
///
/// This is the universal representation of every conditional state in the
/// crate. States are usually held normalized (`<ψ|ψ> = 1` via the Gram
/// matrix of coherent overlaps); construction from raw weights is allowed
/// with the `normalized` flag left false.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSuperposition {
    terms: Vec<CoherentTerm>,
    normalized: bool,
}

impl CoherentSuperposition {
    /// Build and normalize. Fails on empty or non-finite input and on
    /// states of numerically zero norm.
    pub fn new(terms: Vec<CoherentTerm>) -> Result<Self> {
        Self::from_unnormalized(terms)?.into_normalized()
    }

    /// Build without normalizing; the `normalized` flag is set to false.
    pub fn from_unnormalized(terms: Vec<CoherentTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Invariant("superposition with no terms".into()));
        }
        for t in &terms {
            if !t.weight.is_finite() || !t.amplitude.is_finite() {
                return Err(Error::Invariant(
                    "non-finite weight or amplitude in superposition".into(),
                ));
            }
        }
        Ok(Self { terms, normalized: false })
    }

    /// A single coherent state `|β>`.
    pub fn coherent(beta: C64) -> Self {
        Self { terms: vec![CoherentTerm::new(C64::new(1.0, 0.0), beta)], normalized: true }
    }

    /// Even (+) or odd (-) superposition `N (|λ> ± |-λ>)`.
    pub(crate) fn two_component(lambda: C64, sign: f64) -> Result<Self> {
        Self::new(vec![
            CoherentTerm::new(C64::new(1.0, 0.0), lambda),
            CoherentTerm::new(C64::new(sign, 0.0), -lambda),
        ])
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `<ψ|ψ>` through the Gram matrix of coherent overlaps.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for tn in &self.terms {
            for tl in &self.terms {
                acc += tn.weight
                    * tl.weight.conj()
                    * coherent_overlap(tl.amplitude, tn.amplitude);
            }
        }
        acc.re
    }

    /// Rescale weights so that `<ψ|ψ> = 1`.
    pub fn into_normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sq();
        if !(n2.is_finite() && n2 > 1e-300) {
            return Err(Error::DegenerateOutcome(format!(
                "cannot normalize state with squared norm {n2:e}"
            )));
        }
        let s = n2.sqrt().recip();
        for t in &mut self.terms {
            t.weight *= s;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Weyl characteristic function `χ(γ) = <ψ|D(γ)|ψ>`.
    ///
    /// Satisfies `χ(0) = 1` (normalized states), `χ(-γ) = χ(γ)*` and
    /// `|χ(γ)| ≤ 1`.
    pub fn char_function(&self, gamma: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for tn in &self.terms {
            for tl in &self.terms {
                acc += tn.weight
                    * tl.weight.conj()
                    * displaced_element(tn.amplitude, tl.amplitude, gamma);
            }
        }
        acc
    }

    /// Wigner function at the phase-space point `δ`.
    ///
    /// Per coherent pair the Fourier integral closes to
    /// `(2/π) exp(-(|φ_n|² + |φ_l|²)/2 + φ_l* φ_n) exp(2 (φ_l* - δ*)(δ - φ_n))`;
    /// the pair sum is real because (n, l) and (l, n) are conjugates.
    pub fn wigner(&self, delta: C64) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for tn in &self.terms {
            for tl in &self.terms {
                let pn = tn.amplitude;
                let pl = tl.amplitude;
                let expo = -0.5 * (pn.norm_sqr() + pl.norm_sqr())
                    + pl.conj() * pn
                    + 2.0 * (pl.conj() - delta.conj()) * (delta - pn);
                acc += tn.weight * tl.weight.conj() * expo.exp();
            }
        }
        std::f64::consts::FRAC_2_PI * acc.re
    }

    /// Displace every amplitude by a common offset (`b -> b + offset`).
    /// The relative weight phases pick up the displacement composition law
    /// so that the state equals `D(offset)|ψ>`.
    pub fn displaced(&self, offset: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let phase = 0.5 * (offset * t.amplitude.conj() - offset.conj() * t.amplitude);
                CoherentTerm::new(t.weight * phase.exp(), t.amplitude + offset)
            })
            .collect();
        Self { terms, normalized: self.normalized }
    }

    /// Merge terms whose amplitudes coincide within `tol` (weights add
    /// exactly since the kets are identical). Keeps first-seen order.
    pub fn merged(&self, tol: f64) -> Self {
        let mut out: Vec<CoherentTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match out.iter_mut().find(|u| (u.amplitude - t.amplitude).norm() <= tol) {
                Some(u) => u.weight += t.weight,
                None => out.push(*t),
            }
        }
        Self { terms: out, normalized: self.normalized }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::quad2d;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn overlap_trivial_cases() {
        assert_abs_diff_eq!((coherent_overlap(c(0.0, 0.0), c(0.0, 0.0)) - 1.0).norm(), 0.0);
        let a = c(1.0, 2.0);
        assert_abs_diff_eq!((coherent_overlap(a, a) - 1.0).norm(), 0.0, epsilon = 1e-15);
        // <1|-1> = e^{-2}
        let got = coherent_overlap(c(1.0, 0.0), c(-1.0, 0.0));
        assert_abs_diff_eq!(got.re, (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_against_fock_expansion() {
        // truncated Fock-basis inner product, 30 terms
        let (a, b) = (c(1.0, 0.0), c(-1.0, 0.0));
        let mut s = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0); // (a* b)^n / n!
        for n in 0..30 {
            if n > 0 {
                term *= a.conj() * b / n as f64;
            }
            s += term;
        }
        s *= (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr()).exp();
        assert_abs_diff_eq!((s - coherent_overlap(a, b)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn displaced_element_limits() {
        assert_abs_diff_eq!(
            (displaced_element(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)) - 1.0).norm(),
            0.0
        );
        let g = c(0.7, -0.3);
        let got = displaced_element(c(0.0, 0.0), c(0.0, 0.0), g);
        assert_abs_diff_eq!((got - (-0.5 * g.norm_sqr()).exp()).norm(), 0.0, epsilon = 1e-15);
        // γ = 0 reduces to the overlap exactly
        let (a, b) = (c(0.3, 1.1), c(-0.4, 0.2));
        assert_eq!(displaced_element(a, b, c(0.0, 0.0)), coherent_overlap(b, a));
    }

    #[test]
    fn displaced_element_against_fock_oracle() {
        let (a, b, g) = (c(1.0, 0.0), c(1.0, 0.0), c(0.3, 0.4));
        let va = crate::fock::coherent(a, 40);
        let vb = crate::fock::coherent(b, 40);
        let dva = crate::fock::displace(&va, g);
        let want = crate::fock::inner(&vb, &dva);
        assert_abs_diff_eq!((displaced_element(a, b, g) - want).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn cross_integral_vacuum_is_zero() {
        let z = c(0.0, 0.0);
        assert_abs_diff_eq!(cross_integral(z, z, z, z).norm(), 0.0);
    }

    #[test]
    fn cross_integral_matches_quadrature() {
        let (a, b, cc, d) = (c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0));
        let q = quad2d(
            |g| {
                (g.norm_sqr() - 1.0)
                    * displaced_element(a, b, g)
                    * displaced_element(cc, d, g).conj()
            },
            8.0,
            1e-10,
        )
        .unwrap();
        assert_abs_diff_eq!((q - cross_integral(a, b, cc, d)).norm(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn hermite_small_orders() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_abs_diff_eq!(hermite(1, 1.5).unwrap(), 3.0);
        // H_4(x) = 16x^4 - 48x^2 + 12 at x = 1/2
        assert_abs_diff_eq!(hermite(4, 0.5).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hermite_range_errors() {
        assert!(hermite(HERMITE_MAX_ORDER + 1, 0.0).is_err());
        assert!(hermite(200, 100.0).is_err()); // overflows f64 on the way up
    }

    #[test]
    fn oscillator_wavefunction_matches_raw_hermite() {
        for n in 0..15 {
            for &x in &[0.0, 0.5, -1.3, 2.7] {
                let mut fact = 1.0f64;
                for m in 1..=n {
                    fact *= m as f64;
                }
                let norm = (2.0f64.powi(n as i32) * fact).sqrt()
                    * std::f64::consts::PI.powf(0.25);
                let want = hermite(n, x).unwrap() * (-0.5 * x * x).exp() / norm;
                assert_abs_diff_eq!(oscillator_wavefunction(n, x), want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn char_function_basics() {
        let vac = CoherentSuperposition::coherent(c(0.0, 0.0));
        assert_abs_diff_eq!((vac.char_function(c(0.0, 0.0)) - 1.0).norm(), 0.0);

        let beta = c(0.4, -1.1);
        let st = CoherentSuperposition::coherent(beta);
        let g = c(0.2, 0.9);
        let want = (-0.5 * g.norm_sqr() + g * beta.conj() - g.conj() * beta).exp();
        assert_abs_diff_eq!((st.char_function(g) - want).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn char_function_cat_matches_fock_oracle() {
        let st = CoherentSuperposition::two_component(c(2.0, 0.0), 1.0).unwrap();
        let v = crate::fock::superposition_vec(&st, 60);
        let mut rng = crate::tests_support::SplitMix::new(7);
        for _ in 0..20 {
            let g = c(rng.next_in(-2.0, 2.0), rng.next_in(-2.0, 2.0));
            let want = crate::fock::inner(&v, &crate::fock::displace(&v, g));
            assert_abs_diff_eq!((st.char_function(g) - want).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn wigner_peaks_and_cat_negativity() {
        let vac = CoherentSuperposition::coherent(c(0.0, 0.0));
        assert_abs_diff_eq!(vac.wigner(c(0.0, 0.0)), std::f64::consts::FRAC_2_PI);

        let beta = c(1.3, -0.2);
        let st = CoherentSuperposition::coherent(beta);
        assert_abs_diff_eq!(st.wigner(beta), std::f64::consts::FRAC_2_PI, epsilon = 1e-14);

        // odd cats take exactly -2/π at the origin
        let odd = CoherentSuperposition::two_component(c(2.0, 0.0), -1.0).unwrap();
        assert_abs_diff_eq!(odd.wigner(c(0.0, 0.0)), -std::f64::consts::FRAC_2_PI, epsilon = 1e-12);
    }

    #[test]
    fn wigner_matches_numerical_fourier_of_char_function() {
        let st = CoherentSuperposition::two_component(c(1.0, 0.5), 1.0).unwrap();
        for &(dr, di) in &[(0.0, 0.0), (0.7, -0.4), (-1.0, 0.3)] {
            let d = c(dr, di);
            let w = quad2d(
                |g| (g.conj() * d - g * d.conj()).exp() * st.char_function(g),
                8.0,
                1e-9,
            )
            .unwrap()
                / std::f64::consts::PI.powi(2);
            assert_abs_diff_eq!(st.wigner(d), w.re, epsilon = 1e-8);
            assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn wigner_integrates_to_one() {
        for st in [
            CoherentSuperposition::coherent(c(0.0, 0.0)),
            CoherentSuperposition::coherent(c(0.9, -0.7)),
            CoherentSuperposition::two_component(c(1.0, 0.0), 1.0).unwrap(),
        ] {
            let total = quad2d(|d| C64::new(st.wigner(d), 0.0), 8.0, 1e-8).unwrap();
            assert_abs_diff_eq!(total.re, 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(total.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn displaced_state_matches_displacement_operator() {
        let st = CoherentSuperposition::two_component(c(0.8, 0.3), -1.0).unwrap();
        let off = c(0.4, -0.9);
        let moved = st.displaced(off);
        assert_abs_diff_eq!(moved.norm_sq(), 1.0, epsilon = 1e-12);
        // χ of D(o)ρD(o)† picks the phase e^{γ o* - γ* o}
        let g = c(0.3, 0.2);
        let want = st.char_function(g) * (g * off.conj() - g.conj() * off).exp();
        assert_abs_diff_eq!((moved.char_function(g) - want).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn merged_coalesces_identical_amplitudes() {
        let st = CoherentSuperposition::from_unnormalized(vec![
            CoherentTerm::new(c(0.3, 0.0), c(1.0, 0.0)),
            CoherentTerm::new(c(0.2, 0.1), c(1.0, 0.0)),
            CoherentTerm::new(c(0.5, 0.0), c(-1.0, 0.0)),
        ])
        .unwrap();
        let m = st.merged(1e-6);
        assert_eq!(m.terms().len(), 2);
        assert_abs_diff_eq!((m.terms()[0].weight - c(0.5, 0.1)).norm(), 0.0);
        assert_abs_diff_eq!(m.norm_sq(), st.norm_sq(), epsilon = 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn overlap_product_in_unit_interval(
            ar in -3.0..3.0f64, ai in -3.0..3.0f64,
            br in -3.0..3.0f64, bi in -3.0..3.0f64,
        ) {
            let a = c(ar, ai);
            let b = c(br, bi);
            let p = coherent_overlap(a, b) * coherent_overlap(b, a);
            proptest::prop_assert!(p.im.abs() < 1e-12);
            proptest::prop_assert!(p.re > 0.0 && p.re <= 1.0 + 1e-12);
        }

        #[test]
        fn char_function_bounded_and_hermitian(
            gr in -3.0..3.0f64, gi in -3.0..3.0f64,
            lr in -2.0..2.0f64, li in -2.0..2.0f64,
        ) {
            let st = CoherentSuperposition::two_component(c(lr, li), 1.0);
            proptest::prop_assume!(st.is_ok());
            let st = st.unwrap();
            let g = c(gr, gi);
            let chi = st.char_function(g);
            proptest::prop_assert!(chi.norm() <= 1.0 + 1e-10);
            proptest::prop_assert!((st.char_function(-g) - chi.conj()).norm() < 1e-12);
        }
    }
}
