//! Quantum and classical Fisher information for the differential phase,
//! the quantum Cramér-Rao bound, and the squared-differenced-photocount
//! estimator.
//!
//! The quantum Fisher information of a product input is the variance of
//! `N_d = a†a − b†b` in the state after the first beam splitter. Two
//! independent routes compute it: the variance form (simulate the beam
//! splitter, take moments of N_d) and the moment form (a polynomial in the
//! six single-mode moments of each input mode). Agreement between the two
//! is a standing consistency check.

use crate::error::{CoreError, Result};
use crate::fock::{differenced_number_moments, ModeMoments, TwoModeState};
use crate::optics::{beam_splitter_apply, mz_output_probs, MzConvention};

/// Imaginary residue above this in the moment form signals a bug.
const IMAG_TOL: f64 = 1e-10;

/// Negative QFI values above this magnitude are roundoff and clamp to zero.
const CLAMP_TOL: f64 = 1e-10;

/// Outcomes with probability below this are excluded from classical Fisher
/// sums to avoid 0/0 noise; the bias is far below the test tolerances.
pub const P_FLOOR: f64 = 1e-14;

/// Default finite-difference step (radians) for probability derivatives.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Which route produced a Fisher value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FisherMethod {
    VarianceForm,
    MomentForm,
}

/// A Fisher information value with its bound and the route that produced it.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FisherReport {
    /// Quantum Fisher information for the differential phase (≥ 0).
    pub qfi: f64,
    /// 1/qfi; infinite when qfi = 0.
    pub qcrb: f64,
    pub method: FisherMethod,
    /// Probability mass lost to truncation upstream of this computation.
    pub truncation_tail: f64,
    pub convention_note: &'static str,
}

const CONVENTION_NOTE: &str = "N_d = a\u{2020}a - b\u{2020}b; \u{3c6}_d parametrized as \
(\u{3c6}_d/2, -\u{3c6}_d/2) so QFI = Var(N_d) after the first beam splitter";

impl FisherReport {
    fn new(raw_qfi: f64, method: FisherMethod, truncation_tail: f64) -> Self {
        let qfi = if raw_qfi < 0.0 && raw_qfi > -CLAMP_TOL {
            0.0
        } else {
            raw_qfi
        };
        Self {
            qfi,
            qcrb: if qfi > 0.0 { 1.0 / qfi } else { f64::INFINITY },
            method,
            truncation_tail,
            convention_note: CONVENTION_NOTE,
        }
    }
}

/// QFI of a pre-beam-splitter input: Var(N_d) on `B|ψ_in⟩`.
pub fn qfi_variance(input: &TwoModeState) -> FisherReport {
    let after = beam_splitter_apply(input);
    let (m1, m2) = differenced_number_moments(&after);
    FisherReport::new(m2 - m1 * m1, FisherMethod::VarianceForm, input.truncation_tail())
}

/// QFI of a state interpreted as already past the beam splitter (N00N-style
/// benchmarks): Var(N_d) on the state as given.
pub fn qfi_entangled(post_bs_state: &TwoModeState) -> FisherReport {
    let (m1, m2) = differenced_number_moments(post_bs_state);
    FisherReport::new(
        m2 - m1 * m1,
        FisherMethod::VarianceForm,
        post_bs_state.truncation_tail(),
    )
}

/// QFI of a product input from the six moments of each mode:
///
/// `F = 2N_aN_b + N_a + N_b − ⟨a†a†⟩⟨bb⟩ − ⟨aa⟩⟨b†b†⟩
///      − 2|⟨a⟩|²|⟨b⟩|² + ⟨a†⟩²⟨b⟩² + ⟨a⟩²⟨b†⟩²`
///
/// The conjugate pairs make the result structurally real; an imaginary
/// residue above tolerance is reported as an internal-consistency error.
pub fn qfi_product(ma: &ModeMoments, mb: &ModeMoments) -> Result<FisherReport> {
    let na = ma.number;
    let nb = mb.number;
    let f = 2.0 * na * nb + na + nb
        - (ma.pair_dag * mb.pair).re
        - (ma.pair * mb.pair_dag).re
        - 2.0 * ma.mean.norm_sqr() * mb.mean.norm_sqr()
        + (ma.mean.conj().powi(2) * mb.mean.powi(2)
            + ma.mean.powi(2) * mb.mean.conj().powi(2))
        .re;
    let imag = (ma.pair_dag * mb.pair + ma.pair * mb.pair_dag).im.abs()
        + (ma.mean.conj().powi(2) * mb.mean.powi(2)
            + ma.mean.powi(2) * mb.mean.conj().powi(2))
        .im
        .abs();
    if imag > IMAG_TOL {
        return Err(CoreError::ImaginaryResidue { residue: imag });
    }
    Ok(FisherReport::new(f, FisherMethod::MomentForm, 0.0))
}

/// 1/qfi, infinite for qfi = 0.
pub fn qcrb(report: &FisherReport) -> f64 {
    report.qcrb
}

fn cfi_at_step(
    input: &TwoModeState,
    phi_d: f64,
    conv: MzConvention,
    h: f64,
) -> f64 {
    // 5-point central difference of each outcome probability.
    let pm2 = mz_output_probs(input, phi_d - 2.0 * h, conv);
    let pm1 = mz_output_probs(input, phi_d - h, conv);
    let pp1 = mz_output_probs(input, phi_d + h, conv);
    let pp2 = mz_output_probs(input, phi_d + 2.0 * h, conv);
    let p0 = mz_output_probs(input, phi_d, conv);
    let d = p0.len();
    let mut cfi = 0.0;
    for i in 0..d {
        for j in 0..d {
            let p = p0[i][j];
            if p <= P_FLOOR {
                continue;
            }
            let dp = (pm2[i][j] - 8.0 * pm1[i][j] + 8.0 * pp1[i][j] - pp2[i][j]) / (12.0 * h);
            cfi += dp * dp / p;
        }
    }
    cfi
}

/// Classical Fisher information of photon counting at the Mach-Zehnder
/// output, by numerical differentiation of the outcome probabilities.
/// Values at step h and h/2 must agree to 1e−4 relative or a
/// derivative-instability error is returned; the h/2 value is reported.
pub fn cfi_photon_counting(
    input: &TwoModeState,
    phi_d: f64,
    conv: MzConvention,
    derivative_step: f64,
) -> Result<f64> {
    assert!(derivative_step > 0.0);
    let coarse = cfi_at_step(input, phi_d, conv, derivative_step);
    let fine = cfi_at_step(input, phi_d, conv, derivative_step / 2.0);
    let scale = fine.abs().max(1e-6);
    if (coarse - fine).abs() > 1e-4 * scale {
        return Err(CoreError::DerivativeInstability { coarse, fine });
    }
    Ok(fine)
}

fn nd_moments_at(input: &TwoModeState, phi: f64, conv: MzConvention) -> (f64, f64) {
    let p = mz_output_probs(input, phi, conv);
    let d = p.len();
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let nd2 = (i as f64 - j as f64).powi(2);
            m2 += nd2 * p[i][j];
            m4 += nd2 * nd2 * p[i][j];
        }
    }
    (m2, m4)
}

/// Sensitivity of the squared-differenced-photocount estimator:
/// `S(φ) = (∂_φ⟨N_d²⟩)² / Var(N_d²)` on the Mach-Zehnder output, scanned
/// over the grid. Returns the maximizing φ and the maximum.
///
/// Grid points where Var(N_d²) vanishes contribute S = 0 when the signal
/// derivative also vanishes there (e.g. vacuum input) and are skipped
/// otherwise; if every point is skipped the grid is degenerate.
pub fn moment_estimator_sensitivity(
    input: &TwoModeState,
    phi_grid: &[f64],
    conv: MzConvention,
) -> Result<(f64, f64)> {
    assert!(!phi_grid.is_empty(), "empty phase grid");
    let h = DEFAULT_STEP;
    let mut best: Option<(f64, f64)> = None;
    let mut usable = false;
    for &phi in phi_grid {
        let (m2_minus, _) = nd_moments_at(input, phi - h, conv);
        let (m2_plus, _) = nd_moments_at(input, phi + h, conv);
        let (m2, m4) = nd_moments_at(input, phi, conv);
        let deriv = (m2_plus - m2_minus) / (2.0 * h);
        let var = m4 - m2 * m2;
        let s = if var < 1e-14 {
            if deriv.abs() < 1e-7 {
                0.0 // no signal and no noise: zero information, not 0/0
            } else {
                continue;
            }
        } else {
            deriv * deriv / var
        };
        usable = true;
        if best.map_or(true, |(_, b)| s > b) {
            best = Some((phi, s));
        }
    }
    if !usable {
        return Err(CoreError::DegenerateGrid);
    }
    Ok(best.expect("usable implies at least one scored point"))
}

/// Classical Fisher information of the *squared-differenced-photocount
/// record*: the outcome grid is collapsed to the value of `(n_a − n_b)²`
/// before the Fisher sum. This is the information actually available to an
/// estimator that only sees the squared differenced count, and is the
/// quantity that attains the QCRB for dual-squeezed-vacuum inputs; the
/// moment ratio of [`moment_estimator_sensitivity`] is a lower bound on it.
pub fn squared_count_cfi(
    input: &TwoModeState,
    phi_d: f64,
    conv: MzConvention,
    derivative_step: f64,
) -> Result<f64> {
    assert!(derivative_step > 0.0);
    let collapse = |phi: f64| -> Vec<f64> {
        let p = mz_output_probs(input, phi, conv);
        let d = p.len();
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                out[i.abs_diff(j)] += p[i][j];
            }
        }
        out
    };
    let cfi_at = |h: f64| -> f64 {
        let pm2 = collapse(phi_d - 2.0 * h);
        let pm1 = collapse(phi_d - h);
        let pp1 = collapse(phi_d + h);
        let pp2 = collapse(phi_d + 2.0 * h);
        let p0 = collapse(phi_d);
        let mut cfi = 0.0;
        for k in 0..p0.len() {
            if p0[k] <= P_FLOOR {
                continue;
            }
            let dp = (pm2[k] - 8.0 * pm1[k] + 8.0 * pp1[k] - pp2[k]) / (12.0 * h);
            cfi += dp * dp / p0[k];
        }
        cfi
    };
    let coarse = cfi_at(derivative_step);
    let fine = cfi_at(derivative_step / 2.0);
    let scale = fine.abs().max(1e-6);
    if (coarse - fine).abs() > 1e-4 * scale {
        return Err(CoreError::DerivativeInstability { coarse, fine });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{moments, tensor, SingleModeState};
    use crate::states::{
        coherent_state, noon_state, number_state, optimal_mean_input, twin_fock_input,
        CutoffPolicy,
    };
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn qfi_variance_fock_examples() {
        let d = 6;
        let one_one = twin_fock_input(2, d, false).unwrap();
        assert_abs_diff_eq!(qfi_variance(&one_one).qfi, 4.0, epsilon = 1e-10);

        let vac = twin_fock_input(0, d, false).unwrap();
        assert_abs_diff_eq!(qfi_variance(&vac).qfi, 0.0, epsilon = 1e-12);

        let two_one = tensor(
            &number_state(2, d).unwrap(),
            &number_state(1, d).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(qfi_variance(&two_one).qfi, 7.0, epsilon = 1e-10);
    }

    #[test]
    fn qfi_entangled_noon_examples() {
        assert_abs_diff_eq!(
            qfi_entangled(&noon_state(3, 8, false).unwrap()).qfi,
            9.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            qfi_entangled(&noon_state(1, 8, false).unwrap()).qfi,
            1.0,
            epsilon = 1e-12
        );
        let one_one = twin_fock_input(2, 8, false).unwrap();
        assert_abs_diff_eq!(qfi_entangled(&one_one).qfi, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qfi_product_examples() {
        let d = 16;
        let m2 = moments(&number_state(2, d).unwrap());
        assert_abs_diff_eq!(qfi_product(&m2, &m2).unwrap().qfi, 12.0, epsilon = 1e-10);

        let mc = moments(&coherent_state(Complex64::ONE, 32, CutoffPolicy::Reject).unwrap());
        let mv = moments(&number_state(0, 32).unwrap());
        let f = qfi_product(&mc, &mv).unwrap().qfi;
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-9);
        // Cross-check against the variance route.
        let prod = tensor(
            &coherent_state(Complex64::ONE, 32, CutoffPolicy::Reject).unwrap(),
            &number_state(0, 32).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(qfi_variance(&prod).qfi, f, epsilon = 1e-8);
    }

    #[test]
    fn qfi_product_optimal_mean_halves() {
        let s = optimal_mean_input(2.0, 64, CutoffPolicy::Reject).unwrap();
        // Extract the two marginals from the product grid: the first column
        // and row of a product state are c_a * c_b[0] and c_a[0] * c_b.
        let d = s.cutoff();
        let a: Vec<Complex64> = (0..d).map(|i| s.amp(i, 0)).collect();
        let b: Vec<Complex64> = (0..d).map(|j| s.amp(0, j)).collect();
        let ma = moments(&SingleModeState::new(a).unwrap());
        let mb = moments(&SingleModeState::new(b).unwrap());
        assert_abs_diff_eq!(qfi_product(&ma, &mb).unwrap().qfi, 8.0, epsilon = 1e-6);
    }

    #[test]
    fn qcrb_examples() {
        let r4 = FisherReport::new(4.0, FisherMethod::VarianceForm, 0.0);
        assert_abs_diff_eq!(qcrb(&r4), 0.25, epsilon = 1e-15);
        let r7 = FisherReport::new(7.0, FisherMethod::VarianceForm, 0.0);
        assert_abs_diff_eq!(qcrb(&r7), 1.0 / 7.0, epsilon = 1e-15);
        let r0 = FisherReport::new(0.0, FisherMethod::VarianceForm, 0.0);
        assert!(qcrb(&r0).is_infinite());
    }

    #[test]
    fn product_and_variance_routes_agree_on_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let d = rng.gen_range(2..=10);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let amps: Vec<Complex64> = (0..d)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                SingleModeState::new(amps).unwrap()
            };
            let xi = mk(&mut rng);
            let chi = mk(&mut rng);
            let via_variance = qfi_variance(&tensor(&xi, &chi).unwrap()).qfi;
            let via_moments = qfi_product(&moments(&xi), &moments(&chi)).unwrap().qfi;
            assert_abs_diff_eq!(via_variance, via_moments, epsilon = 1e-8);
        }
    }

    #[test]
    fn qfi_is_phase_gauge_invariant_and_mode_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let d = rng.gen_range(2..=8);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let amps: Vec<Complex64> = (0..d)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                SingleModeState::new(amps).unwrap()
            };
            let xi = mk(&mut rng);
            let chi = mk(&mut rng);
            let base = qfi_variance(&tensor(&xi, &chi).unwrap()).qfi;

            let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..6.28));
            let rotated = SingleModeState::new(
                xi.amps().iter().map(|c| c * phase).collect(),
            )
            .unwrap();
            let gauged = qfi_variance(&tensor(&rotated, &chi).unwrap()).qfi;
            assert_abs_diff_eq!(base, gauged, epsilon = 1e-10);

            let swapped = qfi_variance(&tensor(&chi, &xi).unwrap()).qfi;
            assert_abs_diff_eq!(base, swapped, epsilon = 1e-10);
        }
    }

    #[test]
    fn cfi_vacuum_is_zero() {
        let vac = twin_fock_input(0, 4, false).unwrap();
        let f = cfi_photon_counting(&vac, 0.4, MzConvention::InverseB, DEFAULT_STEP).unwrap();
        assert_abs_diff_eq!(f, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn cfi_twin_fock_reaches_qfi() {
        let s = twin_fock_input(2, 8, false).unwrap();
        let qfi = qfi_variance(&s).qfi;
        let mut best = 0.0f64;
        for k in 1..=24 {
            let phi = k as f64 * std::f64::consts::FRAC_PI_2 / 24.0;
            let f = cfi_photon_counting(&s, phi, MzConvention::InverseB, DEFAULT_STEP).unwrap();
            assert!(f <= qfi + 1e-6, "CFI {f} exceeds QFI {qfi} at phi={phi}");
            best = best.max(f);
        }
        assert!((qfi - best) / qfi < 1e-3, "best CFI {best} vs QFI {qfi}");
    }

    #[test]
    fn moment_estimator_vacuum_is_zero() {
        let vac = twin_fock_input(0, 4, false).unwrap();
        let (_, s) =
            moment_estimator_sensitivity(&vac, &[0.1, 0.5, 1.0], MzConvention::InverseB).unwrap();
        assert_abs_diff_eq!(s, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn moment_estimator_twin_fock_respects_bound() {
        let s = twin_fock_input(2, 8, false).unwrap();
        let qfi = qfi_variance(&s).qfi;
        let grid: Vec<f64> = (1..=30)
            .map(|k| k as f64 * std::f64::consts::PI / 31.0)
            .collect();
        let (best_phi, best) =
            moment_estimator_sensitivity(&s, &grid, MzConvention::InverseB).unwrap();
        assert!(best <= qfi + 1e-6);
        // Frozen regression values for the N = 2 twin-Fock scan.
        assert_abs_diff_eq!(best, 4.0, epsilon = 1e-3);
        assert!(best_phi > 0.0 && best_phi < std::f64::consts::PI);
    }

    #[test]
    fn clamp_and_consistency_guards() {
        let r = FisherReport::new(-5e-11, FisherMethod::MomentForm, 0.0);
        assert_eq!(r.qfi, 0.0);
        assert!(r.qcrb.is_infinite());
    }
}
