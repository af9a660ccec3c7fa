//! Constructors for the state families used throughout: number states,
//! coherent states, squeezed vacua, twin-Fock and N00N inputs, and the
//! dual-squeezed-vacuum optimum for a fixed mean photon number.
//!
//! Every truncating factory computes the exact probability mass it discards
//! and either rejects the requested cutoff or raises it, per [`CutoffPolicy`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fock::{tensor, SingleModeState, TwoModeState, EPS_TAIL};

/// Hard upper bound for [`CutoffPolicy::AutoRaise`].
pub const CUTOFF_CAP: usize = 512;

/// Tail mass above which [`CutoffPolicy::Reject`] refuses to build. Between
/// this and `EPS_TAIL` the state is built with the tail recorded, so callers
/// can work at a deliberately tight cutoff and account for the loss.
pub const REJECT_TAIL: f64 = 1e-6;

/// What a factory does when the requested cutoff leaves too much tail mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffPolicy {
    /// Build at the requested cutoff, recording the discarded mass; fail
    /// (with the cutoff that would reach the `EPS_TAIL` target) only when
    /// the tail exceeds [`REJECT_TAIL`]. The default, so tests are
    /// deterministic.
    Reject,
    /// Double the cutoff until the tail drops below `EPS_TAIL`, up to
    /// [`CUTOFF_CAP`].
    AutoRaise,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::Reject
    }
}

/// Squeeze parameter γ of `S(γ) = exp[½(γ a² − γ* a†²)]`.
///
/// Real positive squeeze parameters cover the interferometry results here;
/// the phase convention for complex γ below is this library's choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeSpec {
    pub gamma: Complex64,
}

impl SqueezeSpec {
    pub fn new(gamma: Complex64) -> Self {
        Self { gamma }
    }

    pub fn real(r: f64) -> Self {
        Self {
            gamma: Complex64::new(r, 0.0),
        }
    }

    /// r = |γ|
    pub fn r(&self) -> f64 {
        self.gamma.norm()
    }

    /// Mean photon number sinh²r of `S(γ)|0⟩`.
    pub fn mean_photons(&self) -> f64 {
        self.r().sinh().powi(2)
    }
}

/// `|n⟩` at the given cutoff.
pub fn number_state(n: usize, cutoff: usize) -> Result<SingleModeState> {
    if n >= cutoff {
        return Err(CoreError::CutoffExceeded { index: n, cutoff });
    }
    let mut amps = vec![Complex64::ZERO; cutoff];
    amps[n] = Complex64::ONE;
    SingleModeState::new(amps)
}

fn coherent_amps(alpha: Complex64, cutoff: usize) -> (Vec<Complex64>, f64) {
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut mass = 0.0;
    for n in 0..cutoff {
        amps.push(c);
        mass += c.norm_sqr();
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    (amps, (1.0 - mass).max(0.0))
}

fn required_cutoff(tail_at: impl Fn(usize) -> f64) -> usize {
    let mut d = 2;
    while d <= 2 * CUTOFF_CAP {
        if tail_at(d) < EPS_TAIL {
            return d;
        }
        d *= 2;
    }
    2 * CUTOFF_CAP
}

/// Truncated coherent state `|α⟩`, amplitudes `αⁿ/√(n!)` renormalized.
pub fn coherent_state(
    alpha: Complex64,
    cutoff: usize,
    policy: CutoffPolicy,
) -> Result<SingleModeState> {
    build_truncated(cutoff, policy, |d| coherent_amps(alpha, d))
}

/// Shared policy loop: build at the requested cutoff, reject on severe
/// tails, or auto-raise toward the `EPS_TAIL` target.
fn build_truncated(
    cutoff: usize,
    policy: CutoffPolicy,
    amps_at: impl Fn(usize) -> (Vec<Complex64>, f64),
) -> Result<SingleModeState> {
    let mut d = cutoff;
    loop {
        let (amps, tail) = amps_at(d);
        let limit = match policy {
            CutoffPolicy::Reject => REJECT_TAIL,
            CutoffPolicy::AutoRaise => EPS_TAIL,
        };
        if tail < limit {
            return SingleModeState::with_tail(amps, tail)
                .map(SingleModeState::phase_normalized);
        }
        match policy {
            CutoffPolicy::Reject => {
                return Err(CoreError::Truncation {
                    tail,
                    limit,
                    required: required_cutoff(|d| amps_at(d).1),
                })
            }
            CutoffPolicy::AutoRaise => {
                if d >= CUTOFF_CAP {
                    return Err(CoreError::Truncation {
                        tail,
                        limit,
                        required: required_cutoff(|d| amps_at(d).1),
                    });
                }
                d = (d * 2).min(CUTOFF_CAP);
            }
        }
    }
}

/// Even-index amplitudes of `S(γ)|0⟩` and the exact discarded tail.
///
/// The closed-form recursion from the generator is
/// `c_{2m+2}/c_{2m} = −e^{−iθ} tanh r · √((2m+1)/(2m+2))`, `c_0 = 1/√cosh r`,
/// with γ = r e^{iθ}. The recursion is the production path: exponentiating
/// the truncated (non-normal) generator distorts amplitudes near the edge.
fn squeezed_amps(gamma: Complex64, cutoff: usize) -> (Vec<Complex64>, f64) {
    let r = gamma.norm();
    let mut amps = vec![Complex64::ZERO; cutoff];
    if r == 0.0 {
        amps[0] = Complex64::ONE;
        return (amps, 0.0);
    }
    let ratio_base = -(gamma.conj() / r) * r.tanh();
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut mass_in = 0.0;
    let mut m = 0usize;
    // Fill the vector, then keep running the recursion to get the tail.
    let mut tail = 0.0;
    loop {
        let idx = 2 * m;
        let p = c.norm_sqr();
        if idx < cutoff {
            amps[idx] = c;
            mass_in += p;
        } else {
            tail += p;
            if p < 1e-40 && idx > 4 * cutoff.max(64) {
                break;
            }
        }
        c *= ratio_base * ((2 * m + 1) as f64 / (2 * m + 2) as f64).sqrt();
        m += 1;
        if m > 100_000 {
            break;
        }
    }
    // The infinite-space state is normalized, so 1 - mass_in is the exact
    // tail up to the summation stopping rule above.
    ((amps), (1.0 - mass_in).max(tail))
}

/// Squeezed vacuum `S(γ)|0⟩` in the truncated space; only even photon
/// numbers are populated. For real γ = r > 0 the x quadrature is squeezed
/// (`⟨x²⟩ = e^{−2r}/2`); γ = −r exchanges the quadratures.
pub fn squeezed_vacuum(
    spec: SqueezeSpec,
    cutoff: usize,
    policy: CutoffPolicy,
) -> Result<SingleModeState> {
    build_truncated(cutoff, policy, |d| squeezed_amps(spec.gamma, d))
}

/// Twin-Fock input: `|N/2⟩⊗|N/2⟩` for even N, `|(N+1)/2⟩⊗|(N−1)/2⟩` for odd
/// N. `exchange` swaps the two modes in the odd case (the two optima differ
/// only by a mode exchange).
pub fn twin_fock_input(total: usize, cutoff: usize, exchange: bool) -> Result<TwoModeState> {
    if total >= 2 * cutoff - 1 {
        return Err(CoreError::CutoffExceeded {
            index: total,
            cutoff: 2 * cutoff - 1,
        });
    }
    let (mut n_a, mut n_b) = if total % 2 == 0 {
        (total / 2, total / 2)
    } else {
        ((total + 1) / 2, (total - 1) / 2)
    };
    if exchange {
        std::mem::swap(&mut n_a, &mut n_b);
    }
    tensor(&number_state(n_a, cutoff)?, &number_state(n_b, cutoff)?)
}

/// The post-beam-splitter benchmark `(|N,0⟩ + |0,N⟩)/√2`. This is already
/// the state on the far side of the beam splitter; feed it to
/// `fisher::qfi_entangled`, not `fisher::qfi_variance`.
pub fn noon_state(total: usize, cutoff: usize, allow_vacuum: bool) -> Result<TwoModeState> {
    if total >= cutoff {
        return Err(CoreError::CutoffExceeded {
            index: total,
            cutoff,
        });
    }
    if total == 0 {
        if !allow_vacuum {
            return Err(CoreError::DegenerateNoon);
        }
        let mut amps = vec![Complex64::ZERO; cutoff * cutoff];
        amps[0] = Complex64::ONE;
        return TwoModeState::new(amps, cutoff);
    }
    let mut amps = vec![Complex64::ZERO; cutoff * cutoff];
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[total * cutoff] = w; // |N,0⟩
    amps[total] = w; // |0,N⟩
    TwoModeState::new(amps, cutoff)
}

/// The fixed-mean-photon-number optimum `S_a(−r)|0⟩ ⊗ S_b(r)|0⟩` with
/// `r = arcsinh(√(N/2))`, so each mode carries N/2 photons on average.
pub fn optimal_mean_input(
    n_mean: f64,
    cutoff: usize,
    policy: CutoffPolicy,
) -> Result<TwoModeState> {
    assert!(n_mean >= 0.0, "mean photon number must be nonnegative");
    let r = (n_mean / 2.0).sqrt().asinh();
    let a = squeezed_vacuum(SqueezeSpec::real(-r), cutoff, policy)?;
    let b = squeezed_vacuum(SqueezeSpec::real(r), cutoff, policy)?;
    // AutoRaise may have settled on different cutoffs for the two modes.
    let d = a.cutoff().max(b.cutoff());
    tensor(&a.embed(d), &b.embed(d))
}

/// JSON-facing description of a constructible state. Single-mode variants
/// (`number`, `coherent`, `squeezed_vacuum`) build a [`SingleModeState`];
/// the rest build a [`TwoModeState`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Number {
        n: usize,
        cutoff: usize,
    },
    Coherent {
        alpha: ComplexSpec,
        cutoff: usize,
    },
    SqueezedVacuum {
        gamma: ComplexSpec,
        cutoff: usize,
    },
    TwinFock {
        total: usize,
        cutoff: usize,
        #[serde(default)]
        exchange: bool,
    },
    Noon {
        total: usize,
        cutoff: usize,
    },
    OptimalMean {
        mean: f64,
        cutoff: usize,
    },
}

/// `{"re": ..., "im": ...}` with `im` defaulting to zero.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexSpec> for Complex64 {
    fn from(s: ComplexSpec) -> Self {
        Complex64::new(s.re, s.im)
    }
}

/// A parsed state spec, single- or two-mode.
#[derive(Debug, Clone)]
pub enum BuiltState {
    Single(SingleModeState),
    Two(TwoModeState),
}

impl StateSpec {
    pub fn build(&self, policy: CutoffPolicy) -> Result<BuiltState> {
        Ok(match self {
            StateSpec::Number { n, cutoff } => BuiltState::Single(number_state(*n, *cutoff)?),
            StateSpec::Coherent { alpha, cutoff } => {
                BuiltState::Single(coherent_state((*alpha).into(), *cutoff, policy)?)
            }
            StateSpec::SqueezedVacuum { gamma, cutoff } => BuiltState::Single(squeezed_vacuum(
                SqueezeSpec::new((*gamma).into()),
                *cutoff,
                policy,
            )?),
            StateSpec::TwinFock {
                total,
                cutoff,
                exchange,
            } => BuiltState::Two(twin_fock_input(*total, *cutoff, *exchange)?),
            StateSpec::Noon { total, cutoff } => BuiltState::Two(noon_state(*total, *cutoff, true)?),
            StateSpec::OptimalMean { mean, cutoff } => {
                BuiltState::Two(optimal_mean_input(*mean, *cutoff, policy)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::moments;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    #[test]
    fn number_state_examples() {
        let vac = number_state(0, 8).unwrap();
        assert_eq!(vac.amp(0), Complex64::ONE);
        let three = number_state(3, 8).unwrap();
        assert_eq!(three.amp(3), Complex64::ONE);
        assert!(matches!(
            number_state(8, 8),
            Err(CoreError::CutoffExceeded { .. })
        ));
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let s = coherent_state(Complex64::ZERO, 8, CutoffPolicy::Reject).unwrap();
        assert_abs_diff_eq!(s.amp(0).re, 1.0, epsilon = 1e-14);
        assert_eq!(s.truncation_tail(), 0.0);
    }

    #[test]
    fn coherent_unit_alpha_mean_photon() {
        let s = coherent_state(Complex64::ONE, 32, CutoffPolicy::Reject).unwrap();
        let m = moments(&s);
        assert_abs_diff_eq!(m.number, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!((m.mean - Complex64::ONE).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((m.pair - Complex64::ONE).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn coherent_large_alpha_small_cutoff_rejected() {
        let err = coherent_state(Complex64::new(4.0, 0.0), 8, CutoffPolicy::Reject);
        match err {
            Err(CoreError::Truncation { required, .. }) => assert!(required > 8),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn coherent_auto_raise_finds_a_cutoff() {
        let s = coherent_state(Complex64::new(4.0, 0.0), 8, CutoffPolicy::AutoRaise).unwrap();
        assert!(s.cutoff() > 8);
        assert!(s.truncation_tail() < EPS_TAIL);
        let m = moments(&s);
        assert_abs_diff_eq!(m.number, 16.0, epsilon = 1e-7);
    }

    #[test]
    fn squeezed_zero_is_vacuum() {
        let s = squeezed_vacuum(SqueezeSpec::real(0.0), 8, CutoffPolicy::Reject).unwrap();
        assert_abs_diff_eq!(s.amp(0).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn squeezed_odd_amplitudes_vanish() {
        let s = squeezed_vacuum(SqueezeSpec::real(0.8), 40, CutoffPolicy::Reject).unwrap();
        for n in (1..40).step_by(2) {
            assert_eq!(s.amp(n), Complex64::ZERO);
        }
    }

    #[test]
    fn squeezed_mean_photons_and_quadratures() {
        // sinh²r = 1
        let r = (1.0f64 + 2.0f64.sqrt()).ln();
        let s = squeezed_vacuum(SqueezeSpec::real(r), 40, CutoffPolicy::Reject).unwrap();
        let m = moments(&s);
        // D = 40 leaves a ~1.7e-7 tail, so the mean photon number of the
        // truncated state is off by a few 1e-6; the deficit shrinks with D.
        assert_abs_diff_eq!(m.number, 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(m.quad_x2, (-2.0 * r).exp() / 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(m.quad_p2, (2.0 * r).exp() / 2.0, epsilon = 1e-4);

        let s64 = squeezed_vacuum(SqueezeSpec::real(r), 64, CutoffPolicy::Reject).unwrap();
        assert_abs_diff_eq!(moments(&s64).number, 1.0, epsilon = 1e-8);

        // γ = −r exchanges the quadratures.
        let s_neg = squeezed_vacuum(SqueezeSpec::real(-r), 40, CutoffPolicy::Reject).unwrap();
        let mn = moments(&s_neg);
        assert_abs_diff_eq!(mn.quad_p2, (-2.0 * r).exp() / 2.0, epsilon = 1e-5);
    }

    /// Matrix-exponential oracle: exponentiate the generator ½(γa²−γ*a†²)
    /// via Hermitian eigendecomposition of i·K at a working cutoff large
    /// enough that the generator's own truncation does not distort the
    /// amplitudes being compared, then truncate to the requested cutoff.
    fn squeezed_oracle(gamma: Complex64, cutoff: usize) -> SingleModeState {
        let work = 4 * cutoff;
        let mut a = DMatrix::<Complex64>::zeros(work, work);
        for n in 1..work {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        let aa = &a * &a;
        let k = aa.map(|x| x * gamma * 0.5) - aa.adjoint().map(|x| x * gamma.conj() * 0.5);
        let h = k.map(|x| x * Complex64::i()); // Hermitian
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut v0 = nalgebra::DVector::<Complex64>::zeros(work);
        v0[0] = Complex64::ONE;
        let coeffs = eig.eigenvectors.adjoint() * v0;
        let phases = nalgebra::DVector::from_iterator(
            work,
            eig.eigenvalues
                .iter()
                .zip(coeffs.iter())
                .map(|(l, c)| (Complex64::new(0.0, -l)).exp() * c),
        );
        let out = &eig.eigenvectors * phases;
        let amps: Vec<Complex64> = out.iter().take(cutoff).copied().collect();
        SingleModeState::new(amps).unwrap().phase_normalized()
    }

    #[test]
    fn squeezed_recursion_matches_matrix_exponential_oracle() {
        for r in [0.3, 0.8814, 1.5] {
            let s = squeezed_vacuum(SqueezeSpec::real(r), 40, CutoffPolicy::AutoRaise).unwrap();
            let o = squeezed_oracle(Complex64::new(r, 0.0), s.cutoff());
            let max_diff = s
                .amps()
                .iter()
                .zip(o.amps())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(max_diff < 1e-8, "r={r}: max diff {max_diff:.3e}");
        }
    }

    #[test]
    fn squeezed_complex_gamma_matches_oracle() {
        let gamma = Complex64::new(0.4, 0.3);
        let s = squeezed_vacuum(SqueezeSpec::new(gamma), 40, CutoffPolicy::Reject).unwrap();
        let o = squeezed_oracle(gamma, 40);
        let max_diff = s
            .amps()
            .iter()
            .zip(o.amps())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-8, "max diff {max_diff:.3e}");
    }

    #[test]
    fn twin_fock_examples() {
        let s2 = twin_fock_input(2, 4, false).unwrap();
        assert_eq!(s2.amp(1, 1), Complex64::ONE);
        let s3 = twin_fock_input(3, 4, false).unwrap();
        assert_eq!(s3.amp(2, 1), Complex64::ONE);
        let s3x = twin_fock_input(3, 4, true).unwrap();
        assert_eq!(s3x.amp(1, 2), Complex64::ONE);
        let s0 = twin_fock_input(0, 4, false).unwrap();
        assert_eq!(s0.amp(0, 0), Complex64::ONE);
        assert!(twin_fock_input(7, 4, false).is_err());
    }

    #[test]
    fn noon_examples() {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let s1 = noon_state(1, 4, false).unwrap();
        assert_abs_diff_eq!(s1.amp(1, 0).re, w, epsilon = 1e-14);
        assert_abs_diff_eq!(s1.amp(0, 1).re, w, epsilon = 1e-14);
        let s2 = noon_state(2, 4, false).unwrap();
        assert_abs_diff_eq!(s2.amp(2, 0).re, w, epsilon = 1e-14);
        assert!(matches!(noon_state(0, 4, false), Err(CoreError::DegenerateNoon)));
        let s0 = noon_state(0, 4, true).unwrap();
        assert_eq!(s0.amp(0, 0), Complex64::ONE);
    }

    #[test]
    fn optimal_mean_input_per_mode_numbers() {
        let s = optimal_mean_input(2.0, 64, CutoffPolicy::Reject).unwrap();
        // Marginal mean photon numbers of the product grid.
        let d = s.cutoff();
        let mut na = 0.0;
        let mut nb = 0.0;
        for i in 0..d {
            for j in 0..d {
                let p = s.amp(i, j).norm_sqr();
                na += i as f64 * p;
                nb += j as f64 * p;
            }
        }
        assert_abs_diff_eq!(na, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(nb, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn optimal_mean_zero_is_vacuum() {
        let s = optimal_mean_input(0.0, 8, CutoffPolicy::Reject).unwrap();
        assert_eq!(s.amp(0, 0), Complex64::ONE);
    }

    #[test]
    fn optimal_mean_amplitudes_are_real() {
        let s = optimal_mean_input(2.0, 64, CutoffPolicy::Reject).unwrap();
        for c in s.amps() {
            assert!(c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn state_spec_round_trip() {
        let json = r#"{"type":"squeezed_vacuum","gamma":{"re":0.8814},"cutoff":40}"#;
        let spec: StateSpec = serde_json::from_str(json).unwrap();
        match spec.build(CutoffPolicy::Reject).unwrap() {
            BuiltState::Single(s) => assert_eq!(s.cutoff(), 40),
            _ => panic!("expected single-mode state"),
        }
        let json = r#"{"type":"twin_fock","total":3,"cutoff":8}"#;
        let spec: StateSpec = serde_json::from_str(json).unwrap();
        match spec.build(CutoffPolicy::Reject).unwrap() {
            BuiltState::Two(s) => assert_eq!(s.amp(2, 1), Complex64::ONE),
            _ => panic!("expected two-mode state"),
        }
    }
}
