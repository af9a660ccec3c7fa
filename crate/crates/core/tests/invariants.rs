//! Property-based invariants over randomly generated states, with shrinking
//! to minimal counterexamples on failure.

use mzfisher::{
    eq12_value, fixed_total_best, moments, mz_output_probs, qfi_product, qfi_variance, tensor,
    MzConvention, SingleModeState,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn amplitude_vec(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..=max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
        .prop_filter("needs usable norm", |v: &Vec<Complex64>| {
            v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3
        })
}

fn single_state(max_len: usize) -> impl Strategy<Value = SingleModeState> {
    amplitude_vec(max_len).prop_map(|v| SingleModeState::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qfi_is_nonnegative_and_routes_agree(
        a in single_state(8),
        b in single_state(8),
    ) {
        let d = a.cutoff().max(b.cutoff());
        let product = tensor(&a.embed(d), &b.embed(d)).unwrap();
        let via_variance = qfi_variance(&product).qfi;
        let via_moments = qfi_product(&moments(&a), &moments(&b)).unwrap().qfi;
        prop_assert!(via_variance >= 0.0);
        prop_assert!((via_variance - via_moments).abs() <= 1e-8);
    }

    #[test]
    fn quadrature_second_moments_satisfy_commutator_identity(s in single_state(12)) {
        // ⟨x²⟩ + ⟨p²⟩ = 2⟨n⟩ + 1 for any normalized state.
        let m = moments(&s);
        prop_assert!((m.quad_x2 + m.quad_p2 - (2.0 * m.number + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn output_probabilities_are_normalized(
        a in single_state(6),
        b in single_state(6),
        phi in 0.0..std::f64::consts::TAU,
        inverse in any::<bool>(),
    ) {
        let d = a.cutoff().max(b.cutoff());
        let product = tensor(&a.embed(d), &b.embed(d)).unwrap();
        let conv = if inverse { MzConvention::InverseB } else { MzConvention::SameB };
        let p = mz_output_probs(&product, phi, conv);
        let total: f64 = p.iter().flatten().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(p.iter().flatten().all(|&x| x >= -1e-15));
    }

    #[test]
    fn geometric_rescale_mean_is_monotone(s in single_state(10), lo in 0.2..1.0f64, hi in 1.0..3.0f64) {
        let m_lo = moments(&s.geometric_rescale(lo).unwrap()).number;
        let m_hi = moments(&s.geometric_rescale(hi).unwrap()).number;
        prop_assert!(m_lo <= m_hi + 1e-12);
    }

    #[test]
    fn eq12_is_symmetric_and_dominates_marginals(na in 0.0..5.0f64, nb in 0.0..5.0f64) {
        prop_assert_eq!(eq12_value(na, nb), eq12_value(nb, na));
        prop_assert!(eq12_value(na, nb) >= na + nb - 1e-12);
    }

    #[test]
    fn fixed_total_maximizers_are_exchange_symmetric(n in 0u64..200) {
        let (maximizers, best) = fixed_total_best(n);
        for &m in &maximizers {
            prop_assert!(maximizers.contains(&(n - m)));
            prop_assert_eq!(2 * m * (n - m) + n, best);
        }
    }
}
