//! Self-verification suite: every documented claim of the library, run as a
//! sequence of numbered criteria with machine-readable results.
//!
//! `Fast` covers the closed-form and algebraic criteria (1–8); `Full` adds
//! the measurement-statistics scans, the optimizer certificate, and the
//! overall timing budget (9–12).

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fisher::{
    cfi_photon_counting, moment_estimator_sensitivity, qfi_entangled, qfi_product, qfi_variance,
    squared_count_cfi, DEFAULT_STEP,
};
use crate::fock::{moments, tensor, SingleModeState};
use crate::optics::{beam_splitter_apply, MzConvention};
use crate::optimize::{
    eq12_value, equal_split_is_best, fixed_total_best, mean_constrained_search,
    quadrature_bound_check,
};
use crate::states::{
    noon_state, optimal_mean_input, squeezed_vacuum, twin_fock_input, CutoffPolicy, SqueezeSpec,
};

/// Which subset of criteria to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    /// Criteria 1–8: closed forms, optics, and algebraic identities.
    Fast,
    /// All criteria, including measurement scans, the optimizer run, and
    /// the timing budget.
    Full,
}

/// One measured quantity inside a criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Human-readable target, e.g. "|err| <= 1e-9".
    pub target: String,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, target: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            target: target.into(),
            passed,
        }
    }
}

/// Result of one numbered criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

/// The whole suite's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub seed: u64,
    pub passed: bool,
    pub seconds: f64,
    pub criteria: Vec<CriterionResult>,
}

fn finish(id: usize, title: &str, start: Instant, checks: Vec<Check>) -> CriterionResult {
    CriterionResult {
        id,
        title: title.to_string(),
        passed: checks.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    }
}

/// Criterion 1: fixed-total enumeration and the twin-Fock simulator both
/// reproduce the closed form N(N+2)/2 (even) / (N(N+2)−1)/2 (odd).
pub fn criterion_fixed_total() -> CriterionResult {
    let start = Instant::now();
    let mut worst_enum = 0.0f64;
    let mut worst_sim = 0.0f64;
    for n in 1..=20u64 {
        let closed = if n % 2 == 0 {
            n * (n + 2) / 2
        } else {
            (n * (n + 2) - 1) / 2
        };
        let (_, best) = fixed_total_best(n);
        worst_enum = worst_enum.max((best as f64 - closed as f64).abs());
        let d = (n as usize + 1) / 2 + 2;
        let f = qfi_variance(&twin_fock_input(n as usize, d, false).expect("cutoff sized to fit"))
            .qfi;
        worst_sim = worst_sim.max((f - closed as f64).abs());
    }
    let checks = vec![
        Check::new(
            "enumeration max vs closed form, worst |err|, N=1..20",
            worst_enum,
            "== 0",
            worst_enum == 0.0,
        ),
        Check::new(
            "twin-Fock simulator vs closed form, worst |err|, N=1..20",
            worst_sim,
            "<= 1e-9",
            worst_sim <= 1e-9,
        ),
        Check::new(
            "runtime seconds",
            start.elapsed().as_secs_f64(),
            "< 5",
            start.elapsed().as_secs_f64() < 5.0,
        ),
    ];
    finish(1, "fixed-N optimum closed form", start, checks)
}

/// Criterion 2: beam-splitter action on |1,0⟩ and |1,1⟩, componentwise.
pub fn criterion_beam_splitter_amplitudes() -> CriterionResult {
    let start = Instant::now();
    let d = 4;
    let s10 = tensor(
        &crate::states::number_state(1, d).unwrap(),
        &crate::states::number_state(0, d).unwrap(),
    )
    .unwrap();
    let out10 = beam_splitter_apply(&s10);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst = 0.0f64;
    worst = worst.max((out10.amp(1, 0) - Complex64::new(inv_sqrt2, 0.0)).norm());
    worst = worst.max((out10.amp(0, 1) - Complex64::new(0.0, -inv_sqrt2)).norm());

    let s11 = twin_fock_input(2, d, false).unwrap();
    let out11 = beam_splitter_apply(&s11);
    worst = worst.max((out11.amp(2, 0) - Complex64::new(0.0, -inv_sqrt2)).norm());
    worst = worst.max((out11.amp(0, 2) - Complex64::new(0.0, -inv_sqrt2)).norm());
    worst = worst.max(out11.amp(1, 1).norm());

    let checks = vec![Check::new(
        "worst componentwise amplitude error on B|1,0>, B|1,1>",
        worst,
        "<= 1e-10",
        worst <= 1e-10,
    )];
    finish(2, "beam-splitter amplitudes", start, checks)
}

/// Criterion 3: N00N benchmark N² vs the twin-Fock value — equal at
/// N ∈ {1,2}, strictly larger for 3 ≤ N ≤ 20, ratio → 2 trend at N = 20.
pub fn criterion_noon_comparison() -> CriterionResult {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut equal_small = true;
    let mut strict_large = true;
    for n in 1..=20usize {
        let f_noon = qfi_entangled(&noon_state(n, n + 1, false).unwrap()).qfi;
        worst = worst.max((f_noon - (n * n) as f64).abs());
        let d = n / 2 + 2;
        let f_twin = qfi_variance(&twin_fock_input(n, d, false).unwrap()).qfi;
        if n <= 2 && (f_noon - f_twin).abs() > 1e-9 {
            equal_small = false;
        }
        if n >= 3 && f_noon <= f_twin + 1e-9 {
            strict_large = false;
        }
    }
    let f_noon_20 = qfi_entangled(&noon_state(20, 21, false).unwrap()).qfi;
    let f_twin_20 = qfi_variance(&twin_fock_input(20, 12, false).unwrap()).qfi;
    let checks = vec![
        Check::new("worst |QFI − N²|, N=1..20", worst, "<= 1e-9", worst <= 1e-9),
        Check::new(
            "equals twin-Fock value at N in {1,2}",
            if equal_small { 1.0 } else { 0.0 },
            "== 1",
            equal_small,
        ),
        Check::new(
            "strictly exceeds twin-Fock for N=3..20",
            if strict_large { 1.0 } else { 0.0 },
            "== 1",
            strict_large,
        ),
        Check::new(
            "N=20 ratio (400 vs 220)",
            f_noon_20 / f_twin_20,
            "in [1.8, 1.85]",
            (1.8..=1.85).contains(&(f_noon_20 / f_twin_20)),
        ),
    ];
    finish(3, "N00N comparison", start, checks)
}

/// Smallest power-of-two cutoff in [16, 64] whose truncation tail meets the
/// 1e-10 target, else 64 (the criterion's cap) with the tail it leaves.
fn adaptive_optimal_input(n_mean: f64) -> crate::fock::TwoModeState {
    let mut d = 16;
    loop {
        match optimal_mean_input(n_mean, d, CutoffPolicy::Reject) {
            Ok(s) if s.truncation_tail() < 1e-10 || d >= 64 => return s,
            // Tail above the 1e-10 target (or even above the factory's own
            // reject limit at small D): raise the cutoff and retry. At the
            // D=64 cap the factory accepts every N_mean in this suite.
            Ok(_) | Err(_) if d < 64 => d *= 2,
            Ok(s) => return s,
            Err(e) => panic!("N_mean={n_mean} cannot be built at the D=64 cap: {e}"),
        }
    }
}

/// Criterion 4: dual-squeezed-vacuum input reaches N(N+2) at adaptive
/// cutoffs up to 64, with the truncation tail under the 1e-10 target.
pub fn criterion_mean_optimum() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Vec::new();
    for &n_mean in &[0.5, 1.0, 2.0, 4.0] {
        let s = adaptive_optimal_input(n_mean);
        let f = qfi_variance(&s).qfi;
        let target = n_mean * (n_mean + 2.0);
        let rel = (f - target).abs() / target;
        checks.push(Check::new(
            format!("N_mean={n_mean}: relative QFI error at D={}", s.cutoff()),
            rel,
            "<= 1e-4",
            rel <= 1e-4,
        ));
        checks.push(Check::new(
            format!("N_mean={n_mean}: truncation tail at D={}", s.cutoff()),
            s.truncation_tail(),
            "< 1e-10",
            s.truncation_tail() < 1e-10,
        ));
    }
    checks.push(Check::new(
        "runtime seconds",
        start.elapsed().as_secs_f64(),
        "< 10",
        start.elapsed().as_secs_f64() < 10.0,
    ));
    finish(4, "mean-N optimum", start, checks)
}

/// Criterion 5: the optimal input is a beam-splitter eigenstate; the
/// squared residual is bounded by 100× the discarded mass (the residual of
/// an exactly represented eigenstate comes entirely from truncation, and
/// squared norms are the scale on which tail mass lives).
pub fn criterion_eigenstate() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Vec::new();
    for &n_mean in &[0.5, 1.0, 2.0, 4.0] {
        let s = adaptive_optimal_input(n_mean);
        let out = beam_splitter_apply(&s);
        let resid = out.distance(&s.embed(out.cutoff()));
        let bound = 100.0 * s.truncation_tail() + 1e-18;
        checks.push(Check::new(
            format!("N_mean={n_mean}: squared residual ||B psi - psi||^2"),
            resid * resid,
            format!("<= 100*tail + 1e-18 = {bound:.3e}"),
            resid * resid <= bound,
        ));
    }
    finish(5, "eigenstate property", start, checks)
}

/// Criterion 6: the asymmetric-split closed form vs the Fock-space oracle on opposite
/// squeezed pairs, and the equal-split scan.
pub fn criterion_asymmetric_splits() -> CriterionResult {
    let start = Instant::now();
    let mut checks = Vec::new();
    for &(na, nb) in &[(1.0f64, 2.0f64), (0.5, 1.5), (3.0, 1.0)] {
        let ra = na.sqrt().asinh();
        let rb = nb.sqrt().asinh();
        let sa = squeezed_vacuum(SqueezeSpec::real(-ra), 64, CutoffPolicy::AutoRaise).unwrap();
        let sb = squeezed_vacuum(SqueezeSpec::real(rb), 64, CutoffPolicy::AutoRaise).unwrap();
        let d = sa.cutoff().max(sb.cutoff());
        let f = qfi_variance(&tensor(&sa.embed(d), &sb.embed(d)).unwrap()).qfi;
        let rel = (f - eq12_value(na, nb)).abs() / eq12_value(na, nb);
        checks.push(Check::new(
            format!("(Na,Nb)=({na},{nb}): relative closed-form vs oracle error"),
            rel,
            "<= 1e-6",
            rel <= 1e-6,
        ));
    }
    for &n in &[1.0, 2.0, 4.0] {
        let r = equal_split_is_best(n, 201);
        checks.push(Check::new(
            format!("N={n}: split scan peaks at N_a=N/2 with value N(N+2)"),
            r.peak_n_a,
            format!("peak at {} with value {}", n / 2.0, n * (n + 2.0)),
            r.holds,
        ));
    }
    finish(6, "asymmetric splits", start, checks)
}

/// Criterion 7: the variance route (simulate B) and the moment-polynomial
/// route agree on random product inputs.
pub fn criterion_route_equivalence(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let d = rng.gen_range(2..=10);
        let draw = |rng: &mut ChaCha8Rng| {
            let amps: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            SingleModeState::new(amps).unwrap()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let via_variance = qfi_variance(&tensor(&a, &b).unwrap()).qfi;
        let via_moments = qfi_product(&moments(&a), &moments(&b)).unwrap().qfi;
        worst = worst.max((via_variance - via_moments).abs());
    }
    let checks = vec![Check::new(
        "worst |variance-form − moment-form| over 500 random products",
        worst,
        "<= 1e-8",
        worst <= 1e-8,
    )];
    finish(7, "variance/moment route equivalence", start, checks)
}

/// Rescales a state to an exact mean photon number (bisection on the
/// geometric reweighting factor).
fn rescale_to_mean(state: &SingleModeState, n_mean: f64) -> SingleModeState {
    let mean_at = |s: f64| moments(&state.geometric_rescale(s).unwrap()).number;
    let mut lo = 1e-6;
    let mut hi = 1.0;
    while mean_at(hi) < n_mean {
        hi *= 2.0;
        assert!(hi < 1e9);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < n_mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    state.geometric_rescale(0.5 * (lo + hi)).unwrap()
}

/// Criterion 8: the quadrature-asymmetry inequality holds on random states
/// at several mean photon numbers and is saturated by squeezed vacuum.
pub fn criterion_quadrature_chain(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut checks = Vec::new();
    for &n_b in &[0.5, 1.0, 2.0] {
        let mut worst_slack = f64::INFINITY;
        for _ in 0..1000 {
            let d = rng.gen_range(3..=12);
            let amps: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let raw = SingleModeState::new(amps).unwrap();
            // Skip draws that cannot reach the target mean (all mass at 0).
            if moments(&raw).number < 1e-6 {
                continue;
            }
            let max_mean = (d - 1) as f64;
            if n_b >= max_mean {
                continue;
            }
            let s = rescale_to_mean(&raw, n_b);
            match quadrature_bound_check(&moments(&s)) {
                Ok(q) => worst_slack = worst_slack.min(q.slack),
                Err(_) => worst_slack = worst_slack.min(f64::NEG_INFINITY),
            }
        }
        checks.push(Check::new(
            format!("N_b={n_b}: worst slack over 1000 random states"),
            worst_slack,
            ">= -1e-8",
            worst_slack >= -1e-8,
        ));
        let r = n_b.sqrt().asinh();
        let sq = squeezed_vacuum(SqueezeSpec::real(r), 64, CutoffPolicy::AutoRaise).unwrap();
        let q = quadrature_bound_check(&moments(&sq)).unwrap();
        checks.push(Check::new(
            format!("N_b={n_b}: squeezed-vacuum saturation slack / rhs"),
            if q.rhs > 0.0 { q.slack / q.rhs } else { 0.0 },
            "<= 1e-6",
            q.slack <= 1e-6 * q.rhs,
        ));
    }
    finish(8, "quadrature inequality chain", start, checks)
}

/// Phase grid for the measurement scans: uniform over (0, π) plus extra
/// log-spaced points near zero, where the dual-squeezed-vacuum CFI peaks.
fn scan_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=60)
        .map(|k| k as f64 * std::f64::consts::PI / 61.0)
        .collect();
    let mut phi = 0.005;
    while phi < 0.3 {
        grid.push(phi);
        phi *= 1.25;
    }
    grid
}

/// Criterion 9: photon counting attains the QFI for real-coefficient inputs
/// (maximized over the phase grid, in at least one beam-splitter
/// orientation) and never beats it anywhere.
pub fn criterion_cfi_attains_qfi() -> CriterionResult {
    let start = Instant::now();
    let grid = scan_grid();
    let mut checks = Vec::new();
    let mut inputs: Vec<(String, crate::fock::TwoModeState)> = Vec::new();
    for &n in &[2usize, 3, 4, 6] {
        let d = n / 2 + 2;
        inputs.push((
            format!("twin-Fock N={n}"),
            twin_fock_input(n, d, false).unwrap(),
        ));
    }
    for &n_mean in &[1.0, 2.0] {
        inputs.push((
            format!("optimal mean N={n_mean}"),
            optimal_mean_input(n_mean, 40, CutoffPolicy::AutoRaise).unwrap(),
        ));
    }
    for (label, input) in &inputs {
        let qfi = qfi_variance(input).qfi;
        let mut best = 0.0f64;
        let mut bound_ok = true;
        for conv in [MzConvention::InverseB, MzConvention::SameB] {
            for &phi in &grid {
                let f = cfi_photon_counting(input, phi, conv, DEFAULT_STEP)
                    .expect("default step is stable on these inputs");
                if f > qfi + 1e-6 {
                    bound_ok = false;
                }
                best = best.max(f);
            }
        }
        let rel = (qfi - best) / qfi;
        checks.push(Check::new(
            format!("{label}: (QFI − max CFI)/QFI over grid"),
            rel,
            "<= 1e-3",
            rel <= 1e-3,
        ));
        checks.push(Check::new(
            format!("{label}: CFI <= QFI + 1e-6 everywhere"),
            if bound_ok { 1.0 } else { 0.0 },
            "== 1",
            bound_ok,
        ));
    }
    checks.push(Check::new(
        "runtime seconds",
        start.elapsed().as_secs_f64(),
        "< 60",
        start.elapsed().as_secs_f64() < 60.0,
    ));
    finish(9, "CFI attains QFI", start, checks)
}

/// Criterion 10: the squared-differenced-photocount moment estimator at
/// N_mean = 2 reaches 99% of N(N+2) and never beats the QFI. The moment
/// ratio (∂⟨N_d²⟩)²/Var(N_d²) peaks at φ = π/2 and converges to N(N+2)
/// from below as the cutoff grows (≈7.25 at D=40, ≈7.98 at D=64, 8−1e−6 at
/// D=128), so the input must carry a tail at the 1e-10 target and the grid
/// must resolve the peak. A companion diagnostic records the full Fisher
/// information of the squared-count record, which also attains the target.
pub fn criterion_moment_estimator(conv: MzConvention) -> CriterionResult {
    let start = Instant::now();
    let input = optimal_mean_input(2.0, 40, CutoffPolicy::AutoRaise).unwrap();
    let qfi = qfi_variance(&input).qfi;
    let mut grid = scan_grid();
    // Resolve the peak at π/2 beyond the coarse scan spacing.
    grid.extend((0..=40).map(|k| 1.47 + 0.005 * k as f64));
    let (best_phi, best_s) = moment_estimator_sensitivity(&input, &grid, conv).unwrap();
    let mut checks = vec![
        Check::new(
            format!("moment-ratio max over grid (at phi={best_phi:.4})"),
            best_s,
            ">= 0.99*8 = 7.92",
            best_s >= 0.99 * 8.0,
        ),
        Check::new(
            "moment-ratio max vs QFI bound",
            best_s,
            format!("<= QFI + 1e-6 = {:.6}", qfi + 1e-6),
            best_s <= qfi + 1e-6,
        ),
    ];
    let mut best_cfi = 0.0f64;
    for &phi in &grid {
        if let Ok(f) = squared_count_cfi(&input, phi, conv, DEFAULT_STEP) {
            best_cfi = best_cfi.max(f);
        }
    }
    checks.push(Check::new(
        "diagnostic: squared-count-record CFI max over grid",
        best_cfi,
        ">= 0.99*8 = 7.92",
        best_cfi >= 0.99 * 8.0,
    ));
    finish(10, "squared-count moment estimator", start, checks)
}

/// Criterion 11: the independent mean-constrained search finds the
/// Heisenberg-limit value and agrees with the variance-route rescore.
pub fn criterion_optimizer_certificate(seed: u64, restarts: usize) -> CriterionResult {
    let start = Instant::now();
    let out = mean_constrained_search(2.0, 16, restarts, seed).expect("restarts converge at D=16");
    let checks = vec![
        Check::new(
            format!("best F from {restarts} restarts at D=16"),
            out.best_f,
            "in [7.92, 8+1e-5]",
            out.best_f >= 0.99 * 8.0 && out.best_f <= 8.0 + 1e-5,
        ),
        Check::new(
            "|moment-form objective − variance-route rescore|",
            (out.best_f - out.rescored_qfi).abs(),
            "<= 1e-6",
            (out.best_f - out.rescored_qfi).abs() <= 1e-6,
        ),
        Check::new(
            "runtime seconds",
            start.elapsed().as_secs_f64(),
            "< 120",
            start.elapsed().as_secs_f64() < 120.0,
        ),
    ];
    finish(11, "optimizer certificate", start, checks)
}

/// Runs the suite with default measurement convention and restart count.
pub fn run(level: VerifyLevel, seed: u64) -> VerifyReport {
    run_with(level, seed, MzConvention::InverseB, 32)
}

/// Runs the suite. Criterion 12 (total runtime under 5 minutes) is
/// appended in `Full` mode from the measured wall time of criteria 1–11.
/// `conv` selects the beam-splitter orientation for the moment-estimator
/// scan (the CFI criterion always exercises both); `restarts` sizes the
/// optimizer certificate.
pub fn run_with(
    level: VerifyLevel,
    seed: u64,
    conv: MzConvention,
    restarts: usize,
) -> VerifyReport {
    let start = Instant::now();
    let mut criteria = vec![
        criterion_fixed_total(),
        criterion_beam_splitter_amplitudes(),
        criterion_noon_comparison(),
        criterion_mean_optimum(),
        criterion_eigenstate(),
        criterion_asymmetric_splits(),
        criterion_route_equivalence(seed),
        criterion_quadrature_chain(seed),
    ];
    if level == VerifyLevel::Full {
        criteria.push(criterion_cfi_attains_qfi());
        criteria.push(criterion_moment_estimator(conv));
        criteria.push(criterion_optimizer_certificate(seed, restarts));
        let elapsed = start.elapsed().as_secs_f64();
        let t = Instant::now();
        criteria.push(finish(
            12,
            "total runtime budget",
            t,
            vec![Check::new(
                "wall time of criteria 1-11, seconds",
                elapsed,
                "< 300",
                elapsed < 300.0,
            )],
        ));
    }
    VerifyReport {
        passed: criteria.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        level,
        seed,
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_level_runs_criteria_1_to_8() {
        let report = run(VerifyLevel::Fast, 11);
        assert_eq!(report.criteria.len(), 8);
        assert_eq!(
            report.criteria.iter().map(|c| c.id).collect::<Vec<_>>(),
            (1..=8).collect::<Vec<_>>()
        );
    }

    #[test]
    fn report_serializes() {
        let r = criterion_beam_splitter_amplitudes();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"id\":2"));
    }
}
