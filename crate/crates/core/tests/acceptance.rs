//! Acceptance gate: one test per numbered criterion, each printing a
//! single pass/fail line with the measured values. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use mzfisher::verify::{
    criterion_asymmetric_splits, criterion_beam_splitter_amplitudes, criterion_cfi_attains_qfi,
    criterion_eigenstate, criterion_fixed_total, criterion_mean_optimum,
    criterion_moment_estimator, criterion_noon_comparison, criterion_optimizer_certificate,
    criterion_quadrature_chain, criterion_route_equivalence, run, CriterionResult, VerifyLevel,
};

const SEED: u64 = 20240813;

fn gate(result: CriterionResult) {
    let verdict = if result.passed { "PASS" } else { "FAIL" };
    println!(
        "criterion {:2} [{}] {} ({:.2}s)",
        result.id, verdict, result.title, result.seconds
    );
    for check in &result.checks {
        if !check.passed {
            println!(
                "    failed: {} — measured {:.6e}, target {}",
                check.name, check.measured, check.target
            );
        }
    }
    assert!(result.passed, "criterion {} failed", result.id);
}

#[test]
fn criterion_01_fixed_total_closed_form() {
    gate(criterion_fixed_total());
}

#[test]
fn criterion_02_beam_splitter_amplitudes() {
    gate(criterion_beam_splitter_amplitudes());
}

#[test]
fn criterion_03_noon_comparison() {
    gate(criterion_noon_comparison());
}

#[test]
fn criterion_04_mean_optimum() {
    gate(criterion_mean_optimum());
}

#[test]
fn criterion_05_eigenstate_property() {
    gate(criterion_eigenstate());
}

#[test]
fn criterion_06_asymmetric_splits() {
    gate(criterion_asymmetric_splits());
}

#[test]
fn criterion_07_route_equivalence() {
    gate(criterion_route_equivalence(SEED));
}

#[test]
fn criterion_08_quadrature_chain() {
    gate(criterion_quadrature_chain(SEED));
}

#[test]
fn criterion_09_cfi_attains_qfi() {
    gate(criterion_cfi_attains_qfi());
}

#[test]
fn criterion_10_moment_estimator() {
    gate(criterion_moment_estimator(mzfisher::MzConvention::InverseB));
}

#[test]
fn criterion_11_optimizer_certificate() {
    gate(criterion_optimizer_certificate(SEED, 32));
}

#[test]
fn criterion_12_runtime_budget() {
    // The budget criterion measures the wall time of a complete full-level
    // run, so it needs its own end-to-end execution.
    let report = run(VerifyLevel::Full, SEED);
    let budget = report
        .criteria
        .iter()
        .find(|c| c.id == 12)
        .expect("full run includes the budget criterion")
        .clone();
    gate(budget);
}
