//! Acceptance battery: one test per verification criterion.  Each prints a
//! single pass/fail line with its timing (visible with --nocapture); the
//! assertion carries the same information into the test harness summary.

use prozeta_core::verify::{self, VerifyConfig};

fn check(report: prozeta_core::verify::CriterionReport) {
    println!("{}", report.line());
    assert!(report.pass, "{}", report.line());
}

#[test]
fn criterion_01_hall_basis() {
    check(verify::criterion_1_hall_basis());
}

#[test]
fn criterion_02_identity_suite() {
    check(verify::criterion_2_identity_suite());
}

#[test]
fn criterion_03_lambda_construction() {
    check(verify::criterion_3_lambda());
}

#[test]
fn criterion_04_bch_reproduction() {
    check(verify::criterion_4_bch());
}

#[test]
fn criterion_05_group_law() {
    check(verify::criterion_5_group_law(&VerifyConfig::default()));
}

#[test]
fn criterion_06_automorphism_forward_checks() {
    check(verify::criterion_6_automorphism_checks(&VerifyConfig::default()));
}

#[test]
fn criterion_07_finite_field_classification() {
    check(verify::criterion_7_classification(&VerifyConfig::default()));
}

/// Informational companion run over F_7; slow, so opt in with --ignored.
#[test]
#[ignore]
fn criterion_07_classification_q7_informational() {
    let cfg = VerifyConfig { with_q7: true, ..VerifyConfig::default() };
    let report = verify::criterion_7_classification(&cfg);
    println!("{}", report.line());
    assert!(report.pass, "{}", report.line());
}

#[test]
fn criterion_08_theta_oracle_agreement() {
    check(verify::criterion_8_theta_oracle());
}

#[test]
fn criterion_09_generating_function() {
    check(verify::criterion_9_generating_function());
}

#[test]
fn criterion_10_zeta_reproduction() {
    check(verify::criterion_10_zeta());
}

#[test]
fn criterion_11_functional_equation_verdicts() {
    check(verify::criterion_11_functional_equation());
}

/// Confidence suite for the lifting construction; exercised through the
/// library rather than a numbered criterion.
#[test]
fn lifting_condition_samples() {
    let (passed, cases) = verify::lifting_suite(&VerifyConfig::default(), 100, 5);
    println!("[{}] lifting condition: {passed}/{cases} cases", if passed == cases { "PASS" } else { "FAIL" });
    assert_eq!(passed, cases);
}
