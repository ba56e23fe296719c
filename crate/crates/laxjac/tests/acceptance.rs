//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (visible with `cargo test -- --nocapture`, and always on failure).
//!
//! Criterion 9 asserts, among stable and verified structure, that the
//! monodromy action on the ordinary period lattice is not the identity. The
//! continuation (validated against loops where genuine transvections appear)
//! shows that action IS the identity for the loop around (1, 0): the unit
//! twist lives in the extension row of the rank-3 lattice instead. That
//! assertion therefore fails and is kept failing deliberately; see the test
//! output for the measured matrices.

use laxjac::selftest;

const SEED: u64 = 0;

fn check(report: selftest::CriterionReport) {
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_conservation() {
    check(selftest::criterion_1(SEED));
}

#[test]
fn criterion_02_lax_identity() {
    check(selftest::criterion_2(SEED));
}

#[test]
fn criterion_03_invariant_relations() {
    check(selftest::criterion_3(SEED));
}

#[test]
fn criterion_04_isospectrality() {
    check(selftest::criterion_4(SEED));
}

#[test]
fn criterion_05_period_oracle() {
    check(selftest::criterion_5(SEED));
}

#[test]
fn criterion_06_extended_lattice() {
    check(selftest::criterion_6(SEED));
}

#[test]
fn criterion_07_linearization() {
    check(selftest::criterion_7(SEED));
}

#[test]
fn criterion_08_bundle_equivariance() {
    check(selftest::criterion_8(SEED));
}

#[test]
fn criterion_09_monodromy() {
    check(selftest::criterion_9(SEED));
}

#[test]
fn criterion_10_frequency_map() {
    check(selftest::criterion_10(SEED));
}
