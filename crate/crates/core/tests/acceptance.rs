//! Runs the acceptance criteria and prints one pass/fail line per criterion.

use carleson_core::estimates::suite::{run_criterion, SuiteConfig, CRITERIA};

#[test]
fn acceptance_criteria() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let r = run_criterion(id, &cfg).expect("valid criterion");
        println!("{}", r.line());
        if !r.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
