//! Runs all twelve acceptance criteria and prints one line per criterion.
//!
//! Two criteria fail as measured, and this test pins that set so a change in
//! either direction (a new failure or a fix) is noticed:
//!
//! - Criterion 5: the t copula with nu = 5 (0.030 against 0.03) and the
//!   logistic EV copula with alpha = 3 (0.048) exceed the slope tolerance on
//!   [30, 60]. For the EV copula the slope carries the bias
//!   -beta ln 2 / 30 with beta = 1 - alpha = -2, about 0.046; for the t copula
//!   the error falls to about 3e-4 on [120, 240].
//! - Criterion 10: with the threshold fixed at the 0.95 conditional quantile,
//!   the log-density error of the SPAR model does not decrease over
//!   mu + {5, 10, 20} at any grid angle, and on Laplace margins it reaches
//!   about 0.74 at mu + 20 near the axes.

use std::io::Write;

use spar_cli::verify::criterion;

const KNOWN_FAILURES: [u8; 2] = [5, 10];

#[test]
fn acceptance_criteria() {
    // written to the process stderr directly so the lines survive output capture
    let mut err = std::io::stderr().lock();
    let mut failing = Vec::new();
    for id in 1..=12u8 {
        let report = criterion(id, 20_240_601).expect("criterion runs");
        writeln!(err, "{}", report.summary()).unwrap();
        if !report.pass() {
            failing.push(id);
        }
    }
    assert_eq!(failing, KNOWN_FAILURES, "failing criteria changed");
}
