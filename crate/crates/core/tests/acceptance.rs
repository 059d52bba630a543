//! Runs every acceptance criterion at full size and prints one line each.

use std::process::ExitCode;
use std::time::Instant;

use warcomb::verify::{Options, CRITERIA};

fn main() -> ExitCode {
    let options = Options::default();
    let mut failed = 0;
    for criterion in &CRITERIA {
        let start = Instant::now();
        let report = criterion.run(&options);
        let verdict = if report.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} ({} checks, {:.1}s): {}",
            report.id,
            report.checks.len(),
            start.elapsed().as_secs_f64(),
            report.title
        );
        for c in report.checks.iter().filter(|c| !c.pass) {
            println!(
                "    {} {}: expected {}, observed {}",
                c.claim, c.parameters, c.expected, c.observed
            );
        }
        if !report.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
