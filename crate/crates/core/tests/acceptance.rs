//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! `ACCEPTANCE_ONLY=3,4` restricts the run to the listed criteria.

use std::process::ExitCode;

use cvtele_core::verify::{self, CriterionResult, VerifyOptions};

fn main() -> ExitCode {
    let only: Option<Vec<u8>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let wanted = |id: u8| only.as_ref().is_none_or(|ids| ids.contains(&id));
    let opts = VerifyOptions::default();

    let criteria: [(u8, &dyn Fn() -> CriterionResult); 9] = [
        (1, &verify::criterion1),
        (2, &verify::criterion2),
        (3, &|| verify::criterion3(&opts)),
        (4, &|| verify::criterion4(&opts)),
        (5, &|| verify::criterion5(&opts)),
        (6, &|| verify::criterion6(&opts)),
        (7, &verify::criterion7),
        (8, &verify::criterion8),
        (9, &verify::criterion9),
    ];

    let mut failed = 0;
    for (id, run) in criteria {
        if !wanted(id) {
            continue;
        }
        let r = run();
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
