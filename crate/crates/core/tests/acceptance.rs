use std::process::ExitCode;

use tandem_core::verify::{run_criterion, Suite, VerifyOptions};

fn main() -> ExitCode {
    // Numeric arguments pick criteria; anything else (libtest flags) is ignored.
    let mut ids: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    if ids.is_empty() {
        ids = Suite::All.criteria();
    }
    let opts = VerifyOptions::full();
    let mut reports = Vec::new();
    for id in ids {
        let r = run_criterion(id, &opts);
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {:>2} ({}) [{:.1} s]",
            r.id, r.name, r.seconds
        );
        for d in &r.details {
            println!("      {d}");
        }
        reports.push(r);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} criteria passed",
        reports.len() - failed,
        reports.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
