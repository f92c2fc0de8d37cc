//! Runs the eleven acceptance criteria, one line each, and fails if any of them
//! fails or runs past its time budget.

use std::process::ExitCode;

use tyangian::acceptance::{run_criterion, CRITERIA};

/// Wall-clock budgets in milliseconds, for the criteria that have one.
fn budget_ms(id: u8) -> Option<u128> {
    match id {
        1 => Some(5_000),
        4 | 5 => Some(10_000),
        6 => Some(120_000),
        7 => Some(180_000),
        10 => Some(30_000),
        _ => None,
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let r = run_criterion(id).expect("criterion id from the table");
        let late = budget_ms(id).filter(|&b| r.wall_ms > b);
        println!("{r}");
        if let Some(b) = late {
            println!("       over budget: {} ms > {b} ms", r.wall_ms);
        }
        if !r.passed || late.is_some() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
