use std::process::ExitCode;

use monokinetic::harness::{run_acceptance, AcceptanceConfig};

fn main() -> ExitCode {
    let report = run_acceptance(&AcceptanceConfig::default(), &[], |r| println!("{}", r.line()));
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} criteria passed",
        report.criteria.len() - failed,
        report.criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
