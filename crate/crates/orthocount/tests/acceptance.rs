//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use orthocount::selftest;
use orthocount::threads::Threads;

fn main() -> ExitCode {
    let exec = Threads::new(std::thread::available_parallelism().map_or(1, |n| n.get()));
    let results = selftest::run(&[], 1, &exec);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
