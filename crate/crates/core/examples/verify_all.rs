//! Runs the full invariant suite and prints one line per check.

use sixstate::verify::{run_verify, VerifyOptions};

fn main() -> sixstate::Result<()> {
    let rep = run_verify(&VerifyOptions::default())?;
    for c in &rep.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:<28} {:>12.3e}  (tol {:.0e})", c.name, c.residual, c.tolerance);
    }
    println!("six-state threshold {:.9} (deviation {:+.2e})", rep.sixstate_threshold, rep.threshold_deviation);
    std::process::exit(if rep.passed { 0 } else { 1 });
}
