//! Error-rate thresholds of the three protocols.
//!
//! ```text
//! cargo run --release --example thresholds
//! ```

use sixstate::rate::{threshold, Protocol};

fn main() -> sixstate::Result<()> {
    for p in Protocol::ALL {
        println!("{:<20} {:.6}%", p.as_str(), 100.0 * threshold(p)?);
    }
    Ok(())
}
