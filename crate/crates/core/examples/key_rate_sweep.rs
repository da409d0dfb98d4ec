//! Key rate G = n_sif (1 − h(e) − H(Z|X)) as the bit error rate grows.

use sixstate::rate::{binary_entropy, keyrate, tangent_envelope};

fn main() -> sixstate::Result<()> {
    let env = tangent_envelope()?;
    let n_sif = 0.5;
    println!("{:>6} {:>10} {:>10} {:>10}", "e_b", "h(e_b)", "H(Z|X)<=", "rate");
    for i in 0..=26 {
        let e = (i as f64 * 0.005).min(0.13);
        let row = keyrate(e, &env, n_sif)?;
        println!(
            "{:>6.3} {:>10.6} {:>10.6} {:>10.6}",
            e,
            binary_entropy(e)?,
            row.hzx_upper,
            row.rate
        );
    }
    Ok(())
}
