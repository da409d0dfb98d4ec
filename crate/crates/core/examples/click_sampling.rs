//! Samples threshold-detector clicks and compares the frequencies with the
//! POVM probabilities.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixstate::linalg::random;
use sixstate::states::{simulate_clicks, BasisAxis, BitValue, PhotonNumber};

fn main() -> sixstate::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=3 {
        let n = PhotonNumber::new(n)?;
        let rho = random::density(n.bob_dim(), &mut rng);
        for axis in BasisAxis::ALL {
            let rec = simulate_clicks(&rho, axis, n, 100_000, rng.next_u64())?;
            let f = rec.frequency(BitValue::Plus);
            println!(
                "N={n} {axis}: p(+)={:.5} freq={f:.5} ({:+.2} sigma)",
                rec.p_plus,
                (f - rec.p_plus) / rec.sigma()
            );
        }
    }
    Ok(())
}
