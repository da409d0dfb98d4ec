//! Twirls a random two-party state and reads off its block coefficients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sixstate::linalg::random;
use sixstate::symmetry::{enumerate_group, ProjectorSet, Symmetrizer};

fn main() -> sixstate::Result<()> {
    println!("group order {}", enumerate_group()?.len());
    let sym = Symmetrizer::new()?;
    println!("projector ranks {:?}", ProjectorSet::RANKS);

    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let rho = random::density(16, &mut rng);
    let w = sym.twirl(&rho)?;
    let r = sym.decompose(&w)?;
    println!("r = ({:.6}, {:.6}, {:.6}, {:.6}), trace {:.12}", r.r0, r.r1, r.r2, r.r3, r.trace());
    println!("fit residual {:.2e}", sym.fit_residual(&w));
    println!("idempotence  {:.2e}", sym.twirl(&w)?.max_abs_diff(&w));
    Ok(())
}
