//! Image of the symmetrized 3-photon states in the (e_b, e_ỹ) plane and the
//! phase-error entropy h3 on it.

use sixstate::rate::{h3, max_h3_at, region_map, tangent_envelope, RegionParams};
use sixstate::squash::construct_squash_y;
use sixstate::symmetry::ErrorModel;

fn main() -> sixstate::Result<()> {
    let sq = construct_squash_y()?;
    let model = ErrorModel::new(&sq);
    for (u, t, s) in [(1.0, 1.0, -1.0), (1.0, 1.0, 1.0), (1.0, 0.0, 0.0), (0.5, 0.5, 0.0)] {
        let pt = region_map(&RegionParams::new(u, t, s)?, &model)?;
        println!(
            "u={u:.1} t={t:.1} s={s:+.1} -> e_b={:.6} e_y={:.6} h3={:.6}",
            pt.e_b,
            pt.e_y,
            h3(pt.e_b, pt.e_y)?
        );
    }
    let env = tangent_envelope()?;
    println!("\n e_b    max h3    line");
    for i in 0..=10 {
        let e = 0.25 + 0.05 * i as f64;
        println!("{e:.2}  {:.6}  {:.6}", max_h3_at(e)?, env.line(e));
    }
    Ok(())
}
