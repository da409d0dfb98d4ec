//! Smallest achievable bit error for each photon number.

use sixstate::photon::min_error_table;
use sixstate::states::PhotonNumber;

fn main() -> sixstate::Result<()> {
    let nmax = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    println!(" N   min e_b          qubit⊗H check");
    for row in min_error_table(PhotonNumber::new(nmax)?)? {
        println!("{:>2}   {:.12}   {:.12}", row.n, row.min_e_b, row.reduced_check);
    }
    Ok(())
}
