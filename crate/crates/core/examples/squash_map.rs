//! Builds F(σ_y) for the 3-photon squash and checks the resulting map.

use sixstate::squash::{construct_squash_y_with, SquashMethod, SquashOptions};
use sixstate::states::{basis_projector, threshold_povm, BasisAxis, BitValue, PhotonNumber};

fn main() -> sixstate::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok());
    let sq = construct_squash_y_with(&SquashOptions { seed })?;
    match sq.method {
        SquashMethod::Ansatz => println!("ansatz accepted"),
        SquashMethod::Dykstra { iterations } => println!(
            "ansatz rejected (lambda {:?}, residual {:?}); Dykstra took {iterations} iterations",
            sq.lambda_ansatz, sq.ansatz_residual
        ),
    }
    println!("Choi min eigenvalue  {:.3e}", sq.choi_min_eig);
    println!("trace residual       {:.3e}", sq.constraint_residual);
    println!("Kraus operators      {}", sq.kraus.as_ref().map_or(0, Vec::len));

    let n3 = PhotonNumber::new(3)?;
    for axis in [BasisAxis::X, BasisAxis::Z] {
        for bit in BitValue::ALL {
            let gap = sq
                .apply(&basis_projector(axis, bit))
                .max_abs_diff(&threshold_povm(axis, bit, n3));
            println!("|F(P({axis}{:+})) - M| = {gap:.2e}", bit.sign());
        }
    }
    Ok(())
}
