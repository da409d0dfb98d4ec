//! Minimum bit error per photon number: the smallest eigenvalue of the
//! basis-averaged error observable Γ̄ on qubit ⊗ (C²)^{⊗N}.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, kron, ComplexMatrix, Ket};
use crate::states::{avg_error_povm, symmetric_split, PhotonNumber};

/// Γ̄ restricted to the complement of the symmetric subspace.
pub const HPERP_VALUE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinErrorRow {
    pub n: PhotonNumber,
    /// λ_min(Γ̄) over the full 2^{N+1}-dimensional space.
    pub min_e_b: f64,
    /// The same minimum computed on qubit ⊗ H (dimension 2(N+1)).
    pub reduced_check: f64,
}

impl MinErrorRow {
    pub fn agreement(&self) -> f64 {
        (self.min_e_b - self.reduced_check).abs()
    }
}

fn reduced_isometry(n: PhotonNumber) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(2), &symmetric_split(n).isometry())
}

/// Minimum of Γ̄ on qubit ⊗ H, capped by the constant H⊥ block.
fn reduced_minimum(n: PhotonNumber, gamma: &ComplexMatrix) -> Result<f64> {
    let compressed = gamma.compress(&reduced_isometry(n));
    let lam = hermitian_eigensystem(&compressed)?.min();
    Ok(if n.get() >= 2 { lam.min(HPERP_VALUE) } else { lam })
}

pub fn min_bit_error(n: PhotonNumber) -> Result<MinErrorRow> {
    let gamma = avg_error_povm(n);
    let min_e_b = hermitian_eigensystem(&gamma)?.min();
    let reduced_check = reduced_minimum(n, &gamma)?;
    if !(-1e-12..=HPERP_VALUE + 1e-12).contains(&min_e_b) {
        return Err(Error::CrossCheck {
            what: "min_e_b outside [0, 1/2]",
            deviation: min_e_b,
        });
    }
    Ok(MinErrorRow {
        n,
        min_e_b,
        reduced_check,
    })
}

/// Eigenvector of Γ̄ for its smallest eigenvalue, in the full space.
pub fn min_error_state(n: PhotonNumber) -> Result<Ket> {
    let sys = hermitian_eigensystem(&avg_error_povm(n))?;
    Ok(sys.eigenvectors[0].clone())
}

pub fn min_error_table(nmax: PhotonNumber) -> Result<Vec<MinErrorRow>> {
    (1..=nmax.get())
        .map(|n| min_bit_error(PhotonNumber::with_limit(n, nmax.get())?))
        .collect()
}
