//! Security analysis of the six-state QKD protocol with threshold
//! detectors: detector POVMs, octahedral symmetrization of the 3-photon
//! pair space, squash feasibility, the 3-photon error region, concave
//! envelopes of the phase-error entropy, thresholds and key rates.

pub mod cli;
pub mod error;
pub mod hull;
pub mod linalg;
pub mod photon;
pub mod rate;
pub mod roots;
pub mod squash;
pub mod states;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Ket, C64};
pub use states::{BasisAxis, BitValue, PhotonNumber};
