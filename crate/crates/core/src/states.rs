//! Basis states, N-photon spaces and threshold-detector measurements.
//!
//! Bob's N-photon input is modelled as N qubits (dimension 2^N). Physical
//! two-mode states live in the symmetric subspace H; its complement H⊥
//! always produces a double click, which the detector resolves with a fair
//! coin. Alice's qubit is always the first tensor factor.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigensystem, kron, kron_power, re, ComplexMatrix, Ket, TOL_PSD,
};

/// Default largest photon number handled by the analysis.
pub const N_MAX: usize = 8;

/// Hard ceiling for [`PhotonNumber::with_limit`]. Alice⊗Bob operators have
/// dimension 2^(N+1); N = 11 already means 4096×4096 dense eigensolves.
pub const N_HARD_LIMIT: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BasisAxis {
    X,
    Y,
    Z,
}

impl BasisAxis {
    pub const ALL: [BasisAxis; 3] = [BasisAxis::X, BasisAxis::Y, BasisAxis::Z];

    pub fn pauli(self) -> ComplexMatrix {
        let z = re(0.0);
        match self {
            BasisAxis::X => ComplexMatrix::from_row_major(2, 2, vec![z, re(1.0), re(1.0), z]),
            BasisAxis::Y => ComplexMatrix::from_row_major(2, 2, vec![z, c(0.0, -1.0), c(0.0, 1.0), z]),
            BasisAxis::Z => ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
        }
    }
}

impl fmt::Display for BasisAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasisAxis::X => "X",
            BasisAxis::Y => "Y",
            BasisAxis::Z => "Z",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BitValue {
    Minus,
    Plus,
}

impl BitValue {
    pub const ALL: [BitValue; 2] = [BitValue::Plus, BitValue::Minus];

    pub fn sign(self) -> f64 {
        match self {
            BitValue::Plus => 1.0,
            BitValue::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BitValue::Plus => BitValue::Minus,
            BitValue::Minus => BitValue::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PhotonNumber(usize);

impl PhotonNumber {
    /// Photon number in `1..=N_MAX`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_limit(n, N_MAX)
    }

    /// Photon number in `1..=max` for callers that raise the default cap.
    /// Cost grows as 8^N in the eigensolves downstream.
    pub fn with_limit(n: usize, max: usize) -> Result<Self> {
        let max = max.min(N_HARD_LIMIT);
        if (1..=max).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::BadPhotonNumber { n, max })
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Dimension of Bob's space, 2^N.
    pub fn bob_dim(self) -> usize {
        1 << self.0
    }
}

impl fmt::Display for PhotonNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Eigenvector of σ_axis with eigenvalue `bit`.
///
/// |Z+⟩ = (1, 0), |Z−⟩ = (0, 1), |X_b⟩ = (|Z+⟩ + b|Z−⟩)/√2,
/// |Y_b⟩ = (|Z+⟩ + i·b|Z−⟩)/√2.
pub fn basis_ket(axis: BasisAxis, bit: BitValue) -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b = bit.sign();
    match (axis, bit) {
        (BasisAxis::Z, BitValue::Plus) => Ket::from_real(&[1.0, 0.0]),
        (BasisAxis::Z, BitValue::Minus) => Ket::from_real(&[0.0, 1.0]),
        (BasisAxis::X, _) => Ket::from_real(&[s, b * s]),
        (BasisAxis::Y, _) => Ket::new(vec![re(s), c(0.0, b * s)]),
    }
}

pub fn basis_projector(axis: BasisAxis, bit: BitValue) -> ComplexMatrix {
    basis_ket(axis, bit).projector()
}

/// (|Z−⟩|Z+⟩ − |Z+⟩|Z−⟩)/√2.
pub fn singlet() -> Ket {
    let up = basis_ket(BasisAxis::Z, BitValue::Plus);
    let down = basis_ket(BasisAxis::Z, BitValue::Minus);
    down.kron(&up).sub(&up.kron(&down)).normalized()
}

/// Split of the N-qubit space into the symmetric subspace and its complement.
#[derive(Clone, Debug)]
pub struct SymmetricSplit {
    pub n: PhotonNumber,
    /// Dicke states |N/2, m⟩ ordered m = N/2, N/2 − 1, …, −N/2; entry k has
    /// k spins down, equal positive amplitudes.
    pub dicke: Vec<Ket>,
    pub pi_h: ComplexMatrix,
    pub pi_hperp: ComplexMatrix,
}

impl SymmetricSplit {
    /// 2^N × (N+1) isometry whose columns are the Dicke states.
    pub fn isometry(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.dicke)
    }

    /// Dicke state with spin projection `m` (must be one of N/2, …, −N/2).
    pub fn dicke_with_m(&self, m: f64) -> &Ket {
        let n = self.n.get() as f64;
        let k = (n / 2.0 - m).round();
        assert!(
            (0.0..=n).contains(&k) && (n / 2.0 - m - k).abs() < 1e-9,
            "m = {m} is not a valid projection for N = {n}"
        );
        &self.dicke[k as usize]
    }
}

pub fn dicke_state(n: usize, down: usize) -> Ket {
    let dim = 1usize << n;
    let count = (0..dim).filter(|i| i.count_ones() as usize == down).count();
    let amp = 1.0 / (count as f64).sqrt();
    Ket::new(
        (0..dim)
            .map(|i| if i.count_ones() as usize == down { re(amp) } else { re(0.0) })
            .collect(),
    )
}

pub fn symmetric_split(n: PhotonNumber) -> SymmetricSplit {
    let dicke: Vec<Ket> = (0..=n.get()).map(|k| dicke_state(n.get(), k)).collect();
    let dim = n.bob_dim();
    let mut pi_h = ComplexMatrix::zeros(dim, dim);
    for d in &dicke {
        pi_h += &d.projector();
    }
    let pi_hperp = &ComplexMatrix::identity(dim) - &pi_h;
    SymmetricSplit {
        n,
        dicke,
        pi_h,
        pi_hperp,
    }
}

/// T_α = P(|α+⟩)^{⊗N} − P(|α−⟩)^{⊗N}.
pub fn sign_observable(axis: BasisAxis, n: PhotonNumber) -> ComplexMatrix {
    let plus = kron_power(&basis_projector(axis, BitValue::Plus), n.get());
    let minus = kron_power(&basis_projector(axis, BitValue::Minus), n.get());
    &plus - &minus
}

/// Threshold-detector POVM element for outcome `bit` along `axis`, with
/// double clicks assigned a uniformly random bit:
/// M = ½(P(|α_b⟩)^{⊗N} − P(|α_{−b}⟩)^{⊗N} + 1).
pub fn threshold_povm(axis: BasisAxis, bit: BitValue, n: PhotonNumber) -> ComplexMatrix {
    let t = sign_observable(axis, n).scale_real(bit.sign());
    (&t + &ComplexMatrix::identity(n.bob_dim())).scale_real(0.5)
}

/// Γ_α = P(|α+⟩) ⊗ M_{α+} + P(|α−⟩) ⊗ M_{α−} on Alice ⊗ Bob.
pub fn error_povm(axis: BasisAxis, n: PhotonNumber) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2 * n.bob_dim(), 2 * n.bob_dim());
    for bit in BitValue::ALL {
        out += &kron(&basis_projector(axis, bit), &threshold_povm(axis, bit, n));
    }
    out
}

/// (Γ_X + Γ_Y + Γ_Z)/3.
pub fn avg_error_povm(n: PhotonNumber) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2 * n.bob_dim(), 2 * n.bob_dim());
    for axis in BasisAxis::ALL {
        out += &error_povm(axis, n);
    }
    out.scale_real(1.0 / 3.0)
}

/// Collective spin Σ_k σ_axis^(k)/2 on N qubits.
pub fn collective_spin(axis: BasisAxis, n: PhotonNumber) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let half = axis.pauli().scale_real(0.5);
    let dim = n.bob_dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for k in 0..n.get() {
        let term = (0..n.get())
            .map(|j| if j == k { half.clone() } else { id.clone() })
            .reduce(|a, b| kron(&a, &b))
            .expect("n >= 1");
        out += &term;
    }
    out
}

/// Checks Hermitian, PSD and unit trace (all within 1e-9).
pub fn check_density_operator(state: &ComplexMatrix, dim: usize) -> Result<()> {
    if state.rows() != dim || state.cols() != dim {
        return Err(Error::NotDensityOperator(format!(
            "expected {dim}x{dim}, got {}x{}",
            state.rows(),
            state.cols()
        )));
    }
    let defect = state.hermiticity_defect();
    if defect > TOL_PSD {
        return Err(Error::NotDensityOperator(format!(
            "hermiticity defect {defect:e}"
        )));
    }
    let tr = state.trace();
    if (tr.re - 1.0).abs() > TOL_PSD || tr.im.abs() > TOL_PSD {
        return Err(Error::NotDensityOperator(format!("trace {tr}")));
    }
    let lo = hermitian_eigensystem(&state.hermitian_part())?.min();
    if lo < -TOL_PSD {
        return Err(Error::NotDensityOperator(format!(
            "negative eigenvalue {lo:e}"
        )));
    }
    Ok(())
}

/// Sampled detector outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ClickRecord {
    /// Tr[M_{axis,+} ρ], the probability the samples are drawn from.
    pub p_plus: f64,
    pub outcomes: Vec<BitValue>,
}

impl ClickRecord {
    pub fn trials(&self) -> usize {
        self.outcomes.len()
    }

    pub fn count(&self, bit: BitValue) -> usize {
        self.outcomes.iter().filter(|&&b| b == bit).count()
    }

    pub fn frequency(&self, bit: BitValue) -> f64 {
        self.count(bit) as f64 / self.trials() as f64
    }

    /// Binomial standard deviation of the +1 frequency.
    pub fn sigma(&self) -> f64 {
        (self.p_plus * (1.0 - self.p_plus) / self.trials() as f64).sqrt()
    }
}

/// Samples `trials` detector outcomes for `state` on Bob's 2^N space.
/// Uses ChaCha8 seeded with `seed`, so the sequence is reproducible.
pub fn simulate_clicks(
    state: &ComplexMatrix,
    axis: BasisAxis,
    n: PhotonNumber,
    trials: usize,
    seed: u64,
) -> Result<ClickRecord> {
    check_density_operator(state, n.bob_dim())?;
    if trials == 0 {
        return Err(Error::DomainError {
            what: "trials",
            value: 0.0,
            domain: ">= 1",
        });
    }
    let p_plus = threshold_povm(axis, BitValue::Plus, n)
        .trace_product(state)
        .re
        .clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..trials)
        .map(|_| {
            if rng.gen::<f64>() < p_plus {
                BitValue::Plus
            } else {
                BitValue::Minus
            }
        })
        .collect();
    Ok(ClickRecord { p_plus, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;
    use crate::symmetry::GroupElement;

    fn pn(n: usize) -> PhotonNumber {
        PhotonNumber::new(n).unwrap()
    }

    #[test]
    fn basis_conventions() {
        assert_eq!(basis_ket(BasisAxis::Z, BitValue::Plus), Ket::from_real(&[1.0, 0.0]));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xm = basis_ket(BasisAxis::X, BitValue::Minus);
        assert!(xm.sub(&Ket::from_real(&[s, -s])).norm() < 1e-15);
        for axis in BasisAxis::ALL {
            for bit in BitValue::ALL {
                let v = basis_ket(axis, bit);
                assert!(v.is_normalized());
                let sv = axis.pauli().apply(&v);
                assert!(sv.sub(&v.scale(re(bit.sign()))).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn mutually_unbiased() {
        let yp = basis_ket(BasisAxis::Y, BitValue::Plus);
        let ym = basis_ket(BasisAxis::Y, BitValue::Minus);
        assert!(yp.inner(&ym).norm() < 1e-15);
        for b in BitValue::ALL {
            for b2 in BitValue::ALL {
                let o = basis_ket(BasisAxis::Y, b).fidelity(&basis_ket(BasisAxis::Z, b2));
                assert!((o - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn singlet_anticorrelated_and_invariant() {
        let s = singlet();
        assert!(s.is_normalized());
        for axis in BasisAxis::ALL {
            for bit in BitValue::ALL {
                let p = basis_projector(axis, bit);
                assert!(kron(&p, &p).expectation(&s).norm() < 1e-15);
            }
        }
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = crate::linalg::random::unitary(2, &mut rng);
            let rotated = kron(&g, &g).apply(&s);
            assert!(rotated.fidelity(&s) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn symmetric_split_small_cases() {
        let one = symmetric_split(pn(1));
        assert!(one.pi_h.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(one.pi_hperp.max_abs() < 1e-15);

        let two = symmetric_split(pn(2));
        let singlet_proj = singlet().projector();
        assert!(two.pi_hperp.max_abs_diff(&singlet_proj) < 1e-12);

        for n in 1..=N_MAX {
            let split = symmetric_split(pn(n));
            let id = ComplexMatrix::identity(1 << n);
            assert!((&split.pi_h + &split.pi_hperp).max_abs_diff(&id) < 1e-12);
            assert!((&split.pi_h * &split.pi_h).max_abs_diff(&split.pi_h) < 1e-12);
            assert!((&split.pi_hperp * &split.pi_hperp).max_abs_diff(&split.pi_hperp) < 1e-12);
            assert!((split.pi_h.trace().re - (n + 1) as f64).abs() < 1e-12);
            assert!(
                (split.pi_hperp.trace().re - ((1 << n) - n - 1) as f64).abs() < 1e-12
            );
            for axis in BasisAxis::ALL {
                for bit in BitValue::ALL {
                    let v = (1..n).fold(basis_ket(axis, bit), |acc, _| acc.kron(&basis_ket(axis, bit)));
                    assert!(split.pi_h.apply(&v).sub(&v).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn three_photon_symmetric_rank() {
        let split = symmetric_split(pn(3));
        let eig = hermitian_eigensystem(&split.pi_h).unwrap();
        assert_eq!(eig.rank(0.5), 4);
        let eig = hermitian_eigensystem(&split.pi_hperp).unwrap();
        assert_eq!(eig.rank(0.5), 4);
        assert_eq!(split.dicke_with_m(1.5), &dicke_state(3, 0));
        assert_eq!(split.dicke_with_m(-0.5), &dicke_state(3, 2));
    }

    #[test]
    fn bad_photon_numbers() {
        assert!(matches!(PhotonNumber::new(0), Err(Error::BadPhotonNumber { .. })));
        assert!(matches!(PhotonNumber::new(N_MAX + 1), Err(Error::BadPhotonNumber { .. })));
        assert!(PhotonNumber::with_limit(N_MAX + 1, N_MAX + 1).is_ok());
        assert!(PhotonNumber::with_limit(40, 40).is_err());
    }

    #[test]
    fn single_photon_povm_is_projector() {
        for axis in BasisAxis::ALL {
            for bit in BitValue::ALL {
                let m = threshold_povm(axis, bit, pn(1));
                assert!(m.max_abs_diff(&basis_projector(axis, bit)) < 1e-15);
            }
        }
    }

    #[test]
    fn three_photon_z_povm_spectrum() {
        // eigenvalues on H: {1, 1/2, 1/2, 0}; on H⊥: 1/2 (x4)
        let n = pn(3);
        let split = symmetric_split(n);
        let m = threshold_povm(BasisAxis::Z, BitValue::Plus, n);
        let on_h = hermitian_eigensystem(&m.compress(&split.isometry())).unwrap();
        let want = [0.0, 0.5, 0.5, 1.0];
        for (got, w) in on_h.eigenvalues.iter().zip(want) {
            assert!((got - w).abs() < 1e-12);
        }
        let perp = &(&split.pi_hperp * &m) * &split.pi_hperp;
        assert!(perp.max_abs_diff(&split.pi_hperp.scale_real(0.5)) < 1e-12);
        let full = hermitian_eigensystem(&m).unwrap();
        let halves = full.eigenvalues.iter().filter(|l| (*l - 0.5).abs() < 1e-12).count();
        assert_eq!(halves, 6);
    }

    #[test]
    fn completeness_positivity_and_double_click_block() {
        for n in 1..=5 {
            let n = pn(n);
            let split = symmetric_split(n);
            let id = ComplexMatrix::identity(n.bob_dim());
            for axis in BasisAxis::ALL {
                let plus = threshold_povm(axis, BitValue::Plus, n);
                let minus = threshold_povm(axis, BitValue::Minus, n);
                assert!((&plus + &minus).max_abs_diff(&id) < 1e-12);
                let t = sign_observable(axis, n);
                assert!((&plus - &minus).max_abs_diff(&t) < 1e-12);
                for m in [&plus, &minus] {
                    assert!(m.is_hermitian(1e-12));
                    let eig = hermitian_eigensystem(m).unwrap();
                    assert!(eig.min() >= -1e-12 && eig.max() <= 1.0 + 1e-12);
                    if n.get() >= 2 {
                        let blk = &(&split.pi_hperp * m) * &split.pi_hperp;
                        assert!(blk.max_abs_diff(&split.pi_hperp.scale_real(0.5)) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn basis_covariance_under_x_rotation() {
        let rx = GroupElement::generator(BasisAxis::X);
        for n in 1..=3 {
            let n = pn(n);
            let g = rx.tensor_power(n.get());
            for bit in BitValue::ALL {
                let rotated = threshold_povm(BasisAxis::Z, bit, n).conjugate_by(&g);
                let matched = BitValue::ALL
                    .iter()
                    .any(|&b2| rotated.max_abs_diff(&threshold_povm(BasisAxis::Y, b2, n)) < 1e-12);
                assert!(matched, "no Y-basis element matches rotated Z element");
            }
        }
    }

    #[test]
    fn error_povm_properties() {
        let s = singlet();
        for axis in BasisAxis::ALL {
            assert!(error_povm(axis, pn(1)).expectation(&s).norm() < 1e-15);
        }
        for n in 1..=4 {
            let n = pn(n);
            let dim = 2 * n.bob_dim();
            for axis in BasisAxis::ALL {
                let g = error_povm(axis, n);
                assert!(g.is_hermitian(1e-12));
                assert!((g.trace().re / dim as f64 - 0.5).abs() < 1e-12);
                let eig = hermitian_eigensystem(&g).unwrap();
                assert!(eig.min() >= -1e-12 && eig.max() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn averaged_error_minima() {
        let g1 = avg_error_povm(pn(1));
        let eig = hermitian_eigensystem(&g1).unwrap();
        assert!(eig.min().abs() < 1e-12);
        assert!(eig.eigenvectors[0].fidelity(&singlet()) > 1.0 - 1e-12);
        let m2 = min_eigenvalue(&avg_error_povm(pn(2))).unwrap();
        assert!(m2 > 0.0);
        // brute-force eigensolve oracle: 1/6
        assert!((m2 - 1.0 / 6.0).abs() < 1e-10);
        let m3 = min_eigenvalue(&avg_error_povm(pn(3))).unwrap();
        assert!((m3 - 0.25).abs() < 1e-9);
    }

    #[test]
    fn deterministic_click_for_eigenstate() {
        let state = basis_projector(BasisAxis::Z, BitValue::Plus);
        let rec = simulate_clicks(&state, BasisAxis::Z, pn(1), 1000, 5).unwrap();
        assert_eq!(rec.frequency(BitValue::Plus), 1.0);
    }

    #[test]
    fn maximally_mixed_click_statistics() {
        let state = ComplexMatrix::identity(8).scale_real(1.0 / 8.0);
        for axis in BasisAxis::ALL {
            let rec = simulate_clicks(&state, axis, pn(3), 100_000, 20240601).unwrap();
            assert!((rec.p_plus - 0.5).abs() < 1e-12);
            assert!((rec.frequency(BitValue::Plus) - 0.5).abs() <= 4.0 * rec.sigma());
        }
    }

    #[test]
    fn click_sampling_is_seeded() {
        let state = ComplexMatrix::identity(4).scale_real(0.25);
        let a = simulate_clicks(&state, BasisAxis::X, pn(2), 500, 99).unwrap();
        let b = simulate_clicks(&state, BasisAxis::X, pn(2), 500, 99).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        let c = simulate_clicks(&state, BasisAxis::X, pn(2), 500, 100).unwrap();
        assert_ne!(a.outcomes, c.outcomes);
    }

    #[test]
    fn rejects_non_density_input() {
        let bad = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            simulate_clicks(&bad, BasisAxis::Z, pn(1), 10, 0),
            Err(Error::NotDensityOperator(_))
        ));
        let unnormalized = ComplexMatrix::identity(2);
        assert!(simulate_clicks(&unnormalized, BasisAxis::Z, pn(1), 10, 0).is_err());
        let wrong_dim = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(simulate_clicks(&wrong_dim, BasisAxis::Z, pn(1), 10, 0).is_err());
    }
}
