//! Heisenberg-picture BB84 squash for three photons, with a fictitious Ỹ
//! observable.
//!
//! The unital map F sends qubit observables to operators on Bob's 8-dim
//! 3-photon space: F(1) = 1, F(σ_x) = T_x, F(σ_z) = T_z, and F(σ_y) = Y
//! where Y is what we construct. F is completely positive iff its Choi
//! matrix C = Σ_ij |i⟩⟨j| ⊗ F(|i⟩⟨j|) is PSD, i.e.
//!
//! ```text
//!     C = ½ [ 1 + T_z      T_x + iY ]
//!           [ T_x − iY     1 − T_z  ]
//! ```
//!
//! Y must also satisfy Tr[(σ_y⊗Y) P_i] = (1, −1, 0) on the three symmetry
//! blocks, which fixes the Ỹ error rate as a linear form in the block
//! coefficients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

use crate::linalg::{
    c, hermitian_eigensystem, kron, project_psd, random, ComplexMatrix, Ket, TOL_PSD,
};
use crate::states::{dicke_state, sign_observable, BasisAxis, PhotonNumber};
use crate::symmetry::{build_projectors, ProjectorSet};

/// Tr[(σ_y ⊗ Y) P_i] for i = 0, 1, 2.
pub const TRACE_TARGETS: [f64; 3] = [1.0, -1.0, 0.0];

pub const BOB_DIM: usize = 8;
const MAX_ITERATIONS: usize = 100_000;
const STEP_TOLERANCE: f64 = 1e-12;
/// Residual beyond which a stalled fallback is reported infeasible.
const STALL_RESIDUAL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SquashMethod {
    Ansatz,
    Dykstra { iterations: usize },
}

#[derive(Clone, Debug)]
pub struct SquashResult {
    /// F(σ_y), Hermitian on the 3-photon space.
    pub y_op: ComplexMatrix,
    /// 16×16 Choi matrix of F.
    pub choi: ComplexMatrix,
    pub choi_min_eig: f64,
    /// Largest violation of the three trace targets.
    pub constraint_residual: f64,
    /// λ solved from the P0 target under the ansatz Y = λ T_y.
    pub lambda_ansatz: Option<f64>,
    /// Residual of the ansatz on the remaining targets (it is rejected
    /// when this exceeds 1e-9).
    pub ansatz_residual: Option<f64>,
    /// Kraus operators K_k (2×8) with F(X) = Σ_k K_k† X K_k.
    pub kraus: Option<Vec<ComplexMatrix>>,
    pub method: SquashMethod,
}

impl SquashResult {
    /// F(X) for a 2×2 operator X, read off the Choi matrix:
    /// F(X) = Σ_ij X_ij C_ij where C_ij is the (i, j) 8×8 block.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((x.rows(), x.cols()), (2, 2));
        let mut out = ComplexMatrix::zeros(BOB_DIM, BOB_DIM);
        for i in 0..2 {
            for j in 0..2 {
                let blk = self.choi.block(i * BOB_DIM, j * BOB_DIM, BOB_DIM, BOB_DIM);
                out += &blk.scale(x[(i, j)]);
            }
        }
        out
    }

    /// F(X) via the Kraus operators, when available.
    pub fn apply_kraus(&self, x: &ComplexMatrix) -> Option<ComplexMatrix> {
        self.kraus.as_ref().map(|ks| {
            ks.iter().fold(ComplexMatrix::zeros(BOB_DIM, BOB_DIM), |mut acc, k| {
                acc += &x.compress(k);
                acc
            })
        })
    }

    pub fn is_valid(&self) -> bool {
        self.choi_min_eig >= -TOL_PSD && self.constraint_residual <= 1e-9
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SquashOptions {
    /// Perturbs the Dykstra starting point with a seeded random Hermitian
    /// Y block; `None` starts exactly at the ansatz.
    pub seed: Option<u64>,
}

/// Vectors (a, b) with C·(|0⟩⊗a + |1⟩⊗b) = 0 for every feasible Choi
/// matrix, written in the Dicke basis D_k (k spins down).
///
/// (0, D_0) and (D_3, 0) span the kernels of the diagonal blocks 1 ∓ T_z.
/// Once those are imposed, the trace targets pin v†Cv = 0 for
/// (D_0 + √3 D_2, −√3 D_1 − D_3) and (D_1, −D_2) as well. Locking them into
/// the affine set leaves a face with nonempty relative interior, where
/// alternating projections converge linearly.
pub fn forced_kernel() -> Vec<(Ket, Ket)> {
    let d: Vec<Ket> = (0..4).map(|k| dicke_state(3, k)).collect();
    let zero = Ket::new(vec![c(0.0, 0.0); BOB_DIM]);
    let r3 = 3f64.sqrt();
    vec![
        (zero.clone(), d[0].clone()),
        (d[3].clone(), zero),
        (
            d[0].add(&d[2].scale(c(r3, 0.0))),
            d[1].scale(c(-r3, 0.0)).sub(&d[3]),
        ),
        (d[1].clone(), d[2].scale(c(-1.0, 0.0))),
    ]
}

/// Orthonormal Frobenius basis of 8×8 Hermitian matrices.
fn hermitian_basis() -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(BOB_DIM * BOB_DIM);
    for j in 0..BOB_DIM {
        for k in 0..BOB_DIM {
            let mut e = ComplexMatrix::zeros(BOB_DIM, BOB_DIM);
            match j.cmp(&k) {
                std::cmp::Ordering::Equal => e[(j, j)] = c(1.0, 0.0),
                std::cmp::Ordering::Less => {
                    e[(j, k)] = c(h, 0.0);
                    e[(k, j)] = c(h, 0.0);
                }
                std::cmp::Ordering::Greater => {
                    e[(j, k)] = c(0.0, h);
                    e[(k, j)] = c(0.0, -h);
                }
            }
            out.push(e);
        }
    }
    out
}

/// Real-linear equations A·coords(Y) = rhs on Hermitian Y, with the
/// pseudo-inverse cached for Frobenius projection.
struct HermitianAffine {
    basis: Vec<ComplexMatrix>,
    a: DMatrix<f64>,
    rhs: DVector<f64>,
    pinv: DMatrix<f64>,
}

impl HermitianAffine {
    fn coords(&self, y: &ComplexMatrix) -> DVector<f64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|e| frob(e, y)))
    }

    fn matrix_at(&self, v: &DVector<f64>) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(BOB_DIM, BOB_DIM);
        for (e, x) in self.basis.iter().zip(v.iter()) {
            out += &e.scale_real(*x);
        }
        out
    }

    fn new(basis: Vec<ComplexMatrix>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let a = DMatrix::from_fn(rows.len(), basis.len(), |i, j| rows[i][j]);
        let rhs = DVector::from_vec(rhs);
        let pinv = a
            .clone()
            .pseudo_inverse(1e-10)
            .map_err(|e| Error::InfeasibleR(format!("constraint pseudo-inverse: {e}")))?;
        let out = Self { basis, a, rhs, pinv };
        // consistency: the least-squares point must solve the system
        let x0 = &out.pinv * &out.rhs;
        let gap = (&out.a * &x0 - &out.rhs).amax();
        if gap > 1e-9 {
            return Err(Error::Infeasible {
                choi_min_eig: f64::NAN,
                constraint_residual: gap,
                iterations: 0,
            });
        }
        Ok(out)
    }

    fn project(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let v = self.coords(&y.hermitian_part());
        let excess = &self.a * &v - &self.rhs;
        self.matrix_at(&(v - &self.pinv * excess))
    }
}

/// Fixed pieces of the feasibility problem.
struct Problem {
    tx: ComplexMatrix,
    ty: ComplexMatrix,
    tz: ComplexMatrix,
    /// Trace targets plus the forced-kernel equations.
    affine: HermitianAffine,
    /// K_i = Tr_A[(σ_y⊗1) P_i].
    constraint_ops: Vec<ComplexMatrix>,
}

impl Problem {
    fn new(p: &ProjectorSet) -> Result<Self> {
        let n3 = PhotonNumber::new(3)?;
        let tx = sign_observable(BasisAxis::X, n3);
        let ty = sign_observable(BasisAxis::Y, n3);
        let tz = sign_observable(BasisAxis::Z, n3);
        let sy1 = kron(&BasisAxis::Y.pauli(), &ComplexMatrix::identity(BOB_DIM));
        let constraint_ops: Vec<ComplexMatrix> = [&p.p0, &p.p1, &p.p2]
            .iter()
            .map(|pi| (&sy1 * *pi).partial_trace_first(2).hermitian_part())
            .collect();

        let basis = hermitian_basis();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        // Tr[K Y] = ⟨K, Y⟩ for Hermitian K
        for (k, &t) in constraint_ops.iter().zip(&TRACE_TARGETS) {
            rows.push(basis.iter().map(|e| frob(e, k)).collect());
            rhs.push(t);
        }
        // C v = 0 for v = (a, b):  Y b = i((1 + T_z) a + T_x b),
        //                          Y a = −i(T_x a + (1 − T_z) b)
        let id = ComplexMatrix::identity(BOB_DIM);
        let plus = &id + &tz;
        let minus = &id - &tz;
        for (a, b) in forced_kernel() {
            let target_b = plus.apply(&a).add(&tx.apply(&b)).scale(c(0.0, 1.0));
            let target_a = tx.apply(&a).add(&minus.apply(&b)).scale(c(0.0, -1.0));
            for (vec, target) in [(&b, target_b), (&a, target_a)] {
                let images: Vec<Ket> = basis.iter().map(|e| e.apply(vec)).collect();
                for j in 0..BOB_DIM {
                    rows.push(images.iter().map(|im| im.amplitudes()[j].re).collect());
                    rhs.push(target.amplitudes()[j].re);
                    rows.push(images.iter().map(|im| im.amplitudes()[j].im).collect());
                    rhs.push(target.amplitudes()[j].im);
                }
            }
        }
        Ok(Self {
            tx,
            ty,
            tz,
            affine: HermitianAffine::new(basis, rows, rhs)?,
            constraint_ops,
        })
    }

    fn choi(&self, y: &ComplexMatrix) -> ComplexMatrix {
        choi_from_y(&self.tx, &self.tz, y)
    }

    fn trace_values(&self, y: &ComplexMatrix) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, k) in out.iter_mut().zip(&self.constraint_ops) {
            *o = k.trace_product(y).re;
        }
        out
    }

    fn residual(&self, y: &ComplexMatrix) -> f64 {
        self.trace_values(y)
            .iter()
            .zip(TRACE_TARGETS)
            .map(|(v, t)| (v - t).abs())
            .fold(0.0, f64::max)
    }

    /// Nearest 16×16 matrix with the fixed Choi structure; returns the
    /// projected Choi matrix and its Y. Off-diagonal blocks carry ±iY/2, so
    /// Frobenius distance in Choi space is proportional to that in Y.
    fn project_affine(&self, m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let upper = m.block(0, BOB_DIM, BOB_DIM, BOB_DIM);
        let lower = m.block(BOB_DIM, 0, BOB_DIM, BOB_DIM);
        let x = (&upper + &lower.dagger()).scale_real(0.5);
        // 2X − T_x ≈ iY: keep the anti-Hermitian part
        let w = &x.scale_real(2.0) - &self.tx;
        let y = (&w - &w.dagger()).scale(c(0.0, -0.5));
        let y = self.affine.project(&y);
        (self.choi(&y), y)
    }
}

fn frob(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.dagger().trace_product(b).re
}

/// Choi matrix of the unital map with F(σ_x) = T_x, F(σ_z) = T_z, F(σ_y) = Y.
pub fn choi_from_y(tx: &ComplexMatrix, tz: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(BOB_DIM);
    let iy = y.scale(c(0.0, 1.0));
    let mut m = ComplexMatrix::zeros(2 * BOB_DIM, 2 * BOB_DIM);
    m.set_block(0, 0, &(&id + tz).scale_real(0.5));
    m.set_block(BOB_DIM, BOB_DIM, &(&id - tz).scale_real(0.5));
    m.set_block(0, BOB_DIM, &(tx + &iy).scale_real(0.5));
    m.set_block(BOB_DIM, 0, &(tx - &iy).scale_real(0.5));
    m
}

/// Kraus operators from a PSD Choi matrix: each eigenpair (μ, w) gives
/// K with row i equal to (√μ · w_i)†, w_i the i-th 8-dim block of w.
pub fn kraus_from_choi(choi: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let eig = hermitian_eigensystem(choi)?;
    let mut out = Vec::new();
    for (mu, w) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *mu <= 1e-12 {
            continue;
        }
        let s = mu.sqrt();
        let amps = w.amplitudes();
        let k = ComplexMatrix::from_fn(2, BOB_DIM, |i, j| (amps[i * BOB_DIM + j] * s).conj());
        out.push(k);
    }
    Ok(out)
}

pub fn construct_squash_y() -> Result<SquashResult> {
    construct_squash_y_with(&SquashOptions::default())
}

pub fn construct_squash_y_with(opts: &SquashOptions) -> Result<SquashResult> {
    construct_squash_y_from(&build_projectors(), opts)
}

pub fn construct_squash_y_from(p: &ProjectorSet, opts: &SquashOptions) -> Result<SquashResult> {
    let prob = Problem::new(p)?;

    // Step 1: Y = λ T_y, λ from the P0 target.
    let c0 = prob.trace_values(&prob.ty)[0];
    let lambda = TRACE_TARGETS[0] / c0;
    let y_ansatz = prob.ty.scale_real(lambda);
    let ansatz_residual = prob.residual(&y_ansatz);
    let ansatz_choi = prob.choi(&y_ansatz);
    if ansatz_residual <= 1e-9 {
        let min_eig = hermitian_eigensystem(&ansatz_choi)?.min();
        if min_eig >= -TOL_PSD {
            return finish(&prob, y_ansatz, Some(lambda), Some(ansatz_residual), SquashMethod::Ansatz);
        }
    }

    // Step 2: Dykstra between the affine Choi structure and the PSD cone.
    let mut x = ansatz_choi;
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = random::hermitian(BOB_DIM, &mut rng).scale_real(0.1);
        x = prob.choi(&(&y_ansatz + &noise));
    }
    let dim = 2 * BOB_DIM;
    let mut p_inc = ComplexMatrix::zeros(dim, dim);
    let mut q_inc = ComplexMatrix::zeros(dim, dim);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (y_aff, _) = prob.project_affine(&(&x + &p_inc));
        p_inc = &(&x + &p_inc) - &y_aff;
        let next = project_psd(&(&y_aff + &q_inc))?;
        q_inc = &(&y_aff + &q_inc) - &next;
        let step = next.max_abs_diff(&x);
        x = next;
        if step < STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    let (_, y) = prob.project_affine(&x);
    let result = finish(
        &prob,
        y,
        Some(lambda),
        Some(ansatz_residual),
        SquashMethod::Dykstra { iterations },
    )?;
    if !result.is_valid() {
        let gap = (-result.choi_min_eig).max(result.constraint_residual);
        if !converged || gap > STALL_RESIDUAL || result.choi_min_eig < -TOL_PSD {
            return Err(Error::Infeasible {
                choi_min_eig: result.choi_min_eig,
                constraint_residual: result.constraint_residual,
                iterations,
            });
        }
    }
    Ok(result)
}

fn finish(
    prob: &Problem,
    y: ComplexMatrix,
    lambda: Option<f64>,
    ansatz_residual: Option<f64>,
    method: SquashMethod,
) -> Result<SquashResult> {
    let y = y.hermitian_part();
    let choi = prob.choi(&y);
    let choi_min_eig = hermitian_eigensystem(&choi)?.min();
    let constraint_residual = prob.residual(&y);
    let kraus = if choi_min_eig >= -TOL_PSD {
        Some(kraus_from_choi(&project_psd(&choi)?)?)
    } else {
        None
    };
    Ok(SquashResult {
        y_op: y,
        choi,
        choi_min_eig,
        constraint_residual,
        lambda_ansatz: lambda,
        ansatz_residual,
        kraus,
        method,
    })
}

/// Γ̃_y = (1⊗1 + σ_y⊗Y)/2, the Ỹ error observable on Alice ⊗ 3 photons.
pub fn ytilde_error_povm(sq: &SquashResult) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2 * BOB_DIM);
    (&id + &kron(&BasisAxis::Y.pauli(), &sq.y_op)).scale_real(0.5)
}

/// J_y|_H − T_y: a closed-form feasible Y (eigenvalues ±1/2 on H, zero on
/// H⊥). Used as a reference point by tests and the verify suite.
pub fn reference_y() -> ComplexMatrix {
    let n3 = PhotonNumber::new(3).expect("3 photons");
    let split = crate::states::symmetric_split(n3);
    let jy = crate::states::collective_spin(BasisAxis::Y, n3);
    let jy_h = &(&split.pi_h * &jy) * &split.pi_h;
    &jy_h - &sign_observable(BasisAxis::Y, n3)
}

/// Residual of Y against the trace targets.
pub fn trace_residual(p: &ProjectorSet, y: &ComplexMatrix) -> Result<f64> {
    Ok(Problem::new(p)?.residual(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;
    use crate::states::{basis_projector, threshold_povm, BitValue};

    #[test]
    fn ansatz_is_rejected_and_fallback_converges() {
        let sq = construct_squash_y().unwrap();
        assert!(matches!(sq.method, SquashMethod::Dykstra { .. }));
        // Tr[(σ_y⊗T_y)P0] = 1/2, so λ = 2; the other targets then miss
        assert!((sq.lambda_ansatz.unwrap() - 2.0).abs() < 1e-12);
        assert!(sq.ansatz_residual.unwrap() > 1.0);
        assert!(sq.choi_min_eig >= -1e-9, "{}", sq.choi_min_eig);
        assert!(sq.constraint_residual <= 1e-9);
        assert!(sq.is_valid());
    }

    #[test]
    fn unital_and_reproduces_bb84_povm() {
        let sq = construct_squash_y().unwrap();
        let id8 = ComplexMatrix::identity(8);
        assert!(sq.apply(&ComplexMatrix::identity(2)).max_abs_diff(&id8) < 1e-15);
        let n3 = PhotonNumber::new(3).unwrap();
        for axis in [BasisAxis::X, BasisAxis::Z] {
            for bit in BitValue::ALL {
                let got = sq.apply(&basis_projector(axis, bit));
                assert!(got.max_abs_diff(&threshold_povm(axis, bit, n3)) < 1e-9);
            }
        }
        assert!(sq.apply(&BasisAxis::Y.pauli()).max_abs_diff(&sq.y_op) < 1e-12);
    }

    #[test]
    fn kraus_operators_reproduce_the_map() {
        let sq = construct_squash_y().unwrap();
        let ks = sq.kraus.as_ref().expect("PSD Choi yields Kraus operators");
        assert!(!ks.is_empty());
        let mut sum = ComplexMatrix::zeros(8, 8);
        for k in ks {
            sum += &(&k.dagger() * k);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-9);
        for axis in BasisAxis::ALL {
            let x = axis.pauli();
            let via_kraus = sq.apply_kraus(&x).unwrap();
            assert!(via_kraus.max_abs_diff(&sq.apply(&x)) < 1e-9);
        }
    }

    #[test]
    fn seeded_start_also_converges() {
        for seed in [1, 20240601] {
            let sq = construct_squash_y_with(&SquashOptions { seed: Some(seed) }).unwrap();
            assert!(sq.is_valid(), "seed {seed}: {} {}", sq.choi_min_eig, sq.constraint_residual);
        }
    }

    #[test]
    fn seeded_starts_reach_distinct_feasible_points() {
        let a = construct_squash_y_with(&SquashOptions { seed: Some(1) }).unwrap();
        let b = construct_squash_y_with(&SquashOptions { seed: Some(2) }).unwrap();
        assert!(a.y_op.max_abs_diff(&b.y_op) > 1e-3);
        let again = construct_squash_y_with(&SquashOptions { seed: Some(1) }).unwrap();
        assert_eq!(a.y_op, again.y_op);
    }

    #[test]
    fn forced_kernel_annihilates_feasible_choi() {
        let n3 = PhotonNumber::new(3).unwrap();
        let tx = sign_observable(BasisAxis::X, n3);
        let tz = sign_observable(BasisAxis::Z, n3);
        let sq = construct_squash_y().unwrap();
        for y in [reference_y(), sq.y_op.clone()] {
            let ch = choi_from_y(&tx, &tz, &y);
            for (a, b) in forced_kernel() {
                let v = Ket::basis(2, 0).kron(&a).add(&Ket::basis(2, 1).kron(&b));
                assert!(ch.apply(&v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn second_level_kernel_is_implied_by_targets() {
        // v†C(Y)v = const + Tr[G Y] with G = Herm(i b a†); G must lie in the
        // span of the trace constraints and the first-level lock functionals.
        let p = build_projectors();
        let prob = Problem::new(&p).unwrap();
        let basis = hermitian_basis();
        let first_level = 2 * 2 * 2 * BOB_DIM;
        let rows = &prob.affine.a.rows(0, 3 + first_level).clone_owned();
        let proj = rows.clone().pseudo_inverse(1e-10).unwrap() * rows;
        for (a, b) in forced_kernel().into_iter().skip(2) {
            let g = b.outer(&a).scale(c(0.0, 1.0)).hermitian_part();
            let gv = DVector::from_iterator(basis.len(), basis.iter().map(|e| frob(e, &g)));
            let off = (&gv - &proj.transpose() * &gv).amax();
            assert!(off < 1e-10, "{off}");
        }
    }

    #[test]
    fn reference_point_is_feasible() {
        let p = build_projectors();
        let y = reference_y();
        assert!(trace_residual(&p, &y).unwrap() < 1e-12);
        let n3 = PhotonNumber::new(3).unwrap();
        let tx = sign_observable(BasisAxis::X, n3);
        let tz = sign_observable(BasisAxis::Z, n3);
        assert!(min_eigenvalue(&choi_from_y(&tx, &tz, &y)).unwrap() > -1e-12);
        let eig = hermitian_eigensystem(&y).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip([-0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ytilde_observable() {
        let sq = construct_squash_y().unwrap();
        let g = ytilde_error_povm(&sq);
        assert!(g.is_hermitian(1e-12));
        assert!((g.trace().re / 16.0 - 0.5).abs() < 1e-12);
        let eig = hermitian_eigensystem(&g).unwrap();
        assert!(eig.min() >= -1e-9 && eig.max() <= 1.0 + 1e-9);

        // P(Y+)⊗F(P(Y+)) + P(Y−)⊗F(P(Y−)) expands to the same operator
        let mut expanded = ComplexMatrix::zeros(16, 16);
        for bit in BitValue::ALL {
            let py = basis_projector(BasisAxis::Y, bit);
            expanded += &kron(&py, &sq.apply(&py));
        }
        assert!(expanded.max_abs_diff(&g) < 1e-12);

        let p = build_projectors();
        for (blk, want) in [&p.p0, &p.p1, &p.p2].iter().zip([2.0, 1.0, 1.0]) {
            assert!((g.trace_product(blk).re - want).abs() < 1e-9);
        }
    }
}
