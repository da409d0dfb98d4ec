//! Octahedral symmetrization of 3-photon Alice⊗Bob states.
//!
//! The 16-dim space is Alice's qubit ⊗ Bob's three qubits. On qubit⊗H the
//! group generated by the π/2 rotations splits the space into three
//! inequivalent irreducible blocks (ranks 3, 3, 2); qubit⊗H⊥ is Haar-twirled
//! to a multiple of its identity. Any symmetrized state is therefore
//! r0 P0 + r1 P1 + r2 P2 + r3 Q.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, kron_power, re, span_projector, ComplexMatrix, Ket, C64};
use crate::rate::ErrorPoint;
use crate::squash::{ytilde_error_povm, SquashResult};
use crate::states::{error_povm, symmetric_split, BasisAxis, PhotonNumber};

pub const GROUP_ORDER: usize = 24;
const CLOSURE_LIMIT: usize = 48;

/// Dimension of Alice's qubit ⊗ three photons.
pub const PAIR_DIM: usize = 16;

/// A 2×2 unitary with canonical global phase: the first entry of modulus
/// above 1e-9 is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    u: ComplexMatrix,
}

impl GroupElement {
    pub fn new(u: ComplexMatrix) -> Self {
        assert_eq!((u.rows(), u.cols()), (2, 2));
        let pivot = u
            .entries()
            .iter()
            .copied()
            .find(|z| z.norm() > 1e-9)
            .expect("unitary has a nonzero entry");
        let phase = pivot / pivot.norm();
        Self {
            u: u.scale(phase.conj()),
        }
    }

    pub fn identity() -> Self {
        Self::new(ComplexMatrix::identity(2))
    }

    /// exp(−iπσ_α/4) = (1 − iσ_α)/√2.
    pub fn generator(axis: BasisAxis) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = &ComplexMatrix::identity(2) - &axis.pauli().scale(c(0.0, 1.0));
        Self::new(m.scale_real(s))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(&self.u * &other.u)
    }

    /// g^{⊗n}.
    pub fn tensor_power(&self, n: usize) -> ComplexMatrix {
        kron_power(&self.u, n)
    }

    pub fn unitarity_defect(&self) -> f64 {
        (&self.u * &self.u.dagger()).max_abs_diff(&ComplexMatrix::identity(2))
    }

    fn key(&self) -> [i64; 8] {
        let mut k = [0i64; 8];
        for (i, z) in self.u.entries().iter().enumerate() {
            k[2 * i] = (z.re * 1e9).round() as i64;
            k[2 * i + 1] = (z.im * 1e9).round() as i64;
        }
        k
    }

    /// Equality modulo global phase.
    pub fn same_class(&self, other: &GroupElement) -> bool {
        self.key() == other.key()
    }
}

#[derive(Clone, Debug)]
pub struct GroupSet {
    pub elements: Vec<GroupElement>,
}

impl GroupSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.iter().any(|e| e.same_class(g))
    }
}

/// Closure of the three π/2 rotations modulo phase, sorted by rounded entries.
pub fn enumerate_group() -> Result<GroupSet> {
    let gens: Vec<GroupElement> = BasisAxis::ALL.iter().map(|&a| GroupElement::generator(a)).collect();
    let mut elements = vec![GroupElement::identity()];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for h in &gens {
                let cand = h.compose(g);
                if !elements.iter().any(|e| e.same_class(&cand)) {
                    elements.push(cand.clone());
                    next.push(cand);
                    if elements.len() > CLOSURE_LIMIT {
                        return Err(Error::ClosureOverflow {
                            limit: CLOSURE_LIMIT,
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    elements.sort_by_key(|e| e.key());
    Ok(GroupSet { elements })
}

/// The three irreducible blocks on qubit⊗H and Q = 1⊗π_H⊥.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    pub p0: ComplexMatrix,
    pub p1: ComplexMatrix,
    pub p2: ComplexMatrix,
    pub q: ComplexMatrix,
}

impl ProjectorSet {
    pub const RANKS: [usize; 4] = [3, 3, 2, 8];

    pub fn blocks(&self) -> [&ComplexMatrix; 4] {
        [&self.p0, &self.p1, &self.p2, &self.q]
    }

    pub fn blocks_mut(&mut self) -> [&mut ComplexMatrix; 4] {
        [&mut self.p0, &mut self.p1, &mut self.p2, &mut self.q]
    }

    /// 1 ⊗ π_H.
    pub fn h_block(&self) -> ComplexMatrix {
        &(&self.p0 + &self.p1) + &self.p2
    }
}

/// |a⟩ ⊗ |3/2, m⟩ with a the Z spin component of Alice's qubit.
fn pair_ket(alice_m: f64, bob_m: f64, dicke: &crate::states::SymmetricSplit) -> Ket {
    let alice = if alice_m > 0.0 {
        Ket::basis(2, 0)
    } else {
        Ket::basis(2, 1)
    };
    alice.kron(dicke.dicke_with_m(bob_m))
}

pub fn build_projectors() -> ProjectorSet {
    let split = symmetric_split(PhotonNumber::new(3).expect("3 photons"));
    let v = |a: f64, m: f64| pair_ket(a, m, &split);
    let r3 = re(3f64.sqrt());
    let one = re(1.0);
    let comb = |x: C64, p: Ket, y: C64, q: Ket| p.scale(x).add(&q.scale(y));

    let span0 = [
        comb(one, v(-0.5, -1.5), -one, v(0.5, 1.5)),
        comb(r3, v(-0.5, -0.5), one, v(0.5, -1.5)),
        comb(r3, v(0.5, 0.5), one, v(-0.5, 1.5)),
    ];
    let span1 = [
        comb(one, v(-0.5, 0.5), -one, v(0.5, -0.5)),
        comb(one, v(-0.5, -0.5), -r3, v(0.5, -1.5)),
        comb(one, v(0.5, 0.5), -r3, v(-0.5, 1.5)),
    ];
    let span2 = [
        comb(one, v(-0.5, 0.5), one, v(0.5, -0.5)),
        comb(one, v(-0.5, -1.5), one, v(0.5, 1.5)),
    ];
    ProjectorSet {
        p0: span_projector(&span0),
        p1: span_projector(&span1),
        p2: span_projector(&span2),
        q: kron(&ComplexMatrix::identity(2), &split.pi_hperp),
    }
}

/// Symmetrization channel with its group action precomputed.
#[derive(Clone, Debug)]
pub struct Symmetrizer {
    pub group: GroupSet,
    pub projectors: ProjectorSet,
    /// g^{⊗4} for every group element.
    actions: Vec<ComplexMatrix>,
    h_block: ComplexMatrix,
}

impl Symmetrizer {
    pub fn new() -> Result<Self> {
        Self::with_projectors(build_projectors())
    }

    pub fn with_projectors(projectors: ProjectorSet) -> Result<Self> {
        let group = enumerate_group()?;
        let actions = group.elements.iter().map(|g| g.tensor_power(4)).collect();
        let split = symmetric_split(PhotonNumber::new(3)?);
        let h_block = kron(&ComplexMatrix::identity(2), &split.pi_h);
        Ok(Self {
            group,
            projectors,
            actions,
            h_block,
        })
    }

    pub fn actions(&self) -> &[ComplexMatrix] {
        &self.actions
    }

    /// (1/|G|) Σ_g g^{⊗4} X g^{⊗4}†.
    pub fn group_average(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(PAIR_DIM, PAIR_DIM);
        for u in &self.actions {
            acc += &x.conjugate_by(u);
        }
        acc.scale_real(1.0 / self.actions.len() as f64)
    }

    /// Group average followed by compression onto qubit⊗H and a Haar twirl
    /// of the qubit⊗H⊥ block: W(ρ) = Π A(ρ) Π + Tr[Qρ]/8 · Q.
    pub fn twirl(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_pair_dim(rho)?;
        let defect = rho.hermiticity_defect();
        if defect > 1e-10 {
            return Err(crate::linalg::LinalgError::NonHermitian { deviation: defect }.into());
        }
        let avg = self.group_average(rho);
        let on_h = &(&self.h_block * &avg) * &self.h_block;
        let q = &self.projectors.q;
        let perp_weight = q.trace_product(rho).re / 8.0;
        Ok(&on_h + &q.scale_real(perp_weight))
    }

    /// Block coefficients r_i = Tr[P_i ρ]/rank_i.
    pub fn block_coefficients(&self, rho: &ComplexMatrix) -> RCoefficients {
        let blocks = self.projectors.blocks();
        let r: Vec<f64> = blocks
            .iter()
            .zip(ProjectorSet::RANKS)
            .map(|(p, rank)| p.trace_product(rho).re / rank as f64)
            .collect();
        RCoefficients {
            r0: r[0],
            r1: r[1],
            r2: r[2],
            r3: r[3],
        }
    }

    /// max |ρ − Σ r_i P_i| with the least-squares coefficients.
    pub fn fit_residual(&self, rho: &ComplexMatrix) -> f64 {
        let r = self.block_coefficients(rho);
        r.to_operator(&self.projectors).max_abs_diff(rho)
    }

    pub fn decompose(&self, rho_sym: &ComplexMatrix) -> Result<RCoefficients> {
        check_pair_dim(rho_sym)?;
        let residual = self.fit_residual(rho_sym);
        if residual > 1e-8 {
            return Err(Error::NotSymmetrized { residual });
        }
        Ok(self.block_coefficients(rho_sym))
    }
}

fn check_pair_dim(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != PAIR_DIM || m.cols() != PAIR_DIM {
        return Err(Error::BadDimension {
            expected: PAIR_DIM,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

pub fn twirl(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    Symmetrizer::new()?.twirl(rho)
}

pub fn decompose(rho_sym: &ComplexMatrix) -> Result<RCoefficients> {
    Symmetrizer::new()?.decompose(rho_sym)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RCoefficients {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl RCoefficients {
    /// Coefficients with r3 fixed by unit trace: 8 r3 = 1 − 3r0 − 3r1 − 2r2.
    pub fn normalized(r0: f64, r1: f64, r2: f64) -> Self {
        Self {
            r0,
            r1,
            r2,
            r3: (1.0 - 3.0 * r0 - 3.0 * r1 - 2.0 * r2) / 8.0,
        }
    }

    /// 3r0 + 3r1 + 2r2 + 8r3.
    pub fn trace(&self) -> f64 {
        3.0 * self.r0 + 3.0 * self.r1 + 2.0 * self.r2 + 8.0 * self.r3
    }

    pub fn to_operator(&self, p: &ProjectorSet) -> ComplexMatrix {
        let mut out = p.p0.scale_real(self.r0);
        out += &p.p1.scale_real(self.r1);
        out += &p.p2.scale_real(self.r2);
        out += &p.q.scale_real(self.r3);
        out
    }

    fn check_feasible(&self) -> Result<()> {
        let tol = 1e-10;
        if self.r0 < -tol || self.r1 < -tol || self.r2 < -tol {
            return Err(Error::InfeasibleR(format!(
                "negative coefficient in ({}, {}, {})",
                self.r0, self.r1, self.r2
            )));
        }
        let load = 3.0 * self.r0 + 3.0 * self.r1 + 2.0 * self.r2;
        if load > 1.0 + tol {
            return Err(Error::InfeasibleR(format!("3r0+3r1+2r2 = {load} > 1")));
        }
        Ok(())
    }
}

/// Affine form c0 r0 + c1 r1 + c2 r2 + constant after eliminating r3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearForm {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub constant: f64,
}

impl LinearForm {
    /// e_b = r0/4 − 3r1/4 + r2/2 + 1/2.
    pub const BIT_ERROR: LinearForm = LinearForm {
        r0: 0.25,
        r1: -0.75,
        r2: 0.5,
        constant: 0.5,
    };
    /// e_ỹ = r0/2 − r1/2 + 1/2.
    pub const YTILDE_ERROR: LinearForm = LinearForm {
        r0: 0.5,
        r1: -0.5,
        r2: 0.0,
        constant: 0.5,
    };

    pub fn eval(&self, r: &RCoefficients) -> f64 {
        self.r0 * r.r0 + self.r1 * r.r1 + self.r2 * r.r2 + self.constant
    }

    /// Eliminates r3 from Σ r_i Tr[O P_i] + r3 Tr[O Q] using unit trace.
    pub fn from_block_traces(t: [f64; 4]) -> Self {
        let per_perp = t[3] / 8.0;
        let [a, b, d] = [0, 1, 2].map(|i| t[i] - ProjectorSet::RANKS[i] as f64 * per_perp);
        LinearForm {
            r0: a,
            r1: b,
            r2: d,
            constant: per_perp,
        }
    }

    pub fn max_deviation(&self, other: &LinearForm) -> f64 {
        [
            self.r0 - other.r0,
            self.r1 - other.r1,
            self.r2 - other.r2,
            self.constant - other.constant,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
    }
}

fn block_traces(op: &ComplexMatrix, p: &ProjectorSet) -> [f64; 4] {
    p.blocks().map(|b| op.trace_product(b).re)
}

/// Bit and Ỹ error observables together with the linear forms derived from
/// their block traces.
#[derive(Clone, Debug)]
pub struct ErrorModel {
    pub projectors: Arc<ProjectorSet>,
    pub gamma_z: ComplexMatrix,
    pub gamma_ytilde: ComplexMatrix,
    pub bit_form: LinearForm,
    pub ytilde_form: LinearForm,
}

impl ErrorModel {
    pub fn new(sq: &SquashResult) -> Self {
        Self::with_projectors(Arc::new(build_projectors()), sq)
    }

    pub fn with_projectors(projectors: Arc<ProjectorSet>, sq: &SquashResult) -> Self {
        let gamma_z = error_povm(BasisAxis::Z, PhotonNumber::new(3).expect("3 photons"));
        let gamma_ytilde = ytilde_error_povm(sq);
        let bit_form = LinearForm::from_block_traces(block_traces(&gamma_z, &projectors));
        let ytilde_form = LinearForm::from_block_traces(block_traces(&gamma_ytilde, &projectors));
        Self {
            projectors,
            gamma_z,
            gamma_ytilde,
            bit_form,
            ytilde_form,
        }
    }

    /// (e_b, e_ỹ) from the closed forms, cross-checked against the forms
    /// recovered from the operators.
    pub fn error_rates(&self, r: &RCoefficients) -> Result<ErrorPoint> {
        r.check_feasible()?;
        let r = RCoefficients::normalized(r.r0, r.r1, r.r2);
        let e_b = LinearForm::BIT_ERROR.eval(&r);
        let e_y = LinearForm::YTILDE_ERROR.eval(&r);
        let dev_b = (e_b - self.bit_form.eval(&r)).abs();
        if dev_b > 1e-9 {
            return Err(Error::CrossCheck {
                what: "e_b",
                deviation: dev_b,
            });
        }
        let dev_y = (e_y - self.ytilde_form.eval(&r)).abs();
        if dev_y > 1e-9 {
            return Err(Error::CrossCheck {
                what: "e_ytilde",
                deviation: dev_y,
            });
        }
        Ok(ErrorPoint { e_b, e_y })
    }

    /// Tr[Γ_Z ρ] and Tr[Γ̃_y ρ] for the operator Σ r_i P_i.
    pub fn direct_error_rates(&self, r: &RCoefficients) -> ErrorPoint {
        let rho = r.to_operator(&self.projectors);
        ErrorPoint {
            e_b: self.gamma_z.trace_product(&rho).re,
            e_y: self.gamma_ytilde.trace_product(&rho).re,
        }
    }
}

pub fn error_rates(r: &RCoefficients, sq: &SquashResult) -> Result<ErrorPoint> {
    ErrorModel::new(sq).error_rates(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearFormReport {
    /// Tr[Γ_Z P0], Tr[Γ_Z P1], Tr[Γ_Z P2], Tr[Γ_Z Q].
    pub bit_block_traces: [f64; 4],
    pub ytilde_block_traces: [f64; 4],
    pub bit_form: LinearForm,
    pub ytilde_form: LinearForm,
    pub max_deviation: f64,
    pub passed: bool,
}

pub fn verify_linear_forms(sq: &SquashResult) -> LinearFormReport {
    verify_linear_forms_with(&build_projectors(), sq)
}

pub fn verify_linear_forms_with(p: &ProjectorSet, sq: &SquashResult) -> LinearFormReport {
    let gamma_z = error_povm(BasisAxis::Z, PhotonNumber::new(3).expect("3 photons"));
    let gamma_y = ytilde_error_povm(sq);
    let bit_block_traces = block_traces(&gamma_z, p);
    let ytilde_block_traces = block_traces(&gamma_y, p);
    let bit_form = LinearForm::from_block_traces(bit_block_traces);
    let ytilde_form = LinearForm::from_block_traces(ytilde_block_traces);
    let max_deviation = bit_form
        .max_deviation(&LinearForm::BIT_ERROR)
        .max(ytilde_form.max_deviation(&LinearForm::YTILDE_ERROR));
    LinearFormReport {
        bit_block_traces,
        ytilde_block_traces,
        bit_form,
        ytilde_form,
        max_deviation,
        passed: max_deviation <= 1e-9,
    }
}

/// Largest deviation from idempotence, hermiticity, mutual orthogonality,
/// expected ranks and completeness.
pub fn projector_defect(p: &ProjectorSet) -> f64 {
    let blocks = p.blocks();
    let mut worst = 0.0_f64;
    for (i, b) in blocks.iter().enumerate() {
        worst = worst.max((*b * *b).max_abs_diff(b));
        worst = worst.max(b.hermiticity_defect());
        worst = worst.max((b.trace().re - ProjectorSet::RANKS[i] as f64).abs());
        for other in &blocks[i + 1..] {
            worst = worst.max((*b * *other).max_abs());
        }
    }
    let mut sum = ComplexMatrix::zeros(PAIR_DIM, PAIR_DIM);
    for b in blocks {
        sum += b;
    }
    worst.max(sum.max_abs_diff(&ComplexMatrix::identity(PAIR_DIM)))
}

/// For i ≠ j, ‖Σ_g U_g P_i X P_j U_g†‖ over the given probe operators. Zero
/// means no nonzero intertwiner maps block j into block i.
pub fn intertwiner_defect(sym: &Symmetrizer, probes: &[ComplexMatrix]) -> f64 {
    let p = &sym.projectors;
    let blocks = [&p.p0, &p.p1, &p.p2];
    let mut worst = 0.0_f64;
    for x in probes {
        for (i, pi) in blocks.iter().enumerate() {
            for (j, pj) in blocks.iter().enumerate() {
                if i == j {
                    continue;
                }
                let sandwich = &(*pi * x) * *pj;
                worst = worst.max(sym.group_average(&sandwich).max_abs());
            }
        }
    }
    worst
}

/// max ‖[P, U_g]‖ over blocks and group elements.
pub fn commutant_defect(sym: &Symmetrizer) -> f64 {
    let mut worst = 0.0_f64;
    for u in sym.actions() {
        for b in sym.projectors.blocks() {
            worst = worst.max((&(u * b) - &(b * u)).max_abs());
        }
    }
    worst
}
