//! Dense complex operators and vectors on small finite-dimensional spaces.
//!
//! Everything here works on row-major `Vec<C64>` storage. Dimensions stay
//! below a few hundred, so no blocking or BLAS is attempted; the Hermitian
//! eigensolver delegates to `nalgebra`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use thiserror::Error;

pub type C64 = nalgebra::Complex<f64>;

/// Reconstruction / orthogonality tolerance for eigensystems.
pub const TOL_EIG: f64 = 1e-10;
/// Slack on "positive semidefinite": smallest eigenvalue ≥ −TOL_PSD.
pub const TOL_PSD: f64 = 1e-9;
/// Bracket width used by root finders unless a caller asks for tighter.
pub const TOL_ROOT: f64 = 1e-9;
/// Tolerance for identities that hold up to rounding only.
pub const TOL_EXACT: f64 = 1e-12;

/// A ket is normalized when its norm is within this of one.
pub const TOL_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:e}")]
    NonHermitian { deviation: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// Builds a matrix whose columns are the given kets.
    pub fn from_columns(cols: &[Ket]) -> Self {
        assert!(!cols.is_empty());
        let rows = cols[0].dim();
        Self::from_fn(rows, cols.len(), |i, j| cols[j].amplitudes()[i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.dagger()).scale_real(0.5)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        kron(self, other)
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        assert_eq!(self.cols, v.dim());
        let amps = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)] * v.amplitudes()[j])
                    .sum()
            })
            .collect();
        Ket::new(amps)
    }

    /// ⟨v|A|v⟩.
    pub fn expectation(&self, v: &Ket) -> C64 {
        v.inner(&self.apply(v))
    }

    /// U A U†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.dagger()
    }

    /// V† A V for an isometry (or any conformable) V.
    pub fn compress(&self, v: &ComplexMatrix) -> Self {
        &(&v.dagger() * self) * v
    }

    /// Partial trace over the first tensor factor of dimension `d_first`.
    pub fn partial_trace_first(&self, d_first: usize) -> Self {
        assert!(self.is_square() && self.rows.is_multiple_of(d_first));
        let d2 = self.rows / d_first;
        Self::from_fn(d2, d2, |i, j| {
            (0..d_first).map(|a| self[(a * d2 + i, a * d2 + j)]).sum()
        })
    }

    /// Extracts the block of rows `r0..r0+nr`, cols `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "incompatible shapes {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `m ⊗ m ⊗ … ⊗ m` with `n` factors.
pub fn kron_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    assert!(n >= 1);
    (1..n).fold(m.clone(), |acc, _| kron(&acc, m))
}

#[derive(Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.amplitudes.iter().map(|z| (z.re, z.im)))
            .finish()
    }
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        assert!(!amplitudes.is_empty(), "ket dimension must be positive");
        Self { amplitudes }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&x| re(x)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![re(0.0); dim];
        amps[index] = re(1.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOL_NORM
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(re(1.0 / n))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.amplitudes.iter().map(|z| z * s).collect())
    }

    /// ⟨self|other⟩ (antilinear in `self`).
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ket::new(amps)
    }

    pub fn add(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim());
        Ket::new(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Ket) -> Ket {
        self.add(&other.scale(re(-1.0)))
    }

    /// |v⟩⟨v|.
    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    /// |self⟩⟨other|.
    pub fn outer(&self, other: &Ket) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.amplitudes[i] * other.amplitudes[j].conj()
        })
    }

    /// |⟨self|other⟩|² for normalized kets.
    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Orthonormalizes `vectors` in order, dropping any that are dependent on
/// the earlier ones (residual norm below `1e-10`).
pub fn gram_schmidt(vectors: &[Ket]) -> Vec<Ket> {
    let mut basis: Vec<Ket> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two passes for stability
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.inner(&w);
                w = w.sub(&b.scale(overlap));
            }
        }
        if w.norm() > 1e-10 {
            basis.push(w.normalized());
        }
    }
    basis
}

/// Projector onto the span of `vectors`.
pub fn span_projector(vectors: &[Ket]) -> ComplexMatrix {
    let basis = gram_schmidt(vectors);
    let dim = vectors[0].dim();
    basis
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |mut acc, b| {
            acc += &b.projector();
            acc
        })
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Ket>,
}

impl EigenSystem {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Σ f(λ_k) v_k v_k†.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let dim = self.eigenvectors[0].dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam);
            if w != 0.0 {
                out += &v.projector().scale_real(w);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<EigenSystem, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let deviation = h.hermiticity_defect();
    if deviation > TOL_EIG {
        return Err(LinalgError::NonHermitian { deviation });
    }
    let n = h.rows();
    let max_iterations = 1000 * n.max(8);
    let sym = h.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, max_iterations).ok_or(
        LinalgError::NoConvergence {
            iterations: max_iterations,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| Ket::new(eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(hermitian_eigensystem(h)?.min())
}

/// Nearest positive semidefinite matrix in Frobenius norm: Σ max(λ_k, 0) v_k v_k†.
pub fn project_psd(h: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eigensystem(h)?;
    if eig.min() >= 0.0 {
        return Ok(h.hermitian_part());
    }
    Ok(eig.map_spectrum(|x| x.max(0.0)))
}

/// Random test operators. Entries are uniform on [-1, 1] (real and
/// imaginary parts independently), which is all the invariance checks need.
pub mod random {
    use super::*;

    pub fn matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
        matrix(dim, dim, rng).hermitian_part()
    }

    /// X X† / Tr[X X†].
    pub fn density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
        let x = matrix(dim, dim, rng);
        let rho = &x * &x.dagger();
        let t = rho.trace().re;
        rho.scale_real(1.0 / t).hermitian_part()
    }

    pub fn ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
        Ket::new(
            (0..dim)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .normalized()
    }

    /// Unitary from Gram–Schmidt on random columns.
    pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
        let cols: Vec<Ket> = (0..dim).map(|_| ket(dim, rng)).collect();
        let basis = gram_schmidt(&cols);
        assert_eq!(basis.len(), dim, "random columns were degenerate");
        ComplexMatrix::from_columns(&basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, vec![re(0.0), re(1.0), re(1.0), re(0.0)])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sign_bookkeeping() {
        let zz = kron(&sigma_z(), &sigma_z());
        let v = Ket::basis(2, 0).kron(&Ket::basis(2, 1));
        let out = zz.apply(&v);
        assert!(out.sub(&v.scale(re(-1.0))).norm() < 1e-15);
    }

    #[test]
    fn kron_associativity_and_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random::matrix(2, 2, &mut rng);
        let b = random::matrix(2, 2, &mut rng);
        let d = random::matrix(2, 2, &mut rng);
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        assert!(left.max_abs_diff(&right) <= 1e-13);

        let e = random::matrix(2, 3, &mut rng);
        let f = random::matrix(3, 2, &mut rng);
        let lhs = &kron(&a, &e) * &kron(&b, &f);
        let rhs = kron(&(&a * &b), &(&e * &f));
        assert_eq!((lhs.rows(), lhs.cols()), (4, 4));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let eig = hermitian_eigensystem(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(eig.eigenvalues.len(), 3);
        for (got, want) in eig.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn sigma_x_spectrum() {
        let eig = hermitian_eigensystem(&sigma_x()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        assert!(eig.eigenvectors[0].fidelity(&Ket::from_real(&[s, -s])) > 1.0 - 1e-14);
        assert!(eig.eigenvectors[1].fidelity(&Ket::from_real(&[s, s])) > 1.0 - 1e-14);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let h = random::hermitian(16, &mut rng);
        let eig = hermitian_eigensystem(&h).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
        for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let resid = h.apply(v).sub(&v.scale(re(*lam))).norm();
            assert!(resid <= 1e-10 * h.frobenius_norm());
        }
        for i in 0..16 {
            for j in 0..i {
                assert!(eig.eigenvectors[i].inner(&eig.eigenvectors[j]).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![re(0.0), re(1.0), re(0.0), re(0.0)]);
        match hermitian_eigensystem(&m) {
            Err(LinalgError::NonHermitian { deviation }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("expected NonHermitian, got {other:?}"),
        }
        assert!(matches!(project_psd(&m), Err(LinalgError::NonHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigensystem(&rect), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn psd_projection_examples() {
        let out = project_psd(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);

        let out = project_psd(&ComplexMatrix::from_real_diagonal(&[-2.0, -3.0])).unwrap();
        assert!(out.max_abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::density(6, &mut rng);
        assert!(project_psd(&rho).unwrap().max_abs_diff(&rho) <= 1e-12);
    }

    #[test]
    fn psd_projection_is_idempotent_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random::hermitian(8, &mut rng);
        let once = project_psd(&h).unwrap();
        let twice = project_psd(&once).unwrap();
        assert!(once.max_abs_diff(&twice) <= 1e-12);
        assert!(min_eigenvalue(&once).unwrap() >= -1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random::density(2, &mut rng);
        let b = random::density(3, &mut rng);
        let pt = kron(&a, &b).partial_trace_first(2);
        assert!(pt.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let v = Ket::from_real(&[1.0, 1.0, 0.0]);
        let w = Ket::from_real(&[2.0, 2.0, 0.0]);
        let u = Ket::from_real(&[0.0, 0.0, 3.0]);
        let basis = gram_schmidt(&[v, w, u]);
        assert_eq!(basis.len(), 2);
        let p = span_projector(&basis);
        assert!((p.trace().re - 2.0).abs() < 1e-14);
    }
}
