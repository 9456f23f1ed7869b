//! Exact small-dimension complex linear algebra and quantum primitives.
//!
//! States live on 2^k-dimensional Hilbert spaces and are represented densely
//! (`nalgebra` dynamic matrices over `Complex64`). Everything here is pure:
//! randomness enters only through an explicit generator passed by the caller.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entrywise tolerance for complex scalar equality.
pub const TOL_EQ: f64 = 1e-12;
/// Residual tolerance for unitarity checks (`‖UU† − I‖_max`).
pub const TOL_UNITARY: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry before it is rejected.
pub const TOL_PSD: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Error, PartialEq)]
pub enum QmathError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("state vector norm {norm} is not 1")]
    NotNormalized { norm: f64 },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositive { eigenvalue: f64 },
    #[error("argument {value} outside [0, 1]")]
    OutOfDomain { value: f64 },
    #[error("inconsistent subsystem dims {dims:?} for dimension {dim}")]
    BadDims { dims: Vec<usize>, dim: usize },
}

pub type Result<T> = std::result::Result<T, QmathError>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest absolute entrywise difference between two equally sized matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `‖UU† − I‖_max`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let id = CMatrix::identity(u.nrows(), u.ncols());
    max_abs_diff(&(u * u.adjoint()), &id)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && unitarity_residual(u) <= tol
}

// ---------------------------------------------------------------------------
// Bases, BB84 states, Pauli operations
// ---------------------------------------------------------------------------

/// Measurement / preparation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Computational basis {|0⟩, |1⟩}.
    Z,
    /// Hadamard basis {|+⟩, |−⟩}.
    X,
}

impl Basis {
    pub const BOTH: [Basis; 2] = [Basis::Z, Basis::X];

    /// The other basis.
    pub fn conjugate(self) -> Basis {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }

    /// Eigenstate of this basis labelled by `bit` (false ↦ |0⟩/|+⟩).
    pub fn ket(self, bit: bool) -> PureState {
        bb84_ket(Bb84State::from_parts(self, bit))
    }

    /// Both eigenstates, index 0 ↦ bit false.
    pub fn kets(self) -> [PureState; 2] {
        [self.ket(false), self.ket(true)]
    }
}

/// The four BB84 signal states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bb84State {
    ZeroZ,
    OneZ,
    PlusX,
    MinusX,
}

impl Bb84State {
    pub const ALL: [Bb84State; 4] = [
        Bb84State::ZeroZ,
        Bb84State::OneZ,
        Bb84State::PlusX,
        Bb84State::MinusX,
    ];

    pub fn basis(self) -> Basis {
        match self {
            Bb84State::ZeroZ | Bb84State::OneZ => Basis::Z,
            Bb84State::PlusX | Bb84State::MinusX => Basis::X,
        }
    }

    pub fn bit(self) -> bool {
        match self {
            Bb84State::ZeroZ | Bb84State::PlusX => false,
            Bb84State::OneZ | Bb84State::MinusX => true,
        }
    }

    pub fn from_parts(basis: Basis, bit: bool) -> Self {
        match (basis, bit) {
            (Basis::Z, false) => Bb84State::ZeroZ,
            (Basis::Z, true) => Bb84State::OneZ,
            (Basis::X, false) => Bb84State::PlusX,
            (Basis::X, true) => Bb84State::MinusX,
        }
    }
}

/// Single-qubit encoding operations.
///
/// The matrix convention follows Y = |0⟩⟨1| − |1⟩⟨0| (real antisymmetric),
/// which differs from the textbook Pauli-Y by a global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];

    pub fn matrix(self) -> CMatrix {
        pauli_matrix(self)
    }
}

/// 2×2 matrix of an encoding operation.
pub fn pauli_matrix(op: PauliOp) -> CMatrix {
    let rows: [[f64; 2]; 2] = match op {
        PauliOp::I => [[1.0, 0.0], [0.0, 1.0]],
        PauliOp::X => [[0.0, 1.0], [1.0, 0.0]],
        PauliOp::Y => [[0.0, 1.0], [-1.0, 0.0]],
        PauliOp::Z => [[1.0, 0.0], [0.0, -1.0]],
    };
    CMatrix::from_row_slice(
        2,
        2,
        &[
            cr(rows[0][0]),
            cr(rows[0][1]),
            cr(rows[1][0]),
            cr(rows[1][1]),
        ],
    )
}

// ---------------------------------------------------------------------------
// Pure states
// ---------------------------------------------------------------------------

/// Unit-norm complex state vector. Global phases are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL_EQ {
            return Err(QmathError::NotNormalized { norm });
        }
        Ok(PureState { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        self.amplitudes[i]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let n = self.dim() * other.dim();
        let mut amps = Vec::with_capacity(n);
        for a in self.amplitudes.iter() {
            for b in other.amplitudes.iter() {
                amps.push(a * b);
            }
        }
        PureState {
            amplitudes: CVector::from_vec(amps),
        }
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> CMatrix {
        let v = &self.amplitudes;
        v * v.adjoint()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            entries: self.projector(),
        }
    }

    /// Applies a unitary, renormalizing away accumulated rounding.
    pub fn apply(&self, u: &CMatrix) -> Result<PureState> {
        if u.ncols() != self.dim() {
            return Err(QmathError::DimensionMismatch(format!(
                "operator is {}×{}, state has dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        let mut v = u * &self.amplitudes;
        let norm = v.norm();
        v /= cr(norm);
        Ok(PureState { amplitudes: v })
    }
}

/// Ket of a BB84 signal state, with |±⟩ = (|0⟩ ± |1⟩)/√2.
pub fn bb84_ket(s: Bb84State) -> PureState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match s {
        Bb84State::ZeroZ => vec![cr(1.0), cr(0.0)],
        Bb84State::OneZ => vec![cr(0.0), cr(1.0)],
        Bb84State::PlusX => vec![cr(r), cr(r)],
        Bb84State::MinusX => vec![cr(r), cr(-r)],
    };
    PureState {
        amplitudes: CVector::from_vec(amps),
    }
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates all three invariants (Hermitian, trace 1, PSD) before accepting.
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(QmathError::DimensionMismatch(format!(
                "{}×{} is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = max_abs_diff(&entries, &entries.adjoint());
        if herm > TOL_EQ {
            return Err(QmathError::NotHermitian { residual: herm });
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TOL_EQ || tr.im.abs() > TOL_EQ {
            return Err(QmathError::BadTrace { trace: tr.re });
        }
        let min_eig = hermitian_eigenvalues(&entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -TOL_PSD {
            return Err(QmathError::NotPositive {
                eigenvalue: min_eig,
            });
        }
        Ok(DensityMatrix { entries })
    }

    /// Constructor for matrices valid by construction (unitary conjugation,
    /// normalized projection, convex mixing). Skips the eigenvalue check.
    pub(crate) fn from_trusted(entries: CMatrix) -> Self {
        debug_assert!(max_abs_diff(&entries, &entries.adjoint()) <= 1e-9);
        debug_assert!((entries.trace().re - 1.0).abs() <= 1e-9);
        DensityMatrix { entries }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.to_density()
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            entries: CMatrix::identity(dim, dim) * cr(1.0 / dim as f64),
        }
    }

    /// Convex mixture Σ wᵢ ρᵢ; weights must sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, m)| m.dim())
            .ok_or_else(|| QmathError::DimensionMismatch("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, m) in parts {
            if m.dim() != dim {
                return Err(QmathError::DimensionMismatch(
                    "mixture components differ in dimension".into(),
                ));
            }
            acc += &m.entries * cr(*w);
            total += w;
        }
        if (total - 1.0).abs() > TOL_EQ {
            return Err(QmathError::BadTrace { trace: total });
        }
        Ok(DensityMatrix { entries: acc })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// ⟨ψ|ρ|ψ⟩, real part (exact for Hermitian ρ).
    pub fn fidelity_with(&self, psi: &PureState) -> f64 {
        let v = psi.amplitudes();
        (v.adjoint() * &self.entries * v)[(0, 0)].re
    }

    /// Checks all three invariants, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        DensityMatrix::new(self.entries.clone()).map(|_| ())
    }
}

/// U ρ U†. Rejects non-unitary or mismatched operators.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(QmathError::DimensionMismatch(format!(
            "operator is {}×{}, state has dimension {}",
            u.nrows(),
            u.ncols(),
            rho.dim()
        )));
    }
    let residual = unitarity_residual(u);
    if residual > TOL_UNITARY {
        return Err(QmathError::NotUnitary { residual });
    }
    Ok(DensityMatrix::from_trusted(u * &rho.entries * u.adjoint()))
}

/// ρ ⊗ σ.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(a.entries.kronecker(&b.entries))
}

/// Traces out all factors not listed in `keep`.
///
/// `dims` are the factor dimensions in tensor order; `keep` holds indices
/// into `dims` (strictly increasing). The kept factors stay in their
/// original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize], dims: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() || dims.is_empty() {
        return Err(QmathError::BadDims {
            dims: dims.to_vec(),
            dim: rho.dim(),
        });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(QmathError::BadDims {
            dims: dims.to_vec(),
            dim: rho.dim(),
        });
    }

    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&t| dims[t]).collect();
    let traced_total: usize = traced_dims.iter().product();

    // Row-major strides of the full index space.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let decode = |flat: usize, ds: &[usize]| -> Vec<usize> {
        let mut rem = flat;
        let mut out = vec![0; ds.len()];
        for i in (0..ds.len()).rev() {
            out[i] = rem % ds[i];
            rem /= ds[i];
        }
        out
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for row_out in 0..out_dim {
        let row_idx = decode(row_out, &keep_dims);
        for col_out in 0..out_dim {
            let col_idx = decode(col_out, &keep_dims);
            let mut sum = c(0.0, 0.0);
            for t in 0..traced_total.max(1) {
                let t_idx = decode(t, &traced_dims);
                let mut row_flat = 0;
                let mut col_flat = 0;
                for (pos, &k) in keep.iter().enumerate() {
                    row_flat += row_idx[pos] * strides[k];
                    col_flat += col_idx[pos] * strides[k];
                }
                for (pos, &tr) in traced.iter().enumerate() {
                    row_flat += t_idx[pos] * strides[tr];
                    col_flat += t_idx[pos] * strides[tr];
                }
                sum += rho.entries[(row_flat, col_flat)];
            }
            out[(row_out, col_out)] = sum;
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// Both outcome branches of a projective measurement on one factor of a
/// product space: `(probability, post-measurement state)` for outcome bits
/// 0 and 1. Zero-probability branches carry the input state unchanged so the
/// pair stays well-formed.
pub fn measurement_branches(
    rho: &DensityMatrix,
    dims: &[usize],
    subsystem: usize,
    basis: Basis,
) -> Result<[(f64, DensityMatrix); 2]> {
    let kets = basis.kets();
    measurement_branches_with_kets(rho, dims, subsystem, &kets)
}

/// Same as [`measurement_branches`] but measuring against an arbitrary
/// orthonormal pair of kets (used for intermediate-basis measurements).
pub fn measurement_branches_with_kets(
    rho: &DensityMatrix,
    dims: &[usize],
    subsystem: usize,
    kets: &[PureState; 2],
) -> Result<[(f64, DensityMatrix); 2]> {
    let total: usize = dims.iter().product();
    if total != rho.dim() || subsystem >= dims.len() || dims[subsystem] != 2 {
        return Err(QmathError::BadDims {
            dims: dims.to_vec(),
            dim: rho.dim(),
        });
    }
    let pre: usize = dims[..subsystem].iter().product();
    let post: usize = dims[subsystem + 1..].iter().product();
    let branch = |ket: &PureState| -> (f64, DensityMatrix) {
        let proj = CMatrix::identity(pre, pre)
            .kronecker(&ket.projector())
            .kronecker(&CMatrix::identity(post, post));
        let projected = &proj * &rho.entries * &proj;
        let p = projected.trace().re;
        if p <= 0.0 {
            (0.0, rho.clone())
        } else {
            (
                p,
                DensityMatrix::from_trusted(projected * cr(1.0 / p)),
            )
        }
    };
    Ok([branch(&kets[0]), branch(&kets[1])])
}

/// Projective measurement of a 2-dimensional density matrix, Born-sampled.
/// Returns the outcome bit and the collapsed state.
pub fn measure_projective<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    basis: Basis,
    rng: &mut R,
) -> (bool, DensityMatrix) {
    let branches =
        measurement_branches(rho, &[2], 0, basis).expect("2-dimensional state");
    sample_branch(branches, rng)
}

/// Projective measurement of one qubit factor of a larger system.
pub fn measure_subsystem<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    dims: &[usize],
    subsystem: usize,
    basis: Basis,
    rng: &mut R,
) -> Result<(bool, DensityMatrix)> {
    let branches = measurement_branches(rho, dims, subsystem, basis)?;
    Ok(sample_branch(branches, rng))
}

pub(crate) fn sample_branch<R: Rng + ?Sized>(
    branches: [(f64, DensityMatrix); 2],
    rng: &mut R,
) -> (bool, DensityMatrix) {
    let p0 = branches[0].0;
    let [b0, b1] = branches;
    if rng.gen::<f64>() < p0 {
        (false, b0.1)
    } else {
        (true, b1.1)
    }
}

/// Projective measurement of a 2-dimensional pure state; keeps the pure-state
/// path (and hence phase bookkeeping) intact.
pub fn measure_projective_pure<R: Rng + ?Sized>(
    psi: &PureState,
    basis: Basis,
    rng: &mut R,
) -> (bool, PureState) {
    assert_eq!(psi.dim(), 2, "pure measurement path is single-qubit");
    let kets = basis.kets();
    let p0 = kets[0].inner(psi).norm_sqr();
    let bit = rng.gen::<f64>() >= p0;
    let [k0, k1] = kets;
    (bit, if bit { k1 } else { k0 })
}

// ---------------------------------------------------------------------------
// Entropies
// ---------------------------------------------------------------------------

fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    nalgebra::linalg::SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Von Neumann entropy in bits: −Σ λᵢ log2 λᵢ.
///
/// Eigenvalues within `TOL_PSD` of the [0, 1] interval are clamped onto it;
/// anything further out means the input is not a state and is rejected.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in hermitian_eigenvalues(rho.entries()) {
        if lambda < -TOL_PSD {
            return Err(QmathError::NotPositive { eigenvalue: lambda });
        }
        if lambda > 1.0 + TOL_PSD {
            return Err(QmathError::BadTrace { trace: lambda });
        }
        let l = lambda.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

/// Binary entropy h(x) = −x log2 x − (1−x) log2 (1−x), with 0·log 0 := 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(QmathError::OutOfDomain { value: x });
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

// ---------------------------------------------------------------------------
// Random unitaries
// ---------------------------------------------------------------------------

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal folded back into Q.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    assert!(dim >= 1);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * cr(std::f64::consts::FRAC_1_SQRT_2)
    });
    let qr = nalgebra::linalg::QR::new(g);
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}
