//! Exact two-qubit linear algebra: state validation, partial traces,
//! spectra, entropy and purity.
//!
//! Basis ordering is |00>, |01>, |10>, |11> (row-major index `2a + b` for
//! qubit A in `a` and qubit B in `b`). Every module in the crate shares this
//! convention.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector4};
use thiserror::Error;

pub type C64 = Complex<f64>;
/// Dense 4x4 complex matrix over the computational basis |00>,|01>,|10>,|11>.
pub type ComplexMatrix4 = Matrix4<C64>;
pub type ComplexMatrix2 = Matrix2<C64>;

/// Tolerance for the Hermiticity check in [`TwoQubitState::validate`].
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance for the unit-trace check.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this are a hard positivity violation; values in
/// [-PSD_CLIP, 0) are clipped to zero and the spectrum renormalized.
pub const PSD_CLIP: f64 = 1e-9;
/// Eigenvalues above this threshold count toward the rank.
pub const RANK_THRESHOLD: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Which qubit a partial trace keeps or a measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Subsystem {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

impl std::fmt::Display for Subsystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Subsystem::A => write!(f, "A"),
            Subsystem::B => write!(f, "B"),
        }
    }
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one (|tr - 1| = {deviation:.3e})")]
    TraceNotOne { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("eigendecomposition did not converge")]
    EigenFailed,
}

/// Validated two-qubit density matrix with cached spectrum and rank.
///
/// Instances are immutable; all derived quantities come from the clipped
/// spectrum computed at validation time.
#[derive(Debug, Clone)]
pub struct TwoQubitState {
    matrix: ComplexMatrix4,
    eigenvalues: [f64; 4],
    eigenvectors: ComplexMatrix4,
    rank: u8,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity, clips roundoff
    /// negatives in [-1e-9, 0) and renormalizes the spectrum.
    pub fn validate(raw: ComplexMatrix4) -> Result<Self, StateError> {
        let mut herm_dev: f64 = 0.0;
        for i in 0..4 {
            for j in i..4 {
                let d = (raw[(i, j)] - raw[(j, i)].conj()).norm();
                if d > herm_dev {
                    herm_dev = d;
                }
            }
        }
        // NaN deviations (from NaN/Inf input) fail the checks too.
        if herm_dev.is_nan() || herm_dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian { deviation: herm_dev });
        }

        let tr = raw.trace();
        let tr_dev = (tr - cr(1.0)).norm();
        if tr_dev.is_nan() || tr_dev > TRACE_TOL {
            return Err(StateError::TraceNotOne { deviation: tr_dev });
        }

        // Work on the Hermitian part so the eigensolver sees an exactly
        // Hermitian matrix.
        let herm = (raw + raw.adjoint()) * cr(0.5);
        let eig = SymmetricEigen::try_new(herm, f64::EPSILON, 0).ok_or(StateError::EigenFailed)?;

        let mut vals = [0.0f64; 4];
        for (v, &e) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
            *v = e;
        }
        let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig.is_nan() || min_eig < -PSD_CLIP {
            return Err(StateError::NotPositive { min_eigenvalue: min_eig });
        }

        let clipped = min_eig < 0.0;
        if clipped {
            let mut sum = 0.0;
            for v in vals.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
                sum += *v;
            }
            for v in vals.iter_mut() {
                *v /= sum;
            }
        }

        // Sort spectrum (and eigenvector columns) in descending order.
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
        let sorted_vals = [vals[order[0]], vals[order[1]], vals[order[2]], vals[order[3]]];
        let mut vecs = ComplexMatrix4::zeros();
        for (dst, &src) in order.iter().enumerate() {
            vecs.set_column(dst, &eig.eigenvectors.column(src));
        }

        let matrix = if clipped {
            let mut d = ComplexMatrix4::zeros();
            for i in 0..4 {
                d[(i, i)] = cr(sorted_vals[i]);
            }
            vecs * d * vecs.adjoint()
        } else {
            raw
        };

        let rank = sorted_vals.iter().filter(|&&v| v > RANK_THRESHOLD).count() as u8;
        Ok(TwoQubitState {
            matrix,
            eigenvalues: sorted_vals,
            eigenvectors: vecs,
            rank,
        })
    }

    /// Builds the projector onto a normalized 4-component pure state.
    pub fn from_pure(psi: &Vector4<C64>) -> Result<Self, StateError> {
        let n = psi.norm();
        let psi = psi / cr(n);
        Self::validate(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.matrix
    }

    /// Clipped spectrum in descending order.
    pub fn eigenvalues(&self) -> &[f64; 4] {
        &self.eigenvalues
    }

    pub(crate) fn eigenvectors(&self) -> &ComplexMatrix4 {
        &self.eigenvectors
    }

    /// Number of eigenvalues above 1e-9.
    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        spectrum_entropy(&self.eigenvalues)
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state of the kept qubit.
    pub fn partial_trace(&self, keep: Subsystem) -> QubitState {
        let m = &self.matrix;
        let red = match keep {
            Subsystem::A => Matrix2::new(
                m[(0, 0)] + m[(1, 1)],
                m[(0, 2)] + m[(1, 3)],
                m[(2, 0)] + m[(3, 1)],
                m[(2, 2)] + m[(3, 3)],
            ),
            Subsystem::B => Matrix2::new(
                m[(0, 0)] + m[(2, 2)],
                m[(0, 1)] + m[(2, 3)],
                m[(1, 0)] + m[(3, 2)],
                m[(1, 1)] + m[(3, 3)],
            ),
        };
        QubitState { matrix: red }
    }

    /// |00>, |01>, |10> or |11> as a density matrix.
    pub fn basis_state(a: usize, b: usize) -> Self {
        assert!(a < 2 && b < 2);
        let mut m = ComplexMatrix4::zeros();
        let idx = 2 * a + b;
        m[(idx, idx)] = cr(1.0);
        Self::validate(m).expect("basis projector is a valid state")
    }

    /// The Bell state (|00> + |11>)/sqrt(2) as a density matrix.
    pub fn bell_phi_plus() -> Self {
        let psi = Vector4::new(cr(1.0), cr(0.0), cr(0.0), cr(1.0));
        Self::from_pure(&psi).expect("Bell projector is a valid state")
    }

    /// Identity/4.
    pub fn maximally_mixed() -> Self {
        Self::validate(ComplexMatrix4::identity() * cr(0.25)).expect("I/4 is a valid state")
    }
}

/// Validated single-qubit density matrix.
#[derive(Debug, Clone)]
pub struct QubitState {
    matrix: ComplexMatrix2,
}

impl QubitState {
    pub fn validate(raw: ComplexMatrix2) -> Result<Self, StateError> {
        let mut herm_dev: f64 = 0.0;
        for i in 0..2 {
            for j in i..2 {
                let d = (raw[(i, j)] - raw[(j, i)].conj()).norm();
                herm_dev = herm_dev.max(d);
            }
        }
        if herm_dev.is_nan() || herm_dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian { deviation: herm_dev });
        }
        let tr_dev = (raw.trace() - cr(1.0)).norm();
        if tr_dev.is_nan() || tr_dev > TRACE_TOL {
            return Err(StateError::TraceNotOne { deviation: tr_dev });
        }
        let (lo, _) = hermitian2_eigenvalues(&raw);
        if lo.is_nan() || lo < -PSD_CLIP {
            return Err(StateError::NotPositive { min_eigenvalue: lo });
        }
        Ok(QubitState { matrix: raw })
    }

    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.matrix
    }

    /// Eigenvalues (ascending), clipped to [0, 1].
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (lo, hi) = hermitian2_eigenvalues(&self.matrix);
        (lo.max(0.0), hi.max(0.0))
    }

    pub fn entropy(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        let mut s = 0.0;
        if lo > 0.0 {
            s -= lo * lo.log2();
        }
        if hi > 0.0 {
            s -= hi * hi.log2();
        }
        s
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Closed-form eigenvalues of a 2x2 Hermitian matrix, ascending.
#[inline]
pub(crate) fn hermitian2_eigenvalues(m: &ComplexMatrix2) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let b = m[(1, 1)].re;
    let mid = 0.5 * (a + b);
    let r = (0.25 * (a - b) * (a - b) + m[(0, 1)].norm_sqr()).sqrt();
    (mid - r, mid + r)
}

/// -sum lambda log2 lambda with 0 log 0 = 0.
pub fn spectrum_entropy(vals: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in vals {
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    s
}

/// Binary entropy h(x) = -x log2 x - (1-x) log2(1-x).
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Kronecker product of 2x2 blocks, A on the left (first qubit).
pub fn kron2(a: &ComplexMatrix2, b: &ComplexMatrix2) -> ComplexMatrix4 {
    let mut out = ComplexMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn pauli_x() -> ComplexMatrix2 {
    Matrix2::new(cr(0.0), cr(1.0), cr(1.0), cr(0.0))
}

pub fn pauli_y() -> ComplexMatrix2 {
    Matrix2::new(cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0))
}

pub fn pauli_z() -> ComplexMatrix2 {
    Matrix2::new(cr(1.0), cr(0.0), cr(0.0), cr(-1.0))
}

/// Single-qubit spinor (cos t, e^{i phi} sin t).
pub(crate) fn spinor(theta: f64, phi: f64) -> Vector2<C64> {
    Vector2::new(cr(theta.cos()), c(phi.cos(), phi.sin()) * theta.sin())
}
