//! Dense complex Hermitian linear algebra at desk scale (dimension <= 64).
//!
//! The two domain types are [`HermitianOperator`] (observables and
//! Hamiltonians) and [`DensityMatrix`] (quantum states). Both validate their
//! defining invariants on construction, so downstream code can take validity
//! for granted. Eigendecompositions are returned as a [`Spectrum`] with
//! ascending eigenvalues.

pub mod json;
pub mod ops;
pub mod random;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::tol;

pub use ops::{kron, max_abs, partial_trace, CMatrix, C64};
pub use random::{
    project_to_density, random_density, random_hermitian, random_isometry, random_unitary,
    RngStream,
};

/// Hermitian operator on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

/// Positive semidefinite, unit-trace Hermitian operator: a quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues ascend; eigenvector `k` is the `k`-th column of
/// `eigenvectors`. Reconstruction `V diag(L) V†` holds within
/// [`tol::EIG_RECON_REL`] relative to the input scale.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// Scalar functions that can be lifted to Hermitian operators spectrally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFn {
    Identity,
    Exp,
    /// Natural logarithm. Domain: eigenvalues above the relative support
    /// threshold.
    Ln,
    /// Real power. Negative or fractional exponents restrict the domain.
    Power(f64),
}

impl HermitianOperator {
    /// Validates the Hermiticity invariant (max-abs elementwise, tolerance
    /// [`tol::HERM_TOL`]) and wraps the matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        if mat.nrows() > tol::MAX_DIM {
            return Err(Error::DimensionTooLarge(mat.nrows(), tol::MAX_DIM));
        }
        let defect = ops::hermiticity_defect(&mat);
        if defect > tol::HERM_TOL {
            return Err(Error::NonHermitianInput(defect));
        }
        // Exact symmetrization keeps later eigendecompositions clean.
        Ok(Self {
            mat: ops::hermitian_part(&mat),
        })
    }

    /// Builds a diagonal operator from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            mat: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Eigendecomposition with ascending eigenvalues.
    pub fn spectrum(&self) -> Spectrum {
        eig_hermitian_raw(&self.mat)
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        trace_norm_raw(&self.mat)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: kron(&self.mat, &other.mat),
        }
    }

    /// `self + c * I`.
    pub fn shift(&self, c: f64) -> Self {
        Self {
            mat: &self.mat + ops::identity(self.dim()).map(|z| z * c),
        }
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity (eigenvalues >= [`tol::PSD_FLOOR`])
    /// and unit trace (within [`tol::TRACE_TOL`]).
    pub fn new(mat: CMatrix) -> Result<Self> {
        let herm = HermitianOperator::new(mat)?;
        let tr = herm.mat.trace();
        if (tr.re - 1.0).abs() > tol::TRACE_TOL || tr.im.abs() > tol::TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace {:.17e} + {:.3e}i != 1",
                tr.re, tr.im
            )));
        }
        let spec = herm.spectrum();
        let lam_min = spec.eigenvalues[0];
        if lam_min < tol::PSD_FLOOR {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lam_min:.3e}"
            )));
        }
        Ok(Self { mat: herm.mat })
    }

    /// Pure state `|k><k|` in the computational basis.
    pub fn pure_basis_state(dim: usize, k: usize) -> Self {
        Self {
            mat: ops::basis_matrix(dim, k, k),
        }
    }

    /// Diagonal (classical) state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_diagonal(p).into_matrix())
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let p = vec![1.0 / dim as f64; dim];
        Self::from_probabilities(&p).expect("uniform vector is a state")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn spectrum(&self) -> Spectrum {
        eig_hermitian_raw(&self.mat)
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm_raw(&self.mat)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        ops::trace_re(&(&self.mat * &self.mat))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: kron(&self.mat, &other.mat),
        }
    }

    /// Partial trace keeping the listed factors; result is again a state.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let reduced = partial_trace(&self.mat, dims, keep)?;
        Self::new(reduced)
    }

    /// Orthogonal projector onto the span of eigenvectors with eigenvalue
    /// above `supp_rel * lambda_max`.
    pub fn support_projector(&self, supp_rel: f64) -> HermitianOperator {
        let spec = self.spectrum();
        let cutoff = supp_rel * spec.eigenvalues.last().copied().unwrap_or(0.0).abs();
        let mut proj = CMatrix::zeros(self.dim(), self.dim());
        for (k, &lam) in spec.eigenvalues.iter().enumerate() {
            if lam > cutoff {
                let v = spec.eigenvectors.column(k);
                proj += v * v.adjoint();
            }
        }
        HermitianOperator {
            mat: ops::hermitian_part(&proj),
        }
    }

    /// Rank counted at the default support threshold.
    pub fn support_rank(&self) -> usize {
        let spec = self.spectrum();
        let cutoff = tol::SUPP_REL * spec.eigenvalues.last().copied().unwrap_or(0.0).abs();
        spec.eigenvalues.iter().filter(|&&l| l > cutoff).count()
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().eigenvalues[0]
    }
}

impl Spectrum {
    /// `V f(L) V†` for a scalar function applied to the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.eigenvalues.len();
        let diag = DVector::from_fn(d, |k, _| C64::new(f(self.eigenvalues[k]), 0.0));
        let fd = CMatrix::from_diagonal(&diag);
        let recon = &self.eigenvectors * fd * self.eigenvectors.adjoint();
        ops::hermitian_part(&recon)
    }

    /// `V L V†`, for residual checks.
    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn eig_hermitian(a: &HermitianOperator) -> Spectrum {
    a.spectrum()
}

pub(crate) fn eig_hermitian_raw(mat: &CMatrix) -> Spectrum {
    let eig = mat.clone().symmetric_eigen();
    let d = mat.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Spectral lift of a scalar function, `A -> V f(L) V†`.
///
/// Returns [`Error::DomainError`] when an eigenvalue falls outside the
/// function's domain; for `Ln` and negative powers that means at or below
/// the relative support threshold.
pub fn matrix_function(a: &HermitianOperator, f: SpectralFn) -> Result<HermitianOperator> {
    let spec = a.spectrum();
    let lam_max = spec.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cutoff = tol::SUPP_REL * lam_max;
    let check_positive = |name: &'static str| -> Result<()> {
        if let Some(&bad) = spec.eigenvalues.iter().find(|&&l| l <= cutoff) {
            return Err(Error::DomainError {
                function: name,
                value: bad,
            });
        }
        Ok(())
    };
    let mat = match f {
        SpectralFn::Identity => spec.apply(|x| x),
        SpectralFn::Exp => spec.apply(f64::exp),
        SpectralFn::Ln => {
            check_positive("ln")?;
            spec.apply(f64::ln)
        }
        SpectralFn::Power(p) => {
            if p < 0.0 {
                check_positive("negative power")?;
            } else if p.fract() != 0.0 {
                if let Some(&bad) = spec.eigenvalues.iter().find(|&&l| l < -cutoff.max(1e-14)) {
                    return Err(Error::DomainError {
                        function: "fractional power",
                        value: bad,
                    });
                }
            }
            spec.apply(|x| {
                if p.fract() != 0.0 && x < 0.0 {
                    0.0
                } else {
                    x.powf(p)
                }
            })
        }
    };
    Ok(HermitianOperator { mat })
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_raw(mat: &CMatrix) -> f64 {
    debug_assert!(ops::hermiticity_defect(mat) < 1e-8);
    eig_hermitian_raw(mat)
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum()
}

/// Trace-norm distance `||a - b||_1` between two states.
pub fn state_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    trace_norm_raw(&(a.matrix() - b.matrix()))
}

/// Real power restricted to the support (eigenvalues at or below the
/// threshold map to zero, which realizes the pseudo-inverse for negative
/// exponents).
pub(crate) fn power_on_support(spec: &Spectrum, p: f64) -> CMatrix {
    let lam_max = spec.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cutoff = tol::SUPP_REL * lam_max;
    spec.apply(|x| if x > cutoff { x.powf(p) } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn eig_diagonal_is_sorted() {
        let a = HermitianOperator::from_diagonal(&[3.0, 1.0]);
        let spec = a.spectrum();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        let spec = HermitianOperator::new(m).unwrap().spectrum();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstruction_residual() {
        let mut rng = RngStream::new(11, 0).rng();
        let a = random_hermitian(6, 1.0, &mut rng);
        let spec = a.spectrum();
        let resid = max_abs(&(a.matrix() - spec.reconstruct()));
        let scale = f64::max(1.0, max_abs(a.matrix()));
        assert!(resid <= tol::EIG_RECON_REL * scale, "residual {resid:.3e}");
        let v = &spec.eigenvectors;
        let unit = max_abs(&(v.adjoint() * v - ops::identity(6)));
        assert!(unit < 1e-10);
    }

    #[test]
    fn eig_reconstruction_at_max_dimension() {
        let mut rng = RngStream::new(11, 1).rng();
        let a = random_hermitian(tol::MAX_DIM, 1.0, &mut rng);
        let spec = a.spectrum();
        let resid = max_abs(&(a.matrix() - spec.reconstruct()));
        let scale = f64::max(1.0, max_abs(a.matrix()));
        assert!(resid <= tol::EIG_RECON_REL * scale, "residual {resid:.3e}");
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NonHermitianInput(_))
        ));
    }

    #[test]
    fn matrix_fn_exp_and_ln() {
        let a = HermitianOperator::from_diagonal(&[0.0, -1.0]);
        let e = matrix_function(&a, SpectralFn::Exp).unwrap();
        assert!((e.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((e.matrix()[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-14);

        let id3 = HermitianOperator::from_diagonal(&[1.0, 1.0, 1.0]);
        let z = matrix_function(&id3, SpectralFn::Ln).unwrap();
        assert!(max_abs(z.matrix()) < 1e-14);
    }

    #[test]
    fn matrix_fn_log_exp_round_trip() {
        let mut rng = RngStream::new(12, 0).rng();
        let sigma = random_density(4, 4, &mut rng);
        let herm = HermitianOperator::new(sigma.matrix().clone()).unwrap();
        let ln = matrix_function(&herm, SpectralFn::Ln).unwrap();
        let back = matrix_function(&ln, SpectralFn::Exp).unwrap();
        assert!(max_abs(&(back.matrix() - sigma.matrix())) < 1e-9);
    }

    #[test]
    fn matrix_fn_identity_is_identity() {
        let mut rng = RngStream::new(13, 0).rng();
        let a = random_hermitian(5, 2.0, &mut rng);
        let same = matrix_function(&a, SpectralFn::Identity).unwrap();
        assert!(max_abs(&(same.matrix() - a.matrix())) < 1e-10);
    }

    #[test]
    fn matrix_fn_ln_domain_error() {
        let a = HermitianOperator::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            matrix_function(&a, SpectralFn::Ln),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn tensor_trace_multiplicative() {
        let mut rng = RngStream::new(14, 0).rng();
        let a = random_hermitian(3, 1.0, &mut rng);
        let b = random_hermitian(2, 1.0, &mut rng);
        let t = a.tensor(&b);
        let lhs = t.matrix().trace();
        let rhs = a.matrix().trace() * b.matrix().trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn tensor_then_partial_trace_recovers_state() {
        let mut rng = RngStream::new(15, 0).rng();
        let rho = random_density(2, 2, &mut rng);
        let gamma = random_density(3, 3, &mut rng);
        let joint = rho.tensor(&gamma);
        let back = joint.partial_trace(&[2, 3], &[0]).unwrap();
        assert!(state_distance(&back, &rho) < 1e-12);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let mut bell = CMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                bell[(i, j)] = C64::new(0.5, 0.0);
            }
        }
        let rho = DensityMatrix::new(bell).unwrap();
        let m = rho.partial_trace(&[2, 2], &[0]).unwrap();
        assert!(state_distance(&m, &DensityMatrix::maximally_mixed(2)) < 1e-14);
    }

    #[test]
    fn trace_norm_basics() {
        let mut rng = RngStream::new(16, 0).rng();
        let rho = random_density(4, 2, &mut rng);
        assert!((rho.trace_norm() - 1.0).abs() < 1e-10);
        let diff = HermitianOperator::from_diagonal(&[1.0, -1.0]);
        assert!((diff.trace_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn support_projector_cases() {
        let mut rng = RngStream::new(17, 0).rng();
        let full = random_density(3, 3, &mut rng);
        let p = full.support_projector(tol::SUPP_REL);
        assert!(max_abs(&(p.matrix() - ops::identity(3))) < 1e-10);

        let pure = DensityMatrix::pure_basis_state(2, 0);
        let p = pure.support_projector(tol::SUPP_REL);
        assert!((p.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(p.matrix()[(1, 1)].norm() < 1e-12);

        // rank-3 state in dimension 5: projector rank equals eigenvalue count
        let low = random_density(5, 3, &mut rng);
        let p = low.support_projector(tol::SUPP_REL);
        let rank = ops::trace_re(p.matrix()).round() as usize;
        assert_eq!(rank, 3);
        // idempotent and Hermitian
        let pm = p.matrix();
        assert!(max_abs(&(pm * pm - pm)) < 1e-10);
    }

    #[test]
    fn projector_spectrum_threshold_counts() {
        let mut rng = RngStream::new(18, 0).rng();
        for _ in 0..10 {
            let r: usize = rng.random_range(1..=5);
            let rho = random_density(5, r, &mut rng);
            assert_eq!(rho.support_rank(), r);
        }
    }
}
