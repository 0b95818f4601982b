//! Raw operations on dense complex matrices.
//!
//! Everything here works on bare [`CMatrix`] values; the typed wrappers in
//! the parent module re-expose the state/observable-level variants.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-abs deviation from Hermiticity, `max_ij |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Matrix unit `|i><j|`.
pub fn basis_matrix(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Kronecker product, row-major index convention: factor order is preserved
/// and the second factor varies fastest.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Composite row-major index for a multi-factor space.
///
/// `dims` are the factor dimensions in order; `idx` the per-factor indices.
fn composite_index(dims: &[usize], idx: &[usize]) -> usize {
    let mut out = 0;
    for (d, i) in dims.iter().zip(idx) {
        out = out * d + i;
    }
    out
}

fn unrank(mut x: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for f in (0..dims.len()).rev() {
        idx[f] = x % dims[f];
        x /= dims[f];
    }
    idx
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `dims` are the tensor factor dimensions whose product must equal the
/// matrix dimension; `keep` lists factor positions to retain, in their
/// original order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch(m.nrows(), total));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidConfig(format!(
            "keep index out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&f| dims[f]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&f| dims[f]).collect();
    let dk: usize = keep_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // Reassemble a full composite index from kept and traced sub-indices.
    let full_index = |k: usize, t: usize| -> usize {
        let ki = unrank(k, &keep_dims);
        let ti = unrank(t, &traced_dims);
        let mut idx = vec![0; dims.len()];
        for (pos, &f) in keep.iter().enumerate() {
            idx[f] = ki[pos];
        }
        for (pos, &f) in traced.iter().enumerate() {
            idx[f] = ti[pos];
        }
        composite_index(dims, &idx)
    };

    let mut out = CMatrix::zeros(dk, dk);
    for kr in 0..dk {
        for kc in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(full_index(kr, t), full_index(kc, t))];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(out)
}

/// Row-major flatten of a `rows x cols` matrix into a vector, used for the
/// Kraus <-> Choi correspondence `w[a*cols + i] = K[a, i]`.
pub fn vec_row_major(m: &CMatrix) -> Vec<C64> {
    let mut v = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            v.push(m[(r, c)]);
        }
    }
    v
}

/// Inverse of [`vec_row_major`].
pub fn unvec_row_major(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, c| v[r * cols + c])
}

/// Max-abs entry of the commutator `[a, b]`.
pub fn commutator_defect(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity_dims() {
        let a = identity(2);
        let b = identity(3);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 6);
        assert!(max_abs(&(k - identity(6))) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.3 * i as f64));
        let a = hermitian_part(&a);
        let b = identity(3).map(|z| z / c(3.0, 0.0));
        let prod = kron(&a, &b);
        let back = partial_trace(&prod, &[2, 3], &[0]).unwrap();
        assert!(max_abs(&(back - &a)) < 1e-14);
    }

    #[test]
    fn partial_trace_sequential_equals_joint() {
        let dims = [2, 2, 3];
        let total: usize = dims.iter().product();
        let g = CMatrix::from_fn(total, total, |i, j| {
            c((i * 7 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.02)
        });
        let m = hermitian_part(&g);
        let joint = partial_trace(&m, &dims, &[1]).unwrap();
        let step1 = partial_trace(&m, &dims, &[0, 1]).unwrap();
        let step2 = partial_trace(&step1, &[2, 2], &[1]).unwrap();
        assert!(max_abs(&(joint - step2)) < 1e-12);
    }

    #[test]
    fn vec_unvec_round_trip() {
        let m = CMatrix::from_fn(3, 2, |i, j| c(i as f64, j as f64));
        let v = vec_row_major(&m);
        assert_eq!(v[1], c(0.0, 1.0)); // row 0, col 1
        let back = unvec_row_major(&v, 3, 2);
        assert!(max_abs(&(back - m)) < 1e-15);
    }

    #[test]
    fn adjointness_of_tensor_and_partial_trace() {
        // Tr((X (x) I) eta) = Tr(X Tr_2(eta))
        let x = hermitian_part(&CMatrix::from_fn(2, 2, |i, j| {
            c((i + j) as f64, i as f64 - j as f64)
        }));
        let eta = hermitian_part(&CMatrix::from_fn(6, 6, |i, j| {
            c((i * j) as f64 * 0.1, 0.05 * i as f64)
        }));
        let lhs = (kron(&x, &identity(3)) * &eta).trace();
        let rhs = (&x * partial_trace(&eta, &[2, 3], &[0]).unwrap()).trace();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}
