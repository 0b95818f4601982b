//! JSON interchange format for complex matrices.
//!
//! `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major. This is the format
//! the CLI and the test fixtures speak.

use serde::{Deserialize, Serialize};

use super::ops::{CMatrix, C64};
use super::{DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let row = |part: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| part(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: n,
            re: row(|z| z.re),
            im: row(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidConfig("matrix dim must be positive".into()));
        }
        let shape_ok = |rows: &[Vec<f64>]| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::InvalidConfig(format!(
                "matrix payload does not match dim {n}"
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl From<&HermitianOperator> for MatrixJson {
    fn from(op: &HermitianOperator) -> Self {
        Self::from_matrix(op.matrix())
    }
}

impl From<&DensityMatrix> for MatrixJson {
    fn from(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.matrix())
    }
}

impl TryFrom<&MatrixJson> for HermitianOperator {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        HermitianOperator::new(j.to_matrix()?)
    }
}

impl TryFrom<&MatrixJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        DensityMatrix::new(j.to_matrix()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, random_density, RngStream};

    #[test]
    fn round_trip_is_lossless() {
        let mut rng = RngStream::new(3, 0).rng();
        let rho = random_density(3, 2, &mut rng);
        let json = MatrixJson::from(&rho);
        let text = serde_json::to_string(&json).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let rho2 = DensityMatrix::try_from(&back).unwrap();
        // serde_json emits shortest round-trip decimals, so this is bit exact
        assert!(max_abs(&(rho2.matrix() - rho.matrix())) == 0.0);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let bad = MatrixJson {
            dim: 2,
            re: vec![vec![1.0, 0.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        assert!(bad.to_matrix().is_err());
    }
}
