//! Reproducible random sampling of states, observables and unitaries.
//!
//! All randomness flows through [`RngStream`]: a `(master_seed,
//! stream_index)` pair that names one independent ChaCha stream. The same
//! pair always yields the same sample sequence, which is what makes harness
//! reports replayable and schedule-independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ops::{self, CMatrix, C64};
use super::{eig_hermitian_raw, DensityMatrix, HermitianOperator};

/// Coordinates of one reproducible randomness stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random state of the given rank via the Ginibre construction
/// `G G† / Tr(G G†)` with `G` of shape `dim x rank`.
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    assert!(rank >= 1 && rank <= dim, "rank must be in 1..=dim");
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.map(|z| z / tr)).expect("Ginibre construction yields a state")
}

/// Random Hermitian operator `scale * (G + G†)/2` with Ginibre `G`.
pub fn random_hermitian(dim: usize, scale: f64, rng: &mut impl Rng) -> HermitianOperator {
    let g = ginibre(dim, dim, rng);
    let h = ops::hermitian_part(&g).map(|z| z * scale);
    HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase fix that
/// makes the distribution uniform.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random isometry `V : C^cols -> C^rows` (`V† V = I`), `rows >= cols`.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(rows >= cols);
    let u = random_unitary(rows, rng);
    u.columns(0, cols).into_owned()
}

/// Euclidean projection of a Hermitian matrix onto the density matrices:
/// eigenvalues are projected onto the probability simplex.
pub fn project_to_density(m: &CMatrix) -> DensityMatrix {
    let herm = ops::hermitian_part(m);
    let spec = eig_hermitian_raw(&herm);
    let lam = simplex_projection(&spec.eigenvalues);
    let d = lam.len();
    let diag = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(lam[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mat = &spec.eigenvectors * diag * spec.eigenvectors.adjoint();
    DensityMatrix::new(ops::hermitian_part(&mat)).expect("simplex projection yields a state")
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &val) in sorted.iter().enumerate() {
        cumsum += val;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if val - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
