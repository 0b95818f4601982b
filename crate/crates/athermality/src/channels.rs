//! Quantum channels (CPTP maps) in Kraus form, with Choi-matrix conversion.
//!
//! Choi convention: `J(T) = sum_ij T(|i><j|) (x) |i><j|` on `H_out (x) H_in`,
//! unnormalized (`Tr J = dim_in`). Trace preservation then reads
//! `Tr_out J = I_in`, and the action recovers as
//! `T(rho) = Tr_in( J (I (x) rho^T) )`. The unnormalized convention keeps the
//! feasibility solver's constraints as exact affine equalities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ops::{self, CMatrix, C64};
use crate::linalg::{self, random_isometry, DensityMatrix};
use crate::tol;

/// Completely positive trace-preserving map between finite-dimensional
/// spaces, stored as Kraus operators.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    /// Builds a channel from Kraus operators, verifying the completeness
    /// relation `sum_k K_k† K_k = I` within [`tol::CPTP_TOL`].
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| {
            Error::InvalidDims("a channel needs at least one Kraus operator".into())
        })?;
        let (dim_out, dim_in) = (first.nrows(), first.ncols());
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidDims("zero-dimensional Kraus operator".into()));
        }
        for k in &kraus {
            if k.nrows() != dim_out || k.ncols() != dim_in {
                return Err(Error::InvalidDims(
                    "Kraus operators must share one shape".into(),
                ));
            }
        }
        let mut completeness = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            completeness += k.adjoint() * k;
        }
        let defect = ops::max_abs(&(completeness - ops::identity(dim_in)));
        if defect > tol::CPTP_TOL {
            return Err(Error::NotCptp(format!(
                "completeness residual {defect:.3e}"
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Identity channel.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![ops::identity(dim)],
        }
    }

    /// Conjugation by a unitary (or isometry).
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Completely depolarizing channel `rho -> I/dim_out`.
    pub fn depolarizing(dim_in: usize, dim_out: usize) -> Self {
        let scale = C64::new((1.0 / dim_out as f64).sqrt(), 0.0);
        let mut kraus = Vec::with_capacity(dim_in * dim_out);
        for a in 0..dim_out {
            for i in 0..dim_in {
                let mut k = CMatrix::zeros(dim_out, dim_in);
                k[(a, i)] = scale;
                kraus.push(k);
            }
        }
        Self {
            dim_in,
            dim_out,
            kraus,
        }
    }

    /// Channel that discards its input and outputs the fixed state `gamma`.
    pub fn replacer(dim_in: usize, gamma: &DensityMatrix) -> Self {
        let spec = gamma.spectrum();
        let mut kraus = Vec::new();
        for (e, &w) in spec.eigenvalues.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let psi = spec.eigenvectors.column(e);
            for i in 0..dim_in {
                // sqrt(w) |psi><i|
                let mut k = CMatrix::zeros(gamma.dim(), dim_in);
                for r in 0..gamma.dim() {
                    k[(r, i)] = psi[r] * w.sqrt();
                }
                kraus.push(k);
            }
        }
        Self {
            dim_in,
            dim_out: gamma.dim(),
            kraus,
        }
    }

    /// Channel `rho -> rho (x) gamma`.
    pub fn append_state(dim_in: usize, gamma: &DensityMatrix) -> Self {
        let spec = gamma.spectrum();
        let mut kraus = Vec::new();
        for (e, &w) in spec.eigenvalues.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let psi = spec.eigenvectors.column(e);
            // sqrt(w) (I (x) |psi>)
            let mut k = CMatrix::zeros(dim_in * gamma.dim(), dim_in);
            for i in 0..dim_in {
                for r in 0..gamma.dim() {
                    k[(i * gamma.dim() + r, i)] = psi[r] * w.sqrt();
                }
            }
            kraus.push(k);
        }
        Self {
            dim_in,
            dim_out: dim_in * gamma.dim(),
            kraus,
        }
    }

    /// Channel tracing out the second factor of a bipartite system.
    pub fn trace_out_second(dim_keep: usize, dim_traced: usize) -> Self {
        let mut kraus = Vec::with_capacity(dim_traced);
        for b in 0..dim_traced {
            // I (x) <b|
            let mut k = CMatrix::zeros(dim_keep, dim_keep * dim_traced);
            for i in 0..dim_keep {
                k[(i, i * dim_traced + b)] = C64::new(1.0, 0.0);
            }
            kraus.push(k);
        }
        Self {
            dim_in: dim_keep * dim_traced,
            dim_out: dim_keep,
            kraus,
        }
    }

    /// Applies the channel to an arbitrary matrix (linear extension of the
    /// action on states).
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<CMatrix> {
        if m.nrows() != self.dim_in || m.ncols() != self.dim_in {
            return Err(Error::DimensionMismatch(m.nrows(), self.dim_in));
        }
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        Ok(out)
    }

    /// Applies the channel to a state; the output is validated as a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_matrix(rho.matrix())?;
        DensityMatrix::new(out)
    }

    /// Convex mixture of channels with matching dimensions; weights must be
    /// nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &QuantumChannel)]) -> Result<Self> {
        let (first_weight_sum, first) = parts
            .split_first()
            .map(|(head, _)| (parts.iter().map(|(w, _)| *w).sum::<f64>(), head.1))
            .ok_or_else(|| Error::InvalidDims("mixture of zero channels".into()))?;
        if (first_weight_sum - 1.0).abs() > 1e-12 || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidConfig(
                "mixture weights must be nonnegative and sum to one".into(),
            ));
        }
        let mut kraus = Vec::new();
        for (weight, part) in parts {
            if part.dim_in != first.dim_in || part.dim_out != first.dim_out {
                return Err(Error::DimensionMismatch(part.dim_in, first.dim_in));
            }
            if *weight == 0.0 {
                continue;
            }
            for k in &part.kraus {
                kraus.push(k.map(|z| z * weight.sqrt()));
            }
        }
        QuantumChannel::new(kraus)
    }

    /// Choi matrix `J = sum_k vec(K_k) vec(K_k)†` on `H_out (x) H_in`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim_out * self.dim_in;
        let mut j = CMatrix::zeros(d, d);
        for k in &self.kraus {
            let w = ops::vec_row_major(k);
            for r in 0..d {
                for c in 0..d {
                    j[(r, c)] += w[r] * w[c].conj();
                }
            }
        }
        j
    }
}

/// Choi matrix of a channel (the unnormalized convention above).
pub fn kraus_to_choi(t: &QuantumChannel) -> CMatrix {
    t.choi()
}

/// Extracts Kraus operators from a Choi matrix and rebuilds the channel.
///
/// Eigenvalues below `CHOI_RANK_REL * lambda_max` are discarded; the
/// completeness and positivity invariants are then re-verified, so a
/// non-CPTP Choi matrix is rejected rather than silently repaired.
pub fn choi_to_kraus(j: &CMatrix, dim_in: usize, dim_out: usize) -> Result<QuantumChannel> {
    if j.nrows() != dim_in * dim_out || j.ncols() != dim_in * dim_out {
        return Err(Error::DimensionMismatch(j.nrows(), dim_in * dim_out));
    }
    let herm_defect = ops::hermiticity_defect(j);
    if herm_defect > tol::CPTP_TOL {
        return Err(Error::NotCptp(format!(
            "Choi matrix not Hermitian (defect {herm_defect:.3e})"
        )));
    }
    let spec = linalg::eig_hermitian_raw(&ops::hermitian_part(j));
    let lam_max = spec.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    if spec.eigenvalues[0] < -tol::CPTP_TOL * lam_max.max(1.0) {
        return Err(Error::NotCptp(format!(
            "Choi matrix has negative eigenvalue {:.3e}",
            spec.eigenvalues[0]
        )));
    }
    let cutoff = tol::CHOI_RANK_REL * lam_max;
    let mut kraus = Vec::new();
    for (k, &lam) in spec.eigenvalues.iter().enumerate() {
        if lam <= cutoff {
            continue;
        }
        let v = spec.eigenvectors.column(k);
        let w: Vec<C64> = v.iter().map(|z| z * lam.sqrt()).collect();
        kraus.push(ops::unvec_row_major(&w, dim_out, dim_in));
    }
    QuantumChannel::new(kraus)
}

/// Composition `t2 after t1`.
pub fn compose(t2: &QuantumChannel, t1: &QuantumChannel) -> Result<QuantumChannel> {
    if t2.dim_in != t1.dim_out {
        return Err(Error::DimensionMismatch(t2.dim_in, t1.dim_out));
    }
    let mut kraus = Vec::with_capacity(t1.kraus.len() * t2.kraus.len());
    for k2 in &t2.kraus {
        for k1 in &t1.kraus {
            kraus.push(k2 * k1);
        }
    }
    Ok(QuantumChannel {
        dim_in: t1.dim_in,
        dim_out: t2.dim_out,
        kraus,
    })
}

/// Tensor product channel `t1 (x) t2`.
pub fn tensor_channel(t1: &QuantumChannel, t2: &QuantumChannel) -> QuantumChannel {
    let mut kraus = Vec::with_capacity(t1.kraus.len() * t2.kraus.len());
    for k1 in &t1.kraus {
        for k2 in &t2.kraus {
            kraus.push(ops::kron(k1, k2));
        }
    }
    QuantumChannel {
        dim_in: t1.dim_in * t2.dim_in,
        dim_out: t1.dim_out * t2.dim_out,
        kraus,
    }
}

/// Unitary swap channel on `H_A (x) H_B`, sending `rho (x) gamma` to
/// `gamma (x) rho`.
pub fn swap_channel(dim_a: usize, dim_b: usize) -> QuantumChannel {
    let d = dim_a * dim_b;
    let mut u = CMatrix::zeros(d, d);
    for a in 0..dim_a {
        for b in 0..dim_b {
            u[(b * dim_a + a, a * dim_b + b)] = C64::new(1.0, 0.0);
        }
    }
    QuantumChannel {
        dim_in: d,
        dim_out: d,
        kraus: vec![u],
    }
}

/// Random channel in Stinespring form: a Haar isometry
/// `V : H_in -> H_out (x) H_env` followed by tracing out the environment.
pub fn random_channel(
    dim_in: usize,
    dim_out: usize,
    env_dim: usize,
    rng: &mut impl Rng,
) -> Result<QuantumChannel> {
    if env_dim == 0 || dim_out * env_dim < dim_in {
        return Err(Error::InvalidDims(format!(
            "need dim_out * env_dim >= dim_in, got {dim_out} * {env_dim} < {dim_in}"
        )));
    }
    let v = random_isometry(dim_out * env_dim, dim_in, rng);
    let mut kraus = Vec::with_capacity(env_dim);
    for e in 0..env_dim {
        // K_e = (I (x) <e|) V with the out-major row layout
        let k = CMatrix::from_fn(dim_out, dim_in, |a, i| v[(a * env_dim + e, i)]);
        kraus.push(k);
    }
    QuantumChannel::new(kraus)
}

/// Outcome of a support-containment sweep (rank-decreasing channel lemma).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportContainmentReport {
    pub projector_rank: usize,
    pub inputs_checked: usize,
    pub max_violation: f64,
    pub passed: bool,
}

/// Checks that every channel output lives inside the support of `T(sigma)`
/// for a full-rank `sigma`.
///
/// The sweep is deterministic over the matrix units `|i><i|`, the real
/// combinations `(|i>+|j>)/sqrt(2)` and the imaginary combinations
/// `(|i>+i|j>)/sqrt(2)` — together these span all Hermitian inputs, so the
/// sweep is conclusive by linearity — plus `samples` random states.
pub fn check_support_containment(
    t: &QuantumChannel,
    sigma: &DensityMatrix,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<SupportContainmentReport> {
    if sigma.dim() != t.dim_in() {
        return Err(Error::DimensionMismatch(sigma.dim(), t.dim_in()));
    }
    let lam_min = sigma.min_eigenvalue();
    if lam_min <= tol::SUPP_REL {
        return Err(Error::SigmaNotFullRank(lam_min));
    }
    let image = t.apply(sigma)?;
    let p = image.support_projector(tol::SUPP_REL).into_matrix();
    let q = ops::identity(t.dim_out()) - &p;

    let mut max_violation = 0.0f64;
    let mut inputs_checked = 0usize;
    let record = |out: &CMatrix, worst: &mut f64| {
        let outside = ops::max_abs(&(&q * out * &q));
        let cross = ops::max_abs(&(&q * out * &p));
        *worst = worst.max(outside).max(cross);
    };

    let d = t.dim_in();
    for i in 0..d {
        let out = t.apply_matrix(&ops::basis_matrix(d, i, i))?;
        record(&out, &mut max_violation);
        inputs_checked += 1;
        for j in (i + 1)..d {
            for &imag in &[false, true] {
                let mut v = CMatrix::zeros(d, 1);
                v[(i, 0)] = C64::new(1.0 / 2f64.sqrt(), 0.0);
                v[(j, 0)] = if imag {
                    C64::new(0.0, 1.0 / 2f64.sqrt())
                } else {
                    C64::new(1.0 / 2f64.sqrt(), 0.0)
                };
                let state = &v * v.adjoint();
                let out = t.apply_matrix(&state)?;
                record(&out, &mut max_violation);
                inputs_checked += 1;
            }
        }
    }
    for _ in 0..samples {
        let rho = linalg::random_density(d, d, rng);
        let out = t.apply_matrix(rho.matrix())?;
        record(&out, &mut max_violation);
        inputs_checked += 1;
    }

    Ok(SupportContainmentReport {
        projector_rank: ops::trace_re(&p).round() as usize,
        inputs_checked,
        max_violation,
        passed: max_violation <= tol::SUPPORT_CONTAINMENT_TOL,
    })
}

/// JSON interchange form: `{"dim_in", "dim_out", "kraus": [matrix, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<KrausJson>,
}

/// A possibly rectangular complex matrix in the row-major re/im format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(t: &QuantumChannel) -> Self {
        let kraus = t
            .kraus
            .iter()
            .map(|k| KrausJson {
                rows: k.nrows(),
                cols: k.ncols(),
                re: (0..k.nrows())
                    .map(|i| (0..k.ncols()).map(|j| k[(i, j)].re).collect())
                    .collect(),
                im: (0..k.nrows())
                    .map(|i| (0..k.ncols()).map(|j| k[(i, j)].im).collect())
                    .collect(),
            })
            .collect();
        Self {
            dim_in: t.dim_in,
            dim_out: t.dim_out,
            kraus,
        }
    }
}

impl TryFrom<&ChannelJson> for QuantumChannel {
    type Error = Error;
    fn try_from(j: &ChannelJson) -> Result<Self> {
        let mut kraus = Vec::with_capacity(j.kraus.len());
        for k in &j.kraus {
            if k.re.len() != k.rows || k.re.iter().any(|r| r.len() != k.cols) {
                return Err(Error::InvalidConfig("kraus payload shape mismatch".into()));
            }
            if k.rows != j.dim_out || k.cols != j.dim_in {
                return Err(Error::InvalidDims(
                    "kraus shape disagrees with channel dims".into(),
                ));
            }
            kraus.push(CMatrix::from_fn(k.rows, k.cols, |i, jx| {
                C64::new(k.re[i][jx], k.im[i][jx])
            }));
        }
        QuantumChannel::new(kraus)
    }
}

/// Verifies the full CPTP invariant set of a channel: Kraus completeness,
/// Choi positivity, `Tr_out J = I_in`, and agreement between the Kraus-side
/// and Choi-side action on random inputs. Returns the worst residual.
pub fn verify_channel_invariants(t: &QuantumChannel, rng: &mut impl Rng) -> Result<f64> {
    let mut completeness = CMatrix::zeros(t.dim_in, t.dim_in);
    for k in &t.kraus {
        completeness += k.adjoint() * k;
    }
    let mut worst = ops::max_abs(&(completeness - ops::identity(t.dim_in)));

    let j = t.choi();
    let spec = linalg::eig_hermitian_raw(&ops::hermitian_part(&j));
    worst = worst.max((-spec.eigenvalues[0]).max(0.0));

    let tr_out = ops::partial_trace(&j, &[t.dim_out, t.dim_in], &[1])?;
    worst = worst.max(ops::max_abs(&(tr_out - ops::identity(t.dim_in))));

    // Choi-side action must match the Kraus-side action.
    for _ in 0..3 {
        let rho = linalg::random_density(t.dim_in, t.dim_in, rng);
        let via_kraus = t.apply_matrix(rho.matrix())?;
        let lifted = &j * ops::kron(&ops::identity(t.dim_out), &rho.matrix().transpose());
        let via_choi = ops::partial_trace(&lifted, &[t.dim_out, t.dim_in], &[0])?;
        worst = worst.max(ops::max_abs(&(via_kraus - via_choi)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, random_unitary, state_distance, RngStream};

    #[test]
    fn identity_channel_fixes_states() {
        let mut rng = RngStream::new(21, 0).rng();
        let rho = random_density(3, 3, &mut rng);
        let id = QuantumChannel::identity(3);
        assert!(state_distance(&id.apply(&rho).unwrap(), &rho) < 1e-14);
    }

    #[test]
    fn depolarizing_sends_everything_to_uniform() {
        let mut rng = RngStream::new(22, 0).rng();
        let rho = random_density(3, 2, &mut rng);
        let dep = QuantumChannel::depolarizing(3, 3);
        let out = dep.apply(&rho).unwrap();
        assert!(state_distance(&out, &DensityMatrix::maximally_mixed(3)) < 1e-12);
    }

    #[test]
    fn unitary_channel_preserves_spectrum() {
        let mut rng = RngStream::new(23, 0).rng();
        let rho = random_density(4, 3, &mut rng);
        let u = random_unitary(4, &mut rng);
        let t = QuantumChannel::unitary(u).unwrap();
        let out = t.apply(&rho).unwrap();
        let a = rho.spectrum().eigenvalues;
        let b = out.spectrum().eigenvalues;
        let worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }

    #[test]
    fn choi_of_identity_is_scaled_entangled_projector() {
        let t = QuantumChannel::identity(2);
        let j = t.choi();
        // sum_ij |i><j| (x) |i><j| = 2 |Omega><Omega| with |Omega> = (|00>+|11>)/sqrt(2)
        assert!((j[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((j[(0, 3)].re - 1.0).abs() < 1e-14);
        assert!((j[(3, 3)].re - 1.0).abs() < 1e-14);
        assert!((j.trace().re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn depolarizing_choi_is_uniform_product() {
        let t = QuantumChannel::depolarizing(2, 2);
        let j = t.choi();
        let expected = ops::identity(4).map(|z| z * 0.5);
        assert!(ops::max_abs(&(j - expected)) < 1e-12);
    }

    #[test]
    fn choi_round_trip_preserves_action() {
        let mut rng = RngStream::new(24, 0).rng();
        let t = random_channel(3, 2, 2, &mut rng).unwrap();
        let j = kraus_to_choi(&t);
        let t2 = choi_to_kraus(&j, 3, 2).unwrap();
        for _ in 0..5 {
            let rho = random_density(3, 3, &mut rng);
            let a = t.apply(&rho).unwrap();
            let b = t2.apply(&rho).unwrap();
            assert!(state_distance(&a, &b) < tol::CHOI_ACTION_TOL);
        }
    }

    #[test]
    fn random_channel_invariants_hold() {
        let mut rng = RngStream::new(25, 0).rng();
        for _ in 0..20 {
            let t = random_channel(3, 3, 2, &mut rng).unwrap();
            let worst = verify_channel_invariants(&t, &mut rng).unwrap();
            assert!(worst < tol::CPTP_TOL, "invariant residual {worst:.3e}");
            let rho = random_density(3, 3, &mut rng);
            let out = t.apply(&rho).unwrap();
            assert!((ops::trace_re(out.matrix()) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn random_channel_env_one_is_unitary() {
        let mut rng = RngStream::new(26, 0).rng();
        let t = random_channel(3, 3, 1, &mut rng).unwrap();
        assert_eq!(t.kraus().len(), 1);
        let k = &t.kraus()[0];
        assert!(ops::max_abs(&(k.adjoint() * k - ops::identity(3))) < 1e-12);
    }

    #[test]
    fn random_channel_reproducible() {
        let a = random_channel(2, 2, 2, &mut RngStream::new(5, 9).rng()).unwrap();
        let b = random_channel(2, 2, 2, &mut RngStream::new(5, 9).rng()).unwrap();
        for (x, y) in a.kraus().iter().zip(b.kraus()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn swap_exchanges_factors_and_squares_to_identity() {
        let mut rng = RngStream::new(27, 0).rng();
        let rho = random_density(2, 2, &mut rng);
        let gamma = random_density(3, 3, &mut rng);
        let s = swap_channel(2, 3);
        let out = s.apply(&rho.tensor(&gamma)).unwrap();
        assert!(state_distance(&out, &gamma.tensor(&rho)) < 1e-12);

        let s2 = swap_channel(3, 3);
        let joint = random_density(9, 9, &mut rng);
        let twice = s2.apply(&s2.apply(&joint).unwrap()).unwrap();
        assert!(state_distance(&twice, &joint) < 1e-12);
    }

    #[test]
    fn mixture_acts_as_convex_combination() {
        let mut rng = RngStream::new(35, 0).rng();
        let a = random_channel(3, 3, 2, &mut rng).unwrap();
        let b = QuantumChannel::depolarizing(3, 3);
        let mix = QuantumChannel::mixture(&[(0.7, &a), (0.3, &b)]).unwrap();
        let rho = random_density(3, 3, &mut rng);
        let expected = a.apply_matrix(rho.matrix()).unwrap().map(|z| z * 0.7)
            + b.apply_matrix(rho.matrix()).unwrap().map(|z| z * 0.3);
        let got = mix.apply(&rho).unwrap();
        assert!(ops::max_abs(&(got.into_matrix() - expected)) < 1e-12);
        assert!(QuantumChannel::mixture(&[(0.4, &a), (0.3, &b)]).is_err());
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = RngStream::new(28, 0).rng();
        let t1 = random_channel(3, 2, 2, &mut rng).unwrap();
        let t2 = random_channel(2, 2, 2, &mut rng).unwrap();
        let both = compose(&t2, &t1).unwrap();
        let rho = random_density(3, 3, &mut rng);
        let seq = t2.apply(&t1.apply(&rho).unwrap()).unwrap();
        let joint = both.apply(&rho).unwrap();
        assert!(state_distance(&seq, &joint) < 1e-10);
    }

    #[test]
    fn tensor_channel_acts_factorwise() {
        let mut rng = RngStream::new(29, 0).rng();
        let rho = random_density(2, 2, &mut rng);
        let gamma = random_density(2, 2, &mut rng);
        let t = tensor_channel(
            &QuantumChannel::identity(2),
            &QuantumChannel::depolarizing(2, 2),
        );
        let out = t.apply(&rho.tensor(&gamma)).unwrap();
        let expected = rho.tensor(&DensityMatrix::maximally_mixed(2));
        assert!(state_distance(&out, &expected) < 1e-12);
    }

    #[test]
    fn trace_norm_contracts_under_channels() {
        let mut rng = RngStream::new(36, 0).rng();
        for _ in 0..20 {
            let rho = random_density(3, 3, &mut rng);
            let sigma = random_density(3, 3, &mut rng);
            let t = random_channel(3, 3, 2, &mut rng).unwrap();
            let before = state_distance(&rho, &sigma);
            let after = state_distance(&t.apply(&rho).unwrap(), &t.apply(&sigma).unwrap());
            assert!(after <= before + 1e-10, "{after} > {before}");
        }
    }

    #[test]
    fn support_containment_collapse_channel() {
        let mut rng = RngStream::new(30, 0).rng();
        // T(rho) = Tr(rho) |0><0|
        let ground = DensityMatrix::pure_basis_state(3, 0);
        let t = QuantumChannel::replacer(3, &ground);
        let sigma = random_density(3, 3, &mut rng);
        let report = check_support_containment(&t, &sigma, 20, &mut rng).unwrap();
        assert_eq!(report.projector_rank, 1);
        assert!(report.passed);
        assert!(report.max_violation < 1e-12);
    }

    #[test]
    fn support_containment_unitary_is_vacuous() {
        let mut rng = RngStream::new(31, 0).rng();
        let u = random_unitary(3, &mut rng);
        let t = QuantumChannel::unitary(u).unwrap();
        let sigma = random_density(3, 3, &mut rng);
        let report = check_support_containment(&t, &sigma, 10, &mut rng).unwrap();
        assert_eq!(report.projector_rank, 3);
        assert!(report.passed);
    }

    #[test]
    fn support_containment_rank_decreasing() {
        let mut rng = RngStream::new(32, 0).rng();
        // compress to 2 dimensions, then isometrically embed into dim 4
        let squeeze = random_channel(4, 2, 2, &mut rng).unwrap();
        let v = random_isometry(4, 2, &mut rng);
        let embed = QuantumChannel::unitary(v).unwrap();
        let t = compose(&embed, &squeeze).unwrap();
        let sigma = random_density(4, 4, &mut rng);
        let report = check_support_containment(&t, &sigma, 200, &mut rng).unwrap();
        assert_eq!(report.projector_rank, 2);
        assert!(report.passed, "violation {:.3e}", report.max_violation);
    }

    #[test]
    fn sigma_must_be_full_rank() {
        let mut rng = RngStream::new(33, 0).rng();
        let t = QuantumChannel::identity(3);
        let sigma = random_density(3, 2, &mut rng);
        assert!(matches!(
            check_support_containment(&t, &sigma, 1, &mut rng),
            Err(Error::SigmaNotFullRank(_))
        ));
    }

    #[test]
    fn channel_json_round_trip() {
        let mut rng = RngStream::new(34, 0).rng();
        let t = random_channel(2, 3, 2, &mut rng).unwrap();
        let json = ChannelJson::from(&t);
        let text = serde_json::to_string(&json).unwrap();
        let back: ChannelJson = serde_json::from_str(&text).unwrap();
        let t2 = QuantumChannel::try_from(&back).unwrap();
        let rho = random_density(2, 2, &mut rng);
        assert!(state_distance(&t.apply(&rho).unwrap(), &t2.apply(&rho).unwrap()) < 1e-12);
    }

    #[test]
    fn bad_choi_rejected() {
        // a Choi matrix with the wrong partial trace is not CPTP
        let mut j = ops::identity(4);
        j[(0, 0)] = C64::new(3.0, 0.0);
        assert!(choi_to_kraus(&j, 2, 2).is_err());
    }
}
