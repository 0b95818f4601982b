//! Existence of a Gibbs-preserving channel realizing `(rho, H) -> (sigma, K)`
//! at inverse temperature `beta`.
//!
//! Three routes, from cheap to expensive:
//!
//! 1. [`monotone_screen`] — if the target has strictly more athermality than
//!    the source, no Gibbs-preserving channel exists. Rigorous and one-sided.
//! 2. [`classical_gp_feasibility`] — when both sides commute with their
//!    Hamiltonians, the problem reduces to a linear program for a
//!    column-stochastic matrix in the shared eigenbases: an exact verdict
//!    for the diagonal subproblem.
//! 3. [`solve_choi_feasibility`] — Dykstra's alternating projections on the
//!    Choi matrix, cycling the trace-preservation plane, the two action
//!    planes and the PSD cone. A returned witness is always re-verified
//!    independently of the solver loop.
//!
//! `NotFoundWithinBudget` is **not** an infeasibility certificate; the only
//! rigorous negative verdicts are the monotone screen and the commuting LP.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelJson, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::json::MatrixJson;
use crate::linalg::ops::{self, kron, CMatrix, C64};
use crate::linalg::{self, state_distance, DensityMatrix, HermitianOperator, Spectrum};
use crate::thermo::{athermality, gibbs_state, ThermoObject};
use crate::tol;

/// Iteration controls for the Choi-space solver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub residual_tol: f64,
    /// Declare a stall when the best residual improves by less than a factor
    /// of `1e-3` (relative) over this many iterations.
    pub stall_window: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            residual_tol: tol::FEAS_RESIDUAL_TOL,
            stall_window: 200,
        }
    }
}

/// One feasibility query: does a Gibbs-preserving channel map
/// `(rho, H)` to `(sigma, K)` at inverse temperature `beta`?
#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub h: HermitianOperator,
    pub k: HermitianOperator,
    pub beta: f64,
    pub options: SolverOptions,
}

impl FeasibilityProblem {
    pub fn new(
        rho: DensityMatrix,
        sigma: DensityMatrix,
        h: HermitianOperator,
        k: HermitianOperator,
        beta: f64,
    ) -> Result<Self> {
        if rho.dim() != h.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), h.dim()));
        }
        if sigma.dim() != k.dim() {
            return Err(Error::DimensionMismatch(sigma.dim(), k.dim()));
        }
        Ok(Self {
            rho,
            sigma,
            h,
            k,
            beta,
            options: SolverOptions::default(),
        })
    }

    fn dims(&self) -> (usize, usize) {
        (self.rho.dim(), self.sigma.dim())
    }

    /// Both sides commute with their Hamiltonians, so the classical fast
    /// path applies.
    pub fn is_commuting(&self) -> bool {
        ops::commutator_defect(self.rho.matrix(), self.h.matrix()) <= 1e-10
            && ops::commutator_defect(self.sigma.matrix(), self.k.matrix()) <= 1e-10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    /// The target is strictly more athermal than the source.
    InfeasibleByMonotone,
    /// The commuting linear program is infeasible (exact for the diagonal
    /// subproblem).
    InfeasibleByLp,
    /// The projection solver exhausted its budget or stalled. Not a
    /// certificate of infeasibility.
    NotFoundWithinBudget,
}

/// Solver outcome with the residual, iteration count and (for `Feasible`)
/// an independently re-verified witness channel.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub residual: f64,
    pub iterations: usize,
    pub witness: Option<QuantumChannel>,
    /// `DeltaF(target) - DeltaF(source)`; a value above the monotone
    /// tolerance certifies infeasibility.
    pub monotone_gap: f64,
    pub residual_trace: Option<Vec<f64>>,
}

/// `DeltaF_beta(sigma, K) - DeltaF_beta(rho, H)`. Positive beyond tolerance
/// means the transition would create athermality, which no Gibbs-preserving
/// map can do.
pub fn monotone_screen(p: &FeasibilityProblem) -> f64 {
    let src = ThermoObject::new(p.rho.clone(), p.h.clone()).expect("validated dims");
    let tgt = ThermoObject::new(p.sigma.clone(), p.k.clone()).expect("validated dims");
    let df_src = athermality(&src, p.beta).expect_finite("full-rank Gibbs reference");
    let df_tgt = athermality(&tgt, p.beta).expect_finite("full-rank Gibbs reference");
    df_tgt - df_src
}

// ---------------------------------------------------------------------------
// Dykstra projections in Choi space
// ---------------------------------------------------------------------------

/// Real orthonormal basis of the Hermitian `d x d` matrices under
/// `<A, B> = Tr(A B)`.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        basis.push(ops::basis_matrix(d, i, i));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(i, j)] = C64::new(inv_sqrt2, 0.0);
            sym[(j, i)] = C64::new(inv_sqrt2, 0.0);
            basis.push(sym);
            let mut asym = CMatrix::zeros(d, d);
            asym[(i, j)] = C64::new(0.0, inv_sqrt2);
            asym[(j, i)] = C64::new(0.0, -inv_sqrt2);
            basis.push(asym);
        }
    }
    basis
}

fn herm_coords(m: &CMatrix, basis: &[CMatrix]) -> Vec<f64> {
    basis.iter().map(|b| ops::hs_inner(b, m).re).collect()
}

fn herm_from_coords(coords: &[f64], basis: &[CMatrix], d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for (c, b) in coords.iter().zip(basis) {
        out += b.map(|z| z * *c);
    }
    out
}

/// Precomputed constraint data. The Choi matrix lives on
/// `H_out (x) H_in` with `Tr J = dim_in`; the channel action recovers as
/// `T(x) = Tr_in( J (I (x) x^T) )`.
///
/// The three affine constraints (trace preservation, the Gibbs action and
/// the state action) are merged into one affine set, projected in closed
/// form via the adjoint of the combined constraint map and a pseudo-inverse
/// of its Gram matrix, assembled once per problem. The Gram matrix is
/// singular by exactly the two trace redundancies (`Tr T(omega) = 1` and
/// `Tr T(rho) = 1` both follow from trace preservation), which the
/// pseudo-inverse absorbs.
struct ChoiConstraints {
    dout: usize,
    din: usize,
    // transposed probe states for the action map
    rho_t: CMatrix,
    omega_in_t: CMatrix,
    sigma: CMatrix,
    omega_out: CMatrix,
    basis_in: Vec<CMatrix>,
    basis_out: Vec<CMatrix>,
    gram_pinv: nalgebra::DMatrix<f64>,
}

impl ChoiConstraints {
    fn new(p: &FeasibilityProblem) -> Self {
        let (din, dout) = p.dims();
        let omega_in = gibbs_state(p.beta, &p.h);
        let omega_out = gibbs_state(p.beta, &p.k);
        let mut cons = Self {
            dout,
            din,
            rho_t: p.rho.matrix().transpose(),
            omega_in_t: omega_in.matrix().transpose(),
            sigma: p.sigma.matrix().clone(),
            omega_out: omega_out.matrix().clone(),
            basis_in: hermitian_basis(din),
            basis_out: hermitian_basis(dout),
            gram_pinv: nalgebra::DMatrix::zeros(0, 0),
        };
        cons.gram_pinv = cons.assemble_gram_pinv();
        cons
    }

    fn constraint_dim(&self) -> usize {
        self.din * self.din + 2 * self.dout * self.dout
    }

    /// `T(x) = Tr_in( J (I (x) x^T) )` given the already-transposed probe.
    fn action(&self, j: &CMatrix, probe_t: &CMatrix) -> CMatrix {
        let lifted = j * kron(&ops::identity(self.dout), probe_t);
        ops::partial_trace(&lifted, &[self.dout, self.din], &[0])
            .expect("dims fixed by construction")
    }

    /// The combined constraint map `Phi(J) = (Tr_out J, T(omega), T(rho))`.
    fn forward(&self, j: &CMatrix) -> (CMatrix, CMatrix, CMatrix) {
        let tp = ops::partial_trace(j, &[self.dout, self.din], &[1])
            .expect("dims fixed by construction");
        let gibbs = self.action(j, &self.omega_in_t);
        let state = self.action(j, &self.rho_t);
        (tp, gibbs, state)
    }

    /// The adjoint `Phi†(X, Y, Z) = I (x) X + Y (x) omega^T + Z (x) rho^T`.
    fn adjoint(&self, x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
        kron(&ops::identity(self.dout), x) + kron(y, &self.omega_in_t) + kron(z, &self.rho_t)
    }

    fn triple_coords(&self, x: &CMatrix, y: &CMatrix, z: &CMatrix) -> nalgebra::DVector<f64> {
        let mut v = herm_coords(x, &self.basis_in);
        v.extend(herm_coords(y, &self.basis_out));
        v.extend(herm_coords(z, &self.basis_out));
        nalgebra::DVector::from_vec(v)
    }

    fn triple_from_coords(&self, v: &nalgebra::DVector<f64>) -> (CMatrix, CMatrix, CMatrix) {
        let ni = self.din * self.din;
        let no = self.dout * self.dout;
        let x = herm_from_coords(&v.as_slice()[..ni], &self.basis_in, self.din);
        let y = herm_from_coords(&v.as_slice()[ni..ni + no], &self.basis_out, self.dout);
        let z = herm_from_coords(&v.as_slice()[ni + no..], &self.basis_out, self.dout);
        (x, y, z)
    }

    /// Gram matrix of the combined constraint map in the Hermitian bases,
    /// pseudo-inverted once.
    fn assemble_gram_pinv(&self) -> nalgebra::DMatrix<f64> {
        let n = self.constraint_dim();
        let ni = self.din * self.din;
        let no = self.dout * self.dout;
        let mut gram = nalgebra::DMatrix::<f64>::zeros(n, n);
        for col in 0..n {
            let mut unit = nalgebra::DVector::<f64>::zeros(n);
            unit[col] = 1.0;
            let (x, y, z) = self.triple_from_coords(&unit);
            let lifted = self.adjoint(&x, &y, &z);
            let (gx, gy, gz) = self.forward(&lifted);
            let out = self.triple_coords(&gx, &gy, &gz);
            gram.set_column(col, &out);
        }
        debug_assert!(ni + 2 * no == n);
        // symmetric PSD; pseudo-invert through its eigendecomposition
        let eig = gram.symmetric_eigen();
        let lam_max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let cutoff = 1e-12 * lam_max.max(1.0);
        let mut pinv = nalgebra::DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let lam = eig.eigenvalues[k];
            if lam > cutoff {
                let v = eig.eigenvectors.column(k);
                pinv += v * v.transpose() / lam;
            }
        }
        pinv
    }

    /// Orthogonal projection onto the combined affine set
    /// `{ J : Tr_out J = I, T(omega_in) = omega_out, T(rho) = sigma }`.
    fn project_affine(&self, j: &CMatrix) -> CMatrix {
        let (tp, gibbs, state) = self.forward(j);
        let dx = ops::identity(self.din) - tp;
        let dy = &self.omega_out - gibbs;
        let dz = &self.sigma - state;
        let defect = self.triple_coords(&dx, &dy, &dz);
        let solved = &self.gram_pinv * defect;
        let (x, y, z) = self.triple_from_coords(&solved);
        j + self.adjoint(&x, &y, &z)
    }

    /// Euclidean projection onto the PSD cone.
    fn project_psd(&self, j: &CMatrix) -> CMatrix {
        let spec = linalg::eig_hermitian_raw(&ops::hermitian_part(j));
        spec.apply(|l| l.max(0.0))
    }

    /// Worst max-abs violation of the three affine constraints.
    fn residual(&self, j: &CMatrix) -> f64 {
        let (tp, gibbs, state) = self.forward(j);
        let r_tp = ops::max_abs(&(tp - ops::identity(self.din)));
        let r_gibbs = ops::max_abs(&(gibbs - &self.omega_out));
        let r_state = ops::max_abs(&(state - &self.sigma));
        r_tp.max(r_gibbs).max(r_state)
    }
}

/// Extracts Kraus operators from a PSD Choi iterate and corrects them to an
/// exactly trace-preserving set (`K_k <- K_k M^{-1/2}` with
/// `M = sum K† K`).
fn witness_from_choi(j: &CMatrix, din: usize, dout: usize) -> Result<QuantumChannel> {
    let spec: Spectrum = linalg::eig_hermitian_raw(&ops::hermitian_part(j));
    let lam_max = spec.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cutoff = tol::CHOI_RANK_REL * lam_max;
    let mut kraus: Vec<CMatrix> = Vec::new();
    for (idx, &lam) in spec.eigenvalues.iter().enumerate() {
        if lam <= cutoff {
            continue;
        }
        let v = spec.eigenvectors.column(idx);
        let w: Vec<C64> = v.iter().map(|z| z * lam.sqrt()).collect();
        kraus.push(ops::unvec_row_major(&w, dout, din));
    }
    if kraus.is_empty() {
        return Err(Error::NotCptp("Choi iterate has no positive part".into()));
    }
    let mut m = CMatrix::zeros(din, din);
    for k in &kraus {
        m += k.adjoint() * k;
    }
    let m_spec = linalg::eig_hermitian_raw(&ops::hermitian_part(&m));
    if m_spec.eigenvalues[0] <= 0.0 {
        return Err(Error::NotCptp(format!(
            "completeness operator singular (min eigenvalue {:.3e})",
            m_spec.eigenvalues[0]
        )));
    }
    let m_inv_sqrt = m_spec.apply(|l| 1.0 / l.sqrt());
    let corrected: Vec<CMatrix> = kraus.into_iter().map(|k| k * &m_inv_sqrt).collect();
    QuantumChannel::new(corrected)
}

/// Decides feasibility by Dykstra's alternating projections on the Choi
/// matrix, over the PSD cone and the three affine constraint planes.
///
/// Terminates `Feasible` when the combined residual of the PSD iterate
/// drops below `options.residual_tol`; otherwise `NotFoundWithinBudget`
/// on stall or budget exhaustion.
pub fn solve_choi_feasibility(p: &FeasibilityProblem) -> Result<FeasibilityReport> {
    solve_choi_with_trace(p, false)
}

/// Same as [`solve_choi_feasibility`], optionally recording the residual at
/// every iteration.
pub fn solve_choi_with_trace(
    p: &FeasibilityProblem,
    keep_trace: bool,
) -> Result<FeasibilityReport> {
    let (din, dout) = p.dims();
    for d in [din, dout] {
        if d > tol::MAX_FEAS_DIM {
            return Err(Error::DimensionTooLarge(d, tol::MAX_FEAS_DIM));
        }
    }
    let cons = ChoiConstraints::new(p);
    let monotone_gap = monotone_screen(p);
    let d = dout * din;

    // Start from the completely depolarizing channel: PSD, trace preserving,
    // and biased toward no prior information.
    let mut x: CMatrix = ops::identity(d).map(|z| z / dout as f64);
    let mut corrections: [CMatrix; 2] = std::array::from_fn(|_| CMatrix::zeros(d, d));

    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_at_window_start = f64::INFINITY;

    for iter in 1..=p.options.max_iter {
        for (set, correction) in corrections.iter_mut().enumerate() {
            let input = &x + &*correction;
            let projected = match set {
                0 => cons.project_affine(&input),
                _ => cons.project_psd(&input),
            };
            *correction = input - &projected;
            x = projected;
        }
        // x is the PSD-projected iterate here
        let r = cons.residual(&x);
        if keep_trace {
            trace.push(r);
        }
        best = best.min(r);

        if r <= p.options.residual_tol {
            if let Ok(witness) = witness_from_choi(&x, din, dout) {
                if verify_witness(&witness, p) <= tol::WITNESS_TOL {
                    return Ok(FeasibilityReport {
                        verdict: Verdict::Feasible,
                        residual: r,
                        iterations: iter,
                        witness: Some(witness),
                        monotone_gap,
                        residual_trace: keep_trace.then_some(trace),
                    });
                }
            }
            // a witness that fails independent re-verification does not count
            return Ok(FeasibilityReport {
                verdict: Verdict::NotFoundWithinBudget,
                residual: r,
                iterations: iter,
                witness: None,
                monotone_gap,
                residual_trace: keep_trace.then_some(trace),
            });
        }

        if iter % p.options.stall_window == 0 {
            let improvement = (best_at_window_start - best) / best_at_window_start.max(1e-300);
            if best_at_window_start.is_finite() && improvement < 1e-3 {
                return Ok(FeasibilityReport {
                    verdict: Verdict::NotFoundWithinBudget,
                    residual: r,
                    iterations: iter,
                    witness: None,
                    monotone_gap,
                    residual_trace: keep_trace.then_some(trace),
                });
            }
            best_at_window_start = best;
        }
    }

    Ok(FeasibilityReport {
        verdict: Verdict::NotFoundWithinBudget,
        residual: best,
        iterations: p.options.max_iter,
        witness: None,
        monotone_gap,
        residual_trace: keep_trace.then_some(trace),
    })
}

/// Worst trace-norm violation of the two action constraints by a candidate
/// witness, computed from scratch.
pub fn verify_witness(witness: &QuantumChannel, p: &FeasibilityProblem) -> f64 {
    let omega_in = gibbs_state(p.beta, &p.h);
    let omega_out = gibbs_state(p.beta, &p.k);
    let act = |input: &DensityMatrix, target: &DensityMatrix| -> f64 {
        match witness.apply(input) {
            Ok(out) => state_distance(&out, target),
            Err(_) => f64::INFINITY,
        }
    };
    act(&p.rho, &p.sigma).max(act(&omega_in, &omega_out))
}

// ---------------------------------------------------------------------------
// Commuting fast path
// ---------------------------------------------------------------------------

/// Simultaneous eigenbasis of a commuting pair `(state, hamiltonian)`:
/// diagonalizes the Hamiltonian, then the state inside each degenerate
/// eigenspace. Returns the basis columns, the Hamiltonian eigenvalues and
/// the state's diagonal probabilities.
fn codiagonalize(
    state: &DensityMatrix,
    ham: &HermitianOperator,
) -> Result<(CMatrix, Vec<f64>, Vec<f64>)> {
    let defect = ops::commutator_defect(state.matrix(), ham.matrix());
    if defect > 1e-10 {
        return Err(Error::NotCommuting(defect));
    }
    let spec = ham.spectrum();
    let d = ham.dim();
    let scale = spec.eigenvalues.iter().fold(1.0f64, |m, &l| m.max(l.abs()));
    let gap_tol = 1e-8 * scale;

    let mut basis = spec.eigenvectors.clone();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (spec.eigenvalues[end] - spec.eigenvalues[start]).abs() <= gap_tol {
            end += 1;
        }
        if end - start > 1 {
            // rotate the degenerate block so the state is diagonal there too
            let block = basis.columns(start, end - start).into_owned();
            let inner = block.adjoint() * state.matrix() * &block;
            let sub = linalg::eig_hermitian_raw(&ops::hermitian_part(&inner));
            let rotated = &block * sub.eigenvectors;
            basis.columns_mut(start, end - start).copy_from(&rotated);
        }
        start = end;
    }

    let probs_mat = basis.adjoint() * state.matrix() * &basis;
    let mut probs = Vec::with_capacity(d);
    for i in 0..d {
        probs.push(probs_mat[(i, i)].re);
    }
    let offdiag = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| probs_mat[(i, j)].norm())
        .fold(0.0f64, f64::max);
    if offdiag > 1e-8 {
        return Err(Error::NotCommuting(offdiag));
    }
    Ok((basis, spec.eigenvalues, probs))
}

fn gibbs_weights(beta: f64, energies: &[f64]) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Exact feasibility for commuting instances: a linear program for a
/// column-stochastic matrix `M` with `M q = q'` (Gibbs vectors) and
/// `M p = p'` (state vectors) in the shared eigenbases. A feasible verdict
/// carries the induced diagonal channel as witness.
pub fn classical_gp_feasibility(p: &FeasibilityProblem) -> Result<FeasibilityReport> {
    let (basis_in, energies_in, probs_in) = codiagonalize(&p.rho, &p.h)?;
    let (basis_out, energies_out, probs_out) = codiagonalize(&p.sigma, &p.k)?;
    let q_in = gibbs_weights(p.beta, &energies_in);
    let q_out = gibbs_weights(p.beta, &energies_out);
    let monotone_gap = monotone_screen(p);
    let (din, dout) = p.dims();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..dout)
        .map(|_| (0..din).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect())
        .collect();
    for column in 0..din {
        let col: Vec<_> = vars.iter().map(|row| (row[column], 1.0)).collect();
        lp.add_constraint(col, ComparisonOp::Eq, 1.0);
    }
    for a in 0..dout {
        let gibbs_row: Vec<_> = (0..din).map(|j| (vars[a][j], q_in[j])).collect();
        lp.add_constraint(gibbs_row, ComparisonOp::Eq, q_out[a]);
        let state_row: Vec<_> = (0..din).map(|j| (vars[a][j], probs_in[j])).collect();
        lp.add_constraint(state_row, ComparisonOp::Eq, probs_out[a]);
    }

    match lp.solve() {
        Ok(solution) => {
            // renormalize columns exactly before building Kraus operators
            let mut m = vec![vec![0.0f64; din]; dout];
            for a in 0..dout {
                for j in 0..din {
                    m[a][j] = solution[vars[a][j]].max(0.0);
                }
            }
            for j in 0..din {
                let col_sum: f64 = (0..dout).map(|a| m[a][j]).sum();
                for row in m.iter_mut() {
                    row[j] /= col_sum;
                }
            }
            let mut kraus = Vec::new();
            for (a, row) in m.iter().enumerate() {
                for (j, &weight) in row.iter().enumerate() {
                    if weight <= 0.0 {
                        continue;
                    }
                    let va = basis_out.column(a);
                    let uj = basis_in.column(j);
                    let k = (va * uj.adjoint()).map(|z| z * weight.sqrt());
                    kraus.push(k);
                }
            }
            let witness = QuantumChannel::new(kraus)?;
            let residual = verify_witness(&witness, p);
            Ok(FeasibilityReport {
                verdict: Verdict::Feasible,
                residual,
                iterations: 0,
                witness: Some(witness),
                monotone_gap,
                residual_trace: None,
            })
        }
        Err(_) => Ok(FeasibilityReport {
            verdict: if monotone_gap > tol::MONOTONE_GAP_TOL {
                Verdict::InfeasibleByMonotone
            } else {
                Verdict::InfeasibleByLp
            },
            residual: f64::INFINITY,
            iterations: 0,
            witness: None,
            monotone_gap,
            residual_trace: None,
        }),
    }
}

/// Full decision pipeline: monotone screen, then the commuting fast path
/// when it applies, else the Choi projection solver.
pub fn decide_feasibility(p: &FeasibilityProblem) -> Result<FeasibilityReport> {
    let monotone_gap = monotone_screen(p);
    if monotone_gap > tol::MONOTONE_GAP_TOL {
        return Ok(FeasibilityReport {
            verdict: Verdict::InfeasibleByMonotone,
            residual: 0.0,
            iterations: 0,
            witness: None,
            monotone_gap,
            residual_trace: None,
        });
    }
    if p.is_commuting() {
        classical_gp_feasibility(p)
    } else {
        solve_choi_feasibility(p)
    }
}

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

/// Problem file format: `{"beta", "rho", "sigma", "h", "k", "options"?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemJson {
    pub beta: f64,
    pub rho: MatrixJson,
    pub sigma: MatrixJson,
    pub h: MatrixJson,
    pub k: MatrixJson,
    #[serde(default)]
    pub options: Option<SolverOptions>,
}

impl ProblemJson {
    pub fn to_problem(&self) -> Result<FeasibilityProblem> {
        let mut p = FeasibilityProblem::new(
            DensityMatrix::try_from(&self.rho)?,
            DensityMatrix::try_from(&self.sigma)?,
            HermitianOperator::try_from(&self.h)?,
            HermitianOperator::try_from(&self.k)?,
            self.beta,
        )?;
        if let Some(opts) = self.options {
            p.options = opts;
        }
        Ok(p)
    }

    pub fn from_problem(p: &FeasibilityProblem) -> Self {
        Self {
            beta: p.beta,
            rho: MatrixJson::from(&p.rho),
            sigma: MatrixJson::from(&p.sigma),
            h: MatrixJson::from(&p.h),
            k: MatrixJson::from(&p.k),
            options: Some(p.options),
        }
    }
}

/// Report format emitted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportJson {
    pub verdict: Verdict,
    pub residual: f64,
    pub iterations: usize,
    pub monotone_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ChannelJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_trace: Option<Vec<f64>>,
}

impl From<&FeasibilityReport> for ReportJson {
    fn from(r: &FeasibilityReport) -> Self {
        Self {
            verdict: r.verdict,
            residual: r.residual,
            iterations: r.iterations,
            monotone_gap: r.monotone_gap,
            witness: r.witness.as_ref().map(ChannelJson::from),
            residual_trace: r.residual_trace.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_channel;
    use crate::linalg::{random_density, random_hermitian, RngStream};
    use crate::thermo::modular_hamiltonian;

    fn qubit_problem(p_src: [f64; 2], p_tgt: [f64; 2]) -> FeasibilityProblem {
        let h = HermitianOperator::from_diagonal(&[0.0, 1.0]);
        FeasibilityProblem::new(
            DensityMatrix::from_probabilities(&p_src).unwrap(),
            DensityMatrix::from_probabilities(&p_tgt).unwrap(),
            h.clone(),
            h,
            1.0,
        )
        .unwrap()
    }

    const GIBBS_QUBIT: [f64; 2] = [0.7310585786300049, 0.2689414213699951];

    #[test]
    fn monotone_screen_signs() {
        // toward Gibbs: gap <= 0, never screens out
        let p = qubit_problem([0.9, 0.1], GIBBS_QUBIT);
        assert!(monotone_screen(&p) <= 0.0);
        // Gibbs source to non-Gibbs target: positive gap
        let p = qubit_problem(GIBBS_QUBIT, [0.9, 0.1]);
        assert!(monotone_screen(&p) > tol::MONOTONE_GAP_TOL);
        // 0.8 -> 0.9 is a strict athermality increase
        let p = qubit_problem([0.8, 0.2], [0.9, 0.1]);
        assert!(monotone_screen(&p) > tol::MONOTONE_GAP_TOL);
    }

    #[test]
    fn classical_lp_qubit_oracle() {
        // The 2x2 linear solve of M q = q, M p = p' fixes the stochastic
        // matrix uniquely: a = (q0 - 8 q1) / (q0 - 9 q1), b = 8 - 9a.
        let q0 = GIBBS_QUBIT[0];
        let q1 = GIBBS_QUBIT[1];
        let a = (q0 - 8.0 * q1) / (q0 - 9.0 * q1);
        let b = 8.0 - 9.0 * a;
        assert!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0);

        let p = qubit_problem([0.9, 0.1], [0.8, 0.2]);
        let report = classical_gp_feasibility(&p).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible);
        assert!(report.residual < tol::WITNESS_TOL);
        // recover the stochastic matrix from the witness action on basis states
        let witness = report.witness.unwrap();
        let e0 = witness
            .apply(&DensityMatrix::pure_basis_state(2, 0))
            .unwrap();
        let e1 = witness
            .apply(&DensityMatrix::pure_basis_state(2, 1))
            .unwrap();
        assert!(
            (e0.matrix()[(0, 0)].re - a).abs() < 1e-7,
            "col0 {} vs {a}",
            e0.matrix()[(0, 0)].re
        );
        assert!(
            (e1.matrix()[(0, 0)].re - b).abs() < 1e-7,
            "col1 {} vs {b}",
            e1.matrix()[(0, 0)].re
        );
    }

    #[test]
    fn classical_lp_reverse_direction_infeasible() {
        let p = qubit_problem([0.8, 0.2], [0.9, 0.1]);
        let report = classical_gp_feasibility(&p).unwrap();
        assert_eq!(report.verdict, Verdict::InfeasibleByMonotone);
        assert!(report.monotone_gap > tol::MONOTONE_GAP_TOL);
    }

    #[test]
    fn classical_lp_identity_instance() {
        let p = qubit_problem(GIBBS_QUBIT, GIBBS_QUBIT);
        let report = classical_gp_feasibility(&p).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible);
    }

    #[test]
    fn classical_lp_rejects_noncommuting() {
        let mut rng = RngStream::new(61, 0).rng();
        let rho = random_density(2, 2, &mut rng);
        let h = HermitianOperator::from_diagonal(&[0.0, 1.0]);
        let p = FeasibilityProblem::new(rho, DensityMatrix::maximally_mixed(2), h.clone(), h, 1.0)
            .unwrap();
        // generic random rho does not commute with a nondegenerate H
        assert!(matches!(
            classical_gp_feasibility(&p),
            Err(Error::NotCommuting(_))
        ));
    }

    #[test]
    fn codiagonalize_handles_degenerate_hamiltonian() {
        let mut rng = RngStream::new(65, 0).rng();
        let rho = random_density(3, 3, &mut rng);
        let h = HermitianOperator::from_diagonal(&[2.0, 2.0, 2.0]);
        let (basis, energies, probs) = codiagonalize(&rho, &h).unwrap();
        assert!(energies.iter().all(|&e| (e - 2.0).abs() < 1e-10));
        let mut sorted = probs.clone();
        sorted.sort_by(f64::total_cmp);
        let eig = rho.spectrum().eigenvalues;
        for (a, b) in sorted.iter().zip(&eig) {
            assert!((a - b).abs() < 1e-10);
        }
        let unitarity = ops::max_abs(&(basis.adjoint() * &basis - ops::identity(3)));
        assert!(unitarity < 1e-10);
    }

    #[test]
    fn choi_solver_identity_instance() {
        let p = qubit_problem(GIBBS_QUBIT, GIBBS_QUBIT);
        let report = solve_choi_feasibility(&p).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible);
        // the identity Choi matrix solves this instance; the affine
        // projection lands on a PSD point at once
        assert!(
            report.iterations <= 3,
            "took {} iterations",
            report.iterations
        );
    }

    #[test]
    fn choi_solver_finds_known_gp_witness_instances() {
        let mut rng = RngStream::new(62, 0).rng();
        for trial in 0..5 {
            let din = 2 + (trial % 2);
            let t = random_channel(din, din, 2, &mut rng).unwrap();
            let rho = random_density(din, din, &mut rng);
            let h = random_hermitian(din, 1.0, &mut rng);
            let beta = 1.0;
            let omega_in = gibbs_state(beta, &h);
            let omega_img = t.apply(&omega_in).unwrap();
            let k = modular_hamiltonian(&omega_img, beta, 0.0).unwrap();
            let sigma = t.apply(&rho).unwrap();
            let p = FeasibilityProblem::new(rho, sigma, h, k, beta).unwrap();
            let report = solve_choi_feasibility(&p).unwrap();
            assert_eq!(
                report.verdict,
                Verdict::Feasible,
                "trial {trial}: residual {:.3e} after {} iterations",
                report.residual,
                report.iterations
            );
            let witness = report.witness.unwrap();
            assert!(verify_witness(&witness, &p) <= tol::WITNESS_TOL);
        }
    }

    #[test]
    fn choi_solver_respects_dimension_cap() {
        let mut rng = RngStream::new(63, 0).rng();
        let rho = random_density(5, 5, &mut rng);
        let h = random_hermitian(5, 1.0, &mut rng);
        let p = FeasibilityProblem::new(rho.clone(), rho, h.clone(), h, 1.0).unwrap();
        assert!(matches!(
            solve_choi_feasibility(&p),
            Err(Error::DimensionTooLarge(5, _))
        ));
    }

    #[test]
    fn decide_pipeline_consistency() {
        // screened instance never reaches a solver
        let p = qubit_problem([0.8, 0.2], [0.9, 0.1]);
        let report = decide_feasibility(&p).unwrap();
        assert_eq!(report.verdict, Verdict::InfeasibleByMonotone);
        assert!(report.witness.is_none());

        // feasible commuting instance routes through the LP
        let p = qubit_problem([0.9, 0.1], [0.8, 0.2]);
        let report = decide_feasibility(&p).unwrap();
        assert_eq!(report.verdict, Verdict::Feasible);
    }

    #[test]
    fn projection_properties() {
        use rand_distr::StandardNormal;
        let mut rng = RngStream::new(64, 0).rng();
        let p = qubit_problem([0.9, 0.1], [0.8, 0.2]);
        let cons = ChoiConstraints::new(&p);
        let g = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(
                rand::Rng::sample::<f64, _>(&mut rng, StandardNormal),
                rand::Rng::sample::<f64, _>(&mut rng, StandardNormal),
            )
        });
        let j = ops::hermitian_part(&g);

        // PSD projection is idempotent
        let psd = cons.project_psd(&j);
        let twice = cons.project_psd(&psd);
        assert!(ops::max_abs(&(&twice - &psd)) < 1e-10);

        // the affine projection satisfies every constraint exactly and is
        // idempotent
        let pa = cons.project_affine(&j);
        assert!(
            cons.residual(&pa) < 1e-12,
            "residual {:e}",
            cons.residual(&pa)
        );
        let pa2 = cons.project_affine(&pa);
        assert!(ops::max_abs(&(&pa2 - &pa)) < 1e-10);

        // and it is orthogonal: the correction lies in the range of the
        // adjoint, so re-projecting the midpoint moves nothing
        let noncommuting = {
            let rho = random_density(2, 2, &mut rng);
            let h = random_hermitian(2, 1.0, &mut rng);
            let sigma = random_density(2, 2, &mut rng);
            let k = random_hermitian(2, 1.0, &mut rng);
            FeasibilityProblem::new(rho, sigma, h, k, 1.0).unwrap()
        };
        let cons2 = ChoiConstraints::new(&noncommuting);
        let pb = cons2.project_affine(&j);
        assert!(
            cons2.residual(&pb) < 1e-11,
            "residual {:e}",
            cons2.residual(&pb)
        );
    }

    #[test]
    fn problem_json_round_trip() {
        let p = qubit_problem([0.9, 0.1], [0.8, 0.2]);
        let json = ProblemJson::from_problem(&p);
        let text = serde_json::to_string(&json).unwrap();
        let back: ProblemJson = serde_json::from_str(&text).unwrap();
        let p2 = back.to_problem().unwrap();
        assert_eq!(p2.rho.matrix(), p.rho.matrix());
        assert_eq!(p2.options.max_iter, p.options.max_iter);
    }
}
