//! The resource theory of athermality: objects `(state, Hamiltonian)` at a
//! fixed inverse temperature, Gibbs states, free-energy monotones,
//! Gibbs-preserving maps, and catalytic transition constructions.
//!
//! A transition witness is never trusted: [`check_transition`] re-verifies
//! the Gibbs-preserving property of the witness channel before checking the
//! mode-specific output conditions, because the transition definitions
//! quantify over Gibbs-preserving maps only.

use serde::{Deserialize, Serialize};

use crate::channels::{compose, swap_channel, tensor_channel, ChannelJson, QuantumChannel};
use crate::divergences::{relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::linalg::json::MatrixJson;
use crate::linalg::ops::{self, kron};
use crate::linalg::{state_distance, DensityMatrix, HermitianOperator};
use crate::tol;

/// A state paired with its Hamiltonian.
#[derive(Debug, Clone)]
pub struct ThermoObject {
    pub state: DensityMatrix,
    pub hamiltonian: HermitianOperator,
}

impl ThermoObject {
    pub fn new(state: DensityMatrix, hamiltonian: HermitianOperator) -> Result<Self> {
        if state.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch(state.dim(), hamiltonian.dim()));
        }
        Ok(Self { state, hamiltonian })
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Tensor product of objects:
    /// `(rho, H) (x) (gamma, R) = (rho (x) gamma, H (x) I + I (x) R)`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            state: self.state.tensor(&other.state),
            hamiltonian: composite_hamiltonian(&self.hamiltonian, &other.hamiltonian),
        }
    }
}

/// The non-interacting composite `H (x) I + I (x) R`, written `H + R` for
/// short.
pub fn composite_hamiltonian(h: &HermitianOperator, r: &HermitianOperator) -> HermitianOperator {
    let mat = kron(h.matrix(), &ops::identity(r.dim())) + kron(&ops::identity(h.dim()), r.matrix());
    HermitianOperator::new(mat).expect("sum of Hermitian Kronecker terms is Hermitian")
}

/// Gibbs state `exp(-beta H) / Tr exp(-beta H)`.
///
/// The spectrum is shifted by its minimum before exponentiation so large
/// `beta * H` cannot overflow; the result is unchanged because the shift
/// cancels against the partition function.
pub fn gibbs_state(beta: f64, h: &HermitianOperator) -> DensityMatrix {
    assert!(beta > 0.0, "inverse temperature must be positive");
    let spec = h.spectrum();
    let e0 = spec.eigenvalues[0];
    let z: f64 = spec
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .sum();
    let mat = spec.apply(|e| (-beta * (e - e0)).exp() / z);
    DensityMatrix::new(mat).expect("Gibbs weights form a state")
}

/// Modular Hamiltonian `-(1/beta) ln sigma + C I` of a full-rank state;
/// its Gibbs state at `beta` is `sigma` again.
pub fn modular_hamiltonian(sigma: &DensityMatrix, beta: f64, c: f64) -> Result<HermitianOperator> {
    assert!(beta > 0.0, "inverse temperature must be positive");
    let spec = sigma.spectrum();
    let lam_max = spec.eigenvalues.last().copied().unwrap_or(0.0);
    let lam_min = spec.eigenvalues[0];
    if lam_min <= tol::SUPP_REL * lam_max {
        return Err(Error::SigmaNotFullRank(lam_min));
    }
    let mat = spec.apply(|s| -s.ln() / beta + c);
    HermitianOperator::new(mat)
}

/// Non-equilibrium free energy `F_beta(rho, H) = Tr(rho H) - S(rho)/beta`.
pub fn free_energy(obj: &ThermoObject, beta: f64) -> f64 {
    assert!(beta > 0.0, "inverse temperature must be positive");
    let energy = ops::trace_re(&(obj.state.matrix() * obj.hamiltonian.matrix()));
    energy - von_neumann_entropy(&obj.state) / beta
}

/// Athermality `Delta F_beta(rho, H) = S(rho || omega_{beta,H}) / beta`,
/// the free-energy difference to the equilibrium object.
pub fn athermality(obj: &ThermoObject, beta: f64) -> ExtendedReal {
    let omega = gibbs_state(beta, &obj.hamiltonian);
    match relative_entropy(&obj.state, &omega) {
        ExtendedReal::Finite(s) => ExtendedReal::Finite(s / beta),
        ExtendedReal::Infinity => ExtendedReal::Infinity,
    }
}

/// Outcome of a Gibbs-preservation check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GpCheck {
    pub preserving: bool,
    pub residual: f64,
}

/// Checks `T(omega_{beta,H_in}) = omega_{beta,H_out}` in trace norm.
pub fn is_gibbs_preserving(
    channel: &QuantumChannel,
    h_in: &HermitianOperator,
    h_out: &HermitianOperator,
    beta: f64,
    tolerance: f64,
) -> Result<GpCheck> {
    if channel.dim_in() != h_in.dim() {
        return Err(Error::DimensionMismatch(channel.dim_in(), h_in.dim()));
    }
    if channel.dim_out() != h_out.dim() {
        return Err(Error::DimensionMismatch(channel.dim_out(), h_out.dim()));
    }
    let image = channel.apply(&gibbs_state(beta, h_in))?;
    let residual = state_distance(&image, &gibbs_state(beta, h_out));
    Ok(GpCheck {
        preserving: residual <= tolerance,
        residual,
    })
}

/// A Gibbs-preserving map on objects: the state channel together with the
/// image Hamiltonian, at a fixed inverse temperature.
#[derive(Debug, Clone)]
pub struct GpMapSpec {
    pub channel: QuantumChannel,
    pub ham_in: HermitianOperator,
    pub ham_out: HermitianOperator,
    pub beta: f64,
}

impl GpMapSpec {
    /// Re-verifies the defining Gibbs-preservation condition.
    pub fn verify(&self) -> Result<GpCheck> {
        is_gibbs_preserving(
            &self.channel,
            &self.ham_in,
            &self.ham_out,
            self.beta,
            tol::GP_TOL,
        )
    }

    /// Applies the map to an object with the matching Hamiltonian.
    pub fn apply(&self, obj: &ThermoObject) -> Result<ThermoObject> {
        let out = self.channel.apply(&obj.state)?;
        ThermoObject::new(out, self.ham_out.clone())
    }
}

/// Realizes a Gibbs-preserving map on `S` from a joint Gibbs-preserving
/// channel on `S (x) A`: the ancilla is prepared in the Gibbs state of its
/// Hamiltonian, the joint channel acts, and the ancilla is discarded.
///
/// The joint channel must fix the composite Gibbs state (checked; fails
/// with [`Error::JointNotGp`] otherwise).
pub fn implement_gp_map(
    joint_channel: &QuantumChannel,
    h_s: &HermitianOperator,
    k_a: &HermitianOperator,
    beta: f64,
) -> Result<GpMapSpec> {
    let ds = h_s.dim();
    let da = k_a.dim();
    if joint_channel.dim_in() != ds * da || joint_channel.dim_out() != ds * da {
        return Err(Error::DimensionMismatch(joint_channel.dim_in(), ds * da));
    }
    let h_joint = composite_hamiltonian(h_s, k_a);
    let gp = is_gibbs_preserving(joint_channel, &h_joint, &h_joint, beta, tol::GP_TOL)?;
    if !gp.preserving {
        return Err(Error::JointNotGp(gp.residual));
    }
    let omega_a = gibbs_state(beta, k_a);
    let prepare = QuantumChannel::append_state(ds, &omega_a);
    let discard = QuantumChannel::trace_out_second(ds, da);
    let induced = compose(&discard, &compose(joint_channel, &prepare)?)?;
    Ok(GpMapSpec {
        channel: induced,
        ham_in: h_s.clone(),
        ham_out: h_s.clone(),
        beta,
    })
}

/// How a transition treats its ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionMode {
    /// No catalyst: the witness maps the source state to the target state.
    Plain,
    /// The catalyst returns exactly, uncorrelated with the system.
    Catalytic,
    /// Only the per-subsystem marginals of the catalyst list return.
    MarginalCatalytic,
    /// The catalyst returns exactly but may end up correlated with the
    /// system.
    CorrelatedCatalytic,
}

/// One candidate transition: source and target objects plus whatever the
/// mode requires (catalysts, witness channel, joint output).
#[derive(Debug, Clone)]
pub struct TransitionInstance {
    pub source: ThermoObject,
    pub target: ThermoObject,
    pub beta: f64,
    pub mode: TransitionMode,
    pub catalysts: Vec<ThermoObject>,
    pub witness_channel: Option<QuantumChannel>,
    pub joint_output: Option<DensityMatrix>,
}

/// Verification outcome for one transition instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionReport {
    pub mode: TransitionMode,
    pub witness_gp_residual: f64,
    /// Named trace-norm residuals of the mode-specific output conditions.
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    pub passed: bool,
}

/// Verifies a transition instance at tolerance `tolerance` (trace norm).
///
/// The witness is first checked to be Gibbs-preserving for the composite
/// Hamiltonians of its mode; a failing witness is an error, not a failed
/// report.
pub fn check_transition(t: &TransitionInstance, tolerance: f64) -> Result<TransitionReport> {
    let witness = t.witness_channel.as_ref().ok_or(Error::MissingWitness)?;

    let mut h_in = t.source.hamiltonian.clone();
    let mut h_out = t.target.hamiltonian.clone();
    for cat in &t.catalysts {
        h_in = composite_hamiltonian(&h_in, &cat.hamiltonian);
        h_out = composite_hamiltonian(&h_out, &cat.hamiltonian);
    }
    let gp = is_gibbs_preserving(witness, &h_in, &h_out, t.beta, tolerance)?;
    if !gp.preserving {
        return Err(Error::WitnessNotGp(gp.residual));
    }

    let joint_in = t
        .catalysts
        .iter()
        .fold(t.source.state.clone(), |acc, cat| acc.tensor(&cat.state));
    let joint_out = match &t.joint_output {
        Some(out) => out.clone(),
        None => witness.apply(&joint_in)?,
    };

    let mut residuals: Vec<(String, f64)> = Vec::new();
    match t.mode {
        TransitionMode::Plain => {
            if !t.catalysts.is_empty() {
                return Err(Error::InvalidConfig(
                    "plain transitions take no catalyst".into(),
                ));
            }
            residuals.push(("output".into(), state_distance(&joint_out, &t.target.state)));
        }
        TransitionMode::Catalytic => {
            if t.catalysts.is_empty() {
                return Err(Error::InvalidConfig(
                    "catalytic transitions need a catalyst".into(),
                ));
            }
            let expected = t
                .catalysts
                .iter()
                .fold(t.target.state.clone(), |acc, cat| acc.tensor(&cat.state));
            residuals.push((
                "product_output".into(),
                state_distance(&joint_out, &expected),
            ));
        }
        TransitionMode::MarginalCatalytic => {
            if t.catalysts.is_empty() {
                return Err(Error::InvalidConfig(
                    "marginal-catalytic transitions need catalysts".into(),
                ));
            }
            let mut dims = vec![t.target.dim()];
            dims.extend(t.catalysts.iter().map(|c| c.dim()));
            let sys = joint_out.partial_trace(&dims, &[0])?;
            residuals.push((
                "system_marginal".into(),
                state_distance(&sys, &t.target.state),
            ));
            for (i, cat) in t.catalysts.iter().enumerate() {
                let m = joint_out.partial_trace(&dims, &[i + 1])?;
                residuals.push((
                    format!("catalyst_{i}_marginal"),
                    state_distance(&m, &cat.state),
                ));
            }
        }
        TransitionMode::CorrelatedCatalytic => {
            if t.catalysts.len() != 1 {
                return Err(Error::InvalidConfig(
                    "correlated-catalytic transitions take exactly one catalyst".into(),
                ));
            }
            let cat = &t.catalysts[0];
            let dims = [t.target.dim(), cat.dim()];
            let sys = joint_out.partial_trace(&dims, &[0])?;
            let anc = joint_out.partial_trace(&dims, &[1])?;
            residuals.push((
                "system_marginal".into(),
                state_distance(&sys, &t.target.state),
            ));
            residuals.push(("catalyst_marginal".into(), state_distance(&anc, &cat.state)));
        }
    }

    let max_residual = residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    Ok(TransitionReport {
        mode: t.mode,
        witness_gp_residual: gp.residual,
        residuals,
        max_residual,
        passed: max_residual <= tolerance,
    })
}

/// Marginal-catalytic swap construction: a bipartite `(rho_12, H_1 + H_2)`
/// transitions to its marginal product `(rho_1 (x) rho_2, H_1 + H_2)` using
/// the catalyst `rho_1 (x) rho_2` (two subsystems) and a swap of the system
/// with the catalyst.
pub fn construct_mc_swap(
    rho12: &DensityMatrix,
    h1: &HermitianOperator,
    h2: &HermitianOperator,
    beta: f64,
) -> Result<TransitionInstance> {
    let (d1, d2) = (h1.dim(), h2.dim());
    if rho12.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch(rho12.dim(), d1 * d2));
    }
    let rho1 = rho12.partial_trace(&[d1, d2], &[0])?;
    let rho2 = rho12.partial_trace(&[d1, d2], &[1])?;
    let h12 = composite_hamiltonian(h1, h2);
    let ds = d1 * d2;
    let witness = swap_channel(ds, ds);
    let joint_in = rho12.tensor(&rho1.tensor(&rho2));
    let joint_out = witness.apply(&joint_in)?;
    Ok(TransitionInstance {
        source: ThermoObject::new(rho12.clone(), h12.clone())?,
        target: ThermoObject::new(rho1.tensor(&rho2), h12)?,
        beta,
        mode: TransitionMode::MarginalCatalytic,
        catalysts: vec![
            ThermoObject::new(rho1, h1.clone())?,
            ThermoObject::new(rho2, h2.clone())?,
        ],
        witness_channel: Some(witness),
        joint_output: Some(joint_out),
    })
}

/// Correlated-catalytic swap construction: swapping the second subsystem of
/// `(rho_12, H_1 + H_2)` with a catalyst `(rho_2, H_2)` realizes the
/// transition to `(rho_1 (x) rho_2, H_1 + H_2)` while returning the
/// catalyst exactly, correlated with the system.
pub fn construct_cc_swap(
    rho12: &DensityMatrix,
    h1: &HermitianOperator,
    h2: &HermitianOperator,
    beta: f64,
) -> Result<TransitionInstance> {
    let (d1, d2) = (h1.dim(), h2.dim());
    if rho12.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch(rho12.dim(), d1 * d2));
    }
    let rho1 = rho12.partial_trace(&[d1, d2], &[0])?;
    let rho2 = rho12.partial_trace(&[d1, d2], &[1])?;
    let h12 = composite_hamiltonian(h1, h2);
    let witness = tensor_channel(&QuantumChannel::identity(d1), &swap_channel(d2, d2));
    let joint_in = rho12.tensor(&rho2);
    let joint_out = witness.apply(&joint_in)?;
    Ok(TransitionInstance {
        source: ThermoObject::new(rho12.clone(), h12.clone())?,
        target: ThermoObject::new(rho1.tensor(&rho2), h12)?,
        beta,
        mode: TransitionMode::CorrelatedCatalytic,
        catalysts: vec![ThermoObject::new(rho2, h2.clone())?],
        witness_channel: Some(witness),
        joint_output: Some(joint_out),
    })
}

/// JSON form of a thermodynamic object: `{"beta", "state", "hamiltonian"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectJson {
    pub beta: f64,
    pub state: MatrixJson,
    pub hamiltonian: MatrixJson,
}

impl ObjectJson {
    pub fn from_object(obj: &ThermoObject, beta: f64) -> Self {
        Self {
            beta,
            state: MatrixJson::from(&obj.state),
            hamiltonian: MatrixJson::from(&obj.hamiltonian),
        }
    }

    pub fn to_object(&self) -> Result<ThermoObject> {
        ThermoObject::new(
            DensityMatrix::try_from(&self.state)?,
            HermitianOperator::try_from(&self.hamiltonian)?,
        )
    }
}

/// A state/Hamiltonian pair inside a transition bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub state: MatrixJson,
    pub hamiltonian: MatrixJson,
}

/// JSON bundle of a full transition instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionJson {
    pub beta: f64,
    pub mode: TransitionMode,
    pub source: PairJson,
    pub target: PairJson,
    pub catalysts: Vec<PairJson>,
    pub witness: Option<ChannelJson>,
    pub joint_output: Option<MatrixJson>,
}

impl From<&TransitionInstance> for TransitionJson {
    fn from(t: &TransitionInstance) -> Self {
        let pair = |o: &ThermoObject| PairJson {
            state: MatrixJson::from(&o.state),
            hamiltonian: MatrixJson::from(&o.hamiltonian),
        };
        Self {
            beta: t.beta,
            mode: t.mode,
            source: pair(&t.source),
            target: pair(&t.target),
            catalysts: t.catalysts.iter().map(pair).collect(),
            witness: t.witness_channel.as_ref().map(ChannelJson::from),
            joint_output: t.joint_output.as_ref().map(MatrixJson::from),
        }
    }
}

impl TryFrom<&TransitionJson> for TransitionInstance {
    type Error = Error;
    fn try_from(j: &TransitionJson) -> Result<Self> {
        let object = |p: &PairJson| -> Result<ThermoObject> {
            ThermoObject::new(
                DensityMatrix::try_from(&p.state)?,
                HermitianOperator::try_from(&p.hamiltonian)?,
            )
        };
        Ok(Self {
            source: object(&j.source)?,
            target: object(&j.target)?,
            beta: j.beta,
            mode: j.mode,
            catalysts: j.catalysts.iter().map(&object).collect::<Result<_>>()?,
            witness_channel: j
                .witness
                .as_ref()
                .map(QuantumChannel::try_from)
                .transpose()?,
            joint_output: j
                .joint_output
                .as_ref()
                .map(DensityMatrix::try_from)
                .transpose()?,
        })
    }
}
