//! Entropic quantities: von Neumann entropy, quantum relative entropy,
//! Petz and sandwiched Renyi divergences, mutual information.
//!
//! All logarithms are natural. `0 ln 0 = 0` by continuity. A divergence of
//! two states whose supports are incompatible is `+infinity`, represented by
//! [`ExtendedReal::Infinity`] — a value, never an error.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ops::{self, CMatrix};
use crate::linalg::{self, DensityMatrix};
use crate::tol;

/// Real number extended with a positive infinity arising from support
/// violations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(*x),
            ExtendedReal::Infinity => None,
        }
    }

    /// Unwraps the finite value; panics on infinity.
    pub fn expect_finite(&self, context: &str) -> f64 {
        self.finite()
            .unwrap_or_else(|| panic!("unexpected infinite divergence: {context}"))
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => Some(Ordering::Equal),
            (ExtendedReal::Infinity, _) => Some(Ordering::Greater),
            (_, ExtendedReal::Infinity) => Some(Ordering::Less),
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinity => write!(f, "infinity"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::Infinity => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtendedReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a number or the string \"infinity\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(x as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<ExtendedReal, E> {
                if s.eq_ignore_ascii_case("infinity") {
                    Ok(ExtendedReal::Infinity)
                } else {
                    Err(E::custom(format!("unexpected string {s:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Divergence families with their DPI-valid parameter ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceFamily {
    RelativeEntropy,
    RenyiPetz,
    RenyiSandwiched,
}

impl fmt::Display for DivergenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DivergenceFamily::RelativeEntropy => "relative_entropy",
            DivergenceFamily::RenyiPetz => "renyi_petz",
            DivergenceFamily::RenyiSandwiched => "renyi_sandwiched",
        };
        write!(f, "{name}")
    }
}

/// A divergence to evaluate: a family plus its order parameter (ignored for
/// the relative entropy itself).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSpec {
    pub family: DivergenceFamily,
    pub alpha: f64,
}

impl DivergenceSpec {
    pub fn relative_entropy() -> Self {
        Self {
            family: DivergenceFamily::RelativeEntropy,
            alpha: 1.0,
        }
    }

    pub fn petz(alpha: f64) -> Self {
        Self {
            family: DivergenceFamily::RenyiPetz,
            alpha,
        }
    }

    pub fn sandwiched(alpha: f64) -> Self {
        Self {
            family: DivergenceFamily::RenyiSandwiched,
            alpha,
        }
    }

    /// Validates the DPI-valid alpha range: Petz `(0,1) u (1,2]`,
    /// sandwiched `[1/2,1) u (1,inf)`.
    pub fn validate(&self) -> Result<()> {
        let a = self.alpha;
        let ok = match self.family {
            DivergenceFamily::RelativeEntropy => true,
            DivergenceFamily::RenyiPetz => a > 0.0 && a != 1.0 && a <= 2.0,
            DivergenceFamily::RenyiSandwiched => a >= 0.5 && a != 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::AlphaOutOfRange {
                family: self.family.to_string(),
                alpha: a,
            })
        }
    }

    /// Evaluates the divergence.
    pub fn evaluate(&self, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
        match self.family {
            DivergenceFamily::RelativeEntropy => Ok(relative_entropy(rho, sigma)),
            _ => renyi_divergence(*self, rho, sigma),
        }
    }
}

/// Von Neumann entropy `-Tr(rho ln rho)` in nats; lies in `[0, ln dim]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let spec = rho.spectrum();
    let lam_max = spec.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let cutoff = tol::SUPP_REL * lam_max;
    -spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// Trace mass of `rho` outside the support of `sigma`'s spectrum.
fn mass_outside_support(rho: &DensityMatrix, sigma_spec: &linalg::Spectrum) -> f64 {
    let lam_max = sigma_spec.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let cutoff = tol::SUPP_REL * lam_max;
    let mut mass = 0.0;
    for (j, &s) in sigma_spec.eigenvalues.iter().enumerate() {
        if s <= cutoff {
            let v = sigma_spec.eigenvectors.column(j);
            mass += (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        }
    }
    mass
}

/// Quantum relative entropy `S(rho || sigma) = Tr(rho ln rho - rho ln sigma)`
/// whenever `supp(rho)` is contained in `supp(sigma)`, else `+infinity`.
///
/// Both arguments must share a dimension.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> ExtendedReal {
    assert_eq!(rho.dim(), sigma.dim(), "states must share a dimension");
    let sigma_spec = sigma.spectrum();
    if mass_outside_support(rho, &sigma_spec) > tol::SUPPORT_CONTAINMENT_TOL {
        return ExtendedReal::Infinity;
    }
    let rho_spec = rho.spectrum();
    let lam_max = rho_spec.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let cutoff = tol::SUPP_REL * lam_max;
    let tr_rho_ln_rho: f64 = rho_spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l * l.ln())
        .sum();

    let s_max = sigma_spec.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let s_cutoff = tol::SUPP_REL * s_max;
    let mut tr_rho_ln_sigma = 0.0;
    for (j, &s) in sigma_spec.eigenvalues.iter().enumerate() {
        if s > s_cutoff {
            let v = sigma_spec.eigenvectors.column(j);
            let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
            tr_rho_ln_sigma += weight * s.ln();
        }
    }
    ExtendedReal::Finite(tr_rho_ln_rho - tr_rho_ln_sigma)
}

/// Renyi divergence of the requested family and order.
///
/// Petz: `(alpha-1)^{-1} ln Tr(rho^alpha sigma^{1-alpha})`.
/// Sandwiched: `(alpha-1)^{-1} ln Tr[(sigma^{(1-alpha)/2alpha} rho
/// sigma^{(1-alpha)/2alpha})^alpha]`.
/// Support conventions follow [`relative_entropy`].
pub fn renyi_divergence(
    spec: DivergenceSpec,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<ExtendedReal> {
    spec.validate()?;
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    if spec.family == DivergenceFamily::RelativeEntropy {
        return Ok(relative_entropy(rho, sigma));
    }
    let alpha = spec.alpha;
    let sigma_spec = sigma.spectrum();
    if mass_outside_support(rho, &sigma_spec) > tol::SUPPORT_CONTAINMENT_TOL {
        return Ok(ExtendedReal::Infinity);
    }
    let trace = match spec.family {
        DivergenceFamily::RenyiPetz => {
            let rho_a = linalg::power_on_support(&rho.spectrum(), alpha);
            let sigma_b = linalg::power_on_support(&sigma_spec, 1.0 - alpha);
            ops::trace_re(&(rho_a * sigma_b))
        }
        DivergenceFamily::RenyiSandwiched => {
            let e = (1.0 - alpha) / (2.0 * alpha);
            let half = linalg::power_on_support(&sigma_spec, e);
            let core: CMatrix = &half * rho.matrix() * &half;
            let core_spec = linalg::eig_hermitian_raw(&ops::hermitian_part(&core));
            core_spec
                .eigenvalues
                .iter()
                .filter(|&&m| m > 0.0)
                .map(|&m| m.powf(alpha))
                .sum()
        }
        DivergenceFamily::RelativeEntropy => unreachable!(),
    };
    if trace <= 0.0 {
        return Ok(ExtendedReal::Infinity);
    }
    Ok(ExtendedReal::Finite(trace.ln() / (alpha - 1.0)))
}

/// Mutual information `S(rho_1) + S(rho_2) - S(rho_12)` of a bipartite
/// state with factor dimensions `dims = (d1, d2)`.
pub fn mutual_information(rho12: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let (d1, d2) = dims;
    if rho12.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch(rho12.dim(), d1 * d2));
    }
    let rho1 = rho12.partial_trace(&[d1, d2], &[0])?;
    let rho2 = rho12.partial_trace(&[d1, d2], &[1])?;
    Ok(von_neumann_entropy(&rho1) + von_neumann_entropy(&rho2) - von_neumann_entropy(rho12))
}
