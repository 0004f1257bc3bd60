//! One-dimensional potential models and thermodynamic parameters.
//!
//! Every model provides an analytic value and gradient. Models with a
//! harmonic part also expose it as a *reference frequency* so that the
//! propagators can treat it exactly and only kick with the remainder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything the samplers and integrators can move beads on.
pub trait Potential: Sync {
    fn mass(&self) -> f64;
    fn value(&self, q: f64) -> f64;
    fn gradient(&self, q: f64) -> f64;

    /// Frequency of the harmonic part `m w^2 q^2 / 2` that the propagator
    /// folds into its exact rotation substep. Zero means "kick with the full
    /// gradient".
    fn reference_frequency(&self) -> f64 {
        0.0
    }

    /// False when the potential is exactly its reference harmonic part.
    fn has_residual_force(&self) -> bool {
        true
    }

    /// Gradient with the reference harmonic part removed.
    fn residual_gradient(&self, q: f64) -> f64 {
        let w = self.reference_frequency();
        self.gradient(q) - self.mass() * w * w * q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    /// `m w^2 q^2 / 2`
    Harmonic { omega: f64 },
    /// `m w^2 q^2 / 2 + c3 q^3 + c4 q^4`
    MildlyAnharmonic { omega: f64, c3: f64, c4: f64 },
    /// `a4 q^4 / 4`
    Quartic { a4: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    mass: f64,
    kind: ModelKind,
}

impl PotentialModel {
    pub fn new(mass: f64, kind: ModelKind) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be finite and > 0, got {mass}")));
        }
        match kind {
            ModelKind::Harmonic { omega } => check_omega(omega)?,
            ModelKind::MildlyAnharmonic { omega, c3, c4 } => {
                check_omega(omega)?;
                if !c3.is_finite() {
                    return Err(Error::invalid("c3", "must be finite"));
                }
                if !(c4.is_finite() && c4 >= 0.0) {
                    return Err(Error::invalid("c4", format!("must be finite and >= 0, got {c4}")));
                }
            }
            ModelKind::Quartic { a4 } => {
                if !(a4.is_finite() && a4 > 0.0) {
                    return Err(Error::invalid("a4", format!("must be finite and > 0, got {a4}")));
                }
            }
        }
        Ok(Self { mass, kind })
    }

    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        Self::new(mass, ModelKind::Harmonic { omega })
    }

    pub fn mildly_anharmonic(mass: f64, omega: f64, c3: f64, c4: f64) -> Result<Self> {
        Self::new(mass, ModelKind::MildlyAnharmonic { omega, c3, c4 })
    }

    pub fn quartic(mass: f64, a4: f64) -> Result<Self> {
        Self::new(mass, ModelKind::Quartic { a4 })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Harmonic frequency of the model, if it has one.
    pub fn omega(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Harmonic { omega } | ModelKind::MildlyAnharmonic { omega, .. } => {
                Some(omega)
            }
            ModelKind::Quartic { .. } => None,
        }
    }

    pub fn is_harmonic(&self) -> bool {
        matches!(self.kind, ModelKind::Harmonic { .. })
    }

    /// True when `V(q) -> +inf` as `|q| -> inf`.
    pub fn is_bounded_below(&self) -> bool {
        match self.kind {
            ModelKind::Harmonic { .. } | ModelKind::Quartic { .. } => true,
            ModelKind::MildlyAnharmonic { c3, c4, .. } => c4 > 0.0 || c3 == 0.0,
        }
    }

    /// True when `V(-q) = V(q)`.
    pub fn is_symmetric(&self) -> bool {
        match self.kind {
            ModelKind::MildlyAnharmonic { c3, .. } => c3 == 0.0,
            _ => true,
        }
    }

    /// Checked potential evaluation; rejects non-finite positions.
    pub fn potential_eval(&self, q: f64) -> Result<f64> {
        finite(q, "q")?;
        Ok(self.value(q))
    }

    /// Checked analytic gradient `dV/dq`.
    pub fn potential_grad(&self, q: f64) -> Result<f64> {
        finite(q, "q")?;
        Ok(self.gradient(q))
    }

    /// Path-splitting correction `(V(q + eta/2) + V(q - eta/2)) / 2 - V(q)`.
    pub fn delta_v(&self, q: f64, eta: f64) -> Result<f64> {
        finite(q, "q")?;
        finite(eta, "eta")?;
        let h = 0.5 * eta;
        Ok(0.5 * (self.value(q + h) + self.value(q - h)) - self.value(q))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")))
    }
}

fn finite(x: f64, what: &'static str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

impl Potential for PotentialModel {
    fn mass(&self) -> f64 {
        self.mass
    }

    fn value(&self, q: f64) -> f64 {
        let m = self.mass;
        match self.kind {
            ModelKind::Harmonic { omega } => 0.5 * m * omega * omega * q * q,
            ModelKind::MildlyAnharmonic { omega, c3, c4 } => {
                let q2 = q * q;
                0.5 * m * omega * omega * q2 + c3 * q2 * q + c4 * q2 * q2
            }
            ModelKind::Quartic { a4 } => 0.25 * a4 * (q * q) * (q * q),
        }
    }

    fn gradient(&self, q: f64) -> f64 {
        let m = self.mass;
        match self.kind {
            ModelKind::Harmonic { omega } => m * omega * omega * q,
            ModelKind::MildlyAnharmonic { omega, c3, c4 } => {
                m * omega * omega * q + 3.0 * c3 * q * q + 4.0 * c4 * q * q * q
            }
            ModelKind::Quartic { a4 } => a4 * q * q * q,
        }
    }

    fn reference_frequency(&self) -> f64 {
        self.omega().unwrap_or(0.0)
    }

    fn has_residual_force(&self) -> bool {
        !self.is_harmonic()
    }

    fn residual_gradient(&self, q: f64) -> f64 {
        match self.kind {
            ModelKind::Harmonic { .. } => 0.0,
            ModelKind::MildlyAnharmonic { c3, c4, .. } => 3.0 * c3 * q * q + 4.0 * c4 * q * q * q,
            ModelKind::Quartic { a4 } => a4 * q * q * q,
        }
    }
}

/// Inverse temperature, bead count and Planck constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    beta: f64,
    n_beads: usize,
    hbar: f64,
}

impl ThermoParams {
    pub fn new(beta: f64, n_beads: usize, hbar: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be finite and > 0, got {beta}")));
        }
        if n_beads < 1 {
            return Err(Error::invalid("n_beads", "must be >= 1"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::invalid("hbar", format!("must be finite and > 0, got {hbar}")));
        }
        Ok(Self {
            beta,
            n_beads,
            hbar,
        })
    }

    /// `hbar = 1`.
    pub fn natural(beta: f64, n_beads: usize) -> Result<Self> {
        Self::new(beta, n_beads, 1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_beads(&self) -> usize {
        self.n_beads
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Same temperature and hbar with a different bead count.
    pub fn with_beads(&self, n_beads: usize) -> Result<Self> {
        Self::new(self.beta, n_beads, self.hbar)
    }

    /// Ring-polymer spring frequency `N / (beta hbar)`.
    pub fn omega_n(&self) -> f64 {
        self.n_beads as f64 / (self.beta * self.hbar)
    }

    /// Per-bead inverse temperature `beta / N`.
    pub fn beta_n(&self) -> f64 {
        self.beta / self.n_beads as f64
    }
}
