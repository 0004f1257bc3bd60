use std::fmt;

use serde::{Deserialize, Serialize};

use super::RingPolymerState;
use crate::error::{Error, Result};

/// Polynomial `sum_i c_i q^i`, the concrete form of every position observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficient"));
        }
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        Ok(Self { coefficients })
    }

    /// `q^n`
    pub fn monomial(n: usize) -> Self {
        let mut coefficients = vec![0.0; n + 1];
        coefficients[n] = 1.0;
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    #[inline]
    pub fn eval(&self, q: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * q + c)
    }

    pub fn is_odd(&self) -> bool {
        self.coefficients.iter().step_by(2).all(|&c| c == 0.0)
    }

    pub fn is_even(&self) -> bool {
        self.coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObservableKind {
    Position(Polynomial),
    Momentum,
}

/// A position function `A(q)` or the momentum operator, with a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub kind: ObservableKind,
    pub label: String,
}

impl Observable {
    pub fn position(poly: Polynomial, label: impl Into<String>) -> Self {
        Self {
            kind: ObservableKind::Position(poly),
            label: label.into(),
        }
    }

    pub fn q() -> Self {
        Self::position(Polynomial::monomial(1), "q")
    }

    pub fn q2() -> Self {
        Self::position(Polynomial::monomial(2), "q2")
    }

    pub fn q3() -> Self {
        Self::position(Polynomial::monomial(3), "q3")
    }

    pub fn q4() -> Self {
        Self::position(Polynomial::monomial(4), "q4")
    }

    pub fn momentum() -> Self {
        Self {
            kind: ObservableKind::Momentum,
            label: "p".into(),
        }
    }

    /// Parses `q`, `p`, `q2`, `q3`, `q4`.
    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "q" => Some(Self::q()),
            "p" => Some(Self::momentum()),
            "q2" => Some(Self::q2()),
            "q3" => Some(Self::q3()),
            "q4" => Some(Self::q4()),
            _ => None,
        }
    }

    pub fn is_momentum(&self) -> bool {
        matches!(self.kind, ObservableKind::Momentum)
    }

    pub fn as_position(&self) -> Option<&Polynomial> {
        match &self.kind {
            ObservableKind::Position(p) => Some(p),
            ObservableKind::Momentum => None,
        }
    }

    /// `A_0 = (1/N) sum_k A(x_k)` for position functions, `p_0` for momentum.
    pub fn centroid_value(&self, state: &RingPolymerState) -> f64 {
        match &self.kind {
            ObservableKind::Position(f) => bead_average(state.positions(), f),
            ObservableKind::Momentum => state.centroid_momentum(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `(1/N) sum_k f(x_k)`.
pub fn bead_average(x: &[f64], f: &Polynomial) -> f64 {
    x.iter().map(|&q| f.eval(q)).sum::<f64>() / x.len() as f64
}

/// `A_0(x) = (1/N) sum_k A(x_k)`; momentum observables are rejected.
pub fn centroid_observable(obs: &Observable, state: &RingPolymerState) -> Result<f64> {
    match &obs.kind {
        ObservableKind::Position(f) => Ok(bead_average(state.positions(), f)),
        ObservableKind::Momentum => Err(Error::UnsupportedObservable {
            label: obs.label.clone(),
            reason: "momentum has no position centroid; use centroid_momentum",
        }),
    }
}
