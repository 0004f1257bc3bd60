//! Ring-polymer state, centroid functionals, spring energetics and the
//! position density `R(x)`.
//!
//! Beads are indexed `0..N` with cyclic closure (`N ≡ 0`). Momenta are the
//! real, contour-shifted bead momenta; the imaginary shift is never stored.

mod normal_modes;
mod observable;

pub use normal_modes::{free_rp_frequencies, normal_mode_transform, Direction, NormalModes};
pub use observable::{bead_average as observable_average, centroid_observable, Observable, ObservableKind, Polynomial};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Potential, ThermoParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingPolymerState {
    positions: Vec<f64>,
    momenta: Vec<f64>,
}

impl RingPolymerState {
    pub fn new(positions: Vec<f64>, momenta: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("positions", "ring polymer needs at least one bead"));
        }
        if positions.len() != momenta.len() {
            return Err(Error::invalid(
                "momenta",
                format!("length {} != {} beads", momenta.len(), positions.len()),
            ));
        }
        if positions.iter().chain(&momenta).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ring polymer state"));
        }
        Ok(Self { positions, momenta })
    }

    /// Beads at rest.
    pub fn at_rest(positions: Vec<f64>) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, vec![0.0; n])
    }

    pub fn n_beads(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.positions, &mut self.momenta)
    }

    pub fn centroid_position(&self) -> f64 {
        centroid(&self.positions)
    }

    pub fn centroid_momentum(&self) -> f64 {
        centroid(&self.momenta)
    }

    /// Cyclic bond midpoints `(p_k + p_{k+1}) / 2`.
    pub fn bond_midpoint_momenta(&self) -> Vec<f64> {
        bond_midpoints(&self.momenta)
    }

    /// Ring-polymer Hamiltonian `sum p^2/2m + spring + sum V`.
    pub fn ring_hamiltonian<P: Potential + ?Sized>(&self, thermo: &ThermoParams, model: &P) -> f64 {
        let m = model.mass();
        let kinetic: f64 = self.momenta.iter().map(|p| p * p).sum::<f64>() / (2.0 * m);
        let potential: f64 = self.positions.iter().map(|&x| model.value(x)).sum();
        kinetic + spring_energy(&self.positions, thermo, m) + potential
    }
}

pub fn centroid(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn bond_midpoints(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    (0..n).map(|k| 0.5 * (p[k] + p[(k + 1) % n])).collect()
}

/// `sum_k (m/2) w_N^2 (x_k - x_{k+1})^2` with `w_N = N / (beta hbar)`.
pub fn spring_energy(x: &[f64], thermo: &ThermoParams, mass: f64) -> f64 {
    let n = x.len();
    if n == 1 {
        return 0.0;
    }
    let wn = thermo.omega_n();
    0.5 * mass * wn * wn * bond_square_sum(x)
}

/// Spring forces `-d(spring)/dx_k`; they sum to zero over the ring.
pub fn spring_forces(x: &[f64], thermo: &ThermoParams, mass: f64) -> Vec<f64> {
    let n = x.len();
    if n == 1 {
        return vec![0.0];
    }
    let k = mass * thermo.omega_n().powi(2);
    (0..n)
        .map(|j| {
            let prev = x[(j + n - 1) % n];
            let next = x[(j + 1) % n];
            -k * (2.0 * x[j] - prev - next)
        })
        .collect()
}

pub(crate) fn bond_square_sum(x: &[f64]) -> f64 {
    let n = x.len();
    (0..n)
        .map(|k| {
            let d = x[k] - x[(k + 1) % n];
            d * d
        })
        .sum()
}

/// Normalization term `(N/2) log(m N / (2 pi beta hbar^2))` of `log R`.
pub fn log_ring_prefactor(thermo: &ThermoParams, mass: f64) -> f64 {
    let n = thermo.n_beads() as f64;
    let h = thermo.hbar();
    0.5 * n * (mass * n / (2.0 * PI * thermo.beta() * h * h)).ln()
}

/// `log R(x)` including its prefactor.
pub fn log_ring_density<P: Potential + ?Sized>(
    x: &[f64],
    thermo: &ThermoParams,
    model: &P,
) -> Result<f64> {
    if x.len() != thermo.n_beads() {
        return Err(Error::invalid(
            "positions",
            format!("{} beads for n_beads = {}", x.len(), thermo.n_beads()),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("positions"));
    }
    let n = thermo.n_beads() as f64;
    let beta = thermo.beta();
    let h = thermo.hbar();
    let m = model.mass();
    let potential: f64 = x.iter().map(|&q| model.value(q)).sum();
    Ok(log_ring_prefactor(thermo, m)
        - beta / n * potential
        - m * n / (2.0 * beta * h * h) * if x.len() > 1 { bond_square_sum(x) } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialModel;

    fn thermo(beta: f64, n: usize) -> ThermoParams {
        ThermoParams::natural(beta, n).unwrap()
    }

    #[test]
    fn centroid_examples() {
        let s = RingPolymerState::at_rest(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.centroid_position(), 2.0);
        let s = RingPolymerState::at_rest(vec![0.7; 5]).unwrap();
        assert!((s.centroid_position() - 0.7).abs() < 1e-15);
        let s = RingPolymerState::at_rest(vec![-1.0, 1.0]).unwrap();
        assert_eq!(s.centroid_position(), 0.0);
    }

    #[test]
    fn centroid_observable_examples() {
        let s = RingPolymerState::at_rest(vec![1.0, 2.0]).unwrap();
        assert_eq!(centroid_observable(&Observable::q2(), &s).unwrap(), 2.5);
        let s = RingPolymerState::at_rest(vec![-0.3, 1.7, 2.2]).unwrap();
        assert!(
            (centroid_observable(&Observable::q(), &s).unwrap() - s.centroid_position()).abs()
                < 1e-15
        );
        let s = RingPolymerState::at_rest(vec![-1.3, 1.3]).unwrap();
        assert_eq!(centroid_observable(&Observable::q3(), &s).unwrap(), 0.0);
        assert!(matches!(
            centroid_observable(&Observable::momentum(), &s),
            Err(Error::UnsupportedObservable { .. })
        ));
    }

    #[test]
    fn centroid_momentum_examples() {
        let s = RingPolymerState::new(vec![0.0, 0.0], vec![2.0, 4.0]).unwrap();
        assert_eq!(s.centroid_momentum(), 3.0);
        let s = RingPolymerState::at_rest(vec![1.0; 4]).unwrap();
        assert_eq!(s.centroid_momentum(), 0.0);
        let s = RingPolymerState::new(vec![0.0; 4], vec![0.5, -1.0, 2.5, 3.0]).unwrap();
        assert!((centroid(&s.bond_midpoint_momenta()) - s.centroid_momentum()).abs() < 1e-15);
    }

    #[test]
    fn spring_energy_examples() {
        assert_eq!(spring_energy(&[0.0, 1.0], &thermo(1.0, 2), 1.0), 4.0);
        assert_eq!(spring_energy(&[2.5; 6], &thermo(1.0, 6), 1.0), 0.0);
        assert_eq!(spring_energy(&[2.5], &thermo(1.0, 1), 1.0), 0.0);
    }

    #[test]
    fn log_ring_density_examples() {
        let h = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let v = log_ring_density(&[0.0], &thermo(1.0, 1), &h).unwrap();
        assert!((v - (-0.918_938_533_204_672_7)).abs() < 1e-12);

        // exponent of the free ring: -(mN/(2 beta hbar^2)) sum d^2
        let t = thermo(1.0, 2);
        let exponent = log_ring_density(&[0.0, 1.0], &t, &h).unwrap()
            - log_ring_prefactor(&t, 1.0)
            + (t.beta() / 2.0) * (h.value(0.0) + h.value(1.0));
        assert!((exponent + 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_ring_density_decomposes() {
        let h = PotentialModel::mildly_anharmonic(1.2, 0.8, 0.1, 0.02).unwrap();
        let t = ThermoParams::new(2.0, 5, 0.9).unwrap();
        let x = [0.3, -0.4, 1.2, 0.0, 0.6];
        let y = [0.1, 0.2, 0.3, -0.2, 0.9];
        let parts = |x: &[f64]| {
            log_ring_prefactor(&t, 1.2)
                - t.beta_n() * x.iter().map(|&q| h.value(q)).sum::<f64>()
                - t.beta_n() * spring_energy(x, &t, 1.2)
        };
        let lx = log_ring_density(&x, &t, &h).unwrap();
        let ly = log_ring_density(&y, &t, &h).unwrap();
        assert!((lx - parts(&x)).abs() < 1e-12);
        assert!(((lx - ly) - (parts(&x) - parts(&y))).abs() < 1e-12);
    }

    #[test]
    fn spring_forces_cancel() {
        let t = thermo(0.5, 7);
        let x = [0.3, -1.4, 2.2, 0.0, 0.6, 5.0, -3.3];
        let f = spring_forces(&x, &t, 2.0);
        let scale: f64 = f.iter().map(|v| v.abs()).sum();
        assert!(f.iter().sum::<f64>().abs() <= 1e-14 * scale);
    }

    #[test]
    fn state_validation() {
        assert!(RingPolymerState::new(vec![], vec![]).is_err());
        assert!(RingPolymerState::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(RingPolymerState::new(vec![f64::NAN], vec![0.0]).is_err());
    }
}
