use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Potential;
use crate::ringpoly::{Observable, ObservableKind};

/// Uniform grid `q_i = q_min + i dq`, `i = 0..n_points`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(q_min: f64, q_max: f64, n_points: usize) -> Result<Self> {
        let g = Self {
            q_min,
            q_max,
            n_points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_min.is_finite() && self.q_max.is_finite() && self.q_min < self.q_max) {
            return Err(Error::invalid("grid", "need finite q_min < q_max"));
        }
        if self.n_points < 64 {
            return Err(Error::invalid("grid", "n_points must be >= 64"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dq = self.spacing();
        (0..self.n_points).map(|i| self.q_min + i as f64 * dq).collect()
    }
}

/// Lowest eigenpairs of the grid Hamiltonian. `states[n]` holds unit
/// vectors (`sum_i psi_i^2 = 1`); the continuum amplitude is `psi_i / sqrt(dq)`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub grid: GridSpec,
    pub mass: f64,
    pub hbar: f64,
    pub energies: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn n_retained(&self) -> usize {
        self.energies.len()
    }

    /// Continuum wavefunction `psi_n(q_i)`.
    pub fn wavefunction(&self, n: usize) -> Vec<f64> {
        let s = 1.0 / self.grid.spacing().sqrt();
        self.states[n].iter().map(|v| v * s).collect()
    }

    /// `<n|A|m>` in the retained basis.
    pub fn matrix(&self, obs: &Observable) -> DMatrix<Complex64> {
        let k = self.n_retained();
        match &obs.kind {
            ObservableKind::Position(f) => {
                let fq: Vec<f64> = self.grid.points().iter().map(|&q| f.eval(q)).collect();
                let mut m = DMatrix::zeros(k, k);
                for a in 0..k {
                    for b in a..k {
                        let v: f64 = self.states[a]
                            .iter()
                            .zip(&self.states[b])
                            .zip(&fq)
                            .map(|((x, y), f)| x * y * f)
                            .sum();
                        m[(a, b)] = Complex64::new(v, 0.0);
                        m[(b, a)] = Complex64::new(v, 0.0);
                    }
                }
                m
            }
            ObservableKind::Momentum => {
                let dpsi: Vec<Vec<f64>> = self.states.iter().map(|s| self.derivative(s)).collect();
                let mut m = DMatrix::zeros(k, k);
                for a in 0..k {
                    for b in 0..k {
                        let v: f64 = self.states[a].iter().zip(&dpsi[b]).map(|(x, y)| x * y).sum();
                        m[(a, b)] = Complex64::new(0.0, -self.hbar * v);
                    }
                }
                m
            }
        }
    }

    /// Sinc-DVR first derivative `D_ij = (-1)^(i-j) / ((i-j) dq)`.
    fn derivative(&self, psi: &[f64]) -> Vec<f64> {
        let n = psi.len();
        let dq = self.grid.spacing();
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                for (j, &v) in psi.iter().enumerate() {
                    if i != j {
                        let d = i as f64 - j as f64;
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign / d * v;
                    }
                }
                s / dq
            })
            .collect()
    }

    /// `|| H psi_n - E_n psi_n ||` for each retained state.
    pub fn residuals<P: Potential + ?Sized>(&self, model: &P) -> Vec<f64> {
        let h = hamiltonian(model, &self.grid, self.hbar);
        self.states
            .iter()
            .zip(&self.energies)
            .map(|(s, &e)| {
                let v = nalgebra::DVector::from_column_slice(s);
                (&h * &v - e * &v).norm()
            })
            .collect()
    }
}

fn hamiltonian<P: Potential + ?Sized>(model: &P, grid: &GridSpec, hbar: f64) -> DMatrix<f64> {
    let n = grid.n_points;
    let dq = grid.spacing();
    let t0 = hbar * hbar / (2.0 * model.mass() * dq * dq);
    let q = grid.points();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            t0 * PI * PI / 3.0 + model.value(q[i])
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            t0 * sign * 2.0 / (d * d)
        }
    })
}

/// Diagonalize with `hbar = 1`.
pub fn diagonalize<P: Potential + ?Sized>(
    model: &P,
    grid: &GridSpec,
    n_retained: usize,
) -> Result<EigenSystem> {
    diagonalize_with_hbar(model, grid, n_retained, 1.0)
}

/// Colbert-Miller sinc-DVR Hamiltonian on `grid`, lowest `n_retained` pairs.
pub fn diagonalize_with_hbar<P: Potential + ?Sized>(
    model: &P,
    grid: &GridSpec,
    n_retained: usize,
    hbar: f64,
) -> Result<EigenSystem> {
    grid.validate()?;
    if n_retained == 0 || n_retained > grid.n_points {
        return Err(Error::invalid("n_retained", "must be in 1..=n_points"));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::invalid("hbar", "must be finite and > 0"));
    }
    let h = hamiltonian(model, grid, hbar);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..grid.n_points).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(n_retained);

    let dq = grid.spacing();
    let v_min = grid
        .points()
        .iter()
        .map(|&q| model.value(q))
        .fold(f64::INFINITY, f64::min);
    let e_max = eig.eigenvalues[order[n_retained - 1]];
    let kinetic = (e_max - v_min).max(f64::MIN_POSITIVE);
    let limit = PI / 4.0 * hbar / (2.0 * model.mass() * kinetic).sqrt();
    if dq > limit {
        return Err(Error::invalid(
            "grid",
            format!("spacing {dq} exceeds the de Broglie limit {limit} for E_max = {e_max}"),
        ));
    }

    let mut energies = Vec::with_capacity(n_retained);
    let mut states = Vec::with_capacity(n_retained);
    for (n, &idx) in order.iter().enumerate() {
        let mut psi: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let big = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(first) = psi.iter().find(|v| v.abs() > 1e-3 * big) {
            if *first < 0.0 {
                psi.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let amplitude = psi[0].abs().max(psi[psi.len() - 1].abs()) / dq.sqrt();
        if amplitude >= 1e-8 {
            return Err(Error::BoundaryLeak {
                state: n,
                amplitude,
            });
        }
        energies.push(eig.eigenvalues[idx]);
        states.push(psi);
    }
    Ok(EigenSystem {
        grid: *grid,
        mass: model.mass(),
        hbar,
        energies,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialModel;

    #[test]
    fn harmonic_levels() {
        let m = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let e = diagonalize(&m, &GridSpec::new(-10.0, 10.0, 512).unwrap(), 10).unwrap();
        for (n, en) in e.energies.iter().enumerate() {
            assert!((en - (n as f64 + 0.5)).abs() <= 1e-8, "E_{n} = {en}");
        }
        assert!(e.residuals(&m).iter().all(|&r| r < 1e-8));
    }

    #[test]
    fn narrow_grid_leaks() {
        let m = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let err = diagonalize(&m, &GridSpec::new(-3.0, 3.0, 128).unwrap(), 5).unwrap_err();
        assert!(matches!(err, Error::BoundaryLeak { .. }));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let m = PotentialModel::harmonic(1.0, 1.0).unwrap();
        assert!(diagonalize(&m, &GridSpec::new(-40.0, 40.0, 64).unwrap(), 20).is_err());
        assert!(GridSpec::new(0.0, 1.0, 32).is_err());
    }

    #[test]
    fn momentum_matrix_is_hermitian() {
        let m = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let e = diagonalize(&m, &GridSpec::new(-10.0, 10.0, 256).unwrap(), 6).unwrap();
        let p = e.matrix(&Observable::momentum());
        // <0|p|1> = -i sqrt(1/2) for m = omega = hbar = 1
        assert!((p[(0, 1)].norm() - 0.5f64.sqrt()).abs() < 1e-8);
        assert!((&p - p.adjoint()).norm() < 1e-10);
    }
}
