use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::EigenSystem;
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::estimators::{CorrelationSeries, SeriesMetadata};
use crate::ringpoly::Observable;

/// Relative weight of the last retained state above which the spectrum is
/// considered truncated.
pub const COMPLETENESS_TOL: f64 = 1e-12;
pub const IMAGINARY_TOL: f64 = 1e-10;

/// `w_nm = (e^{-beta E_n} - e^{-beta E_m}) / (beta (E_m - E_n))`, with the
/// degenerate limit `e^{-beta E_n}` taken by series expansion.
pub fn kubo_weight(beta: f64, e_n: f64, e_m: f64) -> f64 {
    let d = e_m - e_n;
    let base = (-beta * e_n).exp();
    if d.abs() < 1e-10 * e_n.abs().max(1.0) {
        let x = beta * d;
        base * (1.0 - x / 2.0 + x * x / 6.0)
    } else {
        base * -(-beta * d).exp_m1() / (beta * d)
    }
}

/// `(1/beta) int_0^beta e^{-lambda E_n} e^{-(beta - lambda) E_m} d lambda`
/// by Gauss-Legendre quadrature.
pub fn kubo_weight_quadrature(beta: f64, e_n: f64, e_m: f64, n_nodes: usize) -> f64 {
    let (x, w) = gauss_legendre(n_nodes);
    let h = 0.5 * beta;
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let lam = h * (1.0 + xi);
            wi * h * (-lam * e_n - (beta - lam) * e_m).exp()
        })
        .sum::<f64>()
        / beta
}

/// Boltzmann factors relative to the ground state and their sum.
fn boltzmann(eig: &EigenSystem, beta: f64) -> Result<(Vec<f64>, f64)> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", "must be finite and > 0"));
    }
    let e0 = eig.energies[0];
    let b: Vec<f64> = eig.energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = b.iter().sum();
    let tail = b[b.len() - 1] / z;
    if tail >= COMPLETENESS_TOL {
        return Err(Error::SpectralIncomplete(tail));
    }
    Ok((b, z))
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "must start at 0 and increase"));
    }
    Ok(())
}

/// Evaluates `sum_nm c_nm e^{i (E_m - E_n) t / hbar}` on `times` and checks
/// the imaginary residue.
fn spectral_sum(
    eig: &EigenSystem,
    coeff: &DMatrix<Complex64>,
    times: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let k = eig.n_retained();
    let scale: f64 = coeff.iter().map(|c| c.norm()).sum::<f64>().max(1.0);
    let mut values = Vec::with_capacity(times.len());
    let mut worst: f64 = 0.0;
    for &t in times {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..k {
            for m in 0..k {
                let c = coeff[(n, m)];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let phase = (eig.energies[m] - eig.energies[n]) * t / eig.hbar;
                acc += c * Complex64::from_polar(1.0, phase);
            }
        }
        worst = worst.max(acc.im.abs());
        if acc.im.abs() >= IMAGINARY_TOL * scale {
            return Err(Error::ImaginaryResidue(acc.im.abs()));
        }
        values.push(acc.re);
    }
    Ok((values, worst))
}

/// Exact Kubo-transformed correlator from the retained spectrum.
pub fn exact_kubo_correlator(
    eig: &EigenSystem,
    a: &Observable,
    b: &Observable,
    beta: f64,
    times: &[f64],
) -> Result<CorrelationSeries> {
    check_times(times)?;
    let (_, z) = boltzmann(eig, beta)?;
    let e0 = eig.energies[0];
    let am = eig.matrix(a);
    let bm = eig.matrix(b);
    let k = eig.n_retained();
    let coeff = DMatrix::from_fn(k, k, |n, m| {
        let w = kubo_weight(beta, eig.energies[n] - e0, eig.energies[m] - e0);
        am[(n, m)] * bm[(m, n)] * (w / z)
    });
    let (values, residue) = spectral_sum(eig, &coeff, times)?;
    let meta = SeriesMetadata::new(&a.label, &b.label, "exact")
        .with("beta", beta)
        .with("n_retained", k)
        .with("grid", eig.grid)
        .with("max_imaginary_residue", residue);
    CorrelationSeries::exact(times.to_vec(), values, meta)
}

/// `(1/beta) int_0^beta d lambda Tr[e^{-lambda H} A e^{-(beta - lambda) H} B] / Z`
/// with an `n_nodes` Gauss-Legendre rule applied to the operator products.
pub fn lambda_quadrature_kubo(
    eig: &EigenSystem,
    a: &Observable,
    b: &Observable,
    beta: f64,
    n_nodes: usize,
) -> Result<f64> {
    let (_, z) = boltzmann(eig, beta)?;
    let e0 = eig.energies[0];
    let am = eig.matrix(a);
    let bm = eig.matrix(b);
    let k = eig.n_retained();
    let (x, w) = gauss_legendre(n_nodes);
    let h = 0.5 * beta;
    let mut total = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(&w) {
        let lam = h * (1.0 + xi);
        let left = DMatrix::from_fn(k, k, |n, m| {
            am[(n, m)] * (-lam * (eig.energies[n] - e0)).exp()
        });
        let right = DMatrix::from_fn(k, k, |m, n| {
            bm[(m, n)] * (-(beta - lam) * (eig.energies[m] - e0)).exp()
        });
        total += (left * right).trace() * (wi * h);
    }
    Ok(total.re / (beta * z))
}

/// The `N`-point trapezoid approximation of the Kubo transform of `A`:
/// `(1/2N)(A e^{-beta H} + e^{-beta H} A) + (1/N) sum_j e^{-beta j H/N} A e^{-beta (1 - j/N) H}`,
/// stored in the energy basis.
#[derive(Debug, Clone)]
pub struct DiscreteKubo {
    pub n: usize,
    pub beta: f64,
    pub label: String,
    /// Matrix elements in the retained energy basis.
    pub matrix: DMatrix<Complex64>,
    pub partition_function: f64,
}

pub fn discrete_kubo_transform(
    eig: &EigenSystem,
    a: &Observable,
    beta: f64,
    n: usize,
) -> Result<DiscreteKubo> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    boltzmann(eig, beta)?;
    let am = eig.matrix(a);
    let e = &eig.energies;
    let k = eig.n_retained();
    let nf = n as f64;
    let matrix = DMatrix::from_fn(k, k, |i, j| {
        let mut f = ((-beta * e[i]).exp() + (-beta * e[j]).exp()) / (2.0 * nf);
        for s in 1..n {
            let x = s as f64 / nf;
            f += (-beta * x * e[i] - beta * (1.0 - x) * e[j]).exp() / nf;
        }
        am[(i, j)] * f
    });
    let z = e.iter().map(|en| (-beta * en).exp()).sum();
    Ok(DiscreteKubo {
        n,
        beta,
        label: a.label.clone(),
        matrix,
        partition_function: z,
    })
}

impl DiscreteKubo {
    /// `Tr[K e^{iHt} B e^{-iHt}] / Z` on `times`.
    pub fn correlate(
        &self,
        eig: &EigenSystem,
        b: &Observable,
        times: &[f64],
    ) -> Result<CorrelationSeries> {
        check_times(times)?;
        let bm = eig.matrix(b);
        let k = eig.n_retained();
        let coeff = DMatrix::from_fn(k, k, |n, m| {
            self.matrix[(n, m)] * bm[(m, n)] / self.partition_function
        });
        let (values, residue) = spectral_sum(eig, &coeff, times)?;
        let meta = SeriesMetadata::new(&self.label, &b.label, "discrete_kubo")
            .with("n_beads", self.n)
            .with("beta", self.beta)
            .with("max_imaginary_residue", residue);
        CorrelationSeries::exact(times.to_vec(), values, meta)
    }
}
