//! Closed-form harmonic references: the bond kernel, the Gaussian swarm
//! trace, the linear-`B` correlator built from classical centroid motion, and
//! the centroid density.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::integrate_adaptive;
use crate::error::{Error, Result};
use crate::estimators::{block_average, CorrelationSeries, DensityGrid, DensityTable, SeriesMetadata};
use crate::model::{Potential, PotentialModel, ThermoParams};
use crate::ringpoly::{bond_midpoints, observable_average, Observable, Polynomial};
use crate::sampler::{self, MomentumConvention, SamplerConfig};

/// Absolute tolerance of the swarm-trace quadrature.
pub const SWARM_TOL: f64 = 1e-8;
/// Half-width of the integration window in Gaussian standard deviations.
const SWARM_WIDTHS: f64 = 8.0;

fn harmonic_omega(model: &PotentialModel) -> Result<f64> {
    match model.omega() {
        Some(w) if model.is_harmonic() => Ok(w),
        _ => Err(Error::invalid("model", "a harmonic model is required")),
    }
}

/// `J = exp(-beta m w^2 eta^2 / (8N)) exp(i eta p_mid / hbar)` with
/// `p_mid = (p_k + p_{k+1}) / 2`. It does not depend on `x_k`.
pub fn harmonic_j_kernel(
    _x_k: f64,
    p_mid: f64,
    eta: f64,
    model: &PotentialModel,
    thermo: &ThermoParams,
) -> Result<Complex64> {
    let w = harmonic_omega(model)?;
    let m = model.mass();
    let damp = (-thermo.beta() * m * w * w * eta * eta / (8.0 * thermo.n_beads() as f64)).exp();
    Ok(Complex64::from_polar(damp, eta * p_mid / thermo.hbar()))
}

/// Gaussian swarm of bead `k`: center and variance at time `t`.
fn swarm_gaussian(x_k: f64, p_mid: f64, t: f64, m: f64, w: f64, thermo: &ThermoParams) -> (f64, f64) {
    let (s, c) = (w * t).sin_cos();
    let center = x_k * c + p_mid / (m * w) * s;
    let var = thermo.beta() * thermo.hbar().powi(2) * s * s / (4.0 * m * thermo.n_beads() as f64);
    (center, var)
}

/// Bead average of `B` over the Gaussian swarm at time `t`. Each Gaussian is
/// integrated adaptively over eight widths either side of its center; a
/// vanishing width is the delta-function limit `B(center)`.
pub fn harmonic_swarm_trace(
    x: &[f64],
    p: &[f64],
    t: f64,
    b: &Polynomial,
    model: &PotentialModel,
    thermo: &ThermoParams,
) -> Result<f64> {
    let w = harmonic_omega(model)?;
    let n = thermo.n_beads();
    if x.len() != n || p.len() != n {
        return Err(Error::invalid("state", "bead count differs from thermo.n_beads"));
    }
    if !t.is_finite() || x.iter().chain(p).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("swarm trace input"));
    }
    let m = model.mass();
    let mids = bond_midpoints(p);
    let mut total = 0.0;
    for k in 0..n {
        let (center, var) = swarm_gaussian(x[k], mids[k], t, m, w, thermo);
        if var == 0.0 {
            total += b.eval(center);
            continue;
        }
        let sd = var.sqrt();
        let norm = 1.0 / (2.0 * PI * var).sqrt();
        let f = |q: f64| {
            let z = q - center;
            b.eval(q) * norm * (-0.5 * z * z / var).exp()
        };
        total += integrate_adaptive(
            f,
            center - SWARM_WIDTHS * sd,
            center + SWARM_WIDTHS * sd,
            SWARM_TOL / n as f64,
        )?;
    }
    Ok(total / n as f64)
}

/// `x_0(t) = (1/N) sum_k [x_k cos wt + (p_k + p_{k+1}) / (2 m w) sin wt]`.
pub fn harmonic_centroid_mean(x: &[f64], p: &[f64], t: f64, m: f64, w: f64) -> f64 {
    let n = x.len();
    let (s, c) = (w * t).sin_cos();
    (0..n)
        .map(|k| x[k] * c + (p[k] + p[(k + 1) % n]) / (2.0 * m * w) * s)
        .sum::<f64>()
        / n as f64
}

/// Monte Carlo `C_Aq(t)` from `A_0(x) x_0(t)` over `R(x) M_0(p)`.
///
/// Positions and momenta come from the same streams as
/// `rpmd_kubo_correlator` with the bead convention and the same
/// `sampler_cfg`, so the two estimates are sample-matched.
pub fn harmonic_caq_reference(
    model: &PotentialModel,
    thermo: &ThermoParams,
    a: &Observable,
    times: &[f64],
    sampler_cfg: &SamplerConfig,
) -> Result<CorrelationSeries> {
    let w = harmonic_omega(model)?;
    let fa = a.as_position().ok_or_else(|| Error::UnsupportedObservable {
        label: a.label.clone(),
        reason: "A must be a position function",
    })?;
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::invalid("times", "must start at 0"));
    }
    let ensemble = sampler::sample_ring_positions(model, thermo, sampler_cfg)?;
    let m = model.mass();
    let (values, errors) = block_average(ensemble.len(), times.len(), |i, out| {
        let x = ensemble.configuration(i);
        let p = sampler::draw_momenta(thermo, model, sampler_cfg.seed, i as u64, MomentumConvention::Bead);
        let a0 = observable_average(x, fa);
        for (o, &t) in out.iter_mut().zip(times) {
            *o = a0 * harmonic_centroid_mean(x, &p, t, m, w);
        }
        Ok(())
    })?;
    let meta = SeriesMetadata::new(&a.label, "q", "harmonic_caq_reference")
        .with("model", model)
        .with("thermo", thermo)
        .with("sampler", sampler_cfg)
        .with("n_samples", ensemble.len());
    CorrelationSeries::new(times.to_vec(), values, errors, meta)
}

/// Variances `(1/(beta m w^2), m/beta)` of the harmonic centroid density in
/// `q_c` and `p_c`. They do not depend on `N`.
pub fn harmonic_centroid_variances(model: &PotentialModel, thermo: &ThermoParams) -> Result<(f64, f64)> {
    let w = harmonic_omega(model)?;
    let m = model.mass();
    Ok((1.0 / (thermo.beta() * m * w * w), m / thermo.beta()))
}

/// Analytic `rho_c(q_c)` at the bin centers of `grid`, zero error bars.
/// The momentum factor is Gaussian with the variance in the metadata.
pub fn centroid_density_reference(
    model: &PotentialModel,
    thermo: &ThermoParams,
    grid: &DensityGrid,
) -> Result<DensityTable> {
    let (vq, vp) = harmonic_centroid_variances(model, thermo)?;
    let centers = grid.centers();
    let norm = 1.0 / (2.0 * PI * vq).sqrt();
    let density = centers.iter().map(|q| norm * (-0.5 * q * q / vq).exp()).collect();
    let metadata = SeriesMetadata::new("", "", "centroid_density_reference")
        .with("q_variance", vq)
        .with("p_variance", vp);
    Ok(DensityTable {
        width: grid.width(),
        std_errors: vec![0.0; centers.len()],
        centers,
        density,
        metadata,
    })
}

/// Exact harmonic `C_qq(t) = cos(wt) / (beta m w^2)`.
pub fn harmonic_kubo_qq(model: &PotentialModel, thermo: &ThermoParams, t: f64) -> Result<f64> {
    let w = harmonic_omega(model)?;
    Ok((w * t).cos() / (thermo.beta() * model.mass() * w * w))
}
