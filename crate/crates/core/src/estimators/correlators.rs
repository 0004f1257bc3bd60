use rayon::prelude::*;

use super::series::{CorrelationSeries, SeriesMetadata};
use crate::dynamics::{cmd_trajectory, CentroidForceTable, IntegratorConfig, Propagator};
use crate::error::{Error, Result};
use crate::model::{Potential, PotentialModel, ThermoParams};
use crate::ringpoly::{Observable, ObservableKind, RingPolymerState};
use crate::sampler::{self, Ensemble, MomentumConvention, SamplerConfig};
use crate::stats::{self, DEFAULT_BLOCKS};

/// Running Neumaier sum for each time point.
#[derive(Clone)]
struct SeriesAccumulator {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl SeriesAccumulator {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![0.0; n],
            comp: vec![0.0; n],
        }
    }

    fn add(&mut self, values: &[f64]) {
        for ((s, c), &v) in self.sum.iter_mut().zip(&mut self.comp).zip(values) {
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
    }

    fn total(&self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}

/// Averages per-trajectory series `fill(i, out)` over `n` trajectories.
///
/// Trajectories are split into 16 contiguous blocks. Each block is summed in
/// index order, so the result does not depend on the worker count.
pub(crate) fn block_average<F>(n: usize, n_times: usize, fill: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync,
{
    if n < 2 * DEFAULT_BLOCKS {
        return Err(Error::InsufficientSamples {
            needed: 2 * DEFAULT_BLOCKS,
            got: n,
        });
    }
    let ranges = stats::block_ranges(n, DEFAULT_BLOCKS);
    let block_means: Vec<Vec<f64>> = ranges
        .par_iter()
        .map(|range| {
            let mut acc = SeriesAccumulator::new(n_times);
            let mut buf = vec![0.0; n_times];
            for i in range.clone() {
                fill(i, &mut buf)?;
                acc.add(&buf);
            }
            let len = range.len() as f64;
            Ok(acc.total().into_iter().map(|s| s / len).collect())
        })
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = ranges.iter().map(|r| r.len()).collect();
    let mut means = Vec::with_capacity(n_times);
    let mut errors = Vec::with_capacity(n_times);
    let mut column = vec![0.0; DEFAULT_BLOCKS];
    for t in 0..n_times {
        for (c, b) in column.iter_mut().zip(&block_means) {
            *c = b[t];
        }
        let (m, se) = stats::mean_and_error_from_blocks(&column, &sizes);
        means.push(m);
        errors.push(se);
    }
    Ok((means, errors))
}

fn record_indices(cfg: &IntegratorConfig) -> usize {
    cfg.n_steps / cfg.record_stride + 1
}

/// RPMD estimate of the Kubo correlator from fresh `(x, p)` draws.
pub fn rpmd_kubo_correlator(
    model: &PotentialModel,
    thermo: &ThermoParams,
    sampler_cfg: &SamplerConfig,
    integrator_cfg: &IntegratorConfig,
    a: &Observable,
    b: &Observable,
    convention: MomentumConvention,
) -> Result<CorrelationSeries> {
    rpmd_correlator_impl(model, thermo, sampler_cfg, integrator_cfg, a, b, convention, false)
}

/// Same initial conditions with all momenta reversed. For `A = B` in
/// equilibrium this estimates the same function as the forward run.
pub fn rpmd_kubo_correlator_time_reversed(
    model: &PotentialModel,
    thermo: &ThermoParams,
    sampler_cfg: &SamplerConfig,
    integrator_cfg: &IntegratorConfig,
    a: &Observable,
    b: &Observable,
    convention: MomentumConvention,
) -> Result<CorrelationSeries> {
    rpmd_correlator_impl(model, thermo, sampler_cfg, integrator_cfg, a, b, convention, true)
}

#[allow(clippy::too_many_arguments)]
fn rpmd_correlator_impl(
    model: &PotentialModel,
    thermo: &ThermoParams,
    sampler_cfg: &SamplerConfig,
    integrator_cfg: &IntegratorConfig,
    a: &Observable,
    b: &Observable,
    convention: MomentumConvention,
    reversed: bool,
) -> Result<CorrelationSeries> {
    integrator_cfg.validate_for(model.omega())?;
    let ensemble = sampler::sample_ring_positions(model, thermo, sampler_cfg)?;
    let mut series = correlator_from_ensemble(
        &ensemble,
        model,
        thermo,
        integrator_cfg,
        a,
        b,
        convention,
        sampler_cfg.seed,
        reversed,
    )?;
    let meta = &mut series.metadata;
    meta.method = if reversed { "rpmd_reversed" } else { "rpmd" }.into();
    meta.insert("model", model);
    meta.insert("thermo", thermo);
    meta.insert("sampler", sampler_cfg);
    meta.insert("integrator", integrator_cfg);
    meta.insert("acceptance", ensemble.acceptance());
    meta.insert("warnings", ensemble.warnings());
    Ok(series)
}

/// RPMD correlator over a given position ensemble; trajectory `i` draws its
/// momenta from stream `(momentum_seed, Momenta, i)`.
#[allow(clippy::too_many_arguments)]
pub fn correlator_from_ensemble<P: Potential + ?Sized>(
    ensemble: &Ensemble,
    model: &P,
    thermo: &ThermoParams,
    integrator_cfg: &IntegratorConfig,
    a: &Observable,
    b: &Observable,
    convention: MomentumConvention,
    momentum_seed: u64,
    reversed: bool,
) -> Result<CorrelationSeries> {
    integrator_cfg.validate()?;
    if ensemble.n_beads() != thermo.n_beads() {
        return Err(Error::invalid("ensemble", "bead count differs from thermo.n_beads"));
    }
    let n_times = record_indices(integrator_cfg);
    let stride = integrator_cfg.record_stride;
    let (values, errors) = block_average(ensemble.len(), n_times, |i, out| {
        let mut p = sampler::draw_momenta(thermo, model, momentum_seed, i as u64, convention);
        if reversed {
            p.iter_mut().for_each(|v| *v = -*v);
        }
        let mut state = RingPolymerState::new(ensemble.configuration(i).to_vec(), p)?;
        let a0 = a.centroid_value(&state);
        let mut prop = Propagator::new(model, thermo, integrator_cfg.dt);
        out[0] = a0 * b.centroid_value(&state);
        let (x, _) = state.parts_mut();
        prop.prime(x);
        for step in 1..=integrator_cfg.n_steps {
            let (x, p) = state.parts_mut();
            prop.step(x, p);
            if step % stride == 0 {
                out[step / stride] = a0 * b.centroid_value(&state);
            }
        }
        Ok(())
    })?;
    let meta = SeriesMetadata::new(&a.label, &b.label, "rpmd")
        .with("n_trajectories", ensemble.len())
        .with("momentum_convention", convention)
        .with("momentum_seed", momentum_seed);
    CorrelationSeries::new(integrator_cfg.record_times(), values, errors, meta)
}

fn check_linear(a: &Observable) -> Result<()> {
    match &a.kind {
        ObservableKind::Momentum => Ok(()),
        ObservableKind::Position(f) if f.degree() <= 1 => Ok(()),
        ObservableKind::Position(_) => Err(Error::UnsupportedObservable {
            label: a.label.clone(),
            reason: "centroid dynamics needs A linear in q and p",
        }),
    }
}

fn centroid_value(obs: &Observable, q: f64, p: f64) -> f64 {
    match &obs.kind {
        ObservableKind::Position(f) => f.eval(q),
        ObservableKind::Momentum => p,
    }
}

/// CMD estimate: centroids from the unconstrained ensemble, centroid momenta
/// Gaussian with variance `m / beta`, dynamics on the tabulated force.
pub fn cmd_kubo_correlator(
    model: &PotentialModel,
    thermo: &ThermoParams,
    table: &CentroidForceTable,
    sampler_cfg: &SamplerConfig,
    integrator_cfg: &IntegratorConfig,
    a: &Observable,
    b: &Observable,
) -> Result<CorrelationSeries> {
    check_linear(a)?;
    integrator_cfg.validate_for(model.omega())?;
    let ensemble = sampler::sample_ring_positions(model, thermo, sampler_cfg)?;
    let centroids = ensemble.centroids();
    let mass = model.mass();
    let seed = sampler_cfg.seed;
    let (values, errors) = block_average(centroids.len(), record_indices(integrator_cfg), |i, out| {
        let q0 = centroids[i];
        let p0 = crate::dynamics::centroid_momentum_draw(mass, thermo.beta(), seed, i as u64);
        let traj = cmd_trajectory(q0, p0, table, mass, integrator_cfg)?;
        let a0 = centroid_value(a, q0, p0);
        for (j, o) in out.iter_mut().enumerate() {
            *o = a0 * centroid_value(b, traj.q[j], traj.p[j]);
        }
        Ok(())
    })?;
    let meta = SeriesMetadata::new(&a.label, &b.label, "cmd")
        .with("n_trajectories", centroids.len())
        .with("model", model)
        .with("thermo", thermo)
        .with("sampler", sampler_cfg)
        .with("integrator", integrator_cfg)
        .with("force_table_nodes", table.grid().len())
        .with("acceptance", ensemble.acceptance())
        .with("warnings", ensemble.warnings());
    CorrelationSeries::new(integrator_cfg.record_times(), values, errors, meta)
}

/// `C_Ap(t) = m dC_Aq/dt` by fourth-order finite differences.
///
/// `omega` is the fastest physical frequency of the series; the grid must
/// satisfy `dt * omega <= 0.2`. Errors are propagated through the stencil as
/// if neighbouring points were independent.
pub fn kubo_momentum_correlator_via_derivative(
    series: &CorrelationSeries,
    mass: f64,
    omega: f64,
) -> Result<CorrelationSeries> {
    if series.len() < 5 {
        return Err(Error::InsufficientSamples {
            needed: 5,
            got: series.len(),
        });
    }
    let dt = series
        .uniform_step()
        .ok_or_else(|| Error::invalid("times", "derivative route needs a uniform grid"))?;
    if dt * omega > 0.2 {
        return Err(Error::GridTooCoarse(dt * omega));
    }
    let n = series.len();
    let f = &series.values;
    let s = &series.std_errors;
    let mut values = Vec::with_capacity(n);
    let mut errors = Vec::with_capacity(n);
    for i in 0..n {
        let (start, w): (usize, [f64; 5]) = match i {
            0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
            1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
            _ if i == n - 2 => (n - 5, [-1.0, 6.0, -18.0, 10.0, 3.0]),
            _ if i == n - 1 => (n - 5, [3.0, -16.0, 36.0, -48.0, 25.0]),
            _ => (i - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
        };
        let scale = mass / (12.0 * dt);
        let v: f64 = (0..5).map(|j| w[j] * f[start + j]).sum();
        let e: f64 = (0..5).map(|j| (w[j] * s[start + j]).powi(2)).sum();
        values.push(scale * v);
        errors.push(scale * e.sqrt());
    }
    let mut meta = series.metadata.clone();
    meta.b = "p".into();
    meta.method = format!("{}+derivative", meta.method);
    meta.insert("derivative_mass", mass);
    CorrelationSeries::new(series.times.clone(), values, errors, meta)
}
