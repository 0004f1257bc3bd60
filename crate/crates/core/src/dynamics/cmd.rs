use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rpmd::IntegratorConfig;
use super::spline::CubicSpline;
use crate::error::{Error, Result, Warning};
use crate::model::{Potential, PotentialModel, ThermoParams};
use crate::rng::{self, Purpose};
use crate::sampler::{self, SamplerConfig};
use crate::stats;

/// Mean centroid force `F_c(q_c)` on a grid, interpolated by a natural
/// cubic spline.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidForceTable {
    grid: Vec<f64>,
    force: Vec<f64>,
    std_errors: Vec<f64>,
    spline: CubicSpline,
    warnings: Vec<Warning>,
}

impl CentroidForceTable {
    pub fn from_values(grid: Vec<f64>, force: Vec<f64>, std_errors: Vec<f64>) -> Result<Self> {
        if std_errors.len() != grid.len() {
            return Err(Error::invalid("std_errors", "length must match grid"));
        }
        let spline = CubicSpline::natural(grid.clone(), force.clone())?;
        Ok(Self {
            grid,
            force,
            std_errors,
            spline,
            warnings: Vec::new(),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn force(&self) -> &[f64] {
        &self.force
    }

    pub fn std_errors(&self) -> &[f64] {
        &self.std_errors
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn range(&self) -> (f64, f64) {
        self.spline.range()
    }

    pub fn contains(&self, q: f64) -> bool {
        let (lo, hi) = self.range();
        q >= lo && q <= hi
    }

    /// Interpolated force; errors outside the tabulated range.
    pub fn force_at(&self, q: f64) -> Result<f64> {
        if !self.contains(q) {
            let (min, max) = self.range();
            return Err(Error::GridEscape { q, min, max });
        }
        Ok(self.spline.eval(q))
    }

    /// Centroid potential `V_c(q) = -int_{q_min}^{q} F_c`.
    pub fn potential_at(&self, q: f64) -> Result<f64> {
        self.force_at(q)?;
        Ok(-self.spline.integral(q))
    }

    /// CSV with columns `q_c, force, std_error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q_c,force,std_error\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{},{},{}\n", self.grid[i], self.force[i], self.std_errors[i]));
        }
        out
    }
}

/// Tabulate `F_c(q_c) = < -(1/N) sum_k V'(x_k) >` over constrained ensembles.
///
/// Node `i` samples with seed `mix(cfg.seed, i)`.
pub fn build_centroid_force_table(
    model: &PotentialModel,
    thermo: &ThermoParams,
    cfg: &SamplerConfig,
    grid: &[f64],
) -> Result<CentroidForceTable> {
    if grid.len() < 2 {
        return Err(Error::invalid("grid", "need at least two nodes"));
    }
    let nodes: Vec<Result<(f64, f64, Vec<Warning>)>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &q_c)| {
            let mut node_cfg = cfg.clone();
            node_cfg.seed = rng::mix(cfg.seed, i as u64);
            let ens = sampler::sample_constrained_with_purpose(
                model,
                thermo,
                &node_cfg,
                q_c,
                Purpose::ForceTable,
            )?;
            let forces: Vec<f64> = ens
                .configurations()
                .map(|x| -x.iter().map(|&q| model.gradient(q)).sum::<f64>() / x.len() as f64)
                .collect();
            let (mean, se) = stats::block_mean_error(&forces, stats::DEFAULT_BLOCKS)?;
            let warnings = ens
                .warnings()
                .iter()
                .map(|w| match w {
                    Warning::NonErgodic { acceptance, .. } => Warning::NonErgodic {
                        acceptance: *acceptance,
                        context: format!("force table node q_c = {q_c}"),
                    },
                })
                .collect();
            Ok((mean, se, warnings))
        })
        .collect();
    let mut force = Vec::with_capacity(grid.len());
    let mut std_errors = Vec::with_capacity(grid.len());
    let mut warnings = Vec::new();
    for node in nodes {
        let (f, se, w) = node?;
        force.push(f);
        std_errors.push(se);
        warnings.extend(w);
    }
    let mut table = CentroidForceTable::from_values(grid.to_vec(), force, std_errors)?;
    table.warnings = warnings;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceSeries {
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// Velocity-Verlet centroid dynamics on the interpolated force.
pub fn cmd_trajectory(
    q_c0: f64,
    p_c0: f64,
    table: &CentroidForceTable,
    mass: f64,
    cfg: &IntegratorConfig,
) -> Result<PhaseSpaceSeries> {
    cfg.validate()?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("mass", "must be finite and > 0"));
    }
    let dt = cfg.dt;
    let n_rec = cfg.n_steps / cfg.record_stride + 1;
    let mut out = PhaseSpaceSeries {
        times: Vec::with_capacity(n_rec),
        q: Vec::with_capacity(n_rec),
        p: Vec::with_capacity(n_rec),
    };
    let (mut q, mut p) = (q_c0, p_c0);
    let mut f = table.force_at(q)?;
    out.times.push(0.0);
    out.q.push(q);
    out.p.push(p);
    for step in 1..=cfg.n_steps {
        p += 0.5 * dt * f;
        q += dt * p / mass;
        f = table.force_at(q)?;
        p += 0.5 * dt * f;
        if step % cfg.record_stride == 0 {
            out.times.push(step as f64 * dt);
            out.q.push(q);
            out.p.push(p);
        }
    }
    Ok(out)
}

/// Thermal centroid momentum for CMD trajectory `index`, variance `m / beta`.
pub fn centroid_momentum_draw(mass: f64, beta: f64, seed: u64, index: u64) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rng::stream(seed, Purpose::CentroidMomenta, index);
    let z: f64 = StandardNormal.sample(&mut rng);
    z * (mass / beta).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_table() -> CentroidForceTable {
        let grid: Vec<f64> = (0..33).map(|i| -4.0 + 0.25 * i as f64).collect();
        let force = grid.iter().map(|q| -q).collect();
        CentroidForceTable::from_values(grid, force, vec![0.0; 33]).unwrap()
    }

    #[test]
    fn harmonic_table_gives_harmonic_motion() {
        let cfg = IntegratorConfig::new(0.01, 1000);
        let s = cmd_trajectory(1.0, 0.5, &harmonic_table(), 1.0, &cfg).unwrap();
        for (t, q) in s.times.iter().zip(&s.q) {
            let exact = t.cos() + 0.5 * t.sin();
            assert!((q - exact).abs() < 1e-4);
        }
    }

    #[test]
    fn free_table_is_ballistic() {
        let grid: Vec<f64> = (0..5).map(|i| -10.0 + 5.0 * i as f64).collect();
        let table = CentroidForceTable::from_values(grid, vec![0.0; 5], vec![0.0; 5]).unwrap();
        let s = cmd_trajectory(0.2, 0.3, &table, 2.0, &IntegratorConfig::new(0.1, 100)).unwrap();
        for (t, q) in s.times.iter().zip(&s.q) {
            assert!((q - (0.2 + 0.15 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_is_conserved() {
        let table = harmonic_table();
        let cfg = IntegratorConfig::new(0.005, 4000);
        let s = cmd_trajectory(2.0, 0.0, &table, 1.0, &cfg).unwrap();
        let energy = |q: f64, p: f64| 0.5 * p * p + table.potential_at(q).unwrap();
        let e0 = energy(s.q[0], s.p[0]);
        let e_ref = 0.5 * 2.0 * 2.0;
        for (q, p) in s.q.iter().zip(&s.p) {
            assert!((energy(*q, *p) - e0).abs() <= 1e-5 * e_ref);
        }
    }

    #[test]
    fn escaping_trajectory_errors() {
        let cfg = IntegratorConfig::new(0.01, 1000);
        let err = cmd_trajectory(3.9, 3.0, &harmonic_table(), 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::GridEscape { .. }));
        assert!(cmd_trajectory(4.5, 0.0, &harmonic_table(), 1.0, &cfg).is_err());
    }
}
