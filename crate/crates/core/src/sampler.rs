//! Metropolis sampling of the ring-polymer position density `R(x)`, with and
//! without the centroid pinned, plus exact Maxwell-Boltzmann momentum draws.
//!
//! One sweep of the unconstrained kernel is `N` single-bead moves, one move
//! per non-zero normal mode and one whole-ring translation. The constrained
//! kernel only moves non-zero normal modes and re-pins the centroid after
//! every sweep. Step sizes adapt during burn-in only; afterwards the kernel
//! is fixed.
//!
//! Work is split into independent chains of `chain_length` samples; chain `c`
//! draws from stream `(seed, Sampler, c)`, so the output does not depend on
//! the number of worker threads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::model::{Potential, PotentialModel, ThermoParams};
use crate::ringpoly::{bond_midpoints, NormalModes, Observable, RingPolymerState};
use crate::rng::{self, Purpose};
use crate::stats;

const ADAPT_WINDOW: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub n_samples: usize,
    /// Sweeps discarded (and used for step adaptation) at the start of every chain.
    pub burn_in: usize,
    /// Sweeps between recorded samples.
    pub decorrelation_stride: usize,
    /// Multiplier on the natural width of every move class.
    pub move_scale: f64,
    pub seed: u64,
    #[serde(default = "default_target_acceptance")]
    pub target_acceptance: f64,
    #[serde(default = "default_chain_length")]
    pub chain_length: usize,
}

fn default_target_acceptance() -> f64 {
    0.4
}

fn default_chain_length() -> usize {
    4096
}

impl SamplerConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            burn_in: 200,
            decorrelation_stride: 2,
            move_scale: 1.0,
            seed,
            target_acceptance: default_target_acceptance(),
            chain_length: default_chain_length(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be > 0"));
        }
        if self.decorrelation_stride == 0 {
            return Err(Error::invalid("decorrelation_stride", "must be > 0"));
        }
        if !(self.move_scale.is_finite() && self.move_scale > 0.0) {
            return Err(Error::invalid("move_scale", "must be finite and > 0"));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::invalid("target_acceptance", "must lie in (0, 1)"));
        }
        if self.chain_length == 0 {
            return Err(Error::invalid("chain_length", "must be > 0"));
        }
        Ok(())
    }

    pub fn n_chains(&self) -> usize {
        self.n_samples.div_ceil(self.chain_length)
    }
}

/// Position samples from `R(x)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    n_beads: usize,
    positions: Vec<f64>,
    acceptance: f64,
    warnings: Vec<Warning>,
}

impl Ensemble {
    pub fn from_rows(n_beads: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut positions = Vec::with_capacity(rows.len() * n_beads);
        for row in rows {
            if row.len() != n_beads {
                return Err(Error::invalid("ensemble", "ragged configuration rows"));
            }
            positions.extend(row);
        }
        Ok(Self {
            n_beads,
            positions,
            acceptance: f64::NAN,
            warnings: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len() / self.n_beads
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn n_beads(&self) -> usize {
        self.n_beads
    }

    pub fn configuration(&self, i: usize) -> &[f64] {
        &self.positions[i * self.n_beads..(i + 1) * self.n_beads]
    }

    pub fn configurations(&self) -> impl Iterator<Item = &[f64]> {
        self.positions.chunks_exact(self.n_beads)
    }

    /// Post-burn-in acceptance rate pooled over all move classes and chains.
    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn centroids(&self) -> Vec<f64> {
        self.configurations()
            .map(crate::ringpoly::centroid)
            .collect()
    }

    /// Attach momenta drawn from stream `(seed, Momenta, i)` to configuration `i`.
    pub fn with_momenta<P: Potential + ?Sized>(
        &self,
        thermo: &ThermoParams,
        model: &P,
        convention: MomentumConvention,
        seed: u64,
    ) -> Vec<RingPolymerState> {
        self.configurations()
            .enumerate()
            .map(|(i, x)| {
                let p = draw_momenta(thermo, model, seed, i as u64, convention);
                RingPolymerState::new(x.to_vec(), p).expect("sampled state is finite")
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MomentumConvention {
    /// Independent Maxwell-Boltzmann bead momenta.
    #[default]
    Bead,
    /// Cyclic bond midpoints `(p_k + p_{k+1}) / 2` of a bead draw.
    BondMidpoint,
}

/// Draw bead momenta with variance `m N / beta` from stream `(seed, Momenta, index)`.
pub fn draw_momenta<P: Potential + ?Sized>(
    thermo: &ThermoParams,
    model: &P,
    seed: u64,
    index: u64,
    convention: MomentumConvention,
) -> Vec<f64> {
    let mut rng = rng::stream(seed, Purpose::Momenta, index);
    draw_momenta_with(thermo, model.mass(), convention, &mut rng)
}

pub fn draw_momenta_with<R: Rng + ?Sized>(
    thermo: &ThermoParams,
    mass: f64,
    convention: MomentumConvention,
    rng: &mut R,
) -> Vec<f64> {
    let sd = (mass * thermo.n_beads() as f64 / thermo.beta()).sqrt();
    let p: Vec<f64> = (0..thermo.n_beads())
        .map(|_| sd * { let z: f64 = StandardNormal.sample(rng); z })
        .collect();
    match convention {
        MomentumConvention::Bead => p,
        MomentumConvention::BondMidpoint => bond_midpoints(&p),
    }
}

/// Unconstrained samples of `R(x)`.
pub fn sample_ring_positions(
    model: &PotentialModel,
    thermo: &ThermoParams,
    cfg: &SamplerConfig,
) -> Result<Ensemble> {
    run_chains(model, thermo, cfg, None, Purpose::Sampler, "unconstrained")
}

/// Samples of `R(x)` restricted to `centroid(x) = q_c`.
pub fn sample_ring_positions_constrained(
    model: &PotentialModel,
    thermo: &ThermoParams,
    cfg: &SamplerConfig,
    q_c: f64,
) -> Result<Ensemble> {
    if !q_c.is_finite() {
        return Err(Error::NonFinite("q_c"));
    }
    run_chains(model, thermo, cfg, Some(q_c), Purpose::Sampler, "constrained")
}

pub(crate) fn sample_constrained_with_purpose(
    model: &PotentialModel,
    thermo: &ThermoParams,
    cfg: &SamplerConfig,
    q_c: f64,
    purpose: Purpose,
) -> Result<Ensemble> {
    if !q_c.is_finite() {
        return Err(Error::NonFinite("q_c"));
    }
    run_chains(model, thermo, cfg, Some(q_c), purpose, "constrained")
}

fn run_chains(
    model: &PotentialModel,
    thermo: &ThermoParams,
    cfg: &SamplerConfig,
    pin: Option<f64>,
    purpose: Purpose,
    context: &str,
) -> Result<Ensemble> {
    cfg.validate()?;
    if !model.is_bounded_below() {
        return Err(Error::invalid("model", "sampling needs a potential bounded below"));
    }
    let n = thermo.n_beads();
    // mode moves read single columns, so always use the dense matrix here
    let modes = NormalModes::dense(n);
    let n_chains = cfg.n_chains();
    let outputs: Vec<ChainOutput> = (0..n_chains)
        .into_par_iter()
        .map(|c| {
            let count = cfg.chain_length.min(cfg.n_samples - c * cfg.chain_length);
            let rng = rng::stream(cfg.seed, purpose, c as u64);
            Chain::new(model, thermo, &modes, cfg, pin, rng).run(count)
        })
        .collect();

    let mut positions = Vec::with_capacity(cfg.n_samples * n);
    let (mut accepted, mut attempted) = (0u64, 0u64);
    for out in outputs {
        positions.extend(out.positions);
        accepted += out.accepted;
        attempted += out.attempted;
    }
    let acceptance = if attempted > 0 {
        accepted as f64 / attempted as f64
    } else {
        1.0
    };
    let mut warnings = Vec::new();
    if attempted > 0 && !(0.05..=0.95).contains(&acceptance) {
        warnings.push(Warning::NonErgodic {
            acceptance,
            context: context.to_string(),
        });
    }
    Ok(Ensemble {
        n_beads: n,
        positions,
        acceptance,
        warnings,
    })
}

struct ChainOutput {
    positions: Vec<f64>,
    accepted: u64,
    attempted: u64,
}

#[derive(Clone, Copy, Default)]
struct MoveStats {
    accepted: u64,
    attempted: u64,
}

impl MoveStats {
    fn record(&mut self, accepted: bool) {
        self.attempted += 1;
        self.accepted += accepted as u64;
    }
}

struct Chain<'a> {
    model: &'a PotentialModel,
    modes: &'a NormalModes,
    pin: Option<f64>,
    rng: ChaCha8Rng,
    beta_n: f64,
    /// `m N / (2 beta hbar^2)`
    spring: f64,
    lambda: Vec<f64>,
    x: Vec<f64>,
    v: Vec<f64>,
    trial_x: Vec<f64>,
    trial_v: Vec<f64>,
    bead_step: f64,
    mode_steps: Vec<f64>,
    translation_step: f64,
    step_caps: (f64, Vec<f64>, f64),
    bead_stats: MoveStats,
    mode_stats: Vec<MoveStats>,
    translation_stats: MoveStats,
    target: f64,
    burn_in: usize,
    stride: usize,
}

impl<'a> Chain<'a> {
    fn new(
        model: &'a PotentialModel,
        thermo: &ThermoParams,
        modes: &'a NormalModes,
        cfg: &SamplerConfig,
        pin: Option<f64>,
        rng: ChaCha8Rng,
    ) -> Self {
        let n = thermo.n_beads();
        let nf = n as f64;
        let m = model.mass();
        let beta = thermo.beta();
        let h = thermo.hbar();
        let spring = m * nf / (2.0 * beta * h * h);
        let beta_n = thermo.beta_n();
        let w_ref = model.reference_frequency();
        let curvature_ref = beta_n * m * w_ref * w_ref;
        let lambda = modes.bond_eigenvalues();

        let bead_natural = (1.0 / (4.0 * spring + curvature_ref)).sqrt();
        let mode_natural: Vec<f64> = lambda
            .iter()
            .map(|&l| {
                let c = 2.0 * spring * l + curvature_ref;
                if c > 0.0 {
                    c.sqrt().recip()
                } else {
                    1.0
                }
            })
            .collect();
        let translation_natural = if w_ref > 0.0 {
            (beta * m * w_ref * w_ref).sqrt().recip()
        } else {
            (beta * m).sqrt().recip()
        };
        let s = cfg.move_scale;
        let x0 = pin.unwrap_or(0.0);
        let x = vec![x0; n];
        let v: Vec<f64> = x.iter().map(|&q| model.value(q)).collect();
        Self {
            model,
            modes,
            pin,
            rng,
            beta_n,
            spring,
            lambda,
            trial_x: x.clone(),
            trial_v: v.clone(),
            x,
            v,
            bead_step: s * bead_natural,
            mode_steps: mode_natural.iter().map(|w| s * w).collect(),
            translation_step: s * translation_natural,
            step_caps: (
                50.0 * bead_natural,
                mode_natural.iter().map(|w| 50.0 * w).collect(),
                50.0 * translation_natural,
            ),
            bead_stats: MoveStats::default(),
            mode_stats: vec![MoveStats::default(); n],
            translation_stats: MoveStats::default(),
            target: cfg.target_acceptance,
            burn_in: cfg.burn_in,
            stride: cfg.decorrelation_stride,
        }
    }

    fn run(mut self, count: usize) -> ChainOutput {
        let mut window = self.snapshot();
        for sweep in 1..=self.burn_in {
            self.sweep();
            if sweep % ADAPT_WINDOW == 0 {
                self.adapt(&window);
                window = self.snapshot();
            }
        }
        let start = self.totals();
        let mut positions = Vec::with_capacity(count * self.x.len());
        for _ in 0..count {
            for _ in 0..self.stride {
                self.sweep();
            }
            positions.extend_from_slice(&self.x);
        }
        let end = self.totals();
        ChainOutput {
            positions,
            accepted: end.accepted - start.accepted,
            attempted: end.attempted - start.attempted,
        }
    }

    fn snapshot(&self) -> (MoveStats, Vec<MoveStats>, MoveStats) {
        (self.bead_stats, self.mode_stats.clone(), self.translation_stats)
    }

    fn totals(&self) -> MoveStats {
        let mut t = MoveStats::default();
        for s in std::iter::once(&self.bead_stats)
            .chain(&self.mode_stats)
            .chain(std::iter::once(&self.translation_stats))
        {
            t.accepted += s.accepted;
            t.attempted += s.attempted;
        }
        t
    }

    fn adapt(&mut self, window: &(MoveStats, Vec<MoveStats>, MoveStats)) {
        let target = self.target;
        let tune = |step: &mut f64, now: MoveStats, before: MoveStats, cap: f64| {
            let att = now.attempted - before.attempted;
            if att == 0 {
                return;
            }
            let rate = (now.accepted - before.accepted) as f64 / att as f64;
            *step = (*step * (2.0 * (rate - target)).exp()).min(cap);
        };
        tune(&mut self.bead_step, self.bead_stats, window.0, self.step_caps.0);
        for k in 0..self.mode_steps.len() {
            tune(
                &mut self.mode_steps[k],
                self.mode_stats[k],
                window.1[k],
                self.step_caps.1[k],
            );
        }
        tune(
            &mut self.translation_step,
            self.translation_stats,
            window.2,
            self.step_caps.2,
        );
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random_range(-1.0..1.0)
    }

    fn accept(&mut self, log_ratio: f64) -> bool {
        log_ratio >= 0.0 || self.rng.random::<f64>().ln() < log_ratio
    }

    fn sweep(&mut self) {
        let n = self.x.len();
        if self.pin.is_none() {
            for j in 0..n {
                self.bead_move(j);
            }
        }
        for k in 1..n {
            self.mode_move(k);
        }
        match self.pin {
            None => self.translation_move(),
            Some(q_c) => {
                let shift = q_c - crate::ringpoly::centroid(&self.x);
                if shift != 0.0 {
                    for (x, v) in self.x.iter_mut().zip(self.v.iter_mut()) {
                        *x += shift;
                        *v = self.model.value(*x);
                    }
                }
            }
        }
    }

    fn bead_move(&mut self, j: usize) {
        let n = self.x.len();
        let old = self.x[j];
        let new = old + self.bead_step * self.uniform();
        let new_v = self.model.value(new);
        let mut log_ratio = -self.beta_n * (new_v - self.v[j]);
        if n > 1 {
            let prev = self.x[(j + n - 1) % n];
            let next = self.x[(j + 1) % n];
            let d_spring = (new - prev).powi(2) + (new - next).powi(2)
                - (old - prev).powi(2)
                - (old - next).powi(2);
            log_ratio -= self.spring * d_spring;
        }
        let ok = self.accept(log_ratio);
        self.bead_stats.record(ok);
        if ok {
            self.x[j] = new;
            self.v[j] = new_v;
        }
    }

    fn mode_move(&mut self, k: usize) {
        let n = self.x.len();
        let delta = self.mode_steps[k] * self.uniform();
        let mut amp = 0.0;
        let mut new_v_sum = 0.0;
        let mut old_v_sum = 0.0;
        for j in 0..n {
            let c = self.modes.entry(j, k);
            amp += c * self.x[j];
            let xn = self.x[j] + delta * c;
            self.trial_x[j] = xn;
            self.trial_v[j] = self.model.value(xn);
            new_v_sum += self.trial_v[j];
            old_v_sum += self.v[j];
        }
        let d_spring = self.lambda[k] * ((amp + delta).powi(2) - amp * amp);
        let log_ratio = -self.beta_n * (new_v_sum - old_v_sum) - self.spring * d_spring;
        let ok = self.accept(log_ratio);
        self.mode_stats[k].record(ok);
        if ok {
            std::mem::swap(&mut self.x, &mut self.trial_x);
            std::mem::swap(&mut self.v, &mut self.trial_v);
        }
    }

    fn translation_move(&mut self) {
        let delta = self.translation_step * self.uniform();
        let mut d_v = 0.0;
        for j in 0..self.x.len() {
            let xn = self.x[j] + delta;
            self.trial_x[j] = xn;
            self.trial_v[j] = self.model.value(xn);
            d_v += self.trial_v[j] - self.v[j];
        }
        let ok = self.accept(-self.beta_n * d_v);
        self.translation_stats.record(ok);
        if ok {
            std::mem::swap(&mut self.x, &mut self.trial_x);
            std::mem::swap(&mut self.v, &mut self.trial_v);
        }
    }
}

/// Mean and block standard error of an equilibrium average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticAverage {
    pub mean: f64,
    pub std_error: f64,
}

/// Ensemble average of `A_0` (or `p_0`) with a 16-block standard error.
pub fn estimate_static_average(obs: &Observable, states: &[RingPolymerState]) -> Result<StaticAverage> {
    let values: Vec<f64> = states.iter().map(|s| obs.centroid_value(s)).collect();
    static_average_of(&values)
}

/// Position-only static average straight from an ensemble.
pub fn ensemble_average(obs: &Observable, ensemble: &Ensemble) -> Result<StaticAverage> {
    let f = obs.as_position().ok_or_else(|| Error::UnsupportedObservable {
        label: obs.label.clone(),
        reason: "position ensembles carry no momenta",
    })?;
    let values: Vec<f64> = ensemble
        .configurations()
        .map(|x| crate::ringpoly::observable_average(x, f))
        .collect();
    static_average_of(&values)
}

fn static_average_of(values: &[f64]) -> Result<StaticAverage> {
    let (mean, std_error) = stats::block_mean_error(values, stats::DEFAULT_BLOCKS)?;
    Ok(StaticAverage { mean, std_error })
}
