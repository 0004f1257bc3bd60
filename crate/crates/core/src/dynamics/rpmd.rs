use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Potential, ThermoParams};
use crate::ringpoly::{NormalModes, Observable, RingPolymerState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Record every `record_stride` steps (1 = every step).
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_stride() -> usize {
    1
}

impl IntegratorConfig {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        Self {
            dt,
            n_steps,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be finite and > 0"));
        }
        if self.n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be > 0"));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride", "must be > 0"));
        }
        Ok(())
    }

    /// Also enforces `dt * omega_physical < 0.5`.
    pub fn validate_for(&self, omega_physical: Option<f64>) -> Result<()> {
        self.validate()?;
        if let Some(w) = omega_physical {
            if self.dt * w >= 0.5 {
                return Err(Error::invalid(
                    "dt",
                    format!("dt * omega = {} must stay below 0.5", self.dt * w),
                ));
            }
        }
        Ok(())
    }

    /// Recorded times `0, s dt, 2 s dt, ...` up to `n_steps dt`.
    pub fn record_times(&self) -> Vec<f64> {
        (0..=self.n_steps)
            .step_by(self.record_stride)
            .map(|i| i as f64 * self.dt)
            .collect()
    }
}

/// Symmetric split-step propagator for one bead count and time step.
///
/// The harmonic part `m w_ref^2 x^2 / 2` of the potential is combined with
/// the springs and propagated exactly in normal-mode coordinates; the
/// residual force is applied as two half kicks. With `w_ref = 0` this is the
/// plain kick / free-ring rotation / kick scheme.
pub struct Propagator<'a, P: Potential + ?Sized> {
    model: &'a P,
    modes: NormalModes,
    dt: f64,
    mass: f64,
    rotation: Vec<ModeRotation>,
    residual_is_zero: bool,
    force: Vec<f64>,
    a: Vec<f64>,
    pa: Vec<f64>,
}

#[derive(Clone, Copy)]
struct ModeRotation {
    cos: f64,
    sin: f64,
    /// `m * Omega_k`; zero for a free mode
    m_omega: f64,
}

impl<'a, P: Potential + ?Sized> Propagator<'a, P> {
    pub fn new(model: &'a P, thermo: &ThermoParams, dt: f64) -> Self {
        let n = thermo.n_beads();
        let modes = NormalModes::new(n);
        let mass = model.mass();
        let w_ref = model.reference_frequency();
        let rotation = modes
            .frequencies(thermo.omega_n())
            .into_iter()
            .map(|wk| {
                let omega = (wk * wk + w_ref * w_ref).sqrt();
                let (sin, cos) = (omega * dt).sin_cos();
                ModeRotation {
                    cos,
                    sin,
                    m_omega: mass * omega,
                }
            })
            .collect();
        let residual_is_zero = !model.has_residual_force();
        Self {
            model,
            modes,
            dt,
            mass,
            rotation,
            residual_is_zero,
            force: vec![0.0; n],
            a: vec![0.0; n],
            pa: vec![0.0; n],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Must be called before the first `step` on a new state.
    pub fn prime(&mut self, x: &[f64]) {
        for (f, &q) in self.force.iter_mut().zip(x) {
            *f = -self.model.residual_gradient(q);
        }
    }

    /// Advance `(x, p)` by one step; forces at `x` must be primed.
    pub fn step(&mut self, x: &mut [f64], p: &mut [f64]) {
        let half = 0.5 * self.dt;
        if !self.residual_is_zero {
            for (pj, f) in p.iter_mut().zip(&self.force) {
                *pj += half * f;
            }
        }
        self.modes.to_modes(x, &mut self.a);
        self.modes.to_modes(p, &mut self.pa);
        for ((a, pa), r) in self.a.iter_mut().zip(self.pa.iter_mut()).zip(&self.rotation) {
            if r.m_omega > 0.0 {
                let a0 = *a;
                *a = a0 * r.cos + *pa / r.m_omega * r.sin;
                *pa = *pa * r.cos - r.m_omega * a0 * r.sin;
            } else {
                *a += *pa * self.dt / self.mass;
            }
        }
        self.modes.from_modes(&self.a, x);
        self.modes.from_modes(&self.pa, p);
        if !self.residual_is_zero {
            self.prime(x);
            for (pj, f) in p.iter_mut().zip(&self.force) {
                *pj += half * f;
            }
        }
    }
}

/// One propagation step of `state`.
pub fn rpmd_step<P: Potential + ?Sized>(
    state: &RingPolymerState,
    model: &P,
    thermo: &ThermoParams,
    dt: f64,
) -> Result<RingPolymerState> {
    check_beads(state, thermo)?;
    let mut prop = Propagator::new(model, thermo, dt);
    let mut next = state.clone();
    let (x, p) = next.parts_mut();
    prop.prime(x);
    prop.step(x, p);
    Ok(next)
}

fn check_beads(state: &RingPolymerState, thermo: &ThermoParams) -> Result<()> {
    if state.n_beads() != thermo.n_beads() {
        return Err(Error::invalid(
            "state",
            format!("{} beads for n_beads = {}", state.n_beads(), thermo.n_beads()),
        ));
    }
    Ok(())
}

/// Recorded centroid series of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub centroid_q: Vec<f64>,
    pub centroid_p: Vec<f64>,
    /// `records[i][j]`: observable `i` at time `j`.
    pub records: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl Trajectory {
    /// CSV with columns `t, x0, p0, <labels...>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x0,p0");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for j in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{}",
                self.times[j], self.centroid_q[j], self.centroid_p[j]
            ));
            for r in &self.records {
                out.push_str(&format!(",{}", r[j]));
            }
            out.push('\n');
        }
        out
    }
}

/// Propagate `initial` and record `B_0(t)` for each observable.
pub fn rpmd_trajectory<P: Potential + ?Sized>(
    initial: &RingPolymerState,
    model: &P,
    thermo: &ThermoParams,
    cfg: &IntegratorConfig,
    record: &[Observable],
) -> Result<Trajectory> {
    cfg.validate()?;
    check_beads(initial, thermo)?;
    let mut prop = Propagator::new(model, thermo, cfg.dt);
    let mut state = initial.clone();
    let n_rec = cfg.n_steps / cfg.record_stride + 1;
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_rec),
        centroid_q: Vec::with_capacity(n_rec),
        centroid_p: Vec::with_capacity(n_rec),
        records: vec![Vec::with_capacity(n_rec); record.len()],
        labels: record.iter().map(|o| o.label.clone()).collect(),
    };
    let push = |state: &RingPolymerState, t: f64, traj: &mut Trajectory| {
        traj.times.push(t);
        traj.centroid_q.push(state.centroid_position());
        traj.centroid_p.push(state.centroid_momentum());
        for (r, o) in traj.records.iter_mut().zip(record) {
            r.push(o.centroid_value(state));
        }
    };
    push(&state, 0.0, &mut traj);
    {
        let (x, _) = state.parts_mut();
        prop.prime(x);
    }
    for step in 1..=cfg.n_steps {
        let (x, p) = state.parts_mut();
        prop.step(x, p);
        if step % cfg.record_stride == 0 {
            push(&state, step as f64 * cfg.dt, &mut traj);
        }
    }
    Ok(traj)
}

/// Classical trajectory: the one-bead case of the same propagator.
pub fn classical_trajectory<P: Potential + ?Sized>(
    q0: f64,
    p0: f64,
    model: &P,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let thermo = ThermoParams::natural(1.0, 1)?;
    let state = RingPolymerState::new(vec![q0], vec![p0])?;
    let traj = rpmd_trajectory(&state, model, &thermo, cfg, &[])?;
    Ok((traj.times, traj.centroid_q, traj.centroid_p))
}
