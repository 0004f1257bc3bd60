//! Strict TOML run configuration.
//!
//! Grammar (all sections are TOML tables, unknown keys are errors):
//!
//! ```toml
//! command = "compare"        # static | rpmd | cmd | oracle | compare | spectrum | convergence
//! seed = 42
//! output_dir = "out/compare"
//! write_ensemble = false     # optional, static and rpmd only
//!
//! [model]                    # kind = harmonic | mildly_anharmonic | quartic
//! kind = "harmonic"
//! mass = 1.0
//! omega = 1.0                # c3, c4 for mildly_anharmonic; a4 for quartic
//!
//! [thermo]
//! beta = 1.0
//! n_beads = 32
//! hbar = 1.0                 # default 1
//!
//! [sampler]
//! n_samples = 10000
//! burn_in = 200              # default 200
//! decorrelation_stride = 2   # default 2
//! move_scale = 1.0           # default 1
//! target_acceptance = 0.4    # default 0.4
//! chain_length = 4096        # default 4096
//! blocks = 16                # default 16; the only supported value
//!
//! [integrator]
//! dt = 0.01
//! n_steps = 1000
//! record_stride = 1          # default 1
//!
//! [observables]
//! a = "q"                    # q, p, q2, q3, q4, or polynomial coefficients [c0, c1, ...]
//! b = "q"
//! momentum_convention = "bead"   # or "bond_midpoint"
//!
//! [oracle]                   # oracle, compare, spectrum (source = oracle), convergence
//! q_min = -10.0
//! q_max = 10.0
//! n_points = 512
//! n_retained = 30
//!
//! [cmd]                      # cmd, and compare/spectrum with method = "cmd"
//! q_min = -6.0
//! q_max = 6.0
//! n_nodes = 49
//! n_samples = 4096           # constrained samples per node
//!
//! [compare]
//! method = "rpmd"            # or "cmd"
//!
//! [spectrum]
//! source = "rpmd"            # rpmd | cmd | oracle
//! window = "hann"            # hann | none
//! pad = 4
//!
//! [convergence]
//! n_beads = [4, 8, 16, 32]
//! ```

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::estimators::Window;
use crate::model::{ModelKind, PotentialModel, ThermoParams};
use crate::oracle::GridSpec;
use crate::ringpoly::{Observable, Polynomial};
use crate::sampler::{MomentumConvention, SamplerConfig};
use crate::stats::DEFAULT_BLOCKS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Static,
    Rpmd,
    Cmd,
    Oracle,
    Compare,
    Spectrum,
    Convergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: String,
    pub mass: f64,
    pub omega: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub a4: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoBlock {
    pub beta: f64,
    pub n_beads: usize,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerBlock {
    pub n_samples: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_stride")]
    pub decorrelation_stride: usize,
    #[serde(default = "one")]
    pub move_scale: f64,
    #[serde(default = "default_target")]
    pub target_acceptance: f64,
    #[serde(default = "default_chain")]
    pub chain_length: usize,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
}

fn default_burn_in() -> usize {
    200
}
fn default_stride() -> usize {
    2
}
fn default_target() -> f64 {
    0.4
}
fn default_chain() -> usize {
    4096
}
fn default_blocks() -> usize {
    DEFAULT_BLOCKS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Label(String),
    Coefficients(Vec<f64>),
}

impl ObservableSpec {
    pub fn build(&self) -> Result<Observable> {
        match self {
            ObservableSpec::Label(l) => Observable::from_label(l).ok_or_else(|| Error::UnsupportedObservable {
                label: l.clone(),
                reason: "expected q, p, q2, q3, q4 or a coefficient list",
            }),
            ObservableSpec::Coefficients(c) => {
                let label = format!(
                    "poly[{}]",
                    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
                );
                Ok(Observable::position(Polynomial::new(c.clone())?, label))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesBlock {
    pub a: ObservableSpec,
    pub b: Option<ObservableSpec>,
    #[serde(default)]
    pub momentum_convention: MomentumConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
    pub n_retained: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmdBlock {
    pub q_min: f64,
    pub q_max: f64,
    pub n_nodes: usize,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rpmd,
    Cmd,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    #[serde(default = "rpmd")]
    pub method: Method,
}

fn rpmd() -> Method {
    Method::Rpmd
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    #[serde(default = "rpmd")]
    pub source: Method,
    #[serde(default)]
    pub window: Window,
    #[serde(default = "default_pad")]
    pub pad: usize,
}

fn default_pad() -> usize {
    crate::estimators::DEFAULT_PAD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceBlock {
    pub n_beads: Vec<usize>,
}

/// A parsed run configuration together with its source text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub output_dir: String,
    #[serde(default)]
    pub write_ensemble: bool,
    pub model: Option<ModelBlock>,
    pub thermo: Option<ThermoBlock>,
    pub sampler: Option<SamplerBlock>,
    pub integrator: Option<IntegratorConfig>,
    pub observables: Option<ObservablesBlock>,
    pub oracle: Option<OracleBlock>,
    pub cmd: Option<CmdBlock>,
    pub compare: Option<CompareBlock>,
    pub spectrum: Option<SpectrumBlock>,
    pub convergence: Option<ConvergenceBlock>,
    #[serde(skip)]
    pub source: String,
}

/// Typed, validated view of a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: PotentialModel,
    pub thermo: ThermoParams,
    pub sampler: Option<SamplerConfig>,
    pub integrator: Option<IntegratorConfig>,
    pub a: Observable,
    pub b: Observable,
    pub convention: MomentumConvention,
    pub oracle: Option<(GridSpec, usize)>,
    pub method: Method,
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Line and column of `key = ...`, preferring the given section.
fn locate(text: &str, section: Option<&str>, key: &str) -> (usize, usize) {
    let mut current: Option<String> = None;
    let mut fallback = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix('[') {
            current = rest.split(']').next().map(|s| s.trim().to_string());
            if section.is_some() && current.as_deref() == section && key.is_empty() {
                return (i + 1, 1);
            }
            continue;
        }
        let is_key = t
            .strip_prefix(key)
            .is_some_and(|r| r.trim_start().starts_with('='));
        if !key.is_empty() && is_key {
            let col = line.len() - t.len() + 1;
            if section.is_none() || current.as_deref() == section {
                return (i + 1, col);
            }
            fallback.get_or_insert((i + 1, col));
        }
    }
    fallback.unwrap_or((1, 1))
}

fn config_error(text: &str, section: Option<&str>, key: &str, message: String) -> Error {
    let (line, column) = locate(text, section, key);
    Error::Config {
        line,
        column,
        message,
    }
}

/// Attach a position to a validation error raised while building a block.
fn positioned(text: &str, section: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => {
            config_error(text, Some(section), name, format!("[{section}] {name}: {reason}"))
        }
        other => {
            let (line, column) = locate(text, Some(section), "");
            Error::Config {
                line,
                column,
                message: format!("[{section}]: {other}"),
            }
        }
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
        Error::Config {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.source = text.to_string();
    cfg.resolve()?;
    Ok(cfg)
}

impl RunConfig {
    fn missing(&self, block: &str) -> Error {
        Error::Config {
            line: 1,
            column: 1,
            message: format!("command `{}` requires a [{block}] section", self.command_name()),
        }
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Static => "static",
            Command::Rpmd => "rpmd",
            Command::Cmd => "cmd",
            Command::Oracle => "oracle",
            Command::Compare => "compare",
            Command::Spectrum => "spectrum",
            Command::Convergence => "convergence",
        }
    }

    /// Which method produces the main series for this command.
    fn method(&self) -> Method {
        match self.command {
            Command::Cmd => Method::Cmd,
            Command::Oracle => Method::Oracle,
            Command::Compare => self.compare.as_ref().map_or(Method::Rpmd, |c| c.method),
            Command::Spectrum => self.spectrum.as_ref().map_or(Method::Rpmd, |s| s.source),
            _ => Method::Rpmd,
        }
    }

    /// Build typed parameters and check that every block the command needs is present.
    pub fn resolve(&self) -> Result<Resolved> {
        let text = &self.source;
        let mb = self.model.as_ref().ok_or_else(|| self.missing("model"))?;
        let tb = self.thermo.as_ref().ok_or_else(|| self.missing("thermo"))?;
        let ob = self.observables.as_ref().ok_or_else(|| self.missing("observables"))?;

        let model = build_model(mb).map_err(|e| positioned(text, "model", e))?;
        let thermo = ThermoParams::new(tb.beta, tb.n_beads, tb.hbar).map_err(|e| positioned(text, "thermo", e))?;
        let a = ob.a.build().map_err(|e| positioned(text, "observables", e))?;
        let b = match &ob.b {
            Some(spec) => spec.build().map_err(|e| positioned(text, "observables", e))?,
            None => a.clone(),
        };

        let method = self.method();
        let needs_sampler = !matches!(method, Method::Oracle) || self.command == Command::Convergence;
        let needs_sampler = needs_sampler || self.command == Command::Static;
        let sampler = match (&self.sampler, needs_sampler) {
            (Some(sb), _) => Some(self.sampler_config(sb)?),
            (None, true) => return Err(self.missing("sampler")),
            (None, false) => None,
        };

        let needs_integrator = !matches!(self.command, Command::Static | Command::Convergence);
        let integrator = match (&self.integrator, needs_integrator) {
            (Some(ic), _) => {
                let check = if method == Method::Oracle { ic.validate() } else { ic.validate_for(model.omega()) };
                check.map_err(|e| positioned(text, "integrator", e))?;
                Some(ic.clone())
            }
            (None, true) => return Err(self.missing("integrator")),
            (None, false) => None,
        };

        let needs_oracle = matches!(self.command, Command::Oracle | Command::Compare)
            || (self.command == Command::Spectrum && method == Method::Oracle);
        let oracle = match (&self.oracle, needs_oracle) {
            (Some(o), _) => {
                let grid = GridSpec::new(o.q_min, o.q_max, o.n_points).map_err(|e| positioned(text, "oracle", e))?;
                if o.n_retained == 0 || o.n_retained > o.n_points {
                    return Err(config_error(text, Some("oracle"), "n_retained", "[oracle] n_retained must be in 1..=n_points".into()));
                }
                Some((grid, o.n_retained))
            }
            (None, true) => return Err(self.missing("oracle")),
            (None, false) => None,
        };

        if method == Method::Cmd {
            let c = self.cmd.as_ref().ok_or_else(|| self.missing("cmd"))?;
            if !(c.q_min < c.q_max) || c.n_nodes < 4 {
                return Err(config_error(text, Some("cmd"), "n_nodes", "[cmd] need q_min < q_max and n_nodes >= 4".into()));
            }
        }
        if self.command == Command::Compare && method == Method::Oracle {
            return Err(config_error(text, Some("compare"), "method", "[compare] method must be rpmd or cmd".into()));
        }
        if self.command == Command::Convergence {
            let c = self.convergence.as_ref().ok_or_else(|| self.missing("convergence"))?;
            if c.n_beads.is_empty() || c.n_beads.contains(&0) {
                return Err(config_error(text, Some("convergence"), "n_beads", "[convergence] n_beads must be a non-empty list of values >= 1".into()));
            }
            if a.is_momentum() {
                return Err(config_error(text, Some("observables"), "a", "static averages need a position observable".into()));
            }
        }
        if self.command == Command::Static && a.is_momentum() {
            return Err(config_error(text, Some("observables"), "a", "static averages need a position observable".into()));
        }
        if let Some(s) = &self.spectrum {
            if s.pad == 0 {
                return Err(config_error(text, Some("spectrum"), "pad", "[spectrum] pad must be >= 1".into()));
            }
        }
        Ok(Resolved {
            model,
            thermo,
            sampler,
            integrator,
            a,
            b,
            convention: ob.momentum_convention,
            oracle,
            method,
        })
    }

    fn sampler_config(&self, sb: &SamplerBlock) -> Result<SamplerConfig> {
        if sb.blocks != DEFAULT_BLOCKS {
            return Err(config_error(&self.source, Some("sampler"), "blocks", format!("[sampler] blocks: only {DEFAULT_BLOCKS} is supported")));
        }
        let cfg = SamplerConfig {
            n_samples: sb.n_samples,
            burn_in: sb.burn_in,
            decorrelation_stride: sb.decorrelation_stride,
            move_scale: sb.move_scale,
            seed: self.seed,
            target_acceptance: sb.target_acceptance,
            chain_length: sb.chain_length,
        };
        cfg.validate().map_err(|e| positioned(&self.source, "sampler", e))?;
        if cfg.n_samples < 2 * DEFAULT_BLOCKS {
            return Err(config_error(&self.source, Some("sampler"), "n_samples", format!("[sampler] n_samples must be >= {}", 2 * DEFAULT_BLOCKS)));
        }
        Ok(cfg)
    }
}

fn build_model(mb: &ModelBlock) -> Result<PotentialModel> {
    let need = |v: Option<f64>, name: &'static str| v.ok_or_else(|| Error::invalid(name, format!("required for kind = \"{}\"", mb.kind)));
    let forbid = |v: Option<f64>, name: &'static str| match v {
        Some(_) => Err(Error::invalid(name, format!("not a parameter of kind = \"{}\"", mb.kind))),
        None => Ok(()),
    };
    let kind = match mb.kind.as_str() {
        "harmonic" => {
            forbid(mb.c3, "c3")?;
            forbid(mb.c4, "c4")?;
            forbid(mb.a4, "a4")?;
            ModelKind::Harmonic { omega: need(mb.omega, "omega")? }
        }
        "mildly_anharmonic" => {
            forbid(mb.a4, "a4")?;
            ModelKind::MildlyAnharmonic {
                omega: need(mb.omega, "omega")?,
                c3: need(mb.c3, "c3")?,
                c4: need(mb.c4, "c4")?,
            }
        }
        "quartic" => {
            forbid(mb.omega, "omega")?;
            forbid(mb.c3, "c3")?;
            forbid(mb.c4, "c4")?;
            ModelKind::Quartic { a4: need(mb.a4, "a4")? }
        }
        other => {
            return Err(Error::invalid(
                "kind",
                format!("unknown model `{other}`; expected harmonic, mildly_anharmonic or quartic"),
            ))
        }
    };
    PotentialModel::new(mb.mass, kind)
}
