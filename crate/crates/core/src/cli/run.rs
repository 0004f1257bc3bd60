use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use super::config::{parse_config, Command, Method, Resolved, RunConfig};
use crate::dynamics::{build_centroid_force_table, CentroidForceTable};
use crate::error::{Error, Result, Warning};
use crate::estimators::{
    cmd_kubo_correlator, rpmd_kubo_correlator, spectrum_padded, CorrelationSeries, SeriesMetadata,
    Window,
};
use crate::oracle::{diagonalize_with_hbar, exact_kubo_correlator};
use crate::ringpoly::{Observable, Polynomial};
use crate::sampler::{ensemble_average, sample_ring_positions, Ensemble, SamplerConfig};

/// Environment variable that sets the worker count.
pub const THREADS_ENV: &str = "PIMD_KUBO_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `PIMD_KUBO_THREADS`.
    pub threads: Option<usize>,
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub summary: Map<String, Value>,
}

/// Worker count: explicit option, then the environment, then available parallelism.
pub fn thread_count(opts: &RunOptions) -> Result<usize> {
    if let Some(n) = opts.threads {
        return if n > 0 { Ok(n) } else { Err(Error::invalid("threads", "must be >= 1")) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::invalid("threads", format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Parse, run and report; returns the process exit code.
pub fn run_file(path: &Path, opts: &RunOptions) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_VALIDATION;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_VALIDATION;
        }
    };
    match run(&cfg, opts) {
        Ok(report) => {
            if !opts.quiet {
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                println!("wrote {} files to {}", report.files.len(), report.output_dir.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => EXIT_VALIDATION,
        Error::InvalidParameter { name: "threads", .. } => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

/// Everything a command produces before anything touches the disk.
#[derive(Default)]
struct Output {
    files: Vec<(String, String)>,
    warnings: Vec<Warning>,
    summary: Map<String, Value>,
}

impl Output {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn series(&mut self, name: &str, s: &CorrelationSeries) -> Result<()> {
        self.file(&format!("{name}.csv"), s.to_csv());
        self.summary.insert(format!("{name}_metadata"), serde_json::to_value(&s.metadata)?);
        if let Some(w) = s.metadata.parameters.get("warnings") {
            self.warnings.extend(serde_json::from_value::<Vec<Warning>>(w.clone())?);
        }
        Ok(())
    }
}

/// Run a parsed configuration. Artifacts are written only after every
/// computation has succeeded.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunReport> {
    let resolved = cfg.resolve()?;
    let threads = thread_count(opts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    let start = Instant::now();
    let mut out = pool.install(|| execute(cfg, &resolved))?;
    let wall = start.elapsed().as_secs_f64();

    let dir = PathBuf::from(&cfg.output_dir);
    let warnings: Vec<String> = out.warnings.iter().map(|w| w.to_string()).collect();
    let mut names: Vec<String> = out.files.iter().map(|(n, _)| n.clone()).collect();
    names.push("meta.json".into());
    let meta = json!({
        "command": cfg.command_name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_text": cfg.source,
        "config": cfg,
        "seeds": {
            "seed": cfg.seed,
            "streams": "ChaCha8 keyed by (seed, purpose, index)",
        },
        "threads": threads,
        "wall_time_seconds": wall,
        "warnings": warnings,
        "files": names,
        "summary": std::mem::take(&mut out.summary),
    });
    out.file("meta.json", serde_json::to_string_pretty(&meta)?);

    std::fs::create_dir_all(&dir)?;
    for (name, contents) in &out.files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(RunReport {
        output_dir: dir,
        files: names,
        warnings,
        summary: meta["summary"].as_object().cloned().unwrap_or_default(),
    })
}

fn execute(cfg: &RunConfig, r: &Resolved) -> Result<Output> {
    let mut out = Output::default();
    match cfg.command {
        Command::Static => {
            let s = r.sampler.as_ref().expect("resolved");
            let ens = sample_ring_positions(&r.model, &r.thermo, s)?;
            let series = static_series(&ens, &r.a)?;
            out.warnings.extend(ens.warnings().iter().cloned());
            out.summary.insert("acceptance".into(), json!(ens.acceptance()));
            out.series("results", &series)?;
            if cfg.write_ensemble {
                out.file("ensemble.csv", ensemble_csv(&ens));
            }
        }
        Command::Rpmd | Command::Cmd | Command::Oracle => {
            let series = produce(cfg, r, r.method, &mut out)?;
            out.series("results", &series)?;
            if cfg.write_ensemble && cfg.command == Command::Rpmd {
                let ens = sample_ring_positions(&r.model, &r.thermo, r.sampler.as_ref().expect("resolved"))?;
                out.file("ensemble.csv", ensemble_csv(&ens));
            }
        }
        Command::Compare => {
            let method = produce(cfg, r, r.method, &mut out)?;
            let oracle = produce(cfg, r, Method::Oracle, &mut out)?;
            let (diff, max_abs, max_ratio) = diff_table(&method, &oracle)?;
            out.series("results", &method)?;
            out.series("oracle", &oracle)?;
            out.file("diff.csv", diff);
            out.summary.insert("max_abs_diff".into(), json!(max_abs));
            out.summary.insert("max_diff_over_combined_se".into(), json!(max_ratio));
        }
        Command::Spectrum => {
            let series = produce(cfg, r, r.method, &mut out)?;
            let (window, pad) = cfg
                .spectrum
                .as_ref()
                .map_or((Window::Hann, crate::estimators::DEFAULT_PAD), |s| (s.window, s.pad));
            let spec = spectrum_padded(&series, window, pad)?;
            let (w, i) = spec.main_peak();
            out.summary.insert("main_peak".into(), json!({ "omega": w, "intensity": i }));
            out.series("results", &series)?;
            out.file("spectrum.csv", spec.to_csv());
        }
        Command::Convergence => {
            let s = r.sampler.as_ref().expect("resolved");
            let list = &cfg.convergence.as_ref().expect("resolved").n_beads;
            let exact = match &r.oracle {
                Some((grid, n_ret)) => {
                    let eig = diagonalize_with_hbar(&r.model, grid, *n_ret, r.thermo.hbar())?;
                    let one = Observable::position(Polynomial::new(vec![1.0])?, "1");
                    Some(exact_kubo_correlator(&eig, &r.a, &one, r.thermo.beta(), &[0.0])?.values[0])
                }
                None => None,
            };
            let mut csv = String::from("n_beads,value,std_error,oracle_value,error\n");
            let mut last = None;
            for &n in list {
                let thermo = r.thermo.with_beads(n)?;
                let ens = sample_ring_positions(&r.model, &thermo, s)?;
                out.warnings.extend(ens.warnings().iter().cloned());
                let avg = ensemble_average(&r.a, &ens)?;
                let (ev, err) = match exact {
                    Some(e) => (e.to_string(), (avg.mean - e).to_string()),
                    None => (String::new(), String::new()),
                };
                csv.push_str(&format!("{n},{},{},{ev},{err}\n", avg.mean, avg.std_error));
                last = Some(ens);
            }
            let ens = last.expect("non-empty list");
            out.series("results", &static_series(&ens, &r.a)?)?;
            out.file("convergence.csv", csv);
        }
    }
    Ok(out)
}

/// The main correlation series of one method.
fn produce(cfg: &RunConfig, r: &Resolved, method: Method, out: &mut Output) -> Result<CorrelationSeries> {
    let integ = r.integrator.as_ref().expect("resolved");
    match method {
        Method::Rpmd => rpmd_kubo_correlator(
            &r.model,
            &r.thermo,
            r.sampler.as_ref().expect("resolved"),
            integ,
            &r.a,
            &r.b,
            r.convention,
        ),
        Method::Cmd => {
            let sampler = r.sampler.as_ref().expect("resolved");
            let table = force_table(cfg, r, sampler)?;
            out.warnings.extend(table.warnings().iter().cloned());
            out.file("force_table.csv", table.to_csv());
            cmd_kubo_correlator(&r.model, &r.thermo, &table, sampler, integ, &r.a, &r.b)
        }
        Method::Oracle => {
            let (grid, n_ret) = r.oracle.as_ref().expect("resolved");
            let eig = diagonalize_with_hbar(&r.model, grid, *n_ret, r.thermo.hbar())?;
            exact_kubo_correlator(&eig, &r.a, &r.b, r.thermo.beta(), &integ.record_times())
        }
    }
}

fn force_table(cfg: &RunConfig, r: &Resolved, sampler: &SamplerConfig) -> Result<CentroidForceTable> {
    let c = cfg.cmd.as_ref().expect("resolved");
    let grid: Vec<f64> = (0..c.n_nodes)
        .map(|i| c.q_min + (c.q_max - c.q_min) * i as f64 / (c.n_nodes - 1) as f64)
        .collect();
    let node_cfg = SamplerConfig {
        n_samples: c.n_samples,
        ..sampler.clone()
    };
    build_centroid_force_table(&r.model, &r.thermo, &node_cfg, &grid)
}

fn static_series(ens: &Ensemble, a: &Observable) -> Result<CorrelationSeries> {
    let avg = ensemble_average(a, ens)?;
    let meta = SeriesMetadata::new(&a.label, "1", "static")
        .with("n_samples", ens.len())
        .with("n_beads", ens.n_beads())
        .with("acceptance", ens.acceptance())
        .with("warnings", ens.warnings());
    CorrelationSeries::new(vec![0.0], vec![avg.mean], vec![avg.std_error], meta)
}

fn ensemble_csv(ens: &Ensemble) -> String {
    let n = ens.n_beads();
    let mut out = (0..n).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for x in ens.configurations() {
        out.push_str(&x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// `diff.csv` text, max `|diff|` and max `|diff| / combined_se`.
fn diff_table(method: &CorrelationSeries, oracle: &CorrelationSeries) -> Result<(String, f64, f64)> {
    let mut csv = String::from("t,method_value,oracle_value,diff,combined_se\n");
    for i in 0..method.len() {
        let d = method.values[i] - oracle.values[i];
        let se = method.std_errors[i].hypot(oracle.std_errors[i]);
        csv.push_str(&format!("{},{},{},{},{}\n", method.times[i], method.values[i], oracle.values[i], d, se));
    }
    Ok((csv, method.max_abs_deviation(oracle)?, method.max_normalized_deviation(oracle)?))
}
