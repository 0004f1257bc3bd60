//! Centroid molecular dynamics: tabulate the mean centroid force from
//! constrained path-integral sampling, then run centroid trajectories on the
//! interpolated table.

use pimd_kubo::dynamics::{build_centroid_force_table, IntegratorConfig};
use pimd_kubo::estimators::cmd_kubo_correlator;
use pimd_kubo::oracle::harmonic_kubo_qq;
use pimd_kubo::sampler::SamplerConfig;
use pimd_kubo::{Observable, PotentialModel, ThermoParams};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::harmonic(1.0, 1.0)?;
    let thermo = ThermoParams::natural(1.0, 16)?;

    let grid: Vec<f64> = (0..49).map(|i| -6.0 + 0.25 * i as f64).collect();
    let table = build_centroid_force_table(&model, &thermo, &SamplerConfig::new(1024, 5), &grid)?;
    println!("force table (every 8th node):");
    for i in (0..grid.len()).step_by(8) {
        println!(
            "  q_c = {:+.2}  F_c = {:+.6} +- {:.1e}",
            table.grid()[i],
            table.force()[i],
            table.std_errors()[i]
        );
    }

    let q = Observable::q();
    let series = cmd_kubo_correlator(
        &model,
        &thermo,
        &table,
        &SamplerConfig::new(4096, 9),
        &IntegratorConfig::new(0.02, 500),
        &q,
        &q,
    )?;
    for i in (0..series.len()).step_by(50) {
        let t = series.times[i];
        println!(
            "t = {t:5.2}  cmd {:+.4} +- {:.4}  exact {:+.4}",
            series.values[i],
            series.std_errors[i],
            harmonic_kubo_qq(&model, &thermo, t)?
        );
    }
    Ok(())
}
