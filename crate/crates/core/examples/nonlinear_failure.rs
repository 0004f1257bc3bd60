//! `A = B = q^2` for a cold harmonic oscillator (beta hbar w = 8). RPMD gets
//! the equal-time value right but the dynamics of the nonlinear observable
//! drift away from the exact quantum correlator.

use pimd_kubo::dynamics::IntegratorConfig;
use pimd_kubo::estimators::rpmd_kubo_correlator;
use pimd_kubo::oracle::{diagonalize, exact_kubo_correlator, GridSpec};
use pimd_kubo::sampler::{MomentumConvention, SamplerConfig};
use pimd_kubo::{Observable, PotentialModel, ThermoParams};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::harmonic(1.0, 1.0)?;
    let beta = 8.0;
    let thermo = ThermoParams::natural(beta, 64)?;
    let q2 = Observable::q2();

    let rpmd = rpmd_kubo_correlator(
        &model,
        &thermo,
        &SamplerConfig::new(8192, 23),
        &IntegratorConfig::new(0.02, 300),
        &q2,
        &q2,
        MomentumConvention::Bead,
    )?;
    let eig = diagonalize(&model, &GridSpec::new(-10.0, 10.0, 512)?, 16)?;
    let exact = exact_kubo_correlator(&eig, &q2, &q2, beta, &rpmd.times)?;

    println!("{:>6} {:>10} {:>9} {:>10} {:>7}", "t", "rpmd", "SE", "exact", "dev/SE");
    for i in (0..rpmd.len()).step_by(15) {
        let d = rpmd.values[i] - exact.values[i];
        println!(
            "{:>6.2} {:>10.5} {:>9.5} {:>10.5} {:>7.1}",
            rpmd.times[i],
            rpmd.values[i],
            rpmd.std_errors[i],
            exact.values[i],
            d / rpmd.std_errors[i]
        );
    }
    println!("max normalized deviation: {:.1}", rpmd.max_normalized_deviation(&exact)?);
    Ok(())
}
