//! RPMD Kubo correlator `C_qq(t)` for the harmonic oscillator. For a linear
//! observable the ring-polymer centroid moves classically and the estimate
//! reproduces `cos(w t) / (beta m w^2)` within its error bars.

use pimd_kubo::dynamics::IntegratorConfig;
use pimd_kubo::estimators::rpmd_kubo_correlator;
use pimd_kubo::oracle::harmonic_kubo_qq;
use pimd_kubo::sampler::{MomentumConvention, SamplerConfig};
use pimd_kubo::{Observable, PotentialModel, ThermoParams};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::harmonic(1.0, 1.0)?;
    let thermo = ThermoParams::natural(1.0, 32)?;
    let q = Observable::q();
    let series = rpmd_kubo_correlator(
        &model,
        &thermo,
        &SamplerConfig::new(4096, 17),
        &IntegratorConfig::new(0.01, 1000),
        &q,
        &q,
        MomentumConvention::Bead,
    )?;

    let mut worst: f64 = 0.0;
    for (i, &t) in series.times.iter().enumerate() {
        let exact = harmonic_kubo_qq(&model, &thermo, t)?;
        let z = (series.values[i] - exact).abs() / series.std_errors[i].max(1e-300);
        worst = worst.max(z);
        if i % 100 == 0 {
            println!(
                "t = {t:5.2}  rpmd {:+.4} +- {:.4}  exact {exact:+.4}",
                series.values[i], series.std_errors[i]
            );
        }
    }
    println!("largest deviation: {worst:.2} standard errors");
    Ok(())
}
