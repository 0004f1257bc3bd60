//! Vibrational spectra of RPMD correlators for a mildly anharmonic
//! oscillator, beside the exact quantum spectra.
//!
//! For each observable the example lists every spectral peak above 0.1% of
//! the main one, then the strongest RPMD intensity within 15% of each
//! free ring-polymer frequency `w_k` next to the oracle intensity there.
//!
//! ```text
//! cargo run --release --example spurious_peaks
//! ```

use pimd_kubo::dynamics::IntegratorConfig;
use pimd_kubo::estimators::{rpmd_kubo_correlator, spectrum, Spectrum, Window};
use pimd_kubo::oracle::{diagonalize, exact_kubo_correlator, GridSpec};
use pimd_kubo::ringpoly::free_rp_frequencies;
use pimd_kubo::sampler::{MomentumConvention, SamplerConfig};
use pimd_kubo::{Observable, PotentialModel, ThermoParams};

fn fraction_near(s: &Spectrum, w: f64) -> f64 {
    let (_, top) = s.main_peak();
    s.max_in(0.85 * w, 1.15 * w).map_or(0.0, |(_, i)| i / top)
}

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::mildly_anharmonic(1.0, 1.0, 0.0, 0.05)?;
    let beta = 8.0;
    let thermo = ThermoParams::natural(beta, 32)?;
    let eig = diagonalize(&model, &GridSpec::new(-8.0, 8.0, 256)?, 20)?;
    let integ = IntegratorConfig::new(0.05, 2000);
    let freqs = free_rp_frequencies(&thermo);

    for obs in [Observable::q(), Observable::q2()] {
        let rpmd = rpmd_kubo_correlator(
            &model,
            &thermo,
            &SamplerConfig::new(4096, 31),
            &integ,
            &obs,
            &obs,
            MomentumConvention::Bead,
        )?;
        let exact = exact_kubo_correlator(&eig, &obs, &obs, beta, &rpmd.times)?;
        let (sr, so) = (spectrum(&rpmd, Window::Hann)?, spectrum(&exact, Window::Hann)?);

        println!("== C_{0}{0}", obs.label);
        for (name, s) in [("rpmd", &sr), ("exact", &so)] {
            let (_, top) = s.main_peak();
            let list: Vec<String> = s
                .peaks(1e-3)
                .iter()
                .map(|(w, i)| format!("{w:.3} ({:.2}%)", 100.0 * i / top))
                .collect();
            println!("{name:>6} peaks: {}", list.join(", "));
        }
        for (k, &wk) in freqs.iter().enumerate().skip(1).take(4) {
            println!(
                "  w_{k} = {wk:.3}: rpmd {:.3}%  exact {:.3}%",
                100.0 * fraction_near(&sr, wk),
                100.0 * fraction_near(&so, wk)
            );
        }
    }
    Ok(())
}
