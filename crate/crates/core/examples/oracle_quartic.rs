//! Exact Kubo correlators of the quartic oscillator `a4 q^4 / 4` from the
//! grid eigensolver, with the position spectrum.

use pimd_kubo::estimators::{spectrum, Window};
use pimd_kubo::oracle::{diagonalize, exact_kubo_correlator, GridSpec};
use pimd_kubo::{Observable, PotentialModel};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::quartic(1.0, 1.0)?;
    let eig = diagonalize(&model, &GridSpec::new(-6.0, 6.0, 512)?, 30)?;
    println!("lowest levels:");
    for (n, e) in eig.energies.iter().take(6).enumerate() {
        println!("  E_{n} = {e:.8}");
    }

    let times: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.05).collect();
    for beta in [0.5, 2.0, 8.0] {
        let c = exact_kubo_correlator(&eig, &Observable::q(), &Observable::q(), beta, &times)?;
        let s = spectrum(&c, Window::Hann)?;
        let (w, _) = s.main_peak();
        let peaks: Vec<String> = s.peaks(0.02).iter().map(|(w, _)| format!("{w:.3}")).collect();
        println!(
            "beta = {beta}: C_qq(0) = {:.5}, main peak {w:.3}, peaks above 2%: {}",
            c.values[0],
            peaks.join(" ")
        );
    }
    println!("E_1 - E_0 = {:.4}, E_3 - E_2 = {:.4}", eig.energies[1] - eig.energies[0], eig.energies[3] - eig.energies[2]);
    Ok(())
}
