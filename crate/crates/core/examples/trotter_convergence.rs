//! Static `<q^2>` for the harmonic oscillator at beta = 1 as the bead count
//! grows, against the grid-oracle value.
//!
//! ```text
//! cargo run --release --example trotter_convergence
//! ```

use pimd_kubo::oracle::{diagonalize, exact_kubo_correlator, GridSpec};
use pimd_kubo::ringpoly::Polynomial;
use pimd_kubo::sampler::{ensemble_average, sample_ring_positions, SamplerConfig};
use pimd_kubo::{Observable, PotentialModel, ThermoParams};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::harmonic(1.0, 1.0)?;
    let beta = 1.0;

    // <q^2> is the t = 0 Kubo correlator of q^2 with the identity
    let eig = diagonalize(&model, &GridSpec::new(-14.0, 14.0, 512)?, 40)?;
    let one = Observable::position(Polynomial::new(vec![1.0])?, "1");
    let exact = exact_kubo_correlator(&eig, &Observable::q2(), &one, beta, &[0.0])?.values[0];
    println!("exact <q^2> = {exact:.6}");
    println!("{:>4} {:>10} {:>10} {:>10}", "N", "<q^2>", "SE", "error");

    for n in [1, 2, 4, 8, 16, 32] {
        let thermo = ThermoParams::natural(beta, n)?;
        let ens = sample_ring_positions(&model, &thermo, &SamplerConfig::new(100_000, 11))?;
        let avg = ensemble_average(&Observable::q2(), &ens)?;
        println!("{n:>4} {:>10.5} {:>10.1e} {:>10.1e}", avg.mean, avg.std_error, exact - avg.mean);
    }
    Ok(())
}
