//! Harmonic swarm trace: each bead spreads into a Gaussian whose center
//! follows the classical orbit from the bond-midpoint momentum. At short times
//! it collapses onto the bead values; for `B = q` it tracks the centroid.

use pimd_kubo::oracle::{harmonic_centroid_mean, harmonic_swarm_trace};
use pimd_kubo::ringpoly::{observable_average, Polynomial};
use pimd_kubo::{PotentialModel, ThermoParams};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::harmonic(1.0, 1.0)?;
    let thermo = ThermoParams::natural(2.0, 8)?;
    let x = [0.4, -0.1, 0.7, 0.2, -0.5, 0.3, 0.0, 0.6];
    let p = [0.3, -0.8, 0.1, 0.5, 0.0, -0.2, 0.9, -0.4];

    for deg in [1, 2, 4] {
        let b = Polynomial::monomial(deg);
        println!("B = q^{deg}, B_0(x) = {:.6}", observable_average(&x, &b));
        for t in [1e-6, 0.5, 1.0, 2.0] {
            let trace = harmonic_swarm_trace(&x, &p, t, &b, &model, &thermo)?;
            let line = if deg == 1 {
                format!("   centroid mean {:.6}", harmonic_centroid_mean(&x, &p, t, 1.0, 1.0))
            } else {
                String::new()
            };
            println!("  t = {t:<6} trace = {trace:.6}{line}");
        }
    }
    Ok(())
}
