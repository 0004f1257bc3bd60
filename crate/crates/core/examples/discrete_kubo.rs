//! The N-slice discrete Kubo transform converges to the exact lambda
//! integral as `1/N^2`.

use pimd_kubo::oracle::{diagonalize, discrete_kubo_transform, exact_kubo_correlator, GridSpec};
use pimd_kubo::{Observable, PotentialModel};

fn main() -> pimd_kubo::Result<()> {
    let model = PotentialModel::harmonic(1.0, 1.0)?;
    let eig = diagonalize(&model, &GridSpec::new(-12.0, 12.0, 512)?, 40)?;
    let q2 = Observable::q2();
    let beta = 2.0;
    let exact = exact_kubo_correlator(&eig, &q2, &q2, beta, &[0.0])?.values[0];
    println!("exact C(0) = {exact:.12}");

    let mut previous: Option<f64> = None;
    for n in [2, 4, 8, 16, 32, 64, 128, 256] {
        let k = discrete_kubo_transform(&eig, &q2, beta, n)?;
        let err = (k.correlate(&eig, &q2, &[0.0])?.values[0] - exact).abs();
        let ratio = previous.map_or(String::new(), |p| format!("  ratio {:.3}", p / err));
        println!("N = {n:>3}  error {err:.3e}{ratio}");
        previous = Some(err);
    }
    Ok(())
}
