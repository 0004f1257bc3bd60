use approx::assert_abs_diff_eq;

use pimd_kubo::oracle::quadrature::integrate_adaptive;
use pimd_kubo::oracle::{
    diagonalize, diagonalize_with_hbar, discrete_kubo_transform, exact_kubo_correlator,
    harmonic_centroid_mean, harmonic_kubo_qq, harmonic_swarm_trace, kubo_weight,
    lambda_quadrature_kubo, GridSpec,
};
use pimd_kubo::ringpoly::Polynomial;
use pimd_kubo::{Error, Observable, PotentialModel, ThermoParams};

fn times(dt: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 * dt).collect()
}

fn grid() -> GridSpec {
    GridSpec::new(-10.0, 10.0, 512).unwrap()
}

#[test]
fn harmonic_position_correlator_is_analytic() {
    let model = PotentialModel::harmonic(1.0, 1.0).unwrap();
    let eig = diagonalize(&model, &GridSpec::new(-14.0, 14.0, 512).unwrap(), 40).unwrap();
    let thermo = ThermoParams::natural(1.0, 1).unwrap();
    let ts = times(0.1, 100);
    let c = exact_kubo_correlator(&eig, &Observable::q(), &Observable::q(), 1.0, &ts).unwrap();
    for (t, v) in ts.iter().zip(&c.values) {
        assert_abs_diff_eq!(*v, harmonic_kubo_qq(&model, &thermo, *t).unwrap(), epsilon = 1e-8);
    }
}

#[test]
fn parity_kills_odd_even_cross_correlators() {
    let model = PotentialModel::mildly_anharmonic(1.0, 1.0, 0.0, 0.1).unwrap();
    let eig = diagonalize(&model, &grid(), 20).unwrap();
    let c = exact_kubo_correlator(&eig, &Observable::q(), &Observable::q2(), 1.0, &times(0.1, 100)).unwrap();
    assert!(c.values.iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn anharmonic_levels_match_perturbation_theory() {
    let c4 = 0.01;
    let model = PotentialModel::mildly_anharmonic(1.0, 1.0, 0.0, c4).unwrap();
    let eig = diagonalize(&model, &grid(), 6).unwrap();
    for n in 0..4 {
        let nf = n as f64;
        let first = 0.75 * c4 * (2.0 * nf * nf + 2.0 * nf + 1.0);
        let second = -c4 * c4 / 8.0 * (34.0 * nf.powi(3) + 51.0 * nf * nf + 59.0 * nf + 21.0);
        let shift = eig.energies[n] - (nf + 0.5);
        let pt = first + second;
        assert!((shift - pt).abs() <= 0.05 * pt, "n = {n}: shift {shift}, second order {pt}");
    }
    let third = 0.75 * c4 - 21.0 / 8.0 * c4.powi(2) + 333.0 / 16.0 * c4.powi(3);
    assert_abs_diff_eq!(eig.energies[0] - 0.5, third, epsilon = 5e-6);
}

#[test]
fn hbar_rescales_the_spectrum() {
    let model = PotentialModel::harmonic(1.0, 1.0).unwrap();
    let eig = diagonalize_with_hbar(&model, &GridSpec::new(-8.0, 8.0, 512).unwrap(), 5, 0.5).unwrap();
    for (n, e) in eig.energies.iter().enumerate() {
        assert_abs_diff_eq!(*e, 0.5 * (n as f64 + 0.5), epsilon = 1e-8);
    }
}

#[test]
fn lambda_quadrature_matches_spectral_sum() {
    let model = PotentialModel::mildly_anharmonic(1.0, 1.0, 0.1, 0.05).unwrap();
    let eig = diagonalize(&model, &grid(), 24).unwrap();
    for (a, b) in [(Observable::q(), Observable::q()), (Observable::q2(), Observable::q2()), (Observable::q(), Observable::q3())] {
        let exact = exact_kubo_correlator(&eig, &a, &b, 2.0, &[0.0]).unwrap().values[0];
        let quad = lambda_quadrature_kubo(&eig, &a, &b, 2.0, 64).unwrap();
        assert_abs_diff_eq!(exact, quad, epsilon = 1e-8);
    }
}

#[test]
fn kubo_weight_is_the_lambda_integral() {
    for (en, em) in [(0.5, 1.5), (0.3, 0.3), (2.0, 0.1), (1.0, 1.0 + 1e-11)] {
        let beta = 1.7;
        let direct = integrate_adaptive(
            |l| (-l * en - (beta - l) * em).exp() / beta,
            0.0,
            beta,
            1e-13,
        )
        .unwrap();
        assert_abs_diff_eq!(kubo_weight(beta, en, em), direct, epsilon = 1e-12);
    }
}

#[test]
fn one_bead_discrete_transform_is_symmetrized_product() {
    let model = PotentialModel::mildly_anharmonic(1.0, 1.0, 0.1, 0.05).unwrap();
    let eig = diagonalize(&model, &grid(), 24).unwrap();
    let beta = 1.5;
    let k = discrete_kubo_transform(&eig, &Observable::q2(), beta, 1).unwrap();
    let a = eig.matrix(&Observable::q2());
    for i in 0..24 {
        for j in 0..24 {
            let expect = a[(i, j)] * 0.5 * ((-beta * eig.energies[i]).exp() + (-beta * eig.energies[j]).exp());
            assert_abs_diff_eq!(k.matrix[(i, j)].re, expect.re, epsilon = 1e-13);
        }
    }
    for n in [1, 4, 32] {
        let k = discrete_kubo_transform(&eig, &Observable::q2(), beta, n).unwrap();
        for i in 0..24 {
            let diag = a[(i, i)] * (-beta * eig.energies[i]).exp();
            assert_abs_diff_eq!(k.matrix[(i, i)].re, diag.re, epsilon = 1e-13 * diag.re.abs().max(1.0));
        }
    }
}

#[test]
fn too_few_states_at_high_temperature() {
    let model = PotentialModel::harmonic(1.0, 1.0).unwrap();
    let eig = diagonalize(&model, &grid(), 4).unwrap();
    let err = exact_kubo_correlator(&eig, &Observable::q(), &Observable::q(), 0.1, &[0.0]).unwrap_err();
    assert!(matches!(err, Error::SpectralIncomplete(_)), "{err:?}");
}

#[test]
fn narrow_grid_leaks() {
    let model = PotentialModel::harmonic(1.0, 1.0).unwrap();
    let err = diagonalize(&model, &GridSpec::new(-3.0, 3.0, 128).unwrap(), 10).unwrap_err();
    assert!(matches!(err, Error::BoundaryLeak { .. }), "{err:?}");
}

#[test]
fn swarm_mean_of_q_is_the_centroid_mean() {
    let model = PotentialModel::harmonic(1.0, 1.0).unwrap();
    let thermo = ThermoParams::natural(2.0, 6).unwrap();
    let x = [0.3, -0.7, 0.2, 1.1, -0.4, 0.0];
    let p = [0.5, 0.1, -0.9, 0.3, 0.2, -0.6];
    for t in [0.0, 0.3, 1.0, 2.5] {
        let trace = harmonic_swarm_trace(&x, &p, t, &Polynomial::monomial(1), &model, &thermo).unwrap();
        assert_abs_diff_eq!(trace, harmonic_centroid_mean(&x, &p, t, 1.0, 1.0), epsilon = 1e-10);
    }
}
