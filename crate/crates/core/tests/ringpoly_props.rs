use approx::assert_relative_eq;
use proptest::prelude::*;

use pimd_kubo::ringpoly::{
    log_ring_density, normal_mode_transform, spring_energy, Direction, NormalModes, Observable,
    RingPolymerState,
};
use pimd_kubo::{PotentialModel, ThermoParams};

fn bead_vec(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclic_shift_leaves_density_unchanged(x in bead_vec(24), shift in 0usize..24, beta in 0.2f64..8.0) {
        let n = x.len();
        let t = ThermoParams::natural(beta, n).unwrap();
        let m = PotentialModel::mildly_anharmonic(1.0, 1.0, 0.1, 0.05).unwrap();
        let mut y = x.clone();
        y.rotate_left(shift % n);
        let a = log_ring_density(&x, &t, &m).unwrap();
        let b = log_ring_density(&y, &t, &m).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn reversal_leaves_spring_energy_unchanged(x in bead_vec(24)) {
        let t = ThermoParams::natural(1.3, x.len()).unwrap();
        let mut y = x.clone();
        y.reverse();
        let a = spring_energy(&x, &t, 0.7);
        let b = spring_energy(&y, &t, 0.7);
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn transform_round_trips(x in bead_vec(200)) {
        let a = normal_mode_transform(&x, Direction::Forward);
        let back = normal_mode_transform(&a, Direction::Inverse);
        for (u, v) in x.iter().zip(&back) {
            prop_assert!((u - v).abs() <= 1e-12 * 5.0 * (x.len() as f64).sqrt());
        }
    }

    #[test]
    fn transform_preserves_norm(x in bead_vec(128)) {
        let a = normal_mode_transform(&x, Direction::Forward);
        let nx: f64 = x.iter().map(|v| v * v).sum();
        let na: f64 = a.iter().map(|v| v * v).sum();
        prop_assert!((nx - na).abs() <= 1e-11 * nx.max(1.0));
    }

    #[test]
    fn fft_backend_matches_dense(x in prop::collection::vec(-3.0f64..3.0, 1..=160)) {
        let n = x.len();
        let (dense, fft) = (NormalModes::dense(n), NormalModes::fft(n));
        let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
        dense.to_modes(&x, &mut a);
        fft.to_modes(&x, &mut b);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-12 * n as f64);
        }
        dense.from_modes(&x, &mut a);
        fft.from_modes(&x, &mut b);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-12 * n as f64);
        }
    }

    #[test]
    fn centroid_is_scaled_zero_mode(x in bead_vec(64)) {
        let n = x.len() as f64;
        let a = normal_mode_transform(&x, Direction::Forward);
        let s = RingPolymerState::at_rest(x).unwrap();
        prop_assert!((a[0] / n.sqrt() - s.centroid_position()).abs() <= 1e-12 * a[0].abs().max(1.0));
    }

    #[test]
    fn bond_midpoints_keep_centroid(p in bead_vec(32)) {
        let x = vec![0.0; p.len()];
        let s = RingPolymerState::new(x, p).unwrap();
        let mid = s.bond_midpoint_momenta();
        let c = mid.iter().sum::<f64>() / mid.len() as f64;
        prop_assert!((c - s.centroid_momentum()).abs() <= 1e-12 * 5.0);
    }
}

#[test]
fn linear_observable_is_centroid() {
    let s = RingPolymerState::at_rest(vec![0.4, -1.1, 2.9, 0.3]).unwrap();
    assert_relative_eq!(Observable::q().centroid_value(&s), s.centroid_position(), epsilon = 1e-15);
    assert_relative_eq!(Observable::q2().centroid_value(&s), (0.16 + 1.21 + 8.41 + 0.09) / 4.0, epsilon = 1e-14);
}

#[test]
fn spring_energy_is_diagonal_in_modes() {
    let x = [0.3, -1.4, 2.2, 0.0, 0.6, 5.0, -3.3, 0.8];
    let t = ThermoParams::natural(0.8, x.len()).unwrap();
    let modes = NormalModes::new(x.len());
    let mut a = vec![0.0; x.len()];
    modes.to_modes(&x, &mut a);
    let freqs = modes.frequencies(t.omega_n());
    let from_modes: f64 = a.iter().zip(&freqs).map(|(ak, wk)| 0.5 * 1.5 * wk * wk * ak * ak).sum();
    assert_relative_eq!(spring_energy(&x, &t, 1.5), from_modes, max_relative = 1e-12);
}
