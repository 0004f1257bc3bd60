//! Real orthogonal normal-mode transform of the cyclic ring.
//!
//! Column layout of the transform matrix `C` (`x_j = sum_k C[j][k] a_k`):
//! mode 0 is `1/sqrt(N)`, modes `0 < k < N/2` are `sqrt(2/N) cos(2 pi j k / N)`,
//! mode `N/2` (even `N`) is `(-1)^j / sqrt(N)`, and modes `k > N/2` are
//! `sqrt(2/N) sin(2 pi j k / N)`. Mode `k` has free-ring frequency
//! `2 w_N sin(k pi / N)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::model::ThermoParams;

/// Above this size the FFT backend replaces the dense matrix.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Beads to mode amplitudes.
    Forward,
    /// Mode amplitudes to beads.
    Inverse,
}

#[derive(Clone)]
enum Backend {
    Dense(Vec<f64>),
    Fft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
}

/// Cached transform for a fixed bead count.
#[derive(Clone)]
pub struct NormalModes {
    n: usize,
    backend: Backend,
}

impl std::fmt::Debug for NormalModes {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.backend {
            Backend::Dense(_) => "dense",
            Backend::Fft { .. } => "fft",
        };
        f.debug_struct("NormalModes").field("n", &self.n).field("backend", &kind).finish()
    }
}

impl NormalModes {
    pub fn new(n: usize) -> Self {
        if n <= DENSE_LIMIT {
            Self::dense(n)
        } else {
            Self::fft(n)
        }
    }

    pub fn dense(n: usize) -> Self {
        assert!(n >= 1, "ring needs at least one bead");
        let mut c = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                c[j * n + k] = matrix_entry(n, j, k);
            }
        }
        Self {
            n,
            backend: Backend::Dense(c),
        }
    }

    pub fn fft(n: usize) -> Self {
        assert!(n >= 1, "ring needs at least one bead");
        let mut planner = FftPlanner::new();
        Self {
            n,
            backend: Backend::Fft {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `C[j][k]`.
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        match &self.backend {
            Backend::Dense(c) => c[j * self.n + k],
            Backend::Fft { .. } => matrix_entry(self.n, j, k),
        }
    }

    /// Column `k` of the transform (bead displacement pattern of mode `k`).
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.entry(j, k)).collect()
    }

    pub fn to_modes(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        match &self.backend {
            Backend::Dense(c) => {
                out.iter_mut().for_each(|a| *a = 0.0);
                for (j, &xj) in x.iter().enumerate() {
                    let row = &c[j * n..(j + 1) * n];
                    for (a, &cjk) in out.iter_mut().zip(row) {
                        *a += cjk * xj;
                    }
                }
            }
            Backend::Fft { forward, .. } => {
                let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                forward.process(&mut buf);
                let s0 = 1.0 / (n as f64).sqrt();
                let s = (2.0 / n as f64).sqrt();
                for k in 0..n {
                    out[k] = if k == 0 || 2 * k == n {
                        s0 * buf[k].re
                    } else if 2 * k < n {
                        s * buf[k].re
                    } else {
                        -s * buf[k].im
                    };
                }
            }
        }
    }

    pub fn from_modes(&self, a: &[f64], out: &mut [f64]) {
        let n = self.n;
        assert_eq!(a.len(), n);
        assert_eq!(out.len(), n);
        match &self.backend {
            Backend::Dense(c) => {
                for (j, x) in out.iter_mut().enumerate() {
                    let row = &c[j * n..(j + 1) * n];
                    *x = row.iter().zip(a).map(|(cjk, ak)| cjk * ak).sum();
                }
            }
            Backend::Fft { inverse, .. } => {
                let s0 = 1.0 / (n as f64).sqrt();
                let s = (2.0 / n as f64).sqrt();
                let mut buf: Vec<Complex64> = (0..n)
                    .map(|k| {
                        if k == 0 || 2 * k == n {
                            Complex64::new(s0 * a[k], 0.0)
                        } else if 2 * k < n {
                            Complex64::new(s * a[k], 0.0)
                        } else {
                            Complex64::new(0.0, -s * a[k])
                        }
                    })
                    .collect();
                inverse.process(&mut buf);
                for (x, v) in out.iter_mut().zip(&buf) {
                    *x = v.re;
                }
            }
        }
    }

    /// Free-ring frequencies `2 w_N sin(k pi / N)` in mode order.
    pub fn frequencies(&self, omega_n: f64) -> Vec<f64> {
        mode_frequencies(self.n, omega_n)
    }

    /// Eigenvalues of the cyclic bond-difference matrix, `4 sin^2(k pi / N)`:
    /// `sum_j (x_j - x_{j+1})^2 = sum_k lambda_k a_k^2`.
    pub fn bond_eigenvalues(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                let s = (k as f64 * PI / self.n as f64).sin();
                4.0 * s * s
            })
            .collect()
    }
}

fn matrix_entry(n: usize, j: usize, k: usize) -> f64 {
    let nf = n as f64;
    if k == 0 {
        1.0 / nf.sqrt()
    } else if 2 * k == n {
        if j % 2 == 0 {
            1.0 / nf.sqrt()
        } else {
            -1.0 / nf.sqrt()
        }
    } else {
        // reduce j*k mod n first so large products keep full precision
        let theta = 2.0 * PI * ((j * k) % n) as f64 / nf;
        let s = (2.0 / nf).sqrt();
        if 2 * k < n {
            s * theta.cos()
        } else {
            s * theta.sin()
        }
    }
}

fn mode_frequencies(n: usize, omega_n: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                2.0 * omega_n * (k as f64 * PI / n as f64).sin()
            }
        })
        .collect()
}

/// One-shot orthogonal transform between beads and mode amplitudes.
pub fn normal_mode_transform(values: &[f64], direction: Direction) -> Vec<f64> {
    let modes = NormalModes::new(values.len());
    let mut out = vec![0.0; values.len()];
    match direction {
        Direction::Forward => modes.to_modes(values, &mut out),
        Direction::Inverse => modes.from_modes(values, &mut out),
    }
    out
}

/// `w_k = 2 (N / (beta hbar)) sin(k pi / N)`, `k = 0..N`.
pub fn free_rp_frequencies(thermo: &ThermoParams) -> Vec<f64> {
    mode_frequencies(thermo.n_beads(), thermo.omega_n())
}
