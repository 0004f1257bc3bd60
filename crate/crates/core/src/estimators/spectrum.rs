use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::series::CorrelationSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    None,
    /// Half Hann taper `0.5 (1 + cos(pi t / t_max))` on `[0, t_max]`.
    #[default]
    Hann,
}

pub const DEFAULT_PAD: usize = 4;

/// Cosine transform magnitude `|Re X(omega)|` on `omega >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl Spectrum {
    /// Largest intensity excluding the `omega = 0` bin.
    pub fn main_peak(&self) -> (f64, f64) {
        self.max_in(f64::MIN_POSITIVE, f64::INFINITY).unwrap_or((0.0, 0.0))
    }

    /// Largest intensity with `lo <= omega <= hi`.
    pub fn max_in(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        self.omega
            .iter()
            .zip(&self.intensity)
            .filter(|(w, _)| **w >= lo && **w <= hi)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(w, i)| (*w, *i))
    }

    /// Local maxima at or above `min_fraction` of the main peak, by frequency.
    pub fn peaks(&self, min_fraction: f64) -> Vec<(f64, f64)> {
        let (_, top) = self.main_peak();
        let i = &self.intensity;
        (1..i.len().saturating_sub(1))
            .filter(|&k| i[k] >= i[k - 1] && i[k] > i[k + 1] && i[k] >= min_fraction * top)
            .map(|k| (self.omega[k], i[k]))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,intensity\n");
        for (w, i) in self.omega.iter().zip(&self.intensity) {
            out.push_str(&format!("{w},{i}\n"));
        }
        out
    }
}

/// Spectrum with the default zero-padding factor.
pub fn spectrum(series: &CorrelationSeries, window: Window) -> Result<Spectrum> {
    spectrum_padded(series, window, DEFAULT_PAD)
}

/// Fourier transform of the even extension `C(-t) = C(t)`, zero-padded to
/// `pad` times the extended length.
pub fn spectrum_padded(series: &CorrelationSeries, window: Window, pad: usize) -> Result<Spectrum> {
    let dt = series
        .uniform_step()
        .ok_or_else(|| Error::invalid("times", "spectrum needs a uniform grid"))?;
    if pad == 0 {
        return Err(Error::invalid("pad", "must be >= 1"));
    }
    let n = series.len();
    let len = pad * 2 * (n - 1);
    let taper = |j: usize| match window {
        Window::None => 1.0,
        Window::Hann => 0.5 * (1.0 + (PI * j as f64 / (n - 1) as f64).cos()),
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, &v) in series.values.iter().enumerate() {
        let g = v * taper(j);
        buf[j].re = g;
        if j > 0 && len - j > j {
            buf[len - j].re = g;
        }
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let dw = 2.0 * PI / (len as f64 * dt);
    let half = len / 2;
    Ok(Spectrum {
        omega: (0..=half).map(|k| k as f64 * dw).collect(),
        intensity: buf[..=half].iter().map(|x| x.re.abs() * dt).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::SeriesMetadata;

    fn series(f: impl Fn(f64) -> f64, dt: f64, t_max: f64) -> CorrelationSeries {
        let n = (t_max / dt).round() as usize + 1;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let v = t.iter().map(|&x| f(x)).collect();
        CorrelationSeries::exact(t, v, SeriesMetadata::default()).unwrap()
    }

    #[test]
    fn single_cosine_peak() {
        let w0 = 1.7;
        let s = spectrum(&series(|t| (w0 * t).cos(), 0.05, 200.0), Window::Hann).unwrap();
        let (w, _) = s.main_peak();
        let bin = s.omega[1];
        assert!((w - w0).abs() <= bin, "peak at {w}");
    }

    #[test]
    fn zero_series_gives_zero_spectrum() {
        let s = spectrum(&series(|_| 0.0, 0.1, 10.0), Window::Hann).unwrap();
        assert!(s.intensity.iter().all(|&i| i == 0.0));
    }

    #[test]
    fn two_peak_ratio() {
        let s = spectrum(&series(|t| t.cos() + 0.2 * (3.0 * t).cos(), 0.05, 200.0), Window::Hann).unwrap();
        let (_, i1) = s.max_in(0.8, 1.2).unwrap();
        let (_, i3) = s.max_in(2.8, 3.2).unwrap();
        assert!((i1 / i3 - 5.0).abs() <= 0.5, "ratio {}", i1 / i3);
    }
}
