use serde::{Deserialize, Serialize};

use super::series::SeriesMetadata;
use crate::error::{Error, Result};
use crate::model::{Potential, PotentialModel, ThermoParams};
use crate::ringpoly::{observable_average, Observable};
use crate::sampler::{self, Ensemble, SamplerConfig};
use crate::stats::{self, DEFAULT_BLOCKS};

/// The two delta filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterSpec {
    /// `delta(q_c - x_0(q))`: conditions on the centroid, giving the centroid density.
    CentroidDelta,
    /// `delta(q - x_k)`: conditions on a single bead, giving the bead marginal of `R`.
    PositionDelta,
}

impl FilterSpec {
    /// Filter variable(s) of one configuration.
    fn variables<'a>(&self, x: &'a [f64]) -> FilterVars<'a> {
        match self {
            FilterSpec::CentroidDelta => FilterVars::One(crate::ringpoly::centroid(x)),
            FilterSpec::PositionDelta => FilterVars::Beads(x),
        }
    }

    /// All filter-variable samples of an ensemble.
    pub fn samples(&self, ensemble: &Ensemble) -> Vec<f64> {
        match self {
            FilterSpec::CentroidDelta => ensemble.centroids(),
            FilterSpec::PositionDelta => ensemble.configurations().flatten().copied().collect(),
        }
    }
}

enum FilterVars<'a> {
    One(f64),
    Beads(&'a [f64]),
}

/// Equal-width histogram bins on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub lo: f64,
    pub hi: f64,
    pub n_bins: usize,
}

impl DensityGrid {
    pub fn new(lo: f64, hi: f64, n_bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("grid", "need finite lo < hi"));
        }
        if n_bins == 0 {
            return Err(Error::invalid("grid", "need at least one bin"));
        }
        Ok(Self { lo, hi, n_bins })
    }

    /// Scott's rule `h = 3.49 sigma n^(-1/3)` over the sample range.
    pub fn scott(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        let sd = stats::variance(samples).sqrt();
        let h = 3.49 * sd * (samples.len() as f64).powf(-1.0 / 3.0);
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(h > 0.0) || hi <= lo {
            return Err(Error::invalid("samples", "need a nonzero spread for Scott's rule"));
        }
        let n_bins = ((hi - lo) / h).ceil() as usize + 1;
        let pad = 0.5 * (n_bins as f64 * h - (hi - lo));
        Self::new(lo - pad, hi + pad, n_bins)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n_bins as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.width();
        (0..self.n_bins).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }

    pub fn bin_of(&self, q: f64) -> Option<usize> {
        if !(q >= self.lo && q < self.hi) {
            return None;
        }
        Some((((q - self.lo) / self.width()) as usize).min(self.n_bins - 1))
    }
}

/// Histogram density normalized to unit mass on its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub centers: Vec<f64>,
    pub width: f64,
    pub density: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub metadata: SeriesMetadata,
}

impl DensityTable {
    /// `sum rho dq`.
    pub fn mass(&self) -> f64 {
        stats::compensated_sum(self.density.iter().map(|r| r * self.width))
    }

    pub fn mean(&self) -> f64 {
        stats::compensated_sum(self.centers.iter().zip(&self.density).map(|(q, r)| q * r * self.width))
    }

    /// Second central moment of the binned density.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        stats::compensated_sum(
            self.centers
                .iter()
                .zip(&self.density)
                .map(|(q, r)| (q - m) * (q - m) * r * self.width),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,density,std_error\n");
        for i in 0..self.centers.len() {
            out.push_str(&format!("{},{},{}\n", self.centers[i], self.density[i], self.std_errors[i]));
        }
        out
    }
}

/// Histogram of `samples` on `grid` with 16-block errors per bin.
/// Samples outside the grid are dropped before normalizing.
pub fn density_from_samples(samples: &[f64], grid: &DensityGrid) -> Result<DensityTable> {
    if samples.len() < 2 * DEFAULT_BLOCKS {
        return Err(Error::InsufficientSamples {
            needed: 2 * DEFAULT_BLOCKS,
            got: samples.len(),
        });
    }
    let ranges = stats::block_ranges(samples.len(), DEFAULT_BLOCKS);
    let mut counts = vec![vec![0u64; grid.n_bins]; DEFAULT_BLOCKS];
    let mut inside = vec![0u64; DEFAULT_BLOCKS];
    for (b, r) in ranges.iter().enumerate() {
        for &q in &samples[r.clone()] {
            if let Some(i) = grid.bin_of(q) {
                counts[b][i] += 1;
                inside[b] += 1;
            }
        }
    }
    let total_inside: u64 = inside.iter().sum();
    if total_inside == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let w = grid.width();
    let frac = total_inside as f64 / samples.len() as f64;
    let sizes: Vec<usize> = ranges.iter().map(|r| r.len()).collect();
    let mut density = Vec::with_capacity(grid.n_bins);
    let mut std_errors = Vec::with_capacity(grid.n_bins);
    for i in 0..grid.n_bins {
        let count: u64 = counts.iter().map(|c| c[i]).sum();
        density.push(count as f64 / (total_inside as f64 * w));
        let block_means: Vec<f64> = counts
            .iter()
            .zip(&sizes)
            .map(|(c, &s)| c[i] as f64 / (s as f64 * frac * w))
            .collect();
        std_errors.push(stats::mean_and_error_from_blocks(&block_means, &sizes).1);
    }
    let metadata = SeriesMetadata::new("", "", "histogram")
        .with("binning", "scott_or_user_grid")
        .with("grid", grid)
        .with("dropped", samples.len() as u64 - total_inside);
    Ok(DensityTable {
        centers: grid.centers(),
        width: w,
        density,
        std_errors,
        metadata,
    })
}

/// `rho_0` for a delta filter, estimated from a fresh unconstrained ensemble.
/// The centroid-momentum factor is Gaussian with variance `m / beta` and is
/// not sampled.
pub fn filtered_density_estimate(
    filter: FilterSpec,
    model: &PotentialModel,
    thermo: &ThermoParams,
    sampler_cfg: &SamplerConfig,
    grid: &DensityGrid,
) -> Result<DensityTable> {
    let ensemble = sampler::sample_ring_positions(model, thermo, sampler_cfg)?;
    let mut table = density_from_samples(&filter.samples(&ensemble), grid)?;
    table.metadata.method = format!("{filter:?}");
    table.metadata.insert("centroid_momentum_variance", model.mass() / thermo.beta());
    table.metadata.insert("warnings", ensemble.warnings());
    Ok(table)
}

/// Per-bin mean of `A_0 B_0` conditioned on the filter variable, with the
/// matching density. `sum rho dq * cond` recovers the unfiltered average.
pub fn filtered_conditional_average(
    filter: FilterSpec,
    ensemble: &Ensemble,
    grid: &DensityGrid,
    a: &Observable,
    b: &Observable,
) -> Result<(DensityTable, Vec<f64>)> {
    let (fa, fb) = match (a.as_position(), b.as_position()) {
        (Some(fa), Some(fb)) => (fa, fb),
        _ => {
            return Err(Error::UnsupportedObservable {
                label: format!("{a}, {b}"),
                reason: "conditional averages use position observables only",
            })
        }
    };
    let mut sums = vec![0.0; grid.n_bins];
    let mut counts = vec![0u64; grid.n_bins];
    let mut add = |q: f64, v: f64| {
        if let Some(i) = grid.bin_of(q) {
            sums[i] += v;
            counts[i] += 1;
        }
    };
    for x in ensemble.configurations() {
        let v = observable_average(x, fa) * observable_average(x, fb);
        match filter.variables(x) {
            FilterVars::One(q) => add(q, v),
            FilterVars::Beads(beads) => beads.iter().for_each(|&q| add(q, v)),
        }
    }
    let conditional = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let table = density_from_samples(&filter.samples(ensemble), grid)?;
    Ok((table, conditional))
}

/// `sum_i rho_i dq c_i`.
pub fn integrate_conditional(table: &DensityTable, conditional: &[f64]) -> f64 {
    stats::compensated_sum(
        table
            .density
            .iter()
            .zip(conditional)
            .map(|(r, c)| r * table.width * c),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_samples(n: usize) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn histogram_is_normalized() {
        let s = gaussian_samples(20_000);
        let grid = DensityGrid::scott(&s).unwrap();
        let t = density_from_samples(&s, &grid).unwrap();
        assert!((t.mass() - 1.0).abs() <= 1e-12);
        assert!((t.variance() - 1.0).abs() < 0.05);
        assert!(t.std_errors.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn bins_cover_edges() {
        let g = DensityGrid::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.bin_of(-1.0), Some(0));
        assert_eq!(g.bin_of(0.99999), Some(3));
        assert_eq!(g.bin_of(1.0), None);
        assert_eq!(g.centers(), vec![-0.75, -0.25, 0.25, 0.75]);
        assert!(DensityGrid::new(1.0, 1.0, 3).is_err());
    }
}
