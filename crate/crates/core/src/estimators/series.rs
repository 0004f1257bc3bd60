use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels and parameters that travel with a series into its JSON sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub a: String,
    pub b: String,
    pub method: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl SeriesMetadata {
    pub fn new(a: impl Into<String>, b: impl Into<String>, method: impl Into<String>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            method: method.into(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }
}

/// A real Kubo-transformed correlation function on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub metadata: SeriesMetadata,
}

impl CorrelationSeries {
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        std_errors: Vec<f64>,
        metadata: SeriesMetadata,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() || times.len() != std_errors.len() {
            return Err(Error::invalid("series", "times, values and std_errors need equal, nonzero length"));
        }
        if times[0] != 0.0 {
            return Err(Error::invalid("times", "must start at 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times", "must be strictly ascending"));
        }
        if std_errors.iter().any(|&s| !(s >= 0.0)) {
            return Err(Error::invalid("std_errors", "must be >= 0"));
        }
        Ok(Self {
            times,
            values,
            std_errors,
            metadata,
        })
    }

    /// Exact reference series (zero error bars).
    pub fn exact(times: Vec<f64>, values: Vec<f64>, metadata: SeriesMetadata) -> Result<Self> {
        let n = times.len();
        Self::new(times, values, vec![0.0; n], metadata)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Spacing of a uniform grid (relative tolerance 1e-9), `None` otherwise.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
        uniform.then_some(dt)
    }

    /// CSV with header `t,value,std_error`; numbers use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * self.len() + 20);
        out.push_str("t,value,std_error\n");
        for i in 0..self.len() {
            out.push_str(&format!("{},{},{}\n", self.times[i], self.values[i], self.std_errors[i]));
        }
        out
    }

    pub fn from_csv(text: &str, metadata: SeriesMetadata) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("t,value,std_error") {
            return Err(Error::invalid("csv", "expected header `t,value,std_error`"));
        }
        let (mut t, mut v, mut s) = (Vec::new(), Vec::new(), Vec::new());
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            let parse = |c: &str| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid("csv", format!("row {}: {e}", i + 2)))
            };
            if cols.len() != 3 {
                return Err(Error::invalid("csv", format!("row {} has {} columns", i + 2, cols.len())));
            }
            t.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
            s.push(parse(cols[2])?);
        }
        Self::new(t, v, s, metadata)
    }

    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.metadata)?)
    }

    /// Writes `<stem>.csv` and `<stem>.json` next to each other.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        std::fs::write(dir.join(format!("{stem}.json")), self.sidecar_json()?)?;
        Ok(())
    }

    /// Largest `|self - other| / sqrt(se_self^2 + se_other^2)` over common
    /// times; points with zero combined error count only if they differ.
    pub fn max_normalized_deviation(&self, other: &CorrelationSeries) -> Result<f64> {
        self.check_same_times(other)?;
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let d = (self.values[i] - other.values[i]).abs();
            let se = self.std_errors[i].hypot(other.std_errors[i]);
            let r = if se > 0.0 {
                d / se
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(r);
        }
        Ok(worst)
    }

    pub fn max_abs_deviation(&self, other: &CorrelationSeries) -> Result<f64> {
        self.check_same_times(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_times(&self, other: &CorrelationSeries) -> Result<()> {
        let same = self.len() == other.len()
            && self
                .times
                .iter()
                .zip(&other.times)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
        if same {
            Ok(())
        } else {
            Err(Error::invalid("series", "time grids differ"))
        }
    }
}
