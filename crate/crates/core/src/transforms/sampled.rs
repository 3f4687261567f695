//! Functions sampled on a uniform `(θ, v)` grid of the cylinder.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Grid geometry: `θ_i = 2πi/N_θ`, `v_j = −V_max + j·2V_max/(N_v − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub n_theta: usize,
    pub n_v: usize,
    pub v_max: f64,
}

impl Default for LineGrid {
    fn default() -> Self {
        Self {
            n_theta: 256,
            n_v: 1024,
            v_max: 8.0,
        }
    }
}

impl LineGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 8 || !self.n_theta.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "N_theta = {} must be even and at least 8",
                self.n_theta
            )));
        }
        if self.n_v < 5 {
            return Err(Error::InvalidArgument(format!(
                "N_v = {} must be at least 5",
                self.n_v
            )));
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return Err(Error::InvalidArgument("V_max must be positive".into()));
        }
        Ok(())
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / (self.n_v - 1) as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_theta as f64
    }

    pub fn v(&self, j: usize) -> f64 {
        -self.v_max + self.dv() * j as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledLineFunction {
    grid: LineGrid,
    /// Row-major in θ: index `i * n_v + j`.
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    n_theta: usize,
    n_v: usize,
    v_max: f64,
    columns: Vec<String>,
}

const FORMAT: &str = "sampled-line-function/1";

impl SampledLineFunction {
    pub fn from_values(grid: LineGrid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.n_theta * grid.n_v {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.n_theta * grid.n_v,
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LineGrid, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        grid.validate()?;
        let values = (0..grid.n_theta * grid.n_v)
            .into_par_iter()
            .map(|k| f(grid.theta(k / grid.n_v), grid.v(k % grid.n_v)))
            .collect();
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: LineGrid) -> Result<Self> {
        Self::from_values(grid, vec![0.0; grid.n_theta * grid.n_v])
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.n_v;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_v + j]
    }

    pub fn map_rows(&self, f: impl Fn(usize, &[f64]) -> Vec<f64> + Sync) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..self.grid.n_theta)
            .into_par_iter()
            .map(|i| f(i, self.row(i)))
            .collect();
        Self::from_values(self.grid, rows.concat())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("grid mismatch".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Self::from_values(self.grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|value|` on the two end columns `v = ±V_max`.
    pub fn edge_max_abs(&self) -> f64 {
        let n = self.grid.n_v;
        (0..self.grid.n_theta)
            .map(|i| self.value(i, 0).abs().max(self.value(i, n - 1).abs()))
            .fold(0.0, f64::max)
    }

    /// Linear interpolation in `v` along row `i`.
    pub fn interp(&self, i: usize, v: f64) -> Result<f64> {
        let g = &self.grid;
        let u = (v + g.v_max) / g.dv();
        if !(u >= -1e-9 && u <= (g.n_v - 1) as f64 + 1e-9) {
            return Err(Error::OutOfRange {
                v,
                lo: -g.v_max,
                hi: g.v_max,
            });
        }
        let u = u.clamp(0.0, (g.n_v - 1) as f64);
        let j = (u.floor() as usize).min(g.n_v - 2);
        let s = u - j as f64;
        let row = self.row(i);
        Ok(row[j] * (1.0 - s) + row[j + 1] * s)
    }

    /// `(1/N_θ) Σ_i g(θ_i, t + ⟨ω_i, x⟩)`: the circle average of the samples
    /// over the planar circle through `(t, x)`.
    pub fn circle_average(&self, t: f64, x1: f64, x2: f64) -> Result<f64> {
        let n = self.grid.n_theta;
        let mut sum = 0.0;
        for i in 0..n {
            let th = self.grid.theta(i);
            sum += self.interp(i, t + x1 * th.cos() + x2 * th.sin())?;
        }
        Ok(sum / n as f64)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta,v,value")?;
        for i in 0..self.grid.n_theta {
            let th = self.grid.theta(i);
            for j in 0..self.grid.n_v {
                writeln!(w, "{},{},{}", th, self.grid.v(j), self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// JSON header line carrying the grid metadata, then the CSV payload.
    pub fn write_document<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            format: FORMAT.into(),
            n_theta: self.grid.n_theta,
            n_v: self.grid.n_v,
            v_max: self.grid.v_max,
            columns: vec!["theta".into(), "v".into(), "value".into()],
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        self.write_csv(w)
    }

    pub fn read_document<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))??;
        let header: Header = serde_json::from_str(&header_line)?;
        if header.format != FORMAT {
            return Err(Error::Parse(format!("unknown format {}", header.format)));
        }
        let grid = LineGrid {
            n_theta: header.n_theta,
            n_v: header.n_v,
            v_max: header.v_max,
        };
        grid.validate()?;
        let columns = lines
            .next()
            .ok_or_else(|| Error::Parse("missing column line".into()))??;
        if columns.trim() != "theta,v,value" {
            return Err(Error::Parse(format!("unexpected columns {columns}")));
        }
        let mut values = Vec::with_capacity(grid.n_theta * grid.n_v);
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let last = line
                .rsplit(',')
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: empty", k + 3)))?;
            let v: f64 = last
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", k + 3)))?;
            values.push(v);
        }
        Self::from_values(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> LineGrid {
        LineGrid {
            n_theta: 8,
            n_v: 9,
            v_max: 2.0,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(LineGrid {
            n_theta: 7,
            ..small()
        }
        .validate()
        .is_err());
        assert!(LineGrid {
            n_theta: 6,
            ..small()
        }
        .validate()
        .is_err());
        assert!(small().validate().is_ok());
        assert!(LineGrid::default().validate().is_ok());
    }

    #[test]
    fn interpolation_and_range() {
        let g = SampledLineFunction::from_fn(small(), |_, v| 2.0 * v + 1.0).unwrap();
        assert!((g.interp(3, 0.3).unwrap() - 1.6).abs() < 1e-14);
        assert!(g.interp(0, 2.5).is_err());
        let c = SampledLineFunction::from_fn(small(), |_, _| 3.5).unwrap();
        assert!((c.circle_average(0.0, 0.4, -0.2).unwrap() - 3.5).abs() < 1e-14);
    }

    #[test]
    fn csv_has_expected_shape() {
        let g = SampledLineFunction::zeros(small()).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 8 * 9);
        assert!(text.starts_with("theta,v,value\n"));
    }

    proptest! {
        #[test]
        fn document_round_trip(vals in proptest::collection::vec(-1e6f64..1e6, 72)) {
            let g = SampledLineFunction::from_values(small(), vals).unwrap();
            let mut buf = Vec::new();
            g.write_document(&mut buf).unwrap();
            let back = SampledLineFunction::read_document(&buf[..]).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
