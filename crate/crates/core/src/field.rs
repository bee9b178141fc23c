//! Functions on R² sampled on a uniform square grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples `values[i·ny + j] = f(origin + step·(i, j))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField<T> {
    pub origin: [f64; 2],
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
}

impl<T: Copy> SampledField<T> {
    pub fn from_fn<F: Fn([f64; 2]) -> T>(origin: [f64; 2], step: f64, nx: usize, ny: usize, f: F) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                values.push(f([origin[0] + step * i as f64, origin[1] + step * j as f64]));
            }
        }
        SampledField {
            origin,
            step,
            nx,
            ny,
            values,
        }
    }

    /// Field on the centred grid `[-half, half]²` (rounded to whole steps).
    pub fn centered<F: Fn([f64; 2]) -> T>(half: f64, step: f64, f: F) -> Self {
        let k = (half / step).round() as usize;
        let n = 2 * k + 1;
        let o = -(k as f64) * step;
        Self::from_fn([o, o], step, n, n, f)
    }

    pub fn new(origin: [f64; 2], step: f64, nx: usize, ny: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(Error::GridMismatch(format!(
                "{} values for a {nx}×{ny} grid",
                values.len()
            )));
        }
        if !(step > 0.0) || nx == 0 || ny == 0 {
            return Err(Error::Domain("sampled field needs step > 0 and a nonempty grid".into()));
        }
        Ok(SampledField {
            origin,
            step,
            nx,
            ny,
            values,
        })
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + self.step * i as f64, self.origin[1] + self.step * j as f64]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.ny + j]
    }

    /// True when both fields live on the same lattice.
    pub fn same_grid<U>(&self, other: &SampledField<U>) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && (self.step - other.step).abs() <= 1e-12 * self.step
            && (self.origin[0] - other.origin[0]).abs() <= 1e-9 * self.step
            && (self.origin[1] - other.origin[1]).abs() <= 1e-9 * self.step
    }
}

impl SampledField<f64> {
    /// Riemann sum `Σ v·h²`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step * self.step
    }

    /// Largest absolute value on the outermost ring of samples.
    pub fn edge_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.nx {
            for j in 0..self.ny {
                if i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny {
                    m = m.max(self.get(i, j).abs());
                }
            }
        }
        m
    }
}

impl SampledField<Complex64> {
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.step * self.step).sqrt()
    }
}
