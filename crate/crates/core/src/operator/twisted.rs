use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SampledField;

/// `(F ♮ G)(z) = ∫ F(z′) G(z − z′) e^{πi(xξ′ − x′ξ)} dz′` by the lattice sum
/// on the common grid of `F` and `G`.
///
/// The grid must contain the origin as a lattice point so that `z − z′` stays
/// on it; samples of `G` falling off the grid count as zero. The result lives
/// on the same grid.
pub fn twisted_convolution(f: &SampledField<Complex64>, g: &SampledField<Complex64>) -> Result<SampledField<Complex64>> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch("twisted convolution needs a common grid".into()));
    }
    let h = f.step;
    let kx = -f.origin[0] / h;
    let ky = -f.origin[1] / h;
    if (kx - kx.round()).abs() > 1e-9 || (ky - ky.round()).abs() > 1e-9 {
        return Err(Error::GridMismatch("grid does not contain the origin as a lattice point".into()));
    }
    let (kx, ky) = (kx.round() as i64, ky.round() as i64);
    let (nx, ny) = (f.nx as i64, f.ny as i64);
    let area = h * h;
    let values: Vec<Complex64> = (0..f.nx * f.ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = ((idx / f.ny) as i64, (idx % f.ny) as i64);
            let [x, xi] = f.point(i as usize, j as usize);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..nx {
                // index of z − z′ in x: i − a + kx
                let gi = i - a + kx;
                if gi < 0 || gi >= nx {
                    continue;
                }
                let xp = f.origin[0] + h * a as f64;
                for b in 0..ny {
                    let gj = j - b + ky;
                    if gj < 0 || gj >= ny {
                        continue;
                    }
                    let fv = f.values[(a * ny + b) as usize];
                    if fv == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let xip = f.origin[1] + h * b as f64;
                    let gv = g.values[(gi * ny + gj) as usize];
                    acc += fv * gv * Complex64::from_polar(1.0, PI * (x * xip - xp * xi));
                }
            }
            acc * area
        })
        .collect();
    SampledField::new(f.origin, h, f.nx, f.ny, values)
}
