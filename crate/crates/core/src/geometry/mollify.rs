use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use super::Domain;
use crate::error::{Error, Result};
use crate::field::SampledField;

/// In-place 2-D FFT of a row-major `p × q` array.
fn fft2(data: &mut [Complex64], p: usize, q: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let row = planner.plan_fft(q, direction);
    data.par_chunks_mut(q).for_each(|r| row.process(r));
    let col = planner.plan_fft(p, direction);
    let mut cols: Vec<Vec<Complex64>> = (0..q).map(|j| (0..p).map(|i| data[i * q + j]).collect()).collect();
    cols.par_iter_mut().for_each(|c| col.process(c));
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            data[i * q + j] = *v;
        }
    }
}

/// `‖1_E ∗ φ − (∫φ)·1_E‖_{L¹}` for `E = Ω` or `E = Ω^C`, by grid quadrature.
///
/// The indicator is sampled on the lattice of `φ` and convolved by FFT. The
/// difference vanishes outside `Ω ∪ (Ω + supp φ)`, so the L¹ norm is summed
/// over that box only; for the complement the indicator of `Ω^C` is sampled on
/// the padded box and convolved the same way. `φ` must vanish on the outer
/// ring of its grid, otherwise the grid does not cover its support.
pub fn mollification_defect(dom: &Domain, phi: &SampledField<f64>, complement: bool) -> Result<f64> {
    if phi.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Domain("mollifier must be finite and nonnegative".into()));
    }
    let peak = phi.values.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    if phi.edge_max() > 1e-12 * peak {
        return Err(Error::GridCoverage(format!(
            "mollifier is {:e} of its peak on the grid edge",
            phi.edge_max() / peak
        )));
    }
    let h = phi.step;
    let mass = phi.integral();
    let (lo, hi) = dom.bounding_box();
    let (nfx, nfy) = (phi.nx, phi.ny);
    let ext = [h * (nfx - 1) as f64, h * (nfy - 1) as f64];
    // output box Z = bbox(Ω) ∪ (bbox(Ω) + supp φ)
    let zlo = [lo[0].min(lo[0] + phi.origin[0]), lo[1].min(lo[1] + phi.origin[1])];
    let zhi = [
        hi[0].max(hi[0] + phi.origin[0] + ext[0]),
        hi[1].max(hi[1] + phi.origin[1] + ext[1]),
    ];
    let kx = ((zhi[0] - zlo[0]) / h).ceil() as usize + 1;
    let ky = ((zhi[1] - zlo[1]) / h).ceil() as usize + 1;
    let q0 = [zlo[0] - phi.origin[0], zlo[1] - phi.origin[1]];
    let lax = kx + nfx - 1;
    let lay = ky + nfy - 1;
    let px = lax + nfx - 1;
    let py = lay + nfy - 1;
    let cells = px.checked_mul(py).ok_or_else(|| Error::MemoryBudget("convolution grid overflow".into()))?;
    if cells > 64_000_000 {
        return Err(Error::MemoryBudget(format!("convolution grid of {px}×{py} points")));
    }

    let indicator = |p: [f64; 2]| {
        let inside = dom.contains(p);
        if inside != complement {
            1.0
        } else {
            0.0
        }
    };
    let mut a = vec![Complex64::new(0.0, 0.0); cells];
    a.par_chunks_mut(py).enumerate().for_each(|(i, row)| {
        if i >= lax {
            return;
        }
        let m = i as f64 - (nfx as f64 - 1.0);
        for (j, v) in row.iter_mut().enumerate().take(lay) {
            let n = j as f64 - (nfy as f64 - 1.0);
            *v = Complex64::new(indicator([q0[0] + h * m, q0[1] + h * n]), 0.0);
        }
    });
    let mut b = vec![Complex64::new(0.0, 0.0); cells];
    for i in 0..nfx {
        for j in 0..nfy {
            b[i * py + j] = Complex64::new(phi.get(i, j), 0.0);
        }
    }
    fft2(&mut a, px, py, FftDirection::Forward);
    fft2(&mut b, px, py, FftDirection::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    fft2(&mut a, px, py, FftDirection::Inverse);
    let norm = h * h / cells as f64;

    let total: f64 = (0..kx)
        .into_par_iter()
        .map(|k| {
            let mut s = 0.0;
            for l in 0..ky {
                let conv = a[(k + nfx - 1) * py + (l + nfy - 1)].re * norm;
                let z = [zlo[0] + h * k as f64, zlo[1] + h * l as f64];
                s += (conv - mass * indicator(z)).abs();
            }
            s
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total * h * h)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn gaussian_bump(sigma: f64, h: f64, center: [f64; 2]) -> SampledField<f64> {
        let half = 9.0 * sigma;
        let k = (half / h).ceil() as usize;
        let n = 2 * k + 1;
        let o = [center[0] - k as f64 * h, center[1] - k as f64 * h];
        SampledField::from_fn(o, h, n, n, |p| {
            let r2 = (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2);
            (-r2 / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
        })
    }

    #[test]
    fn defect_of_unit_gaussian_on_square() {
        let sq = Domain::unit_square();
        let h = 0.01;
        let phi = SampledField::centered(4.0, h, |p| (-PI * (p[0] * p[0] + p[1] * p[1])).exp());
        let d = mollification_defect(&sq, &phi, false).unwrap();
        let dc = mollification_defect(&sq, &phi, true).unwrap();
        assert!(d > 0.0 && d <= 2.0, "{d}");
        assert!((d - dc).abs() < 1e-6, "{d} vs {dc}");
    }

    #[test]
    fn defect_vanishes_for_tight_mollifiers() {
        let sq = Domain::unit_square();
        let mut prev = f64::INFINITY;
        for sigma in [0.1, 0.03, 0.01] {
            let phi = gaussian_bump(sigma, sigma / 8.0, [0.0, 0.0]);
            let d = mollification_defect(&sq, &phi, false).unwrap();
            // ∫|z|φ = σ√(π/2) for a normalized isotropic Gaussian
            assert!(d <= 4.0 * sigma * (PI / 2.0).sqrt() * 1.01, "sigma={sigma}: {d}");
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn disjoint_supports() {
        let sq = Domain::unit_square();
        let phi = gaussian_bump(0.2, 0.02, [8.0, 8.0]);
        let d = mollification_defect(&sq, &phi, false).unwrap();
        assert!((d - 2.0 * phi.integral() * sq.measure()).abs() < 0.1, "{d}");
    }

    #[test]
    fn coverage_is_checked() {
        let phi = SampledField::centered(1.0, 0.05, |p| (-PI * (p[0] * p[0] + p[1] * p[1])).exp());
        assert!(matches!(
            mollification_defect(&Domain::unit_square(), &phi, false),
            Err(Error::GridCoverage(_))
        ));
    }
}
