//! Closed-form spectra for the Gaussian window on disks and polydisks, the
//! Gamma-tail envelope and the two sharpness regimes.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::Spectrum;
use crate::special::{ln_reg_lower_gamma_int, reg_lower_gamma};
use crate::stats::TIE_TOLERANCE;

/// Largest index box accepted by [`polydisk_eigenvalues`].
pub const POLYDISK_CAP: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum AnalyticModel {
    Disk { radius: f64 },
    Polydisk { radius: f64, dim: u32 },
}

/// Exact spectrum of the Gaussian-window operator on a centred (poly)disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectrum {
    pub model: AnalyticModel,
    pub values: Vec<f64>,
    /// Largest index per axis.
    pub k_max: usize,
}

impl AnalyticSpectrum {
    pub fn to_spectrum(&self) -> Spectrum {
        Spectrum::from_values(self.values.clone(), self.values.len()).expect("analytic eigenvalues lie in [0, 1]")
    }

    /// Same `k,lambda` CSV as [`Spectrum::write_csv`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.to_spectrum().write_csv(out)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive, got {r}")))
    }
}

/// `λ_k = P(k + 1, πR²)` for `k = 0..=k_max`.
pub fn disk_eigenvalues(radius: f64, k_max: usize) -> Result<AnalyticSpectrum> {
    check_radius(radius)?;
    let x = PI * radius * radius;
    let values = (0..=k_max)
        .map(|k| reg_lower_gamma(k as f64 + 1.0, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyticSpectrum {
        model: AnalyticModel::Disk { radius },
        values,
        k_max,
    })
}

/// All products `Π_j λ_{k_j}` over `k ∈ {0..=k_max}^d`, decreasing.
pub fn polydisk_eigenvalues(radius: f64, dim: u32, k_max: usize) -> Result<AnalyticSpectrum> {
    if dim == 0 {
        return Err(Error::Domain("polydisk dimension must be at least 1".into()));
    }
    let base = disk_eigenvalues(radius, k_max)?.values;
    let size = (k_max + 1)
        .checked_pow(dim)
        .filter(|&s| s <= POLYDISK_CAP)
        .ok_or_else(|| Error::MemoryBudget(format!("index box ({})^{dim} exceeds {POLYDISK_CAP}", k_max + 1)))?;
    let mut values = base.clone();
    for _ in 1..dim {
        values = values.iter().flat_map(|a| base.iter().map(move |b| a * b)).collect();
    }
    debug_assert_eq!(values.len(), size);
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(AnalyticSpectrum {
        model: AnalyticModel::Polydisk { radius, dim },
        values,
        k_max,
    })
}

/// `#{k : P(k + 1, πR²) > δ}` with the comparison done in log space, so any
/// `δ > 0` representable as a double is supported.
pub fn disk_count(radius: f64, delta: f64) -> Result<usize> {
    check_radius(radius)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (0, 1), got {delta}")));
    }
    let x = PI * radius * radius;
    let cut = delta.ln() + TIE_TOLERANCE.ln_1p();
    let mut k = 0u64;
    while ln_reg_lower_gamma_int(k, x)? > cut {
        k += 1;
    }
    Ok(k as usize)
}

/// Upper Gamma-tail envelope at one index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTail {
    pub k: usize,
    /// `e^{−(k+1−πR²)²/(2(k+1))}`.
    pub upper: f64,
    /// `ln λ_k`, exact down to far below the double range.
    pub ln_lambda: f64,
    pub holds_upper: bool,
}

/// Checks `λ_k ≤ e^{−(k+1−πR²)²/(2(k+1))}` (in log space) for `k + 1 ≥ πR²`.
pub fn gamma_tail_sandwich(radius: f64, k: usize) -> Result<GammaTail> {
    check_radius(radius)?;
    let x = PI * radius * radius;
    let a = k as f64 + 1.0;
    if a < x {
        return Err(Error::OutOfRange(format!("Gamma-tail envelope needs k + 1 ≥ πR², got {a} < {x}")));
    }
    let ln_upper = -(a - x).powi(2) / (2.0 * a);
    let ln_lambda = ln_reg_lower_gamma_int(k as u64, x)?;
    Ok(GammaTail {
        k,
        upper: ln_upper.exp(),
        ln_lambda,
        holds_upper: ln_lambda <= ln_upper + 1e-12,
    })
}

/// Lower envelope `λ_k ≥ a·e^{−b(k+1−πR²)²/(k+1)}` fitted over
/// `πR² ≤ k + 1 ≤ M·πR²`: `b` from a least-squares fit of `ln λ_k`, then
/// the largest `a` that certifies the inequality on the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTailLowerFit {
    pub a: f64,
    pub b: f64,
    pub points: usize,
}

pub fn fit_gamma_tail_lower(radius: f64, m_factor: f64) -> Result<GammaTailLowerFit> {
    check_radius(radius)?;
    let x = PI * radius * radius;
    let k0 = (x - 1.0).ceil().max(0.0) as usize;
    let k1 = (m_factor * x - 1.0).floor() as usize;
    if k1 < k0 + 1 {
        return Err(Error::EmptyInput("Gamma-tail window holds fewer than two indices".into()));
    }
    let pts: Vec<(f64, f64)> = (k0..=k1)
        .map(|k| {
            let a = k as f64 + 1.0;
            Ok(((a - x).powi(2) / a, ln_reg_lower_gamma_int(k as u64, x)?))
        })
        .collect::<Result<_>>()?;
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let b = -sxy / sxx;
    let ln_a = pts.iter().map(|p| p.1 + b * p.0).fold(f64::INFINITY, f64::min);
    Ok(GammaTailLowerFit {
        a: ln_a.exp(),
        b,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Counts exceed `πR²` by `c·√(log 1/δ)·R` for `C ≤ √(log 1/δ) ≤ R`.
    A,
    /// Counts exceed `πR²` by `c·log(1/δ)/log log(1/δ)` for small `R`.
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessPoint {
    pub radius: f64,
    pub delta: f64,
    pub count: usize,
    pub ratio: f64,
    /// `ratio − fitted_c`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessFit {
    pub regime: Regime,
    pub fitted_c: f64,
    pub valid: bool,
    pub delta_range: (f64, f64),
    pub radius_range: (f64, f64),
    pub residuals: Vec<SharpnessPoint>,
}

fn finish_fit(regime: Regime, mut pts: Vec<SharpnessPoint>) -> Result<SharpnessFit> {
    if pts.is_empty() {
        return Err(Error::EmptyInput(format!("no grid point lies in the regime {regime:?} window")));
    }
    let c = pts.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    for p in pts.iter_mut() {
        p.slack = p.ratio - c;
    }
    let span = |f: fn(&SharpnessPoint) -> f64| {
        pts.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    Ok(SharpnessFit {
        regime,
        fitted_c: c,
        valid: c > 0.0,
        delta_range: span(|p| p.delta),
        radius_range: span(|p| p.radius),
        residuals: pts,
    })
}

fn sweep<F>(radii: &[f64], deltas: &[f64], admit: F, ratio: fn(f64, f64, usize) -> f64) -> Result<Vec<SharpnessPoint>>
where
    F: Fn(f64, f64) -> bool + Sync,
{
    let grid: Vec<(f64, f64)> = radii
        .iter()
        .flat_map(|&r| deltas.iter().map(move |&d| (r, d)))
        .filter(|&(r, d)| r > 0.0 && d > 0.0 && d < 1.0 && admit(r, d))
        .collect();
    grid.par_iter()
        .map(|&(r, d)| {
            let count = disk_count(r, d)?;
            Ok(SharpnessPoint {
                radius: r,
                delta: d,
                count,
                ratio: ratio(r, d, count),
                slack: 0.0,
            })
        })
        .collect()
}

/// `min (count − πR²)/(√(log 1/δ)·R)` over `lower ≤ √(log 1/δ) ≤ R`.
pub fn fit_sharpness_a(radii: &[f64], deltas: &[f64], lower: f64) -> Result<SharpnessFit> {
    let pts = sweep(
        radii,
        deltas,
        |r, d| {
            let s = (1.0 / d).ln().sqrt();
            s >= lower && s <= r
        },
        |r, d, count| (count as f64 - PI * r * r) / ((1.0 / d).ln().sqrt() * r),
    )?;
    finish_fit(Regime::A, pts)
}

/// `min (count − πR²)·log log(1/δ)/log(1/δ)` over
/// `1 ≤ R ≤ (log(1/δ)/log log(1/δ))^{1/2}`.
pub fn fit_sharpness_b(radii: &[f64], deltas: &[f64]) -> Result<SharpnessFit> {
    let pts = sweep(
        radii,
        deltas,
        |r, d| {
            let l = (1.0 / d).ln();
            let ll = l.ln();
            ll > 0.0 && r >= 1.0 && r * r <= l / ll
        },
        |r, d, count| {
            let l = (1.0 / d).ln();
            (count as f64 - PI * r * r) * l.ln() / l
        },
    )?;
    finish_fit(Regime::B, pts)
}
