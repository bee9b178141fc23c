//! Windows `g`, their ambiguity function `V_g g`, and the window constants.
//!
//! Convention: `V_g f(x, ξ) = ∫ f(t) conj(g(t − x)) e^{−2πiξt} dt`, phase-space
//! points are `[x, ξ]`, and `|z|` is the Euclidean norm.

use std::f64::consts::{PI, SQRT_2};
use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_interval, polar_rule};
use crate::special::log_factorial;

/// Points per side of the local Lagrange interpolant for sampled windows.
const INTERP_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Gaussian,
    Hermite(usize),
    /// Samples `g(t0 + j·step)`; zero outside the sampled range.
    Sampled {
        samples: Vec<Complex64>,
        t0: f64,
        step: f64,
    },
}

/// An L²-normalized window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    kind: WindowKind,
    l2_norm: f64,
}

/// Values `h_0(t), …, h_n(t)` of the L²-normalized Hermite functions with
/// `h_0(t) = 2^{1/4} e^{−πt²}`.
pub fn hermite_functions(n: usize, t: f64, out: &mut Vec<f64>) {
    out.clear();
    let u = (2.0 * PI).sqrt() * t;
    let h0 = 2f64.powf(0.25) * (-PI * t * t).exp();
    out.push(h0);
    if n == 0 {
        return;
    }
    out.push(SQRT_2 * u * h0);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * u * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
}

fn hermite_value(m: usize, t: f64) -> f64 {
    let mut buf = Vec::with_capacity(m + 1);
    hermite_functions(m, t, &mut buf);
    buf[m]
}

/// Laguerre polynomial `L_m(x)`.
pub fn laguerre(m: usize, x: f64) -> f64 {
    let mut l0 = 1.0;
    if m == 0 {
        return l0;
    }
    let mut l1 = 1.0 - x;
    for k in 1..m {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

impl Window {
    pub fn gaussian() -> Self {
        Window {
            kind: WindowKind::Gaussian,
            l2_norm: 1.0,
        }
    }

    pub fn hermite(m: usize) -> Self {
        Window {
            kind: WindowKind::Hermite(m),
            l2_norm: 1.0,
        }
    }

    /// Builds a sampled window and rescales it to unit L² norm (trapezoid rule).
    pub fn sampled(samples: Vec<Complex64>, t0: f64, step: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("sampled window has no samples".into()));
        }
        if !(step > 0.0) || !step.is_finite() || !t0.is_finite() {
            return Err(Error::Domain(format!("sampled window needs a finite step > 0, got {step}")));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::Domain("sampled window has non-finite samples".into()));
        }
        let norm = (samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * step).sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("sampled window has zero norm".into()));
        }
        let samples: Vec<Complex64> = samples.into_iter().map(|s| s / norm).collect();
        let l2_norm = (samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * step).sqrt();
        Ok(Window {
            kind: WindowKind::Sampled { samples, t0, step },
            l2_norm,
        })
    }

    /// Samples a closed-form window on `[-half_width, half_width]`.
    pub fn sample_of(w: &Window, half_width: f64, step: f64) -> Result<Self> {
        let n = (2.0 * half_width / step).round() as usize + 1;
        let t0 = -step * ((n - 1) as f64) / 2.0;
        let samples = (0..n).map(|j| w.eval(t0 + step * j as f64)).collect();
        Window::sampled(samples, t0, step)
    }

    /// Reads a sampled window from CSV with header `t,value` or `t,re,im`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 {
            return Err(Error::Parse("window CSV needs columns t,value".into()));
        }
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("missing column {i}")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("window CSV: {e}")))
            };
            ts.push(parse(0)?);
            let im = if rec.len() > 2 { parse(2)? } else { 0.0 };
            vs.push(Complex64::new(parse(1)?, im));
        }
        if ts.len() < 2 {
            return Err(Error::EmptyInput("window CSV needs at least two rows".into()));
        }
        let step = ts[1] - ts[0];
        for p in ts.windows(2) {
            if ((p[1] - p[0]) - step).abs() > 1e-9 * step.abs().max(1.0) {
                return Err(Error::Parse("window CSV must use a uniform t step".into()));
            }
        }
        Window::sampled(vs, ts[0], step)
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    /// True when `|V_g g|` is radial and known in closed form.
    pub fn is_closed_form(&self) -> bool {
        !matches!(self.kind, WindowKind::Sampled { .. })
    }

    /// Hermite index when the window is a Hermite function (Gaussian = 0).
    pub fn hermite_index(&self) -> Option<usize> {
        match self.kind {
            WindowKind::Gaussian => Some(0),
            WindowKind::Hermite(m) => Some(m),
            WindowKind::Sampled { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            WindowKind::Gaussian => "gaussian".into(),
            WindowKind::Hermite(m) => format!("hermite({m})"),
            WindowKind::Sampled { samples, step, .. } => format!("sampled(n={}, step={step})", samples.len()),
        }
    }

    /// `g(t)`.
    pub fn eval(&self, t: f64) -> Complex64 {
        match &self.kind {
            WindowKind::Gaussian => Complex64::new(hermite_value(0, t), 0.0),
            WindowKind::Hermite(m) => Complex64::new(hermite_value(*m, t), 0.0),
            WindowKind::Sampled { samples, t0, step } => lagrange(samples, *t0, *step, t),
        }
    }

    /// Interval outside which `g` is negligible (below ~1e−17 for closed forms).
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            WindowKind::Sampled { samples, t0, step } => (*t0, t0 + step * (samples.len() - 1) as f64),
            _ => {
                let m = self.hermite_index().unwrap_or(0) as f64;
                let l = ((2.0 * m + 1.0).sqrt() + 8.0) / (2.0 * PI).sqrt();
                (-l, l)
            }
        }
    }

    /// Frequency half-width beyond which `ĝ` is negligible.
    pub fn bandwidth(&self) -> f64 {
        match &self.kind {
            WindowKind::Sampled { step, .. } => 0.5 / step,
            _ => self.support().1,
        }
    }

    /// Largest `|ξ|` at which the sampled-window ambiguity is trusted.
    pub fn nyquist_limit(&self) -> f64 {
        match &self.kind {
            WindowKind::Sampled { step, .. } => 0.25 / step,
            _ => f64::INFINITY,
        }
    }

    /// Radius beyond which `|V_g g|²` is negligible (closed forms) or not resolved (sampled).
    pub fn ambiguity_radius(&self) -> f64 {
        match &self.kind {
            WindowKind::Sampled { .. } => {
                let (a, b) = self.support();
                (b - a).min(self.nyquist_limit())
            }
            _ => {
                let m = self.hermite_index().unwrap_or(0) as f64;
                ((4.0 * m + 2.0) / PI).sqrt() + 6.0
            }
        }
    }
}

fn lagrange(samples: &[Complex64], t0: f64, step: f64, t: f64) -> Complex64 {
    let u = (t - t0) / step;
    let n = samples.len() as isize;
    if u < -(INTERP_POINTS as f64) || u > (n + INTERP_POINTS as isize) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let j = u.floor() as isize;
    let frac = u - j as f64;
    let sample = |i: isize| {
        if i < 0 || i >= n {
            Complex64::new(0.0, 0.0)
        } else {
            samples[i as usize]
        }
    };
    if frac == 0.0 {
        return sample(j);
    }
    let half = (INTERP_POINTS / 2) as isize;
    // barycentric weights for equispaced nodes: (−1)^k C(9, k)
    let mut binom = 1.0;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for k in 0..INTERP_POINTS {
        if k > 0 {
            binom *= (INTERP_POINTS - k) as f64 / k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let node = (k as isize - half + 1) as f64;
        let wk = sign * binom / (frac - node);
        num += sample(j + k as isize - half + 1) * wk;
        den += wk;
    }
    num / den
}

/// `V_g g(z)` at `z = [x, ξ]`.
pub fn ambiguity(w: &Window, z: [f64; 2]) -> Result<Complex64> {
    let [x, xi] = z;
    match &w.kind {
        WindowKind::Gaussian | WindowKind::Hermite(_) => {
            let m = w.hermite_index().unwrap_or(0);
            let r2 = x * x + xi * xi;
            let phase = Complex64::from_polar(1.0, -PI * x * xi);
            Ok(phase * (laguerre(m, PI * r2) * (-PI * r2 / 2.0).exp()))
        }
        WindowKind::Sampled { samples, t0, step } => {
            if xi.abs() > w.nyquist_limit() {
                return Err(Error::Underresolved(format!(
                    "|xi| = {} exceeds the sampled window's limit 1/(4·step) = {}",
                    xi.abs(),
                    w.nyquist_limit()
                )));
            }
            Ok(sampled_ambiguity(samples, *t0, *step, x, xi))
        }
    }
}

fn sampled_ambiguity(samples: &[Complex64], t0: f64, step: f64, x: f64, xi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let shift = x / step;
    let integer_shift = (shift - shift.round()).abs() < 1e-12;
    for (j, g) in samples.iter().enumerate() {
        if g.norm_sqr() == 0.0 {
            continue;
        }
        let t = t0 + step * j as f64;
        let gs = if integer_shift {
            let i = j as isize - shift.round() as isize;
            if i < 0 || i as usize >= samples.len() {
                continue;
            }
            samples[i as usize]
        } else {
            lagrange(samples, t0, step, t - x)
        };
        acc += g * gs.conj() * Complex64::from_polar(1.0, -2.0 * PI * xi * t);
    }
    acc * step
}

/// `V_g g(z)` by trapezoid quadrature of the defining integral with step `h`.
///
/// Independent of the closed forms; used to cross-check them.
pub fn ambiguity_by_quadrature(w: &Window, z: [f64; 2], h: f64) -> Complex64 {
    let [x, xi] = z;
    let (a, b) = w.support();
    let lo = a.max(a + x);
    let hi = b.min(b + x);
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let n = ((hi - lo) / h).ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let t = lo + (hi - lo) * j as f64 / n as f64;
        let wt = if j == 0 || j == n { 0.5 } else { 1.0 };
        acc += w.eval(t) * w.eval(t - x).conj() * Complex64::from_polar(wt, -2.0 * PI * xi * t);
    }
    acc * ((hi - lo) / n as f64)
}

/// `V_g h_n(z)` for `n = 0..=n_max`, by trapezoid quadrature in `t`.
///
/// `hermite_buf` and `out` are scratch buffers reused across calls.
pub fn stft_of_hermite(w: &Window, n_max: usize, z: [f64; 2], out: &mut Vec<Complex64>, hermite_buf: &mut Vec<f64>) {
    let [x, xi] = z;
    out.clear();
    out.resize(n_max + 1, Complex64::new(0.0, 0.0));
    let (a, b) = w.support();
    let hermite_extent = ((2.0 * n_max as f64 + 1.0).sqrt() + 8.0) / (2.0 * PI).sqrt();
    let lo = (a + x).max(-hermite_extent);
    let hi = (b + x).min(hermite_extent);
    if hi <= lo {
        return;
    }
    let band = xi.abs() + hermite_extent + w.bandwidth() + 6.0;
    let n = ((hi - lo) * band).ceil().max(8.0) as usize;
    let h = (hi - lo) / n as f64;
    for j in 0..=n {
        let t = lo + h * j as f64;
        let wt = if j == 0 || j == n { 0.5 * h } else { h };
        let kernel = w.eval(t - x).conj() * Complex64::from_polar(wt, -2.0 * PI * xi * t);
        if kernel.norm_sqr() == 0.0 {
            continue;
        }
        hermite_functions(n_max, t, hermite_buf);
        for (o, hv) in out.iter_mut().zip(hermite_buf.iter()) {
            *o += kernel * *hv;
        }
    }
}

/// Phase-space sampling of a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TableGrid {
    /// Points `(r_i, 0)` with `r_i = i·r_max/(n−1)`.
    Radial { r_max: f64, n: usize },
    /// Square grid `[-half, half]²` with `n` points per axis, `x` major.
    Cartesian { half: f64, n: usize },
}

/// Samples of `V_g g` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityTable {
    pub grid: TableGrid,
    pub values: Vec<Complex64>,
    pub closed_form: bool,
}

impl AmbiguityTable {
    /// Radial table for a closed-form window.
    pub fn radial(w: &Window, r_max: f64, n: usize) -> Result<Self> {
        if !w.is_closed_form() {
            return Err(Error::UnsupportedWindow("radial tables need a closed-form window".into()));
        }
        if n < 2 || !(r_max > 0.0) {
            return Err(Error::Domain("radial table needs n ≥ 2 and r_max > 0".into()));
        }
        let values = (0..n)
            .map(|i| ambiguity(w, [r_max * i as f64 / (n - 1) as f64, 0.0]))
            .collect::<Result<_>>()?;
        Ok(AmbiguityTable {
            grid: TableGrid::Radial { r_max, n },
            values,
            closed_form: true,
        })
    }

    /// Cartesian table on `[-half, half]²`. Sampled windows are evaluated by
    /// one product per `x` row followed by a direct DFT over the `ξ` values.
    pub fn cartesian(w: &Window, half: f64, n: usize) -> Result<Self> {
        if n < 2 || !(half > 0.0) {
            return Err(Error::Domain("cartesian table needs n ≥ 2 and half > 0".into()));
        }
        let coord = |i: usize| -half + 2.0 * half * i as f64 / (n - 1) as f64;
        let mut values = Vec::with_capacity(n * n);
        match &w.kind {
            WindowKind::Sampled { samples, t0, step } => {
                if half > w.nyquist_limit() {
                    return Err(Error::Underresolved(format!(
                        "table extent {half} exceeds the sampled window's limit {}",
                        w.nyquist_limit()
                    )));
                }
                for i in 0..n {
                    let x = coord(i);
                    let prod: Vec<(f64, Complex64)> = samples
                        .iter()
                        .enumerate()
                        .map(|(j, g)| {
                            let t = t0 + step * j as f64;
                            (t, g * lagrange(samples, *t0, *step, t - x).conj())
                        })
                        .filter(|(_, p)| p.norm_sqr() > 0.0)
                        .collect();
                    for k in 0..n {
                        let xi = coord(k);
                        let v: Complex64 = prod
                            .iter()
                            .map(|(t, p)| p * Complex64::from_polar(1.0, -2.0 * PI * xi * t))
                            .sum();
                        values.push(v * *step);
                    }
                }
            }
            _ => {
                for i in 0..n {
                    for k in 0..n {
                        values.push(ambiguity(w, [coord(i), coord(k)])?);
                    }
                }
            }
        }
        Ok(AmbiguityTable {
            grid: TableGrid::Cartesian { half, n },
            values,
            closed_form: w.is_closed_form(),
        })
    }

    /// Default table for `gs_fit`: fine radial grid for closed forms, Cartesian otherwise.
    pub fn default_for(w: &Window) -> Result<Self> {
        if w.is_closed_form() {
            let r_max = w.ambiguity_radius() + 2.0;
            let n = (r_max / 1e-3).ceil() as usize + 1;
            AmbiguityTable::radial(w, r_max, n)
        } else {
            let half = w.ambiguity_radius().min(w.nyquist_limit());
            AmbiguityTable::cartesian(w, half, 161)
        }
    }

    /// Phase-space point of sample `i`.
    pub fn point(&self, i: usize) -> [f64; 2] {
        match self.grid {
            TableGrid::Radial { r_max, n } => [r_max * i as f64 / (n - 1) as f64, 0.0],
            TableGrid::Cartesian { half, n } => {
                let c = |k: usize| -half + 2.0 * half * k as f64 / (n - 1) as f64;
                [c(i / n), c(i % n)]
            }
        }
    }

    /// Largest magnitude on the outer edge of the grid.
    pub fn edge_magnitude(&self) -> f64 {
        match self.grid {
            TableGrid::Radial { n, .. } => self.values[n - 1].norm(),
            TableGrid::Cartesian { n, .. } => (0..self.values.len())
                .filter(|&i| {
                    let (a, b) = (i / n, i % n);
                    a == 0 || b == 0 || a == n - 1 || b == n - 1
                })
                .map(|i| self.values[i].norm())
                .fold(0.0, f64::max),
        }
    }
}

/// Weighted integral `∫_{R²} weight(|z|) |V_g g(z)|² dz`.
///
/// Radial windows use a 1-D Gauss–Legendre rule in `r`; sampled windows a
/// polar rule on the disk where the ambiguity is resolved. Fails with a
/// divergence error when the outermost annulus still carries more than
/// `tail_tol` of mass.
pub fn weighted_integral<F: Fn(f64) -> f64>(w: &Window, weight: F, tail_tol: f64) -> Result<f64> {
    let r_max = w.ambiguity_radius();
    let panel = 0.25;
    let panels = (r_max / panel).ceil() as usize;
    let mut total = 0.0;
    let mut last = 0.0;
    for p in 0..panels {
        let a = r_max * p as f64 / panels as f64;
        let b = r_max * (p + 1) as f64 / panels as f64;
        let piece = if w.is_closed_form() {
            let (rs, ws) = gauss_legendre_interval(16, a, b);
            rs.iter()
                .zip(&ws)
                .map(|(r, wr)| {
                    let v = ambiguity(w, [*r, 0.0]).map(|v| v.norm_sqr()).unwrap_or(0.0);
                    wr * 2.0 * PI * r * weight(*r) * v
                })
                .sum::<f64>()
        } else {
            let rule = polar_rule([0.0, 0.0], (a, b), (0.0, 2.0 * PI), 8, 1, 96);
            let mut s = 0.0;
            for (pt, wt) in rule.points.iter().zip(&rule.weights) {
                let r = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
                s += wt * weight(r) * ambiguity(w, *pt)?.norm_sqr();
            }
            s
        };
        if !piece.is_finite() {
            return Err(Error::Divergence("weighted ambiguity integral is not finite".into()));
        }
        total += piece;
        last = piece;
    }
    if last.abs() > tail_tol {
        return Err(Error::Divergence(format!(
            "outermost annulus at r = {r_max:.3} still carries {last:e} (> {tail_tol:e})"
        )));
    }
    Ok(total)
}

/// `C_g(s) = ∫ (1+|z|)^s |V_g g(z)|² dz`.
pub fn moment_constant(w: &Window, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("moment order must be ≥ 0, got {s}")));
    }
    weighted_integral(w, |r| (1.0 + r).powf(s), 1e-8)
}

/// `K_g = 2 ∫ |z| |V_g g(z)|² dz`.
pub fn k_g_constant(w: &Window) -> Result<f64> {
    weighted_integral(w, |r| 2.0 * r, 1e-8)
}

/// Outcome of a Gelfand–Shilov fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsFit {
    pub c: f64,
    pub a: f64,
    pub beta: f64,
    pub n_max: usize,
    /// `C·A^5`, the quantity minimized over the `A` grid.
    pub objective: f64,
    /// `n` at which the bound is tight for the chosen `A`.
    pub binding_n: usize,
}

/// Options of [`gs_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsFitOptions {
    pub a_min: f64,
    pub a_max: f64,
    pub a_points: usize,
    pub c_cap: f64,
    /// Values below this are treated as noise for tables without a closed form.
    pub noise_floor: f64,
}

impl Default for GsFitOptions {
    fn default() -> Self {
        GsFitOptions {
            a_min: 1.0,
            a_max: 16.0,
            a_points: 32,
            c_cap: 1e12,
            noise_floor: 1e-14,
        }
    }
}

/// Fits `(C, A)` in `|V_g g(z)| ≤ C A^n n!^β (1+|z|)^{−n}` on the table for
/// all `n ≤ n_max`.
///
/// `S(n) = max_z ln|V_g g(z)| + n ln(1+|z|)` is computed on the grid. The fit is
/// certified only when `T(n) = S(n) − β ln n!` is concave over the last third of
/// `n` and `T(n) − n ln A` has stopped increasing at `n_max`, so the inequality
/// extends beyond `n_max`. Among certified `A` on a log grid the pair with the
/// smallest `C·A^5` is returned.
pub fn gs_fit(w: &Window, n_max: usize, table: &AmbiguityTable, beta: f64, opts: GsFitOptions) -> Result<GsFit> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if n_max < 6 {
        return Err(Error::Domain("gs_fit needs n_max ≥ 6".into()));
    }
    let edge = table.edge_magnitude();
    if edge > 1e-14 {
        return Err(Error::Underresolved(format!(
            "ambiguity table edge value {edge:e} is above 1e-14"
        )));
    }
    if table.closed_form && !w.is_closed_form() {
        return Err(Error::UnsupportedWindow("closed-form table given for a sampled window".into()));
    }
    let floor = if table.closed_form { 0.0 } else { opts.noise_floor };
    let pts: Vec<(f64, f64)> = table
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > floor)
        .map(|(i, v)| {
            let p = table.point(i);
            ((p[0] * p[0] + p[1] * p[1]).sqrt().ln_1p(), v.norm().ln())
        })
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyInput("ambiguity table has no usable values".into()));
    }
    let t: Vec<f64> = (0..=n_max)
        .map(|n| {
            let s = pts
                .iter()
                .map(|(l1r, lv)| lv + n as f64 * l1r)
                .fold(f64::NEG_INFINITY, f64::max);
            s - beta * log_factorial(n as u64)
        })
        .collect();

    let start = (2 * n_max) / 3;
    let scale = t.iter().map(|v| v.abs()).fold(1.0, f64::max);
    for n in start.max(1)..n_max {
        let d2 = t[n + 1] - 2.0 * t[n] + t[n - 1];
        if d2 > 1e-9 * scale {
            return Err(Error::FitFailure(format!(
                "ln C grows super-linearly in n (second difference {d2:e} at n = {n}); beta = {beta} is too small for this window"
            )));
        }
    }
    let tail_slope = t[n_max] - t[n_max - 1];

    let mut best: Option<GsFit> = None;
    for i in 0..opts.a_points {
        let frac = if opts.a_points == 1 { 0.0 } else { i as f64 / (opts.a_points - 1) as f64 };
        let a = opts.a_min * (opts.a_max / opts.a_min).powf(frac);
        let ln_a = a.ln();
        if tail_slope > ln_a {
            continue;
        }
        let (binding_n, ln_c) = t
            .iter()
            .enumerate()
            .map(|(n, v)| (n, v - n as f64 * ln_a))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let c = ln_c.exp();
        if !(c <= opts.c_cap) {
            continue;
        }
        let objective = c * a.powi(5);
        if best.as_ref().map_or(true, |b| objective < b.objective) {
            best = Some(GsFit {
                c,
                a,
                beta,
                n_max,
                objective,
                binding_n,
            });
        }
    }
    best.ok_or_else(|| {
        Error::FitFailure(format!(
            "no A in [{}, {}] certifies the bound (tail slope {tail_slope:.4} > ln A_max)",
            opts.a_min, opts.a_max
        ))
    })
}

/// Constants of a window that enter the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConstants {
    pub gs_c: f64,
    pub gs_a: f64,
    pub gs_beta: f64,
    pub moment_s: f64,
    pub moment_cg: f64,
    pub k_g: f64,
}

impl WindowConstants {
    /// Validates user-declared constants.
    pub fn new(gs_c: f64, gs_a: f64, gs_beta: f64, moment_s: f64, moment_cg: f64, k_g: f64) -> Result<Self> {
        let all = [gs_c, gs_a, gs_beta, moment_s, moment_cg, k_g];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Domain("window constants must be positive and finite".into()));
        }
        if gs_beta < 0.5 {
            return Err(Error::Hypothesis(format!("gs_beta = {gs_beta} < 1/2")));
        }
        if moment_s < 1.0 {
            return Err(Error::Hypothesis(format!("moment_s = {moment_s} < 1")));
        }
        Ok(WindowConstants {
            gs_c,
            gs_a,
            gs_beta,
            moment_s,
            moment_cg,
            k_g,
        })
    }

    /// Computes all constants of `w` for the given `β` and moment order `s`.
    pub fn compute(w: &Window, beta: f64, s: f64, n_max: usize) -> Result<Self> {
        let table = AmbiguityTable::default_for(w)?;
        let fit = gs_fit(w, n_max, &table, beta, GsFitOptions::default())?;
        let moment_cg = moment_constant(w, s)?;
        let k_g = k_g_constant(w)?;
        WindowConstants::new(fit.c, fit.a, beta, s, moment_cg, k_g)
    }

    /// `C_g` of the simple moment bound, `∫|z||V_g g|² = K_g / 2`.
    pub fn simple_cg(&self) -> f64 {
        self.k_g / 2.0
    }
}
