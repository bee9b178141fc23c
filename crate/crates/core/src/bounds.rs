//! Right-hand sides of the spectral deviation bounds, eigenvalue envelopes
//! and empirical fits of the dimensional constants.
//!
//! Eigenvalue indices `k` in this module are 1-based: `λ_k` is the `k`-th
//! largest eigenvalue, i.e. `values[k − 1]`.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, GeometrySummary};
use crate::operator::{hankel_schatten, Spectrum};
use crate::special::erfc;
use crate::stats::{counting, tau};
use crate::window::{weighted_integral, Window, WindowConstants};

/// Which expression is used for `C′_g` in the Gelfand–Shilov bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GsConstant {
    /// `C_g^{1/2}·A⁵·C_d^β`.
    #[default]
    Theorem,
    /// `C_d·C_g^{1/2}·A⁵·e^{3β}·5^{5β}·2^{3β}·(log 2)^{−2β}`.
    Explicit,
    /// `C_d·A²·e^β·2^{2β}`, valid for large `τ` when `A ≥ 1`.
    LargeTau,
}

impl GsConstant {
    pub fn prefactor(self, consts: &WindowConstants, c_d: f64) -> f64 {
        let (c, a, b) = (consts.gs_c, consts.gs_a, consts.gs_beta);
        match self {
            GsConstant::Theorem => c.sqrt() * a.powi(5) * c_d.powf(b),
            GsConstant::Explicit => {
                c_d * c.sqrt() * a.powi(5) * (3.0 * b).exp() * 5f64.powf(5.0 * b) * 2f64.powf(3.0 * b) * LN_2.powf(-2.0 * b)
            }
            GsConstant::LargeTau => c_d * a * a * b.exp() * 2f64.powf(2.0 * b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundId {
    Simple,
    Gs,
    Poly,
    Hankel,
    Lemma41,
}

fn check_delta(delta: f64) -> Result<f64> {
    tau(delta)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `C_g·H¹(∂Ω)·τ` with `C_g = ∫|z||V_g g|²`.
pub fn bound_simple(cg: f64, perimeter: f64, delta: f64) -> Result<f64> {
    Ok(cg * perimeter * check_delta(delta)?)
}

/// Gelfand–Shilov bound
/// `C′_g·H¹(∂Ω)·(log τ)^β·(1 + (log τ)^β/η)·log(log τ + 1)/κ`.
pub fn bound_gs(consts: &WindowConstants, geom: &GeometrySummary, delta: f64, c_d: f64, variant: GsConstant) -> Result<f64> {
    let t = check_delta(delta)?;
    let b = consts.gs_beta;
    if b < 0.5 {
        return Err(Error::Hypothesis(format!("β = {b} < 1/2")));
    }
    check_positive("η", geom.eta)?;
    check_positive("κ", geom.kappa)?;
    let l = t.ln();
    let lb = l.powf(b);
    Ok(variant.prefactor(consts, c_d) * geom.perimeter * lb * (1.0 + lb / geom.eta) * (l + 1.0).ln() / geom.kappa)
}

/// Polynomial-decay bound
/// `C_d·C_g^{2/(s+1)}·H¹(∂Ω)·τ^{2/(s+1)}·(log(C_g τ)/(κη))^{(s−1)/(s+1)}`
/// with `C_g = ∫(1+|z|)^s|V_g g|²` taken from `consts`.
pub fn bound_poly(consts: &WindowConstants, geom: &GeometrySummary, delta: f64, s: f64, c_d: f64) -> Result<f64> {
    let t = check_delta(delta)?;
    if s < 1.0 {
        return Err(Error::Hypothesis(format!("s = {s} < 1")));
    }
    if (s - consts.moment_s).abs() > 1e-12 * s {
        return Err(Error::Domain(format!(
            "moment constant was computed for s = {}, not {s}",
            consts.moment_s
        )));
    }
    if !(geom.eta > 0.0 && geom.eta <= 1.0) {
        return Err(Error::Hypothesis(format!("η = {} outside (0, 1]", geom.eta)));
    }
    check_positive("κ", geom.kappa)?;
    let cg = consts.moment_cg;
    let e = 2.0 / (s + 1.0);
    let f = (s - 1.0) / (s + 1.0);
    Ok(c_d * cg.powf(e) * geom.perimeter * t.powf(e) * ((cg * t).ln() / (geom.kappa * geom.eta)).powf(f))
}

/// `‖(1+|z|/η)^{(2−p)/2p}(1+|z|)^{(1+α)(2−p)/2p+1/2} V_g g‖₂^p`.
pub fn hankel_weight_norm(w: &Window, p: f64, alpha: f64, eta: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::Domain(format!("p must lie in (0, 2], got {p}")));
    }
    check_positive("α", alpha)?;
    check_positive("η", eta)?;
    let a = (2.0 - p) / (2.0 * p);
    let b = (1.0 + alpha) * a + 0.5;
    let sq = weighted_integral(w, |r| (1.0 + r / eta).powf(2.0 * a) * (1.0 + r).powf(2.0 * b), 1e-10)?;
    Ok(sq.powf(p / 2.0))
}

/// Schatten bound `C_d·H¹(∂Ω)·‖…V_g g‖₂^p/(κα)^{1−p/2}`.
pub fn bound_hankel(w: &Window, geom: &GeometrySummary, p: f64, alpha: f64, c_d: f64) -> Result<f64> {
    check_positive("κ", geom.kappa)?;
    let norm = hankel_weight_norm(w, p, alpha, geom.eta)?;
    Ok(c_d * geom.perimeter * norm / (geom.kappa * alpha).powf(1.0 - p / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma41Check {
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// `|#{λ > δ} − |Ω|| ≤ (δ(1−δ))^{−p/2}·Σ(λ − λ²)^{p/2}`, with slack equal to the
/// trace defect `|Ω| − Σλ` of the (possibly truncated) spectrum.
pub fn verify_lemma41(spec: &Spectrum, dom: &Domain, delta: f64, p: f64) -> Result<Lemma41Check> {
    let lhs = (counting(spec, delta)? as f64 - dom.measure()).abs();
    let rhs = (delta * (1.0 - delta)).powf(-p / 2.0) * hankel_schatten(spec, p)?;
    let tolerance = (dom.measure() - spec.trace()).max(0.0) + 1e-9;
    Ok(Lemma41Check {
        lhs,
        rhs,
        tolerance,
        holds: lhs <= rhs + tolerance,
    })
}

/// `(⌈A_Ω + K_g·H¹⌉, ⌊A_Ω − K_g·H¹⌋)`.
pub fn plunge_indices(k_g: f64, perimeter: f64, a_omega: u64) -> Result<(i64, i64)> {
    if !(k_g >= 0.0 && perimeter >= 0.0) {
        return Err(Error::Domain("K_g and perimeter must be nonnegative".into()));
    }
    let a = a_omega as f64;
    let w = k_g * perimeter;
    Ok(((a + w).ceil() as i64, (a - w).floor() as i64))
}

/// Outcome of the plunge-index check on a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlungeCheck {
    pub upper_start: i64,
    pub lower_end: i64,
    pub upper_checked: usize,
    pub lower_checked: usize,
    /// 1-based indices violating the respective branch.
    pub upper_failures: Vec<usize>,
    pub lower_failures: Vec<usize>,
}

/// Checks `λ_k ≤ 1/2` for `k ≥ upper_start` and `λ_k ≥ 1/2` for
/// `1 ≤ k ≤ lower_end` over the available eigenvalues.
pub fn check_plunge(values: &[f64], k_g: f64, perimeter: f64, a_omega: u64) -> Result<PlungeCheck> {
    let (up, low) = plunge_indices(k_g, perimeter, a_omega)?;
    let n = values.len();
    let mut c = PlungeCheck {
        upper_start: up,
        lower_end: low,
        upper_checked: 0,
        lower_checked: 0,
        upper_failures: Vec::new(),
        lower_failures: Vec::new(),
    };
    for k in (up.max(1) as usize)..=n {
        c.upper_checked += 1;
        if values[k - 1] > 0.5 {
            c.upper_failures.push(k);
        }
    }
    for k in 1..=(low.max(0) as usize).min(n) {
        c.lower_checked += 1;
        if values[k - 1] < 0.5 {
            c.lower_failures.push(k);
        }
    }
    Ok(c)
}

fn h_of(k: u64, a_omega: u64, gamma: f64) -> Result<f64> {
    check_positive("γ", gamma)?;
    let h = (k as f64 - a_omega as f64).abs() / gamma;
    if h < 1.0 {
        return Err(Error::OutOfRange(format!("h = {h} < 1 for k = {k}")));
    }
    Ok(h)
}

/// `exp(−(h/(e(1+log h)))^{1/(2β)})` with `h = |k − A_Ω|/γ`.
pub fn envelope_gs(k: u64, a_omega: u64, gamma: f64, beta: f64) -> Result<f64> {
    let h = h_of(k, a_omega, gamma)?;
    Ok(envelope_gs_h(h, beta))
}

fn envelope_gs_h(h: f64, beta: f64) -> f64 {
    (-(h / (E * (1.0 + h.ln()))).powf(1.0 / (2.0 * beta))).exp()
}

/// `e^{((s+1)/2)²}·h^{−(s+1)/2}·(1 + log(C_g h))^{(s−1)/2}` with `h = |k − A_Ω|/γ`.
pub fn envelope_poly(k: u64, a_omega: u64, gamma: f64, s: f64, cg: f64) -> Result<f64> {
    if s < 1.0 {
        return Err(Error::Hypothesis(format!("s = {s} < 1")));
    }
    let h = h_of(k, a_omega, gamma)?;
    Ok(envelope_poly_h(h, s, cg))
}

fn envelope_poly_h(h: f64, s: f64, cg: f64) -> f64 {
    let q = (s + 1.0) / 2.0;
    (q * q).exp() * h.powf(-q) * (1.0 + (cg * h).ln()).powf((s - 1.0) / 2.0)
}

/// Eigenvalue envelope family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Envelope {
    Gs { beta: f64 },
    Poly { s: f64, cg: f64 },
}

impl Envelope {
    pub fn at(self, h: f64) -> f64 {
        match self {
            Envelope::Gs { beta } => envelope_gs_h(h, beta),
            Envelope::Poly { s, cg } => envelope_poly_h(h, s, cg),
        }
    }
}

/// Both envelope branches checked on a spectrum at one `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub gamma: f64,
    pub checked: usize,
    /// 1-based indices violating `λ_k ≤ env` (above `A_Ω`) or
    /// `λ_k ≥ 1 − env` (below `A_Ω`).
    pub failures: Vec<usize>,
}

/// Checks both branches for `1 ≤ k ≤ min(k_max, len)` with `h ≥ 1`.
pub fn check_envelope(values: &[f64], a_omega: u64, gamma: f64, env: Envelope, k_max: usize) -> Result<EnvelopeCheck> {
    check_positive("γ", gamma)?;
    let a = a_omega as f64;
    let mut out = EnvelopeCheck {
        gamma,
        checked: 0,
        failures: Vec::new(),
    };
    for k in 1..=k_max.min(values.len()) {
        let kf = k as f64;
        let h = (kf - a).abs() / gamma;
        if h < 1.0 {
            continue;
        }
        out.checked += 1;
        let lam = values[k - 1];
        let ok = if kf > a { lam <= env.at(h) } else { lam >= 1.0 - env.at(h) };
        if !ok {
            out.failures.push(k);
        }
    }
    Ok(out)
}

/// Smallest `γ` (to relative precision 1e−10) at which both branches hold.
///
/// Each index imposes a lower bound on `γ` because the envelopes decrease in
/// `h`, so the feasible set is an interval `[γ*, ∞)` and bisection applies.
pub fn fit_gamma(values: &[f64], a_omega: u64, env: Envelope, k_max: usize) -> Result<f64> {
    let feasible = |g: f64| check_envelope(values, a_omega, g, env, k_max).map(|c| c.failures.is_empty());
    let mut hi = (k_max.max(a_omega as usize) + 1) as f64;
    if !feasible(hi)? {
        return Err(Error::FitFailure("envelope fails even when every index is excluded".into()));
    }
    let mut lo = 1e-6;
    if feasible(lo)? {
        return Ok(lo);
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `γ = 2C′_g·H¹(∂Ω)/(κη)` of the Gelfand–Shilov envelope.
pub fn gamma_gs(consts: &WindowConstants, geom: &GeometrySummary, c_d: f64, variant: GsConstant) -> f64 {
    2.0 * variant.prefactor(consts, c_d) * geom.perimeter / (geom.kappa * geom.eta)
}

/// `γ = C′_g·(κη)^{−(s−1)/(s+1)}·H¹(∂Ω)` of the polynomial envelope.
pub fn gamma_poly(consts: &WindowConstants, geom: &GeometrySummary, c_d: f64) -> f64 {
    let s = consts.moment_s;
    let cp = c_d * consts.moment_cg.powf(2.0 / (s + 1.0));
    cp * (geom.kappa * geom.eta).powf(-(s - 1.0) / (s + 1.0)) * geom.perimeter
}

/// Offset `λ` with `∫_{z·n > λ} Wg = δ` for the Gaussian Wigner distribution,
/// i.e. `½ erfc(√(2π) λ) = δ`.
pub fn half_plane_offset(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("δ must lie in (0, 1/2), got {delta}")));
    }
    let mass = |l: f64| 0.5 * erfc((2.0 * PI).sqrt() * l);
    let mut hi = 1.0;
    while mass(hi) > delta {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    // bisection to full precision; mass is strictly decreasing
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mass(mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-term coefficient `A₁ = C_d·H¹(∂Ω)·λ(δ)` for the Gaussian window.
pub fn a1_term(w: &Window, dom: &Domain, delta: f64, c_d: f64) -> Result<f64> {
    if w.hermite_index() != Some(0) {
        return Err(Error::UnsupportedWindow(format!(
            "the two-term coefficient needs the Gaussian window, got {}",
            w.label()
        )));
    }
    Ok(c_d * dom.perimeter() * half_plane_offset(delta)?)
}

/// Parameters of one bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub delta: f64,
    pub p: f64,
    pub alpha: f64,
    pub s: f64,
    pub c_d: f64,
    #[serde(default)]
    pub gs_constant: GsConstant,
}

/// Every right-hand side at one `(Ω, δ, p)` against the measured deviation.
/// Inadmissible bounds carry `NaN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub domain: String,
    pub measure: f64,
    pub perimeter: f64,
    pub kappa: f64,
    pub eta: f64,
    pub delta: f64,
    pub tau: f64,
    pub p: f64,
    pub alpha: f64,
    pub s: f64,
    pub c_d: f64,
    pub gs_constant: GsConstant,
    pub gs_c: f64,
    pub gs_a: f64,
    pub gs_beta: f64,
    pub moment_cg: f64,
    pub k_g: f64,
    pub count: usize,
    pub deviation_lhs: f64,
    /// `Σ(λ − λ²)^{p/2}`, the left-hand side of the Hankel bound.
    pub hankel_lhs: f64,
    pub rhs_simple: f64,
    pub rhs_gs: f64,
    pub rhs_poly: f64,
    pub rhs_hankel: f64,
    pub rhs_lemma41: f64,
    pub lemma41_tolerance: f64,
    pub admissible_simple: bool,
    pub admissible_gs: bool,
    pub admissible_poly: bool,
    pub admissible_hankel: bool,
    pub admissible_lemma41: bool,
}

fn admissible(r: Result<f64>) -> Result<(f64, bool)> {
    match r {
        Ok(v) => Ok((v, true)),
        Err(e) if e.is_hypothesis() => Ok((f64::NAN, false)),
        Err(e) => Err(e),
    }
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "domain,measure,perimeter,kappa,eta,delta,tau,p,alpha,s,c_d,gs_constant,\
gs_c,gs_a,gs_beta,moment_cg,k_g,count,deviation_lhs,hankel_lhs,rhs_simple,rhs_gs,rhs_poly,rhs_hankel,rhs_lemma41,\
lemma41_tolerance,admissible_simple,admissible_gs,admissible_poly,admissible_hankel,admissible_lemma41";

    pub fn compute(
        w: &Window,
        consts: &WindowConstants,
        geom: &GeometrySummary,
        dom: &Domain,
        spec: &Spectrum,
        params: &BoundParams,
    ) -> Result<Self> {
        let delta = params.delta;
        let t = tau(delta)?;
        let count = counting(spec, delta)?;
        let (rhs_simple, admissible_simple) = admissible(bound_simple(consts.simple_cg(), geom.perimeter, delta))?;
        let (rhs_gs, admissible_gs) = admissible(bound_gs(consts, geom, delta, params.c_d, params.gs_constant))?;
        let (rhs_poly, admissible_poly) = admissible(bound_poly(consts, geom, delta, params.s, params.c_d))?;
        let (rhs_hankel, admissible_hankel) = admissible(bound_hankel(w, geom, params.p, params.alpha, params.c_d))?;
        let l41 = verify_lemma41(spec, dom, delta, params.p)?;
        Ok(BoundReport {
            domain: dom.label(),
            measure: dom.measure(),
            perimeter: geom.perimeter,
            kappa: geom.kappa,
            eta: geom.eta,
            delta,
            tau: t,
            p: params.p,
            alpha: params.alpha,
            s: params.s,
            c_d: params.c_d,
            gs_constant: params.gs_constant,
            gs_c: consts.gs_c,
            gs_a: consts.gs_a,
            gs_beta: consts.gs_beta,
            moment_cg: consts.moment_cg,
            k_g: consts.k_g,
            count,
            deviation_lhs: l41.lhs,
            hankel_lhs: hankel_schatten(spec, params.p)?,
            rhs_simple,
            rhs_gs,
            rhs_poly,
            rhs_hankel,
            rhs_lemma41: l41.rhs,
            lemma41_tolerance: l41.tolerance,
            admissible_simple,
            admissible_gs,
            admissible_poly,
            admissible_hankel,
            admissible_lemma41: true,
        })
    }

    /// Measured side of bound `id`: the Schatten sum for Hankel, the counting
    /// deviation otherwise.
    pub fn lhs(&self, id: BoundId) -> f64 {
        if id == BoundId::Hankel {
            self.hankel_lhs
        } else {
            self.deviation_lhs
        }
    }

    pub fn rhs(&self, id: BoundId) -> f64 {
        match id {
            BoundId::Simple => self.rhs_simple,
            BoundId::Gs => self.rhs_gs,
            BoundId::Poly => self.rhs_poly,
            BoundId::Hankel => self.rhs_hankel,
            BoundId::Lemma41 => self.rhs_lemma41,
        }
    }

    pub fn admissible(&self, id: BoundId) -> bool {
        match id {
            BoundId::Simple => self.admissible_simple,
            BoundId::Gs => self.admissible_gs,
            BoundId::Poly => self.admissible_poly,
            BoundId::Hankel => self.admissible_hankel,
            BoundId::Lemma41 => self.admissible_lemma41,
        }
    }

    /// True when the bound is admissible and `lhs ≤ rhs` (`Lemma41` rows
    /// include their trace-defect tolerance).
    pub fn holds(&self, id: BoundId) -> bool {
        let slack = if id == BoundId::Lemma41 { self.lemma41_tolerance } else { 0.0 };
        self.admissible(id) && self.lhs(id) <= self.rhs(id) + slack
    }

    pub fn csv_row(&self) -> String {
        let f = |v: f64| format!("{v:.16e}");
        let gs = match self.gs_constant {
            GsConstant::Theorem => "theorem",
            GsConstant::Explicit => "explicit",
            GsConstant::LargeTau => "large_tau",
        };
        let cells = [
            csv_text(&self.domain),
            f(self.measure),
            f(self.perimeter),
            f(self.kappa),
            f(self.eta),
            f(self.delta),
            f(self.tau),
            f(self.p),
            f(self.alpha),
            f(self.s),
            f(self.c_d),
            gs.to_string(),
            f(self.gs_c),
            f(self.gs_a),
            f(self.gs_beta),
            f(self.moment_cg),
            f(self.k_g),
            self.count.to_string(),
            f(self.deviation_lhs),
            f(self.hankel_lhs),
            f(self.rhs_simple),
            f(self.rhs_gs),
            f(self.rhs_poly),
            f(self.rhs_hankel),
            f(self.rhs_lemma41),
            f(self.lemma41_tolerance),
            self.admissible_simple.to_string(),
            self.admissible_gs.to_string(),
            self.admissible_poly.to_string(),
            self.admissible_hankel.to_string(),
            self.admissible_lemma41.to_string(),
        ];
        cells.join(",")
    }
}

/// Quotes a CSV cell when needed.
pub fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLocation {
    pub domain: String,
    pub perimeter: f64,
    pub delta: f64,
}

/// Empirical multiplier: the bound evaluated with `C_d = 1`, scaled by
/// `fitted_cd`, holds on every report with equality at `max_ratio_location`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    pub bound_id: BoundId,
    pub fitted_cd: f64,
    pub grid: String,
    pub points: usize,
    pub max_ratio_location: RatioLocation,
}

/// `max lhs/rhs` over reports computed with `C_d = 1`.
pub fn fit_constant(reports: &[BoundReport], id: BoundId) -> Result<ConstantFit> {
    let usable: Vec<&BoundReport> = reports.iter().filter(|r| r.admissible(id)).collect();
    if usable.is_empty() {
        return Err(Error::EmptyInput("no admissible reports to fit".into()));
    }
    if id != BoundId::Simple && usable.iter().any(|r| r.c_d != 1.0) {
        return Err(Error::Domain("constant fits need reports evaluated with C_d = 1".into()));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, r) in usable.iter().enumerate() {
        let ratio = r.lhs(id) / r.rhs(id);
        if !ratio.is_finite() {
            return Err(Error::FitFailure(format!("non-finite ratio at δ = {}", r.delta)));
        }
        if ratio > best.0 {
            best = (ratio, i);
        }
    }
    let at = usable[best.1];
    let mut domains: Vec<&str> = usable.iter().map(|r| r.domain.as_str()).collect();
    domains.sort_unstable();
    domains.dedup();
    let mut deltas: Vec<f64> = usable.iter().map(|r| r.delta).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    Ok(ConstantFit {
        bound_id: id,
        fitted_cd: best.0,
        grid: format!(
            "{} domains x {} thresholds in [{:e}, {:e}]",
            domains.len(),
            deltas.len(),
            deltas[0],
            deltas[deltas.len() - 1]
        ),
        points: usable.len(),
        max_ratio_location: RatioLocation {
            domain: at.domain.clone(),
            perimeter: at.perimeter,
            delta: at.delta,
        },
    })
}
