//! Experiment configuration: one JSON document per run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tflab::bounds::{BoundId, GsConstant};
use tflab::operator::MAX_BASIS;
use tflab::{Domain, QuadSpec, Window, WindowConstants};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Geometry,
    Verify,
    Sharpness,
    Fit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Geometry => "geometry",
            Command::Verify => "verify",
            Command::Sharpness => "sharpness",
            Command::Fit => "fit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum WindowSpec {
    Gaussian,
    Hermite { index: usize },
    /// CSV with header `t,value` or `t,re,im`.
    Sampled { path: PathBuf },
}

/// A domain inline (`{"shape": "disk", ...}`) or a polygon read from a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DomainSpec {
    File { polygon_csv: PathBuf },
    Inline(Domain),
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        if let Some(path) = v.get("polygon_csv") {
            if v.as_object().map_or(0, |o| o.len()) != 1 {
                return Err(D::Error::custom("`polygon_csv` admits no other keys"));
            }
            let p = path.as_str().ok_or_else(|| D::Error::custom("`polygon_csv` must be a path"))?;
            return Ok(DomainSpec::File { polygon_csv: p.into() });
        }
        Domain::deserialize(v).map(DomainSpec::Inline).map_err(D::Error::custom)
    }
}

/// Where `verify` and `fit` take eigenvalues from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "source", deny_unknown_fields)]
pub enum SpectrumSource {
    #[default]
    Galerkin,
    /// Closed form for the Gaussian window on centred disks, `k ≤ k_max`.
    Analytic { k_max: usize },
    /// A `k,lambda` CSV written by `spectrum`.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    #[default]
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "default_window")]
    pub window: WindowSpec,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    /// Dilation factors `R` applied to the domain.
    #[serde(default = "unit_grid")]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
    #[serde(default = "unit_grid")]
    pub p: Vec<f64>,
    #[serde(default = "default_s")]
    pub s: Vec<f64>,
    #[serde(default = "unit_grid")]
    pub eta: Vec<f64>,
    /// Distances at which `geometry` tabulates level-set measures.
    #[serde(default = "default_level_set_radii")]
    pub level_set_radii: Vec<f64>,
    #[serde(default = "default_basis_size")]
    pub basis_size: usize,
    #[serde(default = "default_basis_cap")]
    pub basis_cap: usize,
    #[serde(default)]
    pub quadrature: QuadSpec,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub spectrum: SpectrumSource,
    /// Gelfand–Shilov exponent used when window constants are computed.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_gs_n_max")]
    pub gs_n_max: usize,
    /// Declared constants; replaces the computed ones (and the `s` grid).
    #[serde(default)]
    pub window_constants: Option<WindowConstants>,
    /// Replaces the sampled κ estimate.
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub c_d: f64,
    #[serde(default)]
    pub gs_constant: GsConstant,
    /// Bounds fitted by `fit`.
    #[serde(default = "default_fit_bounds")]
    pub bounds: Vec<BoundId>,
    #[serde(default)]
    pub regime: RegimeChoice,
    /// Lower end of the `√(log 1/δ)` window in regime A.
    #[serde(default = "default_sharpness_lower")]
    pub sharpness_lower: f64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_window() -> WindowSpec {
    WindowSpec::Gaussian
}
fn unit_grid() -> Vec<f64> {
    vec![1.0]
}
fn default_s() -> Vec<f64> {
    vec![3.0]
}
fn default_level_set_radii() -> Vec<f64> {
    vec![0.05, 0.1, 0.2, 0.5, 1.0]
}
fn default_basis_size() -> usize {
    128
}
fn default_basis_cap() -> usize {
    MAX_BASIS
}
fn default_quad_tol() -> f64 {
    1e-8
}
fn default_beta() -> f64 {
    0.5
}
fn default_gs_n_max() -> usize {
    60
}
fn one() -> f64 {
    1.0
}
fn default_fit_bounds() -> Vec<BoundId> {
    vec![BoundId::Gs]
}
fn default_sharpness_lower() -> f64 {
    2.0
}
fn default_output() -> PathBuf {
    PathBuf::from("tflab-out")
}

fn key_error(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {msg}"))
}

fn check_grid(key: &str, grid: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(key_error(key, "grid is empty"));
    }
    if let Some(v) = grid.iter().find(|v| !ok(**v)) {
        return Err(key_error(key, format!("{v} is not {what}")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses and validates a config; errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                CliError::Config(e.inner().to_string())
            } else {
                key_error(&path, e.inner())
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        check_grid("radii", &self.radii, positive, "a positive dilation factor")?;
        check_grid("p", &self.p, positive, "a positive exponent")?;
        check_grid("s", &self.s, |v| v.is_finite() && v > 0.0, "a positive moment order")?;
        check_grid("eta", &self.eta, positive, "a positive scale")?;
        check_grid("level_set_radii", &self.level_set_radii, positive, "a positive distance")?;
        if let Some(d) = &self.deltas {
            check_grid("deltas", d, |v| v > 0.0 && v < 1.0, "in (0, 1)")?;
        }
        if self.bounds.is_empty() {
            return Err(key_error("bounds", "list is empty"));
        }
        if self.basis_cap == 0 || self.basis_cap > MAX_BASIS {
            return Err(key_error("basis_cap", format!("must lie in 1..={MAX_BASIS}")));
        }
        if self.basis_size == 0 || self.basis_size > self.basis_cap {
            return Err(key_error(
                "basis_size",
                format!("{} is outside 1..={}", self.basis_size, self.basis_cap),
            ));
        }
        if !positive(self.quad_tol) {
            return Err(key_error("quad_tol", "must be positive"));
        }
        if !positive(self.beta) {
            return Err(key_error("beta", "must be positive"));
        }
        if !positive(self.c_d) {
            return Err(key_error("c_d", "must be positive"));
        }
        if !positive(self.alpha) {
            return Err(key_error("alpha", "must be positive"));
        }
        if let Some(k) = self.kappa {
            if !positive(k) {
                return Err(key_error("kappa", "must be positive"));
            }
        }
        let needs_domain = !matches!(self.command, Command::Sharpness);
        if needs_domain && self.domain.is_none() {
            return Err(key_error("domain", format!("required by `{}`", self.command.name())));
        }
        let needs_deltas = matches!(self.command, Command::Verify | Command::Fit | Command::Sharpness);
        if needs_deltas && self.deltas.is_none() {
            return Err(key_error("deltas", format!("required by `{}`", self.command.name())));
        }
        if let SpectrumSource::Csv { .. } = self.spectrum {
            if self.radii.len() != 1 {
                return Err(key_error("radii", "a spectrum read from CSV allows a single dilation factor"));
            }
        }
        Ok(())
    }

    pub fn deltas(&self) -> &[f64] {
        self.deltas.as_deref().unwrap_or(&[])
    }

    /// Resolves relative file paths against `base` (the config's directory).
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let WindowSpec::Sampled { path } = &mut self.window {
            fix(path);
        }
        if let Some(DomainSpec::File { polygon_csv }) = &mut self.domain {
            fix(polygon_csv);
        }
        if let SpectrumSource::Csv { path } = &mut self.spectrum {
            fix(path);
        }
    }

    pub fn build_window(&self) -> Result<Window, CliError> {
        match &self.window {
            WindowSpec::Gaussian => Ok(Window::gaussian()),
            WindowSpec::Hermite { index } => Ok(Window::hermite(*index)),
            WindowSpec::Sampled { path } => {
                let f = fs::File::open(path).map_err(|e| key_error("window.path", format!("{}: {e}", path.display())))?;
                Window::from_csv(f).map_err(|e| key_error("window.path", e))
            }
        }
    }

    pub fn build_domain(&self) -> Result<Domain, CliError> {
        match &self.domain {
            None => Err(key_error("domain", "missing")),
            Some(DomainSpec::Inline(d)) => Ok(d.clone()),
            Some(DomainSpec::File { polygon_csv }) => {
                let f = fs::File::open(polygon_csv)
                    .map_err(|e| key_error("domain.polygon_csv", format!("{}: {e}", polygon_csv.display())))?;
                Domain::polygon_from_csv(f).map_err(|e| key_error("domain.polygon_csv", e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spectrum_config() {
        let c = ExperimentConfig::from_json(
            r#"{"command": "spectrum", "domain": {"shape": "disk", "center": [0, 0], "radius": 2}}"#,
        )
        .unwrap();
        assert_eq!(c.basis_size, 128);
        assert_eq!(c.radii, vec![1.0]);
        assert_eq!(c.window, WindowSpec::Gaussian);
    }

    #[test]
    fn errors_name_the_key() {
        let e = ExperimentConfig::from_json(r#"{"command": "verify", "domain": {"shape": "empty"}, "deltas": []}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("deltas"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"command": "spectrum", "domian": {}}"#).unwrap_err().to_string();
        assert!(e.contains("domian"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"command": "spectrum", "domain": {"shape": "empty"}, "p": [1, "x"]}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("p[1]"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"command": "fit", "domain": {"shape": "empty"}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("deltas"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"command": "spectrum", "domain": {"shape": "empty"}, "basis_size": 900}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("basis_size"), "{e}");
    }

    #[test]
    fn invalid_domain_is_a_config_error() {
        let e = ExperimentConfig::from_json(r#"{"command": "geometry", "domain": {"shape": "disk", "center": [0, 0], "radius": -1}}"#)
            .unwrap_err();
        assert!(matches!(e, CliError::Config(_)));
        assert!(e.to_string().contains("domain"), "{e}");
    }

    #[test]
    fn polygon_file_domain() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("p.csv"), "x,y\n0,0\n1,0\n0,1\n").unwrap();
        let mut c =
            ExperimentConfig::from_json(r#"{"command": "geometry", "domain": {"polygon_csv": "p.csv"}}"#).unwrap();
        c.resolve_paths(dir.path());
        assert!((c.build_domain().unwrap().measure() - 0.5).abs() < 1e-15);
    }
}
