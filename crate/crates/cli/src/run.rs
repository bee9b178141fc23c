//! Command execution. Sweep points run on the ambient rayon pool; results are
//! collected in grid order and written by the calling thread.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use tflab::analytic::{disk_eigenvalues, fit_sharpness_a, fit_sharpness_b};
use tflab::bounds::{fit_constant, BoundId, BoundParams, BoundReport, ConstantFit};
use tflab::geometry::level_set_measure;
use tflab::operator::{assemble_galerkin, eigen_spectrum, trace_identities, OperatorMetadata, Spectrum};
use tflab::{CountingReport, Domain, GeometrySummary, Shape, SharpnessFit, Window, WindowConstants, WindowKind};

use crate::config::{Command, ExperimentConfig, RegimeChoice, SpectrumSource};
use crate::error::CliError;

/// Files written by a run, in write order.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

impl RunOutput {
    fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("output directory {} is not writable: {e}", dir.display())))?;
        let mut paths = Vec::new();
        for (name, contents) in &self.files {
            let p = dir.join(name);
            fs::write(&p, contents)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output types serialize");
    s.push('\n');
    s
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Results in grid order; the first failing point (in that order) wins.
fn sweep<T, U, F>(points: &[T], f: F) -> Result<Vec<U>, CliError>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, CliError> + Sync + Send,
{
    let results: Vec<Result<U, CliError>> = points.par_iter().map(f).collect();
    results.into_iter().collect()
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    match cfg.command {
        Command::Spectrum => run_spectrum(cfg),
        Command::Geometry => run_geometry(cfg),
        Command::Verify => run_verify(cfg),
        Command::Sharpness => run_sharpness(cfg),
        Command::Fit => run_fit(cfg),
    }
}

fn domain_at(base: &Domain, r: f64) -> Result<Domain, CliError> {
    if r == 1.0 {
        return Ok(base.clone());
    }
    base.dilate(r).map_err(|e| CliError::at(format!("R = {r}"), e))
}

#[derive(Debug, Clone, Serialize)]
struct SpectrumPoint {
    radius: f64,
    domain: String,
    measure: f64,
    csv: String,
    source: &'static str,
    eigenvalues: usize,
    clip_count: usize,
    max_clip: f64,
    trace: f64,
    /// `Σ|M_mn|²`, Galerkin only.
    trace_sq: Option<f64>,
    metadata: Option<OperatorMetadata>,
}

struct SpectrumResult {
    spectrum: Spectrum,
    info: SpectrumPoint,
}

fn is_centred_disk(dom: &Domain) -> Option<f64> {
    match dom.shape() {
        Shape::Disk { center, radius } if center[0] == 0.0 && center[1] == 0.0 => Some(*radius),
        Shape::Dilated { base, factor } => is_centred_disk(base).map(|r| r * factor),
        _ => None,
    }
}

fn spectrum_at(cfg: &ExperimentConfig, w: &Window, dom: &Domain, r: f64) -> Result<SpectrumResult, CliError> {
    let point = format!("R = {r}");
    let mut info = SpectrumPoint {
        radius: r,
        domain: dom.label(),
        measure: dom.measure(),
        csv: String::new(),
        source: "",
        eigenvalues: 0,
        clip_count: 0,
        max_clip: 0.0,
        trace: 0.0,
        trace_sq: None,
        metadata: None,
    };
    let spectrum = match &cfg.spectrum {
        SpectrumSource::Galerkin => {
            let m = assemble_galerkin(w, dom, cfg.basis_size, &cfg.quadrature, cfg.quad_tol)
                .map_err(|e| CliError::at(&point, e))?;
            let (_, trace_sq) = trace_identities(&m);
            info.source = "galerkin";
            info.trace_sq = Some(trace_sq);
            info.metadata = Some(m.metadata());
            eigen_spectrum(&m).map_err(|e| CliError::at(&point, e))?
        }
        SpectrumSource::Analytic { k_max } => {
            if !matches!(w.kind(), WindowKind::Gaussian) {
                return Err(CliError::Config("key `spectrum`: the analytic source needs the Gaussian window".into()));
            }
            let radius = is_centred_disk(dom)
                .ok_or_else(|| CliError::Config("key `spectrum`: the analytic source needs a disk centred at 0".into()))?;
            info.source = "analytic";
            disk_eigenvalues(radius, *k_max)
                .map_err(|e| CliError::at(&point, e))?
                .to_spectrum()
        }
        SpectrumSource::Csv { path } => {
            let f = fs::File::open(path).map_err(|e| CliError::Config(format!("key `spectrum.path`: {}: {e}", path.display())))?;
            info.source = "csv";
            Spectrum::read_csv(f).map_err(|e| CliError::Config(format!("key `spectrum.path`: {e}")))?
        }
    };
    info.eigenvalues = spectrum.len();
    info.clip_count = spectrum.clip_count();
    info.max_clip = spectrum.max_clip();
    info.trace = spectrum.trace();
    Ok(SpectrumResult { spectrum, info })
}

fn spectra(cfg: &ExperimentConfig, w: &Window, base: &Domain) -> Result<Vec<(Domain, SpectrumResult)>, CliError> {
    sweep(&cfg.radii, |&r| {
        let dom = domain_at(base, r)?;
        let s = spectrum_at(cfg, w, &dom, r)?;
        Ok((dom, s))
    })
}

fn run_spectrum(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let w = cfg.build_window()?;
    let base = cfg.build_domain()?;
    let results = spectra(cfg, &w, &base)?;
    let mut out = RunOutput::default();
    let mut points = Vec::new();
    for (i, (_, mut res)) in results.into_iter().enumerate() {
        let name = if cfg.radii.len() == 1 {
            "spectrum.csv".to_string()
        } else {
            format!("spectrum_{i:03}.csv")
        };
        let mut buf = Vec::new();
        res.spectrum.write_csv(&mut buf).expect("writing to memory");
        out.add(&name, String::from_utf8(buf).expect("ascii csv"));
        res.info.csv = name;
        points.push(res.info);
    }
    out.summary = format!("{} spectra", points.len());
    out.add("spectrum.json", json(&serde_json::json!({ "command": "spectrum", "points": points })));
    Ok(out)
}

fn geometry_at(cfg: &ExperimentConfig, dom: &Domain, eta: f64, point: &str) -> Result<GeometrySummary, CliError> {
    match cfg.kappa {
        Some(k) => GeometrySummary::with_kappa(dom, eta, k),
        None => GeometrySummary::compute(dom, eta, &[]),
    }
    .map_err(|e| CliError::at(point, e))
}

#[derive(Debug, Clone, Serialize)]
struct GeometryPoint {
    radius: f64,
    domain: String,
    summary: GeometrySummary,
}

fn run_geometry(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let base = cfg.build_domain()?;
    let grid: Vec<(f64, f64)> = cfg.radii.iter().flat_map(|&r| cfg.eta.iter().map(move |&e| (r, e))).collect();
    let points = sweep(&grid, |&(r, eta)| {
        let point = format!("R = {r}, η = {eta}");
        let dom = domain_at(&base, r)?;
        let mut summary = geometry_at(cfg, &dom, eta, &point)?;
        summary.level_set_table = cfg
            .level_set_radii
            .iter()
            .map(|&d| level_set_measure(&dom, d).map(|m| (d, m)))
            .collect::<tflab::Result<_>>()
            .map_err(|e| CliError::at(&point, e))?;
        Ok(GeometryPoint {
            radius: r,
            domain: dom.label(),
            summary,
        })
    })?;
    let mut csv = String::from("radius,eta,r,level_set_measure\n");
    for p in &points {
        for (d, m) in &p.summary.level_set_table {
            writeln!(csv, "{},{},{},{}", float(p.radius), float(p.summary.eta), float(*d), float(*m)).unwrap();
        }
    }
    let mut out = RunOutput::default();
    out.summary = format!("{} geometry summaries", points.len());
    out.add("geometry.json", json(&serde_json::json!({ "command": "geometry", "points": points })));
    out.add("level_sets.csv", csv);
    Ok(out)
}

fn window_constants(cfg: &ExperimentConfig, w: &Window) -> Result<Vec<WindowConstants>, CliError> {
    if let Some(c) = cfg.window_constants {
        let c = WindowConstants::new(c.gs_c, c.gs_a, c.gs_beta, c.moment_s, c.moment_cg, c.k_g)
            .map_err(|e| CliError::at("declared window constants", e))?;
        return Ok(vec![c]);
    }
    sweep(&cfg.s, |&s| {
        WindowConstants::compute(w, cfg.beta, s, cfg.gs_n_max)
            .map_err(|e| CliError::at(format!("window constants at β = {}, s = {s}", cfg.beta), e))
    })
}

struct Sweep {
    reports: Vec<(f64, BoundReport)>,
    counting: Vec<(f64, CountingReport)>,
}

/// BoundReports over `R × η × s × δ × p` and CountingReports over `R × δ`.
fn bound_sweep(cfg: &ExperimentConfig, c_d: f64) -> Result<Sweep, CliError> {
    let w = cfg.build_window()?;
    let base = cfg.build_domain()?;
    let consts = window_constants(cfg, &w)?;
    let specs = spectra(cfg, &w, &base)?;
    let geo_grid: Vec<(usize, f64)> = (0..specs.len()).flat_map(|i| cfg.eta.iter().map(move |&e| (i, e))).collect();
    let geoms = sweep(&geo_grid, |&(i, eta)| {
        geometry_at(cfg, &specs[i].0, eta, &format!("R = {}, η = {eta}", cfg.radii[i]))
    })?;

    let mut grid = Vec::new();
    for (g, &(i, _)) in geo_grid.iter().enumerate() {
        for c in 0..consts.len() {
            for &delta in cfg.deltas() {
                for &p in &cfg.p {
                    grid.push((i, g, c, delta, p));
                }
            }
        }
    }
    let reports = sweep(&grid, |&(i, g, c, delta, p)| {
        let (dom, res) = &specs[i];
        let params = BoundParams {
            delta,
            p,
            alpha: cfg.alpha,
            s: consts[c].moment_s,
            c_d,
            gs_constant: cfg.gs_constant,
        };
        let point = format!("R = {}, η = {}, s = {}, δ = {delta}, p = {p}", cfg.radii[i], geoms[g].eta, params.s);
        BoundReport::compute(&w, &consts[c], &geoms[g], dom, &res.spectrum, &params)
            .map(|rep| (cfg.radii[i], rep))
            .map_err(|e| CliError::at(point, e))
    })?;

    let count_grid: Vec<(usize, f64)> = (0..specs.len()).flat_map(|i| cfg.deltas().iter().map(move |&d| (i, d))).collect();
    let counting = sweep(&count_grid, |&(i, delta)| {
        let (dom, res) = &specs[i];
        CountingReport::compute(&res.spectrum, dom, delta)
            .map(|c| (cfg.radii[i], c))
            .map_err(|e| CliError::at(format!("R = {}, δ = {delta}", cfg.radii[i]), e))
    })?;
    Ok(Sweep { reports, counting })
}

fn reports_csv(reports: &[(f64, BoundReport)]) -> String {
    let mut s = format!("radius,{}\n", BoundReport::CSV_HEADER);
    for (r, rep) in reports {
        writeln!(s, "{},{}", float(*r), rep.csv_row()).unwrap();
    }
    s
}

const ALL_BOUNDS: [BoundId; 5] = [BoundId::Simple, BoundId::Gs, BoundId::Poly, BoundId::Hankel, BoundId::Lemma41];

#[derive(Debug, Clone, Serialize)]
pub struct BoundTally {
    pub bound: BoundId,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub inadmissible: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub reports: usize,
    pub counting_rows: usize,
    pub c_d: f64,
    pub pass: usize,
    pub fail: usize,
    pub bounds: Vec<BoundTally>,
}

pub fn tally(reports: &[BoundReport], c_d: f64, counting_rows: usize) -> VerifySummary {
    let mut bounds = Vec::new();
    let (mut pass, mut fail) = (0, 0);
    for id in ALL_BOUNDS {
        let mut t = BoundTally {
            bound: id,
            checked: 0,
            passed: 0,
            failed: 0,
            inadmissible: 0,
        };
        for r in reports {
            if !r.admissible(id) {
                t.inadmissible += 1;
                continue;
            }
            t.checked += 1;
            if r.holds(id) {
                t.passed += 1;
            } else {
                t.failed += 1;
            }
        }
        pass += t.passed;
        fail += t.failed;
        bounds.push(t);
    }
    VerifySummary {
        reports: reports.len(),
        counting_rows,
        c_d,
        pass,
        fail,
        bounds,
    }
}

fn counting_csv(rows: &[(f64, CountingReport)]) -> String {
    let mut s = format!("radius,{}\n", CountingReport::CSV_HEADER);
    for (r, c) in rows {
        writeln!(s, "{},{}", float(*r), c.csv_row()).unwrap();
    }
    s
}

fn run_verify(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let sw = bound_sweep(cfg, cfg.c_d)?;
    let reports: Vec<BoundReport> = sw.reports.iter().map(|(_, r)| r.clone()).collect();
    let summary = tally(&reports, cfg.c_d, sw.counting.len());
    let mut out = RunOutput::default();
    out.summary = format!("{} reports, {} pass, {} fail", summary.reports, summary.pass, summary.fail);
    out.add("bounds.csv", reports_csv(&sw.reports));
    out.add("counting.csv", counting_csv(&sw.counting));
    out.add("verify.json", json(&summary));
    Ok(out)
}

fn run_fit(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let sw = bound_sweep(cfg, 1.0)?;
    let reports: Vec<BoundReport> = sw.reports.iter().map(|(_, r)| r.clone()).collect();
    let fits: Vec<ConstantFit> = cfg
        .bounds
        .iter()
        .map(|&id| fit_constant(&reports, id).map_err(|e| CliError::at(format!("fit of {id:?}"), e)))
        .collect::<Result<_, _>>()?;
    let mut out = RunOutput::default();
    out.summary = fits
        .iter()
        .map(|f| format!("{:?}: C_d = {:.6}", f.bound_id, f.fitted_cd))
        .collect::<Vec<_>>()
        .join(", ");
    out.add("fit.csv", reports_csv(&sw.reports));
    out.add("fit.json", json(&fits));
    Ok(out)
}

fn run_sharpness(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let fit: SharpnessFit = match cfg.regime {
        RegimeChoice::A => fit_sharpness_a(&cfg.radii, cfg.deltas(), cfg.sharpness_lower),
        RegimeChoice::B => fit_sharpness_b(&cfg.radii, cfg.deltas()),
    }
    .map_err(|e| CliError::at(format!("regime {:?}", cfg.regime), e))?;
    let mut csv = String::from("radius,delta,count,ratio,slack\n");
    for p in &fit.residuals {
        writeln!(csv, "{},{},{},{},{}", float(p.radius), float(p.delta), p.count, float(p.ratio), float(p.slack)).unwrap();
    }
    let mut out = RunOutput::default();
    out.summary = format!("fitted c = {:.6} over {} points", fit.fitted_c, fit.residuals.len());
    out.add("sharpness.json", json(&fit));
    out.add("sharpness.csv", csv);
    Ok(out)
}
