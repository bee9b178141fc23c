//! Hermite–Galerkin matrices of concentration operators and their spectra.

mod assemble;
mod eigen;
mod twisted;

use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use assemble::{assemble_galerkin, MAX_BASIS};
pub use eigen::{hermitian_eigen, symmetric_eigen};
pub use twisted::twisted_convolution;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::window::Window;

/// Largest tolerated excursion of a computed eigenvalue outside `[0, 1]`.
pub const CLIP_TOLERANCE: f64 = 1e-8;

/// Hermitian Galerkin matrix `M_{mn} = ⟨L_Ω h_n, h_m⟩`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: Vec<Complex64>,
    basis_size: usize,
    window: Window,
    domain: Domain,
    quad_tol: f64,
    quad_error: f64,
}

/// JSON sidecar of an exported matrix or spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorMetadata {
    pub window: Window,
    pub domain: Domain,
    pub basis_size: usize,
    pub quad_tol: f64,
    pub quad_error_estimate: f64,
}

impl OperatorMatrix {
    pub(crate) fn from_parts(
        entries: Vec<Complex64>,
        basis_size: usize,
        window: Window,
        domain: Domain,
        quad_tol: f64,
        quad_error: f64,
    ) -> Self {
        OperatorMatrix {
            entries,
            basis_size,
            window,
            domain,
            quad_tol,
            quad_error,
        }
    }

    /// Wraps externally computed entries; they must be Hermitian to 1e−12
    /// relative to the largest entry.
    pub fn from_entries(entries: Vec<Complex64>, basis_size: usize, window: Window, domain: Domain, quad_tol: f64) -> Result<Self> {
        let n = basis_size;
        if n == 0 || n > MAX_BASIS {
            return Err(Error::BasisSize(n, MAX_BASIS));
        }
        if entries.len() != n * n {
            return Err(Error::GridMismatch(format!("{} entries for a {n}×{n} matrix", entries.len())));
        }
        let scale = entries.iter().fold(0.0_f64, |s, z| s.max(z.norm())).max(1.0);
        for i in 0..n {
            for j in i..n {
                let d = (entries[i * n + j] - entries[j * n + i].conj()).norm();
                if !(d <= 1e-12 * scale) {
                    return Err(Error::Domain(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_parts(entries, n, window, domain, quad_tol, 0.0))
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[m * self.basis_size + n]
    }

    pub fn basis_size(&self) -> usize {
        self.basis_size
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Largest entrywise difference between the base and doubled rules.
    pub fn quad_error_estimate(&self) -> f64 {
        self.quad_error
    }

    /// Largest absolute row sum, an upper bound for the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let n = self.basis_size;
        (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn metadata(&self) -> OperatorMetadata {
        OperatorMetadata {
            window: self.window.clone(),
            domain: self.domain.clone(),
            basis_size: self.basis_size,
            quad_tol: self.quad_tol,
            quad_error_estimate: self.quad_error,
        }
    }

    /// CSV with header `m,n,re,im`, one row per entry in row-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "m,n,re,im")?;
        let n = self.basis_size;
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[i * n + j];
                writeln!(out, "{i},{j},{:.16e},{:.16e}", z.re, z.im)?;
            }
        }
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv) together with the sidecar.
    pub fn read_csv<R: Read>(input: R, meta: OperatorMetadata) -> Result<Self> {
        let n = meta.basis_size;
        let mut entries = vec![Complex64::new(f64::NAN, 0.0); n * n];
        let mut rdr = csv::Reader::from_reader(input);
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["m", "n", "re", "im"] {
            return Err(Error::Parse("matrix CSV header must be m,n,re,im".into()));
        }
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<&str> { rec.get(k).ok_or_else(|| Error::Parse("short matrix row".into())) };
            let i: usize = parse(0)?.trim().parse().map_err(|e| Error::Parse(format!("row index: {e}")))?;
            let j: usize = parse(1)?.trim().parse().map_err(|e| Error::Parse(format!("column index: {e}")))?;
            let re: f64 = parse(2)?.trim().parse().map_err(|e| Error::Parse(format!("real part: {e}")))?;
            let im: f64 = parse(3)?.trim().parse().map_err(|e| Error::Parse(format!("imaginary part: {e}")))?;
            if i >= n || j >= n {
                return Err(Error::Parse(format!("entry ({i}, {j}) outside a {n}×{n} matrix")));
            }
            entries[i * n + j] = Complex64::new(re, im);
        }
        if entries.iter().any(|z| z.re.is_nan()) {
            return Err(Error::Parse("matrix CSV is missing entries".into()));
        }
        let mut m = Self::from_entries(entries, n, meta.window, meta.domain, meta.quad_tol)?;
        m.quad_error = meta.quad_error_estimate;
        Ok(m)
    }
}

/// Decreasing eigenvalues in `[0, 1]` with clipping record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    clip_count: usize,
    max_clip: f64,
    basis_size: usize,
}

impl Spectrum {
    /// Sorts decreasingly and clips to `[0, 1]`; excursions beyond
    /// [`CLIP_TOLERANCE`] are errors.
    pub fn from_values(mut raw: Vec<f64>, basis_size: usize) -> Result<Self> {
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite eigenvalue".into()));
        }
        raw.sort_by(|a, b| b.total_cmp(a));
        let mut clip_count = 0;
        let mut max_clip: f64 = 0.0;
        for v in raw.iter_mut() {
            let excess = if *v < 0.0 {
                -*v
            } else if *v > 1.0 {
                *v - 1.0
            } else {
                continue;
            };
            max_clip = max_clip.max(excess);
            clip_count += 1;
            *v = v.clamp(0.0, 1.0);
        }
        if max_clip > CLIP_TOLERANCE {
            return Err(Error::SpectrumRange {
                excess: max_clip,
                tolerance: CLIP_TOLERANCE,
            });
        }
        Ok(Spectrum {
            values: raw,
            clip_count,
            max_clip,
            basis_size,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn clip_count(&self) -> usize {
        self.clip_count
    }

    pub fn max_clip(&self) -> f64 {
        self.max_clip
    }

    pub fn basis_size(&self) -> usize {
        self.basis_size
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    /// CSV with header `k,lambda`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,lambda")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{k},{v:.16e}")?;
        }
        Ok(())
    }

    /// Reads a `k,lambda` CSV; the basis size is the number of rows.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "k,lambda" {
            return Err(Error::Parse(format!("spectrum CSV header must be k,lambda, got {header:?}")));
        }
        let mut vals = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("spectrum row {row} needs two columns")))?;
            let k: usize = k.trim().parse().map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
            if k != vals.len() {
                return Err(Error::Parse(format!("row {row} has index {k}")));
            }
            vals.push(v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {row}: {e}")))?);
        }
        let n = vals.len();
        Self::from_values(vals, n)
    }
}

/// Eigenvalues and eigenvectors of `M`, eigenvalues decreasing and unclipped.
pub fn eigen_decomposition(m: &OperatorMatrix) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    hermitian_eigen(&m.entries, m.basis_size)
}

/// Clipped decreasing spectrum of `M`.
pub fn eigen_spectrum(m: &OperatorMatrix) -> Result<Spectrum> {
    let (vals, _) = eigen_decomposition(m)?;
    Spectrum::from_values(vals, m.basis_size)
}

/// `(Σ M_{nn}, Σ |M_{mn}|²)`.
pub fn trace_identities(m: &OperatorMatrix) -> (f64, f64) {
    let n = m.basis_size;
    let trace = (0..n).map(|i| m.entries[i * n + i].re).sum();
    let trace_sq = m.entries.iter().map(|z| z.norm_sqr()).sum();
    (trace, trace_sq)
}

/// `Σ_k (λ_k − λ_k²)^{p/2}`, the `p`-th power of the Schatten norm of the
/// Hankel part.
pub fn hankel_schatten(spec: &Spectrum, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::Domain(format!("Schatten exponent must lie in (0, 2], got {p}")));
    }
    Ok(spec.values.iter().map(|&l| (l - l * l).max(0.0).powf(p / 2.0)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::QuadSpec;

    fn diag(v: &[f64]) -> OperatorMatrix {
        let n = v.len();
        let mut e = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, x) in v.iter().enumerate() {
            e[i * n + i] = Complex64::new(*x, 0.0);
        }
        OperatorMatrix::from_entries(e, n, Window::gaussian(), Domain::empty(), 1e-9).unwrap()
    }

    #[test]
    fn diagonal_input_sorted() {
        let s = eigen_spectrum(&diag(&[0.25, 0.9, 0.0, 0.5])).unwrap();
        assert_eq!(s.values(), &[0.9, 0.5, 0.25, 0.0]);
        assert_eq!(s.clip_count(), 0);
    }

    #[test]
    fn clipping() {
        let s = Spectrum::from_values(vec![1.0 + 5e-9, -3e-9, 0.5], 3).unwrap();
        assert_eq!(s.values(), &[1.0, 0.5, 0.0]);
        assert_eq!(s.clip_count(), 2);
        assert!(matches!(
            Spectrum::from_values(vec![1.1], 1),
            Err(Error::SpectrumRange { .. })
        ));
    }

    #[test]
    fn schatten_examples() {
        let proj = Spectrum::from_values(vec![1.0, 1.0, 0.0], 3).unwrap();
        for p in [0.5, 1.0, 2.0] {
            assert_eq!(hankel_schatten(&proj, p).unwrap(), 0.0);
        }
        let half = Spectrum::from_values(vec![0.5], 1).unwrap();
        assert!((hankel_schatten(&half, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(hankel_schatten(&half, 0.0).is_err());
        assert!(hankel_schatten(&half, 2.5).is_err());
    }

    #[test]
    fn empty_domain_traces() {
        let m = assemble_galerkin(&Window::gaussian(), &Domain::empty(), 4, &QuadSpec::default(), 1e-9).unwrap();
        assert_eq!(trace_identities(&m), (0.0, 0.0));
    }

    #[test]
    fn csv_round_trips() {
        let d = Domain::half_disk([0.0, 0.0], 1.0).unwrap();
        let m = assemble_galerkin(&Window::gaussian(), &d, 6, &QuadSpec::default(), 1e-9).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let meta: OperatorMetadata = serde_json::from_str(&serde_json::to_string(&m.metadata()).unwrap()).unwrap();
        let back = OperatorMatrix::read_csv(buf.as_slice(), meta).unwrap();
        assert_eq!(back, m);

        let s = eigen_spectrum(&m).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(Spectrum::read_csv(buf.as_slice()).unwrap().values(), s.values());
        assert!(Spectrum::read_csv("k,mu\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn sector_spectrum_is_a_contraction() {
        let d = Domain::sector([0.3, -0.2], 1.5, 0.2, 2.5).unwrap();
        let m = assemble_galerkin(&Window::gaussian(), &d, 24, &QuadSpec::default(), 1e-9).unwrap();
        let s = eigen_spectrum(&m).unwrap();
        assert!(s.values()[0] < 1.0);
        let (tr, _) = trace_identities(&m);
        assert!(tr <= d.measure() + 1e-9);
        assert!((s.trace() - tr).abs() < 1e-10);
    }
}
