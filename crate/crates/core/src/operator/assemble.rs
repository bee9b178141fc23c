use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::OperatorMatrix;
use crate::error::{Error, Result};
use crate::geometry::{Domain, QuadSpec, Shape};
use crate::quadrature::Rule;
use crate::special::log_factorial;
use crate::window::{stft_of_hermite, Window};

/// Largest supported Hermite basis.
pub const MAX_BASIS: usize = 512;

/// `V_g h_n` (up to the common phase `e^{−πixξ}`) for the Gaussian window:
/// `(π^n/n!)^{1/2} wⁿ e^{−π|w|²/2}` with `w = x − iξ`, evaluated in log form
/// so that large `|w|` and `n` neither overflow nor underflow prematurely.
fn gaussian_basis(n: usize, z: [f64; 2], half_log_coef: &[f64], out: &mut [Complex64]) {
    let w = Complex64::new(z[0], -z[1]);
    let r = w.norm();
    let g = -PI * r * r / 2.0;
    if r == 0.0 {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        out[0] = Complex64::new(g.exp(), 0.0);
        return;
    }
    let lr = r.ln();
    let u = w / r;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mag = (k as f64 * lr + half_log_coef[k] + g).exp();
        out[k] = phase * mag;
        phase *= u;
    }
}

/// Basis values `E[n·Q + q] = V_g h_n(z_q)`.
fn basis_table(w: &Window, n: usize, rule: &Rule) -> Vec<Complex64> {
    let q = rule.len();
    let mut cols = vec![Complex64::new(0.0, 0.0); n * q];
    let per_point: Vec<Vec<Complex64>> = if matches!(w.hermite_index(), Some(0)) {
        let half_log_coef: Vec<f64> = (0..n).map(|k| 0.5 * (k as f64 * PI.ln() - log_factorial(k as u64))).collect();
        rule.points
            .par_iter()
            .map(|&z| {
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                gaussian_basis(n, z, &half_log_coef, &mut out);
                out
            })
            .collect()
    } else {
        rule.points
            .par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(out, buf), &z| {
                    stft_of_hermite(w, n - 1, z, out, buf);
                    out.clone()
                },
            )
            .collect()
    };
    for (j, vals) in per_point.iter().enumerate() {
        for (k, v) in vals.iter().enumerate() {
            cols[k * q + j] = *v;
        }
    }
    cols
}

/// `M_{mn} = Σ_q w_q E_n(z_q) conj(E_m(z_q))`, row-parallel with a fixed
/// summation order.
fn gram(n: usize, rule: &Rule, e: &[Complex64]) -> Vec<Complex64> {
    let q = rule.len();
    let weighted: Vec<Complex64> = (0..n * q).map(|i| e[i] * rule.weights[i % q]).collect();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let em = &e[m * q..(m + 1) * q];
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for (k, slot) in row.iter_mut().enumerate().skip(m) {
                let fk = &weighted[k * q..(k + 1) * q];
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, b) in fk.iter().zip(em) {
                    acc += a * b.conj();
                }
                *slot = acc;
            }
            row
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for m in 0..n {
        for k in m..n {
            let v = rows[m][k];
            out[m * n + k] = v;
            out[k * n + m] = v.conj();
        }
        out[m * n + m].im = 0.0;
    }
    out
}

fn matrix_on_rule(w: &Window, dom: &Domain, n: usize, spec: &QuadSpec) -> Result<Vec<Complex64>> {
    let rule = dom.quadrature_rule(spec);
    if !w.is_closed_form() {
        let lim = w.nyquist_limit();
        if let Some(p) = rule.points.iter().find(|p| p[1].abs() > lim) {
            return Err(Error::Underresolved(format!(
                "domain reaches frequency {} beyond the sampled window's limit {lim}",
                p[1]
            )));
        }
    }
    let e = basis_table(w, n, &rule);
    Ok(gram(n, &rule, &e))
}

/// Galerkin matrix of the concentration operator in the first `n` Hermite
/// functions.
///
/// The matrix is assembled on `quad` and on `quad.doubled()`; the finer one is
/// returned and the largest entrywise difference is its error estimate.
pub fn assemble_galerkin(w: &Window, dom: &Domain, n: usize, quad: &QuadSpec, quad_tol: f64) -> Result<OperatorMatrix> {
    if n == 0 || n > MAX_BASIS {
        return Err(Error::BasisSize(n, MAX_BASIS));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance must be positive, got {quad_tol}")));
    }
    if dom.is_degenerate() || matches!(dom.shape(), Shape::Empty) {
        return Ok(OperatorMatrix::from_parts(
            vec![Complex64::new(0.0, 0.0); n * n],
            n,
            w.clone(),
            dom.clone(),
            quad_tol,
            0.0,
        ));
    }
    // trigonometric exactness for the angular frequencies |n − m| < N on disks
    let coarse = QuadSpec {
        angular: quad.angular.max(n + 1),
        ..*quad
    };
    let a = matrix_on_rule(w, dom, n, &coarse)?;
    let b = matrix_on_rule(w, dom, n, &coarse.doubled())?;
    let estimate = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    if !(estimate <= quad_tol) {
        return Err(Error::QuadratureBudget {
            estimate,
            tolerance: quad_tol,
        });
    }
    Ok(OperatorMatrix::from_parts(b, n, w.clone(), dom.clone(), quad_tol, estimate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::reg_lower_gamma;

    #[test]
    fn gaussian_basis_matches_quadrature() {
        let n = 6;
        let coef: Vec<f64> = (0..n).map(|k| 0.5 * (k as f64 * PI.ln() - log_factorial(k as u64))).collect();
        let mut cf = vec![Complex64::new(0.0, 0.0); n];
        let mut num = Vec::new();
        let mut buf = Vec::new();
        for z in [[0.3, 0.5], [-0.7, 0.2], [1.1, -0.9]] {
            gaussian_basis(n, z, &coef, &mut cf);
            stft_of_hermite(&Window::gaussian(), n - 1, z, &mut num, &mut buf);
            let phase = Complex64::from_polar(1.0, -PI * z[0] * z[1]);
            for k in 0..n {
                assert!((cf[k] * phase - num[k]).norm() < 1e-10, "n={k} z={z:?}");
            }
        }
    }

    #[test]
    fn gaussian_disk_is_diagonal_incomplete_gamma() {
        let d = Domain::disk([0.0, 0.0], 2.0).unwrap();
        let m = assemble_galerkin(&Window::gaussian(), &d, 64, &QuadSpec::default(), 1e-9).unwrap();
        let x = 4.0 * PI;
        for i in 0..64 {
            for j in 0..64 {
                let v = m.entry(i, j);
                if i == j {
                    let p = reg_lower_gamma(i as f64 + 1.0, x).unwrap();
                    assert!((v.re - p).abs() < 1e-12 && v.im == 0.0, "{i}: {v} vs {p}");
                } else {
                    assert!(v.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn empty_domain_gives_zero() {
        let m = assemble_galerkin(&Window::hermite(2), &Domain::empty(), 8, &QuadSpec::default(), 1e-9).unwrap();
        assert!(m.entries().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn basis_size_and_budget_errors() {
        let d = Domain::disk([0.0, 0.0], 1.0).unwrap();
        let w = Window::gaussian();
        assert!(matches!(
            assemble_galerkin(&w, &d, 0, &QuadSpec::default(), 1e-9),
            Err(Error::BasisSize(0, MAX_BASIS))
        ));
        assert!(matches!(
            assemble_galerkin(&w, &d, 600, &QuadSpec::default(), 1e-9),
            Err(Error::BasisSize(600, MAX_BASIS))
        ));
        let crude = QuadSpec {
            radial: 2,
            ..QuadSpec::default()
        };
        assert!(matches!(
            assemble_galerkin(&w, &d, 16, &crude, 1e-9),
            Err(Error::QuadratureBudget { .. })
        ));
    }

    #[test]
    fn half_disk_off_diagonal_matches_dense_grid() {
        let d = Domain::half_disk([0.0, 0.0], 1.0).unwrap();
        let m = assemble_galerkin(&Window::gaussian(), &d, 16, &QuadSpec::default(), 1e-9).unwrap();
        // M_01 = √π ∫ (x − iξ) e^{−π|z|²} over the upper half-disk; the polar
        // integrand separates, so each factor gets a dense midpoint sum
        let k = 1_000_000;
        let radial: f64 = (0..k)
            .map(|i| {
                let r = (i as f64 + 0.5) / k as f64;
                r * r * (-PI * r * r).exp()
            })
            .sum::<f64>()
            / k as f64;
        let angular: Complex64 = (0..k)
            .map(|j| {
                let t = PI * (j as f64 + 0.5) / k as f64;
                Complex64::new(t.cos(), -t.sin())
            })
            .sum::<Complex64>()
            * (PI / k as f64);
        let mut acc = angular * radial;
        acc *= PI.sqrt();
        let v = m.entry(0, 1);
        assert!(v.norm() > 0.1);
        assert!((v - acc).norm() < 1e-8, "{v} vs {acc}");
    }
}
