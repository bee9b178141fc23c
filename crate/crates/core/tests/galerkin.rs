use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tflab::analytic::disk_eigenvalues;
use tflab::operator::{
    assemble_galerkin, eigen_decomposition, eigen_spectrum, hankel_schatten, trace_identities, OperatorMatrix,
};
use tflab::special::reg_lower_gamma;
use tflab::{Domain, QuadSpec, Window};

fn disk2(n: usize) -> OperatorMatrix {
    let d = Domain::disk([0.0, 0.0], 2.0).unwrap();
    assemble_galerkin(&Window::gaussian(), &d, n, &QuadSpec::default(), 1e-9).unwrap()
}

/// `∫_0^{2R} e^{−πd²}·|B_R ∩ (B_R + d)|·2πd dd`, the lens-area form of
/// `∬_{Ω×Ω} e^{−π|z−z′|²}` for a disk, by composite Simpson.
fn lens_oracle(r: f64) -> f64 {
    let lens = |d: f64| {
        let q = (d / (2.0 * r)).min(1.0);
        2.0 * r * r * q.acos() - 0.5 * d * (4.0 * r * r - d * d).max(0.0).sqrt()
    };
    let f = |d: f64| (-PI * d * d).exp() * lens(d) * 2.0 * PI * d;
    let n = 400_000;
    let b = 2.0 * r;
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn gaussian_disk_matches_incomplete_gamma() {
    let t = Instant::now();
    let m = disk2(128);
    let spec = eigen_spectrum(&m).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let exact = disk_eigenvalues(2.0, 127).unwrap().values;
    for k in 0..=100 {
        assert!((spec.values()[k] - exact[k]).abs() < 1e-6, "k={k}");
    }
    for i in 0..128 {
        for j in 0..128 {
            if i != j {
                assert!(m.entry(i, j).norm() < 1e-10);
            }
        }
    }
    assert!(secs < 60.0, "{secs} s");
}

#[test]
fn trace_identities_against_oracles() {
    let m = disk2(128);
    let (tr, tr2) = trace_identities(&m);
    let x = 4.0 * PI;
    assert!(tr <= x + 1e-12 && x - tr < 1e-6, "{tr}");
    let tail: f64 = (128..400).map(|k| reg_lower_gamma(k as f64 + 1.0, x).unwrap()).sum();
    assert!((x - tr - tail).abs() < 1e-9);
    let oracle = lens_oracle(2.0);
    assert!((tr2 - oracle).abs() < 1e-5, "{tr2} vs {oracle}");
}

#[test]
fn schatten_sum_matches_analytic() {
    let s = eigen_spectrum(&disk2(128)).unwrap();
    let x = 4.0 * PI;
    let exact: f64 = (0..400)
        .map(|k| {
            let l = reg_lower_gamma(k as f64 + 1.0, x).unwrap();
            (l * (1.0 - l)).sqrt()
        })
        .sum();
    let v = hankel_schatten(&s, 1.0).unwrap();
    assert!((v - exact).abs() < 1e-6, "{v} vs {exact}");
}

#[test]
fn spectrum_converges_in_basis_size() {
    let a = eigen_spectrum(&disk2(96)).unwrap();
    let b = eigen_spectrum(&disk2(128)).unwrap();
    for k in 0..=64 {
        assert!((a.values()[k] - b.values()[k]).abs() <= 1e-7);
    }
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= p * y;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= nrm);
        cols.push(v);
    }
    cols
}

#[test]
fn residuals_and_unitary_invariance() {
    let d = Domain::polygon(vec![[-1.0, -0.5], [1.5, -1.0], [0.5, 1.2], [-0.8, 0.9]]).unwrap();
    let m = assemble_galerkin(&Window::gaussian(), &d, 32, &QuadSpec::default(), 1e-9).unwrap();
    let n = 32;
    let (vals, vecs) = eigen_decomposition(&m).unwrap();
    let norm = vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for (lam, v) in vals.iter().zip(&vecs) {
        let r: f64 = (0..n)
            .map(|i| ((0..n).map(|j| m.entry(i, j) * v[j]).sum::<Complex64>() - v[i] * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(r <= 1e-9 * norm);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = random_unitary(n, &mut rng);
    // (U M U*)_{ij} = Σ_{kl} U_{ik} M_{kl} conj(U_{jl}), with U's columns in `u`
    let at = |i: usize, k: usize| u[k][i];
    let mut rot = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    acc += at(i, k) * m.entry(k, l) * at(j, l).conj();
                }
            }
            rot[i * n + j] = acc;
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = (rot[i * n + j] + rot[j * n + i].conj()) * 0.5;
            rot[i * n + j] = avg;
            rot[j * n + i] = avg.conj();
        }
        rot[i * n + i].im = 0.0;
    }
    let rm = OperatorMatrix::from_entries(rot, n, Window::gaussian(), d.clone(), 1e-9).unwrap();
    let a = eigen_spectrum(&m).unwrap();
    let b = eigen_spectrum(&rm).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn trace_is_monotone_in_basis_size() {
    let d = Domain::rect([-0.5, -1.0], [1.5, 2.0]).unwrap();
    let w = Window::hermite(1);
    let mut prev = 0.0;
    for n in [4, 8, 16, 32] {
        let m = assemble_galerkin(&w, &d, n, &QuadSpec::default(), 1e-9).unwrap();
        let (tr, _) = trace_identities(&m);
        assert!(tr >= prev - 1e-12 && tr <= d.measure() + 1e-9, "N={n}: {tr}");
        prev = tr;
        let s = eigen_spectrum(&m).unwrap();
        assert!(s.values()[0] <= 1.0);
    }
}

#[test]
fn sampled_window_matches_closed_form() {
    let d = Domain::disk([0.3, -0.2], 1.0).unwrap();
    let g = Window::gaussian();
    let sampled = Window::sample_of(&g, 6.0, 0.05).unwrap();
    let a = eigen_spectrum(&assemble_galerkin(&g, &d, 16, &QuadSpec::default(), 1e-9).unwrap()).unwrap();
    let b = eigen_spectrum(&assemble_galerkin(&sampled, &d, 16, &QuadSpec::default(), 1e-8).unwrap()).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn radial_gaussian_matrices_are_diagonal() {
    for r in [0.5, 1.5, 3.0] {
        let d = Domain::disk([0.0, 0.0], r).unwrap();
        let m = assemble_galerkin(&Window::gaussian(), &d, 48, &QuadSpec::default(), 1e-9).unwrap();
        for i in 0..48 {
            for j in 0..48 {
                if i != j {
                    assert!(m.entry(i, j).norm() < 1e-10);
                }
            }
        }
    }
}
