//! Dense symmetric eigensolver (Householder tridiagonalization + implicit QL)
//! and its use on Hermitian matrices through the real block embedding
//! `[[A, −B], [B, A]]` of `A + iB`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const QL_MAX_SWEEPS: usize = 60;

/// Householder reduction of the symmetric matrix `v` (row-major `n × n`) to
/// tridiagonal form. On return `d` is the diagonal, `e[1..]` the subdiagonal
/// and `v` the accumulated orthogonal transform.
fn tred2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)` accumulating into `v`.
fn tql2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_SWEEPS {
                    return Err(Error::Convergence {
                        routine: "tql2",
                        iterations: QL_MAX_SWEEPS,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues (ascending) and column eigenvectors of a real symmetric matrix.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, n, &mut d, &mut e);
    tql2(&mut v, n, &mut d, &mut e)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let vals = order.iter().map(|&i| d[i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (c, &i) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + c] = v[k * n + i];
        }
    }
    Ok((vals, vecs))
}

/// Hermitian eigendecomposition of the row-major `n × n` matrix `h`.
///
/// Returns eigenvalues in decreasing order and the matching orthonormal
/// eigenvectors (`vectors[k]` belongs to `values[k]`).
pub fn hermitian_eigen(h: &[Complex64], n: usize) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // symmetrize so round-off asymmetry cannot leak into the embedding
            let z = (h[i * n + j] + h[j * n + i].conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + j + n] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let (vals, vecs) = symmetric_eigen(&a, m)?;
    let scale = vals.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-9 * scale;

    // Every eigenvalue of the embedding is doubled; the pair (u; v), (−v; u)
    // maps to u + iv and i(u + iv). Keep one complex vector per pair by
    // orthogonalizing within clusters of (near) equal eigenvalues.
    let mut values: Vec<f64> = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut cluster_start = 0;
    for c in (0..m).rev() {
        if values.len() == n {
            break;
        }
        let lam = vals[c];
        if cluster_start == vectors.len() || (values[cluster_start] - lam).abs() > cluster_tol {
            cluster_start = vectors.len();
        }
        let mut cand: Vec<Complex64> = (0..n).map(|k| Complex64::new(vecs[k * m + c], vecs[(k + n) * m + c])).collect();
        for _ in 0..2 {
            for q in &vectors[cluster_start..] {
                let proj: Complex64 = q.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in cand.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            for x in cand.iter_mut() {
                *x /= norm;
            }
            values.push(lam);
            vectors.push(cand);
        }
    }
    if values.len() != n {
        return Err(Error::Convergence {
            routine: "hermitian_eigen",
            iterations: m,
        });
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            h[i * n + i] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[i * n + j] = z;
                h[j * n + i] = z.conj();
            }
        }
        h
    }

    #[test]
    fn real_symmetric_small() {
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let (vals, _) = symmetric_eigen(&a, 3).unwrap();
        let s2 = 2f64.sqrt();
        for (v, e) in vals.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian_residuals_and_orthonormality() {
        for &n in &[1usize, 2, 7, 40] {
            let h = random_hermitian(n, n as u64);
            let (vals, vecs) = hermitian_eigen(&h, n).unwrap();
            let norm = vals.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
            for w in vals.windows(2) {
                assert!(w[0] >= w[1]);
            }
            for (lam, v) in vals.iter().zip(&vecs) {
                for i in 0..n {
                    let mv: Complex64 = (0..n).map(|j| h[i * n + j] * v[j]).sum();
                    assert!((mv - v[i] * lam).norm() < 1e-12 * norm.max(1.0));
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let ip: Complex64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x.conj() * y).sum();
                    let e = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - e).norm() < 1e-12, "{a},{b}: {ip}");
                }
            }
        }
    }

    #[test]
    fn degenerate_eigenvalues_keep_independent_vectors() {
        // identity ⊕ 2·identity in a rotated complex basis
        let n = 6;
        let mut h = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            h[i * n + i] = Complex64::new(if i < 3 { 1.0 } else { 2.0 }, 0.0);
        }
        let (vals, vecs) = hermitian_eigen(&h, n).unwrap();
        assert_eq!(vals.iter().filter(|v| (**v - 2.0).abs() < 1e-14).count(), 3);
        for a in 0..n {
            for b in a + 1..n {
                let ip: Complex64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x.conj() * y).sum();
                assert!(ip.norm() < 1e-12);
            }
        }
    }
}
