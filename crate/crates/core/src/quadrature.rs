//! Gauss–Legendre nodes and planar cubature rules (disk, sector, rectangle, triangle).

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        // recompute derivative at the converged node
        let mut p0 = 1.0;
        let mut p1 = 0.0;
        for j in 0..n {
            let p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
        }
        if (z * z - 1.0).abs() > 0.0 {
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// A planar cubature rule: points with weights.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }

    pub fn append(&mut self, other: Rule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }

    /// Image of the rule under `z ↦ factor·z`.
    pub fn scaled(mut self, factor: f64) -> Rule {
        for p in &mut self.points {
            p[0] *= factor;
            p[1] *= factor;
        }
        let jac = factor * factor;
        for w in &mut self.weights {
            *w *= jac;
        }
        self
    }
}

/// Annular sector `{c + ρ e^{iθ}: r0 ≤ ρ ≤ r1, θ0 ≤ θ ≤ θ1}`.
///
/// Radial Gauss–Legendre in `panels` equal pieces. A full turn uses the
/// periodic trapezoid rule in angle (exact for trigonometric polynomials of
/// degree below `n_ang`); partial sectors use Gauss–Legendre in angle.
pub fn polar_rule(
    center: [f64; 2],
    (r0, r1): (f64, f64),
    (th0, th1): (f64, f64),
    n_rad: usize,
    panels: usize,
    n_ang: usize,
) -> Rule {
    let full = ((th1 - th0) - 2.0 * PI).abs() < 1e-14;
    let (angles, aw): (Vec<f64>, Vec<f64>) = if full {
        let h = 2.0 * PI / n_ang as f64;
        ((0..n_ang).map(|j| th0 + h * j as f64).collect(), vec![h; n_ang])
    } else {
        gauss_legendre_interval(n_ang, th0, th1)
    };
    let panels = panels.max(1);
    let dr = (r1 - r0) / panels as f64;
    let mut rule = Rule::default();
    for p in 0..panels {
        let (rs, rw) = gauss_legendre_interval(n_rad, r0 + dr * p as f64, r0 + dr * (p + 1) as f64);
        for (r, wr) in rs.iter().zip(&rw) {
            for (th, wt) in angles.iter().zip(&aw) {
                rule.points.push([center[0] + r * th.cos(), center[1] + r * th.sin()]);
                rule.weights.push(wr * wt * r);
            }
        }
    }
    rule
}

/// Tensor Gauss–Legendre on an axis-aligned rectangle, split into panels no
/// wider than `max_panel`.
pub fn rect_rule(corner: [f64; 2], widths: [f64; 2], order: usize, max_panel: f64) -> Rule {
    let nx = (widths[0] / max_panel).ceil().max(1.0) as usize;
    let ny = (widths[1] / max_panel).ceil().max(1.0) as usize;
    let mut xs = Vec::new();
    let mut wx = Vec::new();
    for i in 0..nx {
        let a = corner[0] + widths[0] * i as f64 / nx as f64;
        let b = corner[0] + widths[0] * (i + 1) as f64 / nx as f64;
        let (x, w) = gauss_legendre_interval(order, a, b);
        xs.extend(x);
        wx.extend(w);
    }
    let mut ys = Vec::new();
    let mut wy = Vec::new();
    for j in 0..ny {
        let a = corner[1] + widths[1] * j as f64 / ny as f64;
        let b = corner[1] + widths[1] * (j + 1) as f64 / ny as f64;
        let (y, w) = gauss_legendre_interval(order, a, b);
        ys.extend(y);
        wy.extend(w);
    }
    let mut rule = Rule::default();
    for (x, a) in xs.iter().zip(&wx) {
        for (y, b) in ys.iter().zip(&wy) {
            rule.points.push([*x, *y]);
            rule.weights.push(a * b);
        }
    }
    rule
}

/// Collapsed (Duffy) Gauss–Legendre rule on a triangle with `order²` points,
/// exact for polynomials of total degree `2·order − 2`.
pub fn triangle_rule(a: [f64; 2], b: [f64; 2], c: [f64; 2], order: usize) -> Rule {
    let (u, wu) = gauss_legendre_interval(order, 0.0, 1.0);
    let area2 = ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
    let mut rule = Rule::default();
    for (s, ws) in u.iter().zip(&wu) {
        for (t, wt) in u.iter().zip(&wu) {
            // (s, t) ∈ [0,1]² ↦ barycentric (s(1−t), st)
            let l1 = s * (1.0 - t);
            let l2 = s * t;
            let l0 = 1.0 - l1 - l2;
            rule.points.push([
                l0 * a[0] + l1 * b[0] + l2 * c[0],
                l0 * a[1] + l1 * b[1] + l2 * c[1],
            ]);
            rule.weights.push(ws * wt * s * area2);
        }
    }
    rule
}

/// Triangle rule after splitting into congruent pieces of diameter at most `max_edge`.
pub fn triangle_rule_refined(a: [f64; 2], b: [f64; 2], c: [f64; 2], order: usize, max_edge: f64) -> Rule {
    let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
    let longest = d(a, b).max(d(b, c)).max(d(c, a));
    let k = (longest / max_edge).ceil().max(1.0) as usize;
    if k == 1 {
        return triangle_rule(a, b, c, order);
    }
    // uniform k×k subdivision in barycentric coordinates
    let at = |i: usize, j: usize| {
        let s = i as f64 / k as f64;
        let t = j as f64 / k as f64;
        [
            a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
            a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
        ]
    };
    let mut rule = Rule::default();
    for i in 0..k {
        for j in 0..k - i {
            rule.append(triangle_rule(at(i, j), at(i + 1, j), at(i, j + 1), order));
            if i + j + 1 < k {
                rule.append(triangle_rule(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), order));
            }
        }
    }
    rule
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
pub fn triangulate(vertices: &[[f64; 2]]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let mut tris = Vec::with_capacity(vertices.len().saturating_sub(2));
    let mut guard = 0;
    while idx.len() > 3 && guard < 10 * vertices.len() * vertices.len() {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let ip = idx[(i + n - 1) % n];
            let ic = idx[i];
            let inx = idx[(i + 1) % n];
            let (p, c, q) = (vertices[ip], vertices[ic], vertices[inx]);
            if cross(p, c, q) <= 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ip || j == ic || j == inx {
                    return false;
                }
                let v = vertices[j];
                cross(p, c, v) >= 0.0 && cross(c, q, v) >= 0.0 && cross(q, p, v) >= 0.0
            });
            if blocked {
                continue;
            }
            tris.push([ip, ic, inx]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            // collinear leftovers; drop the flattest vertex
            let n = idx.len();
            let i = (0..n)
                .min_by(|&a, &b| {
                    let ca = cross(vertices[idx[(a + n - 1) % n]], vertices[idx[a]], vertices[idx[(a + 1) % n]]).abs();
                    let cb = cross(vertices[idx[(b + n - 1) % n]], vertices[idx[b]], vertices[idx[(b + 1) % n]]).abs();
                    ca.total_cmp(&cb)
                })
                .unwrap_or(0);
            idx.remove(i);
        }
    }
    if idx.len() == 3 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}
