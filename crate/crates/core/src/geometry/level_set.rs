use std::f64::consts::PI;

use rayon::prelude::*;

use super::{Domain, Shape};
use crate::error::{Error, Result};

/// Clips a convex counterclockwise polygon to `{p : (p − a)·n ≥ off}`.
fn clip(poly: &[[f64; 2]], a: [f64; 2], n: [f64; 2], off: f64) -> Vec<[f64; 2]> {
    let f = |p: [f64; 2]| (p[0] - a[0]) * n[0] + (p[1] - a[1]) * n[1] - off;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let fp = f(p);
        let fq = f(q);
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn perimeter_and_area(poly: &[[f64; 2]]) -> (f64, f64) {
    let n = poly.len();
    let mut per = 0.0;
    let mut area = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        per += (q[0] - p[0]).hypot(q[1] - p[1]);
        area += p[0] * q[1] - q[0] * p[1];
    }
    (per, area.abs() / 2.0)
}

/// Length of the inner offset curve `{z ∈ Ω : d(z, ∂Ω) = r}` of a convex polygon.
fn convex_inner_offset(vertices: &[[f64; 2]], r: f64) -> f64 {
    let n = vertices.len();
    let mut poly = vertices.to_vec();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let l = (b[0] - a[0]).hypot(b[1] - a[1]);
        // inward normal of a counterclockwise edge
        let nrm = [-(b[1] - a[1]) / l, (b[0] - a[0]) / l];
        poly = clip(&poly, a, nrm, r);
        if poly.is_empty() {
            return 0.0;
        }
    }
    let (per, area) = perimeter_and_area(&poly);
    let scale = per.max(1e-300);
    if area <= 1e-12 * scale * scale {
        // the offset set collapsed to a segment (or point): count it once
        per / 2.0
    } else {
        per
    }
}

/// `H¹({z : d(z, ∂Ω) = r})`.
///
/// Disks and convex polygons use the offset-curve closed forms; all other
/// shapes fall back to [`level_set_by_marching`] on the distance function.
pub fn level_set_measure(dom: &Domain, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("level-set radius must be positive, got {r}")));
    }
    match dom.shape() {
        Shape::Empty => Ok(0.0),
        Shape::Disk { radius, .. } => {
            let inner = if r < *radius { 2.0 * PI * (radius - r) } else { 0.0 };
            Ok(2.0 * PI * (radius + r) + inner)
        }
        Shape::Rect { corner, widths } => {
            let [x, y] = *corner;
            let [w, h] = *widths;
            let v = [[x, y], [x + w, y], [x + w, y + h], [x, y + h]];
            Ok(dom.perimeter() + 2.0 * PI * r + convex_inner_offset(&v, r))
        }
        Shape::Polygon { vertices } if dom.is_convex() => {
            Ok(dom.perimeter() + 2.0 * PI * r + convex_inner_offset(vertices, r))
        }
        Shape::Dilated { base, factor } => Ok(factor * level_set_measure(base, r / factor)?),
        _ => {
            let (lo, hi) = dom.bounding_box();
            let diam = (hi[0] - lo[0]).max(hi[1] - lo[1]) + 2.0 * r;
            Ok(level_set_by_marching(dom, r, diam / 2000.0))
        }
    }
}

/// Length of `{d(·, ∂Ω) = r}` by marching squares on the sampled distance
/// function with grid step `step`.
pub fn level_set_by_marching(dom: &Domain, r: f64, step: f64) -> f64 {
    let (lo, hi) = dom.bounding_box();
    let pad = r + 2.0 * step;
    let x0 = lo[0] - pad;
    let y0 = lo[1] - pad;
    let nx = ((hi[0] - lo[0] + 2.0 * pad) / step).ceil() as usize + 1;
    let ny = ((hi[1] - lo[1] + 2.0 * pad) / step).ceil() as usize + 1;
    let f: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let p = [x0 + step * (k / ny) as f64, y0 + step * (k % ny) as f64];
            dom.distance_to_boundary(p) - r
        })
        .collect();
    let at = |i: usize, j: usize| f[i * ny + j];
    (0..nx - 1)
        .into_par_iter()
        .map(|i| {
            let mut len = 0.0;
            for j in 0..ny - 1 {
                let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
                let pos = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
                let mut pts: Vec<[f64; 2]> = Vec::with_capacity(4);
                for e in 0..4 {
                    let (a, b) = (c[e], c[(e + 1) % 4]);
                    if (a < 0.0) != (b < 0.0) {
                        let t = a / (a - b);
                        let (p, q) = (pos[e], pos[(e + 1) % 4]);
                        pts.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    }
                }
                let seg = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
                match pts.len() {
                    2 => len += seg(pts[0], pts[1]),
                    4 => {
                        // saddle: pair crossings by the sign of the cell centre
                        let centre = c.iter().sum::<f64>() / 4.0;
                        if (centre < 0.0) == (c[0] < 0.0) {
                            len += seg(pts[0], pts[3]) + seg(pts[1], pts[2]);
                        } else {
                            len += seg(pts[0], pts[1]) + seg(pts[2], pts[3]);
                        }
                    }
                    _ => {}
                }
            }
            len * step
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// Smallest `C` with `level_set_measure(r) ≤ C·(perimeter/κ)·(1 + r/η)` over `radii`.
pub fn prop23_constant(dom: &Domain, kappa: f64, eta: f64, radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::EmptyInput("no radii for the level-set check".into()));
    }
    let mut c: f64 = 0.0;
    for &r in radii {
        let rhs = dom.perimeter() / kappa * (1.0 + r / eta);
        c = c.max(level_set_measure(dom, r)? / rhs);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_level_sets() {
        let d = Domain::disk([0.0, 0.0], 2.0).unwrap();
        assert!((level_set_measure(&d, 0.5).unwrap() - 8.0 * PI).abs() < 1e-12);
        let m = level_set_by_marching(&d, 0.5, 0.004);
        assert!((m - 8.0 * PI).abs() < 1e-3 * 8.0 * PI, "{m}");
        let u = Domain::disk([0.0, 0.0], 1.0).unwrap();
        assert!((level_set_measure(&u, 1.5).unwrap() - 5.0 * PI).abs() < 1e-12);
        assert!((level_set_by_marching(&u, 1.5, 0.004) - 5.0 * PI).abs() < 1e-3 * 5.0 * PI);
    }

    #[test]
    fn square_level_sets() {
        let sq = Domain::unit_square();
        let exact = 7.2 + 0.2 * PI;
        assert!((level_set_measure(&sq, 0.1).unwrap() - exact).abs() < 1e-12);
        let m = level_set_by_marching(&sq, 0.1, 0.001);
        assert!((m - exact).abs() < 1e-3 * exact, "{m} vs {exact}");
        // inner set collapses to the centre point at r = 1/2
        assert!((level_set_measure(&sq, 0.5).unwrap() - (4.0 + PI)).abs() < 1e-12);
        // thin rectangle: inner set a segment of length 2 − 2r
        let thin = Domain::rect([0.0, 0.0], [2.0, 0.4]).unwrap();
        let v = level_set_measure(&thin, 0.2).unwrap();
        assert!((v - (4.8 + 0.4 * PI + 1.6)).abs() < 1e-9, "{v}");
    }

    #[test]
    fn convex_polygon_matches_marching() {
        let tri = Domain::polygon(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]).unwrap();
        for r in [0.1, 0.4, 0.8] {
            let exact = level_set_measure(&tri, r).unwrap();
            let m = level_set_by_marching(&tri, r, 0.003);
            assert!((exact - m).abs() < 2e-3 * exact, "r={r}: {exact} vs {m}");
        }
        // inner offset of a triangle is similar with inradius ρ = 1: perimeter 12·(1 − r)
        let inner = level_set_measure(&tri, 0.4).unwrap() - 12.0 - 0.8 * PI;
        assert!((inner - 12.0 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn dilated_and_nonconvex() {
        let d = Domain::dilated(Domain::disk([0.0, 0.0], 1.0).unwrap(), 2.0).unwrap();
        assert!((level_set_measure(&d, 0.5).unwrap() - 8.0 * PI).abs() < 1e-12);
        let l = Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let v = level_set_measure(&l, 0.2).unwrap();
        // default marching against a finer grid
        let fine = level_set_by_marching(&l, 0.2, 0.0015);
        assert!((v - fine).abs() < 2e-3 * fine);
        assert!(level_set_measure(&l, -1.0).is_err());
    }

    #[test]
    fn prop23_constant_is_moderate() {
        let shapes = [
            Domain::disk([0.0, 0.0], 1.0).unwrap(),
            Domain::unit_square(),
            Domain::polygon(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]).unwrap(),
        ];
        let radii = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0];
        for d in &shapes {
            let k = crate::geometry::kappa(d, 0.25, 64, 32).unwrap();
            let c = prop23_constant(d, k, 0.25, &radii).unwrap();
            assert!(c > 0.0 && c <= 10.0, "{}: {c}", d.label());
        }
    }
}
