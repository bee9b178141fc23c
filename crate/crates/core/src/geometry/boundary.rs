use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};

/// A boundary piece: a segment or a counterclockwise circular arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Segment { a: [f64; 2], b: [f64; 2] },
    Arc { center: [f64; 2], radius: f64, theta0: f64, theta1: f64 },
}

/// Length of the overlap of `[0, len]` with the periodic interval `[s, s + w]` (mod 2π).
fn periodic_overlap(len: f64, s: f64, w: f64) -> f64 {
    if w >= 2.0 * PI {
        return len;
    }
    let s = s.rem_euclid(2.0 * PI);
    let mut total = 0.0;
    for shift in [-2.0 * PI, 0.0] {
        let lo = (s + shift).max(0.0);
        let hi = (s + shift + w).min(len);
        if hi > lo {
            total += hi - lo;
        }
    }
    total
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]),
            Piece::Arc {
                radius, theta0, theta1, ..
            } => radius * (theta1 - theta0),
        }
    }

    pub fn scaled(self, f: f64) -> Piece {
        match self {
            Piece::Segment { a, b } => Piece::Segment {
                a: [a[0] * f, a[1] * f],
                b: [b[0] * f, b[1] * f],
            },
            Piece::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => Piece::Arc {
                center: [center[0] * f, center[1] * f],
                radius: radius * f,
                theta0,
                theta1,
            },
        }
    }

    /// Point at arclength `s ∈ [0, length]`.
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        match *self {
            Piece::Segment { a, b } => {
                let l = self.length();
                let t = if l > 0.0 { s / l } else { 0.0 };
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            }
            Piece::Arc {
                center, radius, theta0, ..
            } => {
                let th = theta0 + s / radius;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
        }
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            Piece::Segment { a, b } => {
                let dx = b[0] - a[0];
                let dy = b[1] - a[1];
                let l2 = dx * dx + dy * dy;
                let t = if l2 > 0.0 {
                    (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
            }
            Piece::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let rho = dx.hypot(dy);
                let full = theta1 - theta0 >= 2.0 * PI - 1e-15;
                if full || (rho > 0.0 && (dy.atan2(dx) - theta0).rem_euclid(2.0 * PI) <= theta1 - theta0) {
                    return (rho - radius).abs();
                }
                let e0 = self.point_at(0.0);
                let e1 = self.point_at(self.length());
                (p[0] - e0[0]).hypot(p[1] - e0[1]).min((p[0] - e1[0]).hypot(p[1] - e1[1]))
            }
        }
    }

    /// `H¹(piece ∩ B_r(z))`, exactly.
    pub fn length_in_ball(&self, z: [f64; 2], r: f64) -> f64 {
        match *self {
            Piece::Segment { a, b } => {
                let dx = b[0] - a[0];
                let dy = b[1] - a[1];
                let l2 = dx * dx + dy * dy;
                if l2 == 0.0 {
                    return 0.0;
                }
                // foot of the perpendicular at parameter tc, distance p from the line
                let fx = z[0] - a[0];
                let fy = z[1] - a[1];
                let l = l2.sqrt();
                let tc = (fx * dx + fy * dy) / l2;
                let p = (fx * dy - fy * dx).abs() / l;
                if p >= r {
                    return 0.0;
                }
                let half = ((r - p) * (r + p)).sqrt() / l;
                let t0 = (tc - half).max(0.0);
                let t1 = (tc + half).min(1.0);
                if t1 > t0 {
                    (t1 - t0) * l2.sqrt()
                } else {
                    0.0
                }
            }
            Piece::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let dx = z[0] - center[0];
                let dy = z[1] - center[1];
                let d = dx.hypot(dy);
                let span = theta1 - theta0;
                if d == 0.0 {
                    return if radius <= r { radius * span } else { 0.0 };
                }
                // 1 ∓ q without cancellation, q = (ρ² + d² − r²)/(2ρd)
                let gap = radius - d;
                let one_minus_q = (r - gap) * (r + gap) / (2.0 * radius * d);
                let one_plus_q = ((radius + d) - r) * ((radius + d) + r) / (2.0 * radius * d);
                if one_minus_q <= 0.0 {
                    return 0.0;
                }
                if one_plus_q <= 0.0 {
                    return radius * span;
                }
                let half = if one_minus_q < 1.0 {
                    2.0 * (0.5 * one_minus_q).sqrt().asin()
                } else {
                    PI - 2.0 * (0.5 * one_plus_q).sqrt().asin()
                };
                let alpha = dy.atan2(dx);
                radius * periodic_overlap(span, alpha - half - theta0, 2.0 * half)
            }
        }
    }
}

/// `H¹(∂Ω ∩ B_r(z))`.
pub fn boundary_length_in_ball(dom: &Domain, z: [f64; 2], r: f64) -> f64 {
    dom.boundary().iter().map(|p| p.length_in_ball(z, r)).sum()
}

/// κ estimate with the two finest sampling levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    /// Value at the finer sampling (an upper estimate of the infimum).
    pub value: f64,
    /// Value at the coarser sampling.
    pub coarse: f64,
    pub argmin_point: [f64; 2],
    pub argmin_radius: f64,
    pub n_boundary: usize,
    pub n_radii: usize,
}

impl KappaEstimate {
    pub fn refinement_change(&self) -> f64 {
        (self.coarse - self.value).abs()
    }
}

fn sample_boundary(pieces: &[Piece], n: usize) -> Vec<[f64; 2]> {
    let total: f64 = pieces.iter().map(Piece::length).sum();
    let mut pts = Vec::with_capacity(n + 2 * pieces.len());
    for p in pieces {
        pts.push(p.point_at(0.0));
        pts.push(p.point_at(p.length()));
    }
    let h = total / n as f64;
    let mut start = 0.0;
    for p in pieces {
        let l = p.length();
        // global arclength samples k·h falling on this piece
        let k0 = (start / h).ceil() as usize;
        let mut k = k0;
        while (k as f64) * h <= start + l && k < n {
            pts.push(p.point_at((k as f64 * h - start).clamp(0.0, l)));
            k += 1;
        }
        start += l;
    }
    pts
}

/// Radii below `floor` are dropped: lengths there are dominated by round-off
/// in the coordinates.
fn radii(eta: f64, n: usize, floor: f64) -> Vec<f64> {
    let mut r: Vec<f64> = (1..=n).map(|i| eta * i as f64 / n as f64).collect();
    r.extend((1..=40).map(|j| eta * 0.5f64.powi(j)).filter(|&x| x >= floor));
    r
}

fn kappa_at(pieces: &[Piece], eta: f64, nb: usize, nr: usize) -> (f64, [f64; 2], f64) {
    let pts = sample_boundary(pieces, nb);
    let extent = pts.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let total: f64 = pieces.iter().map(Piece::length).sum();
    let rs = radii(eta, nr, 1e-7 * (extent + total));
    pts.par_iter()
        .map(|z| {
            rs.iter()
                .map(|&r| {
                    let len: f64 = pieces.iter().map(|p| p.length_in_ball(*z, r)).sum();
                    (len / r, *z, r)
                })
                .fold((f64::INFINITY, [0.0, 0.0], 0.0), |a, b| if b.0 < a.0 { b } else { a })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, [0.0, 0.0], 0.0), |a, b| if b.0 < a.0 { b } else { a })
}

/// `κ_{∂Ω,η} = inf_{z∈∂Ω, 0<r≤η} H¹(∂Ω ∩ B_r(z)) / r` over a deterministic sampling.
///
/// Boundary points are `n_boundary` equispaced arclength samples plus all piece
/// endpoints; radii are `n_radii` equispaced values in `(0, η]` plus `η·2^{−j}`,
/// `j ≤ 40`, down to 1e−7 of the boundary's size. Both sets are nested under doubling, so the estimate can only
/// decrease under refinement. The result at `(2·n_boundary, 2·n_radii)` is
/// reported together with the value at the requested sampling.
pub fn kappa_estimate(dom: &Domain, eta: f64, n_boundary: usize, n_radii: usize) -> Result<KappaEstimate> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    if n_boundary < 16 || n_radii < 16 {
        return Err(Error::Domain("kappa needs at least 16 boundary points and radii".into()));
    }
    if dom.is_degenerate() {
        return Err(Error::DegenerateDomain("kappa of an empty boundary".into()));
    }
    let pieces = dom.boundary();
    let (coarse, _, _) = kappa_at(&pieces, eta, n_boundary, n_radii);
    let (value, argmin_point, argmin_radius) = kappa_at(&pieces, eta, 2 * n_boundary, 2 * n_radii);
    Ok(KappaEstimate {
        value,
        coarse,
        argmin_point,
        argmin_radius,
        n_boundary: 2 * n_boundary,
        n_radii: 2 * n_radii,
    })
}

/// Sampled `κ_{∂Ω,η}`; see [`kappa_estimate`].
pub fn kappa(dom: &Domain, eta: f64, n_boundary: usize, n_radii: usize) -> Result<f64> {
    kappa_estimate(dom, eta, n_boundary, n_radii).map(|k| k.value)
}
