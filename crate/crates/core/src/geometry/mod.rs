//! Compact planar domains and the geometric quantities entering the bounds.

mod boundary;
mod level_set;
mod mollify;

use std::f64::consts::PI;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{polar_rule, rect_rule, triangle_rule_refined, triangulate, Rule};

pub use boundary::{boundary_length_in_ball, kappa, kappa_estimate, KappaEstimate, Piece};
pub use level_set::{level_set_by_marching, level_set_measure, prop23_constant};
pub use mollify::mollification_defect;

/// Shape description, also the serialized form of a [`Domain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum Shape {
    /// Zero-measure placeholder.
    Empty,
    Disk { center: [f64; 2], radius: f64 },
    Rect { corner: [f64; 2], widths: [f64; 2] },
    /// Simple polygon, counterclockwise.
    Polygon { vertices: Vec<[f64; 2]> },
    /// `{c + ρe^{iθ}: ρ ≤ radius, θ0 ≤ θ ≤ θ1}` with `0 < θ1 − θ0 ≤ 2π`.
    Sector { center: [f64; 2], radius: f64, theta0: f64, theta1: f64 },
    /// `factor · base`.
    Dilated { base: Box<Domain>, factor: f64 },
}

/// A compact domain with cached measure and perimeter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct Domain {
    shape: Shape,
    measure: f64,
    perimeter: f64,
}

impl TryFrom<Shape> for Domain {
    type Error = Error;

    fn try_from(s: Shape) -> Result<Self> {
        match s {
            Shape::Empty => Ok(Domain::empty()),
            Shape::Disk { center, radius } => Domain::disk(center, radius),
            Shape::Rect { corner, widths } => Domain::rect(corner, widths),
            Shape::Polygon { vertices } => Domain::polygon(vertices),
            Shape::Sector {
                center,
                radius,
                theta0,
                theta1,
            } => Domain::sector(center, radius, theta0, theta1),
            Shape::Dilated { base, factor } => Domain::dilated(*base, factor),
        }
    }
}

impl From<Domain> for Shape {
    fn from(d: Domain) -> Shape {
        d.shape
    }
}

/// Cubature orders for integrals over a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    pub radial: usize,
    pub angular: usize,
    pub triangle_order: usize,
    pub rect_order: usize,
    /// Largest panel (rectangles) or triangle edge (polygons).
    pub max_panel: f64,
    /// Largest radial panel for disks and sectors.
    pub radial_panel: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            radial: 64,
            angular: 128,
            triangle_order: 10,
            rect_order: 12,
            max_panel: 0.5,
            radial_panel: 2.0,
        }
    }
}

impl QuadSpec {
    /// Every order doubled, used for error estimates.
    pub fn doubled(&self) -> QuadSpec {
        QuadSpec {
            radial: 2 * self.radial,
            angular: 2 * self.angular,
            triangle_order: 2 * self.triangle_order,
            rect_order: 2 * self.rect_order,
            ..*self
        }
    }
}

fn finite2(p: [f64; 2]) -> bool {
    p[0].is_finite() && p[1].is_finite()
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let on_seg = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_seg(c, d, a))
        || (d2 == 0.0 && on_seg(c, d, b))
        || (d3 == 0.0 && on_seg(a, b, c))
        || (d4 == 0.0 && on_seg(a, b, d))
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            v[i][0] * v[j][1] - v[j][0] * v[i][1]
        })
        .sum::<f64>()
        / 2.0
}

impl Domain {
    pub fn empty() -> Self {
        Domain {
            shape: Shape::Empty,
            measure: 0.0,
            perimeter: 0.0,
        }
    }

    /// Closed disk; `radius = 0` yields a degenerate (empty-measure) domain.
    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self> {
        if !finite2(center) || !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("disk needs a finite radius ≥ 0, got {radius}")));
        }
        if radius == 0.0 {
            return Ok(Domain::empty());
        }
        Ok(Domain {
            shape: Shape::Disk { center, radius },
            measure: PI * radius * radius,
            perimeter: 2.0 * PI * radius,
        })
    }

    pub fn rect(corner: [f64; 2], widths: [f64; 2]) -> Result<Self> {
        if !finite2(corner) || !finite2(widths) || widths[0] < 0.0 || widths[1] < 0.0 {
            return Err(Error::Domain("rectangle needs finite nonnegative widths".into()));
        }
        if widths[0] == 0.0 || widths[1] == 0.0 {
            return Err(Error::DegenerateDomain("rectangle with zero width".into()));
        }
        Ok(Domain {
            shape: Shape::Rect { corner, widths },
            measure: widths[0] * widths[1],
            perimeter: 2.0 * (widths[0] + widths[1]),
        })
    }

    pub fn unit_square() -> Self {
        Domain::rect([0.0, 0.0], [1.0, 1.0]).expect("unit square")
    }

    /// Simple polygon; clockwise input is reoriented.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.iter().any(|v| !finite2(*v)) {
            return Err(Error::Domain("polygon has non-finite vertices".into()));
        }
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::DegenerateDomain("polygon needs at least three vertices".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::DegenerateDomain(format!("repeated vertex at index {i}")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) {
                    return Err(Error::DegenerateDomain(format!("polygon edges {i} and {j} intersect")));
                }
            }
        }
        let area = signed_area(&vertices);
        if area.abs() <= 1e-14 * vertices.iter().map(|v| v[0].abs() + v[1].abs()).fold(1.0, f64::max).powi(2) {
            return Err(Error::DegenerateDomain("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let perimeter = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum();
        Ok(Domain {
            shape: Shape::Polygon { vertices },
            measure: area.abs(),
            perimeter,
        })
    }

    /// Polygon from CSV rows `x,y` with a header row.
    pub fn polygon_from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut vertices = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse("polygon CSV needs columns x,y".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("polygon CSV: {e}")))
            };
            vertices.push([get(0)?, get(1)?]);
        }
        Domain::polygon(vertices)
    }

    pub fn sector(center: [f64; 2], radius: f64, theta0: f64, theta1: f64) -> Result<Self> {
        let span = theta1 - theta0;
        if !finite2(center) || !(radius > 0.0) || !radius.is_finite() || !(span > 0.0) || span > 2.0 * PI + 1e-12 {
            return Err(Error::Domain("sector needs radius > 0 and 0 < θ1 − θ0 ≤ 2π".into()));
        }
        let full = (span - 2.0 * PI).abs() <= 1e-12;
        if full {
            return Domain::disk(center, radius);
        }
        Ok(Domain {
            shape: Shape::Sector {
                center,
                radius,
                theta0,
                theta1,
            },
            measure: 0.5 * radius * radius * span,
            perimeter: radius * span + 2.0 * radius,
        })
    }

    /// Upper half of a disk.
    pub fn half_disk(center: [f64; 2], radius: f64) -> Result<Self> {
        Domain::sector(center, radius, 0.0, PI)
    }

    /// `factor · base` kept symbolically.
    pub fn dilated(base: Domain, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Domain(format!("dilation factor must be > 0, got {factor}")));
        }
        let measure = base.measure * factor * factor;
        let perimeter = base.perimeter * factor;
        Ok(Domain {
            shape: Shape::Dilated {
                base: Box::new(base),
                factor,
            },
            measure,
            perimeter,
        })
    }

    /// `R · self` as a concrete shape of the same kind.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("dilation factor must be > 0, got {r}")));
        }
        let s = |p: [f64; 2]| [p[0] * r, p[1] * r];
        match &self.shape {
            Shape::Empty => Ok(Domain::empty()),
            Shape::Disk { center, radius } => Domain::disk(s(*center), radius * r),
            Shape::Rect { corner, widths } => Domain::rect(s(*corner), s(*widths)),
            Shape::Polygon { vertices } => Domain::polygon(vertices.iter().map(|v| s(*v)).collect()),
            Shape::Sector {
                center,
                radius,
                theta0,
                theta1,
            } => Domain::sector(s(*center), radius * r, *theta0, *theta1),
            Shape::Dilated { base, factor } => base.dilate(factor * r),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn is_degenerate(&self) -> bool {
        self.measure == 0.0
    }

    pub fn label(&self) -> String {
        match &self.shape {
            Shape::Empty => "empty".into(),
            Shape::Disk { center, radius } => format!("disk(c=({}, {}), R={radius})", center[0], center[1]),
            Shape::Rect { corner, widths } => {
                format!("rect(({}, {}), {}×{})", corner[0], corner[1], widths[0], widths[1])
            }
            Shape::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
            Shape::Sector { radius, theta0, theta1, .. } => format!("sector(R={radius}, [{theta0}, {theta1}])"),
            Shape::Dilated { base, factor } => format!("{factor}·{}", base.label()),
        }
    }

    /// Whether the domain is convex (disks, rectangles, convex polygons, sectors up to π).
    pub fn is_convex(&self) -> bool {
        match &self.shape {
            Shape::Empty | Shape::Disk { .. } | Shape::Rect { .. } => true,
            Shape::Sector { theta0, theta1, .. } => theta1 - theta0 <= PI + 1e-12,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let c = vertices[(i + 2) % n];
                    (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) >= -1e-12
                })
            }
            Shape::Dilated { base, .. } => base.is_convex(),
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match &self.shape {
            Shape::Empty => ([0.0, 0.0], [0.0, 0.0]),
            Shape::Disk { center, radius } | Shape::Sector { center, radius, .. } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Rect { corner, widths } => (*corner, [corner[0] + widths[0], corner[1] + widths[1]]),
            Shape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
            Shape::Dilated { base, factor } => {
                let (lo, hi) = base.bounding_box();
                ([lo[0] * factor, lo[1] * factor], [hi[0] * factor, hi[1] * factor])
            }
        }
    }

    /// Indicator of the closed domain.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match &self.shape {
            Shape::Empty => false,
            Shape::Disk { center, radius } => (p[0] - center[0]).hypot(p[1] - center[1]) <= *radius,
            Shape::Rect { corner, widths } => {
                p[0] >= corner[0] && p[0] <= corner[0] + widths[0] && p[1] >= corner[1] && p[1] <= corner[1] + widths[1]
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                        if p[0] < x {
                            inside = !inside;
                        }
                    }
                }
                inside || self.distance_to_boundary(p) == 0.0
            }
            Shape::Sector {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let rho = dx.hypot(dy);
                if rho > *radius {
                    return false;
                }
                if rho == 0.0 {
                    return true;
                }
                let ang = (dy.atan2(dx) - theta0).rem_euclid(2.0 * PI);
                ang <= theta1 - theta0 + 1e-15 || self.distance_to_boundary(p) == 0.0
            }
            Shape::Dilated { base, factor } => base.contains([p[0] / factor, p[1] / factor]),
        }
    }

    /// Boundary as segments and circular arcs.
    pub fn boundary(&self) -> Vec<Piece> {
        match &self.shape {
            Shape::Empty => Vec::new(),
            Shape::Disk { center, radius } => vec![Piece::Arc {
                center: *center,
                radius: *radius,
                theta0: 0.0,
                theta1: 2.0 * PI,
            }],
            Shape::Rect { corner, widths } => {
                let [x, y] = *corner;
                let [w, h] = *widths;
                let v = [[x, y], [x + w, y], [x + w, y + h], [x, y + h]];
                (0..4).map(|i| Piece::Segment { a: v[i], b: v[(i + 1) % 4] }).collect()
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| Piece::Segment {
                        a: vertices[i],
                        b: vertices[(i + 1) % n],
                    })
                    .collect()
            }
            Shape::Sector {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let at = |t: f64| [center[0] + radius * t.cos(), center[1] + radius * t.sin()];
                vec![
                    Piece::Segment { a: *center, b: at(*theta0) },
                    Piece::Arc {
                        center: *center,
                        radius: *radius,
                        theta0: *theta0,
                        theta1: *theta1,
                    },
                    Piece::Segment { a: at(*theta1), b: *center },
                ]
            }
            Shape::Dilated { base, factor } => base.boundary().into_iter().map(|p| p.scaled(*factor)).collect(),
        }
    }

    /// Distance from `p` to the boundary.
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        match &self.shape {
            Shape::Disk { center, radius } => ((p[0] - center[0]).hypot(p[1] - center[1]) - radius).abs(),
            Shape::Dilated { base, factor } => factor * base.distance_to_boundary([p[0] / factor, p[1] / factor]),
            _ => self
                .boundary()
                .iter()
                .map(|piece| piece.distance(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Negative inside, positive outside.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let d = self.distance_to_boundary(p);
        if self.contains(p) {
            -d
        } else {
            d
        }
    }

    /// Cubature rule over the domain.
    pub fn quadrature_rule(&self, spec: &QuadSpec) -> Rule {
        match &self.shape {
            Shape::Empty => Rule::default(),
            Shape::Disk { center, radius } => {
                let panels = (radius / spec.radial_panel).ceil().max(1.0) as usize;
                polar_rule(*center, (0.0, *radius), (0.0, 2.0 * PI), spec.radial, panels, spec.angular)
            }
            Shape::Sector {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let panels = (radius / spec.radial_panel).ceil().max(1.0) as usize;
                let n_ang = ((spec.angular as f64) * (theta1 - theta0) / (2.0 * PI)).ceil().max(8.0) as usize;
                polar_rule(*center, (0.0, *radius), (*theta0, *theta1), spec.radial, panels, n_ang)
            }
            Shape::Rect { corner, widths } => rect_rule(*corner, *widths, spec.rect_order, spec.max_panel),
            Shape::Polygon { vertices } => {
                let mut rule = Rule::default();
                for t in triangulate(vertices) {
                    rule.append(triangle_rule_refined(
                        vertices[t[0]],
                        vertices[t[1]],
                        vertices[t[2]],
                        spec.triangle_order,
                        spec.max_panel,
                    ));
                }
                rule
            }
            Shape::Dilated { base, factor } => {
                let inner = QuadSpec {
                    max_panel: spec.max_panel / factor,
                    radial_panel: spec.radial_panel / factor,
                    ..*spec
                };
                base.quadrature_rule(&inner).scaled(*factor)
            }
        }
    }
}

/// Measure, perimeter, regularity and level-set data of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub measure: f64,
    pub perimeter: f64,
    pub eta: f64,
    pub kappa: f64,
    /// `(r, H¹({d(·, ∂Ω) = r}))`.
    pub level_set_table: Vec<(f64, f64)>,
}

impl GeometrySummary {
    /// Summary with κ from the default boundary/radius sampling.
    pub fn compute(dom: &Domain, eta: f64, radii: &[f64]) -> Result<Self> {
        let kappa = kappa(dom, eta, 256, 64)?;
        let level_set_table = radii
            .iter()
            .map(|&r| level_set_measure(dom, r).map(|m| (r, m)))
            .collect::<Result<_>>()?;
        Ok(GeometrySummary {
            measure: dom.measure(),
            perimeter: dom.perimeter(),
            eta,
            kappa,
            level_set_table,
        })
    }

    /// Summary with explicitly given κ (e.g. a closed form), no level sets.
    pub fn with_kappa(dom: &Domain, eta: f64, kappa: f64) -> Result<Self> {
        if !(eta > 0.0) || !(kappa > 0.0) {
            return Err(Error::Domain("eta and kappa must be positive".into()));
        }
        Ok(GeometrySummary {
            measure: dom.measure(),
            perimeter: dom.perimeter(),
            eta,
            kappa,
            level_set_table: Vec::new(),
        })
    }
}
