//! Convex polygons on the normalisation slice `<sigma, y> = 1` of a
//! three-dimensional octant, stored in the two coordinates left after
//! dropping the first one.

use std::collections::BTreeMap;

/// Tolerance for snapping vertices and deciding which side of a line a
/// point is on.
pub const SNAP: f64 = 1e-12;
/// Polygons with smaller area have empty interior.
pub const AREA_TOL: f64 = 1e-12;

pub type Point2 = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolygonShape {
    Empty,
    Point,
    Segment,
    Polygon,
}

/// Convex polygon, vertices counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePolygon {
    vertices: Vec<Point2>,
    sigma: [f64; 3],
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn close(a: Point2, b: Point2) -> bool {
    (a[0] - b[0]).abs() <= SNAP && (a[1] - b[1]).abs() <= SNAP
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, with
/// near-duplicate points merged and collinear points dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut uniq: Vec<Point2> = Vec::with_capacity(pts.len());
    for p in pts {
        if !uniq.iter().any(|q| close(*q, p)) {
            uniq.push(p);
        }
    }
    if uniq.len() <= 2 {
        return uniq;
    }
    let turn_tol = |o: Point2, a: Point2, b: Point2| {
        let len = ((a[0] - o[0]).hypot(a[1] - o[1])) * ((b[0] - o[0]).hypot(b[1] - o[1]));
        cross(o, a, b) <= SNAP * len.max(SNAP)
    };
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &uniq {
        while lower.len() >= 2 && turn_tol(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in uniq.iter().rev() {
        while upper.len() >= 2 && turn_tol(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Normalises `y` onto `<sigma, y> = 1` and drops the first coordinate.
/// `None` when the ray through `y` does not meet the slice.
pub fn project_to_slice(y: &[f64], sigma: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(y.len(), sigma.len());
    let s: f64 = y.iter().zip(sigma).map(|(a, b)| a * b).sum();
    if !(s > 0.0) || !s.is_finite() {
        return None;
    }
    Some(y[1..].iter().map(|v| v / s).collect())
}

/// Inverse of [`project_to_slice`] on the slice plane.
pub fn lift_from_slice(p: &[f64], sigma: &[f64]) -> Vec<f64> {
    assert_eq!(p.len() + 1, sigma.len());
    let rest: f64 = p.iter().zip(&sigma[1..]).map(|(a, b)| a * b).sum();
    let mut y = Vec::with_capacity(sigma.len());
    y.push((1.0 - rest) / sigma[0]);
    y.extend_from_slice(p);
    y
}

impl SlicePolygon {
    /// Builds the convex hull of `points`.
    pub fn from_points(points: &[Point2], sigma: [f64; 3]) -> Self {
        Self {
            vertices: convex_hull(points),
            sigma,
        }
    }

    pub fn empty(sigma: [f64; 3]) -> Self {
        Self {
            vertices: Vec::new(),
            sigma,
        }
    }

    /// The whole octant: images of the three signed unit vectors.
    pub fn octant_triangle(sigma: [f64; 3]) -> Self {
        let corners: Vec<Point2> = (0..3)
            .map(|i| {
                let mut e = [0.0; 3];
                e[i] = sigma[i];
                let p = project_to_slice(&e, &sigma).expect("unit vector meets slice");
                [p[0], p[1]]
            })
            .collect();
        Self::from_points(&corners, sigma)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn sigma(&self) -> [f64; 3] {
        self.sigma
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        0.5 * (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
    }

    pub fn shape(&self) -> PolygonShape {
        match self.vertices.len() {
            0 => PolygonShape::Empty,
            1 => PolygonShape::Point,
            2 => PolygonShape::Segment,
            _ if self.area() <= AREA_TOL => PolygonShape::Segment,
            _ => PolygonShape::Polygon,
        }
    }

    pub fn has_interior(&self) -> bool {
        self.shape() == PolygonShape::Polygon
    }

    pub fn centroid(&self) -> Option<Point2> {
        if self.vertices.is_empty() {
            return None;
        }
        let k = self.vertices.len() as f64;
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        Some([sx / k, sy / k])
    }

    /// Point of the slice plane in reduced coordinates.
    pub fn lift(&self, p: Point2) -> [f64; 3] {
        let y = lift_from_slice(&p, &self.sigma);
        [y[0], y[1], y[2]]
    }

    /// Keeps the part where `a u + b v + c >= 0` (Sutherland-Hodgman step).
    pub fn clip(&self, a: f64, b: f64, c: f64) -> Self {
        let v = &self.vertices;
        let norm = a.hypot(b).max(c.abs()).max(f64::MIN_POSITIVE);
        let side = |p: Point2| {
            let d = (a * p[0] + b * p[1] + c) / norm;
            if d.abs() <= SNAP {
                0.0
            } else {
                d
            }
        };
        let mut out: Vec<Point2> = Vec::with_capacity(v.len() + 1);
        for i in 0..v.len() {
            let (s, e) = (v[i], v[(i + 1) % v.len()]);
            let (ds, de) = (side(s), side(e));
            if ds >= 0.0 {
                out.push(s);
            }
            if (ds > 0.0 && de < 0.0) || (ds < 0.0 && de > 0.0) {
                let t = ds / (ds - de);
                out.push([s[0] + (e[0] - s[0]) * t, s[1] + (e[1] - s[1]) * t]);
            }
        }
        Self::from_points(&out, self.sigma)
    }

    /// Keeps the part where `r . lift(p) >= 0`.
    pub fn clip_halfspace(&self, r: &[f64]) -> Self {
        let (a, b, c) = halfspace_on_slice(r, &self.sigma);
        self.clip(a, b, c)
    }

    /// Intersection with another convex polygon.
    pub fn intersect(&self, other: &Self) -> Self {
        match other.shape() {
            PolygonShape::Polygon => {}
            _ => return Self::empty(self.sigma),
        }
        let w = &other.vertices;
        let mut out = self.clone();
        for i in 0..w.len() {
            if out.vertices.is_empty() {
                break;
            }
            let (p, q) = (w[i], w[(i + 1) % w.len()]);
            // Left of p -> q.
            let a = -(q[1] - p[1]);
            let b = q[0] - p[0];
            out = out.clip(a, b, -(a * p[0] + b * p[1]));
        }
        out
    }

    /// Inside or within `tol` of the boundary.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let v = &self.vertices;
        match v.len() {
            0 => false,
            1 => close(v[0], p) || ((v[0][0] - p[0]).hypot(v[0][1] - p[1]) <= tol),
            _ => (0..v.len()).all(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                cross(a, b, p) >= -tol * len
            }),
        }
    }

    /// Rows `label,index,x,y`; the ring is closed by repeating the first
    /// vertex.
    pub fn csv_rows(&self, label: &str) -> String {
        let mut out = String::new();
        let v = &self.vertices;
        for (i, p) in v.iter().chain(v.first()).enumerate() {
            out.push_str(&format!("{label},{i},{},{}\n", p[0], p[1]));
        }
        out
    }
}

/// Coefficients `(a, b, c)` with `r . lift(u, v) = a u + b v + c`.
pub fn halfspace_on_slice(r: &[f64], sigma: &[f64; 3]) -> (f64, f64, f64) {
    let k = r[0] / sigma[0];
    (r[1] - k * sigma[1], r[2] - k * sigma[2], k)
}

pub const POLYGON_CSV_HEADER: &str = "polygon,vertex,x,y\n";

/// Writes labelled polygons as one CSV file.
pub fn polygons_to_csv<'a>(polys: impl IntoIterator<Item = (&'a str, &'a SlicePolygon)>) -> String {
    let mut out = String::from(POLYGON_CSV_HEADER);
    for (label, p) in polys {
        out.push_str(&p.csv_rows(label));
    }
    out
}

/// Reads a polygon CSV back into open rings keyed by label.
pub fn parse_polygon_csv(text: &str) -> Result<BTreeMap<String, Vec<Point2>>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(POLYGON_CSV_HEADER.trim_end()) {
        return Err("bad polygon CSV header".into());
    }
    let mut rings: BTreeMap<String, Vec<Point2>> = BTreeMap::new();
    for (ln, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(format!("row {}: expected 4 fields", ln + 2));
        }
        let idx: usize = f[1].parse().map_err(|e| format!("row {}: {e}", ln + 2))?;
        let x: f64 = f[2].parse().map_err(|e| format!("row {}: {e}", ln + 2))?;
        let y: f64 = f[3].parse().map_err(|e| format!("row {}: {e}", ln + 2))?;
        let ring = rings.entry(f[0].to_string()).or_default();
        if idx != ring.len() {
            return Err(format!("row {}: vertex index out of sequence", ln + 2));
        }
        ring.push([x, y]);
    }
    for (label, ring) in rings.iter_mut() {
        if ring.len() > 1 {
            let last = ring.pop().expect("non-empty");
            if last != ring[0] {
                return Err(format!("polygon {label} is not a closed ring"));
            }
        }
    }
    Ok(rings)
}
