//! Returning cones: the set of points on a cycle's start wall whose
//! trajectories follow the cycle back to that wall.
//!
//! Every branching orthant along the cycle contributes one linear
//! inequality per alternative exit variable; together with the sign
//! constraints of the wall's octant they cut out a polyhedral cone
//! `{y : R y >= 0}`. Redundant rows are pruned by a per-row feasibility
//! test: exact vertex enumeration on the 2-D slice when the wall is
//! three-dimensional, a small linear program otherwise.

use std::fmt;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::CycleSpec;
use crate::maps::{check_step, compose_maps, wall_map, FractionalLinearMap, MapError};
use crate::network::{GlassNetwork, Wall};
use crate::polygon::{project_to_slice, SlicePolygon};

/// Default membership tolerance, relative to `|y|_1`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

const LP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("slice polygons need a three-dimensional wall, got dimension {0}")]
    NotPlanar(usize),
    #[error("denominator changes sign across the polygon (projective fold)")]
    ProjectiveFold,
    #[error("image ray does not meet the slice plane")]
    MissesSlice,
    #[error("map dimension {map} does not match polygon dimension 3")]
    Dimension { map: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// One inequality `coeffs . y >= 0` in wall coordinates, with the step of
/// the cycle and the alternative exit variable that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeRow {
    pub coeffs: DVector<f64>,
    pub step: usize,
    pub variable: usize,
}

impl ConeRow {
    fn scale(&self) -> f64 {
        self.coeffs.amax()
    }

    /// Row value with the coefficients scaled to unit max-norm.
    pub fn normalized_value(&self, y: &DVector<f64>) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            0.0
        } else {
            self.coeffs.dot(y) / s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeShape {
    Empty,
    /// Non-empty but without interior.
    Degenerate,
    Proper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Interior => "interior",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturningCone {
    pub wall: Wall,
    /// Octant signs in wall coordinates.
    pub signs: DVector<f64>,
    /// Retained rows after pruning.
    pub rows: Vec<ConeRow>,
    /// Every row generated, before pruning.
    pub all_rows: Vec<ConeRow>,
    pub shape: ConeShape,
}

impl ReturningCone {
    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// Constraint matrix of the retained rows.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(self.rows.len(), d, |i, j| self.rows[i].coeffs[j])
    }

    pub fn contains(&self, y: &DVector<f64>) -> Membership {
        cone_contains(self, y, MEMBERSHIP_TOL)
    }

    /// Text listing of the retained rows with their origin.
    pub fn report(&self) -> String {
        let mut out = format!(
            "wall: {}\noctant signs: {}\nshape: {:?}\nrows generated: {}\nrows retained: {}\n",
            self.wall,
            fmt_signs(self.signs.as_slice()),
            self.shape,
            self.all_rows.len(),
            self.rows.len()
        );
        for r in &self.rows {
            out.push_str(&format!(
                "  step {} alt y{}: [{}] . y >= 0\n",
                r.step,
                r.variable + 1,
                r.coeffs
                    .iter()
                    .map(|v| crate::report::fmt_num(*v))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        out
    }
}

fn fmt_signs(s: &[f64]) -> String {
    s.iter().map(|v| if *v > 0.0 { '+' } else { '-' }).collect()
}

/// Builds the returning cone of `cycle` on its start wall.
pub fn returning_cone(net: &GlassNetwork, cycle: &CycleSpec) -> Result<ReturningCone, MapError> {
    if cycle.dim() != net.dim() {
        return Err(MapError::CycleDimension {
            cycle: cycle.dim(),
            net: net.dim(),
        });
    }
    let wall = cycle.start_wall();
    let mut product = FractionalLinearMap::identity(net.dim());
    let mut all_rows = Vec::new();
    for (k, ((from, to), &j)) in cycle.steps().zip(cycle.switch_sequence()).enumerate() {
        check_step(net, from, to, j)?;
        product = compose_maps(&wall_map(net, from, j)?, &product)?;
        let f = net.focal_point(from);
        for i in 0..net.dim() {
            if i == j || f[i] * from.sign(i) > 0.0 {
                continue;
            }
            let full: Vec<f64> = product.matrix().row(i).iter().map(|v| -v / f[i]).collect();
            all_rows.push(ConeRow {
                coeffs: DVector::from_vec(wall.reduce(&full)),
                step: k,
                variable: i,
            });
        }
    }
    let signs = DVector::from_vec(wall.reduced_signs());
    let rows = remove_redundant(&all_rows, signs.as_slice());
    let shape = cone_shape(&rows, signs.as_slice());
    Ok(ReturningCone {
        wall,
        signs,
        rows,
        all_rows,
        shape,
    })
}

/// Drops rows implied by the others together with the octant constraints.
/// Rows are tested in order against the rows still retained.
pub fn remove_redundant(rows: &[ConeRow], signs: &[f64]) -> Vec<ConeRow> {
    if signs.len() == 3 {
        remove_redundant_slice(rows, signs)
    } else {
        remove_redundant_lp(rows, signs)
    }
}

/// Pruning by vertex enumeration on the 2-D slice (three-dimensional walls).
pub fn remove_redundant_slice(rows: &[ConeRow], signs: &[f64]) -> Vec<ConeRow> {
    assert_eq!(signs.len(), 3);
    let sigma = [signs[0], signs[1], signs[2]];
    prune(rows, |row, others| {
        let region = others.iter().fold(SlicePolygon::octant_triangle(sigma), |p, r| {
            p.clip_halfspace(r.coeffs.as_slice())
        });
        let s = row.scale();
        region.vertices().iter().all(|v| {
            let y = region.lift(*v);
            row.coeffs.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() >= -1e-12 * s
        })
    })
}

/// Pruning by linear programming: a row is redundant when minimising it over
/// the others (on `<sigma, y> = 1`) cannot go negative.
pub fn remove_redundant_lp(rows: &[ConeRow], signs: &[f64]) -> Vec<ConeRow> {
    prune(rows, |row, others| {
        let obj: Vec<f64> = row.coeffs.iter().map(|v| v / row.scale().max(f64::MIN_POSITIVE)).collect();
        match lp_min_over_cone(&obj, others, signs) {
            Some(min) => min >= -LP_TOL,
            None => true,
        }
    })
}

fn prune(rows: &[ConeRow], redundant: impl Fn(&ConeRow, &[&ConeRow]) -> bool) -> Vec<ConeRow> {
    let mut keep = vec![true; rows.len()];
    for i in 0..rows.len() {
        if rows[i].scale() == 0.0 {
            keep[i] = false;
            continue;
        }
        let others: Vec<&ConeRow> = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && keep[*k])
            .map(|(_, r)| r)
            .collect();
        if redundant(&rows[i], &others) {
            keep[i] = false;
        }
    }
    rows.iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r.clone())
        .collect()
}

fn octant_problem(direction: OptimizationDirection, obj: &[f64], signs: &[f64]) -> (Problem, Vec<minilp::Variable>) {
    let mut lp = Problem::new(direction);
    let vars: Vec<_> = signs
        .iter()
        .zip(obj)
        .map(|(s, c)| {
            let bounds = if *s > 0.0 {
                (0.0, f64::INFINITY)
            } else {
                (f64::NEG_INFINITY, 0.0)
            };
            lp.add_var(*c, bounds)
        })
        .collect();
    let norm: Vec<_> = vars.iter().zip(signs).map(|(v, s)| (*v, *s)).collect();
    lp.add_constraint(&norm, ComparisonOp::Eq, 1.0);
    (lp, vars)
}

/// `min obj . y` over the cone cut by `rows` on the slice; `None` when that
/// set is empty.
fn lp_min_over_cone(obj: &[f64], rows: &[&ConeRow], signs: &[f64]) -> Option<f64> {
    let (mut lp, vars) = octant_problem(OptimizationDirection::Minimize, obj, signs);
    for r in rows {
        let s = r.scale();
        let terms: Vec<_> = vars.iter().zip(r.coeffs.iter()).map(|(v, c)| (*v, c / s)).collect();
        lp.add_constraint(&terms, ComparisonOp::Ge, 0.0);
    }
    lp.solve().ok().map(|sol| sol.objective())
}

/// Classifies the cone by the largest margin `t` with every normalised
/// constraint `>= t` on the slice.
pub fn cone_shape(rows: &[ConeRow], signs: &[f64]) -> ConeShape {
    let d = signs.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..d).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let t = lp.add_var(1.0, (-1.0, 1.0));
    let norm: Vec<_> = vars.iter().zip(signs).map(|(v, s)| (*v, *s)).collect();
    lp.add_constraint(&norm, ComparisonOp::Eq, 1.0);
    for (v, s) in vars.iter().zip(signs) {
        lp.add_constraint(&[(*v, *s), (t, -1.0)], ComparisonOp::Ge, 0.0);
    }
    for r in rows {
        let s = r.scale();
        if s == 0.0 {
            continue;
        }
        let mut terms: Vec<_> = vars.iter().zip(r.coeffs.iter()).map(|(v, c)| (*v, c / s)).collect();
        terms.push((t, -1.0));
        lp.add_constraint(&terms, ComparisonOp::Ge, 0.0);
    }
    match lp.solve() {
        Ok(sol) if sol.objective() > LP_TOL => ConeShape::Proper,
        Ok(sol) if sol.objective() >= -LP_TOL => ConeShape::Degenerate,
        _ => ConeShape::Empty,
    }
}

/// Interior when every octant and row constraint exceeds `tol |y|_1`;
/// outside when some constraint is below `-tol |y|_1`; boundary otherwise.
pub fn cone_contains(cone: &ReturningCone, y: &DVector<f64>, tol: f64) -> Membership {
    assert_eq!(y.len(), cone.dim(), "point must be in wall coordinates");
    let thr = tol * y.lp_norm(1);
    let values = cone
        .signs
        .iter()
        .zip(y.iter())
        .map(|(s, v)| s * v)
        .chain(cone.rows.iter().map(|r| r.normalized_value(y)));
    let mut verdict = Membership::Interior;
    for v in values {
        if v < -thr {
            return Membership::Outside;
        }
        if v <= thr {
            verdict = Membership::Boundary;
        }
    }
    verdict
}

fn sigma3(signs: &DVector<f64>) -> Result<[f64; 3], ConeError> {
    if signs.len() != 3 {
        return Err(ConeError::NotPlanar(signs.len()));
    }
    Ok([signs[0], signs[1], signs[2]])
}

/// The cone's trace on the slice `<sigma, y> = 1`.
pub fn cone_to_polygon(cone: &ReturningCone) -> Result<SlicePolygon, ConeError> {
    let sigma = sigma3(&cone.signs)?;
    if cone.shape == ConeShape::Empty {
        return Ok(SlicePolygon::empty(sigma));
    }
    Ok(cone
        .rows
        .iter()
        .fold(SlicePolygon::octant_triangle(sigma), |p, r| {
            p.clip_halfspace(r.coeffs.as_slice())
        }))
}

/// Image of a slice polygon under a reduced map, re-projected to the slice.
/// Lines map to lines, so the image is the hull of the vertex images.
pub fn map_polygon(m: &FractionalLinearMap, poly: &SlicePolygon) -> Result<SlicePolygon, ConeError> {
    if m.dim() != 3 {
        return Err(ConeError::Dimension { map: m.dim() });
    }
    let sigma = poly.sigma();
    let mut images = Vec::with_capacity(poly.vertices().len());
    for v in poly.vertices() {
        let y = DVector::from_column_slice(&poly.lift(*v));
        if !(m.denominator(&y) > 0.0) {
            return Err(ConeError::ProjectiveFold);
        }
        let image = m.apply(&y).ok_or(ConeError::ProjectiveFold)?;
        let p = project_to_slice(image.as_slice(), &sigma).ok_or(ConeError::MissesSlice)?;
        images.push([p[0], p[1]]);
    }
    Ok(SlicePolygon::from_points(&images, sigma))
}
