//! Fractional-linear maps `y -> B y / (1 + <psi, y>)` between orthant
//! boundaries, their composition, and the reduced return map of a cycle.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::CycleSpec;
use crate::network::{GlassNetwork, OrthantCode, Wall};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("focal component y{} is zero in orthant {code}", index + 1)]
    ZeroFocal { code: OrthantCode, index: usize },
    #[error("cannot drop coordinate y{}: it is not structurally zero on the domain", .0 + 1)]
    NotStructural(usize),
    #[error("transition {from} -> {to} is not realised by the flow")]
    NotAnEdge { from: OrthantCode, to: OrthantCode },
    #[error("cycle dimension {cycle} does not match network dimension {net}")]
    CycleDimension { cycle: usize, net: usize },
}

/// `M(y) = B y / (1 + <psi, y>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalLinearMap {
    b: DMatrix<f64>,
    psi: DVector<f64>,
}

impl FractionalLinearMap {
    pub fn new(b: DMatrix<f64>, psi: DVector<f64>) -> Result<Self, MapError> {
        if !b.is_square() || b.nrows() != psi.len() {
            return Err(MapError::Dimension(format!(
                "B is {}x{}, psi has {} entries",
                b.nrows(),
                b.ncols(),
                psi.len()
            )));
        }
        Ok(Self { b, psi })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            b: DMatrix::identity(n, n),
            psi: DVector::zeros(n),
        }
    }

    /// A purely linear map (`psi = 0`).
    pub fn linear(b: DMatrix<f64>) -> Self {
        let n = b.nrows();
        Self::new(b, DVector::zeros(n)).expect("square matrix")
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn psi(&self) -> &DVector<f64> {
        &self.psi
    }

    pub fn denominator(&self, y: &DVector<f64>) -> f64 {
        1.0 + self.psi.dot(y)
    }

    /// Image of `y`, or `None` where the denominator vanishes.
    pub fn apply(&self, y: &DVector<f64>) -> Option<DVector<f64>> {
        let d = self.denominator(y);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(&self.b * y / d)
    }

    pub fn apply_slice(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.apply(&DVector::from_column_slice(y))
            .map(|v| v.as_slice().to_vec())
    }
}

/// Map carrying a trajectory across orthant `entered` until variable `j`
/// reaches zero: `B = I - f e_j^T / f_j`, `psi = -e_j / f_j`, with `f` the
/// focal point of `entered`.
pub fn wall_map(
    net: &GlassNetwork,
    entered: OrthantCode,
    j: usize,
) -> Result<FractionalLinearMap, MapError> {
    let n = net.dim();
    if entered.dim() != n || j >= n {
        return Err(MapError::Dimension(format!(
            "orthant {entered} / switching index {j} in dimension {n}"
        )));
    }
    let f = net.focal_point(entered);
    let fj = f[j];
    if fj == 0.0 {
        return Err(MapError::ZeroFocal {
            code: entered,
            index: j,
        });
    }
    let mut b = DMatrix::identity(n, n);
    for i in 0..n {
        b[(i, j)] -= f[i] / fj;
    }
    let mut psi = DVector::zeros(n);
    psi[j] = -1.0 / fj;
    Ok(FractionalLinearMap { b, psi })
}

/// `outer ∘ inner`: `B = B_outer B_inner`, `psi = psi_inner + B_inner^T psi_outer`.
pub fn compose_maps(
    outer: &FractionalLinearMap,
    inner: &FractionalLinearMap,
) -> Result<FractionalLinearMap, MapError> {
    if outer.dim() != inner.dim() {
        return Err(MapError::Dimension(format!(
            "composing {}-dimensional map after {}-dimensional map",
            outer.dim(),
            inner.dim()
        )));
    }
    Ok(FractionalLinearMap {
        b: &outer.b * &inner.b,
        psi: &inner.psi + inner.b.tr_mul(&outer.psi),
    })
}

/// Removes row and column `drop` of `B` and entry `drop` of `psi`.
///
/// When `input_on_wall` is false the dropped input coordinate must not
/// influence the other outputs or the denominator.
pub fn reduce_map(
    map: &FractionalLinearMap,
    drop: usize,
    input_on_wall: bool,
) -> Result<FractionalLinearMap, MapError> {
    let n = map.dim();
    if drop >= n || n < 2 {
        return Err(MapError::Dimension(format!(
            "cannot drop coordinate {drop} of a {n}-dimensional map"
        )));
    }
    if !input_on_wall {
        let column_used = (0..n).any(|i| i != drop && map.b[(i, drop)] != 0.0);
        if column_used || map.psi[drop] != 0.0 {
            return Err(MapError::NotStructural(drop));
        }
    }
    Ok(FractionalLinearMap {
        b: map.b.clone().remove_row(drop).remove_column(drop),
        psi: map.psi.clone().remove_row(drop),
    })
}

/// Return map of a cycle, both in full dimension and reduced to the
/// coordinates of its start wall.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleMap {
    pub wall: Wall,
    /// One map per step, in trajectory order.
    pub wall_maps: Vec<FractionalLinearMap>,
    pub full: FractionalLinearMap,
    /// `(A, phi)` on the non-wall variables in ascending index order.
    pub reduced: FractionalLinearMap,
}

impl CycleMap {
    pub fn a(&self) -> &DMatrix<f64> {
        self.reduced.matrix()
    }

    pub fn phi(&self) -> &DVector<f64> {
        self.reduced.psi()
    }
}

/// Checks that the flow in orthant `from` really leaves towards `to`.
pub(crate) fn check_step(net: &GlassNetwork, from: OrthantCode, to: OrthantCode, j: usize) -> Result<(), MapError> {
    if net.focal_point(from)[j] * from.sign(j) < 0.0 {
        Ok(())
    } else {
        Err(MapError::NotAnEdge { from, to })
    }
}

/// Composes the wall maps around `cycle`, starting on its start wall, and
/// reduces the result by the wall coordinate.
pub fn cycle_map(net: &GlassNetwork, cycle: &CycleSpec) -> Result<CycleMap, MapError> {
    if cycle.dim() != net.dim() {
        return Err(MapError::CycleDimension {
            cycle: cycle.dim(),
            net: net.dim(),
        });
    }
    let wall = cycle.start_wall();
    let mut wall_maps = Vec::with_capacity(cycle.len());
    let mut full = FractionalLinearMap::identity(net.dim());
    for ((from, to), &j) in cycle.steps().zip(cycle.switch_sequence()) {
        check_step(net, from, to, j)?;
        let m = wall_map(net, from, j)?;
        full = compose_maps(&m, &full)?;
        wall_maps.push(m);
    }
    debug_assert!(full.b.row(wall.variable).iter().all(|v| *v == 0.0));
    let reduced = reduce_map(&full, wall.variable, true)?;
    Ok(CycleMap {
        wall,
        wall_maps,
        full,
        reduced,
    })
}
