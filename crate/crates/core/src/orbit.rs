//! Periodic orbits carried by a cycle: fixed points of the return map on
//! eigen-rays, their stability and their period.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::cones::{returning_cone, Membership, ReturningCone};
use crate::eigen::{real_eigenpairs, EigenError, EigenPair, Spectrum};
use crate::graph::CycleSpec;
use crate::maps::{cycle_map, CycleMap, MapError};
use crate::network::GlassNetwork;
use crate::report::{fmt_dvec, fmt_matrix, fmt_num};

/// Relative tolerance for comparing eigenvalue moduli.
pub const MODULUS_TOL: f64 = 1e-9;

/// Relative tolerance for deciding `lambda == 1`.
const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("eigenvalue {lambda} > 1 but <phi, v> = 0: degenerate direction")]
    DegenerateDirection { lambda: f64 },
    #[error("a period needs an eigenvalue above 1, got {0}")]
    NoPeriod(f64),
    #[error("eigen index {index} out of range for {len} real eigenvalues")]
    BadIndex { index: usize, len: usize },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FixedPointOutcome {
    /// Non-zero fixed point on the eigen-ray.
    Point(DVector<f64>),
    /// `lambda = 1`: the origin is the only fixed point on the ray.
    OriginOnly,
    Absent,
}

impl FixedPointOutcome {
    pub fn point(&self) -> Option<&DVector<f64>> {
        match self {
            FixedPointOutcome::Point(y) => Some(y),
            _ => None,
        }
    }
}

fn is_unit(lambda: f64) -> bool {
    (lambda - 1.0).abs() <= UNIT_TOL
}

/// `y* = (lambda - 1) v / <phi, v>` on the ray of `pair` when `lambda > 1`.
pub fn fixed_point_on_cycle(
    phi: &DVector<f64>,
    pair: &EigenPair,
) -> Result<FixedPointOutcome, OrbitError> {
    let lambda = pair.value;
    if is_unit(lambda) {
        return Ok(FixedPointOutcome::OriginOnly);
    }
    if lambda < 1.0 {
        return Ok(FixedPointOutcome::Absent);
    }
    let d = phi.dot(&pair.vector);
    if d.abs() <= 1e-14 * phi.amax().max(1.0) {
        return Err(OrbitError::DegenerateDirection { lambda });
    }
    Ok(FixedPointOutcome::Point(&pair.vector * ((lambda - 1.0) / d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    AsymptoticallyStable,
    NeutrallyStable,
    Unstable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::AsymptoticallyStable => "asymptotically stable",
            Stability::NeutrallyStable => "neutrally stable",
            Stability::Unstable => "unstable",
        })
    }
}

/// Compares the chosen real eigenvalue against the moduli of every other
/// eigenvalue, complex ones included.
pub fn classify_stability(spectrum: &Spectrum, chosen: usize) -> Result<Stability, OrbitError> {
    let len = spectrum.real.len();
    let lambda = spectrum
        .real
        .get(chosen)
        .ok_or(OrbitError::BadIndex { index: chosen, len })?
        .value;
    let others = spectrum
        .moduli()
        .into_iter()
        .enumerate()
        .filter(|(k, _)| *k != chosen)
        .map(|(_, m)| m);
    let mut verdict = Stability::AsymptoticallyStable;
    for m in others {
        let tol = MODULUS_TOL * lambda.abs().max(m).max(1.0);
        if lambda < m - tol {
            return Ok(Stability::Unstable);
        }
        if lambda <= m + tol {
            verdict = Stability::NeutrallyStable;
        }
    }
    Ok(verdict)
}

/// Period of the orbit carried by eigenvalue `lambda`.
pub fn orbit_period(lambda: f64) -> Result<f64, OrbitError> {
    if lambda > 1.0 {
        Ok(lambda.ln())
    } else {
        Err(OrbitError::NoPeriod(lambda))
    }
}

/// Membership of the ray through `v` (either orientation) in the closed cone.
fn ray_membership(cone: &ReturningCone, v: &DVector<f64>) -> Membership {
    let plus = cone.contains(v);
    let minus = cone.contains(&-v);
    plus.min(minus)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitAnalysis {
    pub cycle: CycleSpec,
    pub map: CycleMap,
    pub spectrum: Spectrum,
    pub cone: ReturningCone,
    /// Index into `spectrum.real` of the eigen-ray carrying the orbit.
    pub carrier: Option<usize>,
    pub fixed_point: FixedPointOutcome,
    /// Cone verdict for the carrying ray; `Boundary` flags a limiting case.
    pub membership: Option<Membership>,
    pub stability: Option<Stability>,
    pub period: Option<f64>,
}

impl OrbitAnalysis {
    pub fn a(&self) -> &DMatrix<f64> {
        self.map.a()
    }

    pub fn phi(&self) -> &DVector<f64> {
        self.map.phi()
    }

    pub fn carrier_pair(&self) -> Option<&EigenPair> {
        self.carrier.map(|i| &self.spectrum.real[i])
    }

    pub fn feasible(&self) -> bool {
        matches!(self.fixed_point, FixedPointOutcome::Point(_))
            && self.membership.is_some_and(|m| m != Membership::Outside)
    }

    /// `|M(y*) - y*|_inf` for the reported fixed point.
    pub fn residual(&self) -> Option<f64> {
        let y = self.fixed_point.point()?;
        let image = self.map.reduced.apply(y)?;
        Some((image - y).amax())
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "cycle: {}\nstart wall: {}\n",
            self.cycle, self.map.wall
        ));
        out.push_str("A:\n");
        out.push_str(&fmt_matrix(self.a(), "  "));
        out.push_str(&format!("phi: {}\n", fmt_dvec(self.phi())));
        out.push_str("real eigenpairs:\n");
        for (k, p) in self.spectrum.real.iter().enumerate() {
            out.push_str(&format!(
                "  lambda{} = {}  v = {}  cone: {}\n",
                k + 1,
                fmt_num(p.value),
                fmt_dvec(&p.vector),
                ray_membership(&self.cone, &p.vector)
            ));
        }
        if !self.spectrum.complex.is_empty() {
            let mods: Vec<String> = self
                .spectrum
                .complex
                .iter()
                .map(|z| fmt_num(z.norm()))
                .collect();
            out.push_str(&format!("complex eigenvalue moduli: {}\n", mods.join(", ")));
        }
        out.push_str(&format!(
            "cone rows retained: {} of {}\n",
            self.cone.rows.len(),
            self.cone.all_rows.len()
        ));
        match self.carrier_pair() {
            Some(p) => out.push_str(&format!("carrying eigenvalue: {}\n", fmt_num(p.value))),
            None => out.push_str("carrying eigenvalue: none\n"),
        }
        match &self.fixed_point {
            FixedPointOutcome::Point(y) => {
                out.push_str(&format!("fixed point: {}\n", fmt_dvec(y)));
                if let Some(r) = self.residual() {
                    out.push_str(&format!("fixed point residual: {r:e}\n"));
                }
            }
            FixedPointOutcome::OriginOnly => out.push_str("fixed point: origin only\n"),
            FixedPointOutcome::Absent => out.push_str("fixed point: absent\n"),
        }
        match self.membership {
            Some(m) => out.push_str(&format!("cone membership: {m}\n")),
            None => out.push_str("cone membership: n/a\n"),
        }
        out.push_str(&format!("feasible: {}\n", if self.feasible() { "yes" } else { "no" }));
        match self.stability {
            Some(s) => out.push_str(&format!("stability: {s}\n")),
            None => out.push_str("stability: n/a\n"),
        }
        match self.period {
            Some(p) => out.push_str(&format!("period: {}\n", fmt_num(p))),
            None => out.push_str("period: n/a\n"),
        }
        out
    }
}

/// Full analysis of one cycle.
///
/// The carrying ray is the eigenvalue above 1 whose fixed point lies in the
/// closed cone. Failing that, it is the largest in-cone eigenvalue, which
/// carries no non-zero fixed point.
pub fn analyze_cycle(net: &GlassNetwork, cycle: &CycleSpec) -> Result<OrbitAnalysis, OrbitError> {
    let map = cycle_map(net, cycle)?;
    let cone = returning_cone(net, cycle)?;
    let spectrum = real_eigenpairs(map.a())?;

    let mut carrier = None;
    let mut fixed_point = FixedPointOutcome::Absent;
    let mut membership = None;
    for (k, pair) in spectrum.real.iter().enumerate() {
        if pair.value <= 1.0 || is_unit(pair.value) {
            continue;
        }
        let Ok(FixedPointOutcome::Point(y)) = fixed_point_on_cycle(map.phi(), pair) else {
            continue;
        };
        let m = cone.contains(&y);
        if m != Membership::Outside {
            carrier = Some(k);
            fixed_point = FixedPointOutcome::Point(y);
            membership = Some(m);
            break;
        }
    }
    if carrier.is_none() {
        if let Some((k, m)) = spectrum
            .real
            .iter()
            .enumerate()
            .map(|(k, p)| (k, ray_membership(&cone, &p.vector)))
            .find(|(_, m)| *m != Membership::Outside)
        {
            carrier = Some(k);
            membership = Some(m);
            fixed_point = match spectrum.real[k].value {
                l if is_unit(l) => FixedPointOutcome::OriginOnly,
                _ => FixedPointOutcome::Absent,
            };
        }
    }
    let stability = carrier
        .map(|k| classify_stability(&spectrum, k))
        .transpose()?;
    let period = match &fixed_point {
        FixedPointOutcome::Point(_) => Some(orbit_period(spectrum.real[carrier.unwrap()].value)?),
        _ => None,
    };
    Ok(OrbitAnalysis {
        cycle: cycle.clone(),
        map,
        spectrum,
        cone,
        carrier,
        fixed_point,
        membership,
        stability,
        period,
    })
}
