//! Two cycles sharing a start wall, viewed as a two-symbol system.
//!
//! Symbol `a` stands for one return to the wall along cycle `a`; the
//! region of wall points whose next returns follow a word `w0 w1 ...` is a
//! cylinder, built by alternately mapping and clipping cone polygons on the
//! slice. From the cylinders come the allowed transitions, the forbidden
//! words and the entropy of the resulting subshift. Composite word maps
//! yield periodic orbits, and a per-corner bound certifies that the origin
//! repels every ray of the regions the system keeps revisiting.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cones::{cone_to_polygon, map_polygon, returning_cone, ConeError, ConeShape, Membership, ReturningCone};
use crate::eigen::{real_eigenpairs, EigenError, Spectrum};
use crate::graph::CycleSpec;
use crate::integrator::{first_return, SimError, Trajectory};
use crate::maps::{compose_maps, cycle_map, FractionalLinearMap, MapError};
use crate::network::{GlassNetwork, OrthantCode, Wall};
use crate::orbit::{classify_stability, fixed_point_on_cycle, FixedPointOutcome, OrbitError, Stability};
use crate::polygon::{polygons_to_csv, project_to_slice, Point2, PolygonShape, SlicePolygon};
use crate::report::{fmt_num, fmt_vec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("cycles start on different walls: {0} and {1}")]
    WallMismatch(Wall, Wall),
    #[error("returning cone of cycle {0} is empty")]
    EmptyCone(u8),
    #[error("word {0:?} must be a non-empty string over {{0, 1}}")]
    BadWord(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn parse_word(word: &str) -> Result<Vec<usize>, ChaosError> {
    if word.is_empty() {
        return Err(ChaosError::BadWord(word.into()));
    }
    word.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(ChaosError::BadWord(word.into())),
        })
        .collect()
}

/// Map of a word; the first symbol acts first.
pub fn composite_map(
    word: &str,
    m0: &FractionalLinearMap,
    m1: &FractionalLinearMap,
) -> Result<FractionalLinearMap, ChaosError> {
    let maps = [m0, m1];
    let symbols = parse_word(word)?;
    let mut acc = FractionalLinearMap::identity(m0.dim());
    for s in symbols {
        acc = compose_maps(maps[s], &acc)?;
    }
    Ok(acc)
}

/// The two cycles with their cones, reduced maps and slice polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSystem {
    pub cycles: [CycleSpec; 2],
    pub wall: Wall,
    pub cones: [ReturningCone; 2],
    pub maps: [FractionalLinearMap; 2],
    pub polygons: [SlicePolygon; 2],
}

impl SymbolSystem {
    pub fn new(net: &GlassNetwork, cycle0: &CycleSpec, cycle1: &CycleSpec) -> Result<Self, ChaosError> {
        let (w0, w1) = (cycle0.start_wall(), cycle1.start_wall());
        if w0 != w1 {
            return Err(ChaosError::WallMismatch(w0, w1));
        }
        let cones = [returning_cone(net, cycle0)?, returning_cone(net, cycle1)?];
        for (s, c) in cones.iter().enumerate() {
            if c.shape == ConeShape::Empty {
                return Err(ChaosError::EmptyCone(s as u8));
            }
        }
        let maps = [cycle_map(net, cycle0)?.reduced, cycle_map(net, cycle1)?.reduced];
        let polygons = [cone_to_polygon(&cones[0])?, cone_to_polygon(&cones[1])?];
        Ok(Self {
            cycles: [cycle0.clone(), cycle1.clone()],
            wall: w0,
            cones,
            maps,
            polygons,
        })
    }

    pub fn sigma(&self) -> [f64; 3] {
        self.polygons[0].sigma()
    }

    pub fn word_map(&self, word: &str) -> Result<FractionalLinearMap, ChaosError> {
        composite_map(word, &self.maps[0], &self.maps[1])
    }

    /// Orthant walk of a word: the cycles concatenated in word order.
    pub fn word_cycle(&self, word: &str) -> Result<CycleSpec, ChaosError> {
        let symbols = parse_word(word)?;
        let mut codes: Vec<OrthantCode> = Vec::new();
        for s in symbols {
            codes.extend_from_slice(self.cycles[s].codes());
        }
        CycleSpec::new(codes).map_err(|_| ChaosError::BadWord(word.into()))
    }

    /// Slice region of points whose next returns follow `word`.
    pub fn cylinder(&self, word: &str) -> Result<SlicePolygon, ChaosError> {
        let symbols = parse_word(word)?;
        let mut region = self.polygons[symbols[0]].clone();
        for pair in symbols.windows(2) {
            if region.vertices().is_empty() {
                break;
            }
            region = map_polygon(&self.maps[pair[0]], &region)?.intersect(&self.polygons[pair[1]]);
        }
        Ok(region)
    }

    /// Cone verdicts along the word, starting from `y` in wall coordinates.
    /// Stops at the first `Outside` verdict.
    pub fn cone_chain(&self, word: &str, y: &DVector<f64>) -> Result<Vec<Membership>, ChaosError> {
        let symbols = parse_word(word)?;
        let mut verdicts = Vec::with_capacity(symbols.len());
        let mut y = y.clone();
        for s in symbols {
            let m = self.cones[s].contains(&y);
            verdicts.push(m);
            if m == Membership::Outside {
                break;
            }
            match self.maps[s].apply(&y) {
                Some(next) => y = next,
                None => break,
            }
        }
        Ok(verdicts)
    }

    /// Which cycle's cone holds `y`, if exactly one does in its interior.
    pub fn classify(&self, y: &DVector<f64>) -> Option<usize> {
        let inside: Vec<usize> = (0..2)
            .filter(|s| self.cones[*s].contains(y) == Membership::Interior)
            .collect();
        match inside.as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }

    fn symbol_of_path(&self, path: &[OrthantCode]) -> Option<usize> {
        (0..2).find(|s| self.cycles[*s].codes() == path)
    }
}

fn word_of(symbols: &[usize]) -> String {
    symbols.iter().map(|s| char::from(b'0' + *s as u8)).collect()
}

/// Allowed transitions and the words that witness them.
///
/// A two-letter word `ab` with `a != b` is allowed when its cylinder has
/// interior. A repeat `aa` is allowed when some cylinder `s a a` with
/// `s != a` has interior: a run of `a` entered from the other symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionAnalysis {
    /// `allowed[a][b]`: symbol `b` may be followed by symbol `a`.
    pub allowed: [[bool; 2]; 2],
    pub forbidden_words: Vec<String>,
    /// Cylinders consulted, keyed by word.
    pub cylinders: Vec<(String, SlicePolygon)>,
    pub entropy: f64,
}

pub fn transition_analysis(sys: &SymbolSystem) -> Result<TransitionAnalysis, ChaosError> {
    let mut allowed = [[false; 2]; 2];
    let mut cylinders = Vec::new();
    let mut forbidden_words = Vec::new();
    for first in 0..2 {
        for second in 0..2 {
            let witnesses: Vec<String> = if first == second {
                vec![word_of(&[1 - first, first, first])]
            } else {
                vec![word_of(&[first, second])]
            };
            let mut ok = false;
            for w in witnesses {
                let c = sys.cylinder(&w)?;
                ok |= c.has_interior();
                cylinders.push((w, c));
            }
            allowed[second][first] = ok;
            if !ok {
                forbidden_words.push(word_of(&[first, second]));
            }
        }
    }
    let t = DMatrix::from_fn(2, 2, |i, j| if allowed[i][j] { 1.0 } else { 0.0 });
    let radius = real_eigenpairs(&t)?.spectral_radius();
    Ok(TransitionAnalysis {
        allowed,
        forbidden_words,
        cylinders,
        entropy: radius.ln(),
    })
}

/// Fixed point of a word map on one of its eigen-rays.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeFixedPoint {
    pub word: String,
    pub spectrum: Spectrum,
    pub lambda: f64,
    pub point: DVector<f64>,
    pub slice: Option<Point2>,
    pub residual: f64,
    /// Cone verdicts of the successive iterates along the word.
    pub chain: Vec<Membership>,
    /// Verdict of the returning cone of the concatenated cycle.
    pub concatenated: Membership,
    pub stability: Stability,
    pub period: f64,
}

impl CompositeFixedPoint {
    pub fn feasible(&self) -> bool {
        self.chain.len() == self.word.len() && self.chain.iter().all(|m| *m != Membership::Outside)
    }
}

/// Fixed points of the word map for every eigenvalue above 1, feasible
/// ones first, then by descending eigenvalue.
pub fn composite_fixed_points(
    net: &GlassNetwork,
    sys: &SymbolSystem,
    word: &str,
) -> Result<Vec<CompositeFixedPoint>, ChaosError> {
    let m = sys.word_map(word)?;
    let spectrum = real_eigenpairs(m.matrix())?;
    let concat_cone = returning_cone(net, &sys.word_cycle(word)?)?;
    let mut out = Vec::new();
    for (k, pair) in spectrum.real.iter().enumerate() {
        let Ok(FixedPointOutcome::Point(y)) = fixed_point_on_cycle(m.psi(), pair) else {
            continue;
        };
        let residual = m.apply(&y).map_or(f64::INFINITY, |image| (image - &y).amax());
        out.push(CompositeFixedPoint {
            word: word.into(),
            spectrum: spectrum.clone(),
            lambda: pair.value,
            slice: project_to_slice(y.as_slice(), &sys.sigma()).map(|p| [p[0], p[1]]),
            chain: sys.cone_chain(word, &y)?,
            concatenated: concat_cone.contains(&y),
            stability: classify_stability(&spectrum, k)?,
            period: pair.value.ln(),
            point: y,
            residual,
        });
    }
    out.sort_by(|a, b| {
        b.feasible()
            .cmp(&a.feasible())
            .then(b.lambda.total_cmp(&a.lambda))
    });
    Ok(out)
}

/// One corner's contribution to the repulsion bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerBound {
    pub region: String,
    pub symbol: usize,
    pub corner: Point2,
    /// `sup k` with `|M(k Q)|_1 > k` on `(0, k)`; infinite when unbounded.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepulsionBound {
    pub threshold: f64,
    pub corners: Vec<CornerBound>,
    /// Corners where `|A Q|_1 <= 1`: the origin does not repel that ray.
    pub failures: Vec<CornerBound>,
}

/// A region of the slice together with the symbol whose map acts on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ActingRegion {
    pub name: String,
    pub symbol: usize,
    pub polygon: SlicePolygon,
}

/// Closed form for a unit-l1 point `q`: `|M(kq)|_1 > k` reduces to
/// `k < (|Aq|_1 - 1) / <phi, q>` when `<phi, q> > 0`.
pub fn ray_repulsion_bound(m: &FractionalLinearMap, q: &DVector<f64>) -> f64 {
    let gain = (m.matrix() * q).lp_norm(1);
    let d = m.psi().dot(q);
    if gain <= 1.0 {
        0.0
    } else if d > 0.0 {
        (gain - 1.0) / d
    } else {
        f64::INFINITY
    }
}

/// Minimum of the per-corner bounds over every acting region.
pub fn origin_repulsion_threshold(regions: &[ActingRegion], maps: &[FractionalLinearMap; 2]) -> RepulsionBound {
    let mut corners = Vec::new();
    let mut failures = Vec::new();
    for r in regions {
        for v in r.polygon.vertices() {
            let q = DVector::from_column_slice(&r.polygon.lift(*v));
            let q = &q / q.lp_norm(1);
            let c = CornerBound {
                region: r.name.clone(),
                symbol: r.symbol,
                corner: *v,
                bound: ray_repulsion_bound(&maps[r.symbol], &q),
            };
            if c.bound <= 0.0 {
                failures.push(c.clone());
            }
            corners.push(c);
        }
    }
    let threshold = corners.iter().map(|c| c.bound).fold(f64::INFINITY, f64::min);
    RepulsionBound {
        threshold,
        corners,
        failures,
    }
}

/// Uniform points in a convex polygon by area-weighted fan triangles.
pub fn sample_polygon(poly: &SlicePolygon, n: usize, rng: &mut impl Rng) -> Vec<Point2> {
    let v = poly.vertices();
    if v.len() < 3 {
        return Vec::new();
    }
    let tri_area = |a: Point2, b: Point2, c: Point2| {
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
    };
    let areas: Vec<f64> = (1..v.len() - 1).map(|i| tri_area(v[0], v[i], v[i + 1])).collect();
    let total: f64 = areas.iter().sum();
    (0..n)
        .map(|_| {
            let mut pick = rng.gen::<f64>() * total;
            let mut i = 0;
            while i + 1 < areas.len() && pick >= areas[i] {
                pick -= areas[i];
                i += 1;
            }
            let (a, b, c) = (v[0], v[i + 1], v[i + 2]);
            let (mut s, mut t) = (rng.gen::<f64>(), rng.gen::<f64>());
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            [
                a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
                a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
            ]
        })
        .collect()
}

/// Sampling cross-check of the repulsion threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RepulsionSampling {
    pub samples: usize,
    /// Smallest closed-form bound over the sampled interior rays.
    pub min_bound: f64,
    /// Sampled `(ray, k)` with `k < 0.99 k*` where `|M(kQ)|_1 <= k`.
    pub violations: usize,
}

pub fn sample_repulsion(
    regions: &[ActingRegion],
    maps: &[FractionalLinearMap; 2],
    threshold: f64,
    per_region: usize,
    seed: u64,
) -> RepulsionSampling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_bound = f64::INFINITY;
    let mut violations = 0;
    let mut samples = 0;
    let k_max = if threshold.is_finite() { 0.99 * threshold } else { 1.0 };
    for r in regions {
        let m = &maps[r.symbol];
        for p in sample_polygon(&r.polygon, per_region, &mut rng) {
            let q = DVector::from_column_slice(&r.polygon.lift(p));
            let q = &q / q.lp_norm(1);
            min_bound = min_bound.min(ray_repulsion_bound(m, &q));
            let k = k_max * (1.0 - rng.gen::<f64>());
            let image = m.apply(&(&q * k)).map_or(0.0, |y| y.lp_norm(1));
            if image <= k {
                violations += 1;
            }
            samples += 1;
        }
    }
    RepulsionSampling {
        samples,
        min_bound,
        violations,
    }
}

/// What one return to the start wall did.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReturnSymbol {
    Cycle(usize),
    /// A loop back to the wall along some other orthant walk.
    Other(Vec<OrthantCode>),
    /// No further return: convergence, degeneracy or transition budget.
    Stopped,
}

/// Symbols of the successive returns from `y` (wall coordinates).
pub fn observed_itinerary(
    net: &GlassNetwork,
    sys: &SymbolSystem,
    y: &DVector<f64>,
    returns: usize,
    max_transitions_per_return: usize,
) -> Result<Vec<ReturnSymbol>, ChaosError> {
    let mut out = Vec::with_capacity(returns);
    let mut full = sys.wall.embed(y.as_slice());
    for _ in 0..returns {
        match first_return(net, &sys.wall, &full, max_transitions_per_return)? {
            Some(ex) => {
                out.push(match sys.symbol_of_path(&ex.path) {
                    Some(s) => ReturnSymbol::Cycle(s),
                    None => ReturnSymbol::Other(ex.path),
                });
                full = ex.point;
                full[sys.wall.variable] = 0.0;
            }
            None => {
                out.push(ReturnSymbol::Stopped);
                break;
            }
        }
    }
    Ok(out)
}

/// Orthant walks between consecutive crossings of `wall` in a trajectory.
pub fn excursions_of(traj: &Trajectory, wall: &Wall) -> Vec<Vec<OrthantCode>> {
    let mut out = Vec::new();
    let mut current: Option<Vec<OrthantCode>> = None;
    for e in &traj.events {
        if e.from == wall.from && e.to == wall.to {
            if let Some(path) = current.take() {
                out.push(path);
            }
            current = Some(vec![e.to]);
        } else if let Some(path) = current.as_mut() {
            path.push(e.to);
        }
    }
    out
}

/// Tally of the loops a trajectory makes through the start wall. Loops
/// along neither cycle are listed as they are, never relabelled.
pub fn classify_excursions(sys: &SymbolSystem, traj: &Trajectory) -> Vec<(ReturnSymbol, usize)> {
    let mut counts: BTreeMap<ReturnSymbol, usize> = BTreeMap::new();
    for path in excursions_of(traj, &sys.wall) {
        let sym = match sys.symbol_of_path(&path) {
            Some(s) => ReturnSymbol::Cycle(s),
            None => ReturnSymbol::Other(path),
        };
        *counts.entry(sym).or_default() += 1;
    }
    counts.into_iter().collect()
}

/// Start point with components of random sign and magnitude in
/// `[0.05, 0.95)`.
pub fn random_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: f64 = rng.gen_range(0.05..0.95);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorseshoeReport {
    pub system: SymbolSystem,
    /// Named slice regions: cones, their images and intersections.
    pub polygons: Vec<(String, SlicePolygon)>,
    pub transitions: TransitionAnalysis,
    pub composites: Vec<CompositeFixedPoint>,
    pub acting_regions: Vec<ActingRegion>,
    pub repulsion: RepulsionBound,
    pub sampling: RepulsionSampling,
    /// Eigen-points plotted on the slice.
    pub marked_points: Vec<(String, Point2)>,
    /// Wall loops seen in a simulated trajectory, if one was recorded.
    pub observed: Vec<(ReturnSymbol, usize)>,
}

pub const COMPOSITE_WORDS: [&str; 4] = ["01", "10", "00", "11"];

const SAMPLES_PER_REGION: usize = 2000;

fn name(s: usize) -> String {
    format!("C{s}")
}

fn image_name(s: usize) -> String {
    format!("M{s}(C{s})")
}

/// Builds the full two-symbol analysis. `seed` drives the sampling check.
pub fn horseshoe_report(
    net: &GlassNetwork,
    cycle0: &CycleSpec,
    cycle1: &CycleSpec,
    seed: u64,
) -> Result<HorseshoeReport, ChaosError> {
    let sys = SymbolSystem::new(net, cycle0, cycle1)?;
    let images = [
        map_polygon(&sys.maps[0], &sys.polygons[0])?,
        map_polygon(&sys.maps[1], &sys.polygons[1])?,
    ];
    let mut polygons = vec![
        (name(0), sys.polygons[0].clone()),
        (name(1), sys.polygons[1].clone()),
        (image_name(0), images[0].clone()),
        (image_name(1), images[1].clone()),
        ("C0&C1".to_string(), sys.polygons[0].intersect(&sys.polygons[1])),
        ("M0(C0)&M1(C1)".to_string(), images[0].intersect(&images[1])),
    ];
    for b in 0..2 {
        for a in 0..2 {
            polygons.push((
                format!("{}&{}", image_name(b), name(a)),
                images[b].intersect(&sys.polygons[a]),
            ));
        }
    }
    let transitions = transition_analysis(&sys)?;

    let mut composites = Vec::new();
    for w in COMPOSITE_WORDS {
        if let Some(best) = composite_fixed_points(net, &sys, w)?.into_iter().next() {
            composites.push(best);
        }
    }

    let mut acting_regions = Vec::new();
    for b in 0..2 {
        for a in 0..2 {
            if transitions.allowed[a][b] {
                acting_regions.push(ActingRegion {
                    name: format!("{}&{}", image_name(b), name(a)),
                    symbol: a,
                    polygon: images[b].intersect(&sys.polygons[a]),
                });
            }
        }
    }
    let repulsion = origin_repulsion_threshold(&acting_regions, &sys.maps);
    let sampling = sample_repulsion(&acting_regions, &sys.maps, repulsion.threshold, SAMPLES_PER_REGION, seed);

    let sigma = sys.sigma();
    let mut marked_points = Vec::new();
    for s in 0..2 {
        for (k, p) in real_eigenpairs(sys.maps[s].matrix())?.real.iter().enumerate() {
            let v = if p.vector.iter().zip(sigma).map(|(a, b)| a * b).sum::<f64>() > 0.0 {
                p.vector.clone()
            } else {
                -&p.vector
            };
            if let Some(q) = project_to_slice(v.as_slice(), &sigma) {
                let inside = sys.cones[s].contains(&v) != Membership::Outside;
                if inside {
                    marked_points.push((format!("A{s} v{}", k + 1), [q[0], q[1]]));
                }
            }
        }
    }
    for c in composites.iter().filter(|c| c.feasible()) {
        if let Some(p) = c.slice {
            marked_points.push((format!("M{} fixed point", c.word), p));
        }
    }

    Ok(HorseshoeReport {
        system: sys,
        polygons,
        transitions,
        composites,
        acting_regions,
        repulsion,
        sampling,
        marked_points,
        observed: Vec::new(),
    })
}

impl HorseshoeReport {
    pub fn record_trajectory(&mut self, traj: &Trajectory) {
        self.observed = classify_excursions(&self.system, traj);
    }

    pub fn polygon(&self, name: &str) -> Option<&SlicePolygon> {
        self.polygons.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn composite(&self, word: &str) -> Option<&CompositeFixedPoint> {
        self.composites.iter().find(|c| c.word == word)
    }

    /// Every polygon, cylinders included, as one CSV.
    pub fn polygons_csv(&self) -> String {
        polygons_to_csv(
            self.polygons
                .iter()
                .chain(self.transitions.cylinders.iter())
                .map(|(n, p)| (n.as_str(), p)),
        )
    }

    pub fn marked_points_csv(&self) -> String {
        let mut out = String::from("label,x,y\n");
        for (l, p) in &self.marked_points {
            out.push_str(&format!("{l},{},{}\n", p[0], p[1]));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let sys = &self.system;
        let mut out = String::new();
        out.push_str(&format!("cycle 0: {}\ncycle 1: {}\nstart wall: {}\n", sys.cycles[0], sys.cycles[1], sys.wall));
        out.push_str(&format!("slice signs: {}\n", fmt_vec(&sys.sigma())));
        out.push_str("polygons:\n");
        for (n, p) in self.polygons.iter().chain(self.transitions.cylinders.iter()) {
            out.push_str(&format!(
                "  {n}: {} vertices, area {}, {}\n",
                p.vertices().len(),
                fmt_num(p.area()),
                shape_name(p.shape())
            ));
        }
        out.push_str("transition matrix (row = next symbol, column = current symbol):\n");
        for a in 0..2 {
            out.push_str(&format!(
                "  {} {}\n",
                u8::from(self.transitions.allowed[a][0]),
                u8::from(self.transitions.allowed[a][1])
            ));
        }
        if self.transitions.forbidden_words.is_empty() {
            out.push_str("forbidden words: none\n");
        }
        for w in &self.transitions.forbidden_words {
            out.push_str(&format!("forbidden word: {w}\n"));
        }
        out.push_str(&format!("topological entropy: {}\n", fmt_num(self.transitions.entropy)));
        out.push_str("composite fixed points:\n");
        for c in &self.composites {
            out.push_str(&format!(
                "  word {}: lambda {}, y* {}, slice {}, residual {:e}, chain [{}], concatenated cone {}, {}, {}, period {}\n",
                c.word,
                fmt_num(c.lambda),
                fmt_vec(c.point.as_slice()),
                c.slice.map_or("n/a".into(), |p| fmt_vec(&p)),
                c.residual,
                c.chain.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "),
                c.concatenated,
                if c.feasible() { "feasible" } else { "infeasible" },
                c.stability,
                fmt_num(c.period)
            ));
        }
        let regions: BTreeSet<&str> = self.repulsion.corners.iter().map(|c| c.region.as_str()).collect();
        out.push_str(&format!(
            "repulsion regions: {}\nrepulsion corners: {}\n",
            regions.into_iter().collect::<Vec<_>>().join(", "),
            self.repulsion.corners.len()
        ));
        for c in &self.repulsion.corners {
            out.push_str(&format!(
                "  {} under M{}: corner {} bound {}\n",
                c.region,
                c.symbol,
                fmt_vec(&c.corner),
                fmt_num(c.bound)
            ));
        }
        if self.repulsion.failures.is_empty() {
            out.push_str("repulsion failures: none\n");
        } else {
            out.push_str(&format!("repulsion failures: {}\n", self.repulsion.failures.len()));
        }
        out.push_str(&format!("repulsion threshold k*: {}\n", fmt_num(self.repulsion.threshold)));
        out.push_str(&format!(
            "repulsion sampling: {} rays, min bound {}, violations below 0.99 k*: {}\n",
            self.sampling.samples,
            fmt_num(self.sampling.min_bound),
            self.sampling.violations
        ));
        if !self.observed.is_empty() {
            out.push_str("observed wall loops:\n");
            for (sym, count) in &self.observed {
                let label = match sym {
                    ReturnSymbol::Cycle(s) => format!("cycle {s}"),
                    ReturnSymbol::Other(path) => format!(
                        "other walk {}",
                        path.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                    ),
                    ReturnSymbol::Stopped => "stopped".into(),
                };
                out.push_str(&format!("  {label}: {count}\n"));
            }
        }
        out.push_str("marked points:\n");
        for (l, p) in &self.marked_points {
            out.push_str(&format!("  {l}: {}\n", fmt_vec(p)));
        }
        out
    }
}

fn shape_name(s: PolygonShape) -> &'static str {
    match s {
        PolygonShape::Empty => "empty",
        PolygonShape::Point => "degenerate (point)",
        PolygonShape::Segment => "degenerate (segment)",
        PolygonShape::Polygon => "proper",
    }
}
