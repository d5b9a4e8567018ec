//! Event-driven simulation using the closed-form solution inside each
//! orthant: `y(t) = f + (y(0) - f) e^{-t}`.
//!
//! No numerical stepping takes place. Each segment's exit time and exit
//! point are computed analytically, and the switching component of the
//! exit point is set to exactly zero.

use std::fmt;

use thiserror::Error;

use crate::network::{GlassNetwork, OrthantCode, Wall};

/// Two crossing times closer than this (relative to `max(1, t)`) are
/// treated as a simultaneous crossing.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("state has {found} components, network dimension is {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("point {point:?} does not lie in the closed orthant {code}")]
    NotInOrthant { point: Vec<f64>, code: OrthantCode },
    #[error("start point {0:?} lies on a wall; an entering orthant must be supplied")]
    StartOnWall(Vec<f64>),
    #[error("non-finite state {0:?}")]
    NonFinite(Vec<f64>),
    #[error("degenerate event in orthant {code} at {point:?}: {reason}")]
    Degenerate {
        reason: DegenerateReason,
        point: Vec<f64>,
        code: OrthantCode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegenerateReason {
    /// Two variables reach zero within the tie tolerance.
    SimultaneousCrossing {
        first: usize,
        second: usize,
        t_first: f64,
        t_second: f64,
    },
    /// The flow on a wall points back out of the orthant just entered.
    SlidingWall { index: usize },
}

impl fmt::Display for DegenerateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegenerateReason::SimultaneousCrossing {
                first,
                second,
                t_first,
                t_second,
            } => write!(
                f,
                "y{} and y{} cross simultaneously (t = {t_first}, {t_second})",
                first + 1,
                second + 1
            ),
            DegenerateReason::SlidingWall { index } => {
                write!(f, "flow on wall y{} = 0 points back out", index + 1)
            }
        }
    }
}

/// One orthant-boundary crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEvent {
    /// Elapsed time since the trajectory start.
    pub time: f64,
    /// Crossing point; component `switching_index` is exactly zero.
    pub point: Vec<f64>,
    pub switching_index: usize,
    pub from: OrthantCode,
    pub to: OrthantCode,
}

impl TransitionEvent {
    pub fn wall(&self) -> Wall {
        Wall {
            variable: self.switching_index,
            from: self.from,
            to: self.to,
        }
    }
}

/// Result of following the flow out of one orthant.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Crossing {
        duration: f64,
        point: Vec<f64>,
        index: usize,
        from: OrthantCode,
        to: OrthantCode,
    },
    /// The focal point lies inside the orthant; no further switching.
    Converges { focal: Vec<f64> },
}

/// Crossing time of variable `j` from `y_j` towards focal value `f_j`
/// (opposite signs): `ln((f_j - y_j) / f_j)`.
fn crossing_time(yj: f64, fj: f64) -> f64 {
    (-yj / fj).ln_1p()
}

/// Follows the straight-line flow from `y` in orthant `code` to the next
/// wall.
///
/// `y` must lie in the closed orthant. Zero components are allowed only
/// where the flow enters the orthant (a point just placed on a wall).
pub fn next_transition(
    net: &GlassNetwork,
    y: &[f64],
    code: OrthantCode,
) -> Result<Segment, SimError> {
    let n = net.dim();
    if y.len() != n {
        return Err(SimError::Dimension {
            expected: n,
            found: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFinite(y.to_vec()));
    }
    if !code.contains_closed(y) {
        return Err(SimError::NotInOrthant {
            point: y.to_vec(),
            code,
        });
    }
    let f = net.focal_point(code);

    let mut best: Option<(usize, f64)> = None;
    let mut runner_up: Option<(usize, f64)> = None;
    for j in 0..n {
        if f[j] * code.sign(j) > 0.0 {
            continue;
        }
        if y[j] == 0.0 {
            return Err(SimError::Degenerate {
                reason: DegenerateReason::SlidingWall { index: j },
                point: y.to_vec(),
                code,
            });
        }
        let t = crossing_time(y[j], f[j]);
        match best {
            Some((_, tb)) if t >= tb => {
                if runner_up.is_none_or(|(_, tr)| t < tr) {
                    runner_up = Some((j, t));
                }
            }
            _ => {
                runner_up = best;
                best = Some((j, t));
            }
        }
    }

    let Some((j, t)) = best else {
        return Ok(Segment::Converges { focal: f.to_vec() });
    };
    if let Some((k, tk)) = runner_up {
        if (tk - t).abs() <= TIE_TOLERANCE * t.max(1.0) {
            return Err(SimError::Degenerate {
                reason: DegenerateReason::SimultaneousCrossing {
                    first: j,
                    second: k,
                    t_first: t,
                    t_second: tk,
                },
                point: y.to_vec(),
                code,
            });
        }
    }

    // e^{-t} = f_j / (f_j - y_j), computed without going through exp/ln.
    let decay = f[j] / (f[j] - y[j]);
    let mut point: Vec<f64> = f
        .iter()
        .zip(y)
        .map(|(fi, yi)| fi + (yi - fi) * decay)
        .collect();
    point[j] = 0.0;
    Ok(Segment::Crossing {
        duration: t,
        point,
        index: j,
        from: code,
        to: code.flip(j),
    })
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryEnd {
    ReachedMaxTransitions,
    ConvergedToFocalPoint {
        focal: Vec<f64>,
    },
    Degenerate {
        reason: DegenerateReason,
        point: Vec<f64>,
        code: OrthantCode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: Vec<f64>,
    pub start_orthant: OrthantCode,
    pub events: Vec<TransitionEvent>,
    pub terminal: TrajectoryEnd,
}

impl Trajectory {
    /// Orthants visited, starting with the initial one.
    pub fn orthant_path(&self) -> Vec<OrthantCode> {
        std::iter::once(self.start_orthant)
            .chain(self.events.iter().map(|e| e.to))
            .collect()
    }

    /// Events that cross `wall` in its stated direction.
    pub fn crossings_of<'a>(&'a self, wall: &'a Wall) -> impl Iterator<Item = &'a TransitionEvent> {
        self.events
            .iter()
            .filter(move |e| e.from == wall.from && e.to == wall.to)
    }

    /// CSV with header `k,t,y1..yn,j,orthant`; `k` and `j` are 1-based and
    /// `orthant` is the orthant entered.
    pub fn to_csv(&self) -> String {
        let n = self.start.len();
        let mut out = String::from("k,t");
        for i in 1..=n {
            out.push_str(&format!(",y{i}"));
        }
        out.push_str(",j,orthant\n");
        for (k, e) in self.events.iter().enumerate() {
            out.push_str(&format!("{},{}", k + 1, e.time));
            for v in &e.point {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{},{}\n", e.switching_index + 1, e.to));
        }
        out
    }
}

/// A row of a trajectory CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvEvent {
    pub k: usize,
    pub time: f64,
    pub point: Vec<f64>,
    pub switching_index: usize,
    pub orthant: OrthantCode,
}

/// Reads back the output of [`Trajectory::to_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<CsvEvent>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty trajectory file")?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols[0] != "k" || cols[1] != "t" || cols[cols.len() - 2] != "j" || cols[cols.len() - 1] != "orthant" {
        return Err(format!("bad header `{header}`"));
    }
    let n = cols.len() - 4;
    for (i, c) in cols[2..2 + n].iter().enumerate() {
        if *c != format!("y{}", i + 1) {
            return Err(format!("bad column `{c}`"));
        }
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(format!("row {}: expected {} fields", ln + 2, cols.len()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", ln + 2));
        let idx = |s: &str| s.parse::<usize>().map_err(|e| format!("row {}: {e}", ln + 2));
        let j = idx(f[n + 2])?;
        if j == 0 || j > n {
            return Err(format!("row {}: switching index out of range", ln + 2));
        }
        rows.push(CsvEvent {
            k: idx(f[0])?,
            time: num(f[1])?,
            point: f[2..2 + n].iter().map(|s| num(s)).collect::<Result<_, _>>()?,
            switching_index: j - 1,
            orthant: f[n + 3].parse().map_err(|e| format!("row {}: {e}", ln + 2))?,
        });
    }
    Ok(rows)
}

fn resolve_start(
    net: &GlassNetwork,
    y0: &[f64],
    entering: Option<OrthantCode>,
) -> Result<OrthantCode, SimError> {
    let n = net.dim();
    if y0.len() != n {
        return Err(SimError::Dimension {
            expected: n,
            found: y0.len(),
        });
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFinite(y0.to_vec()));
    }
    match (OrthantCode::of_point(y0), entering) {
        (Some(c), None) => Ok(c),
        (Some(c), Some(e)) if c == e => Ok(c),
        (None, None) => Err(SimError::StartOnWall(y0.to_vec())),
        (_, Some(e)) => {
            if e.dim() != n || !e.contains_closed(y0) {
                return Err(SimError::NotInOrthant {
                    point: y0.to_vec(),
                    code: e,
                });
            }
            Ok(e)
        }
    }
}

/// Iterates [`next_transition`] for at most `max_transitions` crossings.
///
/// `entering` is required when `y0` lies on a wall and names the orthant
/// the flow enters from there.
pub fn simulate(
    net: &GlassNetwork,
    y0: &[f64],
    entering: Option<OrthantCode>,
    max_transitions: usize,
) -> Result<Trajectory, SimError> {
    simulate_until(net, y0, entering, max_transitions, |_| false)
}

/// Like [`simulate`] but also stops right after an event for which `stop`
/// returns true; the terminal is then `ReachedMaxTransitions`.
pub fn simulate_until(
    net: &GlassNetwork,
    y0: &[f64],
    entering: Option<OrthantCode>,
    max_transitions: usize,
    mut stop: impl FnMut(&TransitionEvent) -> bool,
) -> Result<Trajectory, SimError> {
    let start_orthant = resolve_start(net, y0, entering)?;
    let mut code = start_orthant;
    let mut y = y0.to_vec();
    let mut clock = CompensatedSum::default();
    let mut events = Vec::new();
    let terminal = loop {
        if events.len() >= max_transitions {
            break TrajectoryEnd::ReachedMaxTransitions;
        }
        match next_transition(net, &y, code) {
            Ok(Segment::Crossing {
                duration,
                point,
                index,
                from,
                to,
            }) => {
                clock.add(duration);
                let event = TransitionEvent {
                    time: clock.value(),
                    point: point.clone(),
                    switching_index: index,
                    from,
                    to,
                };
                let done = stop(&event);
                events.push(event);
                y = point;
                code = to;
                if done {
                    break TrajectoryEnd::ReachedMaxTransitions;
                }
            }
            Ok(Segment::Converges { focal }) => break TrajectoryEnd::ConvergedToFocalPoint { focal },
            Err(SimError::Degenerate {
                reason,
                point,
                code,
            }) => break TrajectoryEnd::Degenerate {
                reason,
                point,
                code,
            },
            Err(e) => return Err(e),
        }
    };
    Ok(Trajectory {
        start: y0.to_vec(),
        start_orthant,
        events,
        terminal,
    })
}

/// One loop from a wall back to the same wall.
#[derive(Debug, Clone, PartialEq)]
pub struct Excursion {
    /// Orthants traversed, beginning with `wall.to` and ending with
    /// `wall.from`.
    pub path: Vec<OrthantCode>,
    pub point: Vec<f64>,
    pub duration: f64,
}

/// Starts on `wall` (entering `wall.to`) and follows the flow until it next
/// crosses `wall` in the same direction. Returns `None` when the trajectory
/// converges, degenerates, or exceeds `max_transitions` first.
pub fn first_return(
    net: &GlassNetwork,
    wall: &Wall,
    y: &[f64],
    max_transitions: usize,
) -> Result<Option<Excursion>, SimError> {
    let traj = simulate_until(net, y, Some(wall.to), max_transitions, |e| {
        e.from == wall.from && e.to == wall.to
    })?;
    let Some(last) = traj.events.last() else {
        return Ok(None);
    };
    if last.from != wall.from || last.to != wall.to {
        return Ok(None);
    }
    let mut path = traj.orthant_path();
    path.pop();
    Ok(Some(Excursion {
        path,
        point: last.point.clone(),
        duration: last.time,
    }))
}
