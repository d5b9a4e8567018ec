//! State-transition diagram on the n-cube and enumeration of its directed
//! cycles.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::network::{parse_code_list, GlassNetwork, NetworkError, OrthantCode, Wall};

/// Default cap on the number of cycles [`enumerate_cycles`] may return.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("cycle needs at least 2 orthants")]
    TooShort,
    #[error("orthants {0} and {1} are not adjacent on the cube")]
    NotAdjacent(OrthantCode, OrthantCode),
    #[error("orthant codes of mixed dimension in cycle")]
    MixedDimension,
    #[error("transition {0} -> {1} is not an edge of the transition graph")]
    NotAnEdge(OrthantCode, OrthantCode),
    #[error("maximum cycle length must be at least 2 (got {0})")]
    MaxLength(usize),
    #[error("more than {0} cycles; raise the cap or lower the maximum length")]
    CapExceeded(usize),
    #[error(transparent)]
    Code(#[from] NetworkError),
}

/// Directed graph on orthant codes. An edge `A -> B` exists when `A` and
/// `B` differ in bit `j` and the focal point of `A` lies on `B`'s side of
/// the wall `y_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeGraph {
    n: usize,
    edges: BTreeSet<(OrthantCode, OrthantCode)>,
    successors: Vec<Vec<OrthantCode>>,
    self_fixed: BTreeSet<OrthantCode>,
}

pub fn build_transition_graph(net: &GlassNetwork) -> CubeGraph {
    let n = net.dim();
    let mut edges = BTreeSet::new();
    let mut successors = vec![Vec::new(); 1 << n];
    let mut self_fixed = BTreeSet::new();
    for a in OrthantCode::all(n) {
        let f = net.focal_point(a);
        for j in 0..n {
            if f[j] * a.sign(j) < 0.0 {
                let b = a.flip(j);
                edges.insert((a, b));
                successors[a.index()].push(b);
            }
        }
        if successors[a.index()].is_empty() {
            self_fixed.insert(a);
        }
        successors[a.index()].sort();
    }
    CubeGraph {
        n,
        edges,
        successors,
        self_fixed,
    }
}

impl CubeGraph {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = &(OrthantCode, OrthantCode)> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: OrthantCode, b: OrthantCode) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Out-neighbours in ascending code order.
    pub fn successors(&self, a: OrthantCode) -> &[OrthantCode] {
        &self.successors[a.index()]
    }

    /// Orthants whose focal point lies inside themselves.
    pub fn self_fixed(&self) -> &BTreeSet<OrthantCode> {
        &self.self_fixed
    }

    /// Checks that every step of `cycle` is an edge.
    pub fn check_cycle(&self, cycle: &CycleSpec) -> Result<(), GraphError> {
        for (a, b) in cycle.steps() {
            if !self.has_edge(a, b) {
                return Err(GraphError::NotAnEdge(a, b));
            }
        }
        Ok(())
    }

    /// Graphviz rendering; orthants with an interior focal point are drawn
    /// as double circles.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph transitions {\n");
        for a in OrthantCode::all(self.n) {
            if self.self_fixed.contains(&a) {
                out.push_str(&format!("  \"{a}\" [shape=doublecircle, fixed=true];\n"));
            } else {
                out.push_str(&format!("  \"{a}\";\n"));
            }
        }
        for (a, b) in &self.edges {
            let j = a.differing_bit(b).expect("edges join adjacent codes");
            out.push_str(&format!("  \"{a}\" -> \"{b}\" [label=\"y{}\"];\n", j + 1));
        }
        out.push_str("}\n");
        out
    }
}

/// A closed walk on the cube, read as a sequence of orthants visited by a
/// trajectory that starts on the wall between the last and first codes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleSpec {
    codes: Vec<OrthantCode>,
    switches: Vec<usize>,
}

impl CycleSpec {
    pub fn new(codes: Vec<OrthantCode>) -> Result<Self, GraphError> {
        if codes.len() < 2 {
            return Err(GraphError::TooShort);
        }
        let dim = codes[0].dim();
        if codes.iter().any(|c| c.dim() != dim) {
            return Err(GraphError::MixedDimension);
        }
        let m = codes.len();
        let switches = (0..m)
            .map(|k| {
                let (a, b) = (codes[k], codes[(k + 1) % m]);
                a.differing_bit(&b).ok_or(GraphError::NotAdjacent(a, b))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { codes, switches })
    }

    /// Parses `0101,0111,...`.
    pub fn parse(s: &str) -> Result<Self, GraphError> {
        Self::new(parse_code_list(s)?)
    }

    pub fn codes(&self) -> &[OrthantCode] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.codes[0].dim()
    }

    /// `switch_sequence()[k]` is the variable that changes between codes
    /// `k` and `k + 1` (cyclically).
    pub fn switch_sequence(&self) -> &[usize] {
        &self.switches
    }

    pub fn steps(&self) -> impl Iterator<Item = (OrthantCode, OrthantCode)> + '_ {
        let m = self.codes.len();
        (0..m).map(move |k| (self.codes[k], self.codes[(k + 1) % m]))
    }

    /// The wall crossed from the last code into the first.
    pub fn start_wall(&self) -> Wall {
        let m = self.codes.len();
        Wall {
            variable: self.switches[m - 1],
            from: self.codes[m - 1],
            to: self.codes[0],
        }
    }

    /// Same cycle started at `start` (which must occur in it).
    pub fn rotated_to(&self, start: OrthantCode) -> Option<Self> {
        let pos = self.codes.iter().position(|c| *c == start)?;
        let mut codes = self.codes.clone();
        codes.rotate_left(pos);
        Some(Self::new(codes).expect("rotation of a valid cycle"))
    }

    /// Rotation beginning with the smallest code.
    pub fn canonical(&self) -> Self {
        let min = *self.codes.iter().min().expect("non-empty");
        self.rotated_to(min).expect("min is a member")
    }

    /// Walk that follows `self` and then `other`; both must start on the same
    /// wall.
    pub fn concat(&self, other: &Self) -> Option<Self> {
        if self.start_wall() != other.start_wall() {
            return None;
        }
        let mut codes = self.codes.clone();
        codes.extend_from_slice(&other.codes);
        Self::new(codes).ok()
    }

    /// Whether no orthant is visited twice.
    pub fn is_elementary(&self) -> bool {
        let set: BTreeSet<_> = self.codes.iter().collect();
        set.len() == self.codes.len()
    }
}

impl fmt::Display for CycleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.codes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycleSpec({self})")
    }
}

/// All elementary directed cycles with at most `max_length` orthants, each
/// rotated to start at its smallest code, ordered by length and then
/// lexicographically.
pub fn enumerate_cycles(graph: &CubeGraph, max_length: usize) -> Result<Vec<CycleSpec>, GraphError> {
    enumerate_cycles_capped(graph, max_length, DEFAULT_CYCLE_CAP)
}

pub fn enumerate_cycles_capped(
    graph: &CubeGraph,
    max_length: usize,
    cap: usize,
) -> Result<Vec<CycleSpec>, GraphError> {
    if max_length < 2 {
        return Err(GraphError::MaxLength(max_length));
    }
    let nodes = 1usize << graph.n;
    let mut found: Vec<Vec<OrthantCode>> = Vec::new();

    // Each cycle is reported once, from its smallest node `s`, using only
    // nodes above `s`. A node is pruned when the shortest way back to `s`
    // cannot fit within the remaining length.
    for s_idx in 0..nodes {
        let s = OrthantCode::new(graph.n, s_idx as u32);
        let back = distances_to(graph, s);
        if graph
            .successors(s)
            .iter()
            .all(|b| b.index() < s_idx || back[b.index()].is_none())
        {
            continue;
        }
        let mut on_path = vec![false; nodes];
        let mut path = vec![s];
        on_path[s_idx] = true;
        // Explicit stack of (node, next successor position).
        let mut stack: Vec<(OrthantCode, usize)> = vec![(s, 0)];
        while let Some((v, pos)) = stack.pop() {
            let succ = graph.successors(v);
            if pos >= succ.len() {
                on_path[v.index()] = false;
                path.pop();
                continue;
            }
            stack.push((v, pos + 1));
            let w = succ[pos];
            if w == s {
                found.push(path.clone());
                if found.len() > cap {
                    return Err(GraphError::CapExceeded(cap));
                }
                continue;
            }
            if w.index() < s_idx || on_path[w.index()] {
                continue;
            }
            match back[w.index()] {
                Some(d) if path.len() + d <= max_length => {
                    on_path[w.index()] = true;
                    path.push(w);
                    stack.push((w, 0));
                }
                _ => {}
            }
        }
    }

    let mut cycles: Vec<CycleSpec> = found
        .into_iter()
        .map(|codes| CycleSpec::new(codes).expect("enumerated cycles follow edges"))
        .collect();
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.codes.cmp(&b.codes)));
    Ok(cycles)
}

/// Edge count of the shortest path from each node to `target` through
/// nodes not below `target`.
fn distances_to(graph: &CubeGraph, target: OrthantCode) -> Vec<Option<usize>> {
    let nodes = 1usize << graph.n;
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (a, b) in graph.edges() {
        pred[b.index()].push(a.index());
    }
    let mut dist = vec![None; nodes];
    let mut queue = VecDeque::new();
    // Distance 0 marks the target itself; predecessors get 1, and so on.
    dist[target.index()] = Some(0);
    queue.push_back(target.index());
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        for &u in &pred[v] {
            if u >= target.index() && dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Comma-separated bitstrings, one cycle per line.
pub fn cycles_to_text(cycles: &[CycleSpec]) -> String {
    cycles.iter().map(|c| format!("{c}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn code(s: &str) -> OrthantCode {
        s.parse().unwrap()
    }

    #[test]
    fn single_out_edge_from_0101() {
        let g = build_transition_graph(&reference::horseshoe_network());
        assert_eq!(g.successors(code("0101")), &[code("0111")]);
    }

    #[test]
    fn branch_at_1011() {
        let g = build_transition_graph(&reference::horseshoe_network());
        assert_eq!(g.successors(code("1011")), &[code("1001"), code("1010")]);
    }

    #[test]
    fn interior_focal_points_give_empty_graph() {
        // Focal point of each orthant is its own sign vector.
        let rows = OrthantCode::all(3).map(|c| c.signs()).collect();
        let net = GlassNetwork::unchecked(3, rows).unwrap();
        let g = build_transition_graph(&net);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.self_fixed().len(), 8);
        assert!(enumerate_cycles(&g, 8).unwrap().is_empty());
    }

    #[test]
    fn edges_are_one_directional_under_condition2() {
        let g = build_transition_graph(&reference::horseshoe_network());
        for (a, b) in g.edges() {
            assert!(!g.has_edge(*b, *a));
        }
    }

    #[test]
    fn bundled_cycles_are_enumerated() {
        let g = build_transition_graph(&reference::horseshoe_network());
        let cycles = enumerate_cycles(&g, 8).unwrap();
        assert!(cycles.contains(&reference::cycle_0()));
        assert!(cycles.contains(&reference::cycle_1()));
        for c in &cycles {
            g.check_cycle(c).unwrap();
            assert!(c.is_elementary());
            assert_eq!(c, &c.canonical());
        }
    }

    #[test]
    fn max_length_below_two_rejected() {
        let g = build_transition_graph(&reference::horseshoe_network());
        assert_eq!(enumerate_cycles(&g, 1), Err(GraphError::MaxLength(1)));
    }

    #[test]
    fn cap_is_enforced() {
        let g = build_transition_graph(&reference::horseshoe_network());
        assert_eq!(
            enumerate_cycles_capped(&g, 16, 1),
            Err(GraphError::CapExceeded(1))
        );
    }

    #[test]
    fn cycle_spec_structure() {
        let c = reference::cycle_1();
        assert_eq!(c.switch_sequence(), &[2, 0, 1, 3, 2, 1, 3, 0]);
        let w = c.start_wall();
        assert_eq!((w.from, w.to, w.variable), (code("1101"), code("0101"), 0));
        assert!(CycleSpec::parse("0101,1111").is_err());
        assert!(CycleSpec::parse("0101").is_err());
        let r = c.rotated_to(code("1011")).unwrap();
        assert_eq!(r.codes()[0], code("1011"));
        assert_eq!(r.canonical(), c);
    }

    #[test]
    fn dot_export_lists_every_node_and_edge() {
        let g = build_transition_graph(&reference::horseshoe_network());
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"1011\" -> \"1001\""));
        assert_eq!(dot.matches("->").count(), g.edge_count());
        let nodes = dot
            .lines()
            .filter(|l| l.starts_with("  \"") && !l.contains("->"))
            .count();
        assert_eq!(nodes, 16);
    }
}
