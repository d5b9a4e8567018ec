//! Exact analysis of Glass switching networks `y' = -y + F(sign y)`.
//!
//! Trajectories are piecewise exponential, so everything here is closed
//! form: orthant-to-orthant transitions, the fractional-linear maps between
//! walls, returning cones, periodic orbits and the two-cycle horseshoe.

pub mod chaos;
pub mod cones;
pub mod eigen;
pub mod graph;
pub mod integrator;
pub mod maps;
pub mod network;
pub mod orbit;
pub mod polygon;
pub mod reference;
pub mod report;

pub use cones::{returning_cone, Membership, ReturningCone};
pub use graph::{build_transition_graph, CubeGraph, CycleSpec};
pub use integrator::{simulate, Trajectory};
pub use maps::{cycle_map, FractionalLinearMap};
pub use network::{parse_network, GlassNetwork, OrthantCode, Wall};
pub use orbit::{analyze_cycle, OrbitAnalysis, Stability};
