#![allow(dead_code)]

use glassnet::cones::{Membership, ReturningCone};
use nalgebra::DVector;
use rand::Rng;

/// Uniform point of the reduced octant box `|y_i| <= scale`.
pub fn octant_point(signs: &DVector<f64>, scale: f64, rng: &mut impl Rng) -> DVector<f64> {
    signs.map(|s| s * scale * rng.gen_range(1e-6..1.0))
}

/// Rejection samples from the interior of `cone`.
pub fn cone_interior_points(cone: &ReturningCone, n: usize, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        assert!(tries < 1000 * n, "cone too thin to sample");
        let scale = rng.gen_range(0.01..1.0);
        let y = octant_point(&cone.signs, scale, rng);
        if cone.contains(&y) == Membership::Interior {
            out.push(y);
        }
    }
    out
}

pub fn rel_close(a: &DVector<f64>, b: &DVector<f64>, tol: f64) -> bool {
    (a - b).amax() <= tol * b.amax().max(f64::MIN_POSITIVE)
}

/// Random network satisfying both conditions: component `i` of the focal
/// point reads every bit except bit `i`.
pub fn random_network(n: usize, rng: &mut impl Rng) -> glassnet::GlassNetwork {
    use glassnet::OrthantCode;
    let mut table = vec![vec![0.0; n]; 1 << n];
    for i in 0..n {
        for code in OrthantCode::all(n).filter(|c| !c.bit(i)) {
            let mag = rng.gen_range(0.25..2.0);
            let v = if rng.gen_bool(0.5) { mag } else { -mag };
            table[code.index()][i] = v;
            table[code.flip(i).index()][i] = v;
        }
    }
    glassnet::GlassNetwork::new(n, table).expect("conditions hold by construction")
}
