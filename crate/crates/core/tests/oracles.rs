//! Discrete objects checked against the exact integrator.

mod common;

use common::{cone_interior_points, octant_point, rel_close};
use glassnet::chaos::{horseshoe_report, observed_itinerary, sample_polygon, ReturnSymbol, SymbolSystem};
use glassnet::cones::{cone_contains, map_polygon, returning_cone, Membership, MEMBERSHIP_TOL};
use glassnet::integrator::first_return;
use glassnet::maps::cycle_map;
use glassnet::orbit::analyze_cycle;
use glassnet::polygon::project_to_slice;
use glassnet::reference::{cycle_0, cycle_1, horseshoe_network};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn return_map_matches_integrator() {
    let net = horseshoe_network();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for cycle in [cycle_0(), cycle_1()] {
        let map = cycle_map(&net, &cycle).unwrap();
        let cone = returning_cone(&net, &cycle).unwrap();
        for y in cone_interior_points(&cone, 150, &mut rng) {
            let ex = first_return(&net, &map.wall, &map.wall.embed(y.as_slice()), 64)
                .unwrap()
                .expect("interior point returns");
            assert_eq!(ex.path, cycle.codes());
            let sim = DVector::from_vec(map.wall.reduce(&ex.point));
            let disc = map.reduced.apply(&y).unwrap();
            assert!(rel_close(&sim, &disc, 1e-9), "{sim} vs {disc}");
        }
    }
}

#[test]
fn cone_membership_predicts_itinerary() {
    let net = horseshoe_network();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for cycle in [cycle_0(), cycle_1()] {
        let cone = returning_cone(&net, &cycle).unwrap();
        let wall = cycle.start_wall();
        let mut checked = 0;
        let mut inside = 0;
        while checked < 1500 {
            let y = octant_point(&cone.signs, 1.0, &mut rng);
            let verdict = cone.contains(&y);
            if verdict == Membership::Boundary {
                continue;
            }
            let follows = first_return(&net, &wall, &wall.embed(y.as_slice()), 64)
                .unwrap()
                .is_some_and(|ex| ex.path == cycle.codes());
            assert_eq!(verdict == Membership::Interior, follows, "{y}");
            checked += 1;
            inside += usize::from(follows);
        }
        assert!(inside > 50 && inside < checked - 50, "sample hits both sides");
    }
}

#[test]
fn pruning_preserves_membership() {
    let net = horseshoe_network();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for cycle in [cycle_0(), cycle_1()] {
        let cone = returning_cone(&net, &cycle).unwrap();
        let mut full = cone.clone();
        full.rows = full.all_rows.clone();
        for _ in 0..10_000 {
            let y = octant_point(&cone.signs, 1.0, &mut rng);
            assert_eq!(
                cone_contains(&cone, &y, MEMBERSHIP_TOL),
                cone_contains(&full, &y, MEMBERSHIP_TOL)
            );
        }
    }
}

#[test]
fn polygon_image_contains_sampled_images() {
    let net = horseshoe_network();
    let sys = SymbolSystem::new(&net, &cycle_0(), &cycle_1()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for s in 0..2 {
        let poly = &sys.polygons[s];
        let image = map_polygon(&sys.maps[s], poly).unwrap();
        for p in sample_polygon(poly, 500, &mut rng) {
            let y = DVector::from_column_slice(&poly.lift(p));
            let q = project_to_slice(sys.maps[s].apply(&y).unwrap().as_slice(), &poly.sigma()).unwrap();
            assert!(image.contains([q[0], q[1]], 1e-9));
        }
    }
}

#[test]
fn orbit_period_equals_loop_time() {
    let net = horseshoe_network();
    let a = analyze_cycle(&net, &cycle_1()).unwrap();
    let y = a.fixed_point.point().unwrap();
    let ex = first_return(&net, &a.map.wall, &a.map.wall.embed(y.as_slice()), 64)
        .unwrap()
        .unwrap();
    assert_eq!(ex.path.len(), 8);
    assert!((ex.duration - a.period.unwrap()).abs() < 1e-9);
    let back = DVector::from_vec(a.map.wall.reduce(&ex.point));
    assert!((back - y).amax() < 1e-9);
}

#[test]
fn composite_orbits_close_up_in_time() {
    let net = horseshoe_network();
    let r = horseshoe_report(&net, &cycle_0(), &cycle_1(), 0).unwrap();
    let wall = r.system.wall;
    for word in ["01", "10"] {
        let c = r.composite(word).unwrap();
        assert!(c.feasible());
        assert!(c.residual <= 1e-10);
        let mut y = wall.embed(c.point.as_slice());
        let mut time = 0.0;
        for (k, ch) in word.chars().enumerate() {
            let ex = first_return(&net, &wall, &y, 64).unwrap().unwrap();
            let s = ch.to_digit(10).unwrap() as usize;
            assert_eq!(ex.path, r.system.cycles[s].codes(), "leg {k} of {word}");
            time += ex.duration;
            y = ex.point;
            y[wall.variable] = 0.0;
        }
        assert!((time - c.period).abs() < 1e-8);
        let back = DVector::from_vec(wall.reduce(&y));
        assert!((back - &c.point).amax() < 1e-8);
    }
}

#[test]
fn no_double_zero_from_the_crossing_region() {
    let net = horseshoe_network();
    let r = horseshoe_report(&net, &cycle_0(), &cycle_1(), 0).unwrap();
    let region = r.polygon("M1(C1)&C0").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for p in sample_polygon(region, 1000, &mut rng) {
        let y = DVector::from_column_slice(&region.lift(p)) * 0.2;
        let it = observed_itinerary(&net, &r.system, &y, 4, 64).unwrap();
        assert_eq!(it[0], ReturnSymbol::Cycle(0));
        for pair in it.windows(2) {
            assert!(pair != [ReturnSymbol::Cycle(0), ReturnSymbol::Cycle(0)], "{it:?}");
        }
    }
}

#[test]
fn repulsion_near_corners_by_simulation() {
    let net = horseshoe_network();
    let r = horseshoe_report(&net, &cycle_0(), &cycle_1(), 0).unwrap();
    let k = 0.9 * r.repulsion.threshold;
    let wall = r.system.wall;
    for region in &r.acting_regions {
        let c = region.polygon.centroid().unwrap();
        for v in region.polygon.vertices() {
            // Corners sit on cone boundaries; step just inside.
            let p = [v[0] + 1e-6 * (c[0] - v[0]), v[1] + 1e-6 * (c[1] - v[1])];
            let q = DVector::from_column_slice(&region.polygon.lift(p));
            let y = &q * (k / q.lp_norm(1));
            let ex = first_return(&net, &wall, &wall.embed(y.as_slice()), 64)
                .unwrap()
                .unwrap();
            assert_eq!(ex.path, r.system.cycles[region.symbol].codes());
            let back = DVector::from_vec(wall.reduce(&ex.point));
            assert!(back.lp_norm(1) > y.lp_norm(1), "{} at {v:?}", region.name);
        }
    }
}
