//! Structural properties of maps, projections and parsing.

use glassnet::eigen::{inf_norm, real_eigenpairs};
use glassnet::maps::{compose_maps, cycle_map, FractionalLinearMap};
use glassnet::network::{parse_network, GlassNetwork, OrthantCode};
use glassnet::polygon::project_to_slice;
use glassnet::reference::{cycle_0, cycle_1, horseshoe_network};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn map_strategy(n: usize) -> impl Strategy<Value = FractionalLinearMap> {
    (
        prop::collection::vec(-3.0..3.0f64, n * n),
        prop::collection::vec(-1.0..1.0f64, n),
    )
        .prop_map(move |(b, psi)| {
            FractionalLinearMap::new(DMatrix::from_row_slice(n, n, &b), DVector::from_vec(psi)).unwrap()
        })
}

fn vec_strategy(n: usize, r: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-r..r, n).prop_map(DVector::from_vec)
}

fn direction(v: &DVector<f64>) -> DVector<f64> {
    v / v.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rays_map_to_rays(m in map_strategy(3), y in vec_strategy(3, 1.0), alpha in 0.1..10.0f64) {
        let ay = &y * alpha;
        prop_assume!(m.denominator(&y) > 0.1 && m.denominator(&ay) > 0.1);
        let (u, v) = (m.apply(&y).unwrap(), m.apply(&ay).unwrap());
        prop_assume!(u.norm() > 1e-3);
        let c = v.dot(&u) / u.dot(&u);
        prop_assert!(c > 0.0);
        prop_assert!((direction(&u) - direction(&v)).amax() <= 1e-12);
    }

    #[test]
    fn lines_map_to_lines(
        m in map_strategy(3),
        p in vec_strategy(3, 1.0),
        q in vec_strategy(3, 1.0),
        t in -1.0..2.0f64,
    ) {
        let r = &p + (&q - &p) * t;
        for y in [&p, &q, &r] {
            prop_assume!(m.denominator(y) > 0.1);
        }
        let (mp, mq, mr) = (m.apply(&p).unwrap(), m.apply(&q).unwrap(), m.apply(&r).unwrap());
        let (a, b) = (&mq - &mp, &mr - &mp);
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
        prop_assert!(a.cross(&b).norm() <= 1e-9 * a.norm() * b.norm());
    }

    #[test]
    fn composition_is_sequential_application(
        outer in map_strategy(4),
        inner in map_strategy(4),
        y in vec_strategy(4, 1.0),
    ) {
        prop_assume!(inner.denominator(&y).abs() > 0.1);
        let mid = inner.apply(&y).unwrap();
        prop_assume!(outer.denominator(&mid).abs() > 0.1);
        let seq = outer.apply(&mid).unwrap();
        let once = compose_maps(&outer, &inner).unwrap().apply(&y).unwrap();
        prop_assert!((&once - &seq).amax() <= 1e-12 * seq.amax().max(1.0));
    }

    #[test]
    fn reduced_map_agrees_with_full_map(y in vec_strategy(3, 0.5), which in 0..2usize) {
        let net = horseshoe_network();
        let cycle = [cycle_0(), cycle_1()][which].clone();
        let map = cycle_map(&net, &cycle).unwrap();
        prop_assume!(map.reduced.denominator(&y) > 0.1);
        let full = map.full.apply(&DVector::from_vec(map.wall.embed(y.as_slice()))).unwrap();
        prop_assert!(full[map.wall.variable].abs() == 0.0);
        let reduced = map.reduced.apply(&y).unwrap();
        let projected = DVector::from_vec(map.wall.reduce(full.as_slice()));
        prop_assert!((reduced - projected).amax() <= 1e-12 * full.amax().max(1.0));
    }

    #[test]
    fn projection_is_ray_invariant(y in vec_strategy(3, 1.0), alpha in 0.01..100.0f64) {
        // Points of the closed octant, where the slice is used.
        let sigma = [1.0, -1.0, 1.0];
        let y = DVector::from_fn(3, |i, _| sigma[i] * y[i].abs());
        prop_assume!(y.amax() > 1e-3);
        let p = project_to_slice(y.as_slice(), &sigma).unwrap();
        let q = project_to_slice((&y * alpha).as_slice(), &sigma).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn eigenpairs_satisfy_residual_bound(entries in prop::collection::vec(-5.0..5.0f64, 16)) {
        let a = DMatrix::from_row_slice(4, 4, &entries);
        let s = real_eigenpairs(&a).unwrap();
        prop_assert_eq!(s.real.len() + s.complex.len(), 4);
        for p in &s.real {
            prop_assert!(p.residual(&a) <= 1e-9 * inf_norm(&a).max(1.0));
            prop_assert!((p.vector.lp_norm(1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_eigenpairs_satisfy_residual_bound(entries in prop::collection::vec(-5.0..5.0f64, 9)) {
        let a = DMatrix::from_row_slice(3, 3, &entries);
        let s = real_eigenpairs(&a).unwrap();
        prop_assert_eq!(s.real.len() + s.complex.len(), 3);
        for p in &s.real {
            prop_assert!(p.residual(&a) <= 1e-9 * inf_norm(&a).max(1.0));
        }
    }

    #[test]
    fn network_text_round_trips(n in 1..5usize, seed in any::<u64>()) {
        // Focal entries that never depend on their own variable.
        let rows: Vec<Vec<f64>> = OrthantCode::all(n)
            .map(|c| {
                (0..n)
                    .map(|i| {
                        let key = (c.flip(i).bits_without(i) as u64).wrapping_mul(0x9e37_79b9).wrapping_add(seed ^ i as u64);
                        if key % 3 == 0 { -1.5 } else { 0.75 }
                    })
                    .collect()
            })
            .collect();
        let net = GlassNetwork::new(n, rows).unwrap();
        let back = parse_network(&net.to_text()).unwrap();
        prop_assert_eq!(back, net);
    }
}

trait WithoutBit {
    fn bits_without(&self, i: usize) -> usize;
}

impl WithoutBit for OrthantCode {
    /// Index with bit `i` cleared, so values ignore that variable.
    fn bits_without(&self, i: usize) -> usize {
        let c = if self.bit(i) { self.flip(i) } else { *self };
        c.index()
    }
}
