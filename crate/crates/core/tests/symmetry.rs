mod common;

use common::{random_d_graph, random_graph, rng};
use mulex::symmetry::{eliminate_123, local_improve, local_improve_fixpoint, replace, replace_seq, vertex_product};
use mulex::{Multigraph, ProductValue};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

fn big(p: ProductValue) -> BigUint {
    p.0
}

fn w(g: &Multigraph, a: usize, b: usize) -> BigUint {
    BigUint::from(g.weight(a, b))
}

/// `P(G_xy) p(x) w(xy) = p(y) P(G)`.
fn single_identity(g: &Multigraph, x: usize, y: usize) -> bool {
    let lhs = big(replace(g, x, y).unwrap().product()) * big(vertex_product(g, x).unwrap()) * w(g, x, y);
    let rhs = big(vertex_product(g, y).unwrap()) * big(g.product());
    lhs == rhs
}

/// `P(G_{vu,zu}) p(v) p(z) w(uz)² w(uv)² = p(u)² w(vz) P(G)`.
fn double_identity(g: &Multigraph, u: usize, v: usize, z: usize) -> bool {
    let h = replace_seq(g, &[(v, u), (z, u)]).unwrap();
    let p = |x| big(vertex_product(g, x).unwrap());
    let lhs = big(h.product()) * p(v) * p(z) * w(g, u, z).pow(2) * w(g, u, v).pow(2);
    let rhs = p(u).pow(2) * w(g, v, z) * big(g.product());
    lhs == rhs
}

#[test]
fn replacement_identities_on_random_positive_graphs() {
    let mut r = rng(1);
    for _ in 0..2000 {
        let n = r.gen_range(3..=8);
        let g = random_graph(&mut r, n, 1, 3);
        let x = r.gen_range(0..n);
        let y = (x + r.gen_range(1..n)) % n;
        assert!(single_identity(&g, x, y), "{}", g.to_mg_string());
        let mut t = [0, 0, 0];
        while t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            t = [r.gen_range(0..n), r.gen_range(0..n), r.gen_range(0..n)];
        }
        assert!(double_identity(&g, t[0], t[1], t[2]), "{}", g.to_mg_string());
    }
}

#[test]
fn replacement_stays_in_d() {
    let mut r = rng(2);
    for _ in 0..1000 {
        let n = r.gen_range(3..=7);
        let g = random_d_graph(&mut r, n);
        assert!(g.in_d());
        let x = r.gen_range(0..n);
        let y = (x + r.gen_range(1..n)) % n;
        assert!(replace(&g, x, y).unwrap().in_d());
        let a = r.gen_range(0..n);
        let b = (a + r.gen_range(1..n)) % n;
        assert!(replace_seq(&g, &[(x, y), (a, b)]).unwrap().in_d());
    }
}

#[test]
fn eliminate_123_makes_progress_on_random_d_graphs() {
    let mut r = rng(3);
    for _ in 0..300 {
        let n = r.gen_range(3..=7);
        let g = random_d_graph(&mut r, n);
        let (h, trace) = eliminate_123(&g).unwrap();
        assert!(trace.is_progressive());
        assert!(h.in_d());
        assert!(h.gamma_123().is_empty());
        assert!(h.product() >= g.product());
        assert_eq!(trace.products.len(), trace.steps.len() + 1);
        assert_eq!(replace_seq(&g, &trace.steps).unwrap(), h);
    }
}

#[test]
fn local_improvement_is_monotone() {
    let mut r = rng(4);
    for _ in 0..300 {
        let n = r.gen_range(3..=6);
        let g = random_d_graph(&mut r, n);
        let h = local_improve(&g).unwrap();
        assert!(h.in_d());
        assert!(h == g || h.product() > g.product());
        let (f, _) = local_improve_fixpoint(&g).unwrap();
        assert!(f.product() >= h.product());
        assert_eq!(local_improve(&f).unwrap(), f);
    }
}

#[test]
fn double_move_on_a_bare_triangle() {
    // w(uv) = w(uz) = 1, w(vz) = 2: p(u) = 1, p(v) = p(z) = 2, so P drops 2 -> 1
    let g = Multigraph::from_fn(3, |i, j| if (i, j) == (1, 2) { 2 } else { 1 });
    assert!(double_identity(&g, 0, 1, 2));
    assert_eq!(replace_seq(&g, &[(1, 0), (2, 0)]).unwrap().product(), 1u64.into());
    // the single move G_uv is the improving one here
    assert_eq!(local_improve(&g).unwrap().product(), 4u64.into());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn replace_copies_the_target(n in 2usize..8, seed in any::<u64>(), x in 0usize..8, y in 0usize..8) {
        prop_assume!(x < n && y < n && x != y);
        let g = random_graph(&mut rng(seed), n, 0, 4);
        let h = replace(&g, x, y).unwrap();
        prop_assert_eq!(h.weight(x, y), 1);
        for u in (0..n).filter(|&u| u != x && u != y) {
            prop_assert_eq!(h.weight(x, u), g.weight(y, u));
        }
        for a in (0..n).filter(|&a| a != x) {
            for b in (a + 1..n).filter(|&b| b != x) {
                prop_assert_eq!(h.weight(a, b), g.weight(a, b));
            }
        }
    }
}
