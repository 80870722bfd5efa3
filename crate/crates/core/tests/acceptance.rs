//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so
//! the lines come out in order; exits nonzero on any failure not listed in
//! `KNOWN_FAILURES`.

mod common;

use std::time::{Duration, Instant};

use mulex::analysis::bounds::{grid_verify, sum_formula, w_optimum, GridCheck};
use mulex::analysis::constants::{check_appendix_inequalities, find_constants};
use mulex::analysis::consts::{beta, two_pow_gamma};
use mulex::analysis::DEFAULT_PRECISION;
use mulex::containers::{bad_patterns, check_hypothesis, codegree_profile, hypergraph_stats, DEFAULT_BUDGET};
use mulex::quotient::{quotient, split_leaf, star_transform, VWGraph};
use mulex::search::{count_f, extremal, extremal_set, Family, Objective, SearchOptions};
use mulex::symmetry::{replace, replace_seq, vertex_product};
use mulex::{Multigraph, PrimePower};
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

/// Criteria whose statement is false as written; the line still prints FAIL.
const KNOWN_FAILURES: &[u32] = &[1];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let r = extremal(4, 4, 15, Objective::Product, Family::All, &opts()).unwrap();
    let el = t.elapsed();
    let w43 = Multigraph::build_w(4, 3, 2).unwrap();
    let iso: Vec<bool> = r.witnesses.iter().map(|g| g.is_isomorphic(&w43).unwrap()).collect();
    let value_ok = r.value == 216u64.into();
    let all_w = iso.iter().all(|&b| b);
    // shape of each class: degree sequence of its weight-3 edges
    let shapes: Vec<Vec<usize>> = r
        .witnesses
        .iter()
        .map(|g| {
            let mut d: Vec<usize> = (0..4)
                .map(|v| (0..4).filter(|&u| u != v && g.weight(u, v) == 3).count())
                .collect();
            d.sort_unstable_by(|a, b| b.cmp(a));
            d
        })
        .collect();
    outcome(
        value_ok && all_w && el < Duration::from_secs(60),
        format!(
            "value {} ({}), {} labeled optima in {} isomorphism classes with weight-3 degree sequences {:?}; \
             W(4) |R|=3 member among them: {}; every witness isomorphic to it: {}; {}",
            r.value.0,
            if value_ok { "ok" } else { "expected 216" },
            r.optimal_labeled,
            r.witnesses.len(),
            shapes,
            iso.iter().any(|&b| b),
            all_w,
            secs(el)
        ),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let r = extremal(5, 4, 15, Objective::Product, Family::All, &opts()).unwrap();
    let unpruned = SearchOptions { prune: false, ..opts() };
    let u = extremal(5, 4, 15, Objective::Product, Family::All, &unpruned).unwrap();
    let el = t.elapsed();
    let cyc = r.witnesses.iter().any(|g| matches!(g.find_cycle_copy(5), Ok(Some(_))));
    let (_, wbest) = w_optimum(5).unwrap();
    let w_search = extremal(5, 4, 15, Objective::Product, Family::W, &opts()).unwrap();
    let agree = r.value == u.value && r.witnesses == u.witnesses && r.optimal_labeled == u.optimal_labeled;
    let pass = r.value.0 >= 7776u32.into()
        && cyc
        && wbest == 5832u64.into()
        && w_search.value == wbest
        && agree
        && el < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "ex_P(5,4,15) = {}, C5(3,2) witness: {cyc}, max over W(5) = {} (search {}), \
             pruned/unpruned agree: {agree} ({} vs {} nodes), {}",
            r.value.0,
            wbest.0,
            w_search.value.0,
            r.nodes,
            u.nodes,
            secs(el)
        ),
    )
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_3() -> Outcome {
    let c4 = count_f(4, 4, 9, &opts()).unwrap().count;
    let closed = binomial(9 + 6, 6);
    let mut dom = Vec::new();
    for n in 4..=5 {
        let c = count_f(n, 4, 9, &opts()).unwrap().count;
        let e = extremal(n, 4, 15, Objective::Product, Family::All, &opts())
            .unwrap()
            .value
            .0;
        dom.push((n, c.clone(), e.clone(), c >= e));
    }
    outcome(
        c4 == closed.into() && dom.iter().all(|d| d.3),
        format!(
            "|F(4,4,9)| = {c4} (stars and bars {closed}); {}",
            dom.iter()
                .map(|(n, c, e, ok)| format!("n={n}: |F| = {c} >= ex = {e}: {ok}"))
                .collect::<Vec<_>>()
                .join("; ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 4..=5 {
        let set = extremal_set(n, 4, 15, Family::D).unwrap();
        let light = set
            .iter()
            .any(|g| g.has_triangle([3, 1, 1]) || g.has_triangle([2, 1, 1]));
        let meets_c = set.iter().any(|g| g.family_membership().c);
        pass &= !light && meets_c;
        notes.push(format!(
            "D({n}): {} classes, light triangle {light}, meets C {meets_c}",
            set.len()
        ));
    }
    for n in 4..=6 {
        let set = extremal_set(n, 4, 15, Family::NC).unwrap();
        let meets_w = set.iter().any(|g| g.family_membership().w);
        pass &= meets_w;
        notes.push(format!("NC({n}): {} classes, meets W {meets_w}", set.len()));
    }
    let el = t.elapsed();
    pass &= el < Duration::from_secs(1800);
    outcome(pass, format!("{}; {}", notes.join("; "), secs(el)))
}

fn big(g: &Multigraph, x: usize) -> BigUint {
    vertex_product(g, x).unwrap().0
}

fn w(g: &Multigraph, a: usize, b: usize) -> BigUint {
    BigUint::from(g.weight(a, b))
}

fn criterion_5() -> Outcome {
    let mut r = common::rng(0xacc5);
    let mut bad = 0;
    for _ in 0..10_000 {
        let n = r.gen_range(3..=8);
        let g = common::random_graph(&mut r, n, 1, 3);
        let x = r.gen_range(0..n);
        let y = (x + r.gen_range(1..n)) % n;
        let single = replace(&g, x, y).unwrap().product().0 * big(&g, x) * w(&g, x, y) == big(&g, y) * g.product().0;
        let mut t = [0, 0, 0];
        while t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            t = [r.gen_range(0..n), r.gen_range(0..n), r.gen_range(0..n)];
        }
        let [u, v, z] = t;
        let h = replace_seq(&g, &[(v, u), (z, u)]).unwrap();
        let double = h.product().0 * big(&g, v) * big(&g, z) * w(&g, u, z).pow(2) * w(&g, u, v).pow(2)
            == big(&g, u).pow(2) * w(&g, v, z) * g.product().0;
        bad += usize::from(!single) + usize::from(!double);
    }
    outcome(bad == 0, format!("10000 graphs, {bad} identity failures"))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut r = common::rng(0xacc6);
    let mut fpi_bad = 0;
    for _ in 0..10_000 {
        let n = r.gen_range(1..=9);
        let g = common::random_neat(&mut r, n);
        fpi_bad += usize::from(g.product() != quotient(&g).unwrap().f_pi());
    }

    let mut neat_checked = 0u64;
    let mut forest_bad = 0u64;
    for n in 1..=7u64 {
        for sizes in common::integer_partitions(n) {
            let k = sizes.len();
            let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
            let (c, b) = (0u64..1 << pairs.len())
                .into_par_iter()
                .map(|mask| {
                    let edges = pairs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &e)| e)
                        .collect();
                    let h = VWGraph::new(sizes.clone(), edges).unwrap();
                    let g = mulex::quotient::realize(&h, None).unwrap().graph;
                    (1u64, u64::from(h.is_forest() != g.family_membership().nc))
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            neat_checked += c;
            forest_bad += b;
        }
    }

    let mut star_bad = 0;
    for _ in 0..1000 {
        let k = r.gen_range(2..=12);
        let p = r.gen_range(0.3..1.0);
        let max_part = r.gen_range(1..=4);
        let h = common::random_forest(&mut r, k, max_part, p);
        let s = star_transform(&h).unwrap();
        let (before, after) = (h.f_pi_exponents(), s.graph.f_pi_exponents());
        let mut ok = s.graph.is_star_at(s.center) && after >= before && s.strict == (after > before);
        if !s.strict && s.graph != h {
            ok &= matches!(s.witness, Some((v, w)) if v == s.center && v != w && h.parts()[v] == h.parts()[w]);
        }
        star_bad += usize::from(!ok);
    }

    let mut split_bad = 0;
    for _ in 0..1000 {
        let k = r.gen_range(2..=8);
        let parts: Vec<u64> = (0..k).map(|_| r.gen_range(1..=6)).collect();
        let c = r.gen_range(0..k);
        let wpart = (c + r.gen_range(1..k)) % k;
        if parts[wpart] < 2 {
            continue;
        }
        let h = VWGraph::new(parts.clone(), (0..k).filter(|&x| x != c).map(|x| (c, x)).collect()).unwrap();
        let s = split_leaf(&h, wpart).unwrap();
        let factor = PrimePower::new(parts[wpart] as i64 - 1, 0, 0);
        split_bad += usize::from(s.f_pi_exponents() != h.f_pi_exponents() * factor);
    }

    outcome(
        fpi_bad == 0 && forest_bad == 0 && star_bad == 0 && split_bad == 0,
        format!(
            "P = f_pi failures {fpi_bad}/10000; forest vs NC mismatches {forest_bad}/{neat_checked} neat graphs n <= 7; \
             star transform failures {star_bad}/1000; split_leaf factor failures {split_bad}; {}",
            secs(t.elapsed())
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let app = check_appendix_inequalities(DEFAULT_PRECISION).unwrap();
    let cert = find_constants(DEFAULT_PRECISION).unwrap();
    let gamma_ok = cert.gamma_app.lo_f64() > 0.10 && cert.gamma_app.hi_f64() < 0.11;
    let hf = grid_verify(GridCheck::HLtF, (62, 300), (62, 300)).unwrap();
    let kf = grid_verify(GridCheck::KLtF, (2, 300), (50, 300)).unwrap();
    let spots_ok = cert.spot_checks.len() == 20 && cert.spot_checks.iter().all(|s| s.holds && s.n >= cert.m1);
    let el = t.elapsed();
    let pass = app.all_hold
        && cert.k == 62
        && cert.k_three_digit == 63
        && gamma_ok
        && hf.failures.is_empty()
        && kf.failures.is_empty()
        && spots_ok
        && el < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "(I)-(III) certified: {}; K = {} (three-digit logs: {}); gamma in [{:.6}, {:.6}]; M1 = {}; \
             h<f on {} points, {} failures; k<f on {} points, {} failures; decay spot checks ok: {spots_ok}; {}",
            app.all_hold,
            cert.k,
            cert.k_three_digit,
            cert.gamma_app.lo_f64(),
            cert.gamma_app.hi_f64(),
            cert.m1,
            hf.points,
            hf.failures.len(),
            kf.points,
            kf.failures.len(),
            secs(el)
        ),
    )
}

fn criterion_8() -> Outcome {
    let b = beta(DEFAULT_PRECISION);
    let g = two_pow_gamma(DEFAULT_PRECISION);
    let ratio = |p: i64, q: i64| BigRational::new(p.into(), q.into());
    // the stated values are two-digit roundings: the enclosure must round to them
    let b_ok = b.lo() >= &ratio(725, 1000) && b.hi() < &ratio(735, 1000);
    let g_ok = g.lo() >= &ratio(1485, 1000) && g.hi() < &ratio(1495, 1000);
    let tight = b.width_f64() < 1e-6 && g.width_f64() < 1e-6;
    outcome(
        b_ok && g_ok && tight,
        format!(
            "beta in [{:.10}, {:.10}] rounds to 0.73: {b_ok}; 2^gamma in [{:.8}, {:.8}] rounds to 1.49: {g_ok}; \
             widths {:.1e}, {:.1e}",
            b.lo_f64(),
            b.hi_f64(),
            g.lo_f64(),
            g.hi_f64(),
            b.width_f64(),
            g.width_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let g32 = bad_patterns(3, 2, DEFAULT_BUDGET).unwrap().g;
    let s6 = hypergraph_stats(6, 3, 2, DEFAULT_BUDGET).unwrap();
    let s7 = hypergraph_stats(7, 3, 2, DEFAULT_BUDGET).unwrap();
    let stats_ok = s6.vertices == 45
        && s6.edge_count == 340u32.into()
        && s6.avg_degree == BigRational::new(68.into(), 3.into())
        && s7.vertices == 63
        && s7.edge_count == 595u32.into()
        && s7.avg_degree == BigRational::new((3 * 595).into(), 63.into());

    let tau = BigRational::new(1.into(), 2.into());
    let prof = codegree_profile(6, 3, 2, &tau, DEFAULT_BUDGET).unwrap();
    let oracle = oracle_delta(6, &tau);
    let delta_ok = prof.delta == oracle;

    let h8 = check_hypothesis(8, 3, 2, &BigRational::new(1.into(), 4.into()), DEFAULT_BUDGET).unwrap();
    outcome(
        g32 == 17 && stats_ok && delta_ok && h8.dsigma_violations == 0,
        format!(
            "g(3,2) = {g32}; stats exact: {stats_ok}; Delta(H,1/2) at (6,3,2) = {} (oracle {}); \
             d(sigma) bound at (8,3,2): {} violations of {}",
            prof.delta, oracle, h8.dsigma_violations, h8.dsigma_checked
        ),
    )
}

/// `Δ(H,τ)` from co-degrees tabulated over every vertex subset of size up
/// to `C(3,2)`.
fn oracle_delta(n: usize, tau: &BigRational) -> BigRational {
    let r = 3;
    let tab = common::brute_codegrees(n, 3, 2, r);
    let nv = 3 * n * (n - 1) / 2;
    let edges = common::oracle::all_edges(n, 3, 2).len();
    let d = BigRational::new((r * edges).into(), nv.into());
    let mut total = BigRational::zero();
    for (j, map) in tab.iter().enumerate().skip(2) {
        let mut m = vec![0u64; nv];
        for (sigma, &c) in map {
            for &x in sigma {
                m[x as usize] = m[x as usize].max(c);
            }
        }
        let sum: u64 = m.iter().sum();
        let tau_pow = (1..j).fold(BigRational::one(), |acc, _| acc * tau);
        let dj = BigRational::from_integer(sum.into()) / (&d * BigRational::from_integer(nv.into()) * tau_pow);
        total += dj / BigRational::from_integer(BigInt::one() << ((j - 1) * (j - 2) / 2));
    }
    total * BigRational::from_integer(BigInt::one() << (r * (r - 1) / 2 - 1))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let s4 = extremal(4, 4, 15, Objective::Sum, Family::All, &opts()).unwrap();
    let s5 = extremal(5, 4, 15, Objective::Sum, Family::All, &opts()).unwrap();
    let p5 = extremal(5, 4, 15, Objective::Product, Family::All, &opts()).unwrap();
    let c5 = Multigraph::build_cycle(5).unwrap();
    let s4_ok = s4.value == 15u64.into() && sum_formula(4) == 15;
    let s5_ok = sum_formula(5) == 24 && c5.sum() == 25 && s5.value.0 >= 25u32.into();

    // least edit distance over all relabelings, between every pair of classes
    let perms = permutations(5);
    let mut dists = Vec::new();
    let mut prop_ok = true;
    for a in &p5.witnesses {
        for b in &s5.witnesses {
            let d = perms
                .iter()
                .map(|p| a.edit_distance(&b.permuted(p)).unwrap())
                .min()
                .unwrap();
            let raw = a.edit_distance(b).unwrap();
            prop_ok &= raw == b.edit_distance(a).unwrap() && d <= raw;
            // δ-closeness is exactly edit distance at most δn²
            for k in 0..=10u64 {
                let delta = Ratio::new(k, 25);
                prop_ok &= a.is_delta_close(b, delta).unwrap() == (raw as u64 <= k);
            }
            dists.push(d);
        }
    }
    let min = dists.iter().min().copied();
    let max = dists.iter().max().copied();
    outcome(
        s4_ok && s5_ok && prop_ok,
        format!(
            "ex_S(4,4,15) = {} = sum_formula(4); ex_S(5,4,15) = {} vs sum_formula(5) = {} (C5(3,2) sums to {}); \
             {} sum-extremal labeled graphs; product vs sum witness edit distance up to relabeling: min {:?}, max {:?}; \
             closeness property: {prop_ok}",
            s4.value.0,
            s5.value.0,
            sum_formula(5),
            c5.sum(),
            s5.optimal_labeled,
            min,
            max
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "exact product optimum at n = 4", criterion_1),
        (2, "n = 5 optimum beats W(5)", criterion_2),
        (3, "exact counting", criterion_3),
        (4, "small-n structure of optima", criterion_4),
        (5, "replacement identities", criterion_5),
        (6, "quotient suite", criterion_6),
        (7, "certified appendix", criterion_7),
        (8, "numeric constants", criterion_8),
        (9, "container hypergraph", criterion_9),
        (10, "sum optima", criterion_10),
    ];
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        let o = f();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !o.pass && !known {
            unexpected += 1;
        }
        println!("{tag} criterion {id} [{name}]: {}", o.detail);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
