#![allow(dead_code)]

use mulex::quotient::{realize, VWGraph};
use mulex::Multigraph;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, lo: u8, hi: u8) -> Multigraph {
    Multigraph::from_fn(n, |_, _| rng.gen_range(lo..=hi))
}

/// A member of D(n): random weights in 0..=3, lowered until every triangle
/// sums to at most 8 and every 4-set to at most 15.
pub fn random_d_graph(rng: &mut ChaCha8Rng, n: usize) -> Multigraph {
    let mut g = random_graph(rng, n, 0, 3);
    loop {
        let bad = g.violations(3, 8).into_iter().chain(g.violations(4, 15)).next();
        let Some(w) = bad else { return g };
        let a = w[rng.gen_range(0..w.len())];
        let b = *w
            .iter()
            .copied()
            .filter(|&x| x != a)
            .collect::<Vec<_>>()
            .choose(rng)
            .unwrap();
        let x = g.weight(a, b);
        if x > 0 {
            g.set_weight(a, b, x - 1);
        }
    }
}

/// A random vertex-weighted graph on `k` parts with weights in `1..=max_part`.
pub fn random_vw(rng: &mut ChaCha8Rng, k: usize, max_part: u64, p_edge: f64) -> VWGraph {
    let parts = (0..k).map(|_| rng.gen_range(1..=max_part)).collect();
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if rng.gen_bool(p_edge) {
                edges.push((a, b));
            }
        }
    }
    VWGraph::new(parts, edges).unwrap()
}

/// A random forest: each part after the first attaches to an earlier one
/// with probability `p_attach`.
pub fn random_forest(rng: &mut ChaCha8Rng, k: usize, max_part: u64, p_attach: f64) -> VWGraph {
    let parts = (0..k).map(|_| rng.gen_range(1..=max_part)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..k {
        if rng.gen_bool(p_attach) {
            let j = rng.gen_range(0..i);
            edges.push((order[i], order[j]));
        }
    }
    VWGraph::new(parts, edges).unwrap()
}

/// A random neat multigraph on exactly `n` vertices, randomly labeled.
pub fn random_neat(rng: &mut ChaCha8Rng, n: usize) -> Multigraph {
    let mut sizes = Vec::new();
    let mut left = n as u64;
    while left > 0 {
        let s = rng.gen_range(1..=left.min(3));
        sizes.push(s);
        left -= s;
    }
    let k = sizes.len();
    let p = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    let h = VWGraph::new(sizes, edges).unwrap();
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    realize(&h, Some(&labels)).unwrap().graph
}

/// Every neat multigraph on `n` vertices up to isomorphism-preserving
/// relabeling: blocks of each integer partition of `n` on consecutive labels,
/// with every simple graph on the blocks.
pub fn for_each_neat(n: usize, mut f: impl FnMut(&VWGraph, &Multigraph)) {
    for sizes in integer_partitions(n as u64) {
        let k = sizes.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        for mask in 0u64..(1 << pairs.len()) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let h = VWGraph::new(sizes.clone(), edges).unwrap();
            let g = realize(&h, None).unwrap().graph;
            f(&h, &g);
        }
    }
}

/// Non-increasing partitions of `n`.
pub fn integer_partitions(n: u64) -> Vec<Vec<u64>> {
    fn go(n: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `d(σ)` tabulated by testing every small vertex subset against every edge
/// of H(n), with the edges listed from scratch.
pub fn brute_codegrees(n: usize, s: usize, q: u64, max_size: usize) -> Vec<std::collections::HashMap<Vec<u32>, u64>> {
    use oracle::*;
    let edges = all_edges(n, s, q);
    let nv = ((q + 1) as usize) * n * (n - 1) / 2;
    let mut out = vec![std::collections::HashMap::new(); max_size + 1];
    for (size, slot) in out.iter_mut().enumerate().skip(1) {
        for_each_subset(nv, size, |sigma| {
            let d = edges.iter().filter(|e| sigma.iter().all(|x| e.contains(x))).count() as u64;
            if d > 0 {
                slot.insert(sigma.to_vec(), d);
            }
        });
    }
    out
}

pub mod oracle {
    /// Edges of H(n) built directly from the definition: for each s-set and
    /// each labeled weighting of its pairs with weights `<= q` summing past
    /// `q`, the set of `(pair, weight)` vertices.
    pub fn all_edges(n: usize, s: usize, q: u64) -> Vec<Vec<u32>> {
        let idx = |i: usize, j: usize| -> usize {
            // position of (i, j), i < j, in row-major upper-triangle order
            (0..i).map(|r| n - 1 - r).sum::<usize>() + (j - i - 1)
        };
        let mut edges = Vec::new();
        for_each_subset(n, s, |a| {
            let a: Vec<usize> = a.iter().map(|&x| x as usize).collect();
            let pairs: Vec<usize> = (0..s)
                .flat_map(|x| (x + 1..s).map(move |y| (x, y)))
                .map(|(x, y)| idx(a[x], a[y]))
                .collect();
            let r = pairs.len();
            let total = (q + 1).pow(r as u32);
            for code in 0..total {
                let mut c = code;
                let mut w = Vec::with_capacity(r);
                for _ in 0..r {
                    w.push(c % (q + 1));
                    c /= q + 1;
                }
                if w.iter().sum::<u64>() > q {
                    let mut e: Vec<u32> = pairs
                        .iter()
                        .zip(&w)
                        .map(|(&p, &u)| (p as u64 * (q + 1) + u) as u32)
                        .collect();
                    e.sort_unstable();
                    edges.push(e);
                }
            }
        });
        edges
    }

    pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[u32])) {
        fn go(start: usize, n: usize, k: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
            if cur.len() == k {
                f(cur);
                return;
            }
            for x in start..n {
                if n - x < k - cur.len() {
                    break;
                }
                cur.push(x as u32);
                go(x + 1, n, k, cur, f);
                cur.pop();
            }
        }
        go(0, n, k, &mut Vec::new(), &mut f);
    }
}
