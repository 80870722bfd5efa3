//! Exhaustive counting and extremal search over F(n,s,q) and its subfamilies.
//!
//! Edge weights are assigned one pair at a time. Every window constraint
//! (a vertex set whose weights must sum to at most a cap) is tracked as a
//! partial sum, which caps each unassigned weight by the smallest remaining
//! margin among the windows containing it. For optimization, the product
//! (or sum) of those caps bounds every completion of the current prefix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{num_pairs, pair_index, Multigraph, DEFAULT_CANONICAL_LIMIT};
use crate::product::ProductValue;
use crate::subsets::Combinations;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Product,
    Sum,
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(Objective::Product),
            "sum" => Ok(Objective::Sum),
            _ => Err(Error::InvalidParameter(format!("unknown objective `{s}`"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Product => "product",
            Objective::Sum => "sum",
        })
    }
}

/// The family searched, always intersected with F(n,s,q).
///
/// D, C, NC and W carry their own constraints: multiplicity at most 3, every
/// 4-set summing to at most 15 and every triangle to at most 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    All,
    MaxMult(u8),
    D,
    C,
    NC,
    W,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "D" => Ok(Family::D),
            "C" => Ok(Family::C),
            "NC" => Ok(Family::NC),
            "W" => Ok(Family::W),
            _ => s
                .strip_prefix("mu<=")
                .and_then(|m| m.parse().ok())
                .map(Family::MaxMult)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::All => f.write_str("all"),
            Family::MaxMult(m) => write!(f, "mu<={m}"),
            Family::D => f.write_str("D"),
            Family::C => f.write_str("C"),
            Family::NC => f.write_str("NC"),
            Family::W => f.write_str("W"),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Family {
    /// Whether `g` belongs to this family (without the F(n,s,q) condition).
    pub fn contains(&self, g: &Multigraph) -> bool {
        match self {
            Family::All => true,
            Family::MaxMult(m) => g.max_weight() <= *m,
            _ => {
                let f = g.family_membership();
                match self {
                    Family::D => f.d,
                    Family::C => f.c,
                    Family::NC => f.nc,
                    Family::W => f.w,
                    _ => unreachable!(),
                }
            }
        }
    }

    fn max_mult(&self) -> Option<u8> {
        match self {
            Family::All => None,
            Family::MaxMult(m) => Some(*m),
            _ => Some(3),
        }
    }

    fn forbids_c_triangles(&self) -> bool {
        matches!(self, Family::C | Family::NC | Family::W)
    }
}

/// Pair order used by the depth-first assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeOrder {
    /// `(0,1), (0,2), (1,2), (0,3), ..`: every window closes as early as possible.
    Colex,
    /// The colex order after relabeling `v -> n-1-v`.
    ReverseColex,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Isomorphism classes kept per optimum.
    pub witness_cap: usize,
    /// Abort after this many search nodes.
    pub node_budget: Option<u64>,
    /// Use the completion bound; without it every feasible leaf is visited.
    pub prune: bool,
    pub order: EdgeOrder,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            witness_cap: 100,
            node_budget: None,
            prune: true,
            order: EdgeOrder::Colex,
        }
    }
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn de_biguint<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub n: usize,
    pub s: usize,
    pub q: u64,
    #[serde(serialize_with = "ser_biguint", deserialize_with = "de_biguint")]
    pub count: BigUint,
    pub exact: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub objective: Objective,
    pub family: Family,
    pub n: usize,
    pub s: usize,
    pub q: u64,
    /// The optimum `P` or `S`.
    pub value: ProductValue,
    /// Optimal graphs up to isomorphism, each in canonical form, sorted.
    pub witnesses: Vec<Multigraph>,
    pub witnesses_truncated: bool,
    /// Number of labeled optimal graphs.
    pub optimal_labeled: u64,
    pub nodes: u64,
}

struct Problem {
    n: usize,
    family: Family,
    /// Pair index of the edge at each position.
    pair_at: Vec<usize>,
    weight_cap: u8,
    caps: Vec<u32>,
    cons_of_pos: Vec<Vec<usize>>,
    /// Triangles (as positions) whose last edge sits at this position.
    tri_done_at: Vec<Vec<[usize; 3]>>,
}

impl Problem {
    fn new(n: usize, s: usize, q: u64, family: Family, order: EdgeOrder) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if s < 2 {
            return Err(Error::InvalidParameter(format!("s must be at least 2, got {s}")));
        }
        let q32 = u32::try_from(q).map_err(|_| Error::InvalidParameter(format!("q = {q} too large")))?;
        let mut windows: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        let mut add = |k: usize, cap: u32| {
            if k <= n {
                let mut c = Combinations::new(n, k);
                while let Some(set) = c.next_ref() {
                    let e = windows.entry(set.to_vec()).or_insert(cap);
                    *e = (*e).min(cap);
                }
            }
        };
        add(s, q32);
        if !matches!(family, Family::All | Family::MaxMult(_)) {
            add(4, 15);
            add(3, 8);
        }
        let mut weight_cap = match family.max_mult() {
            Some(m) => m as u32,
            None if n >= s => q32,
            None => {
                return Err(Error::InvalidParameter(format!(
                    "F({n},{s},{q}) is infinite for n < s; bound the multiplicity"
                )))
            }
        };
        if n >= s {
            weight_cap = weight_cap.min(q32);
        }
        let weight_cap = u8::try_from(weight_cap)
            .map_err(|_| Error::InvalidParameter(format!("weights up to {weight_cap} exceed 255")))?;

        let pairs: Vec<(usize, usize)> = (1..n)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .map(|(i, j)| match order {
                EdgeOrder::Colex => (i, j),
                EdgeOrder::ReverseColex => (n - 1 - j, n - 1 - i),
            })
            .collect();
        let mut pos_of_pair = vec![0; num_pairs(n)];
        let pair_at: Vec<usize> = pairs.iter().map(|&(i, j)| pair_index(n, i, j)).collect();
        for (p, &idx) in pair_at.iter().enumerate() {
            pos_of_pair[idx] = p;
        }
        let pos = |a: usize, b: usize| pos_of_pair[pair_index(n, a.min(b), a.max(b))];

        let mut caps = Vec::new();
        let mut cons_of_pos = vec![Vec::new(); pairs.len()];
        for (set, cap) in windows {
            let c = caps.len();
            caps.push(cap);
            for (x, &a) in set.iter().enumerate() {
                for &b in &set[x + 1..] {
                    cons_of_pos[pos(a, b)].push(c);
                }
            }
        }
        let mut tri_done_at = vec![Vec::new(); pairs.len()];
        if family.forbids_c_triangles() {
            let mut c = Combinations::new(n, 3);
            while let Some(t) = c.next_ref() {
                let ps = [pos(t[0], t[1]), pos(t[0], t[2]), pos(t[1], t[2])];
                let last = *ps.iter().max().unwrap();
                tri_done_at[last].push(ps);
            }
        }
        let bits = (weight_cap as f64 + 1.0).log2() * pairs.len() as f64;
        if bits > 126.0 {
            return Err(Error::InvalidParameter(format!(
                "products may need {bits:.0} bits; the search keeps them in 128"
            )));
        }
        Ok(Problem {
            n,
            family,
            pair_at,
            weight_cap,
            caps,
            cons_of_pos,
            tri_done_at,
        })
    }

    fn len(&self) -> usize {
        self.pair_at.len()
    }

    fn graph(&self, w: &[u8]) -> Multigraph {
        let mut weights = vec![0u8; w.len()];
        for (p, &x) in w.iter().enumerate() {
            weights[self.pair_at[p]] = x;
        }
        Multigraph::from_weights(self.n, weights).expect("consistent length")
    }
}

/// (3,1,1), (2,1,1) and (3,2,1) triangles, as sorted weights.
fn forbidden_in_c(mut t: [u8; 3]) -> bool {
    t.sort_unstable();
    matches!(t, [1, 1, 3] | [1, 1, 2] | [1, 2, 3])
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Count,
    Optimize(Objective),
}

struct Shared {
    incumbent: AtomicU64,
    nodes: AtomicU64,
    abort: AtomicBool,
    budget: Option<u64>,
}

impl Shared {
    fn new(budget: Option<u64>) -> Self {
        Shared {
            incumbent: AtomicU64::new(0),
            nodes: AtomicU64::new(0),
            abort: AtomicBool::new(false),
            budget,
        }
    }
}

struct Worker<'a> {
    p: &'a Problem,
    mode: Mode,
    prune: bool,
    shared: &'a Shared,
    pending_nodes: u64,
    w: Vec<u8>,
    partial: Vec<u32>,
    /// `acc[k]` is the product or sum of the first `k` weights.
    acc: Vec<u128>,
    stop_at: Option<usize>,
    prefixes: Vec<Vec<u8>>,
    count: u128,
    best: Option<u128>,
    witnesses: BTreeMap<Vec<u8>, Multigraph>,
    cap: usize,
    truncated: bool,
    labeled: u64,
}

const FLUSH_EVERY: u64 = 1 << 12;

impl<'a> Worker<'a> {
    fn new(p: &'a Problem, mode: Mode, prune: bool, shared: &'a Shared, cap: usize) -> Self {
        let start = match mode {
            Mode::Optimize(Objective::Product) => 1,
            _ => 0,
        };
        let mut acc = vec![0u128; p.len() + 1];
        acc[0] = start;
        Worker {
            p,
            mode,
            prune,
            shared,
            pending_nodes: 0,
            w: vec![0; p.len()],
            partial: vec![0; p.caps.len()],
            acc,
            stop_at: None,
            prefixes: Vec::new(),
            count: 0,
            best: None,
            witnesses: BTreeMap::new(),
            cap,
            truncated: false,
            labeled: 0,
        }
    }

    fn limit(&self, pos: usize) -> u32 {
        let mut l = self.p.weight_cap as u32;
        for &c in &self.p.cons_of_pos[pos] {
            l = l.min(self.p.caps[c] - self.partial[c]);
        }
        l
    }

    fn combine(&self, a: u128, x: u128) -> u128 {
        match self.mode {
            Mode::Optimize(Objective::Product) => a * x,
            _ => a + x,
        }
    }

    /// Assign `x` at `pos`; `false` if a forbidden triangle closes.
    fn push(&mut self, pos: usize, x: u8) -> bool {
        self.w[pos] = x;
        for &c in &self.p.cons_of_pos[pos] {
            self.partial[c] += x as u32;
        }
        self.acc[pos + 1] = self.combine(self.acc[pos], x as u128);
        self.p.tri_done_at[pos]
            .iter()
            .all(|t| !forbidden_in_c([self.w[t[0]], self.w[t[1]], self.w[t[2]]]))
    }

    fn pop(&mut self, pos: usize) {
        let x = self.w[pos] as u32;
        for &c in &self.p.cons_of_pos[pos] {
            self.partial[c] -= x;
        }
    }

    fn tick(&mut self) -> bool {
        self.pending_nodes += 1;
        if self.pending_nodes >= FLUSH_EVERY {
            self.flush();
        }
        !self.shared.abort.load(Ordering::Relaxed)
    }

    fn flush(&mut self) {
        let total = self.shared.nodes.fetch_add(self.pending_nodes, Ordering::Relaxed) + self.pending_nodes;
        self.pending_nodes = 0;
        if self.shared.budget.is_some_and(|b| total > b) {
            self.shared.abort.store(true, Ordering::Relaxed);
        }
    }

    fn incumbent(&self) -> u128 {
        let shared = self.shared.incumbent.load(Ordering::Relaxed) as u128;
        self.best.map_or(shared, |b| b.max(shared))
    }

    fn dfs(&mut self, pos: usize) {
        if !self.tick() {
            return;
        }
        if self.stop_at == Some(pos) {
            self.prefixes.push(self.w[..pos].to_vec());
            return;
        }
        let len = self.p.len();
        if pos == len {
            self.leaf();
            return;
        }
        let lim = self.limit(pos);
        match self.mode {
            Mode::Count => {
                if pos + 1 == len && self.p.tri_done_at[pos].is_empty() {
                    self.count += lim as u128 + 1;
                    return;
                }
            }
            Mode::Optimize(_) if self.prune => {
                let mut bound = self.combine(self.acc[pos], lim as u128);
                for k in pos + 1..len {
                    bound = self.combine(bound, self.limit(k) as u128);
                }
                if bound < self.incumbent() {
                    return;
                }
            }
            Mode::Optimize(_) => {}
        }
        for x in (0..=lim as u8).rev() {
            if self.push(pos, x) {
                self.dfs(pos + 1);
            }
            self.pop(pos);
            if self.shared.abort.load(Ordering::Relaxed) {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        if self.mode == Mode::Count {
            self.count += 1;
            return;
        }
        let value = self.acc[self.p.len()];
        let shared = self.shared.incumbent.load(Ordering::Relaxed) as u128;
        if value < shared || self.best.is_some_and(|b| value < b) {
            return;
        }
        let g = self.p.graph(&self.w);
        if matches!(self.p.family, Family::NC | Family::W) && !self.p.family.contains(&g) {
            return;
        }
        debug_assert!(self.p.family.contains(&g));
        if self.best.is_none_or(|b| value > b) {
            self.best = Some(value);
            self.witnesses.clear();
            self.truncated = false;
            self.labeled = 0;
            let v64 = u64::try_from(value).unwrap_or(u64::MAX);
            self.shared.incumbent.fetch_max(v64, Ordering::Relaxed);
        }
        self.labeled += 1;
        let (key, rep) = if g.n() <= DEFAULT_CANONICAL_LIMIT {
            let rep = g.canonical_form().expect("within limit");
            (rep.weights().to_vec(), rep)
        } else {
            (g.weights().to_vec(), g)
        };
        if self.witnesses.contains_key(&key) {
            return;
        }
        if self.witnesses.len() < self.cap {
            self.witnesses.insert(key, rep);
        } else {
            self.truncated = true;
        }
    }

    fn load_prefix(&mut self, prefix: &[u8]) -> bool {
        for (pos, &x) in prefix.iter().enumerate() {
            self.push(pos, x);
        }
        true
    }
}

/// Prefix depth for the parallel split: enough to give every thread work.
fn split_depth(p: &Problem) -> usize {
    p.len().saturating_sub(1).min(3)
}

struct Outcome {
    workers: Vec<WorkerResult>,
    nodes: u64,
    aborted: bool,
}

struct WorkerResult {
    count: u128,
    best: Option<u128>,
    witnesses: BTreeMap<Vec<u8>, Multigraph>,
    truncated: bool,
    labeled: u64,
}

fn run(p: &Problem, mode: Mode, opts: &SearchOptions) -> Outcome {
    let shared = Shared::new(opts.node_budget);
    let depth = split_depth(p);
    let mut root = Worker::new(p, mode, opts.prune, &shared, opts.witness_cap);
    root.stop_at = Some(depth);
    root.dfs(0);
    root.flush();
    let prefixes = std::mem::take(&mut root.prefixes);
    let workers: Vec<WorkerResult> = prefixes
        .into_par_iter()
        .map(|prefix| {
            let mut w = Worker::new(p, mode, opts.prune, &shared, opts.witness_cap);
            w.load_prefix(&prefix);
            w.dfs(depth);
            w.flush();
            WorkerResult {
                count: w.count,
                best: w.best,
                witnesses: w.witnesses,
                truncated: w.truncated,
                labeled: w.labeled,
            }
        })
        .collect();
    Outcome {
        workers,
        nodes: shared.nodes.load(Ordering::Relaxed),
        aborted: shared.abort.load(Ordering::Relaxed),
    }
}

/// `|F(n,s,q)|`, the number of labeled (s,q)-graphs on `[n]`.
pub fn count_f(n: usize, s: usize, q: u64, opts: &SearchOptions) -> Result<CountResult> {
    if n < s {
        return Err(Error::InvalidParameter(format!("F({n},{s},{q}) is infinite for n < s")));
    }
    let p = Problem::new(n, s, q, Family::All, opts.order)?;
    let out = run(&p, Mode::Count, opts);
    let count: u128 = out.workers.iter().map(|w| w.count).sum();
    if out.aborted {
        return Err(Error::BudgetExceeded {
            budget: opts.node_budget.unwrap_or(0),
            explored: out.nodes,
            partial: count.to_string(),
        });
    }
    Ok(CountResult {
        n,
        s,
        q,
        count: BigUint::from(count),
        exact: true,
        nodes: out.nodes,
    })
}

/// The maximum of `P` or `S` over `F(n,s,q) ∩ family`, with the optimal
/// graphs up to isomorphism.
pub fn extremal(
    n: usize,
    s: usize,
    q: u64,
    objective: Objective,
    family: Family,
    opts: &SearchOptions,
) -> Result<ExtremalResult> {
    let p = Problem::new(n, s, q, family, opts.order)?;
    let out = run(&p, Mode::Optimize(objective), opts);
    let best = out.workers.iter().filter_map(|w| w.best).max();
    if out.aborted {
        return Err(Error::BudgetExceeded {
            budget: opts.node_budget.unwrap_or(0),
            explored: out.nodes,
            partial: best.map_or_else(|| "none".into(), |b| b.to_string()),
        });
    }
    let best = best.ok_or_else(|| Error::InvalidParameter(format!("{family} is empty at n = {n}")))?;
    let mut merged: BTreeMap<Vec<u8>, Multigraph> = BTreeMap::new();
    let mut labeled = 0;
    let mut truncated = false;
    for w in out.workers.into_iter().filter(|w| w.best == Some(best)) {
        labeled += w.labeled;
        truncated |= w.truncated;
        merged.extend(w.witnesses);
    }
    if merged.len() > opts.witness_cap {
        truncated = true;
    }
    let witnesses: Vec<Multigraph> = merged.into_values().take(opts.witness_cap).collect();
    Ok(ExtremalResult {
        objective,
        family,
        n,
        s,
        q,
        value: ProductValue(BigUint::from(best)),
        witnesses,
        witnesses_truncated: truncated,
        optimal_labeled: labeled,
        nodes: out.nodes,
    })
}

/// Every product-extremal member of `F(n,s,q) ∩ family`, up to isomorphism.
pub fn extremal_set(n: usize, s: usize, q: u64, family: Family) -> Result<Vec<Multigraph>> {
    let opts = SearchOptions {
        witness_cap: usize::MAX,
        ..SearchOptions::default()
    };
    Ok(extremal(n, s, q, Objective::Product, family, &opts)?.witnesses)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDecomposition {
    /// Disjoint triples with weight sum at least 9, chosen greedily.
    pub triples: Vec<[usize; 3]>,
    /// Disjoint pairs of weight at least 4 avoiding the triples.
    pub pairs: Vec<(usize, usize)>,
    /// The vertices left over, increasing.
    pub remainder: Vec<usize>,
    /// The remainder induces a member of D.
    pub remainder_in_d: bool,
    /// Every remainder vertex sends weight at most 6 into each triple and at
    /// most 4 into each pair.
    pub cross_sums_bounded: bool,
    /// Wherever those sums are bounded, the products are at most 8 and 4.
    pub cross_products_bounded: bool,
}

/// Greedy maximal collections of disjoint heavy triples, then heavy pairs.
pub fn violation_decomposition(g: &Multigraph) -> ViolationDecomposition {
    let n = g.n();
    let mut used = vec![false; n];
    let mut triples = Vec::new();
    let mut c = Combinations::new(n, 3);
    while let Some(t) = c.next_ref() {
        if t.iter().any(|&v| used[v]) {
            continue;
        }
        if g.window_sum(t) >= 9 {
            t.iter().for_each(|&v| used[v] = true);
            triples.push([t[0], t[1], t[2]]);
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !used[i] && !used[j] && g.weight(i, j) >= 4 {
                used[i] = true;
                used[j] = true;
                pairs.push((i, j));
            }
        }
    }
    let remainder: Vec<usize> = (0..n).filter(|&v| !used[v]).collect();
    let remainder_in_d = g.induced(&remainder).family_membership().d;
    let mut sums_ok = true;
    let mut products_ok = true;
    for &z in &remainder {
        for t in &triples {
            let ws = t.map(|x| g.weight(z, x) as u64);
            let sum: u64 = ws.iter().sum();
            sums_ok &= sum <= 6;
            products_ok &= sum > 6 || ws.iter().product::<u64>() <= 8;
        }
        for &(a, b) in &pairs {
            let (x, y) = (g.weight(z, a) as u64, g.weight(z, b) as u64);
            sums_ok &= x + y <= 4;
            products_ok &= x + y > 4 || x * y <= 4;
        }
    }
    ViolationDecomposition {
        triples,
        pairs,
        remainder,
        remainder_in_d,
        cross_sums_bounded: sums_ok,
        cross_products_bounded: products_ok,
    }
}
