//! Dense multigraphs on `[n]`: predicates, pattern detection, constructors
//! and the `.mg` text format.
//!
//! Vertices are `0..n`. Weights live in the upper triangle, row-major:
//! `(0,1), (0,2), .., (0,n-1), (1,2), ..`, which is also the `.mg` line order.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::product::ProductValue;
use crate::subsets::Combinations;

/// Largest order accepted by [`Multigraph::canonical_key`] unless a caller
/// asks for more.
pub const DEFAULT_CANONICAL_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    n: usize,
    w: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub sum: u64,
    pub product: ProductValue,
    pub max: u8,
}

/// Membership of one multigraph in every family the extremal argument uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFlags {
    pub f_4_15: bool,
    pub f_3_8: bool,
    pub f_le3_4_15: bool,
    pub d: bool,
    pub a_311: bool,
    pub a_211: bool,
    pub a_321: bool,
    pub a_123: bool,
    pub c: bool,
    pub nc: bool,
    pub w: bool,
}

#[inline]
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub(crate) fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl Multigraph {
    /// All weights zero.
    pub fn empty(n: usize) -> Self {
        Multigraph {
            n,
            w: vec![0; num_pairs(n)],
        }
    }

    pub fn constant(n: usize, weight: u8) -> Self {
        Multigraph {
            n,
            w: vec![weight; num_pairs(n)],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut w = Vec::with_capacity(num_pairs(n));
        for i in 0..n {
            for j in i + 1..n {
                w.push(f(i, j));
            }
        }
        Multigraph { n, w }
    }

    /// Weights in upper-triangle row-major order.
    pub fn from_weights(n: usize, weights: Vec<u8>) -> Result<Self> {
        if weights.len() != num_pairs(n) {
            return Err(Error::InvalidParameter(format!(
                "expected {} weights for n = {n}, got {}",
                num_pairs(n),
                weights.len()
            )));
        }
        Ok(Multigraph { n, w: weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[u8] {
        &self.w
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u8 {
        debug_assert!(i != j && i < self.n && j < self.n);
        self.w[pair_index(self.n, i, j)]
    }

    #[inline]
    pub fn set_weight(&mut self, i: usize, j: usize, weight: u8) {
        debug_assert!(i != j && i < self.n && j < self.n);
        let idx = pair_index(self.n, i, j);
        self.w[idx] = weight;
    }

    pub fn with_weight(mut self, i: usize, j: usize, weight: u8) -> Self {
        self.set_weight(i, j, weight);
        self
    }

    /// `(i, j, w(ij))` for every pair `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.w.iter())
            .map(|((i, j), &w)| (i, j, w))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn sum(&self) -> u64 {
        self.w.iter().map(|&x| x as u64).sum()
    }

    pub fn product(&self) -> ProductValue {
        ProductValue::product_of(self.w.iter().map(|&x| x as u64))
    }

    /// μ(G); 0 when there are no pairs.
    pub fn max_weight(&self) -> u8 {
        self.w.iter().copied().max().unwrap_or(0)
    }

    pub fn stats(&self) -> Stats {
        Stats {
            sum: self.sum(),
            product: self.product(),
            max: self.max_weight(),
        }
    }

    /// Total weight spanned by `window`.
    pub fn window_sum(&self, window: &[usize]) -> u64 {
        let mut s = 0u64;
        for (a, &x) in window.iter().enumerate() {
            for &y in &window[a + 1..] {
                s += self.weight(x, y) as u64;
            }
        }
        s
    }

    pub fn induced(&self, vertices: &[usize]) -> Multigraph {
        Multigraph::from_fn(vertices.len(), |a, b| self.weight(vertices[a], vertices[b]))
    }

    /// The multigraph `H` with `H(perm[i], perm[j]) = G(i, j)`.
    pub fn permuted(&self, perm: &[usize]) -> Multigraph {
        assert_eq!(perm.len(), self.n);
        let mut out = Multigraph::empty(self.n);
        for (i, j, w) in self.pairs() {
            out.set_weight(perm[i], perm[j], w);
        }
        out
    }

    /// Every `s`-subset whose spanned weight exceeds `q`, in lexicographic
    /// order. Empty when `n < s`.
    pub fn violations(&self, s: usize, q: u64) -> Vec<Vec<usize>> {
        assert!(s >= 2, "window size must be at least 2");
        Combinations::new(self.n, s)
            .filter(|x| self.window_sum(x) > q)
            .collect()
    }

    /// `true` iff this is an `(s,q)`-graph.
    pub fn is_sq_graph(&self, s: usize, q: u64) -> bool {
        assert!(s >= 2, "window size must be at least 2");
        let mut it = Combinations::new(self.n, s);
        while let Some(x) = it.next_ref() {
            if self.window_sum(x) > q {
                return false;
            }
        }
        true
    }

    /// Triples `{x,y,z}` whose three weights form the multiset `pattern`.
    pub fn triangles(&self, pattern: [u8; 3]) -> Vec<[usize; 3]> {
        let mut want = pattern;
        want.sort_unstable();
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in x + 1..self.n {
                let wxy = self.weight(x, y);
                if !want.contains(&wxy) {
                    continue;
                }
                for z in y + 1..self.n {
                    let mut t = [wxy, self.weight(x, z), self.weight(y, z)];
                    t.sort_unstable();
                    if t == want {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }

    pub fn has_triangle(&self, pattern: [u8; 3]) -> bool {
        let mut want = pattern;
        want.sort_unstable();
        for x in 0..self.n {
            for y in x + 1..self.n {
                let wxy = self.weight(x, y);
                if !want.contains(&wxy) {
                    continue;
                }
                for z in y + 1..self.n {
                    let mut t = [wxy, self.weight(x, z), self.weight(y, z)];
                    t.sort_unstable();
                    if t == want {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Γ(G): the (1,2,3)-triangles.
    pub fn gamma_123(&self) -> Vec<[usize; 3]> {
        self.triangles([1, 2, 3])
    }

    /// Some `X` with `G[X] ≅ C_t(3,2)`, listed in cycle order, or `None`.
    pub fn find_cycle_copy(&self, t: usize) -> Result<Option<Vec<usize>>> {
        if t < 3 || t > self.n {
            return Err(Error::InvalidParameter(format!(
                "cycle length t = {t} must satisfy 3 <= t <= n = {}",
                self.n
            )));
        }
        let mut path = Vec::with_capacity(t);
        let mut used = vec![false; self.n];
        for start in 0..self.n {
            path.clear();
            path.push(start);
            used[start] = true;
            if self.extend_cycle(t, &mut path, &mut used) {
                return Ok(Some(path));
            }
            used[start] = false;
        }
        Ok(None)
    }

    /// Backtracking over paths `x_0 x_1 ..` of weight-3 edges whose chords all
    /// have weight 2. `x_0` is the smallest vertex on the cycle and `x_1 < x_{t-1}`.
    fn extend_cycle(&self, t: usize, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let k = path.len();
        let start = path[0];
        if k == t {
            return true;
        }
        let last = path[k - 1];
        for v in start + 1..self.n {
            if used[v] || self.weight(last, v) != 3 {
                continue;
            }
            if k == t - 1 && t > 3 && v < path[1] {
                continue;
            }
            let closing = k == t - 1;
            let ok = path[..k - 1].iter().enumerate().all(|(idx, &u)| {
                let want = if idx == 0 && closing { 3 } else { 2 };
                self.weight(u, v) == want
            });
            if !ok {
                continue;
            }
            path.push(v);
            used[v] = true;
            if self.extend_cycle(t, path, used) {
                used[v] = false;
                return true;
            }
            used[v] = false;
            path.pop();
        }
        false
    }

    /// Some `C_t(3,2)` copy for any `3 <= t <= n`.
    pub fn contains_any_cycle_copy(&self) -> bool {
        (3..=self.n).any(|t| matches!(self.find_cycle_copy(t), Ok(Some(_))))
    }

    /// `(S_z(X), P_z(X))`: cross sum and product from `z` into `window`.
    pub fn window_metrics(&self, window: &[usize], z: usize) -> Result<(u64, ProductValue)> {
        self.check_vertex(z)?;
        for &x in window {
            self.check_vertex(x)?;
        }
        if window.contains(&z) {
            return Err(Error::VertexInWindow(z));
        }
        let s = window.iter().map(|&x| self.weight(x, z) as u64).sum();
        let p = ProductValue::product_of(window.iter().map(|&x| self.weight(x, z) as u64));
        Ok((s, p))
    }

    /// G⁺: every weight incremented.
    pub fn plus_one(&self) -> Result<Multigraph> {
        let w = self
            .w
            .iter()
            .map(|&x| x.checked_add(1).ok_or(Error::WeightOverflow))
            .collect::<Result<Vec<u8>>>()?;
        Ok(Multigraph { n: self.n, w })
    }

    /// Number of submultigraphs, `P(G⁺)`.
    pub fn count_submultigraphs(&self) -> ProductValue {
        ProductValue::product_of(self.w.iter().map(|&x| x as u64 + 1))
    }

    /// `|Δ(G, G')|`, the number of pairs whose weights differ.
    pub fn edit_distance(&self, other: &Multigraph) -> Result<usize> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n, other.n));
        }
        Ok(self.w.iter().zip(&other.w).filter(|(a, b)| a != b).count())
    }

    /// `|Δ(G, G')| <= δ n²`.
    pub fn is_delta_close(&self, other: &Multigraph, delta: Ratio<u64>) -> Result<bool> {
        let d = self.edit_distance(other)? as u128;
        let n2 = (self.n * self.n) as u128;
        Ok(d * (*delta.denom() as u128) <= (*delta.numer() as u128) * n2)
    }

    pub fn in_d(&self) -> bool {
        self.max_weight() <= 3 && self.is_sq_graph(3, 8) && self.is_sq_graph(4, 15)
    }

    /// Neat: μ ≤ 3 and no (1,1,2), (1,1,3) or (1,2,3) triangle.
    pub fn is_neat(&self) -> bool {
        self.max_weight() <= 3
            && !self.has_triangle([1, 1, 2])
            && !self.has_triangle([1, 1, 3])
            && !self.has_triangle([1, 2, 3])
    }

    pub fn family_membership(&self) -> FamilyFlags {
        let f_4_15 = self.is_sq_graph(4, 15);
        let f_3_8 = self.is_sq_graph(3, 8);
        let f_le3_4_15 = f_4_15 && self.max_weight() <= 3;
        let d = f_le3_4_15 && f_3_8;
        let omits_311 = !self.has_triangle([3, 1, 1]);
        let omits_211 = !self.has_triangle([2, 1, 1]);
        let omits_321 = !self.has_triangle([3, 2, 1]);
        let a_311 = f_4_15 && omits_311;
        let a_211 = f_4_15 && omits_211;
        let a_321 = f_4_15 && omits_321;
        let c = d && a_311 && a_211 && a_321;
        let nc = c && self.no_cycle_copies_in_c();
        let w = nc && self.w_partition().is_some();
        FamilyFlags {
            f_4_15,
            f_3_8,
            f_le3_4_15,
            d,
            a_311,
            a_211,
            a_321,
            a_123: a_321,
            c,
            nc,
            w,
        }
    }

    /// For a member of C(n): no copy of any C_t(3,2). Members of C(n) are neat,
    /// so with positive weights this is the quotient forest test; with a zero
    /// weight the quotient is undefined and the cycles are searched directly.
    fn no_cycle_copies_in_c(&self) -> bool {
        if self.w.iter().all(|&x| x >= 1) {
            match crate::quotient::quotient(self) {
                Ok(q) => q.is_forest(),
                Err(_) => !self.contains_any_cycle_copy(),
            }
        } else {
            !self.contains_any_cycle_copy()
        }
    }

    /// A partition `(L, R)` realizing membership in W(n), if one exists.
    ///
    /// Weight-1 pairs pin both ends into `L`, weight-2 pairs into `R`; the
    /// remaining vertices only see weight 3, so at most one can sit on each
    /// side, and the few placements left are checked directly.
    pub fn w_partition(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let n = self.n;
        if self.w.iter().any(|&x| !(1..=3).contains(&x)) {
            return None;
        }
        let mut side: Vec<Option<bool>> = vec![None; n]; // Some(true) = L
        for (i, j, w) in self.pairs() {
            let want = match w {
                1 => Some(true),
                2 => Some(false),
                _ => None,
            };
            if let Some(s) = want {
                for v in [i, j] {
                    match side[v] {
                        Some(prev) if prev != s => return None,
                        _ => side[v] = Some(s),
                    }
                }
            }
        }
        let free: Vec<usize> = (0..n).filter(|&v| side[v].is_none()).collect();
        if free.len() > 2 {
            return None;
        }
        for mask in 0..(1u32 << free.len()) {
            let mut s = side.clone();
            for (b, &v) in free.iter().enumerate() {
                s[v] = Some(mask >> b & 1 == 1);
            }
            let left: Vec<bool> = s.iter().map(|x| x.unwrap()).collect();
            if self.matches_w_partition(&left, 2) {
                let l = (0..n).filter(|&v| left[v]).collect();
                let r = (0..n).filter(|&v| !left[v]).collect();
                return Some((l, r));
            }
        }
        None
    }

    /// Whether the labeling `left` realizes the W_a pattern.
    pub fn matches_w_partition(&self, left: &[bool], a: u8) -> bool {
        self.pairs().all(|(i, j, w)| {
            let want = match (left[i], left[j]) {
                (true, true) => a - 1,
                (false, false) => a,
                _ => a + 1,
            };
            w == want
        })
    }

    /// W_a(n) member with `L = {0..n-r}` and `R = {n-r..n}`.
    pub fn build_w(n: usize, r: usize, a: u8) -> Result<Multigraph> {
        if r > n {
            return Err(Error::InvalidParameter(format!("r = {r} exceeds n = {n}")));
        }
        if a < 2 || a == u8::MAX {
            return Err(Error::InvalidParameter(format!("a = {a} must be in 2..255")));
        }
        let l = n - r;
        Ok(Multigraph::from_fn(n, |i, j| match (i < l, j < l) {
            (true, true) => a - 1,
            (false, false) => a,
            _ => a + 1,
        }))
    }

    /// C_t(3,2) with the weight-3 cycle on consecutive labels.
    pub fn build_cycle(t: usize) -> Result<Multigraph> {
        if t < 3 {
            return Err(Error::InvalidParameter(format!("cycle length {t} < 3")));
        }
        Ok(Multigraph::from_fn(t, |i, j| {
            if j == i + 1 || (i == 0 && j == t - 1) {
                3
            } else {
                2
            }
        }))
    }

    /// Lexicographically smallest weight sequence over all relabelings, with
    /// pairs read column by column: `(0,1), (0,2), (1,2), (0,3), ..`.
    /// Equal keys iff the multigraphs are isomorphic.
    pub fn canonical_key(&self) -> Result<Vec<u8>> {
        self.canonical_key_with_limit(DEFAULT_CANONICAL_LIMIT)
    }

    pub fn canonical_key_with_limit(&self, limit: usize) -> Result<Vec<u8>> {
        if self.n > limit {
            return Err(Error::CanonicalLimit { n: self.n, limit });
        }
        let mut state = CanonState {
            g: self,
            best: None,
            cur: Vec::with_capacity(self.w.len()),
            order: Vec::with_capacity(self.n),
            used: vec![false; self.n],
            updates: 0,
        };
        state.search(Ordering::Less);
        Ok(state.best.unwrap_or_default())
    }

    /// The relabeling of `self` whose colex weight list is the canonical key.
    pub fn canonical_form(&self) -> Result<Multigraph> {
        let key = self.canonical_key()?;
        let mut it = key.iter();
        let mut g = Multigraph::empty(self.n);
        for j in 1..self.n {
            for i in 0..j {
                g.set_weight(i, j, *it.next().expect("key covers every pair"));
            }
        }
        Ok(g)
    }

    pub fn is_isomorphic(&self, other: &Multigraph) -> Result<bool> {
        if self.n != other.n {
            return Ok(false);
        }
        Ok(self.canonical_key()? == other.canonical_key()?)
    }

    pub fn to_mg_string(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for i in 0..self.n.saturating_sub(1) {
            let row: Vec<String> = (i + 1..self.n).map(|j| self.weight(i, j).to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn parse_mg(text: &str) -> Result<Multigraph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("n") {
            return Err(Error::Parse(format!("expected header `n <N>`, got `{header}`")));
        }
        let n: usize = parts
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad vertex count in `{header}`")))?;
        if n == 0 || parts.next().is_some() {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let mut w = Vec::with_capacity(num_pairs(n));
        for i in 0..n - 1 {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {}", i + 1)))?;
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|x| x.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
            if row.len() != n - 1 - i {
                return Err(Error::Parse(format!(
                    "row {} has {} weights, expected {}",
                    i + 1,
                    row.len(),
                    n - 1 - i
                )));
            }
            w.extend(row);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("trailing content `{extra}`")));
        }
        Ok(Multigraph { n, w })
    }
}

/// Serialized as its `.mg` text.
impl Serialize for Multigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_mg_string())
    }
}

impl<'de> Deserialize<'de> for Multigraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Multigraph::parse_mg(&text).map_err(serde::de::Error::custom)
    }
}

struct CanonState<'a> {
    g: &'a Multigraph,
    best: Option<Vec<u8>>,
    cur: Vec<u8>,
    order: Vec<usize>,
    used: Vec<bool>,
    updates: u64,
}

impl CanonState<'_> {
    /// `state` is how the current prefix compares with the same prefix of
    /// `best` (`Less` also when there is no best yet).
    fn search(&mut self, mut state: Ordering) {
        let n = self.g.n;
        let k = self.order.len();
        if k == n {
            self.best = Some(self.cur.clone());
            self.updates += 1;
            return;
        }
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            let start = self.cur.len();
            for &u in &self.order {
                self.cur.push(self.g.weight(u, v));
            }
            let child = match (&self.best, state) {
                (Some(best), Ordering::Equal) => self.cur[start..].cmp(&best[start..start + k]),
                _ => Ordering::Less,
            };
            if child != Ordering::Greater {
                let before = self.updates;
                self.order.push(v);
                self.used[v] = true;
                self.search(child);
                self.used[v] = false;
                self.order.pop();
                if self.updates != before {
                    // the new best extends the current prefix
                    state = Ordering::Equal;
                }
            }
            self.cur.truncate(start);
        }
    }
}
