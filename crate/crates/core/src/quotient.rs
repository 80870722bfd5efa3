//! Quotients of neat multigraphs by the weight-1 relation, as vertex-weighted
//! graphs, and the transformations on them.

use serde::{Deserialize, Serialize};

use crate::analysis::bounds::g_x_sizes;
use crate::analysis::bounds::w_optimum;
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::product::{PrimePower, ProductValue};

/// A simple graph on part indices with a positive weight per part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "VWGraphWire", into = "VWGraphWire")]
pub struct VWGraph {
    parts: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct VWGraphWire {
    parts: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<VWGraphWire> for VWGraph {
    type Error = Error;
    fn try_from(w: VWGraphWire) -> Result<Self> {
        VWGraph::new(w.parts, w.edges)
    }
}

impl From<VWGraph> for VWGraphWire {
    fn from(g: VWGraph) -> Self {
        VWGraphWire {
            parts: g.parts,
            edges: g.edges,
        }
    }
}

impl VWGraph {
    /// Edges are normalized to `(i, j)` with `i < j`, sorted and deduplicated.
    pub fn new(parts: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(i) = parts.iter().position(|&p| p == 0) {
            return Err(Error::InvalidParameter(format!("part {i} has weight 0")));
        }
        let k = parts.len();
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) out of range for {k} parts"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("loop at part {a}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(VWGraph { parts, edges: norm })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn order(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// `f_π` as `2^a 3^b`.
    pub fn f_pi_exponents(&self) -> PrimePower {
        let mut two = 0i64;
        let mut three = 0i64;
        let k = self.parts.len();
        for a in 0..k {
            for b in a + 1..k {
                let m = (self.parts[a] * self.parts[b]) as i64;
                if self.has_edge(a, b) {
                    three += m;
                } else {
                    two += m;
                }
            }
        }
        PrimePower::new(two, three, 0)
    }

    pub fn f_pi(&self) -> ProductValue {
        self.f_pi_exponents().to_product().expect("nonnegative exponents")
    }

    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.parts.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// `true` iff the edges are exactly `{center, x}` for every other part.
    pub fn is_star_at(&self, center: usize) -> bool {
        let k = self.parts.len();
        center < k && self.edges.len() == k - 1 && self.edges.iter().all(|&(a, b)| a == center || b == center)
    }

    /// Some center if the graph is a star (lowest index when ambiguous).
    pub fn star_center(&self) -> Option<usize> {
        (0..self.parts.len()).find(|&c| self.is_star_at(c))
    }
}

/// `(quotient, classes)` where `classes[i]` lists the vertices of part `i`.
/// Parts are ordered by their smallest vertex.
pub fn quotient_with_classes(g: &Multigraph) -> Result<(VWGraph, Vec<Vec<usize>>)> {
    if !g.is_neat() {
        return Err(Error::NotNeat);
    }
    if g.weights().contains(&0) {
        return Err(Error::ZeroWeight);
    }
    let n = g.n();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let members: Vec<usize> = std::iter::once(v)
            .chain((v + 1..n).filter(|&u| g.weight(v, u) == 1))
            .collect();
        for &u in &members {
            if class_of[u] != usize::MAX {
                return Err(Error::Internal("weight-1 relation is not transitive".into()));
            }
            class_of[u] = id;
        }
        classes.push(members);
    }
    let mut edges = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let w0 = g.weight(classes[a][0], classes[b][0]);
            for &x in &classes[a] {
                for &y in &classes[b] {
                    if g.weight(x, y) != w0 {
                        return Err(Error::Internal(format!(
                            "cross weights between classes {a} and {b} are not constant"
                        )));
                    }
                }
            }
            match w0 {
                3 => edges.push((a, b)),
                2 => {}
                w => return Err(Error::Internal(format!("cross weight {w} between classes {a} and {b}"))),
            }
        }
        for (i, &x) in classes[a].iter().enumerate() {
            for &y in &classes[a][i + 1..] {
                if g.weight(x, y) != 1 {
                    return Err(Error::Internal("class is not a weight-1 clique".into()));
                }
            }
        }
    }
    let parts = classes.iter().map(|c| c.len() as u64).collect();
    Ok((VWGraph::new(parts, edges)?, classes))
}

pub fn quotient(g: &Multigraph) -> Result<VWGraph> {
    quotient_with_classes(g).map(|(q, _)| q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub graph: Multigraph,
    /// The input was a forest, so the result lies in NC(n).
    pub forest: bool,
}

/// A neat multigraph whose quotient is `h`. Part `i` takes the next `|V_i|`
/// positions; position `k` becomes vertex `labels[k]` when labels are given.
pub fn realize(h: &VWGraph, labels: Option<&[usize]>) -> Result<Realization> {
    let n = h.order() as usize;
    let mut part_of = Vec::with_capacity(n);
    for (i, &s) in h.parts.iter().enumerate() {
        part_of.extend(std::iter::repeat_n(i, s as usize));
    }
    if let Some(l) = labels {
        let mut seen = vec![false; n];
        if l.len() != n || l.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidParameter(format!(
                "labels must be a permutation of 0..{n}"
            )));
        }
    }
    let pos = |k: usize| labels.map_or(k, |l| l[k]);
    let mut g = Multigraph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            let (pa, pb) = (part_of[a], part_of[b]);
            let w = if pa == pb {
                1
            } else if h.has_edge(pa, pb) {
                3
            } else {
                2
            };
            g.set_weight(pos(a), pos(b), w);
        }
    }
    Ok(Realization {
        graph: g,
        forest: h.is_forest(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarTransform {
    pub graph: VWGraph,
    pub center: usize,
    pub strict: bool,
    /// `(V, W)` with `V` the center and `|V| = |W|`, when `f_π` did not grow
    /// and the input was not already a star at `V`.
    pub witness: Option<(usize, usize)>,
}

/// Rewire a forest into a star centered at the lowest-index heaviest part
/// without lowering `f_π`.
///
/// Isolated parts are joined to the center; then a degree-1 part `Y` not
/// adjacent to the center repeatedly trades its edge `YW` for `VY`, which
/// multiplies `f_π` by `(3/2)^{|Y|(|V|-|W|)}`. When a move leaves `W`
/// isolated, the next round joins it to the center.
pub fn star_transform(h: &VWGraph) -> Result<StarTransform> {
    if !h.is_forest() {
        return Err(Error::NotForest);
    }
    let k = h.parts.len();
    if k < 2 {
        return Err(Error::InvalidParameter("star transform needs at least 2 parts".into()));
    }
    let max = *h.parts.iter().max().unwrap();
    let v = h.parts.iter().position(|&p| p == max).unwrap();
    let mut cur = h.clone();
    let mut witness = None;
    loop {
        let isolated: Vec<usize> = (0..k).filter(|&x| x != v && cur.degree(x) == 0).collect();
        if !isolated.is_empty() {
            let mut e = cur.edges.clone();
            e.extend(isolated.iter().map(|&x| (v, x)));
            cur = VWGraph::new(cur.parts.clone(), e)?;
        }
        if cur.is_star_at(v) {
            break;
        }
        let adj = cur.neighbors(v);
        let y = (0..k)
            .find(|&y| y != v && !adj.contains(&y) && cur.degree(y) == 1)
            .ok_or_else(|| Error::Internal("no degree-1 part outside the center's neighborhood".into()))?;
        let w = cur.neighbors(y)[0];
        if witness.is_none() && cur.parts[w] == cur.parts[v] {
            witness = Some((v, w));
        }
        let mut e: Vec<(usize, usize)> = cur
            .edges
            .iter()
            .copied()
            .filter(|&ed| ed != (y.min(w), y.max(w)))
            .collect();
        e.push((v, y));
        cur = VWGraph::new(cur.parts.clone(), e)?;
    }
    let before = h.f_pi_exponents();
    let after = cur.f_pi_exponents();
    if after < before {
        return Err(Error::Internal("star transform lowered f_pi".into()));
    }
    let strict = after > before;
    Ok(StarTransform {
        graph: cur,
        center: v,
        strict,
        witness: if strict { None } else { witness },
    })
}

/// Split the non-center part `w` of a star into parts of weight `|W| - 1`
/// (kept at index `w`) and `1` (appended), both joined to the center.
pub fn split_leaf(h: &VWGraph, w: usize) -> Result<VWGraph> {
    let k = h.parts.len();
    if w >= k {
        return Err(Error::InvalidParameter(format!("part {w} out of range")));
    }
    let center = (0..k).find(|&c| c != w && h.is_star_at(c)).ok_or(Error::NotStar)?;
    if h.parts[w] < 2 {
        return Err(Error::InvalidParameter(format!("part {w} has weight 1")));
    }
    let mut parts = h.parts.clone();
    parts[w] -= 1;
    parts.push(1);
    let mut edges = h.edges.clone();
    edges.push((center, k));
    VWGraph::new(parts, edges)
}

/// The W(n) member 𝒢_X: `G[X]` is the W(t) graph with `|R| = ⌈βt⌉`, the rest
/// an optimal W(n−t) graph, and cross pairs follow the combined partition.
pub fn build_g_x(n: usize, x: &[usize]) -> Result<Multigraph> {
    let t = x.len();
    if t < 2 || t > n {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= |X| <= n, got |X| = {t}, n = {n}"
        )));
    }
    let mut xs = x.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() != t || xs[t - 1] >= n {
        return Err(Error::InvalidParameter("X must be distinct vertices below n".into()));
    }
    let (b, l, _) = g_x_sizes(n as u64, t as u64)?;
    let mut left = vec![false; n];
    for &v in &xs[..l as usize] {
        left[v] = true;
    }
    debug_assert_eq!(t - l as usize, b as usize);
    let ys: Vec<usize> = (0..n).filter(|v| xs.binary_search(v).is_err()).collect();
    if !ys.is_empty() {
        let (r_a, _) = w_optimum(ys.len() as u64)?;
        let l_a = ys.len() - r_a as usize;
        for &v in &ys[..l_a] {
            left[v] = true;
        }
    }
    Ok(Multigraph::from_fn(n, |i, j| match (left[i], left[j]) {
        (true, true) => 1,
        (false, false) => 2,
        _ => 3,
    }))
}
