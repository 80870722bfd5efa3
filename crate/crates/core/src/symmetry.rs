//! Vertex replacement (Zykov-style symmetrization) and the moves built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::product::ProductValue;

/// `p(y)`: product of the weights at `y`.
pub fn vertex_product(g: &Multigraph, y: usize) -> Result<ProductValue> {
    g.check_vertex(y)?;
    Ok(ProductValue::product_of(
        (0..g.n()).filter(|&x| x != y).map(|x| g.weight(x, y) as u64),
    ))
}

/// `G_xy`: `x` becomes a copy of `y`, joined to it with weight 1.
pub fn replace(g: &Multigraph, x: usize, y: usize) -> Result<Multigraph> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if x == y {
        return Err(Error::SameVertex(x));
    }
    let mut out = g.clone();
    for u in 0..g.n() {
        if u != x && u != y {
            out.set_weight(x, u, g.weight(y, u));
        }
    }
    out.set_weight(x, y, 1);
    Ok(out)
}

/// Left-to-right composition of [`replace`] over `(source, target)` pairs.
pub fn replace_seq(g: &Multigraph, pairs: &[(usize, usize)]) -> Result<Multigraph> {
    let mut cur = g.clone();
    for &(x, y) in pairs {
        cur = replace(&cur, x, y)?;
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementTrace {
    /// `(source, target)`: the source vertex was replaced by a copy of the target.
    pub steps: Vec<(usize, usize)>,
    pub products: Vec<ProductValue>,
    pub gamma_sizes: Vec<usize>,
}

impl ReplacementTrace {
    fn start(g: &Multigraph, gamma: usize) -> Self {
        ReplacementTrace {
            steps: Vec::new(),
            products: vec![g.product()],
            gamma_sizes: vec![gamma],
        }
    }

    /// `(P, −|Γ|)` strictly increases lexicographically at every step.
    pub fn is_progressive(&self) -> bool {
        self.products
            .windows(2)
            .zip(self.gamma_sizes.windows(2))
            .all(|(p, g)| p[1] > p[0] || (p[1] == p[0] && g[1] < g[0]))
    }
}

/// Remove every (1,2,3)-triangle without lowering `P`.
///
/// Each round takes the lexicographically first triangle, with `u < v` the
/// ends of its weight-1 edge, and applies `G_uv` or `G_vu`: the one with the
/// larger product, then the smaller `|Γ|`, then the one replacing `u`. With
/// positive weights this is the rule "p(v) > p(u) gives G_uv, p(u) > p(v)
/// gives G_vu, ties shrink Γ".
pub fn eliminate_123(g: &Multigraph) -> Result<(Multigraph, ReplacementTrace)> {
    if !g.in_d() {
        return Err(Error::NotInD);
    }
    let mut cur = g.clone();
    let mut gamma = cur.gamma_123();
    let mut trace = ReplacementTrace::start(&cur, gamma.len());
    while let Some(&[a, b, c]) = gamma.first() {
        let (u, v) = [(a, b), (a, c), (b, c)]
            .into_iter()
            .find(|&(x, y)| cur.weight(x, y) == 1)
            .ok_or_else(|| Error::Internal("(1,2,3)-triangle without a weight-1 edge".into()))?;
        let g_uv = replace(&cur, u, v)?;
        let g_vu = replace(&cur, v, u)?;
        let key = |h: &Multigraph| {
            let gam = h.gamma_123().len();
            (h.product(), std::cmp::Reverse(gam), gam)
        };
        let (k_uv, k_vu) = (key(&g_uv), key(&g_vu));
        let (next, step, next_key) = if k_vu > k_uv {
            (g_vu, (v, u), k_vu)
        } else {
            (g_uv, (u, v), k_uv)
        };
        let old_p = trace.products.last().unwrap();
        let old_g = *trace.gamma_sizes.last().unwrap();
        if !(next_key.0 > *old_p || (next_key.0 == *old_p && next_key.2 < old_g)) {
            return Err(Error::Internal(format!(
                "no progress eliminating triangle {:?}",
                [a, b, c]
            )));
        }
        debug_assert!(next.in_d());
        trace.steps.push(step);
        trace.products.push(next_key.0);
        trace.gamma_sizes.push(next_key.2);
        cur = next;
        gamma = cur.gamma_123();
    }
    Ok((cur, trace))
}

/// A replaced graph with the `(x, y)` replacements that produced it.
pub type Move = (Multigraph, Vec<(usize, usize)>);

/// One improving move on a (3,1,1) or (2,1,1) triangle, or `None`.
///
/// For the first triangle `{u,v,z}` (lexicographic) with `w(uv) = w(uz) = 1`
/// and `p(v) >= p(z)`: if `p(v) > p(u)` try `G_uv`, otherwise `G_{vu,zu}`.
/// A move is taken only if it stays in D(n) and strictly raises `P`.
pub fn improving_move(g: &Multigraph) -> Result<Option<Move>> {
    if !g.in_d() {
        return Err(Error::NotInD);
    }
    let base = g.product();
    let n = g.n();
    let p: Vec<ProductValue> = (0..n).map(|y| vertex_product(g, y)).collect::<Result<_>>()?;
    for u in 0..n {
        for v in 0..n {
            if v == u || g.weight(u, v) != 1 {
                continue;
            }
            for z in v + 1..n {
                if z == u || g.weight(u, z) != 1 || !matches!(g.weight(v, z), 2 | 3) {
                    continue;
                }
                let (v, z) = if p[z] > p[v] { (z, v) } else { (v, z) };
                let pairs = if p[v] > p[u] {
                    vec![(u, v)]
                } else {
                    vec![(v, u), (z, u)]
                };
                let h = replace_seq(g, &pairs)?;
                if h.product() > base && h.in_d() {
                    return Ok(Some((h, pairs)));
                }
            }
        }
    }
    Ok(None)
}

/// [`improving_move`] applied once; the input is returned when no move applies.
pub fn local_improve(g: &Multigraph) -> Result<Multigraph> {
    Ok(improving_move(g)?.map(|(h, _)| h).unwrap_or_else(|| g.clone()))
}

/// Iterate [`improving_move`] to a fixpoint; `P` rises at every step.
pub fn local_improve_fixpoint(g: &Multigraph) -> Result<(Multigraph, usize)> {
    let mut cur = g.clone();
    let mut moves = 0;
    while let Some((h, _)) = improving_move(&cur)? {
        cur = h;
        moves += 1;
    }
    Ok((cur, moves))
}
