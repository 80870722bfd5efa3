//! The hypergraph encoding of (s,q)-graphs and its degree statistics.
//!
//! A vertex of H(n) is a pair `(f, u)` with `f` a pair of `[n]` and
//! `0 <= u <= q`, numbered `index(f) * (q + 1) + u`. Each s-set `A` and each
//! weighting of its pairs with every weight at most `q` and total above `q`
//! gives one edge, so an (s,q)-graph becomes an independent set holding one
//! vertex per pair.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::consts::{exp, ln_int};
use crate::analysis::interval::{escalate, ratio_string, CertifiedScalar};
use crate::error::{Error, Result};
use crate::multigraph::{num_pairs, pair_index, Multigraph};
use crate::subsets::{binomial, Combinations};

/// Default cap on enumeration work (patterns times subsets).
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPatterns {
    pub s: usize,
    pub q: u64,
    pub g: u64,
    /// Weightings of the pairs of `[s]` in row-major pair order.
    pub patterns: Vec<Vec<u8>>,
}

/// Labeled weightings of the pairs of `[s]` with every weight at most `q`
/// and total above `q`.
pub fn bad_patterns(s: usize, q: u64, budget: u64) -> Result<BadPatterns> {
    if s < 2 {
        return Err(Error::InvalidParameter(format!("s must be at least 2, got {s}")));
    }
    let r = num_pairs(s) as u32;
    let total = (q as u128 + 1).checked_pow(r).filter(|&t| t <= budget as u128);
    let Some(total) = total else {
        return Err(Error::BudgetExceeded {
            budget,
            explored: 0,
            partial: "0".into(),
        });
    };
    let qb = u8::try_from(q).map_err(|_| Error::InvalidParameter(format!("q = {q} exceeds 255")))?;
    let mut patterns = Vec::new();
    let mut w = vec![0u8; r as usize];
    for _ in 0..total {
        if w.iter().map(|&x| x as u64).sum::<u64>() > q {
            patterns.push(w.clone());
        }
        for x in w.iter_mut() {
            if *x < qb {
                *x += 1;
                break;
            }
            *x = 0;
        }
    }
    Ok(BadPatterns {
        s,
        q,
        g: patterns.len() as u64,
        patterns,
    })
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(v))
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    parse_ratio(&String::deserialize(d)?).map_err(serde::de::Error::custom)
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ratio_string))
}

fn de_rationals<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|x| parse_ratio(x).map_err(serde::de::Error::custom))
        .collect()
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn de_biguint<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerStats {
    pub n: usize,
    pub s: usize,
    pub q: u64,
    /// `N = (q+1) C(n,2)`.
    pub vertices: u64,
    #[serde(serialize_with = "ser_biguint", deserialize_with = "de_biguint")]
    pub edge_count: BigUint,
    /// `d = C(s,2) |E| / N`.
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub avg_degree: BigRational,
    pub g: u64,
}

fn check_ns(n: usize, s: usize) -> Result<()> {
    if n < s {
        return Err(Error::InvalidParameter(format!("need n >= s, got n = {n}, s = {s}")));
    }
    Ok(())
}

pub fn hypergraph_stats(n: usize, s: usize, q: u64, budget: u64) -> Result<ContainerStats> {
    check_ns(n, s)?;
    let g = bad_patterns(s, q, budget)?.g;
    let vertices = (q + 1) * num_pairs(n) as u64;
    let edge_count = BigUint::from(g) * BigUint::from(binomial(n as u64, s as u64));
    let avg_degree = BigRational::new(
        BigInt::from(edge_count.clone()) * BigInt::from(num_pairs(s)),
        BigInt::from(vertices),
    );
    Ok(ContainerStats {
        n,
        s,
        q,
        vertices,
        edge_count,
        avg_degree,
        g,
    })
}

/// Streams every edge of H(n) as a sorted vertex list.
fn for_each_edge<F: FnMut(&[u32])>(n: usize, s: usize, q: u64, pats: &BadPatterns, a: &[usize], mut f: F) {
    let mut ids = Vec::with_capacity(num_pairs(s));
    let mut e = Vec::with_capacity(num_pairs(s));
    for (x, &i) in a.iter().enumerate() {
        for &j in &a[x + 1..] {
            ids.push(pair_index(n, i, j) as u32 * (q as u32 + 1));
        }
    }
    debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
    for p in &pats.patterns {
        e.clear();
        e.extend(ids.iter().zip(p).map(|(&id, &u)| id + u as u32));
        f(&e);
    }
}

/// Co-degree counts `d(σ)` for every nonempty `σ` inside some edge, keyed by
/// size then by sorted vertex list.
fn codegrees(n: usize, s: usize, q: u64, pats: &BadPatterns) -> Vec<HashMap<Vec<u32>, u64>> {
    let r = num_pairs(s);
    let sets: Vec<Vec<usize>> = Combinations::new(n, s).collect();
    let empty = || vec![HashMap::new(); r + 1];
    sets.par_iter()
        .fold(empty, |mut acc, a| {
            for_each_edge(n, s, q, pats, a, |e| {
                for mask in 1u32..(1 << r) {
                    let sigma: Vec<u32> = (0..r).filter(|&b| mask >> b & 1 == 1).map(|b| e[b]).collect();
                    *acc[sigma.len()].entry(sigma).or_insert(0) += 1;
                }
            });
            acc
        })
        .reduce(empty, |mut a, b| {
            for (ma, mb) in a.iter_mut().zip(b) {
                for (k, v) in mb {
                    *ma.entry(k).or_insert(0) += v;
                }
            }
            a
        })
}

fn work_estimate(n: usize, s: usize, g: u64) -> u128 {
    binomial(n as u64, s as u64) * g as u128 * (1u128 << num_pairs(s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodegreeProfile {
    pub stats: ContainerStats,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub tau: BigRational,
    /// `d_max[j][x]`: the largest `d(σ)` over `j`-sets `σ` containing vertex
    /// `x`, for `j = 2..=C(s,2)` (index 0 is `j = 2`).
    pub d_max: Vec<Vec<u64>>,
    /// `Σ_x d^{(j)}(x)`, for `j = 2..=C(s,2)`.
    pub sum_dj: Vec<u64>,
    #[serde(serialize_with = "ser_rationals", deserialize_with = "de_rationals")]
    pub delta_j: Vec<BigRational>,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub delta: BigRational,
}

impl CodegreeProfile {
    /// `Δ(H,τ)` recomputed from `sum_dj`, `d`, `N` and `τ` alone.
    pub fn recompute_delta(&self) -> BigRational {
        let d = &self.stats.avg_degree;
        if d.is_zero() {
            return BigRational::zero();
        }
        let dn = d * BigRational::from_integer(self.stats.vertices.into());
        let deltas: Vec<BigRational> = self
            .sum_dj
            .iter()
            .enumerate()
            .map(|(i, &sum)| {
                let tau_pow = pow_ratio(&self.tau, i as u32 + 1);
                BigRational::from_integer(sum.into()) / (&dn * tau_pow)
            })
            .collect();
        combine_deltas(num_pairs(self.stats.s), &deltas)
    }
}

fn pow_ratio(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

fn two_pow(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

fn choose2(m: i64) -> i64 {
    m * (m - 1) / 2
}

/// `2^{C(r,2)-1} Σ_{j=2}^{r} 2^{-C(j-1,2)} Δ_j`.
fn combine_deltas(r: usize, deltas: &[BigRational]) -> BigRational {
    let sum = deltas.iter().enumerate().fold(BigRational::zero(), |acc, (i, dj)| {
        let j = i as i64 + 2;
        acc + dj * two_pow(-choose2(j - 1))
    });
    sum * two_pow(choose2(r as i64) - 1)
}

/// The per-vertex co-degree maxima and `Δ(H,τ)`, with
/// `Δ_j = Σ_x d^{(j)}(x) / (d N τ^{j-1})`.
pub fn codegree_profile(n: usize, s: usize, q: u64, tau: &BigRational, budget: u64) -> Result<CodegreeProfile> {
    check_ns(n, s)?;
    if tau <= &BigRational::zero() {
        return Err(Error::InvalidParameter("tau must be positive".into()));
    }
    let pats = bad_patterns(s, q, budget)?;
    let stats = hypergraph_stats(n, s, q, budget)?;
    let work = work_estimate(n, s, pats.g);
    if work > budget as u128 {
        return Err(Error::BudgetExceeded {
            budget,
            explored: 0,
            partial: format!("estimated work {work}"),
        });
    }
    let r = num_pairs(s);
    let nv = stats.vertices as usize;
    let cod = if pats.g == 0 {
        vec![HashMap::new(); r + 1]
    } else {
        codegrees(n, s, q, &pats)
    };
    let mut d_max = Vec::new();
    let mut sum_dj = Vec::new();
    for map in cod.iter().take(r + 1).skip(2) {
        let mut m = vec![0u64; nv];
        for (sigma, &c) in map {
            for &x in sigma {
                m[x as usize] = m[x as usize].max(c);
            }
        }
        sum_dj.push(m.iter().sum());
        d_max.push(m);
    }
    let mut profile = CodegreeProfile {
        stats,
        tau: tau.clone(),
        d_max,
        sum_dj,
        delta_j: Vec::new(),
        delta: BigRational::zero(),
    };
    if !profile.stats.avg_degree.is_zero() {
        let dn = &profile.stats.avg_degree * BigRational::from_integer(nv.into());
        profile.delta_j = profile
            .sum_dj
            .iter()
            .enumerate()
            .map(|(i, &sum)| BigRational::from_integer(sum.into()) / (&dn * pow_ratio(tau, i as u32 + 1)))
            .collect();
        profile.delta = combine_deltas(r, &profile.delta_j);
    } else {
        profile.delta_j = vec![BigRational::zero(); profile.sum_dj.len()];
    }
    Ok(profile)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub n: usize,
    pub s: usize,
    pub q: u64,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub epsilon: BigRational,
    /// `τ = n^{-1/(4s)}`.
    pub tau: CertifiedScalar,
    pub delta: CertifiedScalar,
    /// `ε / (12 C(s,2)!)`.
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub threshold: BigRational,
    /// `Δ(H,τ) <= threshold`, certified.
    pub holds: bool,
    /// Realized `σ` checked against `d(σ) <= g n^{s - 1/2 - √(2j)}`.
    pub dsigma_checked: u64,
    pub dsigma_violations: u64,
    pub precision: u32,
}

/// `n^e` for a rational exponent, as an interval.
fn int_pow_rational(n: u64, e: &CertifiedScalar, prec: u32) -> CertifiedScalar {
    let wp = prec + 16;
    exp(&ln_int(n, wp).mul(e, wp), prec)
}

/// Certified check of `Δ(H,τ) <= ε/(12 C(s,2)!)` at `τ = n^{-1/(4s)}`, plus the
/// co-degree bound `d(σ) <= g(s,q) n^{s-1/2-√(2j)}` over every realized `σ`.
pub fn check_hypothesis(n: usize, s: usize, q: u64, epsilon: &BigRational, budget: u64) -> Result<HypothesisReport> {
    check_ns(n, s)?;
    let half = BigRational::new(1.into(), 2.into());
    if epsilon <= &BigRational::zero() || epsilon >= &half {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1/2)".into()));
    }
    let pats = bad_patterns(s, q, budget)?;
    let stats = hypergraph_stats(n, s, q, budget)?;
    if work_estimate(n, s, pats.g) > budget as u128 {
        return Err(Error::BudgetExceeded {
            budget,
            explored: 0,
            partial: "none".into(),
        });
    }
    let r = num_pairs(s);
    let fact: BigInt = (1..=r as u64).map(BigInt::from).product();
    let threshold = epsilon / BigRational::from_integer(fact * 12);
    let cod = if pats.g == 0 {
        vec![HashMap::new(); r + 1]
    } else {
        codegrees(n, s, q, &pats)
    };
    // exact Σ_x d^{(j)}(x); only the powers of τ are irrational
    let mut sum_dj = Vec::new();
    for map in cod.iter().take(r + 1).skip(2) {
        let mut m = vec![0u64; stats.vertices as usize];
        for (sigma, &c) in map {
            for &x in sigma {
                m[x as usize] = m[x as usize].max(c);
            }
        }
        sum_dj.push(m.iter().sum::<u64>());
    }
    let four_s = 4 * s as i64;
    let (tau, delta, holds, precision) = escalate("Δ(H,τ) against its threshold", 64, |p| {
        let tau = int_pow_rational(n as u64, &CertifiedScalar::from_ratio(-1, four_s), p);
        let delta = if stats.avg_degree.is_zero() {
            CertifiedScalar::from_int(0)
        } else {
            let dn = &stats.avg_degree * BigRational::from_integer(stats.vertices.into());
            let mut acc = CertifiedScalar::from_int(0);
            for (i, &sum) in sum_dj.iter().enumerate() {
                let j = i as i64 + 2;
                // τ^{-(j-1)} = n^{(j-1)/(4s)}
                let inv_pow = int_pow_rational(n as u64, &CertifiedScalar::from_ratio(j - 1, four_s), p);
                let coef = BigRational::from_integer(sum.into()) / &dn * two_pow(-choose2(j - 1));
                acc = acc.add(&inv_pow.mul_rational(&coef, p), p);
            }
            acc.mul_rational(&two_pow(choose2(r as i64) - 1), p)
        };
        Ok(if delta.hi() <= &threshold {
            Some((tau, delta, true, p))
        } else if delta.lo() > &threshold {
            Some((tau, delta, false, p))
        } else {
            None
        })
    })?;

    let mut checked = 0;
    let mut violations = 0;
    for (j, map) in cod.iter().enumerate().skip(1) {
        let mut by_value: HashMap<u64, u64> = HashMap::new();
        for &c in map.values() {
            *by_value.entry(c).or_insert(0) += 1;
        }
        for (c, k) in by_value {
            checked += k;
            if !dsigma_bound_holds(c, pats.g, n as u64, s as i64, j as i64)? {
                violations += k;
            }
        }
    }
    Ok(HypothesisReport {
        n,
        s,
        q,
        epsilon: epsilon.clone(),
        tau,
        delta,
        threshold,
        holds,
        dsigma_checked: checked,
        dsigma_violations: violations,
        precision,
    })
}

/// Certified `d <= g n^{s - 1/2 - √(2j)}`.
fn dsigma_bound_holds(d: u64, g: u64, n: u64, s: i64, j: i64) -> Result<bool> {
    if d == 0 {
        return Ok(true);
    }
    if g == 0 {
        return Ok(false);
    }
    escalate("co-degree bound", 64, |p| {
        let root = CertifiedScalar::from_int(2 * j).sqrt(p)?;
        let e = CertifiedScalar::from_ratio(2 * s - 1, 2).sub(&root, p);
        let bound = int_pow_rational(n, &e, p).mul_int(g as i64, p);
        let dv = BigRational::from_integer(d.into());
        Ok(if &dv <= bound.lo() {
            Some(true)
        } else if &dv > bound.hi() {
            Some(false)
        } else {
            None
        })
    })
}

/// Vertex ids of H(n) encoding `g`: one `(f, w(f))` per pair.
pub fn encode(g: &Multigraph, q: u64) -> Result<Vec<u32>> {
    if g.max_weight() as u64 > q {
        return Err(Error::InvalidParameter(format!("weight above q = {q}")));
    }
    Ok(g.weights()
        .iter()
        .enumerate()
        .map(|(idx, &w)| (idx as u64 * (q + 1) + w as u64) as u32)
        .collect())
}

/// Whether no edge of H(n) lies inside `set`.
pub fn is_independent(n: usize, s: usize, q: u64, set: &[u32]) -> Result<bool> {
    check_ns(n, s)?;
    let q1 = q + 1;
    let mut best: Vec<Option<u64>> = vec![None; num_pairs(n)];
    for &v in set {
        let (f, u) = ((v as u64 / q1) as usize, v as u64 % q1);
        if f >= best.len() {
            return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
        }
        best[f] = Some(best[f].map_or(u, |b: u64| b.max(u)));
    }
    let mut c = Combinations::new(n, s);
    while let Some(a) = c.next_ref() {
        let mut total = Some(0u64);
        for (x, &i) in a.iter().enumerate() {
            for &j in &a[x + 1..] {
                total = total.zip(best[pair_index(n, i, j)]).map(|(t, u)| t + u);
            }
        }
        // the heaviest available choice per pair is the easiest to make bad
        if total.is_some_and(|t| t > q) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Floating summary for display; exact values stay rational.
pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
