//! The comparison functions f, h, k, f_* and the W(n) optimum.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::consts::{beta_floor_ceil, log2_of, LogBounds};
use super::interval::{escalate, CertifiedScalar};
use crate::error::{Error, Result};
use crate::product::{PrimePower, ProductValue};

fn choose2(m: i64) -> i64 {
    m * (m - 1) / 2
}

fn check_nt(n: u64, t: u64) -> Result<(i64, i64)> {
    if t < 2 || t > n {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= t <= n, got n = {n}, t = {t}"
        )));
    }
    Ok((n as i64, t as i64))
}

/// `P` of the W(n) member with `|R| = r`: `2^{C(r,2)} 3^{r(n-r)}`.
pub fn w_value(n: u64, r: u64) -> PrimePower {
    let (n, r) = (n as i64, r as i64);
    PrimePower::new(choose2(r), r * (n - r), 0)
}

/// The part sizes of the `f(n,t)` construction: `|R_B| = ⌈βt⌉`,
/// `|L_B| = ⌊(1-β)t⌋` and the two candidates for `|R_A|`.
pub fn g_x_sizes(n: u64, t: u64) -> Result<(i64, i64, [i64; 2])> {
    let (n, t) = (n as i64, t as i64);
    let (_, b) = beta_floor_ceil(t)?;
    // βt is irrational, so ⌊(1-β)t⌋ = t - ⌈βt⌉
    let l = t - b;
    let (c0, c1) = beta_floor_ceil(n - t)?;
    Ok((b, l, [c0, c1]))
}

/// The `f(n,t)` exponent pair for one choice of `c = |R_A|`.
pub fn f_candidate(n: u64, t: u64, c: i64) -> Result<PrimePower> {
    let (n_i, t_i) = (n as i64, t as i64);
    let (b, l, _) = g_x_sizes(n, t)?;
    Ok(PrimePower::new(
        choose2(b) + b * c,
        b * l + c * l + b * (n_i - t_i - c),
        0,
    ))
}

/// `f(n,t)`: the smaller of the two candidates, compared exactly.
pub fn f_value(n: u64, t: u64) -> Result<PrimePower> {
    check_nt(n, t)?;
    let (_, _, cs) = g_x_sizes(n, t)?;
    let a = f_candidate(n, t, cs[0])?;
    let b = f_candidate(n, t, cs[1])?;
    Ok(std::cmp::min(a, b))
}

/// `h(n,t) = 3^n 2^{C(t,2)+t(n-t)-n}`; the 2-exponent may be negative.
pub fn h_value(n: u64, t: u64) -> Result<PrimePower> {
    let (n, t) = check_nt(n, t)?;
    Ok(PrimePower::new(choose2(t) + t * (n - t) - n, n, 0))
}

/// `k(n,t) = 15^t 2^{C(t,2)+t(n-t)-t}`.
pub fn k_value(n: u64, t: u64) -> Result<PrimePower> {
    let (n, t) = check_nt(n, t)?;
    Ok(PrimePower::new(choose2(t) + t * (n - t) - t, t, t))
}

/// `log₂ f_*(n,t)` with `C(r,2) = (r²-r)/2` for real `r = βt`.
pub fn fstar_log2(logs: &LogBounds, n: u64, t: u64) -> Result<CertifiedScalar> {
    let (n, t) = check_nt(n, t)?;
    let p = logs.prec;
    let x = logs.beta();
    let one = CertifiedScalar::from_int(1);
    let tt = CertifiedScalar::from_int(t);
    let nt = CertifiedScalar::from_int(n - t);
    let xt = x.mul(&tt, p);
    let c2 = xt.mul(&xt, p).sub(&xt, p).mul(&CertifiedScalar::from_ratio(1, 2), p);
    let two_part = c2.add(&x.mul(&x, p).mul(&tt, p).mul(&nt, p), p);
    let x1 = x.mul(&one.sub(&x, p), p);
    let three_part = x1
        .mul(&tt, p)
        .mul(&nt, p)
        .mul_int(2, p)
        .add(&x1.mul(&tt, p).mul(&tt, p), p);
    Ok(two_part.add(&three_part.mul(&logs.log2_3(), p), p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalBounds {
    pub n: u64,
    pub t: u64,
    pub f: PrimePower,
    pub h: PrimePower,
    pub k: PrimePower,
    pub fstar_log2: CertifiedScalar,
}

pub fn eval_bounds(n: u64, t: u64, prec: u32) -> Result<EvalBounds> {
    Ok(EvalBounds {
        n,
        t,
        f: f_value(n, t)?,
        h: h_value(n, t)?,
        k: k_value(n, t)?,
        fstar_log2: fstar_log2(&LogBounds::at_precision(prec), n, t)?,
    })
}

/// `(y*, h(y*))` maximizing `h(y) = 2^{C(y,2)} 3^{y(n-y)}` over `0..=n`;
/// the smallest maximizer on ties.
pub fn w_optimum(n: u64) -> Result<(u64, ProductValue)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let y = if n <= 64 {
        let mut best = 0;
        for y in 1..=n {
            if w_value(n, y) > w_value(n, best) {
                best = y;
            }
        }
        best
    } else {
        // τ = βn − ln 2 / (2(2 ln 3 − ln 2)); the maximizer is ⌊τ⌋ or ⌈τ⌉
        let (lo, hi) = escalate("rounding of the W(n) optimum", 128, |p| {
            let logs = LogBounds::at_precision(p);
            let den = logs.ln3.mul_int(2, p).sub(&logs.ln2, p).mul_int(2, p);
            let tau = logs.beta().mul_int(n as i64, p).sub(&logs.ln2.div(&den, p)?, p);
            Ok(match (tau.floor(), tau.ceil()) {
                (Some(f), Some(c)) => Some((i64::try_from(f).expect("small"), i64::try_from(c).expect("small"))),
                _ => None,
            })
        })?;
        let lo = lo.clamp(0, n as i64) as u64;
        let hi = hi.clamp(0, n as i64) as u64;
        let y = if w_value(n, hi) > w_value(n, lo) { hi } else { lo };
        // unimodality: the ratio h(y+1)/h(y) = 2^y 3^{n-2y-1} decreases in y
        let v = w_value(n, y);
        if (y > 0 && w_value(n, y - 1) >= v) || (y < n && w_value(n, y + 1) > v) {
            return Err(Error::Internal(format!("W({n}) optimum {y} is not a local maximum")));
        }
        y
    };
    Ok((y, w_value(n, y).to_product().expect("integer")))
}

/// Certified `f(n,t) ≥ f_*(n,t) 2^{-βt-3/2} 3^{-t-1}` and
/// `h(n,t)/f(n,t) ≤ 2^{C₁(n,t)} 3^{C₂(n,t)}`, both in the log₂ domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropsReport {
    pub n: u64,
    pub t: u64,
    pub lower_bound_holds: bool,
    pub log2_f: CertifiedScalar,
    pub log2_lower: CertifiedScalar,
    pub ratio_bound_holds: bool,
    pub log2_h_over_f: CertifiedScalar,
    pub log2_ratio_bound: CertifiedScalar,
    pub bits: u32,
}

/// `C₁(n,t) + C₂(n,t) log₂ 3` from the simplified closed forms.
pub fn c1_c2_log2(logs: &LogBounds, n: i64, t: i64) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    let one = CertifiedScalar::from_int(1);
    let half = CertifiedScalar::from_ratio(1, 2);
    let t_ = CertifiedScalar::from_int(t);
    let n_ = CertifiedScalar::from_int(n);
    let tn = CertifiedScalar::from_int(t * n);
    let x2 = x.mul(&x, p);
    let c1 = t_
        .mul(&t_, p)
        .mul(&half, p)
        .mul(&x2.sub(&one, p), p)
        .add(&t_.mul(&half, p).mul(&x.mul_int(3, p).sub(&one, p), p), p)
        .add(&tn.mul(&one.sub(&x2, p), p), p)
        .sub(&n_, p)
        .add(&CertifiedScalar::from_ratio(3, 2), p);
    let x1 = x.mul(&one.sub(&x, p), p);
    let c2 = n_
        .sub(&x1.mul_int(2, p).mul(&tn, p), p)
        .add(&x1.mul(&t_, p).mul(&t_, p), p)
        .add(&t_, p)
        .add(&one, p);
    c1.add(&c2.mul(&logs.log2_3(), p), p)
}

pub fn check_props(n: u64, t: u64, prec: u32) -> Result<PropsReport> {
    check_nt(n, t)?;
    let f = f_value(n, t)?;
    let h = h_value(n, t)?;
    let ratio = h * f.inv();
    escalate("appendix propositions", prec, |p| {
        let logs = LogBounds::at_precision(p);
        let pp = logs.prec;
        let x = logs.beta();
        let log2_f = f.log2(pp);
        let tt = CertifiedScalar::from_int(t as i64);
        let lower = fstar_log2(&logs, n, t)?
            .sub(&x.mul(&tt, pp), pp)
            .sub(&CertifiedScalar::from_ratio(3, 2), pp)
            .sub(&tt.add(&CertifiedScalar::from_int(1), pp).mul(&logs.log2_3(), pp), pp);
        let log2_ratio = ratio.log2(pp);
        let bound = c1_c2_log2(&logs, n as i64, t as i64);
        let a = lower.cmp_certified(&log2_f);
        let b = log2_ratio.cmp_certified(&bound);
        if a.is_none() || b.is_none() {
            return Ok(None);
        }
        Ok(Some(PropsReport {
            n,
            t,
            lower_bound_holds: a != Some(std::cmp::Ordering::Greater),
            log2_f,
            log2_lower: lower,
            ratio_bound_holds: b != Some(std::cmp::Ordering::Greater),
            log2_h_over_f: log2_ratio,
            log2_ratio_bound: bound,
            bits: p,
        }))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridCheck {
    /// `h(n,t) < f(n,t)`
    HLtF,
    /// `k(n,t) < f(n,t)`
    KLtF,
    /// `h(n,t) < 2^{-γn} f(n,t)` with the appendix γ
    HfDecay,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFailure {
    pub n: u64,
    pub t: u64,
    pub lhs: PrimePower,
    pub rhs: PrimePower,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridReport {
    pub which: GridCheck,
    pub t_range: (u64, u64),
    pub n_range: (u64, u64),
    pub points: u64,
    pub failures: Vec<GridFailure>,
    /// Least `n` in range from which every row is clean.
    pub clean_from_n: Option<u64>,
}

/// Check one relation at every `(n,t)` with `t` in `t_range`, `n` in
/// `n_range` and `2 <= t <= n`. Ranges are inclusive.
pub fn grid_verify(which: GridCheck, t_range: (u64, u64), n_range: (u64, u64)) -> Result<GridReport> {
    use rayon::prelude::*;
    if n_range.1 > 1000 {
        return Err(Error::InvalidParameter("grid limited to n <= 1000".into()));
    }
    let gamma = match which {
        GridCheck::HfDecay => Some(super::constants::appendix_gamma(&LogBounds::at_precision(
            super::interval::DEFAULT_PRECISION,
        ))),
        _ => None,
    };
    let rows: Vec<u64> = (n_range.0..=n_range.1).collect();
    let per_row: Vec<Result<(u64, u64, Vec<GridFailure>)>> = rows
        .par_iter()
        .map(|&n| {
            let mut fails = Vec::new();
            let mut points = 0;
            for t in t_range.0.max(2)..=t_range.1.min(n) {
                points += 1;
                let f = f_value(n, t)?;
                let lhs = match which {
                    GridCheck::HLtF | GridCheck::HfDecay => h_value(n, t)?,
                    GridCheck::KLtF => k_value(n, t)?,
                };
                let ok = match &gamma {
                    None => lhs < f,
                    Some(g) => decay_holds(&lhs, &f, g, n)?,
                };
                if !ok {
                    fails.push(GridFailure { n, t, lhs, rhs: f });
                }
            }
            Ok((n, points, fails))
        })
        .collect();
    let mut points = 0;
    let mut failures = Vec::new();
    let mut last_bad: Option<u64> = None;
    for r in per_row {
        let (n, p, f) = r?;
        points += p;
        if !f.is_empty() {
            last_bad = Some(n);
        }
        failures.extend(f);
    }
    let clean_from_n = match last_bad {
        None => Some(n_range.0),
        Some(b) if b < n_range.1 => Some(b + 1),
        Some(_) => None,
    };
    Ok(GridReport {
        which,
        t_range,
        n_range,
        points,
        failures,
        clean_from_n,
    })
}

/// Certified `log₂(h/f) < -γ n`.
pub fn decay_holds(h: &PrimePower, f: &PrimePower, gamma: &CertifiedScalar, n: u64) -> Result<bool> {
    let ratio = *h * f.inv();
    escalate("h/f decay comparison", 64, |p| {
        let lhs = ratio.log2(p);
        let rhs = gamma.mul_int(-(n as i64), p);
        Ok(match lhs.cmp_certified(&rhs) {
            Some(std::cmp::Ordering::Less) => Some(true),
            Some(_) => Some(false),
            None => None,
        })
    })
}

/// The displayed sum-extremal value: the larger of
/// `2C(⌊2n/3⌋,2) + 3⌊2n/3⌋⌈n/3⌉` and `2C(⌈2n/3⌉,2) + 3⌈2n/3⌉⌊n/3⌋`.
pub fn sum_formula(n: u64) -> u64 {
    let c2 = |m: u64| m * m.saturating_sub(1) / 2;
    let a = 2 * n / 3;
    let a_up = (2 * n).div_ceil(3);
    let b_up = n.div_ceil(3);
    let b = n / 3;
    std::cmp::max(2 * c2(a) + 3 * a * b_up, 2 * c2(a_up) + 3 * a_up * b)
}

/// log₂ 5, used where 15 = 3·5 enters an exponent.
pub(crate) fn log2_5(prec: u32) -> CertifiedScalar {
    log2_of(5, prec)
}

/// `true` when `r` lies in the open interval `(lo, hi)` for every point of `x`.
pub fn strictly_within(x: &CertifiedScalar, lo: &BigRational, hi: &BigRational) -> bool {
    x.lo() > lo && x.hi() < hi
}
