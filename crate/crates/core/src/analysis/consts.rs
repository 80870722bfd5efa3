//! Certified logarithms and exponentials, and the constants built from them.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::interval::{escalate, CertifiedScalar, DEFAULT_PRECISION};
use crate::error::{Error, Result};

const GUARD: u32 = 16;

/// `atanh(z)` for a rational `0 <= z <= 1/3`.
fn atanh_small(z: &BigRational, wp: u32) -> CertifiedScalar {
    debug_assert!(!z.is_negative() && z <= &BigRational::new(1.into(), 3.into()));
    if z.is_zero() {
        return CertifiedScalar::from_int(0);
    }
    let zi = CertifiedScalar::exact(z.clone());
    let z2 = zi.mul(&zi, wp);
    // outward rounding keeps pw.hi() >= 2^-wp once it reaches the grid floor
    let eps = BigRational::new(BigInt::one(), BigInt::one() << wp);
    let mut pw = zi.round(wp);
    let mut sum = pw.clone();
    let mut k: i64 = 1;
    loop {
        pw = pw.mul(&z2, wp);
        let term = pw.mul(&CertifiedScalar::from_ratio(1, 2 * k + 1), wp);
        sum = sum.add(&term, wp);
        k += 1;
        if pw.hi() <= &eps {
            break;
        }
    }
    // remaining terms are positive and bounded by pw * z² / (1 - z²) <= pw / 8
    let tail = CertifiedScalar::new(BigRational::zero(), pw.hi() / BigRational::from_integer(8.into()))
        .expect("nonnegative tail");
    sum.add(&tail, wp)
}

fn ln2_raw(wp: u32) -> CertifiedScalar {
    atanh_small(&BigRational::new(1.into(), 3.into()), wp).mul_int(2, wp)
}

/// `ln r` for a positive rational.
pub fn ln_rational(r: &BigRational, prec: u32) -> Result<CertifiedScalar> {
    if !r.is_positive() {
        return Err(Error::InvalidParameter(format!("logarithm of non-positive {r}")));
    }
    let wp = prec + GUARD;
    // r = 2^k * y with 1 <= y < 2
    let mut k = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scale = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::one() << k as u64)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-k) as u64)
        }
    };
    let mut y = r / scale(k);
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    while y < one {
        y *= &two;
        k -= 1;
    }
    while y >= two {
        y /= &two;
        k += 1;
    }
    let z = (&y - &one) / (&y + &one);
    let mut out = atanh_small(&z, wp).mul_int(2, wp);
    if k != 0 {
        out = out.add(&ln2_raw(wp).mul_int(k, wp), wp);
    }
    Ok(out.round(prec))
}

fn ln_cache() -> &'static Mutex<HashMap<(u64, u32), CertifiedScalar>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), CertifiedScalar>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `ln m` for a positive integer, memoized per precision.
pub fn ln_int(m: u64, prec: u32) -> CertifiedScalar {
    assert!(m >= 1, "logarithm of 0");
    if let Some(v) = ln_cache().lock().unwrap().get(&(m, prec)) {
        return v.clone();
    }
    let v = ln_rational(&BigRational::from_integer(m.into()), prec).expect("positive");
    ln_cache().lock().unwrap().insert((m, prec), v.clone());
    v
}

/// `log₂ m` for a positive integer.
pub fn log2_of(m: u64, prec: u32) -> CertifiedScalar {
    if m.is_power_of_two() {
        return CertifiedScalar::from_int(m.trailing_zeros() as i64);
    }
    let wp = prec + GUARD;
    ln_int(m, wp).div(&ln_int(2, wp), wp).expect("ln 2 > 0").round(prec)
}

/// `ln x` over a positive interval.
pub fn ln(x: &CertifiedScalar, prec: u32) -> Result<CertifiedScalar> {
    if !x.lo().is_positive() {
        return Err(Error::Inconclusive {
            what: "logarithm of an interval reaching 0".into(),
            bits: prec,
        });
    }
    let lo = ln_rational(x.lo(), prec)?;
    let hi = ln_rational(x.hi(), prec)?;
    CertifiedScalar::new(lo.lo().clone(), hi.hi().clone())
}

fn exp_rational(a: &BigRational, prec: u32) -> CertifiedScalar {
    if a.is_zero() {
        return CertifiedScalar::from_int(1);
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut m: u32 = 0;
    let mut r = a.clone();
    while r.abs() > half {
        r /= BigRational::from_integer(2.into());
        m += 1;
    }
    let growth = if a.is_positive() {
        // result magnitude in bits, roughly a / ln 2
        (a * BigRational::new(3.into(), 2.into())).ceil().to_integer()
    } else {
        BigInt::zero()
    };
    let growth: u32 = growth.try_into().unwrap_or(u32::MAX / 4);
    let wp = prec + GUARD + 2 * m + growth;
    let ri = CertifiedScalar::exact(r.clone());
    // terms are rounded outward to multiples of 2^-wp, so they bottom out there
    let eps = BigRational::new(BigInt::one(), BigInt::one() << wp);
    let mut term = CertifiedScalar::from_int(1);
    let mut sum = term.clone();
    let mut i: i64 = 1;
    loop {
        term = term.mul(&ri, wp).mul(&CertifiedScalar::from_ratio(1, i), wp);
        sum = sum.add(&term, wp);
        i += 1;
        if term.abs().hi() <= &eps {
            break;
        }
    }
    // |remainder| <= 2 * |last term| since |r| <= 1/2 and i >= 2
    let bound = term.abs().hi() * BigRational::from_integer(2.into());
    let tail = CertifiedScalar::new(-bound.clone(), bound).expect("symmetric");
    let mut out = sum.add(&tail, wp);
    for _ in 0..m {
        out = out.mul(&out, wp);
    }
    out.round(prec)
}

/// `e^x` over an interval.
pub fn exp(x: &CertifiedScalar, prec: u32) -> CertifiedScalar {
    let lo = exp_rational(x.lo(), prec);
    let hi = exp_rational(x.hi(), prec);
    CertifiedScalar::new(lo.lo().clone(), hi.hi().clone()).expect("exp is monotone")
}

/// `2^x` over an interval.
pub fn exp2(x: &CertifiedScalar, prec: u32) -> CertifiedScalar {
    let wp = prec + GUARD;
    exp(&x.mul(&ln_int(2, wp), wp), prec)
}

/// `b^e` for a positive base.
pub fn pow(base: &CertifiedScalar, e: &CertifiedScalar, prec: u32) -> Result<CertifiedScalar> {
    let wp = prec + GUARD;
    Ok(exp(&ln(base, wp)?.mul(e, wp), prec))
}

/// The log values everything else is derived from. Either tight intervals at
/// a given precision, or externally supplied bounds such as three-digit ones.
#[derive(Clone, Debug, Serialize)]
pub struct LogBounds {
    pub ln2: CertifiedScalar,
    pub ln3: CertifiedScalar,
    pub prec: u32,
}

impl LogBounds {
    pub fn at_precision(prec: u32) -> Self {
        let wp = prec + GUARD;
        LogBounds {
            ln2: ln_int(2, wp),
            ln3: ln_int(3, wp),
            prec: wp,
        }
    }

    /// `0.693 < ln 2 < 0.694` and `1.098 < ln 3 < 1.099`.
    pub fn three_digit() -> Self {
        LogBounds {
            ln2: CertifiedScalar::from_decimals("0.693", "0.694").unwrap(),
            ln3: CertifiedScalar::from_decimals("1.098", "1.099").unwrap(),
            prec: DEFAULT_PRECISION + GUARD,
        }
    }

    pub fn log2_3(&self) -> CertifiedScalar {
        self.ln3.div(&self.ln2, self.prec).expect("ln 2 > 0")
    }

    /// β = ln 3 / (2 ln 3 − ln 2).
    pub fn beta(&self) -> CertifiedScalar {
        let p = self.prec;
        let den = self.ln3.mul_int(2, p).sub(&self.ln2, p);
        self.ln3.div(&den, p).expect("2 ln 3 > ln 2")
    }

    /// γ = β²/2 + β(1−β) log₂ 3.
    pub fn gamma(&self) -> CertifiedScalar {
        let p = self.prec;
        let b = self.beta();
        let one = CertifiedScalar::from_int(1);
        let half = CertifiedScalar::from_ratio(1, 2);
        b.mul(&b, p)
            .mul(&half, p)
            .add(&b.mul(&one.sub(&b, p), p).mul(&self.log2_3(), p), p)
    }
}

/// β to `prec` bits.
pub fn beta(prec: u32) -> CertifiedScalar {
    LogBounds::at_precision(prec).beta().round(prec)
}

/// γ to `prec` bits.
pub fn gamma(prec: u32) -> CertifiedScalar {
    LogBounds::at_precision(prec).gamma().round(prec)
}

/// 2^γ to `prec` bits.
pub fn two_pow_gamma(prec: u32) -> CertifiedScalar {
    exp2(&gamma(prec + GUARD), prec)
}

/// β_a = (ln(a+1) − ln(a−1)) / (2 ln(a+1) − ln a − ln(a−1)), the maximizer of
/// the W_a(n) product exponent; β₂ = β.
pub fn beta_a(a: u64, prec: u32) -> Result<CertifiedScalar> {
    if a < 2 {
        return Err(Error::InvalidParameter(format!("a = {a} must be at least 2")));
    }
    let wp = prec + GUARD;
    let lp = ln_int(a + 1, wp);
    let la = ln_int(a, wp);
    let lm = ln_int(a - 1, wp);
    let num = lp.sub(&lm, wp);
    let den = lp.mul_int(2, wp).sub(&la, wp).sub(&lm, wp);
    Ok(num.div(&den, wp)?.round(prec))
}

/// γ_a = (1−β_a)²/2 log₂(a−1) + β_a²/2 log₂ a + β_a(1−β_a) log₂(a+1).
pub fn gamma_a(a: u64, prec: u32) -> Result<CertifiedScalar> {
    let wp = prec + GUARD;
    let b = beta_a(a, wp)?;
    let one = CertifiedScalar::from_int(1);
    let half = CertifiedScalar::from_ratio(1, 2);
    let c = one.sub(&b, wp);
    let t1 = c.mul(&c, wp).mul(&half, wp).mul(&log2_of(a - 1, wp), wp);
    let t2 = b.mul(&b, wp).mul(&half, wp).mul(&log2_of(a, wp), wp);
    let t3 = b.mul(&c, wp).mul(&log2_of(a + 1, wp), wp);
    Ok(t1.add(&t2, wp).add(&t3, wp).round(prec))
}

fn beta_cache() -> &'static CertifiedScalar {
    static B: OnceLock<CertifiedScalar> = OnceLock::new();
    B.get_or_init(|| beta(256))
}

/// Certified `⌊β m⌋` and `⌈β m⌉` for an integer `m`.
pub fn beta_floor_ceil(m: i64) -> Result<(i64, i64)> {
    if m == 0 {
        return Ok((0, 0));
    }
    // β as a float is within a few ulps of the 256-bit interval, so βm is
    // off by at most |m| 2^-50; farther than that from an integer decides it
    static BETA_F64: OnceLock<f64> = OnceLock::new();
    let bf = *BETA_F64.get_or_init(|| beta_cache().mid_f64());
    if m.unsigned_abs() < 1 << 40 {
        let x = bf * m as f64;
        let margin = (m.unsigned_abs() as f64 + 1.0) * 2f64.powi(-44);
        let fl = x.floor();
        if x - fl > margin && fl + 1.0 - x > margin {
            return Ok((fl as i64, fl as i64 + 1));
        }
    }
    let cached = beta_cache().mul_int(m, 300);
    if let (Some(f), Some(c)) = (cached.floor(), cached.ceil()) {
        return Ok((to_i64(f), to_i64(c)));
    }
    escalate("rounding of beta * m", 512, |p| {
        let x = beta(p).mul_int(m, p);
        Ok(match (x.floor(), x.ceil()) {
            (Some(f), Some(c)) => Some((to_i64(f), to_i64(c))),
            _ => None,
        })
    })
}

fn to_i64(v: BigInt) -> i64 {
    i64::try_from(v).expect("rounding fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: &CertifiedScalar, v: f64, tol: f64) -> bool {
        (x.lo_f64() - v).abs() < tol && (x.hi_f64() - v).abs() < tol
    }

    #[test]
    fn logs_match_floats() {
        for m in [2u64, 3, 5, 7, 10, 1000] {
            let l = ln_int(m, 80);
            assert!(close(&l, (m as f64).ln(), 1e-14), "ln {m}: {l}");
            assert!(l.width_f64() < 1e-20);
        }
        let l = ln_rational(&BigRational::new(1.into(), 7.into()), 60).unwrap();
        assert!(close(&l, (1.0f64 / 7.0).ln(), 1e-14));
        assert_eq!(ln_int(1, 60), CertifiedScalar::from_int(0));
        assert_eq!(log2_of(8, 60), CertifiedScalar::from_int(3));
        assert!(close(&log2_of(3, 60), 3f64.log2(), 1e-14));
    }

    #[test]
    fn exp_matches_floats() {
        for v in [-3.5f64, -0.25, 0.0, 0.7, 2.0, 10.0] {
            let r = BigRational::from_float(v).unwrap();
            let e = exp(&CertifiedScalar::exact(r), 60);
            assert!(close(&e, v.exp(), 1e-9 * v.exp().max(1.0)), "exp {v}: {e}");
        }
        let e = exp2(&CertifiedScalar::from_int(10), 60);
        assert!(e.contains(&BigRational::from_integer(1024.into())));
    }

    #[test]
    fn headline_constants() {
        let b = beta(DEFAULT_PRECISION);
        assert!(close(&b, 0.730_422_710_3, 1e-9), "{b}");
        assert!(b.width_f64() < 1e-15);
        let g = two_pow_gamma(DEFAULT_PRECISION);
        assert!(close(&g, 1.493_654_322_4, 1e-9), "{g}");
        let b2 = beta_a(2, 60).unwrap();
        assert!((b2.mid_f64() - b.mid_f64()).abs() < 1e-15);
        let g2 = gamma_a(2, 60).unwrap();
        assert!((g2.mid_f64() - gamma(60).mid_f64()).abs() < 1e-14);
        assert!(beta_a(1, 60).is_err());
    }

    #[test]
    fn coarse_bounds_still_bracket_beta() {
        let c = LogBounds::three_digit().beta();
        let f = beta(60);
        assert!(f.is_subset_of(&c));
        assert!(c.width_f64() < 5e-3, "{}", c.width_f64());
    }

    #[test]
    fn beta_roundings_match_the_interval_path() {
        let b = beta(300);
        for m in (-3000..3000).chain([1 << 30, 123_456_789_012]) {
            let x = b.mul_int(m, 300);
            let exact = (to_i64(x.floor().unwrap()), to_i64(x.ceil().unwrap()));
            assert_eq!(beta_floor_ceil(m).unwrap(), exact, "m = {m}");
        }
    }

    #[test]
    fn beta_roundings() {
        assert_eq!(beta_floor_ceil(5).unwrap(), (3, 4));
        assert_eq!(beta_floor_ceil(100).unwrap(), (73, 74));
        assert_eq!(beta_floor_ceil(0).unwrap(), (0, 0));
        for m in 1..200i64 {
            let (f, c) = beta_floor_ceil(m).unwrap();
            let v = m as f64 * 0.730_422_710_309_185_2;
            assert_eq!(f, v.floor() as i64);
            assert_eq!(c, f + 1);
        }
    }
}
