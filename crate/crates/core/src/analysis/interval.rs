//! Closed intervals with exact rational endpoints.
//!
//! Every operation rounds outward to a dyadic grid of `prec` fractional bits,
//! so the represented real is always inside `[lo, hi]`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Fractional bits used when a caller does not ask for more.
pub const DEFAULT_PRECISION: u32 = 60;
/// Precision escalation stops here.
pub const MAX_PRECISION: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedScalar {
    lo: BigRational,
    hi: BigRational,
}

pub(crate) fn round_down(r: &BigRational, prec: u32) -> BigRational {
    if r.denom().bits() <= prec as u64 + 1 && r.denom().is_power_of_two_big() {
        return r.clone();
    }
    let num = r.numer() << prec;
    let q = num.div_floor(r.denom());
    BigRational::new(q, BigInt::one() << prec)
}

pub(crate) fn round_up(r: &BigRational, prec: u32) -> BigRational {
    -round_down(&-r, prec)
}

trait PowerOfTwo {
    fn is_power_of_two_big(&self) -> bool;
}

impl PowerOfTwo for BigInt {
    fn is_power_of_two_big(&self) -> bool {
        self.sign() == Sign::Plus && self.magnitude().count_ones() == 1
    }
}

impl CertifiedScalar {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Internal(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(CertifiedScalar { lo, hi })
    }

    pub fn exact(r: BigRational) -> Self {
        CertifiedScalar { lo: r.clone(), hi: r }
    }

    pub fn from_int(v: i64) -> Self {
        Self::exact(BigRational::from_integer(v.into()))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::exact(BigRational::from_integer(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::exact(BigRational::new(num.into(), den.into()))
    }

    /// Interval from decimal strings, e.g. the bounds `("0.693", "0.694")`.
    pub fn from_decimals(lo: &str, hi: &str) -> Result<Self> {
        Self::new(parse_decimal(lo)?, parse_decimal(hi)?)
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mid_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn is_subset_of(&self, other: &CertifiedScalar) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn round(&self, prec: u32) -> Self {
        CertifiedScalar {
            lo: round_down(&self.lo, prec),
            hi: round_up(&self.hi, prec),
        }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        CertifiedScalar {
            lo: round_down(&(&self.lo + &o.lo), prec),
            hi: round_up(&(&self.hi + &o.hi), prec),
        }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        CertifiedScalar {
            lo: round_down(&(&self.lo - &o.hi), prec),
            hi: round_up(&(&self.hi - &o.lo), prec),
        }
    }

    pub fn neg(&self) -> Self {
        CertifiedScalar {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap();
        let hi = c.iter().max().unwrap();
        CertifiedScalar {
            lo: round_down(lo, prec),
            hi: round_up(hi, prec),
        }
    }

    pub fn mul_int(&self, k: i64, prec: u32) -> Self {
        self.mul(&CertifiedScalar::from_int(k), prec)
    }

    pub fn mul_rational(&self, r: &BigRational, prec: u32) -> Self {
        self.mul(&CertifiedScalar::exact(r.clone()), prec)
    }

    pub fn recip(&self, prec: u32) -> Result<Self> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(CertifiedScalar {
                lo: round_down(&self.hi.recip(), prec),
                hi: round_up(&self.lo.recip(), prec),
            })
        } else {
            Err(Error::Inconclusive {
                what: "division by an interval containing 0".into(),
                bits: prec,
            })
        }
    }

    pub fn div(&self, o: &Self, prec: u32) -> Result<Self> {
        // divide exactly, then round once
        let inv = if o.lo.is_positive() || o.hi.is_negative() {
            CertifiedScalar {
                lo: o.hi.recip(),
                hi: o.lo.recip(),
            }
        } else {
            return Err(Error::Inconclusive {
                what: "division by an interval containing 0".into(),
                bits: prec,
            });
        };
        Ok(self.mul(&inv, prec))
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            CertifiedScalar {
                lo: BigRational::zero(),
                hi: std::cmp::max(-&self.lo, self.hi.clone()),
            }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Interval containing `max(a, b)` for every `a` in `self`, `b` in `o`.
    pub fn max(&self, o: &Self) -> Self {
        CertifiedScalar {
            lo: std::cmp::max(&self.lo, &o.lo).clone(),
            hi: std::cmp::max(&self.hi, &o.hi).clone(),
        }
    }

    pub fn sqrt(&self, prec: u32) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::InvalidParameter("square root of a negative interval".into()));
        }
        let scale = BigInt::one() << (2 * prec);
        let lo_scaled = (self.lo.numer() * &scale).div_floor(self.lo.denom());
        let hi_scaled = {
            let n = self.hi.numer() * &scale;
            let (q, r) = n.div_mod_floor(self.hi.denom());
            if r.is_zero() {
                q
            } else {
                q + 1
            }
        };
        let lo = lo_scaled.sqrt();
        let mut hi = hi_scaled.sqrt();
        if &hi * &hi < hi_scaled {
            hi += 1;
        }
        let den = BigInt::one() << prec;
        Ok(CertifiedScalar {
            lo: BigRational::new(lo, den.clone()),
            hi: BigRational::new(hi, den),
        })
    }

    /// `Some(Less)` if certainly negative, `Some(Greater)` if certainly
    /// positive, `Some(Equal)` for the exact zero, `None` otherwise.
    pub fn sign(&self) -> Option<Ordering> {
        if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison with another interval.
    pub fn cmp_certified(&self, o: &Self) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_certainly_less_than(&self, o: &Self) -> bool {
        self.hi < o.lo
    }

    /// `⌊x⌋` when the whole interval has the same floor.
    pub fn floor(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }

    /// `⌈x⌉` when the whole interval has the same ceiling.
    pub fn ceil(&self) -> Option<BigInt> {
        let a = self.lo.ceil().to_integer();
        let b = self.hi.ceil().to_integer();
        (a == b).then_some(a)
    }
}

/// Re-run `f` with doubled precision until it yields a decision.
pub fn escalate<T>(what: &str, start: u32, mut f: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    let mut prec = start.max(8);
    loop {
        if let Some(v) = f(prec)? {
            return Ok(v);
        }
        if prec >= MAX_PRECISION {
            return Err(Error::Inconclusive {
                what: what.to_string(),
                bits: prec,
            });
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    let bad = || Error::Parse(format!("not a decimal: `{s}`"));
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow::Pow::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub(crate) fn ratio_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CertifiedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12}, {:.12}]", self.lo_f64(), self.hi_f64())
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    lo: String,
    hi: String,
    lo_f64: f64,
    hi_f64: f64,
}

impl Serialize for CertifiedScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            lo: ratio_string(&self.lo),
            hi: ratio_string(&self.hi),
            lo_f64: self.lo_f64(),
            hi_f64: self.hi_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertifiedScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let lo: BigRational = w.lo.parse().map_err(serde::de::Error::custom)?;
        let hi: BigRational = w.hi.parse().map_err(serde::de::Error::custom)?;
        CertifiedScalar::new(lo, hi).map_err(serde::de::Error::custom)
    }
}
