//! Exact integers for edge-multiplicity products and the `2^a 3^b 5^c`
//! rationals used by the comparison functions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision nonnegative integer. Serialized as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ProductValue(pub BigUint);

impl ProductValue {
    pub fn one() -> Self {
        ProductValue(BigUint::one())
    }

    pub fn zero() -> Self {
        ProductValue(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn from_u64(v: u64) -> Self {
        ProductValue(BigUint::from(v))
    }

    /// Product of an iterator of small factors.
    pub fn product_of<I: IntoIterator<Item = u64>>(factors: I) -> Self {
        let mut acc = BigUint::one();
        let mut word: u64 = 1;
        for f in factors {
            if f == 0 {
                return ProductValue::zero();
            }
            match word.checked_mul(f) {
                Some(w) => word = w,
                None => {
                    acc *= word;
                    word = f;
                }
            }
        }
        acc *= word;
        ProductValue(acc)
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for ProductValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for ProductValue {
    fn from(v: u64) -> Self {
        ProductValue::from_u64(v)
    }
}

impl From<BigUint> for ProductValue {
    fn from(v: BigUint) -> Self {
        ProductValue(v)
    }
}

impl Mul for &ProductValue {
    type Output = ProductValue;
    fn mul(self, rhs: &ProductValue) -> ProductValue {
        ProductValue(&self.0 * &rhs.0)
    }
}

impl Mul for ProductValue {
    type Output = ProductValue;
    fn mul(self, rhs: ProductValue) -> ProductValue {
        ProductValue(self.0 * rhs.0)
    }
}

impl Serialize for ProductValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for ProductValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<BigUint>().map(ProductValue).map_err(serde::de::Error::custom)
    }
}

/// The positive rational `2^two * 3^three * 5^five`; exponents may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(rename = "two_exp")]
    pub two: i64,
    #[serde(rename = "three_exp")]
    pub three: i64,
    #[serde(rename = "five_exp")]
    pub five: i64,
}

impl PrimePower {
    pub const ONE: PrimePower = PrimePower {
        two: 0,
        three: 0,
        five: 0,
    };

    pub fn new(two: i64, three: i64, five: i64) -> Self {
        PrimePower { two, three, five }
    }

    pub fn is_integer(&self) -> bool {
        self.two >= 0 && self.three >= 0 && self.five >= 0
    }

    pub fn inv(&self) -> PrimePower {
        PrimePower::new(-self.two, -self.three, -self.five)
    }

    /// `(numerator, denominator)` in lowest terms.
    pub fn to_ratio(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (base, e) in [(2u32, self.two), (3, self.three), (5, self.five)] {
            let p = pow_u(base, e.unsigned_abs());
            if e >= 0 {
                num *= p;
            } else {
                den *= p;
            }
        }
        (num, den)
    }

    /// Exact value when the exponents are nonnegative.
    pub fn to_product(&self) -> Option<ProductValue> {
        if self.is_integer() {
            Some(ProductValue(self.to_ratio().0))
        } else {
            None
        }
    }

    /// Exact comparison with a rational `num/den`.
    pub fn cmp_ratio(&self, num: &BigUint, den: &BigUint) -> Ordering {
        let (a, b) = self.to_ratio();
        (a * den).cmp(&(num * b))
    }

    /// `log2` of the value as a certified interval.
    pub fn log2(&self, prec: u32) -> crate::analysis::CertifiedScalar {
        use crate::analysis::{consts::log2_of, CertifiedScalar};
        let two = CertifiedScalar::from_int(self.two);
        let three = CertifiedScalar::from_int(self.three).mul(&log2_of(3, prec), prec);
        let five = CertifiedScalar::from_int(self.five).mul(&log2_of(5, prec), prec);
        two.add(&three, prec).add(&five, prec)
    }
}

impl PrimePower {
    /// Sign of `log2` of the value when a float evaluation decides it.
    ///
    /// The exponents are exact in f64 and each rounding step costs at most a
    /// relative 2^-53, so the computed log is within `2^-49 (|a|+|b|+|c|)` of
    /// the true one. Anything inside a much wider margin goes to big integers.
    fn float_sign(&self) -> Option<Ordering> {
        const LOG2_3: f64 = 1.584_962_500_721_156;
        const LOG2_5: f64 = 2.321_928_094_887_362;
        let (a, b, c) = (self.two as f64, self.three as f64, self.five as f64);
        if a.abs().max(b.abs()).max(c.abs()) > 1e15 {
            return None;
        }
        let x = a + b * LOG2_3 + c * LOG2_5;
        let margin = (a.abs() + b.abs() + c.abs() + 1.0) * 1e-12;
        if x > margin {
            Some(Ordering::Greater)
        } else if x < -margin {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

impl Mul for PrimePower {
    type Output = PrimePower;
    fn mul(self, rhs: PrimePower) -> PrimePower {
        PrimePower::new(self.two + rhs.two, self.three + rhs.three, self.five + rhs.five)
    }
}

impl Ord for PrimePower {
    /// Exact: compares `2^a 3^b 5^c` against `2^a' 3^b' 5^c'` by moving every
    /// factor to the side where its exponent is nonnegative.
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let q = *self * other.inv();
        if let Some(o) = q.float_sign() {
            return o;
        }
        let (num, den) = q.to_ratio();
        num.cmp(&den)
    }
}

impl PartialOrd for PrimePower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{} * 3^{} * 5^{}", self.two, self.three, self.five)
    }
}

fn pow_u(base: u32, exp: u64) -> BigUint {
    if base == 2 {
        return BigUint::one() << exp;
    }
    num_traits::pow::Pow::pow(BigUint::from(base), exp)
}
