//! The appendix inequalities and the constants K, γ, M₁, K′, T′ and the
//! `k < f` threshold, all certified with interval arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::bounds::{c1_c2_log2, decay_holds, f_value, h_value, log2_5};
use super::consts::{beta_a, gamma_a, ln_int, log2_of, two_pow_gamma, LogBounds};
use super::interval::{escalate, CertifiedScalar, DEFAULT_PRECISION};
use crate::error::{Error, Result};

fn one() -> CertifiedScalar {
    CertifiedScalar::from_int(1)
}

/// `1 − x² − 2x(1−x) log₂ 3`, the coefficient of `tn` in every exponent bound.
pub fn tn_coefficient(logs: &LogBounds) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    let x2 = x.mul(&x, p);
    let x1 = x.mul(&one().sub(&x, p), p);
    one().sub(&x2, p).sub(&x1.mul_int(2, p).mul(&logs.log2_3(), p), p)
}

/// `−½ (5(1 − x² − 2x(1−x) log₂ 3) + log₂ 3 − 1)`.
pub fn appendix_gamma(logs: &LogBounds) -> CertifiedScalar {
    let p = logs.prec;
    tn_coefficient(logs)
        .mul_int(5, p)
        .add(&logs.log2_3(), p)
        .sub(&one(), p)
        .mul(&CertifiedScalar::from_ratio(-1, 2), p)
}

/// `x(1−x)/6`, the slope of `p(n,t)`.
fn p_slope(logs: &LogBounds) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    x.mul(&one().sub(&x, p), p).mul(&CertifiedScalar::from_ratio(1, 6), p)
}

/// `p(n,t) = (−(x/6)(1−x) t + 2) n + 2`.
pub fn p_poly(logs: &LogBounds, n: i64, t: i64) -> CertifiedScalar {
    let p = logs.prec;
    p_slope(logs)
        .mul_int(-t, p)
        .add(&CertifiedScalar::from_int(2), p)
        .mul_int(n, p)
        .add(&CertifiedScalar::from_int(2), p)
}

/// `q(t) = q₁(t) + q₂(t) log₂ 3` with `q₁ = t²(x²−1)/2 + t(3x−1)/2 + 3/2` and
/// `q₂ = x(1−x)t² + t + 1`.
pub fn q_poly(logs: &LogBounds, t: i64) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    let tt = CertifiedScalar::from_int(t);
    let t2 = CertifiedScalar::from_int(t * t);
    let half = CertifiedScalar::from_ratio(1, 2);
    let q1 = t2
        .mul(&x.mul(&x, p).sub(&one(), p), p)
        .mul(&half, p)
        .add(&tt.mul(&x.mul_int(3, p).sub(&one(), p), p).mul(&half, p), p)
        .add(&CertifiedScalar::from_ratio(3, 2), p);
    let q2 = x.mul(&one().sub(&x, p), p).mul(&t2, p).add(&tt, p).add(&one(), p);
    q1.add(&q2.mul(&logs.log2_3(), p), p)
}

/// `r(t) = r₁(t) + r₂(t) log₂ 3 + t log₂ 5` with `r₁ = t²(x²−1)/2 + 3t(x−1)/2 + 3/2`
/// and `r₂ = x(1−x)t² + 2t + 1`: the `n`-free part of `log₂(k/f)`'s bound.
pub fn r_poly(logs: &LogBounds, log2_5: &CertifiedScalar, t: i64) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    let tt = CertifiedScalar::from_int(t);
    let t2 = CertifiedScalar::from_int(t * t);
    let half = CertifiedScalar::from_ratio(1, 2);
    let r1 = t2
        .mul(&x.mul(&x, p).sub(&one(), p), p)
        .mul(&half, p)
        .add(
            &tt.mul(&x.sub(&one(), p), p).mul(&CertifiedScalar::from_ratio(3, 2), p),
            p,
        )
        .add(&CertifiedScalar::from_ratio(3, 2), p);
    let r2 = x
        .mul(&one().sub(&x, p), p)
        .mul(&t2, p)
        .add(&tt.mul_int(2, p), p)
        .add(&one(), p);
    r1.add(&r2.mul(&logs.log2_3(), p), p).add(&tt.mul(log2_5, p), p)
}

/// Exponent of `2^{…}3^{…}` bounding `h/f`, built term by term from
/// `h` and the lower bound on `f` rather than from the simplified `C₁, C₂`.
fn h_over_f_exponent_unsimplified(logs: &LogBounds, n: i64, t: i64) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    let tt = CertifiedScalar::from_int(t);
    let nn = CertifiedScalar::from_int(n);
    let half = CertifiedScalar::from_ratio(1, 2);
    let xt = x.mul(&tt, p);
    let xt_c2 = xt.mul(&xt, p).sub(&xt, p).mul(&half, p);
    let c1 = CertifiedScalar::from_int(t * (t - 1) / 2 + t * (n - t) - n).sub(
        &xt_c2
            .add(&x.mul(&x, p).mul_int(t * (n - t), p), p)
            .sub(&CertifiedScalar::from_ratio(3, 2), p)
            .sub(&xt, p),
        p,
    );
    let x1 = x.mul(&one().sub(&x, p), p);
    let c2 = nn.sub(
        &x1.mul_int(t * t, p)
            .add(&x1.mul_int(2 * t * (n - t), p), p)
            .sub(&tt, p)
            .sub(&one(), p),
        p,
    );
    c1.add(&c2.mul(&logs.log2_3(), p), p)
}

/// Same for `k/f`.
fn k_over_f_exponent_unsimplified(logs: &LogBounds, log2_5: &CertifiedScalar, n: i64, t: i64) -> CertifiedScalar {
    let p = logs.prec;
    let x = logs.beta();
    let tt = CertifiedScalar::from_int(t);
    let half = CertifiedScalar::from_ratio(1, 2);
    let xt = x.mul(&tt, p);
    let xt_c2 = xt.mul(&xt, p).sub(&xt, p).mul(&half, p);
    let g1 = CertifiedScalar::from_int(t * (t - 1) / 2 + t * (n - t) - t).sub(
        &xt_c2
            .add(&x.mul(&x, p).mul_int(t * (n - t), p), p)
            .sub(&CertifiedScalar::from_ratio(3, 2), p)
            .sub(&xt, p),
        p,
    );
    let x1 = x.mul(&one().sub(&x, p), p);
    let g2 = tt.sub(
        &x1.mul_int(t * t, p)
            .add(&x1.mul_int(2 * t * (n - t), p), p)
            .sub(&tt, p)
            .sub(&one(), p),
        p,
    );
    g1.add(&g2.mul(&logs.log2_3(), p), p).add(&tt.mul(log2_5, p), p)
}

fn overlaps(a: &CertifiedScalar, b: &CertifiedScalar) -> bool {
    a.lo() <= b.hi() && b.lo() <= a.hi()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub statement: String,
    /// The left-hand side of `expr < 0`.
    pub lhs: CertifiedScalar,
    /// `Some(true)` certified negative, `Some(false)` certified nonnegative.
    pub certified: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AppendixReport {
    pub ln2: CertifiedScalar,
    pub ln3: CertifiedScalar,
    pub checks: Vec<InequalityCheck>,
    pub all_hold: bool,
    /// `2γ = −(LHS of (III))` holds as intervals.
    pub gamma_consistent: bool,
    pub gamma: CertifiedScalar,
}

fn check(name: &str, statement: &str, lhs: CertifiedScalar) -> InequalityCheck {
    let certified = match lhs.sign() {
        Some(Ordering::Less) => Some(true),
        Some(_) => Some(false),
        None => None,
    };
    InequalityCheck {
        name: name.into(),
        statement: statement.into(),
        lhs,
        certified,
    }
}

/// Evaluate (I), (II), (III) directly in `x = β` and through their
/// reductions to quadratic forms in `ln 2, ln 3`. Each inequality counts as
/// certified when either form is. Errors if some inequality is decided by
/// neither form.
pub fn check_appendix_with(logs: &LogBounds) -> Result<AppendixReport> {
    let p = logs.prec;
    let x = logs.beta();
    let (l2, l3) = (&logs.ln2, &logs.ln3);
    let x1 = x.mul(&one().sub(&x, p), p);
    let omx2 = one().sub(&x.mul(&x, p), p);
    let l22 = l2.mul(l2, p);
    let l33 = l3.mul(l3, p);
    let l23 = l2.mul(l3, p);

    let i_direct = omx2
        .mul(l2, p)
        .sub(&x1.mul(l3, p).mul(&CertifiedScalar::from_ratio(3, 2), p), p);
    let i_reduced = l23.mul_int(6, p).sub(&l33.mul_int(3, p), p).sub(&l22.mul_int(2, p), p);
    let ii_direct = x1
        .mul(l3, p)
        .mul(&CertifiedScalar::from_ratio(2, 3), p)
        .sub(&omx2.mul(l2, p).mul(&CertifiedScalar::from_ratio(1, 2), p), p);
    let ii_reduced = l33.mul_int(4, p).sub(&l23.mul_int(9, p), p).add(&l22.mul_int(3, p), p);
    let iii_direct = tn_coefficient(logs).mul_int(5, p).add(&logs.log2_3(), p).sub(&one(), p);
    let iii_reduced = l33.mul_int(-3, p).add(&l23.mul_int(7, p), p).sub(&l22.mul_int(4, p), p);

    let checks = vec![
        check("I", "(1-x^2) ln2 - 1.5 x(1-x) ln3 < 0", i_direct),
        check("I-reduced", "6 ln2 ln3 - 3 ln3^2 - 2 ln2^2 < 0", i_reduced),
        check("II", "(2/3) x(1-x) ln3 - (1-x^2)/2 ln2 < 0", ii_direct),
        check("II-reduced", "4 ln3^2 - 9 ln2 ln3 + 3 ln2^2 < 0", ii_reduced),
        check("III", "5(1-x^2-2x(1-x) log2 3) + log2 3 - 1 < 0", iii_direct.clone()),
        check("III-reduced", "-3 ln3^2 + 7 ln2 ln3 - 4 ln2^2 < 0", iii_reduced),
    ];
    let mut all_hold = true;
    for pair in checks.chunks(2) {
        match (pair[0].certified, pair[1].certified) {
            (Some(true), _) | (_, Some(true)) => {}
            (Some(false), _) | (_, Some(false)) => all_hold = false,
            (None, None) => {
                return Err(Error::Inconclusive {
                    what: format!("appendix inequality {}", pair[0].name),
                    bits: p,
                })
            }
        }
    }
    let gamma = appendix_gamma(logs);
    let gamma_consistent = overlaps(&gamma.mul_int(2, p), &iii_direct.neg());
    Ok(AppendixReport {
        ln2: logs.ln2.clone(),
        ln3: logs.ln3.clone(),
        checks,
        all_hold,
        gamma_consistent,
        gamma,
    })
}

/// [`check_appendix_with`] at increasing precision until every form decides.
pub fn check_appendix_inequalities(prec: u32) -> Result<AppendixReport> {
    escalate("appendix inequalities", prec, |p| {
        let r = check_appendix_with(&LogBounds::at_precision(p))?;
        Ok(r.checks.iter().all(|c| c.certified.is_some()).then_some(r))
    })
}

/// Least `K` with `p(t,t) < 0` and `2 − (x/6)(1−x)t < 0` certified for every
/// `t ≥ K` (both sides decrease in `t`, so checking `t = K` suffices).
fn least_k(logs: &LogBounds) -> Result<(u64, CertifiedScalar, CertifiedScalar)> {
    let slope = p_slope(logs);
    for t in 2..10_000i64 {
        let pk = p_poly(logs, t, t);
        let lin = CertifiedScalar::from_int(2).sub(&slope.mul_int(t, logs.prec), logs.prec);
        if pk.sign() == Some(Ordering::Less) && lin.sign() == Some(Ordering::Less) {
            return Ok((t as u64, pk, p_poly(logs, t - 1, t - 1)));
        }
    }
    Err(Error::Inconclusive {
        what: "no K below 10000".into(),
        bits: logs.prec,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpotCheck {
    pub n: u64,
    pub t: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsCertificate {
    pub precision: u32,
    pub k: u64,
    pub p_at_k: CertifiedScalar,
    pub p_before_k: CertifiedScalar,
    /// `K` obtained from the three-digit log bounds alone.
    pub k_three_digit: u64,
    pub gamma_app: CertifiedScalar,
    /// Enclosure of `max_{5≤t≤K} |q(t)|`.
    pub t_bound: CertifiedScalar,
    pub m1: u64,
    pub k_prime: u64,
    /// Enclosure of `max_{2≤t≤K′} |r(t)|`.
    pub t_prime_bound: CertifiedScalar,
    /// Least `M` with `M(1 − x² − 2x(1−x)log₂3) + T′ < 0`; `k(n,t) < f(n,t)`
    /// then holds for `n ≥ max(M, K′)`.
    pub m_complem2: Option<u64>,
    /// Bounded by values of ex_Π beyond reach of exhaustive search.
    pub m2: Option<u64>,
    /// The simplified `q(t)`, `r(t)` and `tn` coefficients agree with the
    /// term-by-term expansions.
    pub expansions_agree: bool,
    pub spot_checks: Vec<SpotCheck>,
    pub provenance: String,
}

/// Compute and certify every constant of the appendix chain.
pub fn find_constants(prec: u32) -> Result<ConstantsCertificate> {
    escalate("appendix constants", prec, |p| find_constants_at(p).map(Some))
}

fn find_constants_at(prec: u32) -> Result<ConstantsCertificate> {
    let logs = LogBounds::at_precision(prec);
    let p = logs.prec;
    let (k, p_at_k, p_before_k) = least_k(&logs)?;
    let (k_three_digit, _, _) = least_k(&LogBounds::three_digit())?;

    let gamma = appendix_gamma(&logs);
    if gamma.sign() != Some(Ordering::Greater) {
        return Err(Error::Inconclusive {
            what: "sign of the appendix gamma".into(),
            bits: p,
        });
    }
    let coef = tn_coefficient(&logs);
    let l5 = log2_5(p);

    let mut expansions_agree = true;
    let mut t_lo = BigRational::from_integer(0.into());
    let mut t_hi = t_lo.clone();
    for t in 5..=k as i64 {
        let q = q_poly(&logs, t);
        let a = q.abs();
        t_lo = t_lo.max(a.lo().clone());
        t_hi = t_hi.max(a.hi().clone());
        // q(t) is the value at n = 0; the slope in n is t·coef + log₂3 − 1
        let e0 = h_over_f_exponent_unsimplified(&logs, 0, t);
        let e1 = h_over_f_exponent_unsimplified(&logs, 1, t);
        let slope = coef.mul_int(t, p).add(&logs.log2_3(), p).sub(&one(), p);
        expansions_agree &= overlaps(&e0, &q) && overlaps(&e1.sub(&e0, p), &slope);
        expansions_agree &= overlaps(&c1_c2_log2(&logs, 0, t), &q);
    }
    let t_bound = CertifiedScalar::new(t_lo, t_hi)?;
    let m1_real = t_bound.hi() / gamma.lo();
    let m1 = m1_real.ceil().to_integer().to_u64().expect("small").max(k);

    // K′: c·t > 102 makes p(n,t) < −100n + 2 for every n ≥ t
    let slope = p_slope(&logs);
    let mut k_prime = k;
    while slope.mul_int(k_prime as i64, p).lo() <= &BigRational::from_integer(102.into()) {
        k_prime += 1;
    }
    let mut tp_lo = BigRational::from_integer(0.into());
    let mut tp_hi = tp_lo.clone();
    for t in 2..=k_prime as i64 {
        let r = r_poly(&logs, &l5, t);
        let a = r.abs();
        tp_lo = tp_lo.max(a.lo().clone());
        tp_hi = tp_hi.max(a.hi().clone());
        if t <= 80 || t == k_prime as i64 {
            let e0 = k_over_f_exponent_unsimplified(&logs, &l5, 0, t);
            let e1 = k_over_f_exponent_unsimplified(&logs, &l5, 1, t);
            expansions_agree &= overlaps(&e0, &r) && overlaps(&e1.sub(&e0, p), &coef.mul_int(t, p));
        }
    }
    let t_prime_bound = CertifiedScalar::new(tp_lo, tp_hi)?;
    let m_complem2 = if coef.sign() == Some(Ordering::Less) {
        let m: BigInt = (t_prime_bound.hi() / coef.hi().abs()).floor().to_integer() + 1;
        m.to_u64()
    } else {
        None
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut spot_checks = Vec::new();
    for _ in 0..20 {
        let t = rng.gen_range(5..=k);
        let n = rng.gen_range(m1..=m1 + 2000);
        let holds = decay_holds(&h_value(n, t)?, &f_value(n, t)?, &gamma, n)?;
        spot_checks.push(SpotCheck { n, t, holds });
    }

    Ok(ConstantsCertificate {
        precision: prec,
        k,
        p_at_k,
        p_before_k,
        k_three_digit,
        gamma_app: gamma.round(prec),
        t_bound,
        m1,
        k_prime,
        t_prime_bound,
        m_complem2,
        m2: None,
        expansions_agree,
        spot_checks,
        provenance: "K: least t with p(t,t) < 0 and 2 - x(1-x)t/6 < 0; \
                     T = max |q(t)| over 5 <= t <= K; M1 = max(K, ceil(T / gamma)); \
                     K': least t >= K with x(1-x)t/6 > 102; T' = max |r(t)| over 2 <= t <= K'; \
                     M: least n with n(1 - x^2 - 2x(1-x)log2 3) + T' < 0; \
                     M2 depends on ex_P(n,4,15) for all n <= M1 + K and is not computed"
            .into(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsA {
    pub a: u64,
    pub beta_a: CertifiedScalar,
    pub gamma_a: CertifiedScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub precision: u32,
    pub ln2: CertifiedScalar,
    pub ln3: CertifiedScalar,
    pub log2_3: CertifiedScalar,
    pub beta: CertifiedScalar,
    pub gamma: CertifiedScalar,
    pub two_pow_gamma: CertifiedScalar,
    pub per_a: Vec<ConstantsA>,
}

pub fn constants(prec: u32, a_values: &[u64]) -> Result<ConstantsReport> {
    let logs = LogBounds::at_precision(prec);
    let per_a = a_values
        .iter()
        .map(|&a| {
            Ok(ConstantsA {
                a,
                beta_a: beta_a(a, prec)?,
                gamma_a: gamma_a(a, prec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantsReport {
        precision: prec,
        ln2: ln_int(2, prec),
        ln3: ln_int(3, prec),
        log2_3: log2_of(3, prec),
        beta: logs.beta().round(prec),
        gamma: logs.gamma().round(prec),
        two_pow_gamma: two_pow_gamma(prec),
        per_a,
    })
}

pub fn default_constants() -> Result<ConstantsReport> {
    constants(DEFAULT_PRECISION, &[2, 3, 4])
}
