use mulex::analysis::bounds::{check_props, f_value, h_value, w_optimum};
use mulex::analysis::constants::{check_appendix_inequalities, find_constants};
use mulex::analysis::consts::{beta, beta_floor_ceil, ln_int};
use mulex::analysis::{CertifiedScalar, DEFAULT_PRECISION};
use mulex::quotient::build_g_x;
use mulex::{Multigraph, ProductValue};
use num_bigint::BigUint;
use proptest::prelude::*;
use rayon::prelude::*;

#[derive(Clone, Debug)]
enum Expr {
    Ln2,
    Ln3,
    Beta,
    Int(i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Ln2),
        Just(Expr::Ln3),
        Just(Expr::Beta),
        (-5i64..=5).prop_map(Expr::Int),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
        ]
    })
}

/// `None` when a divisor's interval contains zero.
fn eval(e: &Expr, p: u32) -> Option<CertifiedScalar> {
    Some(match e {
        Expr::Ln2 => ln_int(2, p),
        Expr::Ln3 => ln_int(3, p),
        Expr::Beta => beta(p),
        Expr::Int(k) => CertifiedScalar::from_int(*k),
        Expr::Add(a, b) => eval(a, p)?.add(&eval(b, p)?, p),
        Expr::Sub(a, b) => eval(a, p)?.sub(&eval(b, p)?, p),
        Expr::Mul(a, b) => eval(a, p)?.mul(&eval(b, p)?, p),
        Expr::Div(a, b) => eval(a, p)?.div(&eval(b, p)?, p).ok()?,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn higher_precision_nests(e in expr()) {
        let coarse = eval(&e, 40);
        let fine = eval(&e, 120);
        if let Some(c) = coarse {
            let f = fine.expect("a finer divisor cannot straddle zero");
            prop_assert!(f.is_subset_of(&c), "{e:?}: {f} not in {c}");
        }
    }
}

#[test]
fn beta_roundings_are_stable_under_precision_doubling() {
    let b1 = beta(DEFAULT_PRECISION);
    let b2 = beta(2 * DEFAULT_PRECISION);
    for t in 1..=1000i64 {
        let c1 = b1.mul_int(t, DEFAULT_PRECISION).ceil().expect("decided at 60 bits");
        let c2 = b2
            .mul_int(t, 2 * DEFAULT_PRECISION)
            .ceil()
            .expect("decided at 120 bits");
        assert_eq!(c1, c2, "t = {t}");
        assert_eq!(beta_floor_ceil(t).unwrap().1, i64::try_from(c1).unwrap());
    }
}

#[test]
fn propositions_hold_on_the_small_grid() {
    let pts: Vec<(u64, u64)> = (2..=60u64).flat_map(|n| (2..=n).map(move |t| (n, t))).collect();
    let bad: Vec<_> = pts
        .par_iter()
        .filter(|&&(n, t)| {
            let r = check_props(n, t, DEFAULT_PRECISION).unwrap();
            !(r.lower_bound_holds && r.ratio_bound_holds)
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

fn pv(g: &Multigraph) -> BigUint {
    g.product().0
}

/// G with `C_t(3,2)` on `X = {0..t}`, an optimal W(n−t) member on the rest,
/// and each outside vertex joined by weight 3 to `anchor[z]` and 2 to the
/// other vertices of `X`.
fn chain_instance(n: usize, t: usize, anchor: &[usize]) -> Multigraph {
    let cyc = Multigraph::build_cycle(t).unwrap();
    let (r, _) = w_optimum((n - t) as u64).unwrap();
    let rest = Multigraph::build_w(n - t, r as usize, 2).unwrap();
    Multigraph::from_fn(n, |i, j| match (i < t, j < t) {
        (true, true) => cyc.weight(i, j),
        (false, false) => rest.weight(i - t, j - t),
        (true, false) => {
            if anchor[j - t] == i {
                3
            } else {
                2
            }
        }
        (false, true) => unreachable!("i < j"),
    })
}

#[test]
fn cycle_instances_respect_the_h_over_f_chain() {
    for (n, t) in [(8usize, 5usize), (9, 5), (10, 6)] {
        let x: Vec<usize> = (0..t).collect();
        let gx = pv(&build_g_x(n, &x).unwrap());
        let (fnum, fden) = f_value(n as u64, t as u64).unwrap().to_ratio();
        let (hnum, hden) = h_value(n as u64, t as u64).unwrap().to_ratio();
        let (_, w_rest) = w_optimum((n - t) as u64).unwrap();
        let pz_cap = BigUint::from(3u64 * (1 << (t - 1)));
        let m = n - t;
        let mut anchor = vec![0usize; m];
        loop {
            let g = chain_instance(n, t, &anchor);
            assert_eq!(g.find_cycle_copy(t).unwrap().map(|c| c.len()), Some(t));
            for z in t..n {
                let (_, pz) = g.window_metrics(&x, z).unwrap();
                assert!(pz.0 <= pz_cap);
            }
            let p = pv(&g);
            // the chain is tight here: P(G) = h(n,t) P(W(n−t))
            assert_eq!(&p * &hden, &hnum * &w_rest.0);
            // P(G) ≤ (h/f) P(𝒢_X), cross-multiplied
            assert!(&p * &fnum * &hden <= &hnum * &fden * &gx, "(n,t) = ({n},{t})");
            let Some(i) = anchor.iter().position(|&a| a + 1 < t) else {
                break;
            };
            anchor[i] += 1;
            anchor[..i].iter_mut().for_each(|a| *a = 0);
        }
    }
}

#[test]
fn g_x_dominates_f_times_the_rest() {
    for n in 4..=40u64 {
        for t in 2..=n {
            let x: Vec<usize> = (0..t as usize).collect();
            let gx = build_g_x(n as usize, &x).unwrap().product();
            let rest = if t == n {
                ProductValue::from(1u64)
            } else {
                w_optimum(n - t).unwrap().1
            };
            let (fnum, fden) = f_value(n, t).unwrap().to_ratio();
            assert!(fnum * rest.0 <= gx.0 * fden, "n = {n}, t = {t}");
        }
    }
}

#[test]
fn appendix_gamma_matches_inequality_three() {
    let rep = check_appendix_inequalities(DEFAULT_PRECISION).unwrap();
    assert!(rep.all_hold);
    assert!(rep.gamma_consistent);
    let cert = find_constants(DEFAULT_PRECISION).unwrap();
    let iii = rep.checks.iter().find(|c| c.name == "III").unwrap();
    let two_gamma = cert.gamma_app.mul_int(2, 200);
    let neg = iii.lhs.neg();
    assert!(two_gamma.lo() <= neg.hi() && neg.lo() <= two_gamma.hi());
    assert!(cert.gamma_app.lo_f64() > 0.10 && cert.gamma_app.hi_f64() < 0.11);
}

#[test]
fn w_optimum_agrees_with_the_ratio_test() {
    // h(y+1)/h(y) = 2^y 3^{n-2y-1}; the smallest maximizer is the first y
    // where this is at most 1
    let grows = |n: u64, y: u64| {
        let e = n as i64 - 2 * y as i64 - 1;
        let lhs = BigUint::from(2u32).pow(y as u32) * BigUint::from(3u32).pow(e.max(0) as u32);
        lhs > BigUint::from(3u32).pow((-e).max(0) as u32)
    };
    for n in 1..=200u64 {
        let first = (0..n).find(|&y| !grows(n, y)).unwrap_or(n);
        assert_eq!(w_optimum(n).unwrap().0, first, "n = {n}");
    }
    assert_eq!(w_optimum(100).unwrap().0, 73);
}
