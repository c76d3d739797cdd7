#![allow(dead_code)]

use gaugeforge_core::netlang::{q, qr, Expr};
use gaugeforge_core::Q;
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| qr(n, d))
}

fn small_exponent() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=2).prop_map(|(n, d)| qr(n, d))
}

/// `C·ε^a·(−log ε)^b·exp(c/ε)` with a positive coefficient.
pub fn monomial() -> impl Strategy<Value = Expr> {
    (1i64..=4, 1i64..=3, small_exponent(), -2i64..=2, -2i64..=2).prop_map(|(cn, cd, a, b, c)| {
        let mut e = Expr::constant(qr(cn, cd)).mul(Expr::eps().pow(a));
        if b != 0 {
            e = e.mul(Expr::eps().log().neg().pow(q(b)));
        }
        if c != 0 {
            e = e.mul(Expr::int(c).div(Expr::eps()).exp());
        }
        e
    })
}

/// Sums of one to three fragment monomials.
pub fn fragment_net() -> impl Strategy<Value = Expr> {
    prop::collection::vec(monomial(), 1..=3).prop_map(|ms| {
        let mut it = ms.into_iter();
        let first = it.next().expect("nonempty");
        it.fold(first, |acc, m| acc.add(m))
    })
}

/// Arbitrary trees over the fragment operations.
pub fn fragment_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::eps()),
        rational().prop_map(Expr::constant),
        Just(Expr::Pi),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(b)),
            (inner.clone(), small_exponent()).prop_map(|(a, e)| a.pow(e)),
            inner.clone().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::log),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::abs),
            (inner.clone(), inner).prop_map(|(a, b)| a.min(b)),
        ]
    })
}

/// Maps `(0,1] → (0,1]` that stay inside the fragment when substituted.
pub fn index_map() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (1i64..=3).prop_map(|k| Expr::eps().powi(k)),
        (1i64..=4).prop_map(|d| Expr::eps().div(Expr::int(d))),
        Just(Expr::eps().pow(qr(1, 2))),
        Just(Expr::eps().mul(Expr::eps().log().neg().add(Expr::one()).pow(q(-1)))),
    ]
}
