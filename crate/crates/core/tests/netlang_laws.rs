mod common;

use common::{fragment_net, fragment_tree, index_map};
use gaugeforge_core::netlang::{eval_big, growth_key, normalize, parse_with, substitute, Expr, Growth, ParseOptions, SamplingSchedule};
use gaugeforge_core::Q;
use proptest::prelude::*;

fn ln_abs(e: &Expr, p: &Q) -> Option<f64> {
    eval_big(e, p, 40).ok().map(|v| v.ln_abs_f64())
}

fn close(a: &Expr, b: &Expr, sched: &SamplingSchedule) -> bool {
    sched.points().iter().all(|p| match (eval_big(a, p, 40), eval_big(b, p, 40)) {
        (Ok(x), Ok(y)) => {
            if x.is_zero() || y.is_zero() {
                return x.is_zero() == y.is_zero() || (x.ln_abs_f64().max(y.ln_abs_f64()) < -60.0);
            }
            x.is_negative() == y.is_negative() && (x.ln_abs_f64() - y.ln_abs_f64()).abs() < 1e-20_f64.max(1e-25 * x.ln_abs_f64().abs())
        }
        (Err(_), Err(_)) => true,
        _ => false,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(e in fragment_tree()) {
        let text = e.to_string();
        let back = parse_with(&text, ParseOptions::extended()).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalize_is_idempotent(e in fragment_tree()) {
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn substitution_is_associative(e in fragment_net(), f in index_map(), g in index_map()) {
        let sched = SamplingSchedule::default();
        let left = substitute(&substitute(&e, &f), &g);
        let right = substitute(&e, &substitute(&f, &g));
        prop_assert!(close(&left, &right, &sched), "{} vs {}", left, right);
    }

    #[test]
    fn smaller_key_means_vanishing_ratio(x in fragment_net(), y in fragment_net()) {
        let (Growth::Key(kx), Growth::Key(ky)) = (growth_key(&x), growth_key(&y)) else {
            return Ok(());
        };
        prop_assume!(kx != ky);
        let (small, big) = if kx < ky { (x, y) } else { (y, x) };
        let sched = SamplingSchedule::default();
        let pts = sched.points();
        let lr: Vec<f64> = pts.iter().map(|p| ln_abs(&small, p).unwrap() - ln_abs(&big, p).unwrap()).collect();
        // the tail is where eps <= 1e-6
        let tail = &lr[lr.len() / 2..];
        for w in tail.windows(2) {
            prop_assert!(w[1] < w[0] + 1e-12, "{} / {}: {:?}", small, big, lr);
        }
        prop_assert!(tail[tail.len() - 1] < tail[0]);
    }
}
