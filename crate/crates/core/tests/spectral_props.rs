//! Property tests for the effective-dimension search: definitional
//! minimality of the returned index and monotonicity in the condition
//! constant.

use proptest::prelude::*;
use relulab_core::spectral::{find_kstar, tail_ratio_at};

prop_compose! {
    /// Descending positive spectrum of moderate size.
    fn spectrum()(raw in prop::collection::vec(0.01f64..10.0, 2..60)) -> Vec<f64> {
        let mut v = raw;
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }
}

proptest! {
    /// A returned index satisfies the tail-ratio condition and is the
    /// smallest index that does; absence means no index qualifies.
    #[test]
    fn kstar_is_the_smallest_qualifying_index(lx in spectrum(), b in 1.01f64..50.0) {
        let d = lx.len();
        let threshold = d as f64 / b;
        let r = find_kstar(&lx, d, b);
        match r.kstar {
            Some(k) => {
                prop_assert!(k >= 1 && k < d);
                prop_assert!(tail_ratio_at(&lx, k) >= threshold * (1.0 - 1e-12));
                for smaller in 1..k {
                    prop_assert!(tail_ratio_at(&lx, smaller) < threshold);
                }
                let ratio = r.tail_ratio_at_kstar.unwrap();
                prop_assert!((ratio - tail_ratio_at(&lx, k)).abs() <= 1e-9 * ratio.max(1.0));
            }
            None => {
                for k in 1..d {
                    prop_assert!(tail_ratio_at(&lx, k) < threshold);
                }
            }
        }
    }

    /// Weakening the condition (larger b) can only move the index earlier,
    /// and can never destroy existence.
    #[test]
    fn kstar_is_monotone_in_the_condition_constant(
        lx in spectrum(),
        b_lo in 1.01f64..50.0,
        factor in 1.0f64..10.0,
    ) {
        let d = lx.len();
        let b_hi = b_lo * factor;
        let lo = find_kstar(&lx, d, b_lo).kstar;
        let hi = find_kstar(&lx, d, b_hi).kstar;
        if let Some(k_lo) = lo {
            let k_hi = hi.expect("existence is preserved under weakening");
            prop_assert!(k_hi <= k_lo, "b {b_lo} -> {b_hi} moved k* {k_lo} -> {k_hi}");
        }
    }
}
