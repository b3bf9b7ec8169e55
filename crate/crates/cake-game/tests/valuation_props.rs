//! Property tests for the valuation kinds: monotonicity, inverse
//! consistency, density bounds, and the special-point identities of the
//! two-block and vanishing-density families.

use cake_game::config::InstanceSampler;
use cake_game::valuation::Valuation;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// A random density band that straddles 1 (required for unit total mass),
/// plus the sampled valuation drawn from it.
fn sampled_valuation(seed: u64, delta: f64, upper: f64) -> Valuation {
    let sampler = InstanceSampler {
        delta,
        upper,
        segments: 2..=8,
    };
    sampler.sample(&mut ChaCha12Rng::seed_from_u64(seed))
}

/// One representative of every kind, keyed by a selector in [0, 3).
fn any_kind(selector: usize, seed: u64, delta: f64, upper: f64, y: f64) -> Valuation {
    match selector % 3 {
        0 => sampled_valuation(seed, delta, upper),
        1 => Valuation::two_block(y).expect("y is interior"),
        _ => Valuation::VanishingDensity,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// x <= y implies cumulative(x) <= cumulative(y), and the endpoints
    /// evaluate to exactly 0 and 1, for every valuation kind.
    #[test]
    fn cumulative_is_monotone(
        selector in 0usize..3,
        seed in any::<u64>(),
        delta in 0.05f64..0.9,
        upper in 1.1f64..5.0,
        yb in 0.01f64..0.99,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
    ) {
        let v = any_kind(selector, seed, delta, upper, yb);
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        let cx = v.cumulative(x).unwrap();
        let cy = v.cumulative(y).unwrap();
        prop_assert!(cx <= cy, "cumulative({x}) = {cx} > cumulative({y}) = {cy}");
        prop_assert_eq!(v.cumulative(0.0).unwrap(), 0.0);
        // Sampled densities renormalize in floating point, so the total
        // mass is 1 up to accumulated rounding, not bitwise.
        let total = v.cumulative(1.0).unwrap();
        prop_assert!((total - 1.0).abs() <= 1e-12, "total mass {total}");
        prop_assert!((0.0..=1.0 + 1e-12).contains(&cx));
    }

    /// For strictly positive densities, point_at_value inverts cumulative:
    /// the point at fraction f of [lo, hi] carries exactly that much value.
    #[test]
    fn point_at_value_inverts_cumulative(
        seed in any::<u64>(),
        delta in 0.05f64..0.9,
        upper in 1.1f64..5.0,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        frac in 0.0f64..=1.0,
    ) {
        let v = sampled_valuation(seed, delta, upper);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        let p = v.point_at_value(lo, hi, frac).unwrap();
        prop_assert!((lo..=hi).contains(&p), "point {p} escapes [{lo}, {hi}]");
        let got = v.cumulative(p).unwrap() - v.cumulative(lo).unwrap();
        let want = frac * (v.cumulative(hi).unwrap() - v.cumulative(lo).unwrap());
        prop_assert!(
            (got - want).abs() <= 1e-10,
            "inverse drift {} at lo={lo} hi={hi} frac={frac}",
            (got - want).abs()
        );
    }

    /// Piecewise-constant value of an interval is pinched between the
    /// density band times the width.
    #[test]
    fn interval_value_respects_density_band(
        seed in any::<u64>(),
        delta in 0.05f64..0.9,
        upper in 1.1f64..5.0,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
    ) {
        let v = sampled_valuation(seed, delta, upper);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let val = v.interval_value(lo, hi).unwrap();
        let lo_bound = v.density_lower_bound().expect("sampled kind is bounded below");
        let hi_bound = v.density_upper_bound();
        let w = hi - lo;
        prop_assert!(
            val >= lo_bound * w - 1e-12 && val <= hi_bound * w + 1e-12,
            "value {val} outside [{}, {}] for width {w}",
            lo_bound * w,
            hi_bound * w
        );
        // The reported band must itself be honest about the sample request.
        prop_assert!(lo_bound >= delta - 1e-12);
        prop_assert!(hi_bound <= upper + 1e-12);
    }

    /// The two-block family puts its midpoint exactly at the requested y.
    #[test]
    fn two_block_midpoint_is_exact(y in 0.001f64..0.999) {
        let v = Valuation::two_block(y).unwrap();
        prop_assert_eq!(v.midpoint(), y);
        prop_assert_eq!(v.cumulative(y).unwrap(), 0.5);
    }
}

/// The vanishing-density cumulative is continuous where its density blows
/// up: approaching 1/2 from above changes the value by a vanishing amount.
#[test]
fn vanishing_density_is_continuous_at_half() {
    let v = Valuation::VanishingDensity;
    assert_eq!(v.cumulative(0.5).unwrap(), 0.5);
    let above = v.cumulative(0.5 + 1e-9).unwrap();
    assert!(
        (above - 0.5).abs() < 1e-6,
        "jump of {} just above the midpoint",
        (above - 0.5).abs()
    );
    // And from below it is linear, hence exactly continuous.
    assert!((v.cumulative(0.5 - 1e-9).unwrap() - 0.5).abs() < 1e-8);
}
