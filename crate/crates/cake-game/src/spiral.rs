//! Phase-space diagnostics for mutual fictitious play.
//!
//! A completed history induces three sequences indexed by round (with a
//! fake round 0 at the origin): the pick balance `alpha` (Bob's R-count
//! minus L-count), the left-piece value balance `beta` (cumulative
//! `2 V_B([0, a_i]) - 1`), and the L1 radius `rho = |alpha| + |beta|`.
//! Under fictitious play on both sides the trajectory spirals outward
//! around the origin, and the radius growth rate caps both players'
//! distance from the 1/2-per-round split. The checks in this module
//! verify those guarantees on concrete runs; on histories produced by
//! other strategy pairs they are marked as fictitious-play-only, since
//! nothing forces them to hold there.

use crate::engine::{Choice, History};
use crate::valuation::Valuation;

/// Sign changes of `beta` are detected with this slack: the balance is a
/// float sum, and a value this close to zero is treated as exactly zero.
pub const BETA_SIGN_TOL: f64 = 1e-12;

/// Slack for the lemma checks, covering accumulated rounding in `beta`
/// and the payoff sums.
const CHECK_TOL: f64 = 1e-9;

/// `2 V_B([0, a]) - 1`: one round's contribution to the balance `beta`.
///
/// Fictitious-play Bob tracks its balance through this same function, so
/// recomputing the series from a stored history reproduces the values the
/// strategy saw, bit for bit.
pub fn beta_increment(v_bob: &Valuation, cut: f64) -> f64 {
    2.0 * v_bob.cumulative(cut).expect("cut validated by the engine") - 1.0
}

/// sign with a dead zone of `BETA_SIGN_TOL` around zero
fn beta_sign(x: f64) -> i8 {
    if x > BETA_SIGN_TOL {
        1
    } else if x < -BETA_SIGN_TOL {
        -1
    } else {
        0
    }
}

/// The three diagnostic sequences for rounds `0..=T`, plus the rounds
/// classified as axis-crossing: those with `alpha_t = 0`, or where `beta`
/// changes sign going into round `t + 1`.
///
/// At `t = T` the look-ahead is unavailable, so only the `alpha`
/// condition can classify the final round.
#[derive(Debug, Clone)]
pub struct SpiralSeries {
    pub alpha: Vec<i64>,
    pub beta: Vec<f64>,
    pub rho: Vec<f64>,
    /// Ascending round indices in `0..=T`.
    pub axis_crossings: Vec<usize>,
}

impl SpiralSeries {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the fake round 0
    }

    pub fn is_axis_crossing(&self, t: usize) -> bool {
        self.axis_crossings.binary_search(&t).is_ok()
    }
}

/// Replays a history into the full diagnostic series.
pub fn compute_series(h: &History, v_bob: &Valuation) -> SpiralSeries {
    let t_end = h.len();
    let mut alpha = Vec::with_capacity(t_end + 1);
    let mut beta = Vec::with_capacity(t_end + 1);
    alpha.push(0i64);
    beta.push(0.0f64);
    for t in 1..=t_end {
        let da = match h.choices[t - 1] {
            Choice::R => 1,
            Choice::L => -1,
        };
        alpha.push(alpha[t - 1] + da);
        beta.push(beta[t - 1] + beta_increment(v_bob, h.cuts[t - 1]));
    }
    let rho: Vec<f64> = alpha
        .iter()
        .zip(&beta)
        .map(|(&a, &b)| a.unsigned_abs() as f64 + b.abs())
        .collect();
    let axis_crossings = (0..=t_end)
        .filter(|&t| {
            if alpha[t] == 0 {
                return true;
            }
            if t == t_end {
                return false; // no look-ahead past the horizon
            }
            let now = beta_sign(beta[t]);
            let next = beta_sign(beta[t + 1]);
            (next > 0 && now <= 0) || (next < 0 && now >= 0)
        })
        .collect();
    SpiralSeries {
        alpha,
        beta,
        rho,
        axis_crossings,
    }
}

/// One invariant's verdict.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Guaranteed only for histories generated by fictitious play on both
    /// sides; informative elsewhere.
    pub fp_only: bool,
    pub passed: bool,
    /// First violation, or the reason the check was not asserted.
    pub detail: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SpiralReport {
    pub checks: Vec<CheckOutcome>,
}

impl SpiralReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_names(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }
}

/// Checks every radius invariant on a computed series.
///
/// The verdicts: `radius-monotone` (rho never shrinks, stays put off
/// crossings, grows by at most 2 on them), `radius-floor` (rho is 0 at
/// round 0 and at least 1 afterwards), `crossing-spacing` (consecutive
/// crossings `t - 1` and `tau` satisfy `rho_t - 2 <= tau - t <= rho_t`),
/// `payoff-envelope` (`|sum(2 u_B - 1)| <= rho_t` for every prefix),
/// `terminal-radius` (`rho_T <= 2 sqrt(10 T)`, asserted for `T >= 5`),
/// and `middle-cut-count` (fewer than `sqrt(10 T)` cuts strictly inside
/// the cake, asserted for `T >= 5`).
pub fn check_spiral_invariants(s: &SpiralSeries, h: &History) -> SpiralReport {
    let t_end = h.len();
    assert_eq!(s.len(), t_end + 1, "series and history disagree on T");
    let mut checks = Vec::new();

    let mut detail = None;
    for t in 0..t_end {
        let ok = if s.is_axis_crossing(t) {
            s.rho[t + 1] >= s.rho[t] - CHECK_TOL && s.rho[t + 1] <= s.rho[t] + 2.0 + CHECK_TOL
        } else {
            (s.rho[t + 1] - s.rho[t]).abs() <= CHECK_TOL
        };
        if !ok {
            detail = Some(format!(
                "rho[{}] = {:.6} -> rho[{}] = {:.6}, crossing = {}",
                t,
                s.rho[t],
                t + 1,
                s.rho[t + 1],
                s.is_axis_crossing(t)
            ));
            break;
        }
    }
    checks.push(CheckOutcome {
        name: "radius-monotone",
        fp_only: true,
        passed: detail.is_none(),
        detail,
    });

    let mut detail = None;
    if s.rho[0] != 0.0 {
        detail = Some(format!("rho[0] = {:.6}", s.rho[0]));
    } else if let Some(t) = (1..=t_end).find(|&t| s.rho[t] < 1.0 - CHECK_TOL) {
        detail = Some(format!("rho[{}] = {:.6} < 1", t, s.rho[t]));
    }
    checks.push(CheckOutcome {
        name: "radius-floor",
        fp_only: true,
        passed: detail.is_none(),
        detail,
    });

    let mut detail = None;
    for w in s.axis_crossings.windows(2) {
        let (prev, next) = (w[0], w[1]);
        // prev and next are consecutive crossings, so with t = prev + 1
        // the spacing law reads rho[t] - 2 <= next - t <= rho[t]; note
        // t <= next <= T keeps the index in range.
        let spacing = (next - prev - 1) as f64;
        let r = s.rho[prev + 1];
        if spacing < r - 2.0 - CHECK_TOL || spacing > r + CHECK_TOL {
            detail = Some(format!(
                "crossings at {} and {}: spacing {} outside [{:.6}, {:.6}]",
                prev,
                next,
                spacing,
                r - 2.0,
                r
            ));
            break;
        }
    }
    checks.push(CheckOutcome {
        name: "crossing-spacing",
        fp_only: true,
        passed: detail.is_none(),
        detail,
    });

    let mut detail = None;
    let mut centered = 0.0;
    for t in 1..=t_end {
        centered += 2.0 * h.bob_payoffs[t - 1] - 1.0;
        if centered.abs() > s.rho[t] + CHECK_TOL {
            detail = Some(format!(
                "|sum(2u_B - 1)| = {:.6} > rho[{}] = {:.6}",
                centered.abs(),
                t,
                s.rho[t]
            ));
            break;
        }
    }
    checks.push(CheckOutcome {
        name: "payoff-envelope",
        fp_only: true,
        passed: detail.is_none(),
        detail,
    });

    let limit = 2.0 * (10.0 * t_end as f64).sqrt();
    let (passed, detail) = if t_end < 5 {
        (true, Some("not asserted: T < 5".to_string()))
    } else if s.rho[t_end] <= limit + CHECK_TOL {
        (true, None)
    } else {
        (
            false,
            Some(format!("rho[T] = {:.6} > {:.6}", s.rho[t_end], limit)),
        )
    };
    checks.push(CheckOutcome {
        name: "terminal-radius",
        fp_only: true,
        passed,
        detail,
    });

    let middle = middle_cut_count(h);
    let limit = (10.0 * t_end as f64).sqrt();
    let (passed, detail) = if t_end < 5 {
        (true, Some("not asserted: T < 5".to_string()))
    } else if (middle as f64) < limit + CHECK_TOL {
        (true, None)
    } else {
        (
            false,
            Some(format!("{} middle cuts, limit {:.6}", middle, limit)),
        )
    };
    checks.push(CheckOutcome {
        name: "middle-cut-count",
        fp_only: true,
        passed,
        detail,
    });

    SpiralReport { checks }
}

/// Rounds whose cut lies strictly inside the cake. Under fictitious play
/// these are the only rounds that can waste welfare.
pub fn middle_cut_count(h: &History) -> usize {
    h.cuts.iter().filter(|&&a| a > 0.0 && a < 1.0).count()
}

/// Convergence summary for a completed run: how far each player's total
/// sits from the even split, in units of `sqrt(T)`.
#[derive(Debug, Clone)]
pub struct PayoffBounds {
    pub t_rounds: usize,
    /// `(sum u_B - T/2) / sqrt(T)`; within `[-sqrt(10), sqrt(10)]`.
    pub bob_payoff_drift: f64,
    /// `(sum u_A + sum u_B - T) / sqrt(T)`; within `[-sqrt(10), sqrt(10)]`.
    pub welfare_drift: f64,
    /// `|u_A/T - 1/2| * sqrt(T)`; at most `2 sqrt(10)`.
    pub alice_avg_gap: f64,
    /// `|u_B/T - 1/2| * sqrt(T)`; at most `sqrt(10)`.
    pub bob_avg_gap: f64,
    pub middle_cut_count: usize,
    /// `sqrt(10 T)`, the strict ceiling on middle cuts.
    pub middle_cut_limit: f64,
    /// `rho_T / (2 sqrt(10 T))`; at most 1.
    pub terminal_radius_ratio: f64,
    /// The guarantees hold for `T >= 5`; below that nothing is asserted.
    pub applicable: bool,
    /// Names of the quantities that exceed their constants (empty when
    /// not applicable).
    pub exceedances: Vec<&'static str>,
}

impl PayoffBounds {
    pub fn all_within(&self) -> bool {
        self.exceedances.is_empty()
    }
}

/// Measures a run against the fictitious-play convergence constants.
pub fn payoff_bounds_report(h: &History, s: &SpiralSeries) -> PayoffBounds {
    let t_rounds = h.len();
    assert_eq!(s.len(), t_rounds + 1, "series and history disagree on T");
    let t = t_rounds as f64;
    let sqrt_t = t.sqrt();
    let u_a = h.total_alice();
    let u_b = h.total_bob();
    let middle = middle_cut_count(h);
    let middle_limit = (10.0 * t).sqrt();

    let mut report = PayoffBounds {
        t_rounds,
        bob_payoff_drift: (u_b - t / 2.0) / sqrt_t,
        welfare_drift: (u_a + u_b - t) / sqrt_t,
        alice_avg_gap: (u_a / t - 0.5).abs() * sqrt_t,
        bob_avg_gap: (u_b / t - 0.5).abs() * sqrt_t,
        middle_cut_count: middle,
        middle_cut_limit: middle_limit,
        terminal_radius_ratio: s.rho[t_rounds] / (2.0 * middle_limit),
        applicable: t_rounds >= 5,
        exceedances: Vec::new(),
    };
    if report.applicable {
        let sqrt10 = 10.0f64.sqrt();
        if report.bob_payoff_drift.abs() > sqrt10 + CHECK_TOL {
            report.exceedances.push("bob-payoff-drift");
        }
        if report.welfare_drift.abs() > sqrt10 + CHECK_TOL {
            report.exceedances.push("welfare-drift");
        }
        if report.alice_avg_gap > 2.0 * sqrt10 + CHECK_TOL {
            report.exceedances.push("alice-average-gap");
        }
        if report.bob_avg_gap > sqrt10 + CHECK_TOL {
            report.exceedances.push("bob-average-gap");
        }
        if (middle as f64) >= middle_limit + CHECK_TOL {
            report.exceedances.push("middle-cut-count");
        }
        if report.terminal_radius_ratio > 1.0 + CHECK_TOL {
            report.exceedances.push("terminal-radius");
        }
    }
    report
}
