//! Player value measures over the cake `[0, 1]`.
//!
//! A valuation assigns every subinterval a nonnegative value, with the whole
//! cake worth exactly 1. Three closed-form families are supported; every
//! strategy in the crate only ever needs cumulative values and their
//! inverses, so all queries are evaluated exactly rather than by quadrature.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two piecewise densities whose integrals differ by at most this much from 1
/// are accepted and rescaled; anything further off is rejected as a typo.
const TOTAL_MASS_TOL: f64 = 1e-9;

/// Tie tolerance for Bob's indifference when computing the Stackelberg value.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ValuationError {
    #[error("point {0} lies outside the cake [0, 1]")]
    OutOfRange(f64),
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("interval [{0}, {1}] has zero measure")]
    DegenerateInterval(f64, f64),
    #[error("invalid valuation: {0}")]
    Invalid(String),
}

/// A value measure over `[0, 1]`, normalized so the whole cake is worth 1.
///
/// `Piecewise` covers step densities (the workhorse for random instances and
/// bounded-density theory). `TwoBlock` is the two-slab density with midpoint
/// exactly `y`. `VanishingDensity` is the analytic special whose density is
/// strictly positive yet has no positive lower bound: the cumulative value is
/// `x` up to 1/2 and `1/2 + 2^(-1/(2x-1))` beyond, so the density decays to
/// zero as the cut approaches 1/2 from above.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawValuation", into = "RawValuation")]
pub enum Valuation {
    Piecewise {
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
    },
    TwoBlock {
        y: f64,
    },
    VanishingDensity,
}

/// Serialized shape: `{"kind": "piecewise", ...}`, `{"kind": "two-block", "y": ...}`,
/// or `{"kind": "remark-unbounded"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum RawValuation {
    #[serde(rename = "piecewise")]
    Piecewise {
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
    },
    #[serde(rename = "two-block")]
    TwoBlock { y: f64 },
    #[serde(rename = "remark-unbounded")]
    VanishingDensity,
}

impl TryFrom<RawValuation> for Valuation {
    type Error = ValuationError;

    fn try_from(raw: RawValuation) -> Result<Self, Self::Error> {
        match raw {
            RawValuation::Piecewise {
                breakpoints,
                densities,
            } => Valuation::piecewise(breakpoints, densities),
            RawValuation::TwoBlock { y } => Valuation::two_block(y),
            RawValuation::VanishingDensity => Ok(Valuation::VanishingDensity),
        }
    }
}

impl From<Valuation> for RawValuation {
    fn from(v: Valuation) -> Self {
        match v {
            Valuation::Piecewise {
                breakpoints,
                densities,
            } => RawValuation::Piecewise {
                breakpoints,
                densities,
            },
            Valuation::TwoBlock { y } => RawValuation::TwoBlock { y },
            Valuation::VanishingDensity => RawValuation::VanishingDensity,
        }
    }
}

impl Valuation {
    /// Step density over `breakpoints`, rescaled to total mass 1 when the
    /// given densities integrate to within 1e-9 of 1.
    pub fn piecewise(
        breakpoints: Vec<f64>,
        mut densities: Vec<f64>,
    ) -> Result<Self, ValuationError> {
        if breakpoints.len() < 2 {
            return Err(ValuationError::Invalid(
                "piecewise needs at least two breakpoints".into(),
            ));
        }
        if densities.len() != breakpoints.len() - 1 {
            return Err(ValuationError::Invalid(format!(
                "{} breakpoints require {} densities, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                densities.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || densities.iter().any(|d| !d.is_finite()) {
            return Err(ValuationError::Invalid("non-finite entry".into()));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(ValuationError::Invalid(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ValuationError::Invalid(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if densities.iter().any(|&d| d < 0.0) {
            return Err(ValuationError::Invalid("negative density".into()));
        }
        let total: f64 = breakpoints
            .windows(2)
            .zip(&densities)
            .map(|(w, d)| d * (w[1] - w[0]))
            .sum();
        if (total - 1.0).abs() > TOTAL_MASS_TOL {
            return Err(ValuationError::Invalid(format!(
                "densities integrate to {total}, not 1"
            )));
        }
        for d in &mut densities {
            *d /= total;
        }
        Ok(Valuation::Piecewise {
            breakpoints,
            densities,
        })
    }

    /// Uniform density: every interval is worth its length.
    pub fn uniform() -> Self {
        Valuation::Piecewise {
            breakpoints: vec![0.0, 1.0],
            densities: vec![1.0],
        }
    }

    /// Density `1/(2y)` on `[0, y]` and `1/(2(1-y))` on `(y, 1]`; the midpoint
    /// is exactly `y`.
    pub fn two_block(y: f64) -> Result<Self, ValuationError> {
        if !(y.is_finite() && 0.0 < y && y < 1.0) {
            return Err(ValuationError::Invalid(format!(
                "two-block split {y} must lie strictly inside (0, 1)"
            )));
        }
        Ok(Valuation::TwoBlock { y })
    }

    /// Value of `[0, x]`.
    pub fn cumulative(&self, x: f64) -> Result<f64, ValuationError> {
        if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
            return Err(ValuationError::OutOfRange(x));
        }
        Ok(match self {
            Valuation::Piecewise {
                breakpoints,
                densities,
            } => {
                let mut acc = 0.0;
                for (w, d) in breakpoints.windows(2).zip(densities) {
                    if x >= w[1] {
                        acc += d * (w[1] - w[0]);
                    } else {
                        if x > w[0] {
                            acc += d * (x - w[0]);
                        }
                        break;
                    }
                }
                acc
            }
            Valuation::TwoBlock { y } => {
                if x <= *y {
                    x / (2.0 * y)
                } else {
                    0.5 + (x - y) / (2.0 * (1.0 - y))
                }
            }
            Valuation::VanishingDensity => {
                if x <= 0.5 {
                    x
                } else {
                    0.5 + (-1.0 / (2.0 * x - 1.0)).exp2()
                }
            }
        })
    }

    /// Value of `[lo, hi]`. Additive: atoms are worth zero.
    pub fn interval_value(&self, lo: f64, hi: f64) -> Result<f64, ValuationError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(ValuationError::BadInterval(lo, hi));
        }
        Ok((self.cumulative(hi)? - self.cumulative(lo)?).max(0.0))
    }

    /// Leftmost `x` in `[lo, hi]` with `V([lo, x]) = frac * V([lo, hi])`.
    ///
    /// Exact inversion: linear interpolation within a step-density segment,
    /// closed-form inverses for the analytic kinds. When a zero-density
    /// plateau makes the solution set an interval, its leftmost point is
    /// returned.
    pub fn point_at_value(&self, lo: f64, hi: f64, frac: f64) -> Result<f64, ValuationError> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(ValuationError::BadInterval(lo, hi));
        }
        if !(frac.is_finite() && (0.0..=1.0).contains(&frac)) {
            return Err(ValuationError::OutOfRange(frac));
        }
        let base = self.cumulative(lo)?;
        let width = self.cumulative(hi)? - base;
        if width <= 0.0 {
            return Err(ValuationError::DegenerateInterval(lo, hi));
        }
        let target = base + frac * width;
        let x = match self {
            Valuation::Piecewise {
                breakpoints,
                densities,
            } => {
                // Leftmost preimage of `target` under the global cumulative;
                // the first segment whose right endpoint reaches the target
                // must have positive density, which pins the point uniquely.
                let mut acc = 0.0;
                let mut x = *breakpoints.last().unwrap();
                for (w, d) in breakpoints.windows(2).zip(densities) {
                    let next = acc + d * (w[1] - w[0]);
                    if next >= target {
                        x = if *d > 0.0 {
                            (w[0] + (target - acc) / d).min(w[1])
                        } else {
                            w[0]
                        };
                        break;
                    }
                    acc = next;
                }
                x
            }
            Valuation::TwoBlock { y } => {
                if target <= 0.5 {
                    2.0 * y * target
                } else {
                    y + (target - 0.5) * 2.0 * (1.0 - y)
                }
            }
            Valuation::VanishingDensity => {
                if target <= 0.5 {
                    target
                } else {
                    // Solve 2^(-1/(2x-1)) = target - 1/2 for x > 1/2.
                    0.5 - 1.0 / (2.0 * (target - 0.5).log2())
                }
            }
        };
        Ok(x.max(lo).min(hi))
    }

    /// The point where the cumulative value reaches 1/2; leftmost such point
    /// if a zero-density plateau makes it non-unique.
    pub fn midpoint(&self) -> f64 {
        match self {
            Valuation::TwoBlock { y } => *y,
            Valuation::VanishingDensity => 0.5,
            Valuation::Piecewise { .. } => self
                .point_at_value(0.0, 1.0, 0.5)
                .expect("whole cake has measure 1"),
        }
    }

    /// Greatest `d` with density >= `d` everywhere, or `None` when the density
    /// has no positive lower bound (the vanishing-density kind).
    pub fn density_lower_bound(&self) -> Option<f64> {
        match self {
            Valuation::Piecewise { densities, .. } => densities.iter().cloned().reduce(f64::min),
            Valuation::TwoBlock { y } => Some((1.0 / (2.0 * y)).min(1.0 / (2.0 * (1.0 - y)))),
            Valuation::VanishingDensity => None,
        }
    }

    /// Least `d` with density <= `d` everywhere.
    pub fn density_upper_bound(&self) -> f64 {
        match self {
            Valuation::Piecewise { densities, .. } => densities.iter().cloned().fold(0.0, f64::max),
            Valuation::TwoBlock { y } => (1.0 / (2.0 * y)).max(1.0 / (2.0 * (1.0 - y))),
            // sup of d/dx 2^(-1/(2x-1)), attained at 2x-1 = ln(2)/2
            Valuation::VanishingDensity => 8.0 * (-2.0f64).exp() / std::f64::consts::LN_2,
        }
    }
}

/// Alice's per-round payoff when she cuts at Bob's midpoint and Bob takes his
/// preferred piece, ties broken in Alice's favor.
pub fn stackelberg_value(v_alice: &Valuation, v_bob: &Valuation) -> f64 {
    let m = v_bob.midpoint();
    let bob_left = v_bob.cumulative(m).expect("midpoint is in range");
    let alice_left = v_alice.cumulative(m).expect("midpoint is in range");
    let alice_right = 1.0 - alice_left;
    if (bob_left - 0.5).abs() <= TIE_TOL {
        alice_left.max(alice_right)
    } else if bob_left > 0.5 {
        // Bob strictly prefers the left piece, Alice gets the right.
        alice_right
    } else {
        alice_left
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn halves() -> Valuation {
        // density 3/2 on [0, 1/2], 1/2 on [1/2, 1]
        Valuation::piecewise(vec![0.0, 0.5, 1.0], vec![1.5, 0.5]).unwrap()
    }

    #[test]
    fn uniform_cumulative_is_identity() {
        let v = Valuation::uniform();
        assert_eq!(v.cumulative(0.0).unwrap(), 0.0);
        assert_eq!(v.cumulative(0.5).unwrap(), 0.5);
        assert_eq!(v.cumulative(1.0).unwrap(), 1.0);
    }

    #[test]
    fn step_density_cumulative() {
        let v = halves();
        assert_relative_eq!(v.cumulative(0.5).unwrap(), 0.75, max_relative = 1e-15);
        assert_relative_eq!(
            v.interval_value(0.5, 1.0).unwrap(),
            0.25,
            max_relative = 1e-15
        );
        assert_eq!(v.interval_value(0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn uniform_interval_value() {
        let v = Valuation::uniform();
        assert_relative_eq!(
            v.interval_value(0.2, 0.8).unwrap(),
            0.6,
            max_relative = 1e-15
        );
    }

    #[test]
    fn inverse_on_step_density() {
        let v = halves();
        assert_relative_eq!(
            v.point_at_value(0.0, 1.0, 0.5).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-14
        );
        assert_eq!(v.midpoint(), v.point_at_value(0.0, 1.0, 0.5).unwrap());
    }

    #[test]
    fn inverse_interpolates_within_subinterval() {
        let v = Valuation::uniform();
        assert_relative_eq!(
            v.point_at_value(0.2, 0.8, 1.0 / 6.0).unwrap(),
            0.3,
            max_relative = 1e-14
        );
        assert_eq!(v.point_at_value(0.0, 1.0, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn inverse_returns_leftmost_plateau_point() {
        // zero-density hole on [0.2, 0.6]
        let v = Valuation::piecewise(vec![0.0, 0.2, 0.6, 1.0], vec![2.5, 0.0, 1.25]).unwrap();
        assert_relative_eq!(
            v.point_at_value(0.0, 1.0, 0.5).unwrap(),
            0.2,
            max_relative = 1e-15
        );
        assert_eq!(v.midpoint(), v.point_at_value(0.0, 1.0, 0.5).unwrap());
        // a zero-measure query interval is degenerate
        assert!(matches!(
            v.point_at_value(0.25, 0.55, 0.5),
            Err(ValuationError::DegenerateInterval(_, _))
        ));
    }

    #[test]
    fn two_block_midpoint_is_exact() {
        for y in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let v = Valuation::two_block(y).unwrap();
            assert_eq!(v.midpoint(), y);
            assert_eq!(v.cumulative(y).unwrap(), 0.5);
            assert_relative_eq!(v.cumulative(1.0).unwrap(), 1.0, max_relative = 1e-15);
        }
        let v = Valuation::two_block(0.7).unwrap();
        assert_relative_eq!(v.density_upper_bound(), 1.0 / 0.6, max_relative = 1e-15);
        assert_relative_eq!(
            v.density_lower_bound().unwrap(),
            1.0 / 1.4,
            max_relative = 1e-15
        );
    }

    #[test]
    fn vanishing_density_closed_form() {
        let v = Valuation::VanishingDensity;
        assert_eq!(v.cumulative(0.5).unwrap(), 0.5);
        assert_eq!(v.cumulative(0.25).unwrap(), 0.25);
        assert_eq!(v.cumulative(1.0).unwrap(), 1.0); // 1/2 + 2^(-1)
        assert_relative_eq!(
            v.cumulative(0.75).unwrap(),
            0.5 + 0.25,
            max_relative = 1e-15
        );
        // continuity at the split: the tail 2^(-1/(2x-1)) collapses fast
        assert!((v.cumulative(0.5 + 1e-9).unwrap() - 0.5).abs() < 1e-6);
        assert_eq!(v.midpoint(), 0.5);
        assert!(v.density_lower_bound().is_none());
        assert_relative_eq!(
            v.density_upper_bound(),
            8.0 * (-2.0f64).exp() / std::f64::consts::LN_2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn vanishing_density_inverse_round_trip() {
        let v = Valuation::VanishingDensity;
        for frac in [0.1, 0.5, 0.6, 0.9, 0.99] {
            let x = v.point_at_value(0.0, 1.0, frac).unwrap();
            assert_relative_eq!(v.cumulative(x).unwrap(), frac, max_relative = 1e-12);
        }
    }

    #[test]
    fn stackelberg_examples() {
        let u = Valuation::uniform();
        let h = halves();
        assert_eq!(stackelberg_value(&u, &u), 0.5);
        // Bob's midpoint is 1/3 and he is exactly indifferent there, so Alice
        // keeps the larger side [1/3, 1].
        assert_relative_eq!(stackelberg_value(&u, &h), 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(stackelberg_value(&h, &u), 0.75, max_relative = 1e-14);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(Valuation::piecewise(vec![0.0, 1.0], vec![0.5]).is_err()); // mass 1/2
        assert!(Valuation::piecewise(vec![0.0, 0.5], vec![2.0]).is_err()); // ends at 1/2
        assert!(Valuation::piecewise(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(Valuation::piecewise(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(Valuation::two_block(0.0).is_err());
        assert!(Valuation::two_block(1.0).is_err());
        assert!(Valuation::uniform().cumulative(-0.1).is_err());
        assert!(Valuation::uniform().cumulative(1.1).is_err());
        assert!(Valuation::uniform().interval_value(0.8, 0.2).is_err());
    }

    #[test]
    fn near_unit_mass_is_rescaled() {
        let off = 1.0 + 5e-10;
        let v = Valuation::piecewise(vec![0.0, 1.0], vec![off]).unwrap();
        assert_relative_eq!(v.cumulative(1.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn serde_kind_tags() {
        let v: Valuation = serde_json::from_str(
            r#"{"kind":"piecewise","breakpoints":[0,0.5,1],"densities":[1.5,0.5]}"#,
        )
        .unwrap();
        assert_relative_eq!(v.cumulative(0.5).unwrap(), 0.75, max_relative = 1e-15);
        let v: Valuation = serde_json::from_str(r#"{"kind":"two-block","y":0.7}"#).unwrap();
        assert_eq!(v.midpoint(), 0.7);
        let v: Valuation = serde_json::from_str(r#"{"kind":"remark-unbounded"}"#).unwrap();
        assert_eq!(v.midpoint(), 0.5);
        assert!(serde_json::from_str::<Valuation>(
            r#"{"kind":"piecewise","breakpoints":[0,1],"densities":[2]}"#
        )
        .is_err());
        let round: String = serde_json::to_string(&Valuation::two_block(0.7).unwrap()).unwrap();
        assert!(round.contains("two-block"));
    }
}
