//! Equitable play against an unknown opponent by average-payoff balancing.
//!
//! Alice cannot see Bob's valuation, so she tracks a finite family of
//! candidate valuations: every piecewise-constant density with integer
//! weights at resolutions `1..=n_max`, plus her own valuation as one extra
//! coordinate at resolution 2. For each candidate she maintains the running
//! average of the centered payoff Bob would have earned if that candidate
//! were his true valuation. Each round she cuts where the positively
//! violated averages balance out, which drives every average toward zero or
//! below at a `1/t` rate. No Bob type can then keep more than half the cake
//! per round in the long run, and the own-valuation coordinate symmetrically
//! keeps Alice's own share from collapsing.

use thiserror::Error;

use crate::engine::Choice;
use crate::valuation::Valuation;

/// Hard cap on the grid resolution; the family size grows like `4^n`.
pub const MAX_RESOLUTION: usize = 12;
/// Minimum resolution: the own-valuation coordinate lives at resolution 2,
/// and without it the scheme loses its guarantee for Alice's own payoff.
pub const MIN_RESOLUTION: usize = 2;

const MAX_BISECT: usize = 200;

#[derive(Debug, Error)]
pub enum BlackwellError {
    #[error("resolution {0} exceeds the hard cap {MAX_RESOLUTION}")]
    ResolutionTooHigh(usize),
    #[error(
        "resolution {0} is below {MIN_RESOLUTION}; the own-valuation coordinate would be dropped"
    )]
    DepthTooShallow(usize),
    #[error("no cut with response magnitude within tolerance after {0} bisection steps")]
    RootFindingFailed(usize),
}

/// A valuation with constant density `d_i` on each of `n` equal segments,
/// where the `d_i` are nonnegative integers summing to `n` (so the total
/// mass is 1 and every density is a multiple of 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridValuation {
    composition: Vec<u32>,
}

impl GridValuation {
    pub fn new(composition: Vec<u32>) -> Self {
        let n = composition.len();
        assert!(n >= 1, "empty composition");
        let total: u32 = composition.iter().sum();
        assert_eq!(total as usize, n, "densities must sum to the resolution");
        GridValuation { composition }
    }

    pub fn resolution(&self) -> usize {
        self.composition.len()
    }

    pub fn composition(&self) -> &[u32] {
        &self.composition
    }

    /// Measure of `[0, x]`; piecewise linear with knots at multiples of 1/n.
    pub fn cumulative(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        let n = self.composition.len();
        let nf = n as f64;
        let i = ((x * nf).floor() as usize).min(n - 1);
        let prefix: u32 = self.composition[..i].iter().sum();
        (prefix as f64 + (x * nf - i as f64) * self.composition[i] as f64) / nf
    }

    /// Stable label, e.g. `n3:2.1.0`.
    pub fn id(&self) -> String {
        let parts: Vec<String> = self.composition.iter().map(|d| d.to_string()).collect();
        format!("n{}:{}", self.composition.len(), parts.join("."))
    }
}

/// All grid valuations at resolution `n`, in ascending lexicographic order
/// of their density vectors.
pub fn enumerate_grid(n: usize) -> Vec<GridValuation> {
    fn rec(slots: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<GridValuation>) {
        if slots == 1 {
            prefix.push(left);
            out.push(GridValuation::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for d in 0..=left {
            prefix.push(d);
            rec(slots - 1, left - d, prefix, out);
            prefix.pop();
        }
    }
    assert!(n >= 1);
    let mut out = Vec::new();
    rec(n, n as u32, &mut Vec::new(), &mut out);
    out
}

enum CoordKind {
    Grid(GridValuation),
    /// Alice's own valuation, tracked so the scheme protects her payoff too.
    Own(Valuation),
}

struct CoordEntry {
    id: String,
    weight: f64,
    kind: CoordKind,
}

impl CoordEntry {
    fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            CoordKind::Grid(g) => g.cumulative(x),
            CoordKind::Own(v) => v.cumulative(x).expect("cut validated by the engine"),
        }
    }
}

/// The indexed coordinate family: resolutions `1..=n_max`, each resolution's
/// coordinates sharing the weight `1 / (2^n * family_size_n)`, with Alice's
/// own valuation (id `fA`) appended to resolution 2.
pub struct CoordinateSet {
    entries: Vec<CoordEntry>,
}

impl CoordinateSet {
    pub fn up_to(v_alice: &Valuation, n_max: usize) -> Result<Self, BlackwellError> {
        if n_max > MAX_RESOLUTION {
            return Err(BlackwellError::ResolutionTooHigh(n_max));
        }
        if n_max < MIN_RESOLUTION {
            return Err(BlackwellError::DepthTooShallow(n_max));
        }
        let mut entries = Vec::new();
        for n in 1..=n_max {
            let grid = enumerate_grid(n);
            let family_size = grid.len() + usize::from(n == 2);
            let weight = 1.0 / (2f64.powi(n as i32) * family_size as f64);
            for g in grid {
                entries.push(CoordEntry {
                    id: g.id(),
                    weight,
                    kind: CoordKind::Grid(g),
                });
            }
            if n == 2 {
                entries.push(CoordEntry {
                    id: "fA".to_string(),
                    weight,
                    kind: CoordKind::Own(v_alice.clone()),
                });
            }
        }
        Ok(CoordinateSet { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.entries[i].id
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.entries[i].weight
    }

    pub fn eval(&self, i: usize, x: f64) -> f64 {
        self.entries[i].eval(x)
    }

    /// The payoff direction of a cut at `x`: per coordinate, the centered
    /// value of the left piece, `V([0, x]) - 1/2`.
    pub fn direction_at(&self, x: f64) -> Vec<f64> {
        self.entries.iter().map(|e| e.eval(x) - 0.5).collect()
    }
}

/// The weighted inner product over coordinate maps. Coordinates are bounded
/// by 1 in absolute value and the weights sum to below 1, so the product is
/// always in `[-1, 1]`; it is symmetric, additive, homogeneous under scalars
/// in `[-1, 1]`, and positive definite.
pub fn inner_product(x: &[f64], y: &[f64], set: &CoordinateSet) -> f64 {
    assert_eq!(x.len(), set.len());
    assert_eq!(y.len(), set.len());
    set.entries
        .iter()
        .zip(x)
        .zip(y)
        // Grouping the coordinate product first keeps the result exactly
        // symmetric in its arguments.
        .map(|((e, &a), &b)| e.weight * (a * b))
        .sum()
}

/// One diagnostics row per observed round.
#[derive(Debug, Clone)]
pub struct DeltaRow {
    pub t: usize,
    pub delta_t: f64,
    pub cut_t: f64,
    /// Coordinate with the largest running average, ties to enumeration order.
    pub max_coordinate_id: String,
    pub max_ubar: f64,
}

/// Running state of the balancing strategy: per-coordinate averages of the
/// centered payoff Bob would have received, and the squared size `delta` of
/// their positive part.
pub struct BlackwellState {
    set: CoordinateSet,
    ubar: Vec<f64>,
    t: usize,
    delta: f64,
}

impl BlackwellState {
    pub fn new(v_alice: Valuation, n_max: usize) -> Result<Self, BlackwellError> {
        let set = CoordinateSet::up_to(&v_alice, n_max)?;
        let len = set.len();
        Ok(BlackwellState {
            set,
            ubar: vec![0.0; len],
            t: 0,
            delta: 0.0,
        })
    }

    pub fn coordinate_set(&self) -> &CoordinateSet {
        &self.set
    }

    /// Rounds observed so far.
    pub fn rounds(&self) -> usize {
        self.t
    }

    /// Weighted squared size of the positive part of the averages; the
    /// quantity the strategy drives to zero like `1/t`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ubar_of(&self, id: &str) -> Option<f64> {
        self.set
            .entries
            .iter()
            .position(|e| e.id == id)
            .map(|i| self.ubar[i])
    }

    /// Positive part of the running averages, coordinate by coordinate.
    pub fn positive_part(&self) -> Vec<f64> {
        self.ubar.iter().map(|&u| u.max(0.0)).collect()
    }

    /// The balance function whose root is the round's cut: the inner product
    /// of the cut's payoff direction with the positive part of the averages.
    /// Nondecreasing in `x`, nonpositive at 0 and nonnegative at 1.
    pub fn response_value(&self, x: f64) -> f64 {
        self.set
            .entries
            .iter()
            .zip(&self.ubar)
            .map(|(e, &u)| e.weight * u.max(0.0) * (e.eval(x) - 0.5))
            .sum()
    }

    /// The round's cut: a root of the balance function, found by bisection
    /// to `|response| <= eps`. With no positively violated coordinate any
    /// cut works and the midpoint 1/2 is returned.
    pub fn find_root_cut(&self, eps: f64) -> Result<f64, BlackwellError> {
        let total: f64 = self
            .set
            .entries
            .iter()
            .zip(&self.ubar)
            .map(|(e, &u)| e.weight * u.max(0.0))
            .sum();
        if total == 0.0 {
            return Ok(0.5);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..MAX_BISECT {
            let mid = 0.5 * (lo + hi);
            let g = self.response_value(mid);
            if g.abs() <= eps {
                return Ok(mid);
            }
            if g < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(BlackwellError::RootFindingFailed(MAX_BISECT))
    }

    /// Folds one round into the averages: the payoff each candidate Bob
    /// would have received from this cut and choice, centered at 1/2.
    pub fn observe_round(&mut self, cut: f64, choice: Choice) {
        self.t += 1;
        let t = self.t as f64;
        let mut delta = 0.0;
        for (e, u) in self.set.entries.iter().zip(self.ubar.iter_mut()) {
            let left = e.eval(cut);
            let payoff = match choice {
                Choice::L => left,
                Choice::R => 1.0 - left,
            };
            *u = ((t - 1.0) * *u + (payoff - 0.5)) / t;
            let pos = u.max(0.0);
            delta += e.weight * pos * pos;
        }
        self.delta = delta;
    }

    pub fn delta_row(&self, cut: f64) -> DeltaRow {
        let mut best = 0usize;
        for i in 1..self.ubar.len() {
            if self.ubar[i] > self.ubar[best] {
                best = i;
            }
        }
        DeltaRow {
            t: self.t,
            delta_t: self.delta,
            cut_t: cut,
            max_coordinate_id: self.set.entries[best].id.clone(),
            max_ubar: self.ubar[best],
        }
    }
}

/// Snaps an arbitrary valuation onto the resolution-`n` grid by rounding
/// `n * V(i/n)` half-up at every knot. The result differs from the input by
/// at most `(density_upper_bound + 2) / n` in sup norm.
pub fn nearest_grid(v: &Valuation, n: usize) -> GridValuation {
    assert!((1..=MAX_RESOLUTION).contains(&n));
    let round_half_up = |x: f64| (x + 0.5).floor();
    let mut composition = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 1..=n {
        let knot = v
            .cumulative(i as f64 / n as f64)
            .expect("grid knots lie inside the cake");
        let here = round_half_up(n as f64 * knot);
        composition.push((here - prev) as u32);
        prev = here;
    }
    GridValuation::new(composition)
}

/// The ceiling the averaging recursion puts on `delta_t` for `t >= 2`:
/// `(1 / (t (t - 1))) * sum_{i=2}^t (i - 1) / i`, which never exceeds `1/t`.
pub fn delta_ceiling(t: usize) -> f64 {
    assert!(t >= 2);
    let sum: f64 = (2..=t).map(|i| (i as f64 - 1.0) / i as f64).sum();
    sum / (t as f64 * (t as f64 - 1.0))
}
