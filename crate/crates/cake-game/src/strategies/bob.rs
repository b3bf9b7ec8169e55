//! Bob strategies: the truthful benchmark, three flavors of strategic lying,
//! the equitable enforcer, random play, and fictitious play.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::engine::{BobStrategy, Choice, GameMode, History};
use crate::spiral::beta_increment;
use crate::valuation::Valuation;

/// Tie rule for the truthful Bob when both pieces are worth exactly 1/2.
#[derive(Debug, Clone)]
pub enum MyopicTieBreak {
    Fixed(Choice),
    /// Concede Alice her preferred piece (needs her valuation out of band);
    /// if she is indifferent too, take the left piece.
    TowardAlice(Valuation),
    SeededRandom,
}

/// Takes the strictly better piece every round; the zero-regret benchmark.
pub struct MyopicBob {
    v: Valuation,
    tie: MyopicTieBreak,
    rng: Option<ChaCha12Rng>,
}

impl MyopicBob {
    pub fn new(v: Valuation, tie: MyopicTieBreak) -> Self {
        MyopicBob { v, tie, rng: None }
    }
}

impl BobStrategy for MyopicBob {
    fn begin(&mut self, seed: u64) {
        self.rng = Some(ChaCha12Rng::seed_from_u64(seed));
    }

    fn mode_requirement(&self) -> Option<GameMode> {
        Some(GameMode::Sequential)
    }

    fn choose(&mut self, _past: &History, current_cut: Option<f64>) -> Choice {
        let a = current_cut.expect("sequential mode delivers the cut");
        let left = self.v.interval_value(0.0, a).expect("cut validated");
        let right = self.v.interval_value(a, 1.0).expect("cut validated");
        if left > right {
            Choice::L
        } else if right > left {
            Choice::R
        } else {
            match &self.tie {
                MyopicTieBreak::Fixed(c) => *c,
                MyopicTieBreak::TowardAlice(v_alice) => {
                    let a_left = v_alice.interval_value(0.0, a).expect("cut validated");
                    let a_right = v_alice.interval_value(a, 1.0).expect("cut validated");
                    // Take the piece Alice values less, leaving her the one
                    // she prefers.
                    if a_left <= a_right {
                        Choice::L
                    } else {
                        Choice::R
                    }
                }
                MyopicTieBreak::SeededRandom => {
                    if self
                        .rng
                        .as_mut()
                        .expect("seeded before the first round")
                        .random()
                    {
                        Choice::L
                    } else {
                        Choice::R
                    }
                }
            }
        }
    }
}

/// Lies about its midpoint inside a shrinking window below it, within a fixed
/// lie budget, to drag a midpoint-hunting Alice's committed cut downward.
///
/// With exponent `alpha`, cuts inside `[m_B - T^((alpha-1)/2), m_B]` are
/// answered L (the lie, conceding the bigger right piece) until the window
/// has been hit `T^((alpha+1)/2)` times; afterwards, and everywhere outside
/// the window, play is truthful.
pub struct DeceptiveBob {
    m_b: f64,
    window_lo: f64,
    threshold: f64,
    window_hits: u64,
}

impl DeceptiveBob {
    pub fn new(v: &Valuation, alpha: f64, t_rounds: usize) -> Self {
        assert!(
            (0.0..1.0).contains(&alpha),
            "exponent {alpha} outside [0, 1)"
        );
        let t = t_rounds as f64;
        let m_b = v.midpoint();
        DeceptiveBob {
            m_b,
            window_lo: m_b - t.powf((alpha - 1.0) / 2.0),
            threshold: t.powf((alpha + 1.0) / 2.0),
            window_hits: 0,
        }
    }

    pub fn window(&self) -> (f64, f64) {
        (self.window_lo, self.m_b)
    }
}

impl BobStrategy for DeceptiveBob {
    fn mode_requirement(&self) -> Option<GameMode> {
        Some(GameMode::Sequential)
    }

    fn choose(&mut self, _past: &History, current_cut: Option<f64>) -> Choice {
        let a = current_cut.expect("sequential mode delivers the cut");
        if a > self.m_b {
            Choice::L
        } else if a < self.window_lo {
            Choice::R
        } else {
            // Window round: lie with L until the budget is spent, then be
            // honest (R is the truthful answer anywhere at or below m_B).
            let c = if (self.window_hits as f64) >= self.threshold {
                Choice::R
            } else {
                Choice::L
            };
            self.window_hits += 1;
            c
        }
    }
}

/// Plays truthful-for-a-fake-midpoint `x`, then switches to truthful for the
/// real midpoint `y` once Alice has probed the gap `(x, y]` often enough.
///
/// Both thresholds are placed by Alice's own valuation: `x` at her 2/3 point
/// and `y` at her 5/6 point, so from Alice's side the switch costs her a
/// constant fraction of value per round.
pub struct ThresholdSwitchBob {
    x: f64,
    y: f64,
    switch_after: f64,
    gap_hits: u64,
}

impl ThresholdSwitchBob {
    pub fn new(v_alice: &Valuation, r: f64, beta: f64, t_rounds: usize) -> Self {
        let x = v_alice
            .point_at_value(0.0, 1.0, 2.0 / 3.0)
            .expect("whole cake has measure 1");
        let y = v_alice
            .point_at_value(0.0, 1.0, 5.0 / 6.0)
            .expect("whole cake has measure 1");
        ThresholdSwitchBob {
            x,
            y,
            switch_after: 3.0 * r * (t_rounds as f64).powf(beta),
            gap_hits: 0,
        }
    }

    /// The companion opponent that stays truthful for midpoint `x` forever.
    pub fn honest_companion(v_alice: &Valuation) -> Self {
        let mut bob = Self::new(v_alice, 0.0, 0.0, 1);
        bob.switch_after = f64::INFINITY;
        bob
    }

    pub fn thresholds(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

impl BobStrategy for ThresholdSwitchBob {
    fn mode_requirement(&self) -> Option<GameMode> {
        Some(GameMode::Sequential)
    }

    fn choose(&mut self, _past: &History, current_cut: Option<f64>) -> Choice {
        let a = current_cut.expect("sequential mode delivers the cut");
        if a > self.x && a <= self.y {
            self.gap_hits += 1; // counts the current round
        }
        let pivot = if (self.gap_hits as f64) <= self.switch_after {
            self.x
        } else {
            self.y
        };
        if a > pivot {
            Choice::L
        } else {
            Choice::R
        }
    }
}

/// Splits the cake into `ceil(sqrt(T))` own-value-equal intervals and
/// alternates L and R per interval, denying any Alice more than half the
/// value plus a square-root term.
pub struct IntervalAlternatingBob {
    boundaries: Vec<f64>,
    counts: Vec<u64>,
}

impl IntervalAlternatingBob {
    pub fn new(v: &Valuation, t_rounds: usize) -> Self {
        let p = (t_rounds as f64).sqrt().ceil() as usize;
        let mut boundaries = Vec::with_capacity(p + 1);
        boundaries.push(0.0);
        for j in 1..p {
            boundaries.push(
                v.point_at_value(0.0, 1.0, j as f64 / p as f64)
                    .expect("whole cake has measure 1"),
            );
        }
        boundaries.push(1.0);
        IntervalAlternatingBob {
            boundaries,
            counts: vec![0; p + 1],
        }
    }

    pub fn interval_count(&self) -> usize {
        self.counts.len() - 1
    }

    /// 1-based interval index; boundary cuts land in the right neighbor, the
    /// last interval is closed.
    fn interval_of(&self, a: f64) -> usize {
        self.boundaries
            .partition_point(|&z| z <= a)
            .min(self.interval_count())
    }
}

impl BobStrategy for IntervalAlternatingBob {
    fn mode_requirement(&self) -> Option<GameMode> {
        Some(GameMode::Sequential)
    }

    fn choose(&mut self, _past: &History, current_cut: Option<f64>) -> Choice {
        let a = current_cut.expect("sequential mode delivers the cut");
        let j = self.interval_of(a);
        self.counts[j] += 1;
        if self.counts[j] % 2 == 1 {
            Choice::R
        } else {
            Choice::L
        }
    }
}

/// Fair coin each round, from the per-player seeded generator. Works in both
/// modes since it never looks at the cut.
pub struct RandomBob {
    rng: Option<ChaCha12Rng>,
}

impl RandomBob {
    #[allow(clippy::new_without_default)]
    pub fn new() -> Self {
        RandomBob { rng: None }
    }
}

impl BobStrategy for RandomBob {
    fn begin(&mut self, seed: u64) {
        self.rng = Some(ChaCha12Rng::seed_from_u64(seed));
    }

    fn choose(&mut self, _past: &History, _current_cut: Option<f64>) -> Choice {
        if self
            .rng
            .as_mut()
            .expect("seeded before the first round")
            .random()
        {
            Choice::L
        } else {
            Choice::R
        }
    }
}

/// Tie rule for fictitious-play Bob when the cumulative left-piece value
/// balance is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobTieBreak {
    Fixed(Choice),
    SeededRandom,
}

/// Best-responds to the empirical distribution of Alice's past cuts: takes L
/// when the left pieces have historically been worth more than half, R when
/// less. Defined for simultaneous play only.
pub struct FictitiousBob {
    v: Valuation,
    tie: BobTieBreak,
    beta: f64,
    rng: Option<ChaCha12Rng>,
}

impl FictitiousBob {
    pub fn new(v: Valuation, tie: BobTieBreak) -> Self {
        FictitiousBob {
            v,
            tie,
            beta: 0.0,
            rng: None,
        }
    }

    /// Cumulative `2 V_B([0, a_i]) - 1` over observed rounds.
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl BobStrategy for FictitiousBob {
    fn begin(&mut self, seed: u64) {
        self.rng = Some(ChaCha12Rng::seed_from_u64(seed));
    }

    fn mode_requirement(&self) -> Option<GameMode> {
        Some(GameMode::Simultaneous)
    }

    fn choose(&mut self, _past: &History, _current_cut: Option<f64>) -> Choice {
        if self.beta > 0.0 {
            Choice::L
        } else if self.beta < 0.0 {
            Choice::R
        } else {
            match self.tie {
                BobTieBreak::Fixed(c) => c,
                BobTieBreak::SeededRandom => {
                    if self
                        .rng
                        .as_mut()
                        .expect("seeded before the first round")
                        .random()
                    {
                        Choice::L
                    } else {
                        Choice::R
                    }
                }
            }
        }
    }

    fn observe(&mut self, cut: f64, _choice: Choice) {
        self.beta += beta_increment(&self.v, cut);
    }
}

/// Always the same piece, regardless of the cut. Works in both modes.
pub struct FixedChoiceBob {
    choice: Choice,
}

impl FixedChoiceBob {
    pub fn new(choice: Choice) -> Self {
        FixedChoiceBob { choice }
    }
}

impl BobStrategy for FixedChoiceBob {
    fn choose(&mut self, _past: &History, _current_cut: Option<f64>) -> Choice {
        self.choice
    }
}

/// Pretends its midpoint sits at `1/2 + 1/((2-2a) log2 T + 2)` instead of the
/// true one, answering truthfully for the fake midpoint every round.
///
/// Paired with the vanishing-density valuation (true midpoint 1/2, density
/// collapsing just above it), the lies are nearly free for Bob while every
/// Alice loses a `1/log T` value fraction per round.
pub struct FakeMidpointBob {
    threshold: f64,
}

impl FakeMidpointBob {
    pub fn new(alpha: f64, t_rounds: usize) -> Self {
        assert!(
            (0.0..1.0).contains(&alpha),
            "exponent {alpha} outside [0, 1)"
        );
        let q = (2.0 - 2.0 * alpha) * (t_rounds as f64).log2() + 2.0;
        FakeMidpointBob {
            threshold: 0.5 + 1.0 / q,
        }
    }

    pub fn fake_midpoint(&self) -> f64 {
        self.threshold
    }
}

impl BobStrategy for FakeMidpointBob {
    fn mode_requirement(&self) -> Option<GameMode> {
        Some(GameMode::Sequential)
    }

    fn choose(&mut self, _past: &History, current_cut: Option<f64>) -> Choice {
        let a = current_cut.expect("sequential mode delivers the cut");
        if a < self.threshold {
            Choice::R
        } else {
            Choice::L
        }
    }
}

/// Replays a prerecorded choice sequence; sticks to the last entry if the run
/// outlives the script.
#[derive(Debug, Clone)]
pub struct ScriptedBob {
    choices: Vec<Choice>,
    next: usize,
}

impl ScriptedBob {
    pub fn new(choices: Vec<Choice>) -> Self {
        ScriptedBob { choices, next: 0 }
    }
}

impl BobStrategy for ScriptedBob {
    fn choose(&mut self, _past: &History, _current_cut: Option<f64>) -> Choice {
        let i = self.next.min(self.choices.len().saturating_sub(1));
        self.next += 1;
        *self.choices.get(i).unwrap_or(&Choice::L)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::History;

    fn halves() -> Valuation {
        Valuation::piecewise(vec![0.0, 0.5, 1.0], vec![1.5, 0.5]).unwrap()
    }

    #[test]
    fn myopic_takes_the_bigger_piece() {
        let mut b = MyopicBob::new(Valuation::uniform(), MyopicTieBreak::Fixed(Choice::L));
        let h = History::default();
        assert_eq!(b.choose(&h, Some(0.3)), Choice::R);
        assert_eq!(b.choose(&h, Some(0.5)), Choice::L); // tie
        assert_eq!(b.choose(&h, Some(1.0)), Choice::L);
    }

    #[test]
    fn myopic_toward_alice_concedes_her_preferred_piece() {
        // Uniform Bob is indifferent at 0.5; Alice with the front-loaded
        // density prefers the left piece, so Bob takes the right one.
        let mut b = MyopicBob::new(Valuation::uniform(), MyopicTieBreak::TowardAlice(halves()));
        assert_eq!(b.choose(&History::default(), Some(0.5)), Choice::R);
    }

    #[test]
    fn deceptive_branches() {
        // alpha = 0, T = 100: window [0.4, 0.5], lie budget 10 rounds.
        let mut b = DeceptiveBob::new(&Valuation::uniform(), 0.0, 100);
        assert_eq!(b.window(), (0.4, 0.5));
        let h = History::default();
        assert_eq!(b.choose(&h, Some(0.6)), Choice::L);
        assert_eq!(b.choose(&h, Some(0.39)), Choice::R);
        for _ in 0..10 {
            assert_eq!(b.choose(&h, Some(0.45)), Choice::L); // lie
        }
        assert_eq!(b.choose(&h, Some(0.45)), Choice::R); // budget spent
        assert_eq!(b.choose(&h, Some(0.5)), Choice::R); // window is closed at m_B
    }

    #[test]
    fn threshold_switch_flips_after_quota() {
        // Uniform Alice: x = 2/3, y = 5/6. r = 1, beta = 0 -> switch after 3
        // hits in (x, y].
        let mut b = ThresholdSwitchBob::new(&Valuation::uniform(), 1.0, 0.0, 10);
        assert_eq!(b.thresholds(), (2.0 / 3.0, 5.0 / 6.0));
        let h = History::default();
        for _ in 0..3 {
            assert_eq!(b.choose(&h, Some(0.7)), Choice::L); // fake phase
        }
        assert_eq!(b.choose(&h, Some(0.7)), Choice::R); // honest for y now
        assert_eq!(b.choose(&h, Some(0.9)), Choice::L);
        // Cuts outside the gap never advance the counter.
        let mut b = ThresholdSwitchBob::new(&Valuation::uniform(), 1.0, 0.0, 10);
        for _ in 0..50 {
            assert_eq!(b.choose(&h, Some(0.5)), Choice::R);
            assert_eq!(b.choose(&h, Some(0.9)), Choice::L);
        }
        assert_eq!(b.choose(&h, Some(0.7)), Choice::L);
    }

    #[test]
    fn honest_companion_never_switches() {
        let mut b = ThresholdSwitchBob::honest_companion(&Valuation::uniform());
        let h = History::default();
        for _ in 0..100 {
            assert_eq!(b.choose(&h, Some(0.7)), Choice::L);
        }
        assert_eq!(b.choose(&h, Some(2.0 / 3.0)), Choice::R); // tie at x goes R
    }

    #[test]
    fn interval_alternation() {
        let mut b = IntervalAlternatingBob::new(&Valuation::uniform(), 10);
        assert_eq!(b.interval_count(), 4); // ceil(sqrt(10))
        let h = History::default();
        assert_eq!(b.choose(&h, Some(0.3)), Choice::R); // first cut in I_2
        assert_eq!(b.choose(&h, Some(0.3)), Choice::L); // second cut
        assert_eq!(b.choose(&h, Some(0.26)), Choice::R); // same interval again
        assert_eq!(b.choose(&h, Some(0.9)), Choice::R); // fresh interval
        assert_eq!(b.choose(&h, Some(1.0)), Choice::L); // 1.0 joins the last interval
        assert_eq!(b.choose(&h, Some(0.25)), Choice::L); // boundary cut is I_2's fourth visit
    }

    #[test]
    fn interval_boundary_goes_right() {
        let mut b = IntervalAlternatingBob::new(&Valuation::uniform(), 16);
        let h = History::default();
        // P = 4, boundaries at 0.25/0.5/0.75. A cut exactly on a boundary
        // belongs to the interval on its right.
        assert_eq!(b.choose(&h, Some(0.5)), Choice::R);
        assert_eq!(b.choose(&h, Some(0.51)), Choice::L);
        assert_eq!(b.choose(&h, Some(0.49)), Choice::R);
    }

    #[test]
    fn random_bob_is_reproducible() {
        let run = |seed| {
            let mut b = RandomBob::new();
            b.begin(seed);
            let h = History::default();
            (0..32).map(|_| b.choose(&h, None)).collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn fictitious_bob_follows_beta_sign() {
        let mut b = FictitiousBob::new(Valuation::uniform(), BobTieBreak::Fixed(Choice::R));
        let h = History::default();
        assert_eq!(b.choose(&h, None), Choice::R); // beta = 0 tie
        b.observe(0.7, Choice::L); // beta += 0.4
        assert_eq!(b.choose(&h, None), Choice::L);
        b.observe(0.0, Choice::L); // beta -= 1
        b.observe(0.0, Choice::L); // beta -= 1
        assert_eq!(b.choose(&h, None), Choice::R);
        assert_eq!(b.mode_requirement(), Some(GameMode::Simultaneous));
    }

    #[test]
    fn fake_midpoint_threshold() {
        let b = FakeMidpointBob::new(0.5, 10_000);
        let q = (10_000f64).log2() + 2.0;
        assert!((b.fake_midpoint() - (0.5 + 1.0 / q)).abs() < 1e-15);
        let mut b = b;
        let h = History::default();
        assert_eq!(b.choose(&h, Some(0.52)), Choice::R); // below fake midpoint
        assert_eq!(b.choose(&h, Some(0.58)), Choice::L);
    }
}
