//! Alice strategies: fixed cut, two midpoint exploiters, the approachability
//! enforcer, fictitious play, and a scripted replayer.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::blackwell::{BlackwellError, BlackwellState, DeltaRow};
use crate::engine::{AliceStrategy, Choice, History};
use crate::valuation::Valuation;

/// Cuts the same point every round. Baseline and benchmark opponent.
#[derive(Debug, Clone)]
pub struct FixedCutAlice {
    x: f64,
}

impl FixedCutAlice {
    pub fn new(x: f64) -> Self {
        assert!((0.0..=1.0).contains(&x), "fixed cut {x} outside [0, 1]");
        FixedCutAlice { x }
    }
}

impl AliceStrategy for FixedCutAlice {
    fn cut(&mut self, _past: &History) -> f64 {
        self.x
    }
}

/// Replays a prerecorded cut sequence; sticks to the last entry if the run
/// outlives the script.
#[derive(Debug, Clone)]
pub struct ScriptedAlice {
    cuts: Vec<f64>,
    next: usize,
}

impl ScriptedAlice {
    pub fn new(cuts: Vec<f64>) -> Self {
        ScriptedAlice { cuts, next: 0 }
    }
}

impl AliceStrategy for ScriptedAlice {
    fn cut(&mut self, _past: &History) -> f64 {
        let i = self.next.min(self.cuts.len().saturating_sub(1));
        self.next += 1;
        *self.cuts.get(i).unwrap_or(&0.5)
    }
}

/// Midpoint exploiter that halves an own-value bracket around Bob's midpoint.
///
/// For `tau` rounds (default `ceil(ln T)`) it cuts the own-value-equal split
/// of the bracket and shrinks toward the side Bob's answer indicates his
/// midpoint lies on. Afterwards it commits: a cut just outside the bracket on
/// the side of its own midpoint, so Bob keeps conceding the piece Alice wants.
#[derive(Debug, Clone)]
pub struct BinarySearchAlice {
    v: Valuation,
    t_rounds: usize,
    tau: usize,
    lo: f64,
    hi: f64,
    rounds_done: usize,
    commit: Option<f64>,
}

impl BinarySearchAlice {
    pub fn new(v: Valuation, t_rounds: usize) -> Self {
        let tau = (t_rounds as f64).ln().ceil() as usize;
        Self::with_exploration(v, t_rounds, tau)
    }

    /// Override the exploration length (clamped to the horizon).
    pub fn with_exploration(v: Valuation, t_rounds: usize, tau: usize) -> Self {
        BinarySearchAlice {
            v,
            t_rounds,
            tau: tau.min(t_rounds),
            lo: 0.0,
            hi: 1.0,
            rounds_done: 0,
            commit: None,
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn bracket(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn exploitation_cut(&self) -> f64 {
        let m = self.v.midpoint();
        let step = 1.0 / self.t_rounds as f64;
        if m <= self.lo {
            (self.lo - step).max(0.0)
        } else if m >= self.hi {
            (self.hi + step).min(1.0)
        } else {
            // Own midpoint still inside the bracket: cutting there is safe
            // against any answer pattern (unreachable against a truthful
            // opponent once tau >= 2).
            m
        }
    }
}

impl AliceStrategy for BinarySearchAlice {
    fn cut(&mut self, _past: &History) -> f64 {
        if self.rounds_done < self.tau {
            self.v
                .point_at_value(self.lo, self.hi, 0.5)
                .unwrap_or(0.5 * (self.lo + self.hi))
        } else {
            if self.commit.is_none() {
                self.commit = Some(self.exploitation_cut());
            }
            self.commit.unwrap()
        }
    }

    fn observe(&mut self, cut: f64, choice: Choice) {
        if self.rounds_done < self.tau {
            // Bob taking the left piece means his midpoint is left of the cut.
            match choice {
                Choice::L => self.hi = cut,
                Choice::R => self.lo = cut,
            }
        }
        self.rounds_done += 1;
    }
}

/// Probe-then-commit midpoint exploiter robust to opponents who lie within a
/// bounded regret budget `f(T)`.
///
/// Each iteration splits the bracket into own-value sixths, probes the five
/// interior points `eta` times each, takes per-point majority answers, and
/// shrinks to the half-value bracket the answer pattern selects. After
/// `n_iters` iterations it commits to the bracket point nearest its own
/// midpoint. Degenerate parameter regimes fall back gracefully: no iterations
/// means cutting the own midpoint from round 1, and an exploration budget
/// exceeding the horizon means the commit phase never starts.
#[derive(Debug, Clone)]
pub struct ExploreCommitAlice {
    v: Valuation,
    f_of_t: f64,
    eta: usize,
    n_iters: usize,
    x: f64,
    y: f64,
    iter: usize,
    probes: [f64; 7],
    probe_j: usize,
    votes_cast: usize,
    left_votes: usize,
    answers: [Choice; 7],
    commit: Option<f64>,
}

impl ExploreCommitAlice {
    /// General form with an explicit opponent regret budget `f(T) >= 1`.
    pub fn new(v: Valuation, t_rounds: usize, f_of_t: f64) -> Self {
        let t = t_rounds as f64;
        let f = f_of_t.max(1.0);
        let eta = (f * t).sqrt().ceil() as usize;
        let n_raw = -(3.0 * (f / t).sqrt() * t.ln()).log2();
        let n_iters = if n_raw.is_finite() && n_raw >= 1.0 {
            n_raw.floor() as usize
        } else {
            0
        };
        let mut s = ExploreCommitAlice {
            v,
            f_of_t: f,
            eta: eta.max(1),
            n_iters,
            x: 0.0,
            y: 1.0,
            iter: 0,
            probes: [0.0; 7],
            probe_j: 1,
            votes_cast: 0,
            left_votes: 0,
            answers: [Choice::R; 7],
            commit: None,
        };
        if s.n_iters > 0 {
            s.set_probes();
        }
        s
    }

    /// Opponent regret budget `T^alpha` for a known exponent.
    pub fn known_alpha(v: Valuation, t_rounds: usize, alpha: f64) -> Self {
        Self::new(v, t_rounds, (t_rounds as f64).powf(alpha))
    }

    /// No growth-rate knowledge: budget `T / (ln T)^4`, clamped to >= 1.
    pub fn unknown_alpha(v: Valuation, t_rounds: usize) -> Self {
        let t = t_rounds as f64;
        Self::new(v, t_rounds, t / t.ln().powi(4))
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn n_iters(&self) -> usize {
        self.n_iters
    }

    pub fn f_of_t(&self) -> f64 {
        self.f_of_t
    }

    pub fn bracket(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    fn set_probes(&mut self) {
        self.probes[0] = self.x;
        self.probes[6] = self.y;
        for j in 1..=5 {
            self.probes[j] = self
                .v
                .point_at_value(self.x, self.y, j as f64 / 6.0)
                .unwrap_or_else(|_| self.x + (self.y - self.x) * j as f64 / 6.0);
        }
    }

    fn exploring(&self) -> bool {
        self.iter < self.n_iters
    }

    /// Shrink the bracket from the majority answers. The answer pattern is
    /// read left to right with a virtual R at the left edge and a virtual L
    /// at the right edge; the first R-to-L switch locates the midpoint to
    /// within three sixths of the bracket. Non-monotone patterns (possible
    /// against opponents that lie) resolve to the leftmost switch.
    fn shrink(&mut self) {
        self.answers[0] = Choice::R;
        self.answers[6] = Choice::L;
        let mut k = 5;
        for j in 0..=5 {
            if self.answers[j] == Choice::R && self.answers[j + 1] == Choice::L {
                k = j;
                break;
            }
        }
        let k = k.clamp(1, 4);
        self.x = self.probes[k - 1];
        self.y = self.probes[k + 2];
        self.iter += 1;
        if self.exploring() {
            self.set_probes();
            self.probe_j = 1;
            self.votes_cast = 0;
            self.left_votes = 0;
        }
    }
}

impl AliceStrategy for ExploreCommitAlice {
    fn cut(&mut self, _past: &History) -> f64 {
        if self.exploring() {
            self.probes[self.probe_j]
        } else {
            if self.commit.is_none() {
                self.commit = Some(self.v.midpoint().clamp(self.x, self.y));
            }
            self.commit.unwrap()
        }
    }

    fn observe(&mut self, _cut: f64, choice: Choice) {
        if !self.exploring() {
            return;
        }
        self.votes_cast += 1;
        if choice == Choice::L {
            self.left_votes += 1;
        }
        if self.votes_cast == self.eta {
            // Strict majority of L answers counts as L; ties go to R.
            self.answers[self.probe_j] = if 2 * self.left_votes > self.eta {
                Choice::L
            } else {
                Choice::R
            };
            self.votes_cast = 0;
            self.left_votes = 0;
            if self.probe_j == 5 {
                self.shrink();
            } else {
                self.probe_j += 1;
            }
        }
    }
}

/// Equitable enforcer: drives every tracked grid opponent's average payoff
/// down to 1/2 by always cutting a zero of the weighted inner product against
/// the positive part of the running averages.
pub struct BlackwellAlice {
    state: BlackwellState,
    eps_root: f64,
    last_cut: f64,
    record: bool,
    rows: Vec<DeltaRow>,
}

impl BlackwellAlice {
    pub fn new(v: Valuation, n_max: usize, eps_root: f64) -> Result<Self, BlackwellError> {
        Ok(BlackwellAlice {
            state: BlackwellState::new(v, n_max)?,
            eps_root,
            last_cut: 0.5,
            record: false,
            rows: Vec::new(),
        })
    }

    /// Record one `DeltaRow` per round for the diagnostics CSV.
    pub fn with_diagnostics(mut self) -> Self {
        self.record = true;
        self
    }

    pub fn state(&self) -> &BlackwellState {
        &self.state
    }

    pub fn diagnostic_rows(&self) -> &[DeltaRow] {
        &self.rows
    }
}

impl AliceStrategy for BlackwellAlice {
    fn cut(&mut self, _past: &History) -> f64 {
        self.last_cut = self
            .state
            .find_root_cut(self.eps_root)
            .expect("running averages stay bounded, so a bracketed root exists");
        self.last_cut
    }

    fn observe(&mut self, cut: f64, choice: Choice) {
        self.state.observe_round(cut, choice);
        if self.record {
            self.rows.push(self.state.delta_row(cut));
        }
    }
}

/// Tie rule for fictitious-play Alice when Bob's past choices balance out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliceTieBreak {
    CutZero,
    CutOne,
    CutOwnMidpoint,
    SeededRandom,
}

/// Best-responds to the empirical distribution of Bob's choices: cut 1 when
/// Bob has taken the right piece more often, 0 when the left piece leads,
/// and the configured tie rule when the counts balance.
pub struct FictitiousAlice {
    v: Valuation,
    tie: AliceTieBreak,
    alpha: i64,
    rng: Option<ChaCha12Rng>,
}

impl FictitiousAlice {
    pub fn new(v: Valuation, tie: AliceTieBreak) -> Self {
        FictitiousAlice {
            v,
            tie,
            alpha: 0,
            rng: None,
        }
    }

    /// R-count minus L-count over observed rounds.
    pub fn alpha(&self) -> i64 {
        self.alpha
    }
}

impl AliceStrategy for FictitiousAlice {
    fn begin(&mut self, seed: u64) {
        self.rng = Some(ChaCha12Rng::seed_from_u64(seed));
    }

    fn cut(&mut self, _past: &History) -> f64 {
        if self.alpha > 0 {
            1.0
        } else if self.alpha < 0 {
            0.0
        } else {
            match self.tie {
                AliceTieBreak::CutZero => 0.0,
                AliceTieBreak::CutOne => 1.0,
                AliceTieBreak::CutOwnMidpoint => self.v.midpoint(),
                AliceTieBreak::SeededRandom => self
                    .rng
                    .as_mut()
                    .expect("seeded before the first round")
                    .random::<f64>(),
            }
        }
    }

    fn observe(&mut self, _cut: f64, choice: Choice) {
        self.alpha += match choice {
            Choice::R => 1,
            Choice::L => -1,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_game, GameMode};
    use crate::strategies::bob::{MyopicBob, MyopicTieBreak, ScriptedBob};

    fn halves() -> Valuation {
        Valuation::piecewise(vec![0.0, 0.5, 1.0], vec![1.5, 0.5]).unwrap()
    }

    #[test]
    fn binary_search_first_cut_splits_evenly() {
        let mut a = BinarySearchAlice::new(Valuation::uniform(), 100);
        assert_eq!(a.tau(), 5); // ceil(ln 100)
        assert_eq!(a.cut(&History::default()), 0.5);
        a.observe(0.5, Choice::L);
        assert_eq!(a.bracket(), (0.0, 0.5));
        assert_eq!(a.cut(&History::default()), 0.25);
    }

    #[test]
    fn binary_search_exploitation_steps_past_bracket() {
        // Force the bracket to [0.5, 1] with scripted answers; own midpoint
        // 1/3 sits below, so the commit cut is lo - 1/T.
        let v = halves(); // midpoint 1/3
        let mut a = BinarySearchAlice::with_exploration(v, 100, 1);
        assert_eq!(a.cut(&History::default()), 1.0 / 3.0);
        a.observe(0.5, Choice::R); // pretend the cut was 0.5
        let cut = a.cut(&History::default());
        assert!((cut - 0.49).abs() < 1e-12);
    }

    #[test]
    fn binary_search_bracket_tracks_honest_midpoint() {
        let v_bob = halves(); // m_B = 1/3
        let mut alice = BinarySearchAlice::new(Valuation::uniform(), 1000);
        let mut bob = MyopicBob::new(v_bob.clone(), MyopicTieBreak::Fixed(Choice::L));
        let h = run_game(
            &mut alice,
            &mut bob,
            &Valuation::uniform(),
            &v_bob,
            1000,
            GameMode::Sequential,
            3,
        )
        .unwrap();
        let (lo, hi) = alice.bracket();
        let m_b = v_bob.midpoint();
        assert!(
            lo <= m_b && m_b <= hi,
            "midpoint escaped bracket [{lo}, {hi}]"
        );
        assert!(h.cuts[alice.tau()..].windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn explore_commit_parameters() {
        // f(T) = 1, T = 10^4: eta = 100, n = floor(-log2(3 * 0.01 * ln 1e4))
        let a = ExploreCommitAlice::new(Valuation::uniform(), 10_000, 1.0);
        assert_eq!(a.eta(), 100);
        assert_eq!(a.n_iters(), 1);
        // alpha = 0.5 keeps the budget so large that probing never helps at
        // desk scale; the strategy degenerates to cutting its own midpoint.
        let a = ExploreCommitAlice::known_alpha(Valuation::uniform(), 50_000, 0.5);
        assert_eq!(a.n_iters(), 0);
        let mut a = a;
        assert_eq!(a.cut(&History::default()), 0.5);
    }

    #[test]
    fn explore_commit_probes_sixths_and_shrinks() {
        let mut a = ExploreCommitAlice::new(Valuation::uniform(), 10_000, 1.0);
        let expected = [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0, 4.0 / 6.0, 5.0 / 6.0];
        for (j, &p) in expected.iter().enumerate() {
            for _ in 0..a.eta() {
                let cut = a.cut(&History::default());
                assert!((cut - p).abs() < 1e-12, "probe {j} at {cut}, wanted {p}");
                a.observe(cut, Choice::L);
            }
        }
        // all-L pattern keeps the left edge and halves to [x0, a_{0,3}]
        assert_eq!(a.bracket(), (0.0, 0.5));
        assert_eq!(a.cut(&History::default()), 0.5); // midpoint clamped into bracket
    }

    #[test]
    fn explore_commit_mixed_pattern_shrinks_to_transition() {
        let mut a = ExploreCommitAlice::new(Valuation::uniform(), 10_000, 1.0);
        // Answers R,R,L,L,L: switch after the second probe, bracket
        // [a_{0,1}, a_{0,4}].
        let pattern = [Choice::R, Choice::R, Choice::L, Choice::L, Choice::L];
        for &ans in &pattern {
            for _ in 0..a.eta() {
                let cut = a.cut(&History::default());
                a.observe(cut, ans);
            }
        }
        let (x, y) = a.bracket();
        assert!((x - 1.0 / 6.0).abs() < 1e-12);
        assert!((y - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn explore_commit_majority_tie_counts_as_right() {
        let v = Valuation::uniform();
        let mut a = ExploreCommitAlice::new(v, 10_000, 1.0);
        assert_eq!(a.eta() % 2, 0, "test needs an even eta");
        // First probe: half L, half R -> majority resolves to R. Remaining
        // probes all L -> pattern R,L,L,L,L -> bracket [a_0, a_3] = [0, 0.5].
        for j in 1..=5 {
            for i in 0..a.eta() {
                let cut = a.cut(&History::default());
                let ans = if j == 1 && i % 2 == 0 {
                    Choice::L
                } else if j == 1 {
                    Choice::R
                } else {
                    Choice::L
                };
                a.observe(cut, ans);
            }
        }
        assert_eq!(a.bracket(), (0.0, 0.5));
    }

    #[test]
    fn fictitious_alice_follows_sign() {
        let u = Valuation::uniform();
        let mut a = FictitiousAlice::new(u.clone(), AliceTieBreak::CutOwnMidpoint);
        assert_eq!(a.cut(&History::default()), 0.5); // alpha = 0 tie
        a.observe(0.5, Choice::R);
        assert_eq!(a.cut(&History::default()), 1.0); // alpha = 1
        a.observe(1.0, Choice::L);
        a.observe(1.0, Choice::L);
        assert_eq!(a.cut(&History::default()), 0.0); // alpha = -1
    }

    #[test]
    fn fictitious_alice_depends_only_on_sign() {
        // Two different choice sequences with the same running sign profile
        // produce the same cuts.
        let u = Valuation::uniform();
        let mk = |choices: &[Choice]| {
            let mut a = FictitiousAlice::new(u.clone(), AliceTieBreak::CutZero);
            let mut cuts = Vec::new();
            for &c in choices {
                cuts.push(a.cut(&History::default()));
                a.observe(cuts[cuts.len() - 1], c);
            }
            cuts
        };
        use Choice::*;
        let a = mk(&[R, R, L, L]);
        let b = mk(&[R, R, L, L]);
        assert_eq!(a, b);
    }

    #[test]
    fn scripted_alice_replays_and_clamps() {
        let mut a = ScriptedAlice::new(vec![0.1, 0.9]);
        assert_eq!(a.cut(&History::default()), 0.1);
        assert_eq!(a.cut(&History::default()), 0.9);
        assert_eq!(a.cut(&History::default()), 0.9);
    }

    #[test]
    fn scripted_bob_and_explore_commit_interact() {
        // End-to-end smoke test through the engine at a nondegenerate
        // parameter point: 5 * eta * n = 500 rounds of probing, then commit.
        let v = Valuation::uniform();
        let t = 10_000;
        let mut alice = ExploreCommitAlice::new(v.clone(), t, 1.0);
        let mut bob = MyopicBob::new(halves(), MyopicTieBreak::Fixed(Choice::R));
        let h = run_game(
            &mut alice,
            &mut bob,
            &v,
            &halves(),
            t,
            GameMode::Sequential,
            1,
        )
        .unwrap();
        let (x, y) = alice.bracket();
        let m_b = halves().midpoint();
        assert!(x <= m_b && m_b <= y);
        // Commit cut repeats for the rest of the run.
        assert!(h.cuts[500..].windows(2).all(|w| w[0] == w[1]));
        let _ = ScriptedBob::new(vec![Choice::L]);
    }
}
