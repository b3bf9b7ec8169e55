//! Fictitious-play diagnostics: the radius invariants at the largest sweep
//! scale, exact agreement between the strategies' internal counters and an
//! independent recomputation, definitional consistency of the series on
//! arbitrary histories, and a negative control for the checker itself.

use cake_game::config::InstanceSampler;
use cake_game::engine::{run_game, Choice, GameMode, History};
use cake_game::spiral::{
    check_spiral_invariants, compute_series, middle_cut_count, payoff_bounds_report,
};
use cake_game::strategies::alice::{AliceTieBreak, FictitiousAlice, ScriptedAlice};
use cake_game::strategies::bob::{BobTieBreak, FictitiousBob, ScriptedBob};
use cake_game::valuation::Valuation;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

const ALICE_TIES: [AliceTieBreak; 4] = [
    AliceTieBreak::CutZero,
    AliceTieBreak::CutOne,
    AliceTieBreak::CutOwnMidpoint,
    AliceTieBreak::SeededRandom,
];
const BOB_TIES: [BobTieBreak; 3] = [
    BobTieBreak::Fixed(Choice::L),
    BobTieBreak::Fixed(Choice::R),
    BobTieBreak::SeededRandom,
];

fn pairs(count: usize, seed: u64) -> Vec<(Valuation, Valuation)> {
    let sampler = InstanceSampler {
        delta: 0.25,
        upper: 4.0,
        segments: 2..=8,
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (sampler.sample(&mut rng), sampler.sample(&mut rng)))
        .collect()
}

fn fp_run(
    va: &Valuation,
    vb: &Valuation,
    at: AliceTieBreak,
    bt: BobTieBreak,
    t: usize,
    seed: u64,
) -> (History, FictitiousAlice, FictitiousBob) {
    let mut alice = FictitiousAlice::new(va.clone(), at);
    let mut bob = FictitiousBob::new(vb.clone(), bt);
    let h = run_game(
        &mut alice,
        &mut bob,
        va,
        vb,
        t,
        GameMode::Simultaneous,
        seed,
    )
    .unwrap();
    (h, alice, bob)
}

/// The complete radius/payoff invariant battery at the largest scale the
/// sweep grid uses; the smaller horizons are exercised by the acceptance
/// tests, this one settles the 50k tier across every tie-break pairing.
#[test]
fn spiral_invariants_hold_at_the_largest_scale() {
    let t = 50_000usize;
    let instances = pairs(50, 0x59124A1);
    let mut cells = Vec::new();
    for (i, pair) in instances.iter().enumerate() {
        for (ai, at) in ALICE_TIES.iter().enumerate() {
            for (bi, bt) in BOB_TIES.iter().enumerate() {
                cells.push((i, pair, *at, *bt, ai, bi));
            }
        }
    }
    let failures: Vec<String> = cells
        .par_iter()
        .filter_map(|&(i, pair, at, bt, ai, bi)| {
            let (va, vb) = pair;
            let seed = ((i as u64) << 16) | ((ai as u64) << 4) | bi as u64;
            let (h, _, _) = fp_run(va, vb, at, bt, t, seed);
            let s = compute_series(&h, vb);
            let checks = check_spiral_invariants(&s, &h);
            let bounds = payoff_bounds_report(&h, &s);
            let mut problems = Vec::new();
            if !checks.all_passed() {
                problems.push(format!("checks {:?}", checks.failed_names()));
            }
            if !bounds.applicable || !bounds.all_within() {
                problems.push(format!("bounds {:?}", bounds.exceedances));
            }
            if problems.is_empty() {
                None
            } else {
                Some(format!(
                    "instance {i} ties ({ai},{bi}): {}",
                    problems.join("; ")
                ))
            }
        })
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

/// The strategies' internal counters are exactly the independently
/// recomputed series: no drift between what the players believe and what
/// the history shows.
#[test]
fn internal_counters_match_the_recomputed_series() {
    let instances = pairs(12, 0xA1FABE7A);
    for t in [5usize, 50, 500, 5_000] {
        for (i, (va, vb)) in instances.iter().enumerate() {
            for (ai, at) in ALICE_TIES.iter().enumerate() {
                for (bi, bt) in BOB_TIES.iter().enumerate() {
                    let seed =
                        ((t as u64) << 20) | ((i as u64) << 8) | ((ai as u64) << 4) | bi as u64;
                    let (h, alice, bob) = fp_run(va, vb, *at, *bt, t, seed);
                    let s = compute_series(&h, vb);
                    assert_eq!(s.alpha.len(), t + 1);
                    assert_eq!(
                        alice.alpha(),
                        s.alpha[t],
                        "T={t} instance {i} ties ({ai},{bi}): choice balance drifted"
                    );
                    assert_eq!(
                        bob.beta(),
                        s.beta[t],
                        "T={t} instance {i} ties ({ai},{bi}): value balance drifted"
                    );
                }
            }
        }
    }
}

/// Feeding the checker a non-spiral history must trip it: a balance that
/// returns to the origin shrinks the radius, which fictitious play never
/// does.
#[test]
fn checker_flags_a_shrinking_radius() {
    let va = Valuation::uniform();
    let vb = Valuation::uniform();
    let mut alice = ScriptedAlice::new(vec![0.5, 0.5]);
    let mut bob = ScriptedBob::new(vec![Choice::R, Choice::L]);
    let h = run_game(&mut alice, &mut bob, &va, &vb, 2, GameMode::Simultaneous, 1).unwrap();
    let s = compute_series(&h, &vb);
    assert_eq!(s.rho, vec![0.0, 1.0, 0.0]);
    let checks = check_spiral_invariants(&s, &h);
    assert!(!checks.all_passed());
    assert!(checks.failed_names().contains(&"radius-monotone"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// On arbitrary histories the series is definitionally consistent:
    /// alpha cumulates choice signs, beta cumulates centered left-piece
    /// values, rho is their absolute sum, and crossings are exactly the
    /// rounds with a zero balance or an incoming sign change.
    #[test]
    fn series_matches_its_definitions(
        seed in any::<u64>(),
        cuts in prop::collection::vec(0.0f64..=1.0, 1..120),
        choice_bits in prop::collection::vec(any::<bool>(), 120),
        edgy in prop::collection::vec(any::<bool>(), 120),
    ) {
        let sampler = InstanceSampler { delta: 0.25, upper: 4.0, segments: 2..=8 };
        let vb = sampler.sample(&mut ChaCha12Rng::seed_from_u64(seed));
        // Mix in exact edge cuts so the |beta step| = 1 case is exercised.
        let cuts: Vec<f64> = cuts
            .iter()
            .zip(&edgy)
            .map(|(&c, &e)| if e { c.round() } else { c })
            .collect();
        let choices: Vec<Choice> = choice_bits
            .iter()
            .take(cuts.len())
            .map(|&b| if b { Choice::L } else { Choice::R })
            .collect();
        let t = cuts.len();
        let mut alice = ScriptedAlice::new(cuts.clone());
        let mut bob = ScriptedBob::new(choices);
        let h = run_game(&mut alice, &mut bob, &vb, &vb, t, GameMode::Simultaneous, 0).unwrap();
        let s = compute_series(&h, &vb);

        prop_assert_eq!(s.alpha[0], 0);
        prop_assert_eq!(s.beta[0], 0.0);
        prop_assert_eq!(s.rho[0], 0.0);
        let mut alpha = 0i64;
        let mut beta = 0.0f64;
        for i in 0..t {
            alpha += match h.choices[i] { Choice::R => 1, Choice::L => -1 };
            let inc = 2.0 * vb.cumulative(h.cuts[i]).unwrap() - 1.0;
            beta += inc;
            prop_assert_eq!(s.alpha[i + 1], alpha);
            prop_assert_eq!(s.beta[i + 1], beta);
            prop_assert_eq!(s.rho[i + 1], alpha.unsigned_abs() as f64 + beta.abs());
            // One round moves the value balance by at most one, with
            // equality exactly at edge cuts.
            let step = (s.beta[i + 1] - s.beta[i]).abs();
            prop_assert!(step <= 1.0 + 1e-12);
            if h.cuts[i] == 0.0 || h.cuts[i] == 1.0 {
                prop_assert!((step - 1.0).abs() <= 1e-12, "edge cut step {step}");
            } else if h.cuts[i] > 1e-6 && h.cuts[i] < 1.0 - 1e-6 {
                prop_assert!(step < 1.0, "interior cut moved beta by a full unit");
            }
        }
        prop_assert_eq!(middle_cut_count(&h), cuts.iter().filter(|&&c| c > 0.0 && c < 1.0).count());

        // Crossing classification, recomputed from scratch.
        let sign = |b: f64| if b > 1e-12 { 1i8 } else if b < -1e-12 { -1 } else { 0 };
        for round in 0..=t {
            let mut expect = s.alpha[round] == 0;
            if !expect && round < t {
                let (now, next) = (sign(s.beta[round]), sign(s.beta[round + 1]));
                expect = (next > 0 && now <= 0) || (next < 0 && now >= 0);
            }
            prop_assert_eq!(
                s.is_axis_crossing(round),
                expect,
                "crossing classification at {}",
                round
            );
        }
    }
}
