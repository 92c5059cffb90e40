mod common;

use common::*;
use frog::engine::{eval_paths, run_from, StateKey};
use frog::fixtures::{example1, path_by_names};
use frog::solvers::*;
use frog::{AgentId, Delay, RuleKind, SearchBudget, TieRule};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BOUND: u32 = 14;

fn budget() -> SearchBudget {
    SearchBudget::with_round_bound(BOUND)
}

#[test]
fn br_optimize_matches_path_enumeration() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    for kind in [RuleKind::Ro, RuleKind::Re, RuleKind::Rr] {
        for _ in 0..120 {
            let nv = rng.gen_range(3..=6);
            let n = rng.gen_range(1..=4);
            let inst = random_dag_instance(&mut rng, nv, n, 0.55, kind);
            let Some(profile) = random_profile(&mut rng, &inst, 8) else { continue };
            let me = AgentId(rng.gen_range(1..=n as u32));
            let want = br_brute(&inst, me, &profile, 8);
            let got = br_optimize(&inst, me, &profile, &SearchBudget::default()).unwrap();
            assert_eq!(got.delay, want, "{inst:?} {profile:?}");
            if let Delay::Finite(v) = want {
                assert!(br_decide(&inst, me, &profile, v, &SearchBudget::default()).unwrap().feasible);
                if v > 0 {
                    assert!(!br_decide(&inst, me, &profile, v - 1, &SearchBudget::default()).unwrap().feasible);
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 300);
}

#[test]
fn br_on_cyclic_graphs_agrees_with_bounded_enumeration() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..80 {
        let inst = random_cyclic_instance(&mut rng, 4, 2, 7, RuleKind::Ro);
        let Some(profile) = random_profile(&mut rng, &inst, 6) else { continue };
        // walks longer than 7 edges cannot finish by round 7 + start
        let b = SearchBudget::with_round_bound(9);
        let got = br_optimize(&inst, AgentId(1), &profile, &b).unwrap();
        let want = br_brute(&inst, AgentId(1), &profile, 10);
        let want = if want.finite().is_some_and(|v| v <= 9) { want } else { Delay::Infinite };
        assert_eq!(got.delay, want);
    }
}

#[test]
fn br_re_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..300 {
        let nv = rng.gen_range(3..=8);
        let n = rng.gen_range(1..=4);
        let inst = random_dag_instance(&mut rng, nv, n, 0.45, RuleKind::Re);
        let Some(profile) = random_profile(&mut rng, &inst, 10) else { continue };
        let me = AgentId(rng.gen_range(1..=n as u32));
        let got = br_re(&inst, me, &profile).unwrap();
        assert_eq!(got.delay, got.certified);
        assert_eq!(got.delay, br_brute(&inst, me, &profile, 10), "{inst:?} {profile:?}");
    }
}

#[test]
fn br_re_rejects_other_rules() {
    let inst = example1();
    let err = br_re(&inst, AgentId(1), &vec![vec![], vec![]]).unwrap_err();
    assert!(err.to_string().contains("RE"));
}

#[test]
fn win_matches_minimax() {
    let mut rng = StdRng::seed_from_u64(14);
    for kind in [RuleKind::Ro, RuleKind::Re, RuleKind::Rr] {
        for _ in 0..60 {
            let nv = rng.gen_range(3..=6);
            let n = rng.gen_range(1..=3);
            let inst = random_dag_instance(&mut rng, nv, n, 0.5, kind);
            let me = AgentId(rng.gen_range(1..=n as u32));
            let want = minimax(&inst, me, BOUND);
            let (got, res) = win_value(&inst, me, &budget()).unwrap();
            assert_eq!(got, want, "{inst:?}");
            if let Delay::Finite(v) = want {
                assert!(res.wins);
                assert!(!win(&inst, me, v.saturating_sub(1), &budget()).unwrap().wins || v == 0);
                check_strategy_guarantee(&inst, me, &res, &mut rng);
            }
        }
    }
}

/// Plays the winning table against random opponents.
fn check_strategy_guarantee(inst: &frog::Instance, me: AgentId, res: &WinResult, rng: &mut StdRng) {
    for _ in 0..10 {
        let policy = |a: AgentId, c: &frog::Configuration, prior: &[(AgentId, usize)]| {
            let opts = frog::engine::options(inst, c, a);
            let viable = inst.viable(a, &opts);
            if a == me {
                let key = StateKey { config: c.clone(), prior: prior.to_vec() };
                return Ok(*res.strategy.get(&key).expect("strategy covers reachable states"));
            }
            Ok(viable[rng.gen_range(0..viable.len())])
        };
        let out = run_from(inst, StateKey::root(inst), policy, &budget()).unwrap();
        assert!(out.delays[me.index()] <= Delay::Finite(res.theta));
    }
}

#[test]
fn win_is_monotone_in_theta() {
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..40 {
        let inst = random_dag_instance(&mut rng, 5, 2, 0.6, RuleKind::Ro);
        let mut prev = false;
        for theta in 0..=BOUND {
            let w = win(&inst, AgentId(1), theta, &budget()).unwrap().wins;
            assert!(!prev || w);
            prev = w;
        }
    }
}

#[test]
fn spe_rr_matches_naive_induction_and_certifies() {
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..100 {
        let nv = rng.gen_range(3..=6);
        let n = rng.gen_range(1..=3);
        let inst = random_dag_instance(&mut rng, nv, n, 0.5, RuleKind::Rr);
        let (w, _) = spe_find_rr(&inst, &budget()).unwrap();
        assert_eq!(w.delays, backward_induction_rr(&inst, BOUND));
        assert!(certify_rr(&inst, &w, &budget()).unwrap().is_empty());
        assert_eq!(eval_paths(&inst, &w.paths).unwrap().delays, w.delays);
    }
}

#[test]
fn spe_rr_rejects_other_rules() {
    assert!(matches!(
        spe_find_rr(&example1(), &budget()),
        Err(frog::FrogError::WrongRule { expected: "RR", .. })
    ));
}

#[test]
fn spe_exist_ro_matches_profile_enumeration() {
    let mut rng = StdRng::seed_from_u64(17);
    let mut compared = 0;
    for _ in 0..300 {
        let nv = rng.gen_range(3..=6);
        let n = rng.gen_range(1..=2);
        let inst = random_dag_instance(&mut rng, nv, n, 0.5, RuleKind::Ro);
        let Some((exists, outcomes)) = spe_exists_brute(&inst, BOUND, 400, 200_000) else { continue };
        let got = spe_exist_ro(&inst, &budget(), DEFAULT_SET_CAP).unwrap();
        assert_eq!(got.answer == SpeExistAnswer::Yes, exists);
        let mut a = got.outcomes.clone();
        let mut b = outcomes;
        a.sort();
        b.sort();
        assert_eq!(a, b, "{inst:?}");
        compared += 1;
    }
    assert!(compared > 100, "only {compared} instances small enough");
}

#[test]
fn example_one_equilibria() {
    let inst = example1();
    let r = spe_exist_ro(&inst, &budget(), DEFAULT_SET_CAP).unwrap();
    assert_eq!(r.answer, SpeExistAnswer::Yes);
    assert_eq!(r.outcomes, vec![vec![Delay::Finite(5), Delay::Finite(4)]]);
    let paths = r.paths.unwrap();
    assert_eq!(paths[0], path_by_names(&inst, &["a", "c", "f", "fi", "i", "k"]));
    assert_eq!(paths[1], path_by_names(&inst, &["b", "d", "f", "j", "k"]));

    let rr = inst.with_rule(TieRule::Rr { order: vec![AgentId(2), AgentId(1)] });
    let (w, _) = spe_find_rr(&rr, &budget()).unwrap();
    assert!(certify_rr(&rr, &w, &budget()).unwrap().is_empty());
}

#[test]
fn node_budget_is_enforced() {
    let inst = example1();
    let tight = SearchBudget { round_bound: None, node_budget: Some(1) };
    assert!(matches!(spe_exist_ro(&inst, &tight, 64), Err(frog::FrogError::BudgetExhausted(1))));
}

#[test]
fn tiny_cap_is_inconclusive() {
    let inst = example1();
    // several outcomes survive below the root
    let r = spe_exist_ro(&inst, &budget(), 0).unwrap();
    assert_eq!(r.answer, SpeExistAnswer::Inconclusive);
}
