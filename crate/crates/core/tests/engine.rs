mod common;

use frog::engine::{deciders, eval_paths, run, step, AgentStrategy, RunOutcome};
use frog::fixtures::{example1, example1_edge, path_by_names};
use frog::formula::Cnf;
use frog::gadgets::{reduce_3sat, ReduceOptions};
use frog::model::{successors, Agent, AgentId, Configuration, Delay, Digraph, Instance, Location, TieRule};
use frog::{PathProfile, RuleKind, SearchBudget};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const AGENT1: [&[&str]; 3] = [&["a", "c", "f", "fi", "i", "k"], &["a", "c", "f", "j", "k"], &["a", "e", "g", "h", "j", "k"]];
const AGENT2: [&[&str]; 3] = [&["b", "d", "f", "fi", "i", "k"], &["b", "d", "f", "j", "k"], &["b", "d", "g", "h", "j", "k"]];
const LEAVES: [[u32; 2]; 9] = [[6, 5], [5, 4], [5, 5], [4, 5], [5, 4], [4, 5], [5, 5], [5, 4], [6, 5]];

fn fixed(profile: &PathProfile) -> Vec<AgentStrategy> {
    profile.iter().cloned().map(AgentStrategy::FixedPath).collect()
}

fn simulate(inst: &Instance, profile: &PathProfile) -> RunOutcome {
    run(inst, &fixed(profile), &SearchBudget::default()).unwrap()
}

fn finite(v: [u32; 2]) -> Vec<Delay> {
    v.iter().map(|&d| Delay::Finite(d)).collect()
}

#[test]
fn example_leaves_by_run_and_eval() {
    let inst = example1();
    for (k, leaf) in LEAVES.iter().enumerate() {
        let profile = vec![path_by_names(&inst, AGENT1[k / 3]), path_by_names(&inst, AGENT2[k % 3])];
        assert_eq!(simulate(&inst, &profile).delays, finite(*leaf), "pair {k}");
        assert_eq!(eval_paths(&inst, &profile).unwrap().delays, finite(*leaf), "pair {k}");
    }
}

#[test]
fn example_root_and_joint_node() {
    let inst = example1();
    let root = Configuration::initial(&inst);
    assert_eq!(deciders(&inst, &root), vec![AgentId(1), AgentId(2)]);
    let (c1, _) = step(&inst, &root, &[(AgentId(1), example1_edge(&inst, "a", "c")), (AgentId(2), example1_edge(&inst, "b", "d"))]).unwrap();
    let cf = example1_edge(&inst, "c", "f");
    let df = example1_edge(&inst, "d", "f");
    let (c2, _) = step(&inst, &c1, &[(AgentId(1), cf), (AgentId(2), df)]).unwrap();
    assert_eq!(deciders(&inst, &c2), vec![AgentId(1), AgentId(2)]);
    let fi = example1_edge(&inst, "f", "fi");
    let (c3, trace) = step(&inst, &c2, &[(AgentId(1), fi), (AgentId(2), fi)]).unwrap();
    // order 2 > 1 puts agent 2 in front
    assert_eq!(c3.queues[fi], vec![1, 0]);
    assert_eq!(trace.insertions.iter().map(|i| (i.agent, i.position)).collect::<Vec<_>>(), vec![(AgentId(2), 1), (AgentId(1), 2)]);
}

#[test]
fn missing_or_illegal_decisions_fail() {
    let inst = example1();
    let root = Configuration::initial(&inst);
    assert!(step(&inst, &root, &[(AgentId(1), 0)]).is_err());
    let ik = example1_edge(&inst, "i", "k");
    assert!(step(&inst, &root, &[(AgentId(1), ik), (AgentId(2), 2)]).is_err());
}

#[test]
fn successors_examples() {
    let inst = example1();
    let g = &inst.graph;
    assert_eq!(successors(g, example1_edge(&inst, "a", "c")).unwrap(), &[example1_edge(&inst, "c", "f")]);
    assert!(successors(g, example1_edge(&inst, "i", "k")).unwrap().is_empty());
    assert!(successors(g, 99).is_err());
    let mut looped = Digraph::from_names(&["u"], &[]).unwrap();
    let e = looped.add_edge(0, 0);
    assert_eq!(successors(&looped, e).unwrap(), &[e]);
}

#[test]
fn validation_examples() {
    assert!(example1().validate(false).is_empty());
    let g = Digraph::from_names(&["s", "t", "u"], &[("s", "t")]).unwrap();
    let agents = vec![
        Agent { id: AgentId(1), source: 0, sink: 0, start_round: 0 },
        Agent { id: AgentId(2), source: 1, sink: 2, start_round: 0 },
    ];
    let inst = Instance::new(g, agents, TieRule::Ro { order: vec![AgentId(1), AgentId(2)] });
    let msgs: Vec<String> = inst.validate(false).iter().map(|v| v.message.clone()).collect();
    assert!(msgs.contains(&"sink equals source".to_string()));
    assert!(msgs.contains(&"no source-sink path".to_string()));
}

#[test]
fn lone_agent_walks_one_edge_per_round() {
    for len in 1..6 {
        let names: Vec<String> = (0..=len).map(|k| format!("v{k}")).collect();
        let edges: Vec<(String, String)> = (0..len).map(|k| (names[k].clone(), names[k + 1].clone())).collect();
        let g = Digraph::from_names(&names, &edges).unwrap();
        let agent = Agent { id: AgentId(1), source: 0, sink: len, start_round: 0 };
        let inst = Instance::new(g, vec![agent], TieRule::Rr { order: vec![AgentId(1)] });
        let path: Vec<usize> = (0..len).collect();
        assert_eq!(simulate(&inst, &vec![path]).delays, vec![Delay::Finite(len as u32)]);
    }
}

#[test]
fn stuck_agent_exits_with_infinite_delay() {
    let g = Digraph::from_names(&["s", "dead", "t"], &[("s", "dead"), ("s", "t")]).unwrap();
    let agents = vec![Agent { id: AgentId(1), source: 0, sink: 2, start_round: 0 }];
    let inst = Instance::new(g, agents, TieRule::Ro { order: vec![AgentId(1)] });
    let strategies = vec![AgentStrategy::Table([(frog::engine::StateKey::root(&inst), 0)].into())];
    let out = run(&inst, &strategies, &SearchBudget::default()).unwrap();
    assert_eq!(out.delays, vec![Delay::Infinite]);
}

#[test]
fn undefined_strategy_names_the_state() {
    let inst = example1();
    let strategies = vec![AgentStrategy::Table(Default::default()), AgentStrategy::FixedPath(vec![2])];
    let err = run(&inst, &strategies, &SearchBudget::default()).unwrap_err();
    assert!(err.to_string().contains("r=0"), "{err}");
}

#[test]
fn round_bound_cuts_off_with_partial_paths() {
    let inst = example1();
    let profile = vec![path_by_names(&inst, AGENT1[0]), path_by_names(&inst, AGENT2[0])];
    let out = run(&inst, &fixed(&profile), &SearchBudget::with_round_bound(3)).unwrap();
    assert_eq!(out.delays, vec![Delay::Infinite, Delay::Infinite]);
    assert!(out.paths.iter().all(|p| !p.is_empty() && p.len() < 5));
}

#[test]
fn single_strategic_agent_ro_and_rr_coincide() {
    let cnf = Cnf::new(2, vec![[1, -2, 2], [-1, 2, 1]]).unwrap();
    let ro = reduce_3sat(&cnf, &ReduceOptions::default()).unwrap();
    let rr = reduce_3sat(&cnf, &ReduceOptions { rule: RuleKind::Rr, ..Default::default() }).unwrap();
    let mut profile = ro.adversary_profile();
    profile[0] = ro.canonical_paths[&AgentId(1)].clone();
    let a = simulate(&ro.instance, &profile);
    let b = simulate(&rr.instance, &profile);
    assert_eq!(a.history, b.history);
    assert_eq!(a.delays, b.delays);
}

fn check_history(inst: &Instance, out: &RunOutcome) {
    for pair in out.history.windows(2) {
        let (now, next) = (&pair[0], &pair[1]);
        // every non-empty queue pops exactly its front
        for (e, q) in now.queues.iter().enumerate() {
            if !q.is_empty() {
                assert!(next.queues[e].starts_with(&q[1..]), "edge {e} at round {}", now.round);
            }
        }
    }
    for config in &out.history {
        let mut seen = vec![0; inst.n()];
        for q in &config.queues {
            for &a in q {
                seen[a as usize] += 1;
            }
        }
        for (k, a) in inst.agents().iter().enumerate() {
            match config.locate_all()[k] {
                Location::Queued { .. } => assert_eq!(seen[k], 1),
                Location::Exited(_) => assert_eq!(seen[k], 0),
                Location::Pending => assert!(seen[k] == 0 && a.start_round >= config.round),
            }
        }
    }
}

fn random_case(seed: u64) -> Option<(Instance, PathProfile)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let kind = match rng.gen_range(0..3) {
        0 => RuleKind::Ro,
        1 => RuleKind::Re,
        _ => RuleKind::Rr,
    };
    let nv = rng.gen_range(3..9);
    let n = rng.gen_range(1..5);
    let inst = if rng.gen_bool(0.7) {
        common::random_dag_instance(&mut rng, nv, n, 0.5, kind)
    } else {
        common::random_cyclic_instance(&mut rng, nv, n, 2 * nv, kind)
    };
    let profile = common::random_profile(&mut rng, &inst, 2 * nv)?;
    Some((inst, profile))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exit_round_is_sum_of_positions(seed in any::<u64>()) {
        if let Some((inst, profile)) = random_case(seed) {
            let out = eval_paths(&inst, &profile).unwrap();
            for (k, d) in out.delays.iter().enumerate() {
                if let Delay::Finite(d) = d {
                    let start = inst.agents()[k].start_round;
                    prop_assert_eq!(*d, start + out.positions[k].iter().sum::<u32>());
                }
            }
        }
    }

    #[test]
    fn evaluator_matches_simulator(seed in any::<u64>()) {
        if let Some((inst, profile)) = random_case(seed) {
            let fast = eval_paths(&inst, &profile).unwrap();
            let slow = simulate(&inst, &profile);
            prop_assert_eq!(&fast.delays, &slow.delays);
            prop_assert_eq!(&fast.positions, &slow.positions);
            prop_assert_eq!(&fast.entry_rounds, &slow.entry_rounds);
            check_history(&inst, &slow);
            let again = simulate(&inst, &profile);
            prop_assert_eq!(&slow.history, &again.history);
            prop_assert_eq!(&slow.traces, &again.traces);
        }
    }
}
