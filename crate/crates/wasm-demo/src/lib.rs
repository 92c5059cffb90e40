//! Three operations for the static demo page in `www/`. Every function
//! returns a JSON string; failures come back as `{"error": "..."}` so the
//! page never has to catch exceptions.

use frog::engine::eval_paths;
use frog::fixtures::{example1, path_by_names};
use frog::gadgets::{reduce_3sat, run_loosener, ReduceOptions};
use frog::io::parse_dimacs;
use frog::solvers::br_decide;
use frog::{AgentId, Delay, Digraph, Path, RuleKind, SearchBudget};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(out: frog::Result<Value>) -> String {
    match out {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn delay_json(d: Delay) -> Value {
    match d {
        Delay::Finite(x) => json!(x),
        Delay::Infinite => Value::Null,
    }
}

fn edge_name(g: &Digraph, e: usize) -> String {
    format!("{}→{}", g.name(g.tail(e)), g.name(g.head(e)))
}

/// Lists the sink-reaching routes of both agents in the two-agent sample
/// game, as space-separated vertex names.
#[wasm_bindgen]
pub fn example_routes() -> String {
    json!({
        "agent1": ["a c f fi i k", "a c f j k", "a e g h j k"],
        "agent2": ["b d f fi i k", "b d f j k", "b d g h j k"],
    })
    .to_string()
}

/// Plays the sample game with the given routes (vertex names separated by
/// spaces) and reports, per agent, each edge with the round she enters it
/// and her position in its queue.
#[wasm_bindgen]
pub fn simulate_example(route1: &str, route2: &str) -> String {
    let inst = example1();
    let parse = |route: &str| -> frog::Result<Path> {
        let names: Vec<&str> = route.split_whitespace().collect();
        for w in names.windows(2) {
            if inst.graph.find_edge(w[0], w[1]).is_none() {
                return Err(frog::FrogError::InvalidInstance(format!("no edge {}→{}", w[0], w[1])));
            }
        }
        Ok(path_by_names(&inst, &names))
    };
    respond((|| {
        let profile = vec![parse(route1)?, parse(route2)?];
        let out = eval_paths(&inst, &profile)?;
        let agents: Vec<Value> = profile
            .iter()
            .enumerate()
            .map(|(k, path)| {
                let hops: Vec<Value> = path
                    .iter()
                    .enumerate()
                    .map(|(h, &e)| {
                        json!({
                            "edge": edge_name(&inst.graph, e),
                            "round": out.entry_rounds[k][h],
                            "position": out.positions[k][h],
                        })
                    })
                    .collect();
                json!({ "agent": k + 1, "delay": delay_json(out.delays[k]), "hops": hops })
            })
            .collect();
        Ok(json!({ "priority": "2 before 1", "agents": agents }))
    })())
}

/// Runs a loosener with trigger round `r` and the given consequence rounds
/// (comma separated) twice: once with the watched agent on the trigger edge
/// in time and once one round late. A third run routes her into the
/// gadget's entrance to show what the shortcut costs.
#[wasm_bindgen]
pub fn loosener_timing(r: u32, rounds: &str, red_count: u32, rr: bool) -> String {
    let kind = if rr { RuleKind::Rr } else { RuleKind::Ro };
    respond((|| {
        let rounds: Vec<u32> = rounds
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| frog::FrogError::Gadget(format!("bad round {s:?}"))))
            .collect::<frog::Result<_>>()?;
        let start = r.checked_sub(1).ok_or_else(|| frog::FrogError::Gadget("trigger round must be at least 1".into()))?;
        let hit = run_loosener(r, &rounds, red_count, start, false, kind)?;
        let miss = run_loosener(r, &rounds, red_count, start + 1, false, kind)?;
        let shortcut = run_loosener(r, &rounds, red_count, start, true, kind)?;
        Ok(json!({
            "scheduled": rounds,
            "hit": hit.gold_entries,
            "miss": miss.gold_entries,
            "shortcut_leaves_f0": shortcut.shortcut_pop,
            "reds_arrive": r + 2,
        }))
    })())
}

/// Compiles a 3-CNF (DIMACS text) into a game and asks whether the agent of
/// interest can finish by the threshold against the scripted agents. A yes
/// comes with the route, read back as a satisfying assignment.
#[wasm_bindgen]
pub fn reduce_and_solve(dimacs: &str, rr: bool) -> String {
    respond((|| {
        let cnf = parse_dimacs(dimacs.as_bytes())?;
        let opts = ReduceOptions { rule: if rr { RuleKind::Rr } else { RuleKind::Ro }, ..ReduceOptions::default() };
        let red = reduce_3sat(&cnf, &opts)?;
        let me: AgentId = red.agent_of_interest;
        let br = br_decide(&red.instance, me, &red.adversary_profile(), red.theta, &SearchBudget::default())?;
        let g = &red.instance.graph;
        let mut assignment = Vec::new();
        let mut witnesses = Vec::new();
        for &e in br.path.iter().flatten() {
            let head = g.name(g.head(e));
            if let Some(lit) = head.strip_prefix('x').filter(|s| s.ends_with(['+', '-'])) {
                let (var, sign) = lit.split_at(lit.len() - 1);
                assignment.push(format!("{}{var}", if sign == "+" { "" } else { "¬" }));
            } else if let Some((_, lit)) = head.split_once(':') {
                witnesses.push(lit.to_string());
            }
        }
        Ok(json!({
            "variables": red.m,
            "clauses": red.p,
            "vertices": g.num_vertices(),
            "edges": g.num_edges(),
            "agents": red.instance.n(),
            "theta": red.theta,
            "satisfiable": br.feasible,
            "delay": delay_json(br.delay),
            "assignment": assignment,
            "clause_witnesses": witnesses,
            "nodes_expanded": br.stats.nodes_expanded,
        }))
    })())
}
