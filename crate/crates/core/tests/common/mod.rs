//! Brute-force references and random instance generators shared by the
//! integration tests. Nothing here memoizes or prunes.

#![allow(dead_code)]

use std::collections::BTreeMap;

use frog::engine::{deciders, eval_paths, options, step, turn_order};
use frog::model::{Agent, AgentId, Configuration, Delay, Digraph, EdgeIdx, Instance, SourceRank, TieRule};
use frog::{Path, PathProfile, RuleKind};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every walk from the agent's source that ends the first time it reaches
/// her sink, with at most `max_len` edges.
pub fn all_paths(inst: &Instance, agent: AgentId, max_len: usize) -> Vec<Path> {
    let g = &inst.graph;
    let a = inst.agent(agent);
    let mut out = Vec::new();
    let mut stack: Vec<Path> = g.out_edges(a.source).iter().map(|&e| vec![e]).collect();
    while let Some(p) = stack.pop() {
        let head = g.head(*p.last().unwrap());
        if head == a.sink {
            out.push(p);
            continue;
        }
        if p.len() >= max_len {
            continue;
        }
        for &e in g.out_edges(head) {
            let mut q = p.clone();
            q.push(e);
            stack.push(q);
        }
    }
    out
}

/// Optimal delay of `agent` against fixed paths by trying every walk.
pub fn br_brute(inst: &Instance, agent: AgentId, profile: &PathProfile, max_len: usize) -> Delay {
    let mut best = Delay::Infinite;
    for p in all_paths(inst, agent, max_len) {
        let mut joint = profile.clone();
        joint[agent.index()] = p;
        best = best.min(eval_paths(inst, &joint).unwrap().delays[agent.index()]);
    }
    best
}

fn viable(inst: &Instance, config: &Configuration, a: AgentId) -> Vec<EdgeIdx> {
    let sink = inst.agent(a).sink;
    let all = options(inst, config, a);
    let ok: Vec<EdgeIdx> = all
        .iter()
        .copied()
        .filter(|&e| {
            let h = inst.graph.head(e);
            h == sink || inst.dist_to_sink(a, h).is_some()
        })
        .collect();
    if ok.is_empty() {
        all
    } else {
        ok
    }
}

fn product(choices: &[(AgentId, Vec<EdgeIdx>)]) -> Vec<Vec<(AgentId, EdgeIdx)>> {
    let mut out = vec![Vec::new()];
    for (a, opts) in choices {
        out = out
            .into_iter()
            .flat_map(|p: Vec<(AgentId, EdgeIdx)>| {
                opts.iter().map(move |&e| {
                    let mut q = p.clone();
                    q.push((*a, e));
                    q
                })
            })
            .collect();
    }
    out
}

fn frozen(config: &Configuration) -> Vec<Delay> {
    config.exited.iter().map(|d| d.unwrap_or(Delay::Infinite)).collect()
}

/// Plain minimax value for `me`: she minimizes, everybody else maximizes.
pub fn minimax(inst: &Instance, me: AgentId, bound: u32) -> Delay {
    let root = Configuration::initial(inst);
    if inst.rule.kind() == RuleKind::Rr {
        minimax_turns(inst, me, bound, &root, &mut Vec::new())
    } else {
        minimax_sim(inst, me, bound, &root)
    }
}

fn minimax_sim(inst: &Instance, me: AgentId, bound: u32, c: &Configuration) -> Delay {
    if let Some(d) = c.exited[me.index()] {
        return d;
    }
    if c.round > bound {
        return Delay::Infinite;
    }
    let ds = deciders(inst, c);
    let mine: Vec<EdgeIdx> = if ds.contains(&me) { viable(inst, c, me) } else { vec![] };
    let others: Vec<(AgentId, Vec<EdgeIdx>)> =
        ds.iter().filter(|&&a| a != me).map(|&a| (a, viable(inst, c, a))).collect();
    let replies = product(&others);
    let worst = |own: Option<EdgeIdx>| {
        replies
            .iter()
            .map(|r| {
                let mut d = r.clone();
                if let Some(e) = own {
                    d.push((me, e));
                }
                minimax_sim(inst, me, bound, &step(inst, c, &d).unwrap().0)
            })
            .max()
            .unwrap()
    };
    if mine.is_empty() {
        worst(None)
    } else {
        mine.iter().map(|&e| worst(Some(e))).min().unwrap()
    }
}

fn next_mover(inst: &Instance, c: &Configuration, prior: &[(AgentId, EdgeIdx)]) -> Option<AgentId> {
    turn_order(inst, deciders(inst, c)).into_iter().find(|a| prior.iter().all(|(b, _)| b != a))
}

fn minimax_turns(
    inst: &Instance,
    me: AgentId,
    bound: u32,
    c: &Configuration,
    prior: &mut Vec<(AgentId, EdgeIdx)>,
) -> Delay {
    if let Some(d) = c.exited[me.index()] {
        return d;
    }
    if c.round > bound {
        return Delay::Infinite;
    }
    let Some(j) = next_mover(inst, c, prior) else {
        let next = step(inst, c, prior).unwrap().0;
        return minimax_turns(inst, me, bound, &next, &mut Vec::new());
    };
    let vals = viable(inst, c, j).into_iter().map(|e| {
        prior.push((j, e));
        let v = minimax_turns(inst, me, bound, c, prior);
        prior.pop();
        v
    });
    if j == me {
        vals.min().unwrap()
    } else {
        vals.max().unwrap()
    }
}

/// Backward induction on the explicit turn tree, lowest edge on ties.
pub fn backward_induction_rr(inst: &Instance, bound: u32) -> Vec<Delay> {
    bi(inst, bound, &Configuration::initial(inst), &mut Vec::new())
}

fn bi(inst: &Instance, bound: u32, c: &Configuration, prior: &mut Vec<(AgentId, EdgeIdx)>) -> Vec<Delay> {
    if c.is_terminal() || c.round > bound {
        return frozen(c);
    }
    let Some(j) = next_mover(inst, c, prior) else {
        let next = step(inst, c, prior).unwrap().0;
        return bi(inst, bound, &next, &mut Vec::new());
    };
    let mut best: Option<Vec<Delay>> = None;
    for e in viable(inst, c, j) {
        prior.push((j, e));
        let v = bi(inst, bound, c, prior);
        prior.pop();
        if best.as_ref().is_none_or(|b| v[j.index()] < b[j.index()]) {
            best = Some(v);
        }
    }
    best.unwrap()
}

/// Explicit history tree of a simultaneous game.
struct Node {
    config: Configuration,
    movers: Vec<(AgentId, Vec<EdgeIdx>)>,
    actions: Vec<Vec<(AgentId, EdgeIdx)>>,
    children: Vec<usize>,
}

fn build_tree(inst: &Instance, bound: u32, c: Configuration, nodes: &mut Vec<Node>, cap: usize) -> Option<usize> {
    if nodes.len() > cap {
        return None;
    }
    let id = nodes.len();
    let leaf = c.is_terminal() || c.round > bound;
    let movers: Vec<(AgentId, Vec<EdgeIdx>)> =
        if leaf { vec![] } else { deciders(inst, &c).into_iter().map(|a| (a, viable(inst, &c, a))).collect() };
    let actions = if leaf { vec![] } else { product(&movers) };
    nodes.push(Node { config: c.clone(), movers, actions: actions.clone(), children: vec![] });
    let mut kids = Vec::new();
    for a in &actions {
        let next = step(inst, &c, a).unwrap().0;
        kids.push(build_tree(inst, bound, next, nodes, cap)?);
    }
    nodes[id].children = kids;
    Some(id)
}

/// Whether some pure history-dependent profile is a subgame perfect
/// equilibrium, by enumerating every profile on the history tree and
/// testing one-shot deviations at every node. `None` when the tree or the
/// profile space exceeds the caps.
pub fn spe_exists_brute(inst: &Instance, bound: u32, node_cap: usize, profile_cap: u64) -> Option<(bool, Vec<Vec<Delay>>)> {
    let mut nodes = Vec::new();
    build_tree(inst, bound, Configuration::initial(inst), &mut nodes, node_cap)?;
    let inner: Vec<usize> = (0..nodes.len()).filter(|&k| nodes[k].actions.len() > 1).collect();
    let mut total: u64 = 1;
    for &k in &inner {
        total = total.checked_mul(nodes[k].actions.len() as u64)?;
        if total > profile_cap {
            return None;
        }
    }
    let mut pick = vec![0usize; nodes.len()];
    let mut outcomes: Vec<Vec<Delay>> = Vec::new();
    let mut value: Vec<Vec<Delay>> = vec![Vec::new(); nodes.len()];
    loop {
        // children have larger ids, so a reverse sweep evaluates bottom-up
        for k in (0..nodes.len()).rev() {
            value[k] =
                if nodes[k].actions.is_empty() { frozen(&nodes[k].config) } else { value[nodes[k].children[pick[k]]].clone() };
        }
        let ok = (0..nodes.len()).all(|k| one_shot_ok(&nodes, &value, k, pick[k]));
        if ok && !outcomes.contains(&value[0]) {
            outcomes.push(value[0].clone());
        }
        // odometer over inner nodes
        let mut i = 0;
        loop {
            if i == inner.len() {
                return Some((!outcomes.is_empty(), outcomes));
            }
            let k = inner[i];
            pick[k] += 1;
            if pick[k] < nodes[k].actions.len() {
                break;
            }
            pick[k] = 0;
            i += 1;
        }
    }
}

fn one_shot_ok(nodes: &[Node], value: &[Vec<Delay>], k: usize, chosen: usize) -> bool {
    let n = &nodes[k];
    if n.actions.is_empty() {
        return true;
    }
    let base = &n.actions[chosen];
    let v = &value[n.children[chosen]];
    for (j, (agent, opts)) in n.movers.iter().enumerate() {
        for &alt in opts {
            if alt == base[j].1 {
                continue;
            }
            let mut dev = base.clone();
            dev[j].1 = alt;
            let idx = n.actions.iter().position(|a| *a == dev).unwrap();
            if value[n.children[idx]][agent.index()] < v[agent.index()] {
                return false;
            }
        }
    }
    true
}

/// Random DAG over `nv` vertices where every agent can reach her sink.
pub fn random_dag_instance(rng: &mut StdRng, nv: usize, n: usize, density: f64, rule: RuleKind) -> Instance {
    loop {
        let names: Vec<String> = (0..nv).map(|k| format!("v{k}")).collect();
        let mut g = Digraph::new();
        for name in &names {
            g.add_vertex(name).unwrap();
        }
        for i in 0..nv {
            for j in i + 1..nv {
                if rng.gen_bool(density) {
                    g.add_edge(i, j);
                }
            }
        }
        let mut agents = Vec::new();
        for k in 0..n {
            let s = rng.gen_range(0..nv - 1);
            let t = rng.gen_range(s + 1..nv);
            agents.push(Agent { id: AgentId(k as u32 + 1), source: s, sink: t, start_round: rng.gen_range(0..2) });
        }
        let rule = random_rule(rng, &g, n, rule);
        let inst = Instance::new(g, agents, rule);
        if inst.validate(false).is_empty() {
            return inst;
        }
    }
}

/// Random digraph that may contain cycles.
pub fn random_cyclic_instance(rng: &mut StdRng, nv: usize, n: usize, ne: usize, rule: RuleKind) -> Instance {
    loop {
        let mut g = Digraph::new();
        for k in 0..nv {
            g.add_vertex(&format!("v{k}")).unwrap();
        }
        for _ in 0..ne {
            let t = rng.gen_range(0..nv);
            let h = rng.gen_range(0..nv);
            if t != h {
                g.add_edge(t, h);
            }
        }
        let agents: Vec<Agent> = (0..n)
            .map(|k| {
                let s = rng.gen_range(0..nv);
                let mut t = rng.gen_range(0..nv);
                while t == s {
                    t = rng.gen_range(0..nv);
                }
                Agent { id: AgentId(k as u32 + 1), source: s, sink: t, start_round: rng.gen_range(0..3) }
            })
            .collect();
        let rule = random_rule(rng, &g, n, rule);
        let inst = Instance::new(g, agents, rule);
        if inst.validate(false).is_empty() {
            return inst;
        }
    }
}

pub fn random_rule(rng: &mut StdRng, g: &Digraph, n: usize, kind: RuleKind) -> TieRule {
    let mut order: Vec<AgentId> = (1..=n as u32).map(AgentId).collect();
    order.shuffle(rng);
    match kind {
        RuleKind::Ro => TieRule::Ro { order },
        RuleKind::Rr => TieRule::Rr { order },
        RuleKind::Re => {
            let mut priorities = BTreeMap::new();
            for v in 0..g.num_vertices() {
                let mut inc = g.in_edges(v).to_vec();
                if !inc.is_empty() {
                    inc.shuffle(rng);
                    priorities.insert(v, inc);
                }
            }
            let source_rank = if rng.gen_bool(0.5) { SourceRank::First } else { SourceRank::Last };
            TieRule::Re { priorities, source_rank }
        }
    }
}

/// A uniformly random walk to the sink, or `None` when none is found.
pub fn random_path(rng: &mut StdRng, inst: &Instance, agent: AgentId, max_len: usize) -> Option<Path> {
    let g = &inst.graph;
    let a = inst.agent(agent);
    let mut v = a.source;
    let mut p = Vec::new();
    while p.len() < max_len {
        let opts: Vec<EdgeIdx> = g
            .out_edges(v)
            .iter()
            .copied()
            .filter(|&e| g.head(e) == a.sink || inst.dist_to_sink(agent, g.head(e)).is_some())
            .collect();
        let &e = opts.choose(rng)?;
        p.push(e);
        v = g.head(e);
        if v == a.sink {
            return Some(p);
        }
    }
    None
}

pub fn random_profile(rng: &mut StdRng, inst: &Instance, max_len: usize) -> Option<PathProfile> {
    inst.agent_ids().map(|a| random_path(rng, inst, a, max_len)).collect()
}

/// Truth value of a CNF under an assignment given as a bit mask.
pub fn cnf_holds(clauses: &[[i32; 3]], mask: u32) -> bool {
    clauses.iter().all(|c| {
        c.iter().any(|&l| {
            let bit = mask >> (l.unsigned_abs() - 1) & 1 == 1;
            if l > 0 {
                bit
            } else {
                !bit
            }
        })
    })
}

pub fn satisfiable(m: u32, clauses: &[[i32; 3]]) -> bool {
    (0..1u32 << m).any(|mask| cnf_holds(clauses, mask))
}

/// Recursive QBF evaluation; `exists[k]` quantifies variable `k + 1`.
pub fn qbf_holds(exists: &[bool], clauses: &[[i32; 3]]) -> bool {
    fn go(k: usize, exists: &[bool], clauses: &[[i32; 3]], mask: u32) -> bool {
        if k == exists.len() {
            return cnf_holds(clauses, mask);
        }
        let f = go(k + 1, exists, clauses, mask);
        let t = go(k + 1, exists, clauses, mask | 1 << k);
        if exists[k] {
            f || t
        } else {
            f && t
        }
    }
    go(0, exists, clauses, 0)
}

pub fn random_clauses(rng: &mut StdRng, m: u32, p: usize) -> Vec<[i32; 3]> {
    (0..p)
        .map(|_| {
            let mut c = [0i32; 3];
            for l in &mut c {
                let v = rng.gen_range(1..=m as i32);
                *l = if rng.gen_bool(0.5) { v } else { -v };
            }
            c
        })
        .collect()
}

