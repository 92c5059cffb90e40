//! Round-based simulation of the queue dynamics.
//!
//! At round `r` every non-empty queue pops its front agent. She exits if the
//! edge ends at her sink, exits with infinite delay if the edge has no
//! successor, and otherwise decides a successor edge. Agents whose start
//! round is `r` decide their first edge at the same time. Entrants are
//! appended behind the agents already queued, in tie-rule order.

mod eval;
mod trace;

use std::collections::HashMap;

pub(crate) use eval::check_path;
pub use eval::{eval_paths, EvalOutcome};
pub use trace::{format_trace, to_dot};

use crate::error::{FrogError, Result};
use crate::model::{
    AgentId, Configuration, Delay, DelayVector, EdgeIdx, Instance, Location, Origin, Path, PathProfile,
    RuleKind, SearchBudget,
};

/// What a popping agent does this round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    Edge(EdgeIdx),
    Exit,
    Stuck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub agent: AgentId,
    pub choice: Choice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub agent: AgentId,
    pub edge: EdgeIdx,
    /// 1-based position in the queue right after entering.
    pub position: u32,
}

/// Everything that happened during one round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepTrace {
    pub round: u32,
    pub deciders: Vec<AgentId>,
    pub decisions: Vec<Decision>,
    /// In tie-resolved order.
    pub insertions: Vec<Insertion>,
    pub exits: Vec<(AgentId, Delay)>,
}

/// A configuration plus the decisions already taken this round. The prefix
/// is only non-empty under RR, where later movers observe earlier turns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateKey {
    pub config: Configuration,
    pub prior: Vec<(AgentId, EdgeIdx)>,
}

impl StateKey {
    pub fn root(instance: &Instance) -> Self {
        StateKey { config: Configuration::initial(instance), prior: Vec::new() }
    }

    /// Text form used in strategy files:
    /// `r=<round>|q=<edge>:<ids>;...|x=<id>:<delay>;...|t=<id>:<edge>;...`
    pub fn canonical(&self) -> String {
        let c = &self.config;
        let queues: Vec<String> = c
            .queues
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_empty())
            .map(|(e, q)| {
                let ids: Vec<String> = q.iter().map(|&a| (a + 1).to_string()).collect();
                format!("{e}:{}", ids.join(","))
            })
            .collect();
        let exits: Vec<String> = c
            .exited
            .iter()
            .enumerate()
            .filter_map(|(a, d)| d.map(|d| format!("{}:{d}", a + 1)))
            .collect();
        let turns: Vec<String> = self.prior.iter().map(|(a, e)| format!("{a}:{e}")).collect();
        format!("r={}|q={}|x={}|t={}", c.round, queues.join(";"), exits.join(";"), turns.join(";"))
    }

    pub fn parse(text: &str, instance: &Instance) -> Result<Self> {
        let bad = |msg: &str| FrogError::Parse { line: 0, msg: format!("state key `{text}`: {msg}") };
        let parts: Vec<&str> = text.split('|').collect();
        let field = |k: usize, name: &str| -> Result<&str> {
            parts
                .get(k)
                .and_then(|p| p.strip_prefix(name))
                .ok_or_else(|| bad(&format!("missing `{name}`")))
        };
        let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad("bad number"));
        let mut config = Configuration::initial(instance);
        config.round = num(field(0, "r=")?)?;
        for item in field(1, "q=")?.split(';').filter(|s| !s.is_empty()) {
            let (e, ids) = item.split_once(':').ok_or_else(|| bad("queue entry"))?;
            let e = num(e)? as usize;
            let q = config.queues.get_mut(e).ok_or_else(|| bad("edge out of range"))?;
            for id in ids.split(',') {
                let id = num(id)?;
                if id == 0 || id as usize > instance.n() {
                    return Err(bad("agent out of range"));
                }
                q.push(id - 1);
            }
        }
        for item in field(2, "x=")?.split(';').filter(|s| !s.is_empty()) {
            let (a, d) = item.split_once(':').ok_or_else(|| bad("exit entry"))?;
            let a = num(a)? as usize;
            let d = if d == "inf" { Delay::Infinite } else { Delay::Finite(num(d)?) };
            *config.exited.get_mut(a.wrapping_sub(1)).ok_or_else(|| bad("agent out of range"))? = Some(d);
        }
        let mut prior = Vec::new();
        for item in field(3, "t=")?.split(';').filter(|s| !s.is_empty()) {
            let (a, e) = item.split_once(':').ok_or_else(|| bad("turn entry"))?;
            prior.push((AgentId(num(a)?), num(e)? as EdgeIdx));
        }
        Ok(StateKey { config, prior })
    }
}

/// Agents that must choose an edge at this configuration, sorted by id.
pub fn deciders(instance: &Instance, config: &Configuration) -> Vec<AgentId> {
    let g = &instance.graph;
    let mut out = Vec::new();
    for (e, q) in config.queues.iter().enumerate() {
        if let Some(&a) = q.first() {
            let id = AgentId::from_index(a as usize);
            let head = g.head(e);
            if head != instance.agent(id).sink && !g.out_edges(head).is_empty() {
                out.push(id);
            }
        }
    }
    for id in pending_starters(instance, config) {
        out.push(id);
    }
    out.sort();
    out
}

fn pending_starters(instance: &Instance, config: &Configuration) -> Vec<AgentId> {
    let mut queued = vec![false; instance.n()];
    for q in &config.queues {
        for &a in q {
            queued[a as usize] = true;
        }
    }
    instance
        .agents()
        .iter()
        .filter(|a| {
            let k = a.id.index();
            a.start_round == config.round && !queued[k] && config.exited[k].is_none()
        })
        .map(|a| a.id)
        .collect()
}

/// Edges the agent may pick at this configuration (all of `F(e)`, or the
/// out-edges of her source before she has started).
pub fn options(instance: &Instance, config: &Configuration, agent: AgentId) -> Vec<EdgeIdx> {
    let g = &instance.graph;
    match config.locate(agent) {
        Location::Pending => g.out_edges(instance.agent(agent).source).to_vec(),
        Location::Queued { edge, position: 1 } => g.out_edges(g.head(edge)).to_vec(),
        _ => Vec::new(),
    }
}

/// Order in which deciders act under RR (and insert under RO).
pub fn turn_order(instance: &Instance, mut movers: Vec<AgentId>) -> Vec<AgentId> {
    movers.sort_by_key(|&a| instance.tie_key(a, Origin::Source));
    movers
}

/// Computes `Q(r+1)` from `Q(r)`. `decisions` must cover exactly the deciders.
pub fn step(
    instance: &Instance,
    config: &Configuration,
    decisions: &[(AgentId, EdgeIdx)],
) -> Result<(Configuration, StepTrace)> {
    let g = &instance.graph;
    let r = config.round;
    let mut chosen: HashMap<AgentId, EdgeIdx> = HashMap::with_capacity(decisions.len());
    for &(a, e) in decisions {
        if a.index() >= instance.n() {
            return Err(FrogError::UnknownAgent(a));
        }
        if chosen.insert(a, e).is_some() {
            return Err(FrogError::IllegalDecision { agent: a, reason: "decided twice".into() });
        }
    }
    let mut next = config.clone();
    next.round = r + 1;
    let mut trace = StepTrace { round: r, ..Default::default() };
    let mut entrants: Vec<((usize, usize), AgentId, EdgeIdx)> = Vec::new();

    let mut take = |agent: AgentId, allowed: &[EdgeIdx], origin: Origin| -> Result<()> {
        let e = chosen.remove(&agent).ok_or(FrogError::MissingDecision(agent))?;
        if !allowed.contains(&e) {
            return Err(FrogError::IllegalDecision {
                agent,
                reason: format!("edge {e} is not an available successor"),
            });
        }
        entrants.push((instance.tie_key(agent, origin), agent, e));
        Ok(())
    };

    for (e, q) in config.queues.iter().enumerate() {
        let Some(&a) = q.first() else { continue };
        next.queues[e].remove(0);
        let agent = AgentId::from_index(a as usize);
        let head = g.head(e);
        if head == instance.agent(agent).sink {
            next.exited[a as usize] = Some(Delay::Finite(r));
            trace.exits.push((agent, Delay::Finite(r)));
            trace.decisions.push(Decision { agent, choice: Choice::Exit });
        } else if g.out_edges(head).is_empty() {
            next.exited[a as usize] = Some(Delay::Infinite);
            trace.exits.push((agent, Delay::Infinite));
            trace.decisions.push(Decision { agent, choice: Choice::Stuck });
        } else {
            trace.deciders.push(agent);
            take(agent, g.out_edges(head), Origin::Edge(e))?;
        }
    }
    for agent in pending_starters(instance, config) {
        trace.deciders.push(agent);
        take(agent, g.out_edges(instance.agent(agent).source), Origin::Source)?;
    }
    if let Some((&agent, _)) = chosen.iter().next() {
        return Err(FrogError::IllegalDecision { agent, reason: "agent does not decide this round".into() });
    }

    entrants.sort_by_key(|(key, _, _)| *key);
    for (_, agent, e) in entrants {
        trace.decisions.push(Decision { agent, choice: Choice::Edge(e) });
        next.queues[e].push(agent.index() as u32);
        trace.insertions.push(Insertion { agent, edge: e, position: next.queues[e].len() as u32 });
    }
    trace.deciders.sort();
    Ok((next, trace))
}

/// Per-agent behaviour for [`run`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgentStrategy {
    /// Replays a path edge by edge.
    FixedPath(Path),
    /// Looks up the next edge by state key.
    Table(HashMap<StateKey, EdgeIdx>),
}

/// Result of a simulation.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub paths: PathProfile,
    pub delays: DelayVector,
    /// `Q(r0), Q(r0+1), ...` from the starting configuration on.
    pub history: Vec<Configuration>,
    pub traces: Vec<StepTrace>,
    /// Per agent and hop, the position taken in the entered queue.
    pub positions: Vec<Vec<u32>>,
    /// Per agent and hop, the round `r` such that she appears in `Q_e(r)` first.
    pub entry_rounds: Vec<Vec<u32>>,
}

/// Simulates a strategy profile from the empty configuration.
pub fn run(instance: &Instance, strategies: &[AgentStrategy], budget: &SearchBudget) -> Result<RunOutcome> {
    instance.ensure_valid()?;
    if strategies.len() != instance.n() {
        return Err(FrogError::InvalidInstance(format!(
            "{} strategies given for {} agents",
            strategies.len(),
            instance.n()
        )));
    }
    let mut hops = vec![0usize; instance.n()];
    let policy = |agent: AgentId, config: &Configuration, prior: &[(AgentId, EdgeIdx)]| -> Result<EdgeIdx> {
        let k = agent.index();
        match &strategies[k] {
            AgentStrategy::FixedPath(p) => {
                let e = *p.get(hops[k]).ok_or_else(|| FrogError::InvalidPath {
                    agent,
                    reason: "path ended before the sink was reached".into(),
                })?;
                hops[k] += 1;
                Ok(e)
            }
            AgentStrategy::Table(t) => {
                let key = StateKey { config: config.clone(), prior: prior.to_vec() };
                t.get(&key)
                    .copied()
                    .ok_or_else(|| FrogError::StrategyUndefined { agent, key: key.canonical() })
            }
        }
    };
    run_from(instance, StateKey::root(instance), policy, budget)
}

/// Simulates from an arbitrary state with a decision callback
/// `(agent, configuration, earlier turns this round) -> edge`.
pub fn run_from<P>(instance: &Instance, start: StateKey, mut policy: P, budget: &SearchBudget) -> Result<RunOutcome>
where
    P: FnMut(AgentId, &Configuration, &[(AgentId, EdgeIdx)]) -> Result<EdgeIdx>,
{
    let n = instance.n();
    let bound = budget.rounds(instance);
    let sequential = instance.rule.kind() == RuleKind::Rr;
    let mut out = RunOutcome {
        paths: vec![Vec::new(); n],
        positions: vec![Vec::new(); n],
        entry_rounds: vec![Vec::new(); n],
        ..Default::default()
    };
    let StateKey { mut config, mut prior } = start;
    out.history.push(config.clone());
    while !config.is_terminal() && config.round <= bound {
        let movers = turn_order(instance, deciders(instance, &config));
        let mut decisions = std::mem::take(&mut prior);
        for a in movers {
            if decisions.iter().any(|&(b, _)| b == a) {
                continue;
            }
            let e = if sequential { policy(a, &config, &decisions)? } else { policy(a, &config, &[])? };
            decisions.push((a, e));
        }
        let (next, trace) = step(instance, &config, &decisions)?;
        for ins in &trace.insertions {
            let k = ins.agent.index();
            out.paths[k].push(ins.edge);
            out.positions[k].push(ins.position);
            out.entry_rounds[k].push(trace.round + 1);
        }
        out.traces.push(trace);
        config = next;
        out.history.push(config.clone());
    }
    out.delays = config.exited.iter().map(|d| d.unwrap_or(Delay::Infinite)).collect();
    Ok(out)
}
