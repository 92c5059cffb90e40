use std::collections::HashMap;

use serde::Serialize;

use crate::engine::{deciders, run_from, step, turn_order, StateKey};
use crate::error::{FrogError, Result};
use crate::model::{AgentId, Configuration, Delay, DelayVector, EdgeIdx, Instance, PathProfile, RuleKind, SearchBudget};
use crate::solvers::{cutoff_delays, moves, Stats};

/// A subgame perfect equilibrium found by backward induction.
#[derive(Clone, Debug, Serialize)]
pub struct SpeWitness {
    pub paths: PathProfile,
    pub delays: DelayVector,
    /// Chosen edge at every branching turn the induction visited.
    #[serde(skip)]
    pub table: HashMap<StateKey, EdgeIdx>,
}

/// A profitable one-shot deviation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub state: String,
    pub agent: AgentId,
    pub chosen: EdgeIdx,
    pub alternative: EdgeIdx,
    pub chosen_delay: Delay,
    pub alternative_delay: Delay,
}

/// Backward induction over round-robin turns. Each mover minimizes her own
/// delay given the continuation, breaking ties toward the lowest edge index.
pub fn spe_find_rr(instance: &Instance, budget: &SearchBudget) -> Result<(SpeWitness, Stats)> {
    instance.ensure_valid()?;
    if instance.rule.kind() != RuleKind::Rr {
        return Err(FrogError::WrongRule { expected: "RR", found: instance.rule.kind().as_str() });
    }
    let mut bi = Induction {
        instance,
        bound: budget.rounds(instance),
        node_cap: budget.node_budget,
        memo: HashMap::new(),
        table: HashMap::new(),
        stats: Stats::default(),
    };
    let delays = bi.value(StateKey::root(instance))?;
    let table = bi.table;
    let outcome = replay(instance, StateKey::root(instance), &table, budget, |_, _, _| {})?;
    if outcome.1 != delays {
        return Err(FrogError::InvalidInstance(format!(
            "replayed delays {:?} differ from induced values {:?}",
            outcome.1, delays
        )));
    }
    Ok((SpeWitness { paths: outcome.0, delays, table }, bi.stats))
}

/// Checks every on-path branching turn for a profitable one-shot deviation.
/// Returns the deviations found; an empty list certifies the witness.
pub fn certify_rr(instance: &Instance, witness: &SpeWitness, budget: &SearchBudget) -> Result<Vec<Deviation>> {
    let mut visited: Vec<(StateKey, AgentId, EdgeIdx)> = Vec::new();
    replay(instance, StateKey::root(instance), &witness.table, budget, |key, a, e| {
        visited.push((key.clone(), a, e));
    })?;
    let mut out = Vec::new();
    for (key, agent, chosen) in visited {
        // value of the chosen edge from this turn on
        let mut from_here = key.clone();
        from_here.prior.push((agent, chosen));
        let base = replay(instance, from_here, &witness.table, budget, |_, _, _| {})?.1[agent.index()];
        for alt in moves(instance, &key.config, agent) {
            if alt == chosen {
                continue;
            }
            let mut child = key.clone();
            child.prior.push((agent, alt));
            let got = replay(instance, child, &witness.table, budget, |_, _, _| {})?.1[agent.index()];
            if got < base {
                out.push(Deviation {
                    state: key.canonical(),
                    agent,
                    chosen,
                    alternative: alt,
                    chosen_delay: base,
                    alternative_delay: got,
                });
            }
        }
    }
    Ok(out)
}

/// Plays the table from `start`; forced turns take the only viable edge.
/// `on_branch` sees every branching turn with the edge played there.
fn replay<F>(
    instance: &Instance,
    start: StateKey,
    table: &HashMap<StateKey, EdgeIdx>,
    budget: &SearchBudget,
    mut on_branch: F,
) -> Result<(PathProfile, DelayVector)>
where
    F: FnMut(&StateKey, AgentId, EdgeIdx),
{
    let policy = |agent: AgentId, config: &Configuration, prior: &[(AgentId, EdgeIdx)]| -> Result<EdgeIdx> {
        let opts = moves(instance, config, agent);
        if opts.len() == 1 {
            return Ok(opts[0]);
        }
        let key = StateKey { config: config.clone(), prior: prior.to_vec() };
        let e = table
            .get(&key)
            .copied()
            .ok_or_else(|| FrogError::StrategyUndefined { agent, key: key.canonical() })?;
        on_branch(&key, agent, e);
        Ok(e)
    };
    let out = run_from(instance, start, policy, budget)?;
    Ok((out.paths, out.delays))
}

struct Induction<'a> {
    instance: &'a Instance,
    bound: u32,
    node_cap: Option<u64>,
    memo: HashMap<StateKey, DelayVector>,
    table: HashMap<StateKey, EdgeIdx>,
    stats: Stats,
}

impl Induction<'_> {
    fn value(&mut self, key: StateKey) -> Result<DelayVector> {
        let inst = self.instance;
        let StateKey { mut config, mut prior } = key;
        loop {
            if config.is_terminal() || config.round > self.bound {
                return Ok(cutoff_delays(&config));
            }
            let order = turn_order(inst, deciders(inst, &config));
            let Some(mover) = order.into_iter().find(|a| prior.iter().all(|(b, _)| b != a)) else {
                config = step(inst, &config, &prior)?.0;
                prior.clear();
                continue;
            };
            let opts = moves(inst, &config, mover);
            if opts.len() == 1 {
                prior.push((mover, opts[0]));
                continue;
            }

            let key = StateKey { config, prior };
            if let Some(v) = self.memo.get(&key) {
                self.stats.memo_hits += 1;
                return Ok(v.clone());
            }
            self.stats.expand(self.node_cap)?;
            let mut best: Option<(EdgeIdx, DelayVector)> = None;
            for e in opts {
                let mut child = key.clone();
                child.prior.push((mover, e));
                let v = self.value(child)?;
                if best.as_ref().is_none_or(|(_, b)| v[mover.index()] < b[mover.index()]) {
                    best = Some((e, v));
                }
            }
            let (e, v) = best.expect("branching turn has options");
            self.table.insert(key.clone(), e);
            self.memo.insert(key, v.clone());
            return Ok(v);
        }
    }
}
