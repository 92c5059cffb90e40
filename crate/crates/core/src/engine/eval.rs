use std::collections::BTreeMap;

use crate::error::{FrogError, Result};
use crate::model::{AgentId, Delay, DelayVector, Instance, Origin, PathProfile};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub delays: DelayVector,
    /// `w_i(pi, l)`: position in the queue of hop `l` when entering it.
    pub positions: Vec<Vec<u32>>,
    pub entry_rounds: Vec<Vec<u32>>,
}

/// Evaluates a fixed path profile by jumping from one pop event to the next.
///
/// An agent released at round `t` enters her next edge `e` in `Q(t+1)` and
/// pops at `max(t + 1, last_pop(e) + 1)`, so her queue position is that pop
/// round minus `t`. Releases of the same round are processed in tie order.
pub fn eval_paths(instance: &Instance, profile: &PathProfile) -> Result<EvalOutcome> {
    instance.ensure_valid()?;
    let g = &instance.graph;
    let n = instance.n();
    if profile.len() != n {
        return Err(FrogError::InvalidInstance(format!("{} paths given for {n} agents", profile.len())));
    }
    for (k, path) in profile.iter().enumerate() {
        check_path(instance, AgentId::from_index(k), path)?;
    }

    let mut last_pop: Vec<Option<u32>> = vec![None; g.num_edges()];
    let mut delays = vec![Delay::Infinite; n];
    let mut positions = vec![Vec::new(); n];
    let mut entry_rounds = vec![Vec::new(); n];
    // release round -> (agent index, index of the hop about to be entered)
    let mut events: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for a in instance.agents() {
        events.entry(a.start_round).or_default().push((a.id.index(), 0));
    }
    while let Some((t, mut batch)) = events.pop_first() {
        batch.sort_by_key(|&(k, hop)| {
            let origin = if hop == 0 { Origin::Source } else { Origin::Edge(profile[k][hop - 1]) };
            instance.tie_key(AgentId::from_index(k), origin)
        });
        for (k, hop) in batch {
            let e = profile[k][hop];
            let pop = last_pop[e].map_or(t + 1, |p| (p + 1).max(t + 1));
            last_pop[e] = Some(pop);
            positions[k].push(pop - t);
            entry_rounds[k].push(t + 1);
            if hop + 1 == profile[k].len() {
                delays[k] = Delay::Finite(pop);
            } else {
                events.entry(pop).or_default().push((k, hop + 1));
            }
        }
    }
    Ok(EvalOutcome { delays, positions, entry_rounds })
}

/// A path is playable when it is connected, leaves the source and reaches
/// the sink exactly at its last edge (reaching it earlier forces an exit).
pub(crate) fn check_path(instance: &Instance, agent: AgentId, path: &[usize]) -> Result<()> {
    let g = &instance.graph;
    let a = instance.agent(agent);
    let fail = |reason: String| Err(FrogError::InvalidPath { agent, reason });
    if path.is_empty() {
        return fail("empty path".into());
    }
    if let Some(&e) = path.iter().find(|&&e| e >= g.num_edges()) {
        return fail(format!("edge {e} out of range"));
    }
    if g.tail(path[0]) != a.source {
        return fail("first edge does not leave the source".into());
    }
    for (l, w) in path.windows(2).enumerate() {
        if g.head(w[0]) != g.tail(w[1]) {
            return fail(format!("hops {l} and {} are not connected", l + 1));
        }
        if g.head(w[0]) == a.sink {
            return fail(format!("reaches the sink before the end (hop {l})"));
        }
    }
    if g.head(*path.last().unwrap()) != a.sink {
        return fail("last edge does not reach the sink".into());
    }
    Ok(())
}
