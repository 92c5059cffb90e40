//! Decision and search procedures on top of the engine.
//!
//! Every solver restricts moves to viable successors (edges from which the
//! mover can still reach her sink). A detour into a dead end can only ever
//! produce an infinite delay for the mover herself, and under the three tie
//! rules her presence on another edge never helps anybody else reach a
//! sink earlier than the queue order already allows, so nothing is lost.

mod br;
mod br_re;
mod spe_ro;
mod spe_rr;
mod win;

use serde::Serialize;

use crate::engine::{deciders, options};
use crate::error::{FrogError, Result};
use crate::model::{AgentId, Configuration, Delay, EdgeIdx, Instance, Location};

pub use br::{br_decide, br_optimize, BrResult};
pub use br_re::{br_re, load_profile, BrReResult, LoadProfile};
pub use spe_ro::{spe_exist_ro, SpeExistAnswer, SpeExistResult, DEFAULT_SET_CAP};
pub use spe_rr::{certify_rr, spe_find_rr, Deviation, SpeWitness};
pub use win::{win, win_value, WinResult};

/// Search counters reported alongside answers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes_expanded: u64,
    pub memo_hits: u64,
}

impl Stats {
    pub(crate) fn expand(&mut self, cap: Option<u64>) -> Result<()> {
        self.nodes_expanded += 1;
        match cap {
            Some(c) if self.nodes_expanded > c => Err(FrogError::BudgetExhausted(c)),
            _ => Ok(()),
        }
    }
}

/// Viable options of a decider.
pub(crate) fn moves(instance: &Instance, config: &Configuration, agent: AgentId) -> Vec<EdgeIdx> {
    instance.viable(agent, &options(instance, config, agent))
}

/// Deciders paired with their viable options.
pub(crate) fn movers(instance: &Instance, config: &Configuration) -> Vec<(AgentId, Vec<EdgeIdx>)> {
    deciders(instance, config)
        .into_iter()
        .map(|a| (a, moves(instance, config, a)))
        .collect()
}

/// Earliest delay the agent could still achieve from `config`, ignoring
/// everybody else. Infinite when her sink is out of reach.
pub fn lower_bound(instance: &Instance, config: &Configuration, agent: AgentId) -> Delay {
    let g = &instance.graph;
    let a = instance.agent(agent);
    match config.locate(agent) {
        Location::Exited(d) => d,
        Location::Queued { edge, position } => {
            let head = g.head(edge);
            let pop = config.round + position - 1;
            if head == a.sink {
                Delay::Finite(pop)
            } else {
                match instance.dist_to_sink(agent, head) {
                    Some(d) => Delay::Finite(pop + d),
                    None => Delay::Infinite,
                }
            }
        }
        Location::Pending => match instance.dist_to_sink(agent, a.source) {
            Some(d) => Delay::Finite(config.round.max(a.start_round) + d),
            None => Delay::Infinite,
        },
    }
}

/// All joint choices of the given movers, in lexicographic order.
pub(crate) fn joint_actions(movers: &[(AgentId, Vec<EdgeIdx>)]) -> Vec<Vec<(AgentId, EdgeIdx)>> {
    let mut out: Vec<Vec<(AgentId, EdgeIdx)>> = vec![Vec::new()];
    for (a, opts) in movers {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for &e in opts {
                let mut v = prefix.clone();
                v.push((*a, e));
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Delay vector of a configuration once the round bound has been reached.
pub(crate) fn cutoff_delays(config: &Configuration) -> Vec<Delay> {
    config.exited.iter().map(|d| d.unwrap_or(Delay::Infinite)).collect()
}
