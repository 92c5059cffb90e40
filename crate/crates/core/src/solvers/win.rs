use std::collections::HashMap;

use serde::Serialize;

use crate::engine::{deciders, step, turn_order, StateKey};
use crate::error::{FrogError, Result};
use crate::model::{AgentId, Configuration, Delay, EdgeIdx, Instance, RuleKind, SearchBudget};
use crate::solvers::{joint_actions, lower_bound, moves, Stats};

/// Outcome of a winning-strategy query.
#[derive(Clone, Debug, Serialize)]
pub struct WinResult {
    pub wins: bool,
    pub theta: u32,
    /// The agent's choices at the states where the search proved a win.
    #[serde(skip)]
    pub strategy: HashMap<StateKey, EdgeIdx>,
    pub stats: Stats,
}

/// Can `agent` guarantee reaching her sink by round `theta`, whatever the
/// others do?
pub fn win(instance: &Instance, agent: AgentId, theta: u32, budget: &SearchBudget) -> Result<WinResult> {
    instance.ensure_valid()?;
    if agent.index() >= instance.n() {
        return Err(FrogError::UnknownAgent(agent));
    }
    let mut game = Game {
        instance,
        me: agent,
        theta,
        bound: budget.rounds(instance),
        node_cap: budget.node_budget,
        sequential: instance.rule.kind() == RuleKind::Rr,
        memo: HashMap::new(),
        strategy: HashMap::new(),
        stats: Stats::default(),
    };
    let wins = game.solve(StateKey::root(instance))?;
    if !wins {
        game.strategy.clear();
    }
    Ok(WinResult { wins, theta, strategy: game.strategy, stats: game.stats })
}

/// Smallest `theta` the agent can guarantee, with the matching strategy.
/// Infinite when no guarantee exists within the round bound.
pub fn win_value(instance: &Instance, agent: AgentId, budget: &SearchBudget) -> Result<(Delay, WinResult)> {
    instance.ensure_valid()?;
    if agent.index() >= instance.n() {
        return Err(FrogError::UnknownAgent(agent));
    }
    let bound = budget.rounds(instance);
    let mut total = Stats::default();
    let run = |theta: u32, total: &mut Stats| -> Result<WinResult> {
        let r = win(instance, agent, theta, budget)?;
        total.nodes_expanded += r.stats.nodes_expanded;
        total.memo_hits += r.stats.memo_hits;
        Ok(r)
    };
    let mut best = run(bound, &mut total)?;
    if !best.wins {
        best.stats = total;
        return Ok((Delay::Infinite, best));
    }
    let mut lo = match lower_bound(instance, &Configuration::initial(instance), agent) {
        Delay::Finite(v) => v,
        Delay::Infinite => bound,
    };
    let mut hi = bound;
    // invariant: hi wins, everything below lo loses
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = run(mid, &mut total)?;
        if r.wins {
            hi = mid;
            best = r;
        } else {
            lo = mid + 1;
        }
    }
    best.stats = total;
    Ok((Delay::Finite(hi), best))
}

struct Game<'a> {
    instance: &'a Instance,
    me: AgentId,
    theta: u32,
    bound: u32,
    node_cap: Option<u64>,
    sequential: bool,
    memo: HashMap<StateKey, bool>,
    strategy: HashMap<StateKey, EdgeIdx>,
    stats: Stats,
}

impl Game<'_> {
    /// Settled outcome for the agent, if the state decides it already.
    fn settled(&self, config: &Configuration) -> Option<bool> {
        if let Some(d) = config.exited[self.me.index()] {
            return Some(d <= Delay::Finite(self.theta));
        }
        if config.round > self.bound {
            return Some(false);
        }
        match lower_bound(self.instance, config, self.me) {
            Delay::Finite(lb) if lb <= self.theta => None,
            _ => Some(false),
        }
    }

    fn solve(&mut self, key: StateKey) -> Result<bool> {
        if self.sequential {
            self.solve_turns(key)
        } else {
            self.solve_simultaneous(key.config)
        }
    }

    fn lookup(&mut self, key: &StateKey) -> Option<bool> {
        let hit = self.memo.get(key).copied();
        if hit.is_some() {
            self.stats.memo_hits += 1;
        }
        hit
    }

    fn solve_simultaneous(&mut self, mut config: Configuration) -> Result<bool> {
        let inst = self.instance;
        loop {
            if let Some(v) = self.settled(&config) {
                return Ok(v);
            }
            let all = deciders(inst, &config);
            let mut mine = None;
            let mut others = Vec::new();
            for a in all {
                let opts = moves(inst, &config, a);
                if a == self.me {
                    mine = Some(opts);
                } else {
                    others.push((a, opts));
                }
            }
            let forced = mine.as_ref().is_none_or(|o| o.len() == 1) && others.iter().all(|(_, o)| o.len() == 1);
            if forced {
                let mut decisions: Vec<(AgentId, EdgeIdx)> = others.iter().map(|(a, o)| (*a, o[0])).collect();
                if let Some(o) = &mine {
                    decisions.push((self.me, o[0]));
                    self.strategy.insert(StateKey { config: config.clone(), prior: Vec::new() }, o[0]);
                }
                config = step(inst, &config, &decisions)?.0;
                continue;
            }

            let key = StateKey { config, prior: Vec::new() };
            if let Some(v) = self.lookup(&key) {
                return Ok(v);
            }
            self.stats.expand(self.node_cap)?;
            let replies = joint_actions(&others);
            let my_opts = mine.clone().unwrap_or_default();
            let mut value = false;
            if my_opts.is_empty() {
                value = self.all_replies(&key.config, None, &replies)?;
            } else {
                for &e in &my_opts {
                    if self.all_replies(&key.config, Some(e), &replies)? {
                        self.strategy.insert(key.clone(), e);
                        value = true;
                        break;
                    }
                }
            }
            self.memo.insert(key, value);
            return Ok(value);
        }
    }

    fn all_replies(
        &mut self,
        config: &Configuration,
        mine: Option<EdgeIdx>,
        replies: &[Vec<(AgentId, EdgeIdx)>],
    ) -> Result<bool> {
        for reply in replies {
            let mut decisions = reply.clone();
            if let Some(e) = mine {
                decisions.push((self.me, e));
            }
            let next = step(self.instance, config, &decisions)?.0;
            if !self.solve_simultaneous(next)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Round-robin: every turn is its own node, owned by a single mover.
    fn solve_turns(&mut self, key: StateKey) -> Result<bool> {
        let inst = self.instance;
        let StateKey { mut config, mut prior } = key;
        loop {
            if let Some(v) = self.settled(&config) {
                return Ok(v);
            }
            let order = turn_order(inst, deciders(inst, &config));
            let Some(mover) = order.into_iter().find(|a| prior.iter().all(|(b, _)| b != a)) else {
                config = step(inst, &config, &prior)?.0;
                prior.clear();
                continue;
            };
            let opts = moves(inst, &config, mover);
            if opts.len() == 1 {
                if mover == self.me {
                    self.strategy.insert(StateKey { config: config.clone(), prior: prior.clone() }, opts[0]);
                }
                prior.push((mover, opts[0]));
                continue;
            }

            let key = StateKey { config, prior };
            if let Some(v) = self.lookup(&key) {
                return Ok(v);
            }
            self.stats.expand(self.node_cap)?;
            let mine = mover == self.me;
            // exists for the agent, for all for everybody else
            let mut value = !mine;
            for e in opts {
                let mut child = key.clone();
                child.prior.push((mover, e));
                let v = self.solve_turns(child)?;
                if mine && v {
                    self.strategy.insert(key.clone(), e);
                    value = true;
                    break;
                }
                if !mine && !v {
                    value = false;
                    break;
                }
            }
            self.memo.insert(key, value);
            return Ok(value);
        }
    }
}
