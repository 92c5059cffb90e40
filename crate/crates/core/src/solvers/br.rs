use std::collections::HashMap;

use serde::Serialize;

use crate::engine::{check_path, deciders, eval_paths, step};
use crate::error::{FrogError, Result};
use crate::model::{AgentId, Configuration, Delay, EdgeIdx, Instance, Path, PathProfile, SearchBudget};
use crate::solvers::{lower_bound, moves, Stats};

/// Answer of a best-response query against fixed adversary paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrResult {
    pub feasible: bool,
    /// Delay of `path` (certified by path evaluation), or the best found.
    pub delay: Delay,
    pub path: Option<Path>,
    pub stats: Stats,
}

/// Is there a path for `agent` reaching her sink by round `theta` while
/// everyone else follows `profile`? The agent's own entry in `profile` is
/// ignored and may be empty.
pub fn br_decide(
    instance: &Instance,
    agent: AgentId,
    profile: &PathProfile,
    theta: u32,
    budget: &SearchBudget,
) -> Result<BrResult> {
    let mut search = Search::new(instance, agent, profile, theta, false, budget)?;
    search.start()?;
    search.finish()
}

/// Minimum delay `agent` can achieve against the fixed paths in `profile`.
pub fn br_optimize(
    instance: &Instance,
    agent: AgentId,
    profile: &PathProfile,
    budget: &SearchBudget,
) -> Result<BrResult> {
    let bound = budget.rounds(instance);
    let mut search = Search::new(instance, agent, profile, bound, true, budget)?;
    search.start()?;
    search.finish()
}

type Key = (Configuration, Vec<u32>);

struct Search<'a> {
    instance: &'a Instance,
    me: AgentId,
    profile: &'a PathProfile,
    bound: u32,
    /// Largest delay still worth looking for.
    threshold: u32,
    optimize: bool,
    node_cap: Option<u64>,
    /// State -> largest threshold proven unreachable from it.
    failed: HashMap<Key, u32>,
    best: Option<(u32, Path)>,
    stats: Stats,
}

impl<'a> Search<'a> {
    fn new(
        instance: &'a Instance,
        me: AgentId,
        profile: &'a PathProfile,
        theta: u32,
        optimize: bool,
        budget: &SearchBudget,
    ) -> Result<Self> {
        instance.ensure_valid()?;
        if me.index() >= instance.n() {
            return Err(FrogError::UnknownAgent(me));
        }
        if profile.len() != instance.n() {
            return Err(FrogError::InvalidInstance(format!(
                "{} paths given for {} agents",
                profile.len(),
                instance.n()
            )));
        }
        for a in instance.agent_ids().filter(|&a| a != me) {
            check_path(instance, a, &profile[a.index()])?;
        }
        let bound = budget.rounds(instance);
        Ok(Search {
            instance,
            me,
            profile,
            bound,
            threshold: theta.min(bound),
            optimize,
            node_cap: budget.node_budget,
            failed: HashMap::new(),
            best: None,
            stats: Stats::default(),
        })
    }

    fn start(&mut self) -> Result<()> {
        let config = Configuration::initial(self.instance);
        let progress = vec![0; self.instance.n()];
        let mut path = Vec::new();
        self.dfs(config, progress, &mut path)
    }

    fn done(&self) -> bool {
        !self.optimize && self.best.is_some()
    }

    /// Follows forced moves, then branches over the agent's viable options.
    fn dfs(&mut self, mut config: Configuration, mut progress: Vec<u32>, path: &mut Vec<EdgeIdx>) -> Result<()> {
        let inst = self.instance;
        let me = self.me;
        let depth = path.len();
        let result = loop {
            if let Some(d) = config.exited[me.index()] {
                if let Delay::Finite(v) = d {
                    if v <= self.threshold {
                        self.best = Some((v, path.clone()));
                        if self.optimize {
                            self.threshold = v.saturating_sub(1);
                        }
                    }
                }
                break Ok(());
            }
            if config.round > self.bound || config.is_terminal() {
                break Ok(());
            }
            match lower_bound(inst, &config, me) {
                Delay::Finite(lb) if lb <= self.threshold => {}
                _ => break Ok(()),
            }
            let mut decisions = Vec::new();
            let mut mine = None;
            for a in deciders(inst, &config) {
                if a == me {
                    mine = Some(moves(inst, &config, a));
                } else {
                    let k = a.index();
                    decisions.push((a, self.profile[k][progress[k] as usize]));
                    progress[k] += 1;
                }
            }
            match mine {
                Some(opts) if opts.len() > 1 => break self.branch(config, progress, decisions, opts, path),
                Some(opts) => {
                    decisions.push((me, opts[0]));
                    path.push(opts[0]);
                }
                None => {}
            }
            config = step(inst, &config, &decisions)?.0;
        };
        path.truncate(depth);
        result
    }

    fn branch(
        &mut self,
        config: Configuration,
        progress: Vec<u32>,
        decisions: Vec<(AgentId, EdgeIdx)>,
        opts: Vec<EdgeIdx>,
        path: &mut Vec<EdgeIdx>,
    ) -> Result<()> {
        // progress already counts this round's adversary moves
        let key = (config, progress);
        if let Some(&t) = self.failed.get(&key) {
            if t >= self.threshold {
                self.stats.memo_hits += 1;
                return Ok(());
            }
        }
        self.stats.expand(self.node_cap)?;
        let entry = self.threshold;
        let best_before = self.best.as_ref().map(|b| b.0);
        for e in opts {
            let mut d = decisions.clone();
            d.push((self.me, e));
            let next = step(self.instance, &key.0, &d)?.0;
            path.push(e);
            self.dfs(next, key.1.clone(), path)?;
            path.pop();
            if self.done() {
                return Ok(());
            }
        }
        let improved = self.best.as_ref().map(|b| b.0) != best_before;
        let proven = if improved { self.threshold } else { entry };
        let slot = self.failed.entry(key).or_insert(proven);
        *slot = (*slot).max(proven);
        Ok(())
    }

    fn finish(self) -> Result<BrResult> {
        let Some((value, mut path)) = self.best else {
            return Ok(BrResult { feasible: false, delay: Delay::Infinite, path: None, stats: self.stats });
        };
        path.shrink_to_fit();
        let mut joint = self.profile.clone();
        joint[self.me.index()] = path.clone();
        let certified = eval_paths(self.instance, &joint)?.delays[self.me.index()];
        if certified != Delay::Finite(value) {
            return Err(FrogError::InvalidPath {
                agent: self.me,
                reason: format!("search found delay {value} but evaluation gives {certified}"),
            });
        }
        Ok(BrResult { feasible: true, delay: certified, path: Some(path), stats: self.stats })
    }
}
