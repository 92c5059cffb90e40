use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::engine::step;
use crate::error::{FrogError, Result};
use crate::model::{AgentId, Configuration, DelayVector, EdgeIdx, Instance, PathProfile, RuleKind, SearchBudget};
use crate::solvers::{cutoff_delays, joint_actions, movers, Stats};

/// Largest supportable set tracked per configuration before giving up.
pub const DEFAULT_SET_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeExistAnswer {
    Yes,
    No,
    /// Some configuration supported more outcomes than the cap allows.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpeExistResult {
    pub answer: SpeExistAnswer,
    /// Outcomes some equilibrium can produce from the empty configuration.
    pub outcomes: Vec<DelayVector>,
    /// Equilibrium path of the first outcome when the answer is yes.
    pub paths: Option<PathProfile>,
    pub stats: Stats,
}

/// Supportable outcomes of one configuration, each with a joint action that
/// reaches a child supporting the same outcome.
#[derive(Debug, Default)]
struct Support {
    outcomes: Vec<DelayVector>,
    actions: Vec<Vec<(AgentId, EdgeIdx)>>,
}

struct CapExceeded;

/// Decides whether a subgame perfect equilibrium exists under simultaneous
/// agent-order tie-breaking.
///
/// The search computes, for every configuration, the set of delay vectors
/// that some equilibrium of that subgame yields. An outcome `v` is
/// supportable when a joint action leads to a child supporting `v` and every
/// other child a unilateral deviation can reach supports some outcome that
/// leaves each of its deviators no better off than under `v`. Strategies may
/// depend on the history, so each child can be assigned a different
/// continuation for every parent.
pub fn spe_exist_ro(instance: &Instance, budget: &SearchBudget, cap: usize) -> Result<SpeExistResult> {
    instance.ensure_valid()?;
    if instance.rule.kind() != RuleKind::Ro {
        return Err(FrogError::WrongRule { expected: "RO", found: instance.rule.kind().as_str() });
    }
    let mut s = Sets {
        instance,
        bound: budget.rounds(instance),
        node_cap: budget.node_budget,
        cap,
        memo: HashMap::new(),
        stats: Stats::default(),
    };
    let root = Configuration::initial(instance);
    let support = match s.support(&root)? {
        Ok(sup) => sup,
        Err(CapExceeded) => {
            return Ok(SpeExistResult {
                answer: SpeExistAnswer::Inconclusive,
                outcomes: Vec::new(),
                paths: None,
                stats: s.stats,
            })
        }
    };
    if support.outcomes.is_empty() {
        return Ok(SpeExistResult { answer: SpeExistAnswer::No, outcomes: Vec::new(), paths: None, stats: s.stats });
    }
    let paths = s.equilibrium_path(&root, &support.outcomes[0])?;
    Ok(SpeExistResult {
        answer: SpeExistAnswer::Yes,
        outcomes: support.outcomes.clone(),
        paths: Some(paths),
        stats: s.stats,
    })
}

struct Sets<'a> {
    instance: &'a Instance,
    bound: u32,
    node_cap: Option<u64>,
    cap: usize,
    memo: HashMap<Configuration, Rc<Support>>,
    stats: Stats,
}

impl Sets<'_> {
    fn support(&mut self, config: &Configuration) -> Result<Result<Rc<Support>, CapExceeded>> {
        if let Some(s) = self.memo.get(config) {
            self.stats.memo_hits += 1;
            return Ok(Ok(s.clone()));
        }
        self.stats.expand(self.node_cap)?;
        let inst = self.instance;
        let mut out = Support::default();
        if config.is_terminal() || config.round > self.bound {
            out.outcomes.push(cutoff_delays(config));
            out.actions.push(Vec::new());
            return Ok(Ok(self.remember(config, out)));
        }

        let ms = movers(inst, config);
        let actions = joint_actions(&ms);
        let mut children: Vec<Configuration> = Vec::new();
        let mut child_of: Vec<usize> = Vec::with_capacity(actions.len());
        let mut sets: Vec<Rc<Support>> = Vec::new();
        for a in &actions {
            let next = step(inst, config, a)?.0;
            let idx = match children.iter().position(|c| *c == next) {
                Some(i) => i,
                None => {
                    let sup = match self.support(&next)? {
                        Ok(s) => s,
                        Err(e) => return Ok(Err(e)),
                    };
                    if sup.outcomes.is_empty() {
                        // a subgame without equilibrium poisons every parent
                        return Ok(Ok(self.remember(config, out)));
                    }
                    children.push(next);
                    sets.push(sup);
                    children.len() - 1
                }
            };
            child_of.push(idx);
        }

        // joint actions are in mixed-radix order over the movers' options
        let radix: Vec<usize> = ms.iter().map(|(_, o)| o.len()).collect();
        let digits = |mut k: usize| -> Vec<usize> {
            let mut d = vec![0; radix.len()];
            for j in (0..radix.len()).rev() {
                d[j] = k % radix[j];
                k /= radix[j];
            }
            d
        };
        let index = |d: &[usize]| d.iter().zip(&radix).fold(0, |acc, (x, r)| acc * r + x);

        for (k, action) in actions.iter().enumerate() {
            let here = child_of[k];
            // deviation child -> deviating agents
            let mut threats: Vec<(usize, Vec<usize>)> = Vec::new();
            let base = digits(k);
            for (j, (agent, _)) in ms.iter().enumerate() {
                for alt in 0..radix[j] {
                    if alt == base[j] {
                        continue;
                    }
                    let mut d = base.clone();
                    d[j] = alt;
                    let c = child_of[index(&d)];
                    if c == here {
                        continue;
                    }
                    match threats.iter_mut().find(|(x, _)| *x == c) {
                        Some((_, who)) => {
                            if !who.contains(&agent.index()) {
                                who.push(agent.index())
                            }
                        }
                        None => threats.push((c, vec![agent.index()])),
                    }
                }
            }
            for v in &sets[here].outcomes {
                if out.outcomes.contains(v) {
                    continue;
                }
                let deterred = threats.iter().all(|(c, who)| {
                    sets[*c].outcomes.iter().any(|s| who.iter().all(|&j| s[j] >= v[j]))
                });
                if deterred {
                    out.outcomes.push(v.clone());
                    out.actions.push(action.clone());
                    if out.outcomes.len() > self.cap {
                        return Ok(Err(CapExceeded));
                    }
                }
            }
        }
        Ok(Ok(self.remember(config, out)))
    }

    fn remember(&mut self, config: &Configuration, s: Support) -> Rc<Support> {
        let s = Rc::new(s);
        self.memo.insert(config.clone(), s.clone());
        s
    }

    /// Follows supporting actions for outcome `v` from `config`.
    fn equilibrium_path(&self, config: &Configuration, v: &DelayVector) -> Result<PathProfile> {
        let inst = self.instance;
        let mut paths: PathProfile = vec![Vec::new(); inst.n()];
        let mut config = config.clone();
        while let Some(sup) = self.memo.get(&config) {
            let Some(k) = sup.outcomes.iter().position(|o| o == v) else { break };
            let action = &sup.actions[k];
            if config.is_terminal() || config.round > self.bound {
                break;
            }
            let (next, trace) = step(inst, &config, action)?;
            for ins in &trace.insertions {
                paths[ins.agent.index()].push(ins.edge);
            }
            config = next;
        }
        Ok(paths)
    }
}
