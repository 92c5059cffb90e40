use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::Serialize;

use crate::engine::{check_path, eval_paths};
use crate::error::{FrogError, Result};
use crate::model::{AgentId, Delay, EdgeIdx, Instance, Origin, Path, PathProfile, RuleKind};

/// One adversary visit of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Visit {
    /// First round in which she is in the queue.
    entry: u32,
    /// Round in which she leaves it.
    pop: u32,
    key: (usize, usize),
}

/// Queue occupancy produced by everybody except one agent.
///
/// The excluded agent may push adversaries back, but on a shortest route she
/// stays ahead of every chain of delays she causes, so she never meets a
/// queue she has lengthened herself. The profile is therefore exact for her.
#[derive(Clone, Debug, Default)]
pub struct LoadProfile {
    visits: HashMap<EdgeIdx, Vec<Visit>>,
}

impl LoadProfile {
    /// Number of adversaries ahead of an agent entering `edge` in `Q(round)`
    /// with tie key `key`.
    fn ahead(&self, edge: EdgeIdx, round: u32, key: (usize, usize)) -> u32 {
        self.visits.get(&edge).map_or(0, |vs| {
            vs.iter()
                .filter(|v| (v.entry < round && v.pop >= round) || (v.entry == round && v.key < key))
                .count() as u32
        })
    }

    /// `|Q_e(round)|` counting adversaries only.
    pub fn occupancy(&self, edge: EdgeIdx, round: u32) -> u32 {
        self.visits.get(&edge).map_or(0, |vs| {
            vs.iter().filter(|v| v.entry <= round && v.pop >= round).count() as u32
        })
    }
}

/// Simulates all agents but `exclude` along their paths.
pub fn load_profile(instance: &Instance, exclude: AgentId, profile: &PathProfile) -> Result<LoadProfile> {
    let mut visits: HashMap<EdgeIdx, Vec<Visit>> = HashMap::new();
    let mut last_pop: Vec<Option<u32>> = vec![None; instance.graph.num_edges()];
    let mut events: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for a in instance.agents().iter().filter(|a| a.id != exclude) {
        check_path(instance, a.id, &profile[a.id.index()])?;
        events.entry(a.start_round).or_default().push((a.id.index(), 0));
    }
    while let Some((t, mut batch)) = events.pop_first() {
        let key_of = |&(k, hop): &(usize, usize)| {
            let origin = if hop == 0 { Origin::Source } else { Origin::Edge(profile[k][hop - 1]) };
            instance.tie_key(AgentId::from_index(k), origin)
        };
        batch.sort_by_key(key_of);
        for item in batch {
            let (k, hop) = item;
            let e = profile[k][hop];
            let pop = last_pop[e].map_or(t + 1, |p| (p + 1).max(t + 1));
            last_pop[e] = Some(pop);
            visits.entry(e).or_default().push(Visit { entry: t + 1, pop, key: key_of(&item) });
            if hop + 1 < profile[k].len() {
                events.entry(pop).or_default().push((k, hop + 1));
            }
        }
    }
    Ok(LoadProfile { visits })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrReResult {
    /// Earliest arrival computed by the label-setting search.
    pub delay: Delay,
    pub path: Option<Path>,
    /// Delay of `path` re-evaluated on the joint profile.
    pub certified: Delay,
}

/// Polynomial best response under edge-priority tie-breaking.
///
/// Edges are the nodes of a Dijkstra search labelled by the round in which
/// the agent leaves them. Entering `e'` behind edge `e` at round `t + 1`
/// costs the adversaries already queued there plus the same-round entrants
/// that come from an edge ranked above `e` at the shared tail.
pub fn br_re(instance: &Instance, agent: AgentId, profile: &PathProfile) -> Result<BrReResult> {
    instance.ensure_valid()?;
    if instance.rule.kind() != RuleKind::Re {
        return Err(FrogError::WrongRule { expected: "RE", found: instance.rule.kind().as_str() });
    }
    if agent.index() >= instance.n() {
        return Err(FrogError::UnknownAgent(agent));
    }
    if profile.len() != instance.n() {
        return Err(FrogError::InvalidInstance(format!(
            "{} paths given for {} agents",
            profile.len(),
            instance.n()
        )));
    }
    let load = load_profile(instance, agent, profile)?;
    let g = &instance.graph;
    let me = instance.agent(agent);

    let mut label: Vec<Option<u32>> = vec![None; g.num_edges()];
    let mut pred: Vec<Option<EdgeIdx>> = vec![None; g.num_edges()];
    let mut heap = BinaryHeap::new();
    let relax = |e: EdgeIdx, from: Option<EdgeIdx>, released: u32, label: &mut Vec<Option<u32>>, pred: &mut Vec<Option<EdgeIdx>>, heap: &mut BinaryHeap<Reverse<(u32, EdgeIdx)>>| {
        let origin = from.map_or(Origin::Source, Origin::Edge);
        let entry = released + 1;
        let pop = entry + load.ahead(e, entry, instance.tie_key(agent, origin));
        if label[e].is_none_or(|l| pop < l) {
            label[e] = Some(pop);
            pred[e] = from;
            heap.push(Reverse((pop, e)));
        }
    };
    for &e in g.out_edges(me.source) {
        relax(e, None, me.start_round, &mut label, &mut pred, &mut heap);
    }
    let mut done = vec![false; g.num_edges()];
    let mut goal = None;
    while let Some(Reverse((pop, e))) = heap.pop() {
        if done[e] || label[e] != Some(pop) {
            continue;
        }
        done[e] = true;
        let head = g.head(e);
        if head == me.sink {
            goal = Some((pop, e));
            break;
        }
        for &f in g.out_edges(head) {
            if !done[f] {
                relax(f, Some(e), pop, &mut label, &mut pred, &mut heap);
            }
        }
    }

    let Some((value, last)) = goal else {
        return Ok(BrReResult { delay: Delay::Infinite, path: None, certified: Delay::Infinite });
    };
    let mut path = vec![last];
    while let Some(p) = pred[*path.last().unwrap()] {
        path.push(p);
    }
    path.reverse();
    let mut joint = profile.clone();
    joint[agent.index()] = path.clone();
    let certified = eval_paths(instance, &joint)?.delays[agent.index()];
    Ok(BrReResult { delay: Delay::Finite(value), path: Some(path), certified })
}
