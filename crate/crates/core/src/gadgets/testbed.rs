use crate::engine::eval_paths;
use crate::error::Result;
use crate::gadgets::blueprint::Role;
use crate::gadgets::builder::{Draft, GameBuilder};
use crate::gadgets::loosener::{build_loosener, LoosenerSpec};
use crate::model::{EdgeIdx, RuleKind};

/// Outcome of running one loosener against a lone agent `i` on a bare host:
/// the trigger edge `s -> t` plus one edge `c_j -> d_j` per consequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoosenerRun {
    /// Round in which gold agent `j` is in the queue of `g_j`.
    pub gold_entries: Vec<u32>,
    /// Round in which `i` leaves `f_0` when routed through the gadget.
    pub shortcut_pop: Option<u32>,
    /// Delay of `i`.
    pub i_delay: crate::model::Delay,
}

/// Agent `i` starts at `s` in round `i_start` and takes the trigger edge,
/// then `f_0` as well when `shortcut` is set. She is on the trigger edge at
/// the trigger round exactly when `i_start + 1 == r`.
pub fn run_loosener(
    r: u32,
    rounds: &[u32],
    red_count: u32,
    i_start: u32,
    shortcut: bool,
    kind: RuleKind,
) -> Result<LoosenerRun> {
    let mut b = GameBuilder::new();
    let s = b.vertex("s");
    let t = b.vertex("t");
    let e = b.edge(s, t);
    let consequences: Vec<(EdgeIdx, u32)> = rounds
        .iter()
        .enumerate()
        .map(|(j, &rg)| {
            let c = b.vertex(&format!("c{j}"));
            let d = b.vertex(&format!("d{j}"));
            (b.edge(c, d), rg)
        })
        .collect();
    let i = b.agent(Draft { label: "i".into(), source: s, sink: t, start_round: i_start, script: None });
    let spec = LoosenerSpec { tag: "L".into(), trigger_edge: e, trigger_round: r, consequences, red_count };
    let bp = build_loosener(&b.graph, &spec)?;
    let slots = b.splice(&bp, Some(i));
    let mut path = vec![e];
    if shortcut {
        let f0 = b.vertex("L.f0");
        path.push(b.graph.find_edge("t", "L.f0").expect("f0 edge"));
        b.set_sink(i, f0);
    }
    let built = b.finish(kind, false)?;
    let mut profile = built.scripts.clone();
    profile[i] = path;
    let out = eval_paths(&built.instance, &profile)?;
    let gold_entries = bp
        .agents
        .iter()
        .zip(&slots)
        .filter(|(a, _)| a.role == Role::Gold)
        .map(|(_, &slot)| *out.entry_rounds[slot].last().expect("gold path is non-empty"))
        .collect();
    let shortcut_pop = shortcut.then(|| out.entry_rounds[i][1] + out.positions[i][1] - 1);
    Ok(LoosenerRun { gold_entries, shortcut_pop, i_delay: out.delays[i] })
}
