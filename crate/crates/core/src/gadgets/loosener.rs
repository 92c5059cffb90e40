use serde::{Deserialize, Serialize};

use crate::error::{FrogError, Result};
use crate::gadgets::blueprint::{ERef, GadgetBlueprint, Role, ScriptedAgent, VRef};
use crate::model::{Digraph, EdgeIdx};

/// Where and when a loosener watches its agent, and which later host edges
/// it frees up.
///
/// Rounds follow the queue convention: "on `e` at round `r`" means being in
/// `Q_e(r)` as a fresh entrant, i.e. having chosen `e` at round `r - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoosenerSpec {
    /// Prefix for the names of the new vertices.
    pub tag: String,
    pub trigger_edge: EdgeIdx,
    pub trigger_round: u32,
    /// `(g_j, r_j)`: a gold agent enters `g_j` at `r_j`, or one round later
    /// when the trigger was hit.
    pub consequences: Vec<(EdgeIdx, u32)>,
    pub red_count: u32,
}

impl LoosenerSpec {
    /// Every consequence round must leave room for at least one private
    /// edge between the green and gold paths: `r_j >= r + 6 + j` (1-based
    /// `j`). The trigger round must be at least 1.
    pub fn check(&self) -> Result<()> {
        let r = self.trigger_round;
        if r == 0 {
            return Err(FrogError::Gadget(format!("{}: trigger round must be at least 1", self.tag)));
        }
        if self.red_count == 0 {
            return Err(FrogError::Gadget(format!("{}: red_count must be at least 1", self.tag)));
        }
        for (j, &(_, rg)) in self.consequences.iter().enumerate() {
            let need = r + 6 + j as u32 + 1;
            if rg < need {
                return Err(FrogError::Gadget(format!(
                    "{}: consequence {} at round {rg} is earlier than {need}",
                    self.tag,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Number of private edges between `f_{j,beta}` and `g_j` (0-based `j`).
    pub fn gamma_len(&self, j: usize) -> u32 {
        self.consequences[j].1 - (self.trigger_round + 5 + j as u32 + 1)
    }
}

/// Builds a loosener on top of `host`.
///
/// The agent under watch (`i`) competes with these scripted agents, listed
/// from highest priority down:
///
/// * blue: from `tail(e)`, on `e` at `r + 1`, then along `f_0 .. f_m`;
/// * green `j`: on `f_j` at `r + 2 + j`, then `f_{j,alpha}`, `f_{j,beta}`;
/// * gold `j`: on `f_{j,beta}` at `r + 4 + j`, through the gamma edges,
///   reaching `g_j` at `r_j`;
/// * red (`red_count` of them): on `f_0` at `r + 2`;
/// * dark: on `e` at `r`.
///
/// When `i` is also on `e` at `r`, she sits between dark and blue, blue
/// falls behind the reds, every green runs on time and holds up its gold
/// by one round. Otherwise blue holds up every green and the golds run on
/// time. Entering `f_0` costs `i` more than `red_count` rounds.
pub fn build_loosener(host: &Digraph, spec: &LoosenerSpec) -> Result<GadgetBlueprint> {
    spec.check()?;
    if spec.trigger_edge >= host.num_edges() {
        return Err(FrogError::InvalidEdge(spec.trigger_edge));
    }
    if let Some(&(g, _)) = spec.consequences.iter().find(|(g, _)| *g >= host.num_edges()) {
        return Err(FrogError::InvalidEdge(g));
    }
    let tag = &spec.tag;
    let r = spec.trigger_round;
    let m = spec.consequences.len();
    let mut bp = GadgetBlueprint::default();
    let e = ERef::Host(spec.trigger_edge);

    // f_0 .. f_m
    let mut at = VRef::Host(host.head(spec.trigger_edge));
    let mut f = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let next = bp.add_vertex(format!("{tag}.f{j}"));
        f.push(bp.add_edge(at, next));
        at = next;
    }

    let mut greens = Vec::new();
    let mut golds = Vec::new();
    for (j0, &(g, rg)) in spec.consequences.iter().enumerate() {
        let j = j0 + 1;
        let branch = bp.head(f[j], host);
        let a = bp.add_vertex(format!("{tag}.a{j}"));
        let alpha = bp.add_edge(branch, a);
        let g_tail = VRef::Host(host.tail(g));
        let gamma = spec.gamma_len(j0) as usize;
        let b = bp.add_vertex(format!("{tag}.b{j}"));
        let beta = bp.add_edge(a, b);
        let mut gold_path = vec![beta];
        let mut at = b;
        for l in 1..=gamma {
            let next = if l == gamma { g_tail } else { bp.add_vertex(format!("{tag}.c{j}.{l}")) };
            gold_path.push(bp.add_edge(at, next));
            at = next;
        }
        gold_path.push(ERef::Host(g));
        greens.push(ScriptedAgent {
            role: Role::Green,
            label: format!("{tag}.green{j}"),
            source: bp.tail(f[j], host),
            sink: b,
            start_round: r + 1 + j as u32,
            path: vec![f[j], alpha, beta],
        });
        golds.push(ScriptedAgent {
            role: Role::Gold,
            label: format!("{tag}.gold{j}"),
            source: a,
            sink: VRef::Host(host.head(g)),
            start_round: r + 3 + j as u32,
            path: gold_path,
        });
        debug_assert!(rg >= r + 6 + j as u32);
    }

    let blue_path: Vec<ERef> = std::iter::once(e).chain(f.iter().copied()).collect();
    bp.agents.push(ScriptedAgent {
        role: Role::Blue,
        label: format!("{tag}.blue"),
        source: VRef::Host(host.tail(spec.trigger_edge)),
        sink: bp.head(f[m], host),
        start_round: r,
        path: blue_path,
    });
    bp.agents.extend(greens);
    bp.agents.extend(golds);
    for k in 1..=spec.red_count {
        bp.agents.push(ScriptedAgent {
            role: Role::Red,
            label: format!("{tag}.red{k}"),
            source: VRef::Host(host.head(spec.trigger_edge)),
            sink: bp.head(f[0], host),
            start_round: r + 1,
            path: vec![f[0]],
        });
    }
    bp.agents.push(ScriptedAgent {
        role: Role::Dark,
        label: format!("{tag}.dark"),
        source: VRef::Host(host.tail(spec.trigger_edge)),
        sink: VRef::Host(host.head(spec.trigger_edge)),
        start_round: r - 1,
        path: vec![e],
    });
    Ok(bp)
}
