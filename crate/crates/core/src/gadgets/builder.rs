use crate::error::{FrogError, Result};
use crate::gadgets::blueprint::{ERef, GadgetBlueprint, VRef};
use crate::model::{Agent, AgentId, Digraph, EdgeIdx, Instance, Path, RuleKind, TieRule, VertexId};

/// An agent under construction. Scripted agents carry their only path.
#[derive(Clone, Debug)]
pub struct Draft {
    pub label: String,
    pub source: VertexId,
    pub sink: VertexId,
    pub start_round: u32,
    pub script: Option<Path>,
}

/// Assembles a game from host pieces and gadget blueprints, collecting
/// pairwise priority constraints between agents.
#[derive(Clone, Debug, Default)]
pub struct GameBuilder {
    pub graph: Digraph,
    agents: Vec<Draft>,
    /// `(a, b)`: agent slot `a` outranks slot `b`.
    above: Vec<(usize, usize)>,
}

/// A finished game together with the scripted paths.
#[derive(Clone, Debug)]
pub struct Built {
    pub instance: Instance,
    /// Per agent: the scripted path, empty for strategic agents.
    pub scripts: Vec<Path>,
    pub labels: Vec<String>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Vertex by name, created on first use.
    pub fn vertex(&mut self, name: &str) -> VertexId {
        match self.graph.vertex(name) {
            Some(v) => v,
            None => self.graph.add_vertex(name).expect("fresh vertex name"),
        }
    }

    pub fn edge(&mut self, tail: VertexId, head: VertexId) -> EdgeIdx {
        self.graph.add_edge(tail, head)
    }

    /// A path of `len` fresh edges from `from` to `to` through vertices
    /// named `<prefix>.1`, `<prefix>.2`, ...
    pub fn chain(&mut self, from: VertexId, to: VertexId, len: usize, prefix: &str) -> Vec<EdgeIdx> {
        assert!(len >= 1, "chain needs at least one edge");
        let mut out = Vec::with_capacity(len);
        let mut at = from;
        for k in 1..len {
            let mid = self.vertex(&format!("{prefix}.{k}"));
            out.push(self.edge(at, mid));
            at = mid;
        }
        out.push(self.edge(at, to));
        out
    }

    pub fn agent(&mut self, draft: Draft) -> usize {
        self.agents.push(draft);
        self.agents.len() - 1
    }

    pub fn draft(&self, slot: usize) -> &Draft {
        &self.agents[slot]
    }

    pub fn set_sink(&mut self, slot: usize, sink: VertexId) {
        self.agents[slot].sink = sink;
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    /// Records that `a` outranks `b`.
    pub fn prefer(&mut self, a: usize, b: usize) {
        self.above.push((a, b));
    }

    /// Adds a blueprint's vertices, edges and agents; its agents outrank
    /// `trigger` (the agent the gadget reacts to) in blueprint order.
    /// Returns the slots of the new agents.
    pub fn splice(&mut self, bp: &GadgetBlueprint, trigger: Option<usize>) -> Vec<usize> {
        let vmap: Vec<VertexId> = bp.vertices.iter().map(|name| self.vertex(name)).collect();
        let v = |r: VRef| match r {
            VRef::Host(x) => x,
            VRef::New(k) => vmap[k],
        };
        let emap: Vec<EdgeIdx> = bp.edges.iter().map(|&(t, h)| self.graph.add_edge(v(t), v(h))).collect();
        let e = |r: ERef| match r {
            ERef::Host(x) => x,
            ERef::New(k) => emap[k],
        };
        let mut slots = Vec::with_capacity(bp.agents.len());
        for a in &bp.agents {
            let slot = self.agent(Draft {
                label: a.label.clone(),
                source: v(a.source),
                sink: v(a.sink),
                start_round: a.start_round,
                script: Some(a.path.iter().map(|&r| e(r)).collect()),
            });
            slots.push(slot);
        }
        for w in slots.windows(2) {
            self.prefer(w[0], w[1]);
        }
        if let (Some(&last), Some(t)) = (slots.last(), trigger) {
            self.prefer(last, t);
        }
        slots
    }

    /// Agent order from the constraints: Kahn's algorithm, earliest created
    /// agent first among the available ones.
    fn order(&self) -> Result<Vec<usize>> {
        let n = self.agents.len();
        let mut indeg = vec![0usize; n];
        let mut next: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &self.above {
            next[a].push(b);
            indeg[b] += 1;
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&k| indeg[k] == 0).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(k) = ready.pop_first() {
            out.push(k);
            for &b in &next[k] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.insert(b);
                }
            }
        }
        if out.len() != n {
            let stuck: Vec<&str> = (0..n).filter(|&k| indeg[k] > 0).map(|k| self.agents[k].label.as_str()).collect();
            return Err(FrogError::Gadget(format!("priority constraints form a cycle among {}", stuck.join(", "))));
        }
        Ok(out)
    }

    /// Freezes the game. With `strict_def1`, every agent starting after
    /// round 0 instead starts at 0 on a private runway of that many edges
    /// ending at her source.
    pub fn finish(mut self, kind: RuleKind, strict_def1: bool) -> Result<Built> {
        let order = self.order()?;
        if strict_def1 {
            for k in 0..self.agents.len() {
                let s = self.agents[k].start_round;
                if s == 0 {
                    continue;
                }
                let start = self.vertex(&format!("runway{}", k + 1));
                let to = self.agents[k].source;
                let runway = self.chain(start, to, s as usize, &format!("runway{}", k + 1));
                let a = &mut self.agents[k];
                a.source = start;
                a.start_round = 0;
                if let Some(p) = &mut a.script {
                    let mut full = runway;
                    full.append(p);
                    *p = full;
                }
            }
        }
        let agents: Vec<Agent> = self
            .agents
            .iter()
            .enumerate()
            .map(|(k, d)| Agent { id: AgentId::from_index(k), source: d.source, sink: d.sink, start_round: d.start_round })
            .collect();
        let order: Vec<AgentId> = order.into_iter().map(AgentId::from_index).collect();
        let rule = match kind {
            RuleKind::Ro => TieRule::Ro { order },
            RuleKind::Rr => TieRule::Rr { order },
            RuleKind::Re => return Err(FrogError::WrongRule { expected: "RO or RR", found: "RE" }),
        };
        let instance = Instance::new(self.graph, agents, rule);
        instance.ensure_valid()?;
        let scripts = self.agents.iter().map(|d| d.script.clone().unwrap_or_default()).collect();
        let labels = self.agents.into_iter().map(|d| d.label).collect();
        Ok(Built { instance, scripts, labels })
    }
}
