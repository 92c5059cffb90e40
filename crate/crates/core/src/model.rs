//! Game definition: the routing digraph, agents, tie-breaking rules and the
//! queue configuration that the engine steps through.
//!
//! Agents are identified by 1-based [`AgentId`]s; internally they are stored
//! in id order so `id.index()` addresses per-agent vectors. Edges are always
//! referenced by index because parallel edges are allowed.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FrogError, Result};

pub type VertexId = usize;
pub type EdgeIdx = usize;
/// Finite edge sequence. Repetitions and cycles are allowed.
pub type Path = Vec<EdgeIdx>;
/// One path per agent, indexed by `AgentId::index()`.
pub type PathProfile = Vec<Path>;
pub type DelayVector = Vec<Delay>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }

    pub fn from_index(index: usize) -> Self {
        AgentId(index as u32 + 1)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Total delay of an agent. `Infinite` orders above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Delay {
    Finite(u32),
    Infinite,
}

impl Delay {
    pub fn finite(self) -> Option<u32> {
        match self {
            Delay::Finite(d) => Some(d),
            Delay::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Delay::Finite(_))
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delay::Finite(d) => write!(f, "{d}"),
            Delay::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Delay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Delay::Finite(d) => s.serialize_u32(*d),
            Delay::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Delay {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Delay::Finite(n)),
            Raw::Text(t) if t == "inf" => Ok(Delay::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad delay `{t}`"))),
        }
    }
}

/// Directed multigraph with named vertices and cached adjacency.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    names: Vec<String>,
    by_name: HashMap<String, VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    out: Vec<Vec<EdgeIdx>>,
    inc: Vec<Vec<EdgeIdx>>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from vertex names and `(tail, head)` name pairs.
    pub fn from_names<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = Digraph::new();
        for v in vertices {
            g.add_vertex(v.as_ref())?;
        }
        for (t, h) in edges {
            let t = g.vertex(t.as_ref()).ok_or_else(|| FrogError::UnknownVertex(t.as_ref().into()))?;
            let h = g.vertex(h.as_ref()).ok_or_else(|| FrogError::UnknownVertex(h.as_ref().into()))?;
            g.add_edge(t, h);
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId> {
        if self.by_name.contains_key(name) {
            return Err(FrogError::DuplicateVertex(name.into()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(&mut self, tail: VertexId, head: VertexId) -> EdgeIdx {
        assert!(tail < self.names.len() && head < self.names.len(), "edge endpoint out of range");
        let e = self.edges.len();
        self.edges.push((tail, head));
        self.out[tail].push(e);
        self.inc[head].push(e);
        e
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn tail(&self, e: EdgeIdx) -> VertexId {
        self.edges[e].0
    }

    pub fn head(&self, e: EdgeIdx) -> VertexId {
        self.edges[e].1
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeIdx] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeIdx] {
        &self.inc[v]
    }

    /// `F(e)`: every edge whose tail is the head of `e`.
    pub fn successors(&self, e: EdgeIdx) -> Result<&[EdgeIdx]> {
        let &(_, head) = self.edges.get(e).ok_or(FrogError::InvalidEdge(e))?;
        Ok(&self.out[head])
    }

    /// First edge `(tail, head)` by vertex names, for fixtures and tests.
    pub fn find_edge(&self, tail: &str, head: &str) -> Option<EdgeIdx> {
        let (t, h) = (self.vertex(tail)?, self.vertex(head)?);
        self.out[t].iter().copied().find(|&e| self.edges[e].1 == h)
    }

    pub fn edge_label(&self, e: EdgeIdx) -> String {
        let (t, h) = self.edges[e];
        format!("({},{})", self.names[t], self.names[h])
    }

    /// Edge count of a shortest path from every vertex to `target` (`None` if unreachable).
    pub fn distances_to(&self, target: VertexId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.num_vertices()];
        dist[target] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &e in &self.inc[v] {
                let t = self.edges[e].0;
                if dist[t].is_none() {
                    dist[t] = Some(d + 1);
                    queue.push_back(t);
                }
            }
        }
        dist
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub id: AgentId,
    pub source: VertexId,
    pub sink: VertexId,
    /// Round of the agent's first decision; 0 for standard agents.
    pub start_round: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceRank {
    First,
    #[default]
    Last,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Ro,
    Re,
    Rr,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Ro => "RO",
            RuleKind::Re => "RE",
            RuleKind::Rr => "RR",
        }
    }
}

/// Tie-breaking among agents entering the same queue in the same round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieRule {
    /// Simultaneous decisions, ties by a global agent order (highest first).
    Ro { order: Vec<AgentId> },
    /// Simultaneous decisions, ties by per-vertex priorities on incoming edges
    /// (highest first); agents entering from their source rank per `source_rank`.
    Re {
        priorities: BTreeMap<VertexId, Vec<EdgeIdx>>,
        source_rank: SourceRank,
    },
    /// Decisions sliced into turns following the agent order.
    Rr { order: Vec<AgentId> },
}

impl TieRule {
    pub fn kind(&self) -> RuleKind {
        match self {
            TieRule::Ro { .. } => RuleKind::Ro,
            TieRule::Re { .. } => RuleKind::Re,
            TieRule::Rr { .. } => RuleKind::Rr,
        }
    }

    pub fn agent_order(&self) -> Option<&[AgentId]> {
        match self {
            TieRule::Ro { order } | TieRule::Rr { order } => Some(order),
            TieRule::Re { .. } => None,
        }
    }
}

/// Where an entering agent comes from, for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Source,
    Edge(EdgeIdx),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Digraph,
    agents: Vec<Agent>,
    pub rule: TieRule,
    agent_rank: Vec<usize>,
    edge_rank: Vec<usize>,
    dist_to_sink: Vec<Vec<Option<u32>>>,
}

impl Instance {
    /// Agents are re-sorted by id. Structural problems (ids not `1..=n`,
    /// partial orders) are reported by [`Instance::validate`].
    pub fn new(graph: Digraph, mut agents: Vec<Agent>, rule: TieRule) -> Self {
        agents.sort_by_key(|a| a.id);
        let n = agents.len();
        let mut agent_rank = vec![usize::MAX; n];
        if let Some(order) = rule.agent_order() {
            for (rank, id) in order.iter().enumerate() {
                if let Some(slot) = agent_rank.get_mut(id.index()) {
                    *slot = (*slot).min(rank);
                }
            }
        }
        let mut edge_rank = vec![usize::MAX; graph.num_edges()];
        if let TieRule::Re { priorities, .. } = &rule {
            for list in priorities.values() {
                for (rank, &e) in list.iter().enumerate() {
                    if let Some(slot) = edge_rank.get_mut(e) {
                        *slot = (*slot).min(rank);
                    }
                }
            }
        }
        let dist_to_sink = agents
            .iter()
            .map(|a| {
                if a.sink < graph.num_vertices() {
                    graph.distances_to(a.sink)
                } else {
                    vec![None; graph.num_vertices()]
                }
            })
            .collect();
        Instance { graph, agents, rule, agent_rank, edge_rank, dist_to_sink }
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &Agent {
        &self.agents[id.index()]
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.iter().map(|a| a.id)
    }

    /// Same game with a different tie-breaking rule.
    pub fn with_rule(&self, rule: TieRule) -> Instance {
        Instance::new(self.graph.clone(), self.agents.clone(), rule)
    }

    /// Edge count of a shortest path from `v` to the agent's sink.
    pub fn dist_to_sink(&self, agent: AgentId, v: VertexId) -> Option<u32> {
        self.dist_to_sink[agent.index()][v]
    }

    /// Successors from which the agent can still reach her sink. Falls back
    /// to every candidate when none is viable.
    pub fn viable(&self, agent: AgentId, candidates: &[EdgeIdx]) -> Vec<EdgeIdx> {
        let sink = self.agent(agent).sink;
        let ok: Vec<EdgeIdx> = candidates
            .iter()
            .copied()
            .filter(|&e| {
                let h = self.graph.head(e);
                h == sink || self.dist_to_sink(agent, h).is_some()
            })
            .collect();
        if ok.is_empty() {
            candidates.to_vec()
        } else {
            ok
        }
    }

    /// Sort key for entrants of one round: smaller enters first.
    pub(crate) fn tie_key(&self, agent: AgentId, origin: Origin) -> (usize, usize) {
        match &self.rule {
            TieRule::Ro { .. } | TieRule::Rr { .. } => (self.agent_rank[agent.index()], agent.index()),
            TieRule::Re { source_rank, .. } => {
                let rank = match origin {
                    // edge ranks are shifted by one so `First` can sit at 0
                    Origin::Edge(e) => self.edge_rank[e].saturating_add(1),
                    Origin::Source => match source_rank {
                        SourceRank::First => 0,
                        SourceRank::Last => usize::MAX,
                    },
                };
                (rank, agent.index())
            }
        }
    }

    /// Lists every broken invariant; empty iff the instance is well formed.
    pub fn validate(&self, strict_def1: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        let nv = self.graph.num_vertices();
        let mut push = |subject: String, message: String| out.push(Violation { subject, message });
        for (k, a) in self.agents.iter().enumerate() {
            let subject = format!("agent {}", a.id);
            if a.id.0 as usize != k + 1 {
                push(subject.clone(), format!("agent ids must be exactly 1..={}", self.agents.len()));
                continue;
            }
            if a.source >= nv || a.sink >= nv {
                push(subject, "endpoint is not a declared vertex".into());
                continue;
            }
            if a.source == a.sink {
                push(subject.clone(), "sink equals source".into());
            } else if self.dist_to_sink[k][a.source].is_none() {
                push(subject.clone(), "no source-sink path".into());
            }
            if strict_def1 && a.start_round != 0 {
                push(subject, format!("start_round {} is nonzero (strict mode)", a.start_round));
            }
        }
        match &self.rule {
            TieRule::Ro { order } | TieRule::Rr { order } => {
                let mut seen = vec![false; self.agents.len()];
                let mut ok = order.len() == self.agents.len();
                for id in order {
                    match seen.get_mut(id.index()) {
                        Some(s) if !*s => *s = true,
                        _ => ok = false,
                    }
                }
                if !ok {
                    push(
                        format!("rule {}", self.rule.kind().as_str()),
                        "order is not a permutation of the agent ids".into(),
                    );
                }
            }
            TieRule::Re { priorities, .. } => {
                for (&v, list) in priorities {
                    if v >= nv {
                        push("rule RE".into(), format!("priority list for unknown vertex {v}"));
                        continue;
                    }
                    if list.iter().any(|&e| e >= self.graph.num_edges() || self.graph.head(e) != v) {
                        push(
                            format!("rule RE at {}", self.graph.name(v)),
                            "priority list names an edge that does not enter the vertex".into(),
                        );
                    }
                }
                for v in 0..nv {
                    let incoming = self.graph.in_edges(v);
                    if incoming.is_empty() {
                        continue;
                    }
                    let list = priorities.get(&v).map(Vec::as_slice).unwrap_or(&[]);
                    let mut sorted = list.to_vec();
                    sorted.sort_unstable();
                    sorted.dedup();
                    let mut expect = incoming.to_vec();
                    expect.sort_unstable();
                    if sorted != expect || sorted.len() != list.len() {
                        push(
                            format!("rule RE at {}", self.graph.name(v)),
                            "priority list must cover every incoming edge exactly once".into(),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate(false);
        if v.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(FrogError::InvalidInstance(msg.join("; ")))
        }
    }
}

/// `successors` as a free function over a graph.
pub fn successors(graph: &Digraph, e: EdgeIdx) -> Result<&[EdgeIdx]> {
    graph.successors(e)
}

/// `validate_instance` as a free function.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    instance.validate(false)
}

/// Queue contents `Q(r)` before the tops pop at round `r`.
///
/// This is the canonical state key of the game: the step relation only looks
/// at the current configuration, so solvers memoize on it instead of on full
/// histories.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub round: u32,
    /// Per edge, agent indices front to back.
    pub queues: Vec<Vec<u32>>,
    /// Per agent, the total delay once she has left the system.
    pub exited: Vec<Option<Delay>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Not yet started (or starting this round).
    Pending,
    /// On `edge` at 1-based `position`.
    Queued { edge: EdgeIdx, position: u32 },
    Exited(Delay),
}

impl Configuration {
    pub fn initial(instance: &Instance) -> Self {
        Configuration {
            round: 0,
            queues: vec![Vec::new(); instance.graph.num_edges()],
            exited: vec![None; instance.n()],
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.exited.iter().all(Option::is_some)
    }

    pub fn queue(&self, e: EdgeIdx) -> impl Iterator<Item = AgentId> + '_ {
        self.queues[e].iter().map(|&a| AgentId::from_index(a as usize))
    }

    pub fn locate(&self, agent: AgentId) -> Location {
        if let Some(d) = self.exited[agent.index()] {
            return Location::Exited(d);
        }
        let a = agent.index() as u32;
        for (edge, q) in self.queues.iter().enumerate() {
            if let Some(p) = q.iter().position(|&x| x == a) {
                return Location::Queued { edge, position: p as u32 + 1 };
            }
        }
        Location::Pending
    }

    /// Location of every agent in one pass.
    pub fn locate_all(&self) -> Vec<Location> {
        let mut loc: Vec<Location> = self
            .exited
            .iter()
            .map(|d| d.map_or(Location::Pending, Location::Exited))
            .collect();
        for (edge, q) in self.queues.iter().enumerate() {
            for (p, &a) in q.iter().enumerate() {
                loc[a as usize] = Location::Queued { edge, position: p as u32 + 1 };
            }
        }
        loc
    }
}

/// Depth limits for simulation and search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Last round simulated; defaults to the latest start round plus `|E| * n`.
    pub round_bound: Option<u32>,
    /// Cap on expanded search nodes.
    pub node_budget: Option<u64>,
}

impl SearchBudget {
    pub fn with_round_bound(bound: u32) -> Self {
        SearchBudget { round_bound: Some(bound), node_budget: None }
    }

    pub fn rounds(&self, instance: &Instance) -> u32 {
        let latest = instance.agents().iter().map(|a| a.start_round).max().unwrap_or(0);
        let span = (instance.graph.num_edges() * instance.n()).min(u32::MAX as usize) as u32;
        let default = latest.saturating_add(span);
        self.round_bound.unwrap_or(default).max(1)
    }
}
