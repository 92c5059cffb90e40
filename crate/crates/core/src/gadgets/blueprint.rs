use serde::Serialize;

use crate::model::{EdgeIdx, VertexId};

/// Vertex of the host game or the `k`-th vertex a blueprint introduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VRef {
    Host(VertexId),
    New(usize),
}

/// Edge of the host game or the `k`-th edge a blueprint introduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ERef {
    Host(EdgeIdx),
    New(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Dark,
    Blue,
    Red,
    Green,
    Gold,
}

/// A single-path agent with a fixed start round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScriptedAgent {
    pub role: Role,
    pub label: String,
    pub source: VRef,
    pub sink: VRef,
    pub start_round: u32,
    pub path: Vec<ERef>,
}

/// New vertices, edges and scripted agents to splice into a host game.
///
/// Agents are listed from highest to lowest priority; all of them outrank
/// the agent whose timing the gadget observes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GadgetBlueprint {
    pub vertices: Vec<String>,
    pub edges: Vec<(VRef, VRef)>,
    pub agents: Vec<ScriptedAgent>,
}

impl GadgetBlueprint {
    pub(crate) fn add_vertex(&mut self, name: String) -> VRef {
        self.vertices.push(name);
        VRef::New(self.vertices.len() - 1)
    }

    pub(crate) fn add_edge(&mut self, tail: VRef, head: VRef) -> ERef {
        self.edges.push((tail, head));
        ERef::New(self.edges.len() - 1)
    }

    pub(crate) fn tail(&self, e: ERef, host: &crate::model::Digraph) -> VRef {
        match e {
            ERef::Host(x) => VRef::Host(host.tail(x)),
            ERef::New(k) => self.edges[k].0,
        }
    }

    pub(crate) fn head(&self, e: ERef, host: &crate::model::Digraph) -> VRef {
        match e {
            ERef::Host(x) => VRef::Host(host.head(x)),
            ERef::New(k) => self.edges[k].1,
        }
    }

    pub fn count(&self, role: Role) -> usize {
        self.agents.iter().filter(|a| a.role == role).count()
    }
}
