use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::json_error;
use crate::error::{FrogError, Result};
use crate::model::{Agent, AgentId, Digraph, EdgeIdx, Instance, SourceRank, TieRule};

/// On-disk form of an instance. Vertices are referenced by name, edges by
/// their zero-based position in `edges`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub agents: Vec<AgentRecord>,
    pub rule: RuleRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRecord {
    pub id: AgentId,
    pub source: String,
    pub sink: String,
    #[serde(default)]
    pub start_round: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleType {
    #[serde(rename = "RO")]
    Ro,
    #[serde(rename = "RE")]
    Re,
    #[serde(rename = "RR")]
    Rr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleRecord {
    #[serde(rename = "type")]
    pub kind: RuleType,
    /// Agent ids from highest to lowest priority (RO and RR).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<AgentId>>,
    /// Per vertex name, its incoming edges from highest to lowest priority (RE).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_priorities: Option<BTreeMap<String, Vec<EdgeIdx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_rank: Option<SourceRank>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let g = &inst.graph;
        let name = |v| g.name(v).to_string();
        let rule = match &inst.rule {
            TieRule::Ro { order } => RuleRecord { kind: RuleType::Ro, order: Some(order.clone()), edge_priorities: None, source_rank: None },
            TieRule::Rr { order } => RuleRecord { kind: RuleType::Rr, order: Some(order.clone()), edge_priorities: None, source_rank: None },
            TieRule::Re { priorities, source_rank } => RuleRecord {
                kind: RuleType::Re,
                order: None,
                edge_priorities: Some(priorities.iter().map(|(&v, list)| (name(v), list.clone())).collect()),
                source_rank: Some(*source_rank),
            },
        };
        InstanceFile {
            vertices: g.vertex_names().to_vec(),
            edges: g.edges().iter().map(|&(t, h)| [name(t), name(h)]).collect(),
            agents: inst
                .agents()
                .iter()
                .map(|a| AgentRecord { id: a.id, source: name(a.source), sink: name(a.sink), start_round: a.start_round })
                .collect(),
            rule,
        }
    }

    /// Resolves names. Structural checks are left to [`Instance::validate`].
    pub fn to_instance(&self) -> Result<Instance> {
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|[t, h]| (t.as_str(), h.as_str())).collect();
        let graph = Digraph::from_names(&self.vertices.iter().map(String::as_str).collect::<Vec<_>>(), &edges)?;
        let vertex = |name: &str| graph.vertex(name).ok_or_else(|| FrogError::UnknownVertex(name.into()));
        let agents = self
            .agents
            .iter()
            .map(|a| {
                Ok(Agent { id: a.id, source: vertex(&a.source)?, sink: vertex(&a.sink)?, start_round: a.start_round })
            })
            .collect::<Result<Vec<_>>>()?;
        let r = &self.rule;
        let missing = |what: &str| FrogError::InvalidInstance(format!("rule {:?} needs `{what}`", r.kind));
        let rule = match r.kind {
            RuleType::Ro | RuleType::Rr => {
                if r.edge_priorities.is_some() || r.source_rank.is_some() {
                    return Err(FrogError::InvalidInstance("edge priorities only apply to rule RE".into()));
                }
                let order = r.order.clone().ok_or_else(|| missing("order"))?;
                if r.kind == RuleType::Ro {
                    TieRule::Ro { order }
                } else {
                    TieRule::Rr { order }
                }
            }
            RuleType::Re => {
                if r.order.is_some() {
                    return Err(FrogError::InvalidInstance("an agent order does not apply to rule RE".into()));
                }
                let lists = r.edge_priorities.as_ref().ok_or_else(|| missing("edge_priorities"))?;
                let priorities = lists
                    .iter()
                    .map(|(v, list)| Ok((vertex(v)?, list.clone())))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                TieRule::Re { priorities, source_rank: r.source_rank.unwrap_or_default() }
            }
        };
        Ok(Instance::new(graph, agents, rule))
    }
}

/// Parses the JSON instance format; unknown keys are errors.
pub fn read_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(json_error)?;
    file.to_instance()
}

/// Canonical text: pretty JSON with a trailing newline.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    #[test]
    fn round_trip_is_byte_identical() {
        let text = write_instance(&example1());
        let back = read_instance(&text).unwrap();
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = write_instance(&example1()).replacen("\"vertices\"", "\"extra\": 1,\n  \"vertices\"", 1);
        assert!(matches!(read_instance(&text), Err(FrogError::Parse { .. })));
    }
}
