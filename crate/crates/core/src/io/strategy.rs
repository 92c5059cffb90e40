use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::json_error;
use crate::engine::{AgentStrategy, StateKey};
use crate::error::{FrogError, Result};
use crate::model::{AgentId, EdgeIdx, Instance, PathProfile};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub state_key: String,
    pub edge: EdgeIdx,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Path(Vec<EdgeIdx>),
    Table(Vec<TableEntry>),
}

fn parse_map(text: &str, inst: &Instance) -> Result<BTreeMap<u32, Entry>> {
    let map: BTreeMap<u32, Entry> = serde_json::from_str(text).map_err(json_error)?;
    if let Some(&id) = map.keys().find(|&&id| id == 0 || id as usize > inst.n()) {
        return Err(FrogError::UnknownAgent(AgentId(id)));
    }
    Ok(map)
}

/// Reads `{"<agent id>": [edge, ...]}`; agents left out get an empty path.
pub fn read_paths(text: &str, inst: &Instance) -> Result<PathProfile> {
    let mut out = vec![Vec::new(); inst.n()];
    for (id, entry) in parse_map(text, inst)? {
        match entry {
            Entry::Path(p) => out[id as usize - 1] = p,
            Entry::Table(_) => {
                return Err(FrogError::InvalidPath { agent: AgentId(id), reason: "expected an array of edge indices".into() })
            }
        }
    }
    Ok(out)
}

/// Reads one strategy per agent: a fixed path or a table of
/// `{"state_key": ..., "edge": ...}` records.
pub fn read_strategies(text: &str, inst: &Instance) -> Result<Vec<AgentStrategy>> {
    let mut out: Vec<Option<AgentStrategy>> = vec![None; inst.n()];
    for (id, entry) in parse_map(text, inst)? {
        out[id as usize - 1] = Some(match entry {
            Entry::Path(p) => AgentStrategy::FixedPath(p),
            Entry::Table(rows) => {
                let mut table = HashMap::with_capacity(rows.len());
                for row in rows {
                    table.insert(StateKey::parse(&row.state_key, inst)?, row.edge);
                }
                AgentStrategy::Table(table)
            }
        });
    }
    out.into_iter()
        .enumerate()
        .map(|(k, s)| s.ok_or(FrogError::MissingDecision(AgentId::from_index(k))))
        .collect()
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializes");
    out.push('\n');
    out
}

/// Writes non-empty paths in the format [`read_paths`] accepts.
pub fn write_paths(profile: &PathProfile) -> String {
    let map: BTreeMap<u32, &Vec<EdgeIdx>> = profile
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_empty())
        .map(|(k, p)| (k as u32 + 1, p))
        .collect();
    pretty(&map)
}

/// Writes one agent's strategy table, sorted by state key.
pub fn write_table(agent: AgentId, table: &HashMap<StateKey, EdgeIdx>) -> String {
    let mut rows: Vec<TableEntry> =
        table.iter().map(|(k, &edge)| TableEntry { state_key: k.canonical(), edge }).collect();
    rows.sort_by(|a, b| a.state_key.cmp(&b.state_key));
    let map: BTreeMap<u32, Vec<TableEntry>> = [(agent.0, rows)].into();
    pretty(&map)
}
