use thiserror::Error;

use crate::model::AgentId;

#[derive(Debug, Error)]
pub enum FrogError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge index {0} out of range")]
    InvalidEdge(usize),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("illegal decision for agent {agent}: {reason}")]
    IllegalDecision { agent: AgentId, reason: String },
    #[error("missing decision for agent {0}")]
    MissingDecision(AgentId),
    #[error("strategy of agent {agent} undefined at state {key}")]
    StrategyUndefined { agent: AgentId, key: String },
    #[error("invalid path for agent {agent}: {reason}")]
    InvalidPath { agent: AgentId, reason: String },
    #[error("operation requires rule {expected}, instance uses {found}")]
    WrongRule {
        expected: &'static str,
        found: &'static str,
    },
    #[error("node budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gadget construction failed: {0}")]
    Gadget(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = FrogError> = std::result::Result<T, E>;
