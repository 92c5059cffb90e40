use std::fmt::Write;

use crate::engine::RunOutcome;
use crate::model::Instance;

/// One line per round: `r=<round> | <edge>: [agents front..back] ... | exits: <id:round>...`.
pub fn format_trace(instance: &Instance, outcome: &RunOutcome) -> String {
    let g = &instance.graph;
    let mut out = String::new();
    for (k, config) in outcome.history.iter().enumerate() {
        let queues: Vec<String> = config
            .queues
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_empty())
            .map(|(e, q)| {
                let ids: Vec<String> = q.iter().map(|a| (a + 1).to_string()).collect();
                format!("{e}{}: [{}]", g.edge_label(e), ids.join(" "))
            })
            .collect();
        let exits: Vec<String> = outcome
            .traces
            .get(k)
            .map(|t| t.exits.iter().map(|(a, d)| format!("{a}:{d}")).collect())
            .unwrap_or_default();
        let _ = writeln!(out, "r={} | {} | exits: {}", config.round, queues.join(" "), exits.join(" "));
    }
    out
}

/// DOT rendering of the graph with agents annotated at their sources and sinks.
pub fn to_dot(instance: &Instance) -> String {
    let g = &instance.graph;
    let mut out = String::from("digraph frog {\n  rankdir=LR;\n");
    for v in 0..g.num_vertices() {
        let mut notes = Vec::new();
        for a in instance.agents() {
            if a.source == v {
                notes.push(format!("s{}", a.id));
            }
            if a.sink == v {
                notes.push(format!("t{}", a.id));
            }
        }
        let label = if notes.is_empty() {
            g.name(v).to_string()
        } else {
            format!("{}\\n{}", g.name(v), notes.join(" "))
        };
        let _ = writeln!(out, "  v{v} [label=\"{label}\"];");
    }
    for (e, &(t, h)) in g.edges().iter().enumerate() {
        let _ = writeln!(out, "  v{t} -> v{h} [label=\"{e}\"];");
    }
    out.push_str("}\n");
    out
}
