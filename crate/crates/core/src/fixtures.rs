//! Small reference games used by tests, the CLI and the demo.

use crate::model::{Agent, AgentId, Digraph, EdgeIdx, Instance, TieRule};

/// Two agents from `a` and `b` to `k` under RO with order 2 > 1.
///
/// The connection from `f` to `i` passes through an intermediate vertex
/// `fi`, so it costs two rounds; with it the tree of this game has the leaf
/// values (6,5), (5,4), (4,5), (5,4), (5,5), (4,5), (5,5), (5,4), (6,5).
pub fn example1() -> Instance {
    let vertices = ["a", "b", "c", "d", "e", "f", "fi", "g", "h", "i", "j", "k"];
    let edges = [
        ("a", "c"),
        ("a", "e"),
        ("b", "d"),
        ("c", "f"),
        ("d", "f"),
        ("d", "g"),
        ("e", "g"),
        ("f", "fi"),
        ("fi", "i"),
        ("f", "j"),
        ("g", "h"),
        ("h", "j"),
        ("i", "k"),
        ("j", "k"),
    ];
    let graph = Digraph::from_names(&vertices, &edges).expect("fixture graph");
    let v = |name: &str| graph.vertex(name).unwrap();
    let agents = vec![
        Agent { id: AgentId(1), source: v("a"), sink: v("k"), start_round: 0 },
        Agent { id: AgentId(2), source: v("b"), sink: v("k"), start_round: 0 },
    ];
    Instance::new(graph, agents, TieRule::Ro { order: vec![AgentId(2), AgentId(1)] })
}

/// Index of the edge `(tail, head)`; panics when absent.
pub fn example1_edge(instance: &Instance, tail: &str, head: &str) -> EdgeIdx {
    instance
        .graph
        .find_edge(tail, head)
        .unwrap_or_else(|| panic!("no edge ({tail},{head})"))
}

/// Maps a path written as vertex names to edge indices.
pub fn path_by_names(instance: &Instance, vertices: &[&str]) -> Vec<EdgeIdx> {
    vertices.windows(2).map(|w| example1_edge(instance, w[0], w[1])).collect()
}
