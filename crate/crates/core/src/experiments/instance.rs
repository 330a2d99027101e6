use crate::graph::{enumerate_paths, parse_graph, Path, SecurityGraph};

/// JSON document of the built-in drone-delivery instance.
pub const PAPER_INSTANCE_JSON: &str = include_str!("../../data/paper_instance.json");

/// The ten-node, eighteen-edge warehouse-to-customer graph.
///
/// Nodes 1 and 10 are the warehouse and the customer. Edges run in layers
/// `1 -> {2,3,4} -> {5,6} -> {7,8,9} -> 10`, and the travel-time vector is
/// assigned to edges sorted by `(from, to)`. Paths come back in the order
/// `(2,5,7), (2,5,8), ..., (4,6,9)`, so path `k` (1-based) here is path `k`
/// in the usual numbering.
pub fn builtin_paper_instance() -> (SecurityGraph, Vec<Path>) {
    let graph = parse_graph(PAPER_INSTANCE_JSON).expect("built-in instance is valid");
    let paths = enumerate_paths(&graph);
    (graph, paths)
}

/// Index of the first path of minimal total time.
pub fn shortest_path_index(paths: &[Path]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, p) in paths.iter().enumerate() {
        if best.is_none_or(|b| p.total_time() < paths[b].total_time()) {
            best = Some(i);
        }
    }
    best
}
