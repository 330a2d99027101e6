//! Danger-point security graphs, simple delivery paths and the path-node
//! incidence structure.
//!
//! A [`SecurityGraph`] is a directed graph whose nodes are danger points
//! (each with an attack success probability) and whose edges carry travel
//! times in minutes. Node identifiers are opaque strings; internally nodes
//! are addressed by dense [`NodeIndex`] values assigned in document order,
//! and every matrix in this crate reports columns in that order.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("node `{node}`: attack probability {p} outside [0, 1]")]
    ProbabilityOutOfRange { node: String, p: f64 },
    #[error("edge `{from}` -> `{to}`: travel time {t} must be a nonnegative number")]
    InvalidTime { from: String, to: String, t: f64 },
    #[error("edge `{from}` -> `{to}` references unknown node `{missing}`")]
    UnknownEndpoint {
        from: String,
        to: String,
        missing: String,
    },
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{from}` -> `{to}`")]
    DuplicateEdge { from: String, to: String },
    #[error("origin `{0}` is not a node of the graph")]
    MissingOrigin(String),
    #[error("destination `{0}` is not a node of the graph")]
    MissingDestination(String),
    #[error("origin and destination are the same node `{0}`")]
    OriginIsDestination(String),
    #[error("node `{0}` does not lie on any origin-to-destination path")]
    UnreachableNode(String),
    #[error("node `{node}` is not on path {path}")]
    NodeNotOnPath { node: String, path: String },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Dense index of a node, in document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeIndex(pub usize);

impl NodeIndex {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    /// Probability that an attack launched from this node succeeds.
    pub attack_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: NodeIndex,
    pub to: NodeIndex,
    /// Travel time in minutes.
    pub time: f64,
}

/// Node identifiers may be written as JSON strings or bare integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Text(String),
    Number(u64),
}

impl NodeId {
    fn into_string(self) -> String {
        match self {
            NodeId::Text(s) => s,
            NodeId::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDocument {
    pub id: NodeId,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub from: NodeId,
    pub to: NodeId,
    pub t: f64,
}

/// On-disk JSON form of a security graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<EdgeDocument>,
    pub origin: NodeId,
    pub destination: NodeId,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<SecurityGraph, GraphError> {
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| Node {
                id: n.id.into_string(),
                attack_probability: n.p,
            })
            .collect::<Vec<_>>();

        let mut lookup = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if lookup.insert(node.id.clone(), NodeIndex(i)).is_some() {
                return Err(GraphError::DuplicateNode(node.id.clone()));
            }
        }

        let mut edges = Vec::with_capacity(self.edges.len());
        for e in self.edges {
            let from = e.from.into_string();
            let to = e.to.into_string();
            let resolve = |id: &str| {
                lookup
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownEndpoint {
                        from: from.clone(),
                        to: to.clone(),
                        missing: id.to_string(),
                    })
            };
            edges.push(Edge {
                from: resolve(&from)?,
                to: resolve(&to)?,
                time: e.t,
            });
        }

        let origin = self.origin.into_string();
        let destination = self.destination.into_string();
        let origin = *lookup
            .get(&origin)
            .ok_or(GraphError::MissingOrigin(origin))?;
        let destination = *lookup
            .get(&destination)
            .ok_or(GraphError::MissingDestination(destination))?;

        SecurityGraph::new(nodes, edges, origin, destination)
    }
}

/// Validated directed danger-point graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    origin: NodeIndex,
    destination: NodeIndex,
    /// Outgoing `(target, time)` pairs per node, sorted by target index.
    successors: Vec<Vec<(NodeIndex, f64)>>,
}

impl SecurityGraph {
    pub fn new(
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        origin: NodeIndex,
        destination: NodeIndex,
    ) -> Result<Self, GraphError> {
        let n = nodes.len();
        let mut ids = HashSet::with_capacity(n);
        for node in &nodes {
            if !ids.insert(node.id.as_str()) {
                return Err(GraphError::DuplicateNode(node.id.clone()));
            }
            let p = node.attack_probability;
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::ProbabilityOutOfRange {
                    node: node.id.clone(),
                    p,
                });
            }
        }
        if origin.0 >= n {
            return Err(GraphError::MissingOrigin(format!("#{}", origin.0)));
        }
        if destination.0 >= n {
            return Err(GraphError::MissingDestination(format!(
                "#{}",
                destination.0
            )));
        }
        if origin == destination {
            return Err(GraphError::OriginIsDestination(nodes[origin.0].id.clone()));
        }

        let name = |i: NodeIndex| {
            nodes
                .get(i.0)
                .map(|node| node.id.clone())
                .unwrap_or_else(|| format!("#{}", i.0))
        };
        let mut successors = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.from.0 >= n || e.to.0 >= n {
                let missing = if e.from.0 >= n { e.from } else { e.to };
                return Err(GraphError::UnknownEndpoint {
                    from: name(e.from),
                    to: name(e.to),
                    missing: name(missing),
                });
            }
            if !(e.time.is_finite() && e.time >= 0.0) {
                return Err(GraphError::InvalidTime {
                    from: name(e.from),
                    to: name(e.to),
                    t: e.time,
                });
            }
            if e.from == e.to {
                return Err(GraphError::SelfLoop(name(e.from)));
            }
            if !seen.insert((e.from, e.to)) {
                return Err(GraphError::DuplicateEdge {
                    from: name(e.from),
                    to: name(e.to),
                });
            }
            successors[e.from.0].push((e.to, e.time));
        }
        for list in &mut successors {
            list.sort_by_key(|&(to, _)| to);
        }

        let graph = SecurityGraph {
            nodes,
            edges,
            origin,
            destination,
            successors,
        };
        graph.check_reachability()?;
        Ok(graph)
    }

    /// Every node must be reachable from the origin and able to reach the
    /// destination.
    fn check_reachability(&self) -> Result<(), GraphError> {
        let n = self.nodes.len();
        let mut predecessors = vec![Vec::new(); n];
        for e in &self.edges {
            predecessors[e.to.0].push(e.from);
        }
        let forward = self.flood(self.origin, |i| {
            self.successors[i.0].iter().map(|&(to, _)| to).collect()
        });
        let backward = self.flood(self.destination, |i| predecessors[i.0].clone());
        match (0..n).find(|&i| !(forward[i] && backward[i])) {
            Some(i) => Err(GraphError::UnreachableNode(self.nodes[i].id.clone())),
            None => Ok(()),
        }
    }

    fn flood(&self, start: NodeIndex, next: impl Fn(NodeIndex) -> Vec<NodeIndex>) -> Vec<bool> {
        let mut marked = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        marked[start.0] = true;
        while let Some(i) = queue.pop_front() {
            for j in next(i) {
                if !marked[j.0] {
                    marked[j.0] = true;
                    queue.push_back(j);
                }
            }
        }
        marked
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn origin(&self) -> NodeIndex {
        self.origin
    }

    pub fn destination(&self) -> NodeIndex {
        self.destination
    }

    pub fn node(&self, i: NodeIndex) -> &Node {
        &self.nodes[i.0]
    }

    pub fn attack_probability(&self, i: NodeIndex) -> f64 {
        self.nodes[i.0].attack_probability
    }

    pub fn index_of(&self, id: &str) -> Option<NodeIndex> {
        self.nodes.iter().position(|n| n.id == id).map(NodeIndex)
    }

    pub fn successors(&self, i: NodeIndex) -> &[(NodeIndex, f64)] {
        &self.successors[i.0]
    }

    pub fn edge_time(&self, from: NodeIndex, to: NodeIndex) -> Option<f64> {
        self.successors
            .get(from.0)?
            .iter()
            .find(|&&(t, _)| t == to)
            .map(|&(_, time)| time)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDocument {
                    id: NodeId::Text(n.id.clone()),
                    p: n.attack_probability,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    from: NodeId::Text(self.nodes[e.from.0].id.clone()),
                    to: NodeId::Text(self.nodes[e.to.0].id.clone()),
                    t: e.time,
                })
                .collect(),
            origin: NodeId::Text(self.nodes[self.origin.0].id.clone()),
            destination: NodeId::Text(self.nodes[self.destination.0].id.clone()),
        }
    }
}

/// Parses and validates a JSON graph document.
pub fn parse_graph(document: &str) -> Result<SecurityGraph, GraphError> {
    let doc: GraphDocument =
        serde_json::from_str(document).map_err(|e| GraphError::Malformed(e.to_string()))?;
    doc.into_graph()
}

/// A simple origin-to-destination path with its arrival times.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    nodes: Vec<NodeIndex>,
    edge_times: Vec<f64>,
    /// `arrivals[i]` is the time at which `nodes[i]` is reached.
    arrivals: Vec<f64>,
}

impl Path {
    /// Builds a path from a node sequence, checking that it is a simple
    /// origin-to-destination path over existing edges.
    pub fn from_nodes(graph: &SecurityGraph, nodes: Vec<NodeIndex>) -> Result<Self, GraphError> {
        if nodes.first() != Some(&graph.origin()) || nodes.last() != Some(&graph.destination()) {
            return Err(GraphError::InvalidPath(
                "path must start at the origin and end at the destination".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(nodes.len());
        if let Some(dup) = nodes.iter().find(|n| !seen.insert(**n)) {
            return Err(GraphError::InvalidPath(format!(
                "node `{}` repeated",
                graph.node(*dup).id
            )));
        }
        let edge_times = nodes
            .windows(2)
            .map(|w| {
                graph.edge_time(w[0], w[1]).ok_or_else(|| {
                    GraphError::InvalidPath(format!(
                        "no edge `{}` -> `{}`",
                        graph.node(w[0]).id,
                        graph.node(w[1]).id
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_parts(nodes, edge_times))
    }

    fn from_parts(nodes: Vec<NodeIndex>, edge_times: Vec<f64>) -> Self {
        let mut arrivals = Vec::with_capacity(nodes.len());
        let mut clock = 0.0;
        arrivals.push(clock);
        for t in &edge_times {
            clock += t;
            arrivals.push(clock);
        }
        Path {
            nodes,
            edge_times,
            arrivals,
        }
    }

    pub fn nodes(&self) -> &[NodeIndex] {
        &self.nodes
    }

    pub fn edge_times(&self) -> &[f64] {
        &self.edge_times
    }

    /// Arrival time at each node, parallel to [`Path::nodes`].
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn total_time(&self) -> f64 {
        *self.arrivals.last().expect("a path has at least two nodes")
    }

    pub fn contains(&self, node: NodeIndex) -> bool {
        self.position(node).is_some()
    }

    fn position(&self, node: NodeIndex) -> Option<usize> {
        self.nodes.iter().position(|&n| n == node)
    }

    /// Time to reach `node` from the origin along this path.
    pub fn arrival_time(&self, node: NodeIndex) -> Result<f64, GraphError> {
        self.position(node)
            .map(|i| self.arrivals[i])
            .ok_or_else(|| GraphError::NodeNotOnPath {
                node: format!("#{}", node.0),
                path: format!("{:?}", self.nodes.iter().map(|n| n.0).collect::<Vec<_>>()),
            })
    }

    /// Human-readable label such as `1-2-5-7-10`.
    pub fn label(&self, graph: &SecurityGraph) -> String {
        self.nodes
            .iter()
            .map(|&n| graph.node(n).id.as_str())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nodes.iter().map(|n| n.0.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Enumerates every simple origin-to-destination path.
///
/// Depth-first search with an on-path marker set, visiting successors in
/// ascending node index. The output is therefore in lexicographic order of
/// node-index sequences. Worst-case cost is exponential in the graph size;
/// the graphs this crate targets have tens of nodes.
pub fn enumerate_paths(graph: &SecurityGraph) -> Vec<Path> {
    let mut paths = Vec::new();
    let mut on_path = vec![false; graph.node_count()];
    let mut nodes = vec![graph.origin()];
    let mut times = Vec::new();
    // stack of (node, next successor slot to try)
    let mut stack = vec![(graph.origin(), 0usize)];
    on_path[graph.origin().0] = true;

    while let Some(&mut (node, ref mut slot)) = stack.last_mut() {
        let succ = graph.successors(node);
        if *slot >= succ.len() {
            stack.pop();
            on_path[node.0] = false;
            nodes.pop();
            times.pop();
            continue;
        }
        let (next, t) = succ[*slot];
        *slot += 1;
        if on_path[next.0] {
            continue;
        }
        if next == graph.destination() {
            let mut seq = nodes.clone();
            seq.push(next);
            let mut ts = times.clone();
            ts.push(t);
            paths.push(Path::from_parts(seq, ts));
            continue;
        }
        on_path[next.0] = true;
        nodes.push(next);
        times.push(t);
        stack.push((next, 0));
    }
    paths
}

/// Binary `H x N` matrix with `l[h][n] = 1` when node `n` lies on path `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<bool>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, path: usize, node: usize) -> bool {
        self.entries[path * self.cols + node]
    }

    pub fn row(&self, path: usize) -> &[bool] {
        &self.entries[path * self.cols..(path + 1) * self.cols]
    }
}

pub fn incidence(graph: &SecurityGraph, paths: &[Path]) -> IncidenceMatrix {
    let cols = graph.node_count();
    let mut entries = vec![false; paths.len() * cols];
    for (h, path) in paths.iter().enumerate() {
        for &n in path.nodes() {
            entries[h * cols + n.0] = true;
        }
    }
    IncidenceMatrix {
        rows: paths.len(),
        cols,
        entries,
    }
}
