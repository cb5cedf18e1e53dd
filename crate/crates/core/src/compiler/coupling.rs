use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CompileError;

/// Undirected hardware connectivity over physical qubits `0..nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: usize,
    edges: Vec<[usize; 2]>,
}

impl CouplingGraph {
    pub fn new(nodes: usize, edges: &[(usize, usize)]) -> Result<Self, CompileError> {
        if nodes == 0 {
            return Err(CompileError::Graph("graph has no nodes".into()));
        }
        let mut adjacency = vec![BTreeSet::new(); nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes {
                return Err(CompileError::Graph(format!("edge ({a}, {b}) leaves {nodes} nodes")));
            }
            if a == b {
                return Err(CompileError::Graph(format!("self loop on node {a}")));
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        let g = Self { adjacency };
        if g.distances_from(0).iter().any(Option::is_none) {
            return Err(CompileError::Graph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("line is connected")
    }

    pub fn ring(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::new(n, &edges).expect("ring is connected")
    }

    pub fn full(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::new(n, &edges).expect("complete graph is connected")
    }

    /// `line`, `ring`, `full` (sized to `qubits`) or `file:<edges.json>`.
    pub fn from_spec(spec: &str, qubits: usize) -> Result<Self, CompileError> {
        match spec {
            "line" => Ok(Self::line(qubits)),
            "ring" => Ok(Self::ring(qubits)),
            "full" => Ok(Self::full(qubits)),
            _ => match spec.strip_prefix("file:") {
                Some(path) => Self::from_file(Path::new(path)),
                None => Err(CompileError::Graph(format!(
                    "unknown coupling `{spec}` (expected line, ring, full or file:<path>)"
                ))),
            },
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CompileError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CompileError::Graph(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        let file: GraphFile = crate::io::from_json(text).map_err(|e| CompileError::Graph(e.to_string()))?;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(file.nodes, &edges)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(&GraphFile {
            nodes: self.nodes(),
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.nodes())
            .flat_map(|a| self.adjacency[a].range(a + 1..).map(move |&b| (a, b)))
            .collect()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    pub fn is_complete(&self) -> bool {
        self.adjacency.iter().all(|n| n.len() + 1 == self.nodes())
    }

    fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest path `a ..= b`. BFS visits neighbours in ascending order, so
    /// among equal-length paths the one through lower indices wins.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.nodes()];
        parent[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &v in &self.adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![b];
        while *path.last().unwrap() != a {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        path
    }
}

/// A coupling choice before the segment width is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CouplingSpec {
    Line,
    Ring,
    Full,
    Fixed(CouplingGraph),
}

impl CouplingSpec {
    /// Parses `line`, `ring`, `full` or `file:<edges.json>`; files are read
    /// here, once.
    pub fn parse(spec: &str) -> Result<Self, CompileError> {
        match spec {
            "line" => Ok(Self::Line),
            "ring" => Ok(Self::Ring),
            "full" => Ok(Self::Full),
            _ => CouplingGraph::from_spec(spec, 0).map(Self::Fixed),
        }
    }

    pub fn for_width(&self, qubits: usize) -> CouplingGraph {
        match self {
            Self::Line => CouplingGraph::line(qubits),
            Self::Ring => CouplingGraph::ring(qubits),
            Self::Full => CouplingGraph::full(qubits),
            Self::Fixed(g) => g.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Line => "line".into(),
            Self::Ring => "ring".into(),
            Self::Full => "full".into(),
            Self::Fixed(g) => format!("graph({} nodes)", g.nodes()),
        }
    }
}
