use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// The 1-skeleton of a cube complex together with its base vertex.
///
/// Edges are normalized to `(min, max)` and kept in lexicographic order, so
/// edge indices are stable for a given vertex count and edge set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    #[serde(rename = "vertices")]
    vertex_count: usize,
    edges: Vec<(Vertex, Vertex)>,
    base: Vertex,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(Vertex, Vertex)], base: Vertex) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::MalformedGraph("graph has no vertices".into()));
        }
        if base >= vertex_count {
            return Err(Error::MalformedGraph(format!(
                "base vertex {base} out of range for {vertex_count} vertices"
            )));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::MalformedGraph(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(Error::MalformedGraph(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::MalformedGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph {
            vertex_count,
            edges: seen.into_iter().collect(),
            base,
        })
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: usize,
            edges: Vec<(Vertex, Vertex)>,
            base: Vertex,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Graph::new(raw.vertices, &raw.edges, raw.base).map_err(serde::de::Error::custom)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn base(&self) -> Vertex {
        self.base
    }

    /// Same 1-skeleton, different base vertex.
    pub fn with_base(&self, base: Vertex) -> Result<Self> {
        if base >= self.vertex_count {
            return Err(Error::MalformedGraph(format!("base vertex {base} out of range")));
        }
        Ok(Graph {
            base,
            ..self.clone()
        })
    }

    pub fn adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn check_connected(&self) -> Result<()> {
        let dist = bfs(&self.adjacency(), 0);
        match dist.iter().position(|d| d.is_none()) {
            Some(unreachable) => Err(Error::Disconnected { unreachable }),
            None => Ok(()),
        }
    }

    /// All-pairs shortest path lengths; panics if the graph is disconnected.
    pub fn distance_matrix(&self) -> Vec<Vec<u32>> {
        let adj = self.adjacency();
        (0..self.vertex_count)
            .map(|s| {
                bfs(&adj, s)
                    .into_iter()
                    .map(|d| d.expect("connected graph"))
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn bfs(adj: &[Vec<Vertex>], source: Vertex) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}
