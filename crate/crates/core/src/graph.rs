//! Undirected simple graphs on dense vertex ids `0..n`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An unordered vertex pair, stored as `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        Ok(Edge { u: a.min(b), v: a.max(b) })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Undirected simple graph. Neighbor lists are kept sorted, so membership
/// tests are binary searches and iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureSummary {
    pub connected: bool,
    pub regular_degree: Option<usize>,
    pub max_degree: usize,
    /// `sqrt(sum deg(i)^2 / n)`
    pub quadratic_mean_degree: f64,
}

impl Graph {
    /// Graph on `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (a, b) in edges {
            let e = Edge::new(a, b)?;
            g.check_vertex(e.v)?;
            if g.has_edge(e) {
                return Err(Error::EdgeExists(e));
            }
            g.insert(e);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        e.v < self.n() && self.adjacency[e.u].binary_search(&e.v).is_ok()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        Edge::new(a, b).map(|e| self.has_edge(e)).unwrap_or(false)
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter().filter(move |&&v| v > u).map(move |&v| Edge { u, v })
        })
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    fn insert(&mut self, e: Edge) {
        let pos = self.adjacency[e.u].binary_search(&e.v).unwrap_err();
        self.adjacency[e.u].insert(pos, e.v);
        let pos = self.adjacency[e.v].binary_search(&e.u).unwrap_err();
        self.adjacency[e.v].insert(pos, e.u);
        self.m += 1;
    }

    fn erase(&mut self, e: Edge) {
        let pos = self.adjacency[e.u].binary_search(&e.v).unwrap();
        self.adjacency[e.u].remove(pos);
        let pos = self.adjacency[e.v].binary_search(&e.u).unwrap();
        self.adjacency[e.v].remove(pos);
        self.m -= 1;
    }

    /// `G + e`. The receiver is left untouched.
    pub fn add_edge(&self, e: Edge) -> Result<Graph> {
        self.check_vertex(e.v)?;
        if self.has_edge(e) {
            return Err(Error::EdgeExists(e));
        }
        let mut g = self.clone();
        g.insert(e);
        Ok(g)
    }

    /// `G - e`, refusing bridges so the result stays connected.
    pub fn remove_edge(&self, e: Edge) -> Result<Graph> {
        if self.is_bridge(e)? {
            return Err(Error::BridgeRemoval(e));
        }
        Ok(self.remove_edge_unchecked(e)?)
    }

    /// `G - e` without the bridge test.
    pub fn remove_edge_unchecked(&self, e: Edge) -> Result<Graph> {
        self.check_vertex(e.v)?;
        if !self.has_edge(e) {
            return Err(Error::EdgeMissing(e));
        }
        let mut g = self.clone();
        g.erase(e);
        Ok(g)
    }

    /// True iff deleting `e` disconnects its endpoints.
    pub fn is_bridge(&self, e: Edge) -> Result<bool> {
        self.check_vertex(e.v)?;
        if !self.has_edge(e) {
            return Err(Error::EdgeMissing(e));
        }
        let dist = self.bfs_with_mask(e.u, Some(e));
        Ok(dist[e.v].is_none())
    }

    fn bfs_with_mask(&self, source: usize, skip: Option<Edge>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.adjacency[x] {
                if skip.is_some_and(|e| (e.u == x && e.v == y) || (e.u == y && e.v == x)) {
                    continue;
                }
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// BFS distances from `source`; `None` marks unreachable vertices.
    pub fn bfs(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(source)?;
        Ok(self.bfs_with_mask(source, None))
    }

    /// Shortest-path length, `None` when `u` and `v` lie in different components.
    pub fn distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        self.check_vertex(v)?;
        Ok(self.bfs(u)?[v])
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        self.bfs_with_mask(0, None).iter().all(Option::is_some)
    }

    /// Largest eccentricity, via one BFS per vertex.
    pub fn diameter(&self) -> Result<usize> {
        let mut diam = 0;
        for s in 0..self.n() {
            for d in self.bfs_with_mask(s, None) {
                diam = diam.max(d.ok_or(Error::Disconnected)?);
            }
        }
        Ok(diam)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adjacency.first()?.len();
        self.adjacency.iter().all(|a| a.len() == first).then_some(first)
    }

    pub fn structure_summary(&self) -> StructureSummary {
        let n = self.n().max(1) as f64;
        let sq: f64 = self.adjacency.iter().map(|a| (a.len() * a.len()) as f64).sum();
        StructureSummary {
            connected: self.is_connected(),
            regular_degree: self.regular_degree(),
            max_degree: self.max_degree(),
            quadratic_mean_degree: (sq / n).sqrt(),
        }
    }

    /// Subgraph induced on `vertices`, relabelled in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n()];
        for (k, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = k;
        }
        let mut g = Graph::empty(vertices.len());
        for (k, &v) in vertices.iter().enumerate() {
            for &w in &self.adjacency[v] {
                let j = index[w];
                if j != usize::MAX && j > k {
                    g.insert(Edge { u: k, v: j });
                }
            }
        }
        Ok(g)
    }

    /// Applies a vertex permutation `v -> perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n() {
            return Err(Error::InvalidParameters("permutation length mismatch".into()));
        }
        Graph::from_edges(self.n(), self.edges().map(|e| (perm[e.u], perm[e.v])))
    }

    /// Pairs `{u, v}` with `u < v` that are not edges.
    pub fn non_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n()).flat_map(move |u| {
            (u + 1..self.n())
                .filter(move |&v| !self.is_adjacent(u, v))
                .map(move |v| Edge { u, v })
        })
    }
}
