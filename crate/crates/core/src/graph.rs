//! The qubit connectivity graph and cluster decomposition on it.
//!
//! Two qubits are adjacent when some check row contains both. An error whose
//! support splits into components of this graph touches disjoint sets of
//! check rows, component by component.

use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterGraph {
    vertex_count: usize,
    adjacency: Vec<Vec<usize>>,
    z_bound: usize,
    max_degree_observed: usize,
}

impl ClusterGraph {
    /// Graph from an undirected edge list. Self-loops are dropped and
    /// duplicate edges merged.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)], z_bound: usize) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(Error::IndexOutOfRange { index: v, len: vertex_count });
                }
            }
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        Ok(Self::finish(adjacency, z_bound))
    }

    fn finish(mut adjacency: Vec<Vec<usize>>, z_bound: usize) -> Self {
        for nb in &mut adjacency {
            nb.sort_unstable();
            nb.dedup();
        }
        let max_degree_observed = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Self { vertex_count: adjacency.len(), adjacency, z_bound, max_degree_observed }
    }

    fn add_check_rows<'a>(adjacency: &mut [Vec<usize>], rows: impl Iterator<Item = &'a [usize]>, offset: usize) {
        for row in rows {
            for &a in row {
                adjacency[a + offset].extend(row.iter().filter(|&&b| b != a).map(|&b| b + offset));
            }
        }
    }

    /// Connectivity graph of a single (classical) parity-check matrix.
    pub fn from_check_matrix(h: &BinaryMatrix) -> Self {
        let mut adjacency = vec![Vec::new(); h.cols()];
        Self::add_check_rows(&mut adjacency, h.row_supports().iter().map(Vec::as_slice), 0);
        let z = h.max_row_weight().saturating_sub(1) * h.max_column_weight();
        Self::finish(adjacency, z)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn z_bound(&self) -> usize {
        self.z_bound
    }

    pub fn max_degree_observed(&self) -> usize {
        self.max_degree_observed
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `hist[d]` = number of vertices of degree `d`.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.max_degree_observed + 1];
        for nb in &self.adjacency {
            hist[nb.len()] += 1;
        }
        hist
    }

    /// Hop distance from `sources` to every vertex (`usize::MAX` if unreachable).
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

/// Qubit graph of a CSS code: rows of both `g_x` and `g_z` generate edges;
/// the reported bound is `(ℓ−1)·j` with the code's measured weights.
pub fn build_connectivity_graph(code: &CssCode) -> ClusterGraph {
    let mut adjacency = vec![Vec::new(); code.n()];
    ClusterGraph::add_check_rows(&mut adjacency, code.stacked_checks(), 0);
    ClusterGraph::finish(adjacency, code.z_bound())
}

/// Layout of the space-time graph's vertex numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpacetimeLayout {
    pub qubits: usize,
    pub checks: usize,
    pub rounds: usize,
}

impl SpacetimeLayout {
    pub fn qubit_slot(&self, q: usize, t: usize) -> usize {
        t * self.qubits + q
    }

    /// Checks are numbered with `g_x` rows first, then `g_z` rows.
    pub fn check_slot(&self, c: usize, t: usize) -> usize {
        self.rounds * self.qubits + t * self.checks + c
    }

    pub fn vertex_count(&self) -> usize {
        self.rounds * (self.qubits + self.checks)
    }
}

/// Space-time graph over `rounds` measurement rounds.
///
/// Vertices are qubit slots `(q, t)` followed by syndrome slots `(c, t)`.
/// Each slice carries a copy of the qubit graph; `(q, t)` is joined to
/// `(c, t)` and `(c, t+1)` for every check `c` on `q`, and `(c, t)` to
/// `(c, t+1)`. Time boundaries are open. The reported bound is `j(ℓ+1)`.
pub fn build_spacetime_graph(code: &CssCode, rounds: usize) -> Result<(ClusterGraph, SpacetimeLayout)> {
    if rounds == 0 {
        return Err(Error::invalid("rounds must be at least 1"));
    }
    let layout = SpacetimeLayout { qubits: code.n(), checks: code.num_checks(), rounds };
    let mut adjacency = vec![Vec::new(); layout.vertex_count()];
    for t in 0..rounds {
        ClusterGraph::add_check_rows(&mut adjacency, code.stacked_checks(), layout.qubit_slot(0, t));
        for (c, row) in code.stacked_checks().enumerate() {
            let here = layout.check_slot(c, t);
            for &q in row {
                let qs = layout.qubit_slot(q, t);
                adjacency[qs].push(here);
                adjacency[here].push(qs);
                if t + 1 < rounds {
                    let next = layout.check_slot(c, t + 1);
                    adjacency[qs].push(next);
                    adjacency[next].push(qs);
                }
            }
            if t + 1 < rounds {
                let next = layout.check_slot(c, t + 1);
                adjacency[here].push(next);
                adjacency[next].push(here);
            }
        }
    }
    let z_prime = code.j() * (code.ell() + 1);
    Ok((ClusterGraph::finish(adjacency, z_prime), layout))
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        ra
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    fn reset(&mut self, x: usize) {
        self.parent[x] = x;
        self.size[x] = 1;
    }
}

/// Connected components of the subgraph induced by a vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterDecomposition {
    /// The support, sorted.
    pub vertices: Vec<usize>,
    /// Cluster id of `vertices[i]`. Ids follow the smallest member vertex.
    pub labels: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
}

impl ClusterDecomposition {
    pub fn len(&self) -> usize {
        self.cluster_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_sizes.is_empty()
    }

    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok().map(|i| self.labels[i])
    }

    /// Member lists, each sorted.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_sizes.len()];
        for (&v, &l) in self.vertices.iter().zip(&self.labels) {
            out[l].push(v);
        }
        out
    }
}

/// Reusable scratch for repeated decompositions on one graph.
#[derive(Clone, Debug)]
pub struct Decomposer<'g> {
    graph: &'g ClusterGraph,
    uf: UnionFind,
    mark: Vec<u32>,
    stamp: u32,
}

impl<'g> Decomposer<'g> {
    pub fn new(graph: &'g ClusterGraph) -> Self {
        Self { graph, uf: UnionFind::new(graph.vertex_count), mark: vec![0; graph.vertex_count], stamp: 0 }
    }

    /// Unions occupied neighbours; afterwards `root` gives each member's
    /// representative. `support` must hold distinct in-range vertices.
    fn label(&mut self, support: &[usize]) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.fill(0);
            self.stamp = 1;
        }
        for &v in support {
            self.mark[v] = self.stamp;
            self.uf.reset(v);
        }
        for &v in support {
            for &u in &self.graph.adjacency[v] {
                if u < v && self.mark[u] == self.stamp {
                    self.uf.union(u, v);
                }
            }
        }
    }

    /// Sizes of the clusters, in no particular order, appended to `out`.
    pub fn cluster_sizes_into(&mut self, support: &[usize], out: &mut Vec<usize>) {
        self.label(support);
        for &v in support {
            if self.uf.find(v) == v {
                out.push(self.uf.size[v]);
            }
        }
    }

    /// Size of the cluster containing each support vertex, in support order.
    pub fn member_sizes_into(&mut self, support: &[usize], out: &mut Vec<usize>) {
        self.label(support);
        for &v in support {
            out.push(self.uf.size_of(v));
        }
    }

    pub fn decompose(&mut self, support: &[usize]) -> Result<ClusterDecomposition> {
        let mut vertices = support.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&bad) = vertices.last().filter(|&&v| v >= self.graph.vertex_count) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.graph.vertex_count });
        }
        self.label(&vertices);
        let mut id_of_root = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(vertices.len());
        let mut sizes = Vec::new();
        for &v in &vertices {
            let r = self.uf.find(v);
            let id = *id_of_root.entry(r).or_insert_with(|| {
                sizes.push(0);
                sizes.len() - 1
            });
            sizes[id] += 1;
            labels.push(id);
        }
        Ok(ClusterDecomposition { vertices, labels, cluster_sizes: sizes })
    }
}

/// Connected components of the subgraph induced by `support`.
pub fn decompose(graph: &ClusterGraph, support: &[usize]) -> Result<ClusterDecomposition> {
    Decomposer::new(graph).decompose(support)
}
