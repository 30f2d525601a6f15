//! Undirected communication graphs and their oriented incidence matrices.
//!
//! Edges are stored as ordered pairs `(i, j)` with `i < j` (0-based); column
//! `k` of the incidence matrix `B` carries `+1` at row `i` and `−1` at row
//! `j`. The kernel of `B` is the cycle space of the graph: trees have full
//! column rank, edge-disjoint cycles contribute one ±1-signed indicator
//! vector each, and a pair of cycles sharing a single edge contributes the
//! pair of signed indicators of its two cycles.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{null_space_basis, symmetric_eigenvalues, DenseMatrix};
use crate::{real, Real};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("node {node} out of range for {n_nodes} nodes")]
    NodeOutOfRange { node: usize, n_nodes: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("permutation is not a bijection on the expected index range")]
    InvalidPermutation,
    #[error("edge list parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A connected undirected graph on `N` nodes with an ordered edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkGraph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl NetworkGraph {
    /// Builds a graph from 0-based node pairs. Pairs are normalized to
    /// `i < j`; self-loops, duplicates, out-of-range nodes, and disconnected
    /// graphs are rejected.
    pub fn new(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n_nodes == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut normalized = Vec::with_capacity(edges.len());
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop { node: a });
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if j >= n_nodes {
                return Err(GraphError::NodeOutOfRange { node: j, n_nodes });
            }
            if !seen.insert((i, j)) {
                return Err(GraphError::DuplicateEdge { i, j });
            }
            normalized.push((i, j));
        }
        let graph = Self { n_nodes, edges: normalized };
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            adj[i].push((j, k));
            adj[j].push((i, k));
        }
        adj
    }

    fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n_nodes];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n_nodes
    }

    /// A connected graph is a tree exactly when `M = N − 1`.
    pub fn is_tree(&self) -> bool {
        self.edges.len() == self.n_nodes - 1
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let mut entries = vec![0i32; self.n_nodes * self.edges.len()];
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            entries[i * self.edges.len() + k] = 1;
            entries[j * self.edges.len() + k] = -1;
        }
        IncidenceMatrix { n_nodes: self.n_nodes, n_edges: self.edges.len(), entries }
    }

    /// Path graph `0 − 1 − ⋯ − (n−1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Self::new(n, &edges).expect("path graph is valid")
    }

    /// Single cycle on `n ≥ 3` nodes.
    pub fn ring(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 nodes");
        let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, n - 1));
        Self::new(n, &edges).expect("ring graph is valid")
    }

    /// Star with node 0 at the hub.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::new(n, &edges).expect("star graph is valid")
    }

    /// Uniform random labeled tree, decoded from a random Prüfer sequence.
    pub fn random_tree(n: usize, seed: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return Self::new(1, &[]).expect("single node is valid");
        }
        if n == 2 {
            return Self::new(2, &[(0, 1)]).expect("single edge is valid");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        let mut degree = vec![1usize; n];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut leaves: BTreeSet<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
        let mut edges = Vec::with_capacity(n - 1);
        for &x in &seq {
            let leaf = *leaves.iter().next().expect("a leaf always remains");
            leaves.remove(&leaf);
            edges.push((leaf, x));
            degree[x] -= 1;
            if degree[x] == 1 {
                leaves.insert(x);
            }
        }
        let mut rest = leaves.into_iter();
        let a = rest.next().expect("two leaves remain");
        let b = rest.next().expect("two leaves remain");
        edges.push((a, b));
        Self::new(n, &edges).expect("Prüfer decode yields a tree")
    }

    /// Parses the edge-list text format: first line `N M`, then `M` lines
    /// `i j` with 1-based node indices.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (line_no, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header line `N M`".to_string(),
        })?;
        let parse_usize = |tok: Option<&str>, what: &str, line: usize| -> Result<usize, GraphError> {
            tok.ok_or_else(|| GraphError::Parse { line, message: format!("missing {what}") })?
                .parse()
                .map_err(|_| GraphError::Parse { line, message: format!("invalid {what}") })
        };
        let mut parts = header.split_whitespace();
        let n = parse_usize(parts.next(), "node count", line_no + 1)?;
        let m = parse_usize(parts.next(), "edge count", line_no + 1)?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line_no, line) = lines.next().ok_or(GraphError::Parse {
                line: 0,
                message: format!("expected {m} edge lines, found {}", edges.len()),
            })?;
            let mut parts = line.split_whitespace();
            let i = parse_usize(parts.next(), "edge tail", line_no + 1)?;
            let j = parse_usize(parts.next(), "edge head", line_no + 1)?;
            if i == 0 || j == 0 {
                return Err(GraphError::Parse {
                    line: line_no + 1,
                    message: "node indices are 1-based".to_string(),
                });
            }
            edges.push((i - 1, j - 1));
        }
        Self::new(n, &edges)
    }

    /// Writes the edge-list text format (1-based, normalized `i < j`).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n_nodes, self.edges.len());
        for &(i, j) in &self.edges {
            out.push_str(&format!("{} {}\n", i + 1, j + 1));
        }
        out
    }

    /// Cycle structure and a kernel basis of the incidence matrix.
    ///
    /// Graphs of this type are connected by construction, so the kernel
    /// dimension is always `M − N + 1`.
    pub fn cycle_null_space<S: Real>(&self) -> CycleBasisReport<S> {
        let cycles = self.reduced_cycle_basis();
        if cycles.is_empty() {
            return CycleBasisReport {
                cycles: Vec::new(),
                classification: CycleClassification::Tree,
                basis: NullSpaceBasis::Signed(Vec::new()),
            };
        }

        let all_simple = cycles.iter().all(|c| self.is_simple_cycle(c));
        let mut classification = if all_simple {
            self.classify_simple_cycles(&cycles)
        } else {
            CycleClassification::General
        };

        let basis = match classification {
            CycleClassification::IndependentCycles | CycleClassification::SharedEdgePairs => {
                let signed: Option<Vec<Vec<i32>>> =
                    cycles.iter().map(|c| self.signed_indicator(c)).collect();
                let b = self.incidence();
                match signed {
                    Some(vectors)
                        if vectors.iter().all(|v| b.mul_signed(v).iter().all(|&x| x == 0)) =>
                    {
                        NullSpaceBasis::Signed(vectors)
                    }
                    _ => {
                        classification = CycleClassification::General;
                        NullSpaceBasis::Numeric(self.numeric_kernel())
                    }
                }
            }
            _ => NullSpaceBasis::Numeric(self.numeric_kernel()),
        };

        CycleBasisReport {
            cycles: cycles.iter().map(|c| c.iter().copied().collect()).collect(),
            classification,
            basis,
        }
    }

    fn numeric_kernel<S: Real>(&self) -> Vec<Vec<S>> {
        let b = self.incidence().to_dense::<S>();
        null_space_basis(&b, real::<S>(1e-10))
    }

    /// Fundamental cycles from a DFS spanning tree, then greedy symmetric-
    /// difference reduction. A raw fundamental cycle can thread through a
    /// neighbouring cycle region when the chord's tree path detours; the
    /// reduction collapses those back onto the short geometric cycles.
    fn reduced_cycle_basis(&self) -> Vec<BTreeSet<usize>> {
        let adj = self.adjacency();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.n_nodes];
        let mut visited = vec![false; self.n_nodes];
        let mut tree_edge = vec![false; self.edges.len()];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, k) in &adj[u] {
                if !visited[v] {
                    visited[v] = true;
                    parent[v] = Some((u, k));
                    tree_edge[k] = true;
                    stack.push(v);
                }
            }
        }

        let depth_of = |mut v: usize| {
            let mut d = 0usize;
            while let Some((p, _)) = parent[v] {
                v = p;
                d += 1;
            }
            d
        };

        let mut cycles: Vec<BTreeSet<usize>> = Vec::new();
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            if tree_edge[k] {
                continue;
            }
            // Tree path from i to j, plus the chord itself.
            let mut cycle = BTreeSet::new();
            cycle.insert(k);
            let (mut a, mut b) = (i, j);
            let (mut da, mut db) = (depth_of(a), depth_of(b));
            while da > db {
                let (p, e) = parent[a].expect("non-root has a parent");
                cycle.insert(e);
                a = p;
                da -= 1;
            }
            while db > da {
                let (p, e) = parent[b].expect("non-root has a parent");
                cycle.insert(e);
                b = p;
                db -= 1;
            }
            while a != b {
                let (pa, ea) = parent[a].expect("non-root has a parent");
                let (pb, eb) = parent[b].expect("non-root has a parent");
                cycle.insert(ea);
                cycle.insert(eb);
                a = pa;
                b = pb;
            }
            cycles.push(cycle);
        }

        // Greedy reduction: replace a cycle by its symmetric difference with
        // another whenever that is strictly shorter. Symmetric differences
        // preserve the GF(2) span, so count and independence survive.
        let mut changed = true;
        let mut guard = 0;
        while changed && guard < 100 {
            changed = false;
            guard += 1;
            for i in 0..cycles.len() {
                for j in 0..cycles.len() {
                    if i == j || cycles[i].intersection(&cycles[j]).next().is_none() {
                        continue;
                    }
                    let diff: BTreeSet<usize> =
                        cycles[i].symmetric_difference(&cycles[j]).copied().collect();
                    if !diff.is_empty() && diff.len() < cycles[j].len() {
                        cycles[j] = diff;
                        changed = true;
                    }
                }
            }
        }
        cycles
    }

    /// True when the edge set induces a single closed walk with every
    /// incident node of degree exactly 2.
    fn is_simple_cycle(&self, cycle: &BTreeSet<usize>) -> bool {
        let mut degree = vec![0usize; self.n_nodes];
        for &k in cycle {
            let (i, j) = self.edges[k];
            degree[i] += 1;
            degree[j] += 1;
        }
        if degree.iter().any(|&d| d != 0 && d != 2) {
            return false;
        }
        let nodes: Vec<usize> = (0..self.n_nodes).filter(|&i| degree[i] > 0).collect();
        if nodes.is_empty() {
            return false;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![nodes[0]];
        seen.insert(nodes[0]);
        while let Some(u) = stack.pop() {
            for &k in cycle {
                let (i, j) = self.edges[k];
                let v = if i == u {
                    j
                } else if j == u {
                    i
                } else {
                    continue;
                };
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == nodes.len()
    }

    fn classify_simple_cycles(&self, cycles: &[BTreeSet<usize>]) -> CycleClassification {
        let mut partner = vec![None::<usize>; cycles.len()];
        for i in 0..cycles.len() {
            for j in (i + 1)..cycles.len() {
                let shared = cycles[i].intersection(&cycles[j]).count();
                if shared == 0 {
                    continue;
                }
                if shared > 1 || partner[i].is_some() || partner[j].is_some() {
                    return CycleClassification::General;
                }
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
        }
        if partner.iter().all(Option::is_none) {
            CycleClassification::IndependentCycles
        } else {
            CycleClassification::SharedEdgePairs
        }
    }

    /// Walks a simple cycle and signs each edge by traversal direction:
    /// `+1` when walked tail→head (small node to large node), `−1` against.
    /// The walk starts at the cycle's smallest node along its smallest edge.
    fn signed_indicator(&self, cycle: &BTreeSet<usize>) -> Option<Vec<i32>> {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.n_nodes];
        for &k in cycle {
            let (i, j) = self.edges[k];
            incident[i].push(k);
            incident[j].push(k);
        }
        let start = (0..self.n_nodes).find(|&i| !incident[i].is_empty())?;
        let mut v = vec![0i32; self.edges.len()];
        let mut node = start;
        let mut prev_edge = usize::MAX;
        loop {
            let k = *incident[node].iter().find(|&&k| k != prev_edge)?;
            let (i, j) = self.edges[k];
            if node == i {
                v[k] = 1;
                node = j;
            } else {
                v[k] = -1;
                node = i;
            }
            prev_edge = k;
            if node == start {
                break;
            }
        }
        if v.iter().filter(|&&x| x != 0).count() == cycle.len() {
            Some(v)
        } else {
            None
        }
    }
}

/// Oriented node-edge incidence matrix with entries in {−1, 0, +1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n_nodes: usize,
    n_edges: usize,
    entries: Vec<i32>,
}

impl IncidenceMatrix {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn entry(&self, i: usize, k: usize) -> i32 {
        self.entries[i * self.n_edges + k]
    }

    /// Builds directly from rows (for fixtures and tests).
    pub fn from_rows(rows: &[Vec<i32>]) -> Self {
        let n_nodes = rows.len();
        let n_edges = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_nodes * n_edges);
        for row in rows {
            assert_eq!(row.len(), n_edges, "ragged rows");
            entries.extend_from_slice(row);
        }
        Self { n_nodes, n_edges, entries }
    }

    /// Row permutation `Γ·B·Ī`: relabels node `i` to `perm[i]`, then flips
    /// the sign of any column whose `+1` landed below its `−1`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if !is_bijection(perm, self.n_nodes) {
            return Err(GraphError::InvalidPermutation);
        }
        let mut out = vec![0i32; self.entries.len()];
        for i in 0..self.n_nodes {
            for k in 0..self.n_edges {
                out[perm[i] * self.n_edges + k] = self.entry(i, k);
            }
        }
        let mut result = Self { n_nodes: self.n_nodes, n_edges: self.n_edges, entries: out };
        for k in 0..self.n_edges {
            let plus = (0..self.n_nodes).find(|&i| result.entry(i, k) == 1);
            let minus = (0..self.n_nodes).find(|&i| result.entry(i, k) == -1);
            if let (Some(p), Some(m)) = (plus, minus) {
                if p > m {
                    for i in 0..self.n_nodes {
                        result.entries[i * self.n_edges + k] *= -1;
                    }
                }
            }
        }
        Ok(result)
    }

    /// Column permutation `B·Γ`: renumbers edge `k` to `perm[k]`.
    pub fn permute_edges(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if !is_bijection(perm, self.n_edges) {
            return Err(GraphError::InvalidPermutation);
        }
        let mut out = vec![0i32; self.entries.len()];
        for i in 0..self.n_nodes {
            for k in 0..self.n_edges {
                out[i * self.n_edges + perm[k]] = self.entry(i, k);
            }
        }
        Ok(Self { n_nodes: self.n_nodes, n_edges: self.n_edges, entries: out })
    }

    /// Exact integer product `B·v`.
    pub fn mul_signed(&self, v: &[i32]) -> Vec<i64> {
        assert_eq!(v.len(), self.n_edges, "vector length must equal edge count");
        (0..self.n_nodes)
            .map(|i| (0..self.n_edges).map(|k| self.entry(i, k) as i64 * v[k] as i64).sum())
            .collect()
    }

    pub fn to_dense<S: Real>(&self) -> DenseMatrix<S> {
        let mut m = DenseMatrix::zeros(self.n_nodes, self.n_edges);
        for i in 0..self.n_nodes {
            for k in 0..self.n_edges {
                m.set(i, k, real::<S>(self.entry(i, k) as f64));
            }
        }
        m
    }

    /// The Gram matrix `BᵀB` (M×M), accumulated in integers.
    pub fn btb<S: Real>(&self) -> DenseMatrix<S> {
        let mut g = DenseMatrix::zeros(self.n_edges, self.n_edges);
        for k in 0..self.n_edges {
            for l in 0..self.n_edges {
                let mut acc = 0i64;
                for i in 0..self.n_nodes {
                    acc += self.entry(i, k) as i64 * self.entry(i, l) as i64;
                }
                g.set(k, l, real::<S>(acc as f64));
            }
        }
        g
    }

    /// Smallest eigenvalue of `BᵀB`; strictly positive exactly for trees.
    /// Returns +∞ for an edgeless graph (the 0×0 Gram matrix is vacuously
    /// positive definite).
    pub fn lambda_min_btb<S: Real>(&self) -> S {
        if self.n_edges == 0 {
            return S::infinity();
        }
        symmetric_eigenvalues(&self.btb::<S>())[0]
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_nodes {
            for k in 0..self.n_edges {
                write!(f, "{:>3}", self.entry(i, k))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn is_bijection(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Cycle structure of the graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleClassification {
    Tree,
    IndependentCycles,
    SharedEdgePairs,
    General,
}

impl fmt::Display for CycleClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CycleClassification::Tree => "tree",
            CycleClassification::IndependentCycles => "independent_cycles",
            CycleClassification::SharedEdgePairs => "shared_edge_pairs",
            CycleClassification::General => "general",
        };
        f.write_str(s)
    }
}

/// Kernel basis of the incidence matrix: exact ±1 indicator vectors for the
/// structured cycle classes, an orthonormal numeric basis otherwise.
#[derive(Clone, Debug)]
pub enum NullSpaceBasis<S> {
    Signed(Vec<Vec<i32>>),
    Numeric(Vec<Vec<S>>),
}

impl<S: Real> NullSpaceBasis<S> {
    pub fn dimension(&self) -> usize {
        match self {
            NullSpaceBasis::Signed(v) => v.len(),
            NullSpaceBasis::Numeric(v) => v.len(),
        }
    }

    pub fn as_real(&self) -> Vec<Vec<S>> {
        match self {
            NullSpaceBasis::Signed(vs) => {
                vs.iter().map(|v| v.iter().map(|&x| real::<S>(x as f64)).collect()).collect()
            }
            NullSpaceBasis::Numeric(vs) => vs.clone(),
        }
    }
}

/// Report from [`NetworkGraph::cycle_null_space`].
#[derive(Clone, Debug)]
pub struct CycleBasisReport<S> {
    /// Edge-index sets of the detected cycles (sorted).
    pub cycles: Vec<Vec<usize>>,
    pub classification: CycleClassification,
    pub basis: NullSpaceBasis<S>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_principal_angle_sin;

    fn triangle() -> NetworkGraph {
        NetworkGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn incidence_of_triangle_matches_reference() {
        let b = triangle().incidence();
        let expect = IncidenceMatrix::from_rows(&[vec![1, 0, 1], vec![-1, 1, 0], vec![0, -1, -1]]);
        assert_eq!(b, expect);
    }

    #[test]
    fn incidence_of_single_edge_and_path() {
        let b = NetworkGraph::new(2, &[(0, 1)]).unwrap().incidence();
        assert_eq!(b, IncidenceMatrix::from_rows(&[vec![1], vec![-1]]));

        let b = NetworkGraph::path(3).incidence();
        assert_eq!(b, IncidenceMatrix::from_rows(&[vec![1, 0], vec![-1, 1], vec![0, -1]]));
    }

    #[test]
    fn column_sums_vanish() {
        let b = NetworkGraph::random_tree(7, 3).incidence();
        for k in 0..b.n_edges() {
            let sum: i32 = (0..b.n_nodes()).map(|i| b.entry(i, k)).sum();
            assert_eq!(sum, 0);
        }
    }

    #[test]
    fn node_swap_reproduces_reference_matrix() {
        let b1 = triangle().incidence();
        // Swap nodes 0 and 1.
        let b2 = b1.permute_nodes(&[1, 0, 2]).unwrap();
        let expect = IncidenceMatrix::from_rows(&[vec![1, 1, 0], vec![-1, 0, 1], vec![0, -1, -1]]);
        assert_eq!(b2, expect);

        let identity = b1.permute_nodes(&[0, 1, 2]).unwrap();
        assert_eq!(identity, b1);

        let back = b2.permute_nodes(&[1, 0, 2]).unwrap();
        assert_eq!(back, b1);
    }

    #[test]
    fn edge_swap_reproduces_reference_matrix() {
        let b2 = IncidenceMatrix::from_rows(&[vec![1, 1, 0], vec![-1, 0, 1], vec![0, -1, -1]]);
        // Swap edges 0 and 2.
        let b3 = b2.permute_edges(&[2, 1, 0]).unwrap();
        let expect = IncidenceMatrix::from_rows(&[vec![0, 1, 1], vec![1, 0, -1], vec![-1, -1, 0]]);
        assert_eq!(b3, expect);

        assert_eq!(b2.permute_edges(&[0, 1, 2]).unwrap(), b2);
        assert_eq!(b3.permute_edges(&[2, 1, 0]).unwrap(), b2);
    }

    #[test]
    fn invalid_permutations_are_rejected() {
        let b = triangle().incidence();
        assert!(matches!(b.permute_nodes(&[0, 0, 1]), Err(GraphError::InvalidPermutation)));
        assert!(matches!(b.permute_edges(&[0, 1]), Err(GraphError::InvalidPermutation)));
    }

    #[test]
    fn tree_detection() {
        assert!(NetworkGraph::path(3).is_tree());
        assert!(!triangle().is_tree());
        assert!(NetworkGraph::star(5).is_tree());
    }

    #[test]
    fn lambda_min_examples() {
        let single = NetworkGraph::new(2, &[(0, 1)]).unwrap().incidence();
        assert!((single.lambda_min_btb::<f64>() - 2.0).abs() < 1e-14);

        let path = NetworkGraph::path(3).incidence();
        assert!((path.lambda_min_btb::<f64>() - 1.0).abs() < 1e-13);

        let tri = triangle().incidence();
        assert!(tri.lambda_min_btb::<f64>().abs() < 1e-12);
    }

    #[test]
    fn tree_has_empty_cycle_basis() {
        let report = NetworkGraph::random_tree(6, 11).cycle_null_space::<f64>();
        assert_eq!(report.classification, CycleClassification::Tree);
        assert_eq!(report.basis.dimension(), 0);
        assert!(report.cycles.is_empty());
    }

    #[test]
    fn triangle_cycle_vector() {
        let report = triangle().cycle_null_space::<f64>();
        assert_eq!(report.classification, CycleClassification::IndependentCycles);
        match &report.basis {
            NullSpaceBasis::Signed(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0], vec![1, 1, -1]);
            }
            _ => panic!("expected signed basis"),
        }
    }

    /// 5-node graph made of two vertex-joined triangles; kernel is spanned
    /// by [1,1,−1,0,0,0] and [0,0,0,1,−1,1].
    fn two_independent_cycles() -> NetworkGraph {
        NetworkGraph::new(5, &[(0, 1), (1, 2), (0, 2), (0, 3), (0, 4), (3, 4)]).unwrap()
    }

    /// 6-node graph adding a third triangle that shares edge (0,2) with the
    /// first one; the kernel has dimension 3.
    fn shared_edge_graph() -> NetworkGraph {
        NetworkGraph::new(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (0, 4), (3, 4), (0, 5), (2, 5)])
            .unwrap()
    }

    #[test]
    fn independent_cycles_basis_matches_reference() {
        let g = two_independent_cycles();
        let report = g.cycle_null_space::<f64>();
        assert_eq!(report.classification, CycleClassification::IndependentCycles);
        let expect =
            vec![vec![1.0, 1.0, -1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0, -1.0, 1.0]];
        let angle = max_principal_angle_sin(&report.basis.as_real(), &expect);
        assert!(angle < 1e-10, "principal angle sin = {angle}");
        match &report.basis {
            NullSpaceBasis::Signed(vs) => {
                let b = g.incidence();
                for v in vs {
                    assert!(b.mul_signed(v).iter().all(|&x| x == 0));
                }
            }
            _ => panic!("expected signed basis"),
        }
    }

    #[test]
    fn shared_edge_pair_basis_spans_reference() {
        let g = shared_edge_graph();
        let report = g.cycle_null_space::<f64>();
        assert_eq!(report.classification, CycleClassification::SharedEdgePairs);
        assert_eq!(report.basis.dimension(), 3);
        let expect = vec![
            vec![1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0],
            vec![0.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0, 0.0],
        ];
        let angle = max_principal_angle_sin(&report.basis.as_real(), &expect);
        assert!(angle < 1e-10, "principal angle sin = {angle}");
        match &report.basis {
            NullSpaceBasis::Signed(vs) => {
                let b = g.incidence();
                for v in vs {
                    assert!(b.mul_signed(v).iter().all(|&x| x == 0));
                }
            }
            _ => panic!("expected signed basis"),
        }
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(NetworkGraph::new(3, &[(1, 1)]), Err(GraphError::SelfLoop { .. })));
        assert!(matches!(
            NetworkGraph::new(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(NetworkGraph::new(3, &[(0, 5)]), Err(GraphError::NodeOutOfRange { .. })));
        assert!(matches!(NetworkGraph::new(4, &[(0, 1), (2, 3)]), Err(GraphError::Disconnected)));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = shared_edge_graph();
        let text = g.to_edge_list();
        let back = NetworkGraph::parse_edge_list(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_parse_errors_carry_line_numbers() {
        let err = NetworkGraph::parse_edge_list("3\n1 2\n").unwrap_err();
        match err {
            GraphError::Parse { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("edge count"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = NetworkGraph::parse_edge_list("3 2\n1 2\n2 x\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
    }

    #[test]
    fn random_tree_is_reproducible() {
        let a = NetworkGraph::random_tree(8, 42);
        let b = NetworkGraph::random_tree(8, 42);
        assert_eq!(a, b);
        assert!(a.is_tree());
    }
}
