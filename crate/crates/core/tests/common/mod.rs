//! Shared fixtures for integration tests.

use std::collections::BTreeSet;

use proptest::prelude::*;
use spheresync::sphere::{rotate_step, AngularVelocity, UnitVector};
use spheresync::NetworkGraph;

pub fn unit_vector() -> impl Strategy<Value = UnitVector<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("away from the origin", |(x, y, z)| (x * x + y * y + z * z).sqrt() > 0.1)
        .prop_map(|(x, y, z)| UnitVector::new(x, y, z).unwrap())
}

pub fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64]
}

/// Rotates `n` by `angle` about `axis` with the exact Rodrigues map.
pub fn rotated(n: &UnitVector<f64>, axis: &UnitVector<f64>, angle: f64) -> UnitVector<f64> {
    let w = AngularVelocity::new(axis.x() * angle, axis.y() * angle, axis.z() * angle);
    rotate_step(n, &w, 1.0)
}

/// All simple cycles of a graph as edge sets, found by canonical DFS
/// (smallest cycle node first). Independent of the library's cycle-basis
/// machinery; intended as a ground-truth oracle for small graphs.
pub fn enumerate_simple_cycles(graph: &NetworkGraph) -> Vec<BTreeSet<usize>> {
    let n = graph.n_nodes();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, &(i, j)) in graph.edges().iter().enumerate() {
        adj[i].push((j, k));
        adj[j].push((i, k));
    }
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();

    fn dfs(
        adj: &[Vec<(usize, usize)>],
        start: usize,
        node: usize,
        visited: &mut Vec<bool>,
        path_edges: &mut Vec<usize>,
        found: &mut BTreeSet<BTreeSet<usize>>,
    ) {
        for &(next, k) in &adj[node] {
            if Some(&k) == path_edges.last() {
                continue;
            }
            if next == start && path_edges.len() >= 2 {
                let mut cycle: BTreeSet<usize> = path_edges.iter().copied().collect();
                cycle.insert(k);
                found.insert(cycle);
                continue;
            }
            // Canonical form: never walk below the start node.
            if next <= start || visited[next] {
                continue;
            }
            visited[next] = true;
            path_edges.push(k);
            dfs(adj, start, next, visited, path_edges, found);
            path_edges.pop();
            visited[next] = false;
        }
    }

    for start in 0..n {
        let mut visited = vec![false; n];
        visited[start] = true;
        let mut path = Vec::new();
        dfs(&adj, start, start, &mut visited, &mut path, &mut found);
    }
    found.into_iter().collect()
}
