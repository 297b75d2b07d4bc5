//! Laplacian and matrix-exponential centralities. Both are dense `O(n³)`
//! computations and expect a connected graph.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::graph::TopologyGraph;
use crate::par;

fn laplacian(g: &TopologyGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for v in g.nodes() {
        l[(v as usize, v as usize)] = g.degree(v) as f64;
        for &w in g.neighbors(v) {
            l[(v as usize, w as usize)] = -1.0;
        }
    }
    l
}

/// Information (current-flow closeness) centrality `1 / Σ_w R(v, w)` per
/// node, with effective resistances taken from the Laplacian pseudo-inverse
/// `(L + J/n)⁻¹ − J/n`. Returns `None` when the graph is disconnected or has
/// fewer than two nodes.
pub fn information_centrality(g: &TopologyGraph) -> Option<Vec<f64>> {
    let n = g.node_count();
    if n < 2 || !g.is_connected() {
        return None;
    }
    let shift = 1.0 / n as f64;
    let mut m = laplacian(g);
    m.add_scalar_mut(shift);
    let inv = m.cholesky()?.inverse();
    let diag: Vec<f64> = (0..n).map(|i| inv[(i, i)] - shift).collect();
    let trace: f64 = diag.iter().sum();
    // Rows of the pseudo-inverse sum to zero, so Σ_w R(v,w) = n·L⁺vv + tr L⁺.
    Some(diag.iter().map(|&d| 1.0 / (n as f64 * d + trace)).collect())
}

fn expm_symmetric(a: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a);
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lambda.exp());
    }
    scaled * v.transpose()
}

/// Communicability betweenness per node: the fraction of walk-weighted
/// communicability between other pairs that passes through the node,
/// normalised by `(n−1)² − (n−1)`. Returns `None` when the graph is
/// disconnected or has fewer than three nodes.
pub fn communicability_betweenness(g: &TopologyGraph) -> Option<Vec<f64>> {
    let n = g.node_count();
    if n < 3 || !g.is_connected() {
        return None;
    }
    let mut adj = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        adj[(u as usize, v as usize)] = 1.0;
        adj[(v as usize, u as usize)] = 1.0;
    }
    let exp_a = expm_symmetric(adj.clone());
    let scale = 1.0 / ((n - 1) as f64 * (n - 1) as f64 - (n - 1) as f64);
    Some(par::map_collect(n, |r| {
        let mut reduced = adj.clone();
        reduced.row_mut(r).fill(0.0);
        reduced.column_mut(r).fill(0.0);
        let exp_r = expm_symmetric(reduced);
        let mut total = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j && i != r && j != r {
                    total += (exp_a[(i, j)] - exp_r[(i, j)]) / exp_a[(i, j)];
                }
            }
        }
        total * scale
    }))
}
