//! Percolation graphs over spin configurations.
//!
//! Two configurations are linked when their effective-Hamiltonian coupling
//! exceeds their on-site energy mismatch, `|E_j − E_i| < |K_ij|`.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::EffectiveHamiltonian;
use crate::spin::domain_walls;

/// Undirected, unweighted graph on the `2^n` configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct PercolationGraph {
    n: usize,
    /// Sorted pairs `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
    /// `|K_ij| − |E_i − E_j|` per edge, same order as `edges`.
    margins: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
}

/// Per-node annotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDegree {
    pub node: usize,
    pub degree: usize,
    pub domain_walls: usize,
}

impl PercolationGraph {
    /// Builds a graph from an explicit edge list. Self-loops are rejected and
    /// duplicate or reversed pairs collapse to one edge.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let dim = 1usize << n;
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on node {a}")));
            }
            if a >= dim || b >= dim {
                return Err(Error::InvalidParameter(format!("edge ({a}, {b}) outside 0..{dim}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let margins = vec![f64::NAN; list.len()];
        Ok(Self::assemble(n, list, margins))
    }

    fn assemble(n: usize, edges: Vec<(usize, usize)>, margins: Vec<f64>) -> Self {
        let mut adjacency = vec![Vec::new(); 1 << n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Self {
            n,
            edges,
            margins,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        1 << self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Margins `|K_ij| − |E_i − E_j|` aligned with [`edges`](Self::edges).
    /// `NaN` for graphs built from explicit edge lists.
    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn domain_walls(&self, node: usize) -> usize {
        domain_walls(node, self.n)
    }
}

/// Applies the percolation rule to every pair of configurations.
///
/// The inequality is strict and evaluated on the raw floating-point entries;
/// near-threshold edges can be audited through
/// [`PercolationGraph::margins`].
pub fn percolation_graph(h: &EffectiveHamiltonian) -> PercolationGraph {
    let dim = h.dim();
    let n = h.n();
    let onsite: Vec<f64> = (0..dim).map(|i| h.onsite(i)).collect();
    let rows: Vec<Vec<((usize, usize), f64)>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..dim)
                .filter_map(|j| {
                    let detuning = (onsite[j] - onsite[i]).abs();
                    let coupling = h.coupling(i, j).norm();
                    (detuning < coupling).then_some(((i, j), coupling - detuning))
                })
                .collect()
        })
        .collect();
    let (edges, margins): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();
    PercolationGraph::assemble(n, edges, margins)
}

/// Connected components, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterDecomposition {
    /// Each component's nodes in ascending order.
    pub components: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
}

impl ClusterDecomposition {
    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    /// Fraction of nodes in the largest component.
    pub fn largest_fraction(&self) -> f64 {
        let total: usize = self.sizes.iter().sum();
        if total == 0 {
            0.0
        } else {
            self.largest() as f64 / total as f64
        }
    }

    pub fn is_percolated(&self) -> bool {
        self.components.len() == 1
    }
}

/// Breadth-first component search. Ties in size are ordered by smallest
/// member.
pub fn clusters(g: &PercolationGraph) -> ClusterDecomposition {
    let total = g.num_nodes();
    let mut seen = vec![false; total];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let sizes = components.iter().map(Vec::len).collect();
    ClusterDecomposition { components, sizes }
}

/// Degree of every node together with its domain-wall count.
pub fn degree_sequence(g: &PercolationGraph) -> Vec<NodeDegree> {
    (0..g.num_nodes())
        .map(|node| NodeDegree {
            node,
            degree: g.degree(node),
            domain_walls: g.domain_walls(node),
        })
        .collect()
}

/// Gap and mixing of an isolated pair of configurations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelResult {
    /// `δλ = sqrt((E_i − E_j)² + |K_ij|²)`.
    pub gap: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    /// Same criterion as [`percolation_graph`].
    pub active: bool,
}

/// Two-state approximation for configurations `i`, `j`.
pub fn two_level_analysis(e_i: f64, e_j: f64, k_ij: f64) -> Result<TwoLevelResult> {
    let detuning = (e_i - e_j).abs();
    let coupling = k_ij.abs();
    let gap = detuning.hypot(coupling);
    if gap == 0.0 {
        return Err(Error::Degenerate("equal energies with zero coupling".into()));
    }
    Ok(TwoLevelResult {
        gap,
        cos_theta: detuning / gap,
        sin_theta: coupling / gap,
        active: detuning < coupling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{effective_hamiltonian, floquet_for, floquet_spectrum};
    use crate::spin::{sample_disorder, SpinChainParams};
    use crate::{CMatrix, C64};

    fn hamiltonian(entries: &[(usize, usize, C64)], n: usize) -> EffectiveHamiltonian {
        let dim = 1 << n;
        let mut m = CMatrix::zeros(dim, dim);
        for &(i, j, v) in entries {
            m[(i, j)] = v;
            if i != j {
                m[(j, i)] = v.conj();
            }
        }
        EffectiveHamiltonian { matrix: m, period: 1.0 }
    }

    #[test]
    fn rule_examples() {
        let h = hamiltonian(
            &[
                (0, 0, C64::new(0.0, 0.0)),
                (1, 1, C64::new(0.5, 0.0)),
                (0, 1, C64::new(0.0, 1.0)),
            ],
            1,
        );
        assert!(percolation_graph(&h).has_edge(0, 1));
        let h = hamiltonian(&[(1, 1, C64::new(1.0, 0.0)), (0, 1, C64::new(0.5, 0.0))], 1);
        assert_eq!(percolation_graph(&h).num_edges(), 0);
    }

    #[test]
    fn strict_inequality_at_threshold() {
        let h = hamiltonian(&[(1, 1, C64::new(0.5, 0.0)), (0, 1, C64::new(-0.5, 0.0))], 1);
        assert_eq!(percolation_graph(&h).num_edges(), 0);
    }

    #[test]
    fn perfect_pulse_gives_dimers() {
        let p = SpinChainParams::new(8, 0.0).unwrap();
        let u = floquet_for(&p, &sample_disorder(&p, 7, 0)).unwrap();
        let g = percolation_graph(&effective_hamiltonian(&floquet_spectrum(&u).unwrap()));
        assert_eq!(g.num_edges(), 128);
        assert!(g.edges().iter().all(|&(a, b)| a + b == 255));
        let c = clusters(&g);
        assert_eq!(c.components.len(), 128);
        assert!(c.sizes.iter().all(|&s| s == 2));
        assert!(degree_sequence(&g).iter().all(|d| d.degree == 1));
        assert!(g.margins().iter().all(|&m| m > 0.0));
    }

    #[test]
    fn empty_graph_has_singletons() {
        let g = PercolationGraph::from_edges(3, []).unwrap();
        let c = clusters(&g);
        assert_eq!(c.components.len(), 8);
        assert!(c.sizes.iter().all(|&s| s == 1));
    }

    #[test]
    fn complete_graph_degrees() {
        let edges = (0..4).flat_map(|a| ((a + 1)..4).map(move |b| (a, b)));
        let g = PercolationGraph::from_edges(2, edges).unwrap();
        assert!(degree_sequence(&g).iter().all(|d| d.degree == 3));
        assert!(clusters(&g).is_percolated());
    }

    #[test]
    fn from_edges_rejects_self_loops_and_dedups() {
        assert!(PercolationGraph::from_edges(2, [(1, 1)]).is_err());
        let g = PercolationGraph::from_edges(2, [(1, 2), (2, 1)]).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let g = PercolationGraph::from_edges(3, [(0, 1), (1, 2), (2, 7), (3, 4)]).unwrap();
        let total: usize = degree_sequence(&g).iter().map(|d| d.degree).sum();
        assert_eq!(total, 2 * g.num_edges());
    }

    #[test]
    fn two_level_examples() {
        let r = two_level_analysis(0.3, 0.3, 0.2).unwrap();
        assert_eq!(r.sin_theta, 1.0);
        assert!(r.active);

        let r = two_level_analysis(0.0, 0.4, 0.0).unwrap();
        assert_eq!(r.sin_theta, 0.0);
        assert!(!r.active);

        let r = two_level_analysis(0.0, 3.0, -4.0).unwrap();
        assert!((r.gap - 5.0).abs() < 1e-15);
        assert!((r.cos_theta - 0.6).abs() < 1e-15);
        assert!((r.sin_theta - 0.8).abs() < 1e-15);
        assert!(r.active);
        assert!((r.cos_theta.powi(2) + r.sin_theta.powi(2) - 1.0).abs() < 1e-12);

        assert!(two_level_analysis(1.0, 1.0, 0.0).is_err());
    }
}
