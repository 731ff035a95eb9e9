//! Rooted simple connected graphs, their metric-space view (graph distance,
//! zero or counting measure) and the Benjamini-Schramm distance
//! `1/(alpha + 1)`, where `alpha` is the supremum radius at which the rooted
//! balls are isomorphic.

use crate::error::{Error, Result};
use crate::ghp::{ghp_distance_with, GhpResult};
use crate::scalar::Scalar;
use crate::spaces::{validate_space, FiniteSpace};
use std::collections::VecDeque;

/// An undirected simple connected graph with a distinguished root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    root: usize,
}

impl RootedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, root: usize) -> Result<Self> {
        if root >= n {
            return Err(Error::BadVertex { vertex: root, n });
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::BadVertex {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop { vertex: u });
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge { u: e.0, v: e.1 });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push(e);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        normalized.sort_unstable();
        let g = RootedGraph {
            n,
            edges: normalized,
            adjacency,
            root,
        };
        let dist = g.bfs_from(root);
        if let Some(v) = dist.iter().position(|d| d.is_none()) {
            return Err(Error::Disconnected { vertex: v });
        }
        Ok(g)
    }

    /// Path on `n` vertices rooted at one end.
    pub fn path(n: usize) -> Self {
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        RootedGraph::new(n, edges, 0).expect("paths are simple and connected")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    fn bfs_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Graph distances from the root (connected, so all defined).
    pub fn root_distances(&self) -> Vec<usize> {
        self.bfs_from(self.root)
            .into_iter()
            .map(|d| d.unwrap())
            .collect()
    }

    pub fn eccentricity(&self) -> usize {
        self.root_distances().into_iter().max().unwrap_or(0)
    }

    /// Induced subgraph on the vertices within graph distance `radius` of
    /// the root.
    pub fn rooted_ball(&self, radius: usize) -> RootedGraph {
        let dist = self.root_distances();
        let keep: Vec<usize> = (0..self.n).filter(|&v| dist[v] <= radius).collect();
        let index_of = |v: usize| keep.iter().position(|&w| w == v).unwrap();
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| dist[u] <= radius && dist[v] <= radius)
            .map(|&(u, v)| (index_of(u), index_of(v)))
            .collect();
        RootedGraph::new(keep.len(), edges, index_of(self.root))
            .expect("balls of connected graphs are connected")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMeasure {
    Zero,
    Counting,
}

/// The metric-space view of a rooted graph: BFS shortest-path distances and
/// a zero or counting measure.
pub fn graph_to_space<S: Scalar>(g: &RootedGraph, measure: GraphMeasure) -> FiniteSpace<S> {
    let n = g.n();
    let dist: Vec<Vec<S>> = (0..n)
        .map(|i| {
            g.bfs_from(i)
                .into_iter()
                .map(|d| S::from_int(d.expect("connected") as i64))
                .collect()
        })
        .collect();
    let mass = match measure {
        GraphMeasure::Zero => vec![S::zero(); n],
        GraphMeasure::Counting => vec![S::one(); n],
    };
    validate_space(dist, g.root(), mass, None).expect("graph distances satisfy the metric axioms")
}

/// Root-preserving graph isomorphism test. Backtracking over a BFS vertex
/// order with degree and root-distance pruning; exactness over speed.
pub fn rooted_isomorphic(g1: &RootedGraph, g2: &RootedGraph) -> bool {
    if g1.n() != g2.n() || g1.edges().len() != g2.edges().len() {
        return false;
    }
    let d1 = g1.root_distances();
    let d2 = g2.root_distances();
    let mut profile1: Vec<(usize, usize)> = (0..g1.n()).map(|v| (d1[v], g1.degree(v))).collect();
    let mut profile2: Vec<(usize, usize)> = (0..g2.n()).map(|v| (d2[v], g2.degree(v))).collect();
    profile1.sort_unstable();
    profile2.sort_unstable();
    if profile1 != profile2 {
        return false;
    }

    // BFS order from the root keeps every vertex adjacent to an
    // already-mapped one, so adjacency constraints bind early.
    let mut order: Vec<usize> = (0..g1.n()).collect();
    order.sort_by_key(|&v| (d1[v], v));

    #[allow(clippy::too_many_arguments)]
    fn assign(
        g1: &RootedGraph,
        g2: &RootedGraph,
        d1: &[usize],
        d2: &[usize],
        order: &[usize],
        pos: usize,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let u = order[pos];
        for w in 0..g2.n() {
            if used[w]
                || d1[u] != d2[w]
                || g1.degree(u) != g2.degree(w)
                || (u == g1.root()) != (w == g2.root())
            {
                continue;
            }
            let consistent = (0..g1.n()).all(|v| match map[v] {
                Some(x) => g1.has_edge(u, v) == g2.has_edge(w, x),
                None => true,
            });
            if !consistent {
                continue;
            }
            map[u] = Some(w);
            used[w] = true;
            if assign(g1, g2, d1, d2, order, pos + 1, map, used) {
                return true;
            }
            map[u] = None;
            used[w] = false;
        }
        false
    }

    let mut map = vec![None; g1.n()];
    let mut used = vec![false; g2.n()];
    assign(g1, g2, &d1, &d2, &order, 0, &mut map, &mut used)
}

/// Benjamini-Schramm distance between two rooted graphs.
///
/// Returns `(distance, alpha)`, where `alpha = None` means the graphs are
/// rooted-isomorphic (distance zero). Balls of a graph are constant on
/// `[k, k+1)`, so the supremum radius of ball isomorphism is the first
/// integer radius at which the balls differ.
pub fn bs_distance<S: Scalar>(g1: &RootedGraph, g2: &RootedGraph) -> (S, Option<usize>) {
    let reach = g1.eccentricity().max(g2.eccentricity());
    for k in 0..=reach {
        if !rooted_isomorphic(&g1.rooted_ball(k), &g2.rooted_ball(k)) {
            return (S::from_ratio(1, (k + 1) as i64), Some(k));
        }
    }
    (S::zero(), None)
}

/// Side-by-side comparison of the graph distance and the localized distance
/// of the zero-measure metric spaces.
#[derive(Debug, Clone)]
pub struct BsGhReport<S> {
    pub bs: S,
    pub alpha: Option<usize>,
    pub ghp: GhpResult<S>,
    /// Whether the two zero sets agree at the given tolerance:
    /// `bs = 0` iff `ghp <= tol`.
    pub zero_sets_agree: bool,
}

pub fn bs_gh_consistency<S: Scalar>(
    g1: &RootedGraph,
    g2: &RootedGraph,
    tol: &S,
    budget: usize,
) -> Result<BsGhReport<S>> {
    let (bs, alpha) = bs_distance::<S>(g1, g2);
    let x: FiniteSpace<S> = graph_to_space(g1, GraphMeasure::Zero);
    let y: FiniteSpace<S> = graph_to_space(g2, GraphMeasure::Zero);
    let ghp = ghp_distance_with(&x, &y, tol, budget)?;
    let bs_zero = bs == S::zero();
    let ghp_zero = ghp.value.le_tol(&(tol.clone() + tol.clone()));
    Ok(BsGhReport {
        bs,
        alpha,
        ghp,
        zero_sets_agree: bs_zero == ghp_zero,
    })
}
