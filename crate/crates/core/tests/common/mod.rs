//! Shared generators for the property and acceptance suites.
//!
//! Two random metric families cover the instance space well at desk scale:
//! point configurations on the rational line (collinear geometry, repeated
//! distances) and "interval" matrices with off-diagonal entries in [1, 2]
//! (generic geometry; any such matrix satisfies the triangle inequality).

#![allow(dead_code)]

use ghp_metrics::flat::{FiniteMeasure, GroundSpace};
use ghp_metrics::graphs::RootedGraph;
use ghp_metrics::scalar::{Rational, Scalar};
use ghp_metrics::spaces::{validate_space, FiniteSpace, SubspaceSpec};
use rand::rngs::StdRng;
use rand::Rng;
use std::sync::Arc;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Random rational in [0, hi] with denominator dividing 8.
pub fn random_mass(rng: &mut StdRng, hi: i64) -> Rational {
    rat(rng.gen_range(0..=hi * 8), 8)
}

pub fn random_ground(rng: &mut StdRng, n: usize) -> Arc<GroundSpace<Rational>> {
    random_ground_scaled(rng, n, 1)
}

/// Distances land in `[0, 2 * scale]`.
pub fn random_ground_scaled(rng: &mut StdRng, n: usize, scale: i64) -> Arc<GroundSpace<Rational>> {
    let mut dist = vec![vec![rat(0, 1); n]; n];
    if rng.gen_bool(0.5) {
        // Interval metric: off-diagonal entries in [scale, 2 * scale].
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rat(scale * rng.gen_range(8..=16), 8);
                dist[i][j] = v.clone();
                dist[j][i] = v;
            }
        }
    } else {
        // Points on the rational line.
        let coords: Vec<Rational> = (0..n)
            .map(|_| rat(scale * rng.gen_range(0..=16), 8))
            .collect();
        for i in 0..n {
            for j in 0..n {
                dist[i][j] = (coords[i].clone() - coords[j].clone()).abs();
            }
        }
    }
    Arc::new(GroundSpace::new(dist).unwrap())
}

pub fn random_measure(
    rng: &mut StdRng,
    ground: &Arc<GroundSpace<Rational>>,
    hi: i64,
) -> FiniteMeasure<Rational> {
    let mass = (0..ground.n()).map(|_| random_mass(rng, hi)).collect();
    FiniteMeasure::new(ground.clone(), mass).unwrap()
}

/// Random space from either metric family, with rational masses in [0, hi]
/// (a point's mass is zero with some probability so zero-mass geometry stays
/// exercised).
pub fn random_space(rng: &mut StdRng, max_points: usize, hi: i64) -> FiniteSpace<Rational> {
    let n = rng.gen_range(1..=max_points);
    let ground = random_ground(rng, n);
    let dist: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| ground.dist(i, j).clone()).collect())
        .collect();
    let root = rng.gen_range(0..n);
    let mass: Vec<Rational> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                rat(0, 1)
            } else {
                random_mass(rng, hi)
            }
        })
        .collect();
    validate_space(dist, root, mass, None).unwrap()
}

pub fn to_float_space(x: &FiniteSpace<Rational>) -> FiniteSpace<f64> {
    let n = x.n();
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| x.dist(i, j).to_f64()).collect())
        .collect();
    let mass: Vec<f64> = x.masses().iter().map(|m| m.to_f64()).collect();
    validate_space(dist, x.root(), mass, None).unwrap()
}

/// Random pmm-subspace of `x` with a realized mass choice.
pub fn random_subspace(
    rng: &mut StdRng,
    x: &FiniteSpace<Rational>,
) -> (SubspaceSpec<Rational>, Vec<Rational>) {
    let mut support: Vec<usize> = (0..x.n()).filter(|_| rng.gen_bool(0.6)).collect();
    if !support.contains(&x.root()) {
        support.push(x.root());
        support.sort_unstable();
    }
    let choice: Vec<Rational> = support
        .iter()
        .map(|&i| {
            let full = x.mass(i).clone();
            if rng.gen_bool(0.5) {
                full
            } else {
                // A rational fraction of the available mass.
                full * rat(rng.gen_range(0..=4), 4)
            }
        })
        .collect();
    let spec = SubspaceSpec::new(x, support, choice.clone(), choice.clone()).unwrap();
    (spec, choice)
}

/// Random labeled tree on `n` vertices from a Pruefer sequence, rooted at a
/// random vertex.
pub fn random_tree(rng: &mut StdRng, n: usize) -> RootedGraph {
    let root = rng.gen_range(0..n);
    RootedGraph::new(n, tree_edges_from_pruefer(n, |m| rng.gen_range(0..m)), root).unwrap()
}

/// Edges of the labeled tree encoded by a Pruefer sequence drawn from `pick`.
pub fn tree_edges_from_pruefer(
    n: usize,
    mut pick: impl FnMut(usize) -> usize,
) -> Vec<(usize, usize)> {
    if n <= 1 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| pick(n)).collect();
    decode_pruefer(n, &seq)
}

pub fn decode_pruefer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut used = vec![false; n];
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1 && !used[u]).unwrap();
        edges.push((leaf.min(v), leaf.max(v)));
        used[leaf] = true;
        degree[v] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|&u| !used[u]).collect();
    assert_eq!(
        last.len(),
        2,
        "Pruefer decoding leaves exactly two vertices"
    );
    edges.push((last[0].min(last[1]), last[0].max(last[1])));
    edges
}

/// Canonical string of a rooted tree (classic subtree-sorting encoding),
/// used as an independent rooted-isomorphism test for trees.
pub fn rooted_tree_canonical(g: &RootedGraph) -> String {
    fn encode(g: &RootedGraph, v: usize, parent: Option<usize>) -> String {
        let mut children: Vec<String> = (0..g.n())
            .filter(|&u| g.has_edge(v, u) && Some(u) != parent)
            .map(|u| encode(g, u, Some(v)))
            .collect();
        children.sort();
        format!("({})", children.concat())
    }
    encode(g, g.root(), None)
}

/// All rooted trees with up to `max_n` vertices, one per isomorphism class.
pub fn all_rooted_trees_up_to(max_n: usize) -> Vec<RootedGraph> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for n in 1..=max_n {
        let seq_count = if n <= 2 {
            1
        } else {
            (n as u64).pow((n - 2) as u32)
        };
        for code in 0..seq_count {
            let mut c = code;
            let seq: Vec<usize> = (0..n.saturating_sub(2))
                .map(|_| {
                    let v = (c % n as u64) as usize;
                    c /= n as u64;
                    v
                })
                .collect();
            let edges = if n == 1 {
                Vec::new()
            } else if n == 2 {
                vec![(0, 1)]
            } else {
                decode_pruefer(n, &seq)
            };
            for root in 0..n {
                let g = RootedGraph::new(n, edges.clone(), root).unwrap();
                let canon = rooted_tree_canonical(&g);
                if seen.insert(canon) {
                    out.push(g);
                }
            }
        }
    }
    out
}
