//! Graph corpora: every connected loopless multigraph up to isomorphism within size bounds,
//! and seeded random connected multigraphs.

use crate::graph::DecoratedGraph;
use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn canonical(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    (0..n)
        .permutations(n)
        .map(|p| {
            let mut e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e.sort_unstable();
            e
        })
        .min()
        .unwrap_or_default()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Connected loopless multigraphs with `2..=max_v` vertices and `1..=max_e` edges, one per
/// isomorphism class, ordered by `(|V|, |E|, edge list)`.
pub fn connected_multigraphs(dim: usize, max_v: usize, max_e: usize) -> Vec<DecoratedGraph> {
    let mut out = Vec::new();
    for n in 2..=max_v {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        for m in (n - 1)..=max_e {
            let mut seen = BTreeSet::new();
            for multiset in pairs.iter().cloned().combinations_with_replacement(m) {
                if !connected(n, &multiset) {
                    continue;
                }
                let c = canonical(n, &multiset);
                if seen.insert(c.clone()) {
                    out.push(DecoratedGraph::undecorated(dim, n, c).unwrap());
                }
            }
        }
    }
    out
}

/// Random connected loopless multigraph: a random spanning tree plus random extra edges,
/// with random edge orientations.
pub fn random_connected_multigraph<R: Rng>(rng: &mut R, dim: usize, max_v: usize, max_e: usize) -> DecoratedGraph {
    let n = rng.random_range(2..=max_v);
    let m = rng.random_range((n - 1)..=max_e.max(n - 1));
    let mut edges = Vec::with_capacity(m);
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    while edges.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n - 1);
        let b = if b >= a { b + 1 } else { b };
        edges.push((a, b));
    }
    for i in (1..edges.len()).rev() {
        let j = rng.random_range(0..=i);
        edges.swap(i, j);
    }
    let edges = edges.into_iter().map(|(a, b)| if rng.random_bool(0.5) { (b, a) } else { (a, b) }).collect();
    DecoratedGraph::undecorated(dim, n, edges).unwrap()
}

pub fn random_corpus(seed: u64, count: usize, dim: usize, max_v: usize, max_e: usize) -> Vec<DecoratedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_connected_multigraph(&mut rng, dim, max_v, max_e)).collect()
}
