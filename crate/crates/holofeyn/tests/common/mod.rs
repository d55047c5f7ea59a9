#![allow(dead_code)]

use holofeyn::graph::DecoratedGraph;
use num_complex::Complex64;
use std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `−2i ∫ f(w)/(π w) dλ` for `f = exp(½(k w − k̄ w̄) − a|w|²)`, in polar coordinates:
/// trapezoid in angle, composite Simpson in radius.
pub fn bm_pairing_single_edge(k: Complex64, a: f64) -> Complex64 {
    let nt = 128;
    let nr = 4000;
    let rmax = 12.0 / a.sqrt();
    let mut acc = c(0.0, 0.0);
    for it in 0..nt {
        let th = 2.0 * PI * it as f64 / nt as f64;
        let e = Complex64::from_polar(1.0, th);
        let mut s = c(0.0, 0.0);
        for ir in 0..=nr {
            let r = rmax * ir as f64 / nr as f64;
            let w = e * r;
            let f = (0.5 * (k * w - k.conj() * w.conj()) - a * r * r).exp();
            let wt = if ir == 0 || ir == nr { 1.0 } else if ir % 2 == 1 { 4.0 } else { 2.0 };
            s += f * e.conj() * wt;
        }
        acc += s * (rmax / nr as f64 / 3.0);
    }
    acc * (2.0 * PI / nt as f64) / PI * c(0.0, -2.0)
}

/// Edge-subset brute force of the Laman condition: connected, loopless, every nonempty edge
/// subset satisfies `d|V′| ≥ (d−1)|E′| + d + 1`, equality on the whole graph.
pub fn laman_brute_force(g: &DecoratedGraph, d: usize) -> bool {
    if !g.is_connected() || g.edges().iter().any(|&(a, b)| a == b) {
        return false;
    }
    let d = d as i64;
    let ne = g.num_edges();
    for mask in 1u64..(1u64 << ne) {
        let mut verts = std::collections::BTreeSet::new();
        for e in 0..ne {
            if mask >> e & 1 == 1 {
                verts.insert(g.edges()[e].0);
                verts.insert(g.edges()[e].1);
            }
        }
        if d * (verts.len() as i64) < (d - 1) * mask.count_ones() as i64 + d + 1 {
            return false;
        }
    }
    d * g.num_vertices() as i64 == (d - 1) * ne as i64 + d + 1
}

/// (2,3) pebble game: every edge is accepted and `|E| = 2|V| − 3`.
pub fn pebble_game_23_tight(g: &DecoratedGraph) -> bool {
    let n = g.num_vertices();
    let mut pebbles = vec![2usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];

    fn find_pebble(v: usize, avoid: &[usize], pebbles: &mut [usize], out: &mut [Vec<usize>], seen: &mut [bool]) -> bool {
        seen[v] = true;
        for idx in 0..out[v].len() {
            let w = out[v][idx];
            if seen[w] {
                continue;
            }
            if pebbles[w] > 0 && !avoid.contains(&w) {
                pebbles[w] -= 1;
                out[v].swap_remove(idx);
                out[w].push(v);
                pebbles[v] += 1;
                return true;
            }
            if find_pebble(w, avoid, pebbles, out, seen) {
                let pos = out[v].iter().position(|&x| x == w).unwrap();
                out[v].swap_remove(pos);
                out[w].push(v);
                pebbles[w] -= 1;
                pebbles[v] += 1;
                return true;
            }
        }
        false
    }

    for &(a, b) in g.edges() {
        if a == b {
            return false;
        }
        loop {
            if pebbles[a] + pebbles[b] >= 4 {
                break;
            }
            let (v, other) = if pebbles[a] < 2 { (a, b) } else { (b, a) };
            let mut seen = vec![false; n];
            seen[other] = true;
            if !find_pebble(v, &[other], &mut pebbles, &mut out, &mut seen) {
                return false;
            }
        }
        pebbles[a] -= 1;
        out[a].push(b);
    }
    g.num_edges() + 3 == 2 * n
}

/// `Σ_T Π_{e∉T} t_e` over spanning trees found by checking every `(n−1)`-edge subset.
pub fn tree_sum_by_subsets(n: usize, edges: &[(usize, usize)], t: &[holofeyn::symbolic::Q]) -> holofeyn::symbolic::Q {
    use num_traits::{One, Zero};
    let ne = edges.len();
    let mut total = holofeyn::symbolic::Q::zero();
    for mask in 0u64..(1u64 << ne) {
        if mask.count_ones() as usize + 1 != n {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut tree = true;
        for (e, &(a, b)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    tree = false;
                    break;
                }
                parent[ra] = rb;
            }
        }
        if tree {
            let mut m = holofeyn::symbolic::Q::one();
            for (e, x) in t.iter().enumerate() {
                if mask >> e & 1 == 0 {
                    m *= x;
                }
            }
            total += m;
        }
    }
    total
}
