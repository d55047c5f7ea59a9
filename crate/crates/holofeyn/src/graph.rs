//! Decorated directed multigraphs, edge subsets and the combinatorics built on them.
//!
//! Vertices and edges are 0-based inside the library. The text format is 1-based.
//! The last vertex is the grounded one.

use crate::error::{Error, Result};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedGraph {
    dim: usize,
    n: usize,
    edges: Vec<(usize, usize)>,
    decorations: Vec<Vec<u32>>,
}

/// Bitset over the edges of a parent graph (at most 64 edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeSubset {
    bits: u64,
    len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LamanVerdict {
    pub is_laman: bool,
    /// Edge subset violating the subgraph inequality, if any.
    pub witness: Option<EdgeSubset>,
    /// `d|V|` and `(d-1)|E| + d + 1` for the whole graph.
    pub equality: (i64, i64),
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }
    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

impl EdgeSubset {
    pub fn empty(len: usize) -> Self {
        assert!(len <= 64, "at most 64 edges are supported");
        EdgeSubset { bits: 0, len }
    }

    pub fn full(len: usize) -> Self {
        assert!(len <= 64, "at most 64 edges are supported");
        let bits = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        EdgeSubset { bits, len }
    }

    pub fn from_bits(len: usize, bits: u64) -> Self {
        let s = EdgeSubset::full(len);
        EdgeSubset { bits: bits & s.bits, len }
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Result<Self> {
        let mut s = EdgeSubset::empty(len);
        for &i in idx {
            if i >= len {
                return Err(Error::ParseError { line: 0, msg: format!("edge index {} out of range", i + 1) });
            }
            s.bits |= 1 << i;
        }
        Ok(s)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }
    pub fn parent_len(&self) -> usize {
        self.len
    }
    pub fn contains(&self, e: usize) -> bool {
        e < self.len && self.bits >> e & 1 == 1
    }
    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }
    pub fn indices(&self) -> Vec<usize> {
        (0..self.len).filter(|&e| self.contains(e)).collect()
    }
    pub fn complement(&self) -> Self {
        EdgeSubset { bits: !self.bits & EdgeSubset::full(self.len).bits, len: self.len }
    }
    pub fn union(&self, o: &Self) -> Self {
        EdgeSubset { bits: self.bits | o.bits, len: self.len }
    }
    pub fn intersection(&self, o: &Self) -> Self {
        EdgeSubset { bits: self.bits & o.bits, len: self.len }
    }
    pub fn is_subset_of(&self, o: &Self) -> bool {
        self.bits & !o.bits == 0
    }

    /// All nonempty subsets of `len` edges, in lexicographic order of their index lists.
    pub fn all_nonempty(len: usize) -> Vec<EdgeSubset> {
        let mut v: Vec<EdgeSubset> = (1..=EdgeSubset::full(len).bits).map(|b| EdgeSubset { bits: b, len }).collect();
        v.sort();
        v
    }

    /// Nonempty subsets of `self`, lexicographically ordered.
    pub fn nonempty_subsets(&self) -> Vec<EdgeSubset> {
        let mut out = Vec::new();
        let mut b = self.bits;
        while b != 0 {
            out.push(EdgeSubset { bits: b, len: self.len });
            b = (b - 1) & self.bits;
        }
        out.sort();
        out
    }
}

impl PartialOrd for EdgeSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(&other.indices())
    }
}

impl fmt::Display for EdgeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.indices().iter().map(|e| format!("e{}", e + 1)).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

impl DecoratedGraph {
    /// Builds a graph from 0-based `(tail, head)` pairs.
    pub fn new(dim: usize, n: usize, edges: Vec<(usize, usize)>, decorations: Vec<Vec<u32>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ParseError { line: 0, msg: "dimension must be positive".into() });
        }
        if edges.len() > 64 {
            return Err(Error::ParseError { line: 0, msg: "at most 64 edges are supported".into() });
        }
        if decorations.len() != edges.len() {
            return Err(Error::ParseError { line: 0, msg: "one decoration per edge required".into() });
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::ParseError { line: 0, msg: format!("edge {} has a vertex out of range", i + 1) });
            }
            if decorations[i].len() != dim {
                return Err(Error::ParseError { line: 0, msg: format!("edge {} decoration length differs from dim {}", i + 1, dim) });
            }
        }
        Ok(DecoratedGraph { dim, n, edges, decorations })
    }

    pub fn undecorated(dim: usize, n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let dec = vec![vec![0; dim]; edges.len()];
        Self::new(dim, n, edges, dec)
    }

    pub fn single_edge(dim: usize) -> Self {
        Self::undecorated(dim, 2, vec![(0, 1)]).unwrap()
    }
    pub fn bigon(dim: usize) -> Self {
        Self::undecorated(dim, 2, vec![(0, 1), (0, 1)]).unwrap()
    }
    pub fn triangle(dim: usize) -> Self {
        Self::undecorated(dim, 3, vec![(0, 1), (1, 2), (2, 0)]).unwrap()
    }
    pub fn cycle(dim: usize, n: usize) -> Self {
        Self::undecorated(dim, n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    pub fn with_decorations(&self, decorations: Vec<Vec<u32>>) -> Result<Self> {
        Self::new(self.dim, self.n, self.edges.clone(), decorations)
    }
    pub fn with_dim(&self, dim: usize) -> Self {
        let dec = self.decorations.iter().map(|d| {
            let mut v = d.clone();
            v.resize(dim, 0);
            v
        });
        Self::new(dim, self.n, self.edges.clone(), dec.collect()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn num_vertices(&self) -> usize {
        self.n
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn decorations(&self) -> &[Vec<u32>] {
        &self.decorations
    }
    pub fn decoration_weight(&self, e: usize) -> u32 {
        self.decorations[e].iter().sum()
    }
    pub fn total_decoration(&self) -> u32 {
        (0..self.num_edges()).map(|e| self.decoration_weight(e)).sum()
    }
    pub fn full_subset(&self) -> EdgeSubset {
        EdgeSubset::full(self.num_edges())
    }

    pub fn check_no_self_loops(&self) -> Result<()> {
        match self.edges.iter().position(|&(a, b)| a == b) {
            Some(e) => Err(Error::SelfLoop(e)),
            None => Ok(()),
        }
    }

    pub fn num_components(&self) -> usize {
        let mut uf = UnionFind::new(self.n);
        let mut c = self.n;
        for &(a, b) in &self.edges {
            if uf.union(a, b) {
                c -= 1;
            }
        }
        c
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// No self-loops and connected: the precondition of most graph operations.
    pub fn check_admissible(&self) -> Result<()> {
        self.check_no_self_loops()?;
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// Rows are edges, columns the non-grounded vertices.
    pub fn incidence_matrix(&self) -> Result<Vec<Vec<i32>>> {
        self.check_admissible()?;
        Ok(self.incidence_unchecked())
    }

    pub(crate) fn incidence_unchecked(&self) -> Vec<Vec<i32>> {
        self.edges
            .iter()
            .map(|&(t, h)| {
                (0..self.n - 1)
                    .map(|i| if i == h { 1 } else if i == t { -1 } else { 0 })
                    .collect()
            })
            .collect()
    }

    pub fn first_betti(&self) -> usize {
        self.num_edges() + self.num_components() - self.n
    }

    /// Vertices incident to the edges of `sub`, in vertex order.
    pub fn support(&self, sub: &EdgeSubset) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for e in sub.indices() {
            seen[self.edges[e].0] = true;
            seen[self.edges[e].1] = true;
        }
        (0..self.n).filter(|&v| seen[v]).collect()
    }

    /// Number of connected components of the edge-generated subgraph.
    pub fn subset_components(&self, sub: &EdgeSubset) -> usize {
        let verts = self.support(sub);
        let mut uf = UnionFind::new(self.n);
        let mut c = verts.len();
        for e in sub.indices() {
            if uf.union(self.edges[e].0, self.edges[e].1) {
                c -= 1;
            }
        }
        c
    }

    pub fn subset_is_connected(&self, sub: &EdgeSubset) -> bool {
        !sub.is_empty() && self.subset_components(sub) == 1
    }

    pub fn subset_betti(&self, sub: &EdgeSubset) -> Result<usize> {
        if sub.is_empty() {
            return Err(Error::EmptyEdgeSet);
        }
        Ok(sub.count() + self.subset_components(sub) - self.support(sub).len())
    }

    /// The edge-generated subgraph, with vertices renumbered in their original order.
    pub fn subgraph(&self, sub: &EdgeSubset) -> Result<DecoratedGraph> {
        if sub.is_empty() {
            return Err(Error::EmptySubset);
        }
        let verts = self.support(sub);
        let pos = |v: usize| verts.iter().position(|&x| x == v).unwrap();
        let idx = sub.indices();
        let edges = idx.iter().map(|&e| (pos(self.edges[e].0), pos(self.edges[e].1))).collect();
        let dec = idx.iter().map(|&e| self.decorations[e].clone()).collect();
        DecoratedGraph::new(self.dim, verts.len(), edges, dec)
    }

    /// Same vertices, edges outside `sub`.
    pub fn complement(&self, sub: &EdgeSubset) -> Result<DecoratedGraph> {
        if sub.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx = sub.complement().indices();
        let edges = idx.iter().map(|&e| self.edges[e]).collect();
        let dec = idx.iter().map(|&e| self.decorations[e].clone()).collect();
        DecoratedGraph::new(self.dim, self.n, edges, dec)
    }

    /// Vertex map of the quotient by `sub`: each component of `sub` becomes one vertex,
    /// placed at the position of its largest member.
    pub fn quotient_map(&self, sub: &EdgeSubset) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.n);
        for e in sub.indices() {
            uf.union(self.edges[e].0, self.edges[e].1);
        }
        let mut rep = vec![0; self.n];
        for v in 0..self.n {
            let r = uf.find(v);
            rep[r] = rep[r].max(v);
        }
        let class_rep: Vec<usize> = (0..self.n).map(|v| rep[uf.find(v)]).collect();
        let mut reps: Vec<usize> = class_rep.clone();
        reps.sort_unstable();
        reps.dedup();
        let map = class_rep.iter().map(|r| reps.binary_search(r).unwrap()).collect();
        (map, reps.len())
    }

    pub fn quotient(&self, sub: &EdgeSubset) -> Result<DecoratedGraph> {
        if sub.is_empty() {
            return Err(Error::EmptySubset);
        }
        let (map, m) = self.quotient_map(sub);
        let idx = sub.complement().indices();
        let edges = idx.iter().map(|&e| (map[self.edges[e].0], map[self.edges[e].1])).collect();
        let dec = idx.iter().map(|&e| self.decorations[e].clone()).collect();
        DecoratedGraph::new(self.dim, m, edges, dec)
    }

    /// Sign of reordering (edges outside `sub`, then edges of `sub`) into the edge order.
    pub fn permutation_sign(&self, sub: &EdgeSubset) -> Result<SignedPermutation> {
        if sub.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seq = sub.complement().indices();
        seq.extend(sub.indices());
        Ok(SignedPermutation { sign: permutation_parity(&seq) })
    }

    /// Laman test for dimension `d`, via induced subgraphs on vertex subsets.
    pub fn is_laman(&self, d: usize) -> Result<LamanVerdict> {
        self.check_admissible()?;
        let d = d as i64;
        let n = self.n;
        let mut witness = None;
        let mut by_size: Vec<u64> = (1u64..(1u64 << n)).filter(|m| m.count_ones() >= 2).collect();
        by_size.sort_by_key(|m| (m.count_ones(), *m));
        for mask in by_size {
            let induced = self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| mask >> a & 1 == 1 && mask >> b & 1 == 1)
                .fold(0u64, |acc, (e, _)| acc | 1 << e);
            if induced == 0 {
                continue;
            }
            let sub = EdgeSubset::from_bits(self.num_edges(), induced);
            let v = self.support(&sub).len() as i64;
            if d * v < (d - 1) * sub.count() as i64 + d + 1 {
                witness = Some(sub);
                break;
            }
        }
        let lhs = d * n as i64;
        let rhs = (d - 1) * self.num_edges() as i64 + d + 1;
        Ok(LamanVerdict { is_laman: witness.is_none() && lhs == rhs, witness, equality: (lhs, rhs) })
    }

    /// Connected Laman edge-generated subgraphs, lexicographically ordered.
    pub fn laman_subgraphs(&self, d: usize) -> Result<Vec<EdgeSubset>> {
        self.check_admissible()?;
        let mut out = Vec::new();
        for sub in EdgeSubset::all_nonempty(self.num_edges()) {
            if !self.subset_is_connected(&sub) {
                continue;
            }
            if self.subgraph(&sub)?.is_laman(d)?.is_laman {
                out.push(sub);
            }
        }
        Ok(out)
    }

    fn is_forest(&self, edges: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.n);
        edges.iter().all(|&e| uf.union(self.edges[e].0, self.edges[e].1))
    }

    pub fn spanning_trees(&self) -> Result<Vec<EdgeSubset>> {
        self.check_admissible()?;
        let m = self.num_edges();
        Ok((0..m)
            .combinations(self.n - 1)
            .filter(|c| self.is_forest(c))
            .map(|c| EdgeSubset::from_indices(m, &c).unwrap())
            .collect())
    }

    /// Edge sets whose removal leaves a spanning 2-forest separating `v1` from `v2`.
    pub fn cuts(&self, v1: &[usize], v2: &[usize]) -> Result<Vec<EdgeSubset>> {
        self.check_admissible()?;
        if v1.iter().any(|v| v2.contains(v)) {
            return Err(Error::OverlappingVertexSets);
        }
        let m = self.num_edges();
        let h1 = self.first_betti();
        let mut out = Vec::new();
        if self.n < 2 {
            return Ok(out);
        }
        for forest in (0..m).combinations(self.n - 2) {
            let mut uf = UnionFind::new(self.n);
            if !forest.iter().all(|&e| uf.union(self.edges[e].0, self.edges[e].1)) {
                continue;
            }
            let ok1 = v1.windows(2).all(|w| uf.find(w[0]) == uf.find(w[1]));
            let ok2 = v2.windows(2).all(|w| uf.find(w[0]) == uf.find(w[1]));
            let sep = match (v1.first(), v2.first()) {
                (Some(&a), Some(&b)) => uf.find(a) != uf.find(b),
                _ => true,
            };
            if ok1 && ok2 && sep {
                let c = EdgeSubset::from_indices(m, &forest).unwrap().complement();
                if c.count() != h1 + 1 {
                    return Err(Error::AssertionFailed(format!("cut {} has size {} but h1 + 1 = {}", c, c.count(), h1 + 1)));
                }
                out.push(c);
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}\nvertices {}\n", self.dim, self.n);
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let dec: Vec<String> = self.decorations[e].iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("edge {} {} n={}\n", a + 1, b + 1, dec.join(",")));
        }
        s
    }
}

/// Parity of the permutation taking `seq` to sorted order, as +1 or -1.
pub fn permutation_parity(seq: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl FromStr for DecoratedGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: &str| Error::ParseError { line, msg: msg.to_string() };
        let mut dim = None;
        let mut n = None;
        let mut edges = Vec::new();
        let mut decs: Vec<(usize, Option<Vec<u32>>)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "dim" => {
                    if tok.len() != 2 {
                        return Err(perr(ln, "expected `dim D`"));
                    }
                    let d: usize = tok[1].parse().map_err(|_| perr(ln, "bad dimension"))?;
                    if d == 0 {
                        return Err(perr(ln, "dimension must be positive"));
                    }
                    dim = Some(d);
                }
                "vertices" => {
                    if tok.len() != 2 {
                        return Err(perr(ln, "expected `vertices N`"));
                    }
                    let v: usize = tok[1].parse().map_err(|_| perr(ln, "bad vertex count"))?;
                    if v == 0 {
                        return Err(perr(ln, "vertex count must be positive"));
                    }
                    n = Some(v);
                }
                "edge" => {
                    if tok.len() != 3 && tok.len() != 4 {
                        return Err(perr(ln, "expected `edge T H [n=..]`"));
                    }
                    let nv = n.ok_or_else(|| perr(ln, "`vertices` must precede edges"))?;
                    let t: usize = tok[1].parse().map_err(|_| perr(ln, "bad tail index"))?;
                    let h: usize = tok[2].parse().map_err(|_| perr(ln, "bad head index"))?;
                    if t == 0 || h == 0 || t > nv || h > nv {
                        return Err(perr(ln, "vertex index out of range"));
                    }
                    let dec = if tok.len() == 4 {
                        let body = tok[3].strip_prefix("n=").ok_or_else(|| perr(ln, "decoration must be `n=a,b,..`"))?;
                        let v: std::result::Result<Vec<u32>, _> = body.split(',').map(|x| x.parse::<u32>()).collect();
                        Some(v.map_err(|_| perr(ln, "bad decoration entry"))?)
                    } else {
                        None
                    };
                    edges.push((t - 1, h - 1));
                    decs.push((ln, dec));
                }
                other => return Err(perr(ln, &format!("unknown statement `{}`", other))),
            }
        }
        let dim = dim.ok_or_else(|| perr(0, "missing `dim`"))?;
        let n = n.ok_or_else(|| perr(0, "missing `vertices`"))?;
        let mut decorations = Vec::with_capacity(decs.len());
        for (ln, d) in decs {
            let d = d.unwrap_or_else(|| vec![0; dim]);
            if d.len() != dim {
                return Err(perr(ln, &format!("decoration length {} differs from dim {}", d.len(), dim)));
            }
            decorations.push(d);
        }
        DecoratedGraph::new(dim, n, edges, decorations)
    }
}


impl serde::Serialize for EdgeSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.indices().iter().map(|e| e + 1))
    }
}
