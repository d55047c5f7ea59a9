//! Corner charts of the compactified Schwinger space and its boundary faces.

use crate::error::{Error, Result};
use crate::graph::{DecoratedGraph, EdgeSubset};
pub use crate::quadrature::boundary_sphere_quadrature;
use serde::Serialize;

const TOL: f64 = 1e-9;

/// Chart `C_{S₁,…,S_m}` for a strictly decreasing chain of nonempty edge subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CornerChart {
    chain: Vec<EdgeSubset>,
}

/// `rho[p]` per chain level, `coords[e]` is `ξ_e` for `e ∈ S₁` and `t_e` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub rho: Vec<f64>,
    pub coords: Vec<f64>,
}

impl CornerChart {
    pub fn new(chain: Vec<EdgeSubset>) -> Result<Self> {
        if chain.is_empty() || chain.iter().any(|s| s.is_empty()) {
            return Err(Error::EmptySubset);
        }
        for w in chain.windows(2) {
            if !(w[1].is_subset_of(&w[0]) && w[1] != w[0]) {
                return Err(Error::ConstraintViolated("chain must be strictly decreasing".into()));
            }
        }
        Ok(CornerChart { chain })
    }

    pub fn single(sub: EdgeSubset) -> Result<Self> {
        Self::new(vec![sub])
    }

    pub fn chain(&self) -> &[EdgeSubset] {
        &self.chain
    }

    pub fn num_edges(&self) -> usize {
        self.chain[0].parent_len()
    }

    /// Deepest chain level (1-based) containing `e`, 0 if `e ∉ S₁`.
    pub fn level(&self, e: usize) -> usize {
        self.chain.iter().take_while(|s| s.contains(e)).count()
    }

    /// `Σ_{e∈S_p} (Π_{p<j≤ℓ(e)} ρ_j ξ_e)² − 1` for each level `p`.
    pub fn residuals(&self, pt: &ChartPoint) -> Vec<f64> {
        (0..self.chain.len())
            .map(|p| {
                self.chain[p]
                    .indices()
                    .iter()
                    .map(|&e| {
                        let scale: f64 = (p + 1..self.level(e)).map(|j| pt.rho[j]).product();
                        (scale * pt.coords[e]).powi(2)
                    })
                    .sum::<f64>()
                    - 1.0
            })
            .collect()
    }

    fn check_shape(&self, pt: &ChartPoint) -> Result<()> {
        if pt.rho.len() != self.chain.len() || pt.coords.len() != self.num_edges() {
            return Err(Error::ConstraintViolated("point has the wrong number of coordinates".into()));
        }
        Ok(())
    }

    /// `t_e = (Π_{i: e∈S_i} ρ_i) ξ_e`; `t_e` unchanged off `S₁`.
    pub fn blow_down(&self, pt: &ChartPoint) -> Result<Vec<f64>> {
        self.check_shape(pt)?;
        if pt.rho.iter().any(|&r| r < 0.0) || pt.coords.iter().any(|&c| c <= 0.0) {
            return Err(Error::ConstraintViolated("coordinates out of range".into()));
        }
        if let Some(r) = self.residuals(pt).into_iter().find(|r| r.abs() > TOL) {
            return Err(Error::ConstraintViolated(format!("sphere constraint off by {r:e}")));
        }
        Ok((0..self.num_edges()).map(|e| (0..self.level(e)).map(|j| pt.rho[j]).product::<f64>() * pt.coords[e]).collect())
    }

    /// Inverse of [`blow_down`](Self::blow_down) on the interior.
    pub fn lift_interior(&self, t: &[f64]) -> Result<ChartPoint> {
        if t.len() != self.num_edges() {
            return Err(Error::ConstraintViolated("point has the wrong number of coordinates".into()));
        }
        if t.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveT);
        }
        let mut rho = Vec::with_capacity(self.chain.len());
        let mut acc = 1.0;
        for s in &self.chain {
            let norm = s.indices().iter().map(|&e| t[e] * t[e]).sum::<f64>().sqrt();
            rho.push(norm / acc);
            acc = norm;
        }
        let coords = (0..t.len())
            .map(|e| {
                let l = self.level(e);
                if l == 0 {
                    t[e]
                } else {
                    t[e] / rho[..l].iter().product::<f64>()
                }
            })
            .collect();
        Ok(ChartPoint { rho, coords })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Origin,
    Outer,
}

/// A codimension-one face of the compactified box `[0, L]^E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryFace {
    pub side: Side,
    /// Collapsing subgraph for origin faces, the pinned edge for outer faces.
    pub subset: EdgeSubset,
    pub chart: Option<CornerChart>,
    /// Pinned chart levels (0-based) for origin faces.
    pub pinned: Vec<usize>,
    /// Value of the pinned `t_e` for outer faces.
    pub at: Option<f64>,
    pub sign: i8,
}

/// Origin faces for every nonempty subset `Γ′` (sign of `σ(Γ′, Γ/Γ′)`) and outer faces
/// `t_e = L` (sign `(−1)^{|e|}`, `|e|` the 1-based edge position).
pub fn boundary_decomposition(g: &DecoratedGraph, l: f64) -> Result<Vec<BoundaryFace>> {
    g.check_admissible()?;
    let ne = g.num_edges();
    let mut faces = Vec::new();
    for sub in EdgeSubset::all_nonempty(ne) {
        faces.push(BoundaryFace {
            side: Side::Origin,
            subset: sub,
            chart: Some(CornerChart::single(sub)?),
            pinned: vec![0],
            at: None,
            sign: g.permutation_sign(&sub)?.sign,
        });
    }
    for e in 0..ne {
        faces.push(BoundaryFace {
            side: Side::Outer,
            subset: EdgeSubset::from_indices(ne, &[e])?,
            chart: None,
            pinned: vec![],
            at: Some(l),
            sign: if (e + 1) % 2 == 0 { 1 } else { -1 },
        });
    }
    Ok(faces)
}
