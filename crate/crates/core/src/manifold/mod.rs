//! Oriented parametrized submanifolds of Euclidean space.
//!
//! A [`ParamSubmanifold`] is a list of [`Chart`]s with disjoint-interior
//! parameter boxes whose images cover the manifold. Nothing here builds a
//! global mesh; every point is produced by some chart.

mod chart;
pub mod polyline;
pub mod scenes;
mod spheres;
pub mod surface;

use rand::Rng;
use thiserror::Error;

pub use chart::{Chart, ChartSample, FrameMap, Interval, PointMap, RANK_TOL};
pub use scenes::{builtin_scene, Scene, SCENE_NAMES};
pub use spheres::{hemisphere_cap, round_sphere};
pub use surface::{visibility_check, ImplicitSurface, Surface, Visibility};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("degenerate chart '{chart}': frame rank deficient at node {node:?}")]
    DegenerateChart { chart: String, node: Vec<f64> },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("submanifold has no charts")]
    Empty,
    #[error("unknown scene '{0}'")]
    UnknownScene(String),
    #[error("invalid scene parameters: {0}")]
    InvalidParams(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("polyline data: {0}")]
    Polyline(String),
}

/// Closed oriented `k`-dimensional submanifold of `R^N`, possibly a cycle
/// traversed `multiplicity` times.
#[derive(Clone, Debug)]
pub struct ParamSubmanifold {
    dim: usize,
    ambient_dim: usize,
    charts: Vec<Chart>,
    multiplicity: i64,
}

impl ParamSubmanifold {
    pub fn new(charts: Vec<Chart>) -> Result<Self, ManifoldError> {
        let first = charts.first().ok_or(ManifoldError::Empty)?;
        let (dim, ambient_dim) = (first.domain_dim(), first.ambient_dim());
        for c in &charts {
            if c.domain_dim() != dim || c.ambient_dim() != ambient_dim {
                return Err(ManifoldError::DimensionMismatch(format!(
                    "chart '{}' is {}-dimensional in R^{}, expected {} in R^{}",
                    c.name(),
                    c.domain_dim(),
                    c.ambient_dim(),
                    dim,
                    ambient_dim
                )));
            }
        }
        Ok(ParamSubmanifold {
            dim,
            ambient_dim,
            charts,
            multiplicity: 1,
        })
    }

    pub fn with_multiplicity(mut self, m: i64) -> Self {
        self.multiplicity = m;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn multiplicity(&self) -> i64 {
        self.multiplicity
    }

    /// Opposite orientation on every chart.
    pub fn reversed(&self) -> Self {
        ParamSubmanifold {
            charts: self.charts.iter().map(Chart::reversed).collect(),
            ..self.clone()
        }
    }

    /// Chart list in a different order; `order` is a permutation of indices.
    pub fn permuted(&self, order: &[usize]) -> Self {
        ParamSubmanifold {
            charts: order.iter().map(|&i| self.charts[i].clone()).collect(),
            ..self.clone()
        }
    }

    pub fn transformed(&self, rot: &[Vec<f64>], shift: &[f64]) -> Self {
        ParamSubmanifold {
            charts: self.charts.iter().map(|c| c.transformed(rot, shift)).collect(),
            ambient_dim: rot.len(),
            ..self.clone()
        }
    }

    /// Positions on a tensor grid with `per_axis` points per parameter axis.
    ///
    /// Finite axes include both endpoints; infinite axes use interior points
    /// of the compactified interval. Returns `(chart index, u, position)`.
    pub fn grid_points(&self, per_axis: usize) -> Vec<(usize, Vec<f64>, Vec<f64>)> {
        let per_axis = per_axis.max(2);
        let mut out = Vec::new();
        for (ci, chart) in self.charts.iter().enumerate() {
            let axes: Vec<Vec<f64>> = chart
                .domain()
                .iter()
                .map(|iv| {
                    let (a, b) = iv.bounds();
                    if iv.is_infinite() {
                        (0..per_axis)
                            .map(|i| a + (b - a) * (i as f64 + 0.5) / per_axis as f64)
                            .collect()
                    } else {
                        (0..per_axis)
                            .map(|i| a + (b - a) * i as f64 / (per_axis - 1) as f64)
                            .collect()
                    }
                })
                .collect();
            for u in tensor_points(&axes) {
                let p = chart.position_raw(&chart.to_native(&u));
                out.push((ci, u, p));
            }
        }
        out
    }

    /// Uniformly random chart and parameter point (integration coordinates).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<f64>) {
        let ci = rng.random_range(0..self.charts.len());
        let u = self.charts[ci]
            .domain()
            .iter()
            .map(|iv| {
                let (a, b) = iv.bounds();
                // stay off the boundary of the compactified line
                let (a, b) = if iv.is_infinite() { (a * 0.98, b * 0.98) } else { (a, b) };
                rng.random_range(a..b)
            })
            .collect();
        (ci, u)
    }
}

/// Cartesian product of per-axis coordinate lists, last axis fastest.
pub(crate) fn tensor_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        let mut next = Vec::with_capacity(pts.len() * axis.len());
        for p in &pts {
            for &v in axis {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Which linking formula applies.
#[derive(Clone, Debug)]
pub enum AmbientSpace {
    /// `R^N`; pairs with `k + l = N - 1`.
    Euclidean { dim: usize },
    /// Unit `S^n` in `R^{n+1}`; pairs with `k + l = n - 1`.
    Sphere { n: usize },
    /// Visible hypersurface `M^n` in `R^{n+1}`; pairs with `k + l = n - 1`.
    Visible { n: usize, surface: Surface },
}

impl AmbientSpace {
    /// Dimension of the Euclidean space everything is embedded in.
    pub fn embedding_dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean { dim } => *dim,
            AmbientSpace::Sphere { n } | AmbientSpace::Visible { n, .. } => n + 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AmbientSpace::Euclidean { dim } => format!("euclidean R^{dim}"),
            AmbientSpace::Sphere { n } => format!("sphere S^{n}"),
            AmbientSpace::Visible { n, surface } => format!("visible M^{n} = {surface}"),
        }
    }

    /// Checks `k + l` against the ambient dimension.
    pub fn check_dims(&self, k: usize, l: usize) -> Result<(), ManifoldError> {
        let need = match self {
            AmbientSpace::Euclidean { dim } => dim.checked_sub(1),
            AmbientSpace::Sphere { n } | AmbientSpace::Visible { n, .. } => n.checked_sub(1),
        };
        if Some(k + l) != need || self.embedding_dim() < 2 {
            return Err(ManifoldError::DimensionMismatch(format!(
                "dim K + dim L = {k} + {l} = {}, but {} requires {}",
                k + l,
                self.label(),
                need.map(|v| v.to_string()).unwrap_or_else(|| "n >= 1".into())
            )));
        }
        Ok(())
    }
}

/// End of the first parameter axis where a cap chart meets the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceEnd {
    Min,
    Max,
}

/// A `(k+1)`-chain bounded by a `k`-manifold `K`.
///
/// Chart `i` of `chain` restricted to its first axis at `face` reproduces
/// chart `i` of `K` in the remaining coordinates. The chain's own chart
/// orientations are ignored; the cone construction orients it.
#[derive(Clone, Debug)]
pub struct Cap {
    pub chain: ParamSubmanifold,
    pub face: FaceEnd,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_mixed_dimensions() {
        let a = Chart::new("a", 3, vec![Interval::Finite(0.0, 1.0)], |s| vec![s[0], 0.0, 0.0]);
        let b = Chart::new("b", 4, vec![Interval::Finite(0.0, 1.0)], |s| vec![s[0], 0.0, 0.0, 1.0]);
        assert!(matches!(
            ParamSubmanifold::new(vec![a, b]),
            Err(ManifoldError::DimensionMismatch(_))
        ));
        assert_eq!(ParamSubmanifold::new(vec![]).unwrap_err(), ManifoldError::Empty);
    }

    #[test]
    fn grid_includes_endpoints() {
        let c = Chart::new("c", 2, vec![Interval::Finite(0.0, PI)], |s| vec![s[0].cos(), s[0].sin()]);
        let m = ParamSubmanifold::new(vec![c]).unwrap();
        let g = m.grid_points(3);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].1, vec![0.0]);
        assert_eq!(g[2].1, vec![PI]);
    }

    #[test]
    fn dimension_bookkeeping() {
        assert!(AmbientSpace::Sphere { n: 3 }.check_dims(1, 1).is_ok());
        assert!(AmbientSpace::Sphere { n: 3 }.check_dims(1, 2).is_err());
        assert!(AmbientSpace::Euclidean { dim: 3 }.check_dims(1, 1).is_ok());
        assert!(AmbientSpace::Euclidean { dim: 4 }.check_dims(1, 2).is_ok());
    }
}
