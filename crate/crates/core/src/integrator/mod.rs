//! Adaptive tensor-product Gauss–Legendre quadrature over `K x L`.
//!
//! Every pair of charts contributes a box in `k + l` parameters. A box is
//! evaluated at orders `p` and `2p`; it is accepted when the two estimates
//! agree to `refine_threshold` scaled by the box's share of the root
//! measure, and otherwise bisected along its relatively widest axis.
//!
//! The reduction is reproducible: tile values are combined by pairwise
//! summation in an order fixed by chart names and bisection paths, and node
//! sums inside a tile are formed per `K` node before a fixed-shape tree sum.
//! The worker count never changes the result bits.

pub mod gauss;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::pairwise_sum;
use crate::manifold::{tensor_points, Chart, ChartSample, ManifoldError, ParamSubmanifold};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per parameter axis of the coarse rule.
    pub base_order: usize,
    pub max_subdivision_depth: u32,
    pub refine_threshold: f64,
    /// Smallest admissible `alpha` or `|x - y|` at a node.
    pub singular_guard: f64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_order: 32,
            max_subdivision_depth: 6,
            refine_threshold: 1e-7,
            singular_guard: 1e-9,
            workers: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_order(mut self, order: usize) -> Self {
        self.base_order = order;
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.max_subdivision_depth = depth;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        if self.base_order < 2 {
            return Err(IntegrationError::InvalidSpec(format!("base_order {} < 2", self.base_order)));
        }
        if self.refine_threshold.is_nan() || self.refine_threshold <= 0.0 || self.singular_guard.is_nan() || self.singular_guard <= 0.0 {
            return Err(IntegrationError::InvalidSpec("thresholds must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(IntegrationError::InvalidSpec("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a quadrature, snapped to the nearest integer.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    /// Sum over accepted tiles of `|Q_2p - Q_p|`.
    pub error_estimate: f64,
    pub snapped: i64,
    pub residual: f64,
    pub node_count: u64,
    pub wall_time: f64,
    /// Some tile at maximum depth still missed its tolerance by 10x.
    pub accuracy_warning: bool,
}

impl IntegralResult {
    pub fn new(value: f64, error_estimate: f64, node_count: u64, wall_time: f64, accuracy_warning: bool) -> Self {
        let snapped = value.round();
        IntegralResult {
            value,
            error_estimate,
            snapped: snapped as i64,
            residual: (value - snapped).abs(),
            node_count,
            wall_time,
            accuracy_warning,
        }
    }

    /// Value and error multiplied by `c`, snap recomputed.
    pub fn scaled(&self, c: f64) -> Self {
        IntegralResult::new(
            self.value * c,
            self.error_estimate * c.abs(),
            self.node_count,
            self.wall_time,
            self.accuracy_warning,
        )
    }

    /// Sum of two independent integrals.
    pub fn plus(&self, other: &IntegralResult) -> Self {
        IntegralResult::new(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.node_count + other.node_count,
            self.wall_time + other.wall_time,
            self.accuracy_warning || other.accuracy_warning,
        )
    }

    pub fn snap(&self, tol: f64) -> Snap {
        snap_integer(self.value, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Snap {
    Integer(i64),
    Rejected { residual: f64 },
}

/// Nearest integer when within `tol`, otherwise the residual.
pub fn snap_integer(value: f64, tol: f64) -> Snap {
    let r = value.round();
    let residual = (value - r).abs();
    if residual < tol {
        Snap::Integer(r as i64)
    } else {
        Snap::Rejected { residual }
    }
}

/// Guard quantity that fell below the admissible minimum at a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Singular {
    pub metric: f64,
}

/// Integrand on `K x L` in chart coordinates, Jacobian factors included.
pub trait Density: Sync {
    fn density(&self, x: &ChartSample, y: &ChartSample) -> Result<f64, Singular>;
}

impl<F> Density for F
where
    F: Fn(&ChartSample, &ChartSample) -> Result<f64, Singular> + Sync,
{
    fn density(&self, x: &ChartSample, y: &ChartSample) -> Result<f64, Singular> {
        self(x, y)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Chart(#[from] ManifoldError),
    #[error("near-singular integrand at s = {s:?} on '{k_chart}', t = {t:?} on '{l_chart}' (guard quantity {metric:e})")]
    NearSingular {
        k_chart: String,
        l_chart: String,
        s: Vec<f64>,
        t: Vec<f64>,
        metric: f64,
    },
}

#[derive(Clone, Debug)]
struct Tile {
    pair: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: u32,
    path: Vec<u8>,
}

struct PairBox<'a> {
    k: &'a Chart,
    l: &'a Chart,
    root_lo: Vec<f64>,
    root_hi: Vec<f64>,
    factor: f64,
}

struct TileEval {
    coarse: f64,
    fine: f64,
    nodes: u64,
    singular: Option<(Vec<f64>, Vec<f64>, f64)>,
}

/// Integrates `density` over `K x L`.
///
/// Each chart pair is weighted by both orientation signs and both
/// multiplicities.
pub fn integrate_product<D: Density + ?Sized>(
    k: &ParamSubmanifold,
    l: &ParamSubmanifold,
    density: &D,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, IntegrationError> {
    spec.validate()?;
    if k.ambient_dim() != l.ambient_dim() {
        return Err(IntegrationError::DimensionMismatch(format!(
            "K lives in R^{}, L in R^{}",
            k.ambient_dim(),
            l.ambient_dim()
        )));
    }
    let start = Instant::now();
    let run = || integrate_inner(k, l, density, spec);
    let (value, err, nodes, warn) = match spec.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| IntegrationError::InvalidSpec(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(IntegralResult::new(value, err, nodes, start.elapsed().as_secs_f64(), warn))
}

fn integrate_inner<D: Density + ?Sized>(
    k: &ParamSubmanifold,
    l: &ParamSubmanifold,
    density: &D,
    spec: &QuadratureSpec,
) -> Result<(f64, f64, u64, bool), IntegrationError> {
    let mut index: Vec<(usize, usize)> = (0..k.charts().len())
        .flat_map(|i| (0..l.charts().len()).map(move |j| (i, j)))
        .collect();
    index.sort_by(|a, b| {
        (k.charts()[a.0].name(), l.charts()[a.1].name(), a.0, a.1).cmp(&(
            k.charts()[b.0].name(),
            l.charts()[b.1].name(),
            b.0,
            b.1,
        ))
    });
    let mult = (k.multiplicity() * l.multiplicity()) as f64;
    let pairs: Vec<PairBox> = index
        .iter()
        .map(|&(i, j)| {
            let (kc, lc) = (&k.charts()[i], &l.charts()[j]);
            let (root_lo, root_hi) = kc
                .domain()
                .iter()
                .chain(lc.domain())
                .map(|iv| iv.bounds())
                .unzip();
            PairBox {
                k: kc,
                l: lc,
                root_lo,
                root_hi,
                factor: (kc.orientation() * lc.orientation()) as f64 * mult,
            }
        })
        .collect();

    let mut frontier: Vec<Tile> = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| Tile {
            pair: i,
            lo: p.root_lo.clone(),
            hi: p.root_hi.clone(),
            depth: 0,
            path: Vec::new(),
        })
        .collect();

    let mut leaves: Vec<(usize, Vec<u8>, f64, f64)> = Vec::new();
    let mut nodes = 0u64;
    let mut warn = false;
    let fine_order = 2 * spec.base_order;

    while !frontier.is_empty() {
        let evals: Vec<Result<TileEval, IntegrationError>> = frontier
            .par_iter()
            .map(|t| eval_tile(&pairs[t.pair], t, density, spec.base_order, fine_order))
            .collect();
        let mut next = Vec::new();
        for (tile, ev) in frontier.into_iter().zip(evals) {
            let ev = ev?;
            nodes += ev.nodes;
            let pb = &pairs[tile.pair];
            let can_split = tile.depth < spec.max_subdivision_depth && !tile.lo.is_empty();
            if let Some((s, t, metric)) = ev.singular {
                if can_split {
                    next.extend(split(&tile, pb));
                    continue;
                }
                return Err(IntegrationError::NearSingular {
                    k_chart: pb.k.name().to_string(),
                    l_chart: pb.l.name().to_string(),
                    s: pb.k.to_native(&s),
                    t: pb.l.to_native(&t),
                    metric,
                });
            }
            let err = (ev.fine - ev.coarse).abs();
            let share: f64 = tile
                .lo
                .iter()
                .zip(&tile.hi)
                .zip(pb.root_lo.iter().zip(&pb.root_hi))
                .map(|((a, b), (ra, rb))| (b - a) / (rb - ra))
                .product();
            let tol = spec.refine_threshold * share;
            if err <= tol || !can_split {
                if err > 10.0 * tol {
                    warn = true;
                }
                leaves.push((tile.pair, tile.path, ev.fine * pb.factor, err * pb.factor.abs()));
            } else {
                next.extend(split(&tile, pb));
            }
        }
        frontier = next;
    }

    leaves.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let values: Vec<f64> = leaves.iter().map(|l| l.2).collect();
    let errs: Vec<f64> = leaves.iter().map(|l| l.3).collect();
    Ok((pairwise_sum(&values), pairwise_sum(&errs), nodes, warn))
}

fn split(tile: &Tile, pb: &PairBox) -> [Tile; 2] {
    let mut axis = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..tile.lo.len() {
        let rel = (tile.hi[i] - tile.lo[i]) / (pb.root_hi[i] - pb.root_lo[i]);
        if rel > best {
            best = rel;
            axis = i;
        }
    }
    let mid = 0.5 * (tile.lo[axis] + tile.hi[axis]);
    let mut a = tile.clone();
    let mut b = tile.clone();
    a.hi[axis] = mid;
    b.lo[axis] = mid;
    for (t, bit) in [(&mut a, 0u8), (&mut b, 1u8)] {
        t.depth += 1;
        t.path.push(bit);
    }
    [a, b]
}

struct NodeSet {
    params: Vec<Vec<f64>>,
    weights: Vec<f64>,
    samples: Vec<ChartSample>,
}

fn nodes_for(chart: &Chart, lo: &[f64], hi: &[f64], order: usize) -> Result<NodeSet, ManifoldError> {
    let rule = gauss::rule(order);
    let axes: Vec<Vec<(f64, f64)>> = lo.iter().zip(hi).map(|(&a, &b)| rule.mapped(a, b).collect()).collect();
    let coords: Vec<Vec<f64>> = axes.iter().map(|ax| ax.iter().map(|p| p.0).collect()).collect();
    let wts: Vec<Vec<f64>> = axes.iter().map(|ax| ax.iter().map(|p| p.1).collect()).collect();
    let params = tensor_points(&coords);
    let weights: Vec<f64> = tensor_points(&wts).iter().map(|w| w.iter().product()).collect();
    let samples = params.iter().map(|u| chart.evaluate(u)).collect::<Result<Vec<_>, _>>()?;
    Ok(NodeSet { params, weights, samples })
}

fn eval_tile<D: Density + ?Sized>(
    pb: &PairBox,
    tile: &Tile,
    density: &D,
    coarse: usize,
    fine: usize,
) -> Result<TileEval, IntegrationError> {
    let kd = pb.k.domain_dim();
    let mut out = TileEval {
        coarse: 0.0,
        fine: 0.0,
        nodes: 0,
        singular: None,
    };
    for (order, slot) in [(coarse, 0), (fine, 1)] {
        let kn = nodes_for(pb.k, &tile.lo[..kd], &tile.hi[..kd], order)?;
        let ln = nodes_for(pb.l, &tile.lo[kd..], &tile.hi[kd..], order)?;
        out.nodes += (kn.weights.len() * ln.weights.len()) as u64;
        let rows: Vec<Result<f64, (usize, f64)>> = (0..kn.samples.len())
            .into_par_iter()
            .map(|i| {
                let x = &kn.samples[i];
                let mut acc = 0.0;
                for (j, y) in ln.samples.iter().enumerate() {
                    match density.density(x, y) {
                        Ok(v) => acc += ln.weights[j] * v,
                        Err(s) => return Err((j, s.metric)),
                    }
                }
                Ok(kn.weights[i] * acc)
            })
            .collect();
        let mut sums = Vec::with_capacity(rows.len());
        for (i, r) in rows.into_iter().enumerate() {
            match r {
                Ok(v) => sums.push(v),
                Err((j, metric)) => {
                    out.singular = Some((kn.params[i].clone(), ln.params[j].clone(), metric));
                    return Ok(out);
                }
            }
        }
        let q = pairwise_sum(&sums);
        if slot == 0 {
            out.coarse = q;
        } else {
            out.fine = q;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::manifold::{builtin_scene, round_sphere};
    use std::f64::consts::PI;

    fn unit_circle(name: &str, z: f64) -> ParamSubmanifold {
        round_sphere(name, 1, &[0, 1], 3, &[0.0, 0.0, z], 1.0).unwrap()
    }

    #[test]
    fn arclength_product() {
        let k = unit_circle("K", 0.0);
        let l = unit_circle("L", 5.0);
        let d = |x: &ChartSample, y: &ChartSample| Ok(linalg::norm(&x.frame[0]) * linalg::norm(&y.frame[0]));
        let r = integrate_product(&k, &l, &d, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 4.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn cone_bracket_over_great_circles() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let d = |x: &ChartSample, y: &ChartSample| {
            Ok(crate::kernel::det_form_cone(&x.position, &x.frame, &y.position, &y.frame).unwrap())
        };
        let r = integrate_product(&s.k, &s.l, &d, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 4.0 * PI * PI).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn refines_toward_a_peak() {
        let k = unit_circle("K", 0.0);
        let l = unit_circle("L", 0.0);
        // sharply peaked but smooth in (s, t)
        let d = |x: &ChartSample, y: &ChartSample| {
            let dx = x.position[0] - 1.0;
            let dy = y.position[1] - 1.0;
            Ok(1.0 / (1e-3 + dx * dx + dy * dy))
        };
        let spec = QuadratureSpec::default().with_order(8).with_depth(14);
        let r = integrate_product(&k, &l, &d, &spec).unwrap();
        let fine = integrate_product(&k, &l, &d, &QuadratureSpec::default().with_order(48).with_depth(16)).unwrap();
        assert!((r.value - fine.value).abs() < 1e-5 * fine.value.abs());
        assert!(r.node_count > 2 * (64 + 256));
    }

    #[test]
    fn singular_node_is_reported_with_location() {
        let k = unit_circle("K", 0.0);
        let l = unit_circle("L", 0.0);
        let d = |_: &ChartSample, y: &ChartSample| {
            if y.position[1] > 0.5 {
                Err(Singular { metric: 0.0 })
            } else {
                Ok(1.0)
            }
        };
        let spec = QuadratureSpec::default().with_order(4).with_depth(2);
        match integrate_product(&k, &l, &d, &spec) {
            Err(IntegrationError::NearSingular { s, t, .. }) => {
                assert_eq!(s.len(), 1);
                assert!(t[0].sin() > 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let s = builtin_scene("tilted_hopf", &[0.6]).unwrap();
        let d = |x: &ChartSample, y: &ChartSample| {
            let r = linalg::distance(&x.position, &y.position);
            Ok(crate::kernel::det_form_cone(&x.position, &x.frame, &y.position, &y.frame).unwrap() / (r * r))
        };
        let a = integrate_product(&s.k, &s.l, &d, &QuadratureSpec::default().with_workers(1)).unwrap();
        let b = integrate_product(&s.k, &s.l, &d, &QuadratureSpec::default().with_workers(3)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_integer(0.99993, 0.1), Snap::Integer(1));
        assert_eq!(snap_integer(0.4, 0.1), Snap::Rejected { residual: 0.4 });
        assert_eq!(snap_integer(-2.0000004, 0.001), Snap::Integer(-2));
        let r = IntegralResult::new(2.6, 0.0, 0, 0.0, false);
        assert_eq!(r.snapped, 3);
        assert!(r.residual <= 0.5);
    }

    #[test]
    fn invalid_spec() {
        let k = unit_circle("K", 0.0);
        let spec = QuadratureSpec::default().with_order(1);
        let d = |_: &ChartSample, _: &ChartSample| Ok(1.0);
        assert!(matches!(integrate_product(&k, &k, &d, &spec), Err(IntegrationError::InvalidSpec(_))));
    }
}
