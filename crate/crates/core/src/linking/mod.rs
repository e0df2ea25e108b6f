//! Linking numbers as integrals over `K x L`.
//!
//! Three integrands are provided:
//!
//! * Euclidean `R^N`:
//!   `(-1)^{k+1} / vol S^{N-1} * |x - y|^{-N} [x - y, dx, dy]`
//! * round `S^n`:
//!   `1 / vol S^n * Omega_{k,l}(alpha) / sin^n(alpha) * [x, dx, y, dy]`
//! * visible hypersurface `M^n` in `R^{n+1}`: the sphere integrand further
//!   divided by `|x|^{k+1} |y|^{l+1}`.
//!
//! Each entry point runs a separation scan first, so that touching inputs
//! fail with a location instead of producing a meaningless number.

pub mod cone;
pub mod pullback;
pub mod report;

use thiserror::Error;

use crate::integrator::{integrate_product, Density, IntegralResult, IntegrationError, QuadratureSpec, Singular};
use crate::kernel::{self, KernelError, Omega, DEFAULT_OMEGA_ORDER};
use crate::linalg;
use crate::manifold::{AmbientSpace, ChartSample, ManifoldError, ParamSubmanifold, Scene};
use crate::oracle;

pub use cone::{cone_truncate, cone_truncated_linking, ConeLinking, ConeTruncation};
pub use pullback::pullback_check;
pub use report::Report;

/// Distance from the unit sphere tolerated for points of a sphere scene.
pub const UNIT_NORM_TOL: f64 = 1e-8;
/// Distance from `M` tolerated for points of a visible-hypersurface scene.
pub const SURFACE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("cap does not bound K: {0}")]
    CapMismatch(String),
}

impl LinkError {
    pub fn is_near_singular(&self) -> bool {
        matches!(
            self,
            LinkError::Integration(IntegrationError::NearSingular { .. }) | LinkError::Kernel(KernelError::NearSingular { .. })
        )
    }
}

/// Which integrand a result came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    Euclidean,
    Sphere,
    Visible,
    /// Direct signed count for zero-dimensional `K, L` on a curve.
    SignedCount,
}

impl Formula {
    pub fn label(&self) -> &'static str {
        match self {
            Formula::Euclidean => "euclidean gauss integral",
            Formula::Sphere => "sphere integral (Omega kernel)",
            Formula::Visible => "visible hypersurface integral",
            Formula::SignedCount => "signed point count",
        }
    }
}

/// `|x - y|` kernel in `R^N`.
#[derive(Clone, Debug)]
pub struct EuclideanDensity {
    n: usize,
    coef: f64,
    guard: f64,
}

impl EuclideanDensity {
    pub fn new(n: usize, k: usize, guard: f64) -> Self {
        let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        EuclideanDensity {
            n,
            coef: sign / kernel::sphere_volume(n - 1),
            guard,
        }
    }
}

impl Density for EuclideanDensity {
    fn density(&self, x: &ChartSample, y: &ChartSample) -> Result<f64, Singular> {
        let r = linalg::distance(&x.position, &y.position);
        if r < self.guard {
            return Err(Singular { metric: r });
        }
        let det = kernel::det_form_euclidean(&x.position, &y.position, &x.frame, &y.frame).map_err(|_| Singular { metric: r })?;
        Ok(self.coef * det / r.powi(self.n as i32))
    }
}

/// `Omega` kernel on `S^n`, or on a visible `M^n` when `visible` is set.
#[derive(Clone, Debug)]
pub struct AngleDensity {
    n: i32,
    k: i32,
    l: i32,
    omega: Omega,
    coef: f64,
    guard: f64,
    visible: bool,
}

impl AngleDensity {
    pub fn sphere(n: usize, k: usize, guard: f64) -> Self {
        Self::build(n, k, guard, false)
    }

    pub fn visible(n: usize, k: usize, guard: f64) -> Self {
        Self::build(n, k, guard, true)
    }

    fn build(n: usize, k: usize, guard: f64, visible: bool) -> Self {
        let l = n - 1 - k;
        AngleDensity {
            n: n as i32,
            k: k as i32,
            l: l as i32,
            omega: Omega::new(k, l, DEFAULT_OMEGA_ORDER),
            coef: 1.0 / kernel::sphere_volume(n),
            guard,
            visible,
        }
    }
}

impl Density for AngleDensity {
    fn density(&self, x: &ChartSample, y: &ChartSample) -> Result<f64, Singular> {
        let alpha = kernel::angle(&x.position, &y.position).map_err(|_| Singular { metric: 0.0 })?;
        if alpha < self.guard {
            return Err(Singular { metric: alpha });
        }
        let det = kernel::det_form_cone(&x.position, &x.frame, &y.position, &y.frame).map_err(|_| Singular { metric: alpha })?;
        let mut v = self.coef * self.omega.eval(alpha) / alpha.sin().powi(self.n) * det;
        if self.visible {
            v /= linalg::norm(&x.position).powi(self.k + 1) * linalg::norm(&y.position).powi(self.l + 1);
        }
        Ok(v)
    }
}

/// Closest approach of `K` and `L` found by the separation scan.
#[derive(Clone, Debug, PartialEq)]
pub struct Separation {
    /// `|x - y|` for Euclidean scenes, the angle `alpha` otherwise.
    pub metric: f64,
    pub k_chart: String,
    pub l_chart: String,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Metric {
    Distance,
    Angle,
}

impl Metric {
    fn eval(self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            Metric::Distance => linalg::distance(p, q),
            Metric::Angle => kernel::angle(p, q).unwrap_or(0.0),
        }
    }
}

fn grid_density(m: &ParamSubmanifold) -> usize {
    if m.dim() == 0 {
        return 1;
    }
    let per_chart = 2000.0 / m.charts().len() as f64;
    (per_chart.powf(1.0 / m.dim() as f64).floor() as usize).clamp(4, 64)
}

/// Grid scan over `K x L` followed by a pattern search from the best grid
/// pairs.
fn closest_approach(k: &ParamSubmanifold, l: &ParamSubmanifold, metric: Metric) -> Separation {
    let (nk, nl) = (grid_density(k), grid_density(l));
    let gk = k.grid_points(nk);
    let gl = l.grid_points(nl);
    let mut best: Vec<(f64, usize, usize)> = Vec::new();
    for (i, (_, _, p)) in gk.iter().enumerate() {
        for (j, (_, _, q)) in gl.iter().enumerate() {
            let d = metric.eval(p, q);
            if best.len() < 4 || d < best[3].0 {
                best.push((d, i, j));
                best.sort_by(|a, b| a.0.total_cmp(&b.0));
                best.truncate(4);
            }
        }
    }
    let mut out: Option<Separation> = None;
    for &(_, i, j) in &best {
        let (ci, ref u0, _) = gk[i];
        let (cj, ref v0, _) = gl[j];
        let (kc, lc) = (&k.charts()[ci], &l.charts()[cj]);
        let bounds: Vec<(f64, f64)> = kc
            .domain()
            .iter()
            .chain(lc.domain())
            .map(|iv| {
                let (a, b) = iv.bounds();
                if iv.is_infinite() {
                    (a * 0.999_999, b * 0.999_999)
                } else {
                    (a, b)
                }
            })
            .collect();
        let kd = kc.domain_dim();
        let value = |z: &[f64]| {
            let p = kc.position_raw(&kc.to_native(&z[..kd]));
            let q = lc.position_raw(&lc.to_native(&z[kd..]));
            metric.eval(&p, &q)
        };
        let mut z: Vec<f64> = u0.iter().chain(v0).copied().collect();
        let mut h: Vec<f64> = bounds
            .iter()
            .enumerate()
            .map(|(a, (lo, hi))| (hi - lo) / if a < kd { nk } else { nl } as f64)
            .collect();
        let mut fz = value(&z);
        for _ in 0..400 {
            if z.is_empty() || h.iter().zip(&bounds).all(|(s, (lo, hi))| *s < 1e-14 * (hi - lo).max(1.0)) {
                break;
            }
            let mut improved = false;
            for a in 0..z.len() {
                for dir in [1.0, -1.0] {
                    let mut c = z.clone();
                    c[a] = (c[a] + dir * h[a]).clamp(bounds[a].0, bounds[a].1);
                    let fc = value(&c);
                    if fc < fz {
                        z = c;
                        fz = fc;
                        improved = true;
                    }
                }
            }
            if !improved {
                h.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        if out.as_ref().is_none_or(|o| fz < o.metric) {
            out = Some(Separation {
                metric: fz,
                k_chart: kc.name().to_string(),
                l_chart: lc.name().to_string(),
                s: kc.to_native(&z[..kd]),
                t: lc.to_native(&z[kd..]),
            });
        }
    }
    out.expect("grids are never empty")
}

fn guard_separation(sep: Separation, guard: f64) -> Result<Separation, LinkError> {
    if sep.metric < guard {
        return Err(IntegrationError::NearSingular {
            k_chart: sep.k_chart,
            l_chart: sep.l_chart,
            s: sep.s,
            t: sep.t,
            metric: sep.metric,
        }
        .into());
    }
    Ok(sep)
}

fn check_pair(k: &ParamSubmanifold, l: &ParamSubmanifold, ambient: &AmbientSpace) -> Result<(), LinkError> {
    ambient.check_dims(k.dim(), l.dim())?;
    let dim = ambient.embedding_dim();
    if k.ambient_dim() != dim || l.ambient_dim() != dim {
        return Err(ManifoldError::DimensionMismatch(format!(
            "{} needs points in R^{dim}, got K in R^{} and L in R^{}",
            ambient.label(),
            k.ambient_dim(),
            l.ambient_dim()
        ))
        .into());
    }
    Ok(())
}

fn check_points(m: &ParamSubmanifold, what: &str, ok: impl Fn(&[f64]) -> bool, msg: &str) -> Result<(), LinkError> {
    for (ci, u, p) in m.grid_points(grid_density(m)) {
        if !ok(&p) {
            let c = &m.charts()[ci];
            return Err(LinkError::InvalidScene(format!(
                "{what} point {:?} on chart '{}' at {:?} {msg}",
                p,
                c.name(),
                c.to_native(&u)
            )));
        }
    }
    Ok(())
}

/// Dimension, membership and separation checks run before integrating.
///
/// Fails with a near-singular error when the closest approach found is
/// below `guard`.
pub fn preflight(k: &ParamSubmanifold, l: &ParamSubmanifold, ambient: &AmbientSpace, guard: f64) -> Result<Separation, LinkError> {
    check_pair(k, l, ambient)?;
    let metric = match ambient {
        AmbientSpace::Euclidean { .. } => Metric::Distance,
        AmbientSpace::Sphere { .. } => {
            for (m, what) in [(k, "K"), (l, "L")] {
                check_points(m, what, |p| (linalg::norm(p) - 1.0).abs() <= UNIT_NORM_TOL, "is not on the unit sphere")?;
            }
            Metric::Angle
        }
        AmbientSpace::Visible { surface, .. } => {
            for (m, what) in [(k, "K"), (l, "L")] {
                check_points(m, what, |p| surface.level(p).abs() <= SURFACE_TOL, "is not on M")?;
            }
            Metric::Angle
        }
    };
    guard_separation(closest_approach(k, l, metric), guard)
}

/// Euclidean linking integral in `R^N`, `N` the ambient dimension of `K`.
pub fn linking_euclidean(k: &ParamSubmanifold, l: &ParamSubmanifold, spec: &QuadratureSpec) -> Result<IntegralResult, LinkError> {
    let n = k.ambient_dim();
    preflight(k, l, &AmbientSpace::Euclidean { dim: n }, spec.singular_guard)?;
    let density = EuclideanDensity::new(n, k.dim(), spec.singular_guard);
    Ok(integrate_product(k, l, &density, spec)?)
}

/// Linking integral on the unit sphere `S^n`, `n + 1` the ambient dimension.
pub fn linking_sphere(k: &ParamSubmanifold, l: &ParamSubmanifold, spec: &QuadratureSpec) -> Result<IntegralResult, LinkError> {
    let n = k.ambient_dim().saturating_sub(1);
    reject_curve_case(n)?;
    preflight(k, l, &AmbientSpace::Sphere { n }, spec.singular_guard)?;
    let density = AngleDensity::sphere(n, k.dim(), spec.singular_guard);
    Ok(integrate_product(k, l, &density, spec)?)
}

/// Linking integral on a visible hypersurface of `R^{n+1}`.
///
/// `K` and `L` are assumed to bound in `M`; membership in `M` is not
/// checked here (see [`link_scene`]).
pub fn linking_visible(k: &ParamSubmanifold, l: &ParamSubmanifold, spec: &QuadratureSpec) -> Result<IntegralResult, LinkError> {
    let n = k.ambient_dim().saturating_sub(1);
    reject_curve_case(n)?;
    check_pair(k, l, &AmbientSpace::Sphere { n })?;
    for (m, what) in [(k, "K"), (l, "L")] {
        check_points(m, what, |p| linalg::norm(p) > 0.0, "is the origin")?;
    }
    guard_separation(closest_approach(k, l, Metric::Angle), spec.singular_guard)?;
    let density = AngleDensity::visible(n, k.dim(), spec.singular_guard);
    Ok(integrate_product(k, l, &density, spec)?)
}

fn reject_curve_case(n: usize) -> Result<(), LinkError> {
    if n == 1 {
        return Err(LinkError::InvalidScene(
            "point pairs on a curve are linked by a signed count, not an integral".into(),
        ));
    }
    Ok(())
}

/// Runs the integrand that matches the scene's ambient space.
pub fn link_scene(scene: &Scene, spec: &QuadratureSpec) -> Result<(Formula, IntegralResult), LinkError> {
    match &scene.ambient {
        AmbientSpace::Euclidean { .. } => Ok((Formula::Euclidean, linking_euclidean(&scene.k, &scene.l, spec)?)),
        AmbientSpace::Sphere { n: 1 } | AmbientSpace::Visible { n: 1, .. } => {
            preflight(&scene.k, &scene.l, &scene.ambient, spec.singular_guard)?;
            let start = std::time::Instant::now();
            let v = oracle::signed_count_n1(&signed_points(&scene.k), &signed_points(&scene.l))
                .map_err(|e| LinkError::InvalidScene(e.to_string()))?;
            let r = IntegralResult::new(v as f64, 0.0, 0, start.elapsed().as_secs_f64(), false);
            Ok((Formula::SignedCount, r))
        }
        AmbientSpace::Sphere { .. } => Ok((Formula::Sphere, linking_sphere(&scene.k, &scene.l, spec)?)),
        AmbientSpace::Visible { .. } => {
            preflight(&scene.k, &scene.l, &scene.ambient, spec.singular_guard)?;
            Ok((Formula::Visible, linking_visible(&scene.k, &scene.l, spec)?))
        }
    }
}

/// Positions and signs of a zero-dimensional submanifold.
pub fn signed_points(m: &ParamSubmanifold) -> Vec<(Vec<f64>, i64)> {
    m.charts()
        .iter()
        .map(|c| (c.position_raw(&[]), c.orientation() as i64 * m.multiplicity()))
        .collect()
}

/// Integrand of [`linking_sphere`] or [`linking_visible`] at one pair of
/// samples, without the guard.
pub fn angle_integrand(n: usize, k: usize, x: &ChartSample, y: &ChartSample, visible: bool) -> f64 {
    let d = if visible {
        AngleDensity::visible(n, k, 0.0)
    } else {
        AngleDensity::sphere(n, k, 0.0)
    };
    d.density(x, y).unwrap_or(f64::NAN)
}

/// Integrand of [`linking_euclidean`] at one pair of samples.
pub fn euclidean_integrand(n: usize, k: usize, x: &ChartSample, y: &ChartSample) -> f64 {
    EuclideanDensity::new(n, k, 0.0).density(x, y).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{builtin_scene, round_sphere, Chart};
    use std::f64::consts::PI;

    fn fast() -> QuadratureSpec {
        QuadratureSpec::default().with_order(24)
    }

    #[test]
    fn hopf_is_plus_one_on_the_sphere() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let r = linking_sphere(&s.k, &s.l, &fast()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
        assert_eq!(r.snapped, 1);
    }

    #[test]
    fn visible_equals_sphere_pointwise_on_unit_points() {
        let s = builtin_scene("tilted_hopf", &[0.4]).unwrap();
        for u in [0.3, 1.7, 4.0] {
            for v in [0.1, 2.2, 5.9] {
                let x = s.k.charts()[0].evaluate(&[u]).unwrap();
                let y = s.l.charts()[0].evaluate(&[v]).unwrap();
                let a = angle_integrand(3, 1, &x, &y, false);
                let b = angle_integrand(3, 1, &x, &y, true);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn split_circles_are_unlinked() {
        let s = builtin_scene("r3_split_unlink", &[]).unwrap();
        let r = linking_euclidean(&s.k, &s.l, &fast()).unwrap();
        assert!(r.value.abs() < 1e-8);
    }

    #[test]
    fn multiplicity_doubles() {
        let s = builtin_scene("r3_hopf_circles", &[]).unwrap();
        let a = linking_euclidean(&s.k, &s.l, &fast()).unwrap();
        let b = linking_euclidean(&s.k.clone().with_multiplicity(2), &s.l, &fast()).unwrap();
        assert!((b.value - 2.0 * a.value).abs() < 1e-12);
        assert_eq!(a.snapped.abs(), 1);
    }

    #[test]
    fn touching_circles_fail_with_location() {
        let k = round_sphere("K", 1, &[0, 1], 3, &[0.0; 3], 1.0).unwrap();
        let l = round_sphere("L", 1, &[0, 2], 3, &[2.0, 0.0, 0.0], 1.0).unwrap();
        let e = linking_euclidean(&k, &l, &fast()).unwrap_err();
        assert!(e.is_near_singular(), "{e}");
        match e {
            LinkError::Integration(IntegrationError::NearSingular { s, t, .. }) => {
                assert!(s[0].cos() > 0.999);
                assert!(t[0].cos() < -0.999);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn touching_off_grid_is_found() {
        let k = round_sphere("K", 1, &[0, 1], 3, &[0.0; 3], 1.0).unwrap();
        let (s, c) = 0.3f64.sin_cos();
        // rotated so that it touches K at angle 0.3, between grid points
        let rot = [vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]];
        let l = round_sphere("L", 1, &[0, 2], 3, &[2.0, 0.0, 0.0], 1.0)
            .unwrap()
            .transformed(&rot, &[0.0; 3]);
        let sep = closest_approach(&k, &l, Metric::Distance);
        assert!(sep.metric < 1e-9, "{}", sep.metric);
        assert!((sep.s[0] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = builtin_scene("great_spheres", &[1.0, 2.0]).unwrap();
        let e = linking_euclidean(&s.k, &s.l, &fast()).unwrap_err();
        assert!(matches!(e, LinkError::Manifold(ManifoldError::DimensionMismatch(_))), "{e}");
    }

    #[test]
    fn off_sphere_points_are_rejected() {
        let k = round_sphere("K", 1, &[0, 1], 4, &[0.0; 4], 1.0).unwrap();
        let l = round_sphere("L", 1, &[2, 3], 4, &[0.0; 4], 1.1).unwrap();
        assert!(matches!(linking_sphere(&k, &l, &fast()), Err(LinkError::InvalidScene(_))));
    }

    #[test]
    fn point_pairs_on_a_circle_use_the_signed_count() {
        let pt = |name: &str, a: f64, o: i32| {
            let p = vec![a.cos(), a.sin()];
            Chart::new(name, 2, vec![], move |_| p.clone()).with_orientation(o)
        };
        let k = ParamSubmanifold::new(vec![pt("k+", 0.0, 1), pt("k-", PI, -1)]).unwrap();
        let l = ParamSubmanifold::new(vec![pt("l+", PI / 2.0, 1), pt("l-", 3.0 * PI / 2.0, -1)]).unwrap();
        let scene = Scene {
            name: "points".into(),
            k,
            l,
            ambient: AmbientSpace::Sphere { n: 1 },
            k_cap: None,
            expected: None,
        };
        let (f, r) = link_scene(&scene, &fast()).unwrap();
        assert_eq!(f, Formula::SignedCount);
        assert_eq!(r.snapped.abs(), 1);
        assert!(linking_sphere(&scene.k, &scene.l, &fast()).is_err());
    }
}
