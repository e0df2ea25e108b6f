//! Pointwise check that the Gauss map `f = (x - y) / |x - y|` pulls the
//! volume form of `S^{N-1}` back to the Euclidean integrand.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LinkError;
use crate::kernel;
use crate::linalg;
use crate::manifold::{AmbientSpace, Chart, ParamSubmanifold};

/// One sampled comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackSample {
    /// `det(f, df/ds, df/dt)` with finite-difference partials.
    pub lhs: f64,
    /// `(-1)^l |x - y|^{-N} [x - y, dx, dy]` with the chart frames.
    pub rhs: f64,
    /// `|lhs - rhs|` over `|x - y|^{1-N} prod |dx_i| prod |dy_j|`.
    pub deviation: f64,
}

fn gauss_map(kc: &Chart, lc: &Chart, s: &[f64], t: &[f64]) -> Vec<f64> {
    let v = linalg::sub(&kc.position_raw(s), &lc.position_raw(t));
    let r = linalg::norm(&v);
    linalg::scale(&v, 1.0 / r)
}

fn partial(g: impl Fn(&[f64]) -> Vec<f64>, at: &[f64], i: usize) -> Vec<f64> {
    let h = f64::EPSILON.cbrt() * at[i].abs().max(1.0);
    let mut p = at.to_vec();
    p[i] = at[i] + h;
    let fp = g(&p);
    p[i] = at[i] - h;
    let fm = g(&p);
    fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// Compares both sides at one parameter pair (native chart coordinates).
pub fn pullback_sample(kc: &Chart, lc: &Chart, s: &[f64], t: &[f64]) -> PullbackSample {
    let n = kc.ambient_dim();
    let f = gauss_map(kc, lc, s, t);
    let mut rows = vec![f];
    for i in 0..s.len() {
        rows.push(partial(|p| gauss_map(kc, lc, p, t), s, i));
    }
    for j in 0..t.len() {
        rows.push(partial(|q| gauss_map(kc, lc, s, q), t, j));
    }
    let lhs = linalg::det_rows(n, rows.iter().map(|r| r.as_slice())).unwrap_or(f64::NAN);

    let x = kc.evaluate_raw(s);
    let y = lc.evaluate_raw(t);
    let r = linalg::distance(&x.position, &y.position);
    let sign = if t.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    let det = kernel::det_form_euclidean(&x.position, &y.position, &x.frame, &y.frame).unwrap_or(f64::NAN);
    let rhs = sign * det / r.powi(n as i32);
    let bound = r.powi(1 - n as i32)
        * x.frame.iter().chain(&y.frame).map(|v| linalg::norm(v)).product::<f64>();
    PullbackSample {
        lhs,
        rhs,
        deviation: (lhs - rhs).abs() / bound,
    }
}

/// Largest deviation over `samples` seeded random points of `K x L`.
pub fn pullback_check(k: &ParamSubmanifold, l: &ParamSubmanifold, samples: usize, seed: u64) -> Result<f64, LinkError> {
    let dim = k.ambient_dim();
    AmbientSpace::Euclidean { dim }.check_dims(k.dim(), l.dim())?;
    if l.ambient_dim() != dim {
        return Err(LinkError::InvalidScene(format!("K in R^{dim}, L in R^{}", l.ambient_dim())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (ci, u) = k.random_point(&mut rng);
        let (cj, v) = l.random_point(&mut rng);
        let (kc, lc) = (&k.charts()[ci], &l.charts()[cj]);
        let p = pullback_sample(kc, lc, &kc.to_native(&u), &lc.to_native(&v));
        if p.deviation.is_nan() {
            return Err(LinkError::InvalidScene("degenerate sample in pullback check".into()));
        }
        worst = worst.max(p.deviation);
    }
    Ok(worst)
}
