//! Scalar ingredients of the linking integrands: sphere volumes, the angle
//! between position vectors, the kernel `Omega_{k,l}` and the determinant
//! brackets `[x - y, dx, dy]` and `[x, dx, y, dy]`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use thiserror::Error;

use crate::integrator::gauss::{self, GaussLegendre};
use crate::linalg;

/// Gauss–Legendre order used for `Omega` unless a caller asks otherwise.
pub const DEFAULT_OMEGA_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("zero-length vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("near-singular configuration: angle {alpha:e} below 1e-6")]
    NearSingular { alpha: f64 },
}

/// Volume of the unit `n`-sphere, `2 pi^{(n+1)/2} / Gamma((n+1)/2)`.
///
/// Evaluated through `vol S^n = 2 pi / (n - 1) * vol S^{n-2}`.
pub fn sphere_volume(n: usize) -> f64 {
    let (mut v, start) = if n.is_multiple_of(2) { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut m = start;
    while m < n {
        m += 2;
        v *= 2.0 * PI / (m as f64 - 1.0);
    }
    v
}

/// Angle in `[0, pi]` between two nonzero vectors.
///
/// Computed as `2 atan2(|x^ - y^|, |x^ + y^|)`, which agrees with the
/// clamped `acos` of the normalized inner product and keeps full relative
/// precision near `0` and `pi`.
pub fn angle(x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
    if x.len() != y.len() {
        return Err(KernelError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let (nx, ny) = (linalg::norm(x), linalg::norm(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(KernelError::ZeroVector);
    }
    let (mut d2, mut s2) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (u, v) = (a / nx, b / ny);
        d2 += (u - v) * (u - v);
        s2 += (u + v) * (u + v);
    }
    Ok(2.0 * d2.sqrt().atan2(s2.sqrt()))
}

/// `Omega_{1,1}(alpha) = ((pi - alpha) cos alpha + sin alpha) / 2`.
pub fn omega_11_closed(alpha: f64) -> f64 {
    0.5 * ((PI - alpha) * alpha.cos() + alpha.sin())
}

/// `Omega_{k,l}(alpha) = int_alpha^pi sin^k(theta - alpha) sin^l(theta) dtheta`
/// by a fixed Gauss–Legendre rule.
#[derive(Clone, Debug)]
pub struct Omega {
    k: i32,
    l: i32,
    rule: Arc<GaussLegendre>,
}

impl Omega {
    pub fn new(k: usize, l: usize, order: usize) -> Self {
        Omega {
            k: k as i32,
            l: l as i32,
            rule: gauss::rule(order.max(1)),
        }
    }

    /// Quadrature value, no closed-form shortcut.
    pub fn quadrature(&self, alpha: f64) -> f64 {
        let alpha = alpha.clamp(0.0, PI);
        if alpha >= PI {
            return 0.0;
        }
        let (sa, ca) = alpha.sin_cos();
        let (mid, half) = (0.5 * (alpha + PI), 0.5 * (PI - alpha));
        let mut acc = 0.0;
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let (st, ct) = (mid + half * x).sin_cos();
            let shifted = st * ca - ct * sa;
            acc += w * shifted.powi(self.k) * st.powi(self.l);
        }
        half * acc
    }

    /// Value, using the closed form when `k = l = 1`.
    pub fn eval(&self, alpha: f64) -> f64 {
        if self.k == 1 && self.l == 1 {
            let v = omega_11_closed(alpha.clamp(0.0, PI));
            debug_assert!((v - self.quadrature(alpha)).abs() < 1e-9);
            v
        } else {
            self.quadrature(alpha)
        }
    }
}

/// `Omega_{k,l}(alpha)` with a Gauss–Legendre rule of the given order.
pub fn omega(k: usize, l: usize, alpha: f64, quad_order: usize) -> f64 {
    Omega::new(k, l, quad_order).eval(alpha)
}

/// `det(x - y, dx/ds_1, ..., dx/ds_k, dy/dt_1, ..., dy/dt_l)`.
pub fn det_form_euclidean(x: &[f64], y: &[f64], frame_k: &[Vec<f64>], frame_l: &[Vec<f64>]) -> Result<f64, KernelError> {
    let n = x.len();
    check_square(n, y.len(), frame_k, frame_l, 1)?;
    let diff = linalg::sub(x, y);
    let rows = std::iter::once(diff.as_slice())
        .chain(frame_k.iter().map(|r| r.as_slice()))
        .chain(frame_l.iter().map(|r| r.as_slice()));
    linalg::det_rows(n, rows).ok_or(KernelError::DimensionMismatch { expected: n, found: 0 })
}

/// `det(x, dx/ds_1, ..., dx/ds_k, y, dy/dt_1, ..., dy/dt_l)`.
pub fn det_form_cone(x: &[f64], frame_k: &[Vec<f64>], y: &[f64], frame_l: &[Vec<f64>]) -> Result<f64, KernelError> {
    let n = x.len();
    check_square(n, y.len(), frame_k, frame_l, 2)?;
    let rows = std::iter::once(x)
        .chain(frame_k.iter().map(|r| r.as_slice()))
        .chain(std::iter::once(y))
        .chain(frame_l.iter().map(|r| r.as_slice()));
    linalg::det_rows(n, rows).ok_or(KernelError::DimensionMismatch { expected: n, found: 0 })
}

fn check_square(n: usize, ny: usize, fk: &[Vec<f64>], fl: &[Vec<f64>], extra: usize) -> Result<(), KernelError> {
    if ny != n {
        return Err(KernelError::DimensionMismatch { expected: n, found: ny });
    }
    let rows = fk.len() + fl.len() + extra;
    if rows != n {
        return Err(KernelError::DimensionMismatch { expected: n, found: rows });
    }
    if let Some(bad) = fk.iter().chain(fl).find(|r| r.len() != n) {
        return Err(KernelError::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    if n > linalg::MAX_DIM {
        return Err(KernelError::DimensionMismatch {
            expected: linalg::MAX_DIM,
            found: n,
        });
    }
    Ok(())
}

/// Both sides of the ray integral identity
///
/// `int_0^inf tau^k / |tau x - y|^{n+1} dtau
///     = Omega_{k,l}(alpha) / (|x|^{k+1} |y|^{l+1} sin^n alpha)`
///
/// for `x, y` in `R^{n+1}`, `k + l = n - 1`. The left side is integrated
/// adaptively after `tau = (|y|/|x|) tan u`; the right side uses [`Omega`].
pub fn ray_reduction_check(x: &[f64], y: &[f64], k: usize, l: usize) -> Result<(f64, f64), KernelError> {
    let dim = k + l + 2;
    if x.len() != dim || y.len() != dim {
        return Err(KernelError::DimensionMismatch {
            expected: dim,
            found: x.len().max(y.len()),
        });
    }
    let alpha = angle(x, y)?;
    if alpha < 1e-6 {
        return Err(KernelError::NearSingular { alpha });
    }
    let n = dim - 1;
    let (nx, ny) = (linalg::norm(x), linalg::norm(y));

    let rhs = Omega::new(k, l, DEFAULT_OMEGA_ORDER).eval(alpha)
        / (nx.powi(k as i32 + 1) * ny.powi(l as i32 + 1) * alpha.sin().powi(n as i32));

    let c = ny / nx;
    let integrand = |u: f64| {
        let tau = c * u.tan();
        let sec2 = 1.0 / (u.cos() * u.cos());
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (tau * a - b).powi(2)).sum();
        tau.powi(k as i32) * c * sec2 / r2.powf(0.5 * (n as f64 + 1.0))
    };
    let rough = gauss::rule(64).integrate(0.0, FRAC_PI_2, integrand).abs();
    let (lhs, _) = gauss::adaptive_1d(integrand, 0.0, FRAC_PI_2, 1e-14 * rough.max(f64::MIN_POSITIVE), 40);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_volumes() {
        assert_relative_eq!(sphere_volume(0), 2.0);
        assert_relative_eq!(sphere_volume(1), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(3), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(5), PI.powi(3), max_relative = 1e-15);
    }

    #[test]
    fn sphere_volume_matches_gamma_formula() {
        for n in 0..20 {
            let h = 0.5 * (n as f64 + 1.0);
            let v = 2.0 * PI.powf(h) / statrs::function::gamma::gamma(h);
            assert_relative_eq!(sphere_volume(n), v, max_relative = 1e-13);
        }
    }

    #[test]
    fn angles() {
        assert_relative_eq!(angle(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), FRAC_PI_2);
        assert_relative_eq!(angle(&[2.0, 0.0, 0.0, 0.0], &[-3.0, 0.0, 0.0, 0.0]).unwrap(), PI);
        assert_relative_eq!(angle(&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), PI / 4.0, max_relative = 1e-15);
        assert_eq!(angle(&[0.0, 0.0], &[1.0, 0.0]), Err(KernelError::ZeroVector));
    }

    #[test]
    fn angle_agrees_with_clamped_acos() {
        let pairs = [([0.3, -1.2, 2.0], [1.0, 0.5, -0.1]), ([1.0, 2.0, 3.0], [-1.0, 0.2, 0.4])];
        for (x, y) in pairs {
            let c = linalg::dot(&x, &y) / (linalg::norm(&x) * linalg::norm(&y));
            assert!((angle(&x, &y).unwrap() - c.clamp(-1.0, 1.0).acos()).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_values() {
        assert_relative_eq!(omega(1, 1, FRAC_PI_2, 64), 0.5, max_relative = 1e-15);
        assert_eq!(omega(2, 3, PI, 64), 0.0);
        for a in [0.0, 0.4, 2.0, 3.0] {
            assert_relative_eq!(omega(0, 0, a, 64), PI - a, max_relative = 1e-14);
        }
    }

    #[test]
    fn omega_at_right_angle_is_volume_ratio() {
        for k in 0..=5 {
            for l in 0..=5 {
                let want = sphere_volume(k + l + 1) / (sphere_volume(k) * sphere_volume(l));
                assert_relative_eq!(omega(k, l, FRAC_PI_2, 64), want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn omega_positive_before_pi() {
        for k in 0..4 {
            for l in 0..4 {
                for a in [0.0, 1.0, 3.0, PI - 1e-3] {
                    assert!(omega(k, l, a, 64) > 0.0);
                }
            }
        }
    }

    #[test]
    fn euclidean_bracket() {
        let fk = vec![vec![0.0, 1.0, 0.0]];
        let fl = vec![vec![0.0, 0.0, 1.0]];
        assert_eq!(det_form_euclidean(&[1.0, 0.0, 0.0], &[0.0; 3], &fk, &fl).unwrap(), 1.0);
        assert_eq!(det_form_euclidean(&[1.0, 0.0, 0.0], &[0.0; 3], &[vec![0.0; 3]], &fl).unwrap(), 0.0);
        assert!(matches!(
            det_form_euclidean(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4], &fk, &fl),
            Err(KernelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cone_bracket_from_s2xr_example() {
        for (s, t) in [(0.0, 0.0), (0.7, -3.0), (2.5, 11.0)] {
            let (ss, cs) = f64::sin_cos(s);
            let v = det_form_cone(
                &[cs, ss, 0.0, 0.0],
                &[vec![-ss, cs, 0.0, 0.0]],
                &[0.0, 0.0, 1.0, t],
                &[vec![0.0, 0.0, 0.0, 1.0]],
            )
            .unwrap();
            assert_relative_eq!(v, 1.0, max_relative = 1e-15);
        }
        let x = [1.0, 2.0, 0.0, 1.0];
        let f = vec![vec![0.0, 1.0, 0.0, 0.0]];
        assert_eq!(det_form_cone(&x, &f, &x, &f).unwrap(), 0.0);
    }

    #[test]
    fn ray_reduction_hand_instance() {
        let (lhs, rhs) = ray_reduction_check(&[2.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 1, 1).unwrap();
        assert!((lhs - 0.125).abs() < 1e-12, "lhs {lhs}");
        assert!((rhs - 0.125).abs() < 1e-12, "rhs {rhs}");
    }

    #[test]
    fn ray_reduction_rejects_colinear() {
        assert!(matches!(
            ray_reduction_check(&[1.0, 0.0, 0.0, 0.0], &[2.0, 1e-9, 0.0, 0.0], 1, 1),
            Err(KernelError::NearSingular { .. })
        ));
    }
}
