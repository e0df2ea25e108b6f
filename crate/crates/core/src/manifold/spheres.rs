//! Round spheres in hyperspherical coordinates and their hemispherical caps.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{Cap, Chart, FaceEnd, Interval, ManifoldError, ParamSubmanifold};
use crate::linalg;

/// Unit `k`-sphere point for angles `phi` (length `k`), `k + 1` coordinates.
fn unit_point(phi: &[f64]) -> Vec<f64> {
    let k = phi.len();
    let mut out = Vec::with_capacity(k + 1);
    let mut prod = 1.0;
    for p in phi {
        out.push(prod * p.cos());
        prod *= p.sin();
    }
    out.push(prod);
    out
}

/// Rows `d(unit_point)/d(phi_j)`.
fn unit_frame(phi: &[f64]) -> Vec<Vec<f64>> {
    let k = phi.len();
    let (sin, cos): (Vec<f64>, Vec<f64>) = phi.iter().map(|p| p.sin_cos()).unzip();
    (0..k)
        .map(|j| {
            (0..=k)
                .map(|i| {
                    // coordinate i is prod_{m<i} sin(phi_m) * cos(phi_i), or the
                    // full sine product when i == k
                    if i < k && j > i {
                        return 0.0;
                    }
                    let mut v = 1.0;
                    for m in 0..i.min(k) {
                        v *= if m == j { cos[m] } else { sin[m] };
                    }
                    if i < k {
                        v *= if j == i { -sin[i] } else { cos[i] };
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn angle_box(k: usize) -> Vec<Interval> {
    (0..k)
        .map(|j| {
            if j + 1 == k {
                Interval::Finite(0.0, 2.0 * PI)
            } else {
                Interval::Finite(0.0, PI)
            }
        })
        .collect()
}

fn embed(coords: &[usize], ambient_dim: usize, center: &[f64], radius: f64, local: &[f64]) -> Vec<f64> {
    let mut p = center.to_vec();
    p.resize(ambient_dim, 0.0);
    for (c, v) in coords.iter().zip(local) {
        p[*c] += radius * v;
    }
    p
}

fn embed_vec(coords: &[usize], ambient_dim: usize, radius: f64, local: &[f64]) -> Vec<f64> {
    let mut p = vec![0.0; ambient_dim];
    for (c, v) in coords.iter().zip(local) {
        p[*c] = radius * v;
    }
    p
}

fn check_coords(k: usize, coords: &[usize], ambient_dim: usize) -> Result<(), ManifoldError> {
    if coords.len() != k + 1 || coords.iter().any(|&c| c >= ambient_dim) {
        return Err(ManifoldError::InvalidParams(format!(
            "a {k}-sphere needs {} distinct coordinates below {ambient_dim}, got {coords:?}",
            k + 1
        )));
    }
    let mut sorted = coords.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != coords.len() {
        return Err(ManifoldError::InvalidParams(format!("repeated coordinates {coords:?}")));
    }
    Ok(())
}

/// Round `k`-sphere of the given center and radius spanning the ambient
/// coordinate axes `coords`, oriented as the boundary of the ball (outward
/// normal first, axes taken in the order listed).
///
/// `k = 0` yields the two signed points `center +- radius e_{coords[0]}`.
pub fn round_sphere(
    name: &str,
    k: usize,
    coords: &[usize],
    ambient_dim: usize,
    center: &[f64],
    radius: f64,
) -> Result<ParamSubmanifold, ManifoldError> {
    check_coords(k, coords, ambient_dim)?;
    if center.len() != ambient_dim {
        return Err(ManifoldError::InvalidParams("center has wrong dimension".into()));
    }
    if k == 0 {
        let charts = [1.0, -1.0]
            .into_iter()
            .map(|sign| {
                let p = embed(coords, ambient_dim, center, radius, &[sign]);
                let label = if sign > 0.0 { "+" } else { "-" };
                Chart::new(format!("{name}{label}"), ambient_dim, vec![], move |_| p.clone())
                    .with_jacobian(|_| vec![])
                    .with_orientation(sign as i32)
            })
            .collect();
        return ParamSubmanifold::new(charts);
    }
    let domain = angle_box(k);
    let mid: Vec<f64> = domain.iter().map(|iv| 0.5 * (iv.bounds().0 + iv.bounds().1) + 0.1).collect();
    let u = unit_point(&mid);
    let fr = unit_frame(&mid);
    let det = linalg::det_rows(k + 1, std::iter::once(u.as_slice()).chain(fr.iter().map(|r| r.as_slice())))
        .expect("square by construction");
    let orientation = if det > 0.0 { 1 } else { -1 };

    let (c1, c2) = (coords.to_vec(), coords.to_vec());
    let center = center.to_vec();
    let chart = Chart::new(name, ambient_dim, domain, move |phi| {
        embed(&c1, ambient_dim, &center, radius, &unit_point(phi))
    })
    .with_jacobian(move |phi| {
        unit_frame(phi)
            .iter()
            .map(|row| embed_vec(&c2, ambient_dim, radius, row))
            .collect()
    })
    .with_orientation(orientation);
    ParamSubmanifold::new(vec![chart])
}

/// Hemisphere of the unit `(k+1)`-sphere in the axes `coords + [pole]`
/// bounded by the unit `k`-sphere in `coords`.
///
/// Chart coordinates are `(rho, phi)` with `rho in [0, pi/2]` the polar
/// angle from `+e_pole` (or `-e_pole` when `lower`); the face `rho = pi/2`
/// is the `k`-sphere in the same `phi` as [`round_sphere`].
pub fn hemisphere_cap(
    k: usize,
    coords: &[usize],
    pole: usize,
    ambient_dim: usize,
    lower: bool,
) -> Result<Cap, ManifoldError> {
    check_coords(k, coords, ambient_dim)?;
    if pole >= ambient_dim || coords.contains(&pole) {
        return Err(ManifoldError::InvalidParams(format!("bad pole axis {pole}")));
    }
    let h = if lower { -1.0 } else { 1.0 };
    let make = |name: String, sign: Option<f64>| {
        let (c1, c2) = (coords.to_vec(), coords.to_vec());
        let mut domain = vec![Interval::Finite(0.0, FRAC_PI_2)];
        if sign.is_none() {
            domain.extend(angle_box(k));
        }
        let local = move |phi: &[f64]| match sign {
            Some(s) => vec![s],
            None => unit_point(phi),
        };
        let local_frame = move |phi: &[f64]| match sign {
            Some(_) => vec![],
            None => unit_frame(phi),
        };
        let local2 = local;
        Chart::new(name, ambient_dim, domain, move |q| {
            let (sr, cr) = q[0].sin_cos();
            let mut p = embed_vec(&c1, ambient_dim, sr, &local(&q[1..]));
            p[pole] = h * cr;
            p
        })
        .with_jacobian(move |q| {
            let (sr, cr) = q[0].sin_cos();
            let u = local2(&q[1..]);
            let mut d_rho = embed_vec(&c2, ambient_dim, cr, &u);
            d_rho[pole] = -h * sr;
            let mut rows = vec![d_rho];
            rows.extend(local_frame(&q[1..]).iter().map(|r| embed_vec(&c2, ambient_dim, sr, r)));
            rows
        })
    };
    let charts = if k == 0 {
        vec![make("cap+".into(), Some(1.0)), make("cap-".into(), Some(-1.0))]
    } else {
        vec![make("cap".into(), None)]
    };
    Ok(Cap {
        chain: ParamSubmanifold::new(charts)?,
        face: FaceEnd::Max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn analytic_frame_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=4 {
            let s = round_sphere("s", k, &(0..=k).collect::<Vec<_>>(), k + 1, &vec![0.0; k + 1], 1.0).unwrap();
            let c = &s.charts()[0];
            for _ in 0..10 {
                let phi: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..2.8)).collect();
                let a = c.evaluate_raw(&phi).frame;
                let b = c.fd_frame(&phi);
                for (ra, rb) in a.iter().zip(&b) {
                    for (x, y) in ra.iter().zip(rb) {
                        assert!((x - y).abs() < 1e-9);
                    }
                }
                let p = c.position_raw(&phi);
                assert!((linalg::norm(&p) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn outward_orientation_everywhere() {
        for k in 1..=3 {
            let s = round_sphere("s", k, &(0..=k).collect::<Vec<_>>(), k + 1, &vec![0.0; k + 1], 1.0).unwrap();
            let c = &s.charts()[0];
            for t in [0.3, 1.1, 2.0] {
                let phi = vec![t; k];
                let smp = c.evaluate_raw(&phi);
                let d = linalg::det_rows(
                    k + 1,
                    std::iter::once(smp.position.as_slice()).chain(smp.frame.iter().map(|r| r.as_slice())),
                )
                .unwrap();
                assert!(d * c.orientation() as f64 > 0.0, "k={k}");
            }
        }
    }

    #[test]
    fn zero_sphere_is_signed_pair() {
        let s = round_sphere("p", 0, &[1], 3, &[0.0, 0.0, 0.0], 1.0).unwrap();
        let charts = s.charts();
        assert_eq!(charts.len(), 2);
        assert_eq!(charts[0].position_raw(&[]), vec![0.0, 1.0, 0.0]);
        assert_eq!(charts[0].orientation(), 1);
        assert_eq!(charts[1].position_raw(&[]), vec![0.0, -1.0, 0.0]);
        assert_eq!(charts[1].orientation(), -1);
    }

    #[test]
    fn cap_face_reproduces_sphere() {
        let k = 2;
        let s = round_sphere("s", k, &[0, 1, 2], 5, &[0.0; 5], 1.0).unwrap();
        let cap = hemisphere_cap(k, &[0, 1, 2], 4, 5, false).unwrap();
        let c = &cap.chain.charts()[0];
        assert_eq!(cap.chain.dim(), 3);
        for phi in [[0.4, 1.0], [2.0, 5.0]] {
            let a = s.charts()[0].position_raw(&phi);
            let b = c.position_raw(&[FRAC_PI_2, phi[0], phi[1]]);
            assert!(linalg::distance(&a, &b) < 1e-15);
            let q = [0.7, phi[0], phi[1]];
            let fa = c.evaluate_raw(&q).frame;
            let fb = c.fd_frame(&q);
            for (ra, rb) in fa.iter().zip(&fb) {
                assert!(linalg::distance(ra, rb) < 1e-9);
            }
        }
    }
}
