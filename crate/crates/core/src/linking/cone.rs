//! Truncated cones `CK_R`: the cone `{tau x : x in K, 0 <= tau <= R}`
//! closed off by the scaled cap `R * Kbar`.
//!
//! Linking `CK_R` with `L` in `R^{n+1}` by the Euclidean integral tends to
//! the linking number of `K` and `L` in `M` as `R` grows.

use super::{linking_euclidean, LinkError};
use crate::integrator::{IntegralResult, QuadratureSpec};
use crate::linalg;
use crate::manifold::{Cap, Chart, FaceEnd, Interval, ParamSubmanifold};

/// Sampled distance allowed between the cap face and `K`.
pub const CAP_MATCH_TOL: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct ConeTruncation {
    pub radius: f64,
    /// `(tau, s) -> tau x(s)` on `[0, R] x dom(K)`.
    pub trunk: ParamSubmanifold,
    /// `R * Kbar`, oriented so that `trunk + cap` is a cycle.
    pub cap: ParamSubmanifold,
}

/// Trunk and cap contributions and their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeLinking {
    pub radius: f64,
    pub trunk: IntegralResult,
    pub cap: IntegralResult,
    pub total: IntegralResult,
}

/// Builds `CK_R` from `K` and a chain bounding it.
///
/// Chart `i` of the cap must reproduce chart `i` of `K` on its face; this
/// is checked on a grid to [`CAP_MATCH_TOL`].
pub fn cone_truncate(k: &ParamSubmanifold, cap: &Cap, radius: f64) -> Result<ConeTruncation, LinkError> {
    if radius.is_nan() || radius <= 1.0 || !radius.is_finite() {
        return Err(LinkError::InvalidScene(format!("cone radius must exceed 1, got {radius}")));
    }
    let chain = &cap.chain;
    if chain.dim() != k.dim() + 1 || chain.ambient_dim() != k.ambient_dim() {
        return Err(LinkError::CapMismatch(format!(
            "cap is {}-dimensional in R^{}, K is {}-dimensional in R^{}",
            chain.dim(),
            chain.ambient_dim(),
            k.dim(),
            k.ambient_dim()
        )));
    }
    if chain.charts().len() != k.charts().len() {
        return Err(LinkError::CapMismatch(format!(
            "cap has {} charts, K has {}",
            chain.charts().len(),
            k.charts().len()
        )));
    }
    let e = match cap.face {
        FaceEnd::Max => 1,
        FaceEnd::Min => -1,
    };
    let mut trunk = Vec::with_capacity(k.charts().len());
    let mut caps = Vec::with_capacity(k.charts().len());
    for (kc, cc) in k.charts().iter().zip(chain.charts()) {
        let face_axis = &cc.domain()[0];
        if face_axis.is_infinite() {
            return Err(LinkError::CapMismatch(format!("cap chart '{}' has an infinite face axis", cc.name())));
        }
        let face = match cap.face {
            FaceEnd::Max => face_axis.bounds().1,
            FaceEnd::Min => face_axis.bounds().0,
        };
        check_face(kc, cc, face)?;
        trunk.push(trunk_chart(kc, radius));
        let scale: Vec<Vec<f64>> = (0..k.ambient_dim())
            .map(|i| (0..k.ambient_dim()).map(|j| if i == j { radius } else { 0.0 }).collect())
            .collect();
        caps.push(
            cc.transformed(&scale, &vec![0.0; k.ambient_dim()])
                .with_name(format!("cap:{}", cc.name()))
                .with_orientation(-e * kc.orientation()),
        );
    }
    Ok(ConeTruncation {
        radius,
        trunk: ParamSubmanifold::new(trunk)?.with_multiplicity(k.multiplicity()),
        cap: ParamSubmanifold::new(caps)?.with_multiplicity(k.multiplicity()),
    })
}

fn trunk_chart(kc: &Chart, radius: f64) -> Chart {
    let mut domain = vec![Interval::Finite(0.0, radius)];
    domain.extend(kc.domain().iter().cloned());
    let (k1, k2) = (kc.clone(), kc.clone());
    Chart::new(format!("cone:{}", kc.name()), kc.ambient_dim(), domain, move |q| {
        linalg::scale(&k1.position_raw(&q[1..]), q[0])
    })
    .with_jacobian(move |q| {
        let sample = k2.evaluate_raw(&q[1..]);
        let mut rows = vec![sample.position];
        rows.extend(sample.frame.iter().map(|r| linalg::scale(r, q[0])));
        rows
    })
    .with_orientation(kc.orientation())
}

fn check_face(kc: &Chart, cc: &Chart, face: f64) -> Result<(), LinkError> {
    let axes: Vec<Vec<f64>> = kc
        .domain()
        .iter()
        .map(|iv| {
            let (a, b) = iv.bounds();
            (0..9).map(|i| a + (b - a) * (i as f64 + 0.5) / 9.0).collect()
        })
        .collect();
    for u in crate::manifold::tensor_points(&axes) {
        let s = kc.to_native(&u);
        let mut q = vec![face];
        q.extend(cc.to_native(&u));
        let d = linalg::distance(&kc.position_raw(&s), &cc.position_raw(&q));
        if d > CAP_MATCH_TOL {
            return Err(LinkError::CapMismatch(format!(
                "face of '{}' is {d:.3e} away from '{}' at {s:?}",
                cc.name(),
                kc.name()
            )));
        }
    }
    Ok(())
}

/// Euclidean linking integral of `CK_R` with `L`, split into trunk and cap.
pub fn cone_truncated_linking(c: &ConeTruncation, l: &ParamSubmanifold, spec: &QuadratureSpec) -> Result<ConeLinking, LinkError> {
    let trunk = linking_euclidean(&c.trunk, l, spec)?;
    let cap = linking_euclidean(&c.cap, l, spec)?;
    let total = trunk.plus(&cap);
    Ok(ConeLinking {
        radius: c.radius,
        trunk,
        cap,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{builtin_scene, hemisphere_cap, round_sphere};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_order(24)
    }

    #[test]
    fn trunk_and_cap_share_the_rim() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let c = cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), 2.0).unwrap();
        let rim = c.trunk.charts()[0].position_raw(&[2.0, 0.7]);
        let cap_rim = c.cap.charts()[0].position_raw(&[std::f64::consts::FRAC_PI_2, 0.7]);
        assert!(linalg::distance(&rim, &cap_rim) < 1e-14);
        assert!((linalg::norm(&rim) - 2.0).abs() < 1e-14);
        assert!(cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), 1.0 + 1e-9).is_ok());
        assert!(cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), 1.0).is_err());
    }

    #[test]
    fn wrong_cap_is_rejected() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let cap = hemisphere_cap(1, &[0, 2], 1, 4, false).unwrap();
        assert!(matches!(cone_truncate(&s.k, &cap, 2.0), Err(LinkError::CapMismatch(_))));
    }

    #[test]
    fn cone_over_hopf_approaches_one() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let c = cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), 20.0).unwrap();
        let r = cone_truncated_linking(&c, &s.l, &spec()).unwrap();
        assert!((r.total.value - 1.0).abs() < 0.1, "{}", r.total.value);
        assert!(r.cap.value.abs() < 0.05);
    }

    #[test]
    fn lower_cap_gives_the_same_total() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let upper = cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), 8.0).unwrap();
        let lower = cone_truncate(&s.k, &hemisphere_cap(1, &[0, 1], 2, 4, true).unwrap(), 8.0).unwrap();
        let a = cone_truncated_linking(&upper, &s.l, &spec()).unwrap();
        let b = cone_truncated_linking(&lower, &s.l, &spec()).unwrap();
        assert!((a.total.value - b.total.value).abs() < 1e-6, "{} {}", a.total.value, b.total.value);
    }

    #[test]
    fn far_circle_is_unlinked_for_every_radius() {
        let s = builtin_scene("hopf_great_circles", &[]).unwrap();
        let a = 0.2f64;
        // small circle near e_3, away from both K and its cone
        let l = round_sphere("L", 1, &[1, 2], 4, &[0.0, 0.0, 0.0, (1.0 - a * a).sqrt()], a).unwrap();
        for r in [2.0, 8.0] {
            let c = cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), r).unwrap();
            let v = cone_truncated_linking(&c, &l, &spec()).unwrap();
            assert!(v.total.value.abs() < 1e-3, "R={r}: {}", v.total.value);
        }
    }
}
