//! Exact combinatorial linking numbers: crossing counts of polygonal links
//! in `R^3` and signed point counts on a curve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg;
use crate::manifold::ParamSubmanifold;

/// Relative tolerance for parallel projected segments and vertex hits.
pub const GENERIC_TOL: f64 = 1e-9;
/// Closest approach of the two polygons below which sampling is refused.
pub const RESOLUTION_TOL: f64 = 1e-6;
pub const MAX_DIRECTION_RETRIES: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("projection direction is not generic: {0}")]
    NonGeneric(String),
    #[error("no generic direction found in {0} attempts")]
    NoGenericDirection(usize),
    #[error("components intersect near {0:?}")]
    Intersecting([f64; 3]),
    #[error("components come within {distance:.3e} at {segments} segments; sample more finely")]
    Resolution { distance: f64, segments: usize },
    #[error("not a closed curve in R^3: {0}")]
    NotACurve(String),
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
}

/// Two closed polygons in `R^3`, oriented by vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyLink {
    pub comp_k: Vec<[f64; 3]>,
    pub comp_l: Vec<[f64; 3]>,
    /// Product of the component multiplicities.
    pub weight: i64,
}

impl PolyLink {
    pub fn new(comp_k: Vec<[f64; 3]>, comp_l: Vec<[f64; 3]>) -> Self {
        PolyLink { comp_k, comp_l, weight: 1 }
    }

    fn segments(poly: &[[f64; 3]]) -> impl Iterator<Item = ([f64; 3], [f64; 3])> + '_ {
        (0..poly.len()).map(move |i| (poly[i], poly[(i + 1) % poly.len()]))
    }

    /// Smallest distance between a segment of `K` and a segment of `L`.
    pub fn min_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (a0, a1) in Self::segments(&self.comp_k) {
            for (b0, b1) in Self::segments(&self.comp_l) {
                m = m.min(segment_distance(&a0, &a1, &b0, &b1));
            }
        }
        m
    }

    pub fn reversed_l(&self) -> PolyLink {
        let mut l = self.comp_l.clone();
        l.reverse();
        PolyLink {
            comp_l: l,
            ..self.clone()
        }
    }
}

fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_distance(p0: &[f64; 3], p1: &[f64; 3], q0: &[f64; 3], q1: &[f64; 3]) -> f64 {
    let d1 = sub3(p1, p0);
    let d2 = sub3(q1, q0);
    let r = sub3(p0, q0);
    let a = linalg::dot(&d1, &d1);
    let e = linalg::dot(&d2, &d2);
    let f = linalg::dot(&d2, &r);
    let c = linalg::dot(&d1, &r);
    let b = linalg::dot(&d1, &d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    let pa: Vec<f64> = (0..3).map(|i| p0[i] + s * d1[i]).collect();
    let pb: Vec<f64> = (0..3).map(|i| q0[i] + t * d2[i]).collect();
    linalg::distance(&pa, &pb)
}

/// Signed count of crossings where `K` passes over `L` when viewed from
/// `+direction`, times the link weight.
///
/// A crossing counts `+1` when `(over tangent, under tangent, direction)`
/// is a right-handed frame.
pub fn crossing_count_linking(link: &PolyLink, direction: &[f64; 3]) -> Result<i64, OracleError> {
    let dn = linalg::norm(direction);
    if dn.is_nan() || dn <= 0.0 {
        return Err(OracleError::NonGeneric("zero direction".into()));
    }
    let d = [direction[0] / dn, direction[1] / dn, direction[2] / dn];
    let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let h = linalg::dot(&helper, &d);
        let v: Vec<f64> = (0..3).map(|i| helper[i] - h * d[i]).collect();
        linalg::scale(&v, 1.0 / linalg::norm(&v))
    };
    let e2 = linalg::cross3(&d, &e1);
    let proj = |p: &[f64; 3]| [linalg::dot(p, &e1), linalg::dot(p, &e2), linalg::dot(p, &d)];

    let kp: Vec<[f64; 3]> = link.comp_k.iter().map(proj).collect();
    let lp: Vec<[f64; 3]> = link.comp_l.iter().map(proj).collect();
    let mut total = 0i64;
    for (ia, (a0, a1)) in PolyLink::segments(&kp).enumerate() {
        for (b0, b1) in PolyLink::segments(&lp) {
            let da = [a1[0] - a0[0], a1[1] - a0[1]];
            let db = [b1[0] - b0[0], b1[1] - b0[1]];
            let w = [b0[0] - a0[0], b0[1] - a0[1]];
            let la = da[0].hypot(da[1]);
            let lb = db[0].hypot(db[1]);
            if la == 0.0 || lb == 0.0 {
                return Err(OracleError::NonGeneric(format!("segment {ia} projects to a point")));
            }
            let denom = da[0] * db[1] - da[1] * db[0];
            if denom.abs() <= GENERIC_TOL * la * lb {
                // parallel: only a problem when the projections overlap
                let off = (w[0] * da[1] - w[1] * da[0]).abs() / la;
                if off <= GENERIC_TOL * la.max(lb) {
                    let t0 = (w[0] * da[0] + w[1] * da[1]) / (la * la);
                    let t1 = t0 + (db[0] * da[0] + db[1] * da[1]) / (la * la);
                    if t0.max(t1) >= 0.0 && t0.min(t1) <= 1.0 {
                        return Err(OracleError::NonGeneric("overlapping parallel projections".into()));
                    }
                }
                continue;
            }
            let sa = (w[0] * db[1] - w[1] * db[0]) / denom;
            let sb = (w[0] * da[1] - w[1] * da[0]) / denom;
            let eps = GENERIC_TOL;
            let outside = |s: f64| s < -eps || s > 1.0 + eps;
            if outside(sa) || outside(sb) {
                continue;
            }
            let near_end = |s: f64| s.abs() <= eps || (1.0 - s).abs() <= eps;
            if near_end(sa) || near_end(sb) {
                return Err(OracleError::NonGeneric("projected crossing at a vertex".into()));
            }
            let ha = a0[2] + sa * (a1[2] - a0[2]);
            let hb = b0[2] + sb * (b1[2] - b0[2]);
            let scale = 1.0 + ha.abs().max(hb.abs());
            if (ha - hb).abs() <= 1e-12 * scale {
                let p: Vec<f64> = (0..3)
                    .map(|i| {
                        let (p0, p1) = (link.comp_k[ia][i], link.comp_k[(ia + 1) % link.comp_k.len()][i]);
                        p0 + sa * (p1 - p0)
                    })
                    .collect();
                return Err(OracleError::Intersecting([p[0], p[1], p[2]]));
            }
            if ha > hb {
                // in projected coordinates d is the third axis
                let cross = da[0] * db[1] - da[1] * db[0];
                total += if cross > 0.0 { 1 } else { -1 };
            }
        }
    }
    Ok(total * link.weight)
}

/// Seeded pseudo-random unit vector.
fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = linalg::norm(&v);
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Crossing count along seeded random directions, retrying while the
/// direction is not generic. Returns the value and the direction used.
pub fn oracle_linking(link: &PolyLink, seed: u64) -> Result<(i64, [f64; 3]), OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DIRECTION_RETRIES {
        let d = random_direction(&mut rng);
        match crossing_count_linking(link, &d) {
            Ok(v) => return Ok((v, d)),
            Err(OracleError::NonGeneric(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(OracleError::NoGenericDirection(MAX_DIRECTION_RETRIES))
}

fn sample_curve(m: &ParamSubmanifold, segments: usize, what: &str) -> Result<Vec<[f64; 3]>, OracleError> {
    if m.dim() != 1 || m.ambient_dim() != 3 {
        return Err(OracleError::NotACurve(format!(
            "{what} is {}-dimensional in R^{}",
            m.dim(),
            m.ambient_dim()
        )));
    }
    let o = m.charts()[0].orientation();
    if m.charts().iter().any(|c| c.orientation() != o) {
        return Err(OracleError::NotACurve(format!("{what} mixes chart orientations")));
    }
    let per_chart = (segments / m.charts().len()).max(1);
    let mut pts = Vec::new();
    for c in m.charts() {
        let iv = &c.domain()[0];
        if iv.is_infinite() {
            return Err(OracleError::NotACurve(format!("{what} chart '{}' is unbounded", c.name())));
        }
        let (a, b) = iv.bounds();
        for i in 0..per_chart {
            let p = c.position_raw(&[a + (b - a) * i as f64 / per_chart as f64]);
            pts.push([p[0], p[1], p[2]]);
        }
    }
    if o < 0 {
        pts.reverse();
    }
    Ok(pts)
}

/// Closed polygons through uniformly spaced parameter samples of two curves.
///
/// Multi-chart curves are assumed to list their charts head to tail.
pub fn sample_to_polylink(k: &ParamSubmanifold, l: &ParamSubmanifold, segments: usize) -> Result<PolyLink, OracleError> {
    if segments < 3 {
        return Err(OracleError::NotACurve(format!("need at least 3 segments, got {segments}")));
    }
    let link = PolyLink {
        comp_k: sample_curve(k, segments, "K")?,
        comp_l: sample_curve(l, segments, "L")?,
        weight: k.multiplicity() * l.multiplicity(),
    };
    let distance = link.min_distance();
    if distance < RESOLUTION_TOL {
        return Err(OracleError::Resolution { distance, segments });
    }
    Ok(link)
}

/// Linking number of signed point pairs on a curve around the origin of
/// `R^2` (a circle, or any curve meeting each ray from the origin once).
///
/// Counts `K` against the arcs bounded by `L`, ordered counterclockwise.
pub fn signed_count_n1(k: &[(Vec<f64>, i64)], l: &[(Vec<f64>, i64)]) -> Result<i64, OracleError> {
    for (pts, what) in [(k, "K"), (l, "L")] {
        if pts.iter().map(|p| p.1).sum::<i64>() != 0 {
            return Err(OracleError::InvalidCycle(format!("signs of {what} do not sum to zero")));
        }
        if let Some(p) = pts.iter().find(|p| p.0.len() != 2) {
            return Err(OracleError::InvalidCycle(format!("point {:?} of {what} is not in R^2", p.0)));
        }
    }
    let theta = |p: &[f64]| p[1].atan2(p[0]);
    let lt: Vec<(f64, i64)> = l.iter().map(|(p, s)| (theta(p), *s)).collect();
    let mut total = 0;
    for (p, s) in k {
        let a = theta(p);
        if lt.iter().any(|(b, _)| (a - b).abs() < 1e-12) {
            return Err(OracleError::InvalidCycle("K and L share a point".into()));
        }
        let w: i64 = -lt.iter().filter(|(b, _)| *b < a).map(|(_, e)| e).sum::<i64>();
        total += s * w;
    }
    Ok(total)
}
