//! Closed polylines read from CSV, one sample per row.

use std::io::Read;
use std::path::Path;

use super::{Chart, Interval, ManifoldError, ParamSubmanifold};
use crate::linalg;

/// Radial projection applied to every segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// Plain straight segments.
    None,
    /// Normalize the first `head` coordinates (unit sphere when `head` is the
    /// full dimension, the `S^n` factor of `S^n x R^m` otherwise).
    Head(usize),
}

/// Parses rows of `N` numbers. Blank lines and a non-numeric header row are skipped.
pub fn read_points<R: Read>(reader: R) -> Result<Vec<Vec<f64>>, ManifoldError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ManifoldError::Polyline(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row: Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        match row {
            Ok(r) => {
                if let Some(first) = pts.first() {
                    if first.len() != r.len() {
                        return Err(ManifoldError::Polyline(format!(
                            "row {} has {} columns, expected {}",
                            i + 1,
                            r.len(),
                            first.len()
                        )));
                    }
                }
                pts.push(r);
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(ManifoldError::Polyline(format!("row {}: {e}", i + 1))),
        }
    }
    Ok(pts)
}

pub fn read_points_file(path: &Path) -> Result<Vec<Vec<f64>>, ManifoldError> {
    let f = std::fs::File::open(path).map_err(|e| ManifoldError::Polyline(format!("{}: {e}", path.display())))?;
    read_points(f)
}

/// Closed polygon through `points` (last joined to first), one chart per
/// segment on `[0, 1]`.
pub fn closed_polyline(name: &str, points: &[Vec<f64>], projection: Projection) -> Result<ParamSubmanifold, ManifoldError> {
    if points.len() < 3 {
        return Err(ManifoldError::Polyline(format!("need at least 3 samples, got {}", points.len())));
    }
    let n = points[0].len();
    if n < 2 {
        return Err(ManifoldError::Polyline("need at least 2 columns".into()));
    }
    if let Projection::Head(h) = projection {
        if h == 0 || h > n {
            return Err(ManifoldError::Polyline(format!("projection head {h} out of range")));
        }
    }
    let width = points.len().to_string().len();
    let charts = (0..points.len())
        .map(|i| {
            let a = points[i].clone();
            let b = points[(i + 1) % points.len()].clone();
            if linalg::distance(&a, &b) == 0.0 {
                return Err(ManifoldError::Polyline(format!("repeated sample at row {}", i + 1)));
            }
            let d = linalg::sub(&b, &a);
            let (a2, d2) = (a.clone(), d.clone());
            let chart = Chart::new(format!("{name}[{i:0width$}]"), n, vec![Interval::Finite(0.0, 1.0)], move |s| {
                let q: Vec<f64> = a.iter().zip(&d).map(|(x, v)| x + s[0] * v).collect();
                project(&q, projection)
            })
            .with_jacobian(move |s| {
                let q: Vec<f64> = a2.iter().zip(&d2).map(|(x, v)| x + s[0] * v).collect();
                vec![project_tangent(&q, &d2, projection)]
            });
            Ok(chart)
        })
        .collect::<Result<Vec<_>, _>>()?;
    ParamSubmanifold::new(charts)
}

fn project(q: &[f64], projection: Projection) -> Vec<f64> {
    match projection {
        Projection::None => q.to_vec(),
        Projection::Head(h) => {
            let r = linalg::norm(&q[..h]);
            q.iter().enumerate().map(|(i, v)| if i < h { v / r } else { *v }).collect()
        }
    }
}

fn project_tangent(q: &[f64], v: &[f64], projection: Projection) -> Vec<f64> {
    match projection {
        Projection::None => v.to_vec(),
        Projection::Head(h) => {
            let r = linalg::norm(&q[..h]);
            let radial = linalg::dot(&q[..h], &v[..h]) / (r * r);
            v.iter()
                .enumerate()
                .map(|(i, dv)| if i < h { (dv - q[i] * radial) / r } else { *dv })
                .collect()
        }
    }
}
