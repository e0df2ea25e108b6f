use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use super::ManifoldError;
use crate::linalg;

/// Minimum admissible ratio of smallest to largest frame singular value.
pub const RANK_TOL: f64 = 1e-8;

/// Position map of a chart, `s -> x(s)`.
pub type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Partial derivatives of a chart, `s -> [dx/ds_1, ..., dx/ds_k]`.
pub type FrameMap = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// One parameter axis of a chart.
///
/// Infinite axes are always integrated through `t = tan(u)`,
/// `u in (-pi/2, pi/2)`, with the Jacobian `sec^2(u)` folded into the frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Interval {
    Finite(f64, f64),
    Infinite,
}

impl Interval {
    /// Bounds in integration coordinates.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Interval::Finite(a, b) => (a, b),
            Interval::Infinite => (-FRAC_PI_2, FRAC_PI_2),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Interval::Infinite)
    }
}

/// Point on a chart: position and the `k` tangent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSample {
    pub position: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
}

/// A parametrized piece `x: box -> R^N` of an oriented submanifold.
#[derive(Clone)]
pub struct Chart {
    name: String,
    ambient_dim: usize,
    domain: Vec<Interval>,
    map: PointMap,
    jacobian: Option<FrameMap>,
    orientation: i32,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("ambient_dim", &self.ambient_dim)
            .field("domain", &self.domain)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl Chart {
    pub fn new<F>(name: impl Into<String>, ambient_dim: usize, domain: Vec<Interval>, map: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Chart {
            name: name.into(),
            ambient_dim,
            domain,
            map: Arc::new(map),
            jacobian: None,
            orientation: 1,
        }
    }

    pub fn with_jacobian<F>(mut self, jac: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn with_orientation(mut self, sign: i32) -> Self {
        self.orientation = if sign < 0 { -1 } else { 1 };
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn orientation(&self) -> i32 {
        self.orientation
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Same chart with the opposite orientation.
    pub fn reversed(&self) -> Chart {
        let mut c = self.clone();
        c.orientation = -c.orientation;
        c
    }

    pub fn position_raw(&self, s: &[f64]) -> Vec<f64> {
        (self.map)(s)
    }

    /// Position and frame in the chart's native coordinates, no rank check.
    pub fn evaluate_raw(&self, s: &[f64]) -> ChartSample {
        let position = (self.map)(s);
        let frame = match &self.jacobian {
            Some(j) => j(s),
            None => self.fd_frame(s),
        };
        ChartSample { position, frame }
    }

    /// Central finite differences with step `cbrt(eps) * max(1, |s_i|)`.
    pub fn fd_frame(&self, s: &[f64]) -> Vec<Vec<f64>> {
        let h0 = f64::EPSILON.cbrt();
        let mut p = s.to_vec();
        (0..s.len())
            .map(|i| {
                let h = h0 * s[i].abs().max(1.0);
                p[i] = s[i] + h;
                let fp = (self.map)(&p);
                p[i] = s[i] - h;
                let fm = (self.map)(&p);
                p[i] = s[i];
                let inv = 1.0 / (2.0 * h);
                fp.iter().zip(&fm).map(|(a, b)| (a - b) * inv).collect()
            })
            .collect()
    }

    /// Native parameters for a point given in integration coordinates.
    pub fn to_native(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.domain)
            .map(|(&v, iv)| if iv.is_infinite() { v.tan() } else { v })
            .collect()
    }

    /// Position and frame at `u` in integration coordinates.
    ///
    /// Frame rows along infinite axes are scaled by `sec^2(u)`. Fails when
    /// the frame is rank deficient relative to [`RANK_TOL`].
    pub fn evaluate(&self, u: &[f64]) -> Result<ChartSample, ManifoldError> {
        let s = self.to_native(u);
        let mut sample = self.evaluate_raw(&s);
        for (i, iv) in self.domain.iter().enumerate() {
            if iv.is_infinite() {
                let c = u[i].cos();
                let w = 1.0 / (c * c);
                sample.frame[i].iter_mut().for_each(|v| *v *= w);
            }
        }
        if !sample.frame.is_empty() {
            let (lo, hi) = linalg::singular_range(&sample.frame);
            if !(hi > 0.0 && lo > RANK_TOL * hi) {
                return Err(ManifoldError::DegenerateChart {
                    chart: self.name.clone(),
                    node: u.to_vec(),
                });
            }
        }
        Ok(sample)
    }

    /// Applies `p -> rot * p + shift` to positions and `rot` to frames.
    pub fn transformed(&self, rot: &[Vec<f64>], shift: &[f64]) -> Chart {
        let rot: Arc<Vec<Vec<f64>>> = Arc::new(rot.to_vec());
        let shift = shift.to_vec();
        let map = self.map.clone();
        let r1 = rot.clone();
        let mut c = Chart {
            name: self.name.clone(),
            ambient_dim: rot.len(),
            domain: self.domain.clone(),
            map: Arc::new(move |s: &[f64]| {
                let p = linalg::mat_vec(&r1, &map(s));
                p.iter().zip(&shift).map(|(a, b)| a + b).collect()
            }),
            jacobian: None,
            orientation: self.orientation,
        };
        if let Some(j) = &self.jacobian {
            let j = j.clone();
            c.jacobian = Some(Arc::new(move |s: &[f64]| {
                j(s).iter().map(|v| linalg::mat_vec(&rot, v)).collect()
            }));
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle() -> Chart {
        Chart::new("circle", 3, vec![Interval::Finite(0.0, 2.0 * PI)], |s| {
            vec![s[0].cos(), s[0].sin(), 0.0]
        })
    }

    #[test]
    fn circle_at_zero() {
        let c = circle().with_jacobian(|s| vec![vec![-s[0].sin(), s[0].cos(), 0.0]]);
        let smp = c.evaluate(&[0.0]).unwrap();
        assert_eq!(smp.position, vec![1.0, 0.0, 0.0]);
        assert_eq!(smp.frame, vec![vec![-0.0, 1.0, 0.0]]);
    }

    #[test]
    fn pole_line_raw_and_substituted() {
        let c = Chart::new("pole", 4, vec![Interval::Infinite], |t| vec![0.0, 0.0, 1.0, t[0]])
            .with_jacobian(|_| vec![vec![0.0, 0.0, 0.0, 1.0]]);
        let raw = c.evaluate_raw(&[2.0]);
        assert_eq!(raw.position, vec![0.0, 0.0, 1.0, 2.0]);
        assert_eq!(raw.frame, vec![vec![0.0, 0.0, 0.0, 1.0]]);
        // u = atan 2 gives t = 2 and sec^2 u = 1 + t^2 = 5
        let sub = c.evaluate(&[2f64.atan()]).unwrap();
        assert!((sub.position[3] - 2.0).abs() < 1e-14);
        assert!((sub.frame[0][3] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn finite_difference_error_model() {
        let analytic = circle().with_jacobian(|s| vec![vec![-s[0].sin(), s[0].cos(), 0.0]]);
        let fd = circle();
        let s = 0.7;
        let a = analytic.evaluate(&[s]).unwrap().frame;
        let b = fd.evaluate(&[s]).unwrap().frame;
        let h = f64::EPSILON.cbrt();
        let dev = a[0].iter().zip(&b[0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev < 10.0 * h * h, "dev {dev}");
    }

    #[test]
    fn degenerate_chart_names_node() {
        let c = Chart::new("flat", 3, vec![Interval::Finite(0.0, 1.0); 2], |s| vec![s[0], s[0], 0.0]);
        match c.evaluate(&[0.5, 0.25]) {
            Err(ManifoldError::DegenerateChart { chart, node }) => {
                assert_eq!(chart, "flat");
                assert_eq!(node, vec![0.5, 0.25]);
            }
            other => panic!("expected degenerate chart, got {other:?}"),
        }
    }

    #[test]
    fn transform_rotates_frame() {
        let c = circle().with_jacobian(|s| vec![vec![-s[0].sin(), s[0].cos(), 0.0]]);
        let rot = vec![vec![0.0, -1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        let t = c.transformed(&rot, &[0.0, 0.0, 5.0]);
        let smp = t.evaluate(&[0.0]).unwrap();
        assert_eq!(smp.position, vec![0.0, 1.0, 5.0]);
        assert!((smp.frame[0][0] + 1.0).abs() < 1e-15);
    }
}
