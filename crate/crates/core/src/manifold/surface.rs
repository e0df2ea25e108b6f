//! Hypersurface descriptors and the ray test for visibility from the origin.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ManifoldError;
use crate::linalg;

pub type LevelFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Zero set of `f` in `R^dim`, searched along rays out to `reach`.
#[derive(Clone)]
pub struct ImplicitSurface {
    pub dim: usize,
    pub f: LevelFn,
    pub reach: f64,
    pub steps: usize,
    /// `|f|` at a local minimum below this counts as a tangential touch.
    pub tangency_tol: f64,
}

impl fmt::Debug for ImplicitSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ImplicitSurface(R^{}, reach {})", self.dim, self.reach)
    }
}

#[derive(Clone, Debug)]
pub enum Surface {
    /// `S^n x R^m` in `R^{n+m+1}` as `{ |(p_0..p_n)| = 1 }`.
    SphereCylinder { sphere_dim: usize, line_dim: usize },
    /// Torus of revolution about the `z` axis in `R^3`.
    Torus { major: f64, minor: f64 },
    Implicit(ImplicitSurface),
}

/// How a ray from the origin meets a surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RayHits {
    pub crossings: usize,
    pub tangential: bool,
}

impl Surface {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Surface::SphereCylinder { sphere_dim, line_dim } => sphere_dim + line_dim + 1,
            Surface::Torus { .. } => 3,
            Surface::Implicit(s) => s.dim,
        }
    }

    pub fn passes_through_origin(&self) -> bool {
        match self {
            Surface::SphereCylinder { .. } => false,
            Surface::Torus { major, minor } => (major - minor).abs() < 1e-12,
            Surface::Implicit(s) => (s.f)(&vec![0.0; s.dim]).abs() < s.tangency_tol,
        }
    }

    /// Signed level whose zero set is the surface (a distance for the
    /// built-in shapes).
    pub fn level(&self, p: &[f64]) -> f64 {
        match self {
            Surface::SphereCylinder { sphere_dim, .. } => linalg::norm(&p[..=*sphere_dim]) - 1.0,
            Surface::Torus { major, minor } => {
                let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
                ((rho - major).powi(2) + p[2] * p[2]).sqrt() - minor
            }
            Surface::Implicit(s) => (s.f)(p),
        }
    }

    /// Intersections of the open ray `{ l d : l > 0 }` with the surface.
    pub fn ray_hits(&self, d: &[f64]) -> RayHits {
        match self {
            Surface::SphereCylinder { sphere_dim, .. } => {
                let head = linalg::norm(&d[..=*sphere_dim]);
                RayHits {
                    crossings: usize::from(head > 0.0),
                    tangential: false,
                }
            }
            Surface::Torus { major, minor } => {
                // (l a - R)^2 + l^2 b^2 = r^2 with a = |d_xy|, b = d_z, |d| = 1
                let u = linalg::norm(d);
                let a = (d[0] * d[0] + d[1] * d[1]).sqrt() / u;
                let disc = a * a * major * major - (major * major - minor * minor);
                if disc.abs() < 1e-12 {
                    return RayHits {
                        crossings: usize::from(a * major > 0.0),
                        tangential: true,
                    };
                }
                if disc < 0.0 {
                    return RayHits { crossings: 0, tangential: false };
                }
                let sq = disc.sqrt();
                let crossings = [a * major - sq, a * major + sq].iter().filter(|&&l| l > 0.0).count();
                RayHits { crossings, tangential: false }
            }
            Surface::Implicit(s) => {
                let u = linalg::norm(d);
                let eval = |l: f64| (s.f)(&d.iter().map(|v| v * l / u).collect::<Vec<_>>());
                let vals: Vec<f64> = (1..=s.steps).map(|i| eval(s.reach * i as f64 / s.steps as f64)).collect();
                let mut crossings = 0;
                let mut tangential = false;
                let mut last = 0.0f64;
                for &v in &vals {
                    if v != 0.0 {
                        if last != 0.0 && last.signum() != v.signum() {
                            crossings += 1;
                        }
                        last = v;
                    }
                }
                for w in vals.windows(3) {
                    let m = w[1].abs();
                    if m < s.tangency_tol && m <= w[0].abs() && m <= w[2].abs() && w[0].signum() == w[2].signum() {
                        tangential = true;
                    }
                }
                RayHits { crossings, tangential }
            }
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surface::SphereCylinder { sphere_dim, line_dim: 0 } => write!(f, "sphere({sphere_dim})"),
            Surface::SphereCylinder { sphere_dim, line_dim } => write!(f, "sphere_cylinder({sphere_dim},{line_dim})"),
            Surface::Torus { major, minor } => write!(f, "torus({major},{minor})"),
            Surface::Implicit(s) => write!(f, "implicit(R^{})", s.dim),
        }
    }
}

impl FromStr for Surface {
    type Err = ManifoldError;

    /// `sphere(n)`, `sphere_cylinder(n,m)` or `torus(R,r)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ManifoldError::InvalidSurface(format!("cannot parse surface '{s}'"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<f64> = inner
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let as_dim = |v: f64| if v >= 0.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(bad()) };
        match (&s[..open], args.as_slice()) {
            ("sphere", [n]) => Ok(Surface::SphereCylinder { sphere_dim: as_dim(*n)?, line_dim: 0 }),
            ("sphere_cylinder", [n, m]) => Ok(Surface::SphereCylinder {
                sphere_dim: as_dim(*n)?,
                line_dim: as_dim(*m)?,
            }),
            ("torus", [r1, r2]) if *r1 > 0.0 && *r2 > 0.0 => Ok(Surface::Torus { major: *r1, minor: *r2 }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Visibility {
    /// No sampled ray failed; `samples` rays were checked.
    Visible { samples: usize },
    NotVisible { witness: Vec<f64>, crossings: usize, tangential: bool },
}

/// Probabilistic visibility certificate from the origin.
///
/// Probes the coordinate axis directions first, then `samples` seeded
/// uniformly random directions. A ray meeting the surface more than once
/// or tangentially is returned as a witness.
pub fn visibility_check(surface: &Surface, samples: usize, seed: u64) -> Result<Visibility, ManifoldError> {
    if surface.passes_through_origin() {
        return Err(ManifoldError::InvalidSurface(format!("{surface} passes through the origin")));
    }
    let dim = surface.ambient_dim();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[i] = sign;
            dirs.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let d: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = linalg::norm(&d);
        dirs.push(d.iter().map(|v| v / n).collect());
    }
    let total = dirs.len();
    for d in dirs {
        let hits = surface.ray_hits(&d);
        if hits.crossings > 1 || hits.tangential {
            return Ok(Visibility::NotVisible {
                witness: d,
                crossings: hits.crossings,
                tangential: hits.tangential,
            });
        }
    }
    Ok(Visibility::Visible { samples: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sphere_is_visible() {
        for n in 1..6 {
            let s = Surface::SphereCylinder { sphere_dim: n, line_dim: 0 };
            assert!(matches!(visibility_check(&s, 500, 1).unwrap(), Visibility::Visible { .. }));
        }
    }

    #[test]
    fn s2_cross_r_is_visible() {
        let s: Surface = "sphere_cylinder(2,1)".parse().unwrap();
        assert_eq!(s.ambient_dim(), 4);
        assert!(matches!(visibility_check(&s, 1000, 2).unwrap(), Visibility::Visible { .. }));
    }

    #[test]
    fn torus_has_double_crossing_in_equatorial_plane() {
        // along (1,0,0): (l - 2)^2 = 0.25 gives l = 1.5 and 2.5
        let s = Surface::Torus { major: 2.0, minor: 0.5 };
        assert_eq!(s.ray_hits(&[1.0, 0.0, 0.0]).crossings, 2);
        match visibility_check(&s, 100, 3).unwrap() {
            Visibility::NotVisible { witness, crossings, .. } => {
                assert_eq!(crossings, 2);
                assert_eq!(witness[2], 0.0);
            }
            v => panic!("torus reported {v:?}"),
        }
    }

    #[test]
    fn implicit_torus_agrees_with_analytic() {
        let f = |p: &[f64]| {
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            (rho - 2.0).powi(2) + p[2] * p[2] - 0.25
        };
        let s = Surface::Implicit(ImplicitSurface {
            dim: 3,
            f: Arc::new(f),
            reach: 5.0,
            steps: 2000,
            tangency_tol: 1e-9,
        });
        let t = Surface::Torus { major: 2.0, minor: 0.5 };
        for d in [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.6, 0.2], [0.3, 0.1, 0.9]] {
            assert_eq!(s.ray_hits(&d).crossings, t.ray_hits(&d).crossings, "{d:?}");
        }
    }

    #[test]
    fn surface_through_origin_is_rejected() {
        let s = Surface::Torus { major: 1.0, minor: 1.0 };
        assert!(matches!(visibility_check(&s, 10, 0), Err(ManifoldError::InvalidSurface(_))));
    }

    #[test]
    fn parse_round_trip() {
        for text in ["sphere(3)", "sphere_cylinder(2,1)", "torus(2,0.5)"] {
            let s: Surface = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("cube(3)".parse::<Surface>().is_err());
    }
}
