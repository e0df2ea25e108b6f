//! Built-in configurations with known linking numbers.

use super::{
    hemisphere_cap, round_sphere, AmbientSpace, Cap, Chart, Interval, ManifoldError, ParamSubmanifold, Surface,
};
use std::f64::consts::PI;

pub const SCENE_NAMES: &[&str] = &[
    "hopf_great_circles",
    "great_spheres",
    "s2xr_equator_poles",
    "r3_hopf_circles",
    "r3_split_unlink",
    "rn_meridional_spheres",
    "s3_cap_circles",
    "tilted_hopf",
    "r3_torus_link",
];

/// A pair `(K, L)` in an ambient space, with an optional bounding chain for `K`.
#[derive(Clone, Debug)]
pub struct Scene {
    pub name: String,
    pub k: ParamSubmanifold,
    pub l: ParamSubmanifold,
    pub ambient: AmbientSpace,
    pub k_cap: Option<Cap>,
    /// Linking number the construction is known to have, when the sign is
    /// fixed by the construction.
    pub expected: Option<i64>,
}

impl Scene {
    /// Parses `name` or `name(p1,p2,...)`.
    pub fn parse(text: &str) -> Result<Scene, ManifoldError> {
        let text = text.trim();
        match text.find('(') {
            None => builtin_scene(text, &[]),
            Some(open) => {
                let inner = text[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| ManifoldError::InvalidParams(format!("unbalanced parentheses in '{text}'")))?;
                let params = inner
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ManifoldError::InvalidParams(format!("'{text}': {e}")))?;
                builtin_scene(&text[..open], &params)
            }
        }
    }

    /// The same pair with the roles of `K` and `L` exchanged.
    pub fn swapped(&self) -> Scene {
        Scene {
            name: format!("{} (swapped)", self.name),
            k: self.l.clone(),
            l: self.k.clone(),
            ambient: self.ambient.clone(),
            k_cap: None,
            expected: None,
        }
    }
}

fn dims(name: &str, params: &[f64], count: usize) -> Result<Vec<usize>, ManifoldError> {
    if params.len() != count {
        return Err(ManifoldError::InvalidParams(format!(
            "{name} takes {count} parameter(s), got {}",
            params.len()
        )));
    }
    params
        .iter()
        .map(|&p| {
            if p >= 0.0 && p.fract() == 0.0 && p < 16.0 {
                Ok(p as usize)
            } else {
                Err(ManifoldError::InvalidParams(format!("{name}: {p} is not a small non-negative integer")))
            }
        })
        .collect()
}

fn no_params(name: &str, params: &[f64]) -> Result<(), ManifoldError> {
    dims(name, params, 0).map(|_| ())
}

fn circle(name: &str, coords: [usize; 2], n: usize, center: &[f64], radius: f64) -> Result<ParamSubmanifold, ManifoldError> {
    round_sphere(name, 1, &coords, n, center, radius)
}

/// Builds a named scene.
///
/// | name | params | ambient | Lk |
/// |---|---|---|---|
/// | `hopf_great_circles` | | `S^3` | 1 |
/// | `great_spheres` | `k, l` | `S^{k+l+1}` | 1 |
/// | `s2xr_equator_poles` | | `S^2 x R` | 1 |
/// | `r3_hopf_circles` | | `R^3` | -1 |
/// | `r3_split_unlink` | | `R^3` | 0 |
/// | `rn_meridional_spheres` | `k, l` | `R^{k+l+1}` | +-1 |
/// | `s3_cap_circles` | | `S^3` | 0 |
/// | `tilted_hopf` | `theta` | `S^3` | 1 |
/// | `r3_torus_link` | | `R^3` | -2 |
pub fn builtin_scene(name: &str, params: &[f64]) -> Result<Scene, ManifoldError> {
    let scene = match name {
        "hopf_great_circles" => {
            no_params(name, params)?;
            let mut s = great_spheres(1, 1)?;
            s.name = name.into();
            s
        }
        "great_spheres" => {
            let d = dims(name, params, 2)?;
            great_spheres(d[0], d[1])?
        }
        "s2xr_equator_poles" => {
            no_params(name, params)?;
            let k = circle("K", [0, 1], 4, &[0.0; 4], 1.0)?;
            let north = Chart::new("L_north", 4, vec![Interval::Infinite], |t| vec![0.0, 0.0, 1.0, t[0]])
                .with_jacobian(|_| vec![vec![0.0, 0.0, 0.0, 1.0]]);
            let south = Chart::new("L_south", 4, vec![Interval::Infinite], |t| vec![0.0, 0.0, -1.0, t[0]])
                .with_jacobian(|_| vec![vec![0.0, 0.0, 0.0, 1.0]])
                .with_orientation(-1);
            Scene {
                name: name.into(),
                k,
                l: ParamSubmanifold::new(vec![north, south])?,
                ambient: AmbientSpace::Visible {
                    n: 3,
                    surface: Surface::SphereCylinder { sphere_dim: 2, line_dim: 1 },
                },
                k_cap: Some(hemisphere_cap(1, &[0, 1], 2, 4, false)?),
                expected: Some(1),
            }
        }
        "r3_hopf_circles" => {
            no_params(name, params)?;
            let mut s = meridional(1, 1)?;
            s.name = name.into();
            s.expected = Some(-1);
            s
        }
        "r3_split_unlink" => {
            no_params(name, params)?;
            Scene {
                name: name.into(),
                k: circle("K", [0, 1], 3, &[0.0; 3], 1.0)?,
                l: circle("L", [0, 1], 3, &[0.0, 0.0, 10.0], 1.0)?,
                ambient: AmbientSpace::Euclidean { dim: 3 },
                k_cap: None,
                expected: Some(0),
            }
        }
        "rn_meridional_spheres" => {
            let d = dims(name, params, 2)?;
            meridional(d[0], d[1])?
        }
        "s3_cap_circles" => {
            no_params(name, params)?;
            let r: f64 = 0.3;
            let mut ck = [0.0; 4];
            ck[0] = r.cos();
            let mut cl = [0.0; 4];
            cl[3] = r.cos();
            Scene {
                name: name.into(),
                k: circle("K", [1, 2], 4, &ck, r.sin())?,
                l: circle("L", [1, 2], 4, &cl, r.sin())?,
                ambient: AmbientSpace::Sphere { n: 3 },
                k_cap: None,
                expected: Some(0),
            }
        }
        "tilted_hopf" => {
            if params.len() != 1 || !(0.0..PI / 2.0).contains(&params[0].abs()) {
                return Err(ManifoldError::InvalidParams(format!(
                    "tilted_hopf takes one angle with |theta| < pi/2, got {params:?}"
                )));
            }
            let (st, ct) = params[0].sin_cos();
            let rot = vec![
                vec![ct, 0.0, -st, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![st, 0.0, ct, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ];
            let l = circle("L", [2, 3], 4, &[0.0; 4], 1.0)?.transformed(&rot, &[0.0; 4]);
            Scene {
                name: format!("tilted_hopf({})", params[0]),
                k: circle("K", [0, 1], 4, &[0.0; 4], 1.0)?,
                l,
                ambient: AmbientSpace::Sphere { n: 3 },
                k_cap: Some(hemisphere_cap(1, &[0, 1], 2, 4, false)?),
                expected: Some(1),
            }
        }
        "r3_torus_link" => {
            no_params(name, params)?;
            Scene {
                name: name.into(),
                k: ParamSubmanifold::new(vec![torus_curve("K", 1.0)])?,
                l: ParamSubmanifold::new(vec![torus_curve("L", -1.0)])?,
                ambient: AmbientSpace::Euclidean { dim: 3 },
                k_cap: None,
                expected: Some(-2),
            }
        }
        _ => return Err(ManifoldError::UnknownScene(name.into())),
    };
    Ok(scene)
}

/// Unit `k`-sphere in the first `k+1` axes and unit `l`-sphere in the last
/// `l+1` axes of `R^{k+l+2}`.
fn great_spheres(k: usize, l: usize) -> Result<Scene, ManifoldError> {
    let n = k + l + 1;
    if n < 2 {
        return Err(ManifoldError::InvalidParams("great_spheres needs k + l >= 1".into()));
    }
    let kc: Vec<usize> = (0..=k).collect();
    let lc: Vec<usize> = (k + 1..=n).collect();
    Ok(Scene {
        name: format!("great_spheres({k},{l})"),
        k: round_sphere("K", k, &kc, n + 1, &vec![0.0; n + 1], 1.0)?,
        l: round_sphere("L", l, &lc, n + 1, &vec![0.0; n + 1], 1.0)?,
        ambient: AmbientSpace::Sphere { n },
        k_cap: Some(hemisphere_cap(k, &kc, k + 1, n + 1, false)?),
        expected: Some(1),
    })
}

/// Unit `k`-sphere in the first `k+1` axes of `R^{k+l+1}` and a unit
/// `l`-sphere centred on `e_0` in the axes `e_0, e_{k+1}, ..., e_{k+l}`.
fn meridional(k: usize, l: usize) -> Result<Scene, ManifoldError> {
    let dim = k + l + 1;
    if dim < 2 {
        return Err(ManifoldError::InvalidParams("rn_meridional_spheres needs k + l >= 1".into()));
    }
    let kc: Vec<usize> = (0..=k).collect();
    let mut lc = vec![0];
    lc.extend(k + 1..dim);
    let mut center = vec![0.0; dim];
    center[0] = 1.0;
    Ok(Scene {
        name: format!("rn_meridional_spheres({k},{l})"),
        k: round_sphere("K", k, &kc, dim, &vec![0.0; dim], 1.0)?,
        l: round_sphere("L", l, &lc, dim, &center, 1.0)?,
        ambient: AmbientSpace::Euclidean { dim },
        k_cap: None,
        expected: None,
    })
}

/// `(1,2)` curve on the torus with radii 2 and 1; `phase = -1` shifts the
/// meridional angle by `pi`.
fn torus_curve(name: &str, phase: f64) -> Chart {
    Chart::new(name, 3, vec![Interval::Finite(0.0, 2.0 * PI)], move |t| {
        let (s2, c2) = (2.0 * t[0]).sin_cos();
        let rho = 2.0 + phase * c2;
        vec![rho * t[0].cos(), rho * t[0].sin(), phase * s2]
    })
    .with_jacobian(move |t| {
        let (s2, c2) = (2.0 * t[0]).sin_cos();
        let (s1, c1) = t[0].sin_cos();
        let rho = 2.0 + phase * c2;
        let drho = -2.0 * phase * s2;
        vec![vec![drho * c1 - rho * s1, drho * s1 + rho * c1, 2.0 * phase * c2]]
    })
}
