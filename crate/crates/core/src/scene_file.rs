//! TOML scene files.
//!
//! ```toml
//! snap_tol = 0.1
//!
//! [ambient]
//! kind = "visible"            # euclidean | sphere | visible
//! n = 3                       # N = ... for euclidean
//! surface = "sphere_cylinder(2,1)"
//!
//! [[manifolds]]
//! builtin = "s2xr_equator_poles"
//! part = "K"
//!
//! [[manifolds]]
//! csv = "poles.csv"           # relative to the scene file
//! dim = 1
//! orientation = -1
//!
//! [quadrature]
//! base_order = 32
//! max_depth = 6
//! refine_threshold = 1e-7
//! ```
//!
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::integrator::QuadratureSpec;
use crate::manifold::polyline::{self, Projection};
use crate::manifold::{AmbientSpace, Cap, ManifoldError, ParamSubmanifold, Scene, Surface};

pub const DEFAULT_SNAP_TOL: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneFileError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Parse(String),
    #[error("field '{field}': {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
}

fn invalid(field: &str, message: impl Into<String>) -> SceneFileError {
    SceneFileError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    ambient: RawAmbient,
    manifolds: Vec<RawManifold>,
    quadrature: Option<RawQuadrature>,
    snap_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAmbient {
    kind: String,
    n: Option<usize>,
    #[serde(rename = "N")]
    big_n: Option<usize>,
    surface: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifold {
    builtin: Option<String>,
    part: Option<String>,
    csv: Option<PathBuf>,
    dim: Option<usize>,
    orientation: Option<i32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    base_order: Option<usize>,
    max_depth: Option<u32>,
    refine_threshold: Option<f64>,
}

/// A validated scene file.
#[derive(Clone, Debug)]
pub struct SceneFile {
    pub scene: Scene,
    pub quadrature: QuadratureSpec,
    pub snap_tol: f64,
}

/// Reads and validates a scene file. CSV paths resolve against its directory.
pub fn load_scene_file(path: &Path) -> Result<SceneFile, SceneFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| SceneFileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_scene(&text, base, &name)
}

/// Parses scene text; `name` labels the scene in reports.
pub fn parse_scene(text: &str, base_dir: &Path, name: &str) -> Result<SceneFile, SceneFileError> {
    let raw: RawScene = toml::from_str(text).map_err(|e| SceneFileError::Parse(e.to_string()))?;
    let ambient = parse_ambient(&raw.ambient)?;
    if raw.manifolds.len() != 2 {
        return Err(invalid("manifolds", format!("exactly two entries required, found {}", raw.manifolds.len())));
    }
    let (k, k_cap) = build_manifold(&raw.manifolds[0], 0, &ambient, base_dir)?;
    let (l, _) = build_manifold(&raw.manifolds[1], 1, &ambient, base_dir)?;
    let dim = ambient.embedding_dim();
    for (m, i) in [(&k, 0), (&l, 1)] {
        if m.ambient_dim() != dim {
            return Err(invalid(
                &format!("manifolds[{i}]"),
                format!("points lie in R^{}, but {} lives in R^{dim}", m.ambient_dim(), ambient.label()),
            ));
        }
    }
    ambient
        .check_dims(k.dim(), l.dim())
        .map_err(|e| invalid("manifolds", e.to_string()))?;

    let mut quadrature = QuadratureSpec::default();
    if let Some(q) = &raw.quadrature {
        if let Some(v) = q.base_order {
            quadrature.base_order = v;
        }
        if let Some(v) = q.max_depth {
            quadrature.max_subdivision_depth = v;
        }
        if let Some(v) = q.refine_threshold {
            quadrature.refine_threshold = v;
        }
    }
    quadrature.validate().map_err(|e| invalid("quadrature", e.to_string()))?;
    let snap_tol = raw.snap_tol.unwrap_or(DEFAULT_SNAP_TOL);
    check_snap_tol(snap_tol).map_err(|m| invalid("snap_tol", m))?;

    Ok(SceneFile {
        scene: Scene {
            name: name.to_string(),
            k,
            l,
            ambient,
            k_cap,
            expected: None,
        },
        quadrature,
        snap_tol,
    })
}

/// Snap tolerances must lie in `(0, 0.5)`.
pub fn check_snap_tol(tol: f64) -> Result<(), String> {
    if tol > 0.0 && tol < 0.5 {
        Ok(())
    } else {
        Err(format!("{tol} is outside (0, 0.5)"))
    }
}

fn parse_ambient(raw: &RawAmbient) -> Result<AmbientSpace, SceneFileError> {
    let n = || raw.n.ok_or_else(|| invalid("ambient.n", "missing"));
    let ambient = match raw.kind.as_str() {
        "euclidean" => {
            if raw.surface.is_some() {
                return Err(invalid("ambient.surface", "only valid for kind = \"visible\""));
            }
            let dim = raw.big_n.or(raw.n).ok_or_else(|| invalid("ambient.N", "missing"))?;
            AmbientSpace::Euclidean { dim }
        }
        "sphere" => {
            if raw.surface.is_some() || raw.big_n.is_some() {
                return Err(invalid("ambient", "a sphere takes only n"));
            }
            AmbientSpace::Sphere { n: n()? }
        }
        "visible" => {
            let text = raw.surface.as_deref().ok_or_else(|| invalid("ambient.surface", "missing"))?;
            let surface: Surface = text.parse().map_err(|e: ManifoldError| invalid("ambient.surface", e.to_string()))?;
            let n = n()?;
            if surface.ambient_dim() != n + 1 {
                return Err(invalid(
                    "ambient.surface",
                    format!("{surface} lies in R^{}, but n = {n} needs R^{}", surface.ambient_dim(), n + 1),
                ));
            }
            AmbientSpace::Visible { n, surface }
        }
        other => return Err(invalid("ambient.kind", format!("'{other}' is not euclidean, sphere or visible"))),
    };
    if ambient.embedding_dim() < 2 {
        return Err(invalid("ambient", "dimension too small"));
    }
    Ok(ambient)
}

fn build_manifold(
    raw: &RawManifold,
    index: usize,
    ambient: &AmbientSpace,
    base_dir: &Path,
) -> Result<(ParamSubmanifold, Option<Cap>), SceneFileError> {
    let field = |f: &str| format!("manifolds[{index}].{f}");
    let orientation = raw.orientation.unwrap_or(1);
    if orientation != 1 && orientation != -1 {
        return Err(invalid(&field("orientation"), format!("{orientation} is not +1 or -1")));
    }
    let (m, cap) = match (&raw.builtin, &raw.csv) {
        (Some(b), None) => {
            if raw.dim.is_some() {
                return Err(invalid(&field("dim"), "only valid with csv"));
            }
            let scene = Scene::parse(b).map_err(|e| invalid(&field("builtin"), e.to_string()))?;
            let part = raw.part.as_deref().unwrap_or(if index == 0 { "K" } else { "L" });
            match part {
                "K" => (scene.k, scene.k_cap),
                "L" => (scene.l, None),
                other => return Err(invalid(&field("part"), format!("'{other}' is not K or L"))),
            }
        }
        (None, Some(csv)) => {
            if raw.part.is_some() {
                return Err(invalid(&field("part"), "only valid with builtin"));
            }
            let dim = raw.dim.ok_or_else(|| invalid(&field("dim"), "missing"))?;
            if dim != 1 {
                return Err(invalid(&field("dim"), format!("CSV input describes curves only (dim = 1), got {dim}")));
            }
            let path = base_dir.join(csv);
            let pts = polyline::read_points_file(&path).map_err(|e| invalid(&field("csv"), e.to_string()))?;
            let projection = match ambient {
                AmbientSpace::Euclidean { .. } => Projection::None,
                AmbientSpace::Sphere { n } => Projection::Head(n + 1),
                AmbientSpace::Visible {
                    surface: Surface::SphereCylinder { sphere_dim, .. },
                    ..
                } => Projection::Head(sphere_dim + 1),
                AmbientSpace::Visible { .. } => Projection::None,
            };
            let name = if index == 0 { "K" } else { "L" };
            let m = polyline::closed_polyline(name, &pts, projection).map_err(|e| invalid(&field("csv"), e.to_string()))?;
            (m, None)
        }
        _ => return Err(invalid(&format!("manifolds[{index}]"), "exactly one of builtin or csv is required")),
    };
    if orientation == -1 {
        Ok((m.reversed(), None))
    } else {
        Ok((m, cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOPF: &str = r#"
[ambient]
kind = "sphere"
n = 3

[[manifolds]]
builtin = "hopf_great_circles"
part = "K"

[[manifolds]]
builtin = "hopf_great_circles"
part = "L"
"#;

    #[test]
    fn parses_builtin_pair() {
        let f = parse_scene(HOPF, Path::new("."), "hopf").unwrap();
        assert_eq!(f.scene.k.dim(), 1);
        assert!(f.scene.k_cap.is_some());
        assert_eq!(f.snap_tol, DEFAULT_SNAP_TOL);
        assert_eq!(f.quadrature, QuadratureSpec::default());
    }

    #[test]
    fn unknown_key_is_an_error() {
        let text = HOPF.replace("n = 3", "n = 3\nrefine = 2");
        let e = parse_scene(&text, Path::new("."), "x").unwrap_err();
        assert!(matches!(e, SceneFileError::Parse(ref m) if m.contains("refine")), "{e}");
    }

    #[test]
    fn dimension_mismatch_is_diagnosed() {
        let text = HOPF.replace("n = 3", "n = 4");
        let e = parse_scene(&text, Path::new("."), "x").unwrap_err();
        assert!(e.to_string().contains("R^5"), "{e}");
    }

    #[test]
    fn csv_curves_and_orientation() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("k.csv"), "x,y,z\n1,0,0\n0,1,0\n-1,0,0\n0,-1,0\n").unwrap();
        let text = r#"
snap_tol = 0.05
[ambient]
kind = "euclidean"
N = 3
[[manifolds]]
csv = "k.csv"
dim = 1
[[manifolds]]
builtin = "r3_hopf_circles"
part = "L"
orientation = -1
[quadrature]
base_order = 16
"#;
        let f = parse_scene(text, dir.path(), "x").unwrap();
        assert_eq!(f.scene.k.charts().len(), 4);
        assert_eq!(f.scene.l.charts()[0].orientation(), -1);
        assert_eq!(f.quadrature.base_order, 16);
        assert_eq!(f.snap_tol, 0.05);
        let bad = text.replace("dim = 1", "dim = 2");
        assert!(parse_scene(&bad, dir.path(), "x").is_err());
    }

    #[test]
    fn visible_surface_must_fit() {
        let text = r#"
[ambient]
kind = "visible"
n = 3
surface = "torus(2,1)"
[[manifolds]]
builtin = "s2xr_equator_poles"
[[manifolds]]
builtin = "s2xr_equator_poles"
"#;
        assert!(matches!(parse_scene(text, Path::new("."), "x"), Err(SceneFileError::Invalid { .. })));
        let ok = text.replace("torus(2,1)", "sphere_cylinder(2,1)");
        assert!(parse_scene(&ok, Path::new("."), "x").is_ok());
    }
}
