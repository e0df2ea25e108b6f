//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 result rejected (no
//! integer snap, failed check, surface not visible), 4 near-singular input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::checks::{run_check, CheckKind};
use crate::integrator::{QuadratureSpec, Snap};
use crate::kernel::{Omega, DEFAULT_OMEGA_ORDER};
use crate::linking::report::sig12;
use crate::linking::{cone_truncate, cone_truncated_linking, link_scene, preflight, Formula, LinkError, Report};
use crate::manifold::{visibility_check, AmbientSpace, Scene, Surface, Visibility};
use crate::scene_file::{check_snap_tol, load_scene_file, SceneFile, DEFAULT_SNAP_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;
pub const EXIT_NEAR_SINGULAR: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "linkint", version, about = "Linking numbers from Gauss-type integrals")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the linking number of a scene.
    Link {
        /// Scene file (TOML) or a built-in scene such as `great_spheres(1,2)`.
        scene: String,
        #[command(flatten)]
        quad: QuadFlags,
        /// Snap tolerance in (0, 0.5).
        #[arg(long)]
        snap_tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the result as a CSV row (header written for a new file).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Truncated-cone integrals over a range of radii.
    Convergence {
        scene: String,
        /// Comma-separated radii, each greater than 1.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 4.0, 8.0, 16.0, 32.0])]
        radii: Vec<f64>,
        #[command(flatten)]
        quad: QuadFlags,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an identity suite: invariance, pullback, ray-reduction, omega, fact1.
    Check {
        which: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate Omega_{k,l}(alpha) on [0, pi].
    OmegaTable {
        #[arg(short, long)]
        k: usize,
        #[arg(short, long)]
        l: usize,
        /// Number of evenly spaced angles.
        #[arg(long, default_value_t = 181)]
        points: usize,
        /// Gauss-Legendre order of the kernel quadrature.
        #[arg(long, default_value_t = DEFAULT_OMEGA_ORDER)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probe whether a hypersurface is visible from the origin.
    Visibility {
        /// `sphere(n)`, `sphere_cylinder(n,m)` or `torus(R,r)`.
        surface: String,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct QuadFlags {
    /// Gauss-Legendre nodes per axis of the coarse rule.
    #[arg(long)]
    order: Option<usize>,
    /// Maximum bisection depth.
    #[arg(long)]
    depth: Option<u32>,
    /// Worker threads for the integrator.
    #[arg(long)]
    workers: Option<usize>,
}

impl QuadFlags {
    fn apply(&self, mut spec: QuadratureSpec) -> QuadratureSpec {
        if let Some(o) = self.order {
            spec.base_order = o;
        }
        if let Some(d) = self.depth {
            spec.max_subdivision_depth = d;
        }
        if self.workers.is_some() {
            spec.workers = self.workers;
        }
        spec
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        code
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Link {
            scene,
            quad,
            snap_tol,
            seed: _,
            out,
            timing,
        } => cmd_link(&mut io, &scene, &quad, snap_tol, out.as_deref(), timing),
        Command::Convergence {
            scene,
            radii,
            quad,
            seed: _,
            out,
        } => cmd_convergence(&mut io, &scene, &radii, &quad, out.as_deref()),
        Command::Check {
            which,
            seed,
            samples,
            out,
        } => cmd_check(&mut io, &which, seed, samples, out.as_deref()),
        Command::OmegaTable {
            k,
            l,
            points,
            order,
            out,
        } => cmd_omega_table(&mut io, k, l, points, order, out.as_deref()),
        Command::Visibility { surface, samples, seed } => cmd_visibility(&mut io, &surface, samples, seed),
    }
}

/// A scene file path, or a built-in scene expression when no such file exists.
fn resolve_scene(arg: &str) -> Result<SceneFile, String> {
    let path = Path::new(arg);
    if path.exists() || arg.ends_with(".toml") {
        return load_scene_file(path).map_err(|e| format!("{}: {e}", path.display()));
    }
    Scene::parse(arg)
        .map(|scene| SceneFile {
            scene,
            quadrature: QuadratureSpec::default(),
            snap_tol: DEFAULT_SNAP_TOL,
        })
        .map_err(|e| format!("'{arg}' is neither a scene file nor a built-in scene: {e}"))
}

fn link_error_code(e: &LinkError) -> i32 {
    if e.is_near_singular() {
        EXIT_NEAR_SINGULAR
    } else {
        EXIT_INPUT
    }
}

fn write_text(io: &mut Io, path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io.out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn cmd_link(io: &mut Io, scene: &str, quad: &QuadFlags, snap_tol: Option<f64>, out: Option<&Path>, timing: bool) -> i32 {
    let file = match resolve_scene(scene) {
        Ok(f) => f,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let snap_tol = snap_tol.unwrap_or(file.snap_tol);
    if let Err(m) = check_snap_tol(snap_tol) {
        return io.fail(EXIT_INPUT, format!("--snap-tol {m}"));
    }
    let spec = quad.apply(file.quadrature.clone());
    if let Err(e) = spec.validate() {
        return io.fail(EXIT_INPUT, e);
    }
    let s = &file.scene;
    let separation = match preflight(&s.k, &s.l, &s.ambient, spec.singular_guard) {
        Ok(sep) => sep,
        Err(e) => return io.fail(link_error_code(&e), e),
    };
    let (formula, result) = match link_scene(s, &spec) {
        Ok(r) => r,
        Err(e) => return io.fail(link_error_code(&e), e),
    };
    let report = Report {
        scene: s.name.clone(),
        ambient: s.ambient.label(),
        formula,
        result,
        snap_tol,
        separation: Some(separation),
        timing,
    };
    let _ = writeln!(io.out, "{report}");
    if let Some(p) = out {
        let new = !p.exists();
        let mut text = String::new();
        if new {
            text.push_str(Report::CSV_HEADER);
            text.push('\n');
        }
        text.push_str(&report.csv_row());
        text.push('\n');
        let written = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(p)
            .and_then(|mut f| f.write_all(text.as_bytes()));
        if let Err(e) = written {
            return io.fail(EXIT_INPUT, format!("{}: {e}", p.display()));
        }
    }
    match report.snap() {
        Snap::Integer(_) => EXIT_OK,
        Snap::Rejected { .. } => EXIT_REJECTED,
    }
}

/// Least-squares slope of `log |y|` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && y.abs() > 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn cmd_convergence(io: &mut Io, scene: &str, radii: &[f64], quad: &QuadFlags, out: Option<&Path>) -> i32 {
    let file = match resolve_scene(scene) {
        Ok(f) => f,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let s = &file.scene;
    if matches!(s.ambient, AmbientSpace::Euclidean { .. }) {
        return io.fail(EXIT_INPUT, "convergence needs a sphere or visible-hypersurface scene");
    }
    let Some(cap) = &s.k_cap else {
        return io.fail(EXIT_INPUT, format!("scene '{}' has no cap chain for K", s.name));
    };
    if radii.is_empty() || radii.iter().any(|r| r.is_nan() || *r <= 1.0) {
        return io.fail(EXIT_INPUT, "--radii must be a non-empty list of values greater than 1");
    }
    let spec = quad.apply(file.quadrature.clone());
    if let Err(e) = spec.validate() {
        return io.fail(EXIT_INPUT, e);
    }
    let reference = match link_scene(s, &spec) {
        Ok((Formula::SignedCount, _)) => return io.fail(EXIT_INPUT, "convergence needs dim K + dim L >= 1"),
        Ok((_, r)) => r.value,
        Err(e) => return io.fail(link_error_code(&e), e),
    };
    let mut csv = String::from("R,total,trunk,cap,abs_error_vs_reference\n");
    let mut caps = Vec::new();
    for &r in radii {
        let cone = match cone_truncate(&s.k, cap, r) {
            Ok(c) => c,
            Err(e) => return io.fail(EXIT_INPUT, e),
        };
        let res = match cone_truncated_linking(&cone, &s.l, &spec) {
            Ok(v) => v,
            Err(e) => return io.fail(link_error_code(&e), e),
        };
        caps.push(res.cap.value);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r,
            res.total.value,
            res.trunk.value,
            res.cap.value,
            (res.total.value - reference).abs()
        ));
    }
    let _ = writeln!(io.err, "reference {} = {}", s.name, sig12(reference));
    if let Some(slope) = log_log_slope(radii, &caps) {
        let _ = writeln!(io.err, "cap log-log slope {slope:.4}");
    }
    match write_text(io, out, &csv) {
        Ok(()) => EXIT_OK,
        Err(e) => io.fail(EXIT_INPUT, e),
    }
}

fn cmd_check(io: &mut Io, which: &str, seed: u64, samples: Option<usize>, out: Option<&Path>) -> i32 {
    let kind: CheckKind = match which.parse() {
        Ok(k) => k,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    if samples == Some(0) {
        return io.fail(EXIT_INPUT, "--samples must be positive");
    }
    let outcome = match run_check(kind, seed, samples) {
        Ok(o) => o,
        Err(e) => return io.fail(link_error_code(&e), e),
    };
    let text = format!("{outcome}\n");
    if let Err(e) = write_text(io, out, &text) {
        return io.fail(EXIT_INPUT, e);
    }
    if outcome.passed() {
        EXIT_OK
    } else {
        EXIT_REJECTED
    }
}

fn cmd_omega_table(io: &mut Io, k: usize, l: usize, points: usize, order: usize, out: Option<&Path>) -> i32 {
    if points < 2 || order < 2 {
        return io.fail(EXIT_INPUT, "--points and --order must be at least 2");
    }
    let om = Omega::new(k, l, order);
    let mut csv = String::from("k,l,alpha,omega\n");
    for i in 0..points {
        let a = std::f64::consts::PI * i as f64 / (points - 1) as f64;
        csv.push_str(&format!("{k},{l},{a},{}\n", om.eval(a)));
    }
    match write_text(io, out, &csv) {
        Ok(()) => EXIT_OK,
        Err(e) => io.fail(EXIT_INPUT, e),
    }
}

fn cmd_visibility(io: &mut Io, surface: &str, samples: usize, seed: u64) -> i32 {
    let s: Surface = match surface.parse() {
        Ok(s) => s,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    match visibility_check(&s, samples, seed) {
        Ok(Visibility::Visible { samples }) => {
            let _ = writeln!(io.out, "{s}: visible from the origin ({samples} rays, each meets it once)");
            EXIT_OK
        }
        Ok(Visibility::NotVisible {
            witness,
            crossings,
            tangential,
        }) => {
            let how = if tangential {
                "touches it tangentially".to_string()
            } else {
                format!("meets it {crossings} times")
            };
            let _ = writeln!(io.out, "{s}: not visible; the ray along {witness:?} {how}");
            EXIT_REJECTED
        }
        Err(e) => io.fail(EXIT_INPUT, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("linkint").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn builtin_link() {
        let (code, out, _) = run_args(&["link", "hopf_great_circles", "--order", "16"]);
        assert_eq!(code, 0);
        assert!(out.contains("Lk = 1 (residual"), "{out}");
    }

    #[test]
    fn bad_usage_exits_2() {
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["check", "nope"]).0, 2);
        assert_eq!(run_args(&["link", "hopf_great_circles", "--snap-tol", "0.7"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| -3.0 * x.powf(-1.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn visibility_verdicts() {
        assert_eq!(run_args(&["visibility", "sphere_cylinder(2,1)", "--samples", "200"]).0, 0);
        let (code, out, _) = run_args(&["visibility", "torus(2,1)", "--samples", "200"]);
        assert_eq!(code, 3, "{out}");
        assert_eq!(run_args(&["visibility", "torus(1,1)"]).0, 2);
    }
}
