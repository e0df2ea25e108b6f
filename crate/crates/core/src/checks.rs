//! Identity suites shared by the command line, the examples and the tests.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::{self, omega_11_closed, Omega, DEFAULT_OMEGA_ORDER};
use crate::linalg;
use crate::linking::{angle_integrand, euclidean_integrand, pullback_check, LinkError};
use crate::manifold::{builtin_scene, AmbientSpace, ChartSample, Scene};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Integrand unchanged by a random rotation of both submanifolds.
    Invariance,
    /// Gauss map pullback against the Euclidean integrand.
    Pullback,
    /// Ray integral against `Omega / (|x|^{k+1} |y|^{l+1} sin^n alpha)`.
    RayReduction,
    /// `Omega_{1,1}` quadrature against its closed form.
    Omega,
    /// `Omega_{k,l}(pi/2) = vol S^{k+l+1} / (vol S^k vol S^l)`.
    Fact1,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Invariance,
        CheckKind::Pullback,
        CheckKind::RayReduction,
        CheckKind::Omega,
        CheckKind::Fact1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Invariance => "invariance",
            CheckKind::Pullback => "pullback",
            CheckKind::RayReduction => "ray-reduction",
            CheckKind::Omega => "omega",
            CheckKind::Fact1 => "fact1",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            CheckKind::Invariance => 1e-10,
            CheckKind::Pullback => 1e-5,
            CheckKind::RayReduction => 1e-8,
            CheckKind::Omega => 1e-10,
            CheckKind::Fact1 => 1e-10,
        }
    }

    pub fn default_samples(&self) -> usize {
        match self {
            CheckKind::Invariance => 100,
            CheckKind::Pullback => 200,
            CheckKind::RayReduction => 50,
            CheckKind::Omega => 1000,
            CheckKind::Fact1 => 36,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown check '{s}' (expected one of invariance, pullback, ray-reduction, omega, fact1)"))
    }
}

/// Result of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub kind: CheckKind,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// One line per sub-case.
    pub details: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.details {
            writeln!(f, "  {d}")?;
        }
        write!(
            f,
            "{}: max deviation {:.3e} (tolerance {:.0e}, {} samples) {}",
            self.kind,
            self.max_deviation,
            self.tolerance,
            self.samples,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

/// Runs a suite. `samples = None` uses the suite's default count.
pub fn run_check(kind: CheckKind, seed: u64, samples: Option<usize>) -> Result<CheckOutcome, LinkError> {
    let samples = samples.unwrap_or(kind.default_samples());
    let mut details = Vec::new();
    let max_deviation = match kind {
        CheckKind::Invariance => {
            let mut worst: f64 = 0.0;
            for (i, scene) in invariance_scenes()?.iter().enumerate() {
                let d = rotation_invariance(scene, samples, seed.wrapping_add(i as u64))?;
                details.push(format!("{:<28} {d:.3e}", scene.name));
                worst = worst.max(d);
            }
            worst
        }
        CheckKind::Pullback => {
            let mut worst: f64 = 0.0;
            for (i, (name, params)) in [("r3_hopf_circles", vec![]), ("rn_meridional_spheres", vec![1.0, 2.0])]
                .iter()
                .enumerate()
            {
                let s = builtin_scene(name, params)?;
                let d = pullback_check(&s.k, &s.l, samples, seed.wrapping_add(i as u64))?;
                details.push(format!("{:<28} {d:.3e}", s.name));
                worst = worst.max(d);
            }
            worst
        }
        CheckKind::RayReduction => {
            let d = ray_reduction_suite(samples, seed)?;
            details.push(format!("random instances             {d:.3e}"));
            let (lhs, rhs) = kernel::ray_reduction_check(&[2.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 1, 1)?;
            let hand = (lhs - 0.125).abs().max((rhs - 0.125).abs());
            details.push(format!("|x| = 2, |y| = 1, k = l = 1  {lhs:.15} vs 1/8"));
            d.max(hand)
        }
        CheckKind::Omega => omega_closed_form_suite(samples),
        CheckKind::Fact1 => {
            let d = fact1_suite(5);
            details.push("k, l in 0..=5".to_string());
            d
        }
    };
    Ok(CheckOutcome {
        kind,
        max_deviation,
        tolerance: kind.tolerance(),
        samples,
        details,
    })
}

fn invariance_scenes() -> Result<Vec<Scene>, LinkError> {
    let mut v = Vec::new();
    for (name, params) in [
        ("hopf_great_circles", vec![]),
        ("tilted_hopf", vec![0.7]),
        ("great_spheres", vec![1.0, 2.0]),
        ("s3_cap_circles", vec![]),
        ("s2xr_equator_poles", vec![]),
        ("r3_hopf_circles", vec![]),
        ("r3_torus_link", vec![]),
        ("rn_meridional_spheres", vec![2.0, 1.0]),
    ] {
        v.push(builtin_scene(name, &params)?);
    }
    Ok(v)
}

fn integrand(scene: &Scene, x: &ChartSample, y: &ChartSample) -> f64 {
    let k = scene.k.dim();
    match &scene.ambient {
        AmbientSpace::Euclidean { dim } => euclidean_integrand(*dim, k, x, y),
        AmbientSpace::Sphere { n } => angle_integrand(*n, k, x, y, false),
        AmbientSpace::Visible { n, .. } => angle_integrand(*n, k, x, y, true),
    }
}

fn rotate(rot: &[Vec<f64>], shift: &[f64], s: &ChartSample) -> ChartSample {
    let p = linalg::mat_vec(rot, &s.position);
    ChartSample {
        position: p.iter().zip(shift).map(|(a, b)| a + b).collect(),
        frame: s.frame.iter().map(|v| linalg::mat_vec(rot, v)).collect(),
    }
}

/// Largest change of the integrand under one random rotation per sample
/// (plus a translation for Euclidean scenes), relative to the largest
/// integrand magnitude seen.
pub fn rotation_invariance(scene: &Scene, samples: usize, seed: u64) -> Result<f64, LinkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = scene.ambient.embedding_dim();
    let euclidean = matches!(scene.ambient, AmbientSpace::Euclidean { .. });
    let mut worst_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..samples {
        let (ci, u) = scene.k.random_point(&mut rng);
        let (cj, v) = scene.l.random_point(&mut rng);
        let x = scene.k.charts()[ci].evaluate(&u)?;
        let y = scene.l.charts()[cj].evaluate(&v)?;
        let rot = linalg::random_rotation(dim, &mut rng);
        let shift: Vec<f64> = if euclidean {
            (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        } else {
            vec![0.0; dim]
        };
        let a = integrand(scene, &x, &y);
        let b = integrand(scene, &rotate(&rot, &shift, &x), &rotate(&rot, &shift, &y));
        worst_abs = worst_abs.max((a - b).abs());
        scale = scale.max(a.abs());
    }
    Ok(if scale > 0.0 { worst_abs / scale } else { worst_abs })
}

/// Seeded `(x, y, k, l)` with `1 <= k + l <= 4` and `alpha` in `(0.1, 3.0)`;
/// returns the largest relative deviation.
pub fn ray_reduction_suite(samples: usize, seed: u64) -> Result<f64, LinkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < samples {
        let total = rng.random_range(1..=4usize);
        let k = rng.random_range(0..=total);
        let l = total - k;
        let dim = total + 2;
        let mut draw = |r: f64| -> Vec<f64> {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            linalg::scale(&v, r / linalg::norm(&v))
        };
        let x = draw(0.5 + 1.5 * (done % 3) as f64);
        let y = draw(1.0);
        let alpha = kernel::angle(&x, &y)?;
        if !(0.1..3.0).contains(&alpha) {
            continue;
        }
        let (lhs, rhs) = kernel::ray_reduction_check(&x, &y, k, l)?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
        done += 1;
    }
    Ok(worst)
}

/// `Omega_{1,1}` by quadrature against the closed form at `samples` evenly
/// spaced angles in `[0, pi]`.
pub fn omega_closed_form_suite(samples: usize) -> f64 {
    let om = Omega::new(1, 1, DEFAULT_OMEGA_ORDER);
    (0..samples)
        .map(|i| {
            let a = PI * i as f64 / (samples.max(2) - 1) as f64;
            (om.quadrature(a) - omega_11_closed(a)).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest `|ratio - 1|` of `Omega_{k,l}(pi/2)` to the volume ratio.
pub fn fact1_suite(max_kl: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..=max_kl {
        for l in 0..=max_kl {
            let want = kernel::sphere_volume(k + l + 1) / (kernel::sphere_volume(k) * kernel::sphere_volume(l));
            let got = Omega::new(k, l, DEFAULT_OMEGA_ORDER).quadrature(FRAC_PI_2);
            worst = worst.max((got / want - 1.0).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in CheckKind::ALL {
            assert_eq!(k.name().parse::<CheckKind>().unwrap(), k);
        }
        assert!("bogus".parse::<CheckKind>().is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        for k in [CheckKind::Omega, CheckKind::Fact1, CheckKind::RayReduction] {
            let o = run_check(k, 7, None).unwrap();
            assert!(o.passed(), "{o}");
        }
    }

    #[test]
    fn invariance_on_a_few_samples() {
        let o = run_check(CheckKind::Invariance, 3, Some(10)).unwrap();
        assert!(o.passed(), "{o}");
    }
}
