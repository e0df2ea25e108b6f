//! Linking of Hopf circles in S^3, straight and tilted.

use linkint::integrator::QuadratureSpec;
use linkint::linking::{link_scene, preflight};
use linkint::manifold::Scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    for text in ["hopf_great_circles", "tilted_hopf(0.3)", "tilted_hopf(1.2)", "s3_cap_circles"] {
        let s = Scene::parse(text)?;
        let sep = preflight(&s.k, &s.l, &s.ambient, spec.singular_guard)?;
        let (formula, r) = link_scene(&s, &spec)?;
        println!(
            "{text:<20} {:<32} value {:>+.12}  err {:.1e}  min angle {:.4}  nodes {}",
            formula.label(),
            r.value,
            r.error_estimate,
            sep.metric,
            r.node_count
        );
    }
    Ok(())
}
