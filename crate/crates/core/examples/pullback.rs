//! Gauss map pullback of the sphere volume against the Euclidean integrand.

use linkint::linking::pullback_check;
use linkint::manifold::builtin_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, params) in [
        ("r3_hopf_circles", vec![]),
        ("r3_torus_link", vec![]),
        ("rn_meridional_spheres", vec![1.0, 2.0]),
        ("rn_meridional_spheres", vec![2.0, 1.0]),
    ] {
        let s = builtin_scene(name, &params)?;
        let dev = pullback_check(&s.k, &s.l, 200, 11)?;
        println!("{:<28} max relative deviation {dev:.2e}", s.name);
    }
    Ok(())
}
