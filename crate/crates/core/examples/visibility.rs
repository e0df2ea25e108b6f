use std::sync::Arc;

use linkint::manifold::{visibility_check, ImplicitSurface, Surface};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ellipsoid = Surface::Implicit(ImplicitSurface {
        dim: 3,
        f: Arc::new(|p: &[f64]| p[0] * p[0] / 4.0 + p[1] * p[1] + p[2] * p[2] / 9.0 - 1.0),
        reach: 10.0,
        steps: 400,
        tangency_tol: 1e-9,
    });
    let surfaces = [
        "sphere(2)".parse::<Surface>()?,
        "sphere_cylinder(2,1)".parse()?,
        "sphere_cylinder(1,2)".parse()?,
        "torus(2,1)".parse()?,
        ellipsoid,
    ];
    for s in &surfaces {
        println!("{s:<28} {:?}", visibility_check(s, 2000, 3)?);
    }
    Ok(())
}
