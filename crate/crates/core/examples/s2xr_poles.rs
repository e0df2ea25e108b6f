//! The equator of S^2 against the two pole lines in S^2 x R.

use linkint::integrator::QuadratureSpec;
use linkint::linking::linking_visible;
use linkint::manifold::{builtin_scene, visibility_check, AmbientSpace, Visibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = builtin_scene("s2xr_equator_poles", &[])?;
    if let AmbientSpace::Visible { surface, .. } = &s.ambient {
        match visibility_check(surface, 2000, 1)? {
            Visibility::Visible { samples } => println!("{surface}: visible ({samples} rays)"),
            v => println!("{surface}: {v:?}"),
        }
    }
    for order in [8, 16, 32] {
        let r = linking_visible(&s.k, &s.l, &QuadratureSpec::default().with_order(order))?;
        println!("order {order:>2}  value {:+.12}  err {:.1e}  nodes {}", r.value, r.error_estimate, r.node_count);
    }
    let r = linking_visible(&s.k, &s.l.reversed(), &QuadratureSpec::default())?;
    println!("L reversed  value {:+.12}", r.value);
    Ok(())
}
