//! Truncated cone over the Hopf circle K linked with L in R^4.

use linkint::cli::log_log_slope;
use linkint::integrator::QuadratureSpec;
use linkint::linking::{cone_truncate, cone_truncated_linking, linking_sphere};
use linkint::manifold::builtin_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = builtin_scene("hopf_great_circles", &[])?;
    let cap = s.k_cap.as_ref().ok_or("no cap")?;
    let spec = QuadratureSpec::default();
    let direct = linking_sphere(&s.k, &s.l, &spec)?.value;
    println!("sphere integral {direct:.12}");
    println!("     R        trunk            cap        total");
    let radii = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let mut caps = Vec::new();
    for r in radii {
        let c = cone_truncate(&s.k, cap, r)?;
        let res = cone_truncated_linking(&c, &s.l, &spec)?;
        println!("{r:>6}  {:.10}  {:.4e}  {:.12}", res.trunk.value, res.cap.value, res.total.value);
        caps.push(res.cap.value);
    }
    if let Some(slope) = log_log_slope(&radii, &caps) {
        println!("cap log-log slope {slope:.4}");
    }
    Ok(())
}
