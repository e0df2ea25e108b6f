//! Great spheres S^k and S^l in S^{k+l+1}, both orders of the pair.

use std::time::Instant;

use linkint::integrator::QuadratureSpec;
use linkint::linking::link_scene;
use linkint::manifold::builtin_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    println!("  k  l   Lk(K,L)          Lk(L,K)          seconds");
    for (k, l) in [(0, 1), (1, 0), (0, 2), (1, 1), (1, 2), (2, 1)] {
        let s = builtin_scene("great_spheres", &[k as f64, l as f64])?;
        let t = Instant::now();
        let (_, a) = link_scene(&s, &spec)?;
        let (_, b) = link_scene(&s.swapped(), &spec)?;
        println!("{k:>3}{l:>3}   {:>+.12}  {:>+.12}  {:.2}", a.value, b.value, t.elapsed().as_secs_f64());
    }
    Ok(())
}
