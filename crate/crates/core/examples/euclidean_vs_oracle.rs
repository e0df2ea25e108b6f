//! Gauss integral in R^3 against the crossing count of sampled polygons.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linkint::integrator::QuadratureSpec;
use linkint::linalg;
use linkint::linking::linking_euclidean;
use linkint::manifold::builtin_scene;
use linkint::oracle::{oracle_linking, sample_to_polylink};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = QuadratureSpec::default();
    for name in ["r3_hopf_circles", "r3_torus_link", "r3_split_unlink"] {
        let base = builtin_scene(name, &[])?;
        for trial in 0..3 {
            let rot = linalg::random_rotation(3, &mut rng);
            let shift = [trial as f64, -0.5 * trial as f64, 2.0];
            let k = base.k.transformed(&rot, &shift);
            let l = base.l.transformed(&rot, &shift);
            let r = linking_euclidean(&k, &l, &spec)?;
            let poly = sample_to_polylink(&k, &l, 256)?;
            let (count, dir) = oracle_linking(&poly, trial)?;
            println!(
                "{name:<16} #{trial}  integral {:>+.10}  crossings {count:>+}  (view {:+.2} {:+.2} {:+.2})",
                r.value, dir[0], dir[1], dir[2]
            );
        }
    }
    Ok(())
}
