//! The Omega kernel: closed form, value at pi/2, ray reduction.

use std::f64::consts::{FRAC_PI_2, PI};

use linkint::checks::{run_check, CheckKind};
use linkint::kernel::{omega, omega_11_closed, ray_reduction_check, sphere_volume};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for i in 0..=6 {
        let a = PI * i as f64 / 6.0;
        println!("Omega_11({a:.4}) = {:.15}  closed {:.15}", omega(1, 1, a, 64), omega_11_closed(a));
    }
    for (k, l) in [(0, 0), (1, 1), (2, 3), (5, 5)] {
        let want = sphere_volume(k + l + 1) / (sphere_volume(k) * sphere_volume(l));
        println!("Omega_{k}{l}(pi/2) = {:.15}  volume ratio {want:.15}", omega(k, l, FRAC_PI_2, 64));
    }
    let (lhs, rhs) = ray_reduction_check(&[2.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 1, 1)?;
    println!("ray integral {lhs:.15}  reduced {rhs:.15}");
    for kind in [CheckKind::Omega, CheckKind::Fact1, CheckKind::RayReduction] {
        println!("{}", run_check(kind, 7, None)?);
    }
    Ok(())
}
