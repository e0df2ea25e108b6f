//! Loads the bundled TOML scenes and runs one through the command line entry point.

use std::path::Path;

use linkint::linking::{link_scene, Report};
use linkint::scene_file::load_scene_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenes");
    for name in ["hopf.toml", "squares.toml", "s2xr.toml"] {
        let f = load_scene_file(&dir.join(name))?;
        let (formula, result) = link_scene(&f.scene, &f.quadrature)?;
        let report = Report {
            scene: f.scene.name.clone(),
            ambient: f.scene.ambient.label(),
            formula,
            result,
            snap_tol: f.snap_tol,
            separation: None,
            timing: false,
        };
        println!("{}", report.csv_row());
    }

    let path = dir.join("squares.toml");
    let args = ["linkint", "link", path.to_str().ok_or("path")?];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = linkint::cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("\nexit code {code}");
    Ok(())
}
