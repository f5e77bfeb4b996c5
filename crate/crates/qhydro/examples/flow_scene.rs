//! Streamlines of a background flow deflected around a rotating cylinder:
//! the classic picture of guided paths bending around a vortex core.

use qhydro::io::csv::{write_scalar_field, write_streamlines};
use qhydro::scene::{streamlines_around_vortex, VortexSceneSpec};
use std::path::Path;

fn main() -> qhydro::Result<()> {
    for (name, circulation) in [("symmetric", 0.0), ("rotating", 2.0)] {
        let scene = VortexSceneSpec {
            u_inf: 1.0,
            cylinder_radius: 1.0,
            circulation,
            dipole: true,
            domain: [[-8.0, 8.0], [-6.0, 6.0]],
        };
        let flow = streamlines_around_vortex(&scene, 15)?;
        println!("scene `{name}` (circulation {circulation}):");
        for p in scene.stagnation_points() {
            println!("  stagnation point at ({:+.6}, {:+.6})", p[0], p[1]);
        }
        let mut worst = 0.0f64;
        let mut min_r = f64::MAX;
        for line in &flow.streamlines {
            for (p, psi) in line.points.iter().zip(&line.psi) {
                worst = worst.max((psi - line.psi[0]).abs());
                min_r = min_r.min((p[0] * p[0] + p[1] * p[1]).sqrt());
            }
        }
        println!("  {} streamlines, psi drift {:.1e}, closest approach r = {:.6}",
            flow.streamlines.len(), worst, min_r);

        let dir = format!("qhydro-out/examples/flow_scene_{name}");
        let rows = write_streamlines(Path::new(&format!("{dir}/streamlines.csv")), &flow)?;
        write_scalar_field(Path::new(&format!("{dir}/psi_field.csv")), &flow.psi_field, "psi")?;
        println!("  wrote {rows} samples to {dir}/streamlines.csv\n");
    }
    Ok(())
}
