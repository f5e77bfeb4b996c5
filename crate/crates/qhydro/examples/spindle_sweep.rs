//! The torus-to-spindle panel: shrink the torus radius at fixed tube
//! radius, track the cross-section classification, the normal-reversal
//! locus, and the transformed helicoidal ring. Exports meshes as OBJ.

use qhydro::io::csv::{write_mesh_obj, write_ring};
use qhydro::torus::{spindle_sweep, DEFAULT_SPINDLE_BS};
use std::path::PathBuf;

fn main() -> qhydro::Result<()> {
    let a = 2.0;
    let steps = spindle_sweep(a, &DEFAULT_SPINDLE_BS, 128, 128, 256)?;
    let dir = PathBuf::from("qhydro-out/examples/spindle_sweep");

    println!(
        "{:>6} {:>18} {:>10} {:>12} {:>10} {:>10}",
        "b", "regime", "area", "volume", "z cross", "ring gap"
    );
    for (k, step) in steps.iter().enumerate() {
        let z = step
            .classification
            .intersection_z
            .map_or("-".to_string(), |z| format!("{z:.4}"));
        println!(
            "{:6.2} {:>18} {:10.3} {:12.4} {:>10} {:10.1e}",
            step.torus_radius,
            format!("{:?}", step.classification.regime),
            step.mesh_measures.unsigned_area,
            step.mesh_measures.enclosed_volume,
            z,
            step.ring.closure_gap
        );
        write_mesh_obj(&dir.join(format!("mesh_{k}.obj")), &step.mesh)?;
        write_ring(&dir.join(format!("ring_{k}.csv")), &step.ring)?;
        if let Some(rev) = &step.mesh.reversal {
            println!(
                "       normal reversal at theta = {:?}, axis z = +-{:.4}",
                rev.theta_crossings
                    .iter()
                    .map(|t| (t * 1000.0).round() / 1000.0)
                    .collect::<Vec<_>>(),
                rev.axis_z
            );
        }
    }
    println!("\nmeshes and rings written to {}", dir.display());
    Ok(())
}
