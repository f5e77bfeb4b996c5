//! The 720-degree closure: a two-turn helicoidal ring on a near-degenerate
//! sphere, with a parallel-transported frame that reverses after one
//! revolution of the bypass and returns after two.

use qhydro::torus::{double_cover_rotation, helicoidal_ring, TorusShape, Traversal};

fn main() -> qhydro::Result<()> {
    let shape = TorusShape::with_rational_ratio(2.0, 0.001, 1.0, 2, 1, 0.0, 0.0)?;
    let ring = helicoidal_ring(&shape, 512)?;
    println!(
        "ring: {} tube turns, {} axis turn(s), closure gap {:.2e}",
        ring.turns_about_tube, ring.turns_about_axis, ring.closure_gap
    );

    for traversal in [Traversal::Forward, Traversal::Reverse] {
        let trace = double_cover_rotation(&shape, &ring, 10_000, traversal)?;
        println!("\ntraversal {traversal:?}: start at ({:.4}, {:.4}, {:.4})",
            trace.start[0], trace.start[1], trace.start[2]);
        println!(
            "{:>12} {:>14} {:>14} {:>14}",
            "angle", "direction dot", "normal dot", "binormal dot"
        );
        for c in &trace.checkpoints {
            println!(
                "{:>11}\u{b0} {:14.9} {:14.9} {:14.9}",
                c.angle_deg, c.direction_dot, c.normal_dot, c.binormal_dot
            );
        }
    }
    println!("\nthe bypass direction flips at 360 degrees and is restored at 720:");
    println!("a full revolution of the transported frame is 2 x 360 = 720 degrees.");
    Ok(())
}
