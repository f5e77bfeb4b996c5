//! 2D packet through a double slit (directionally split Crank-Nicolson),
//! with the interference profile sampled on a screen line.

use qhydro::evolve::{evolve, norm, EvolutionConfig, Scheme};
use qhydro::io::csv::write_wavefield;
use qhydro::potential::PotentialSpec;
use qhydro::states;
use qhydro::{Boundary, Grid, PhysicalConstants};
use std::path::Path;

fn main() -> qhydro::Result<()> {
    let c = PhysicalConstants::default();
    let grid = Grid::plane((-12.0, 12.0), 128, (-8.0, 8.0), 96, Boundary::Periodic)?;
    let psi0 = states::gaussian_packet(&grid, &[-6.0, 0.0], 1.2, &[3.0, 0.0])?;
    let pot = PotentialSpec::DoubleSlit {
        height: 40.0,
        slit_width: 0.8,
        slit_separation: 2.4,
        thickness: 0.6,
    };
    let cfg = EvolutionConfig {
        dt: 2e-3,
        steps: 1500,
        scheme: Scheme::CrankNicolson,
        snapshot_stride: 1500,
    };
    let ev = evolve(&psi0, &pot, &cfg, &c)?;
    let last = ev.snapshots.last().unwrap();
    for w in &ev.warnings {
        println!("note: {w}");
    }
    println!("norm drift after {} steps: {:.2e}", cfg.steps, (norm(last) - 1.0).abs());

    // screen profile at x = 8
    let screen_ix = ((8.0 - grid.axis_min(0)) / grid.dx()).round() as usize;
    println!("\nscreen density at x = 8 (fringes):");
    let max_rho = (0..grid.ny())
        .map(|iy| last.rho[grid.idx(screen_ix, iy)])
        .fold(0.0f64, f64::max);
    for iy in (0..grid.ny()).step_by(2) {
        let rho = last.rho[grid.idx(screen_ix, iy)];
        let bar = "#".repeat((rho / max_rho * 48.0) as usize);
        println!("y = {:6.2} |{bar}", grid.y(iy));
    }

    let out = Path::new("qhydro-out/examples/double_slit/final.csv");
    let rows = write_wavefield(out, last)?;
    println!("\nwrote {rows} rows to {}", out.display());
    Ok(())
}
