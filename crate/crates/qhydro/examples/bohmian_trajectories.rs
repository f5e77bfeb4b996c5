//! Trajectory bundle guided by the evolving packet: quantile seeds,
//! RK4 integration through grad(S)/m, endpoints against the spread law.
//! Writes the bundle as CSV for plotting.

use qhydro::bohm::{integrate_bundle, sample_seeds, SeedMode};
use qhydro::evolve::{evolve, EvolutionConfig, Scheme};
use qhydro::io::csv::write_bundle;
use qhydro::potential::PotentialSpec;
use qhydro::states;
use qhydro::{Boundary, Grid, PhysicalConstants};
use std::path::Path;

fn main() -> qhydro::Result<()> {
    let c = PhysicalConstants::default();
    let sigma0 = 1.0;
    let grid = Grid::line(-24.0, 24.0, 512, Boundary::Periodic)?;
    let psi0 = states::gaussian_packet(&grid, &[0.0], sigma0, &[0.0])?;
    let t_final = 2.0 * c.m * sigma0 * sigma0 / c.hbar;
    let cfg = EvolutionConfig {
        dt: t_final / 1000.0,
        steps: 1000,
        scheme: Scheme::CrankNicolson,
        snapshot_stride: 10,
    };
    let ev = evolve(&psi0, &PotentialSpec::Free, &cfg, &c)?;

    let seeds = sample_seeds(&ev.snapshots[0].rho_field(), 16, SeedMode::Quantile)?;
    let bundle = integrate_bundle(&ev.snapshots, &ev.times, None, &seeds.positions, &c)?;

    let factor = states::free_packet_width(sigma0, t_final, &c) / sigma0;
    println!("{:>4} {:>10} {:>12} {:>12} {:>10}", "seed", "x(0)", "x(t)", "x(0)*factor", "rel err");
    for s in 0..bundle.seeds.len() {
        let x0 = bundle.paths[s][0][0];
        let xt = bundle.paths[s].last().unwrap()[0];
        let expected = x0 * factor;
        println!(
            "{s:4} {x0:10.5} {xt:12.6} {expected:12.6} {:10.2e}",
            ((xt - expected) / expected).abs()
        );
    }

    let out = Path::new("qhydro-out/examples/bohmian_trajectories/bundle.csv");
    let rows = write_bundle(out, &bundle, false)?;
    println!("\nwrote {rows} rows to {}", out.display());
    Ok(())
}
