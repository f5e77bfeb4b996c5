//! Free spreading of a Gaussian packet under Crank-Nicolson evolution,
//! tabulated against the closed-form width law.

use qhydro::evolve::{evolve, norm, EvolutionConfig, Scheme};
use qhydro::potential::PotentialSpec;
use qhydro::states;
use qhydro::{Boundary, Grid, PhysicalConstants};

fn main() -> qhydro::Result<()> {
    let c = PhysicalConstants::default();
    let sigma0 = 1.0;
    let grid = Grid::line(-24.0, 24.0, 512, Boundary::Periodic)?;
    let psi0 = states::gaussian_packet(&grid, &[0.0], sigma0, &[0.0])?;
    let cfg = EvolutionConfig {
        dt: 2e-3,
        steps: 1000,
        scheme: Scheme::CrankNicolson,
        snapshot_stride: 100,
    };
    let ev = evolve(&psi0, &PotentialSpec::Free, &cfg, &c)?;

    println!("{:>8} {:>12} {:>12} {:>10}", "t", "sigma(num)", "sigma(exact)", "|1-norm|");
    for (k, wf) in ev.snapshots.iter().enumerate() {
        let t = ev.times[k];
        let var: f64 = (0..grid.len())
            .map(|i| grid.x(i) * grid.x(i) * wf.rho[i] * grid.quad_weight(i))
            .sum();
        let exact = states::free_packet_width(sigma0, t, &c);
        println!(
            "{t:8.3} {:12.6} {exact:12.6} {:10.2e}",
            var.sqrt(),
            (norm(wf) - 1.0).abs()
        );
    }
    Ok(())
}
