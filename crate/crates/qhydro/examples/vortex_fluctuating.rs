//! Zero-mean fluctuating viscosity: the cosine model brings the vortex
//! back after every period, and an Ornstein-Uhlenbeck ensemble keeps the
//! mean profile on the static Gaussian.

use qhydro::vortex::{
    evolve_radial_vorticity, long_time_average_profile, omega_profile, sigma_accumulate,
    ViscosityKind, ViscosityModel,
};
use std::f64::consts::PI;

fn main() -> qhydro::Result<()> {
    let sigma = 1.0;
    let omega_freq = 1.0;
    let nu0 = 0.5 * omega_freq * sigma * sigma;
    let cosine = ViscosityModel::new(ViscosityKind::Cosine { nu0, omega: omega_freq }, sigma)?;

    println!("accumulator over one period (closed form):");
    let period = 2.0 * PI / omega_freq;
    for k in 0..=8 {
        let t = period * k as f64 / 8.0;
        println!("  t = {t:7.4}   Sigma = {:.6}", sigma_accumulate(&cosine, t)?);
    }

    // coarse radial grid: the contraction half-cycle is backward diffusion
    let n = 48;
    let r_max = 20.0 * sigma;
    let r: Vec<f64> = (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect();
    let omega0: Vec<f64> = r
        .iter()
        .map(|&rr| omega_profile(1.0, sigma * sigma, rr))
        .collect::<qhydro::Result<_>>()?;
    let steps = 4096;
    let ev = evolve_radial_vorticity(&omega0, r_max, &cosine, period / steps as f64, steps, steps)?;
    let last = ev.history.last().unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        num += (last[i] - omega0[i]) * (last[i] - omega0[i]);
        den += omega0[i] * omega0[i];
    }
    println!(
        "\ncosine model, one full period: relative L2 distance to the initial profile {:.2e}",
        (num / den).sqrt()
    );

    let ou = ViscosityModel::new(
        ViscosityKind::OuNoise {
            amplitude: 0.02,
            correlation_time: 0.2,
            rng_seed: 2024,
        },
        sigma,
    )?;
    let r_grid: Vec<f64> = (0..9).map(|i| 4.0 * sigma * i as f64 / 8.0).collect();
    let avg = long_time_average_profile(&ou, 1.0, 20.0, 2000, &r_grid, 64)?;
    let se = avg.stderr.as_ref().unwrap();
    println!("\nOU ensemble (64 members) vs the static profile:");
    println!("{:>6} {:>12} {:>12} {:>10}", "r", "mean omega", "static", "dev/SE");
    for (i, &rr) in r_grid.iter().enumerate() {
        let exact = omega_profile(1.0, sigma * sigma, rr)?;
        println!(
            "{rr:6.2} {:12.7} {exact:12.7} {:10.2}",
            avg.mean_omega[i],
            (avg.mean_omega[i] - exact).abs() / se[i].max(1e-12)
        );
    }
    Ok(())
}
