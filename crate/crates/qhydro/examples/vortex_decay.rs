//! Radial vorticity diffusion under constant viscosity against the
//! self-similar Gaussian profile, plus the core radius along the way.

use qhydro::io::csv::write_radial_history;
use qhydro::vortex::{
    circulation_enclosed, core_radius, evolve_radial_vorticity, omega_profile, ViscosityKind,
    ViscosityModel,
};
use std::path::Path;

fn main() -> qhydro::Result<()> {
    let sigma = 1.0;
    let gamma = 1.0;
    let nu0 = 0.05;
    let model = ViscosityModel::new(ViscosityKind::Constant { nu0 }, sigma)?;
    let n = 512;
    let r_max = 20.0 * sigma;
    let r: Vec<f64> = (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect();
    let omega0: Vec<f64> = r
        .iter()
        .map(|&rr| omega_profile(gamma, sigma * sigma, rr))
        .collect::<qhydro::Result<_>>()?;

    let t_end = 2.0 * sigma * sigma / nu0; // accumulator triples
    let steps = 4000;
    let ev = evolve_radial_vorticity(&omega0, r_max, &model, t_end / steps as f64, steps, 500)?;

    println!(
        "{:>8} {:>10} {:>12} {:>12} {:>10}",
        "t", "Sigma", "omega(0)num", "omega(0)exact", "r0"
    );
    for (k, &t) in ev.times.iter().enumerate() {
        let sigma_t = nu0 * t + sigma * sigma;
        println!(
            "{t:8.2} {sigma_t:10.4} {:12.7} {:12.7} {:10.5}",
            ev.history[k][0],
            omega_profile(gamma, sigma_t, 0.0)?,
            core_radius(sigma_t)?
        );
    }

    let sigma_end = nu0 * t_end + sigma * sigma;
    println!(
        "\nenclosed circulation at r = r0: {:.5} of the total (1 - e^-xi)",
        circulation_enclosed(gamma, sigma_end, core_radius(sigma_end)?)? / gamma
    );

    let out = Path::new("qhydro-out/examples/vortex_decay/profile.csv");
    let rows = write_radial_history(out, &ev)?;
    println!("wrote {rows} rows to {}", out.display());
    Ok(())
}
