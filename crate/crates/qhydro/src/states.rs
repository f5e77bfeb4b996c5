//! Normalized initial states and the closed-form solutions used as oracles.

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::ComplexField;
use crate::grid::Grid;

/// Gaussian packet `psi ~ exp(-(x-c)^2 / 4 sigma0^2 + i k0 x)`, normalized
/// on the grid. The density then has standard deviation `sigma0`.
pub fn gaussian_packet(
    grid: &Grid,
    center: &[f64],
    sigma0: f64,
    k0: &[f64],
) -> Result<ComplexField> {
    if !(sigma0 > 0.0) {
        return Err(QhError::config("initial.sigma0", "must be > 0"));
    }
    if center.len() != grid.dim() || k0.len() != grid.dim() {
        return Err(QhError::config(
            "initial",
            "center/k0 length must match the grid dimension",
        ));
    }
    let (cx, cy) = (center[0], center.get(1).copied().unwrap_or(0.0));
    let (kx, ky) = (k0[0], k0.get(1).copied().unwrap_or(0.0));
    let mut psi = ComplexField::from_fn(grid, |x, y| {
        let r2 = (x - cx).powi(2) + if grid.dim() == 2 { (y - cy).powi(2) } else { 0.0 };
        let phase = kx * x + if grid.dim() == 2 { ky * y } else { 0.0 };
        Complex64::from_polar((-r2 / (4.0 * sigma0 * sigma0)).exp(), phase)
    });
    normalize(&mut psi);
    Ok(psi)
}

/// Plane wave `exp(i k x)` with `k = 2 pi mode / L` per axis; requires a
/// periodic grid so the mode fits exactly.
pub fn plane_wave(grid: &Grid, modes: &[i32]) -> Result<ComplexField> {
    if grid.boundary() != crate::grid::Boundary::Periodic {
        return Err(QhError::Unsupported("plane waves need a periodic grid".into()));
    }
    if modes.len() != grid.dim() {
        return Err(QhError::config("initial.modes", "length must match grid dimension"));
    }
    let kx = 2.0 * std::f64::consts::PI * modes[0] as f64 / grid.axis_extent(0);
    let ky = if grid.dim() == 2 {
        2.0 * std::f64::consts::PI * modes[1] as f64 / grid.axis_extent(1)
    } else {
        0.0
    };
    let x0 = grid.axis_min(0);
    let y0 = if grid.dim() == 2 { grid.axis_min(1) } else { 0.0 };
    let mut psi =
        ComplexField::from_fn(grid, |x, y| Complex64::from_polar(1.0, kx * (x - x0) + ky * (y - y0)));
    normalize(&mut psi);
    Ok(psi)
}

/// Ground state of the harmonic trap, `exp(-m omega x^2 / 2 hbar)` per axis.
pub fn harmonic_ground_state(
    grid: &Grid,
    omega_trap: f64,
    constants: &PhysicalConstants,
) -> Result<ComplexField> {
    if !(omega_trap > 0.0) {
        return Err(QhError::config("initial.omega_trap", "must be > 0"));
    }
    let a = constants.m * omega_trap / (2.0 * constants.hbar);
    let mut psi = ComplexField::from_fn(grid, |x, y| {
        let r2 = x * x + if grid.dim() == 2 { y * y } else { 0.0 };
        Complex64::new((-a * r2).exp(), 0.0)
    });
    normalize(&mut psi);
    Ok(psi)
}

/// Ground-state energy of the harmonic trap on this grid's dimension.
pub fn harmonic_ground_energy(grid: &Grid, omega_trap: f64, constants: &PhysicalConstants) -> f64 {
    0.5 * constants.hbar * omega_trap * grid.dim() as f64
}

fn normalize(psi: &mut ComplexField) {
    let n = psi.norm();
    psi.scale(1.0 / n.sqrt());
}

/// Width of the freely spreading packet,
/// `sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2)`.
pub fn free_packet_width(sigma0: f64, t: f64, constants: &PhysicalConstants) -> f64 {
    let tau = constants.hbar * t / (2.0 * constants.m * sigma0 * sigma0);
    sigma0 * (1.0 + tau * tau).sqrt()
}

/// Closed-form free evolution of the centred Gaussian packet (1D, k0 = 0).
pub fn free_packet_analytic(
    grid: &Grid,
    sigma0: f64,
    t: f64,
    constants: &PhysicalConstants,
) -> ComplexField {
    // psi(x,t) = (2 pi)^{-1/4} (sigma0 w)^{-1/2} exp(-x^2 / (4 sigma0^2 w)),
    // w = 1 + i hbar t / (2 m sigma0^2)
    let w = Complex64::new(1.0, constants.hbar * t / (2.0 * constants.m * sigma0 * sigma0));
    let norm = Complex64::new(1.0 / (2.0 * std::f64::consts::PI).powf(0.25), 0.0)
        / (Complex64::new(sigma0, 0.0) * w).sqrt();
    ComplexField::from_fn(grid, |x, _| {
        norm * (-Complex64::new(x * x, 0.0) / (4.0 * sigma0 * sigma0 * w)).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    #[test]
    fn packet_is_normalized_and_has_width_sigma0() {
        let g = Grid::line(-12.0, 12.0, 1024, Boundary::Periodic).unwrap();
        let psi = gaussian_packet(&g, &[0.0], 1.5, &[0.0]).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-10);
        // second moment of |psi|^2 = sigma0^2
        let var: f64 = (0..g.len())
            .map(|i| {
                let x = g.x(i);
                x * x * psi.data[i].norm_sqr() * g.quad_weight(i)
            })
            .sum();
        assert!((var - 2.25).abs() < 1e-8, "var {var}");
    }

    #[test]
    fn analytic_packet_matches_initial_state() {
        let c = PhysicalConstants::default();
        let g = Grid::line(-15.0, 15.0, 512, Boundary::Periodic).unwrap();
        let psi0 = gaussian_packet(&g, &[0.0], 1.0, &[0.0]).unwrap();
        let exact = free_packet_analytic(&g, 1.0, 0.0, &c);
        for i in 0..g.len() {
            assert!((psi0.data[i] - exact.data[i]).norm() < 1e-8);
        }
    }

    #[test]
    fn plane_wave_needs_periodic() {
        let g = Grid::line(-1.0, 1.0, 32, Boundary::Reflecting).unwrap();
        assert!(plane_wave(&g, &[1]).is_err());
    }
}
