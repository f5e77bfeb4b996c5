//! Unitary evolution of a wave function under a static external potential.
//!
//! Two schemes: Crank-Nicolson (Cayley form, tridiagonal solves; directional
//! splitting in 2D so every factor stays exactly unitary) and split-step
//! Fourier (periodic grids only). Both are unconditionally stable; the `dt`
//! guard below is about accuracy, not stability.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::{ComplexField, ScalarField};
use crate::grid::{Boundary, Grid};
use crate::madelung::{self, WaveField};
use crate::potential::PotentialSpec;
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    CrankNicolson,
    SplitStepFourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
    pub snapshot_stride: usize,
}

impl EvolutionConfig {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(QhError::config("evolution.dt", "must be finite and > 0"));
        }
        if self.steps < 1 {
            return Err(QhError::config("evolution.steps", "must be >= 1"));
        }
        if self.snapshot_stride < 1 {
            return Err(QhError::config("evolution.snapshot_stride", "must be >= 1"));
        }
        if self.scheme == Scheme::SplitStepFourier && grid.boundary() != Boundary::Periodic {
            return Err(QhError::config(
                "evolution.scheme",
                "split_step_fourier needs a periodic grid",
            ));
        }
        Ok(())
    }
}

/// Snapshot sequence of an evolution run.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub snapshots: Vec<WaveField>,
    pub times: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Evolution {
    pub fn snapshot_dt(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }
}

const NORM_PRECONDITION_TOL: f64 = 1e-8;
const NORM_DRIFT_ABORT: f64 = 1e-6;
const BOUNDARY_DENSITY_TOL: f64 = 1e-8;

/// Evolve `psi0` and return polar snapshots every `snapshot_stride` steps
/// (the initial state and the final step are always included).
pub fn evolve(
    psi0: &ComplexField,
    potential: &PotentialSpec,
    cfg: &EvolutionConfig,
    constants: &PhysicalConstants,
) -> Result<Evolution> {
    let grid = psi0.grid.clone();
    cfg.validate(&grid)?;
    constants.validate()?;
    if !psi0.is_finite() {
        return Err(QhError::NonFinite("evolve initial state".into()));
    }
    let norm0 = psi0.norm();
    if (norm0 - 1.0).abs() > NORM_PRECONDITION_TOL {
        return Err(QhError::config(
            "initial",
            format!("psi0 must be normalized: integral rho = {norm0:.3e}"),
        ));
    }

    let u = potential.evaluate(&grid, constants)?;
    let mut warnings = Vec::new();
    let dx_min = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::MAX, f64::min);
    if cfg.dt > dx_min * dx_min * constants.m / constants.hbar {
        warnings.push(format!(
            "dt = {} exceeds dx^2 m / hbar = {:.3e}; phase accuracy degrades (stability unaffected)",
            cfg.dt,
            dx_min * dx_min * constants.m / constants.hbar
        ));
    }

    let mut stepper: Box<dyn Stepper> = match cfg.scheme {
        Scheme::CrankNicolson => Box::new(CrankNicolson::new(&grid, &u, cfg.dt, constants)),
        Scheme::SplitStepFourier => Box::new(SplitStep::new(&grid, &u, cfg.dt, constants)),
    };

    let mut psi = psi0.clone();
    let mut snapshots = Vec::new();
    let mut times = Vec::new();
    let mut aligner = PhaseAligner::default();
    let mut boundary_warned = false;

    let mut record =
        |psi: &ComplexField, t: f64, snapshots: &mut Vec<WaveField>, times: &mut Vec<f64>, warnings: &mut Vec<String>| -> Result<()> {
            let mut wf = madelung::to_polar_lossy(psi, constants)?;
            aligner.align(&mut wf, constants);
            if grid.boundary() == Boundary::Reflecting && !boundary_warned {
                let max_rho = wf.rho.iter().fold(0.0f64, |m, &v| m.max(v));
                if boundary_density(&grid, &wf.rho) > BOUNDARY_DENSITY_TOL * max_rho {
                    warnings.push(format!(
                        "density at the wall exceeds {BOUNDARY_DENSITY_TOL:.0e} of max at t = {t}; \
                         the run outgrew its box"
                    ));
                    boundary_warned = true;
                }
            }
            snapshots.push(wf);
            times.push(t);
            Ok(())
        };

    record(&psi, 0.0, &mut snapshots, &mut times, &mut warnings)?;
    for step in 1..=cfg.steps {
        stepper.advance(&mut psi.data)?;
        if step % cfg.snapshot_stride == 0 || step == cfg.steps {
            let norm = psi.norm();
            if !norm.is_finite() {
                return Err(QhError::Numeric(format!("norm became non-finite at step {step}")));
            }
            if (norm - 1.0).abs() > NORM_DRIFT_ABORT {
                return Err(QhError::Numeric(format!(
                    "normalization drift {:.3e} at step {step}",
                    (norm - 1.0).abs()
                )));
            }
            record(&psi, step as f64 * cfg.dt, &mut snapshots, &mut times, &mut warnings)?;
        }
    }

    for s in &snapshots {
        for w in &s.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
    }
    Ok(Evolution {
        snapshots,
        times,
        warnings,
    })
}

/// Quadrature of the density; 1 for a normalized state.
pub fn norm(wf: &WaveField) -> f64 {
    wf.grid.integrate(&wf.rho)
}

/// Discrete expectation of the Hamiltonian, `sum psi* (H psi) w`.
pub fn energy_expectation(
    psi: &ComplexField,
    u: &ScalarField,
    constants: &PhysicalConstants,
) -> f64 {
    let h_psi = apply_hamiltonian(&psi.grid, &psi.data, &u.data, constants);
    psi.data
        .iter()
        .zip(&h_psi)
        .enumerate()
        .map(|(i, (p, hp))| (p.conj() * hp).re * psi.grid.quad_weight(i))
        .sum()
}

fn apply_hamiltonian(
    grid: &Grid,
    psi: &[Complex64],
    u: &[f64],
    constants: &PhysicalConstants,
) -> Vec<Complex64> {
    let kin = -constants.hbar * constants.hbar / (2.0 * constants.m);
    let mut out: Vec<Complex64> = psi.iter().zip(u).map(|(p, &uv)| p * uv).collect();
    for axis in 0..grid.dim() {
        let h2 = grid.spacing(axis) * grid.spacing(axis);
        let stride = if axis == 0 { 1 } else { grid.nx() };
        let n_axis = grid.axis_len(axis);
        for i in 0..psi.len() {
            let pos = if axis == 0 { i % grid.nx() } else { i / grid.nx() };
            let prev = if pos == 0 {
                match grid.boundary() {
                    Boundary::Periodic => psi[i + (n_axis - 1) * stride],
                    Boundary::Reflecting => Complex64::default(),
                }
            } else {
                psi[i - stride]
            };
            let next = if pos == n_axis - 1 {
                match grid.boundary() {
                    Boundary::Periodic => psi[i - (n_axis - 1) * stride],
                    Boundary::Reflecting => Complex64::default(),
                }
            } else {
                psi[i + stride]
            };
            out[i] += kin * (next - 2.0 * psi[i] + prev) / h2;
        }
    }
    out
}

fn boundary_density(grid: &Grid, rho: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    let (nx, ny) = (grid.nx(), grid.ny());
    if grid.dim() == 1 {
        worst = worst.max(rho[0]).max(rho[nx - 1]);
    } else {
        for ix in 0..nx {
            worst = worst.max(rho[ix]).max(rho[(ny - 1) * nx + ix]);
        }
        for iy in 0..ny {
            worst = worst.max(rho[iy * nx]).max(rho[iy * nx + nx - 1]);
        }
    }
    worst
}

/// Keeps the action continuous in time: successive snapshots may only
/// differ by a multiple of `2 pi hbar` at the anchor point, which is fixed
/// to the first unmasked node of the first snapshot.
#[derive(Default)]
struct PhaseAligner {
    anchor: Option<usize>,
    prev_s: Option<f64>,
}

impl PhaseAligner {
    fn align(&mut self, wf: &mut WaveField, constants: &PhysicalConstants) {
        let two_pi_h = 2.0 * std::f64::consts::PI * constants.hbar;
        let anchor = *self
            .anchor
            .get_or_insert_with(|| wf.node_mask.iter().position(|&m| !m).unwrap_or(0));
        if wf.node_mask.get(anchor).copied().unwrap_or(false) {
            wf.warnings
                .push("phase anchor fell on a node; temporal alignment skipped".into());
            return;
        }
        if let Some(prev) = self.prev_s {
            let k = ((prev - wf.s[anchor]) / two_pi_h).round();
            if k != 0.0 {
                for s in &mut wf.s {
                    *s += k * two_pi_h;
                }
            }
        }
        self.prev_s = Some(wf.s[anchor]);
    }
}

trait Stepper {
    fn advance(&mut self, psi: &mut Vec<Complex64>) -> Result<()>;
}

/// One Cayley sweep along an axis: `(1 + i tau H_a / 2 hbar) psi' =
/// (1 - i tau H_a / 2 hbar) psi`, `H_a = -(hbar^2/2m) d_aa + U_a`.
struct AxisSweep {
    axis: usize,
    diag_a: Vec<Complex64>,
    diag_b: Vec<Complex64>,
    off_a: Complex64,
    off_b: Complex64,
    periodic: bool,
}

impl AxisSweep {
    fn new(grid: &Grid, u_axis: &[f64], tau: f64, constants: &PhysicalConstants, axis: usize) -> Self {
        let h = grid.spacing(axis);
        let lambda = Complex64::new(0.0, tau / (2.0 * constants.hbar));
        let k_off = -constants.hbar * constants.hbar / (2.0 * constants.m * h * h);
        let k_diag = -2.0 * k_off;
        let diag_a = u_axis
            .iter()
            .map(|&uv| 1.0 + lambda * (k_diag + uv))
            .collect();
        let diag_b = u_axis
            .iter()
            .map(|&uv| 1.0 - lambda * (k_diag + uv))
            .collect();
        AxisSweep {
            axis,
            diag_a,
            diag_b,
            off_a: lambda * k_off,
            off_b: -lambda * k_off,
            periodic: grid.boundary() == Boundary::Periodic,
        }
    }

    /// Apply to every line along `self.axis` of a row-major buffer.
    fn apply(&self, grid: &Grid, psi: &mut [Complex64], scratch: &mut Scratch) {
        let n_axis = grid.axis_len(self.axis);
        let (nx, ny) = (grid.nx(), grid.ny());
        let n_lines = if self.axis == 0 { ny } else { nx };
        for line in 0..n_lines {
            // gather
            for j in 0..n_axis {
                let idx = if self.axis == 0 { line * nx + j } else { j * nx + line };
                scratch.line[j] = psi[idx];
                scratch.diag_a[j] = self.diag_a[idx];
                scratch.diag_b[j] = self.diag_b[idx];
            }
            // rhs = B psi
            for j in 0..n_axis {
                let prev = if j == 0 {
                    if self.periodic { scratch.line[n_axis - 1] } else { Complex64::default() }
                } else {
                    scratch.line[j - 1]
                };
                let next = if j == n_axis - 1 {
                    if self.periodic { scratch.line[0] } else { Complex64::default() }
                } else {
                    scratch.line[j + 1]
                };
                scratch.rhs[j] = scratch.diag_b[j] * scratch.line[j] + self.off_b * (prev + next);
            }
            if self.periodic {
                cyclic_tridiag_solve(
                    &scratch.diag_a[..n_axis],
                    self.off_a,
                    &scratch.rhs[..n_axis],
                    &mut scratch.line[..n_axis],
                    &mut scratch.work,
                );
            } else {
                tridiag_solve(
                    &scratch.diag_a[..n_axis],
                    self.off_a,
                    &scratch.rhs[..n_axis],
                    &mut scratch.line[..n_axis],
                    &mut scratch.work,
                );
            }
            // scatter
            for j in 0..n_axis {
                let idx = if self.axis == 0 { line * nx + j } else { j * nx + line };
                psi[idx] = scratch.line[j];
            }
        }
    }
}

struct Scratch {
    line: Vec<Complex64>,
    rhs: Vec<Complex64>,
    diag_a: Vec<Complex64>,
    diag_b: Vec<Complex64>,
    work: Vec<Complex64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            line: vec![Complex64::default(); n],
            rhs: vec![Complex64::default(); n],
            diag_a: vec![Complex64::default(); n],
            diag_b: vec![Complex64::default(); n],
            work: vec![Complex64::default(); 6 * n],
        }
    }
}

struct CrankNicolson {
    grid: Grid,
    sweeps: Vec<AxisSweep>,
    scratch: Scratch,
}

impl CrankNicolson {
    fn new(grid: &Grid, u: &ScalarField, dt: f64, constants: &PhysicalConstants) -> Self {
        let sweeps = if grid.dim() == 1 {
            vec![AxisSweep::new(grid, &u.data, dt, constants, 0)]
        } else {
            // Symmetric directional splitting, half the potential per axis:
            // x(dt/2) y(dt) x(dt/2). Every factor is a Cayley transform of a
            // Hermitian operator, so the step is exactly unitary.
            let u_half: Vec<f64> = u.data.iter().map(|v| 0.5 * v).collect();
            vec![
                AxisSweep::new(grid, &u_half, 0.5 * dt, constants, 0),
                AxisSweep::new(grid, &u_half, dt, constants, 1),
                AxisSweep::new(grid, &u_half, 0.5 * dt, constants, 0),
            ]
        };
        let max_axis = (0..grid.dim()).map(|a| grid.axis_len(a)).max().unwrap();
        CrankNicolson {
            grid: grid.clone(),
            sweeps,
            scratch: Scratch::new(max_axis),
        }
    }
}

impl Stepper for CrankNicolson {
    fn advance(&mut self, psi: &mut Vec<Complex64>) -> Result<()> {
        for sweep in &self.sweeps {
            sweep.apply(&self.grid, psi, &mut self.scratch);
        }
        Ok(())
    }
}

struct SplitStep {
    grid: Grid,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl SplitStep {
    fn new(grid: &Grid, u: &ScalarField, dt: f64, constants: &PhysicalConstants) -> Self {
        let half_potential = u
            .data
            .iter()
            .map(|&uv| Complex64::from_polar(1.0, -uv * dt / (2.0 * constants.hbar)))
            .collect();
        let kx = spectral::wavenumbers(grid.nx(), grid.axis_extent(0));
        let ky = if grid.dim() == 2 {
            spectral::wavenumbers(grid.ny(), grid.axis_extent(1))
        } else {
            vec![0.0]
        };
        let mut kinetic = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                let k2 = kx[ix] * kx[ix] + ky[iy.min(ky.len() - 1)] * ky[iy.min(ky.len() - 1)];
                kinetic.push(Complex64::from_polar(
                    1.0,
                    -constants.hbar * k2 * dt / (2.0 * constants.m),
                ));
            }
        }
        SplitStep {
            grid: grid.clone(),
            half_potential,
            kinetic,
        }
    }
}

impl Stepper for SplitStep {
    fn advance(&mut self, psi: &mut Vec<Complex64>) -> Result<()> {
        for (p, ph) in psi.iter_mut().zip(&self.half_potential) {
            *p *= ph;
        }
        spectral::fft_nd(&self.grid, psi);
        for (p, ph) in psi.iter_mut().zip(&self.kinetic) {
            *p *= ph;
        }
        spectral::ifft_nd(&self.grid, psi);
        for (p, ph) in psi.iter_mut().zip(&self.half_potential) {
            *p *= ph;
        }
        Ok(())
    }
}

/// Thomas algorithm with constant off-diagonals and Dirichlet-style ends.
fn tridiag_solve(
    diag: &[Complex64],
    off: Complex64,
    rhs: &[Complex64],
    x: &mut [Complex64],
    work: &mut [Complex64],
) {
    let n = diag.len().min(rhs.len());
    let (c_prime, rest) = work.split_at_mut(n);
    let d_prime = &mut rest[..n];
    let mut denom = diag[0];
    c_prime[0] = off / denom;
    d_prime[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off * c_prime[i - 1];
        c_prime[i] = off / denom;
        d_prime[i] = (rhs[i] - off * d_prime[i - 1]) / denom;
    }
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
}

/// Cyclic tridiagonal solve (periodic wrap) via Sherman-Morrison.
fn cyclic_tridiag_solve(
    diag: &[Complex64],
    off: Complex64,
    rhs: &[Complex64],
    x: &mut [Complex64],
    work: &mut [Complex64],
) {
    let n = diag.len().min(rhs.len());
    let gamma = -diag[0];
    let (modified, rest) = work.split_at_mut(n);
    let (u, rest2) = rest.split_at_mut(n);
    let (z, thomas_work) = rest2.split_at_mut(n);

    for i in 0..n {
        modified[i] = diag[i];
    }
    modified[0] = diag[0] - gamma;
    modified[n - 1] = diag[n - 1] - off * off / gamma;

    for v in u.iter_mut() {
        *v = Complex64::default();
    }
    u[0] = gamma;
    u[n - 1] = off;

    // x <- A'^-1 rhs ; z <- A'^-1 u
    let modified_copy: Vec<Complex64> = modified.to_vec();
    tridiag_solve(&modified_copy, off, rhs, x, thomas_work);
    let u_copy: Vec<Complex64> = u.to_vec();
    tridiag_solve(&modified_copy, off, &u_copy, z, thomas_work);

    // v = (1, 0, ..., off/gamma)
    let v_dot_x = x[0] + (off / gamma) * x[n - 1];
    let v_dot_z = z[0] + (off / gamma) * z[n - 1];
    let factor = v_dot_x / (1.0 + v_dot_z);
    for i in 0..n {
        x[i] -= factor * z[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn tridiag_matches_dense() {
        let n = 12;
        let diag: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(3.0 + 0.1 * i as f64, 0.4))
            .collect();
        let off = Complex64::new(-0.7, 0.2);
        let rhs: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut x = vec![Complex64::default(); n];
        let mut work = vec![Complex64::default(); 6 * n];
        tridiag_solve(&diag, off, &rhs, &mut x, &mut work);
        for i in 0..n {
            let mut lhs = diag[i] * x[i];
            if i > 0 {
                lhs += off * x[i - 1];
            }
            if i + 1 < n {
                lhs += off * x[i + 1];
            }
            assert!((lhs - rhs[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn cyclic_tridiag_matches_dense() {
        let n = 10;
        let diag: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(4.0 - 0.05 * i as f64, -0.3))
            .collect();
        let off = Complex64::new(0.9, 0.1);
        let rhs: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 / (1.0 + i as f64), (i as f64).cos()))
            .collect();
        let mut x = vec![Complex64::default(); n];
        let mut work = vec![Complex64::default(); 6 * n];
        cyclic_tridiag_solve(&diag, off, &rhs, &mut x, &mut work);
        for i in 0..n {
            let lhs = diag[i] * x[i] + off * x[(i + 1) % n] + off * x[(i + n - 1) % n];
            assert!((lhs - rhs[i]).norm() < 1e-11, "row {i}");
        }
    }

    #[test]
    fn free_packet_spreads_analytically() {
        let c = consts();
        let g = Grid::line(-20.0, 20.0, 1024, Boundary::Periodic).unwrap();
        let sigma0 = 1.0;
        let psi0 = states::gaussian_packet(&g, &[0.0], sigma0, &[0.0]).unwrap();
        let t_final = 2.0 * c.m * sigma0 * sigma0 / c.hbar;
        let cfg = EvolutionConfig {
            dt: t_final / 1000.0,
            steps: 1000,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 1000,
        };
        let ev = evolve(&psi0, &PotentialSpec::Free, &cfg, &c).unwrap();
        let last = ev.snapshots.last().unwrap();
        let var: f64 = (0..g.len())
            .map(|i| g.x(i) * g.x(i) * last.rho[i] * g.quad_weight(i))
            .sum();
        let expected = states::free_packet_width(sigma0, t_final, &c);
        let got = var.sqrt();
        assert!(
            (got - expected).abs() / expected < 1e-4,
            "width {got} vs {expected}"
        );
    }

    #[test]
    fn harmonic_ground_state_is_stationary() {
        let c = consts();
        // fine spacing: the analytic eigenstate must be an eigenvector of
        // the discrete Hamiltonian to the asserted accuracy
        let g = Grid::line(-10.0, 10.0, 65536, Boundary::Reflecting).unwrap();
        let psi0 = states::harmonic_ground_state(&g, 1.0, &c).unwrap();
        let cfg = EvolutionConfig {
            dt: 1e-3,
            steps: 1000,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 1000,
        };
        let ev = evolve(&psi0, &PotentialSpec::Harmonic { omega_trap: 1.0 }, &cfg, &c).unwrap();
        let last = ev.snapshots.last().unwrap();
        let mut worst = 0.0f64;
        for i in 0..g.len() {
            worst = worst.max((last.rho[i].sqrt() - psi0.data[i].norm()).abs());
        }
        assert!(worst < 1e-8, "amplitude drift {worst}");
    }

    #[test]
    fn plane_wave_density_is_static_action_advances() {
        let c = consts();
        let g = Grid::line(0.0, 16.0, 256, Boundary::Periodic).unwrap();
        let psi0 = states::plane_wave(&g, &[2]).unwrap();
        let cfg = EvolutionConfig {
            dt: 5e-3,
            steps: 200,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 50,
        };
        let ev = evolve(&psi0, &PotentialSpec::Free, &cfg, &c).unwrap();
        let rho0 = ev.snapshots[0].rho.clone();
        for snap in &ev.snapshots {
            for (a, b) in snap.rho.iter().zip(&rho0) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        // action at the anchor decreases linearly: dS/dt = -E_k (discrete)
        let k = 2.0 * 2.0 * std::f64::consts::PI / 16.0;
        let dx = g.dx();
        let e_k_discrete = c.hbar * c.hbar * (2.0 - 2.0 * (k * dx).cos()) / (2.0 * c.m * dx * dx);
        let times = &ev.times;
        let s0 = &ev.snapshots;
        for w in 1..s0.len() {
            let ds_dt = (s0[w].s[0] - s0[w - 1].s[0]) / (times[w] - times[w - 1]);
            // CN phase advance differs from -E_k at O(dt^2)
            assert!(
                (ds_dt + e_k_discrete).abs() < 1e-3 * e_k_discrete.abs(),
                "dS/dt {ds_dt} vs {e_k_discrete}"
            );
        }
    }

    #[test]
    fn unitarity_both_schemes() {
        let c = consts();
        let g = Grid::line(-15.0, 15.0, 512, Boundary::Periodic).unwrap();
        let psi0 = states::gaussian_packet(&g, &[0.0], 1.0, &[2.0]).unwrap();
        for scheme in [Scheme::CrankNicolson, Scheme::SplitStepFourier] {
            let cfg = EvolutionConfig {
                dt: 2e-3,
                steps: 1000,
                scheme,
                snapshot_stride: 1000,
            };
            let ev = evolve(&psi0, &PotentialSpec::Free, &cfg, &c).unwrap();
            let n = norm(ev.snapshots.last().unwrap());
            assert!((n - 1.0).abs() < 1e-9, "{scheme:?}: norm {n}");
        }
    }

    #[test]
    fn energy_conserved_harmonic() {
        let c = consts();
        let g = Grid::line(-12.0, 12.0, 512, Boundary::Periodic).unwrap();
        let psi0 = states::gaussian_packet(&g, &[1.0], 0.8, &[0.0]).unwrap();
        let pot = PotentialSpec::Harmonic { omega_trap: 1.0 };
        let u = pot.evaluate(&g, &c).unwrap();
        let e0 = energy_expectation(&psi0, &u, &c);
        let cfg = EvolutionConfig {
            dt: 1e-3,
            steps: 1000,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 1000,
        };
        let ev = evolve(&psi0, &pot, &cfg, &c).unwrap();
        let last = ComplexField::new(g.clone(), ev.snapshots.last().unwrap().psi.clone()).unwrap();
        let e1 = energy_expectation(&last, &u, &c);
        assert!(
            ((e1 - e0) / e0).abs() < 1e-6,
            "energy drift {} of {}",
            e1 - e0,
            e0
        );
    }

    #[test]
    fn schemes_cross_check_on_free_packet() {
        let c = consts();
        let g = Grid::line(-20.0, 20.0, 8192, Boundary::Periodic).unwrap();
        let psi0 = states::gaussian_packet(&g, &[0.0], 1.0, &[0.0]).unwrap();
        let cfg = |scheme| EvolutionConfig {
            dt: 1e-3,
            steps: 500,
            scheme,
            snapshot_stride: 500,
        };
        let cn = evolve(&psi0, &PotentialSpec::Free, &cfg(Scheme::CrankNicolson), &c).unwrap();
        let ss = evolve(&psi0, &PotentialSpec::Free, &cfg(Scheme::SplitStepFourier), &c).unwrap();
        let a = &cn.snapshots.last().unwrap().psi;
        let b = &ss.snapshots.last().unwrap().psi;
        let l2: f64 = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| (x - y).norm_sqr() * g.quad_weight(i))
            .sum::<f64>()
            .sqrt();
        assert!(l2 < 1e-5, "scheme disagreement {l2}");
    }

    #[test]
    fn norm_quadrature_and_scaling() {
        let c = consts();
        let g = Grid::line(-12.0, 12.0, 256, Boundary::Periodic).unwrap();
        let psi = states::gaussian_packet(&g, &[0.0], 1.0, &[0.0]).unwrap();
        let wf = madelung::to_polar(&psi, &c).unwrap();
        assert!((norm(&wf) - 1.0).abs() < 1e-10);
        let mut doubled = psi.clone();
        doubled.scale(2.0);
        let wf2 = madelung::to_polar(&doubled, &c).unwrap();
        assert!((norm(&wf2) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn accuracy_warning_when_dt_outruns_the_grid() {
        let c = consts();
        let g = Grid::line(-10.0, 10.0, 64, Boundary::Periodic).unwrap();
        let psi0 = states::gaussian_packet(&g, &[0.0], 2.0, &[0.0]).unwrap();
        let cfg = EvolutionConfig {
            dt: 1.0, // far beyond dx^2 m / hbar
            steps: 2,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 1,
        };
        let ev = evolve(&psi0, &PotentialSpec::Free, &cfg, &c).unwrap();
        assert!(ev.warnings.iter().any(|w| w.contains("accuracy")));
    }

    #[test]
    fn rejects_unnormalized_and_bad_config() {
        let c = consts();
        let g = Grid::line(-5.0, 5.0, 64, Boundary::Periodic).unwrap();
        let mut psi = states::gaussian_packet(&g, &[0.0], 1.0, &[0.0]).unwrap();
        psi.scale(2.0);
        let cfg = EvolutionConfig {
            dt: 1e-3,
            steps: 10,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 1,
        };
        assert!(evolve(&psi, &PotentialSpec::Free, &cfg, &c).is_err());

        let bad = EvolutionConfig { dt: 0.0, ..cfg };
        assert!(matches!(
            bad.validate(&g),
            Err(QhError::Config { field, .. }) if field == "evolution.dt"
        ));

        let g_refl = Grid::line(-5.0, 5.0, 64, Boundary::Reflecting).unwrap();
        let ss = EvolutionConfig {
            scheme: Scheme::SplitStepFourier,
            ..cfg
        };
        assert!(ss.validate(&g_refl).is_err());
    }

    #[test]
    fn double_slit_2d_interference_and_unitarity() {
        let c = consts();
        let g = Grid::plane((-12.0, 12.0), 128, (-8.0, 8.0), 96, Boundary::Periodic).unwrap();
        let psi0 = states::gaussian_packet(&g, &[-6.0, 0.0], 1.2, &[3.0, 0.0]).unwrap();
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
        let ev = evolve(&psi0, &pot, &cfg, &c).unwrap();
        let last = ev.snapshots.last().unwrap();
        assert!((norm(last) - 1.0).abs() < 1e-9);
        // transmitted density shows fringes: count maxima along a screen line
        let screen_ix = ((8.0 - g.axis_min(0)) / g.dx()).round() as usize;
        let mut profile = Vec::new();
        for iy in 0..g.ny() {
            profile.push(last.rho[g.idx(screen_ix, iy)]);
        }
        let peak_count = profile
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] > w[2] && w[1] > 1e-6)
            .count();
        assert!(peak_count >= 3, "expected interference fringes, got {peak_count} peaks");
    }
}
