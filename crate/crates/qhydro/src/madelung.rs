//! Polar (Madelung) decomposition of wave fields and the quantum potential.
//!
//! A wave function is split as `psi = sqrt(rho) * exp(i S / hbar)`; the
//! density `rho`, unwrapped action `S`, and log-amplitude `C_rho = ln(rho)/2`
//! are the working variables of every hydrodynamic diagnostic here.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::{ComplexField, ScalarField};
use crate::grid::Grid;
use crate::ops;

/// Density floor, as a fraction of `max(rho)`. Below it the phase and the
/// quantum potential are masked rather than extrapolated: `Q` diverges at
/// wave-function nodes and masking keeps diagnostics honest.
pub const RHO_FLOOR_FRACTION: f64 = 1e-12;

/// Fraction of masked nodes above which `to_polar` attaches a warning.
pub const DEFAULT_NODE_WARN_FRACTION: f64 = 0.01;

/// Wave function together with its polar factors on one grid.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: Grid,
    pub psi: Vec<Complex64>,
    /// `|psi|^2`, always >= 0.
    pub rho: Vec<f64>,
    /// Unwrapped action, `hbar * unwrap(arg psi)`.
    pub s: Vec<f64>,
    /// `ln(rho) / 2`, evaluated with the floored density under the mask.
    pub c_rho: Vec<f64>,
    /// True where `rho` fell below the density floor.
    pub node_mask: Vec<bool>,
    /// False when 2D unwrapping hit a phase vortex and the action column
    /// sweep is not globally consistent.
    pub phase_valid: bool,
    pub warnings: Vec<String>,
}

impl WaveField {
    pub fn rho_field(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: self.rho.clone(),
        }
    }

    pub fn s_field(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: self.s.clone(),
        }
    }

    pub fn rho_floor(&self) -> f64 {
        RHO_FLOOR_FRACTION * self.rho.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    /// Build a wave field from polar data, recomputing `psi`.
    pub fn from_polar(rho: ScalarField, s: ScalarField, constants: &PhysicalConstants) -> Result<Self> {
        if !rho.grid.same_layout(&s.grid) {
            return Err(QhError::Grid("rho and S live on different grids".into()));
        }
        if !rho.is_finite() || !s.is_finite() {
            return Err(QhError::NonFinite("from_polar input".into()));
        }
        if rho.data.iter().any(|&v| v < 0.0) {
            return Err(QhError::NonFinite("negative density".into()));
        }
        let floor = RHO_FLOOR_FRACTION * rho.max();
        let psi: Vec<Complex64> = rho
            .data
            .iter()
            .zip(&s.data)
            .map(|(&r, &sv)| Complex64::from_polar(r.sqrt(), sv / constants.hbar))
            .collect();
        let node_mask: Vec<bool> = rho.data.iter().map(|&r| r < floor).collect();
        let c_rho = rho
            .data
            .iter()
            .map(|&r| 0.5 * r.max(floor.max(f64::MIN_POSITIVE)).ln())
            .collect();
        Ok(WaveField {
            grid: rho.grid,
            psi,
            rho: rho.data,
            s: s.data,
            c_rho,
            node_mask,
            phase_valid: true,
            warnings: Vec::new(),
        })
    }
}

/// Reassemble `sqrt(rho) * exp(i S / hbar)`.
pub fn recompose(wf: &WaveField, constants: &PhysicalConstants) -> ComplexField {
    ComplexField {
        grid: wf.grid.clone(),
        data: wf
            .rho
            .iter()
            .zip(&wf.s)
            .map(|(&r, &s)| Complex64::from_polar(r.sqrt(), s / constants.hbar))
            .collect(),
    }
}

/// Polar decomposition with default node-warning threshold.
pub fn to_polar(psi: &ComplexField, constants: &PhysicalConstants) -> Result<WaveField> {
    to_polar_with_node_warn(psi, constants, DEFAULT_NODE_WARN_FRACTION)
}

/// Like [`to_polar`], but a phase vortex does not abort: the field comes
/// back with `phase_valid = false` and a warning instead. Evolution
/// snapshots use this so a 2D run with nodes still records its density.
pub fn to_polar_lossy(psi: &ComplexField, constants: &PhysicalConstants) -> Result<WaveField> {
    match to_polar(psi, constants) {
        Ok(wf) => Ok(wf),
        Err(QhError::PhaseUnwrap(msg)) => {
            let mut wf = to_polar_unchecked(psi, constants)?;
            wf.phase_valid = false;
            wf.warnings.push(format!("action not globally unwrapped: {msg}"));
            Ok(wf)
        }
        Err(e) => Err(e),
    }
}

fn to_polar_unchecked(psi: &ComplexField, constants: &PhysicalConstants) -> Result<WaveField> {
    // column sweep without the row consistency check
    let grid = psi.grid.clone();
    let rho: Vec<f64> = psi.data.iter().map(|v| v.norm_sqr()).collect();
    let floor = RHO_FLOOR_FRACTION * rho.iter().fold(0.0f64, |m, &v| m.max(v));
    let raw: Vec<f64> = psi.data.iter().map(|v| v.arg()).collect();
    let node_mask: Vec<bool> = rho.iter().map(|&r| r < floor).collect();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut phase = vec![0.0; raw.len()];
    phase[0] = raw[0];
    for ix in 1..nx {
        phase[ix] = phase[ix - 1] + wrap_angle(raw[ix] - raw[ix - 1]);
    }
    for ix in 0..nx {
        for iy in 1..ny {
            let i = iy * nx + ix;
            phase[i] = phase[i - nx] + wrap_angle(raw[i] - raw[i - nx]);
        }
    }
    let s = phase.iter().map(|&p| constants.hbar * p).collect();
    let c_rho = rho
        .iter()
        .map(|&r| 0.5 * r.max(floor.max(f64::MIN_POSITIVE)).ln())
        .collect();
    Ok(WaveField {
        grid,
        psi: psi.data.clone(),
        rho,
        s,
        c_rho,
        node_mask,
        phase_valid: true,
        warnings: Vec::new(),
    })
}

pub fn to_polar_with_node_warn(
    psi: &ComplexField,
    constants: &PhysicalConstants,
    node_warn_fraction: f64,
) -> Result<WaveField> {
    if !psi.is_finite() {
        return Err(QhError::NonFinite("to_polar input psi".into()));
    }
    let grid = psi.grid.clone();
    let rho: Vec<f64> = psi.data.iter().map(|v| v.norm_sqr()).collect();
    let rho_max = rho.iter().fold(0.0f64, |m, &v| m.max(v));
    if rho_max == 0.0 {
        return Err(QhError::NonFinite("to_polar: psi vanishes everywhere".into()));
    }
    let floor = RHO_FLOOR_FRACTION * rho_max;
    let node_mask: Vec<bool> = rho.iter().map(|&r| r < floor).collect();

    let raw: Vec<f64> = psi.data.iter().map(|v| v.arg()).collect();
    let mut warnings = Vec::new();
    // tails of a localized state are masked but harmless; a genuine node
    // is a masked cell with live density on both sides
    let interior = interior_node_count(&grid, &node_mask);
    if interior as f64 > node_warn_fraction * grid.len() as f64 {
        warnings.push("phase undefined at interior density nodes".to_string());
    }

    let (phase, phase_valid) = match grid.dim() {
        1 => (unwrap_1d(&raw), true),
        _ => unwrap_2d(&grid, &raw, &node_mask)?,
    };

    let s: Vec<f64> = phase.iter().map(|&p| constants.hbar * p).collect();
    let c_rho: Vec<f64> = rho
        .iter()
        .map(|&r| 0.5 * r.max(floor.max(f64::MIN_POSITIVE)).ln())
        .collect();

    Ok(WaveField {
        grid,
        psi: psi.data.clone(),
        rho,
        s,
        c_rho,
        node_mask,
        phase_valid,
        warnings,
    })
}

fn interior_node_count(grid: &Grid, mask: &[bool]) -> usize {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut count = 0;
    for iy in 0..ny {
        for ix in 0..nx {
            if !mask[iy * nx + ix] {
                continue;
            }
            let live_lr = ix > 0 && ix + 1 < nx && !mask[iy * nx + ix - 1] && !mask[iy * nx + ix + 1];
            let live_ud = ny > 1
                && iy > 0
                && iy + 1 < ny
                && !mask[(iy - 1) * nx + ix]
                && !mask[(iy + 1) * nx + ix];
            if live_lr || live_ud {
                count += 1;
            }
        }
    }
    count
}

/// Wrap into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

fn unwrap_1d(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    out.push(raw[0]);
    for i in 1..raw.len() {
        let prev = out[i - 1];
        out.push(prev + wrap_angle(raw[i] - raw[i - 1]));
    }
    out
}

/// Row-major sweep from the origin: unwrap row 0 along x, then every
/// column along y. A residual branch mismatch greater than pi along any
/// row signals a phase vortex and aborts.
fn unwrap_2d(grid: &Grid, raw: &[f64], node_mask: &[bool]) -> Result<(Vec<f64>, bool)> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = vec![0.0; raw.len()];

    out[0] = raw[0];
    for ix in 1..nx {
        out[ix] = out[ix - 1] + wrap_angle(raw[ix] - raw[ix - 1]);
    }
    for ix in 0..nx {
        for iy in 1..ny {
            let i = iy * nx + ix;
            let below = (iy - 1) * nx + ix;
            out[i] = out[below] + wrap_angle(raw[i] - raw[below]);
        }
    }

    // Consistency along rows: the column sweep must agree with the wrapped
    // row increment wherever the phase is defined.
    for iy in 1..ny {
        for ix in 1..nx {
            let i = iy * nx + ix;
            let left = iy * nx + ix - 1;
            if node_mask[i] || node_mask[left] {
                continue;
            }
            let expected = wrap_angle(raw[i] - raw[left]);
            let got = out[i] - out[left];
            if (got - expected).abs() > PI {
                return Err(QhError::PhaseUnwrap(format!(
                    "branch mismatch at cell ({ix}, {iy}): vortex in psi; supply the solenoidal velocity explicitly"
                )));
            }
        }
    }
    Ok((out, true))
}

/// Gradient of the action treating it as a phase: neighbour differences are
/// re-wrapped modulo `2 pi hbar`, which makes the periodic seam exact.
pub fn phase_gradient(grid: &Grid, s: &[f64], hbar: f64) -> Vec<Vec<f64>> {
    (0..grid.dim())
        .map(|axis| phase_gradient_axis(grid, s, hbar, axis))
        .collect()
}

fn wrap_action(ds: f64, hbar: f64) -> f64 {
    hbar * wrap_angle(ds / hbar)
}

fn phase_gradient_axis(grid: &Grid, s: &[f64], hbar: f64, axis: usize) -> Vec<f64> {
    let h = grid.spacing(axis);
    let nx = grid.nx();
    let n_axis = grid.axis_len(axis);
    let stride = if axis == 0 { 1 } else { nx };
    let mut out = vec![0.0; s.len()];
    let periodic = grid.boundary() == crate::grid::Boundary::Periodic;
    for i in 0..s.len() {
        let pos = if axis == 0 { i % nx } else { i / nx };
        let (fwd, bwd) = if periodic {
            let ip = if pos + 1 == n_axis { i + stride - n_axis * stride } else { i + stride };
            let im = if pos == 0 { i + n_axis * stride - stride } else { i - stride };
            (
                wrap_action(s[ip] - s[i], hbar),
                wrap_action(s[i] - s[im], hbar),
            )
        } else if pos == 0 {
            // one-sided second order from wrapped forward differences:
            // (-3 f0 + 4 f1 - f2) / 2h = (3 d1 - d2) / 2h
            let d = wrap_action(s[i + stride] - s[i], hbar);
            let d2 = wrap_action(s[i + 2 * stride] - s[i + stride], hbar);
            out[i] = (3.0 * d - d2) / (2.0 * h);
            continue;
        } else if pos == n_axis - 1 {
            let d = wrap_action(s[i] - s[i - stride], hbar);
            let d2 = wrap_action(s[i - stride] - s[i - 2 * stride], hbar);
            out[i] = (3.0 * d - d2) / (2.0 * h);
            continue;
        } else {
            (
                wrap_action(s[i + stride] - s[i], hbar),
                wrap_action(s[i] - s[i - stride], hbar),
            )
        };
        out[i] = (fwd + bwd) / (2.0 * h);
    }
    out
}

/// Laplacian of the action from wrapped half-step differences.
pub fn phase_laplacian(grid: &Grid, s: &[f64], hbar: f64) -> Vec<f64> {
    let mut out = vec![0.0; s.len()];
    for axis in 0..grid.dim() {
        let h = grid.spacing(axis);
        let nx = grid.nx();
        let n_axis = grid.axis_len(axis);
        let stride = if axis == 0 { 1 } else { nx };
        let periodic = grid.boundary() == crate::grid::Boundary::Periodic;
        for i in 0..s.len() {
            let pos = if axis == 0 { i % nx } else { i / nx };
            let d2 = if periodic {
                let ip = if pos + 1 == n_axis { i + stride - n_axis * stride } else { i + stride };
                let im = if pos == 0 { i + n_axis * stride - stride } else { i - stride };
                (wrap_action(s[ip] - s[i], hbar) - wrap_action(s[i] - s[im], hbar)) / (h * h)
            } else if pos == 0 || pos == n_axis - 1 {
                // one-sided from wrapped first differences, first order is
                // enough at a hard wall
                let (a, b, c) = if pos == 0 {
                    (i, i + stride, i + 2 * stride)
                } else {
                    (i, i - stride, i - 2 * stride)
                };
                (wrap_action(s[c] - s[b], hbar) - wrap_action(s[b] - s[a], hbar)) / (h * h)
            } else {
                (wrap_action(s[i + stride] - s[i], hbar) - wrap_action(s[i] - s[i - stride], hbar))
                    / (h * h)
            };
            out[i] += d2;
        }
    }
    out
}

/// The two pressure contributions of the diffusion flux.
#[derive(Debug, Clone)]
pub struct PressureTerms {
    /// `-D^2 * laplacian(rho_M)` with `rho_M = m rho`.
    pub p1: ScalarField,
    /// `(D^2 / 2) * |grad rho_M|^2 / rho_M`.
    pub p2: ScalarField,
    /// True when the `p2` denominator was floored anywhere.
    pub floored: bool,
}

pub fn pressure_terms(rho: &ScalarField, constants: &PhysicalConstants) -> Result<PressureTerms> {
    if !rho.is_finite() {
        return Err(QhError::NonFinite("pressure_terms rho".into()));
    }
    let d2 = constants.diffusion() * constants.diffusion();
    let m = constants.m;
    let floor = RHO_FLOOR_FRACTION * rho.max();

    let lap = ops::laplacian(rho);
    let p1 = lap.map(|v| -d2 * m * v);

    let grad = ops::gradient(rho);
    let grad_sq = grad.norm_sqr_field();
    let mut floored = false;
    let p2_data: Vec<f64> = grad_sq
        .data
        .iter()
        .zip(&rho.data)
        .map(|(&g2, &r)| {
            let denom = if r < floor {
                floored = true;
                floor.max(f64::MIN_POSITIVE)
            } else {
                r
            };
            0.5 * d2 * m * g2 / denom
        })
        .collect();

    Ok(PressureTerms {
        p1,
        p2: ScalarField {
            grid: rho.grid.clone(),
            data: p2_data,
        },
        floored,
    })
}

/// Quantum potential with a validity mask; masked points carry 0.
#[derive(Debug, Clone)]
pub struct QuantumPotential {
    pub q: ScalarField,
    /// True where the density floor made the value meaningless.
    pub mask: Vec<bool>,
}

/// Quantum potential through the pressure chain, `(P1 + P2) / rho`.
///
/// This is the discrete route that keeps the pressure-term identity exact;
/// [`quantum_potential_amplitude_form`] is the independent cross-check.
pub fn quantum_potential(rho: &ScalarField, constants: &PhysicalConstants) -> Result<QuantumPotential> {
    let terms = pressure_terms(rho, constants)?;
    let floor = RHO_FLOOR_FRACTION * rho.max();
    let mut mask = vec![false; rho.data.len()];
    let data: Vec<f64> = rho
        .data
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if r < floor {
                mask[i] = true;
                0.0
            } else {
                (terms.p1.data[i] + terms.p2.data[i]) / r
            }
        })
        .collect();
    Ok(QuantumPotential {
        q: ScalarField {
            grid: rho.grid.clone(),
            data,
        },
        mask,
    })
}

/// Quantum potential in amplitude form, `-2 m D^2 laplacian(R) / R` with
/// `R = sqrt(rho)`; equal to `-(hbar^2 / 2m) laplacian(R) / R`.
pub fn quantum_potential_amplitude_form(
    rho: &ScalarField,
    constants: &PhysicalConstants,
) -> Result<QuantumPotential> {
    if !rho.is_finite() {
        return Err(QhError::NonFinite("quantum_potential rho".into()));
    }
    let amp = rho.map(f64::sqrt);
    let lap = ops::laplacian(&amp);
    let floor_r = (RHO_FLOOR_FRACTION * rho.max()).sqrt();
    let coeff = -2.0 * constants.m * constants.diffusion() * constants.diffusion();
    let mut mask = vec![false; rho.data.len()];
    let data = amp
        .data
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if r < floor_r {
                mask[i] = true;
                0.0
            } else {
                coeff * lap.data[i] / r
            }
        })
        .collect();
    Ok(QuantumPotential {
        q: ScalarField {
            grid: rho.grid.clone(),
            data,
        },
        mask,
    })
}
