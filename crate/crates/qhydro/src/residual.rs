//! Residual diagnostics of the quantum Hamilton-Jacobi and continuity
//! equations, evaluated on wave-field snapshots.

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::{ScalarField, VectorField};
use crate::flow::FlowField;
use crate::madelung::{
    phase_gradient, phase_laplacian, quantum_potential_amplitude_form, WaveField,
};
use crate::ops;

/// Quantum Hamilton-Jacobi residual
/// `dS/dt + (grad S)^2 / 2m + (m/2) v_r^2 + U + Q - C0`.
///
/// `s_dot` is supplied by the caller: zeros for a stationary state written
/// without its time phase, or a centred difference from a snapshot pair
/// (see [`hamilton_jacobi_residual_from_pair`]). The fluctuating-viscosity
/// term is excluded here (its time average vanishes); see
/// [`viscous_action_term`] for the reported extra term. Masked nodes carry 0.
pub fn hamilton_jacobi_residual(
    wf: &WaveField,
    s_dot: &ScalarField,
    v_r: Option<&VectorField>,
    u: &ScalarField,
    constants: &PhysicalConstants,
    c0: f64,
) -> Result<ScalarField> {
    if !s_dot.grid.same_layout(&wf.grid) || !u.grid.same_layout(&wf.grid) {
        return Err(QhError::Grid("s_dot / U grid mismatch".into()));
    }
    let grad_s = phase_gradient(&wf.grid, &wf.s, constants.hbar);
    // amplitude-form quantum potential: better conditioned in the tails
    // than the pressure chain, same continuum value
    let qp = quantum_potential_amplitude_form(&wf.rho_field(), constants)?;

    let n = wf.grid.len();
    let mut data = vec![0.0; n];
    for i in 0..n {
        if wf.node_mask[i] || qp.mask[i] {
            continue;
        }
        let mut grad_sq = 0.0;
        for comp in &grad_s {
            grad_sq += comp[i] * comp[i];
        }
        let vr_sq = match v_r {
            Some(f) => f.comps.iter().map(|c| c[i] * c[i]).sum::<f64>(),
            None => 0.0,
        };
        data[i] = s_dot.data[i]
            + grad_sq / (2.0 * constants.m)
            + 0.5 * constants.m * vr_sq
            + u.data[i]
            + qp.q.data[i]
            - c0;
    }
    ScalarField::new(wf.grid.clone(), data)
}

/// Hamilton-Jacobi residual from two consecutive snapshots: the time
/// derivative is the centred difference and all spatial terms are taken at
/// the midpoint field, keeping the estimate second order in `dt`.
pub fn hamilton_jacobi_residual_from_pair(
    prev: &WaveField,
    next: &WaveField,
    dt: f64,
    v_r: Option<&VectorField>,
    u: &ScalarField,
    constants: &PhysicalConstants,
    c0: f64,
) -> Result<ScalarField> {
    let mid = midpoint_field(prev, next, dt, constants)?;
    let s_dot = ScalarField::new(
        prev.grid.clone(),
        prev.s
            .iter()
            .zip(&next.s)
            .map(|(&a, &b)| (b - a) / dt)
            .collect(),
    )?;
    hamilton_jacobi_residual(&mid, &s_dot, v_r, u, constants, c0)
}

fn midpoint_field(
    prev: &WaveField,
    next: &WaveField,
    dt: f64,
    constants: &PhysicalConstants,
) -> Result<WaveField> {
    if dt <= 0.0 {
        return Err(QhError::config("dt", "snapshot spacing must be > 0"));
    }
    if !prev.grid.same_layout(&next.grid) {
        return Err(QhError::Grid("snapshot grids differ".into()));
    }
    let rho_mid = ScalarField::new(
        prev.grid.clone(),
        prev.rho
            .iter()
            .zip(&next.rho)
            .map(|(&a, &b)| 0.5 * (a + b))
            .collect(),
    )?;
    let s_mid = ScalarField::new(
        prev.grid.clone(),
        prev.s
            .iter()
            .zip(&next.s)
            .map(|(&a, &b)| 0.5 * (a + b))
            .collect(),
    )?;
    WaveField::from_polar(rho_mid, s_mid, constants)
}

/// Continuity residuals from a snapshot pair.
#[derive(Debug, Clone)]
pub struct ContinuityResidual {
    /// `d rho / dt + div(rho v)`.
    pub rho_form: ScalarField,
    /// The same residual per log-amplitude pair, `rho_form / (2 rho)`;
    /// this is the chain-rule reduction of the residual written in
    /// `C_rho = ln(rho)/2` variables.
    pub c_rho_form: ScalarField,
    /// Residual of the action identity
    /// `laplacian(S) + m d(ln rho)/dt` (material derivative).
    pub action_identity: ScalarField,
}

pub fn continuity_residual(
    prev: &WaveField,
    next: &WaveField,
    dt: f64,
    flow: &FlowField,
    constants: &PhysicalConstants,
) -> Result<ContinuityResidual> {
    if dt <= 0.0 {
        return Err(QhError::config("dt", "snapshot spacing must be > 0"));
    }
    if !prev.grid.same_layout(&next.grid) || !flow.grid.same_layout(&prev.grid) {
        return Err(QhError::Grid("snapshot/flow grids differ".into()));
    }
    let grid = prev.grid.clone();
    let n = grid.len();
    let rho_mid: Vec<f64> = prev
        .rho
        .iter()
        .zip(&next.rho)
        .map(|(&a, &b)| 0.5 * (a + b))
        .collect();
    let floor = crate::madelung::RHO_FLOOR_FRACTION
        * rho_mid.iter().fold(0.0f64, |m, &v| m.max(v));

    // conservative form: d rho/dt + div(rho v)
    let flux = VectorField::new(
        grid.clone(),
        flow.v
            .comps
            .iter()
            .map(|c| c.iter().zip(&rho_mid).map(|(&v, &r)| v * r).collect())
            .collect(),
    )?;
    let div_flux = ops::divergence(&flux);
    let mut rho_form = vec![0.0; n];
    for i in 0..n {
        rho_form[i] = (next.rho[i] - prev.rho[i]) / dt + div_flux.data[i];
    }

    let c_rho_form: Vec<f64> = rho_form
        .iter()
        .zip(&rho_mid)
        .map(|(&r, &rho)| r / (2.0 * rho.max(floor.max(f64::MIN_POSITIVE))))
        .collect();

    // laplacian(S) + m * (d ln rho / dt + v . grad ln rho)
    let s_mid: Vec<f64> = prev
        .s
        .iter()
        .zip(&next.s)
        .map(|(&a, &b)| 0.5 * (a + b))
        .collect();
    let lap_s = phase_laplacian(&grid, &s_mid, constants.hbar);
    let ln_rho_mid = ScalarField::new(
        grid.clone(),
        rho_mid
            .iter()
            .map(|&r| r.max(floor.max(f64::MIN_POSITIVE)).ln())
            .collect(),
    )?;
    let grad_ln = ops::gradient(&ln_rho_mid);
    let mut action_identity = vec![0.0; n];
    for i in 0..n {
        if rho_mid[i] < floor {
            continue;
        }
        let dln_dt = (next.rho[i].max(floor).ln() - prev.rho[i].max(floor).ln()) / dt;
        let mut adv = 0.0;
        for (axis, c) in flow.v.comps.iter().enumerate() {
            adv += c[i] * grad_ln.comps[axis][i];
        }
        action_identity[i] = lap_s[i] + constants.m * (dln_dt + adv);
    }

    Ok(ContinuityResidual {
        rho_form: ScalarField::new(grid.clone(), rho_form)?,
        c_rho_form: ScalarField::new(grid.clone(), c_rho_form)?,
        action_identity: ScalarField::new(grid, action_identity)?,
    })
}

/// The reported fluctuating-viscosity contribution to the action balance,
/// `nu m f(rho)` with `f(rho) = d ln(rho)/dt` taken from snapshots as the
/// material derivative. Not part of the default residual: the coefficient
/// averages to zero in time.
pub fn viscous_action_term(
    prev: &WaveField,
    next: &WaveField,
    dt: f64,
    flow: &FlowField,
    constants: &PhysicalConstants,
    nu: f64,
) -> Result<ScalarField> {
    if dt <= 0.0 {
        return Err(QhError::config("dt", "snapshot spacing must be > 0"));
    }
    let grid = prev.grid.clone();
    let rho_mid: Vec<f64> = prev
        .rho
        .iter()
        .zip(&next.rho)
        .map(|(&a, &b)| 0.5 * (a + b))
        .collect();
    let floor = crate::madelung::RHO_FLOOR_FRACTION
        * rho_mid.iter().fold(0.0f64, |m, &v| m.max(v));
    let ln_rho = ScalarField::new(
        grid.clone(),
        rho_mid
            .iter()
            .map(|&r| r.max(floor.max(f64::MIN_POSITIVE)).ln())
            .collect(),
    )?;
    let grad_ln = ops::gradient(&ln_rho);
    let mut data = vec![0.0; grid.len()];
    for i in 0..grid.len() {
        if rho_mid[i] < floor {
            continue;
        }
        let dln_dt = (next.rho[i].max(floor).ln() - prev.rho[i].max(floor).ln()) / dt;
        let mut adv = 0.0;
        for (axis, c) in flow.v.comps.iter().enumerate() {
            adv += c[i] * grad_ln.comps[axis][i];
        }
        data[i] = nu * constants.m * (dln_dt + adv);
    }
    ScalarField::new(grid, data)
}
