//! Velocity decomposition: irrotational part from the action gradient,
//! solenoidal part from a supplied or spectrally projected field.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::madelung::{phase_gradient, WaveField};
use crate::ops;
use crate::spectral;

/// Velocity field split into irrotational (`v_s`) and solenoidal (`v_r`)
/// parts, with the scalar vorticity of the total field.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub grid: Grid,
    pub v: VectorField,
    pub v_s: VectorField,
    pub v_r: VectorField,
    pub omega: ScalarField,
    pub warnings: Vec<String>,
}

/// `v_s = grad(S)/m`, `v = v_s + v_r`, `omega = curl(v)`.
///
/// The solenoidal part defaults to zero. A supplied `v_r` is checked for
/// divergence-freedom away from masked nodes; violations attach a warning
/// (singular cores of analytic vortices are expected to fail pointwise).
pub fn velocity_from_wave(
    wf: &WaveField,
    v_r: Option<&VectorField>,
    constants: &PhysicalConstants,
) -> Result<FlowField> {
    if !wf.phase_valid {
        return Err(QhError::PhaseUnwrap(
            "wave field carries an inconsistent action; cannot form grad(S)".into(),
        ));
    }
    // Action must be unwrapped: neighbouring jumps beyond pi*hbar away from
    // nodes mean a raw or corrupted phase.
    let max_jump = PI * constants.hbar;
    for axis in 0..wf.grid.dim() {
        let stride = if axis == 0 { 1 } else { wf.grid.nx() };
        let n_axis = wf.grid.axis_len(axis);
        for i in 0..wf.s.len() {
            let pos = if axis == 0 { i % wf.grid.nx() } else { i / wf.grid.nx() };
            if pos + 1 >= n_axis {
                continue;
            }
            let j = i + stride;
            if wf.node_mask[i] || wf.node_mask[j] {
                continue;
            }
            if (wf.s[j] - wf.s[i]).abs() > max_jump {
                return Err(QhError::PhaseUnwrap(format!(
                    "action jump {:.3} > pi*hbar between neighbours at flat index {i}",
                    (wf.s[j] - wf.s[i]).abs()
                )));
            }
        }
    }

    let mut warnings = wf.warnings.clone();
    let grad_s = phase_gradient(&wf.grid, &wf.s, constants.hbar);
    let v_s = VectorField {
        grid: wf.grid.clone(),
        comps: grad_s
            .into_iter()
            .map(|c| c.into_iter().map(|v| v / constants.m).collect())
            .collect(),
    };

    let v_r_field = match v_r {
        Some(f) => {
            if !f.grid.same_layout(&wf.grid) {
                return Err(QhError::Grid("v_r grid does not match wave field".into()));
            }
            let div = ops::divergence(f);
            let scale = f.max_abs() / wf.grid.spacing(0);
            let tol = 1e-6 * scale.max(1e-30);
            let worst = div
                .data
                .iter()
                .enumerate()
                .filter(|(i, _)| !wf.node_mask[*i])
                .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            if worst > tol {
                warnings.push(format!(
                    "supplied v_r has max |div| {worst:.3e} (tolerance {tol:.3e}); treating as given"
                ));
            }
            f.clone()
        }
        None => VectorField::zeros(&wf.grid),
    };

    let v = v_s.add(&v_r_field);
    let omega = ops::curl2d(&v);
    Ok(FlowField {
        grid: wf.grid.clone(),
        v,
        v_s,
        v_r: v_r_field,
        omega,
        warnings,
    })
}

/// Spectral Helmholtz projection on a 2D periodic grid.
///
/// Returns `(v_s, v_r)` with `curl(v_s) = 0`, `div(v_r) = 0`, and
/// `v_s + v_r = v`; the mean flow is assigned to `v_s` by convention.
pub fn helmholtz_decompose(v: &VectorField) -> Result<(VectorField, VectorField)> {
    spectral::check_periodic(&v.grid, "helmholtz_decompose")?;
    if v.grid.dim() != 2 {
        return Err(QhError::Unsupported(
            "helmholtz_decompose expects a 2D field".into(),
        ));
    }
    let grid = &v.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let kx = spectral::wavenumbers(nx, grid.axis_extent(0));
    let ky = spectral::wavenumbers(ny, grid.axis_extent(1));

    let mut ux: Vec<Complex64> = v.comps[0].iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let mut uy: Vec<Complex64> = v.comps[1].iter().map(|&r| Complex64::new(r, 0.0)).collect();
    spectral::fft_nd(grid, &mut ux);
    spectral::fft_nd(grid, &mut uy);

    let mut sx = vec![Complex64::default(); grid.len()];
    let mut sy = vec![Complex64::default(); grid.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            let i = iy * nx + ix;
            let (kxv, kyv) = (kx[ix], ky[iy]);
            let k2 = kxv * kxv + kyv * kyv;
            if k2 == 0.0 {
                // mean flow goes to the irrotational part
                sx[i] = ux[i];
                sy[i] = uy[i];
            } else {
                let dot = ux[i] * kxv + uy[i] * kyv;
                sx[i] = dot * kxv / k2;
                sy[i] = dot * kyv / k2;
            }
        }
    }
    let mut rx: Vec<Complex64> = ux.iter().zip(&sx).map(|(a, b)| a - b).collect();
    let mut ry: Vec<Complex64> = uy.iter().zip(&sy).map(|(a, b)| a - b).collect();

    spectral::ifft_nd(grid, &mut sx);
    spectral::ifft_nd(grid, &mut sy);
    spectral::ifft_nd(grid, &mut rx);
    spectral::ifft_nd(grid, &mut ry);

    let v_s = VectorField::new(
        grid.clone(),
        vec![sx.iter().map(|c| c.re).collect(), sy.iter().map(|c| c.re).collect()],
    )?;
    let v_r = VectorField::new(
        grid.clone(),
        vec![rx.iter().map(|c| c.re).collect(), ry.iter().map(|c| c.re).collect()],
    )?;
    Ok((v_s, v_r))
}

/// Residual of the convective identity
/// `(v.grad)v - grad(v^2)/2 - omega x v`, which vanishes for smooth fields.
pub fn convective_identity_residual(flow: &FlowField) -> Result<VectorField> {
    if flow.grid.dim() != 2 {
        return Err(QhError::Unsupported(
            "convective identity residual is a 2D diagnostic".into(),
        ));
    }
    let adv = ops::advect(&flow.v, &flow.v);
    let v2 = flow.v.norm_sqr_field();
    let grad_half_v2 = ops::gradient(&v2);
    // omega x v in 2D with omega along z: (-omega*vy, omega*vx)
    let n = flow.grid.len();
    let mut rx = vec![0.0; n];
    let mut ry = vec![0.0; n];
    for i in 0..n {
        let wxv_x = -flow.omega.data[i] * flow.v.comps[1][i];
        let wxv_y = flow.omega.data[i] * flow.v.comps[0][i];
        rx[i] = adv.comps[0][i] - 0.5 * grad_half_v2.comps[0][i] - wxv_x;
        ry[i] = adv.comps[1][i] - 0.5 * grad_half_v2.comps[1][i] - wxv_y;
    }
    VectorField::new(flow.grid.clone(), vec![rx, ry])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ComplexField;
    use crate::grid::Boundary;
    use crate::madelung::to_polar;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn zero_action_zero_velocity() {
        let g = Grid::line(-4.0, 4.0, 64, Boundary::Periodic).unwrap();
        let psi = ComplexField::from_fn(&g, |x, _| Complex64::new((-x * x).exp(), 0.0));
        let wf = to_polar(&psi, &consts()).unwrap();
        let flow = velocity_from_wave(&wf, None, &consts()).unwrap();
        assert!(flow.v.max_abs() < 1e-12);
    }

    #[test]
    fn plane_wave_constant_velocity() {
        let c = consts();
        let g = Grid::line(0.0, 8.0, 128, Boundary::Periodic).unwrap();
        let k = 3.0 * 2.0 * PI / 8.0;
        let psi = ComplexField::from_fn(&g, |x, _| Complex64::from_polar(1.0, k * x));
        let wf = to_polar(&psi, &c).unwrap();
        let flow = velocity_from_wave(&wf, None, &c).unwrap();
        for &v in flow.v.x() {
            assert!((v - c.hbar * k / c.m).abs() < 1e-10);
        }
        assert!(flow.omega.max_abs() < 1e-12);
    }

    #[test]
    fn helmholtz_recovers_constructed_parts() {
        let g = Grid::plane(
            (0.0, 2.0 * PI),
            64,
            (0.0, 2.0 * PI),
            64,
            Boundary::Periodic,
        )
        .unwrap();
        // gradient part from phi = sin x cos 2y; solenoidal from stream
        // function chi = cos 2x sin y
        let grad_part = VectorField::new(
            g.clone(),
            vec![
                ScalarField::from_fn(&g, |x, y| x.cos() * (2.0 * y).cos()).data,
                ScalarField::from_fn(&g, |x, y| -2.0 * x.sin() * (2.0 * y).sin()).data,
            ],
        )
        .unwrap();
        let rot_part = VectorField::new(
            g.clone(),
            vec![
                ScalarField::from_fn(&g, |x, y| (2.0 * x).cos() * y.cos()).data,
                ScalarField::from_fn(&g, |x, y| 2.0 * (2.0 * x).sin() * y.sin()).data,
            ],
        )
        .unwrap();

        let (vs1, vr1) = helmholtz_decompose(&grad_part).unwrap();
        assert!(vr1.max_abs() < 1e-10, "gradient field leaked {}", vr1.max_abs());
        let _ = vs1;

        let (vs2, _vr2) = helmholtz_decompose(&rot_part).unwrap();
        assert!(vs2.max_abs() < 1e-10, "solenoidal field leaked {}", vs2.max_abs());

        // the mean flow lands in the irrotational part by convention
        let with_mean = VectorField::new(
            g.clone(),
            vec![
                rot_part.comps[0].iter().map(|v| v + 0.25).collect(),
                rot_part.comps[1].iter().map(|v| v - 0.5).collect(),
            ],
        )
        .unwrap();
        let (vs_mean, _) = helmholtz_decompose(&with_mean).unwrap();
        for i in 0..g.len() {
            assert!((vs_mean.comps[0][i] - 0.25).abs() < 1e-10);
            assert!((vs_mean.comps[1][i] + 0.5).abs() < 1e-10);
        }

        let total = grad_part.add(&rot_part);
        let (vs, vr) = helmholtz_decompose(&total).unwrap();
        let ds = vs.sub(&grad_part);
        let dr = vr.sub(&rot_part);
        assert!(ds.max_abs() < 1e-9);
        assert!(dr.max_abs() < 1e-9);

        // reconstruction and idempotence
        let recon = vs.add(&vr).sub(&total);
        assert!(recon.max_abs() < 1e-10);
        let (vss, vsr) = helmholtz_decompose(&vs).unwrap();
        assert!(vss.sub(&vs).max_abs() < 1e-10);
        assert!(vsr.max_abs() < 1e-10);
    }

    #[test]
    fn point_vortex_curl_recovered_away_from_core() {
        let c = consts();
        let g = Grid::plane((-4.0, 4.0), 1024, (-4.0, 4.0), 1024, Boundary::Reflecting).unwrap();
        // smooth carrier wave plus an analytic point vortex, centre kept
        // off the lattice so no sample is singular
        let psi = ComplexField::from_fn(&g, |x, y| {
            Complex64::new((-0.1 * (x * x + y * y)).exp(), 0.0)
        });
        let wf = to_polar(&psi, &c).unwrap();
        let gamma = 1.0;
        let (cx, cy) = (1.3e-3, 0.7e-3);
        let v_r = VectorField::new(
            g.clone(),
            vec![
                (0..g.len())
                    .map(|i| {
                        let (x, y) = g.coords(i);
                        let r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                        -gamma / (2.0 * PI) * (y - cy) / r2
                    })
                    .collect(),
                (0..g.len())
                    .map(|i| {
                        let (x, y) = g.coords(i);
                        let r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                        gamma / (2.0 * PI) * (x - cx) / r2
                    })
                    .collect(),
            ],
        )
        .unwrap();
        let flow = velocity_from_wave(&wf, Some(&v_r), &c).unwrap();
        // a free point vortex is irrotational away from its core; the
        // smooth carrier contributes nothing to the curl
        let mut worst = 0.0f64;
        for i in 0..g.len() {
            let (x, y) = g.coords(i);
            let r = (x * x + y * y).sqrt();
            if (2.5..3.5).contains(&r) {
                worst = worst.max(flow.omega.data[i].abs());
            }
        }
        assert!(worst < 1e-6, "curl away from the core: {worst}");
    }

    #[test]
    fn helmholtz_rejects_reflecting() {
        let g = Grid::plane((0.0, 1.0), 16, (0.0, 1.0), 16, Boundary::Reflecting).unwrap();
        let v = VectorField::zeros(&g);
        assert!(matches!(
            helmholtz_decompose(&v),
            Err(QhError::Unsupported(_))
        ));
    }

    #[test]
    fn convective_identity_uniform_and_rigid() {
        let g = Grid::plane((-1.0, 1.0), 48, (-1.0, 1.0), 48, Boundary::Reflecting).unwrap();
        // uniform flow
        let v = VectorField::new(g.clone(), vec![vec![0.7; g.len()], vec![-0.2; g.len()]]).unwrap();
        let flow = FlowField {
            grid: g.clone(),
            omega: ops::curl2d(&v),
            v_s: v.clone(),
            v_r: VectorField::zeros(&g),
            v: v.clone(),
            warnings: vec![],
        };
        let res = convective_identity_residual(&flow).unwrap();
        assert!(res.max_abs() < 1e-13);

        // rigid rotation v = Omega x r
        let omega0 = 1.7;
        let v = VectorField::new(
            g.clone(),
            vec![
                (0..g.len()).map(|i| -omega0 * g.coords(i).1).collect(),
                (0..g.len()).map(|i| omega0 * g.coords(i).0).collect(),
            ],
        )
        .unwrap();
        let flow = FlowField {
            grid: g.clone(),
            omega: ops::curl2d(&v),
            v_s: VectorField::zeros(&g),
            v_r: v.clone(),
            v: v.clone(),
            warnings: vec![],
        };
        let res = convective_identity_residual(&flow).unwrap();
        assert!(res.max_abs() < 1e-8, "rigid rotation residual {}", res.max_abs());
    }

    #[test]
    fn convective_identity_second_order() {
        let residual_norm = |n: usize| {
            let g = Grid::plane(
                (0.0, 2.0 * PI),
                n,
                (0.0, 2.0 * PI),
                n,
                Boundary::Periodic,
            )
            .unwrap();
            let v = VectorField::new(
                g.clone(),
                vec![
                    ScalarField::from_fn(&g, |x, y| (x.sin() * (2.0 * y).cos()) + 0.3).data,
                    ScalarField::from_fn(&g, |x, y| ((2.0 * x).cos() * y.sin()) - 0.1).data,
                ],
            )
            .unwrap();
            let flow = FlowField {
                grid: g.clone(),
                omega: ops::curl2d(&v),
                v_s: VectorField::zeros(&g),
                v_r: v.clone(),
                v: v.clone(),
                warnings: vec![],
            };
            let res = convective_identity_residual(&flow).unwrap();
            res.norm_sqr_field().map(f64::sqrt).l2_norm()
        };
        let ratio = residual_norm(32) / residual_norm(64);
        assert!(ratio > 3.3 && ratio < 4.7, "ratio {ratio}");
    }
}
