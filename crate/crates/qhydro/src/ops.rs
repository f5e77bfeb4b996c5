//! Second-order finite-difference operators on grid fields.
//!
//! Central stencils in the interior; periodic wrap or one-sided
//! second-order stencils at reflecting edges.

use crate::field::{ScalarField, VectorField};
use crate::grid::{Boundary, Grid};

/// First derivative of `data` along `axis`.
pub fn derivative_axis(grid: &Grid, data: &[f64], axis: usize) -> Vec<f64> {
    apply_along_axis(grid, data, axis, |line, h, out| match grid.boundary() {
        Boundary::Periodic => {
            let n = line.len();
            for i in 0..n {
                let ip = (i + 1) % n;
                let im = (i + n - 1) % n;
                out[i] = (line[ip] - line[im]) / (2.0 * h);
            }
        }
        Boundary::Reflecting => {
            let n = line.len();
            out[0] = (-3.0 * line[0] + 4.0 * line[1] - line[2]) / (2.0 * h);
            for i in 1..n - 1 {
                out[i] = (line[i + 1] - line[i - 1]) / (2.0 * h);
            }
            out[n - 1] = (3.0 * line[n - 1] - 4.0 * line[n - 2] + line[n - 3]) / (2.0 * h);
        }
    })
}

/// Second derivative of `data` along `axis`.
pub fn second_derivative_axis(grid: &Grid, data: &[f64], axis: usize) -> Vec<f64> {
    apply_along_axis(grid, data, axis, |line, h, out| {
        let h2 = h * h;
        match grid.boundary() {
            Boundary::Periodic => {
                let n = line.len();
                for i in 0..n {
                    let ip = (i + 1) % n;
                    let im = (i + n - 1) % n;
                    out[i] = (line[ip] - 2.0 * line[i] + line[im]) / h2;
                }
            }
            Boundary::Reflecting => {
                let n = line.len();
                out[0] = (2.0 * line[0] - 5.0 * line[1] + 4.0 * line[2] - line[3]) / h2;
                for i in 1..n - 1 {
                    out[i] = (line[i + 1] - 2.0 * line[i] + line[i - 1]) / h2;
                }
                out[n - 1] =
                    (2.0 * line[n - 1] - 5.0 * line[n - 2] + 4.0 * line[n - 3] - line[n - 4]) / h2;
            }
        }
    })
}

fn apply_along_axis(
    grid: &Grid,
    data: &[f64],
    axis: usize,
    stencil: impl Fn(&[f64], f64, &mut [f64]),
) -> Vec<f64> {
    assert!(axis < grid.dim());
    let h = grid.spacing(axis);
    let mut out = vec![0.0; data.len()];
    if grid.dim() == 1 {
        stencil(data, h, &mut out);
        return out;
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    if axis == 0 {
        let mut line_out = vec![0.0; nx];
        for iy in 0..ny {
            let row = &data[iy * nx..(iy + 1) * nx];
            stencil(row, h, &mut line_out);
            out[iy * nx..(iy + 1) * nx].copy_from_slice(&line_out);
        }
    } else {
        let mut line = vec![0.0; ny];
        let mut line_out = vec![0.0; ny];
        for ix in 0..nx {
            for iy in 0..ny {
                line[iy] = data[iy * nx + ix];
            }
            stencil(&line, h, &mut line_out);
            for iy in 0..ny {
                out[iy * nx + ix] = line_out[iy];
            }
        }
    }
    out
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let comps = (0..f.grid.dim())
        .map(|axis| derivative_axis(&f.grid, &f.data, axis))
        .collect();
    VectorField {
        grid: f.grid.clone(),
        comps,
    }
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let mut data = second_derivative_axis(&f.grid, &f.data, 0);
    if f.grid.dim() == 2 {
        let dyy = second_derivative_axis(&f.grid, &f.data, 1);
        for (a, b) in data.iter_mut().zip(dyy) {
            *a += b;
        }
    }
    ScalarField {
        grid: f.grid.clone(),
        data,
    }
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let mut data = derivative_axis(&v.grid, &v.comps[0], 0);
    if v.grid.dim() == 2 {
        let dy = derivative_axis(&v.grid, &v.comps[1], 1);
        for (a, b) in data.iter_mut().zip(dy) {
            *a += b;
        }
    }
    ScalarField {
        grid: v.grid.clone(),
        data,
    }
}

/// Scalar vorticity `dv_y/dx - dv_x/dy` of a 2D field; zero field in 1D
/// (a line flow has no rotation).
pub fn curl2d(v: &VectorField) -> ScalarField {
    if v.grid.dim() == 1 {
        return ScalarField::zeros(&v.grid);
    }
    let dvy_dx = derivative_axis(&v.grid, &v.comps[1], 0);
    let dvx_dy = derivative_axis(&v.grid, &v.comps[0], 1);
    ScalarField {
        grid: v.grid.clone(),
        data: dvy_dx.iter().zip(dvx_dy).map(|(a, b)| a - b).collect(),
    }
}

/// Advection term `(v . grad) w` applied to each component of `w`.
pub fn advect(v: &VectorField, w: &VectorField) -> VectorField {
    assert!(v.grid.same_layout(&w.grid));
    let comps = w
        .comps
        .iter()
        .map(|wc| {
            let mut out = vec![0.0; w.grid.len()];
            for (axis, vc) in v.comps.iter().enumerate() {
                let d = derivative_axis(&w.grid, wc, axis);
                for ((o, vi), di) in out.iter_mut().zip(vc).zip(d) {
                    *o += vi * di;
                }
            }
            out
        })
        .collect();
    VectorField {
        grid: v.grid.clone(),
        comps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundary, Grid};
    use std::f64::consts::PI;

    #[test]
    fn periodic_derivative_of_sine() {
        let g = Grid::line(0.0, 2.0 * PI, 128, Boundary::Periodic).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| x.sin());
        let d = derivative_axis(&g, &f.data, 0);
        for i in 0..g.len() {
            assert!((d[i] - g.x(i).cos()).abs() < 2e-3);
        }
    }

    #[test]
    fn reflecting_derivative_exact_for_quadratic() {
        let g = Grid::line(-1.0, 1.0, 16, Boundary::Reflecting).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| 3.0 * x * x - 2.0 * x + 1.0);
        let d = derivative_axis(&g, &f.data, 0);
        let dd = second_derivative_axis(&g, &f.data, 0);
        for i in 0..g.len() {
            assert!((d[i] - (6.0 * g.x(i) - 2.0)).abs() < 1e-12);
            assert!((dd[i] - 6.0).abs() < 1e-11);
        }
    }

    #[test]
    fn curl_of_rigid_rotation() {
        let g = Grid::plane((-1.0, 1.0), 32, (-1.0, 1.0), 32, Boundary::Reflecting).unwrap();
        let v = VectorField::new(
            g.clone(),
            vec![
                (0..g.len()).map(|i| -g.coords(i).1).collect(),
                (0..g.len()).map(|i| g.coords(i).0).collect(),
            ],
        )
        .unwrap();
        let w = curl2d(&v);
        for &val in &w.data {
            assert!((val - 2.0).abs() < 1e-12);
        }
        let div = divergence(&v);
        assert!(div.max_abs() < 1e-12);
    }

    #[test]
    fn second_order_convergence_periodic() {
        let err = |n: usize| {
            let g = Grid::line(0.0, 2.0 * PI, n, Boundary::Periodic).unwrap();
            let f = ScalarField::from_fn(&g, |x, _| (2.0 * x).sin());
            let d = second_derivative_axis(&g, &f.data, 0);
            (0..n)
                .map(|i| (d[i] + 4.0 * (2.0 * g.x(i)).sin()).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }
}
