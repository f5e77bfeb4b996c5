//! FFT helpers for periodic grids (Helmholtz projection, split-step kinetics).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{QhError, Result};
use crate::grid::{Boundary, Grid};

/// Angular wavenumbers in FFT bin order for a periodic axis.
pub fn wavenumbers(n: usize, extent: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / extent;
    (0..n)
        .map(|m| {
            let m_signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            base * m_signed
        })
        .collect()
}

pub fn check_periodic(grid: &Grid, what: &str) -> Result<()> {
    if grid.boundary() != Boundary::Periodic {
        return Err(QhError::Unsupported(format!(
            "{what} requires a periodic grid"
        )));
    }
    Ok(())
}

/// In-place forward FFT over every axis of a row-major 1D/2D buffer.
pub fn fft_nd(grid: &Grid, data: &mut [Complex64]) {
    transform_nd(grid, data, true);
}

/// In-place inverse FFT (normalized by 1/N).
pub fn ifft_nd(grid: &Grid, data: &mut [Complex64]) {
    transform_nd(grid, data, false);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

fn transform_nd(grid: &Grid, data: &mut [Complex64], forward: bool) {
    assert_eq!(data.len(), grid.len());
    let mut planner = FftPlanner::new();
    let nx = grid.nx();
    let plan_x = if forward {
        planner.plan_fft_forward(nx)
    } else {
        planner.plan_fft_inverse(nx)
    };
    for row in data.chunks_exact_mut(nx) {
        plan_x.process(row);
    }
    if grid.dim() == 2 {
        let ny = grid.ny();
        let plan_y = if forward {
            planner.plan_fft_forward(ny)
        } else {
            planner.plan_fft_inverse(ny)
        };
        let mut col = vec![Complex64::default(); ny];
        for ix in 0..nx {
            for iy in 0..ny {
                col[iy] = data[iy * nx + ix];
            }
            plan_y.process(&mut col);
            for iy in 0..ny {
                data[iy * nx + ix] = col[iy];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ComplexField;

    #[test]
    fn roundtrip_2d() {
        let g = Grid::plane((0.0, 1.0), 16, (0.0, 1.0), 8, Boundary::Periodic).unwrap();
        let f = ComplexField::from_fn(&g, |x, y| {
            Complex64::new((3.0 * x).sin() + y, (x * y).cos())
        });
        let mut buf = f.data.clone();
        fft_nd(&g, &mut buf);
        ifft_nd(&g, &mut buf);
        for (a, b) in buf.iter().zip(&f.data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn wavenumber_ordering() {
        let k = wavenumbers(8, 2.0 * std::f64::consts::PI);
        assert_eq!(k[0], 0.0);
        assert_eq!(k[1], 1.0);
        assert_eq!(k[4], 4.0);
        assert_eq!(k[5], -3.0);
        assert_eq!(k[7], -1.0);
    }
}
