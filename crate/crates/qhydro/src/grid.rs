use serde::{Deserialize, Serialize};

use crate::error::{QhError, Result};

pub const MIN_POINTS_PER_AXIS: usize = 8;

/// Boundary handling for derivatives, quadrature, and evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Wrap-around topology; point `n` coincides with point `0`.
    Periodic,
    /// Hard-walled box; one-sided stencils at the edges.
    Reflecting,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct AxisSpec {
    min: f64,
    max: f64,
    n: usize,
    spacing: f64,
}

/// Uniform 1D or 2D grid. Immutable after construction.
///
/// On a periodic axis the right endpoint is excluded (`x_i = min + i h`,
/// `h = (max - min) / n`); on a reflecting axis both endpoints are grid
/// points (`h = (max - min) / (n - 1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    boundary: Boundary,
    axes: Vec<AxisSpec>,
}

impl Grid {
    pub fn line(min: f64, max: f64, n: usize, boundary: Boundary) -> Result<Self> {
        Ok(Self {
            boundary,
            axes: vec![Self::axis(min, max, n, boundary)?],
        })
    }

    pub fn plane(
        x_range: (f64, f64),
        nx: usize,
        y_range: (f64, f64),
        ny: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        Ok(Self {
            boundary,
            axes: vec![
                Self::axis(x_range.0, x_range.1, nx, boundary)?,
                Self::axis(y_range.0, y_range.1, ny, boundary)?,
            ],
        })
    }

    fn axis(min: f64, max: f64, n: usize, boundary: Boundary) -> Result<AxisSpec> {
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(QhError::Grid(format!(
                "axis extent [{min}, {max}] must be finite with min < max"
            )));
        }
        if n < MIN_POINTS_PER_AXIS {
            return Err(QhError::Grid(format!(
                "axis needs at least {MIN_POINTS_PER_AXIS} points, got {n}"
            )));
        }
        let spacing = match boundary {
            Boundary::Periodic => (max - min) / n as f64,
            Boundary::Reflecting => (max - min) / (n - 1) as f64,
        };
        Ok(AxisSpec { min, max, n, spacing })
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nx(&self) -> usize {
        self.axes[0].n
    }

    pub fn ny(&self) -> usize {
        self.axes.get(1).map_or(1, |a| a.n)
    }

    pub fn dx(&self) -> f64 {
        self.axes[0].spacing
    }

    pub fn dy(&self) -> f64 {
        self.axes.get(1).map_or(0.0, |a| a.spacing)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.axes[axis].spacing
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        self.axes[axis].n
    }

    pub fn axis_min(&self, axis: usize) -> f64 {
        self.axes[axis].min
    }

    pub fn axis_max(&self, axis: usize) -> f64 {
        self.axes[axis].max
    }

    /// Physical length of an axis (`max - min`).
    pub fn axis_extent(&self, axis: usize) -> f64 {
        self.axes[axis].max - self.axes[axis].min
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.axes[0].min + ix as f64 * self.axes[0].spacing
    }

    pub fn y(&self, iy: usize) -> f64 {
        match self.axes.get(1) {
            Some(a) => a.min + iy as f64 * a.spacing,
            None => 0.0,
        }
    }

    /// Row-major flat index: x runs fastest.
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx() + ix
    }

    /// Coordinates of the flat index `i` as `(x, y)`; `y = 0` in 1D.
    pub fn coords(&self, i: usize) -> (f64, f64) {
        let ix = i % self.nx();
        let iy = i / self.nx();
        (self.x(ix), self.y(iy))
    }

    /// Quadrature weight of the flat index (trapezoid on reflecting axes,
    /// plain cell weight on periodic ones).
    pub fn quad_weight(&self, i: usize) -> f64 {
        let ix = i % self.nx();
        let iy = i / self.nx();
        self.axis_quad_weight(0, ix) * if self.dim() == 2 { self.axis_quad_weight(1, iy) } else { 1.0 }
    }

    fn axis_quad_weight(&self, axis: usize, i: usize) -> f64 {
        let a = &self.axes[axis];
        match self.boundary {
            Boundary::Periodic => a.spacing,
            Boundary::Reflecting => {
                if i == 0 || i == a.n - 1 {
                    0.5 * a.spacing
                } else {
                    a.spacing
                }
            }
        }
    }

    /// Integral of `data` over the grid.
    pub fn integrate(&self, data: &[f64]) -> f64 {
        assert_eq!(data.len(), self.len());
        data.iter()
            .enumerate()
            .map(|(i, v)| v * self.quad_weight(i))
            .sum()
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_spacing_excludes_endpoint() {
        let g = Grid::line(0.0, 1.0, 10, Boundary::Periodic).unwrap();
        assert_eq!(g.dx(), 0.1);
        assert!((g.x(9) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn reflecting_spacing_includes_endpoints() {
        let g = Grid::line(0.0, 1.0, 11, Boundary::Reflecting).unwrap();
        assert_eq!(g.dx(), 0.1);
        assert!((g.x(10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_axes() {
        assert!(Grid::line(0.0, 1.0, 7, Boundary::Periodic).is_err());
        assert!(Grid::line(1.0, 1.0, 16, Boundary::Periodic).is_err());
    }

    #[test]
    fn quadrature_of_constant() {
        let g = Grid::line(-2.0, 2.0, 32, Boundary::Periodic).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones) - 4.0).abs() < 1e-12);

        let g = Grid::line(-2.0, 2.0, 33, Boundary::Reflecting).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((g.integrate(&ones) - 4.0).abs() < 1e-12);

        let g2 = Grid::plane((0.0, 1.0), 16, (0.0, 2.0), 16, Boundary::Periodic).unwrap();
        let ones = vec![1.0; g2.len()];
        assert!((g2.integrate(&ones) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flat_index_roundtrip() {
        let g = Grid::plane((0.0, 1.0), 8, (0.0, 1.0), 12, Boundary::Periodic).unwrap();
        let i = g.idx(3, 5);
        let (x, y) = g.coords(i);
        assert!((x - g.x(3)).abs() < 1e-15);
        assert!((y - g.y(5)).abs() < 1e-15);
    }
}
