use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::ScalarField;
use crate::grid::Grid;

/// External potential, evaluated to a real time-independent field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Free,
    Harmonic {
        omega_trap: f64,
    },
    GaussianBarrier {
        height: f64,
        center: f64,
        width: f64,
    },
    /// Hard barrier of the given thickness along x with two open slits in y.
    /// 2D only.
    DoubleSlit {
        height: f64,
        slit_width: f64,
        slit_separation: f64,
        thickness: f64,
    },
}

impl PotentialSpec {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Harmonic { omega_trap } => {
                if !(omega_trap.is_finite() && *omega_trap > 0.0) {
                    return Err(QhError::config("potential.omega_trap", "must be finite and > 0"));
                }
                Ok(())
            }
            PotentialSpec::GaussianBarrier { height, center, width } => {
                if !height.is_finite() || !center.is_finite() {
                    return Err(QhError::config("potential", "barrier parameters must be finite"));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(QhError::config("potential.width", "must be finite and > 0"));
                }
                Ok(())
            }
            PotentialSpec::DoubleSlit {
                height,
                slit_width,
                slit_separation,
                thickness,
            } => {
                if grid.dim() != 2 {
                    return Err(QhError::config("potential", "double_slit needs a 2D grid"));
                }
                for (name, v) in [
                    ("height", *height),
                    ("slit_width", *slit_width),
                    ("slit_separation", *slit_separation),
                    ("thickness", *thickness),
                ] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(QhError::config(
                            format!("potential.{name}"),
                            "must be finite and > 0",
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, grid: &Grid, constants: &PhysicalConstants) -> Result<ScalarField> {
        self.validate(grid)?;
        let f = match self {
            PotentialSpec::Free => ScalarField::zeros(grid),
            PotentialSpec::Harmonic { omega_trap } => {
                let k = 0.5 * constants.m * omega_trap * omega_trap;
                ScalarField::from_fn(grid, move |x, y| k * (x * x + y * y))
            }
            PotentialSpec::GaussianBarrier { height, center, width } => {
                let (h, c, w) = (*height, *center, *width);
                ScalarField::from_fn(grid, move |x, _| {
                    h * (-(x - c) * (x - c) / (2.0 * w * w)).exp()
                })
            }
            PotentialSpec::DoubleSlit {
                height,
                slit_width,
                slit_separation,
                thickness,
            } => {
                let (h, w, sep, th) = (*height, *slit_width, *slit_separation, *thickness);
                ScalarField::from_fn(grid, move |x, y| {
                    let in_barrier = x.abs() <= 0.5 * th;
                    let in_slit = (y - 0.5 * sep).abs() <= 0.5 * w
                        || (y + 0.5 * sep).abs() <= 0.5 * w;
                    if in_barrier && !in_slit {
                        h
                    } else {
                        0.0
                    }
                })
            }
        };
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    #[test]
    fn double_slit_needs_2d() {
        let g = Grid::line(-1.0, 1.0, 32, Boundary::Periodic).unwrap();
        let p = PotentialSpec::DoubleSlit {
            height: 100.0,
            slit_width: 0.2,
            slit_separation: 0.6,
            thickness: 0.1,
        };
        assert!(p.evaluate(&g, &PhysicalConstants::default()).is_err());
    }

    #[test]
    fn double_slit_opens_two_channels() {
        let g = Grid::plane((-2.0, 2.0), 64, (-2.0, 2.0), 64, Boundary::Periodic).unwrap();
        let p = PotentialSpec::DoubleSlit {
            height: 50.0,
            slit_width: 0.3,
            slit_separation: 1.0,
            thickness: 0.2,
        };
        let u = p.evaluate(&g, &PhysicalConstants::default()).unwrap();
        let at = |x: f64, y: f64| {
            let ix = ((x - g.axis_min(0)) / g.dx()).round() as usize;
            let iy = ((y - g.axis_min(1)) / g.dy()).round() as usize;
            u.data[g.idx(ix, iy)]
        };
        assert_eq!(at(0.0, 0.0), 50.0);
        assert_eq!(at(0.0, 0.5), 0.0);
        assert_eq!(at(0.0, -0.5), 0.0);
        assert_eq!(at(1.0, 0.0), 0.0);
    }

    #[test]
    fn harmonic_is_radial_in_2d() {
        let g = Grid::plane((-1.0, 1.0), 16, (-1.0, 1.0), 16, Boundary::Reflecting).unwrap();
        let u = PotentialSpec::Harmonic { omega_trap: 2.0 }
            .evaluate(&g, &PhysicalConstants::default())
            .unwrap();
        let i = g.idx(4, 9);
        let (x, y) = g.coords(i);
        assert!((u.data[i] - 2.0 * (x * x + y * y)).abs() < 1e-14);
    }
}
