use num_complex::Complex64;

use crate::error::{QhError, Result};
use crate::grid::Grid;

/// Real scalar field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(QhError::Grid(format!(
                "field length {} does not match grid size {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let data = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.coords(i);
                f(x, y)
            })
            .collect();
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.grid.same_layout(&other.grid));
        Self {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// L2 norm with quadrature weights, `sqrt(integral of f^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.data
            .iter()
            .enumerate()
            .map(|(i, v)| v * v * self.grid.quad_weight(i))
            .sum::<f64>()
            .sqrt()
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Complex scalar field on a grid (wave functions and spectral buffers).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(QhError::Grid(format!(
                "field length {} does not match grid size {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let data = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.coords(i);
                f(x, y)
            })
            .collect();
        Self {
            grid: grid.clone(),
            data,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Squared-modulus integral (the norm of a wave function).
    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm_sqr() * self.grid.quad_weight(i))
            .sum()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }
}

/// Real vector field; one component per grid dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(QhError::Grid(format!(
                "vector field needs {} components, got {}",
                grid.dim(),
                comps.len()
            )));
        }
        for c in &comps {
            if c.len() != grid.len() {
                return Err(QhError::Grid("component length mismatch".into()));
            }
        }
        Ok(Self { grid, comps })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            comps: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.comps[0]
    }

    pub fn y(&self) -> Option<&[f64]> {
        self.comps.get(1).map(|v| v.as_slice())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.grid.same_layout(&other.grid));
        Self {
            grid: self.grid.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.grid.same_layout(&other.grid));
        Self {
            grid: self.grid.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    /// Pointwise magnitude squared.
    pub fn norm_sqr_field(&self) -> ScalarField {
        let mut data = vec![0.0; self.grid.len()];
        for c in &self.comps {
            for (d, v) in data.iter_mut().zip(c) {
                *d += v * v;
            }
        }
        ScalarField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}
