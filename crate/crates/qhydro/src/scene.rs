//! Streamline picture of a background flow deflected around a rotating
//! cylinder: uniform stream + doublet + point vortex in closed form.
//! The streamlines trace where guided paths bend around a vortex clot.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{QhError, Result};
use crate::field::ScalarField;
use crate::grid::{Boundary, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexSceneSpec {
    /// Background speed at infinity, along +x.
    pub u_inf: f64,
    pub cylinder_radius: f64,
    /// Circulation of the point vortex (positive = counter-clockwise).
    pub circulation: f64,
    /// Include the doublet term (the impenetrable cylinder body). Without
    /// it the scene is a bare vortex in a stream.
    pub dipole: bool,
    /// Domain box `[[xmin, xmax], [ymin, ymax]]`.
    pub domain: [[f64; 2]; 2],
}

impl VortexSceneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cylinder_radius > 0.0) || !self.cylinder_radius.is_finite() {
            return Err(QhError::config("scene.cylinder_radius", "must be finite and > 0"));
        }
        if !self.u_inf.is_finite() || !self.circulation.is_finite() {
            return Err(QhError::config("scene", "u_inf and circulation must be finite"));
        }
        let [[xmin, xmax], [ymin, ymax]] = self.domain;
        if !(xmin < xmax && ymin < ymax) {
            return Err(QhError::config("scene.domain", "box must have positive extent"));
        }
        // the box must contain the cylinder with two radii of margin
        let margin = 2.0 * self.cylinder_radius;
        if xmin > -self.cylinder_radius - margin
            || xmax < self.cylinder_radius + margin
            || ymin > -self.cylinder_radius - margin
            || ymax < self.cylinder_radius + margin
        {
            return Err(QhError::config(
                "scene.domain",
                "box must contain the cylinder with a margin of at least two radii",
            ));
        }
        Ok(())
    }

    /// Closed-form velocity `(u, v)` of the superposed potential flow.
    pub fn velocity_at(&self, x: f64, y: f64) -> [f64; 2] {
        let r2 = x * x + y * y;
        let mut u = self.u_inf;
        let mut v = 0.0;
        if self.dipole {
            // dw/dz of U R^2 / z: real/imag parts of -U R^2 / z^2
            let r4 = r2 * r2;
            let k = self.u_inf * self.cylinder_radius * self.cylinder_radius;
            u += -k * (x * x - y * y) / r4;
            v += -k * (2.0 * x * y) / r4;
        }
        if self.circulation != 0.0 {
            let k = self.circulation / (2.0 * PI * r2);
            u += -k * y;
            v += k * x;
        }
        [u, v]
    }

    /// Stream function; constant along streamlines, zero on the cylinder
    /// for the circulation-free doublet scene.
    pub fn stream_function_at(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        let mut psi = self.u_inf * y;
        if self.dipole {
            psi -= self.u_inf * self.cylinder_radius * self.cylinder_radius * y / r2;
        }
        if self.circulation != 0.0 {
            psi -= self.circulation / (4.0 * PI) * (r2 / (self.cylinder_radius * self.cylinder_radius)).ln();
        }
        psi
    }

    /// Stagnation points of the cylinder scene in closed form. With
    /// `|circulation| <= 4 pi u_inf R` they sit on the cylinder at
    /// `sin(theta) = circulation / (4 pi u_inf R)`.
    pub fn stagnation_points(&self) -> Vec<[f64; 2]> {
        if !self.dipole || self.u_inf == 0.0 {
            return Vec::new();
        }
        let r = self.cylinder_radius;
        let s = self.circulation / (4.0 * PI * self.u_inf * r);
        if s.abs() <= 1.0 {
            let theta = s.asin();
            vec![
                [r * (PI - theta).cos(), r * (PI - theta).sin()],
                [r * theta.cos(), r * theta.sin()],
            ]
        } else {
            // free stagnation point off the cylinder on the y axis
            let q = self.circulation / (4.0 * PI * self.u_inf);
            let root = (q * q - r * r).sqrt();
            let y = if q > 0.0 { q + root } else { q - root };
            vec![[0.0, y]]
        }
    }
}

/// One integrated streamline.
#[derive(Debug, Clone)]
pub struct Streamline {
    pub seed: [f64; 2],
    pub points: Vec<[f64; 2]>,
    /// Arc length at each point.
    pub arc: Vec<f64>,
    /// Stream-function value at each point (constant up to integrator error).
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FlowScene {
    pub spec: VortexSceneSpec,
    pub streamlines: Vec<Streamline>,
    /// Seeds rejected because they fell inside the cylinder.
    pub rejected_seeds: Vec<[f64; 2]>,
    /// Stream function sampled over the box (NaN inside the cylinder).
    pub psi_field: ScalarField,
}

/// Integration step as a fraction of the cylinder radius.
const ARC_STEP_FRACTION: f64 = 1.0 / 256.0;

/// Seed `n_lines` streamlines on the inflow edge and integrate each with
/// unit-speed RK4 until it leaves the box (or a length cap for closed
/// orbits). No streamline may enter the cylinder.
pub fn streamlines_around_vortex(spec: &VortexSceneSpec, n_lines: usize) -> Result<FlowScene> {
    spec.validate()?;
    if n_lines < 1 {
        return Err(QhError::config("scene.n_lines", "need at least one line"));
    }
    let [[xmin, xmax], [ymin, ymax]] = spec.domain;
    let seeds: Vec<[f64; 2]> = (0..n_lines)
        .map(|j| {
            [
                xmin,
                ymin + (ymax - ymin) * (j as f64 + 0.5) / n_lines as f64,
            ]
        })
        .collect();
    let mut streamlines = Vec::new();
    let mut rejected = Vec::new();
    for seed in seeds {
        match trace_streamline(spec, seed)? {
            Some(line) => streamlines.push(line),
            None => rejected.push(seed),
        }
    }

    let grid = Grid::plane((xmin, xmax), 128, (ymin, ymax), 128, Boundary::Reflecting)?;
    let spec_c = spec.clone();
    let psi_field = ScalarField::from_fn(&grid, move |x, y| {
        if spec_c.dipole && x * x + y * y < spec_c.cylinder_radius * spec_c.cylinder_radius {
            f64::NAN
        } else {
            spec_c.stream_function_at(x, y)
        }
    });

    Ok(FlowScene {
        spec: spec.clone(),
        streamlines,
        rejected_seeds: rejected,
        psi_field,
    })
}

/// Trace one streamline from an explicit seed; `None` when the seed sits
/// inside the cylinder body.
pub fn trace_streamline(spec: &VortexSceneSpec, seed: [f64; 2]) -> Result<Option<Streamline>> {
    spec.validate()?;
    let r2_min = spec.cylinder_radius * spec.cylinder_radius;
    if spec.dipole && seed[0] * seed[0] + seed[1] * seed[1] < r2_min {
        return Ok(None);
    }
    let [[xmin, xmax], [ymin, ymax]] = spec.domain;
    let ds = spec.cylinder_radius * ARC_STEP_FRACTION;
    let max_arc = 6.0 * ((xmax - xmin) + (ymax - ymin));
    let max_steps = (max_arc / ds) as usize;

    let speed_floor = 1e-12 * spec.u_inf.abs().max(spec.circulation.abs() / spec.cylinder_radius).max(1e-12);
    let direction = |p: [f64; 2]| -> [f64; 2] {
        let v = spec.velocity_at(p[0], p[1]);
        let mag = (v[0] * v[0] + v[1] * v[1]).sqrt().max(speed_floor);
        [v[0] / mag, v[1] / mag]
    };

    let mut points = vec![seed];
    let mut arc = vec![0.0];
    let mut psi = vec![spec.stream_function_at(seed[0], seed[1])];
    let mut p = seed;
    for step in 1..=max_steps {
        let k1 = direction(p);
        let k2 = direction([p[0] + 0.5 * ds * k1[0], p[1] + 0.5 * ds * k1[1]]);
        let k3 = direction([p[0] + 0.5 * ds * k2[0], p[1] + 0.5 * ds * k2[1]]);
        let k4 = direction([p[0] + ds * k3[0], p[1] + ds * k3[1]]);
        p = [
            p[0] + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            p[1] + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        points.push(p);
        arc.push(step as f64 * ds);
        psi.push(spec.stream_function_at(p[0], p[1]));
        if p[0] < xmin || p[0] > xmax || p[1] < ymin || p[1] > ymax {
            break;
        }
    }
    Ok(Some(Streamline {
        seed,
        points,
        arc,
        psi,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene(circulation: f64) -> VortexSceneSpec {
        VortexSceneSpec {
            u_inf: 1.0,
            cylinder_radius: 1.0,
            circulation,
            dipole: true,
            domain: [[-8.0, 8.0], [-6.0, 6.0]],
        }
    }

    #[test]
    fn velocity_vanishes_at_stagnation_points() {
        for gamma in [0.0, 2.0, -3.0] {
            let s = scene(gamma);
            for p in s.stagnation_points() {
                let v = s.velocity_at(p[0], p[1]);
                assert!(
                    v[0].abs() < 1e-12 && v[1].abs() < 1e-12,
                    "gamma {gamma}: v = {v:?} at {p:?}"
                );
            }
        }
    }

    #[test]
    fn zero_circulation_stagnation_at_poles() {
        let s = scene(0.0);
        let pts = s.stagnation_points();
        assert_eq!(pts.len(), 2);
        assert!((pts[0][0] + 1.0).abs() < 1e-14 && pts[0][1].abs() < 1e-14);
        assert!((pts[1][0] - 1.0).abs() < 1e-14 && pts[1][1].abs() < 1e-14);
    }

    #[test]
    fn flow_is_tangent_on_cylinder() {
        let s = scene(1.5);
        for k in 0..64 {
            let th = 2.0 * PI * k as f64 / 64.0;
            let (x, y) = (th.cos(), th.sin());
            let v = s.velocity_at(x, y);
            let radial = v[0] * x + v[1] * y;
            assert!(radial.abs() < 1e-12, "radial component {radial}");
        }
    }

    #[test]
    fn streamlines_conserve_psi_and_avoid_cylinder() {
        let s = scene(2.0);
        let flow = streamlines_around_vortex(&s, 15).unwrap();
        assert!(flow.rejected_seeds.is_empty());
        for line in &flow.streamlines {
            let psi0 = line.psi[0];
            let mut min_r = f64::MAX;
            for (p, psi) in line.points.iter().zip(&line.psi) {
                assert!((psi - psi0).abs() < 1e-6, "psi drift {}", (psi - psi0).abs());
                min_r = min_r.min((p[0] * p[0] + p[1] * p[1]).sqrt());
            }
            assert!(min_r >= s.cylinder_radius - 1e-9, "penetrated to r = {min_r}");
        }
    }

    #[test]
    fn pure_vortex_streamlines_are_circles() {
        let s = VortexSceneSpec {
            u_inf: 0.0,
            cylinder_radius: 1.0,
            circulation: 3.0,
            dipole: false,
            domain: [[-8.0, 8.0], [-6.0, 6.0]],
        };
        let line = trace_streamline(&s, [-4.0, 0.0]).unwrap().unwrap();
        for p in &line.points {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 4.0).abs() < 1e-6, "radius {r}");
        }
        // closed orbit: the trace hits its length cap rather than the box
        let last = line.points.last().unwrap();
        assert!(last[0].abs() <= 8.0 && last[1].abs() <= 6.0);
    }

    #[test]
    fn seed_inside_cylinder_is_rejected() {
        let s = scene(0.0);
        assert!(trace_streamline(&s, [0.2, 0.1]).unwrap().is_none());
    }

    #[test]
    fn domain_margin_is_enforced() {
        let s = VortexSceneSpec {
            u_inf: 1.0,
            cylinder_radius: 2.0,
            circulation: 0.0,
            dipole: true,
            domain: [[-3.0, 3.0], [-3.0, 3.0]],
        };
        assert!(s.validate().is_err());
    }
}
