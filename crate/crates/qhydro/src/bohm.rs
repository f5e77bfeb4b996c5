//! Trajectory bundles guided by the wave field: seeds drawn from the
//! initial density, integrated through `v = grad(S)/m (+ v_r)` with
//! classic fourth-order Runge-Kutta between snapshots.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{Boundary, Grid};
use crate::madelung::{phase_gradient, WaveField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    /// Positions at density-CDF levels `(i + 0.5) / n` (marginal product
    /// quantiles in 2D).
    Quantile,
    /// Evenly spaced lattice over the support `rho > 1e-6 max`.
    Uniform,
}

/// Seed positions with any sampling warnings.
#[derive(Debug, Clone)]
pub struct SeedSample {
    pub positions: Vec<[f64; 2]>,
    pub warnings: Vec<String>,
}

pub fn sample_seeds(rho0: &ScalarField, n: usize, mode: SeedMode) -> Result<SeedSample> {
    if n < 1 {
        return Err(QhError::config("seeds", "need at least one seed"));
    }
    if !rho0.is_finite() || rho0.data.iter().any(|&v| v < 0.0) {
        return Err(QhError::NonFinite("seed density".into()));
    }
    let mut warnings = Vec::new();
    let grid = &rho0.grid;
    let positions = match (grid.dim(), mode) {
        (1, SeedMode::Quantile) => quantiles_1d(grid, &rho0.data, n)?
            .into_iter()
            .map(|x| [x, 0.0])
            .collect(),
        (1, SeedMode::Uniform) => uniform_1d(grid, &rho0.data, n, &mut warnings)
            .into_iter()
            .map(|x| [x, 0.0])
            .collect(),
        (2, SeedMode::Quantile) => {
            let (k1, k2) = factorize(n);
            let mx = marginal(grid, &rho0.data, 0);
            let my = marginal(grid, &rho0.data, 1);
            let xs = quantiles_axis(grid, &mx, 0, k1)?;
            let ys = quantiles_axis(grid, &my, 1, k2)?;
            let mut out = Vec::with_capacity(n);
            'outer: for y in &ys {
                for x in &xs {
                    out.push([*x, *y]);
                    if out.len() == n {
                        break 'outer;
                    }
                }
            }
            out
        }
        (2, SeedMode::Uniform) => {
            let (k1, k2) = factorize(n);
            let max = rho0.max();
            let (lo_x, hi_x) = support_bounds(grid, &rho0.data, 0, max);
            let (lo_y, hi_y) = support_bounds(grid, &rho0.data, 1, max);
            let xs = linspace(lo_x, hi_x, k1);
            let ys = linspace(lo_y, hi_y, k2);
            let mut out = Vec::with_capacity(n);
            'outer2: for y in &ys {
                for x in &xs {
                    out.push([*x, *y]);
                    if out.len() == n {
                        break 'outer2;
                    }
                }
            }
            out
        }
        _ => unreachable!("grids are 1D or 2D"),
    };
    let support_points = rho0
        .data
        .iter()
        .filter(|&&r| r > 1e-6 * rho0.max())
        .count();
    if n > support_points {
        warnings.push(format!(
            "{n} seeds exceed the {support_points} grid points in the density support"
        ));
    }
    Ok(SeedSample { positions, warnings })
}

fn uniform_1d(grid: &Grid, rho: &[f64], n: usize, _warnings: &mut [String]) -> Vec<f64> {
    let max = rho.iter().fold(0.0f64, |m, &v| m.max(v));
    let (lo, hi) = support_bounds(grid, rho, 0, max);
    linspace(lo, hi, n)
}

fn factorize(n: usize) -> (usize, usize) {
    let mut k1 = (n as f64).sqrt().floor() as usize;
    while k1 > 1 && n % k1 != 0 {
        k1 -= 1;
    }
    (k1.max(1), n / k1.max(1))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn marginal(grid: &Grid, rho: &[f64], axis: usize) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if axis == 0 {
        (0..nx)
            .map(|ix| (0..ny).map(|iy| rho[iy * nx + ix]).sum())
            .collect()
    } else {
        (0..ny)
            .map(|iy| (0..nx).map(|ix| rho[iy * nx + ix]).sum())
            .collect()
    }
}

fn support_bounds(grid: &Grid, rho: &[f64], axis: usize, max: f64) -> (f64, f64) {
    let m = marginal(grid, rho, axis);
    let thresh = 1e-6 * max * if axis == 0 { grid.ny() } else { grid.nx() } as f64;
    let first = m.iter().position(|&v| v > thresh).unwrap_or(0);
    let last = m.iter().rposition(|&v| v > thresh).unwrap_or(m.len() - 1);
    let coord = |i: usize| grid.axis_min(axis) + i as f64 * grid.spacing(axis);
    (coord(first), coord(last))
}

fn quantiles_1d(grid: &Grid, rho: &[f64], n: usize) -> Result<Vec<f64>> {
    quantiles_axis(grid, rho, 0, n)
}

/// Invert the trapezoid CDF of axis samples at levels `(i+0.5)/n`.
/// Flat CDF plateaus resolve to their leftmost point.
fn quantiles_axis(grid: &Grid, line: &[f64], axis: usize, n: usize) -> Result<Vec<f64>> {
    let h = grid.spacing(axis);
    let m = line.len();
    let mut cdf = vec![0.0; m];
    for i in 1..m {
        cdf[i] = cdf[i - 1] + 0.5 * (line[i - 1] + line[i]) * h;
    }
    let total = cdf[m - 1];
    if !(total > 0.0) {
        return Err(QhError::NonFinite("seed density integrates to zero".into()));
    }
    let coord = |i: usize| grid.axis_min(axis) + i as f64 * h;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let level = (k as f64 + 0.5) / n as f64 * total;
        // leftmost index with cdf >= level
        let j = cdf.partition_point(|&c| c < level);
        if j == 0 {
            out.push(coord(0));
            continue;
        }
        let (c0, c1) = (cdf[j - 1], cdf[j]);
        if c1 > c0 {
            let f = (level - c0) / (c1 - c0);
            out.push(coord(j - 1) + f * h);
        } else {
            out.push(coord(j - 1));
        }
    }
    Ok(out)
}

/// Per-sample status flag: 0 = clean, 1 = near a masked node (midpoint
/// fallback engaged), 2 = left the domain (position frozen), 3 = both.
pub type PathFlag = u8;

pub const FLAG_NEAR_NODE: PathFlag = 1;
pub const FLAG_EXITED: PathFlag = 2;

#[derive(Debug, Clone)]
pub struct TrajectoryBundle {
    pub seeds: Vec<[f64; 2]>,
    /// Sample instants (the snapshot times).
    pub times: Vec<f64>,
    /// `paths[seed][time]` positions.
    pub paths: Vec<Vec<[f64; 2]>>,
    /// `velocities[seed][time]`.
    pub velocities: Vec<Vec<[f64; 2]>>,
    /// `flags[seed][time]`, cumulative.
    pub flags: Vec<Vec<PathFlag>>,
}

/// RK4 sub-steps per snapshot interval.
pub const DEFAULT_SUBSTEPS: usize = 8;

/// Dilation radius (in cells) around masked nodes that triggers the
/// midpoint fallback.
const NODE_HALO_CELLS: usize = 2;

pub fn integrate_bundle(
    snapshots: &[WaveField],
    times: &[f64],
    v_r: Option<&VectorField>,
    seeds: &[[f64; 2]],
    constants: &PhysicalConstants,
) -> Result<TrajectoryBundle> {
    if snapshots.len() < 2 || snapshots.len() != times.len() {
        return Err(QhError::config(
            "snapshots",
            "need at least two snapshots with matching times",
        ));
    }
    let grid = snapshots[0].grid.clone();
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(QhError::config("times", "must be strictly increasing"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(QhError::config("times", "snapshots must be equally spaced"));
        }
    }
    for (i, s) in snapshots.iter().enumerate() {
        if !s.grid.same_layout(&grid) {
            return Err(QhError::Grid("snapshot grids differ".into()));
        }
        if !s.phase_valid {
            return Err(QhError::PhaseUnwrap(format!(
                "snapshot {i} has no consistent action; cannot integrate trajectories"
            )));
        }
    }
    if let Some(f) = v_r {
        if !f.grid.same_layout(&grid) {
            return Err(QhError::Grid("v_r grid mismatch".into()));
        }
    }
    for (i, s) in seeds.iter().enumerate() {
        if !inside(&grid, s) {
            return Err(QhError::config(
                "seeds",
                format!("seed {i} at ({}, {}) is outside the grid", s[0], s[1]),
            ));
        }
    }

    // velocity samples and node halos per snapshot
    let fields: Vec<VelocitySample> = snapshots
        .iter()
        .map(|wf| VelocitySample::new(wf, v_r, constants))
        .collect();

    let n_seeds = seeds.len();
    let mut paths = vec![Vec::with_capacity(times.len()); n_seeds];
    let mut velocities = vec![Vec::with_capacity(times.len()); n_seeds];
    let mut flags = vec![Vec::with_capacity(times.len()); n_seeds];

    for (s, seed) in seeds.iter().enumerate() {
        paths[s].push(*seed);
        velocities[s].push(fields[0].velocity(&grid, *seed));
        flags[s].push(0);
    }

    for k in 0..snapshots.len() - 1 {
        let (fa, fb) = (&fields[k], &fields[k + 1]);
        for s in 0..n_seeds {
            let mut flag = *flags[s].last().unwrap();
            let mut x = *paths[s].last().unwrap();
            if flag & FLAG_EXITED == 0 {
                let near_node = fa.near_node(&grid, x) || fb.near_node(&grid, x);
                let (sub, use_midpoint) = if near_node {
                    flag |= FLAG_NEAR_NODE;
                    (2 * DEFAULT_SUBSTEPS, true)
                } else {
                    (DEFAULT_SUBSTEPS, false)
                };
                let h = dt / sub as f64;
                for j in 0..sub {
                    let theta0 = j as f64 / sub as f64;
                    let eval = |p: [f64; 2], frac: f64| -> [f64; 2] {
                        let th = theta0 + frac / sub as f64;
                        let va = fa.velocity(&grid, p);
                        let vb = fb.velocity(&grid, p);
                        [
                            (1.0 - th) * va[0] + th * vb[0],
                            (1.0 - th) * va[1] + th * vb[1],
                        ]
                    };
                    x = if use_midpoint {
                        step_midpoint(&grid, x, h, &eval)
                    } else {
                        step_rk4(&grid, x, h, &eval)
                    };
                    if grid.boundary() == Boundary::Reflecting && clamp_exits(&grid, &mut x) {
                        flag |= FLAG_EXITED;
                        break;
                    }
                }
            }
            paths[s].push(x);
            velocities[s].push(if flag & FLAG_EXITED != 0 {
                [0.0, 0.0]
            } else {
                fb.velocity(&grid, x)
            });
            flags[s].push(flag);
        }
    }

    Ok(TrajectoryBundle {
        seeds: seeds.to_vec(),
        times: times.to_vec(),
        paths,
        velocities,
        flags,
    })
}

fn step_rk4(grid: &Grid, x: [f64; 2], h: f64, eval: &impl Fn([f64; 2], f64) -> [f64; 2]) -> [f64; 2] {
    let k1 = eval(x, 0.0);
    let k2 = eval(offset(grid, x, k1, 0.5 * h), 0.5);
    let k3 = eval(offset(grid, x, k2, 0.5 * h), 0.5);
    let k4 = eval(offset(grid, x, k3, h), 1.0);
    let mut out = [0.0; 2];
    for d in 0..2 {
        out[d] = x[d] + h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    }
    wrap_position(grid, &mut out);
    out
}

fn step_midpoint(
    grid: &Grid,
    x: [f64; 2],
    h: f64,
    eval: &impl Fn([f64; 2], f64) -> [f64; 2],
) -> [f64; 2] {
    let k1 = eval(x, 0.0);
    let k2 = eval(offset(grid, x, k1, 0.5 * h), 0.5);
    let mut out = [x[0] + h * k2[0], x[1] + h * k2[1]];
    wrap_position(grid, &mut out);
    out
}

fn offset(grid: &Grid, x: [f64; 2], v: [f64; 2], h: f64) -> [f64; 2] {
    let mut out = [x[0] + h * v[0], x[1] + h * v[1]];
    wrap_position(grid, &mut out);
    out
}

fn wrap_position(grid: &Grid, x: &mut [f64; 2]) {
    if grid.boundary() != Boundary::Periodic {
        return;
    }
    for axis in 0..grid.dim() {
        let (lo, len) = (grid.axis_min(axis), grid.axis_extent(axis));
        x[axis] = lo + (x[axis] - lo).rem_euclid(len);
    }
}

fn clamp_exits(grid: &Grid, x: &mut [f64; 2]) -> bool {
    let mut exited = false;
    for axis in 0..grid.dim() {
        let (lo, hi) = (grid.axis_min(axis), grid.axis_max(axis));
        if x[axis] < lo {
            x[axis] = lo;
            exited = true;
        } else if x[axis] > hi {
            x[axis] = hi;
            exited = true;
        }
    }
    exited
}

fn inside(grid: &Grid, x: &[f64; 2]) -> bool {
    (0..grid.dim()).all(|a| x[a] >= grid.axis_min(a) && x[a] <= grid.axis_max(a))
}

/// Velocity field of one snapshot plus the dilated node mask.
struct VelocitySample {
    vx: Vec<f64>,
    vy: Option<Vec<f64>>,
    halo: Option<Vec<bool>>,
}

impl VelocitySample {
    fn new(wf: &WaveField, v_r: Option<&VectorField>, constants: &PhysicalConstants) -> Self {
        let grad = phase_gradient(&wf.grid, &wf.s, constants.hbar);
        let mut vx: Vec<f64> = grad[0].iter().map(|g| g / constants.m).collect();
        let mut vy = if wf.grid.dim() == 2 {
            Some(grad[1].iter().map(|g| g / constants.m).collect::<Vec<f64>>())
        } else {
            None
        };
        if let Some(f) = v_r {
            for (a, b) in vx.iter_mut().zip(&f.comps[0]) {
                *a += b;
            }
            if let (Some(vy), Some(fy)) = (vy.as_mut(), f.comps.get(1)) {
                for (a, b) in vy.iter_mut().zip(fy) {
                    *a += b;
                }
            }
        }
        let halo = if wf.node_mask.iter().any(|&m| m) {
            Some(dilate(&wf.grid, &wf.node_mask, NODE_HALO_CELLS))
        } else {
            None
        };
        VelocitySample { vx, vy, halo }
    }

    fn velocity(&self, grid: &Grid, x: [f64; 2]) -> [f64; 2] {
        let vx = interpolate(grid, &self.vx, x);
        let vy = self
            .vy
            .as_ref()
            .map(|v| interpolate(grid, v, x))
            .unwrap_or(0.0);
        [vx, vy]
    }

    fn near_node(&self, grid: &Grid, x: [f64; 2]) -> bool {
        match &self.halo {
            None => false,
            Some(h) => {
                let (ix, iy) = nearest_cell(grid, x);
                h[iy * grid.nx() + ix]
            }
        }
    }
}

fn dilate(grid: &Grid, mask: &[bool], cells: usize) -> Vec<bool> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = vec![false; mask.len()];
    let r = cells as isize;
    for iy in 0..ny as isize {
        for ix in 0..nx as isize {
            if !mask[(iy * nx as isize + ix) as usize] {
                continue;
            }
            for dy in -r..=r {
                for dx in -r..=r {
                    let (jx, jy) = match grid.boundary() {
                        Boundary::Periodic => (
                            (ix + dx).rem_euclid(nx as isize),
                            (iy + dy).rem_euclid(ny as isize),
                        ),
                        Boundary::Reflecting => {
                            let jx = (ix + dx).clamp(0, nx as isize - 1);
                            let jy = (iy + dy).clamp(0, ny as isize - 1);
                            (jx, jy)
                        }
                    };
                    out[(jy * nx as isize + jx) as usize] = true;
                }
            }
        }
    }
    out
}

fn nearest_cell(grid: &Grid, x: [f64; 2]) -> (usize, usize) {
    let ix = ((x[0] - grid.axis_min(0)) / grid.dx()).round() as isize;
    let ix = match grid.boundary() {
        Boundary::Periodic => ix.rem_euclid(grid.nx() as isize) as usize,
        Boundary::Reflecting => ix.clamp(0, grid.nx() as isize - 1) as usize,
    };
    if grid.dim() == 1 {
        return (ix, 0);
    }
    let iy = ((x[1] - grid.axis_min(1)) / grid.dy()).round() as isize;
    let iy = match grid.boundary() {
        Boundary::Periodic => iy.rem_euclid(grid.ny() as isize) as usize,
        Boundary::Reflecting => iy.clamp(0, grid.ny() as isize - 1) as usize,
    };
    (ix, iy)
}

/// Linear (1D) / bilinear (2D) interpolation with periodic wrap or edge
/// clamp.
pub fn interpolate(grid: &Grid, data: &[f64], x: [f64; 2]) -> f64 {
    let sample_axis = |axis: usize, pos: f64| -> (usize, usize, f64) {
        let n = grid.axis_len(axis);
        let t = (pos - grid.axis_min(axis)) / grid.spacing(axis);
        match grid.boundary() {
            Boundary::Periodic => {
                let t = t.rem_euclid(n as f64);
                let i0 = t.floor() as usize % n;
                let f = t - t.floor();
                ((i0) % n, (i0 + 1) % n, f)
            }
            Boundary::Reflecting => {
                let t = t.clamp(0.0, (n - 1) as f64);
                let i0 = (t.floor() as usize).min(n - 2);
                (i0, i0 + 1, t - i0 as f64)
            }
        }
    };
    let (ix0, ix1, fx) = sample_axis(0, x[0]);
    if grid.dim() == 1 {
        return data[ix0] * (1.0 - fx) + data[ix1] * fx;
    }
    let (iy0, iy1, fy) = sample_axis(1, x[1]);
    let nx = grid.nx();
    let v00 = data[iy0 * nx + ix0];
    let v10 = data[iy0 * nx + ix1];
    let v01 = data[iy1 * nx + ix0];
    let v11 = data[iy1 * nx + ix1];
    (v00 * (1.0 - fx) + v10 * fx) * (1.0 - fy) + (v01 * (1.0 - fx) + v11 * fx) * fy
}
