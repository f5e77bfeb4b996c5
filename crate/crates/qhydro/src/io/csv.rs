//! Plot-ready CSV writers and the reader used to re-verify artifacts.
//!
//! Numbers are written with the shortest decimal that round-trips to the
//! same f64, headers are mandatory, line endings are LF; two runs of the
//! same configuration produce byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::bohm::TrajectoryBundle;
use crate::error::{QhError, Result};
use crate::field::ScalarField;
use crate::madelung::WaveField;
use crate::scene::FlowScene;
use crate::torus::{HelicoidalRing, OrientationTrace, SurfaceMesh};
use crate::vortex::{AveragedProfile, RadialEvolution, ViscosityPath};

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

struct CsvWriter {
    out: BufWriter<File>,
    rows: u64,
}

impl CsvWriter {
    fn create(path: &Path, header: &str) -> Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(header.as_bytes())?;
        out.write_all(b"\n")?;
        Ok(CsvWriter { out, rows: 0 })
    }

    fn row(&mut self, cells: &[String]) -> Result<()> {
        self.out.write_all(cells.join(",").as_bytes())?;
        self.out.write_all(b"\n")?;
        self.rows += 1;
        Ok(())
    }

    fn finish(mut self) -> Result<u64> {
        self.out.flush()?;
        Ok(self.rows)
    }
}

/// One row per grid point: coordinates, then the polar factors and psi.
pub fn write_wavefield(path: &Path, wf: &WaveField) -> Result<u64> {
    let two_d = wf.grid.dim() == 2;
    let header = if two_d {
        "x,y,rho,s,c_rho,re_psi,im_psi"
    } else {
        "x,rho,s,c_rho,re_psi,im_psi"
    };
    let mut w = CsvWriter::create(path, header)?;
    for i in 0..wf.grid.len() {
        let (x, y) = wf.grid.coords(i);
        let mut cells = vec![fmt_f64(x)];
        if two_d {
            cells.push(fmt_f64(y));
        }
        cells.extend([
            fmt_f64(wf.rho[i]),
            fmt_f64(wf.s[i]),
            fmt_f64(wf.c_rho[i]),
            fmt_f64(wf.psi[i].re),
            fmt_f64(wf.psi[i].im),
        ]);
        w.row(&cells)?;
    }
    w.finish()
}

pub fn write_scalar_field(path: &Path, field: &ScalarField, name: &str) -> Result<u64> {
    let two_d = field.grid.dim() == 2;
    let header = if two_d {
        format!("x,y,{name}")
    } else {
        format!("x,{name}")
    };
    let mut w = CsvWriter::create(path, &header)?;
    for i in 0..field.grid.len() {
        let (x, y) = field.grid.coords(i);
        let mut cells = vec![fmt_f64(x)];
        if two_d {
            cells.push(fmt_f64(y));
        }
        cells.push(fmt_f64(field.data[i]));
        w.row(&cells)?;
    }
    w.finish()
}

pub fn write_bundle(path: &Path, bundle: &TrajectoryBundle, two_d: bool) -> Result<u64> {
    let header = if two_d {
        "seed_index,t,x,y,vx,vy,flag"
    } else {
        "seed_index,t,x,vx,flag"
    };
    let mut w = CsvWriter::create(path, header)?;
    for s in 0..bundle.seeds.len() {
        for (k, t) in bundle.times.iter().enumerate() {
            let p = bundle.paths[s][k];
            let v = bundle.velocities[s][k];
            let mut cells = vec![s.to_string(), fmt_f64(*t), fmt_f64(p[0])];
            if two_d {
                cells.push(fmt_f64(p[1]));
            }
            cells.push(fmt_f64(v[0]));
            if two_d {
                cells.push(fmt_f64(v[1]));
            }
            cells.push(bundle.flags[s][k].to_string());
            w.row(&cells)?;
        }
    }
    w.finish()
}

pub fn write_streamlines(path: &Path, scene: &FlowScene) -> Result<u64> {
    let mut w = CsvWriter::create(path, "line_index,s,x,y,psi_stream")?;
    for (li, line) in scene.streamlines.iter().enumerate() {
        for k in 0..line.points.len() {
            w.row(&[
                li.to_string(),
                fmt_f64(line.arc[k]),
                fmt_f64(line.points[k][0]),
                fmt_f64(line.points[k][1]),
                fmt_f64(line.psi[k]),
            ])?;
        }
    }
    w.finish()
}

/// Radial history: one row per (time, radius) with the orbital speed
/// integrated from the vorticity.
pub fn write_radial_history(path: &Path, ev: &RadialEvolution) -> Result<u64> {
    let mut w = CsvWriter::create(path, "t,r,omega,v")?;
    for (k, t) in ev.times.iter().enumerate() {
        let omega = &ev.history[k];
        // v(r) = (1/r) integral_0^r omega r' dr' by the trapezoid rule
        let mut acc = 0.0;
        for (i, &r) in ev.r.iter().enumerate() {
            let v = if i == 0 {
                0.0
            } else {
                let dr = r - ev.r[i - 1];
                acc += 0.5 * (omega[i - 1] * ev.r[i - 1] + omega[i] * r) * dr;
                acc / r
            };
            w.row(&[fmt_f64(*t), fmt_f64(r), fmt_f64(omega[i]), fmt_f64(v)])?;
        }
    }
    w.finish()
}

pub fn write_viscosity_path(path: &Path, vp: &ViscosityPath) -> Result<u64> {
    let mut w = CsvWriter::create(path, "t,nu,sigma_sq")?;
    for i in 0..vp.times.len() {
        w.row(&[
            fmt_f64(vp.times[i]),
            fmt_f64(vp.nu[i]),
            fmt_f64(vp.sigma_sq[i]),
        ])?;
    }
    w.finish()
}

pub fn write_ensemble(path: &Path, avg: &AveragedProfile) -> Result<u64> {
    let mut w = CsvWriter::create(path, "r,mean_omega,stderr")?;
    for i in 0..avg.r.len() {
        let se = avg.stderr.as_ref().map_or(f64::NAN, |s| s[i]);
        w.row(&[fmt_f64(avg.r[i]), fmt_f64(avg.mean_omega[i]), fmt_f64(se)])?;
    }
    w.finish()
}

/// Ring samples with the accumulated axis angle and the binary
/// orientation tag that alternates each 360-degree revolution.
pub fn write_ring(path: &Path, ring: &HelicoidalRing) -> Result<u64> {
    let mut w = CsvWriter::create(path, "t,x,y,z,axis_angle,orientation_tag")?;
    let shape = &ring.shape;
    for (k, t) in ring.t_samples.iter().enumerate() {
        let p = ring.points[k];
        let axis_angle = shape.omega1 * t + shape.phi1;
        let tube_angle = shape.omega0 * t + shape.phi0;
        let tag = ((tube_angle - shape.phi0) / (2.0 * std::f64::consts::PI)).floor() as i64 % 2;
        w.row(&[
            fmt_f64(*t),
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2]),
            fmt_f64(axis_angle),
            tag.to_string(),
        ])?;
    }
    w.finish()
}

pub fn write_mesh_csv(path: &Path, mesh: &SurfaceMesh) -> Result<u64> {
    let mut w = CsvWriter::create(path, "theta_index,phi_index,x,y,z,nx,ny,nz")?;
    for j in 0..mesh.n_phi {
        for i in 0..mesh.n_theta {
            let v = mesh.vertices[j * mesh.n_theta + i];
            let n = mesh.normals[j * mesh.n_theta + i];
            w.row(&[
                i.to_string(),
                j.to_string(),
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2]),
                fmt_f64(n[0]),
                fmt_f64(n[1]),
                fmt_f64(n[2]),
            ])?;
        }
    }
    w.finish()
}

/// Wavefront OBJ with vertices, normals, and quad faces.
pub fn write_mesh_obj(path: &Path, mesh: &SurfaceMesh) -> Result<u64> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]))?;
    }
    for n in &mesh.normals {
        writeln!(out, "vn {} {} {}", fmt_f64(n[0]), fmt_f64(n[1]), fmt_f64(n[2]))?;
    }
    let mut faces = 0u64;
    for q in &mesh.quads {
        let idx: Vec<String> = q.iter().map(|&i| format!("{0}//{0}", i + 1)).collect();
        writeln!(out, "f {} {} {} {}", idx[0], idx[1], idx[2], idx[3])?;
        faces += 1;
    }
    out.flush()?;
    Ok(faces)
}

pub fn write_trace(path: &Path, trace: &OrientationTrace) -> Result<u64> {
    let mut w = CsvWriter::create(
        path,
        "revolutions,angle_deg,x,y,z,direction_dot,normal_dot,binormal_dot",
    )?;
    for c in &trace.checkpoints {
        w.row(&[
            c.revolutions.to_string(),
            fmt_f64(c.angle_deg),
            fmt_f64(c.position[0]),
            fmt_f64(c.position[1]),
            fmt_f64(c.position[2]),
            fmt_f64(c.direction_dot),
            fmt_f64(c.normal_dot),
            fmt_f64(c.binormal_dot),
        ])?;
    }
    w.finish()
}

/// Parsed CSV: header names and numeric rows (`NaN` allowed).
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| QhError::Invariant {
                name: "csv_column".into(),
                detail: format!("missing column `{name}`"),
            })
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let file = BufReader::new(File::open(path)?);
    let mut lines = file.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| QhError::Invariant {
            name: "csv_read".into(),
            detail: format!("{} is empty", path.display()),
        })??;
    let header: Vec<String> = header_line.split(',').map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                if cell == "NaN" {
                    Ok(f64::NAN)
                } else {
                    cell.parse::<f64>().map_err(|_| QhError::Invariant {
                        name: "csv_read".into(),
                        detail: format!("bad cell `{cell}` in {}", path.display()),
                    })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}
