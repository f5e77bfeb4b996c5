//! Parametric torus: helicoidal rings with rational winding, exact and
//! mesh-integrated measures, the spindle transformation as the torus
//! radius shrinks, and the 720-degree double-cover closure traced by
//! discrete parallel transport.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{QhError, Result};

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Torus curve/surface parameters: tube radius `a`, torus radius `b`,
/// angular rates and phases of the tube and axis rotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusShape {
    /// Tube radius `a > 0`.
    pub tube_radius: f64,
    /// Torus radius `b >= 0`; `b < a` is the spindle regime, `b = 0`
    /// degenerates to a doubly coated sphere.
    pub torus_radius: f64,
    /// Tube angular rate.
    pub omega0: f64,
    /// Axis angular rate.
    pub omega1: f64,
    pub phi0: f64,
    pub phi1: f64,
    /// `omega0 / omega1` in lowest terms when constructed rationally;
    /// closure analysis requires it.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<(u32, u32)>,
}

impl TorusShape {
    pub fn new(
        tube_radius: f64,
        torus_radius: f64,
        omega0: f64,
        omega1: f64,
        phi0: f64,
        phi1: f64,
    ) -> Result<Self> {
        let s = Self {
            tube_radius,
            torus_radius,
            omega0,
            omega1,
            phi0,
            phi1,
            ratio: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Construct with the frequency ratio `omega0 / omega1 = p / q` held
    /// exactly: `omega1` derives from `omega0`, and the reduced `(p, q)`
    /// drives closure analysis.
    pub fn with_rational_ratio(
        tube_radius: f64,
        torus_radius: f64,
        omega0: f64,
        p: u32,
        q: u32,
        phi0: f64,
        phi1: f64,
    ) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(QhError::config("torus.ratio", "p and q must be positive"));
        }
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let s = Self {
            tube_radius,
            torus_radius,
            omega0,
            omega1: omega0 * q as f64 / p as f64,
            phi0,
            phi1,
            ratio: Some((p, q)),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tube_radius > 0.0) || !self.tube_radius.is_finite() {
            return Err(QhError::config("torus.tube_radius", "must be finite and > 0"));
        }
        if !(self.torus_radius >= 0.0) || !self.torus_radius.is_finite() {
            return Err(QhError::config("torus.torus_radius", "must be finite and >= 0"));
        }
        if !(self.omega0 > 0.0) || !(self.omega1 > 0.0) {
            return Err(QhError::config("torus.omega", "angular rates must be > 0"));
        }
        for (name, v) in [("phi0", self.phi0), ("phi1", self.phi1)] {
            if !(0.0..2.0 * PI).contains(&v) {
                return Err(QhError::config(
                    format!("torus.{name}"),
                    "phases live in [0, 2 pi)",
                ));
            }
        }
        Ok(())
    }

    /// Point on the winding curve at parameter `t`.
    pub fn point(&self, t: f64) -> [f64; 3] {
        let alpha = self.omega0 * t + self.phi0;
        let beta = self.omega1 * t + self.phi1;
        let ring = self.torus_radius + self.tube_radius * alpha.cos();
        [ring * beta.cos(), ring * beta.sin(), self.tube_radius * alpha.sin()]
    }

    /// Velocity of the winding curve at parameter `t`.
    pub fn velocity(&self, t: f64) -> [f64; 3] {
        let alpha = self.omega0 * t + self.phi0;
        let beta = self.omega1 * t + self.phi1;
        let ring = self.torus_radius + self.tube_radius * alpha.cos();
        let d_ring = -self.tube_radius * self.omega0 * alpha.sin();
        [
            d_ring * beta.cos() - ring * self.omega1 * beta.sin(),
            d_ring * beta.sin() + ring * self.omega1 * beta.cos(),
            self.tube_radius * self.omega0 * alpha.cos(),
        ]
    }

    /// Surface point with the tube and axis angles taken as independent.
    pub fn surface_point(&self, theta: f64, phi: f64) -> [f64; 3] {
        let ring = self.torus_radius + self.tube_radius * theta.cos();
        [ring * phi.cos(), ring * phi.sin(), self.tube_radius * theta.sin()]
    }

    /// Unit normal of the parametric surface (`r_theta x r_phi`
    /// normalized). Its orientation flips across the circles where
    /// `b + a cos(theta)` changes sign — the spindle self-intersection.
    pub fn surface_normal(&self, theta: f64, phi: f64) -> [f64; 3] {
        let ring = self.torus_radius + self.tube_radius * theta.cos();
        let s = if ring >= 0.0 { -1.0 } else { 1.0 };
        [
            s * theta.cos() * phi.cos(),
            s * theta.cos() * phi.sin(),
            s * theta.sin(),
        ]
    }
}

/// Regime of the `(a, b)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusRegime {
    /// `b > a`: ordinary ring torus.
    Ring,
    /// `b = a`: horn torus, tube circles touch at the origin.
    Horn,
    /// `0 < b < a`: self-intersecting spindle torus.
    Spindle,
    /// `b = 0`: the surface coats a sphere of radius `a` twice.
    DegenerateSphere,
}

pub fn regime(a: f64, b: f64) -> TorusRegime {
    if b == 0.0 {
        TorusRegime::DegenerateSphere
    } else if b < a {
        TorusRegime::Spindle
    } else if b == a {
        TorusRegime::Horn
    } else {
        TorusRegime::Ring
    }
}

/// Closed-form measures `V = 2 pi^2 b a^2`, `S = 4 pi^2 b a`, valid as
/// unsigned measures for `b >= a` and returned with a regime tag
/// regardless (both vanish at `b = 0`, where the mesh path reports the
/// covered sphere instead).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub volume: f64,
    pub surface: f64,
    pub regime: TorusRegime,
}

pub fn torus_measures(a: f64, b: f64) -> Result<Measures> {
    if !(a > 0.0) || b < 0.0 {
        return Err(QhError::config("torus", "need a > 0 and b >= 0"));
    }
    Ok(Measures {
        volume: 2.0 * PI * PI * b * a * a,
        surface: 4.0 * PI * PI * b * a,
        regime: regime(a, b),
    })
}

/// Closed curve winding on the torus with rationally related rates.
#[derive(Debug, Clone)]
pub struct HelicoidalRing {
    pub shape: TorusShape,
    pub t_samples: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    pub turns_about_tube: u32,
    pub turns_about_axis: u32,
    pub closed: bool,
    /// Distance between the first and last sample.
    pub closure_gap: f64,
    /// Closing parameter interval (`2 pi p / omega0` when closed).
    pub t_close: f64,
}

pub const DEFAULT_RING_SAMPLES_PER_TURN: usize = 512;

/// Sample the winding curve over its minimal closing interval. Shapes
/// built without a rational ratio fall back to an open four-turn sweep
/// with `closed = false`.
pub fn helicoidal_ring(shape: &TorusShape, samples_per_tube_turn: usize) -> Result<HelicoidalRing> {
    shape.validate()?;
    if samples_per_tube_turn < 64 {
        return Err(QhError::config(
            "ring.samples_per_tube_turn",
            "need at least 64 samples per tube turn",
        ));
    }
    let (closed, p, q, t_close) = match shape.ratio {
        Some((p, q)) => (true, p, q, 2.0 * PI * p as f64 / shape.omega0),
        None => (false, 0, 0, 8.0 * PI / shape.omega0),
    };
    let n = samples_per_tube_turn * if closed { p as usize } else { 4 };
    let t_samples: Vec<f64> = (0..=n).map(|j| t_close * j as f64 / n as f64).collect();
    let points: Vec<[f64; 3]> = t_samples.iter().map(|&t| shape.point(t)).collect();
    let gap = dist(points[0], points[n]);
    Ok(HelicoidalRing {
        shape: shape.clone(),
        t_samples,
        points,
        turns_about_tube: p,
        turns_about_axis: q,
        closed: closed && gap < 1e-10 * shape.tube_radius,
        closure_gap: gap,
        t_close,
    })
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Quad-lattice mesh of the torus surface with analytic per-vertex
/// normals and per-face areas.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub tube_radius: f64,
    pub torus_radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    /// `vertices[j * n_theta + i]` at `theta_i = 2 pi i / n_theta`,
    /// `phi_j = 2 pi j / n_phi`.
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    /// Quad corner indices, wrapping in both directions.
    pub quads: Vec<[u32; 4]>,
    pub face_areas: Vec<f64>,
    /// Zero-area faces dropped from the area sum (degenerate poles).
    pub dropped_faces: usize,
    /// Present exactly when the normal orientation reverses along the
    /// tube angle (spindle and degenerate regimes): the crossings and the
    /// height of the self-intersection locus on the axis.
    pub reversal: Option<NormalReversal>,
}

/// The locus where the parametric normal flips: `b + a cos(theta) = 0`,
/// which maps to the axis points `z = +/- sqrt(a^2 - b^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalReversal {
    pub theta_crossings: Vec<f64>,
    pub axis_z: f64,
}

pub fn mesh_torus(shape: &TorusShape, n_theta: usize, n_phi: usize) -> Result<SurfaceMesh> {
    shape.validate()?;
    if n_theta < 32 || n_phi < 32 {
        return Err(QhError::config("mesh", "need at least 32 samples per angle"));
    }
    let (a, b) = (shape.tube_radius, shape.torus_radius);
    let mut vertices = Vec::with_capacity(n_theta * n_phi);
    let mut normals = Vec::with_capacity(n_theta * n_phi);
    for j in 0..n_phi {
        let phi = 2.0 * PI * j as f64 / n_phi as f64;
        for i in 0..n_theta {
            let theta = 2.0 * PI * i as f64 / n_theta as f64;
            vertices.push(shape.surface_point(theta, phi));
            normals.push(shape.surface_normal(theta, phi));
        }
    }
    let mut quads = Vec::with_capacity(n_theta * n_phi);
    let mut face_areas = Vec::with_capacity(n_theta * n_phi);
    let mut dropped = 0usize;
    for j in 0..n_phi {
        let jn = (j + 1) % n_phi;
        for i in 0..n_theta {
            let i_next = (i + 1) % n_theta;
            let q = [
                (j * n_theta + i) as u32,
                (j * n_theta + i_next) as u32,
                (jn * n_theta + i_next) as u32,
                (jn * n_theta + i) as u32,
            ];
            let area = tri_area(&vertices, q[0], q[1], q[2]) + tri_area(&vertices, q[0], q[2], q[3]);
            if area == 0.0 {
                dropped += 1;
            }
            quads.push(q);
            face_areas.push(area);
        }
    }

    // reversal scan along the tube angle
    let mut crossings = Vec::new();
    for i in 0..n_theta {
        let th0 = 2.0 * PI * i as f64 / n_theta as f64;
        let th1 = 2.0 * PI * (i + 1) as f64 / n_theta as f64;
        let r0 = b + a * th0.cos();
        let r1 = b + a * th1.cos();
        // sign change only: a tangential touch of zero (horn torus) is not
        // a reversal
        if (r0 >= 0.0) != (r1 >= 0.0) {
            let f = r0 / (r0 - r1);
            crossings.push(th0 + f * (th1 - th0));
        }
    }
    let reversal = if crossings.is_empty() {
        None
    } else {
        Some(NormalReversal {
            theta_crossings: crossings,
            axis_z: (a * a - b * b).max(0.0).sqrt(),
        })
    };

    Ok(SurfaceMesh {
        tube_radius: a,
        torus_radius: b,
        n_theta,
        n_phi,
        vertices,
        normals,
        quads,
        face_areas,
        dropped_faces: dropped,
        reversal,
    })
}

fn tri_area(v: &[[f64; 3]], i0: u32, i1: u32, i2: u32) -> f64 {
    let (p0, p1, p2) = (v[i0 as usize], v[i1 as usize], v[i2 as usize]);
    let e1 = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let e2 = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
    0.5 * norm3(cross3(e1, e2))
}

fn tri_signed_volume(v: &[[f64; 3]], i0: u32, i1: u32, i2: u32) -> f64 {
    let (p0, p1, p2) = (v[i0 as usize], v[i1 as usize], v[i2 as usize]);
    dot3(p0, cross3(p1, p2)) / 6.0
}

/// Mesh-integrated measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshMeasures {
    /// Sum of absolute face areas: reports the full coating, so the
    /// degenerate sphere counts twice (`8 pi a^2`).
    pub unsigned_area: f64,
    /// Volume enclosed by the surface. For `b > 0` this is the signed
    /// divergence-theorem sum in the parametric orientation, so
    /// self-intersecting spindle sheets cancel and the result tracks the
    /// closed form `2 pi^2 b a^2`. At exactly `b = 0` the two coats bound
    /// the ball once with opposite normals: the outward-oriented integral
    /// is halved by the covering count, giving the sphere volume.
    pub enclosed_volume: f64,
    pub regime: TorusRegime,
}

pub fn mesh_measures(mesh: &SurfaceMesh) -> MeshMeasures {
    let unsigned_area: f64 = mesh.face_areas.iter().sum();
    let (a, b) = (mesh.tube_radius, mesh.torus_radius);
    let degenerate = b == 0.0;
    let mut signed = 0.0;
    for (k, q) in mesh.quads.iter().enumerate() {
        let contribution = tri_signed_volume(&mesh.vertices, q[0], q[1], q[2])
            + tri_signed_volume(&mesh.vertices, q[0], q[2], q[3]);
        if degenerate {
            // orient every face outward: flip where the ring coordinate
            // b + a cos(theta) is negative
            let i = k % mesh.n_theta;
            let theta_mid = 2.0 * PI * (i as f64 + 0.5) / mesh.n_theta as f64;
            let sign = if b + a * theta_mid.cos() >= 0.0 { 1.0 } else { -1.0 };
            signed += sign * contribution;
        } else {
            signed += contribution;
        }
    }
    let enclosed_volume = if degenerate {
        signed.abs() / 2.0
    } else {
        signed.abs()
    };
    MeshMeasures {
        unsigned_area,
        enclosed_volume,
        regime: regime(a, b),
    }
}

/// Cross-section classification in the medial plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// Outer region A.
    Outer,
    /// Tube interior B.
    TubeInterior,
    /// Spindle region C (an extension of the outer region).
    Spindle,
    /// Interior of the degenerate sphere at `b = 0`.
    SphereInterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub regime: TorusRegime,
    pub regions: Vec<RegionLabel>,
    /// Height of the tube-circle intersection points `z = +/- value`
    /// (spindle); the tangency contact at the origin reports 0, the
    /// degenerate sphere its poles at `a`.
    pub intersection_z: Option<f64>,
    pub tangency: bool,
}

pub fn cross_section_regions(a: f64, b: f64) -> Result<CrossSection> {
    if !(a > 0.0) || b < 0.0 {
        return Err(QhError::config("cross_section", "need a > 0 and b >= 0"));
    }
    let reg = regime(a, b);
    let out = match reg {
        TorusRegime::Ring => CrossSection {
            regime: reg,
            regions: vec![RegionLabel::Outer, RegionLabel::TubeInterior],
            intersection_z: None,
            tangency: false,
        },
        TorusRegime::Horn => CrossSection {
            regime: reg,
            regions: vec![RegionLabel::Outer, RegionLabel::TubeInterior],
            intersection_z: Some(0.0),
            tangency: true,
        },
        TorusRegime::Spindle => CrossSection {
            regime: reg,
            regions: vec![
                RegionLabel::Outer,
                RegionLabel::TubeInterior,
                RegionLabel::Spindle,
            ],
            intersection_z: Some((a * a - b * b).sqrt()),
            tangency: false,
        },
        TorusRegime::DegenerateSphere => CrossSection {
            regime: reg,
            regions: vec![RegionLabel::Outer, RegionLabel::SphereInterior],
            intersection_z: Some(a),
            tangency: false,
        },
    };
    Ok(out)
}

/// One step of the spindle transformation sweep.
#[derive(Debug, Clone)]
pub struct SpindleStep {
    pub torus_radius: f64,
    pub shape: TorusShape,
    pub mesh: SurfaceMesh,
    pub formula: Measures,
    pub mesh_measures: MeshMeasures,
    pub classification: CrossSection,
    pub ring: HelicoidalRing,
}

/// Torus-radius list of the canonical spindle panel (tube radius 2).
pub const DEFAULT_SPINDLE_BS: [f64; 6] = [3.0, 2.0, 1.5, 1.0, 0.5, 0.01];
/// Torus-radius list of the canonical ring-degeneration sweep.
pub const DEFAULT_RING_SWEEP_BS: [f64; 5] = [4.0, 3.0, 2.0, 1.0, 0.001];

/// Walk the torus through descending `b`: per value, the surface mesh,
/// both measure routes, the cross-section classification, and the
/// two-turn helicoidal ring re-evaluated on that shape.
pub fn spindle_sweep(
    a: f64,
    b_list: &[f64],
    n_theta: usize,
    n_phi: usize,
    ring_samples_per_turn: usize,
) -> Result<Vec<SpindleStep>> {
    if b_list.is_empty() {
        return Err(QhError::config("sweep.b_list", "must not be empty"));
    }
    for w in b_list.windows(2) {
        if w[1] > w[0] {
            return Err(QhError::config("sweep.b_list", "must be descending"));
        }
    }
    if b_list.iter().any(|&b| b < 0.0) {
        return Err(QhError::config("sweep.b_list", "entries must be >= 0"));
    }
    b_list
        .iter()
        .map(|&b| {
            let shape = TorusShape::with_rational_ratio(a, b, 1.0, 2, 1, 0.0, 0.0)?;
            let mesh = mesh_torus(&shape, n_theta, n_phi)?;
            Ok(SpindleStep {
                torus_radius: b,
                formula: torus_measures(a, b)?,
                mesh_measures: mesh_measures(&mesh),
                classification: cross_section_regions(a, b)?,
                ring: helicoidal_ring(&shape, ring_samples_per_turn)?,
                mesh,
                shape,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Traversal {
    Forward,
    Reverse,
}

/// Frame state reported at each full revolution of the bypass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientationCheckpoint {
    pub revolutions: u32,
    /// `360 * revolutions`, negative for reverse traversal.
    pub angle_deg: f64,
    pub position: [f64; 3],
    /// Transported copy of the initial bypass direction against the
    /// original: -1 after one revolution, +1 after two.
    pub direction_dot: f64,
    pub normal_dot: f64,
    pub binormal_dot: f64,
}

/// Parallel-transport trace around the two-turn ring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientationTrace {
    pub start: [f64; 3],
    pub n_samples: usize,
    pub traversal: Traversal,
    pub checkpoints: Vec<OrientationCheckpoint>,
}

/// Discrete parallel transport of a reference frame around a closed
/// two-turn ring, anchored at the top of the axis. The test point passes
/// the anchor once per tube turn; after the first pass (one 360-degree
/// revolution of the bypass) the transported direction is reversed, after
/// the second (720 degrees, the ring closure) it is restored.
pub fn double_cover_rotation(
    shape: &TorusShape,
    ring: &HelicoidalRing,
    n_samples: usize,
    traversal: Traversal,
) -> Result<OrientationTrace> {
    if !ring.closed {
        return Err(QhError::config("double_cover.ring", "ring must be closed"));
    }
    if ring.turns_about_tube != 2 {
        return Err(QhError::config(
            "double_cover.ring",
            format!("need exactly 2 tube turns, ring has {}", ring.turns_about_tube),
        ));
    }
    if n_samples < 1000 {
        return Err(QhError::config("double_cover.n_samples", "need >= 1000 samples"));
    }
    let n = n_samples + (n_samples % 2); // even, so checkpoints fall on samples
    // anchor where the tube angle hits pi/2: the z-maximum
    let t_start = (0.5 * PI - shape.phi0) / shape.omega0;
    let t_span = ring.t_close;
    let sign = match traversal {
        Traversal::Forward => 1.0,
        Traversal::Reverse => -1.0,
    };

    let tangent = |j: usize| -> [f64; 3] {
        let t = t_start + sign * t_span * j as f64 / n as f64;
        let v = shape.velocity(t);
        normalize3([sign * v[0], sign * v[1], sign * v[2]])
    };
    let position = |j: usize| -> [f64; 3] {
        shape.point(t_start + sign * t_span * j as f64 / n as f64)
    };

    let t0 = tangent(0);
    let p0 = position(0);
    // radial reference made orthonormal to the start tangent
    let r0 = {
        let r = normalize3(p0);
        let proj = dot3(r, t0);
        normalize3([r[0] - proj * t0[0], r[1] - proj * t0[1], r[2] - proj * t0[2]])
    };
    let b0 = cross3(t0, r0);

    let mut dir = t0;
    let mut nor = r0;
    let mut bin = b0;
    let mut prev_t = t0;
    let mut checkpoints = Vec::new();

    for j in 1..=n {
        let t_new = tangent(j);
        let axis = cross3(prev_t, t_new);
        let axis_len = norm3(axis);
        let c = dot3(prev_t, t_new).clamp(-1.0, 1.0);
        if axis_len > 1e-300 {
            let axis = [axis[0] / axis_len, axis[1] / axis_len, axis[2] / axis_len];
            let angle = axis_len.atan2(c);
            dir = rotate_about(dir, axis, angle);
            nor = rotate_about(nor, axis, angle);
            bin = rotate_about(bin, axis, angle);
        }
        prev_t = t_new;
        if j % (n / 2) == 0 {
            let k = (j / (n / 2)) as u32;
            checkpoints.push(OrientationCheckpoint {
                revolutions: k,
                angle_deg: sign * 360.0 * k as f64,
                position: position(j),
                direction_dot: dot3(dir, t0),
                normal_dot: dot3(nor, r0),
                binormal_dot: dot3(bin, b0),
            });
        }
    }

    Ok(OrientationTrace {
        start: p0,
        n_samples: n,
        traversal,
        checkpoints,
    })
}

fn rotate_about(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    // Rodrigues rotation
    let (s, c) = angle.sin_cos();
    let kxv = cross3(axis, v);
    let kdv = dot3(axis, v);
    [
        v[0] * c + kxv[0] * s + axis[0] * kdv * (1.0 - c),
        v[1] * c + kxv[1] * s + axis[1] * kdv * (1.0 - c),
        v[2] * c + kxv[2] * s + axis[2] * kdv * (1.0 - c),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_shape(a: f64, b: f64) -> TorusShape {
        TorusShape::with_rational_ratio(a, b, 1.0, 2, 1, 0.0, 0.0).unwrap()
    }

    #[test]
    fn point_formulas() {
        let s = fig_shape(2.0, 4.0);
        let p = s.point(0.0);
        assert_eq!(p, [6.0, 0.0, 0.0]);
        // planar radius equals b + a cos(theta) for every sample
        for k in 0..500 {
            let t = 0.02 * k as f64;
            let p = s.point(t);
            let planar = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let expected = (4.0 + 2.0 * (t).cos()).abs();
            assert!((planar - expected).abs() < 1e-12, "t = {t}");
        }
        // z spans [-a, a] over a tube turn
        let z_extreme = (0..2000)
            .map(|k| s.point(2.0 * PI * k as f64 / 2000.0)[2])
            .fold((f64::MAX, f64::MIN), |(lo, hi), z| (lo.min(z), hi.max(z)));
        assert!((z_extreme.0 + 2.0).abs() < 1e-5 && (z_extreme.1 - 2.0).abs() < 1e-5);
    }

    #[test]
    fn two_turn_ring_closes() {
        let s = fig_shape(2.0, 4.0);
        let ring = helicoidal_ring(&s, 256).unwrap();
        assert!(ring.closed);
        assert_eq!(ring.turns_about_tube, 2);
        assert_eq!(ring.turns_about_axis, 1);
        assert!((ring.t_close - 4.0 * PI).abs() < 1e-12);
        assert!(ring.closure_gap < 1e-10 * 2.0, "gap {}", ring.closure_gap);
    }

    #[test]
    fn equal_rates_close_in_one_turn() {
        let s = TorusShape::with_rational_ratio(1.0, 3.0, 2.0, 1, 1, 0.0, 0.0).unwrap();
        let ring = helicoidal_ring(&s, 128).unwrap();
        assert!(ring.closed);
        assert_eq!((ring.turns_about_tube, ring.turns_about_axis), (1, 1));
        assert!((ring.t_close - PI).abs() < 1e-12);
    }

    #[test]
    fn irrational_representation_stays_open() {
        let s = TorusShape::new(1.0, 3.0, 1.0, 2.0f64.sqrt(), 0.0, 0.0).unwrap();
        let ring = helicoidal_ring(&s, 64).unwrap();
        assert!(!ring.closed);
    }

    #[test]
    fn phase_shift_is_a_rotation() {
        // shifting phi0 by a whole number of sample steps maps the sample
        // set onto itself rotated about z by -delta * q / p
        let a = 2.0;
        let b = 4.0;
        let n_per_turn = 256;
        let base = helicoidalring_with_phase(a, b, 0.0, n_per_turn);
        let steps = 7;
        let delta = 2.0 * PI * steps as f64 / n_per_turn as f64;
        let shifted = helicoidalring_with_phase(a, b, delta, n_per_turn);
        let rot = -delta * 0.5; // q / p = 1 / 2
        let (s, c) = rot.sin_cos();
        let n = base.points.len() - 1;
        let mut worst = 0.0f64;
        for j in 0..n {
            // sample j of the shifted ring corresponds to sample j + steps
            // of the base ring, rotated
            let p = base.points[(j + steps) % n];
            let expected = [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
            worst = worst.max(dist(expected, shifted.points[j]));
        }
        assert!(worst < 1e-9, "Hausdorff-style mismatch {worst}");
    }

    fn helicoidalring_with_phase(a: f64, b: f64, phi0: f64, n: usize) -> HelicoidalRing {
        let s = TorusShape::with_rational_ratio(a, b, 1.0, 2, 1, phi0, 0.0).unwrap();
        helicoidal_ring(&s, n).unwrap()
    }

    #[test]
    fn ring_sampling_is_nested() {
        let s = fig_shape(2.0, 4.0);
        let fine = helicoidal_ring(&s, 256).unwrap();
        let coarse = helicoidal_ring(&s, 128).unwrap();
        for (k, p) in coarse.points.iter().enumerate() {
            assert_eq!(*p, fine.points[2 * k]);
        }
    }

    #[test]
    fn closed_form_measures() {
        let m = torus_measures(2.0, 4.0).unwrap();
        assert!((m.volume - 32.0 * PI * PI).abs() < 1e-10);
        assert!((m.surface - 32.0 * PI * PI).abs() < 1e-10);
        assert_eq!(m.regime, TorusRegime::Ring);
        // both vanish with the tube radius and with b
        let tiny = torus_measures(1e-9, 4.0).unwrap();
        assert!(tiny.volume < 1e-16 && tiny.surface < 2e-7);
        let degenerate = torus_measures(2.0, 0.0).unwrap();
        assert_eq!(degenerate.volume, 0.0);
        assert_eq!(degenerate.surface, 0.0);
        assert_eq!(degenerate.regime, TorusRegime::DegenerateSphere);
    }

    #[test]
    fn mesh_area_matches_formula_for_ring_torus() {
        let s = fig_shape(2.0, 4.0);
        let mesh = mesh_torus(&s, 256, 256).unwrap();
        let m = mesh_measures(&mesh);
        let exact = 4.0 * PI * PI * 4.0 * 2.0;
        assert!(
            ((m.unsigned_area - exact) / exact).abs() < 1e-3,
            "area {} vs {exact}",
            m.unsigned_area
        );
        let v_exact = 2.0 * PI * PI * 4.0 * 4.0;
        assert!(
            ((m.enclosed_volume - v_exact) / v_exact).abs() < 1e-3,
            "volume {} vs {v_exact}",
            m.enclosed_volume
        );
        assert!(mesh.reversal.is_none());
    }

    #[test]
    fn mesh_area_converges_second_order() {
        let s = fig_shape(1.0, 2.5);
        let exact = 4.0 * PI * PI * 2.5;
        let err = |n: usize| {
            let mesh = mesh_torus(&s, n, n).unwrap();
            (mesh_measures(&mesh).unsigned_area - exact).abs()
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 3.3 && ratio < 4.7, "ratio {ratio}");
    }

    #[test]
    fn degenerate_sphere_double_coating() {
        let s = fig_shape(2.0, 0.0);
        let mesh = mesh_torus(&s, 256, 256).unwrap();
        let m = mesh_measures(&mesh);
        let sphere_area = 4.0 * PI * 4.0;
        assert!(
            ((m.unsigned_area - 2.0 * sphere_area) / (2.0 * sphere_area)).abs() < 2e-3,
            "double coat {} vs {}",
            m.unsigned_area,
            2.0 * sphere_area
        );
        // and half of it is one sphere
        assert!(((0.5 * m.unsigned_area - sphere_area) / sphere_area).abs() < 2e-3);
        let ball = 4.0 / 3.0 * PI * 8.0;
        assert!(
            ((m.enclosed_volume - ball) / ball).abs() < 5e-3,
            "ball volume {} vs {ball}",
            m.enclosed_volume
        );
    }

    #[test]
    fn measures_scale_correctly() {
        let lambda = 1.7;
        let f0 = torus_measures(2.0, 4.0).unwrap();
        let f1 = torus_measures(2.0 * lambda, 4.0 * lambda).unwrap();
        assert!((f1.volume / f0.volume - lambda.powi(3)).abs() < 1e-12);
        assert!((f1.surface / f0.surface - lambda.powi(2)).abs() < 1e-12);

        let m0 = mesh_measures(&mesh_torus(&fig_shape(2.0, 4.0), 64, 64).unwrap());
        let m1 = mesh_measures(&mesh_torus(&fig_shape(2.0 * lambda, 4.0 * lambda), 64, 64).unwrap());
        assert!((m1.enclosed_volume / m0.enclosed_volume - lambda.powi(3)).abs() < 1e-9);
        assert!((m1.unsigned_area / m0.unsigned_area - lambda.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn normals_are_unit_and_continuous_for_ring_torus() {
        let s = fig_shape(2.0, 4.0);
        let n_theta = 64;
        let mesh = mesh_torus(&s, n_theta, 64).unwrap();
        let budget = 2.0 * PI / n_theta as f64 + 1e-9;
        for n in &mesh.normals {
            assert!((norm3(*n) - 1.0).abs() < 1e-12);
        }
        for j in 0..64 {
            for i in 0..n_theta {
                let a = mesh.normals[j * n_theta + i];
                let b = mesh.normals[j * n_theta + (i + 1) % n_theta];
                let angle = dot3(a, b).clamp(-1.0, 1.0).acos();
                assert!(angle <= budget, "normal step {angle} exceeds {budget}");
            }
        }
    }

    #[test]
    fn spindle_has_exactly_one_reversal_locus() {
        let s = fig_shape(2.0, 1.0);
        let mesh = mesh_torus(&s, 128, 64).unwrap();
        let rev = mesh.reversal.expect("spindle must flip");
        assert_eq!(rev.theta_crossings.len(), 2); // one locus: +z and -z crossings
        assert!((rev.axis_z - 3.0f64.sqrt()).abs() < 1e-12);
        // ring torus has none
        assert!(mesh_torus(&fig_shape(2.0, 3.0), 64, 64).unwrap().reversal.is_none());
    }

    #[test]
    fn cross_section_classification() {
        let ring = cross_section_regions(2.0, 3.0).unwrap();
        assert_eq!(ring.regime, TorusRegime::Ring);
        assert_eq!(ring.regions, vec![RegionLabel::Outer, RegionLabel::TubeInterior]);
        assert!(ring.intersection_z.is_none());

        let horn = cross_section_regions(2.0, 2.0).unwrap();
        assert!(horn.tangency);
        assert_eq!(horn.intersection_z, Some(0.0));
        assert!(!horn.regions.contains(&RegionLabel::Spindle));

        let spindle = cross_section_regions(2.0, 1.0).unwrap();
        assert_eq!(spindle.regime, TorusRegime::Spindle);
        assert!(spindle.regions.contains(&RegionLabel::Spindle));
        assert!((spindle.intersection_z.unwrap() - 3.0f64.sqrt()).abs() < 1e-12);

        let sphere = cross_section_regions(2.0, 0.0).unwrap();
        assert!(!sphere.regions.contains(&RegionLabel::TubeInterior));
        assert!(sphere.regions.contains(&RegionLabel::SphereInterior));
    }

    #[test]
    fn sweep_reproduces_panel_parameters() {
        let steps = spindle_sweep(2.0, &DEFAULT_SPINDLE_BS, 64, 64, 64).unwrap();
        assert_eq!(steps.len(), 6);
        for (step, b) in steps.iter().zip(DEFAULT_SPINDLE_BS) {
            assert_eq!(step.torus_radius, b);
            assert!(step.ring.closed, "ring at b = {b} must stay closed");
            assert!(step.ring.closure_gap < 1e-10 * 2.0);
        }
        let spindles = steps
            .iter()
            .filter(|s| s.classification.regime == TorusRegime::Spindle)
            .count();
        assert_eq!(spindles, 4); // b = 1.5, 1, 0.5, 0.01
        for s in &steps {
            let should_flip = s.torus_radius < 2.0;
            assert_eq!(s.mesh.reversal.is_some(), should_flip);
        }
    }

    #[test]
    fn double_cover_dots() {
        let s = fig_shape(2.0, 0.001);
        let ring = helicoidal_ring(&s, 512).unwrap();
        let trace = double_cover_rotation(&s, &ring, 10_000, Traversal::Forward).unwrap();
        assert_eq!(trace.checkpoints.len(), 2);
        let c1 = &trace.checkpoints[0];
        let c2 = &trace.checkpoints[1];
        assert_eq!(c1.angle_deg, 360.0);
        assert_eq!(c2.angle_deg, 720.0);
        assert!((c1.direction_dot + 1.0).abs() < 1e-6, "one turn: {}", c1.direction_dot);
        assert!((c2.direction_dot - 1.0).abs() < 1e-6, "two turns: {}", c2.direction_dot);
        // the radial normal returns as well on the near-degenerate sphere
        assert!((c2.normal_dot - 1.0).abs() < 1e-4, "normal return {}", c2.normal_dot);

        // reversing the traversal flips the sequence symmetrically
        let rev = double_cover_rotation(&s, &ring, 10_000, Traversal::Reverse).unwrap();
        assert!((rev.checkpoints[0].direction_dot + 1.0).abs() < 1e-6);
        assert!((rev.checkpoints[1].direction_dot - 1.0).abs() < 1e-6);
        assert_eq!(rev.checkpoints[0].angle_deg, -360.0);
    }

    #[test]
    fn double_cover_without_degeneracy_still_returns() {
        let s = fig_shape(2.0, 2.0);
        let ring = helicoidal_ring(&s, 512).unwrap();
        let trace = double_cover_rotation(&s, &ring, 10_000, Traversal::Forward).unwrap();
        let c1 = &trace.checkpoints[0];
        let c2 = &trace.checkpoints[1];
        // the 360-degree state is tagged for comparison; the direction
        // still reverses exactly there
        assert!((c1.direction_dot + 1.0).abs() < 1e-6);
        assert!((c2.direction_dot - 1.0).abs() < 1e-6);
    }

    #[test]
    fn double_cover_rejects_open_or_wrong_winding() {
        let open = TorusShape::new(2.0, 0.001, 1.0, 0.5, 0.0, 0.0).unwrap();
        let open_ring = helicoidal_ring(&open, 128).unwrap();
        assert!(double_cover_rotation(&open, &open_ring, 2000, Traversal::Forward).is_err());

        let one_turn = TorusShape::with_rational_ratio(2.0, 0.001, 1.0, 1, 1, 0.0, 0.0).unwrap();
        let r1 = helicoidal_ring(&one_turn, 128).unwrap();
        assert!(double_cover_rotation(&one_turn, &r1, 2000, Traversal::Forward).is_err());
    }
}
