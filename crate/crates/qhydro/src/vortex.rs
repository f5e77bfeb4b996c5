//! Gaussian vortex dynamics in the tube cross-section: the radial
//! diffusion of vorticity under a time-dependent (possibly fluctuating,
//! zero-mean) kinematic viscosity, its closed-form self-similar solution
//! `omega = Gamma/(4 Sigma) exp(-r^2 / 4 Sigma)` with
//! `Sigma(t) = integral nu dt + sigma^2`, and the core radius where the
//! orbital velocity peaks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{QhError, Result};

/// Time course of the kinematic viscosity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ViscosityKind {
    Zero,
    Constant { nu0: f64 },
    /// `nu(t) = nu0 cos(omega t)`: zero mean over every period.
    Cosine { nu0: f64, omega: f64 },
    /// Ornstein-Uhlenbeck noise: zero mean, stationary standard deviation
    /// `amplitude`, autocorrelation time `correlation_time`.
    OuNoise {
        amplitude: f64,
        correlation_time: f64,
        rng_seed: u64,
    },
}

/// Viscosity model plus the spreading floor `sigma` (`Sigma >= sigma^2`
/// must hold for compliant parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscosityModel {
    pub kind: ViscosityKind,
    pub sigma: f64,
}

/// Compliance bound for the cosine model: `nu0 <= 0.9 omega sigma^2`
/// keeps the accumulator positive without clamping.
pub const COSINE_COMPLIANCE_FACTOR: f64 = 0.9;

/// Clamp floor applied if an accumulator ever comes out non-positive.
pub const SIGMA_CLAMP_FRACTION: f64 = 1e-3;

/// Internal sampling resolution of one OU correlation time.
const OU_STEPS_PER_TAU: usize = 128;

impl ViscosityModel {
    pub fn new(kind: ViscosityKind, sigma: f64) -> Result<Self> {
        let m = Self { kind, sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(QhError::config("viscosity.sigma", "must be finite and > 0"));
        }
        match &self.kind {
            ViscosityKind::Zero => Ok(()),
            ViscosityKind::Constant { nu0 } => {
                if !nu0.is_finite() {
                    return Err(QhError::config("viscosity.nu0", "must be finite"));
                }
                Ok(())
            }
            ViscosityKind::Cosine { nu0, omega } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(QhError::config("viscosity.omega", "must be finite and > 0"));
                }
                if !nu0.is_finite() || *nu0 < 0.0 {
                    return Err(QhError::config("viscosity.nu0", "must be finite and >= 0"));
                }
                let bound = COSINE_COMPLIANCE_FACTOR * omega * self.sigma * self.sigma;
                if *nu0 > bound {
                    return Err(QhError::config(
                        "viscosity.nu0",
                        format!("cosine amplitude {nu0} exceeds the compliance bound 0.9 omega sigma^2 = {bound}"),
                    ));
                }
                Ok(())
            }
            ViscosityKind::OuNoise {
                amplitude,
                correlation_time,
                ..
            } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(QhError::config("viscosity.amplitude", "must be finite and >= 0"));
                }
                if !(correlation_time.is_finite() && *correlation_time > 0.0) {
                    return Err(QhError::config(
                        "viscosity.correlation_time",
                        "must be finite and > 0",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Sample `nu(t)` and the accumulator on `n + 1` uniform instants over
    /// `[0, t_end]`. Deterministic kinds evaluate in closed form; OU noise
    /// realizes its canonical seeded path and interpolates it.
    pub fn sample_path(&self, t_end: f64, n: usize) -> Result<ViscosityPath> {
        if !(t_end > 0.0) || n < 1 {
            return Err(QhError::config("viscosity.path", "need t_end > 0 and n >= 1"));
        }
        let dt = t_end / n as f64;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let nu: Vec<f64> = match &self.kind {
            ViscosityKind::OuNoise { .. } => {
                let canon = self.canonical_ou_path(t_end)?;
                times.iter().map(|&t| canon.interp_nu(t)).collect()
            }
            _ => times.iter().map(|&t| self.nu_closed_form(t)).collect(),
        };
        let mut clamped = false;
        let sigma_sq: Vec<f64> = match &self.kind {
            ViscosityKind::OuNoise { .. } => {
                // trapezoid over the sampled values
                let mut acc = 0.0;
                let mut out = Vec::with_capacity(n + 1);
                out.push(self.sigma * self.sigma);
                for i in 1..=n {
                    acc += 0.5 * (nu[i - 1] + nu[i]) * dt;
                    out.push(self.clamp_sigma(acc + self.sigma * self.sigma, &mut clamped));
                }
                out
            }
            _ => times
                .iter()
                .map(|&t| self.clamp_sigma(self.sigma_closed_form(t), &mut clamped))
                .collect(),
        };
        Ok(ViscosityPath {
            times,
            nu,
            sigma_sq,
            clamped,
        })
    }

    fn clamp_sigma(&self, s: f64, clamped: &mut bool) -> f64 {
        let floor = SIGMA_CLAMP_FRACTION * self.sigma * self.sigma;
        if s <= floor {
            *clamped = true;
            floor
        } else {
            s
        }
    }

    fn nu_closed_form(&self, t: f64) -> f64 {
        match &self.kind {
            ViscosityKind::Zero => 0.0,
            ViscosityKind::Constant { nu0 } => *nu0,
            ViscosityKind::Cosine { nu0, omega } => nu0 * (omega * t).cos(),
            ViscosityKind::OuNoise { .. } => unreachable!(),
        }
    }

    fn sigma_closed_form(&self, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        match &self.kind {
            ViscosityKind::Zero => s2,
            ViscosityKind::Constant { nu0 } => nu0 * t + s2,
            ViscosityKind::Cosine { nu0, omega } => nu0 / omega * (omega * t).sin() + s2,
            ViscosityKind::OuNoise { .. } => unreachable!(),
        }
    }

    /// Exact OU update on a fixed mesh anchored at t = 0, so any two calls
    /// with the same seed see the same realization prefix.
    fn canonical_ou_path(&self, t_end: f64) -> Result<OuPath> {
        let (amplitude, tau, seed) = match &self.kind {
            ViscosityKind::OuNoise {
                amplitude,
                correlation_time,
                rng_seed,
            } => (*amplitude, *correlation_time, *rng_seed),
            _ => return Err(QhError::Unsupported("not an OU model".into())),
        };
        let dt = tau / OU_STEPS_PER_TAU as f64;
        let steps = (t_end / dt).ceil() as usize + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).map_err(|e| QhError::Numeric(e.to_string()))?;
        let decay = (-dt / tau).exp();
        let kick = amplitude * (1.0 - decay * decay).sqrt();
        let mut nu = Vec::with_capacity(steps + 1);
        // stationary start
        let mut v = amplitude * normal.sample(&mut rng);
        nu.push(v);
        for _ in 0..steps {
            v = v * decay + kick * normal.sample(&mut rng);
            nu.push(v);
        }
        Ok(OuPath { dt, nu })
    }
}

struct OuPath {
    dt: f64,
    nu: Vec<f64>,
}

impl OuPath {
    fn interp_nu(&self, t: f64) -> f64 {
        let u = t / self.dt;
        let i = (u.floor() as usize).min(self.nu.len() - 2);
        let f = (u - i as f64).clamp(0.0, 1.0);
        self.nu[i] * (1.0 - f) + self.nu[i + 1] * f
    }
}

/// Sampled viscosity realization with its accumulator.
#[derive(Debug, Clone)]
pub struct ViscosityPath {
    pub times: Vec<f64>,
    pub nu: Vec<f64>,
    /// `Sigma(t) = integral_0^t nu + sigma^2` at each instant.
    pub sigma_sq: Vec<f64>,
    /// True if the positivity clamp ever fired (non-compliant model).
    pub clamped: bool,
}

impl ViscosityPath {
    pub fn sigma_at(&self, t: f64) -> f64 {
        let dt = self.times[1] - self.times[0];
        let u = t / dt;
        let i = (u.floor() as usize).min(self.sigma_sq.len() - 2);
        let f = (u - i as f64).clamp(0.0, 1.0);
        self.sigma_sq[i] * (1.0 - f) + self.sigma_sq[i + 1] * f
    }

    pub fn nu_at(&self, t: f64) -> f64 {
        let dt = self.times[1] - self.times[0];
        let u = t / dt;
        let i = (u.floor() as usize).min(self.nu.len() - 2);
        let f = (u - i as f64).clamp(0.0, 1.0);
        self.nu[i] * (1.0 - f) + self.nu[i + 1] * f
    }
}

/// The accumulator `Sigma(nu, t, sigma) = integral_0^t nu(tau) dtau +
/// sigma^2`; exact for the deterministic kinds, trapezoidal on the
/// canonical path for OU noise. Non-positive results clamp to
/// `sigma^2 * 1e-3` (compliant models never trigger this).
pub fn sigma_accumulate(model: &ViscosityModel, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(QhError::config("t", "must be >= 0"));
    }
    model.validate()?;
    let s2 = model.sigma * model.sigma;
    if t == 0.0 {
        return Ok(s2);
    }
    let mut clamped = false;
    let value = match &model.kind {
        ViscosityKind::OuNoise { .. } => {
            let path = model.sample_path(t, (t / ou_dt(model)).ceil() as usize + 1)?;
            *path.sigma_sq.last().unwrap()
        }
        _ => model.sigma_closed_form(t),
    };
    let out = model.clamp_sigma(value, &mut clamped);
    Ok(out)
}

fn ou_dt(model: &ViscosityModel) -> f64 {
    match &model.kind {
        ViscosityKind::OuNoise { correlation_time, .. } => {
            correlation_time / OU_STEPS_PER_TAU as f64
        }
        _ => 1.0,
    }
}

/// `omega(r) = Gamma / (4 Sigma) exp(-r^2 / 4 Sigma)`.
pub fn omega_profile(gamma: f64, sigma_total: f64, r: f64) -> Result<f64> {
    check_sigma(sigma_total)?;
    Ok(gamma / (4.0 * sigma_total) * (-r * r / (4.0 * sigma_total)).exp())
}

/// Orbital speed `v(r) = Gamma/(2 r) (1 - exp(-r^2 / 4 Sigma))`, with the
/// removable singularity at `r = 0` evaluated by its limit.
pub fn v_profile(gamma: f64, sigma_total: f64, r: f64) -> Result<f64> {
    check_sigma(sigma_total)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    // -expm1 keeps full precision for small r^2 / 4 Sigma, where the
    // profile reduces to Gamma r / (8 Sigma)
    Ok(-gamma / (2.0 * r) * (-r * r / (4.0 * sigma_total)).exp_m1())
}

fn check_sigma(sigma_total: f64) -> Result<()> {
    if !(sigma_total > 0.0) || !sigma_total.is_finite() {
        return Err(QhError::config("sigma_total", "accumulator must be finite and > 0"));
    }
    Ok(())
}

/// Root of `exp(xi) = 1 + 2 xi`, `xi > 0`, by bisection to 1e-14.
pub fn core_radius_xi() -> f64 {
    let f = |xi: f64| xi.exp() - 1.0 - 2.0 * xi;
    let (mut lo, mut hi) = (1.0, 2.0);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Vortex-core radius: the orbital-velocity maximum at
/// `r0 = 2 sqrt(Sigma xi)`, `exp(xi) = 1 + 2 xi`.
pub fn core_radius(sigma_total: f64) -> Result<f64> {
    check_sigma(sigma_total)?;
    Ok(2.0 * (sigma_total * core_radius_xi()).sqrt())
}

/// Enclosed circulation `2 r v(r)` of the analytic profile; rises
/// monotonically to `Gamma`.
pub fn circulation_enclosed(gamma: f64, sigma_total: f64, r: f64) -> Result<f64> {
    Ok(2.0 * r * v_profile(gamma, sigma_total, r)?)
}

/// Enclosed circulation from sampled vorticity, `2 * integral_0^r omega
/// r' dr'` by the trapezoid rule. `r` must lie inside the sampled range.
pub fn circulation_from_omega(r_grid: &[f64], omega: &[f64], r: f64) -> Result<f64> {
    if r_grid.len() != omega.len() || r_grid.len() < 2 {
        return Err(QhError::config("circulation", "need matching r/omega samples"));
    }
    if r < 0.0 || r > *r_grid.last().unwrap() {
        return Err(QhError::config("circulation.r", "outside the sampled range"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for i in 1..r_grid.len() {
        let (r0, r1) = (r_grid[i - 1], r_grid[i]);
        if r1 <= r {
            acc += 0.5 * (omega[i - 1] * r0 + omega[i] * r1) * (r1 - r0);
        } else {
            let f = (r - r0) / (r1 - r0);
            let om_r = omega[i - 1] * (1.0 - f) + omega[i] * f;
            acc += 0.5 * (omega[i - 1] * r0 + om_r * r) * (r - r0);
            break;
        }
    }
    Ok(2.0 * acc)
}

/// Radial samples of the analytic profile pair.
#[derive(Debug, Clone)]
pub struct VortexProfile {
    pub gamma: f64,
    /// Current accumulator value `Sigma`.
    pub sigma_eff: f64,
    pub r_grid: Vec<f64>,
    pub omega: Vec<f64>,
    pub v: Vec<f64>,
    pub r0: f64,
}

impl VortexProfile {
    pub fn analytic(gamma: f64, sigma_total: f64, r_grid: Vec<f64>) -> Result<Self> {
        check_sigma(sigma_total)?;
        let omega = r_grid
            .iter()
            .map(|&r| omega_profile(gamma, sigma_total, r))
            .collect::<Result<Vec<_>>>()?;
        let v = r_grid
            .iter()
            .map(|&r| v_profile(gamma, sigma_total, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(VortexProfile {
            gamma,
            sigma_eff: sigma_total,
            r_grid,
            omega,
            v,
            r0: core_radius(sigma_total)?,
        })
    }
}

/// History of the radial vorticity under the model's viscosity.
#[derive(Debug, Clone)]
pub struct RadialEvolution {
    pub r: Vec<f64>,
    pub times: Vec<f64>,
    /// `history[k]` is the profile at `times[k]`.
    pub history: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Crank-Nicolson integration of
/// `d omega/dt = nu(t) (d2 omega/dr2 + (1/r) d omega/dr)` on `[0, r_max]`
/// with even symmetry at the axis (the operator limit there is
/// `2 d2/dr2`) and a far-field zero boundary. The coefficient is taken at
/// each half step, keeping second order despite the time dependence.
pub fn evolve_radial_vorticity(
    omega0: &[f64],
    r_max: f64,
    model: &ViscosityModel,
    dt: f64,
    steps: usize,
    snapshot_stride: usize,
) -> Result<RadialEvolution> {
    model.validate()?;
    let n = omega0.len();
    if n < 8 {
        return Err(QhError::config("omega0", "need at least 8 radial samples"));
    }
    if !(r_max > 0.0) || !(dt > 0.0) || steps < 1 || snapshot_stride < 1 {
        return Err(QhError::config("radial", "bad r_max / dt / steps"));
    }
    if omega0.iter().any(|v| !v.is_finite()) {
        return Err(QhError::NonFinite("omega0".into()));
    }
    let dr = r_max / (n - 1) as f64;
    let r: Vec<f64> = (0..n).map(|i| i as f64 * dr).collect();
    let mut warnings = Vec::new();

    // crude core-scale estimate for the domain-size advisory: radius at
    // which omega drops to e^-1 of the axis value scales like 2 sqrt(Sigma)
    let axis = omega0[0].abs();
    if axis > 0.0 {
        let target = axis * (-1.0f64).exp();
        let mut core = 0.0;
        for i in 1..n {
            if omega0[i].abs() < target {
                let (w0, w1) = (omega0[i - 1].abs(), omega0[i].abs());
                let f = if w0 > w1 { (w0 - target) / (w0 - w1) } else { 0.0 };
                core = r[i - 1] + f * dr;
                break;
            }
        }
        // advisory with a little slack so the canonical 20 sigma domain
        // (exactly ten core scales) stays quiet
        if core > 0.0 && r_max < 9.8 * core {
            warnings.push(format!(
                "r_max = {r_max} is under 10 core scales ({core:.3}); far-field truncation may bite"
            ));
        }
    }

    // viscosity at half steps
    let t_end = dt * steps as f64;
    let half_nu: Vec<f64> = match &model.kind {
        ViscosityKind::OuNoise { .. } => {
            let path = model.sample_path(t_end, (2 * steps).max(1))?;
            (0..steps)
                .map(|k| path.nu_at((k as f64 + 0.5) * dt))
                .collect()
        }
        _ => (0..steps)
            .map(|k| model.nu_closed_form((k as f64 + 0.5) * dt))
            .collect(),
    };

    let max_nu = half_nu.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_nu * dt / (dr * dr) > 10.0 {
        warnings.push(format!(
            "nu dt / dr^2 reaches {:.1}; accuracy (not stability) degrades",
            max_nu * dt / (dr * dr)
        ));
    }
    // Negative-viscosity stretches run the diffusion backwards, which
    // amplifies round-off in the highest resolved mode by
    // exp(k_max^2 * integral of |nu^-|). Warn when that exceeds what f64
    // noise can absorb; the fix is a coarser radial grid, not smaller dt.
    let backward_exposure: f64 = half_nu.iter().map(|&v| (-v).max(0.0) * dt).sum();
    let k_max_sq = 4.0 / (dr * dr);
    if backward_exposure * k_max_sq > 25.0 {
        warnings.push(format!(
            "backward-diffusion exposure amplifies round-off by exp({:.0}); \
             coarsen the radial grid to keep the contraction phase invertible",
            backward_exposure * k_max_sq
        ));
    }

    // L omega: row 0: 4 (w1 - w0) / dr^2 ; row i: (w[i+1] - 2 w[i] + w[i-1])/dr^2
    //          + (w[i+1] - w[i-1]) / (2 r_i dr) ; row n-1: Dirichlet 0.
    let mut omega = omega0.to_vec();
    let mut history = vec![omega.clone()];
    let mut times = vec![0.0];

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut work = vec![0.0; 2 * n];

    for step in 0..steps {
        let lam = 0.5 * dt * half_nu[step];
        // assemble A = I - lam L and B = I + lam L applied to omega
        // row 0
        let l0_diag = -4.0 / (dr * dr);
        let l0_sup = 4.0 / (dr * dr);
        diag[0] = 1.0 - lam * l0_diag;
        sup[0] = -lam * l0_sup;
        sub[0] = 0.0;
        rhs[0] = (1.0 + lam * l0_diag) * omega[0] + lam * l0_sup * omega[1];
        for i in 1..n - 1 {
            let li_sub = 1.0 / (dr * dr) - 1.0 / (2.0 * r[i] * dr);
            let li_diag = -2.0 / (dr * dr);
            let li_sup = 1.0 / (dr * dr) + 1.0 / (2.0 * r[i] * dr);
            sub[i] = -lam * li_sub;
            diag[i] = 1.0 - lam * li_diag;
            sup[i] = -lam * li_sup;
            rhs[i] = lam * li_sub * omega[i - 1]
                + (1.0 + lam * li_diag) * omega[i]
                + lam * li_sup * omega[i + 1];
        }
        sub[n - 1] = 0.0;
        diag[n - 1] = 1.0;
        sup[n - 1] = 0.0;
        rhs[n - 1] = 0.0;

        solve_real_tridiag(&sub, &diag, &sup, &rhs, &mut omega, &mut work);

        if omega.iter().any(|v| !v.is_finite()) {
            return Err(QhError::Numeric(format!(
                "radial solver produced non-finite values at step {step}"
            )));
        }
        if (step + 1) % snapshot_stride == 0 || step + 1 == steps {
            history.push(omega.clone());
            times.push((step + 1) as f64 * dt);
        }
    }

    Ok(RadialEvolution {
        r,
        times,
        history,
        warnings,
    })
}

fn solve_real_tridiag(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
    x: &mut [f64],
    work: &mut [f64],
) {
    let n = diag.len();
    let (c_prime, rest) = work.split_at_mut(n);
    let d_prime = &mut rest[..n];
    let mut denom = diag[0];
    c_prime[0] = sup[0] / denom;
    d_prime[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c_prime[i - 1];
        c_prime[i] = sup[i] / denom;
        d_prime[i] = (rhs[i] - sub[i] * d_prime[i - 1]) / denom;
    }
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
}

/// Long-horizon mean of the analytic profile under the fluctuating
/// accumulator, with an ensemble (and standard errors) for OU noise.
#[derive(Debug, Clone)]
pub struct AveragedProfile {
    pub r: Vec<f64>,
    pub mean_omega: Vec<f64>,
    /// Standard error over ensemble members (OU noise only).
    pub stderr: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

pub fn long_time_average_profile(
    model: &ViscosityModel,
    gamma: f64,
    horizon: f64,
    samples: usize,
    r_grid: &[f64],
    ensemble: usize,
) -> Result<AveragedProfile> {
    model.validate()?;
    if samples < 2 || r_grid.len() < 2 {
        return Err(QhError::config("average", "need samples >= 2 and a radial grid"));
    }
    let mut warnings = Vec::new();
    let scale = match &model.kind {
        ViscosityKind::Cosine { omega, .. } => 2.0 * std::f64::consts::PI / omega,
        ViscosityKind::OuNoise { correlation_time, .. } => *correlation_time,
        _ => 0.0,
    };
    if scale > 0.0 && horizon < 10.0 * scale {
        warnings.push(format!(
            "horizon {horizon} is under ten fluctuation scales ({scale:.3})"
        ));
    }

    let member_profile = |member_model: &ViscosityModel| -> Result<Vec<f64>> {
        let path = member_model.sample_path(horizon, samples - 1)?;
        let mut mean = vec![0.0; r_grid.len()];
        for &s in &path.sigma_sq {
            for (m, &r) in mean.iter_mut().zip(r_grid) {
                *m += omega_profile(gamma, s, r)?;
            }
        }
        for m in &mut mean {
            *m /= path.sigma_sq.len() as f64;
        }
        Ok(mean)
    };

    match &model.kind {
        ViscosityKind::OuNoise {
            amplitude,
            correlation_time,
            rng_seed,
        } => {
            let members = ensemble.max(1);
            let mut profiles = Vec::with_capacity(members);
            for i in 0..members {
                let m = ViscosityModel {
                    kind: ViscosityKind::OuNoise {
                        amplitude: *amplitude,
                        correlation_time: *correlation_time,
                        rng_seed: rng_seed.wrapping_add(i as u64),
                    },
                    sigma: model.sigma,
                };
                profiles.push(member_profile(&m)?);
            }
            let mut mean = vec![0.0; r_grid.len()];
            for p in &profiles {
                for (m, v) in mean.iter_mut().zip(p) {
                    *m += v;
                }
            }
            for m in &mut mean {
                *m /= members as f64;
            }
            let stderr = if members > 1 {
                let mut se = vec![0.0; r_grid.len()];
                for p in &profiles {
                    for (s, (v, m)) in se.iter_mut().zip(p.iter().zip(&mean)) {
                        *s += (v - m) * (v - m);
                    }
                }
                for s in &mut se {
                    *s = (*s / (members as f64 - 1.0)).sqrt() / (members as f64).sqrt();
                }
                Some(se)
            } else {
                None
            };
            Ok(AveragedProfile {
                r: r_grid.to_vec(),
                mean_omega: mean,
                stderr,
                warnings,
            })
        }
        _ => Ok(AveragedProfile {
            r: r_grid.to_vec(),
            mean_omega: member_profile(model)?,
            stderr: None,
            warnings,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_r(r_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn sigma_closed_forms() {
        let zero = ViscosityModel::new(ViscosityKind::Zero, 0.7).unwrap();
        assert!((sigma_accumulate(&zero, 5.0).unwrap() - 0.49).abs() < 1e-15);

        let con = ViscosityModel::new(ViscosityKind::Constant { nu0: 0.3 }, 1.0).unwrap();
        assert!((sigma_accumulate(&con, 2.0).unwrap() - 1.6).abs() < 1e-14);

        let cos = ViscosityModel::new(
            ViscosityKind::Cosine { nu0: 0.5, omega: 1.0 },
            1.0,
        )
        .unwrap();
        let t = 0.8f64;
        let expected = 0.5 * t.sin() + 1.0;
        assert!((sigma_accumulate(&cos, t).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn cosine_sigma_matches_quadrature() {
        let nu0 = 0.4;
        let omega = 2.0;
        let model =
            ViscosityModel::new(ViscosityKind::Cosine { nu0, omega }, 1.0).unwrap();
        // Simpson quadrature oracle of the definite integral
        for &t in &[0.3, 1.7, 4.4] {
            let n = 20_000;
            let h = t / n as f64;
            let f = |tau: f64| nu0 * (omega * tau).cos();
            let mut s = f(0.0) + f(t);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let quad = s * h / 3.0 + 1.0;
            assert!(
                (sigma_accumulate(&model, t).unwrap() - quad).abs() < 1e-10,
                "t = {t}"
            );
        }
    }

    #[test]
    fn cosine_compliance_bound_enforced() {
        let bad = ViscosityModel::new(
            ViscosityKind::Cosine { nu0: 1.0, omega: 1.0 },
            1.0,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn ou_path_is_deterministic_and_zero_mean() {
        let model = ViscosityModel::new(
            ViscosityKind::OuNoise {
                amplitude: 0.2,
                correlation_time: 0.5,
                rng_seed: 42,
            },
            1.0,
        )
        .unwrap();
        let a = model.sample_path(10.0, 500).unwrap();
        let b = model.sample_path(10.0, 500).unwrap();
        assert_eq!(a.nu, b.nu);
        // prefix property: a shorter request sees the same realization
        let c = model.sample_path(5.0, 250).unwrap();
        for (x, y) in c.nu.iter().zip(&a.nu) {
            assert!((x - y).abs() < 1e-12);
        }
        // long-horizon mean is zero-ish (single path, loose bound)
        let long = model.sample_path(2000.0, 100_000).unwrap();
        let mean: f64 = long.nu.iter().sum::<f64>() / long.nu.len() as f64;
        assert!(mean.abs() < 0.02, "OU sample mean {mean}");
    }

    #[test]
    fn profile_limits_and_duality() {
        let (gamma, sigma_total) = (2.0, 0.9);
        assert!(
            (omega_profile(gamma, sigma_total, 0.0).unwrap() - gamma / (4.0 * sigma_total)).abs()
                < 1e-15
        );
        assert_eq!(v_profile(gamma, sigma_total, 0.0).unwrap(), 0.0);
        // small-r limit Gamma r / (8 Sigma)
        let r = 1e-8;
        let expected = gamma * r / (8.0 * sigma_total);
        assert!((v_profile(gamma, sigma_total, r).unwrap() - expected).abs() < 1e-20);
        // far tail v -> Gamma / 2r
        let r = 20.0 * sigma_total.sqrt();
        let v = v_profile(gamma, sigma_total, r).unwrap();
        assert!(((v - gamma / (2.0 * r)) / (gamma / (2.0 * r))).abs() < 1e-8);

        // omega == (1/r) d(r v)/dr by central differences
        let h = 1e-6;
        for k in 1..100 {
            let r = 0.1 * sigma_total.sqrt() + k as f64 * 0.1 * sigma_total.sqrt();
            let rv = |rr: f64| rr * v_profile(gamma, sigma_total, rr).unwrap();
            let d = (rv(r + h) - rv(r - h)) / (2.0 * h);
            let w = omega_profile(gamma, sigma_total, r).unwrap();
            assert!((d / r - w).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn core_radius_bisection() {
        let xi = core_radius_xi();
        assert!((xi.exp() - 1.0 - 2.0 * xi).abs() < 1e-12);
        // r0 / sqrt(Sigma) = 2.24181
        let sigma_total = 1.0;
        let r0 = core_radius(sigma_total).unwrap();
        assert!((r0 - 2.24181).abs() < 1e-4, "r0 {r0}");
        // quadrupled Sigma doubles r0
        let r0_4 = core_radius(4.0 * sigma_total).unwrap();
        assert!((r0_4 - 2.0 * r0).abs() < 1e-12);
        // golden-section maximization oracle of v(r)
        let gamma = 1.0;
        let (mut a, mut b) = (0.5, 5.0);
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if v_profile(gamma, sigma_total, c).unwrap() < v_profile(gamma, sigma_total, d).unwrap()
            {
                a = c;
            } else {
                b = d;
            }
        }
        let r_max = 0.5 * (a + b);
        assert!((r_max - r0).abs() < 1e-6, "maximizer {r_max} vs root {r0}");
    }

    #[test]
    fn enclosed_circulation() {
        let (gamma, sigma_total) = (3.0, 1.3);
        // saturates at Gamma
        let far = circulation_enclosed(gamma, sigma_total, 20.0 * sigma_total.sqrt()).unwrap();
        assert!(((far - gamma) / gamma).abs() < 1e-8);
        // at the core radius: 1 - exp(-xi) of the total
        let r0 = core_radius(sigma_total).unwrap();
        let frac = circulation_enclosed(gamma, sigma_total, r0).unwrap() / gamma;
        assert!((frac - 0.71534).abs() < 1e-5, "fraction {frac}");
        // linearity in Gamma
        let double = circulation_enclosed(2.0 * gamma, sigma_total, 1.1).unwrap();
        assert!((double - 2.0 * circulation_enclosed(gamma, sigma_total, 1.1).unwrap()).abs() < 1e-12);
        // monotone and bounded
        let mut prev = 0.0;
        for k in 1..200 {
            let r = k as f64 * 0.05;
            let g = circulation_enclosed(gamma, sigma_total, r).unwrap();
            assert!(g >= prev && g <= gamma + 1e-12);
            prev = g;
        }
        // numeric route agrees with the analytic one
        let r_grid = uniform_r(10.0, 4001);
        let omega: Vec<f64> = r_grid
            .iter()
            .map(|&r| omega_profile(gamma, sigma_total, r).unwrap())
            .collect();
        for &r in &[0.5, 1.0, 2.0, 5.0] {
            let num = circulation_from_omega(&r_grid, &omega, r).unwrap();
            let exact = circulation_enclosed(gamma, sigma_total, r).unwrap();
            assert!((num - exact).abs() < 1e-6, "r = {r}: {num} vs {exact}");
        }
    }

    #[test]
    fn zero_viscosity_is_permanent() {
        let sigma = 1.0;
        let model = ViscosityModel::new(ViscosityKind::Zero, sigma).unwrap();
        let n = 512;
        let r = uniform_r(20.0 * sigma, n);
        let omega0: Vec<f64> = r
            .iter()
            .map(|&rr| omega_profile(1.0, sigma * sigma, rr).unwrap())
            .collect();
        let ev = evolve_radial_vorticity(&omega0, 20.0 * sigma, &model, 1e-2, 500, 100).unwrap();
        let last = ev.history.last().unwrap();
        for (a, b) in last.iter().zip(&omega0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_viscosity_matches_self_similar_solution() {
        let sigma = 1.0;
        let nu0 = 0.05;
        let gamma = 1.0;
        let model = ViscosityModel::new(ViscosityKind::Constant { nu0 }, sigma).unwrap();
        let n = 512;
        let r_max = 20.0 * sigma;
        let r = uniform_r(r_max, n);
        let omega0: Vec<f64> = r
            .iter()
            .map(|&rr| omega_profile(gamma, sigma * sigma, rr).unwrap())
            .collect();
        // run until Sigma doubles: t* = sigma^2 / nu0
        let t_star = sigma * sigma / nu0;
        let steps = 2000;
        let ev =
            evolve_radial_vorticity(&omega0, r_max, &model, t_star / steps as f64, steps, steps)
                .unwrap();
        let last = ev.history.last().unwrap();
        let sigma_final = nu0 * t_star + sigma * sigma;
        assert!((sigma_final - 2.0 * sigma * sigma).abs() < 1e-12);
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &rr) in r.iter().enumerate() {
            let exact = omega_profile(gamma, sigma_final, rr).unwrap();
            num += (last[i] - exact) * (last[i] - exact);
            den += exact * exact;
        }
        let rel_l2 = (num / den).sqrt();
        assert!(rel_l2 < 1e-3, "relative L2 error {rel_l2}");
    }

    #[test]
    fn cosine_viscosity_returns_after_a_period() {
        let sigma = 1.0;
        let omega_freq = 1.0;
        let nu0 = 0.5 * omega_freq * sigma * sigma;
        let model =
            ViscosityModel::new(ViscosityKind::Cosine { nu0, omega: omega_freq }, sigma).unwrap();
        // The contraction half-cycle runs the diffusion backwards; round-off
        // in mode k grows by exp(k^2 integral |nu^-|), so the radial grid is
        // sized to keep exp(4/dr^2 * nu0/omega * 2) inside the f64 budget.
        // The return itself is resolution-independent: all Cayley factors
        // share one operator and their log-amplitudes cancel over a period.
        let n = 48;
        let r_max = 20.0 * sigma;
        let r = uniform_r(r_max, n);
        let omega0: Vec<f64> = r
            .iter()
            .map(|&rr| omega_profile(1.0, sigma * sigma, rr).unwrap())
            .collect();
        let period = 2.0 * std::f64::consts::PI / omega_freq;
        // two periods, snapshots every eighth period: omega(t + T) must
        // match omega(t) at every sampled t, not only at the endpoints
        let steps = 8192;
        let stride = steps / 16;
        let ev =
            evolve_radial_vorticity(&omega0, r_max, &model, 2.0 * period / steps as f64, steps, stride)
                .unwrap();
        let rel_l2 = |a: &[f64], b: &[f64]| {
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n {
                num += (a[i] - b[i]) * (a[i] - b[i]);
                den += b[i] * b[i];
            }
            (num / den).sqrt()
        };
        for k in 0..8 {
            let err = rel_l2(&ev.history[k + 8], &ev.history[k]);
            assert!(err < 1e-3, "period shift at sample {k}: {err}");
        }
        assert!(rel_l2(ev.history.last().unwrap(), &omega0) < 1e-3);
    }

    #[test]
    fn rescaled_runs_are_bitwise_similar() {
        // (r, t) -> (lambda r, lambda^2 t) with nu scaled by lambda^2 gives
        // the identical linear algebra, so profiles map exactly
        let lambda = 2.0;
        let sigma = 1.0;
        let nu0 = 0.05;
        let n = 256;
        let run = |sig: f64, nu: f64, r_max: f64, dt: f64| {
            let model = ViscosityModel::new(ViscosityKind::Constant { nu0: nu }, sig).unwrap();
            let r = uniform_r(r_max, n);
            let omega0: Vec<f64> = r
                .iter()
                .map(|&rr| omega_profile(1.0, sig * sig, rr).unwrap())
                .collect();
            evolve_radial_vorticity(&omega0, r_max, &model, dt, 200, 200).unwrap()
        };
        let base = run(sigma, nu0, 10.0, 0.01);
        let scaled = run(lambda * sigma, lambda * lambda * nu0, lambda * 10.0, 0.01);
        let last_a = base.history.last().unwrap();
        let last_b = scaled.history.last().unwrap();
        for i in 0..n {
            assert!(
                (last_b[i] * lambda * lambda - last_a[i]).abs() < 1e-12,
                "i = {i}"
            );
        }
    }

    #[test]
    fn cosine_average_matches_quadrature_oracle() {
        let sigma: f64 = 1.0;
        let omega_freq = 1.0;
        let nu0 = 0.5 * omega_freq * sigma * sigma;
        let model =
            ViscosityModel::new(ViscosityKind::Cosine { nu0, omega: omega_freq }, sigma).unwrap();
        let period = 2.0 * std::f64::consts::PI / omega_freq;
        let r_grid = uniform_r(6.0 * sigma, 64);
        let avg = long_time_average_profile(&model, 1.0, 100.0 * period, 10_000, &r_grid, 1)
            .unwrap();
        // direct quadrature of <Gamma / 4 Sigma(t)> over one period
        let n = 40_000;
        let mut acc = 0.0;
        for i in 0..n {
            let t = period * (i as f64 + 0.5) / n as f64;
            let s = nu0 / omega_freq * (omega_freq * t).sin() + sigma * sigma;
            acc += 1.0 / (4.0 * s);
        }
        let oracle = acc / n as f64;
        let got = avg.mean_omega[0];
        assert!(
            ((got - oracle) / oracle).abs() < 0.02,
            "averaged axis vorticity {got} vs quadrature {oracle}"
        );
        // nu0 -> 0 limit reduces to the static profile exactly
        let still = ViscosityModel::new(
            ViscosityKind::Cosine { nu0: 0.0, omega: omega_freq },
            sigma,
        )
        .unwrap();
        let avg0 = long_time_average_profile(&still, 1.0, 50.0, 100, &r_grid, 1).unwrap();
        for (i, &r) in r_grid.iter().enumerate() {
            let exact = omega_profile(1.0, sigma * sigma, r).unwrap();
            assert!((avg0.mean_omega[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn ou_ensemble_mean_within_three_standard_errors() {
        let sigma: f64 = 1.0;
        let model = ViscosityModel::new(
            ViscosityKind::OuNoise {
                amplitude: 0.02,
                correlation_time: 0.2,
                rng_seed: 2024,
            },
            sigma,
        )
        .unwrap();
        let r_grid = uniform_r(5.0 * sigma, 32);
        let avg = long_time_average_profile(&model, 1.0, 20.0, 2000, &r_grid, 64).unwrap();
        let se = avg.stderr.as_ref().unwrap();
        let mut inside = 0;
        for (i, &r) in r_grid.iter().enumerate() {
            let exact = omega_profile(1.0, sigma * sigma, r).unwrap();
            if (avg.mean_omega[i] - exact).abs() <= 3.0 * se[i].max(1e-12) {
                inside += 1;
            }
        }
        // allow an isolated radius to brush the band
        assert!(
            inside >= r_grid.len() - 1,
            "{} of {} radii outside 3 SE",
            r_grid.len() - inside,
            r_grid.len()
        );
    }

    #[test]
    fn backward_instability_aborts_and_warns() {
        // cosine model on a fine grid: the solver must warn about the
        // round-off amplification and abort on the resulting non-finite
        // values instead of returning garbage
        let sigma = 1.0;
        let model = ViscosityModel::new(
            ViscosityKind::Cosine { nu0: 0.5, omega: 1.0 },
            sigma,
        )
        .unwrap();
        let n = 512;
        let r = uniform_r(20.0, n);
        let omega0: Vec<f64> = r
            .iter()
            .map(|&rr| omega_profile(1.0, 1.0, rr).unwrap())
            .collect();
        let period = 2.0 * std::f64::consts::PI;
        let res = evolve_radial_vorticity(&omega0, 20.0, &model, period / 4000.0, 4000, 4000);
        assert!(matches!(res, Err(QhError::Numeric(_))), "got {res:?}");
    }

    #[test]
    fn coarse_dt_triggers_accuracy_warning() {
        let model = ViscosityModel::new(ViscosityKind::Constant { nu0: 1.0 }, 1.0).unwrap();
        let n = 128;
        let r = uniform_r(10.0, n);
        let omega0: Vec<f64> = r
            .iter()
            .map(|&rr| omega_profile(1.0, 1.0, rr).unwrap())
            .collect();
        let dr = 10.0 / 127.0;
        let dt = 20.0 * dr * dr; // nu dt / dr^2 = 20 > 10
        let ev = evolve_radial_vorticity(&omega0, 10.0, &model, dt, 5, 5).unwrap();
        assert!(ev.warnings.iter().any(|w| w.contains("accuracy")));
    }

    #[test]
    fn sigma_positivity_clamp_flags() {
        // deliberately non-compliant constant model driven negative
        let model = ViscosityModel::new(ViscosityKind::Constant { nu0: -1.0 }, 1.0).unwrap();
        let path = model.sample_path(5.0, 100).unwrap();
        assert!(path.clamped);
        assert!(path.sigma_sq.iter().all(|&s| s > 0.0));
    }
}
