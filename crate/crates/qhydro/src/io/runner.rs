//! Scenario execution: write artifacts, evaluate the registered
//! invariants by reading the artifacts back, then write the manifest.
//! `check` re-runs the same evaluation against a stored manifest.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::bohm::{integrate_bundle, sample_seeds};
use crate::error::{QhError, Result};
use crate::evolve::evolve;
use crate::grid::Grid;
use crate::io::config::{
    EvolveScenario, Scenario, ScenarioConfig, TorusScenario, TrajectoriesScenario, VortexRun,
    VortexScenario,
};
use crate::io::csv;
use crate::io::manifest::{ArtifactEntry, InvariantResult, RunManifest, MANIFEST_VERSION};
use crate::madelung;
use crate::potential::PotentialSpec;
use crate::scene::streamlines_around_vortex;
use crate::states;
use crate::torus::{
    double_cover_rotation, helicoidal_ring, spindle_sweep, torus_measures, NormalReversal,
    TorusRegime, TorusShape, Traversal,
};
use crate::vortex::{
    evolve_radial_vorticity, long_time_average_profile, omega_profile, ViscosityKind,
    ViscosityModel,
};

struct ArtifactSet {
    dir: PathBuf,
    entries: Vec<ArtifactEntry>,
    warnings: Vec<String>,
}

impl ArtifactSet {
    fn record(&mut self, rel: &str, rows: u64, kind: &str) {
        self.entries.push(ArtifactEntry {
            path: rel.to_string(),
            rows,
            kind: kind.to_string(),
        });
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }
}

/// Execute a scenario: artifacts, invariants, manifest (in that order).
/// Exit-code policy for callers: all invariants green is success; a red
/// one is reported by [`RunManifest::first_failure`].
pub fn run(config: &ScenarioConfig) -> Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    let dir = config.effective_output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut set = ArtifactSet {
        dir: dir.clone(),
        entries: Vec::new(),
        warnings: Vec::new(),
    };

    match &config.scenario {
        Scenario::Evolve(s) => {
            run_evolve(s, &mut set, "")?;
        }
        Scenario::Trajectories(s) => run_trajectories(s, &mut set)?,
        Scenario::Vortex(s) => run_vortex(s, config.seed, &mut set)?,
        Scenario::Torus(s) => run_torus(s, &mut set)?,
        Scenario::FlowScene(s) => {
            let scene = streamlines_around_vortex(&s.scene, s.n_lines)?;
            let rows = csv::write_streamlines(&set.path("streamlines.csv"), &scene)?;
            set.record("streamlines.csv", rows, "streamlines");
            let rows = csv::write_scalar_field(&set.path("psi_field.csv"), &scene.psi_field, "psi")?;
            set.record("psi_field.csv", rows, "stream_function_field");
            if !scene.rejected_seeds.is_empty() {
                set.warnings
                    .push(format!("{} seeds fell inside the cylinder", scene.rejected_seeds.len()));
            }
        }
    }

    let invariants = evaluate_invariants(config, &dir)?;
    let manifest = RunManifest {
        format_version: MANIFEST_VERSION,
        config: config.clone(),
        artifacts: set.entries,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        invariants,
        warnings: set.warnings,
    };
    manifest.write(&dir)?;
    Ok(manifest)
}

/// Re-verify a stored manifest: the invariants are evaluated afresh from
/// the artifacts next to it and compared with the recorded summary.
pub fn check(manifest_path: &Path) -> Result<RunManifest> {
    let manifest = RunManifest::read(manifest_path)?;
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let fresh = evaluate_invariants(&manifest.config, &dir)?;
    if fresh.len() != manifest.invariants.len() {
        return Err(QhError::Invariant {
            name: "manifest_consistency".into(),
            detail: format!(
                "manifest lists {} invariants, re-evaluation produced {}",
                manifest.invariants.len(),
                fresh.len()
            ),
        });
    }
    for (stored, new) in manifest.invariants.iter().zip(&fresh) {
        if stored.name != new.name || stored.passed != new.passed {
            return Err(QhError::Invariant {
                name: stored.name.clone(),
                detail: format!(
                    "stored pass = {}, re-evaluated pass = {} (value {})",
                    stored.passed, new.passed, new.value
                ),
            });
        }
    }
    if let Some(fail) = fresh.iter().find(|i| !i.passed) {
        return Err(QhError::Invariant {
            name: fail.name.clone(),
            detail: fail.detail.clone(),
        });
    }
    Ok(manifest)
}

// ---------------------------------------------------------------- evolve

#[derive(Serialize, Deserialize)]
struct SnapshotIndex {
    times: Vec<f64>,
    files: Vec<String>,
}

fn run_evolve(s: &EvolveScenario, set: &mut ArtifactSet, prefix: &str) -> Result<crate::evolve::Evolution> {
    let grid = s.grid.build()?;
    let psi0 = s.initial.build(&grid, &s.constants)?;
    let ev = evolve(&psi0, &s.potential, &s.evolution, &s.constants)?;
    for w in &ev.warnings {
        if !set.warnings.contains(w) {
            set.warnings.push(w.clone());
        }
    }
    let mut files = Vec::new();
    for (k, wf) in ev.snapshots.iter().enumerate() {
        let rel = format!("{prefix}snapshots/snap_{k:04}.csv");
        let rows = csv::write_wavefield(&set.path(&rel), wf)?;
        set.record(&rel, rows, "wavefield");
        files.push(format!("snapshots/snap_{k:04}.csv"));
    }
    let index = SnapshotIndex {
        times: ev.times.clone(),
        files,
    };
    let rel = format!("{prefix}snapshots/index.json");
    std::fs::write(set.path(&rel), serde_json::to_string_pretty(&index)? + "\n")?;
    set.record(&rel, ev.times.len() as u64, "snapshot_index");
    Ok(ev)
}

fn run_trajectories(s: &TrajectoriesScenario, set: &mut ArtifactSet) -> Result<()> {
    let grid = s.evolve.grid.build()?;
    let ev = run_evolve(&s.evolve, set, "")?;

    let seeds = sample_seeds(&ev.snapshots[0].rho_field(), s.seeds, s.seed_mode)?;
    set.warnings.extend(seeds.warnings.iter().cloned());
    let bundle = integrate_bundle(
        &ev.snapshots,
        &ev.times,
        None,
        &seeds.positions,
        &s.evolve.constants,
    )?;
    let rows = csv::write_bundle(&set.path("bundle.csv"), &bundle, grid.dim() == 2)?;
    set.record("bundle.csv", rows, "trajectory_bundle");
    Ok(())
}

// ---------------------------------------------------------------- vortex

fn effective_model(model: &ViscosityModel, run_seed: u64) -> ViscosityModel {
    // all randomness flows from the run seed; the model's own seed acts
    // as a component offset
    match &model.kind {
        ViscosityKind::OuNoise {
            amplitude,
            correlation_time,
            rng_seed,
        } => ViscosityModel {
            kind: ViscosityKind::OuNoise {
                amplitude: *amplitude,
                correlation_time: *correlation_time,
                rng_seed: run_seed.wrapping_add(*rng_seed),
            },
            sigma: model.sigma,
        },
        _ => model.clone(),
    }
}

fn run_vortex(s: &VortexScenario, run_seed: u64, set: &mut ArtifactSet) -> Result<()> {
    let model = effective_model(&s.model, run_seed);
    let r_grid: Vec<f64> = (0..s.n_r)
        .map(|i| s.r_max * i as f64 / (s.n_r - 1) as f64)
        .collect();
    match &s.run {
        VortexRun::Decay { dt, steps, snapshot_stride } => {
            let sigma_sq0 = model.sigma * model.sigma;
            let omega0: Vec<f64> = r_grid
                .iter()
                .map(|&r| omega_profile(s.gamma, sigma_sq0, r))
                .collect::<Result<_>>()?;
            let ev = evolve_radial_vorticity(&omega0, s.r_max, &model, *dt, *steps, *snapshot_stride)?;
            set.warnings.extend(ev.warnings.iter().cloned());
            let rows = csv::write_radial_history(&set.path("profile.csv"), &ev)?;
            set.record("profile.csv", rows, "radial_profile");
            let path = model.sample_path(*dt * *steps as f64, (*steps).max(2))?;
            let rows = csv::write_viscosity_path(&set.path("viscosity.csv"), &path)?;
            set.record("viscosity.csv", rows, "viscosity_path");
        }
        VortexRun::Average { horizon, samples, ensemble } => {
            let avg =
                long_time_average_profile(&model, s.gamma, *horizon, *samples, &r_grid, *ensemble)?;
            set.warnings.extend(avg.warnings.iter().cloned());
            let rows = csv::write_ensemble(&set.path("ensemble.csv"), &avg)?;
            set.record("ensemble.csv", rows, "ensemble_profile");
        }
    }
    Ok(())
}

// ----------------------------------------------------------------- torus

#[derive(Serialize, Deserialize)]
struct SweepManifest {
    tube_radius: f64,
    entries: Vec<SweepEntry>,
    rings: Vec<RingEntry>,
    trace_file: String,
}

#[derive(Serialize, Deserialize)]
struct SweepEntry {
    torus_radius: f64,
    regime: TorusRegime,
    formula_volume: f64,
    formula_surface: f64,
    mesh_area: f64,
    mesh_volume: f64,
    intersection_z: Option<f64>,
    reversal: Option<NormalReversal>,
    ring_gap: f64,
    mesh_obj: String,
    mesh_csv: String,
}

#[derive(Serialize, Deserialize)]
struct RingEntry {
    torus_radius: f64,
    file: String,
    closure_gap: f64,
    closed: bool,
    turns_about_tube: u32,
    turns_about_axis: u32,
}

fn run_torus(s: &TorusScenario, set: &mut ArtifactSet) -> Result<()> {
    let steps = spindle_sweep(s.tube_radius, &s.sweep_b, s.n_theta, s.n_phi, s.ring_samples_per_turn)?;
    let mut entries = Vec::new();
    for (k, step) in steps.iter().enumerate() {
        let obj = format!("mesh_{k}.obj");
        let ccsv = format!("mesh_{k}.csv");
        let rows = csv::write_mesh_obj(&set.path(&obj), &step.mesh)?;
        set.record(&obj, rows, "mesh_obj");
        let rows = csv::write_mesh_csv(&set.path(&ccsv), &step.mesh)?;
        set.record(&ccsv, rows, "mesh_csv");
        entries.push(SweepEntry {
            torus_radius: step.torus_radius,
            regime: step.classification.regime,
            formula_volume: step.formula.volume,
            formula_surface: step.formula.surface,
            mesh_area: step.mesh_measures.unsigned_area,
            mesh_volume: step.mesh_measures.enclosed_volume,
            intersection_z: step.classification.intersection_z,
            reversal: step.mesh.reversal.clone(),
            ring_gap: step.ring.closure_gap,
            mesh_obj: obj,
            mesh_csv: ccsv,
        });
    }

    let mut rings = Vec::new();
    for (k, &b) in s.ring_b.iter().enumerate() {
        let shape = TorusShape::with_rational_ratio(s.tube_radius, b, 1.0, 2, 1, 0.0, 0.0)?;
        let ring = helicoidal_ring(&shape, s.ring_samples_per_turn)?;
        let rel = format!("ring_{k}.csv");
        let rows = csv::write_ring(&set.path(&rel), &ring)?;
        set.record(&rel, rows, "helicoidal_ring");
        rings.push(RingEntry {
            torus_radius: b,
            file: rel,
            closure_gap: ring.closure_gap,
            closed: ring.closed,
            turns_about_tube: ring.turns_about_tube,
            turns_about_axis: ring.turns_about_axis,
        });
    }

    let shape = TorusShape::with_rational_ratio(s.tube_radius, s.transport_b, 1.0, 2, 1, 0.0, 0.0)?;
    let ring = helicoidal_ring(&shape, s.ring_samples_per_turn)?;
    let trace = double_cover_rotation(&shape, &ring, s.transport_samples, Traversal::Forward)?;
    let rows = csv::write_trace(&set.path("trace.csv"), &trace)?;
    set.record("trace.csv", rows, "orientation_trace");

    let sweep = SweepManifest {
        tube_radius: s.tube_radius,
        entries,
        rings,
        trace_file: "trace.csv".into(),
    };
    std::fs::write(set.path("sweep.json"), serde_json::to_string_pretty(&sweep)? + "\n")?;
    set.record("sweep.json", steps.len() as u64, "sweep_manifest");
    Ok(())
}

// ------------------------------------------------------------ invariants

fn result(name: &str, passed: bool, value: f64, threshold: f64, detail: String) -> InvariantResult {
    InvariantResult {
        name: name.into(),
        passed,
        value,
        threshold,
        detail,
    }
}

/// Evaluate every invariant registered for this scenario from the
/// artifacts in `dir`.
pub fn evaluate_invariants(config: &ScenarioConfig, dir: &Path) -> Result<Vec<InvariantResult>> {
    match &config.scenario {
        Scenario::Evolve(s) => evolve_invariants(s, dir),
        Scenario::Trajectories(s) => {
            let mut out = evolve_invariants(&s.evolve, dir)?;
            out.extend(trajectory_invariants(s, dir)?);
            Ok(out)
        }
        Scenario::Vortex(s) => vortex_invariants(s, config.seed, dir),
        Scenario::Torus(s) => torus_invariants(s, dir),
        Scenario::FlowScene(s) => flow_scene_invariants(&s.scene, dir),
    }
}

fn read_snapshot_index(dir: &Path) -> Result<SnapshotIndex> {
    let text = std::fs::read_to_string(dir.join("snapshots/index.json"))?;
    Ok(serde_json::from_str(&text)?)
}

fn snapshot_rho(dir: &Path, file: &str, grid: &Grid) -> Result<Vec<f64>> {
    let table = csv::read_csv(&dir.join("snapshots").join(
        Path::new(file).file_name().unwrap(),
    ))?;
    let col = table.column("rho")?;
    if table.rows.len() != grid.len() {
        return Err(QhError::Invariant {
            name: "snapshot_shape".into(),
            detail: format!("{file} has {} rows, grid has {}", table.rows.len(), grid.len()),
        });
    }
    Ok(table.rows.iter().map(|r| r[col]).collect())
}

fn evolve_invariants(s: &EvolveScenario, dir: &Path) -> Result<Vec<InvariantResult>> {
    let grid = s.grid.build()?;
    let index = read_snapshot_index(dir)?;
    let mut worst_drift = 0.0f64;
    for file in &index.files {
        let rho = snapshot_rho(dir, file, &grid)?;
        let norm = grid.integrate(&rho);
        worst_drift = worst_drift.max((norm - 1.0).abs());
    }
    let mut out = vec![result(
        "norm_conservation",
        worst_drift < 1e-6,
        worst_drift,
        1e-6,
        format!("max |1 - norm| over {} snapshots", index.files.len()),
    )];

    // quantum potential through the pressure chain must equal the chain
    // itself recombined point by point (the Eq-11 route identity)
    let rho0 = snapshot_rho(dir, &index.files[0], &grid)?;
    let rho_field = crate::field::ScalarField::new(grid.clone(), rho0)?;
    let terms = madelung::pressure_terms(&rho_field, &s.constants)?;
    let qp = madelung::quantum_potential(&rho_field, &s.constants)?;
    let scale = qp.q.max_abs().max(1e-30);
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        if qp.mask[i] {
            continue;
        }
        let chain = (terms.p1.data[i] + terms.p2.data[i]) / rho_field.data[i];
        worst = worst.max((chain - qp.q.data[i]).abs() / scale);
    }
    out.push(result(
        "quantum_potential_pressure_identity",
        worst < 1e-9,
        worst,
        1e-9,
        "max |(P1+P2)/rho - Q| / max|Q| on the initial snapshot".into(),
    ));
    Ok(out)
}

fn trajectory_invariants(s: &TrajectoriesScenario, dir: &Path) -> Result<Vec<InvariantResult>> {
    let grid = s.evolve.grid.build()?;
    let table = csv::read_csv(&dir.join("bundle.csv"))?;
    let (c_seed, c_t, c_x) = (table.column("seed_index")?, table.column("t")?, table.column("x")?);
    let mut out = Vec::new();

    if grid.dim() == 1 {
        // paths keep their seed order at every sampled instant
        let mut by_time: std::collections::BTreeMap<u64, Vec<(usize, f64)>> =
            std::collections::BTreeMap::new();
        for row in &table.rows {
            by_time
                .entry(row[c_t].to_bits())
                .or_default()
                .push((row[c_seed] as usize, row[c_x]));
        }
        let mut min_gap = f64::MAX;
        for (_, mut xs) in by_time {
            xs.sort_by_key(|(s, _)| *s);
            for w in xs.windows(2) {
                min_gap = min_gap.min(w[1].1 - w[0].1);
            }
        }
        out.push(result(
            "paths_ordered",
            min_gap > 0.0,
            min_gap,
            0.0,
            "min neighbour gap over all sampled instants".into(),
        ));
    }

    if let (
        PotentialSpec::Free,
        crate::io::config::InitialState::GaussianPacket { sigma0, k0, .. },
        1,
    ) = (&s.evolve.potential, &s.evolve.initial, grid.dim())
    {
        if k0.iter().all(|&k| k == 0.0) {
            let t_final = table.rows.iter().map(|r| r[c_t]).fold(0.0f64, f64::max);
            let factor = states::free_packet_width(*sigma0, t_final, &s.evolve.constants) / sigma0;
            let mut start = std::collections::BTreeMap::new();
            let mut end = std::collections::BTreeMap::new();
            for row in &table.rows {
                let s_idx = row[c_seed] as usize;
                if row[c_t] == 0.0 {
                    start.insert(s_idx, row[c_x]);
                }
                if row[c_t] == t_final {
                    end.insert(s_idx, row[c_x]);
                }
            }
            let mut worst = 0.0f64;
            for (s_idx, x0) in &start {
                if x0.abs() < 1e-9 * sigma0 {
                    continue;
                }
                let xt = end[s_idx];
                worst = worst.max((xt / (x0 * factor) - 1.0).abs());
            }
            out.push(result(
                "free_packet_spread_law",
                worst < 1e-3,
                worst,
                1e-3,
                format!("max relative endpoint error against the spread factor {factor:.6}"),
            ));
        }
    }
    Ok(out)
}

fn vortex_invariants(
    s: &VortexScenario,
    run_seed: u64,
    dir: &Path,
) -> Result<Vec<InvariantResult>> {
    let model = effective_model(&s.model, run_seed);
    let sigma_sq = model.sigma * model.sigma;
    let mut out = Vec::new();
    match &s.run {
        VortexRun::Decay { dt, steps, .. } => {
            let visc = csv::read_csv(&dir.join("viscosity.csv"))?;
            let c_sig = visc.column("sigma_sq")?;
            let min_sigma = visc
                .rows
                .iter()
                .map(|r| r[c_sig])
                .fold(f64::MAX, f64::min);
            out.push(result(
                "sigma_positive",
                min_sigma >= crate::vortex::SIGMA_CLAMP_FRACTION * sigma_sq,
                min_sigma,
                crate::vortex::SIGMA_CLAMP_FRACTION * sigma_sq,
                "min accumulator value along the run".into(),
            ));

            let table = csv::read_csv(&dir.join("profile.csv"))?;
            let (c_t, c_r, c_w) = (table.column("t")?, table.column("r")?, table.column("omega")?);
            let times: Vec<f64> = {
                let mut ts: Vec<f64> = table.rows.iter().map(|r| r[c_t]).collect();
                ts.dedup();
                ts
            };
            let profile_at = |t: f64| -> (Vec<f64>, Vec<f64>) {
                let mut r = Vec::new();
                let mut w = Vec::new();
                for row in &table.rows {
                    if row[c_t] == t {
                        r.push(row[c_r]);
                        w.push(row[c_w]);
                    }
                }
                (r, w)
            };
            let (_, w0) = profile_at(times[0]);
            let w0_max = w0.iter().fold(0.0f64, |m, &v| m.max(v.abs()));

            match &model.kind {
                ViscosityKind::Zero => {
                    let (_, w_last) = profile_at(*times.last().unwrap());
                    let drift = w0
                        .iter()
                        .zip(&w_last)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max);
                    out.push(result(
                        "vorticity_permanence",
                        drift < 1e-12 * w0_max,
                        drift,
                        1e-12 * w0_max,
                        "max |omega(t_end) - omega(0)| with zero viscosity".into(),
                    ));
                }
                ViscosityKind::Constant { nu0 } if *nu0 > 0.0 => {
                    let t_end = *times.last().unwrap();
                    let sigma_end = nu0 * t_end + sigma_sq;
                    if sigma_end >= 2.0 * sigma_sq {
                        let (r, w) = profile_at(t_end);
                        let mut num = 0.0;
                        let mut den = 0.0;
                        for (i, &rr) in r.iter().enumerate() {
                            let exact = omega_profile(s.gamma, sigma_end, rr)?;
                            num += (w[i] - exact) * (w[i] - exact);
                            den += exact * exact;
                        }
                        let rel = (num / den).sqrt();
                        out.push(result(
                            "self_similar_decay",
                            rel < 1e-3,
                            rel,
                            1e-3,
                            format!("relative L2 against the spreading profile at Sigma = {sigma_end:.4}"),
                        ));
                    }
                }
                ViscosityKind::Cosine { omega, .. } => {
                    let period = 2.0 * std::f64::consts::PI / omega;
                    let duration = *dt * *steps as f64;
                    if duration + 1e-9 >= period {
                        // nearest snapshot to one period
                        let t_best = times
                            .iter()
                            .copied()
                            .min_by(|a, b| {
                                (*a - period).abs().partial_cmp(&(*b - period).abs()).unwrap()
                            })
                            .unwrap();
                        if (t_best - period).abs() <= *dt {
                            let (_, w) = profile_at(t_best);
                            let mut num = 0.0;
                            let mut den = 0.0;
                            for i in 0..w0.len() {
                                num += (w[i] - w0[i]) * (w[i] - w0[i]);
                                den += w0[i] * w0[i];
                            }
                            let rel = (num / den).sqrt();
                            out.push(result(
                                "zero_mean_period_return",
                                rel < 1e-3,
                                rel,
                                1e-3,
                                format!("relative L2 between t = {t_best:.4} and t = 0"),
                            ));
                        }
                    }
                }
                _ => {}
            }
        }
        VortexRun::Average { horizon, .. } => {
            let table = csv::read_csv(&dir.join("ensemble.csv"))?;
            let (c_r, c_m) = (table.column("r")?, table.column("mean_omega")?);
            match &model.kind {
                ViscosityKind::OuNoise { .. } => {
                    let c_se = table.column("stderr")?;
                    let mut worst = 0.0f64;
                    let mut outside = 0usize;
                    for row in &table.rows {
                        let exact = omega_profile(s.gamma, sigma_sq, row[c_r])?;
                        let se = row[c_se].max(1e-12);
                        let ratio = (row[c_m] - exact).abs() / se;
                        worst = worst.max(ratio);
                        if ratio > 3.0 {
                            outside += 1;
                        }
                    }
                    out.push(result(
                        "ensemble_mean_within_band",
                        outside == 0,
                        worst,
                        3.0,
                        format!("{outside} radii outside three standard errors"),
                    ));
                }
                ViscosityKind::Cosine { nu0, omega } => {
                    // axis value against a Simpson quadrature over one period
                    let period = 2.0 * std::f64::consts::PI / omega;
                    let n = 20_000;
                    let h = period / n as f64;
                    let f = |t: f64| s.gamma / (4.0 * (nu0 / omega * (omega * t).sin() + sigma_sq));
                    let mut acc = f(0.0) + f(period);
                    for i in 1..n {
                        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                    }
                    let oracle = acc * h / 3.0 / period;
                    let got = table.rows[0][c_m];
                    let rel = ((got - oracle) / oracle).abs();
                    out.push(result(
                        "average_matches_quadrature",
                        rel < 0.02,
                        rel,
                        0.02,
                        format!("axis mean over horizon {horizon} vs one-period quadrature"),
                    ));
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

fn torus_invariants(s: &TorusScenario, dir: &Path) -> Result<Vec<InvariantResult>> {
    let text = std::fs::read_to_string(dir.join("sweep.json"))?;
    let sweep: SweepManifest = serde_json::from_str(&text)?;
    let a = sweep.tube_radius;
    let mut out = Vec::new();

    // ring closure from the emitted samples
    let mut worst_gap = 0.0f64;
    for ring in &sweep.rings {
        let table = csv::read_csv(&dir.join(&ring.file))?;
        let (cx, cy, cz) = (table.column("x")?, table.column("y")?, table.column("z")?);
        let first = &table.rows[0];
        let last = &table.rows[table.rows.len() - 1];
        let gap = ((first[cx] - last[cx]).powi(2)
            + (first[cy] - last[cy]).powi(2)
            + (first[cz] - last[cz]).powi(2))
        .sqrt();
        worst_gap = worst_gap.max(gap / a);
    }
    out.push(result(
        "ring_closure",
        worst_gap < 1e-10,
        worst_gap,
        1e-10,
        format!("max closure gap / tube radius over {} rings", sweep.rings.len()),
    ));

    // mesh area against the closed form wherever it is a true area
    let mut worst_area = 0.0f64;
    for e in &sweep.entries {
        if e.torus_radius >= a {
            let exact = torus_measures(a, e.torus_radius)?.surface;
            worst_area = worst_area.max(((e.mesh_area - exact) / exact).abs());
        }
    }
    out.push(result(
        "mesh_area_matches_formula",
        worst_area < 1e-3,
        worst_area,
        1e-3,
        "max relative area error over ring-regime sweep entries".into(),
    ));

    // one reversal locus exactly in the flipping regimes, at the closed-form height
    let mut count_ok = true;
    let mut worst_z = 0.0f64;
    for e in &sweep.entries {
        let flips = e.torus_radius < a;
        match (&e.reversal, flips) {
            (Some(rev), true) => {
                if rev.theta_crossings.len() != 2 {
                    count_ok = false;
                }
                let expected = (a * a - e.torus_radius * e.torus_radius).sqrt();
                worst_z = worst_z.max((rev.axis_z - expected).abs());
            }
            (None, false) => {}
            _ => count_ok = false,
        }
    }
    out.push(result(
        "spindle_reversal_locus",
        count_ok && worst_z < 1e-12,
        worst_z,
        1e-12,
        "reversal present exactly in spindle shapes, at z = sqrt(a^2 - b^2)".into(),
    ));

    // transport trace dots
    let table = csv::read_csv(&dir.join(&sweep.trace_file))?;
    let (c_rev, c_dot) = (table.column("revolutions")?, table.column("direction_dot")?);
    let mut dot1 = f64::NAN;
    let mut dot2 = f64::NAN;
    for row in &table.rows {
        if row[c_rev] == 1.0 {
            dot1 = row[c_dot];
        }
        if row[c_rev] == 2.0 {
            dot2 = row[c_dot];
        }
    }
    let worst = (dot1 + 1.0).abs().max((dot2 - 1.0).abs());
    out.push(result(
        "double_cover_orientation",
        worst < 1e-6,
        worst,
        1e-6,
        format!("dot at one revolution {dot1:.9}, at two {dot2:.9}"),
    ));
    let _ = s;
    Ok(out)
}

fn flow_scene_invariants(
    scene: &crate::scene::VortexSceneSpec,
    dir: &Path,
) -> Result<Vec<InvariantResult>> {
    let table = csv::read_csv(&dir.join("streamlines.csv"))?;
    let (c_line, c_x, c_y, c_psi) = (
        table.column("line_index")?,
        table.column("x")?,
        table.column("y")?,
        table.column("psi_stream")?,
    );
    let mut psi_seed: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
    let mut worst_drift = 0.0f64;
    let mut min_r = f64::MAX;
    for row in &table.rows {
        let li = row[c_line] as u64;
        let psi0 = *psi_seed.entry(li).or_insert(row[c_psi]);
        worst_drift = worst_drift.max((row[c_psi] - psi0).abs());
        min_r = min_r.min((row[c_x] * row[c_x] + row[c_y] * row[c_y]).sqrt());
    }
    let mut out = vec![result(
        "stream_function_constancy",
        worst_drift < 1e-6,
        worst_drift,
        1e-6,
        "max |psi - psi(seed)| along any streamline".into(),
    )];
    if scene.dipole {
        out.push(result(
            "no_penetration",
            min_r >= scene.cylinder_radius - 1e-9,
            min_r,
            scene.cylinder_radius - 1e-9,
            "min distance from the cylinder centre over all streamline samples".into(),
        ));
    }
    if scene.dipole && scene.u_inf != 0.0 && scene.circulation == 0.0 {
        // locate the on-cylinder stagnation angles by bisection on the
        // tangential speed; they must land on (+-R, 0)
        let r = scene.cylinder_radius;
        let v_theta = |theta: f64| {
            let v = scene.velocity_at(r * theta.cos(), r * theta.sin());
            -v[0] * theta.sin() + v[1] * theta.cos()
        };
        let mut worst = 0.0f64;
        for (lo0, hi0, expected) in [
            (-0.8, 0.8, [r, 0.0]),
            (std::f64::consts::PI - 0.8, std::f64::consts::PI + 0.8, [-r, 0.0]),
        ] {
            let (mut lo, mut hi) = (lo0, hi0);
            debug_assert!(v_theta(lo) * v_theta(hi) < 0.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if v_theta(lo) * v_theta(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let theta = 0.5 * (lo + hi);
            let p = [r * theta.cos(), r * theta.sin()];
            let d = ((p[0] - expected[0]).powi(2) + (p[1] - expected[1]).powi(2)).sqrt();
            worst = worst.max(d);
        }
        out.push(result(
            "stagnation_points",
            worst < 1e-6,
            worst,
            1e-6,
            "distance of root-found stagnation points from (+-R, 0)".into(),
        ));
    }
    Ok(out)
}
