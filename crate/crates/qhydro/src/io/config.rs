//! Scenario configuration: strict JSON with a version tag. Unknown keys
//! are rejected everywhere, and each run embeds its resolved config in
//! the manifest.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::bohm::SeedMode;
use crate::constants::PhysicalConstants;
use crate::error::{QhError, Result};
use crate::evolve::EvolutionConfig;
use crate::grid::{Boundary, Grid};
use crate::potential::PotentialSpec;
use crate::scene::VortexSceneSpec;
use crate::vortex::ViscosityModel;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Format version tag; must equal [`CONFIG_VERSION`].
    pub version: u32,
    /// Base seed; all randomness derives from it.
    pub seed: u64,
    pub output_dir: PathBuf,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Evolve(EvolveScenario),
    Trajectories(TrajectoriesScenario),
    Vortex(VortexScenario),
    Torus(TorusScenario),
    FlowScene(FlowSceneScenario),
}

impl Scenario {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Scenario::Evolve(_) => "evolve",
            Scenario::Trajectories(_) => "trajectories",
            Scenario::Vortex(_) => "vortex",
            Scenario::Torus(_) => "torus",
            Scenario::FlowScene(_) => "flow_scene",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Per-axis `[min, max]`; one or two axes.
    pub extents: Vec<[f64; 2]>,
    /// Per-axis point counts.
    pub n: Vec<usize>,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        if self.extents.len() != self.n.len() || self.extents.is_empty() || self.extents.len() > 2 {
            return Err(QhError::config(
                "grid",
                "extents and n must both have one or two entries",
            ));
        }
        match self.extents.len() {
            1 => Grid::line(self.extents[0][0], self.extents[0][1], self.n[0], self.boundary),
            _ => Grid::plane(
                (self.extents[0][0], self.extents[0][1]),
                self.n[0],
                (self.extents[1][0], self.extents[1][1]),
                self.n[1],
                self.boundary,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    GaussianPacket {
        center: Vec<f64>,
        sigma0: f64,
        k0: Vec<f64>,
    },
    PlaneWave {
        modes: Vec<i32>,
    },
    HarmonicGroundState {
        omega_trap: f64,
    },
}

impl InitialState {
    pub fn build(
        &self,
        grid: &Grid,
        constants: &PhysicalConstants,
    ) -> Result<crate::field::ComplexField> {
        match self {
            InitialState::GaussianPacket { center, sigma0, k0 } => {
                crate::states::gaussian_packet(grid, center, *sigma0, k0)
            }
            InitialState::PlaneWave { modes } => crate::states::plane_wave(grid, modes),
            InitialState::HarmonicGroundState { omega_trap } => {
                crate::states::harmonic_ground_state(grid, *omega_trap, constants)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveScenario {
    #[serde(default)]
    pub constants: PhysicalConstants,
    pub grid: GridSpec,
    pub initial: InitialState,
    pub potential: PotentialSpec,
    pub evolution: EvolutionConfig,
}

impl EvolveScenario {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        let grid = self.grid.build()?;
        self.potential.validate(&grid)?;
        self.evolution.validate(&grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoriesScenario {
    pub evolve: EvolveScenario,
    pub seeds: usize,
    pub seed_mode: SeedMode,
}

impl TrajectoriesScenario {
    pub fn validate(&self) -> Result<()> {
        self.evolve.validate()?;
        if self.seeds < 1 {
            return Err(QhError::config("seeds", "need at least one seed"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VortexRun {
    /// Integrate the radial vorticity equation.
    Decay {
        dt: f64,
        steps: usize,
        snapshot_stride: usize,
    },
    /// Long-horizon (and, for noise, ensemble) average of the profile.
    Average {
        horizon: f64,
        samples: usize,
        ensemble: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexScenario {
    pub model: ViscosityModel,
    pub gamma: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub run: VortexRun,
}

impl VortexScenario {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.gamma.is_finite()) {
            return Err(QhError::config("vortex.gamma", "must be finite"));
        }
        if !(self.r_max > 0.0) {
            return Err(QhError::config("vortex.r_max", "must be > 0"));
        }
        if self.n_r < 8 {
            return Err(QhError::config("vortex.n_r", "need at least 8 radial points"));
        }
        match &self.run {
            VortexRun::Decay { dt, steps, snapshot_stride } => {
                if !(dt > &0.0) {
                    return Err(QhError::config("vortex.run.dt", "must be > 0"));
                }
                if *steps < 1 || *snapshot_stride < 1 {
                    return Err(QhError::config("vortex.run.steps", "steps and stride must be >= 1"));
                }
            }
            VortexRun::Average { horizon, samples, ensemble } => {
                if !(horizon > &0.0) || *samples < 2 {
                    return Err(QhError::config("vortex.run.horizon", "need horizon > 0 and samples >= 2"));
                }
                if *ensemble < 1 {
                    return Err(QhError::config("vortex.run.ensemble", "need at least one member"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusScenario {
    pub tube_radius: f64,
    /// Descending torus radii for the surface sweep.
    pub sweep_b: Vec<f64>,
    /// Descending torus radii for the ring-degeneration sweep.
    pub ring_b: Vec<f64>,
    /// Torus radius of the double-cover transport trace.
    pub transport_b: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub ring_samples_per_turn: usize,
    pub transport_samples: usize,
}

impl TorusScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.tube_radius > 0.0) {
            return Err(QhError::config("torus.tube_radius", "must be > 0"));
        }
        if self.sweep_b.is_empty() || self.ring_b.is_empty() {
            return Err(QhError::config("torus.sweep_b", "sweeps must not be empty"));
        }
        if self.n_theta < 32 || self.n_phi < 32 {
            return Err(QhError::config("torus.n_theta", "mesh needs >= 32 per angle"));
        }
        if self.ring_samples_per_turn < 64 {
            return Err(QhError::config("torus.ring_samples_per_turn", "need >= 64"));
        }
        if self.transport_samples < 1000 {
            return Err(QhError::config("torus.transport_samples", "need >= 1000"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSceneScenario {
    pub scene: VortexSceneSpec,
    pub n_lines: usize,
}

impl FlowSceneScenario {
    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        if self.n_lines < 1 {
            return Err(QhError::config("flow_scene.n_lines", "need at least one line"));
        }
        Ok(())
    }
}

impl ScenarioConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| {
            QhError::config(
                "json",
                format!("parse error at line {}, column {}: {e}", e.line(), e.column()),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(QhError::config(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            ));
        }
        match &self.scenario {
            Scenario::Evolve(s) => s.validate(),
            Scenario::Trajectories(s) => s.validate(),
            Scenario::Vortex(s) => s.validate(),
            Scenario::Torus(s) => s.validate(),
            Scenario::FlowScene(s) => s.validate(),
        }
    }

    /// Output directory after the environment override of the root.
    /// `QHYDRO_OUTPUT_ROOT` relocates relative directories under itself
    /// (absolute paths keep only their final component).
    pub fn effective_output_dir(&self) -> PathBuf {
        match std::env::var_os("QHYDRO_OUTPUT_ROOT") {
            None => self.output_dir.clone(),
            Some(root) => {
                let root = PathBuf::from(root);
                if self.output_dir.is_absolute() {
                    match self.output_dir.file_name() {
                        Some(name) => root.join(name),
                        None => root,
                    }
                } else {
                    root.join(&self.output_dir)
                }
            }
        }
    }
}
