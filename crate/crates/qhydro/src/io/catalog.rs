//! Built-in example scenarios, one per verified capability. `list` prints
//! them; `run --builtin <name>` executes one without a config file.

use std::path::PathBuf;

use crate::bohm::SeedMode;
use crate::constants::PhysicalConstants;
use crate::evolve::{EvolutionConfig, Scheme};
use crate::grid::Boundary;
use crate::io::config::{
    EvolveScenario, FlowSceneScenario, GridSpec, InitialState, Scenario, ScenarioConfig,
    TorusScenario, TrajectoriesScenario, VortexRun, VortexScenario,
};
use crate::potential::PotentialSpec;
use crate::scene::VortexSceneSpec;
use crate::vortex::{ViscosityKind, ViscosityModel};

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// The closed-form result or scene the scenario reproduces.
    pub reference: &'static str,
    pub config: ScenarioConfig,
}

fn wrap(name: &str, scenario: Scenario) -> ScenarioConfig {
    ScenarioConfig {
        version: 1,
        seed: 7,
        output_dir: PathBuf::from(format!("qhydro-out/{name}")),
        scenario,
    }
}

fn free_packet_evolve() -> EvolveScenario {
    EvolveScenario {
        constants: PhysicalConstants::default(),
        grid: GridSpec {
            extents: vec![[-24.0, 24.0]],
            n: vec![512],
            boundary: Boundary::Periodic,
        },
        initial: InitialState::GaussianPacket {
            center: vec![0.0],
            sigma0: 1.0,
            k0: vec![0.0],
        },
        potential: PotentialSpec::Free,
        evolution: EvolutionConfig {
            dt: 2e-3,
            steps: 1000,
            scheme: Scheme::CrankNicolson,
            snapshot_stride: 10,
        },
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "free_packet_evolve",
            description: "1D free Gaussian packet, 1000 Crank-Nicolson steps on a periodic grid",
            reference: "spread law sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2); unitary norm",
            config: wrap("free_packet_evolve", Scenario::Evolve(free_packet_evolve())),
        },
        CatalogEntry {
            name: "free_packet_trajectories",
            description: "32 quantile-seeded trajectories through the spreading packet",
            reference: "trajectory law x(t) = x(0) sqrt(1 + (hbar t / 2 m sigma0^2)^2)",
            config: wrap(
                "free_packet_trajectories",
                Scenario::Trajectories(TrajectoriesScenario {
                    evolve: free_packet_evolve(),
                    seeds: 32,
                    seed_mode: SeedMode::Quantile,
                }),
            ),
        },
        CatalogEntry {
            name: "harmonic_ground_state",
            description: "stationary trap eigenstate held for 1000 steps",
            reference: "eigenstate density is static; action balance closes with C0 = hbar omega / 2",
            config: wrap(
                "harmonic_ground_state",
                Scenario::Evolve(EvolveScenario {
                    constants: PhysicalConstants::default(),
                    grid: GridSpec {
                        extents: vec![[-10.0, 10.0]],
                        n: vec![512],
                        boundary: Boundary::Reflecting,
                    },
                    initial: InitialState::HarmonicGroundState { omega_trap: 1.0 },
                    potential: PotentialSpec::Harmonic { omega_trap: 1.0 },
                    evolution: EvolutionConfig {
                        dt: 1e-3,
                        steps: 1000,
                        scheme: Scheme::CrankNicolson,
                        snapshot_stride: 100,
                    },
                }),
            ),
        },
        CatalogEntry {
            name: "double_slit",
            description: "2D packet through a double slit; fringes on the far side",
            reference: "two-slit interference of the guided density (at least five fringes fit)",
            config: wrap(
                "double_slit",
                Scenario::Evolve(EvolveScenario {
                    constants: PhysicalConstants::default(),
                    grid: GridSpec {
                        extents: vec![[-12.0, 12.0], [-8.0, 8.0]],
                        n: vec![128, 96],
                        boundary: Boundary::Periodic,
                    },
                    initial: InitialState::GaussianPacket {
                        center: vec![-6.0, 0.0],
                        sigma0: 1.2,
                        k0: vec![3.0, 0.0],
                    },
                    potential: PotentialSpec::DoubleSlit {
                        height: 40.0,
                        slit_width: 0.8,
                        slit_separation: 2.4,
                        thickness: 0.6,
                    },
                    evolution: EvolutionConfig {
                        dt: 2e-3,
                        steps: 1500,
                        scheme: Scheme::CrankNicolson,
                        snapshot_stride: 300,
                    },
                }),
            ),
        },
        CatalogEntry {
            name: "vortex_decay_constant",
            description: "radial vorticity diffusion under constant viscosity until Sigma doubles",
            reference: "self-similar profile omega = Gamma/(4 Sigma) exp(-r^2/4 Sigma), Sigma = nu t + sigma^2",
            config: wrap(
                "vortex_decay_constant",
                Scenario::Vortex(VortexScenario {
                    model: ViscosityModel {
                        kind: ViscosityKind::Constant { nu0: 0.05 },
                        sigma: 1.0,
                    },
                    gamma: 1.0,
                    r_max: 20.0,
                    n_r: 512,
                    run: VortexRun::Decay {
                        dt: 0.01,
                        steps: 2000,
                        snapshot_stride: 200,
                    },
                }),
            ),
        },
        CatalogEntry {
            name: "vortex_cosine_permanence",
            description: "zero-mean cosine viscosity returns the vortex after one period",
            reference: "Sigma periodicity: Sigma(t) = (nu0/Omega) sin(Omega t) + sigma^2; core radius r0 = 2.24181 sqrt(Sigma)",
            config: wrap(
                "vortex_cosine_permanence",
                Scenario::Vortex(VortexScenario {
                    model: ViscosityModel {
                        kind: ViscosityKind::Cosine { nu0: 0.5, omega: 1.0 },
                        sigma: 1.0,
                    },
                    gamma: 1.0,
                    r_max: 20.0,
                    // coarse radial grid: the contraction half-cycle runs the
                    // diffusion backwards and fine grids amplify round-off
                    n_r: 48,
                    run: VortexRun::Decay {
                        dt: 2.0 * std::f64::consts::PI / 4096.0,
                        steps: 4096,
                        snapshot_stride: 256,
                    },
                }),
            ),
        },
        CatalogEntry {
            name: "vortex_ou_ensemble",
            description: "64-member Ornstein-Uhlenbeck viscosity ensemble, time-averaged profile",
            reference: "zero-mean fluctuations: ensemble mean tracks omega = Gamma/(4 sigma^2) exp(-r^2/4 sigma^2)",
            config: wrap(
                "vortex_ou_ensemble",
                Scenario::Vortex(VortexScenario {
                    model: ViscosityModel {
                        kind: ViscosityKind::OuNoise {
                            amplitude: 0.02,
                            correlation_time: 0.2,
                            rng_seed: 2024,
                        },
                        sigma: 1.0,
                    },
                    gamma: 1.0,
                    r_max: 5.0,
                    n_r: 32,
                    run: VortexRun::Average {
                        horizon: 20.0,
                        samples: 2000,
                        ensemble: 64,
                    },
                }),
            ),
        },
        CatalogEntry {
            name: "torus_spindle_sweep",
            description: "torus-to-spindle panel (tube radius 2): meshes, measures, classification",
            reference: "V = 2 pi^2 b a^2, S = 4 pi^2 b a; panel radii b = 3, 2, 1.5, 1, 0.5, 0.01; double coating 8 pi a^2 at b = 0",
            config: wrap(
                "torus_spindle_sweep",
                Scenario::Torus(TorusScenario {
                    tube_radius: 2.0,
                    sweep_b: vec![3.0, 2.0, 1.5, 1.0, 0.5, 0.01],
                    ring_b: vec![4.0, 3.0, 2.0, 1.0, 0.001],
                    transport_b: 0.001,
                    n_theta: 128,
                    n_phi: 128,
                    ring_samples_per_turn: 256,
                    transport_samples: 10_000,
                }),
            ),
        },
        CatalogEntry {
            name: "torus_double_cover",
            description: "two-turn helicoidal ring on a near-degenerate sphere with transport trace",
            reference: "720-degree closure: transported direction dot is -1 after one revolution, +1 after two",
            config: wrap(
                "torus_double_cover",
                Scenario::Torus(TorusScenario {
                    tube_radius: 2.0,
                    sweep_b: vec![0.001],
                    ring_b: vec![0.001],
                    transport_b: 0.001,
                    n_theta: 64,
                    n_phi: 64,
                    ring_samples_per_turn: 512,
                    transport_samples: 10_000,
                }),
            ),
        },
        CatalogEntry {
            name: "flow_scene_symmetric",
            description: "background flow split around a circulation-free cylinder",
            reference: "stagnation points at (+-R, 0); stream function constant along streamlines",
            config: wrap(
                "flow_scene_symmetric",
                Scenario::FlowScene(FlowSceneScenario {
                    scene: VortexSceneSpec {
                        u_inf: 1.0,
                        cylinder_radius: 1.0,
                        circulation: 0.0,
                        dipole: true,
                        domain: [[-8.0, 8.0], [-6.0, 6.0]],
                    },
                    n_lines: 21,
                }),
            ),
        },
        CatalogEntry {
            name: "flow_scene_rotating",
            description: "streamlines deflected around a rotating vortex core in a background flow",
            reference: "uniform flow + doublet + point vortex; paths bend around the core without entering it",
            config: wrap(
                "flow_scene_rotating",
                Scenario::FlowScene(FlowSceneScenario {
                    scene: VortexSceneSpec {
                        u_inf: 1.0,
                        cylinder_radius: 1.0,
                        circulation: 2.0,
                        dipole: true,
                        domain: [[-8.0, 8.0], [-6.0, 6.0]],
                    },
                    n_lines: 21,
                }),
            ),
        },
    ]
}

pub fn find(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_parses() {
        let entries = catalog();
        assert!(entries.len() >= 8, "catalog has {} entries", entries.len());
        for e in &entries {
            assert!(!e.description.is_empty());
            assert!(!e.reference.is_empty(), "{} lacks a reference", e.name);
            // every entry round-trips through the strict parser
            let text = serde_json::to_string_pretty(&e.config).unwrap();
            let back = ScenarioConfig::from_str(&text).unwrap();
            assert_eq!(back, e.config, "{}", e.name);
            e.config.validate().unwrap();
        }
        // all five scenario kinds are represented
        let kinds: std::collections::BTreeSet<&str> =
            entries.iter().map(|e| e.config.scenario.kind_name()).collect();
        assert_eq!(kinds.len(), 5);
    }
}
