//! Quantum-hydrodynamics workbench.
//!
//! The library evolves wave fields, decomposes them into Madelung variables
//! (density, action, log-amplitude), integrates Bohmian trajectory bundles
//! through the resulting velocity fields, solves the radially symmetric
//! vorticity equation under fluctuating viscosity, and walks a parametric
//! torus through its spindle and double-cover degenerations. Every result
//! exports as plot-ready CSV with a JSON run manifest.
//!
//! Start with the runnable examples (`cargo run --example <name>`); each
//! one demonstrates a single capability end to end.

pub mod bohm;
pub mod constants;
pub mod error;
pub mod evolve;
pub mod field;
pub mod flow;
pub mod grid;
pub mod io;
pub mod madelung;
pub mod ops;
pub mod potential;
pub mod residual;
pub mod scene;
pub mod spectral;
pub mod states;
pub mod torus;
pub mod vortex;

pub use bohm::{integrate_bundle, sample_seeds, SeedMode, TrajectoryBundle};
pub use constants::PhysicalConstants;
pub use error::{QhError, Result};
pub use field::{ComplexField, ScalarField, VectorField};
pub use flow::{convective_identity_residual, helmholtz_decompose, velocity_from_wave, FlowField};
pub use evolve::{evolve, norm, Evolution, EvolutionConfig, Scheme};
pub use grid::{Boundary, Grid};
pub use potential::PotentialSpec;
pub use madelung::{
    pressure_terms, quantum_potential, quantum_potential_amplitude_form, recompose, to_polar,
    WaveField,
};
pub use scene::{streamlines_around_vortex, FlowScene, VortexSceneSpec};
pub use torus::{
    cross_section_regions, double_cover_rotation, helicoidal_ring, mesh_measures, mesh_torus,
    spindle_sweep, torus_measures, HelicoidalRing, SurfaceMesh, TorusRegime, TorusShape,
};
pub use vortex::{
    circulation_enclosed, core_radius, evolve_radial_vorticity, long_time_average_profile,
    omega_profile, sigma_accumulate, v_profile, ViscosityKind, ViscosityModel, VortexProfile,
};
pub use residual::{
    continuity_residual, hamilton_jacobi_residual, hamilton_jacobi_residual_from_pair,
    viscous_action_term, ContinuityResidual,
};
