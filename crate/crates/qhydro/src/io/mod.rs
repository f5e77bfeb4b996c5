//! Configuration, CSV/OBJ export, run manifests, and the scenario runner.

pub mod catalog;
pub mod config;
pub mod csv;
pub mod manifest;
pub mod runner;

pub use catalog::{catalog, find, CatalogEntry};
pub use config::{Scenario, ScenarioConfig};
pub use manifest::{InvariantResult, RunManifest};
pub use runner::{check, evaluate_invariants, run};
