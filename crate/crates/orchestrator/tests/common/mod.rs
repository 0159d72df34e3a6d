#![allow(dead_code)]

use tempfile::TempDir;
use tripwise_core::synth::world;
use tripwise_orchestrator::Project;

/// A fresh data directory over a synthetic world.
pub fn project(n_train: usize, n_validation: usize) -> (TempDir, Project) {
    let dir = tempfile::tempdir().unwrap();
    let w = world(21, n_train, n_validation);
    let p = Project::init(dir.path(), &w.bundle, &w.queries).unwrap();
    (dir, p)
}
