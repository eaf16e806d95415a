//! robinlab: a numerical laboratory for homogenised Robin spectra on
//! perforated 2-D flat domains.
//!
//! The pipeline: build a maximal ε-separated site set and its Voronoi
//! tessellation, classify cells against a potential, remove signed-radius
//! disks, mesh the perforated domain, assemble P1 Robin/Schrödinger forms,
//! and solve the generalized eigenproblem with inertia-certified shifts.
//! Sweeps over ε reproduce the spectral, measure and flexibility limits as
//! finite experiments.

pub mod geometry;
pub mod mesher;
pub mod measures;
