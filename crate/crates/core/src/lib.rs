//! Engine-free reconstruction and simulation of defected road scenes.
//!
//! The crate is organized as a pipeline of pure modules:
//!
//! - [`geometry`] — the geometric kernel: ray/triangle intersection,
//!   (constrained) Delaunay triangulation, boundary-loop extraction, robust
//!   plane fitting, voxel downsampling and 2D nearest-neighbor height queries.
//! - [`model`] — hierarchical road model creation: coarse road-surface
//!   reconstruction from point clouds and fine defect reconstruction from
//!   road-relative elevation maps, compiled into a model library.
//! - [`twin`] — scene generation: places defect models into planar road
//!   segments, cuts and re-stitches the meshes, restores elevation and
//!   disassembles the result into per-asset groups.
//! - [`planning`] — wheel-constrained 2D path planning over rasterized
//!   scenes (A*, RRT*, state lattice, hybrid A*) plus path metrics.
//! - [`vibration`] — constant-speed traversal simulation over wheel-track
//!   height profiles and the vibration-degree reduction.
//!
//! Everything here is deterministic: identical inputs (and seeds, where an
//! operation is randomized) produce identical outputs. The crate is
//! `no_std`-compatible (`alloc` required); IO and file formats live in the
//! companion `roadtwin-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod geometry;
pub mod math;
pub mod model;
pub mod planning;
pub mod rng;
pub mod twin;
pub mod vibration;
