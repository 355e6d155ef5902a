//! Dataset distance engine.
//!
//! Computes raw-space and latent-space distances between datasets of real
//! feature vectors, and correlates those distances with how well a model
//! fitted on one dataset transfers to another.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and thread-parallel matrix assembly live in the `dsetdist`
//! crate.
//!
//! ## Layout
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`dataset`] | [`Dataset`], [`DatasetGroup`], pooled standardization |
//! | [`histogram`] | joint per-feature histograms with shared edges |
//! | [`geometric`] | pairwise / centroid / cluster Euclidean, cosine, k-means |
//! | [`statistical`] | KL, JS, Hellinger, TV, Wasserstein-1, KS, energy, MMD |
//! | [`subspace`] | principal angles, Grassmann / chordal / Asimov |
//! | [`embedding`] | joint PCA and neighbor-graph embeddings |
//! | [`supervised`] | label-aware distance, Proxy-A distance |
//! | [`synth`] | synthetic multipath channel scenes |
//! | [`transfer`] | proxy tasks, distance / performance matrices, correlation |

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod embedding;
mod error;
pub mod geometric;
pub mod histogram;
pub mod linalg;
pub(crate) mod math;
pub mod statistical;
pub mod subspace;
pub mod supervised;
pub mod synth;
pub mod transfer;

pub use dataset::{complex_to_real, standardize, Dataset, DatasetGroup, Label};
pub use error::{Error, Result};
pub use linalg::Matrix;
