//! File formats, reports, parallel matrix assembly and the `dsetdist`
//! command line tool, on top of [`dsetdist_core`].

pub mod bench;
pub mod cli;
pub mod config;
pub mod io;
pub mod parallel;
pub mod svg;

pub use dsetdist_core as core;
