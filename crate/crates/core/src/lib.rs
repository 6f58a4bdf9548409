//! Reaction-diffusion systems for populations that switch between a slow and a
//! fast diffusing state.

pub mod analysis;
pub mod banded;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod mesh;
pub mod model;
pub mod output;
pub mod roots;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use mesh::{build_grid, Field, Grid};
pub use model::{CoefficientSpec, ModelParams, SystemKind};
