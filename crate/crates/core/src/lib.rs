//! Bandlimited-waveform engineering toolkit: construct, analyze, propagate,
//! encode and recover superoscillatory and supergrowing scalar fields.

pub mod analysis;
pub mod construct;
pub mod error;
pub mod field;
pub mod grid;
pub mod holo;
pub mod io;
pub mod optimize;
pub mod propagate;
pub mod recover;
pub mod speckle;
pub mod spectrum;
pub mod util;

pub use error::{Error, Result};
pub use field::{BandDescriptor, BandShape, SampledField};
pub use grid::{Grid, Grid1D, Grid2D};
pub use spectrum::{forward_transform, inverse_transform, measured_bandlimit, Spectrum};
