//! Brillouin light scattering between optical whispering-gallery modes and
//! Walker magnetostatic modes of a ferromagnetic sphere, organised around
//! orbital-angular-momentum bookkeeping.

pub mod brillouin;
pub mod config;
pub mod error;
pub mod io;
pub mod specfun;
pub mod spectra;
pub mod walker;
pub mod wgm;

pub use error::{Error, Result};
