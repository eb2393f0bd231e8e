//! Chern connections, flatness tests and singularities of 3-webs given by
//! cubic binary fields, implicit cubic ODEs and associativity potentials.

mod error;

pub mod chern;
pub mod cli;
pub mod cubic;
pub mod frobenius;
pub mod jets;
pub mod linalg;
pub mod ode;
pub mod singular;
pub mod webgeo;

pub use error::{Error, Result};
