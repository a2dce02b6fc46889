//! Exact Fourier analysis of Boolean functions, the block-character
//! constructions behind low-degree testing lower bounds, the DISJ reduction,
//! a query-to-communication protocol simulator, and a minimax experiment.

pub mod boolfn;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod io;
pub mod oracle;
pub mod protocol;
pub mod reduction;
pub mod verify;
pub mod yao;

pub use boolfn::{BooleanFunction, FourierSpectrum};
pub use constructions::CharacterFamily;
pub use error::{Error, Result};
pub use exact::ExactFraction;
