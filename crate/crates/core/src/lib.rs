//! Operator-space fragmentation, effective generators and spectral analysis
//! for Pauli-Lindblad open quantum systems.

pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod fragments;
pub mod frustration;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod pauli;
pub mod spectra;
pub mod symplectic;
pub mod tfim;

pub use model::{BuiltinKind, LindbladModel, ModelError, TildeModel};
pub use pauli::{Pauli, PauliError, PauliString, Phase};
pub use symplectic::SymplecticMap;
