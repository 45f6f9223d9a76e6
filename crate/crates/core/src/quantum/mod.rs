//! Two simulation backends for the protocol's quantum layer.
//!
//! The symbolic backend is exact for BB84-diagonal states and every
//! prepare/measure/Pauli/replace attack, and scales to thousands of qubits.
//! The dense backend carries full density matrices for up to 12 qubits and
//! supports arbitrary states, trace distance, fidelity, and Uhlmann
//! purifications.

pub mod dense;
pub mod symbolic;

pub use dense::DenseState;
pub use symbolic::{Bb84Register, CorruptOp};
