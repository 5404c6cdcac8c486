//! Fermion-to-qubit compilation through dynamically reordered Jordan-Wigner
//! encodings.
//!
//! The crate synthesizes fermionic permutation circuits (interleaves,
//! reflections, deformations, mergesort layers), Majorana permutation
//! gadgets and fermionic Fourier transforms, and checks every output with a
//! symbolic Pauli propagator and a dense Fock-space oracle.

pub mod circuit_ir;
pub mod f2core;
pub mod ffft;
pub mod jw;
pub mod majorana;
pub mod perm;
pub mod syk;
pub mod verify;

pub use f2core::{conjugate_cz, kron, lower_triangular_ones, mat_mul, min_weight_row_solve};
pub use f2core::{CnotMatrix, CzSpec, F2Error, F2Matrix, F2RowVector};
