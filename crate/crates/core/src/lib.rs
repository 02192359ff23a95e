//! Exact-arithmetic unitary similitude dual pairs over a quadratic extension
//! of the rationals, with a verifier for the metaplectic cocycle identities
//! attached to them.
//!
//! All group theory is carried out over Q and Q(delta) with no rounding; a
//! chosen odd prime enters only through local invariants (Hilbert symbols,
//! the quadratic character of the extension, Weil indices). See the crate
//! README for the layout and the `verify` binary for the CLI.

pub mod cocycle;
pub mod doubling;
pub mod error;
pub mod field;
pub mod local;
pub mod matrix;
pub mod mu8;
pub mod rational;
pub mod spaces;
pub mod splitgroup;
pub mod suites;
