//! Numerical workbench for information-theoretic limits on quantum
//! homomorphic encryption (QHE).
//!
//! The crate is organised bottom-up:
//!
//! * [`qmat`] – dense complex linear algebra for small multi-qubit systems
//!   (density matrices, channels, POVMs, purification, Uhlmann alignment).
//! * [`bounds`] – entropies, Holevo χ, classical-quantum mutual information
//!   and every closed-form bound (Nayak, subset, QHE communication, counting).
//! * [`qrac`] – quantum random access codes: construction, Helstrom decoders,
//!   seesaw optimisation and the entropy-chain tracer.
//! * [`qhe`] – symmetric-key QHE schemes modelled as explicit channels, with
//!   correctness and trace-distance security audits.
//! * [`reduction`] – extraction of a random access code from a QHE scheme and
//!   verification of the resulting communication bound.
//!
//! Data-parallel loops (multi-seed optimisation, property sweeps, pairwise
//! audits) go through [`par`], which uses rayon when the `parallel` feature is
//! enabled and plain iterators otherwise.

pub mod bits;
pub mod bounds;
pub mod error;
pub mod par;
pub mod qhe;
pub mod qmat;
pub mod qrac;
pub mod reduction;
pub mod repr;

pub use error::{Error, Result};
