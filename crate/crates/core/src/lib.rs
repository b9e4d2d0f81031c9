//! Cocycle-deformed products on torus-graded algebras.
//!
//! Elements are finitely supported maps from the character lattice `Z^n` to
//! fiber values (complex scalars or `k x k` complex matrices). A unimodular
//! bicharacter `σ(p, q) = exp(-πi γ(p, q))` built from a skew form `γ`
//! deforms the convolution product into
//!
//! ```text
//! (a ⋆ b)_χ = Σ_{χ₁ + χ₂ = χ} a_{χ₁} b_{χ₂} σ(χ₁, χ₂)
//! ```
//!
//! Around that product the crate provides:
//!
//! * [`cocycle`]: skew forms, bicharacters and base-indexed families of them,
//! * [`algebra`]: the graded algebra at one fiber (products, involution,
//!   Poisson bracket, semiclassical diagnostics),
//! * [`field`]: sections over a finite base grid with base-dependent cocycles,
//! * [`rep`]: truncated regular representations, norms, spectra and the
//!   rational-flux Bloch oracle for Harper spectra,
//! * [`hilbmod`]: graded Hilbert modules and their deformed action,
//! * [`monoidal`]: twist maps, braidings and deformed products/actions on
//!   graded vectors,
//! * [`verify`]: seeded verification suites over all of the above.

pub mod algebra;
pub mod cocycle;
pub mod error;
pub mod field;
pub mod hilbmod;
pub mod index;
pub mod json;
pub mod monoidal;
pub mod random;
pub mod rep;
pub mod verify;

pub use algebra::{FiberKind, FiberValue, GradedElement};
pub use cocycle::{Cocycle, CocycleFamily, SkewForm};
pub use error::{Error, Result};
pub use field::{BaseGrid, FieldElement, GridPoint};
pub use hilbmod::ModuleElement;
pub use index::MultiIndex;
pub use monoidal::{GradedTensor, GradedVector, TwistJ};
pub use num_complex::Complex64;
pub use rep::{RepMatrix, Spectrum, TruncationBox};

/// Coefficients whose norm falls below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
