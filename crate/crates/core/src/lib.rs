//! Exact computation with systems of quadratic forms over finite fields,
//! the rings Z/p^k and the p-adic rationals.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: coefficient domains ([`field::FieldDesc`]), elements,
//!   exact dense matrices and the bit-packed F_2 fast path.
//! * [`quadform`]: quadratic forms and form systems in upper-triangular
//!   coefficient storage, polarization bilinear forms, variable and form
//!   changes, radicals and ranks.
//! * [`formlang`]: the `.qfs` text format (parse, canonical serialize).
//! * [`zerofinder`]: exhaustive and sampled common-zero search, exact
//!   zero counts, Chevalley-Warning checks.
//! * [`subspace`]: certified search for totally singular subspaces and
//!   empirical exploration of how large they must be.
//! * [`minimize`]: minimization of integral models at a prime, witness
//!   transforms and the improving/neutral/compliant classification.
//! * [`hensel`]: Newton lifting of nonsingular zeros and the end-to-end
//!   p-adic solver pipeline.
//! * [`oneform`]: single-form Q_p theory: diagonalization, Hilbert
//!   symbols, isotropy decisions, anisotropic witnesses.
//! * [`ffred`]: reduction of forms over K(T) to form systems over K.
//! * [`bounds`]: the bound calculus for `beta(r)` with derivation traces.

pub mod bounds;
pub mod ffred;
pub mod field;
pub mod formlang;
pub mod hensel;
pub mod minimize;
pub mod oneform;
pub mod quadform;
pub mod subspace;
pub mod zerofinder;

mod error;

pub use error::{Error, Result};

/// Deterministic RNG behind every seeded sampling path in the crate.
/// The same seed yields the same stream on every platform.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
