//! Exact computations in the Hecke algebra of the symmetric group.
//!
//! The crate works with the algebra H_n(q) generated by g_1 ... g_(n-1)
//! subject to the quadratic relation g^2 = (q-1) g + q, the braid relation,
//! and commutation of distant generators. Everything is computed exactly
//! over the rationals in the formal parameter `q`.
//!
//! The modules build on each other:
//!
//! - [`laurent`]: exact Laurent polynomials, rational functions, and
//!   truncated series in `d` where `q = e^d`.
//! - [`diagrams`]: partitions, box contents, growth chains, and the spectrum
//!   of the fundamental central invariant.
//! - [`murphy`]: traces of products of the commuting family of Murphy
//!   operators, computed by branching recursions on diagrams.
//! - [`characters`]: the character pipeline that reduces arbitrary class
//!   words to Murphy traces, plus full character tables and spectral
//!   projection coefficients.
//! - [`oracle`]: explicit matrix representations used to certify every
//!   identity the faster pipeline relies on.
//! - [`casimir`]: the related one-variable invariant for the quantum group
//!   side, with an exact decoder from spectra back to diagrams.

pub mod casimir;
pub mod characters;
pub mod diagrams;
pub mod exec;
pub mod laurent;
pub mod murphy;
pub mod oracle;

pub use casimir::CasimirSpectrum;
pub use characters::{CharacterTable, GWord, SegmentShape};
pub use diagrams::Partition;
pub use laurent::{DeltaSeries, LaurentPoly, RationalFunction};
