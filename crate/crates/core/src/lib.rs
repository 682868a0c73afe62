//! Exact characters of principal subspaces of standard `sl(n+1)`-hat modules.
//!
//! Three independent routes compute the same multigraded dimension:
//! fermionic sums ([`fermionic`]), quasiparticle enumeration
//! ([`quasiparticle`]) and, at level one, a lattice Fock-space realization
//! ([`lattice`]). The [`envelope`] module checks the enveloping-algebra
//! identities behind the presentations at finite truncation.

pub mod envelope;
pub mod error;
pub mod fermionic;
pub mod lattice;
pub mod lie;
pub mod quadratic;
pub mod quasiparticle;
pub mod series;

pub use error::{Error, Result};
pub use lie::{DominantAffineWeight, PositiveRoot, RootSystemA, Weight};
pub use series::{Comparison, TruncatedSeries};
