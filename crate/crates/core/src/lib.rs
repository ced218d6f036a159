pub mod complex;
pub mod covering;
pub mod error;
pub mod fixtures;
pub mod homology;
pub mod io;
pub mod operators;
pub mod perm;
pub mod random;
pub mod representation;
pub mod spectrum;

pub use complex::{Face, SimplicialComplex, WeightScheme};
pub use error::{Error, Result};
