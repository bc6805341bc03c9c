//! Exact decomposition of tensor powers of reductive group representations,
//! together with Gaussian local-limit approximations of the growth of the
//! number of irreducible summands.

pub mod cartan;
pub mod charring;
pub mod lattice;
pub mod tensor_growth;
pub mod gaussian;
