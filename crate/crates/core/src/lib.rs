pub mod cli;
pub mod congruence;
pub mod corpus;
pub mod cyclotomic;
pub mod error;
pub mod fixtures;
pub mod intmat;
pub mod lattice;
pub mod metaplectic;
pub mod weil;
pub mod eisenstein;
pub mod fourier;
pub mod rationalize;
