//! Monte Carlo k-eigenvalue neutron transport for reflected pincells.
pub mod cli;
pub mod geometry;
pub mod nucleardata;
pub mod rng;
pub mod sorting;
pub mod tally;
pub mod transport;
