//! Solvers for packing item types into the fewest identical containers,
//! optionally under vertical stability and type separation constraints.

pub mod constructive;
pub mod dsl;
pub mod geometry;
pub mod harness;
pub mod instance;
pub mod setpart;
