pub mod error;
pub mod fermion;
pub mod ising_map;
pub mod ising_solver;
pub mod lattice;
pub mod linalg;
pub mod pauli;
pub mod perturbation;
pub mod runner;
pub mod sector;
pub mod toric;

pub use error::{Error, Result};
