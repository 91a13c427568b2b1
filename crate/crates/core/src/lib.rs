pub mod actions;
pub mod cli;
pub mod designer;
pub mod diophantine;
pub mod error;
pub mod fourier;
pub mod genfun;
pub mod io;
pub mod pde_sim;
pub mod potentials;
pub mod scalar;
pub mod spectral;
