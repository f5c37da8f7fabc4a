//! Physical applications built on the qubit and GKSL layers.

pub mod dirac;
pub mod instability;
pub mod jaynes_cummings;
pub mod neutrino;
