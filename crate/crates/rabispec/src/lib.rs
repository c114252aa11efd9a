//! Steady-state transmission spectra of a probed flux qubit that is
//! ultrastrongly coupled to a damped LC resonator and driven by a strong
//! microwave field.
//!
//! The resonator plus its Ohmic environment are mapped onto a single
//! structured bath acting directly on the qubit, so the whole system becomes
//! a driven two-state system coupled to two baths: the original Ohmic one and
//! the effective peaked one.  The qubit response to a weak probe is then
//! obtained from the drive-averaged kernels of the population-difference
//! master equation, nonperturbatively in the system-bath coupling.
//!
//! The crate provides
//! * analytic doublet spectra and quasienergies of the closed model
//!   ([`vanvleck`]), validated against exact diagonalization ([`ed`]),
//! * bath correlation functions in closed form and by quadrature ([`bath`]),
//! * the steady-state linear susceptibility ([`niba`]),
//! * parallel parameter sweeps producing calibrated `|T|^2` grids
//!   ([`sweep`]), and
//! * a CLI front end (`rabispec`) with figure-style presets ([`cli`]).
//!
//! Units: `hbar = k_B = 1`; every frequency (including temperatures and bias
//! amplitudes) is expressed in units of the bare qubit splitting.

pub mod bath;
pub mod cli;
pub mod config;
pub mod ed;
mod error;
pub mod niba;
pub mod params;
pub mod quad;
pub mod specfun;
pub mod sweep;
pub mod vanvleck;

pub use error::{Error, Result};
