//! Energies, potentials, and perturbation expansions of the ball.
//!
//! Three routes to the same numbers live here and keep each other
//! honest: deterministic quadrature (the ball potential ψ and the exact
//! star-shaped energy difference), closed forms (dilations, same-ball
//! self-energies), and a seeded Monte Carlo estimator. Every energy
//! value is returned as an [`EnergyEstimate`] carrying its error and
//! provenance.

mod interaction;
mod mc;
mod potential;
mod star;

pub use interaction::ball_ball_interaction;
pub use mc::{mc_energy_set_vs_ball, mc_energy_star};
pub use potential::{
    default_scan_radii, psi, psi_prime_at_one, psi_prime_root_in_gamma, psi_sigma,
    psi_sigma_prime_at_one, radial_profile, RadialProfile,
};
pub use star::{
    asymmetry_star, delta_f, delta_j_star, g_sigma, h_sigma, ConstraintMode, StarPerturbation,
};

use serde::Serialize;

/// How an energy number was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
    ClosedForm,
}

/// An energy value with provenance: the error field is a quadrature
/// bound or a Monte Carlo standard error depending on the method.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyEstimate {
    pub value: f64,
    /// Error bound (quadrature) or standard error (Monte Carlo).
    pub error: f64,
    pub method: Method,
    /// Number of integrand evaluations or samples behind the value.
    pub count: u64,
    pub seed: Option<u64>,
}

impl EnergyEstimate {
    pub fn closed_form(value: f64) -> Self {
        EnergyEstimate {
            value,
            error: value.abs() * 1e-14,
            method: Method::ClosedForm,
            count: 0,
            seed: None,
        }
    }
}
