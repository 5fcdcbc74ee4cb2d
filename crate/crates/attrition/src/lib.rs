//! Equilibrium solvers, verifiers, and a Monte Carlo simulator for
//! reputational wars of attrition on star networks.
//!
//! A central player bargains simultaneously with peripheral opponents; each
//! player may be a commitment type who never concedes, and a concession
//! anywhere is informative everywhere because the center's type is global.
//! The crate computes the closed-form equilibria of the two- and three-player
//! games, the sequential and partial-observability variants, and the
//! numerically integrated four-player star, then validates each equilibrium
//! with deviation-payoff checks and seeded Monte Carlo simulation.
//!
//! All solver outputs are plain data (atoms, hazard schedules, phase times,
//! payoffs); every type is immutable after construction and safe to share
//! across threads.

pub mod bilateral;
pub mod error;
pub mod interp;
pub mod params;
pub mod partial_obs;
pub mod profile;
pub mod quad;
pub mod sequential;
pub mod sim;
pub mod star4;
pub mod trilateral;
pub mod verify;

pub use error::{Error, Result};
pub use params::{validate, GameParams, Player, Priors};
pub use profile::{ConcessionProfile, HazardSegment, PosteriorPath};
