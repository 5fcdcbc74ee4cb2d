//! The two-player benchmark: one war of attrition in isolation.
//!
//! The weaker player (lower prior) concedes with an atom at time 0 that
//! equalizes the post-atom posteriors; afterwards both sides concede at the
//! constant benchmark hazard until the common terminal time at which both are
//! believed committed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::GameParams;
use crate::profile::ConcessionProfile;

/// `r(1-alpha)/(2alpha-1)`, the post-atom hazard of both players.
pub fn benchmark_hazard(params: &GameParams) -> f64 {
    params.benchmark_hazard()
}

/// Probability that the `z_weak` player concedes immediately to the `z_strong`
/// player: `max(1 - z_weak/z_strong, 0)`.
pub fn concession_atom(z_strong: f64, z_weak: f64) -> f64 {
    (1.0 - z_weak / z_strong).max(0.0)
}

/// Time-0 payoff of the player holding reputation `z_self` against `z_opp`
/// over surplus `pi`: `pi * ((1-alpha) + (2alpha-1) * atom_received)`.
pub fn benchmark_payoff(pi: f64, z_self: f64, z_opp: f64, params: &GameParams) -> f64 {
    pi * ((1.0 - params.alpha) + (2.0 * params.alpha - 1.0) * concession_atom(z_self, z_opp))
}

/// Continuation value of the two-player game started at arbitrary posteriors.
/// Identical to [`benchmark_payoff`]; exposed separately because the
/// multi-player solvers consume it as a continuation value.
pub fn continuation_value(pi: f64, z_self: f64, z_opp: f64, params: &GameParams) -> f64 {
    benchmark_payoff(pi, z_self, z_opp, params)
}

/// Which of the two inputs of [`solve`] bears the time-0 atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

/// Solved two-player equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilateralEq {
    /// Which player concedes with positive probability at time 0, if any.
    pub weak: Option<Side>,
    /// Size of that atom (0 when `weak` is `None`).
    pub atom_weak: f64,
    /// Common post-atom hazard.
    pub hazard: f64,
    /// Common terminal time at which both posteriors reach 1.
    pub terminal: f64,
    /// Time-0 rational payoffs of the two input players, in input order.
    pub payoff_i: f64,
    pub payoff_j: f64,
    pub pi: f64,
    pub z_i: f64,
    pub z_j: f64,
}

impl BilateralEq {
    pub fn profile_i(&self) -> ConcessionProfile {
        let atom = if self.weak == Some(Side::First) {
            self.atom_weak
        } else {
            0.0
        };
        ConcessionProfile::constant(atom, self.hazard, self.terminal)
            .expect("solver output forms a valid profile")
    }

    pub fn profile_j(&self) -> ConcessionProfile {
        let atom = if self.weak == Some(Side::Second) {
            self.atom_weak
        } else {
            0.0
        };
        ConcessionProfile::constant(atom, self.hazard, self.terminal)
            .expect("solver output forms a valid profile")
    }
}

/// Solves the two-player war over surplus `pi` with priors `(z_i, z_j)`.
pub fn solve(pi: f64, z_i: f64, z_j: f64, params: &GameParams) -> Result<BilateralEq> {
    params.validate()?;
    if !(pi > 0.0) {
        return Err(Error::OutOfRange {
            field: "pi",
            value: pi,
            expected: "pi > 0",
        });
    }
    for (field, z) in [("z_i", z_i), ("z_j", z_j)] {
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::OutOfRange {
                field,
                value: z,
                expected: "0 < z < 1",
            });
        }
    }
    let hazard = params.benchmark_hazard();
    let tie = (z_i - z_j).abs() <= crate::params::PRIOR_TIE_TOL;
    // At most one player concedes with positive probability at time 0.
    let (weak, atom_weak, z_top) = if tie {
        (None, 0.0, z_i.max(z_j))
    } else if z_i < z_j {
        (Some(Side::First), concession_atom(z_j, z_i), z_j)
    } else {
        (Some(Side::Second), concession_atom(z_i, z_j), z_i)
    };
    // Post-atom posteriors coincide at z_top and reach 1 together.
    let terminal = -z_top.ln() / hazard;
    Ok(BilateralEq {
        weak,
        atom_weak,
        hazard,
        terminal,
        payoff_i: benchmark_payoff(pi, z_i, z_j, params),
        payoff_j: benchmark_payoff(pi, z_j, z_i, params),
        pi,
        z_i,
        z_j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PosteriorPath;

    fn params() -> GameParams {
        GameParams::new(1.0, 0.7, 2.0, 1.0).unwrap()
    }

    #[test]
    fn hazard_formula() {
        assert!((benchmark_hazard(&params()) - 0.75).abs() < 1e-15);
        let p2 = GameParams::new(2.0, 0.7, 2.0, 1.0).unwrap();
        assert!((benchmark_hazard(&p2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn atom_examples() {
        assert!((concession_atom(0.6, 0.2) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(concession_atom(0.3, 0.3), 0.0);
        assert!((concession_atom(0.23, 0.2) - (1.0 - 0.2 / 0.23)).abs() < 1e-15);
    }

    #[test]
    fn payoff_reference_values() {
        let p = params();
        assert!((benchmark_payoff(1.0, 0.5, 0.23, &p) - 0.516).abs() < 1e-12);
        assert!((benchmark_payoff(1.0, 0.2, 0.23, &p) - 0.300).abs() < 1e-12);
        // weak or equal player earns (1 - alpha) * pi
        assert!((benchmark_payoff(2.0, 0.4, 0.4, &p) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn solve_strong_first_player() {
        let eq = solve(2.0, 0.6, 0.2, &params()).unwrap();
        assert_eq!(eq.weak, Some(Side::Second));
        assert!((eq.atom_weak - 2.0 / 3.0).abs() < 1e-15);
        assert!((eq.terminal - 0.681).abs() < 1e-3);
    }

    #[test]
    fn solve_weak_second_player() {
        let eq = solve(1.0, 0.2, 0.1, &params()).unwrap();
        assert_eq!(eq.weak, Some(Side::Second));
        assert!((eq.atom_weak - 0.5).abs() < 1e-15);
        assert!((eq.terminal - 2.145).abs() < 1e-3);
    }

    #[test]
    fn solve_symmetric_has_no_atom() {
        let eq = solve(1.0, 0.3, 0.3, &params()).unwrap();
        assert_eq!(eq.weak, None);
        assert_eq!(eq.atom_weak, 0.0);
        assert!((eq.terminal - (-(0.3f64.ln()) / 0.75)).abs() < 1e-12);
    }

    #[test]
    fn post_atom_posteriors_align_and_exhaust() {
        let eq = solve(2.0, 0.6, 0.2, &params()).unwrap();
        let pi_path = PosteriorPath::new(0.6, eq.profile_i());
        let pj_path = PosteriorPath::new(0.2, eq.profile_j());
        let zi0 = pi_path.posterior_at(0.0).unwrap();
        let zj0 = pj_path.posterior_at(0.0).unwrap();
        assert!((zi0 - zj0).abs() < 1e-12);
        let zit = pi_path.posterior_at(eq.terminal).unwrap();
        let zjt = pj_path.posterior_at(eq.terminal).unwrap();
        assert!((zit - 1.0).abs() < 1e-9);
        assert!((zjt - 1.0).abs() < 1e-9);
        // rational mass exhausted: F(T) = 1 - prior
        assert!((eq.profile_i().cdf_at(eq.terminal) - (1.0 - 0.6)).abs() < 1e-9);
        assert!((eq.profile_j().cdf_at(eq.terminal) - (1.0 - 0.2)).abs() < 1e-9);
    }

    #[test]
    fn weak_player_earns_exactly_loser_share() {
        let p = params();
        let eq = solve(2.0, 0.6, 0.2, &p).unwrap();
        assert_eq!(eq.payoff_j, (1.0 - p.alpha) * 2.0);
        assert!(eq.payoff_i > (1.0 - p.alpha) * 2.0);
    }

    #[test]
    fn atom_is_scale_invariant() {
        let a = concession_atom(0.6, 0.2);
        let b = concession_atom(0.3, 0.1);
        assert!((a - b).abs() < 1e-15);
    }
}
