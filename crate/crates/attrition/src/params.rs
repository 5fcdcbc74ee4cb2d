//! Game primitives: discounting, surplus shares, and prior commitment
//! probabilities, together with their validity checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance under which two priors are treated as tied.
///
/// Case dispatch in the solvers is discontinuous on measure-zero sets; a fixed
/// documented tolerance makes the chosen branch reproducible.
pub const PRIOR_TIE_TOL: f64 = 1e-12;

/// The three players of the baseline game. `C` is the center and negotiates
/// with both peripherals; `A` and `B` each negotiate only with `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
    C,
}

impl Player {
    pub const ALL: [Player; 3] = [Player::A, Player::B, Player::C];
    pub const PERIPHERALS: [Player; 2] = [Player::A, Player::B];

    pub fn index(self) -> usize {
        match self {
            Player::A => 0,
            Player::B => 1,
            Player::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Player {
        match i {
            0 => Player::A,
            1 => Player::B,
            2 => Player::C,
            _ => panic!("player index out of range: {i}"),
        }
    }

    /// The other peripheral, for `A` or `B`.
    pub fn other_peripheral(self) -> Player {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
            Player::C => panic!("the center has no counterpart peripheral"),
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::A => write!(f, "A"),
            Player::B => write!(f, "B"),
            Player::C => write!(f, "C"),
        }
    }
}

/// Time-invariant primitives of the bargaining environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Common discount rate per unit time, `> 0`.
    pub r: f64,
    /// Winner's share of a pie, in `(1/2, 1)`.
    pub alpha: f64,
    /// Surplus of the A-C negotiation, `> 0`.
    pub pi_ac: f64,
    /// Surplus of the B-C negotiation, `> 0`.
    pub pi_bc: f64,
}

impl GameParams {
    pub fn new(r: f64, alpha: f64, pi_ac: f64, pi_bc: f64) -> Result<Self> {
        let p = GameParams {
            r,
            alpha,
            pi_ac,
            pi_bc,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::OutOfRange {
                field: "r",
                value: self.r,
                expected: "r > 0",
            });
        }
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            return Err(Error::OutOfRange {
                field: "alpha",
                value: self.alpha,
                expected: "1/2 < alpha < 1",
            });
        }
        if !(self.pi_ac > 0.0) || !self.pi_ac.is_finite() {
            return Err(Error::OutOfRange {
                field: "pi_ac",
                value: self.pi_ac,
                expected: "pi_ac > 0",
            });
        }
        if !(self.pi_bc > 0.0) || !self.pi_bc.is_finite() {
            return Err(Error::OutOfRange {
                field: "pi_bc",
                value: self.pi_bc,
                expected: "pi_bc > 0",
            });
        }
        Ok(())
    }

    /// The constant hazard `r(1-alpha)/(2alpha-1)` that leaves the opponent of
    /// a bilateral war indifferent between conceding and waiting.
    pub fn benchmark_hazard(&self) -> f64 {
        self.r * (1.0 - self.alpha) / (2.0 * self.alpha - 1.0)
    }

    /// Surplus of the negotiation between `peripheral` and the center.
    pub fn pie(&self, peripheral: Player) -> f64 {
        match peripheral {
            Player::A => self.pi_ac,
            Player::B => self.pi_bc,
            Player::C => panic!("the center has no single pie"),
        }
    }
}

/// Prior commitment probabilities, each strictly inside `(0, 1)`.
///
/// No ordering is assumed; solvers relabel internally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    pub z_a: f64,
    pub z_b: f64,
    pub z_c: f64,
}

impl Priors {
    pub fn new(z_a: f64, z_b: f64, z_c: f64) -> Result<Self> {
        let p = Priors { z_a, z_b, z_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [("z_a", self.z_a), ("z_b", self.z_b), ("z_c", self.z_c)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::OutOfRange {
                    field,
                    value,
                    expected: "0 < z < 1",
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, player: Player) -> f64 {
        match player {
            Player::A => self.z_a,
            Player::B => self.z_b,
            Player::C => self.z_c,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.z_a, self.z_b, self.z_c]
    }
}

/// Checks every type invariant of `params` and `priors` at once.
pub fn validate(params: &GameParams, priors: &Priors) -> Result<()> {
    params.validate()?;
    priors.validate()
}
