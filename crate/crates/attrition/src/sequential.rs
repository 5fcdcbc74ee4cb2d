//! Sequential negotiations: the center bargains with one peripheral first and
//! with the other only after the first dispute resolves.
//!
//! Stage 2 is the plain bilateral benchmark at the then-current posteriors, so
//! it never needs its own solver. The prospect of stage 2 enters the center's
//! stage-1 indifference condition, which forces the first peripheral to
//! concede at a rate strictly above the benchmark hazard. Belief alignment at
//! the common terminal time then pins down a unique time-0 atom, possibly by
//! the center even under symmetric priors.
//!
//! As in the simultaneous game, pies enter only through the ratio
//! `pi_first / pi_second`.

use serde::{Deserialize, Serialize};

use crate::bilateral::continuation_value;
use crate::error::Result;
use crate::params::{validate, GameParams, Priors, PRIOR_TIE_TOL};
use crate::quad::integrate_with_cuts;
use crate::verify::DeviationReport;

/// Who concedes with positive probability at time 0 in stage 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeqAtom {
    /// The first-stage peripheral (player A).
    Peripheral,
    Center,
}

/// The posterior level player A must hold at `0+` for the terminal boundary
/// condition to close without a center atom, plus the branch point that
/// decides which closed form applies when the center atoms instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqThresholds {
    pub z_bar_a: f64,
    pub z_tilde_a: f64,
}

/// Solved stage-1 equilibrium of the sequential game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqEquilibrium {
    pub atom_holder: Option<SeqAtom>,
    pub atom_size: f64,
    /// Posteriors immediately after any time-0 atom.
    pub z_a_plus: f64,
    pub z_c_plus: f64,
    /// Common stage-1 terminal time: both posteriors reach 1.
    pub terminal: f64,
    /// Time at which the center's posterior crosses the waiting peripheral's
    /// prior, when interior; player A's hazard is kinked there.
    pub crossing: Option<f64>,
    /// Time-0 rational payoffs (A, B, C).
    pub payoffs: [f64; 3],
    pub thresholds: SeqThresholds,
    priors: Priors,
    params: GameParams,
    rho: f64,
    lambda: f64,
}

fn thresholds_inner(priors: &Priors, params: &GameParams) -> SeqThresholds {
    let rho = params.pi_ac / params.pi_bc;
    let zb = priors.z_b;
    let zc = priors.z_c;
    let z_tilde_a = rho * zb / (rho + 1.0 - zb);
    let z_bar_a = if zc >= zb {
        ((rho + 1.0) * zc - zb) / (rho + 1.0 - zb)
    } else {
        z_tilde_a * (zc / zb).powf((rho + 1.0) / rho)
    };
    SeqThresholds { z_bar_a, z_tilde_a }
}

/// Threshold posteriors governing the time-0 atom assignment.
pub fn seq_threshold(priors: &Priors, params: &GameParams) -> Result<SeqThresholds> {
    validate(params, priors)?;
    Ok(thresholds_inner(priors, params))
}

/// Solves the sequential game's stage 1 and evaluates payoffs.
pub fn solve_sequential(priors: &Priors, params: &GameParams) -> Result<SeqEquilibrium> {
    validate(params, priors)?;
    let th = thresholds_inner(priors, params);
    let rho = params.pi_ac / params.pi_bc;
    let lambda = params.benchmark_hazard();
    let (za, zb, zc) = (priors.z_a, priors.z_b, priors.z_c);

    let (atom_holder, atom_size, z_a_plus, z_c_plus) = if (za - th.z_bar_a).abs() <= PRIOR_TIE_TOL {
        (None, 0.0, za, zc)
    } else if za < th.z_bar_a {
        (
            Some(SeqAtom::Peripheral),
            1.0 - za / th.z_bar_a,
            th.z_bar_a,
            zc,
        )
    } else {
        // Center atoms; the post-atom posterior comes from the terminal
        // boundary condition, with the branch set by whether the center's
        // posterior path stays above the waiting peripheral's prior.
        let z_c_plus = if za >= th.z_tilde_a {
            (zb + za * (rho + 1.0 - zb)) / (rho + 1.0)
        } else {
            zb * (za * (rho + 1.0 - zb) / (rho * zb)).powf(rho / (rho + 1.0))
        };
        (Some(SeqAtom::Center), 1.0 - zc / z_c_plus, za, z_c_plus)
    };

    let terminal = -z_c_plus.ln() / lambda;
    let crossing = if z_c_plus < zb {
        Some((zb / z_c_plus).ln() / lambda)
    } else {
        None
    };

    let mut eq = SeqEquilibrium {
        atom_holder,
        atom_size,
        z_a_plus,
        z_c_plus,
        terminal,
        crossing,
        payoffs: [0.0; 3],
        thresholds: th,
        priors: *priors,
        params: *params,
        rho,
        lambda,
    };
    eq.payoffs = eq.compute_payoffs()?;
    Ok(eq)
}

impl SeqEquilibrium {
    /// The center's constant stage-1 hazard (the benchmark rate).
    pub fn hazard_center(&self) -> f64 {
        self.lambda
    }

    /// The center's posterior along the stage-1 no-concession path.
    pub fn posterior_center(&self, t: f64) -> f64 {
        self.z_c_plus * (self.lambda * t).exp()
    }

    /// Immediate-concession probability the center would grant in the stage-2
    /// continuation starting at time `t`.
    fn stage2_atom(&self, t: f64) -> f64 {
        (1.0 - self.priors.z_b / self.posterior_center(t)).max(0.0)
    }

    /// Player A's stage-1 hazard, strictly above the benchmark rate.
    pub fn hazard_peripheral(&self, t: f64) -> f64 {
        self.lambda * (self.rho + 1.0) / (self.rho + self.stage2_atom(t))
    }

    /// Player A's posterior: a power form while the center's posterior is
    /// below the waiting peripheral's prior, a linear-in-`z_C` form above it.
    pub fn posterior_peripheral(&self, t: f64) -> f64 {
        let zb = self.priors.z_b;
        let zc_t = self.posterior_center(t);
        match self.crossing {
            Some(tb) if t <= tb => {
                self.z_a_plus * (zc_t / self.z_c_plus).powf((self.rho + 1.0) / self.rho)
            }
            Some(_) => {
                let z_a_cross =
                    self.z_a_plus * (zb / self.z_c_plus).powf((self.rho + 1.0) / self.rho);
                z_a_cross * ((self.rho + 1.0) * zc_t - zb) / (self.rho * zb)
            }
            None => {
                self.z_a_plus * ((self.rho + 1.0) * zc_t - zb)
                    / ((self.rho + 1.0) * self.z_c_plus - zb)
            }
        }
    }

    /// Unconditional concession cdfs implied by the posterior paths.
    pub fn cdf_center(&self, t: f64) -> f64 {
        1.0 - self.priors.z_c / self.posterior_center(t)
    }

    pub fn cdf_peripheral(&self, t: f64) -> f64 {
        1.0 - self.priors.z_a / self.posterior_peripheral(t)
    }

    /// Payoff of the plan "A concedes at `t` if stage 1 is still open".
    pub fn deviation_payoff_peripheral(&self, t: f64, tol: f64) -> Result<f64> {
        let p = &self.params;
        let f_c0 = if self.atom_holder == Some(SeqAtom::Center) {
            self.atom_size
        } else {
            0.0
        };
        if t == 0.0 {
            return Ok((1.0 - p.alpha) * p.pi_ac * (1.0 - f_c0));
        }
        let integrand = |y: f64| {
            let surv_c = 1.0 - self.cdf_center(y);
            (-p.r * y).exp() * p.alpha * p.pi_ac * self.lambda * surv_c
        };
        let atom_part = p.alpha * p.pi_ac * f_c0;
        let integral = integrate_with_cuts(&integrand, 0.0, t, &[], tol)?;
        let terminal = (1.0 - p.alpha) * p.pi_ac * (-p.r * t).exp() * (1.0 - self.cdf_center(t));
        Ok(atom_part + integral + terminal)
    }

    /// Payoff of the plan "C concedes at `t` if stage 1 is still open",
    /// including the stage-2 continuation after an A concession.
    pub fn deviation_payoff_center(&self, t: f64, tol: f64) -> Result<f64> {
        let p = &self.params;
        let surrender = (1.0 - p.alpha) * (p.pi_ac + p.pi_bc);
        let f_a0 = if self.atom_holder == Some(SeqAtom::Peripheral) {
            self.atom_size
        } else {
            0.0
        };
        if t == 0.0 {
            return Ok(surrender * (1.0 - f_a0));
        }
        // Reward to C when A concedes at y: the first pie now, plus the
        // stage-2 bilateral continuation at the current posterior on C.
        let reward = |y: f64| {
            p.alpha * p.pi_ac
                + continuation_value(p.pi_bc, self.posterior_center(y), self.priors.z_b, p)
        };
        let atom_part = f_a0 * reward(0.0);
        let integrand = |y: f64| {
            let surv_a = 1.0 - self.cdf_peripheral(y);
            (-p.r * y).exp() * self.hazard_peripheral(y) * surv_a * reward(y)
        };
        let cuts: Vec<f64> = self.crossing.into_iter().collect();
        let integral = integrate_with_cuts(&integrand, 0.0, t, &cuts, tol)?;
        let terminal = surrender * (-p.r * t).exp() * (1.0 - self.cdf_peripheral(t));
        Ok(atom_part + integral + terminal)
    }

    fn compute_payoffs(&self) -> Result<[f64; 3]> {
        let p = &self.params;
        // A is indifferent across its support; evaluate mid-support.
        let v_a = self.deviation_payoff_peripheral(0.5 * self.terminal, 1e-10)?;
        let v_c = match self.atom_holder {
            Some(SeqAtom::Peripheral) => {
                let w0 = p.alpha * p.pi_ac
                    + continuation_value(p.pi_bc, self.priors.z_c, self.priors.z_b, p);
                self.atom_size * w0 + (1.0 - self.atom_size) * (1.0 - p.alpha) * (p.pi_ac + p.pi_bc)
            }
            _ => (1.0 - p.alpha) * (p.pi_ac + p.pi_bc),
        };
        // B only plays in stage 2; value the start of stage 2 at time 0.
        let f_a0 = if self.atom_holder == Some(SeqAtom::Peripheral) {
            self.atom_size
        } else {
            0.0
        };
        let f_c0 = if self.atom_holder == Some(SeqAtom::Center) {
            self.atom_size
        } else {
            0.0
        };
        let stage2_value_b =
            |y: f64| continuation_value(p.pi_bc, self.priors.z_b, self.posterior_center(y), p);
        let mut v_b = p.alpha * p.pi_bc * f_c0 + (1.0 - f_c0) * f_a0 * stage2_value_b(0.0);
        let integrand = |y: f64| {
            let surv_a = 1.0 - self.cdf_peripheral(y);
            let surv_c = 1.0 - self.cdf_center(y);
            (-p.r * y).exp()
                * (surv_a * self.lambda * surv_c * p.alpha * p.pi_bc
                    + surv_c * self.hazard_peripheral(y) * surv_a * stage2_value_b(y))
        };
        let cuts: Vec<f64> = self.crossing.into_iter().collect();
        v_b += integrate_with_cuts(&integrand, 0.0, self.terminal, &cuts, 1e-10)?;
        Ok([v_a, v_b, v_c])
    }

    /// Best-response check of stage 1: rows are `U_A` and `U_C` on the grid.
    pub fn best_response_check(&self, grid_n: usize, tol: f64) -> Result<DeviationReport> {
        let mut grid: Vec<f64> = vec![0.0];
        for k in 1..=grid_n {
            grid.push(self.terminal * k as f64 / grid_n as f64);
        }
        if let Some(tb) = self.crossing {
            for d in [1e-3, 1e-5] {
                for cand in [tb - d, tb + d] {
                    if cand > 0.0 && cand < self.terminal {
                        grid.push(cand);
                    }
                }
            }
            grid.push(tb);
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

        let quad_tol = (tol * 1e-3).min(1e-10);
        let mut u_a = Vec::with_capacity(grid.len());
        let mut u_c = Vec::with_capacity(grid.len());
        for &t in &grid {
            u_a.push(self.deviation_payoff_peripheral(t, quad_tol)?);
            u_c.push(self.deviation_payoff_center(t, quad_tol)?);
        }
        let reference = vec![self.payoffs[0], self.payoffs[2]];
        let atom_a = self.atom_holder == Some(SeqAtom::Peripheral);
        let atom_c = self.atom_holder == Some(SeqAtom::Center);
        let mut support_residual: f64 = 0.0;
        let mut off_support_slack = f64::INFINITY;
        for (row, (us, has_atom)) in [(&u_a, atom_a), (&u_c, atom_c)].iter().enumerate() {
            for (t, u) in grid.iter().zip(us.iter()) {
                let in_support = (*t == 0.0 && *has_atom) || *t > 0.0;
                if in_support {
                    support_residual = support_residual.max((u - reference[row]).abs());
                } else {
                    off_support_slack = off_support_slack.min(reference[row] - u);
                }
            }
        }
        let pass = support_residual <= tol && off_support_slack >= -tol;
        Ok(DeviationReport {
            grid,
            u_values: vec![u_a, u_c],
            reference,
            support_residual,
            off_support_slack,
            tol,
            pass,
        })
    }
}
