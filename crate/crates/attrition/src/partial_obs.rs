//! Partial observability of concessions: the uninvolved peripheral sees only
//! that an agreement happened, not who conceded.
//!
//! With symmetric priors and unit pies, both peripherals concede at the
//! benchmark hazard while the center concedes with a time-0 atom and a rate
//! strictly below the benchmark afterwards. Writing `h` for the ratio of the
//! center's posterior to a peripheral's posterior, the center's rate is an
//! explicit function of `h` (the positive root of a quadratic) and `h` itself
//! obeys a scalar ODE integrated backward from `h = 1` at the terminal time.
//!
//! Existence of this profile is what the construction yields; uniqueness is
//! not claimed, so callers should treat the output as a candidate equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::params::GameParams;

/// The center's concession rate as a function of the posterior ratio
/// `h = z_C / z_A`: the unique positive root of
/// `lambda_C (lambda_AG + lambda_C) = lambda_AG^2 h`.
pub fn lambda_c_of_h(h: f64, params: &GameParams) -> f64 {
    let lam = params.benchmark_hazard();
    0.5 * lam * ((1.0 + 4.0 * h).sqrt() - 1.0)
}

/// Candidate equilibrium under partial observability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartialObsEq {
    /// Common prior of all three players.
    pub prior: f64,
    /// Terminal time at which all posteriors reach 1.
    pub terminal: f64,
    /// Posterior ratio at `t = 0`; lies in `(1, 2)`.
    pub h0: f64,
    /// The center's time-0 concession probability, `1 - 1/h0`.
    pub atom_center: f64,
    /// Time-0 rational payoffs (A, B, C); the peripherals coincide.
    pub payoffs: [f64; 3],
    /// Disagreement between the two fixed-step integrations at `t = 0`.
    pub step_check: f64,
    #[serde(skip)]
    spline: Option<MonotoneCubic>,
    lambda: f64,
    r: f64,
    alpha: f64,
}

/// Step count of the coarse integration; the check run doubles it.
const BASE_STEPS: usize = 100_000;
/// The two step sizes must agree at `t = 0` to this limit.
const STEP_LIMIT: f64 = 1e-6;

fn integrate_h(terminal: f64, params: &GameParams, steps: usize) -> Vec<f64> {
    // Backward variable s = T - t, so the known boundary h(T) = 1 becomes the
    // initial condition and h grows (toward 2) as s increases.
    let lam = params.benchmark_hazard();
    let f = |h: f64| h * (lam - lambda_c_of_h(h, params));
    let dt = terminal / steps as f64;
    let mut hs = Vec::with_capacity(steps + 1);
    let mut h = 1.0;
    hs.push(h);
    for _ in 0..steps {
        let k1 = f(h);
        let k2 = f(h + 0.5 * dt * k1);
        let k3 = f(h + 0.5 * dt * k2);
        let k4 = f(h + dt * k3);
        h += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        hs.push(h);
    }
    hs
}

/// Solves the symmetric partial-observability game at common prior `z0`.
///
/// Requires both pies equal to 1. Runs a fixed-step fourth-order integration
/// at two step sizes and fails with [`Error::StepFailure`] if they disagree
/// beyond `1e-6` at `t = 0`.
pub fn solve_partial_obs(z0: f64, params: &GameParams) -> Result<PartialObsEq> {
    params.validate()?;
    for (field, pie) in [("pi_ac", params.pi_ac), ("pi_bc", params.pi_bc)] {
        if (pie - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                field,
                value: pie,
                expected: "pie = 1 under partial observability",
            });
        }
    }
    if !(z0 > 0.0 && z0 < 1.0) {
        return Err(Error::OutOfRange {
            field: "z0",
            value: z0,
            expected: "0 < z0 < 1",
        });
    }
    let lam = params.benchmark_hazard();
    let terminal = -z0.ln() / lam;

    let coarse = integrate_h(terminal, params, BASE_STEPS);
    let fine = integrate_h(terminal, params, 2 * BASE_STEPS);
    let h0_coarse = *coarse.last().unwrap();
    let h0 = *fine.last().unwrap();
    let step_check = (h0 - h0_coarse).abs();
    if step_check > STEP_LIMIT {
        return Err(Error::StepFailure {
            delta: step_check,
            limit: STEP_LIMIT,
        });
    }

    // Store h on the calendar-time axis (reverse of the backward grid).
    let n = fine.len();
    let mut ts = Vec::with_capacity(n);
    let mut hs = Vec::with_capacity(n);
    for (k, h) in fine.iter().rev().enumerate() {
        ts.push(terminal * k as f64 / (n - 1) as f64);
        hs.push(*h);
    }
    let spline = MonotoneCubic::new(ts, hs)?;

    let atom_center = 1.0 - 1.0 / h0;
    let alpha = params.alpha;
    let v_side = (1.0 - alpha) + (2.0 * alpha - 1.0) * atom_center;
    let v_center = 2.0 * (1.0 - alpha);
    Ok(PartialObsEq {
        prior: z0,
        terminal,
        h0,
        atom_center,
        payoffs: [v_side, v_side, v_center],
        step_check,
        spline: Some(spline),
        lambda: lam,
        r: params.r,
        alpha,
    })
}

impl PartialObsEq {
    fn spline(&self) -> &MonotoneCubic {
        self.spline
            .as_ref()
            .expect("solver always populates the path")
    }

    /// Posterior ratio `z_C / z_A` at calendar time `t`.
    pub fn h_at(&self, t: f64) -> f64 {
        self.spline().eval(t)
    }

    /// The center's concession rate at `t`; strictly below the benchmark.
    pub fn lambda_center_at(&self, t: f64) -> f64 {
        let lam = self.lambda;
        0.5 * lam * ((1.0 + 4.0 * self.h_at(t)).sqrt() - 1.0)
    }

    pub fn hazard_peripheral(&self) -> f64 {
        self.lambda
    }

    /// Either peripheral's posterior.
    pub fn posterior_peripheral(&self, t: f64) -> f64 {
        self.prior * (self.lambda * t).exp()
    }

    pub fn posterior_center(&self, t: f64) -> f64 {
        self.h_at(t) * self.posterior_peripheral(t)
    }

    /// The center's unconditional concession cdf, atom included.
    pub fn cdf_center(&self, t: f64) -> f64 {
        1.0 - self.prior / self.posterior_center(t)
    }

    pub fn cdf_peripheral(&self, t: f64) -> f64 {
        1.0 - self.prior / self.posterior_peripheral(t)
    }

    /// Belief about the center held by the uninvolved peripheral right after
    /// observing an agreement at `t` (identity of the conceder unseen).
    pub fn agreement_jump_belief(&self, t: f64) -> f64 {
        let lc = self.lambda_center_at(t);
        self.posterior_center(t) * self.lambda / (self.lambda + lc)
    }

    /// Residual of the waiting peripheral's indifference condition at `t`;
    /// zero in exact arithmetic.
    pub fn indifference_residual(&self, t: f64) -> f64 {
        let lc = self.lambda_center_at(t);
        let g = (1.0 - self.agreement_jump_belief(t) / self.posterior_peripheral(t)).max(0.0);
        lc + self.lambda * g - self.lambda
    }

    /// Implied time-0 atom when the center's prior is `z_c_prior` instead of
    /// the common prior, holding the rest of the profile fixed. Reported as a
    /// candidate only; no uniqueness claim is attached.
    pub fn implied_atom(&self, z_c_prior: f64) -> Result<f64> {
        let z_c_plus = self.prior * self.h0;
        if !(z_c_prior > 0.0 && z_c_prior < z_c_plus) {
            return Err(Error::OutOfRange {
                field: "z_c_prior",
                value: z_c_prior,
                expected: "0 < z_c_prior < z0 * h(0)",
            });
        }
        Ok(1.0 - z_c_prior / z_c_plus)
    }
}
