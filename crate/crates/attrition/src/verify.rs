//! Independent equilibrium verification through deviation payoffs.
//!
//! For a candidate profile set, the payoff of the plan "concede at time t if
//! nothing has happened yet" is evaluated by a first-event decomposition: the
//! center may concede first, the rival peripheral may concede first (inducing
//! a bilateral continuation at the current posteriors), or nobody does and the
//! deviator concedes at `t`. A profile set passes when each player is
//! indifferent on the support of their concession distribution and cannot gain
//! off it.

use serde::{Deserialize, Serialize};

use crate::bilateral::continuation_value;
use crate::error::Result;
use crate::params::{GameParams, Player, Priors};
use crate::profile::ConcessionProfile;
use crate::quad::integrate_with_cuts;

/// Evaluation of the deviation payoffs `U_i` on a grid, with the verdict of
/// the best-response test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationReport {
    /// Times at which the deviation payoffs were sampled (ascending).
    pub grid: Vec<f64>,
    /// One row per player (A, B, C): `U_i` at each grid time.
    pub u_values: Vec<Vec<f64>>,
    /// Reference payoff per player against which residuals are measured.
    pub reference: Vec<f64>,
    /// `max |U_i(t) - v_i|` over grid times in player i's support.
    pub support_residual: f64,
    /// `min (v_i - U_i(t))` over grid times outside the support; negative
    /// values mean a profitable deviation exists.
    pub off_support_slack: f64,
    pub tol: f64,
    pub pass: bool,
}

fn merged_cuts(profiles: &[ConcessionProfile; 3]) -> Vec<f64> {
    let mut cuts: Vec<f64> = profiles
        .iter()
        .flat_map(|p| p.interior_breakpoints())
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts
}

/// Is `t` inside the support of the concession distribution?
fn in_support(profile: &ConcessionProfile, t: f64) -> bool {
    if t == 0.0 {
        return profile.atom0() > 0.0;
    }
    profile
        .segments()
        .iter()
        .any(|s| s.rate > 0.0 && t > s.start && t <= s.end)
}

/// `U_i` for peripheral `player` over an ascending grid of candidate
/// concession times. Atoms at time 0 enter the first-event integrals; the
/// value at `t = 0` itself uses the convention that the deviator's own time-0
/// concession forgoes the rivals' time-0 atoms.
fn u_peripheral_on_grid(
    player: Player,
    grid: &[f64],
    profiles: &[ConcessionProfile; 3],
    priors: &Priors,
    params: &GameParams,
    tol: f64,
) -> Result<Vec<f64>> {
    let i = player.index();
    let k = player.other_peripheral().index();
    let c = Player::C.index();
    let pie = params.pie(player);
    let alpha = params.alpha;
    let r = params.r;

    let f_c0 = profiles[c].atom0();
    let f_k0 = profiles[k].atom0();
    let cuts = merged_cuts(profiles);

    // Posteriors along the no-concession path (the deviator's own profile
    // still drives the rivals' beliefs about them).
    let z_i = |y: f64| priors.get(player) / profiles[i].survival(y);
    let z_c = |y: f64| priors.z_c / profiles[c].survival(y);

    // Value of the bilateral continuation against the center if the rival
    // peripheral concedes at y.
    let vag = |y: f64| continuation_value(pie, z_i(y), z_c(y), params);

    // Contribution of the rivals' time-0 atoms, picked up by any plan with
    // t > 0.
    let mut atom_part = alpha * pie * f_c0;
    if f_k0 > 0.0 {
        let z_i0 = priors.get(player) / (1.0 - profiles[i].atom0());
        let z_c0 = priors.z_c / (1.0 - f_c0);
        atom_part += (1.0 - f_c0) * f_k0 * continuation_value(pie, z_i0, z_c0, params);
    }

    let integrand = |y: f64| {
        let sk = profiles[k].survival(y);
        let sc = profiles[c].survival(y);
        let disc = (-r * y).exp();
        disc * (alpha * pie * sk * profiles[c].hazard_at(y) * sc
            + sc * profiles[k].hazard_at(y) * sk * vag(y))
    };

    let slice_tol = (tol / grid.len().max(1) as f64).max(1e-15);
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &t in grid {
        if t == 0.0 {
            // Conceding at the outset: F_k(0-) = 1, only the center's atom has
            // not yet resolved anything against the deviator.
            out.push((1.0 - alpha) * pie * (1.0 - f_c0));
            continue;
        }
        acc += integrate_with_cuts(&integrand, prev, t, &cuts, slice_tol)?;
        prev = t;
        let terminal = (1.0 - alpha)
            * pie
            * (-r * t).exp()
            * profiles[c].survival(t)
            * profiles[k].survival(t);
        out.push(atom_part + acc + terminal);
    }
    Ok(out)
}

/// `U_C` over an ascending grid of candidate concession times for the center.
/// Simultaneous time-0 concessions by both peripherals are counted once, in a
/// dedicated term.
fn u_center_on_grid(
    grid: &[f64],
    profiles: &[ConcessionProfile; 3],
    priors: &Priors,
    params: &GameParams,
    tol: f64,
) -> Result<Vec<f64>> {
    let a = Player::A.index();
    let b = Player::B.index();
    let c = Player::C.index();
    let pie_a = params.pi_ac;
    let pie_b = params.pi_bc;
    let alpha = params.alpha;
    let r = params.r;

    let f_a0 = profiles[a].atom0();
    let f_b0 = profiles[b].atom0();
    let cuts = merged_cuts(profiles);

    let z_a = |y: f64| priors.z_a / profiles[a].survival(y);
    let z_b = |y: f64| priors.z_b / profiles[b].survival(y);
    let z_c = |y: f64| priors.z_c / profiles[c].survival(y);

    // Reward when A concedes at y: the A-pie now plus the bilateral
    // continuation against B; symmetrically for B.
    let reward_a = |y: f64| alpha * pie_a + continuation_value(pie_b, z_c(y), z_b(y), params);
    let reward_b = |y: f64| alpha * pie_b + continuation_value(pie_a, z_c(y), z_a(y), params);

    let both_atoms = alpha * (pie_a + pie_b) * f_a0 * f_b0;
    let mut one_sided = 0.0;
    if f_a0 > 0.0 {
        let z_c0 = priors.z_c / (1.0 - profiles[c].atom0());
        let z_b0 = priors.z_b / (1.0 - f_b0);
        one_sided +=
            f_a0 * (1.0 - f_b0) * (alpha * pie_a + continuation_value(pie_b, z_c0, z_b0, params));
    }
    if f_b0 > 0.0 {
        let z_c0 = priors.z_c / (1.0 - profiles[c].atom0());
        let z_a0 = priors.z_a / (1.0 - f_a0);
        one_sided +=
            f_b0 * (1.0 - f_a0) * (alpha * pie_b + continuation_value(pie_a, z_c0, z_a0, params));
    }

    let integrand = |y: f64| {
        let sa = profiles[a].survival(y);
        let sb = profiles[b].survival(y);
        let disc = (-r * y).exp();
        disc * (sb * profiles[a].hazard_at(y) * sa * reward_a(y)
            + sa * profiles[b].hazard_at(y) * sb * reward_b(y))
    };

    let slice_tol = (tol / grid.len().max(1) as f64).max(1e-15);
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &t in grid {
        if t == 0.0 {
            out.push(both_atoms + (1.0 - alpha) * (pie_a + pie_b) * (1.0 - f_a0) * (1.0 - f_b0));
            continue;
        }
        acc += integrate_with_cuts(&integrand, prev, t, &cuts, slice_tol)?;
        prev = t;
        let terminal = (1.0 - alpha)
            * (pie_a + pie_b)
            * (-r * t).exp()
            * profiles[a].survival(t)
            * profiles[b].survival(t);
        out.push(both_atoms + one_sided + acc + terminal);
    }
    Ok(out)
}

/// Deviation payoff of peripheral `player` conceding at `t` against the given
/// profile set.
pub fn deviation_payoff_peripheral(
    player: Player,
    t: f64,
    profiles: &[ConcessionProfile; 3],
    priors: &Priors,
    params: &GameParams,
    tol: f64,
) -> Result<f64> {
    assert!(player != Player::C, "use deviation_payoff_center for C");
    Ok(u_peripheral_on_grid(player, &[t], profiles, priors, params, tol)?[0])
}

/// Deviation payoff of the center conceding (on both pies) at `t`.
pub fn deviation_payoff_center(
    t: f64,
    profiles: &[ConcessionProfile; 3],
    priors: &Priors,
    params: &GameParams,
    tol: f64,
) -> Result<f64> {
    Ok(u_center_on_grid(&[t], profiles, priors, params, tol)?[0])
}

/// Builds a check grid on `[0, terminal]`: `grid_n` uniform points plus
/// clusters around the phase boundaries, where indifference residuals are most
/// sensitive.
fn build_grid(terminal: f64, boundaries: &[f64], grid_n: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = vec![0.0];
    for k in 1..=grid_n {
        grid.push(terminal * k as f64 / grid_n as f64);
    }
    for &b in boundaries {
        for exp in 3..=6 {
            let d = 10f64.powi(-exp);
            for cand in [b - d, b + d] {
                if cand > 0.0 && cand < terminal {
                    grid.push(cand);
                }
            }
        }
        if b > 0.0 && b < terminal {
            grid.push(b);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    grid
}

/// Best-response check of an arbitrary profile set.
///
/// `reference` supplies the candidate equilibrium payoffs; when absent, each
/// player's reference is the deviation payoff at the earliest grid point of
/// their own support, so a profile that is not constant on its support fails
/// with a positive deviation gain.
pub fn best_response_check_profiles(
    profiles: &[ConcessionProfile; 3],
    reference: Option<[f64; 3]>,
    priors: &Priors,
    params: &GameParams,
    grid_n: usize,
    tol: f64,
) -> Result<DeviationReport> {
    let terminal = profiles
        .iter()
        .map(|p| p.terminal())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut boundaries: Vec<f64> = merged_cuts(profiles);
    boundaries.push(terminal);
    let grid = build_grid(terminal, &boundaries, grid_n);

    let quad_tol = (tol * 1e-3).min(1e-9);
    let u_a = u_peripheral_on_grid(Player::A, &grid, profiles, priors, params, quad_tol)?;
    let u_b = u_peripheral_on_grid(Player::B, &grid, profiles, priors, params, quad_tol)?;
    let u_c = u_center_on_grid(&grid, profiles, priors, params, quad_tol)?;
    let u_values = vec![u_a, u_b, u_c];

    let reference = match reference {
        Some(v) => v.to_vec(),
        None => u_values
            .iter()
            .enumerate()
            .map(|(p, us)| {
                grid.iter()
                    .zip(us)
                    .find(|(t, _)| in_support(&profiles[p], **t))
                    .map(|(_, u)| *u)
                    .unwrap_or(f64::NAN)
            })
            .collect(),
    };

    let mut support_residual: f64 = 0.0;
    let mut off_support_slack = f64::INFINITY;
    for (p, us) in u_values.iter().enumerate() {
        for (t, u) in grid.iter().zip(us) {
            if in_support(&profiles[p], *t) {
                support_residual = support_residual.max((u - reference[p]).abs());
            } else {
                off_support_slack = off_support_slack.min(reference[p] - u);
            }
        }
    }

    let pass = support_residual <= tol && off_support_slack >= -tol;
    Ok(DeviationReport {
        grid,
        u_values,
        reference,
        support_residual,
        off_support_slack,
        tol,
        pass,
    })
}

/// Best-response check of a solved three-player equilibrium against its own
/// analytic payoffs.
pub fn best_response_check(
    eq: &crate::trilateral::TriEquilibrium,
    priors: &Priors,
    params: &GameParams,
    grid_n: usize,
    tol: f64,
) -> Result<DeviationReport> {
    best_response_check_profiles(&eq.profiles, Some(eq.payoffs), priors, params, grid_n, tol)
}

/// Best-response check of a solved two-player equilibrium: rows are the two
/// input players' deviation payoffs against the rival's profile.
pub fn bilateral_best_response_check(
    eq: &crate::bilateral::BilateralEq,
    params: &GameParams,
    grid_n: usize,
    tol: f64,
) -> Result<DeviationReport> {
    let profiles = [eq.profile_i(), eq.profile_j()];
    let reference = vec![eq.payoff_i, eq.payoff_j];
    let mut grid: Vec<f64> = vec![0.0];
    for k in 1..=grid_n {
        grid.push(eq.terminal * k as f64 / grid_n as f64);
    }
    let quad_tol = (tol * 1e-3).min(1e-10);
    let alpha = params.alpha;
    let r = params.r;
    let mut u_values = Vec::with_capacity(2);
    for me in 0..2 {
        let rival = &profiles[1 - me];
        let atom = rival.atom0();
        let integrand =
            |y: f64| (-r * y).exp() * alpha * eq.pi * rival.hazard_at(y) * rival.survival(y);
        let mut acc = alpha * eq.pi * atom;
        let mut prev = 0.0;
        let mut us = Vec::with_capacity(grid.len());
        for &t in &grid {
            if t == 0.0 {
                us.push((1.0 - alpha) * eq.pi * (1.0 - atom));
                continue;
            }
            acc += crate::quad::adaptive_simpson(&integrand, prev, t, quad_tol)?;
            prev = t;
            us.push(acc + (1.0 - alpha) * eq.pi * (-r * t).exp() * rival.survival(t));
        }
        u_values.push(us);
    }
    let mut support_residual: f64 = 0.0;
    let mut off_support_slack = f64::INFINITY;
    for me in 0..2 {
        for (t, u) in grid.iter().zip(&u_values[me]) {
            if in_support(&profiles[me], *t) {
                support_residual = support_residual.max((u - reference[me]).abs());
            } else {
                off_support_slack = off_support_slack.min(reference[me] - u);
            }
        }
    }
    let pass = support_residual <= tol && off_support_slack >= -tol;
    Ok(DeviationReport {
        grid,
        u_values,
        reference,
        support_residual,
        off_support_slack,
        tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ConcessionProfile;

    fn params() -> GameParams {
        GameParams::new(1.0, 0.7, 2.0, 1.0).unwrap()
    }

    #[test]
    fn center_payoff_with_silent_peripherals_decays_exponentially() {
        let p = params();
        let priors = Priors::new(0.6, 0.1, 0.2).unwrap();
        // Rivals never concede: any concession plan for C is worth the
        // discounted surrender value.
        let silent = ConcessionProfile::constant(0.0, 0.0, 2.0).unwrap();
        let profiles = [silent.clone(), silent.clone(), silent];
        for t in [0.0, 0.3, 1.0, 2.0] {
            let u = deviation_payoff_center(t, &profiles, &priors, &p, 1e-10).unwrap();
            let expect = (1.0 - p.alpha) * (p.pi_ac + p.pi_bc) * (-p.r * t).exp();
            assert!((u - expect).abs() < 1e-9, "t={t}: {u} vs {expect}");
        }
    }

    #[test]
    fn symmetric_equilibrium_passes_with_surrender_payoffs() {
        let p = params();
        let priors = Priors::new(0.5, 0.5, 0.5).unwrap();
        let eq = crate::trilateral::solve_trilateral(&priors, &p).unwrap();
        assert_eq!(eq.payoffs[0], (1.0 - p.alpha) * p.pi_ac);
        assert_eq!(eq.payoffs[1], (1.0 - p.alpha) * p.pi_bc);
        let report = best_response_check(&eq, &priors, &p, 300, 1e-6).unwrap();
        assert!(report.pass, "residual {}", report.support_residual);
    }

    #[test]
    fn peripheral_payoff_at_zero_against_pure_atom() {
        let p = params();
        let priors = Priors::new(0.3, 0.3, 0.2).unwrap();
        // Center atoms with 0.25 then goes quiet; rival peripheral silent.
        let center = ConcessionProfile::constant(0.25, 0.0, 1.0).unwrap();
        let silent = ConcessionProfile::constant(0.0, 0.0, 1.0).unwrap();
        let profiles = [silent.clone(), silent, center];
        // Any strictly positive concession time collects the atom.
        let u =
            deviation_payoff_peripheral(Player::B, 1e-9, &profiles, &priors, &p, 1e-10).unwrap();
        let expect = p.alpha * p.pi_bc * 0.25 + (1.0 - p.alpha) * p.pi_bc * 0.75;
        assert!((u - expect).abs() < 1e-6);
    }

    #[test]
    fn waiting_strictly_beats_conceding_while_inactive() {
        // Dominant-peripheral instance: before its activation time the
        // dominant player strictly prefers waiting, and on its support the
        // deviation payoff is flat at the equilibrium value.
        let p = params();
        let priors = Priors::new(0.6, 0.1, 0.2).unwrap();
        let eq = crate::trilateral::solve_trilateral(&priors, &p).unwrap();
        let at = |t: f64| {
            deviation_payoff_peripheral(Player::A, t, &eq.profiles, &priors, &p, 1e-10).unwrap()
        };
        let v_star = at(eq.t_star);
        assert!((v_star - eq.payoffs[0]).abs() < 1e-8);
        let mut prev = at(1e-6);
        for k in 1..10 {
            let u = at(eq.t_star * k as f64 / 10.0);
            assert!(u > prev, "waiting value not increasing at k={k}");
            assert!(u < v_star - 1e-6);
            prev = u;
        }
        for k in 1..=5 {
            let t = eq.t_star + (eq.terminal - eq.t_star) * k as f64 / 5.0;
            assert!((at(t) - v_star).abs() < 1e-8, "not flat at t={t}");
        }
    }

    #[test]
    fn center_indifferent_at_benchmark_sum_when_strongest() {
        // Center-strongest instance: the peripherals atom, the center's
        // deviation payoff is flat at the sum of its isolated payoffs.
        let p = params();
        let priors = Priors::new(0.3, 0.1, 0.5).unwrap();
        let eq = crate::trilateral::solve_trilateral(&priors, &p).unwrap();
        let bench = crate::bilateral::benchmark_payoff(p.pi_ac, priors.z_c, priors.z_a, &p)
            + crate::bilateral::benchmark_payoff(p.pi_bc, priors.z_c, priors.z_b, &p);
        for k in 1..=8 {
            let t = eq.terminal * k as f64 / 8.0;
            let u = deviation_payoff_center(t, &eq.profiles, &priors, &p, 1e-10).unwrap();
            assert!((u - bench).abs() < 1e-8, "u={u} vs benchmark sum {bench}");
        }
    }
}
