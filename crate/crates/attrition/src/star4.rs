//! Numerical solver for the equal-pie four-player star: one center, three
//! peripherals.
//!
//! Local indifference now involves three-player continuation values instead
//! of bilateral ones, so hazards are generally time-varying and the system is
//! integrated numerically, backward from the terminal time at which all
//! posteriors reach 1. Peripherals drop out of the active set (backward) when
//! their posterior reaches their prior; whatever gap remains at the center
//! when the last peripheral arrives is closed by a single time-0 atom.
//! Configurations that would need more than one atom are rejected.
//!
//! Because every active peripheral shares one posterior level with the rest
//! of its cohort (they activate exactly when aligned), the backward state
//! reduces to the cohort level plus the center's posterior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{GameParams, Player, Priors, PRIOR_TIE_TOL};
use crate::quad::integrate_with_cuts;
use crate::trilateral::{closed_payoffs, solve_structure, PAYOFF_QUAD_TOL};
use crate::verify::deviation_payoff_peripheral;

/// Index of the center in all four-slot arrays.
pub const CENTER: usize = 3;

const ATOM_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-6;
const LOCAL_TOL: f64 = 1e-9;
const MAX_STEP: f64 = 2e-3;

/// Priors of the four-player star: three peripherals and the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Star4Priors {
    pub peripherals: [f64; 3],
    pub center: f64,
}

impl Star4Priors {
    pub fn new(peripherals: [f64; 3], center: f64) -> Result<Self> {
        let p = Star4Priors {
            peripherals,
            center,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = ["z_1", "z_2", "z_3", "z_center"];
        for (k, z) in self
            .peripherals
            .iter()
            .chain(std::iter::once(&self.center))
            .enumerate()
        {
            if !(*z > 0.0 && *z < 1.0) {
                return Err(Error::OutOfRange {
                    field: fields[k],
                    value: *z,
                    expected: "0 < z < 1",
                });
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.peripherals[0],
            self.peripherals[1],
            self.peripherals[2],
            self.center,
        ]
    }
}

/// Snapshot of the no-concession path at one time: posteriors, hazards, and
/// activity flags (peripherals 1-3, then the center).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Star4State {
    pub t: f64,
    pub z: [f64; 4],
    pub lambda: [f64; 4],
    pub active: [bool; 4],
}

/// Solved four-player equilibrium in the original peripheral labeling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Star4Equilibrium {
    /// Time-0 concession probability per player; at most one is positive.
    pub atoms: [f64; 4],
    /// Forward activation time per peripheral (0 when active from the start).
    pub activation: [f64; 3],
    /// Common terminal time.
    pub terminal: f64,
    /// Time-0 rational payoffs (peripherals, then center).
    pub payoffs: [f64; 4],
    /// Dense no-concession path, ascending in time.
    pub path: Vec<Star4State>,
    pub priors: Star4Priors,
    params: GameParams,
}

/// Continuation objects after one peripheral concedes: the remaining
/// peripherals' three-player values, their reputational bonuses relative to
/// conceding, the center's continuation value, and the center-side gain from
/// this concession.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationValues {
    /// Three-player payoff per remaining peripheral (`None` for the conceder).
    pub values: [Option<f64>; 3],
    /// `(value - (1-alpha)) / (2alpha - 1)` per remaining peripheral.
    pub g_hat: [Option<f64>; 3],
    /// Center's payoff from the remaining two negotiations.
    pub w_center: f64,
    /// `(alpha + w_center - 3(1-alpha)) / (2alpha - 1)`.
    pub gamma: f64,
}

fn clamp_unit(z: f64) -> f64 {
    z.clamp(1e-12, 1.0 - 1e-12)
}

fn require_unit_pies(params: &GameParams) -> Result<()> {
    for (field, pie) in [("pi_ac", params.pi_ac), ("pi_bc", params.pi_bc)] {
        if (pie - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                field,
                value: pie,
                expected: "pie = 1 in the four-player star",
            });
        }
    }
    Ok(())
}

/// Closed-form three-player payoffs where available: `(per-player, center)`.
fn tri_closed(za: f64, zb: f64, zc: f64, params: &GameParams) -> Result<([Option<f64>; 3], f64)> {
    let priors = Priors::new(clamp_unit(za), clamp_unit(zb), clamp_unit(zc))?;
    let st = solve_structure(&priors, params)?;
    let closed = closed_payoffs(&st, &priors, params);
    let center = closed[2].expect("center payoff always has a closed form");
    Ok((closed, center))
}

/// Three-player payoff of the peripheral at position `which` (0 or 1),
/// falling back to quadrature when that peripheral is dominant.
fn tri_value(which: usize, za: f64, zb: f64, zc: f64, params: &GameParams) -> Result<f64> {
    let priors = Priors::new(clamp_unit(za), clamp_unit(zb), clamp_unit(zc))?;
    let st = solve_structure(&priors, params)?;
    let closed = closed_payoffs(&st, &priors, params);
    match closed[which] {
        Some(v) => Ok(v),
        None => deviation_payoff_peripheral(
            Player::from_index(which),
            st.t_star,
            &st.profiles,
            &priors,
            params,
            PAYOFF_QUAD_TOL,
        ),
    }
}

/// Continuation values at posterior vector `z` when peripheral `conceder`
/// concedes. Posteriors at 1 are treated by continuity.
pub fn continuation_values(
    z: &[f64; 4],
    conceder: usize,
    params: &GameParams,
) -> Result<ContinuationValues> {
    require_unit_pies(params)?;
    assert!(conceder < 3, "the conceder must be a peripheral");
    let rem: Vec<usize> = (0..3).filter(|&i| i != conceder).collect();
    let alpha = params.alpha;
    let spread = 2.0 * alpha - 1.0;
    let mut values = [None; 3];
    let mut g_hat = [None; 3];
    for (pos, &i) in rem.iter().enumerate() {
        let v = tri_value(pos, z[rem[0]], z[rem[1]], z[CENTER], params)?;
        values[i] = Some(v);
        g_hat[i] = Some((v - (1.0 - alpha)) / spread);
    }
    let (_, w_center) = tri_closed(z[rem[0]], z[rem[1]], z[CENTER], params)?;
    let gamma = (alpha + w_center - 3.0 * (1.0 - alpha)) / spread;
    Ok(ContinuationValues {
        values,
        g_hat,
        w_center,
        gamma,
    })
}

/// Sum of isolated bilateral payoffs: one per peripheral against the center,
/// and the center's total over its three negotiations. Equal unit pies.
pub fn star4_benchmark(priors: &Star4Priors, params: &GameParams) -> Result<[f64; 4]> {
    priors.validate()?;
    params.validate()?;
    let mut out = [0.0; 4];
    for i in 0..3 {
        out[i] =
            crate::bilateral::benchmark_payoff(1.0, priors.peripherals[i], priors.center, params);
        out[CENTER] +=
            crate::bilateral::benchmark_payoff(1.0, priors.center, priors.peripherals[i], params);
    }
    Ok(out)
}

/// Backward integrator state: active peripherals share one posterior level.
struct Backward<'a> {
    /// Peripheral priors sorted descending.
    priors: [f64; 3],
    params: &'a GameParams,
    lam: f64,
    alpha: f64,
}

struct RawNode {
    s: f64,
    level: f64,
    z_c: f64,
    lam_p: f64,
    lam_c: f64,
    /// Index of the strongest still-active peripheral (in sorted order);
    /// everything before it is frozen at its prior.
    first_active: usize,
}

impl<'a> Backward<'a> {
    /// Hazards of the active cohort and the center, given the cohort level
    /// and the center posterior.
    fn rates(&self, first_active: usize, level: f64, z_c: f64) -> Result<(f64, f64)> {
        let m = 3 - first_active;
        debug_assert!(m >= 1);
        // Remaining two peripherals after one cohort member concedes.
        let mut rem = [0.0f64; 2];
        let mut idx = 0;
        for i in 0..first_active {
            rem[idx] = self.priors[i];
            idx += 1;
        }
        for _ in 0..m - 1 {
            rem[idx] = level;
            idx += 1;
        }
        debug_assert_eq!(idx, 2);
        let (closed, w_c) = tri_closed(rem[0], rem[1], z_c, self.params)?;
        let spread = 2.0 * self.alpha - 1.0;
        let gamma = (self.alpha + w_c - 3.0 * (1.0 - self.alpha)) / spread;
        let lam_p = 3.0 * self.lam / (m as f64 * gamma);
        let lam_c = if m >= 2 {
            // Reputational bonus of a cohort member when a cohort sibling
            // concedes; the sibling's slot in `rem` is the last one.
            let v_member = match closed[1] {
                Some(v) => v,
                None => tri_value(1, rem[0], rem[1], z_c, self.params)?,
            };
            let g_hat = (v_member - (1.0 - self.alpha)) / spread;
            self.lam - (m - 1) as f64 * g_hat * lam_p
        } else {
            self.lam
        };
        if lam_c < -1e-9 || lam_p < 0.0 {
            return Err(Error::Unsupported(
                "indifference system produced a negative hazard; configuration unsupported",
            ));
        }
        Ok((lam_p, lam_c.max(0.0)))
    }

    fn derivative(&self, first_active: usize, y: [f64; 2]) -> Result<[f64; 2]> {
        let (lam_p, lam_c) = self.rates(first_active, y[0], y[1])?;
        Ok([-lam_p * y[0], -lam_c * y[1]])
    }

    fn rk4(&self, first_active: usize, y: [f64; 2], h: f64) -> Result<[f64; 2]> {
        let k1 = self.derivative(first_active, y)?;
        let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
        let k2 = self.derivative(first_active, y2)?;
        let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
        let k3 = self.derivative(first_active, y3)?;
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
        let k4 = self.derivative(first_active, y4)?;
        Ok([
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ])
    }

    /// One accepted adaptive step: two half-steps checked against one full
    /// step, locally extrapolated.
    fn step(&self, first_active: usize, y: [f64; 2], h: f64) -> Result<([f64; 2], f64)> {
        let mut h = h;
        loop {
            let full = self.rk4(first_active, y, h)?;
            let half = self.rk4(first_active, y, 0.5 * h)?;
            let half2 = self.rk4(first_active, half, 0.5 * h)?;
            let err = ((half2[0] - full[0]).abs()).max((half2[1] - full[1]).abs()) / 15.0;
            if err <= LOCAL_TOL {
                let y_new = [
                    half2[0] + (half2[0] - full[0]) / 15.0,
                    half2[1] + (half2[1] - full[1]) / 15.0,
                ];
                let grow = if err < 1e-14 {
                    2.0
                } else {
                    0.9 * (LOCAL_TOL / err).powf(0.2)
                };
                let h_next = (h * grow.clamp(0.3, 2.0)).min(MAX_STEP);
                return Ok((y_new, h_next));
            }
            h *= 0.5;
            if h < 1e-12 {
                return Err(Error::StepFailure {
                    delta: err,
                    limit: LOCAL_TOL,
                });
            }
        }
    }

    /// Largest step `h* <= h_hi` at which `cond` (positive away from the
    /// event, decreasing) first reaches zero.
    fn locate_event<F: Fn(&[f64; 2]) -> f64>(
        &self,
        first_active: usize,
        y: [f64; 2],
        h_hi: f64,
        cond: F,
    ) -> Result<(f64, [f64; 2])> {
        let mut lo = 0.0f64;
        let mut hi = h_hi;
        let mut y_hi = self.rk4(first_active, y, h_hi)?;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let y_mid = self.rk4(first_active, y, mid)?;
            if cond(&y_mid) <= 0.0 {
                hi = mid;
                y_hi = y_mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok((hi, y_hi))
    }
}

/// Solves the four-player star. Requires both pies equal to 1.
pub fn solve_star4(priors: &Star4Priors, params: &GameParams) -> Result<Star4Equilibrium> {
    priors.validate()?;
    params.validate()?;
    require_unit_pies(params)?;

    // Relabel peripherals descending by prior; remember where they came from.
    let mut order: [usize; 3] = [0, 1, 2];
    order.sort_by(|&a, &b| {
        priors.peripherals[b]
            .partial_cmp(&priors.peripherals[a])
            .unwrap()
    });
    let sorted: [f64; 3] = [
        priors.peripherals[order[0]],
        priors.peripherals[order[1]],
        priors.peripherals[order[2]],
    ];
    let z_center = priors.center;
    let lam = params.benchmark_hazard();
    let bw = Backward {
        priors: sorted,
        params,
        lam,
        alpha: params.alpha,
    };

    let mut nodes: Vec<RawNode> = Vec::new();
    let mut deact_s: [Option<f64>; 3] = [None; 3];
    let mut atoms_sorted = [0.0f64; 3];
    let mut atom_center = 0.0f64;

    // While all four posteriors coincide the indifference system is exactly
    // the benchmark hazard for everyone, so this stretch is analytic.
    let top = sorted[0].max(z_center);
    let s_top = (1.0 / top).ln() / lam;
    let synth = 48usize;
    for k in 0..=synth {
        let s = s_top * k as f64 / synth as f64;
        let level = (-lam * s).exp();
        nodes.push(RawNode {
            s,
            level,
            z_c: level,
            lam_p: lam,
            lam_c: lam,
            first_active: 0,
        });
    }

    let terminal_s = if z_center >= sorted[0] - PRIOR_TIE_TOL {
        // The center's posterior returns to its prior first: time 0 reached
        // with every weaker peripheral needing its own atom.
        for i in 0..3 {
            atoms_sorted[i] = (1.0 - sorted[i] / z_center).max(0.0);
        }
        let needing: usize = atoms_sorted.iter().filter(|a| **a > ATOM_TOL).count();
        if needing > 1 {
            return Err(Error::MultipleAtoms { count: needing });
        }
        s_top
    } else {
        // Strongest peripheral(s) reach their prior and fall out of the
        // cohort; integrate the reduced system until the next boundary.
        let mut s = s_top;
        let mut level = sorted[0];
        let mut z_c = sorted[0];
        let mut first_active = 0usize;
        while first_active < 3 && sorted[first_active] >= level - PRIOR_TIE_TOL {
            deact_s[first_active] = Some(s);
            first_active += 1;
        }
        if first_active < 3 {
            let (lam_p, lam_c) = bw.rates(first_active, level, z_c)?;
            nodes.push(RawNode {
                s: s + 1e-9,
                level,
                z_c,
                lam_p,
                lam_c,
                first_active,
            });
        }
        let mut h = 1e-4f64;
        loop {
            if first_active == 3 {
                // Cohort exhausted at time 0: the center atoms over whatever
                // gap remains to its prior.
                atom_center = 1.0 - z_center / z_c;
                if atom_center < -RESIDUAL_TOL {
                    return Err(Error::ShootingDivergence {
                        residual: -atom_center,
                        tol: RESIDUAL_TOL,
                    });
                }
                atom_center = atom_center.max(0.0);
                break s;
            }
            let target = sorted[first_active];
            let y = [level, z_c];
            let (y_try, h_next) = bw.step(first_active, y, h.min(MAX_STEP))?;
            let crossed_level = y_try[0] <= target;
            let crossed_center = y_try[1] <= z_center;
            if !(crossed_level || crossed_center) {
                s += h.min(MAX_STEP);
                level = y_try[0];
                z_c = y_try[1];
                let (lam_p, lam_c) = bw.rates(first_active, level, z_c)?;
                nodes.push(RawNode {
                    s,
                    level,
                    z_c,
                    lam_p,
                    lam_c,
                    first_active,
                });
                h = h_next;
                continue;
            }
            // Locate the earliest crossing inside the step.
            let mut h_event = h.min(MAX_STEP);
            let mut y_event = y_try;
            let mut which_center = false;
            if crossed_level {
                let (he, ye) = bw.locate_event(first_active, y, h_event, |p| p[0] - target)?;
                h_event = he;
                y_event = ye;
            }
            if crossed_center {
                let (he, ye) =
                    bw.locate_event(first_active, y, h.min(MAX_STEP), |p| p[1] - z_center)?;
                if !crossed_level || he < h_event {
                    h_event = he;
                    y_event = ye;
                    which_center = true;
                }
            }
            s += h_event;
            if which_center {
                // Time 0: active cohort members close their gaps with atoms.
                level = y_event[0];
                z_c = z_center;
                for i in first_active..3 {
                    atoms_sorted[i] = (1.0 - sorted[i] / level).max(0.0);
                }
                let needing = atoms_sorted.iter().filter(|a| **a > ATOM_TOL).count();
                let (lam_p, lam_c) = bw.rates(first_active, level, z_c)?;
                nodes.push(RawNode {
                    s,
                    level,
                    z_c,
                    lam_p,
                    lam_c,
                    first_active,
                });
                if needing > 1 {
                    return Err(Error::MultipleAtoms { count: needing });
                }
                break s;
            }
            level = target;
            z_c = y_event[1];
            let (lam_p, lam_c) = bw.rates(first_active, level, z_c)?;
            nodes.push(RawNode {
                s,
                level,
                z_c,
                lam_p,
                lam_c,
                first_active,
            });
            while first_active < 3 && sorted[first_active] >= level - PRIOR_TIE_TOL {
                deact_s[first_active] = Some(s);
                first_active += 1;
            }
            if first_active < 3 {
                // Duplicate node a hair into the new phase so interpolation
                // never blends hazards across the activation kink.
                let (lam_p, lam_c) = bw.rates(first_active, level, z_c)?;
                nodes.push(RawNode {
                    s: s + 1e-9,
                    level,
                    z_c,
                    lam_p,
                    lam_c,
                    first_active,
                });
            }
            h = 1e-4;
        }
    };

    let terminal = terminal_s;

    // Convert backward nodes to a forward path in sorted labels.
    let mut path_sorted: Vec<Star4State> = nodes
        .iter()
        .map(|n| {
            let mut z = [0.0; 4];
            let mut lambda = [0.0; 4];
            let mut active = [false; 4];
            for i in 0..3 {
                // Peripherals before `first_active` have already dropped from
                // the cohort at this backward time: frozen at their prior,
                // inactive in forward time.
                if i < n.first_active {
                    z[i] = sorted[i];
                    lambda[i] = 0.0;
                    active[i] = false;
                } else {
                    z[i] = n.level;
                    lambda[i] = n.lam_p;
                    active[i] = true;
                }
            }
            z[CENTER] = n.z_c;
            lambda[CENTER] = n.lam_c;
            active[CENTER] = true;
            Star4State {
                t: terminal - n.s,
                z,
                lambda,
                active,
            }
        })
        .collect();
    path_sorted.reverse();
    path_sorted.dedup_by(|a, b| (a.t - b.t).abs() < 1e-15);

    let activation_sorted: [f64; 3] = [
        deact_s[0].map(|s| terminal - s).unwrap_or(0.0).max(0.0),
        deact_s[1].map(|s| terminal - s).unwrap_or(0.0).max(0.0),
        deact_s[2].map(|s| terminal - s).unwrap_or(0.0).max(0.0),
    ];

    // Map back to the caller's peripheral order.
    let mut atoms = [0.0f64; 4];
    let mut activation = [0.0f64; 3];
    for k in 0..3 {
        atoms[order[k]] = atoms_sorted[k];
        activation[order[k]] = activation_sorted[k];
    }
    atoms[CENTER] = atom_center;
    let path: Vec<Star4State> = path_sorted
        .iter()
        .map(|st| {
            let mut z = [0.0; 4];
            let mut lambda = [0.0; 4];
            let mut active = [false; 4];
            for k in 0..3 {
                z[order[k]] = st.z[k];
                lambda[order[k]] = st.lambda[k];
                active[order[k]] = st.active[k];
            }
            z[CENTER] = st.z[CENTER];
            lambda[CENTER] = st.lambda[CENTER];
            active[CENTER] = st.active[CENTER];
            Star4State {
                t: st.t,
                z,
                lambda,
                active,
            }
        })
        .collect();

    let mut eq = Star4Equilibrium {
        atoms,
        activation,
        terminal,
        payoffs: [0.0; 4],
        path,
        priors: *priors,
        params: *params,
    };
    eq.payoffs = eq.compute_payoffs()?;

    // Residual audit: the integrated time-0 posteriors must match the priors
    // once the single atom is taken out.
    let state0 = eq.state_at(0.0);
    let mut residual = 0.0f64;
    for i in 0..3 {
        let implied = priors.peripherals[i] / (1.0 - eq.atoms[i]);
        residual = residual.max((state0.z[i] - implied).abs());
    }
    let implied_c = priors.center / (1.0 - eq.atoms[CENTER]);
    residual = residual.max((state0.z[CENTER] - implied_c).abs());
    if residual > RESIDUAL_TOL {
        return Err(Error::ShootingDivergence {
            residual,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(eq)
}

impl Star4Equilibrium {
    /// Distinct positive activation times in increasing order, then the
    /// terminal time.
    pub fn phase_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .activation
            .iter()
            .copied()
            .filter(|t| *t > 0.0)
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts.push(self.terminal);
        ts
    }

    /// Path state at `t` (posteriors log-interpolated, hazards linear).
    pub fn state_at(&self, t: f64) -> Star4State {
        let path = &self.path;
        if t <= path[0].t {
            return path[0];
        }
        if t >= path[path.len() - 1].t {
            return path[path.len() - 1];
        }
        let idx = match path.binary_search_by(|n| n.t.partial_cmp(&t).unwrap()) {
            Ok(i) => return path[i],
            Err(i) => i - 1,
        };
        let (a, b) = (&path[idx], &path[idx + 1]);
        let w = (t - a.t) / (b.t - a.t);
        let mut z = [0.0; 4];
        let mut lambda = [0.0; 4];
        for i in 0..4 {
            z[i] = a.z[i] * (b.z[i] / a.z[i]).powf(w);
            lambda[i] = a.lambda[i] + w * (b.lambda[i] - a.lambda[i]);
        }
        Star4State {
            t,
            z,
            lambda,
            active: a.active,
        }
    }

    pub fn posterior(&self, player: usize, t: f64) -> f64 {
        self.state_at(t).z[player]
    }

    pub fn hazard(&self, player: usize, t: f64) -> f64 {
        self.state_at(t).lambda[player]
    }

    /// Unconditional concession cdf (atom included).
    pub fn cdf(&self, player: usize, t: f64) -> f64 {
        1.0 - self.priors.as_array()[player] / self.posterior(player, t)
    }

    /// Inverse transform of a rational player's concession time along the
    /// solved path: `u` uniform in [0, 1). `None` only under floating-point
    /// roundoff at the terminal boundary.
    pub fn concession_time_from_uniform(&self, player: usize, u: f64) -> Option<f64> {
        let prior = self.priors.as_array()[player];
        let target = u * (1.0 - prior);
        if target <= self.atoms[player] {
            return Some(0.0);
        }
        let z_target = prior / (1.0 - target);
        let path = &self.path;
        if z_target <= path[0].z[player] {
            return Some(path[0].t);
        }
        for w in path.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let zb = b.z[player];
            if z_target <= zb {
                let za = a.z[player];
                if zb <= za {
                    return Some(b.t);
                }
                let frac = (z_target / za).ln() / (zb / za).ln();
                return Some(a.t + frac * (b.t - a.t));
            }
        }
        None
    }

    /// The single atom holder `(player, size)`, if any.
    fn atom_holder(&self) -> Option<(usize, f64)> {
        self.atoms
            .iter()
            .enumerate()
            .find(|(_, a)| **a > ATOM_TOL)
            .map(|(i, a)| (i, *a))
    }

    /// Three-player continuation value of peripheral `i` when peripheral `j`
    /// concedes at posterior vector `z`.
    fn continuation_value_of(&self, i: usize, j: usize, z: &[f64; 4]) -> Result<f64> {
        let rem: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let pos = rem.iter().position(|&k| k == i).expect("i stays in play");
        tri_value(pos, z[rem[0]], z[rem[1]], z[CENTER], &self.params)
    }

    /// Deviation payoff of peripheral `i` conceding at `t`, evaluated along
    /// the solved path.
    pub fn deviation_payoff_peripheral(&self, i: usize, t: f64, tol: f64) -> Result<f64> {
        let p = &self.params;
        let alpha = p.alpha;
        let zs0 = self.priors.as_array();
        let survival = |k: usize, y: f64| zs0[k] / self.posterior(k, y);
        let others: Vec<usize> = (0..3).filter(|&k| k != i).collect();

        let mut acc = 0.0;
        match self.atom_holder() {
            Some((j, a)) if j == CENTER => acc += alpha * a,
            Some((j, a)) if j != i => {
                // Only j atomed, so the time-0+ state already has everyone
                // else at their priors.
                acc += a * self.continuation_value_of(i, j, &self.state_at(0.0).z)?;
            }
            _ => {}
        }

        let pending_err: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
        let integrand = |y: f64| -> f64 {
            let st = self.state_at(y);
            let surv: f64 = others
                .iter()
                .chain(std::iter::once(&CENTER))
                .map(|&k| survival(k, y))
                .product();
            let mut reward = st.lambda[CENTER] * alpha;
            for &j in &others {
                if st.lambda[j] > 0.0 {
                    match self.continuation_value_of(i, j, &st.z) {
                        Ok(v) => reward += st.lambda[j] * v,
                        Err(e) => {
                            pending_err.borrow_mut().get_or_insert(e);
                            return 0.0;
                        }
                    }
                }
            }
            (-p.r * y).exp() * surv * reward
        };
        let cuts = self.phase_times();
        acc += integrate_with_cuts(&integrand, 0.0, t, &cuts, tol)?;
        if let Some(e) = pending_err.into_inner() {
            return Err(e);
        }
        let surv_t: f64 = others
            .iter()
            .chain(std::iter::once(&CENTER))
            .map(|&k| survival(k, t))
            .product();
        acc += (1.0 - alpha) * (-p.r * t).exp() * surv_t;
        Ok(acc)
    }

    fn compute_payoffs(&self) -> Result<[f64; 4]> {
        let p = &self.params;
        let alpha = p.alpha;
        let spread = 2.0 * alpha - 1.0;
        let surrender_center = 3.0 * (1.0 - alpha);
        let zs0 = self.priors.as_array();
        let holder = self.atom_holder();

        let v_center = match holder {
            Some((j, a)) if j != CENTER => {
                let rem: Vec<usize> = (0..3).filter(|&k| k != j).collect();
                let (_, w) = tri_closed(zs0[rem[0]], zs0[rem[1]], zs0[CENTER], p)?;
                a * (alpha + w) + (1.0 - a) * surrender_center
            }
            _ => surrender_center,
        };

        let mut out = [0.0; 4];
        out[CENTER] = v_center;
        for i in 0..3 {
            out[i] = if self.atoms[i] > ATOM_TOL {
                1.0 - alpha
            } else if self.activation[i] == 0.0 {
                match holder {
                    Some((j, a)) if j == CENTER => (1.0 - alpha) + spread * a,
                    Some((j, a)) => {
                        a * self.continuation_value_of(i, j, &self.state_at(0.0).z)?
                            + (1.0 - a) * (1.0 - alpha)
                    }
                    None => 1.0 - alpha,
                }
            } else {
                self.deviation_payoff_peripheral(i, self.activation[i], 1e-6)?
            };
        }
        Ok(out)
    }

    /// Indifference residuals along the path: max peripheral residual and the
    /// center residual among active players, plus (optionally) the minimal
    /// waiting slack of inactive peripherals.
    pub fn ic_residuals(&self, ts: &[f64], include_inactive: bool) -> Result<Vec<Star4Residual>> {
        let p = &self.params;
        let lam = p.benchmark_hazard();
        let alpha = p.alpha;
        let spread = 2.0 * alpha - 1.0;
        let mut out = Vec::with_capacity(ts.len());
        for &t in ts {
            let st = self.state_at(t);
            let active = |i: usize| t >= self.activation[i] && t <= self.terminal;
            let mut peripheral_max: f64 = 0.0;
            let mut inactive_slack: f64 = f64::INFINITY;
            let mut center_sum = 0.0;
            for i in 0..3 {
                let mut pressure = st.lambda[CENTER];
                for j in (0..3).filter(|&j| j != i) {
                    if st.lambda[j] > 0.0 {
                        let v = self.continuation_value_of(i, j, &st.z)?;
                        pressure += st.lambda[j] * (v - (1.0 - alpha)) / spread;
                    }
                }
                if active(i) {
                    peripheral_max = peripheral_max.max((pressure - lam).abs());
                } else if include_inactive {
                    inactive_slack = inactive_slack.min(pressure - lam);
                }
            }
            for j in 0..3 {
                if st.lambda[j] > 0.0 {
                    let rem: Vec<usize> = (0..3).filter(|&k| k != j).collect();
                    let (_, w) = tri_closed(st.z[rem[0]], st.z[rem[1]], st.z[CENTER], p)?;
                    let gamma = (alpha + w - surrender3(alpha)) / spread;
                    center_sum += st.lambda[j] * gamma;
                }
            }
            out.push(Star4Residual {
                t,
                peripheral_max,
                center: center_sum - 3.0 * lam,
                inactive_slack_min: inactive_slack,
            });
        }
        Ok(out)
    }
}

fn surrender3(alpha: f64) -> f64 {
    3.0 * (1.0 - alpha)
}

/// Indifference residuals at one path time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Star4Residual {
    pub t: f64,
    /// Max |pressure - benchmark| over active peripherals.
    pub peripheral_max: f64,
    /// Center indifference residual.
    pub center: f64,
    /// Min waiting slack over inactive peripherals (infinite if none).
    pub inactive_slack_min: f64,
}
