//! Seeded Monte Carlo simulation of the concession protocol, including
//! continuation play after the first event.
//!
//! Types are drawn first; rational players then draw concession times by
//! inverse transform from their concession profile (the time-0 atom, then
//! exact inversion of the piecewise-linear cumulative hazard), so no time
//! discretization enters. A center concession closes every open negotiation
//! at the same instant; a peripheral concession hands the surviving
//! negotiations to a freshly sampled continuation game at the jump-updated
//! posteriors (bilateral after a three-player game, three-player after the
//! four-player star).
//!
//! Reproducibility: one root seed; replication `k` reads from an independent
//! counter-indexed stream (ChaCha12 with `set_stream(k)`), so results are
//! bit-identical for a fixed `(n, seed)` no matter how many workers run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bilateral;
use crate::params::{GameParams, Priors};
use crate::profile::ConcessionProfile;
use crate::star4::{Star4Equilibrium, CENTER};
use crate::trilateral::{solve_structure, TriEquilibrium};

/// One concession: `conceder` yields to `counterparty` at time `t`. `split`
/// marks simultaneous time-0 concessions that divide the pie equally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub t: f64,
    pub conceder: usize,
    pub counterparty: usize,
    pub split: bool,
}

/// Event log of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub replication: u64,
    pub committed: Vec<bool>,
    pub events: Vec<SimEvent>,
}

/// Aggregate simulation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub n: u64,
    pub seed: u64,
    /// Mean discounted payoff of each player's rational type (replications in
    /// which the player drew the commitment type carry no information about
    /// its strategic payoff and are excluded from that player's average).
    pub est_payoffs: Vec<f64>,
    /// Standard error per player.
    pub std_err: Vec<f64>,
    /// Number of replications entering each player's average.
    pub rational_draws: Vec<u64>,
    /// Rational draws that fell past the terminal time (floating-point slack
    /// only; the frequency is asserted tiny in the test suite).
    pub censored: u64,
    /// Replications in which the center conceded while several negotiations
    /// were open but they did not close at equal timestamps. Zero by
    /// construction.
    pub global_concession_violations: u64,
    /// Traces of the first few replications.
    pub event_log_sample: Vec<SimTrace>,
}

/// Inverse-transform draw of a rational player's concession time.
///
/// `u` is uniform on [0, 1); the target cdf value is `u * (1 - prior)`, which
/// stays strictly below the profile's terminal mass, so censoring can occur
/// only through floating-point roundoff.
fn sample_rational(profile: &ConcessionProfile, prior: f64, u: f64) -> Option<f64> {
    let target = u * (1.0 - prior);
    let atom = profile.atom0();
    if target <= atom {
        return Some(0.0);
    }
    let h_req = ((1.0 - atom) / (1.0 - target)).ln();
    let mut acc = 0.0;
    for seg in profile.segments() {
        let cap = seg.rate * (seg.end - seg.start);
        if acc + cap >= h_req && seg.rate > 0.0 {
            return Some(seg.start + (h_req - acc) / seg.rate);
        }
        acc += cap;
    }
    None
}

struct RepOutcome {
    payoffs: Vec<f64>,
    events: Vec<SimEvent>,
    censored: u64,
    global_concession_ok: bool,
}

/// Plays out one bilateral war over `pie` starting at calendar time `t0` with
/// posteriors `(z_p, z_c)` and known types. Returns discounted payoffs for
/// (peripheral, center).
#[allow(clippy::too_many_arguments)]
fn play_bilateral(
    pie: f64,
    z_p: f64,
    z_c: f64,
    committed_p: bool,
    committed_c: bool,
    t0: f64,
    participants: (usize, usize),
    params: &GameParams,
    rng: &mut ChaCha12Rng,
    events: &mut Vec<SimEvent>,
    censored: &mut u64,
) -> (f64, f64) {
    let z_p = z_p.clamp(1e-12, 1.0 - 1e-12);
    let z_c = z_c.clamp(1e-12, 1.0 - 1e-12);
    let eq = bilateral::solve(pie, z_p, z_c, params).expect("clamped posteriors are valid");
    let tau_p = if committed_p {
        None
    } else {
        let u: f64 = rng.random();
        let t = sample_rational(&eq.profile_i(), z_p, u);
        if t.is_none() {
            *censored += 1;
        }
        t
    };
    let tau_c = if committed_c {
        None
    } else {
        let u: f64 = rng.random();
        let t = sample_rational(&eq.profile_j(), z_c, u);
        if t.is_none() {
            *censored += 1;
        }
        t
    };
    let (p_idx, c_idx) = participants;
    let alpha = params.alpha;
    match (tau_p, tau_c) {
        (None, None) => (0.0, 0.0),
        (Some(tp), tc) if tc.map_or(true, |tc| tp < tc) => {
            let disc = (-params.r * (t0 + tp)).exp();
            events.push(SimEvent {
                t: t0 + tp,
                conceder: p_idx,
                counterparty: c_idx,
                split: false,
            });
            (disc * (1.0 - alpha) * pie, disc * alpha * pie)
        }
        (tp, Some(tc)) if tp.map_or(true, |tp| tc < tp) => {
            let disc = (-params.r * (t0 + tc)).exp();
            events.push(SimEvent {
                t: t0 + tc,
                conceder: c_idx,
                counterparty: p_idx,
                split: false,
            });
            (disc * alpha * pie, disc * (1.0 - alpha) * pie)
        }
        (Some(tp), Some(_)) => {
            // Exactly equal draws: probability zero, resolved as a split.
            let disc = (-params.r * (t0 + tp)).exp();
            events.push(SimEvent {
                t: t0 + tp,
                conceder: p_idx,
                counterparty: c_idx,
                split: true,
            });
            (disc * 0.5 * pie, disc * 0.5 * pie)
        }
        _ => unreachable!(),
    }
}

/// Plays one three-player game from calendar time `t0` with already-drawn
/// types. `labels` maps the local players (A, B, center) to trace labels.
/// Returns discounted payoffs in local order.
#[allow(clippy::too_many_arguments)]
fn run_trilateral(
    profiles: &[ConcessionProfile; 3],
    zs: [f64; 3],
    pies: (f64, f64),
    committed: [bool; 3],
    t0: f64,
    labels: [usize; 3],
    params: &GameParams,
    rng: &mut ChaCha12Rng,
    events: &mut Vec<SimEvent>,
    censored: &mut u64,
) -> [f64; 3] {
    let mut taus: [Option<f64>; 3] = [None; 3];
    for i in 0..3 {
        if !committed[i] {
            let u: f64 = rng.random();
            taus[i] = sample_rational(&profiles[i], zs[i], u);
            if taus[i].is_none() {
                *censored += 1;
            }
        }
    }
    let alpha = params.alpha;
    let (pie_a, pie_b) = pies;
    let mut pay = [0.0f64; 3];
    let disc0 = (-params.r * t0).exp();

    let inf = f64::INFINITY;
    let ta = taus[0].unwrap_or(inf);
    let tb = taus[1].unwrap_or(inf);
    let tc = taus[2].unwrap_or(inf);

    // Public posterior along the no-concession path, for continuation starts.
    let posterior = |i: usize, t: f64| zs[i] / (1.0 - profiles[i].cdf_at(t));

    if ta.min(tb).min(tc) == inf {
        // Nobody ever concedes; both negotiations stay open forever.
    } else if tc <= ta && tc <= tb {
        // The center concedes first and thereby on both pies at once. A
        // peripheral atom meeting the center's atom at 0 splits that pie.
        let disc = disc0 * (-params.r * tc).exp();
        if ta == tc {
            events.push(SimEvent {
                t: t0 + tc,
                conceder: labels[0],
                counterparty: labels[2],
                split: true,
            });
            pay[0] += disc * 0.5 * pie_a;
            pay[2] += disc * 0.5 * pie_a;
        } else {
            events.push(SimEvent {
                t: t0 + tc,
                conceder: labels[2],
                counterparty: labels[0],
                split: false,
            });
            pay[0] += disc * alpha * pie_a;
            pay[2] += disc * (1.0 - alpha) * pie_a;
        }
        if tb == tc {
            events.push(SimEvent {
                t: t0 + tc,
                conceder: labels[1],
                counterparty: labels[2],
                split: true,
            });
            pay[1] += disc * 0.5 * pie_b;
            pay[2] += disc * 0.5 * pie_b;
        } else {
            events.push(SimEvent {
                t: t0 + tc,
                conceder: labels[2],
                counterparty: labels[1],
                split: false,
            });
            pay[1] += disc * alpha * pie_b;
            pay[2] += disc * (1.0 - alpha) * pie_b;
        }
    } else if ta <= tb {
        // A concedes first; the B-C negotiation continues bilaterally from
        // the updated posteriors.
        let disc = disc0 * (-params.r * ta).exp();
        events.push(SimEvent {
            t: t0 + ta,
            conceder: labels[0],
            counterparty: labels[2],
            split: false,
        });
        pay[0] += disc * (1.0 - alpha) * pie_a;
        pay[2] += disc * alpha * pie_a;
        let (p_b, p_c) = play_bilateral(
            pie_b,
            posterior(1, ta),
            posterior(2, ta),
            committed[1],
            committed[2],
            t0 + ta,
            (labels[1], labels[2]),
            params,
            rng,
            events,
            censored,
        );
        pay[1] += p_b;
        pay[2] += p_c;
    } else {
        let disc = disc0 * (-params.r * tb).exp();
        events.push(SimEvent {
            t: t0 + tb,
            conceder: labels[1],
            counterparty: labels[2],
            split: false,
        });
        pay[1] += disc * (1.0 - alpha) * pie_b;
        pay[2] += disc * alpha * pie_b;
        let (p_a, p_c) = play_bilateral(
            pie_a,
            posterior(0, tb),
            posterior(2, tb),
            committed[0],
            committed[2],
            t0 + tb,
            (labels[0], labels[2]),
            params,
            rng,
            events,
            censored,
        );
        pay[0] += p_a;
        pay[2] += p_c;
    }
    pay
}

/// If the center conceded while more than one negotiation was open, those
/// negotiations must have closed at the same timestamp.
fn global_concession_consistent(events: &[SimEvent], center: usize) -> bool {
    let first_t = match events
        .iter()
        .map(|e| e.t)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        Some(t) => t,
        None => return true,
    };
    let center_first = events
        .iter()
        .any(|e| e.t == first_t && e.conceder == center && !e.split);
    if !center_first {
        return true;
    }
    // Every negotiation resolves via some event; all center concessions must
    // carry the first timestamp.
    events
        .iter()
        .filter(|e| e.conceder == center)
        .all(|e| e.t == first_t)
}

fn replicate_trilateral(
    eq: &TriEquilibrium,
    priors: &Priors,
    params: &GameParams,
    rep: u64,
    seed: u64,
) -> (RepOutcome, Vec<bool>) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    let zs = priors.as_array();
    let committed = [
        rng.random::<f64>() < zs[0],
        rng.random::<f64>() < zs[1],
        rng.random::<f64>() < zs[2],
    ];
    let mut events = Vec::new();
    let mut censored = 0u64;
    let pay = run_trilateral(
        &eq.profiles,
        zs,
        (params.pi_ac, params.pi_bc),
        committed,
        0.0,
        [0, 1, 2],
        params,
        &mut rng,
        &mut events,
        &mut censored,
    );
    let global_concession_ok = global_concession_consistent(&events, 2);
    (
        RepOutcome {
            payoffs: pay.to_vec(),
            events,
            censored,
            global_concession_ok,
        },
        committed.to_vec(),
    )
}

#[derive(Clone)]
struct ChunkStats {
    n: u64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    sumsq: Vec<f64>,
    censored: u64,
    global_concession_violations: u64,
    traces: Vec<SimTrace>,
}

impl ChunkStats {
    fn empty(players: usize) -> Self {
        ChunkStats {
            n: 0,
            counts: vec![0; players],
            sums: vec![0.0; players],
            sumsq: vec![0.0; players],
            censored: 0,
            global_concession_violations: 0,
            traces: Vec::new(),
        }
    }

    fn absorb(&mut self, rep: u64, out: RepOutcome, committed: Vec<bool>, log_first: u64) {
        self.n += 1;
        for (i, p) in out.payoffs.iter().enumerate() {
            if !committed[i] {
                self.counts[i] += 1;
                self.sums[i] += p;
                self.sumsq[i] += p * p;
            }
        }
        self.censored += out.censored;
        if !out.global_concession_ok {
            self.global_concession_violations += 1;
        }
        if rep < log_first {
            self.traces.push(SimTrace {
                replication: rep,
                committed,
                events: out.events,
            });
        }
    }

    fn merge(mut self, other: ChunkStats) -> ChunkStats {
        self.n += other.n;
        for i in 0..self.sums.len() {
            self.counts[i] += other.counts[i];
            self.sums[i] += other.sums[i];
            self.sumsq[i] += other.sumsq[i];
        }
        self.censored += other.censored;
        self.global_concession_violations += other.global_concession_violations;
        self.traces.extend(other.traces);
        self
    }
}

/// Pairwise tree combination in fixed chunk order: the result is independent
/// of worker count and scheduling.
fn combine_pairwise(mut stats: Vec<ChunkStats>, players: usize) -> ChunkStats {
    if stats.is_empty() {
        return ChunkStats::empty(players);
    }
    while stats.len() > 1 {
        let mut next = Vec::with_capacity(stats.len().div_ceil(2));
        let mut iter = stats.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(a.merge(b)),
                None => next.push(a),
            }
        }
        stats = next;
    }
    stats.pop().unwrap()
}

const CHUNK: u64 = 8192;

fn finalize(total: ChunkStats, n: u64, seed: u64) -> SimOutcome {
    let players = total.sums.len();
    let mut est = vec![0.0; players];
    let mut se = vec![0.0; players];
    for i in 0..players {
        let m = total.counts[i];
        if m == 0 {
            continue;
        }
        let mean = total.sums[i] / m as f64;
        est[i] = mean;
        if m >= 2 {
            let var = (total.sumsq[i] - m as f64 * mean * mean) / (m as f64 - 1.0);
            se[i] = (var.max(0.0) / m as f64).sqrt();
        }
    }
    let mut traces = total.traces;
    traces.sort_by_key(|t| t.replication);
    SimOutcome {
        n,
        seed,
        est_payoffs: est,
        std_err: se,
        rational_draws: total.counts,
        censored: total.censored,
        global_concession_violations: total.global_concession_violations,
        event_log_sample: traces,
    }
}

fn simulate_generic<F>(n: u64, seed: u64, players: usize, log_first: u64, rep: F) -> SimOutcome
where
    F: Fn(u64) -> (RepOutcome, Vec<bool>) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let stats: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            let mut acc = ChunkStats::empty(players);
            for k in lo..hi {
                let (out, committed) = rep(k);
                acc.absorb(k, out, committed, log_first);
            }
            acc
        })
        .collect();
    finalize(combine_pairwise(stats, players), n, seed)
}

/// Simulates the three-player game `n` times under the given equilibrium
/// profiles. Deterministic in `(eq, n, seed)`.
pub fn simulate(
    eq: &TriEquilibrium,
    priors: &Priors,
    params: &GameParams,
    n: u64,
    seed: u64,
) -> SimOutcome {
    simulate_with_log(eq, priors, params, n, seed, 8)
}

/// As [`simulate`], keeping the first `log_first` replication traces.
pub fn simulate_with_log(
    eq: &TriEquilibrium,
    priors: &Priors,
    params: &GameParams,
    n: u64,
    seed: u64,
    log_first: u64,
) -> SimOutcome {
    simulate_generic(n, seed, 3, log_first, |rep| {
        replicate_trilateral(eq, priors, params, rep, seed)
    })
}

/// Simulates an isolated bilateral war over `pie` with priors `(z_i, z_j)`.
pub fn simulate_bilateral(
    pie: f64,
    z_i: f64,
    z_j: f64,
    params: &GameParams,
    n: u64,
    seed: u64,
) -> SimOutcome {
    simulate_generic(n, seed, 2, 8, |rep| {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(rep);
        let committed = vec![rng.random::<f64>() < z_i, rng.random::<f64>() < z_j];
        let mut events = Vec::new();
        let mut censored = 0u64;
        let (p_i, p_j) = play_bilateral(
            pie,
            z_i,
            z_j,
            committed[0],
            committed[1],
            0.0,
            (0, 1),
            params,
            &mut rng,
            &mut events,
            &mut censored,
        );
        (
            RepOutcome {
                payoffs: vec![p_i, p_j],
                events,
                censored,
                global_concession_ok: true,
            },
            committed,
        )
    })
}

/// Simulates the four-player star `n` times under a solved equilibrium. The
/// first concession by a peripheral hands play to the three-player
/// continuation at the updated posteriors, which is itself sampled exactly.
pub fn simulate_star4(eq: &Star4Equilibrium, params: &GameParams, n: u64, seed: u64) -> SimOutcome {
    simulate_generic(n, seed, 4, 8, |rep| replicate_star4(eq, params, rep, seed))
}

fn replicate_star4(
    eq: &Star4Equilibrium,
    params: &GameParams,
    rep: u64,
    seed: u64,
) -> (RepOutcome, Vec<bool>) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    let zs = eq.priors.as_array();
    let committed: Vec<bool> = (0..4).map(|i| rng.random::<f64>() < zs[i]).collect();
    let mut censored = 0u64;
    let mut events: Vec<SimEvent> = Vec::new();
    let mut pay = vec![0.0f64; 4];

    let inf = f64::INFINITY;
    let mut taus = [inf; 4];
    for i in 0..4 {
        if !committed[i] {
            let u: f64 = rng.random();
            match eq.concession_time_from_uniform(i, u) {
                Some(t) => taus[i] = t,
                None => censored += 1,
            }
        }
    }
    let alpha = params.alpha;
    let t_first = taus.iter().cloned().fold(inf, f64::min);

    if t_first == inf {
        // No events at all.
    } else if taus[CENTER] <= t_first {
        // Global concession: all three negotiations close now; peripheral
        // atoms colliding with the center's atom at 0 split their pie.
        let tc = taus[CENTER];
        let disc = (-params.r * tc).exp();
        for i in 0..3 {
            if taus[i] == tc {
                events.push(SimEvent {
                    t: tc,
                    conceder: i,
                    counterparty: CENTER,
                    split: true,
                });
                pay[i] += disc * 0.5;
                pay[CENTER] += disc * 0.5;
            } else {
                events.push(SimEvent {
                    t: tc,
                    conceder: CENTER,
                    counterparty: i,
                    split: false,
                });
                pay[i] += disc * alpha;
                pay[CENTER] += disc * (1.0 - alpha);
            }
        }
    } else {
        // The earliest peripheral concedes; the rest is a three-player game
        // at the updated posteriors.
        let j = (0..3)
            .min_by(|&a, &b| taus[a].partial_cmp(&taus[b]).unwrap())
            .unwrap();
        let tj = taus[j];
        let disc = (-params.r * tj).exp();
        events.push(SimEvent {
            t: tj,
            conceder: j,
            counterparty: CENTER,
            split: false,
        });
        pay[j] += disc * (1.0 - alpha);
        pay[CENTER] += disc * alpha;

        let rem: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let z_cont = [
            eq.posterior(rem[0], tj).clamp(1e-12, 1.0 - 1e-12),
            eq.posterior(rem[1], tj).clamp(1e-12, 1.0 - 1e-12),
            eq.posterior(CENTER, tj).clamp(1e-12, 1.0 - 1e-12),
        ];
        let priors3 =
            Priors::new(z_cont[0], z_cont[1], z_cont[2]).expect("clamped posteriors are valid");
        let st =
            solve_structure(&priors3, params).expect("three-player continuation always solves");
        let pay3 = run_trilateral(
            &st.profiles,
            z_cont,
            (1.0, 1.0),
            [committed[rem[0]], committed[rem[1]], committed[CENTER]],
            tj,
            [rem[0], rem[1], CENTER],
            params,
            &mut rng,
            &mut events,
            &mut censored,
        );
        pay[rem[0]] += pay3[0];
        pay[rem[1]] += pay3[1];
        pay[CENTER] += pay3[2];
    }

    let global_concession_ok = global_concession_consistent(&events, CENTER);
    (
        RepOutcome {
            payoffs: pay,
            events,
            censored,
            global_concession_ok,
        },
        committed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star4::{solve_star4, Star4Priors};
    use crate::trilateral::solve_trilateral;

    fn params() -> GameParams {
        GameParams::new(1.0, 0.7, 2.0, 1.0).unwrap()
    }

    fn reference() -> (Priors, GameParams, TriEquilibrium) {
        let p = params();
        let priors = Priors::new(0.6, 0.1, 0.2).unwrap();
        let eq = solve_trilateral(&priors, &p).unwrap();
        (priors, p, eq)
    }

    #[test]
    fn sampler_hits_atom_and_inverts_hazard() {
        let profile = ConcessionProfile::constant(0.25, 0.75, 2.0).unwrap();
        // target below the atom
        assert_eq!(sample_rational(&profile, 0.1, 0.1), Some(0.0));
        // u = 0.5 with prior 0.1: target 0.45, H = ln(0.75/0.55)
        let t = sample_rational(&profile, 0.1, 0.5).unwrap();
        let expect = (0.75f64 / 0.55).ln() / 0.75;
        assert!((t - expect).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (priors, p, eq) = reference();
        let a = simulate(&eq, &priors, &p, 20_000, 42);
        let b = simulate(&eq, &priors, &p, 20_000, 42);
        assert_eq!(a, b);
        let c = simulate(&eq, &priors, &p, 20_000, 43);
        assert_ne!(a.est_payoffs, c.est_payoffs);
    }

    #[test]
    fn estimates_match_analytic_payoffs() {
        let (priors, p, eq) = reference();
        let out = simulate(&eq, &priors, &p, 200_000, 7);
        for i in 0..3 {
            let d = (out.est_payoffs[i] - eq.payoffs[i]).abs();
            assert!(
                d <= 3.5 * out.std_err[i],
                "player {i}: est {} vs analytic {} (se {})",
                out.est_payoffs[i],
                eq.payoffs[i],
                out.std_err[i]
            );
        }
        assert_eq!(out.global_concession_violations, 0);
        assert!((out.censored as f64) <= 1e-3 * out.n as f64);
        assert!(out.std_err.iter().all(|s| *s > 0.0));
    }

    #[test]
    fn bilateral_estimates_match_benchmark() {
        let p = params();
        let out = simulate_bilateral(2.0, 0.6, 0.2, &p, 200_000, 11);
        let v_strong = bilateral::benchmark_payoff(2.0, 0.6, 0.2, &p);
        let v_weak = bilateral::benchmark_payoff(2.0, 0.2, 0.6, &p);
        assert!(
            (out.est_payoffs[0] - v_strong).abs() <= 3.5 * out.std_err[0],
            "strong: {} vs {}",
            out.est_payoffs[0],
            v_strong
        );
        assert!((out.est_payoffs[1] - v_weak).abs() <= 3.5 * out.std_err[1]);
    }

    #[test]
    fn star4_estimates_match_solver_payoffs() {
        let p = GameParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
        let priors = Star4Priors::new([0.5, 0.4, 0.2], 0.23).unwrap();
        let eq = solve_star4(&priors, &p).unwrap();
        let out = simulate_star4(&eq, &p, 150_000, 17);
        for i in 0..4 {
            let d = (out.est_payoffs[i] - eq.payoffs[i]).abs();
            assert!(
                d <= 3.5 * out.std_err[i],
                "player {i}: est {} vs analytic {} (se {})",
                out.est_payoffs[i],
                eq.payoffs[i],
                out.std_err[i]
            );
        }
        assert_eq!(out.global_concession_violations, 0);
    }

    #[test]
    fn standard_error_scales_with_sample_size() {
        let (priors, p, eq) = reference();
        let se4 = simulate(&eq, &priors, &p, 10_000, 5).std_err[2];
        let se5 = simulate(&eq, &priors, &p, 100_000, 5).std_err[2];
        let ratio = se4 / se5;
        assert!(
            (ratio - 10f64.sqrt()).abs() < 0.2 * 10f64.sqrt(),
            "se ratio {ratio}"
        );
    }

    #[test]
    fn near_certain_commitment_produces_no_events() {
        let p = params();
        let priors = Priors::new(0.999_999, 0.999_999, 0.999_999).unwrap();
        let eq = solve_trilateral(&priors, &p).unwrap();
        let out = simulate(&eq, &priors, &p, 200, 3);
        assert!(out.est_payoffs.iter().all(|v| *v == 0.0));
        assert!(out.event_log_sample.iter().all(|t| t.events.is_empty()));
    }

    #[test]
    fn traces_record_center_global_concession() {
        let (priors, p, eq) = reference();
        let out = simulate_with_log(&eq, &priors, &p, 512, 1, 512);
        let mut saw_center_first = false;
        for trace in &out.event_log_sample {
            if let Some(first) = trace
                .events
                .iter()
                .min_by(|a, b| a.t.partial_cmp(&b.t).unwrap())
            {
                if first.conceder == 2 && !first.split {
                    saw_center_first = true;
                    let ts: Vec<f64> = trace
                        .events
                        .iter()
                        .filter(|e| e.conceder == 2)
                        .map(|e| e.t)
                        .collect();
                    assert_eq!(ts.len(), 2);
                    assert_eq!(ts[0], ts[1]);
                }
            }
        }
        assert!(saw_center_first, "expected at least one center-first trace");
    }
}
