//! The unique equilibrium of the simultaneous three-player game.
//!
//! One case classification drives everything. If the center is at least as
//! reputable as both peripherals, posteriors reconcile immediately at time 0
//! through peripheral atoms and play is the benchmark in each negotiation. If
//! a peripheral is strictly dominant, there is an initial two-player phase in
//! which the dominant peripheral waits while the other peripheral concedes at
//! an accelerated rate; a single time-0 atom (by the center or by the weak
//! peripheral, whichever would otherwise arrive late) aligns posteriors
//! exactly when the dominant peripheral activates. After alignment everyone
//! concedes at the benchmark hazard until the common terminal time.
//!
//! Pies enter the initial-phase formulas only through the ratio of the
//! dominant peripheral's pie to the weak peripheral's pie, so both surpluses
//! may be arbitrary positive numbers.

use serde::{Deserialize, Serialize};

use crate::bilateral::benchmark_payoff;
use crate::error::{Error, Result};
use crate::params::{validate, GameParams, Player, Priors, PRIOR_TIE_TOL};
use crate::profile::{ConcessionProfile, HazardSegment, PosteriorPath};
use crate::verify::deviation_payoff_peripheral;

/// Equilibrium regime. "Dominant" tags refer to the relabeled game in which
/// the dominant peripheral has the strictly highest prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// Center weakly most reputable: peripherals atom up to the center's
    /// prior, benchmark play from time 0.
    CenterStrongest,
    /// Both peripherals tied strictly above the center: the center atoms.
    PeripheralsTieAboveCenter,
    /// All three priors tied: no atoms.
    AllEqual,
    /// Dominant peripheral with the center (weakly) least reputable: the
    /// center atoms.
    DominantCenterWeakest,
    /// Dominant peripheral, center prior strictly in the middle, center
    /// arrives late absent atoms: the center atoms.
    DominantCenterAtom,
    /// Dominant peripheral, center prior strictly in the middle, weak
    /// peripheral arrives late absent atoms: the weak peripheral atoms.
    DominantSideAtom,
    /// Dominant peripheral with tied catch-up times: no atom.
    DominantBalanced,
}

impl CaseTag {
    pub fn has_dominant_peripheral(self) -> bool {
        matches!(
            self,
            CaseTag::DominantCenterWeakest
                | CaseTag::DominantCenterAtom
                | CaseTag::DominantSideAtom
                | CaseTag::DominantBalanced
        )
    }
}

/// Times at which the two initially active players would reach the dominant
/// peripheral's prior under the initial-phase hazards with no time-0 atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatchUpTimes {
    /// Catch-up time of the center (hazard equal to the benchmark rate).
    pub center: f64,
    /// Catch-up time of the weak peripheral (accelerated hazard).
    pub weak_peripheral: f64,
}

/// Solved three-player equilibrium, reported in the original player labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriEquilibrium {
    pub case: CaseTag,
    /// Dominant peripheral in the original labeling, when one exists.
    pub dominant: Option<Player>,
    /// Time-0 concession probability per player (A, B, C).
    pub atoms: [f64; 3],
    /// Activation time of the dominant peripheral; 0 when there is no initial
    /// phase.
    pub t_star: f64,
    /// Common terminal time at which all posteriors reach 1.
    pub terminal: f64,
    /// Common posterior level at the moment all three players are active.
    pub aligned_level: f64,
    /// Concession-time distribution per player (A, B, C).
    pub profiles: [ConcessionProfile; 3],
    /// Time-0 rational payoffs (A, B, C).
    pub payoffs: [f64; 3],
}

impl TriEquilibrium {
    pub fn posterior_path(&self, player: Player, priors: &Priors) -> PosteriorPath {
        PosteriorPath::new(priors.get(player), self.profiles[player.index()].clone())
    }
}

/// Internal relabeling so the dominant-peripheral formulas can assume the
/// first peripheral has the weakly higher prior.
struct Roles {
    top: Player,
    low: Player,
    z_top: f64,
    z_low: f64,
    z_center: f64,
    /// Pie ratio `pie_top / pie_low`; the initial-phase hazard of the weak
    /// peripheral is `(1 + rho)` times the benchmark hazard.
    rho: f64,
}

fn roles(priors: &Priors, params: &GameParams) -> Roles {
    let (top, low) = if priors.z_a >= priors.z_b {
        (Player::A, Player::B)
    } else {
        (Player::B, Player::A)
    };
    Roles {
        top,
        low,
        z_top: priors.get(top),
        z_low: priors.get(low),
        z_center: priors.z_c,
        rho: params.pie(top) / params.pie(low),
    }
}

fn classify_roles(ro: &Roles, params: &GameParams) -> CaseTag {
    let (za, zb, zc) = (ro.z_top, ro.z_low, ro.z_center);
    let all_equal = (za - zb).abs() <= PRIOR_TIE_TOL
        && (za - zc).abs() <= PRIOR_TIE_TOL
        && (zb - zc).abs() <= PRIOR_TIE_TOL;
    if all_equal {
        return CaseTag::AllEqual;
    }
    if zc >= za - PRIOR_TIE_TOL {
        return CaseTag::CenterStrongest;
    }
    if (za - zb).abs() <= PRIOR_TIE_TOL {
        return CaseTag::PeripheralsTieAboveCenter;
    }
    // One peripheral strictly dominates.
    if zc <= zb + PRIOR_TIE_TOL {
        return CaseTag::DominantCenterWeakest;
    }
    let cu = catch_up(ro, params);
    if (cu.center - cu.weak_peripheral).abs() <= PRIOR_TIE_TOL {
        CaseTag::DominantBalanced
    } else if cu.center > cu.weak_peripheral {
        CaseTag::DominantCenterAtom
    } else {
        CaseTag::DominantSideAtom
    }
}

fn catch_up(ro: &Roles, params: &GameParams) -> CatchUpTimes {
    let lam = params.benchmark_hazard();
    CatchUpTimes {
        center: (ro.z_top / ro.z_center).ln() / lam,
        weak_peripheral: (ro.z_top / ro.z_low).ln() / ((1.0 + ro.rho) * lam),
    }
}

/// Catch-up times of the center and the weak peripheral. Requires a strictly
/// dominant peripheral.
pub fn catch_up_times(priors: &Priors, params: &GameParams) -> Result<CatchUpTimes> {
    validate(params, priors)?;
    let ro = roles(priors, params);
    if !(ro.z_top > ro.z_low + PRIOR_TIE_TOL && ro.z_top > ro.z_center + PRIOR_TIE_TOL) {
        return Err(Error::NotDominantPeripheral);
    }
    Ok(catch_up(&ro, params))
}

/// Deterministic case classification under the documented tie tolerance.
pub fn classify_case(priors: &Priors, params: &GameParams) -> Result<CaseTag> {
    validate(params, priors)?;
    Ok(classify_roles(&roles(priors, params), params))
}

/// Structure of the solution before payoffs: atoms, phase times, profiles.
pub(crate) struct TriStructure {
    pub case: CaseTag,
    pub dominant: Option<Player>,
    pub atoms: [f64; 3],
    pub t_star: f64,
    pub terminal: f64,
    pub aligned_level: f64,
    pub profiles: [ConcessionProfile; 3],
}

pub(crate) fn solve_structure(priors: &Priors, params: &GameParams) -> Result<TriStructure> {
    validate(params, priors)?;
    let ro = roles(priors, params);
    let case = classify_roles(&ro, params);
    let lam = params.benchmark_hazard();

    let mut atoms = [0.0f64; 3];
    let (t_star, terminal, aligned_level, dominant);

    match case {
        CaseTag::AllEqual => {
            t_star = 0.0;
            aligned_level = ro.z_top;
            terminal = -aligned_level.ln() / lam;
            dominant = None;
        }
        CaseTag::CenterStrongest => {
            aligned_level = ro.z_center;
            t_star = 0.0;
            terminal = -aligned_level.ln() / lam;
            for p in Player::PERIPHERALS {
                atoms[p.index()] = (1.0 - priors.get(p) / ro.z_center).max(0.0);
            }
            dominant = None;
        }
        CaseTag::PeripheralsTieAboveCenter => {
            aligned_level = ro.z_top;
            t_star = 0.0;
            terminal = -aligned_level.ln() / lam;
            atoms[Player::C.index()] = 1.0 - ro.z_center / ro.z_top;
            dominant = None;
        }
        CaseTag::DominantCenterWeakest
        | CaseTag::DominantCenterAtom
        | CaseTag::DominantSideAtom
        | CaseTag::DominantBalanced => {
            let cu = catch_up(&ro, params);
            aligned_level = ro.z_top;
            dominant = Some(ro.top);
            match case {
                CaseTag::DominantSideAtom => {
                    // The weak peripheral is the laggard: its atom makes it
                    // reach the dominant prior exactly at the center's
                    // catch-up time.
                    t_star = cu.center;
                    let atom =
                        1.0 - ro.z_low * ro.z_top.powf(ro.rho) / ro.z_center.powf(1.0 + ro.rho);
                    atoms[ro.low.index()] = atom;
                }
                CaseTag::DominantBalanced => {
                    t_star = cu.weak_peripheral;
                }
                _ => {
                    // The center is the laggard: the atom lifts its posterior
                    // so it aligns at the weak peripheral's catch-up time.
                    t_star = cu.weak_peripheral;
                    let z_c_plus = ro.z_top.powf(ro.rho / (1.0 + ro.rho))
                        * ro.z_low.powf(1.0 / (1.0 + ro.rho));
                    atoms[Player::C.index()] = 1.0 - ro.z_center / z_c_plus;
                }
            }
            terminal = t_star + (1.0 / ro.z_top).ln() / lam;
        }
    }

    let profiles = build_profiles(&ro, case, &atoms, t_star, terminal, lam, params);
    Ok(TriStructure {
        case,
        dominant,
        atoms,
        t_star,
        terminal,
        aligned_level,
        profiles,
    })
}

fn build_profiles(
    ro: &Roles,
    case: CaseTag,
    atoms: &[f64; 3],
    t_star: f64,
    terminal: f64,
    lam: f64,
    _params: &GameParams,
) -> [ConcessionProfile; 3] {
    let constant = |atom: f64| {
        ConcessionProfile::constant(atom, lam, terminal).expect("valid single-phase profile")
    };
    if !case.has_dominant_peripheral() || t_star <= 0.0 {
        return [constant(atoms[0]), constant(atoms[1]), constant(atoms[2])];
    }
    let two_phase = |atom: f64, first_rate: f64| {
        ConcessionProfile::new(
            atom,
            vec![
                HazardSegment::new(0.0, t_star, first_rate),
                HazardSegment::new(t_star, terminal, lam),
            ],
        )
        .expect("valid two-phase profile")
    };
    let mut out: [Option<ConcessionProfile>; 3] = [None, None, None];
    out[ro.top.index()] = Some(two_phase(0.0, 0.0));
    out[ro.low.index()] = Some(two_phase(atoms[ro.low.index()], (1.0 + ro.rho) * lam));
    out[Player::C.index()] = Some(constant(atoms[Player::C.index()]));
    out.map(|p| p.unwrap())
}

/// Closed-form payoffs per player; `None` where only quadrature applies (the
/// dominant peripheral in the initial-phase cases).
pub(crate) fn closed_payoffs(
    st: &TriStructure,
    priors: &Priors,
    params: &GameParams,
) -> [Option<f64>; 3] {
    let alpha = params.alpha;
    let bench = |p: Player| benchmark_payoff(params.pie(p), priors.get(p), priors.z_c, params);
    let bench_center = benchmark_payoff(params.pi_ac, priors.z_c, priors.z_a, params)
        + benchmark_payoff(params.pi_bc, priors.z_c, priors.z_b, params);
    let surrender_center = (1.0 - alpha) * (params.pi_ac + params.pi_bc);

    match st.case {
        CaseTag::CenterStrongest | CaseTag::PeripheralsTieAboveCenter | CaseTag::AllEqual => [
            Some(bench(Player::A)),
            Some(bench(Player::B)),
            Some(bench_center),
        ],
        _ => {
            let dom = st.dominant.expect("dominant case");
            let low = dom.other_peripheral();
            let pie_low = params.pie(low);
            let mut out = [None, None, None];
            let atom_c = st.atoms[Player::C.index()];
            let atom_low = st.atoms[low.index()];
            if atom_low > 0.0 {
                // Weak peripheral atoms: indifferent at 0, center collects the
                // strong-side premium from that atom.
                out[low.index()] = Some((1.0 - alpha) * pie_low);
                out[Player::C.index()] =
                    Some(surrender_center + (2.0 * alpha - 1.0) * pie_low * atom_low);
            } else {
                // Center atoms (or nobody does): center indifferent at 0, the
                // weak peripheral collects the center's atom.
                out[low.index()] = Some(pie_low * ((1.0 - alpha) + (2.0 * alpha - 1.0) * atom_c));
                out[Player::C.index()] = Some(surrender_center);
            }
            out
        }
    }
}

/// Default absolute tolerance for the dominant peripheral's payoff
/// quadrature.
pub const PAYOFF_QUAD_TOL: f64 = 1e-9;

/// Solves the three-player game: case, atoms, phase times, concession
/// profiles, and analytic payoffs.
pub fn solve_trilateral(priors: &Priors, params: &GameParams) -> Result<TriEquilibrium> {
    let st = solve_structure(priors, params)?;
    let closed = closed_payoffs(&st, priors, params);
    let mut payoffs = [0.0f64; 3];
    for (idx, v) in closed.iter().enumerate() {
        payoffs[idx] = match v {
            Some(v) => *v,
            None => {
                let player = Player::from_index(idx);
                deviation_payoff_peripheral(
                    player,
                    st.t_star,
                    &st.profiles,
                    priors,
                    params,
                    PAYOFF_QUAD_TOL,
                )?
            }
        };
    }
    Ok(TriEquilibrium {
        case: st.case,
        dominant: st.dominant,
        atoms: st.atoms,
        t_star: st.t_star,
        terminal: st.terminal,
        aligned_level: st.aligned_level,
        profiles: st.profiles,
        payoffs,
    })
}

/// Recomputes the analytic payoffs of a solved equilibrium (closed forms
/// where available, quadrature for the dominant peripheral).
pub fn payoffs_analytic(
    eq: &TriEquilibrium,
    priors: &Priors,
    params: &GameParams,
) -> Result<[f64; 3]> {
    let st = solve_structure(priors, params)?;
    let closed = closed_payoffs(&st, priors, params);
    let mut payoffs = [0.0f64; 3];
    for (idx, v) in closed.iter().enumerate() {
        payoffs[idx] = match v {
            Some(v) => *v,
            None => deviation_payoff_peripheral(
                Player::from_index(idx),
                eq.t_star,
                &eq.profiles,
                priors,
                params,
                PAYOFF_QUAD_TOL,
            )?,
        };
    }
    Ok(payoffs)
}

/// Per-player equilibrium-minus-benchmark payoff differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkComparison {
    pub case: CaseTag,
    pub dominant: Option<Player>,
    /// Benchmark payoffs (A, B, C): each peripheral against the center in
    /// isolation; the center summed over both negotiations.
    pub benchmark: [f64; 3],
    pub equilibrium: [f64; 3],
    /// `equilibrium - benchmark` per player.
    pub deltas: [f64; 3],
}

/// Compares equilibrium payoffs with two isolated bilateral negotiations.
pub fn compare_to_benchmark(priors: &Priors, params: &GameParams) -> Result<BenchmarkComparison> {
    let eq = solve_trilateral(priors, params)?;
    let benchmark = [
        benchmark_payoff(params.pi_ac, priors.z_a, priors.z_c, params),
        benchmark_payoff(params.pi_bc, priors.z_b, priors.z_c, params),
        benchmark_payoff(params.pi_ac, priors.z_c, priors.z_a, params)
            + benchmark_payoff(params.pi_bc, priors.z_c, priors.z_b, params),
    ];
    let mut deltas = [0.0f64; 3];
    for i in 0..3 {
        deltas[i] = eq.payoffs[i] - benchmark[i];
    }
    Ok(BenchmarkComparison {
        case: eq.case,
        dominant: eq.dominant,
        benchmark,
        equilibrium: eq.payoffs,
        deltas,
    })
}

/// Limits as all priors vanish with fixed ratios `kappa_a = z_top/z_center`
/// and `kappa_b = z_center/z_low`, with both pies equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanishingLimit {
    /// Limit of the center's benchmark-sum payoff minus its equilibrium
    /// payoff; strictly positive.
    pub center_gap: f64,
    /// Limit payoff of the weak peripheral.
    pub v_weak_peripheral: f64,
    /// Limit payoff of the center.
    pub v_center: f64,
}

/// Vanishing-prior limit with fixed relative reputations. Requires both pies
/// equal to 1 and `kappa_a, kappa_b > 1`.
pub fn vanishing_limit(kappa_a: f64, kappa_b: f64, params: &GameParams) -> Result<VanishingLimit> {
    params.validate()?;
    if (params.pi_ac - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange {
            field: "pi_ac",
            value: params.pi_ac,
            expected: "pi_ac = 1 in the vanishing-prior limit",
        });
    }
    if (params.pi_bc - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange {
            field: "pi_bc",
            value: params.pi_bc,
            expected: "pi_bc = 1 in the vanishing-prior limit",
        });
    }
    for (field, k) in [("kappa_a", kappa_a), ("kappa_b", kappa_b)] {
        if !(k > 1.0) || !k.is_finite() {
            return Err(Error::OutOfRange {
                field,
                value: k,
                expected: "kappa > 1",
            });
        }
    }
    let alpha = params.alpha;
    let spread = 2.0 * alpha - 1.0;
    let center_gap = spread * (kappa_a.min(kappa_b) - 1.0) / kappa_b;
    let (v_weak_peripheral, v_center) = if kappa_a > kappa_b {
        (
            alpha - spread * (kappa_b / kappa_a).sqrt(),
            2.0 * (1.0 - alpha),
        )
    } else {
        (
            1.0 - alpha,
            2.0 * (1.0 - alpha) + spread * (1.0 - kappa_a / kappa_b),
        )
    };
    Ok(VanishingLimit {
        center_gap,
        v_weak_peripheral,
        v_center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pi_ac: f64) -> GameParams {
        GameParams::new(1.0, 0.7, pi_ac, 1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn catch_up_reference_instances() {
        let p = params(2.0);
        let cu = catch_up_times(&Priors::new(0.6, 0.1, 0.2).unwrap(), &p).unwrap();
        assert!(close(cu.center, 3f64.ln() / 0.75, 1e-12));
        assert!(close(cu.weak_peripheral, 6f64.ln() / 2.25, 1e-12));
        assert!(close(cu.weak_peripheral, 0.7964, 1e-4));

        let cu = catch_up_times(&Priors::new(0.5, 0.1, 0.4).unwrap(), &p).unwrap();
        assert!(close(cu.center, 0.2975, 1e-4));
        assert!(close(cu.weak_peripheral, 0.7153, 1e-4));
    }

    #[test]
    fn catch_up_requires_dominance() {
        let p = params(2.0);
        let err = catch_up_times(&Priors::new(0.3, 0.3, 0.5).unwrap(), &p).unwrap_err();
        assert_eq!(err, Error::NotDominantPeripheral);
    }

    #[test]
    fn catch_up_times_coincide_for_tied_laggards() {
        // z_low = z_center and pie ratio near zero makes both formulas agree.
        let p = GameParams::new(1.0, 0.7, 1e-9, 1.0).unwrap();
        let cu = catch_up_times(&Priors::new(0.5, 0.2, 0.2).unwrap(), &p).unwrap();
        assert!(close(cu.center, cu.weak_peripheral, 1e-6));
    }

    #[test]
    fn classification_reference_instances() {
        let p = params(2.0);
        let case =
            |z: (f64, f64, f64)| classify_case(&Priors::new(z.0, z.1, z.2).unwrap(), &p).unwrap();
        assert_eq!(case((0.3, 0.3, 0.5)), CaseTag::CenterStrongest);
        assert_eq!(case((0.5, 0.2, 0.1)), CaseTag::DominantCenterWeakest);
        assert_eq!(case((0.5, 0.1, 0.2)), CaseTag::DominantCenterAtom);
        assert_eq!(case((0.5, 0.1, 0.4)), CaseTag::DominantSideAtom);
        assert_eq!(case((0.5, 0.5, 0.5)), CaseTag::AllEqual);
        assert_eq!(case((0.4, 0.4, 0.2)), CaseTag::PeripheralsTieAboveCenter);
        // Dominant peripheral may be B; the pie ratio travels with the labels,
        // so with pi_ac = 2 the dominant B has the *smaller* pie and the
        // laggard flips relative to the mirrored A-dominant instance.
        assert_eq!(case((0.1, 0.5, 0.2)), CaseTag::DominantSideAtom);
        let p1 = GameParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
        let sym =
            |z: (f64, f64, f64)| classify_case(&Priors::new(z.0, z.1, z.2).unwrap(), &p1).unwrap();
        // With equal pies, classification is label-symmetric.
        assert_eq!(sym((0.5, 0.1, 0.2)), sym((0.1, 0.5, 0.2)));
    }

    #[test]
    fn solve_center_atom_instance() {
        let p = params(2.0);
        let priors = Priors::new(0.6, 0.1, 0.2).unwrap();
        let eq = solve_trilateral(&priors, &p).unwrap();
        assert_eq!(eq.case, CaseTag::DominantCenterAtom);
        assert_eq!(eq.dominant, Some(Player::A));
        let z_c_plus = 0.2 / (1.0 - eq.atoms[2]);
        assert!(close(z_c_plus, 0.330, 5e-4));
        assert!(close(eq.atoms[2], 0.3943, 5e-4));
        assert!(close(eq.t_star, 0.796, 5e-4));
        assert!(close(eq.terminal, 1.477, 5e-4));
        // Payoffs: the center is indifferent at 0; the weak peripheral
        // collects the atom.
        assert!(close(eq.payoffs[2], 0.9, 1e-12));
        assert!(close(eq.payoffs[1], 0.3 + 0.4 * eq.atoms[2], 1e-12));
        // Dominant peripheral strictly below its benchmark.
        let bench_a = benchmark_payoff(2.0, 0.6, 0.2, &p);
        assert!(close(bench_a, 0.6 + 0.8 * (2.0 / 3.0), 1e-12));
        assert!(eq.payoffs[0] < bench_a);
        assert!(eq.payoffs[0] > (1.0 - p.alpha) * p.pi_ac);
    }

    #[test]
    fn solve_side_atom_instance() {
        let p = params(2.0);
        let priors = Priors::new(0.5, 0.1, 0.4).unwrap();
        let eq = solve_trilateral(&priors, &p).unwrap();
        assert_eq!(eq.case, CaseTag::DominantSideAtom);
        assert!(close(eq.atoms[1], 0.609375, 1e-12));
        let z_b_plus = 0.1 / (1.0 - eq.atoms[1]);
        assert!(close(z_b_plus, 0.256, 5e-4));
        assert!(close(eq.t_star, 0.2975, 5e-4));
        assert!(close(eq.terminal, 1.2217, 5e-4));
        assert!(close(eq.payoffs[1], 0.3, 1e-12));
        assert!(close(eq.payoffs[2], 0.9 + 0.4 * 0.609375, 1e-12));
    }

    #[test]
    fn solve_center_weakest_instance() {
        let p = params(2.0);
        let priors = Priors::new(0.5, 0.2, 0.1).unwrap();
        let eq = solve_trilateral(&priors, &p).unwrap();
        assert_eq!(eq.case, CaseTag::DominantCenterWeakest);
        let z_c_plus = 0.1 / (1.0 - eq.atoms[2]);
        assert!(close(z_c_plus, 0.3684, 5e-4));
        assert!(close(eq.t_star, 0.4072, 5e-4));
        assert!(close(eq.terminal, 1.3314, 5e-4));
        // Center earns exactly its benchmark sum here.
        assert!(close(eq.payoffs[2], 0.9, 1e-12));
    }

    #[test]
    fn solve_symmetric_instance() {
        let p = params(2.0);
        let eq = solve_trilateral(&Priors::new(0.5, 0.5, 0.5).unwrap(), &p).unwrap();
        assert_eq!(eq.case, CaseTag::AllEqual);
        assert_eq!(eq.atoms, [0.0, 0.0, 0.0]);
        assert!(close(eq.terminal, -(0.5f64.ln()) / 0.75, 1e-12));
        assert!(close(eq.terminal, 0.9242, 1e-4));
    }

    #[test]
    fn solve_center_strongest_instance() {
        let p = params(2.0);
        let eq = solve_trilateral(&Priors::new(0.3, 0.1, 0.5).unwrap(), &p).unwrap();
        assert_eq!(eq.case, CaseTag::CenterStrongest);
        assert!(close(eq.atoms[0], 0.4, 1e-12));
        assert!(close(eq.atoms[1], 0.8, 1e-12));
        assert_eq!(eq.atoms[2], 0.0);
        assert!(close(eq.terminal, 0.9242, 1e-4));
        // Payoff-irrelevant spillovers: everyone at benchmark.
        let cmp = compare_to_benchmark(&Priors::new(0.3, 0.1, 0.5).unwrap(), &p).unwrap();
        for d in cmp.deltas {
            assert!(d.abs() <= 1e-9);
        }
    }

    #[test]
    fn rational_mass_exhausted_at_terminal() {
        let p = params(2.0);
        for z in [
            (0.6, 0.1, 0.2),
            (0.5, 0.1, 0.4),
            (0.5, 0.2, 0.1),
            (0.3, 0.3, 0.5),
            (0.5, 0.5, 0.5),
        ] {
            let priors = Priors::new(z.0, z.1, z.2).unwrap();
            let eq = solve_trilateral(&priors, &p).unwrap();
            for (i, player) in Player::ALL.iter().enumerate() {
                let f_t = eq.profiles[i].cdf_at(eq.terminal);
                assert!(
                    close(f_t, 1.0 - priors.get(*player), 1e-9),
                    "mass mismatch for {player} at {z:?}"
                );
            }
        }
    }

    #[test]
    fn posterior_alignment_after_activation() {
        let p = params(2.0);
        let priors = Priors::new(0.6, 0.1, 0.2).unwrap();
        let eq = solve_trilateral(&priors, &p).unwrap();
        for k in 0..=100 {
            let t = eq.t_star + (eq.terminal - eq.t_star) * k as f64 / 100.0;
            let zs: Vec<f64> = Player::ALL
                .iter()
                .map(|pl| eq.posterior_path(*pl, &priors).posterior_at(t).unwrap())
                .collect();
            for w in zs.windows(2) {
                assert!(close(w[0], w[1], 1e-9), "misaligned at t={t}: {zs:?}");
            }
        }
    }

    #[test]
    fn atom_vanishes_continuously_at_branch_boundary() {
        // Move the center prior across the balanced boundary and watch the
        // atom size shrink to zero on both sides.
        let p = params(2.0);
        let za = 0.5f64;
        let zb = 0.1f64;
        // Balanced point: catch-up times equal <=> z_c = za^(rho/(1+rho)) * zb^(1/(1+rho))
        let zc_star = za.powf(2.0 / 3.0) * zb.powf(1.0 / 3.0);
        for eps in [1e-3, 1e-5, 1e-7] {
            let eq_lo = solve_trilateral(&Priors::new(za, zb, zc_star - eps).unwrap(), &p).unwrap();
            let eq_hi = solve_trilateral(&Priors::new(za, zb, zc_star + eps).unwrap(), &p).unwrap();
            let atom_lo = eq_lo.atoms.iter().cloned().fold(0.0, f64::max);
            let atom_hi = eq_hi.atoms.iter().cloned().fold(0.0, f64::max);
            assert!(atom_lo < 20.0 * eps, "atom {atom_lo} too big at eps {eps}");
            assert!(atom_hi < 20.0 * eps, "atom {atom_hi} too big at eps {eps}");
        }
    }

    #[test]
    fn center_atom_monotone_in_pie_ratio() {
        // Center-atom size strictly increases with the dominant pie.
        let priors = Priors::new(0.6, 0.1, 0.2).unwrap();
        let mut last = -1.0;
        for k in 0..=30 {
            let pie = 1.0 + 3.0 * k as f64 / 30.0;
            let eq = solve_trilateral(&priors, &params(pie)).unwrap();
            assert!(eq.atoms[2] > last);
            last = eq.atoms[2];
        }
    }

    #[test]
    fn side_atom_monotone_decreasing_in_pie_ratio() {
        let priors = Priors::new(0.5, 0.1, 0.4).unwrap();
        let mut last = 2.0;
        for k in 0..=30 {
            let pie = 1.0 + 3.0 * k as f64 / 30.0;
            let eq = solve_trilateral(&priors, &params(pie)).unwrap();
            assert_eq!(eq.case, CaseTag::DominantSideAtom);
            assert!(eq.atoms[1] < last);
            last = eq.atoms[1];
        }
    }

    #[test]
    fn payoffs_analytic_reproduces_solver_payoffs() {
        let p = params(2.0);
        for z in [(0.6, 0.1, 0.2), (0.5, 0.1, 0.4), (0.3, 0.3, 0.5)] {
            let priors = Priors::new(z.0, z.1, z.2).unwrap();
            let eq = solve_trilateral(&priors, &p).unwrap();
            let again = payoffs_analytic(&eq, &priors, &p).unwrap();
            for i in 0..3 {
                assert!(close(eq.payoffs[i], again[i], 1e-12));
            }
        }
    }

    #[test]
    fn benchmark_comparison_center_atom_case() {
        let p = params(2.0);
        let cmp = compare_to_benchmark(&Priors::new(0.6, 0.1, 0.2).unwrap(), &p).unwrap();
        assert!(close(cmp.deltas[2], -0.2, 1e-12));
        assert!(cmp.deltas[0] < 0.0);
        assert!(cmp.deltas[1] > 0.0);
    }

    #[test]
    fn benchmark_comparison_center_unchanged_when_weakest() {
        let p = params(2.0);
        let cmp = compare_to_benchmark(&Priors::new(0.5, 0.2, 0.1).unwrap(), &p).unwrap();
        assert!(close(cmp.deltas[2], 0.0, 1e-12));
        assert!(cmp.deltas[0] < 0.0);
        assert!(cmp.deltas[1] > 0.0);
    }

    #[test]
    fn vanishing_limit_reference_values() {
        let p = GameParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
        let lim = vanishing_limit(2.0, 1.5, &p).unwrap();
        assert!(close(lim.center_gap, 0.4 * 0.5 / 1.5, 1e-12));
        assert!(close(
            lim.v_weak_peripheral,
            0.7 - 0.4 * 0.75f64.sqrt(),
            1e-12
        ));
        assert!(close(lim.v_weak_peripheral, 0.35359, 1e-5));

        let lim_eq = vanishing_limit(1.5, 1.5, &p).unwrap();
        assert!(close(lim_eq.center_gap, 0.4 * 0.5 / 1.5, 1e-12));
        assert!(close(lim_eq.v_weak_peripheral, 0.3, 1e-12));
    }

    #[test]
    fn vanishing_limit_validates_inputs() {
        let p = GameParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
        assert!(matches!(
            vanishing_limit(0.9, 1.5, &p),
            Err(Error::OutOfRange {
                field: "kappa_a",
                ..
            })
        ));
        let p2 = GameParams::new(1.0, 0.7, 2.0, 1.0).unwrap();
        assert!(matches!(
            vanishing_limit(2.0, 1.5, &p2),
            Err(Error::OutOfRange { field: "pi_ac", .. })
        ));
    }

    #[test]
    fn finite_prior_solve_approaches_vanishing_limit() {
        let p = GameParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
        let lim = vanishing_limit(2.0, 1.5, &p).unwrap();
        let eps = 1e-4;
        let priors = Priors::new(3.0 * eps, eps, 1.5 * eps).unwrap();
        let cmp = compare_to_benchmark(&priors, &p).unwrap();
        assert!(close(-cmp.deltas[2], lim.center_gap, 1e-3));
        assert!(close(cmp.equilibrium[1], lim.v_weak_peripheral, 1e-3));
    }
}
