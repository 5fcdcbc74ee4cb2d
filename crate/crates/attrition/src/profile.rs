//! Concession-time distributions: a probability mass at time 0 followed by a
//! piecewise-constant hazard schedule up to a terminal time.
//!
//! Hazard schedules are stored as exact breakpoints and rates; every integral
//! of a piecewise-constant hazard downstream is evaluated in closed form
//! segment by segment, so no integration error enters where the structure is
//! exactly piecewise-constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One interval of constant hazard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardSegment {
    pub start: f64,
    pub end: f64,
    pub rate: f64,
}

impl HazardSegment {
    pub fn new(start: f64, end: f64, rate: f64) -> Self {
        HazardSegment { start, end, rate }
    }
}

/// Distribution of a player's concession time: an atom at `t = 0` plus a
/// contiguous piecewise-constant hazard schedule on `[0, terminal]`.
///
/// The implied cdf is `F(t) = 1 - (1 - atom0) * exp(-H(min(t, T)))` with `H`
/// the cumulative hazard; it is nondecreasing, right-continuous at 0
/// (`F(0) = atom0`), and constant past the terminal time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcessionProfile {
    atom0: f64,
    segments: Vec<HazardSegment>,
    terminal: f64,
}

impl ConcessionProfile {
    pub fn new(atom0: f64, segments: Vec<HazardSegment>) -> Result<Self> {
        if !(0.0..1.0).contains(&atom0) {
            return Err(Error::InvalidProfile {
                reason: "atom0 must lie in [0, 1)",
            });
        }
        if segments.is_empty() {
            return Err(Error::InvalidProfile {
                reason: "at least one hazard segment is required",
            });
        }
        if segments[0].start != 0.0 {
            return Err(Error::InvalidProfile {
                reason: "schedule must start at t = 0",
            });
        }
        let mut prev_end = 0.0;
        for seg in &segments {
            if !(seg.rate >= 0.0) || !seg.rate.is_finite() {
                return Err(Error::InvalidProfile {
                    reason: "hazard rates must be finite and nonnegative",
                });
            }
            if seg.start != prev_end {
                return Err(Error::InvalidProfile {
                    reason: "segments must be contiguous and non-overlapping",
                });
            }
            if !(seg.end > seg.start) {
                return Err(Error::InvalidProfile {
                    reason: "segments must have positive length",
                });
            }
            prev_end = seg.end;
        }
        Ok(ConcessionProfile {
            atom0,
            terminal: prev_end,
            segments,
        })
    }

    /// Single-rate schedule on `[0, terminal]`.
    pub fn constant(atom0: f64, rate: f64, terminal: f64) -> Result<Self> {
        ConcessionProfile::new(atom0, vec![HazardSegment::new(0.0, terminal, rate)])
    }

    pub fn atom0(&self) -> f64 {
        self.atom0
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    pub fn segments(&self) -> &[HazardSegment] {
        &self.segments
    }

    /// Integrated hazard on `[0, min(t, terminal)]`, exact segment by segment.
    pub fn cumulative_hazard(&self, t: f64) -> f64 {
        let t = t.min(self.terminal);
        let mut total = 0.0;
        for seg in &self.segments {
            if t <= seg.start {
                break;
            }
            total += seg.rate * (t.min(seg.end) - seg.start);
        }
        total
    }

    /// Hazard rate at `t`, using the right-continuous segment at breakpoints;
    /// zero past the terminal time.
    pub fn hazard_at(&self, t: f64) -> f64 {
        if t >= self.terminal {
            return 0.0;
        }
        for seg in &self.segments {
            if t >= seg.start && t < seg.end {
                return seg.rate;
            }
        }
        0.0
    }

    /// `F(t)`; right-continuous, so `cdf_at(0) = atom0`. Total on `t >= 0`.
    pub fn cdf_at(&self, t: f64) -> f64 {
        1.0 - self.survival(t)
    }

    /// `1 - F(t)`.
    pub fn survival(&self, t: f64) -> f64 {
        (1.0 - self.atom0) * (-self.cumulative_hazard(t)).exp()
    }

    /// Interior breakpoints of the schedule (segment boundaries in `(0, T)`).
    pub fn interior_breakpoints(&self) -> Vec<f64> {
        self.segments
            .iter()
            .map(|s| s.end)
            .filter(|&e| e < self.terminal)
            .collect()
    }
}

/// A prior together with the concession profile that drives its updates.
///
/// Along the no-concession path the posterior is `z(t) = prior / (1 - F(t))`,
/// equivalently `(prior / (1 - atom0)) * exp(H(t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorPath {
    pub prior: f64,
    pub profile: ConcessionProfile,
}

impl PosteriorPath {
    pub fn new(prior: f64, profile: ConcessionProfile) -> Self {
        PosteriorPath { prior, profile }
    }

    /// Posterior commitment probability at `t`, given no concession so far.
    pub fn posterior_at(&self, t: f64) -> Result<f64> {
        let surv = self.profile.survival(t);
        if surv <= 0.0 {
            return Err(Error::DegenerateBelief { t });
        }
        Ok(self.prior / surv)
    }

    /// Same posterior through the hazard-exponential form; used as an
    /// independent cross-check of `posterior_at`.
    pub fn posterior_via_hazard(&self, t: f64) -> f64 {
        self.prior / (1.0 - self.profile.atom0()) * self.profile.cumulative_hazard(t).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = core::f64::consts::LN_2;

    #[test]
    fn cdf_reaches_half_at_half_life() {
        // atom0 = 0, rate 0.75 on [0, ln2/0.75]: survival at the end is 1/2.
        let t_half = LN2 / 0.75;
        let p = ConcessionProfile::constant(0.0, 0.75, t_half).unwrap();
        assert!((p.cdf_at(t_half) - 0.5).abs() < 1e-15);
        // constant for t >= terminal
        assert!((p.cdf_at(10.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_right_continuous_at_zero() {
        let p = ConcessionProfile::constant(0.3943, 0.75, 1.0).unwrap();
        assert!((p.cdf_at(0.0) - 0.3943).abs() < 1e-15);
    }

    #[test]
    fn rejects_overlapping_segments() {
        let err = ConcessionProfile::new(
            0.0,
            vec![
                HazardSegment::new(0.0, 1.0, 0.5),
                HazardSegment::new(0.5, 2.0, 0.5),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidProfile { .. }));
    }

    #[test]
    fn rejects_atom_of_one() {
        let err = ConcessionProfile::constant(1.0, 0.5, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidProfile { .. }));
    }

    #[test]
    fn posterior_no_update_at_zero_without_atom() {
        let p = ConcessionProfile::constant(0.0, 0.75, 1.0).unwrap();
        let path = PosteriorPath::new(0.5, p);
        assert!((path.posterior_at(0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn posterior_reaches_reference_levels() {
        // prior 0.2 with atom lifting the time-0 posterior to ~0.330 and rate
        // 0.75 reaches ~0.6 at t = 0.796.
        let z0_plus = 0.6_f64.powf(2.0 / 3.0) * 0.1_f64.powf(1.0 / 3.0);
        let atom = 1.0 - 0.2 / z0_plus;
        let p = ConcessionProfile::constant(atom, 0.75, 2.0).unwrap();
        let path = PosteriorPath::new(0.2, p);
        let z = path.posterior_at(0.796).unwrap();
        assert!((z - 0.6).abs() < 1e-3);

        // prior 0.1 at rate 2.25 reaches ~0.5 at t = 0.7153.
        let p = ConcessionProfile::constant(0.0, 2.25, 2.0).unwrap();
        let path = PosteriorPath::new(0.1, p);
        let z = path.posterior_at(0.7153).unwrap();
        assert!((z - 0.5).abs() < 1e-3);
    }

    #[test]
    fn degenerate_belief_when_survival_underflows() {
        // Hazard mass large enough that the survival underflows to zero.
        let p = ConcessionProfile::constant(0.0, 800.0, 1.0).unwrap();
        let path = PosteriorPath::new(0.5, p);
        assert!(matches!(
            path.posterior_at(1.0),
            Err(Error::DegenerateBelief { .. })
        ));
    }

    #[test]
    fn posterior_formulas_agree() {
        let p = ConcessionProfile::new(
            0.25,
            vec![
                HazardSegment::new(0.0, 0.4, 2.25),
                HazardSegment::new(0.4, 1.3, 0.75),
            ],
        )
        .unwrap();
        let path = PosteriorPath::new(0.1, p);
        for k in 0..=130 {
            let t = k as f64 * 0.01;
            let a = path.posterior_at(t).unwrap();
            let b = path.posterior_via_hazard(t);
            assert!((a - b).abs() < 1e-12, "mismatch at t={t}: {a} vs {b}");
        }
    }
}
