//! Run configuration: a single TOML document mirrored by command-line flags.
//! Flags override config-file fields; the file covers what flags cannot
//! (multiple prior vectors per run).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Solve,
    Compare,
    Sweep,
    Simulate,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Bilateral,
    Trilateral,
    Sequential,
    Partial,
    Star4,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Bilateral => "bilateral",
            ModelKind::Trilateral => "trilateral",
            ModelKind::Sequential => "sequential",
            ModelKind::Partial => "partial",
            ModelKind::Star4 => "star4",
        }
    }

    /// Required number of entries in each prior vector.
    pub fn prior_len(self) -> usize {
        match self {
            ModelKind::Bilateral => 2,
            ModelKind::Trilateral | ModelKind::Sequential => 3,
            ModelKind::Partial => 1,
            ModelKind::Star4 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FormatKind {
    Csv,
    Json,
}

/// Game primitives; rates are per unit time, shares dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsConfig {
    /// Discount rate per unit time.
    pub r: f64,
    /// Winner share in (1/2, 1).
    pub alpha: f64,
    /// Surplus of the first peripheral's negotiation.
    pub pi_ac: f64,
    /// Surplus of the second peripheral's negotiation.
    pub pi_bc: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            r: 1.0,
            alpha: 0.7,
            pi_ac: 1.0,
            pi_bc: 1.0,
        }
    }
}

/// One swept parameter over an inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    /// One of: r, alpha, pi_ac, pi_bc, z_a, z_b, z_c, z_center.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: FormatKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: ModelKind,
    pub params: ParamsConfig,
    /// One or more prior vectors; length must match the model.
    pub priors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Root seed for simulation.
    #[serde(default)]
    pub seed: u64,
    /// Replication count; only meaningful with `simulate`.
    #[serde(default)]
    pub n: u64,
    /// Grid size for trajectories and verification.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Verification tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_grid() -> usize {
    512
}

fn default_tol() -> f64 {
    1e-4
}

impl RunConfig {
    pub fn new(command: CommandKind, model: ModelKind) -> Self {
        RunConfig {
            command,
            model,
            params: ParamsConfig::default(),
            priors: Vec::new(),
            sweep: None,
            output: None,
            seed: 0,
            n: 0,
            grid: default_grid(),
            tol: default_tol(),
        }
    }

    /// Structural checks that do not require solving anything.
    pub fn validate(&self) -> Result<(), String> {
        if self.priors.is_empty() {
            return Err("no prior vector given (use --z or a config file)".into());
        }
        let want = self.model.prior_len();
        for (k, z) in self.priors.iter().enumerate() {
            // The partial-observability model optionally takes a second entry:
            // the center's own prior, for the implied-atom report.
            let ok = z.len() == want
                || (self.model == ModelKind::Partial && z.len() == 2);
            if !ok {
                return Err(format!(
                    "prior vector #{k} has {} entries; model {} needs {want}",
                    z.len(),
                    self.model.name()
                ));
            }
        }
        match self.command {
            CommandKind::Sweep => {
                let axis = self
                    .sweep
                    .as_ref()
                    .ok_or("sweep requires a parameter axis (--param/--range/--steps)")?;
                if axis.steps < 2 {
                    return Err("sweep needs at least 2 steps".into());
                }
                parse_sweep_parameter(&axis.parameter, self.model)?;
            }
            _ => {
                if self.sweep.is_some() {
                    return Err("a sweep axis is only valid with the sweep command".into());
                }
            }
        }
        if self.command == CommandKind::Simulate {
            if self.n == 0 {
                return Err("simulate requires --n >= 1".into());
            }
        } else if self.n != 0 {
            return Err("--n is only valid with the simulate command".into());
        }
        if self.grid < 2 {
            return Err("--grid must be at least 2".into());
        }
        if !(self.tol > 0.0) {
            return Err("--tol must be positive".into());
        }
        Ok(())
    }
}

/// Which scalar a sweep axis addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    R,
    Alpha,
    PiAc,
    PiBc,
    /// Index into the prior vector.
    Prior(usize),
}

pub fn parse_sweep_parameter(name: &str, model: ModelKind) -> Result<SweepParam, String> {
    let p = match name.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "r" => SweepParam::R,
        "alpha" => SweepParam::Alpha,
        "pi_ac" => SweepParam::PiAc,
        "pi_bc" => SweepParam::PiBc,
        "z_a" | "z_1" => SweepParam::Prior(0),
        "z_b" | "z_2" => SweepParam::Prior(1),
        "z_c" | "z_3" => SweepParam::Prior(2),
        "z_center" | "z_4" => SweepParam::Prior(3),
        other => return Err(format!("unknown sweep parameter '{other}'")),
    };
    if let SweepParam::Prior(i) = p {
        if i >= model.prior_len() {
            return Err(format!(
                "prior index {} out of range for model {}",
                i + 1,
                model.name()
            ));
        }
    }
    Ok(p)
}
