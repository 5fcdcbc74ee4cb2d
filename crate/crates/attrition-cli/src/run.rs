//! Command execution: solve, compare, sweep, simulate, verify.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use attrition::bilateral::{self, BilateralEq};
use attrition::params::{GameParams, Player, Priors};
use attrition::partial_obs::{solve_partial_obs, PartialObsEq};
use attrition::sequential::{solve_sequential, SeqAtom, SeqEquilibrium};
use attrition::sim::{simulate_bilateral, simulate_star4, simulate_with_log, SimOutcome};
use attrition::star4::{solve_star4, star4_benchmark, Star4Equilibrium, Star4Priors, CENTER};
use attrition::trilateral::{compare_to_benchmark, solve_trilateral, TriEquilibrium};
use attrition::verify::{best_response_check, bilateral_best_response_check};

use crate::config::{
    parse_sweep_parameter, CommandKind, FormatKind, ModelKind, RunConfig, SweepParam,
};
use crate::output::{f9, write_trajectory, CsvWriter, TrajectoryRow};

pub enum RunError {
    Validation(String),
    Failure(String),
}

impl From<attrition::Error> for RunError {
    fn from(e: attrition::Error) -> Self {
        match e {
            attrition::Error::OutOfRange { .. } | attrition::Error::Unsupported(_) => {
                RunError::Validation(e.to_string())
            }
            other => RunError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failure(format!("io error: {e}"))
    }
}

fn game_params(cfg: &RunConfig) -> Result<GameParams, RunError> {
    Ok(GameParams::new(
        cfg.params.r,
        cfg.params.alpha,
        cfg.params.pi_ac,
        cfg.params.pi_bc,
    )?)
}

fn priors3(z: &[f64]) -> Result<Priors, RunError> {
    Ok(Priors::new(z[0], z[1], z[2])?)
}

fn priors4(z: &[f64]) -> Result<Star4Priors, RunError> {
    Ok(Star4Priors::new([z[0], z[1], z[2]], z[3])?)
}

fn fmt_vec(z: &[f64]) -> String {
    let items: Vec<String> = z.iter().map(|v| format!("{v}")).collect();
    format!("({})", items.join(","))
}

/// A solved instance with everything needed for summaries, trajectories, and
/// JSON emission.
enum Solved {
    Bilateral(BilateralEq),
    Trilateral(TriEquilibrium, Priors),
    Sequential(SeqEquilibrium, Priors),
    Partial(PartialObsEq),
    Star4(Box<Star4Equilibrium>),
}

fn solve_model(model: ModelKind, params: &GameParams, z: &[f64]) -> Result<Solved, RunError> {
    Ok(match model {
        ModelKind::Bilateral => {
            Solved::Bilateral(bilateral::solve(params.pi_ac, z[0], z[1], params)?)
        }
        ModelKind::Trilateral => {
            let priors = priors3(z)?;
            Solved::Trilateral(solve_trilateral(&priors, params)?, priors)
        }
        ModelKind::Sequential => {
            let priors = priors3(z)?;
            Solved::Sequential(solve_sequential(&priors, params)?, priors)
        }
        ModelKind::Partial => Solved::Partial(solve_partial_obs(z[0], params)?),
        ModelKind::Star4 => Solved::Star4(Box::new(solve_star4(&priors4(z)?, params)?)),
    })
}

impl Solved {
    fn summary(&self) -> String {
        match self {
            Solved::Bilateral(eq) => format!(
                "atom_weak={:.6} hazard={:.6} T={:.6} payoffs=({:.6},{:.6})",
                eq.atom_weak, eq.hazard, eq.terminal, eq.payoff_i, eq.payoff_j
            ),
            Solved::Trilateral(eq, _) => format!(
                "case={:?} atoms=({:.6},{:.6},{:.6}) t_star={:.6} T={:.6} v=({:.6},{:.6},{:.6})",
                eq.case,
                eq.atoms[0],
                eq.atoms[1],
                eq.atoms[2],
                eq.t_star,
                eq.terminal,
                eq.payoffs[0],
                eq.payoffs[1],
                eq.payoffs[2]
            ),
            Solved::Sequential(eq, _) => format!(
                "atom_holder={} atom={:.6} z_a_plus={:.6} z_c_plus={:.6} T={:.6} v=({:.6},{:.6},{:.6})",
                match eq.atom_holder {
                    Some(SeqAtom::Peripheral) => "A",
                    Some(SeqAtom::Center) => "C",
                    None => "none",
                },
                eq.atom_size,
                eq.z_a_plus,
                eq.z_c_plus,
                eq.terminal,
                eq.payoffs[0],
                eq.payoffs[1],
                eq.payoffs[2]
            ),
            Solved::Partial(eq) => format!(
                "h0={:.6} atom_center={:.6} T={:.6} v=({:.6},{:.6},{:.6}) step_check={:.2e}",
                eq.h0,
                eq.atom_center,
                eq.terminal,
                eq.payoffs[0],
                eq.payoffs[1],
                eq.payoffs[2],
                eq.step_check
            ),
            Solved::Star4(eq) => format!(
                "atoms=({:.6},{:.6},{:.6},{:.6}) activation=({:.6},{:.6},{:.6}) T={:.6} v=({:.6},{:.6},{:.6},{:.6})",
                eq.atoms[0],
                eq.atoms[1],
                eq.atoms[2],
                eq.atoms[3],
                eq.activation[0],
                eq.activation[1],
                eq.activation[2],
                eq.terminal,
                eq.payoffs[0],
                eq.payoffs[1],
                eq.payoffs[2],
                eq.payoffs[3]
            ),
        }
    }

    /// Scalar fields for sweep tables.
    fn fields(&self) -> Vec<(&'static str, f64)> {
        match self {
            Solved::Bilateral(eq) => vec![
                ("atom_weak", eq.atom_weak),
                ("hazard", eq.hazard),
                ("terminal", eq.terminal),
                ("payoff_i", eq.payoff_i),
                ("payoff_j", eq.payoff_j),
            ],
            Solved::Trilateral(eq, _) => vec![
                ("F_A0", eq.atoms[0]),
                ("F_B0", eq.atoms[1]),
                ("F_C0", eq.atoms[2]),
                ("t_star", eq.t_star),
                ("terminal", eq.terminal),
                ("v_A", eq.payoffs[0]),
                ("v_B", eq.payoffs[1]),
                ("v_C", eq.payoffs[2]),
            ],
            Solved::Sequential(eq, _) => vec![
                ("atom_size", eq.atom_size),
                ("z_a_plus", eq.z_a_plus),
                ("z_c_plus", eq.z_c_plus),
                ("terminal", eq.terminal),
                ("v_A", eq.payoffs[0]),
                ("v_B", eq.payoffs[1]),
                ("v_C", eq.payoffs[2]),
            ],
            Solved::Partial(eq) => vec![
                ("h0", eq.h0),
                ("F_C0", eq.atom_center),
                ("terminal", eq.terminal),
                ("v_peripheral", eq.payoffs[0]),
                ("v_center", eq.payoffs[2]),
            ],
            Solved::Star4(eq) => vec![
                ("F_1_0", eq.atoms[0]),
                ("F_2_0", eq.atoms[1]),
                ("F_3_0", eq.atoms[2]),
                ("F_C0", eq.atoms[CENTER]),
                ("activation_1", eq.activation[0]),
                ("activation_2", eq.activation[1]),
                ("activation_3", eq.activation[2]),
                ("terminal", eq.terminal),
                ("v_1", eq.payoffs[0]),
                ("v_2", eq.payoffs[1]),
                ("v_3", eq.payoffs[2]),
                ("v_center", eq.payoffs[3]),
            ],
        }
    }

    fn case_label(&self) -> Option<String> {
        match self {
            Solved::Trilateral(eq, _) => Some(format!("{:?}", eq.case)),
            Solved::Sequential(eq, _) => Some(
                match eq.atom_holder {
                    Some(SeqAtom::Peripheral) => "PeripheralAtom",
                    Some(SeqAtom::Center) => "CenterAtom",
                    None => "NoAtom",
                }
                .to_string(),
            ),
            _ => None,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Solved::Bilateral(eq) => json!({ "equilibrium": eq }),
            Solved::Trilateral(eq, _) => json!({ "equilibrium": eq }),
            Solved::Sequential(eq, _) => json!({ "equilibrium": eq }),
            Solved::Partial(eq) => json!({ "equilibrium": eq }),
            Solved::Star4(eq) => {
                // The dense path is reported through trajectories; keep the
                // JSON mirror to the scalar fields plus phase times.
                json!({
                    "equilibrium": {
                        "atoms": eq.atoms,
                        "activation": eq.activation,
                        "terminal": eq.terminal,
                        "payoffs": eq.payoffs,
                        "phase_times": eq.phase_times(),
                    }
                })
            }
        }
    }

    fn terminal(&self) -> f64 {
        match self {
            Solved::Bilateral(eq) => eq.terminal,
            Solved::Trilateral(eq, _) => eq.terminal,
            Solved::Sequential(eq, _) => eq.terminal,
            Solved::Partial(eq) => eq.terminal,
            Solved::Star4(eq) => eq.terminal,
        }
    }

    fn boundaries(&self) -> Vec<f64> {
        match self {
            Solved::Bilateral(_) => vec![],
            Solved::Trilateral(eq, _) => vec![eq.t_star],
            Solved::Sequential(eq, _) => eq.crossing.into_iter().collect(),
            Solved::Partial(_) => vec![],
            Solved::Star4(eq) => eq.phase_times(),
        }
    }

    fn players(&self) -> Vec<&'static str> {
        match self {
            Solved::Bilateral(_) => vec!["i", "j"],
            Solved::Trilateral(..) | Solved::Sequential(..) | Solved::Partial(_) => {
                vec!["A", "B", "C"]
            }
            Solved::Star4(_) => vec!["1", "2", "3", "C"],
        }
    }

    fn pre_atom_row(&self) -> TrajectoryRow {
        match self {
            Solved::Bilateral(eq) => TrajectoryRow {
                t: 0.0,
                z: vec![eq.z_i, eq.z_j],
                cdf: vec![0.0, 0.0],
                hazard: vec![eq.hazard, eq.hazard],
            },
            Solved::Trilateral(eq, priors) => TrajectoryRow {
                t: 0.0,
                z: priors.as_array().to_vec(),
                cdf: vec![0.0, 0.0, 0.0],
                hazard: (0..3).map(|i| eq.profiles[i].hazard_at(0.0)).collect(),
            },
            Solved::Sequential(eq, priors) => TrajectoryRow {
                t: 0.0,
                z: priors.as_array().to_vec(),
                cdf: vec![0.0, 0.0, 0.0],
                hazard: vec![eq.hazard_peripheral(0.0), 0.0, eq.hazard_center()],
            },
            Solved::Partial(eq) => TrajectoryRow {
                t: 0.0,
                z: vec![eq.prior, eq.prior, eq.prior],
                cdf: vec![0.0, 0.0, 0.0],
                hazard: vec![
                    eq.hazard_peripheral(),
                    eq.hazard_peripheral(),
                    eq.lambda_center_at(0.0),
                ],
            },
            Solved::Star4(eq) => {
                let st = eq.state_at(0.0);
                TrajectoryRow {
                    t: 0.0,
                    z: eq.priors.as_array().to_vec(),
                    cdf: vec![0.0; 4],
                    hazard: st.lambda.to_vec(),
                }
            }
        }
    }

    fn sample(&self, t: f64) -> TrajectoryRow {
        match self {
            Solved::Bilateral(eq) => {
                let (pi_prof, pj_prof) = (eq.profile_i(), eq.profile_j());
                TrajectoryRow {
                    t,
                    z: vec![eq.z_i / pi_prof.survival(t), eq.z_j / pj_prof.survival(t)],
                    cdf: vec![pi_prof.cdf_at(t), pj_prof.cdf_at(t)],
                    hazard: vec![pi_prof.hazard_at(t), pj_prof.hazard_at(t)],
                }
            }
            Solved::Trilateral(eq, priors) => TrajectoryRow {
                t,
                z: Player::ALL
                    .iter()
                    .map(|p| priors.get(*p) / eq.profiles[p.index()].survival(t))
                    .collect(),
                cdf: (0..3).map(|i| eq.profiles[i].cdf_at(t)).collect(),
                hazard: (0..3).map(|i| eq.profiles[i].hazard_at(t)).collect(),
            },
            Solved::Sequential(eq, priors) => TrajectoryRow {
                t,
                z: vec![
                    eq.posterior_peripheral(t),
                    priors.z_b,
                    eq.posterior_center(t),
                ],
                cdf: vec![eq.cdf_peripheral(t), 0.0, eq.cdf_center(t)],
                hazard: vec![eq.hazard_peripheral(t), 0.0, eq.hazard_center()],
            },
            Solved::Partial(eq) => TrajectoryRow {
                t,
                z: vec![
                    eq.posterior_peripheral(t),
                    eq.posterior_peripheral(t),
                    eq.posterior_center(t),
                ],
                cdf: vec![eq.cdf_peripheral(t), eq.cdf_peripheral(t), eq.cdf_center(t)],
                hazard: vec![
                    eq.hazard_peripheral(),
                    eq.hazard_peripheral(),
                    eq.lambda_center_at(t),
                ],
            },
            Solved::Star4(eq) => {
                let st = eq.state_at(t);
                TrajectoryRow {
                    t,
                    z: st.z.to_vec(),
                    cdf: (0..4).map(|i| eq.cdf(i, t)).collect(),
                    hazard: st.lambda.to_vec(),
                }
            }
        }
    }
}

/// Benchmark payoffs per player for the compare command.
fn benchmark_of(model: ModelKind, params: &GameParams, z: &[f64]) -> Result<Vec<f64>, RunError> {
    Ok(match model {
        ModelKind::Bilateral => vec![
            bilateral::benchmark_payoff(params.pi_ac, z[0], z[1], params),
            bilateral::benchmark_payoff(params.pi_ac, z[1], z[0], params),
        ],
        ModelKind::Trilateral | ModelKind::Sequential => vec![
            bilateral::benchmark_payoff(params.pi_ac, z[0], z[2], params),
            bilateral::benchmark_payoff(params.pi_bc, z[1], z[2], params),
            bilateral::benchmark_payoff(params.pi_ac, z[2], z[0], params)
                + bilateral::benchmark_payoff(params.pi_bc, z[2], z[1], params),
        ],
        ModelKind::Partial => {
            let alpha = params.alpha;
            vec![1.0 - alpha, 1.0 - alpha, 2.0 * (1.0 - alpha)]
        }
        ModelKind::Star4 => star4_benchmark(&priors4(z)?, params)?.to_vec(),
    })
}

fn payoffs_of(solved: &Solved) -> Vec<f64> {
    match solved {
        Solved::Bilateral(eq) => vec![eq.payoff_i, eq.payoff_j],
        Solved::Trilateral(eq, _) => eq.payoffs.to_vec(),
        Solved::Sequential(eq, _) => eq.payoffs.to_vec(),
        Solved::Partial(eq) => eq.payoffs.to_vec(),
        Solved::Star4(eq) => eq.payoffs.to_vec(),
    }
}

fn out_path_for(path: &Path, index: usize, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}-{index}.{ext}"))
}

pub fn execute(cfg: &RunConfig) -> Result<(), RunError> {
    cfg.validate().map_err(RunError::Validation)?;
    let params = game_params(cfg)?;
    match cfg.command {
        CommandKind::Solve => run_solve(cfg, &params),
        CommandKind::Compare => run_compare(cfg, &params),
        CommandKind::Sweep => run_sweep(cfg, &params),
        CommandKind::Simulate => run_simulate(cfg, &params),
        CommandKind::Verify => run_verify(cfg, &params),
    }
}

fn run_solve(cfg: &RunConfig, params: &GameParams) -> Result<(), RunError> {
    let mut json_results = Vec::new();
    let many = cfg.priors.len() > 1;
    for (k, z) in cfg.priors.iter().enumerate() {
        let solved = solve_model(cfg.model, params, z)?;
        let mut extra = String::new();
        // For the partial model a second prior entry reports the time-0 atom
        // implied by the same profile when the center's own prior differs
        // from the common one (candidate only; no uniqueness claim).
        if let (ModelKind::Partial, Solved::Partial(eq), Some(zc)) =
            (cfg.model, &solved, z.get(1))
        {
            let atom = eq.implied_atom(*zc)?;
            extra = format!(" implied_atom_for_center_prior({zc})={atom:.6}");
        }
        println!(
            "solve {} z={} {}{extra}",
            cfg.model.name(),
            fmt_vec(z),
            solved.summary()
        );
        if let Some(out) = &cfg.output {
            match out.format {
                FormatKind::Csv => {
                    let path = out_path_for(&out.path, k, many);
                    let file = BufWriter::new(File::create(&path)?);
                    let players = solved.players();
                    write_trajectory(
                        file,
                        &players,
                        solved.terminal(),
                        &solved.boundaries(),
                        cfg.grid,
                        solved.pre_atom_row(),
                        |t| solved.sample(t),
                    )?;
                }
                FormatKind::Json => {
                    let mut obj = solved.to_json();
                    obj["priors"] = json!(z);
                    if let Some(case) = solved.case_label() {
                        obj["case"] = json!(case);
                    }
                    json_results.push(obj);
                }
            }
        }
    }
    if let Some(out) = &cfg.output {
        if out.format == FormatKind::Json {
            let doc = json!({
                "command": "solve",
                "model": cfg.model.name(),
                "params": cfg.params,
                "results": json_results,
            });
            serde_json::to_writer_pretty(BufWriter::new(File::create(&out.path)?), &doc)
                .map_err(|e| RunError::Failure(e.to_string()))?;
        }
    }
    Ok(())
}

fn run_compare(cfg: &RunConfig, params: &GameParams) -> Result<(), RunError> {
    let mut rows: Vec<(usize, String, f64, f64, f64)> = Vec::new();
    for (k, z) in cfg.priors.iter().enumerate() {
        let (payoffs, bench) = if cfg.model == ModelKind::Trilateral {
            let cmp = compare_to_benchmark(&priors3(z)?, params)?;
            (cmp.equilibrium.to_vec(), cmp.benchmark.to_vec())
        } else {
            let solved = solve_model(cfg.model, params, z)?;
            (payoffs_of(&solved), benchmark_of(cfg.model, params, z)?)
        };
        let names = match cfg.model {
            ModelKind::Bilateral => vec!["i", "j"],
            ModelKind::Star4 => vec!["1", "2", "3", "C"],
            _ => vec!["A", "B", "C"],
        };
        let mut line = format!("compare {} z={}", cfg.model.name(), fmt_vec(z));
        for (i, name) in names.iter().enumerate() {
            let delta = payoffs[i] - bench[i];
            line.push_str(&format!(
                " {name}: v={:.6} benchmark={:.6} delta={:+.6}",
                payoffs[i], bench[i], delta
            ));
            rows.push((k, name.to_string(), payoffs[i], bench[i], delta));
        }
        println!("{line}");
    }
    if let Some(out) = &cfg.output {
        match out.format {
            FormatKind::Csv => {
                let file = BufWriter::new(File::create(&out.path)?);
                let mut w = CsvWriter::new(
                    file,
                    &["case", "player", "equilibrium", "benchmark", "delta"],
                )?;
                for (k, name, v, b, d) in rows {
                    w.row(&[k.to_string(), name, f9(v), f9(b), f9(d)])?;
                }
            }
            FormatKind::Json => {
                let doc = json!({
                    "command": "compare",
                    "model": cfg.model.name(),
                    "params": cfg.params,
                    "results": rows
                        .iter()
                        .map(|(k, name, v, b, d)| json!({
                            "case": k, "player": name, "equilibrium": v,
                            "benchmark": b, "delta": d,
                        }))
                        .collect::<Vec<_>>(),
                });
                serde_json::to_writer_pretty(BufWriter::new(File::create(&out.path)?), &doc)
                    .map_err(|e| RunError::Failure(e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn run_sweep(cfg: &RunConfig, params: &GameParams) -> Result<(), RunError> {
    let axis = cfg.sweep.as_ref().expect("validated");
    let which = parse_sweep_parameter(&axis.parameter, cfg.model).map_err(RunError::Validation)?;
    let base_z = cfg.priors[0].clone();
    let values: Vec<f64> = (0..axis.steps)
        .map(|k| axis.start + (axis.stop - axis.start) * k as f64 / (axis.steps - 1) as f64)
        .collect();

    // Grid points solve independently; results are buffered and written in
    // input order.
    let rows: Vec<Result<(f64, Option<String>, Vec<(&'static str, f64)>), RunError>> = values
        .par_iter()
        .map(|&v| {
            let mut p = *params;
            let mut z = base_z.clone();
            match which {
                SweepParam::R => p.r = v,
                SweepParam::Alpha => p.alpha = v,
                SweepParam::PiAc => p.pi_ac = v,
                SweepParam::PiBc => p.pi_bc = v,
                SweepParam::Prior(i) => z[i] = v,
            }
            let solved = solve_model(cfg.model, &p, &z)?;
            Ok((v, solved.case_label(), solved.fields()))
        })
        .collect();

    let mut table = Vec::with_capacity(rows.len());
    for r in rows {
        table.push(r?);
    }

    let header: Vec<String> = {
        let mut h = vec![axis.parameter.clone(), "case".to_string()];
        h.extend(table[0].2.iter().map(|(n, _)| n.to_string()));
        h
    };
    let emit = |w: &mut dyn Write| -> std::io::Result<()> {
        writeln!(w, "{}", header.join(","))?;
        for (v, case, fields) in &table {
            let mut cells = vec![f9(*v), case.clone().unwrap_or_default()];
            cells.extend(fields.iter().map(|(_, x)| f9(*x)));
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    };
    match &cfg.output {
        Some(out) if out.format == FormatKind::Json => {
            let doc = json!({
                "command": "sweep",
                "model": cfg.model.name(),
                "parameter": axis.parameter,
                "results": table.iter().map(|(v, case, fields)| {
                    let mut obj = json!({ "value": v, "case": case });
                    for (name, x) in fields {
                        obj[*name] = json!(x);
                    }
                    obj
                }).collect::<Vec<_>>(),
            });
            serde_json::to_writer_pretty(BufWriter::new(File::create(&out.path)?), &doc)
                .map_err(|e| RunError::Failure(e.to_string()))?;
        }
        Some(out) => {
            let mut file = BufWriter::new(File::create(&out.path)?);
            emit(&mut file)?;
        }
        None => {
            let stdout = std::io::stdout();
            emit(&mut stdout.lock())?;
        }
    }
    println!(
        "sweep {} over {}: {} points",
        cfg.model.name(),
        axis.parameter,
        values.len()
    );
    Ok(())
}

fn run_simulate(cfg: &RunConfig, params: &GameParams) -> Result<(), RunError> {
    let mut outcomes: Vec<(Vec<f64>, SimOutcome, Vec<&'static str>)> = Vec::new();
    for z in &cfg.priors {
        let (outcome, players): (SimOutcome, Vec<&'static str>) = match cfg.model {
            ModelKind::Bilateral => (
                simulate_bilateral(params.pi_ac, z[0], z[1], params, cfg.n, cfg.seed),
                vec!["i", "j"],
            ),
            ModelKind::Trilateral => {
                let priors = priors3(z)?;
                let eq = solve_trilateral(&priors, params)?;
                (
                    simulate_with_log(&eq, &priors, params, cfg.n, cfg.seed, 8),
                    vec!["A", "B", "C"],
                )
            }
            ModelKind::Star4 => {
                let eq = solve_star4(&priors4(z)?, params)?;
                (
                    simulate_star4(&eq, params, cfg.n, cfg.seed),
                    vec!["1", "2", "3", "C"],
                )
            }
            ModelKind::Sequential | ModelKind::Partial => {
                return Err(RunError::Validation(format!(
                    "simulate supports bilateral, trilateral, and star4 (got {})",
                    cfg.model.name()
                )))
            }
        };
        let ests: Vec<String> = players
            .iter()
            .enumerate()
            .map(|(i, p)| {
                format!(
                    "{p}={:.6}+/-{:.6}",
                    outcome.est_payoffs[i], outcome.std_err[i]
                )
            })
            .collect();
        println!(
            "simulate {} z={} n={} seed={} {} censored={} global_concession_violations={}",
            cfg.model.name(),
            fmt_vec(z),
            outcome.n,
            outcome.seed,
            ests.join(" "),
            outcome.censored,
            outcome.global_concession_violations
        );
        outcomes.push((z.clone(), outcome, players));
    }
    if let Some(out) = &cfg.output {
        match out.format {
            FormatKind::Csv => {
                let file = BufWriter::new(File::create(&out.path)?);
                let mut w = CsvWriter::new(
                    file,
                    &["case", "player", "estimate", "std_err", "rational_draws"],
                )?;
                for (k, (_, outcome, players)) in outcomes.iter().enumerate() {
                    for (i, p) in players.iter().enumerate() {
                        w.row(&[
                            k.to_string(),
                            p.to_string(),
                            f9(outcome.est_payoffs[i]),
                            f9(outcome.std_err[i]),
                            outcome.rational_draws[i].to_string(),
                        ])?;
                    }
                }
            }
            FormatKind::Json => {
                let doc = json!({
                    "command": "simulate",
                    "model": cfg.model.name(),
                    "params": cfg.params,
                    "results": outcomes.iter().map(|(z, o, _)| json!({
                        "priors": z,
                        "outcome": o,
                    })).collect::<Vec<_>>(),
                });
                serde_json::to_writer_pretty(BufWriter::new(File::create(&out.path)?), &doc)
                    .map_err(|e| RunError::Failure(e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn run_verify(cfg: &RunConfig, params: &GameParams) -> Result<(), RunError> {
    let mut failures = 0usize;
    let grid_n = cfg.grid.max(100);
    for z in &cfg.priors {
        let (pass, detail) = match cfg.model {
            ModelKind::Bilateral => {
                let eq = bilateral::solve(params.pi_ac, z[0], z[1], params)?;
                let report = bilateral_best_response_check(&eq, params, grid_n, cfg.tol)?;
                (
                    report.pass,
                    format!(
                        "support_residual={:.3e} off_support_slack={:.3e}",
                        report.support_residual, report.off_support_slack
                    ),
                )
            }
            ModelKind::Trilateral => {
                let priors = priors3(z)?;
                let eq = solve_trilateral(&priors, params)?;
                let report = best_response_check(&eq, &priors, params, grid_n, cfg.tol)?;
                (
                    report.pass,
                    format!(
                        "support_residual={:.3e} off_support_slack={:.3e}",
                        report.support_residual, report.off_support_slack
                    ),
                )
            }
            ModelKind::Sequential => {
                let eq = solve_sequential(&priors3(z)?, params)?;
                let report = eq.best_response_check(grid_n, cfg.tol)?;
                (
                    report.pass,
                    format!(
                        "support_residual={:.3e} off_support_slack={:.3e}",
                        report.support_residual, report.off_support_slack
                    ),
                )
            }
            ModelKind::Partial => {
                let eq = solve_partial_obs(z[0], params)?;
                let mut worst: f64 = 0.0;
                for k in 0..=grid_n {
                    let t = eq.terminal * k as f64 / grid_n as f64;
                    worst = worst.max(eq.indifference_residual(t).abs());
                }
                (
                    worst <= cfg.tol,
                    format!("max_indifference_residual={worst:.3e}"),
                )
            }
            ModelKind::Star4 => {
                let eq = solve_star4(&priors4(z)?, params)?;
                let pts = 40.min(grid_n);
                let ts: Vec<f64> = (1..pts)
                    .map(|k| eq.terminal * k as f64 / pts as f64)
                    .collect();
                let residuals = eq.ic_residuals(&ts, false)?;
                let worst = residuals
                    .iter()
                    .map(|r| r.peripheral_max.max(r.center.abs()))
                    .fold(0.0f64, f64::max);
                // Waiting slack of inactive peripherals on a coarse grid.
                let coarse: Vec<f64> = (1..8).map(|k| eq.terminal * k as f64 / 8.0).collect();
                let slack = eq
                    .ic_residuals(&coarse, true)?
                    .iter()
                    .map(|r| r.inactive_slack_min)
                    .fold(f64::INFINITY, f64::min);
                (
                    worst <= cfg.tol && slack >= -1e-8,
                    format!("max_ic_residual={worst:.3e} min_waiting_slack={slack:.3e}"),
                )
            }
        };
        println!(
            "verify {} z={}: {} ({detail})",
            cfg.model.name(),
            fmt_vec(z),
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(RunError::Failure(format!(
            "{failures} verification check(s) failed"
        )));
    }
    Ok(())
}
