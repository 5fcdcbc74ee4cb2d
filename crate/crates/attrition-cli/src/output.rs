//! CSV and JSON emission. All floating-point text is written with nine
//! significant digits in scientific notation, independent of locale, so
//! golden files can be compared at fixed tolerances.

use std::io::Write;

/// Nine significant digits, locale-independent.
pub fn f9(x: f64) -> String {
    format!("{x:.8e}")
}

pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> std::io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter { out })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn numeric_row(&mut self, fields: &[f64]) -> std::io::Result<()> {
        let cells: Vec<String> = fields.iter().map(|x| f9(*x)).collect();
        self.row(&cells)
    }
}

/// A trajectory sample: posteriors, cdfs, and hazards per player at one time.
pub struct TrajectoryRow {
    pub t: f64,
    pub z: Vec<f64>,
    pub cdf: Vec<f64>,
    pub hazard: Vec<f64>,
}

/// Writes the trajectory table: one row per grid time plus exact rows at
/// time 0 before the atoms, time 0 after them, each phase boundary, and the
/// terminal time.
pub fn write_trajectory<W: Write>(
    out: W,
    players: &[&str],
    terminal: f64,
    boundaries: &[f64],
    grid_n: usize,
    pre_atom: TrajectoryRow,
    sample: impl Fn(f64) -> TrajectoryRow,
) -> std::io::Result<()> {
    let mut header: Vec<String> = vec!["t".into()];
    for p in players {
        header.push(format!("z_{p}"));
    }
    for p in players {
        header.push(format!("F_{p}"));
    }
    for p in players {
        header.push(format!("lambda_{p}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvWriter::new(out, &header_refs)?;

    let emit = |w: &mut CsvWriter<W>, row: &TrajectoryRow| -> std::io::Result<()> {
        let mut cells = vec![row.t];
        cells.extend_from_slice(&row.z);
        cells.extend_from_slice(&row.cdf);
        cells.extend_from_slice(&row.hazard);
        w.numeric_row(&cells)
    };

    emit(&mut w, &pre_atom)?;
    let mut times: Vec<f64> = vec![0.0];
    for k in 1..=grid_n {
        times.push(terminal * k as f64 / grid_n as f64);
    }
    for &b in boundaries {
        if b > 0.0 && b < terminal {
            times.push(b);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    for t in times {
        emit(&mut w, &sample(t))?;
    }
    Ok(())
}
