//! Data files. Everything here is a pure function of the scenario; run
//! metadata goes to the separate log written by `main`.

use std::fs;
use std::path::{Path, PathBuf};

use spinfactor::analysis::scan_peaks;
use spinfactor::PropagatorTrace;

use crate::config::{ScenarioConfig, TraceMatrix};
use crate::error::CliError;
use crate::scenario::Outcome;

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A named file and its bytes, written together at the end of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct DataFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn csv_bytes(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn trace_csv(traces: &[(TraceMatrix, &PropagatorTrace)]) -> Result<Vec<u8>, CliError> {
    let first = traces.first().expect("at least one trace").1;
    let dim = first.at(0).dim();
    let mut header = vec!["t".to_string()];
    for (m, _) in traces {
        for r in 0..dim {
            for c in 0..dim {
                header.push(format!("{m}_re_{r}_{c}"));
                header.push(format!("{m}_im_{r}_{c}"));
            }
        }
    }
    let rows = first.grid.times().enumerate().map(|(k, t)| {
        let mut row = vec![fmt_f64(t)];
        for (_, tr) in traces {
            for z in tr.at(k).matrix().transpose().iter() {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
        }
        row
    });
    csv_bytes(header, rows)
}

/// A TOML float in the same notation as the CSV files.
fn toml_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        fmt_f64(x)
    }
}

/// Basic TOML string; every string written here is plain ASCII.
fn toml_str(s: &str) -> String {
    format!("{s:?}")
}

fn toml_array(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|x| toml_f64(*x)).collect::<Vec<_>>().join(", "))
}

pub fn summary_toml(config: &ScenarioConfig, outcome: &Outcome) -> Vec<u8> {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
    kv("name", toml_str(&config.name));
    kv("spin_j", toml_str(&config.spin.to_string()));
    kv("stepper", toml_str(config.stepper.name()));
    kv("tolerance", toml_f64(config.tolerance));
    kv("status", toml_str(if outcome.passed() { "pass" } else { "fail" }));
    if let Some(f) = &config.field {
        kv("family", toml_str(f.family()));
    }
    let fac = outcome.factorization.as_ref();
    if let Some(f) = fac {
        kv("max_residual", toml_f64(f.max_residual()));
        out.push_str(&format!(
            "\n[grid]\nt_start = {}\nt_end = {}\nsteps = {}\n",
            toml_f64(f.grid.start()),
            toml_f64(f.grid.end()),
            f.grid.steps()
        ));
    }
    if let Some(b) = &outcome.berry {
        out.push_str(&format!(
            "\n[berry]\nsolid_angle = {}\ndiscrepancy = {}\nphases = {}\nexpected = {}\n",
            toml_f64(b.solid_angle),
            toml_f64(b.discrepancy),
            toml_array(&b.phases),
            toml_array(&b.expected)
        ));
    }
    if let Some(points) = &outcome.scan {
        let (f, m) = scan_peaks(points);
        out.push_str(&format!(
            "\n[resonance_peaks]\nfixed_axis_kB = {}\nmoving_axis_kB = {}\n",
            toml_f64(f),
            toml_f64(m)
        ));
    }
    for c in &outcome.checks {
        out.push_str(&format!(
            "\n[[checks]]\nname = {}\nvalue = {}\ntolerance = {}\npass = {}\n",
            toml_str(&c.name),
            toml_f64(c.value),
            toml_f64(c.tolerance),
            c.pass
        ));
    }
    out.into_bytes()
}

/// All data files a run produces, in a fixed order.
pub fn data_files(config: &ScenarioConfig, outcome: &Outcome) -> Result<Vec<DataFile>, CliError> {
    let name = &config.name;
    let mut files = vec![DataFile { name: format!("{name}-summary.toml"), bytes: summary_toml(config, outcome) }];
    let outputs = &config.outputs;

    if let Some(fac) = &outcome.factorization {
        if outputs.residuals {
            let header = ["t", "beta", "phi", "arclen", "speed", "residual"].map(String::from).to_vec();
            let rows = fac.grid.times().enumerate().map(|(k, t)| {
                [t, fac.angles.beta[k], fac.phi[k], fac.angles.arclen[k], fac.angles.speed[k], fac.residual[k]]
                    .map(fmt_f64)
                    .to_vec()
            });
            files.push(DataFile { name: format!("{name}-angles.csv"), bytes: csv_bytes(header, rows)? });
        }
        if !outputs.traces.is_empty() {
            let traces: Vec<(TraceMatrix, &PropagatorTrace)> = outputs
                .traces
                .iter()
                .map(|&m| {
                    let tr = match m {
                        TraceMatrix::U => &fac.u,
                        TraceMatrix::A => &fac.a,
                        TraceMatrix::D => &fac.d,
                        TraceMatrix::N => &fac.n,
                    };
                    (m, tr)
                })
                .collect();
            files.push(DataFile { name: format!("{name}-traces.csv"), bytes: trace_csv(&traces)? });
        }
    }
    if let (true, Some(table)) = (outputs.transitions, &outcome.transitions) {
        let dim = table.spin.dim();
        let mut header = vec!["t".to_string()];
        for r in 0..dim {
            for c in 0..dim {
                header.push(format!("P_{r}_{c}"));
            }
        }
        let rows = table.times.iter().zip(&table.probs).map(|(t, p)| {
            let mut row = vec![fmt_f64(*t)];
            row.extend(p.transpose().iter().map(|x| fmt_f64(*x)));
            row
        });
        files.push(DataFile { name: format!("{name}-transitions.csv"), bytes: csv_bytes(header, rows)? });
    }
    if let Some(points) = &outcome.scan {
        let header = ["kB", "fixed_axis", "moving_axis", "residual"].map(String::from).to_vec();
        let rows = points.iter().map(|p| [p.kb, p.fixed_axis, p.moving_axis, p.residual].map(fmt_f64).to_vec());
        files.push(DataFile { name: format!("{name}-resonance.csv"), bytes: csv_bytes(header, rows)? });
    }
    Ok(files)
}

pub fn write_files(dir: &Path, files: &[DataFile]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            fs::write(&path, &f.bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

/// The pass/fail table printed by both subcommands.
pub fn check_table(outcome: &Outcome) -> String {
    let width = outcome.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:>12}  {:>9}  result\n", "check", "value", "tolerance");
    for c in &outcome.checks {
        out.push_str(&format!(
            "{:<width$}  {:>12.3e}  {:>9.1e}  {}\n",
            c.name,
            c.value,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}
