//! Scenario files: one TOML document per scenario.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use spinfactor::sphere::HarmonicTerm;
use spinfactor::{MagnitudeTerm, Spin, Stepper, Vec3};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    spin_j: SpinValue,
    #[serde(default)]
    stepper: Option<String>,
    tolerance: f64,
    grid: Option<RawGrid>,
    field: Option<toml::Table>,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpinValue {
    Text(String),
    Integer(i64),
    Float(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    t_end: f64,
    steps: i64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    #[serde(default)]
    traces: Option<TraceSelection>,
    #[serde(default)]
    residuals: bool,
    #[serde(default)]
    transitions: bool,
    #[serde(default)]
    berry: bool,
    #[serde(default)]
    resonance_scan: Option<RawScan>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TraceSelection {
    All(bool),
    Some(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    range: [f64; 2],
    count: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StaticCfg {
    #[serde(default = "z_axis")]
    direction: [f64; 3],
    #[serde(rename = "kB")]
    kb: f64,
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrecessionCfg {
    theta: f64,
    omega: f64,
    #[serde(rename = "kB")]
    kb: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassICfg {
    path: toml::Table,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassIICfg {
    lambda: f64,
    c1: f64,
    c2: f64,
    #[serde(default = "plus_one")]
    sign: f64,
}

fn plus_one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedCfg {
    csv: PathBuf,
    #[serde(default = "plus_one")]
    k: f64,
    #[serde(rename = "kB")]
    kb: KbLawCfg,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum KbLawCfg {
    Constant(f64),
    Harmonic(HarmonicLawCfg),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicLawCfg {
    offset: f64,
    #[serde(default)]
    terms: Vec<ScalarTermCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarTermCfg {
    amp: f64,
    freq: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathPrecessionCfg {
    theta: f64,
    omega: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathNoddingCfg {
    theta0: f64,
    amp: f64,
    nu: f64,
    omega: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathHarmonicCfg {
    offset: [f64; 3],
    #[serde(default)]
    terms: Vec<VectorTermCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorTermCfg {
    amp: [f64; 3],
    freq: f64,
    #[serde(default)]
    phase: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathTabulatedCfg {
    csv: PathBuf,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub spin: Spin,
    pub stepper: Stepper,
    pub tolerance: f64,
    /// Absent for algebra-only scenarios.
    pub grid: Option<GridConfig>,
    pub field: Option<FieldConfig>,
    pub outputs: Outputs,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    pub t_end: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldConfig {
    Static { direction: Vec3, kb: f64 },
    Precession { theta: f64, omega: f64, kb: f64 },
    ClassI { path: PathConfig },
    ClassIISpiral { lambda: f64, c1: f64, c2: f64, sign: f64 },
    Tabulated { csv: PathBuf, k: f64, kb: KbLaw },
}

impl FieldConfig {
    pub fn family(&self) -> &'static str {
        match self {
            FieldConfig::Static { .. } => "static",
            FieldConfig::Precession { .. } => "precession",
            FieldConfig::ClassI { .. } => "class_i",
            FieldConfig::ClassIISpiral { .. } => "class_ii_spiral",
            FieldConfig::Tabulated { .. } => "tabulated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KbLaw {
    Constant(f64),
    Harmonic { offset: f64, terms: Vec<MagnitudeTerm> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathConfig {
    Precession { theta: f64, omega: f64 },
    Nodding { theta0: f64, amp: f64, nu: f64, omega: f64 },
    Harmonic { offset: Vec3, terms: Vec<HarmonicTerm> },
    Tabulated { csv: PathBuf },
}

/// Matrices that can be written to the trace file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceMatrix {
    U,
    A,
    D,
    N,
}

impl TraceMatrix {
    pub const ALL: [TraceMatrix; 4] = [TraceMatrix::U, TraceMatrix::A, TraceMatrix::D, TraceMatrix::N];

    pub fn label(self) -> &'static str {
        match self {
            TraceMatrix::U => "U",
            TraceMatrix::A => "A",
            TraceMatrix::D => "D",
            TraceMatrix::N => "N",
        }
    }
}

impl fmt::Display for TraceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outputs {
    pub traces: Vec<TraceMatrix>,
    pub residuals: bool,
    pub transitions: bool,
    pub berry: bool,
    pub resonance_scan: Option<ScanConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

fn invalid(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be a finite number > 0 (got {v})")))
    }
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite (got {v})")))
    }
}

fn sub_table<T: serde::de::DeserializeOwned>(key: &str, table: toml::Table) -> Result<T, CliError> {
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| invalid(key, e.message()))
}

fn take_family(key: &str, table: &mut toml::Table) -> Result<String, CliError> {
    let kind = if key == "field" { "family" } else { "kind" };
    match table.remove(kind) {
        Some(toml::Value::String(s)) => Ok(s),
        Some(other) => Err(invalid(&format!("{key}.{kind}"), format!("expected a string, got {}", other.type_str()))),
        None => Err(invalid(&format!("{key}.{kind}"), "missing")),
    }
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn parse_spin(v: SpinValue) -> Result<Spin, CliError> {
    let parsed = match &v {
        SpinValue::Text(s) => s.parse::<Spin>(),
        SpinValue::Integer(i) => Spin::from_f64(*i as f64),
        SpinValue::Float(f) => Spin::from_f64(*f),
    };
    parsed.map_err(|e| invalid("spin_j", e))
}

fn parse_path(base: &Path, mut table: toml::Table) -> Result<PathConfig, CliError> {
    let key = "field.path";
    let kind = take_family(key, &mut table)?;
    Ok(match kind.as_str() {
        "precession" => {
            let c: PathPrecessionCfg = sub_table(key, table)?;
            PathConfig::Precession { theta: finite("field.path.theta", c.theta)?, omega: finite("field.path.omega", c.omega)? }
        }
        "nodding" => {
            let c: PathNoddingCfg = sub_table(key, table)?;
            PathConfig::Nodding { theta0: c.theta0, amp: c.amp, nu: c.nu, omega: c.omega }
        }
        "harmonic" => {
            let c: PathHarmonicCfg = sub_table(key, table)?;
            PathConfig::Harmonic {
                offset: Vec3::from(c.offset),
                terms: c
                    .terms
                    .into_iter()
                    .map(|t| HarmonicTerm { amp: Vec3::from(t.amp), freq: t.freq, phase: t.phase })
                    .collect(),
            }
        }
        "tabulated" => {
            let c: PathTabulatedCfg = sub_table(key, table)?;
            PathConfig::Tabulated { csv: resolve(base, c.csv) }
        }
        other => {
            return Err(invalid(
                "field.path.kind",
                format!("unknown path kind `{other}` (expected precession, nodding, harmonic or tabulated)"),
            ))
        }
    })
}

fn parse_field(base: &Path, mut table: toml::Table) -> Result<FieldConfig, CliError> {
    let family = take_family("field", &mut table)?;
    Ok(match family.as_str() {
        "static" => {
            let c: StaticCfg = sub_table("field", table)?;
            let d = Vec3::from(c.direction);
            if !(d.norm() > 0.0) || !d.iter().all(|x| x.is_finite()) {
                return Err(invalid("field.direction", "must be a finite non-zero vector"));
            }
            FieldConfig::Static { direction: d.normalize(), kb: finite("field.kB", c.kb)? }
        }
        "precession" => {
            let c: PrecessionCfg = sub_table("field", table)?;
            if !(0.0..=std::f64::consts::PI).contains(&c.theta) {
                return Err(invalid("field.theta", format!("must lie in [0, pi] (got {})", c.theta)));
            }
            FieldConfig::Precession { theta: c.theta, omega: finite("field.omega", c.omega)?, kb: finite("field.kB", c.kb)? }
        }
        "class_i" => {
            let c: ClassICfg = sub_table("field", table)?;
            FieldConfig::ClassI { path: parse_path(base, c.path)? }
        }
        "class_ii_spiral" => {
            let c: ClassIICfg = sub_table("field", table)?;
            let lambda = positive("field.lambda", c.lambda)?;
            if !(c.c1 * c.c1 > lambda * lambda) {
                return Err(invalid("field.c1", format!("need c1^2 > lambda^2 (c1 = {}, lambda = {lambda})", c.c1)));
            }
            if c.sign != 1.0 && c.sign != -1.0 {
                return Err(invalid("field.sign", format!("must be +1 or -1 (got {})", c.sign)));
            }
            FieldConfig::ClassIISpiral { lambda, c1: c.c1, c2: finite("field.c2", c.c2)?, sign: c.sign }
        }
        "tabulated" => {
            let c: TabulatedCfg = sub_table("field", table)?;
            let kb = match c.kb {
                KbLawCfg::Constant(v) => KbLaw::Constant(finite("field.kB", v)?),
                KbLawCfg::Harmonic(h) => KbLaw::Harmonic {
                    offset: h.offset,
                    terms: h.terms.into_iter().map(|t| MagnitudeTerm { amp: t.amp, freq: t.freq, phase: t.phase }).collect(),
                },
            };
            FieldConfig::Tabulated { csv: resolve(base, c.csv), k: finite("field.k", c.k)?, kb }
        }
        other => {
            return Err(invalid(
                "field.family",
                format!("unknown field family `{other}` (expected static, precession, class_i, class_ii_spiral or tabulated)"),
            ))
        }
    })
}

impl ScenarioConfig {
    /// Parses a scenario; relative CSV paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;

        if raw.name.is_empty() || !raw.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(invalid("name", "must be non-empty and use only letters, digits, '_' and '-'"));
        }
        let spin = parse_spin(raw.spin_j)?;
        let stepper = match raw.stepper {
            None => Stepper::default(),
            Some(s) => s.parse().map_err(|e| invalid("stepper", e))?,
        };
        let tolerance = positive("tolerance", raw.tolerance)?;
        let grid = match raw.grid {
            None => None,
            Some(g) => {
                if g.steps < 2 {
                    return Err(invalid("grid.steps", format!("must be >= 2 (got {})", g.steps)));
                }
                Some(GridConfig { t_end: positive("grid.t_end", g.t_end)?, steps: g.steps as usize })
            }
        };
        let field = raw.field.map(|t| parse_field(base, t)).transpose()?;
        match (&grid, &field) {
            (None, Some(_)) => return Err(invalid("grid", "required when [field] is given")),
            (Some(_), None) => return Err(invalid("field", "required when [grid] is given")),
            _ => {}
        }

        let o = raw.outputs;
        let traces = match o.traces {
            None | Some(TraceSelection::All(false)) => Vec::new(),
            Some(TraceSelection::All(true)) => TraceMatrix::ALL.to_vec(),
            Some(TraceSelection::Some(list)) => {
                let mut out = Vec::new();
                for s in list {
                    let m = match s.as_str() {
                        "U" => TraceMatrix::U,
                        "A" => TraceMatrix::A,
                        "D" => TraceMatrix::D,
                        "N" => TraceMatrix::N,
                        other => return Err(invalid("outputs.traces", format!("unknown matrix `{other}` (expected U, A, D or N)"))),
                    };
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
                out.sort();
                out
            }
        };
        let resonance_scan = match o.resonance_scan {
            None => None,
            Some(s) => {
                let [lo, hi] = s.range;
                if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                    return Err(invalid("outputs.resonance_scan.range", format!("need lo < hi (got [{lo}, {hi}])")));
                }
                if s.count < 2 {
                    return Err(invalid("outputs.resonance_scan.count", format!("must be >= 2 (got {})", s.count)));
                }
                if !matches!(field, Some(FieldConfig::Precession { .. })) {
                    return Err(invalid("outputs.resonance_scan", "only available for field.family = \"precession\""));
                }
                Some(ScanConfig { lo, hi, count: s.count as usize })
            }
        };
        let any_output = !traces.is_empty() || o.residuals || o.transitions || o.berry || resonance_scan.is_some();
        if field.is_none() && any_output {
            return Err(invalid("outputs", "algebra-only scenarios (no [field]) cannot request outputs"));
        }
        let outputs = Outputs { traces, residuals: o.residuals, transitions: o.transitions, berry: o.berry, resonance_scan };

        let config = ScenarioConfig { name: raw.name, spin, stepper, tolerance, grid, field, outputs };
        config.check_domain()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Re-validates after command-line overrides.
    pub fn check_domain(&self) -> Result<(), CliError> {
        if let (Some(g), Some(FieldConfig::ClassIISpiral { lambda, .. })) = (&self.grid, &self.field) {
            let bound = std::f64::consts::FRAC_PI_2 / lambda;
            if !(g.t_end < bound) {
                return Err(invalid(
                    "grid.t_end",
                    format!(
                        "{} must be below the class_ii_spiral domain bound pi/(2*lambda) = {bound} (field.lambda = {lambda})",
                        g.t_end
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ScenarioConfig, CliError> {
        ScenarioConfig::parse(s, Path::new("/cfg"))
    }

    const PRECESSION: &str = r#"
name = "p"
spin_j = "1/2"
tolerance = 1e-6
[grid]
t_end = 3.0
steps = 64
[field]
family = "precession"
theta = 1.0
omega = 1.0
kB = 5.0
"#;

    #[test]
    fn parses_precession() {
        let c = parse(PRECESSION).unwrap();
        assert_eq!(c.spin, Spin::half());
        assert_eq!(c.stepper, Stepper::ExpMidpoint);
        assert_eq!(c.field, Some(FieldConfig::Precession { theta: 1.0, omega: 1.0, kb: 5.0 }));
    }

    #[test]
    fn spin_forms() {
        for (s, twice) in [("\"7/2\"", 7), ("1", 2), ("1.5", 3)] {
            let c = parse(&PRECESSION.replace("\"1/2\"", s)).unwrap();
            assert_eq!(c.spin.twice(), twice);
        }
        let e = parse(&PRECESSION.replace("\"1/2\"", "0.3")).unwrap_err();
        assert!(e.to_string().contains("spin_j"));
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            (PRECESSION.replace("steps = 64", "steps = 1"), "grid.steps"),
            (PRECESSION.replace("t_end = 3.0", "t_end = -1.0"), "grid.t_end"),
            (PRECESSION.replace("tolerance = 1e-6", "tolerance = 0.0"), "tolerance"),
            (PRECESSION.replace("\"precession\"", "\"helix\""), "field.family"),
            (PRECESSION.replace("theta = 1.0", "thetta = 1.0"), "thetta"),
            (PRECESSION.replace("omega = 1.0\n", ""), "omega"),
            (PRECESSION.replace("name = \"p\"", "name = \"a b\""), "name"),
            (format!("{PRECESSION}\n[outputs]\ntraces = [\"Q\"]\n"), "outputs.traces"),
        ];
        for (text, key) in cases {
            let e = parse(&text).unwrap_err().to_string();
            assert!(e.contains(key), "{key} not in {e}");
        }
    }

    #[test]
    fn class_ii_domain_bound() {
        let text = r#"
name = "c2"
spin_j = 1
tolerance = 1e-7
[grid]
t_end = 1.6
steps = 64
[field]
family = "class_ii_spiral"
lambda = 1.0
c1 = 2.0
c2 = 0.7
"#;
        let e = parse(text).unwrap_err().to_string();
        assert!(e.contains("grid.t_end") && e.contains("pi/(2*lambda)"), "{e}");
        assert!(parse(&text.replace("1.6", "1.4")).is_ok());
    }

    #[test]
    fn algebra_only_and_relative_csv() {
        let c = parse("name = \"alg\"\nspin_j = \"7/2\"\ntolerance = 1e-12\n").unwrap();
        assert!(c.grid.is_none() && c.field.is_none());
        let text = r#"
name = "tab"
spin_j = "1/2"
tolerance = 1e-6
[grid]
t_end = 1.0
steps = 16
[field]
family = "tabulated"
csv = "path.csv"
kB = { offset = 2.0, terms = [{ amp = 0.5, freq = 1.0 }] }
"#;
        match parse(text).unwrap().field.unwrap() {
            FieldConfig::Tabulated { csv, kb: KbLaw::Harmonic { terms, .. }, .. } => {
                assert_eq!(csv, Path::new("/cfg/path.csv"));
                assert_eq!(terms.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn traces_selection() {
        let c = parse(&format!("{PRECESSION}\n[outputs]\ntraces = true\n")).unwrap();
        assert_eq!(c.outputs.traces, TraceMatrix::ALL.to_vec());
        let c = parse(&format!("{PRECESSION}\n[outputs]\ntraces = [\"N\", \"U\", \"N\"]\n")).unwrap();
        assert_eq!(c.outputs.traces, vec![TraceMatrix::U, TraceMatrix::N]);
    }
}
