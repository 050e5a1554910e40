//! Builds the field for a scenario and runs its checks.

use std::fs::File;

use spinfactor::analysis::{
    berry_phase_check, fixed_axis_transitions, linspace, rabi_flip_probability, resonance_scan,
    transition_probabilities, BerryCheck, ResonancePoint, ScanSetup, TransitionTable, STOCHASTIC_TOL,
};
use spinfactor::solutions::{class_i_closed_n, class_i_field, class_ii_closed_n, class_ii_spiral_path, ClassIISpec};
use spinfactor::sphere::{make_harmonic_path, make_nodding_path, make_precession_path, TabulatedPath};
use spinfactor::{
    factorize, DirectionPath, FactorizationResult, FieldSpec, MagnitudeLaw, SpinRep, Stepper, TimeGrid,
};

use crate::config::{FieldConfig, KbLaw, PathConfig, ScenarioConfig};
use crate::error::CliError;

/// Entrywise bound for the su(2) relations.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Bound on ||V^dag V - I||_F for propagated traces.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// All checks plus the requested outputs.
    Run,
    /// Checks only.
    Verify,
}

/// Closed form expected for N, if any.
#[derive(Clone, Copy, Debug, PartialEq)]
enum ClosedForm {
    None,
    ClassI,
    ClassII { c1: f64, c2: f64 },
}

/// A scenario ready to execute.
#[derive(Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub rep: SpinRep,
    pub setup: Option<(TimeGrid, FieldSpec)>,
    closed: ClosedForm,
}

#[derive(Debug)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub factorization: Option<FactorizationResult>,
    pub transitions: Option<TransitionTable>,
    pub berry: Option<BerryCheck>,
    pub scan: Option<Vec<ResonancePoint>>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn load_tabulated(path: &std::path::Path, key: &str) -> Result<TabulatedPath, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{key}: cannot open {}: {e}", path.display())))?;
    TabulatedPath::from_csv(file).map_err(|e| CliError::compute(key, e))
}

fn build_path(p: &PathConfig) -> Result<DirectionPath, CliError> {
    let key = "field.path";
    match p {
        PathConfig::Precession { theta, omega } => make_precession_path(*theta, *omega),
        PathConfig::Nodding { theta0, amp, nu, omega } => make_nodding_path(*theta0, *amp, *nu, *omega),
        PathConfig::Harmonic { offset, terms } => make_harmonic_path(*offset, terms.clone()),
        PathConfig::Tabulated { csv } => return Ok(DirectionPath::new(load_tabulated(csv, "field.path.csv")?)),
    }
    .map_err(|e| CliError::compute(key, e))
}

fn grid_for(path: &DirectionPath, t_end: f64, steps: usize) -> Result<TimeGrid, CliError> {
    let start = path.domain().start;
    let start = if start.is_finite() { start } else { 0.0 };
    let grid = TimeGrid::spanning(start, start + t_end, steps).map_err(|e| CliError::compute("grid", e))?;
    path.check_grid(&grid).map_err(|e| CliError::compute("grid.t_end", e))?;
    Ok(grid)
}

impl Scenario {
    pub fn build(config: ScenarioConfig) -> Result<Self, CliError> {
        config.check_domain()?;
        let rep = SpinRep::new(config.spin).map_err(|e| CliError::compute("spin_j", e))?;
        let (Some(g), Some(field_cfg)) = (config.grid, config.field.as_ref()) else {
            return Ok(Scenario { config, rep, setup: None, closed: ClosedForm::None });
        };
        let (grid, field, closed) = match field_cfg {
            FieldConfig::Static { direction, kb } => {
                let path = DirectionPath::fixed(*direction).map_err(|e| CliError::compute("field.direction", e))?;
                (grid_for(&path, g.t_end, g.steps)?, FieldSpec::constant(*kb, path), ClosedForm::None)
            }
            FieldConfig::Precession { theta, omega, kb } => {
                let path = make_precession_path(*theta, *omega).map_err(|e| CliError::compute("field", e))?;
                (grid_for(&path, g.t_end, g.steps)?, FieldSpec::constant(*kb, path), ClosedForm::None)
            }
            FieldConfig::ClassI { path } => {
                let path = build_path(path)?;
                let grid = grid_for(&path, g.t_end, g.steps)?;
                let field = class_i_field(&path, &grid).map_err(|e| CliError::compute("field.path", e))?;
                (grid, field, ClosedForm::ClassI)
            }
            FieldConfig::ClassIISpiral { lambda, c1, c2, sign } => {
                let path = class_ii_spiral_path(*lambda, *c1, *sign).map_err(|e| CliError::compute("field", e))?;
                let grid = grid_for(&path, g.t_end, g.steps)?;
                let spec = ClassIISpec::new(&path, *c1, *c2, &grid).map_err(|e| CliError::compute("field.c1", e))?;
                (grid, spec.field, ClosedForm::ClassII { c1: *c1, c2: *c2 })
            }
            FieldConfig::Tabulated { csv, k, kb } => {
                let path = DirectionPath::new(load_tabulated(csv, "field.csv")?);
                let grid = grid_for(&path, g.t_end, g.steps)?;
                let law = match kb {
                    KbLaw::Constant(v) => MagnitudeLaw::Constant(*v),
                    KbLaw::Harmonic { offset, terms } => MagnitudeLaw::Harmonic { offset: *offset, terms: terms.clone() },
                };
                let field = FieldSpec::new(*k, law, path).map_err(|e| CliError::compute("field.k", e))?;
                (grid, field, ClosedForm::None)
            }
        };
        Ok(Scenario { config, rep, setup: Some((grid, field)), closed })
    }

    fn stepper(&self) -> Stepper {
        self.config.stepper
    }

    /// Runs every applicable check. Independent computations run on the
    /// current rayon pool.
    pub fn execute(&self, mode: Mode) -> Result<Outcome, CliError> {
        let mut checks = vec![Check::new("algebra", self.rep.algebra_defects().max(), ALGEBRA_TOL)];
        let Some((grid, field)) = &self.setup else {
            return Ok(Outcome { checks, factorization: None, transitions: None, berry: None, scan: None });
        };
        let tol = self.config.tolerance;
        let outputs = &self.config.outputs;
        let want_scan = mode == Mode::Run && outputs.resonance_scan.is_some();

        let ((fac, rabi), (berry, scan)) = rayon::join(
            || {
                rayon::join(
                    || factorize(field, &self.rep, grid, self.stepper()).map_err(|e| CliError::compute("field", e)),
                    || self.rabi_defect(grid, field),
                )
            },
            || {
                rayon::join(
                    || {
                        outputs
                            .berry
                            .then(|| {
                                berry_phase_check(&field.path, &self.rep, grid.end() - grid.start(), grid.steps(), self.stepper())
                                    .map_err(|e| CliError::compute("outputs.berry", e))
                            })
                            .transpose()
                    },
                    || want_scan.then(|| self.scan(grid)).transpose(),
                )
            },
        );
        let (fac, rabi, berry, scan) = (fac?, rabi?, berry?, scan?);

        checks.push(Check::new("unitarity.U", fac.u.max_drift(), UNITARITY_TOL));
        checks.push(Check::new("unitarity.N", fac.n.max_drift(), UNITARITY_TOL));
        checks.push(Check::new("residual", fac.max_residual(), tol));
        let transitions = transition_probabilities(&fac.n, &self.rep);
        checks.push(Check::new("transitions.stochastic", transitions.stochastic_defect(), STOCHASTIC_TOL));

        let max_over = |f: &dyn Fn(usize) -> f64| (0..grid.len()).map(f).fold(0.0, f64::max);
        match self.closed {
            ClosedForm::None => {}
            ClosedForm::ClassI => {
                let d = max_over(&|k| fac.n.at(k).distance(&class_i_closed_n(fac.angles.arclen[k], &self.rep)));
                checks.push(Check::new("closed_form.class_i", d, tol));
            }
            ClosedForm::ClassII { c1, c2 } => {
                let t0 = grid.start();
                let d = max_over(&|k| fac.n.at(k).distance(&class_ii_closed_n(c1, c2, grid.node(k) - t0, &self.rep)));
                checks.push(Check::new("closed_form.class_ii", d, tol));
            }
        }
        if field.is_zero() {
            checks.push(Check::new("sudden.U", max_over(&|k| fac.u.at(k).distance_to_identity()), tol));
            checks.push(Check::new("sudden.N", max_over(&|k| fac.n.at(k).distance(&fac.a.at(k).adjoint())), tol));
        }
        if let Some(r) = rabi {
            checks.push(Check::new("rabi", r, tol));
        }
        if let Some(b) = &berry {
            checks.push(Check::new("berry", b.discrepancy, tol));
        }
        if let Some(points) = &scan {
            let worst = points.iter().map(|p| p.residual).fold(0.0, f64::max);
            checks.push(Check::new("resonance_scan.residual", worst, tol));
        }
        Ok(Outcome { checks, factorization: Some(fac), transitions: Some(transitions), berry, scan })
    }

    /// Max deviation of the lab-frame flip probability from the rotating-frame
    /// closed form; only for spin 1/2 precession.
    fn rabi_defect(&self, grid: &TimeGrid, field: &FieldSpec) -> Result<Option<f64>, CliError> {
        let Some(FieldConfig::Precession { theta, omega, kb }) = self.config.field else {
            return Ok(None);
        };
        if self.rep.dim() != 2 {
            return Ok(None);
        }
        let table = fixed_axis_transitions(field, &self.rep, grid, self.stepper())
            .map_err(|e| CliError::compute("field", e))?;
        let worst = grid
            .times()
            .zip(&table.probs)
            .map(|(t, p)| (p[(1, 0)] - rabi_flip_probability(theta, omega, kb, t)).abs())
            .fold(0.0, f64::max);
        Ok(Some(worst))
    }

    fn scan(&self, grid: &TimeGrid) -> Result<Vec<ResonancePoint>, CliError> {
        let Some(FieldConfig::Precession { theta, omega, .. }) = self.config.field else {
            return Err(CliError::Config("outputs.resonance_scan: only available for precession".into()));
        };
        let s = self.config.outputs.resonance_scan.expect("scan requested");
        let kbs = linspace(s.lo, s.hi, s.count).map_err(|e| CliError::compute("outputs.resonance_scan", e))?;
        let setup = ScanSetup { theta, omega, t_end: grid.end() - grid.start(), steps: grid.steps(), stepper: self.stepper() };
        resonance_scan(&setup, &kbs, &self.rep).map_err(|e| CliError::compute("outputs.resonance_scan", e))
    }
}
