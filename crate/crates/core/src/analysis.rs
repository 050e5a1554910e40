//! Transition probabilities, Berry phases, resonance scans and adiabatic sweeps.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Schur};
use rayon::prelude::*;

use crate::algebra::{Spin, SpinRep, UnitaryMatrix, Vec3};
use crate::error::{Error, Result};
use crate::factorization::{factorize, geometric_operator, initial_frame};
use crate::field::FieldSpec;
use crate::grid::TimeGrid;
use crate::propagator::{schrodinger_oracle, PropagatorTrace, Stepper};
use crate::sphere::{circle_distance, make_precession_path, solid_angle, Basis, DirectionPath};


/// Tolerance on row and column sums of a transition table.
pub const STOCHASTIC_TOL: f64 = 1e-10;

/// P[m', m] = |<m'|N(t)|m>|^2 at each grid node, with m descending from j.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionTable {
    pub spin: Spin,
    pub times: Vec<f64>,
    pub probs: Vec<DMatrix<f64>>,
}

impl TransitionTable {
    /// Largest deviation of any row or column sum from 1.
    pub fn stochastic_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for p in &self.probs {
            for i in 0..p.nrows() {
                worst = worst.max((p.row(i).sum() - 1.0).abs());
                worst = worst.max((p.column(i).sum() - 1.0).abs());
            }
        }
        worst
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.stochastic_defect() <= STOCHASTIC_TOL
    }

    /// 1 - P[m, m] for the state with index `m` (0 is m = j), per node.
    pub fn leave_probability(&self, m: usize) -> Vec<f64> {
        self.probs.iter().map(|p| 1.0 - p[(m, m)]).collect()
    }

    /// Maximum over nodes of the probability of leaving m = j.
    pub fn peak_leave_probability(&self) -> f64 {
        self.leave_probability(0).into_iter().fold(0.0, f64::max)
    }
}

pub fn transition_matrix(u: &UnitaryMatrix) -> DMatrix<f64> {
    u.matrix().map(|z| z.norm_sqr())
}

pub fn transition_probabilities(trace: &PropagatorTrace, rep: &SpinRep) -> TransitionTable {
    TransitionTable {
        spin: rep.spin(),
        times: trace.grid.times().collect(),
        probs: trace.unitaries.iter().map(transition_matrix).collect(),
    }
}

/// Eigenphase comparison of A(T) for a closed path against e^{-i m Omega}.
#[derive(Clone, Debug, PartialEq)]
pub struct BerryCheck {
    pub solid_angle: f64,
    /// Eigenphases of A(T) in (-pi, pi], matched to m descending.
    pub phases: Vec<f64>,
    /// -m Omega for each m, descending.
    pub expected: Vec<f64>,
    /// Largest circle distance between matched pairs.
    pub discrepancy: f64,
    pub unitarity_drift: f64,
}

/// Eigenvalues of a square complex matrix via Schur decomposition.
pub fn eigenphases(u: &UnitaryMatrix) -> Vec<f64> {
    let schur = Schur::new(u.matrix().clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)].arg()).collect()
}

pub fn berry_phase_check(
    path: &DirectionPath,
    rep: &SpinRep,
    period: f64,
    steps: usize,
    stepper: Stepper,
) -> Result<BerryCheck> {
    let omega = solid_angle(path, period)?;
    let grid = TimeGrid::uniform(period, steps)?;
    let frame = initial_frame(path, &grid);
    let a = geometric_operator(path, rep, &grid, stepper, &frame.basis)?;
    let mut found = eigenphases(a.last());
    let expected: Vec<f64> = rep.spin().m_values().map(|m| -m * omega).collect();

    // Greedy nearest matching on the circle.
    let mut phases = Vec::with_capacity(expected.len());
    let mut discrepancy = 0.0f64;
    for e in &expected {
        let (idx, d) = found
            .iter()
            .enumerate()
            .map(|(i, p)| (i, circle_distance(*p, *e)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("one eigenphase per m");
        phases.push(found.swap_remove(idx));
        discrepancy = discrepancy.max(d);
    }
    Ok(BerryCheck { solid_angle: omega, phases, expected, discrepancy, unitarity_drift: a.max_drift() })
}

/// Flip probability for a spin 1/2 in the field k B n(t) with n precessing
/// about z at polar angle theta, from the rotating-frame solution.
pub fn rabi_flip_probability(theta: f64, omega: f64, kb: f64, t: f64) -> f64 {
    let w1 = kb * theta.sin();
    let detuning = kb * theta.cos() - omega;
    let r2 = w1 * w1 + detuning * detuning;
    if r2 == 0.0 {
        return 0.0;
    }
    w1 * w1 / r2 * (0.5 * r2.sqrt() * t).sin().powi(2)
}

/// The precession field k B n(t) with constant k B.
pub fn precession_field(theta: f64, omega: f64, kb: f64) -> Result<FieldSpec> {
    Ok(FieldSpec::constant(kb, make_precession_path(theta, omega)?))
}

/// U propagated in the fixed lab basis, whose S3 axis is the precession axis.
pub fn fixed_axis_transitions(
    field: &FieldSpec,
    rep: &SpinRep,
    grid: &TimeGrid,
    stepper: Stepper,
) -> Result<TransitionTable> {
    let u = schrodinger_oracle(field, rep, grid, stepper, &Basis::lab())?;
    Ok(transition_probabilities(&u, rep))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonancePoint {
    pub kb: f64,
    /// Peak of 1 - |U_{jj}|^2 with U in the lab basis.
    pub fixed_axis: f64,
    /// Peak of 1 - |N_{jj}|^2.
    pub moving_axis: f64,
    pub residual: f64,
}

/// Setup shared by all points of a resonance scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSetup {
    pub theta: f64,
    pub omega: f64,
    pub t_end: f64,
    pub steps: usize,
    pub stepper: Stepper,
}

pub fn resonance_point(setup: &ScanSetup, kb: f64, rep: &SpinRep) -> Result<ResonancePoint> {
    let grid = TimeGrid::uniform(setup.t_end, setup.steps)?;
    let field = precession_field(setup.theta, setup.omega, kb)?;
    let fixed = fixed_axis_transitions(&field, rep, &grid, setup.stepper)?;
    let fac = factorize(&field, rep, &grid, setup.stepper)?;
    let moving = transition_probabilities(&fac.n, rep);
    Ok(ResonancePoint {
        kb,
        fixed_axis: fixed.peak_leave_probability(),
        moving_axis: moving.peak_leave_probability(),
        residual: fac.max_residual(),
    })
}

/// Independent points run in parallel; output order follows `kbs`.
pub fn resonance_scan(setup: &ScanSetup, kbs: &[f64], rep: &SpinRep) -> Result<Vec<ResonancePoint>> {
    kbs.par_iter().map(|&kb| resonance_point(setup, kb, rep)).collect()
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
        .0
}

/// kB of the largest fixed-axis and moving-axis peaks.
pub fn scan_peaks(points: &[ResonancePoint]) -> (f64, f64) {
    let f = argmax(points.iter().map(|p| p.fixed_axis));
    let m = argmax(points.iter().map(|p| p.moving_axis));
    (points[f].kb, points[m].kb)
}

/// `count` evenly spaced values covering [lo, hi].
pub fn linspace(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(hi > lo) {
        return Err(Error::InvalidParameter {
            name: "resonance_scan",
            reason: format!("need count >= 2 and hi > lo (got {count} points on [{lo}, {hi}])"),
        });
    }
    let h = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { hi } else { lo + h * i as f64 }).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub slowdown: f64,
    pub t_end: f64,
    pub steps: usize,
    /// Peak of 1 - |N_{jj}|^2 over one loop.
    pub peak: f64,
    pub residual: f64,
}

/// One full precession loop at rate eps * omega for each eps in `slowdowns`,
/// with the step count scaled by 1/eps.
pub fn adiabatic_sweep(
    theta: f64,
    omega: f64,
    kb: f64,
    rep: &SpinRep,
    slowdowns: &[f64],
    base_steps: usize,
    stepper: Stepper,
) -> Result<Vec<SweepPoint>> {
    slowdowns
        .par_iter()
        .map(|&eps| {
            if !(eps > 0.0) {
                return Err(Error::InvalidParameter { name: "slowdown", reason: format!("{eps} must be > 0") });
            }
            let t_end = TAU / (eps * omega.abs());
            let steps = (base_steps as f64 / eps).round() as usize;
            let grid = TimeGrid::uniform(t_end, steps)?;
            let fac = factorize(&precession_field(theta, eps * omega, kb)?, rep, &grid, stepper)?;
            let peak = transition_probabilities(&fac.n, rep).peak_leave_probability();
            Ok(SweepPoint { slowdown: eps, t_end, steps, peak, residual: fac.max_residual() })
        })
        .collect()
}

/// Frobenius norm of A^{-1} (e_i . S) A - S_i at node k, maximised over i.
pub fn frame_covariance_defect(
    frame: &crate::sphere::Frame,
    a: &PropagatorTrace,
    basis: &Basis,
    rep: &SpinRep,
    k: usize,
) -> f64 {
    let ak = a.at(k);
    let e = frame.triad(k);
    (0..3)
        .map(|i| {
            let local: Vec3 = basis.to_local(&e[i]);
            let rotated = ak.adjoint().matrix() * rep.axis_dot(&local) * ak.matrix();
            crate::algebra::frobenius(&(rotated - &rep.components()[i]))
        })
        .fold(0.0, f64::max)
}
