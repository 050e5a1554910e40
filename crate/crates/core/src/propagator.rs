//! Time-ordered exponentials on the unitary group, and the direct
//! Schrodinger-equation propagator used as the reference for every
//! factorization check.
//!
//! Every generator here has the form `-i w(t).S`, so one step is always the
//! exact exponential of a single spin generator and stays unitary to
//! round-off. Unitarity is measured per node, never restored.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{SpinRep, UnitaryMatrix, Vec3};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::grid::TimeGrid;
use crate::sphere::Basis;

/// Step scheme for [`time_ordered_exp`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Stepper {
    /// exp of the midpoint generator; 2nd order.
    #[default]
    ExpMidpoint,
    /// Two-point Gauss-Legendre Magnus step with commutator correction; 4th order.
    Magnus4,
}

impl Stepper {
    pub fn name(self) -> &'static str {
        match self {
            Stepper::ExpMidpoint => "exp-midpoint",
            Stepper::Magnus4 => "magnus4",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Stepper::ExpMidpoint => 2,
            Stepper::Magnus4 => 4,
        }
    }
}

impl fmt::Display for Stepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stepper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp-midpoint" => Ok(Stepper::ExpMidpoint),
            "magnus4" => Ok(Stepper::Magnus4),
            other => Err(Error::InvalidParameter {
                name: "stepper",
                reason: format!("unknown stepper {other:?} (expected exp-midpoint or magnus4)"),
            }),
        }
    }
}

/// t -> w(t), where the instantaneous generator is -i w(t).S.
pub trait GeneratorFunction: Sync {
    fn omega(&self, t: f64) -> Vec3;
}

impl<F: Fn(f64) -> Vec3 + Sync> GeneratorFunction for F {
    fn omega(&self, t: f64) -> Vec3 {
        self(t)
    }
}

/// Unitaries on a grid, starting from the identity.
#[derive(Clone, Debug)]
pub struct PropagatorTrace {
    pub grid: TimeGrid,
    pub unitaries: Vec<UnitaryMatrix>,
    /// `None` for traces built from closed forms rather than stepping.
    pub stepper: Option<Stepper>,
    /// `||U^dag U - I||_F` at each node.
    pub drift: Vec<f64>,
}

impl PropagatorTrace {
    pub fn from_unitaries(grid: TimeGrid, unitaries: Vec<UnitaryMatrix>, stepper: Option<Stepper>) -> Self {
        let drift = unitaries.iter().map(UnitaryMatrix::unitarity_defect).collect();
        PropagatorTrace { grid, unitaries, stepper, drift }
    }

    pub fn at(&self, k: usize) -> &UnitaryMatrix {
        &self.unitaries[k]
    }

    pub fn last(&self) -> &UnitaryMatrix {
        self.unitaries.last().unwrap()
    }

    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6
const MAGNUS_COMMUTATOR: f64 = 0.144_337_567_297_406_4; // sqrt(3)/12

/// Rotation vector `u` of one step: the step propagator is exp(-i u.S).
///
/// For Magnus4 the commutator term is folded into `u` using
/// [a.S, b.S] = i (a x b).S, which holds in every irrep.
pub fn step_vector<G: GeneratorFunction + ?Sized>(gen: &G, t: f64, h: f64, stepper: Stepper) -> Vec3 {
    match stepper {
        Stepper::ExpMidpoint => gen.omega(t + 0.5 * h) * h,
        Stepper::Magnus4 => {
            let w1 = gen.omega(t + (0.5 - GAUSS_OFFSET) * h);
            let w2 = gen.omega(t + (0.5 + GAUSS_OFFSET) * h);
            (w1 + w2) * (0.5 * h) - w1.cross(&w2) * (MAGNUS_COMMUTATOR * h * h)
        }
    }
}

/// Solves dU/dt = -i w(t).S U with U(start) = I on `grid`.
pub fn time_ordered_exp<G: GeneratorFunction + ?Sized>(
    gen: &G,
    rep: &SpinRep,
    grid: &TimeGrid,
    stepper: Stepper,
) -> PropagatorTrace {
    propagate_from(gen, rep, grid, stepper, UnitaryMatrix::identity(rep.dim()))
}

/// As [`time_ordered_exp`], continuing from `initial` instead of the identity.
pub fn propagate_from<G: GeneratorFunction + ?Sized>(
    gen: &G,
    rep: &SpinRep,
    grid: &TimeGrid,
    stepper: Stepper,
    initial: UnitaryMatrix,
) -> PropagatorTrace {
    let h = grid.step();
    let mut unitaries = Vec::with_capacity(grid.len());
    let mut u = initial;
    unitaries.push(u.clone());
    for k in 0..grid.steps() {
        let step = rep.exp_generator(&step_vector(gen, grid.node(k), h, stepper));
        u = &step * &u;
        unitaries.push(u.clone());
    }
    PropagatorTrace::from_unitaries(*grid, unitaries, Some(stepper))
}

/// Direct propagation of i dU/dt = k B(t) n(t).S U, with the field's lab
/// vectors expressed in `basis` before they meet the spin matrices.
pub fn schrodinger_oracle(
    field: &FieldSpec,
    rep: &SpinRep,
    grid: &TimeGrid,
    stepper: Stepper,
    basis: &Basis,
) -> Result<PropagatorTrace> {
    field.path.check_grid(grid)?;
    let gen = |t: f64| basis.to_local(&field.rotation_vector(t));
    Ok(time_ordered_exp(&gen, rep, grid, stepper))
}
