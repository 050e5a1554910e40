//! The factorization U(t) = A(t) D(t) N(t).
//!
//! `A` is the geometric operator generated by n x dn/dt, `D` the dynamical
//! operator exp(i phi(t) S3) with phi(t) = -int k B, and `N` the non-adiabatic
//! operator whose generator has only S1 and S2 components:
//!
//! ```text
//! w1 = -|dn/dt| sin(beta - phi),  w2 = -|dn/dt| cos(beta - phi),  w3 = 0
//! ```
//!
//! All spin operators are written in the initial transported frame: S1, S2,
//! S3 in code stand for e1(0).S, e2(0).S, e3(0).S, so every lab-frame vector
//! is projected onto (e1(0), e2(0), e3(0)) before it reaches a generator.

use rayon::join;

use crate::algebra::{SpinRep, UnitaryMatrix, Vec3};
use crate::error::Result;
use crate::field::FieldSpec;
use crate::grid::{cumulative_simpson, simpson_panel, TimeGrid};
use crate::propagator::{schrodinger_oracle, time_ordered_exp, GeneratorFunction, PropagatorTrace, Stepper};
use crate::sphere::{any_triad, beta_angle, initial_triad, Basis, DirectionPath, GeometricAngles, STATIONARY_SPEED};

/// Where the initial frame (e1(0), e2(0), e3(0)) was taken from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameAnchor {
    /// The path moves at the grid start; e1(0) = n'(0).
    Start,
    /// The path is at rest until node `index`; e1(0) is the unit tangent there.
    Shifted { index: usize, time: f64 },
    /// The path never moves on the grid; e1(0) is an arbitrary vector normal to n.
    Stationary,
}

/// Initial-frame basis and its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialFrame {
    pub basis: Basis,
    pub anchor: FrameAnchor,
}

/// Picks (e1(0), e2(0), e3(0)), moving the anchor to the first node where
/// |dn/dt| exceeds [`STATIONARY_SPEED`] if the path starts at rest.
pub fn initial_frame(path: &DirectionPath, grid: &TimeGrid) -> InitialFrame {
    let p0 = path.eval(grid.start());
    if let Some(triad) = initial_triad(&p0) {
        return InitialFrame { basis: Basis::from_axes(triad), anchor: FrameAnchor::Start };
    }
    let n0 = p0.n;
    for (index, t) in grid.times().enumerate().skip(1) {
        let p = path.eval(t);
        if let Some(tangent) = p.unit_tangent() {
            // The path has not moved yet, so e3 stays n(0).
            let e1 = (tangent - n0 * tangent.dot(&n0)).normalize();
            return InitialFrame {
                basis: Basis::from_axes([e1, n0.cross(&e1), n0]),
                anchor: FrameAnchor::Shifted { index, time: t },
            };
        }
    }
    InitialFrame { basis: Basis::from_axes(any_triad(&n0)), anchor: FrameAnchor::Stationary }
}

/// phi(t) = -int_0^t k B, by cumulative Simpson.
pub fn dynamical_phase(field: &FieldSpec, grid: &TimeGrid) -> Vec<f64> {
    cumulative_simpson(grid, |t| -field.kb(t))
}

/// D(t) = exp(i phi(t) S3) and the phase phi(t).
#[derive(Clone, Debug)]
pub struct DynamicalTrace {
    pub phi: Vec<f64>,
    pub trace: PropagatorTrace,
}

pub fn dynamical_operator(field: &FieldSpec, rep: &SpinRep, grid: &TimeGrid) -> DynamicalTrace {
    let phi = dynamical_phase(field, grid);
    let unitaries = phi.iter().map(|&p| rep.exp_generator(&Vec3::new(0.0, 0.0, -p))).collect();
    DynamicalTrace { trace: PropagatorTrace::from_unitaries(*grid, unitaries, None), phi }
}

/// A(t): dA/dt = -i (n x dn/dt).S A, with the angular velocity in `basis`.
pub fn geometric_operator(
    path: &DirectionPath,
    rep: &SpinRep,
    grid: &TimeGrid,
    stepper: Stepper,
    basis: &Basis,
) -> Result<PropagatorTrace> {
    path.check_grid(grid)?;
    let gen = |t: f64| basis.to_local(&path.eval(t).angular_velocity());
    Ok(time_ordered_exp(&gen, rep, grid, stepper))
}

/// The non-adiabatic angular velocity (w1, w2, 0).
#[derive(Clone, Debug)]
pub struct NonadiabaticGenerator {
    grid: TimeGrid,
    beta: Vec<f64>,
    phi: Vec<f64>,
    source: Source,
}

#[derive(Clone, Debug)]
enum Source {
    /// Off-node beta and phi continue from the nearest node below with a
    /// Simpson panel over the field's own rates; speed comes from the path.
    Field(FieldSpec),
    /// Off-node values by cubic Lagrange interpolation of the node values.
    Nodes { speed: Vec<f64> },
}

/// The generator of N from node values of beta, |dn/dt| and phi alone.
pub fn nonadiabatic_generator(angles: &GeometricAngles, phi: &[f64]) -> NonadiabaticGenerator {
    assert_eq!(angles.beta.len(), phi.len(), "angles and phi must share the grid");
    NonadiabaticGenerator {
        grid: angles.grid,
        beta: angles.beta.clone(),
        phi: phi.to_vec(),
        source: Source::Nodes { speed: angles.speed.clone() },
    }
}

impl NonadiabaticGenerator {
    /// Generator that evaluates the field and path between nodes.
    pub fn from_field(field: &FieldSpec, angles: &GeometricAngles, phi: &[f64]) -> Self {
        assert_eq!(angles.beta.len(), phi.len(), "angles and phi must share the grid");
        NonadiabaticGenerator {
            grid: angles.grid,
            beta: angles.beta.clone(),
            phi: phi.to_vec(),
            source: Source::Field(field.clone()),
        }
    }

    /// (|dn/dt|, beta - phi) at time t.
    pub fn speed_and_phase(&self, t: f64) -> (f64, f64) {
        match &self.source {
            Source::Field(field) => {
                let k = self.grid.interval_of(t);
                let tk = self.grid.node(k);
                let beta = self.beta[k] + simpson_panel(tk, t, |s| field.path.eval(s).beta_rate());
                let phi = self.phi[k] - simpson_panel(tk, t, |s| field.kb(s));
                (field.path.eval(t).speed(), beta - phi)
            }
            Source::Nodes { speed } => {
                let lag = |v: &[f64]| lagrange4(&self.grid, v, t);
                (lag(speed), lag(&self.beta) - lag(&self.phi))
            }
        }
    }
}

impl GeneratorFunction for NonadiabaticGenerator {
    fn omega(&self, t: f64) -> Vec3 {
        let (speed, delta) = self.speed_and_phase(t);
        if speed <= STATIONARY_SPEED {
            return Vec3::zeros();
        }
        let (s, c) = delta.sin_cos();
        Vec3::new(-speed * s, -speed * c, 0.0)
    }
}

/// Four-point Lagrange interpolation of node values on a uniform grid.
fn lagrange4(grid: &TimeGrid, v: &[f64], t: f64) -> f64 {
    let m = grid.steps();
    if m < 3 {
        let k = grid.interval_of(t);
        let s = (t - grid.node(k)) / grid.step();
        return v[k] + s * (v[k + 1] - v[k]);
    }
    let k = grid.interval_of(t);
    let first = k.saturating_sub(1).min(m - 3);
    let x = (t - grid.node(first)) / grid.step();
    let mut acc = 0.0;
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (x - b as f64) / (a as f64 - b as f64);
            }
        }
        acc += w * v[first + a];
    }
    acc
}

/// Traces of U, A, D, N on one grid with the per-node residual.
#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub grid: TimeGrid,
    pub frame: InitialFrame,
    pub u: PropagatorTrace,
    pub a: PropagatorTrace,
    pub d: PropagatorTrace,
    pub n: PropagatorTrace,
    pub phi: Vec<f64>,
    pub angles: GeometricAngles,
    /// `||U - A D N||_F` at each node.
    pub residual: Vec<f64>,
}

impl FactorizationResult {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }

    /// A(t) D(t) N(t) at node k.
    pub fn product(&self, k: usize) -> UnitaryMatrix {
        &(self.a.at(k) * self.d.at(k)) * self.n.at(k)
    }

    /// beta - phi at each node.
    pub fn phase_lag(&self) -> Vec<f64> {
        self.angles.beta.iter().zip(&self.phi).map(|(b, p)| b - p).collect()
    }
}

/// Computes beta, l, |dn/dt| and phi, then A, D and N, and compares A D N with
/// the directly propagated U.
pub fn factorize(
    field: &FieldSpec,
    rep: &SpinRep,
    grid: &TimeGrid,
    stepper: Stepper,
) -> Result<FactorizationResult> {
    field.path.check_grid(grid)?;
    let frame = initial_frame(&field.path, grid);
    let angles = beta_angle(&field.path, grid);
    let dynamical = dynamical_operator(field, rep, grid);
    let gen = NonadiabaticGenerator::from_field(field, &angles, &dynamical.phi);

    let basis = frame.basis;
    let (u, (a, n)) = join(
        || schrodinger_oracle(field, rep, grid, stepper, &basis),
        || {
            join(
                || geometric_operator(&field.path, rep, grid, stepper, &basis),
                || time_ordered_exp(&gen, rep, grid, stepper),
            )
        },
    );
    let (u, a) = (u?, a?);
    let d = dynamical.trace;
    let residual = (0..grid.len())
        .map(|k| {
            let adn = &(a.at(k) * d.at(k)) * n.at(k);
            u.at(k).distance(&adn)
        })
        .collect();
    Ok(FactorizationResult { grid: *grid, frame, u, a, d, n, phi: dynamical.phi, angles, residual })
}
