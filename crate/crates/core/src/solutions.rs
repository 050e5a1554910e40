//! Fields for which the non-adiabatic operator is an ordinary exponential.
//!
//! * Class i locks beta(t) = phi(t). Then N(t) = exp(i l(t) S2), where l is
//!   the arc length traversed.
//! * Class ii needs constant speed |dn/dt| = c1 and beta(t) - phi(t) = c2 t.
//!   Then N(t) = exp(i c2 t S3) exp((i c1 S2 - i c2 S3) t).
//!
//! Both conditions are met by picking k B(t) = c2 - d(beta)/dt, with c2 = 0
//! for class i. The constant-speed curve used for class ii is a loxodrome
//! that leaves the equator at rate lambda and winds towards the north pole.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::algebra::{SpinRep, UnitaryMatrix, Vec3};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, MagnitudeLaw};
use crate::grid::TimeGrid;
use crate::sphere::{spherical_point, DirectionPath, Domain, PathCurve, PathPoint, STATIONARY_SPEED};

/// Tolerance on | |dn/dt| - c1 | for class-ii paths.
pub const CLASS_II_SPEED_TOL: f64 = 1e-8;

/// Field k B(t) = -d(beta)/dt (with k = 1), which locks beta - phi to zero.
///
/// Fails when the path is stationary at an interior grid node.
pub fn class_i_field(path: &DirectionPath, grid: &TimeGrid) -> Result<FieldSpec> {
    path.check_grid(grid)?;
    for k in 1..grid.steps() {
        let t = grid.node(k);
        if path.eval(t).speed() <= STATIONARY_SPEED {
            return Err(Error::StationaryInterior { t });
        }
    }
    Ok(locked_field(path, 0.0))
}

/// Field k B(t) = c2 - d(beta)/dt, which gives beta - phi = c2 t.
pub fn locked_field(path: &DirectionPath, c2: f64) -> FieldSpec {
    FieldSpec {
        k: 1.0,
        magnitude: MagnitudeLaw::Locked { path: path.clone(), detuning: c2 },
        path: path.clone(),
    }
}

/// exp(i l S2).
pub fn class_i_closed_n(arclen: f64, rep: &SpinRep) -> UnitaryMatrix {
    rep.exp_generator(&Vec3::new(0.0, -arclen, 0.0))
}

/// exp(i c2 t S3) exp((i c1 S2 - i c2 S3) t).
pub fn class_ii_closed_n(c1: f64, c2: f64, t: f64, rep: &SpinRep) -> UnitaryMatrix {
    let outer = rep.exp_generator(&Vec3::new(0.0, 0.0, -c2 * t));
    let inner = rep.exp_generator(&Vec3::new(0.0, -c1 * t, c2 * t));
    &outer * &inner
}

/// A class-i field together with the path it was built from.
#[derive(Clone, Debug)]
pub struct ClassISpec {
    pub field: FieldSpec,
}

impl ClassISpec {
    pub fn new(path: &DirectionPath, grid: &TimeGrid) -> Result<Self> {
        Ok(ClassISpec { field: class_i_field(path, grid)? })
    }

    pub fn closed_n(&self, arclen: f64, rep: &SpinRep) -> UnitaryMatrix {
        class_i_closed_n(arclen, rep)
    }
}

/// A class-ii field on a path of constant speed `c1`.
#[derive(Clone, Debug)]
pub struct ClassIISpec {
    pub c1: f64,
    pub c2: f64,
    pub field: FieldSpec,
}

impl ClassIISpec {
    /// Checks the speed condition at every grid node.
    pub fn new(path: &DirectionPath, c1: f64, c2: f64, grid: &TimeGrid) -> Result<Self> {
        path.check_grid(grid)?;
        for t in grid.times() {
            let speed = path.eval(t).speed();
            if (speed - c1).abs() > CLASS_II_SPEED_TOL {
                return Err(Error::InvalidParameter {
                    name: "c1",
                    reason: format!("path speed {speed} at t = {t} differs from c1 = {c1}"),
                });
            }
        }
        Ok(ClassIISpec { c1, c2, field: locked_field(path, c2) })
    }

    pub fn closed_n(&self, t: f64, rep: &SpinRep) -> UnitaryMatrix {
        class_ii_closed_n(self.c1, self.c2, t, rep)
    }
}

/// Constant-speed loxodrome n(t) = (cos(lt) cos f, cos(lt) sin f, sin(lt)) with
/// f(t) = sign * sqrt(c1^2 - l^2) / l * ln tan(l t / 2 + pi/4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Loxodrome {
    pub lambda: f64,
    pub c1: f64,
    pub sign: f64,
}

impl Loxodrome {
    fn rate(&self) -> f64 {
        self.sign * (self.c1 * self.c1 - self.lambda * self.lambda).sqrt()
    }

    /// The azimuth f(t).
    pub fn azimuth(&self, t: f64) -> f64 {
        self.rate() / self.lambda * (0.5 * self.lambda * t + FRAC_PI_4).tan().ln()
    }

    /// End of the domain, pi / (2 lambda), where the curve reaches the pole.
    pub fn t_max(&self) -> f64 {
        FRAC_PI_2 / self.lambda
    }
}

impl PathCurve for Loxodrome {
    fn point(&self, t: f64) -> PathPoint {
        let (s, c) = (self.lambda * t).sin_cos();
        let a = self.rate();
        // Polar angle pi/2 - lambda t.
        let th = [FRAC_PI_2 - self.lambda * t, -self.lambda, 0.0];
        let ph = [self.azimuth(t), a / c, a * self.lambda * s / (c * c)];
        spherical_point(th, ph)
    }

    fn domain(&self) -> Domain {
        Domain { start: 0.0, end: self.t_max(), end_inclusive: false }
    }
}

/// The constant-speed spiral used for class-ii fields; `sign` picks the
/// winding direction.
pub fn class_ii_spiral_path(lambda: f64, c1: f64, sign: f64) -> Result<DirectionPath> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter { name: "lambda", reason: format!("{lambda} must be > 0") });
    }
    if !(c1 * c1 > lambda * lambda) {
        return Err(Error::InvalidParameter {
            name: "c1",
            reason: format!("need c1^2 > lambda^2 (c1 = {c1}, lambda = {lambda})"),
        });
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidParameter { name: "sign", reason: format!("{sign} is not +1 or -1") });
    }
    Ok(DirectionPath::new(Loxodrome { lambda, c1, sign }))
}
