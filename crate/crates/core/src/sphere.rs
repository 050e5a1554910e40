//! Direction curves on the unit two-sphere, their parallel-transported frame,
//! the geometric angle between that frame and the curve's own tangent frame,
//! and the solid angle enclosed by closed curves.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix2x3, Rotation3};

use crate::algebra::Vec3;
use crate::error::{Error, Result};
use crate::grid::{cumulative_simpson, TimeGrid};

/// Speeds at or below this are treated as a stationary direction.
pub const STATIONARY_SPEED: f64 = 1e-12;

/// Intervals used by [`solid_angle`].
pub const SOLID_ANGLE_INTERVALS: usize = 4096;

/// Minimum angular clearance (rad) between a solid-angle pole and the path.
const POLE_CLEARANCE: f64 = 1e-2;

const BRANCH_TOL: f64 = 1e-9;

const UNIT_NORM_TOL: f64 = 1e-6;
const CLOSED_PATH_TOL: f64 = 1e-6;
const MIN_TABULATED_SAMPLES: usize = 6;

/// n(t) with its first two time derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathPoint {
    pub n: Vec3,
    pub dn: Vec3,
    pub ddn: Vec3,
}

impl PathPoint {
    pub fn stationary(n: Vec3) -> Self {
        PathPoint { n, dn: Vec3::zeros(), ddn: Vec3::zeros() }
    }

    /// |dn/dt|.
    pub fn speed(&self) -> f64 {
        self.dn.norm()
    }

    /// n x dn/dt, the angular velocity that transports the frame.
    pub fn angular_velocity(&self) -> Vec3 {
        self.n.cross(&self.dn)
    }

    /// Unit tangent n' (derivative with respect to arc length).
    pub fn unit_tangent(&self) -> Option<Vec3> {
        let s = self.speed();
        (s > STATIONARY_SPEED).then(|| self.dn / s)
    }

    /// d(beta)/dt = -(d2n/dt2 . (n x dn/dt)) / |dn/dt|^2, zero at stationary points.
    pub fn beta_rate(&self) -> f64 {
        let s2 = self.dn.norm_squared();
        if s2.sqrt() <= STATIONARY_SPEED {
            return 0.0;
        }
        -self.ddn.dot(&self.angular_velocity()) / s2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Analytic,
    Tabulated,
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathKind::Analytic => "analytic-family",
            PathKind::Tabulated => "tabulated",
        })
    }
}

/// Time interval on which a curve is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub start: f64,
    pub end: f64,
    pub end_inclusive: bool,
}

impl Domain {
    pub const UNBOUNDED: Domain =
        Domain { start: f64::NEG_INFINITY, end: f64::INFINITY, end_inclusive: false };

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && (t < self.end || (self.end_inclusive && t <= self.end))
    }
}

/// Evaluator behind a [`DirectionPath`].
pub trait PathCurve: Send + Sync + fmt::Debug {
    /// Evaluates the curve; callers have already checked `t` against [`PathCurve::domain`].
    fn point(&self, t: f64) -> PathPoint;

    fn domain(&self) -> Domain {
        Domain::UNBOUNDED
    }

    fn kind(&self) -> PathKind {
        PathKind::Analytic
    }
}

/// A shared, immutable direction curve n(t).
#[derive(Clone, Debug)]
pub struct DirectionPath {
    curve: Arc<dyn PathCurve>,
}

impl DirectionPath {
    pub fn new(curve: impl PathCurve + 'static) -> Self {
        DirectionPath { curve: Arc::new(curve) }
    }

    /// The stationary path n(t) = n.
    pub fn fixed(n: Vec3) -> Result<Self> {
        let norm = n.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter { name: "direction", reason: "zero vector".into() });
        }
        Ok(Self::new(FixedDirection(n / norm)))
    }

    pub fn eval(&self, t: f64) -> PathPoint {
        self.curve.point(t)
    }

    pub fn try_eval(&self, t: f64) -> Result<PathPoint> {
        let d = self.curve.domain();
        if !d.contains(t) {
            return Err(Error::OutsideDomain { t, end: d.end });
        }
        Ok(self.curve.point(t))
    }

    pub fn domain(&self) -> Domain {
        self.curve.domain()
    }

    pub fn kind(&self) -> PathKind {
        self.curve.kind()
    }

    /// Fails if any part of `grid` lies outside the curve's domain.
    pub fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        let d = self.curve.domain();
        for t in [grid.start(), grid.end()] {
            if !d.contains(t) {
                return Err(Error::OutsideDomain { t, end: d.end });
            }
        }
        Ok(())
    }

    pub fn sample(&self, grid: &TimeGrid) -> Vec<PathPoint> {
        grid.times().map(|t| self.eval(t)).collect()
    }
}

#[derive(Debug)]
struct FixedDirection(Vec3);

impl PathCurve for FixedDirection {
    fn point(&self, _t: f64) -> PathPoint {
        PathPoint::stationary(self.0)
    }
}

/// Evaluates n = (sin th cos ph, sin th sin ph, cos th) and its derivatives from
/// the polar angle `th` and azimuth `ph`, each given as (value, rate, acceleration).
pub fn spherical_point(th: [f64; 3], ph: [f64; 3]) -> PathPoint {
    let (st, ct) = th[0].sin_cos();
    let (sp, cp) = ph[0].sin_cos();
    let n = Vec3::new(st * cp, st * sp, ct);
    let e_th = Vec3::new(ct * cp, ct * sp, -st);
    let e_ph = Vec3::new(-st * sp, st * cp, 0.0);
    let dn = e_th * th[1] + e_ph * ph[1];
    let ddn = e_th * th[2]
        + Vec3::new(-st * cp, -st * sp, -ct) * (th[1] * th[1])
        + Vec3::new(-ct * sp, ct * cp, 0.0) * (2.0 * th[1] * ph[1])
        + e_ph * ph[2]
        + Vec3::new(-st * cp, -st * sp, 0.0) * (ph[1] * ph[1]);
    PathPoint { n, dn, ddn }
}

/// Unit vector p/|p| and its first two derivatives, from p and its derivatives.
pub fn normalized_point(p: Vec3, dp: Vec3, ddp: Vec3) -> PathPoint {
    let r = p.norm();
    let r3 = r * r * r;
    let pd = p.dot(&dp);
    let n = p / r;
    let dn = dp / r - p * (pd / r3);
    let ddn = ddp / r - dp * (2.0 * pd / r3) - p * ((dp.norm_squared() + p.dot(&ddp)) / r3)
        + p * (3.0 * pd * pd / (r3 * r * r));
    PathPoint { n, dn, ddn }
}

/// Uniform precession about the z axis at fixed polar angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Precession {
    pub theta: f64,
    pub omega: f64,
}

impl PathCurve for Precession {
    fn point(&self, t: f64) -> PathPoint {
        spherical_point([self.theta, 0.0, 0.0], [self.omega * t, self.omega, 0.0])
    }
}

/// n(t) = (sin th cos wt, sin th sin wt, cos th).
pub fn make_precession_path(theta: f64, omega: f64) -> Result<DirectionPath> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("{theta} outside [0, pi]"),
        });
    }
    if !omega.is_finite() {
        return Err(Error::InvalidParameter { name: "omega", reason: "not finite".into() });
    }
    if theta == 0.0 || theta == PI || omega == 0.0 {
        return DirectionPath::fixed(Vec3::new(theta.sin(), 0.0, theta.cos()));
    }
    Ok(DirectionPath::new(Precession { theta, omega }))
}

/// Precession whose polar angle nods: th(t) = theta0 + amp sin(nu t), ph = omega t.
/// Not confined to a plane, so its geometric angle is non-trivial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nodding {
    pub theta0: f64,
    pub amp: f64,
    pub nu: f64,
    pub omega: f64,
}

impl PathCurve for Nodding {
    fn point(&self, t: f64) -> PathPoint {
        let (s, c) = (self.nu * t).sin_cos();
        let th = [
            self.theta0 + self.amp * s,
            self.amp * self.nu * c,
            -self.amp * self.nu * self.nu * s,
        ];
        spherical_point(th, [self.omega * t, self.omega, 0.0])
    }
}

pub fn make_nodding_path(theta0: f64, amp: f64, nu: f64, omega: f64) -> Result<DirectionPath> {
    if theta0 - amp.abs() <= 0.0 || theta0 + amp.abs() >= PI {
        return Err(Error::InvalidParameter {
            name: "amp",
            reason: "polar angle must stay inside (0, pi)".into(),
        });
    }
    Ok(DirectionPath::new(Nodding { theta0, amp, nu, omega }))
}

/// One Fourier term `amp * sin(freq t + phase)` of a [`Harmonic`] curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicTerm {
    pub amp: Vec3,
    pub freq: f64,
    pub phase: f64,
}

/// n(t) = p(t)/|p(t)| with p(t) = offset + sum of sinusoids.
#[derive(Clone, Debug, PartialEq)]
pub struct Harmonic {
    pub offset: Vec3,
    pub terms: Vec<HarmonicTerm>,
}

impl PathCurve for Harmonic {
    fn point(&self, t: f64) -> PathPoint {
        let (mut p, mut dp, mut ddp) = (self.offset, Vec3::zeros(), Vec3::zeros());
        for term in &self.terms {
            let (s, c) = (term.freq * t + term.phase).sin_cos();
            p += term.amp * s;
            dp += term.amp * (term.freq * c);
            ddp -= term.amp * (term.freq * term.freq * s);
        }
        normalized_point(p, dp, ddp)
    }
}

/// A harmonic curve; requires |offset| to exceed the summed term amplitudes so
/// that p(t) never vanishes.
pub fn make_harmonic_path(offset: Vec3, terms: Vec<HarmonicTerm>) -> Result<DirectionPath> {
    let reach: f64 = terms.iter().map(|t| t.amp.norm()).sum();
    if offset.norm() <= reach {
        return Err(Error::InvalidParameter {
            name: "offset",
            reason: "offset must dominate the oscillating terms".into(),
        });
    }
    Ok(DirectionPath::new(Harmonic { offset, terms }))
}

/// A uniformly sampled direction curve.
///
/// Each component is interpolated by a C4 quintic spline and the result is
/// normalised, so n, dn/dt and d2n/dt2 are exact derivatives of one curve
/// and the first kink is in the fifth derivative.
#[derive(Clone, Debug)]
pub struct TabulatedPath {
    grid: TimeGrid,
    n: Vec<Vec3>,
    dn: Vec<Vec3>,
    ddn: Vec<Vec3>,
}

impl TabulatedPath {
    pub fn new(samples: &[(f64, Vec3)]) -> Result<Self> {
        if samples.len() < MIN_TABULATED_SAMPLES {
            return Err(Error::TabulatedPath(format!(
                "too few samples: {} < {MIN_TABULATED_SAMPLES}",
                samples.len()
            )));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::TabulatedPath(format!(
                    "times not strictly increasing at t = {}",
                    w[1].0
                )));
            }
        }
        let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let grid = TimeGrid::from_times(&times).map_err(|e| Error::TabulatedPath(e.to_string()))?;
        let mut n = Vec::with_capacity(samples.len());
        for &(t, v) in samples {
            let norm = v.norm();
            if !((norm - 1.0).abs() <= UNIT_NORM_TOL) {
                return Err(Error::TabulatedPath(format!(
                    "sample at t = {t} has norm {norm}, not within {UNIT_NORM_TOL:e} of 1"
                )));
            }
            n.push(v / norm);
        }
        let h = grid.step();
        let (dn, ddn) = spline_derivatives(&n, h);
        Ok(TabulatedPath { grid, n, dn, ddn })
    }

    /// Reads `t,nx,ny,nz` rows (header required).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::TabulatedPath(format!("header: {e}")))?
            .clone();
        let expected = ["t", "nx", "ny", "nz"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::TabulatedPath(format!(
                "header must be t,nx,ny,nz (got {})",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::TabulatedPath(format!("row {}: {e}", row + 2)))?;
            let mut vals = [0.0; 4];
            for (k, v) in vals.iter_mut().enumerate() {
                let field = rec.get(k).ok_or_else(|| {
                    Error::TabulatedPath(format!("row {}: missing column {}", row + 2, expected[k]))
                })?;
                *v = field.parse().map_err(|_| {
                    Error::TabulatedPath(format!(
                        "row {}: column {}: cannot parse {field:?}",
                        row + 2,
                        expected[k]
                    ))
                })?;
            }
            samples.push((vals[0], Vec3::new(vals[1], vals[2], vals[3])));
        }
        Self::new(&samples)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Node values (n, dn/dt, d2n/dt2) at sample `k`.
    pub fn node(&self, k: usize) -> PathPoint {
        PathPoint { n: self.n[k], dn: self.dn[k], ddn: self.ddn[k] }
    }
}

impl PathCurve for TabulatedPath {
    fn point(&self, t: f64) -> PathPoint {
        let k = self.grid.interval_of(t);
        let h = self.grid.step();
        let s = ((t - self.grid.node(k)) / h).clamp(0.0, 1.0);
        let b = quintic_hermite_basis(s);
        let (p0, v0, a0) = (self.n[k], self.dn[k] * h, self.ddn[k] * (h * h));
        let (p1, v1, a1) = (self.n[k + 1], self.dn[k + 1] * h, self.ddn[k + 1] * (h * h));
        let combine = |w: &[f64; 6]| {
            p0 * w[0] + v0 * w[1] + a0 * w[2] + a1 * w[3] + v1 * w[4] + p1 * w[5]
        };
        let p = combine(&b[0]);
        let dp = combine(&b[1]) / h;
        let ddp = combine(&b[2]) / (h * h);
        normalized_point(p, dp, ddp)
    }

    fn domain(&self) -> Domain {
        Domain { start: self.grid.start(), end: self.grid.end(), end_inclusive: true }
    }

    fn kind(&self) -> PathKind {
        PathKind::Tabulated
    }
}

pub fn make_tabulated_path(samples: &[(f64, Vec3)]) -> Result<DirectionPath> {
    Ok(DirectionPath::new(TabulatedPath::new(samples)?))
}

/// Quintic Hermite weights for (p0, v0, a0, a1, v1, p1) and their first and
/// second derivatives in the unit parameter.
fn quintic_hermite_basis(s: f64) -> [[f64; 6]; 3] {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let val = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (s3 - 2.0 * s4 + s5),
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
    ];
    let d1 = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
    ];
    let d2 = [
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
        0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
        0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
    ];
    [val, d1, d2]
}

/// Scaled node derivatives (h n', h^2 n'') of the C4 quintic interpolating
/// spline through `f`.
///
/// Interior nodes satisfy C3 and C4 continuity of the piecewise quintic
/// Hermite curve, which is a block-tridiagonal system in (h n', h^2 n'').
/// The end nodes are clamped to 6-point one-sided differences.
fn spline_derivatives(f: &[Vec3], h: f64) -> (Vec<Vec3>, Vec<Vec3>) {
    const D1: [f64; 6] = [-137.0 / 60.0, 5.0, -5.0, 10.0 / 3.0, -1.25, 0.2];
    const D2: [f64; 6] = [3.75, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0];
    let m = f.len() - 1;
    let one_sided = |w: &[f64; 6], sign: f64, from_end: bool| -> Vec3 {
        w.iter().enumerate().map(|(k, c)| f[if from_end { m - k } else { k }] * (c * sign)).sum()
    };
    let row = |d: Vec3, e: Vec3| Matrix2x3::from_rows(&[d.transpose(), e.transpose()]);
    let mut x = vec![Matrix2x3::zeros(); m + 1];
    x[0] = row(one_sided(&D1, 1.0, false), one_sided(&D2, 1.0, false));
    x[m] = row(one_sided(&D1, -1.0, true), one_sided(&D2, 1.0, true));

    // Row 0 is C4 continuity, row 1 is C3 continuity.
    let lower = Matrix2::new(7.0, 1.0, -8.0, -1.0);
    let diag = Matrix2::new(16.0, 0.0, 0.0, 6.0);
    let upper = Matrix2::new(7.0, -1.0, 8.0, -1.0);
    let rhs = |i: usize| row((f[i + 1] - f[i - 1]) * 15.0, (f[i - 1] - f[i] * 2.0 + f[i + 1]) * 20.0);

    let mut c = vec![Matrix2::zeros(); m];
    let mut d = vec![Matrix2x3::zeros(); m];
    for i in 1..m {
        let mut r = rhs(i);
        if i == 1 {
            r -= lower * x[0];
        }
        if i == m - 1 {
            r -= upper * x[m];
        }
        let (piv, prev) = if i == 1 { (diag, Matrix2x3::zeros()) } else { (diag - lower * c[i - 1], d[i - 1]) };
        let inv = piv.try_inverse().expect("spline system is nonsingular");
        if i < m - 1 {
            c[i] = inv * upper;
        }
        d[i] = inv * (r - if i == 1 { Matrix2x3::zeros() } else { lower * prev });
    }
    for i in (1..m).rev() {
        x[i] = if i == m - 1 { d[i] } else { d[i] - c[i] * x[i + 1] };
    }
    let dn = x.iter().map(|v| v.row(0).transpose() / h).collect();
    let ddn = x.iter().map(|v| v.row(1).transpose() / (h * h)).collect();
    (dn, ddn)
}

/// An orthonormal basis of R^3; vectors are expressed in it by projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Basis {
    axes: [Vec3; 3],
}

impl Basis {
    pub fn lab() -> Self {
        Basis { axes: [Vec3::x(), Vec3::y(), Vec3::z()] }
    }

    pub fn from_axes(axes: [Vec3; 3]) -> Self {
        Basis { axes }
    }

    pub fn axes(&self) -> &[Vec3; 3] {
        &self.axes
    }

    /// Components of the lab vector `v` along the basis axes.
    pub fn to_local(&self, v: &Vec3) -> Vec3 {
        Vec3::new(self.axes[0].dot(v), self.axes[1].dot(v), self.axes[2].dot(v))
    }

    pub fn to_lab(&self, local: &Vec3) -> Vec3 {
        self.axes[0] * local.x + self.axes[1] * local.y + self.axes[2] * local.z
    }
}

/// The triad (n', n x n', n) at a regular point.
pub fn initial_triad(p: &PathPoint) -> Option<[Vec3; 3]> {
    let t = p.unit_tangent()?;
    Some([t, p.n.cross(&t), p.n])
}

/// Some triad with third axis `n`, for paths that never move.
pub fn any_triad(n: &Vec3) -> [Vec3; 3] {
    let seed = [Vec3::x(), Vec3::y(), Vec3::z()]
        .into_iter()
        .min_by(|a, b| a.dot(n).abs().total_cmp(&b.dot(n).abs()))
        .unwrap();
    let e1 = (seed - n * seed.dot(n)).normalize();
    [e1, n.cross(&e1), *n]
}

/// Parallel-transported triad e1, e2, e3 on a time grid.
#[derive(Clone, Debug)]
pub struct Frame {
    grid: TimeGrid,
    triads: Vec<[Vec3; 3]>,
}

impl Frame {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn triad(&self, k: usize) -> &[Vec3; 3] {
        &self.triads[k]
    }

    pub fn triads(&self) -> &[[Vec3; 3]] {
        &self.triads
    }

    pub fn basis(&self, k: usize) -> Basis {
        Basis::from_axes(self.triads[k])
    }

    /// Max deviation of the Gram matrix from the identity at each node.
    pub fn orthonormality_drift(&self) -> Vec<f64> {
        self.triads
            .iter()
            .map(|e| {
                let mut worst: f64 = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        let target = if a == b { 1.0 } else { 0.0 };
                        worst = worst.max((e[a].dot(&e[b]) - target).abs());
                    }
                }
                worst
            })
            .collect()
    }

    /// Rotation angle of the final triad about the initial e3: the angle from
    /// e1(start) to e1(end) in the e1-e2 plane, right-handed about e3.
    pub fn holonomy_angle(&self) -> f64 {
        let first = &self.triads[0];
        let last = self.triads.last().unwrap();
        last[0].dot(&first[1]).atan2(last[0].dot(&first[0]))
    }
}

/// Transports the triad with d e_i/dt = (n x dn/dt) x e_i.
///
/// Each step applies the exact rotation by `h (n x dn/dt)` evaluated at the
/// step midpoint. The triad is never re-orthonormalised.
pub fn transport_frame(path: &DirectionPath, grid: &TimeGrid) -> Result<Frame> {
    path.check_grid(grid)?;
    let p0 = path.eval(grid.start());
    let triad = initial_triad(&p0)
        .ok_or(Error::StationaryStart { t: grid.start(), speed: p0.speed() })?;
    Ok(transport_from(path, grid, triad))
}

/// Transport from an arbitrary initial triad.
pub fn transport_from(path: &DirectionPath, grid: &TimeGrid, initial: [Vec3; 3]) -> Frame {
    let h = grid.step();
    let mut triads = Vec::with_capacity(grid.len());
    triads.push(initial);
    let mut e = initial;
    for k in 0..grid.steps() {
        let w = path.eval(grid.node(k) + 0.5 * h).angular_velocity() * h;
        let rot = Rotation3::from_scaled_axis(w);
        for v in e.iter_mut() {
            *v = rot * *v;
        }
        triads.push(e);
    }
    Frame { grid: *grid, triads }
}

/// beta(t), arc length l(t) and speed |dn/dt| on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricAngles {
    pub grid: TimeGrid,
    pub beta: Vec<f64>,
    pub arclen: Vec<f64>,
    pub speed: Vec<f64>,
}

/// Integrates d(beta)/dt and |dn/dt| by cumulative Simpson from the grid start.
pub fn beta_angle(path: &DirectionPath, grid: &TimeGrid) -> GeometricAngles {
    let beta = cumulative_simpson(grid, |t| path.eval(t).beta_rate());
    let arclen = cumulative_simpson(grid, |t| path.eval(t).speed());
    let speed = grid.times().map(|t| path.eval(t).speed()).collect();
    GeometricAngles { grid: *grid, beta, arclen, speed }
}

/// Oriented solid angle enclosed by the closed path over [0, period], in (-2pi, 2pi].
pub fn solid_angle(path: &DirectionPath, period: f64) -> Result<f64> {
    solid_angle_with(path, period, SOLID_ANGLE_INTERVALS)
}

pub fn solid_angle_with(path: &DirectionPath, period: f64, intervals: usize) -> Result<f64> {
    let grid = TimeGrid::uniform(period, intervals)?;
    path.check_grid(&grid)?;
    let gap = (path.eval(period).n - path.eval(0.0).n).norm();
    if !(gap < CLOSED_PATH_TOL) {
        return Err(Error::OpenPath { gap });
    }
    let h = grid.step();
    let samples: Vec<Vec3> = (0..=2 * intervals).map(|k| path.eval(0.5 * h * k as f64).n).collect();

    let mut poles: Vec<(f64, Vec3)> = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()]
        .into_iter()
        .map(|p| {
            let clearance =
                samples.iter().map(|n| n.dot(&p).abs().min(1.0).acos()).fold(f64::INFINITY, f64::min);
            (clearance, p)
        })
        .collect();
    poles.sort_by(|a, b| b.0.total_cmp(&a.0));
    let tried = 3;
    let pole = poles
        .iter()
        .take(tried)
        .find(|(clearance, _)| *clearance > POLE_CLEARANCE)
        .map(|(_, p)| *p)
        .ok_or(Error::NoPole { tried })?;

    let [u, v, _] = any_triad(&pole);
    // (1 - n.p) d(phi)/dt in coordinates about the pole.
    let integrand = |t: f64| {
        let pt = path.eval(t);
        let (x, y) = (pt.n.dot(&u), pt.n.dot(&v));
        let rho2 = x * x + y * y;
        let dphi = (x * pt.dn.dot(&v) - y * pt.dn.dot(&u)) / rho2;
        (1.0 - pt.n.dot(&pole)) * dphi
    };
    let omega = *cumulative_simpson(&grid, integrand).last().unwrap();
    Ok(reduce_solid_angle(omega))
}

/// Maps an angle to the branch (-2pi, 2pi] modulo 4pi.
pub fn reduce_solid_angle(omega: f64) -> f64 {
    let period = 2.0 * TAU;
    let r = omega.rem_euclid(period);
    // Quadrature noise must not flip a loop on the branch cut to -2pi.
    if (r - TAU).abs() < BRANCH_TOL {
        TAU
    } else if r > TAU {
        r - period
    } else {
        r
    }
}

/// Shortest distance between two angles on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
