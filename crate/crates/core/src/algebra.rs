//! Spin-j irreducible representations of su(2) and exact-unitary exponentials
//! of their generators.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type Vec3 = Vector3<f64>;

/// Largest representation dimension accepted by [`SpinRep::new`].
pub const DEFAULT_DIM_CAP: usize = 64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A spin magnitude j, stored as the integer 2j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin("0".into()));
        }
        Ok(Spin { twice })
    }

    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn half() -> Self {
        Spin { twice: 1 }
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }

    /// Magnetic quantum numbers j, j-1, ..., -j (the S3 basis order).
    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let j = self.value();
        (0..self.dim()).map(move |k| j - k as f64)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.twice)
        } else {
            write!(f, "{}", self.twice / 2)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| Error::InvalidSpin(s.into()))?;
            match den.trim() {
                "2" => Spin::from_twice(num),
                "1" => Spin::from_twice(2 * num),
                _ => Err(Error::InvalidSpin(s.into())),
            }
        } else {
            let j: f64 = s.parse().map_err(|_| Error::InvalidSpin(s.into()))?;
            Spin::from_f64(j)
        }
    }
}

/// The three spin matrices S1, S2, S3 of the (2j+1)-dimensional irrep, in the
/// basis where S3 = diag(j, j-1, ..., -j).
#[derive(Clone, Debug)]
pub struct SpinRep {
    j: Spin,
    s: [CMatrix; 3],
}

/// Entrywise defects of [Si, Sj] = i eps_ijk Sk, S = S^dagger, S^2 = j(j+1)
/// and the spectrum {j, ..., -j} of a tilted n.S.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraDefects {
    pub commutator: f64,
    pub hermiticity: f64,
    pub casimir: f64,
    pub spectrum: f64,
}

impl AlgebraDefects {
    pub fn max(&self) -> f64 {
        self.commutator.max(self.hermiticity).max(self.casimir).max(self.spectrum)
    }
}

/// Builds the spin-j representation with the default dimension cap.
pub fn spin_matrices(j: Spin) -> Result<SpinRep> {
    SpinRep::new(j)
}

impl SpinRep {
    pub fn new(j: Spin) -> Result<Self> {
        Self::with_cap(j, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(j: Spin, cap: usize) -> Result<Self> {
        let dim = j.dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let jv = j.value();
        let m: Vec<f64> = j.m_values().collect();
        let mut raising = CMatrix::zeros(dim, dim);
        // Row index r holds m_r = j - r, so m+1 sits one row above.
        for c in 1..dim {
            let mc = m[c];
            raising[(c - 1, c)] = Complex64::new((jv * (jv + 1.0) - mc * (mc + 1.0)).sqrt(), 0.0);
        }
        let lowering = raising.adjoint();
        let s1 = (&raising + &lowering) * Complex64::new(0.5, 0.0);
        let s2 = (&raising - &lowering) * (-0.5 * I);
        let s3 = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            m.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        Ok(SpinRep { j, s: [s1, s2, s3] })
    }

    pub fn spin(&self) -> Spin {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn s1(&self) -> &CMatrix {
        &self.s[0]
    }

    pub fn s2(&self) -> &CMatrix {
        &self.s[1]
    }

    pub fn s3(&self) -> &CMatrix {
        &self.s[2]
    }

    pub fn components(&self) -> &[CMatrix; 3] {
        &self.s
    }

    /// S+ = S1 + i S2.
    pub fn raising(&self) -> CMatrix {
        &self.s[0] + &self.s[1] * I
    }

    /// S- = S1 - i S2.
    pub fn lowering(&self) -> CMatrix {
        &self.s[0] - &self.s[1] * I
    }

    /// v1 S1 + v2 S2 + v3 S3.
    pub fn axis_dot(&self, v: &Vec3) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (sk, &vk) in self.s.iter().zip(v.iter()) {
            if vk != 0.0 {
                out += sk * Complex64::new(vk, 0.0);
            }
        }
        out
    }

    /// Largest entrywise defects of the defining relations.
    pub fn algebra_defects(&self) -> AlgebraDefects {
        let [s1, s2, s3] = &self.s;
        let worst = |m: CMatrix| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let comm = |a: &CMatrix, b: &CMatrix, c: &CMatrix| worst(a * b - b * a - c * I);
        let jv = self.j.value();
        let id = CMatrix::identity(self.dim(), self.dim());
        let axis = Vec3::new(1.0, 1.0, 1.0).normalize();
        let eig = SymmetricEigen::new(self.axis_dot(&axis));
        let mut found: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        found.sort_by(|a, b| b.total_cmp(a));
        AlgebraDefects {
            commutator: comm(s1, s2, s3).max(comm(s2, s3, s1)).max(comm(s3, s1, s2)),
            hermiticity: self.s.iter().map(|m| worst(m - m.adjoint())).fold(0.0, f64::max),
            casimir: worst(s1 * s1 + s2 * s2 + s3 * s3 - id * Complex64::from(jv * (jv + 1.0))),
            spectrum: found.iter().zip(self.j.m_values()).map(|(f, m)| (f - m).abs()).fold(0.0, f64::max),
        }
    }

    /// exp(-i v.S), via the eigendecomposition of the Hermitian matrix v.S.
    pub fn exp_generator(&self, v: &Vec3) -> UnitaryMatrix {
        if v.x == 0.0 && v.y == 0.0 {
            // Diagonal generator: phase the S3 eigenvalues directly.
            let diag = self
                .j
                .m_values()
                .map(|m| Complex64::from_polar(1.0, -m * v.z));
            return UnitaryMatrix(CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                self.dim(),
                diag,
            )));
        }
        UnitaryMatrix(exp_hermitian(self.axis_dot(v)))
    }
}

/// exp(-i H) for Hermitian H.
pub fn exp_hermitian(h: CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let phased = CMatrix::from_fn(v.nrows(), v.ncols(), |r, c| {
        v[(r, c)] * Complex64::from_polar(1.0, -eig.eigenvalues[c])
    });
    phased * v.adjoint()
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A square complex matrix that is unitary up to round-off.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(dim, dim))
    }

    /// Wraps a matrix without checking unitarity.
    pub fn from_matrix_unchecked(m: CMatrix) -> Self {
        UnitaryMatrix(m)
    }

    /// Wraps a matrix, rejecting it when `||U^dag U - I||_F > tol`.
    pub fn try_from_matrix(m: CMatrix, tol: f64) -> Result<Self> {
        let u = UnitaryMatrix(m);
        let defect = u.unitarity_defect();
        if !(defect <= tol) {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("not unitary: defect {defect:e} > {tol:e}"),
            });
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix(self.0.adjoint())
    }

    /// `||U^dag U - I||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        frobenius(&(self.0.adjoint() * &self.0 - CMatrix::identity(n, n)))
    }

    pub fn distance(&self, other: &UnitaryMatrix) -> f64 {
        frobenius(&(&self.0 - &other.0))
    }

    pub fn distance_to_matrix(&self, other: &CMatrix) -> f64 {
        frobenius(&(&self.0 - other))
    }

    /// `||U - I||_F`.
    pub fn distance_to_identity(&self) -> f64 {
        let n = self.dim();
        frobenius(&(&self.0 - CMatrix::identity(n, n)))
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for UnitaryMatrix {
    type Output = UnitaryMatrix;

    fn mul(self, rhs: UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(self.0 * rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rep(twice: u32) -> SpinRep {
        SpinRep::new(Spin::from_twice(twice).unwrap()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn spin_half_matrices() {
        let r = rep(1);
        assert_eq!(r.s3()[(0, 0)], c(0.5));
        assert_eq!(r.s3()[(1, 1)], c(-0.5));
        let sp = r.raising();
        assert!((sp[(0, 1)] - c(1.0)).norm() < 1e-15);
        assert!(sp[(0, 0)].norm() + sp[(1, 0)].norm() + sp[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn spin_one_ladder_entries() {
        let r = rep(2);
        let sp = r.raising();
        let s2 = 2f64.sqrt();
        assert!((sp[(0, 1)] - c(s2)).norm() < 1e-15);
        assert!((sp[(1, 2)] - c(s2)).norm() < 1e-15);
        let diag: Vec<f64> = (0..3).map(|k| r.s3()[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn spin_three_halves_commutator() {
        let r = rep(3);
        let comm = r.s1() * r.s2() - r.s2() * r.s1() - r.s3() * I;
        assert!(frobenius(&comm) < 1e-13);
    }

    #[test]
    fn rejects_bad_spins() {
        assert!(Spin::from_f64(0.0).is_err());
        assert!(Spin::from_f64(-0.5).is_err());
        assert!(Spin::from_f64(0.7).is_err());
        assert!("1/3".parse::<Spin>().is_err());
        assert!(matches!(
            SpinRep::new(Spin::from_twice(64).unwrap()),
            Err(Error::DimensionCap { dim: 65, cap: 64 })
        ));
        assert!(SpinRep::new(Spin::from_twice(63).unwrap()).is_ok());
    }

    #[test]
    fn parses_spin_strings() {
        assert_eq!("1/2".parse::<Spin>().unwrap().twice(), 1);
        assert_eq!("3/2".parse::<Spin>().unwrap().twice(), 3);
        assert_eq!("2".parse::<Spin>().unwrap().twice(), 4);
        assert_eq!("2.5".parse::<Spin>().unwrap().twice(), 5);
        assert_eq!(Spin::from_twice(7).unwrap().to_string(), "7/2");
    }

    #[test]
    fn axis_dot_examples() {
        let r = rep(1);
        assert_eq!(r.axis_dot(&Vec3::z()), *r.s3());
        assert_eq!(frobenius(&r.axis_dot(&Vec3::zeros())), 0.0);
        let n = Vec3::new(1.0, 1.0, 1.0).normalize();
        let eig = SymmetricEigen::new(r.axis_dot(&n));
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 0.5).abs() < 1e-14 && (ev[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn exp_generator_examples() {
        for twice in 1..=4 {
            let r = rep(twice);
            let id = r.exp_generator(&Vec3::zeros());
            assert!(id.distance_to_identity() < 1e-15);
            let full = r.exp_generator(&Vec3::new(0.0, 0.0, 2.0 * PI));
            let sign = if twice % 2 == 1 { -1.0 } else { 1.0 };
            let target = CMatrix::identity(r.dim(), r.dim()) * c(sign);
            assert!(full.distance_to_matrix(&target) < 1e-14);
        }
    }

    #[test]
    fn exp_generator_matches_rotation_formula() {
        // exp(-i theta S2) for spin 1/2 is the real rotation [[c, -s], [s, c]] with half angles.
        let r = rep(1);
        let theta = 0.7;
        let u = r.exp_generator(&Vec3::new(0.0, theta, 0.0));
        let (s, cc) = (theta / 2.0).sin_cos();
        let expected = CMatrix::from_row_slice(2, 2, &[c(cc), c(-s), c(s), c(cc)]);
        assert!(u.distance_to_matrix(&expected) < 1e-14);
    }
}
