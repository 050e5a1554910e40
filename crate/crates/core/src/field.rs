use crate::algebra::Vec3;
use crate::error::{Error, Result};
use crate::sphere::DirectionPath;

/// One sinusoidal term `amp * sin(freq t + phase)` of a field magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagnitudeTerm {
    pub amp: f64,
    pub freq: f64,
    pub phase: f64,
}

/// The scalar field magnitude B(t). It may vanish and change sign.
#[derive(Clone, Debug)]
pub enum MagnitudeLaw {
    Constant(f64),
    /// offset + sum of sinusoids.
    Harmonic { offset: f64, terms: Vec<MagnitudeTerm> },
    /// B(t) = detuning - d(beta)/dt along `path`, which pins
    /// beta(t) - phi(t) = detuning * t when k = 1.
    Locked { path: DirectionPath, detuning: f64 },
}

impl MagnitudeLaw {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            MagnitudeLaw::Constant(b) => *b,
            MagnitudeLaw::Harmonic { offset, terms } => {
                offset + terms.iter().map(|m| m.amp * (m.freq * t + m.phase).sin()).sum::<f64>()
            }
            MagnitudeLaw::Locked { path, detuning } => detuning - path.eval(t).beta_rate(),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            MagnitudeLaw::Constant(b) => *b == 0.0,
            MagnitudeLaw::Harmonic { offset, terms } => {
                *offset == 0.0 && terms.iter().all(|m| m.amp == 0.0)
            }
            MagnitudeLaw::Locked { .. } => false,
        }
    }
}

/// H(t) = k B(t) n(t).S.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub k: f64,
    pub magnitude: MagnitudeLaw,
    pub path: DirectionPath,
}

impl FieldSpec {
    pub fn new(k: f64, magnitude: MagnitudeLaw, path: DirectionPath) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParameter { name: "k", reason: "not finite".into() });
        }
        Ok(FieldSpec { k, magnitude, path })
    }

    /// Field with k = 1 and constant magnitude `kb`.
    pub fn constant(kb: f64, path: DirectionPath) -> Self {
        FieldSpec { k: 1.0, magnitude: MagnitudeLaw::Constant(kb), path }
    }

    /// k B(t).
    pub fn kb(&self, t: f64) -> f64 {
        self.k * self.magnitude.value(t)
    }

    /// k B(t) n(t), the Hamiltonian's rotation vector in the lab frame.
    pub fn rotation_vector(&self, t: f64) -> Vec3 {
        self.path.eval(t).n * self.kb(t)
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0.0 || self.magnitude.is_identically_zero()
    }
}
