//! Factorization U(t) = A(t) D(t) N(t) of the time evolution of a spin of any
//! magnitude in a general time-varying magnetic field.
//!
//! * [`algebra`]: spin-j matrices and exact-unitary exponentials.
//! * [`sphere`]: direction curves, parallel transport, geometric angle, solid angle.
//! * [`propagator`]: time-ordered exponentials and the Schrodinger reference propagator.
//! * [`factorization`]: the geometric, dynamical and non-adiabatic factors.
//! * [`solutions`]: field families for which the non-adiabatic factor is explicit.
//! * [`analysis`]: transition probabilities, Berry phases, resonance scans.

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod factorization;
pub mod field;
pub mod grid;
pub mod propagator;
pub mod solutions;
pub mod sphere;

pub use algebra::{spin_matrices, CMatrix, Spin, SpinRep, UnitaryMatrix, Vec3};
pub use error::{Error, Result};
pub use factorization::{factorize, FactorizationResult};
pub use field::{FieldSpec, MagnitudeLaw, MagnitudeTerm};
pub use grid::TimeGrid;
pub use propagator::{schrodinger_oracle, time_ordered_exp, GeneratorFunction, PropagatorTrace, Stepper};
pub use sphere::{DirectionPath, Frame, GeometricAngles, PathPoint};
pub use analysis::{berry_phase_check, resonance_scan, transition_probabilities, TransitionTable};
pub use solutions::{class_i_field, class_ii_spiral_path};
