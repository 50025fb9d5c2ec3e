//! Second-quantized simulation of identical bosons and fermions.
//!
//! * [`fock`]: occupation-number states and basis enumeration.
//! * [`kernels`]: permanents (Ryser, Gray-code order) and determinants.
//! * [`optics`]: beamsplitters and other single-particle unitaries, lifted to
//!   many-particle amplitudes.
//! * [`dynamics`]: measurement, coarse-grained transfer matrices, steady
//!   states and dephasing channels.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod kernels;
pub mod optics;

pub use error::{FockError, FockResult};
pub use fock::{enumerate_basis, FockVector, OccupationVector, OutcomeDistribution, ParticleKind};
pub use kernels::ComplexMatrix;
pub use optics::{BeamsplitterSpec, SingleParticleUnitary};

pub use num_complex::Complex64 as C64;
