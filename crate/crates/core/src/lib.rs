//! Sensor-network attitude recovery.
//!
//! A network of `N` rigidly mounted sensors has unknown attitudes
//! `q_1 … q_N`. From the pairwise relative attitudes `O_ij = q_i·conj(q_j)`
//! and at least one sensor of known attitude, [`sna::solve`] recovers every
//! attitude from the dominant eigenpair of the hermitian quaternion matrix
//! `O`.
//!
//! - [`quat`]: quaternions, unit quaternions and rotation matrices.
//! - [`qmat`]: quaternion vectors and matrices, power iteration, and the
//!   complex-adjoint eigensolver used as an oracle.
//! - [`sna`]: the solver, its criteria and perturbation bounds.
//! - [`relattitude`]: relative attitudes from gravity and magnetic field
//!   measurements.
//! - [`simulate`]: synthetic networks, noise and Monte-Carlo sweeps.
//! - [`cli`]: the `sna` command-line driver.

pub mod cli;
pub mod error;
pub mod qmat;
pub mod quat;
pub mod relattitude;
pub mod simulate;
pub mod sna;

pub use error::{Result, SnaError};
pub use quat::{Quaternion, RotationMatrix, UnitQuaternion};
