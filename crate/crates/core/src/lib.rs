//! Density-matrix simulator and analysis toolkit for two-qubit X-states.
//!
//! * [`qmat`]: dense complex linear algebra, density matrices, fidelity.
//! * [`circuits`]: gate set, execution, X-state preparation circuits and the
//!   X-shaped SU(4) decomposition.
//! * [`xstate`]: X-state parameterisations, inversion, concurrence.
//! * [`heisenberg`]: XYZ Hamiltonian with inhomogeneous field, closed-form dynamics.
//! * [`tomography`]: shot sampling and full / partial reconstruction.
//! * [`noise`]: Kraus channels and a gate-level noise model.
//! * [`experiments`]: the sweeps driven by the `xsim` binary.

pub mod circuits;
pub mod error;
pub mod experiments;
pub mod heisenberg;
pub mod noise;
pub mod qmat;
pub mod rng;
pub mod tomography;
pub mod xstate;

pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, DensityMatrix, UnitaryMatrix, C64};
