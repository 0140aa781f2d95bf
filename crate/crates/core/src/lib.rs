//! Spectral solvers for the heat, Poisson and incompressible Navier-Stokes
//! equations in the closed cylinder `r ≤ 1, |z| ≤ 1`.
//!
//! Fields live on a doubled Chebyshev-Chebyshev-Fourier grid. Each Fourier
//! mode of a Helmholtz or Poisson problem becomes a banded Sylvester equation
//! `A·X·B + C·X·D = F`, which is solved by ADI with elliptic-function shifts.

pub mod adi;
pub mod banded;
pub mod baseline;
pub mod error;
pub mod grid;
pub mod manufactured;
pub mod ptns;
pub mod solvers;
pub mod special;
pub mod timestep;
pub mod transform;
pub mod ultraop;

pub use error::{Error, Result};
pub use grid::{GridField, GridSpec};
pub use transform::{CoeffTensor, TransformPlan};
