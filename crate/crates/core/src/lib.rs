//! Boundary integral solver for the exterior 2D Helmholtz Dirichlet problem
//! using continuous virtual sources on an inward parallel curve.
//!
//! The solution is represented as a generalized combined layer potential
//! whose monopole/dipole sources live on the shifted curve
//! `Γ_h = { y − h·ν(y) : y ∈ Γ }`. Because the Green's function singularity
//! is displaced a distance `h` off the physical boundary, every kernel is
//! smooth on `Γ` and the periodic trapezoid rule discretizes the integral
//! operator without any singularity treatment. A rotated-Padé on-surface
//! radiation operator approximates the Dirichlet-to-Neumann map both inside
//! the layer combination and as the preconditioner `B = I − h·Λ`, keeping
//! the discrete system well conditioned. Systems are solved by matrix-free
//! GMRES; dense spectra are available for conditioning studies.
//!
//! Module map:
//! - [`specfun`]: Bessel/Hankel functions of integer order.
//! - [`geometry`]: parametric closed curves, meshes, the parallel-curve shift.
//! - [`kernels`]: displaced fundamental solution and its source-normal derivative.
//! - [`osrc`]: rotated Padé coefficients, periodic P1 FEM, radiation operator.
//! - [`linalg`]: complex GMRES, cyclic tridiagonal solves, dense eigenvalues.
//! - [`operator`]: the discrete virtual-source operator and field evaluation.
//! - [`reference`]: analytic solutions used as ground truth.
//! - [`cli`]: experiment drivers and CSV/JSON reporting.

pub mod cli;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod operator;
pub mod osrc;
pub mod reference;
pub mod specfun;

pub use geometry::{BoundaryCurve, Mesh, Point2};
pub use linalg::{CMatrix, GmresReport, LinearMap};
pub use operator::VirtualSourceOperator;
pub use osrc::{OsrcOperator, PadeCoefficients, PeriodicFem};
