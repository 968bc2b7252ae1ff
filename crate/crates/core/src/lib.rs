//! Approximate joint measurement of qubit observables through an
//! Arthur-Kelly type model.
//!
//! A qubit is coupled to two (or three) Gaussian pointer particles by an
//! impulsive interaction; reading the pointer momenta realizes a joint
//! observable whose marginals are unsharp spin observables. The crate builds
//! the momentum-space measurement kernels, integrates them into POVM
//! parameters, fidelities and post-measurement states, and checks the
//! results against the algebraic joint-measurability conditions.
//!
//! Module map:
//! - [`effect`]: qubit effects, joint observables and their validity.
//! - [`kernel`]: detector configuration, kernel tables, quadrature and
//!   stratified Monte Carlo.
//! - [`ak_two`]: the two-detector model.
//! - [`fidelity`]: spin-direction fidelities and the angle POVM.
//! - [`geometry_ft`]: four-point Fermat-Toricelli solver.
//! - [`three_obs`]: the three-detector model and its checks.

pub mod ak_two;
pub mod effect;
pub mod error;
pub mod fidelity;
pub mod geometry_ft;
pub mod kernel;
pub mod three_obs;
pub mod vec3;

pub use ak_two::{BlochState, MarginalPair, PostState};
pub use effect::{Effect, JointObservable2, JointObservable3, Sign, UnsharpObservable};
pub use error::{Error, Result};
pub use fidelity::{AnglePovm, FidelityReport};
pub use geometry_ft::FtResult;
pub use kernel::{DetectorConfig, KernelTable2, KernelTable3, McEstimate, RadialTable};
pub use three_obs::TripleMarginals;
pub use vec3::Vec3;
