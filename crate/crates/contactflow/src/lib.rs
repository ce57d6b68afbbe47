//! Pseudo-spectral simulation and verification library for geodesic flow on
//! the contactomorphism group: the generalized Camassa-Holm equation
//!
//! ```text
//! m_t + u(m) + (n+2) m E(f) = 0,    u = S_θ f,    m = f - Δf,
//! ```
//!
//! on explicit flat periodic contact manifolds (S¹, T³ with the contact form
//! `sin z dx + cos z dy`, and the quotient T²), together with its classical
//! reductions: Camassa-Holm, the quasigeostrophic f-plane and β-plane
//! equations, and a reduced one-dimensional shear equation.
//!
//! The library provides:
//! - [`spectral`]: periodic grids, exact spectral calculus, 2/3 dealiasing;
//! - [`contact`]: Reeb field, contact vector fields `S_θ f`, contact Poisson
//!   bracket and contact Laplacian for each concrete model;
//! - [`evolution`]: RK4 time stepping of the five equation variants with CFL
//!   and blowup monitoring;
//! - [`lagrangian`]: particle flow maps `(η, Λ)` verifying the momentum
//!   transport law `m(t,η) Jac(η)^{(n+2)/(n+1)} = m₀`;
//! - [`diagnostics`]: conserved quantities `C₀, C₁, C₋₁,±`, the breakdown
//!   integral `∫ ‖E(f)‖_∞ dt`, and CSV time series;
//! - [`peakon`]: periodic N-peakon dynamics and the steady singular shear
//!   solution on T³;
//! - [`verify`]: self-contained operator identity suites used by the CLI and
//!   the acceptance tests.

pub mod contact;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod lagrangian;
pub mod peakon;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
