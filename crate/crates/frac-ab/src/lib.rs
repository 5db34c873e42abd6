//! Fractional two-step Adams-Bashforth time integration.
//!
//! Implements the two-step schemes for fractional differential equations with
//! the three nonlocal kernels (power law, exponential decay, Mittag-Leffler),
//! their full-memory Volterra reference solvers, the associated truncation
//! bounds, and a manufactured-solution Fisher reaction-diffusion experiment.
//!
//! Layout:
//! - [`special`]: gamma, Mittag-Leffler, normalization functions
//! - [`operators`]: fractional derivative/integral evaluation (closed forms
//!   and kernel-weighted quadrature)
//! - [`schemes`]: the two-step weights and stepping machinery
//! - [`reference`]: full-memory product-integration oracles and classical AB2
//! - [`analysis`]: remainder bounds, stability gaps, error measurement
//! - [`fisher`]: method-of-lines Fisher equation with manufactured forcing

pub mod analysis;
pub mod error;
pub mod fisher;
pub mod operators;
mod quadrature;
pub mod reference;
pub mod schemes;
pub mod special;

pub use error::{Error, Result};
pub use operators::{DerivativeKind, FractionalOrder};
pub use schemes::{StepWeights, Trajectory, WeightFormula};
pub use special::NormalizationVariant;
