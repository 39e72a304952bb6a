//! Optimal object colors on the surface of the object color solid.
//!
//! The crate computes, for any ray leaving the 50% gray point, the farthest
//! point of the object color solid along that ray by linear programming,
//! classifies the transition structure of the optimal reflectance, and
//! compares it to the best two-transition (Schrödinger) color on the same
//! ray. Supporting modules cover the spectral-locus convex hull, smooth
//! illuminant synthesis, and hemisphere-wide atlas sweeps.

// `!(x > 0.0)` is used on purpose so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod error;
pub mod hull;
pub mod lp;
pub mod munsell;
pub mod probe;
pub mod render;
pub mod schrodinger;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use lp::{LpProblem, LpSolution, LpStatus, Solver, SolverConfig};

pub use spectral::{CmfSet, Illuminant, Tristimulus, WavelengthGrid, WeightedCmf};
pub use probe::{RayProbe, Reflectance, SphericalDirection, TransitionKind, TransitionProfile};
