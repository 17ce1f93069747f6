//! Numerical geometry of biconservative hypersurfaces in S⁴ and H⁴.
//!
//! The crate builds the hypersurface families as charts into E⁵ / E⁵₁,
//! differentiates them exactly with truncated Taylor jets and checks the
//! geometric identities they satisfy pointwise on sampled grids.

pub mod charts;
pub mod hermite;
pub mod jet;
pub mod linalg;
pub mod ode;
pub mod presets;
pub mod profile;
pub mod shape;

pub use jet::{Jet, JetError, JetFn, JetOp};
pub use linalg::{cross4, generalized_eig3, inner, Ambient, Eigen3, LinalgError, SymMat3, Vec5};
