//! Invariants, Frenet-type frames and Bonnet-type reconstruction of
//! spacelike surfaces in Minkowski 4-space.

pub mod bonnet;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod forms;
pub mod frenet;
pub mod invariants;
pub mod jet;
pub mod lorentz;
pub mod surface;

pub use error::{GeomError, Result};
pub use expr::{parse, parse_meridian, FunctionExpr};
pub use jet::{Dual, Jet2, Scalar, Scalar2Jet, SurfaceJet2};
pub use lorentz::{inner, CausalClass, Frame4, MinkVector};
pub use surface::{surface_jet, Immersion, SampledSurface, SurfaceSpec};
