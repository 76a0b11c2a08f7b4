//! Construction and numerical certification of (possibly one-prong)
//! pseudo-Anosov flows on graph manifolds assembled from copies of a model
//! Birkhoff-annulus block, plus the orbit-space combinatorics that go with
//! them: lozenge chains on fat trees, the skewed strip model, and
//! non-Hausdorff trees with their fundamental axes.
//!
//! Pipeline: [`blueprint`] → [`assembly`] → [`closure`] → [`returnmap`].
//! [`block`] holds the model dynamics; [`lozenge`] and [`nhtree`] are
//! independent of the numerical side.

pub mod assembly;
pub mod block;
pub mod blueprint;
pub mod circle;
pub mod closure;
pub mod lozenge;
pub mod nhtree;
pub mod returnmap;

pub use assembly::{assemble, AssembledManifold, SurfaceClass};
pub use blueprint::{parse_blueprint, FatGraphBlueprint, Polarity};
pub use closure::{parse_gluing, ClosedManifold, FlowClass, FlowKind, GluingSpec};
pub use returnmap::{ReturnMapSystem, SectionPoint};
