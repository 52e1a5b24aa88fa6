//! Cones, fans, refinements and toric morphisms.

mod cone;
mod fan;
mod morphism;

pub use cone::Cone;
pub use fan::{fan_validate, is_refinement, star_subdivision, ConeReport, Fan, FanDiagnostics, Refinement, Violation, Wall};
pub use morphism::ToricMorphism;
pub(crate) use fan::FanWire;
