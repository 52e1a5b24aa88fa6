pub mod error;
pub mod exact;
pub mod polyhedra;
pub mod toric;
pub mod divisors;
pub mod intersection;
pub mod model;
pub mod functionals;
pub mod singularities;
pub mod io;
pub mod report;

pub use error::{Result, TorickError};
