pub mod complex;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod gradings;
pub mod grid;
pub mod homology;
pub mod invariants;
pub mod limits;
pub mod linalg;
pub mod signs;
pub mod par;
pub mod pipeline;
pub mod poset;

pub use error::{ErrorKind, GridError, Result};
pub use gradings::{Bigrading, Generator};
pub use grid::{Axis, Grid, StabilizationVariant, Symmetry};
pub use limits::Limits;
pub use par::Execution;
