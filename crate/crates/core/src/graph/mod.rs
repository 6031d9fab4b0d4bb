//! Percolated uniform-attachment graphs tracked through their components.

mod forest;
mod growth;
mod snapshot;
mod static_build;

pub use forest::ComponentForest;
pub use growth::{GrowthState, StepOutcome, SusceptibilityAccumulator};
pub use snapshot::ComponentSnapshot;
pub use static_build::static_percolated_graph;
