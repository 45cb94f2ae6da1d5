//! Independent numerical ground truth for the jet pipeline.

pub mod fd;
pub mod reinhardt;

pub use fd::{fd_partial, FdConfig};
pub use reinhardt::{reinhardt_kernel_at, reinhardt_norms, MonomialNormTable};
