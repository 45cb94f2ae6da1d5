//! Explicit domains, their potentials and closed-form tensors.

mod bergman;
mod cheng_yau;
mod domain;
mod hartogs;
mod ray;
mod thullen;

pub use bergman::{
    bergman_invariant_at, bergman_invariant_limit, squeezing_bounds, squeezing_threshold, SqueezingBounds,
};
pub use cheng_yau::{cheng_yau_boundary_sweep, cheng_yau_closed_forms_at, BoundarySweep, ChengYauForms};
pub use domain::{
    ball_bergman_kernel, catalog_potential, thullen_bergman_kernel_at, CatalogPotential, DefiningFn, DomainSpec,
    HartogsF,
};
pub use hartogs::{hartogs_admissibility, hartogs_einstein_check, hartogs_grid, Admissibility};
pub use ray::{boundary_ray, RaySchedule};
pub use thullen::{thullen_bergman_axis_at, thullen_closed_forms_at, ThullenAxis, ThullenClosedForms};
