//! Exact fiberization backends: translate systems on finite abelian groups,
//! integer translates on the real line (truncated), and quasi-invariant
//! actions of a cyclic group on a finite measure space.

pub mod action;
pub mod group;
pub mod realline;
pub mod translate;

pub use action::{action_fiberize, jacobian_cocycle_check, ActionSystem, ValidationReport, Violation};
pub use group::{annihilator, dft, idft, section, FiniteAbelianGroup, Subgroup};
pub use realline::{box_hat, box_tail_bound, boxspline, fiberize_realline};
pub use translate::{fiberize_group, translate_frame_oracle, DirectFrameBounds, TranslateSystem};
