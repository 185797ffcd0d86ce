//! Herglotz-function toolkit: Borel transforms of explicit measures, ladder
//! extraction of boundary values, and closure operations on sampled sets.

mod closure;
mod limit;
mod measure;

pub use closure::{clac, clc, runs, ClosureConfig, GridSet};
pub use limit::{
    boundary_limit, boundary_limit_from_ladder, matrix_residue, richardson2, BoundaryLimit,
    ImLimit, LadderConfig, LimitError,
};
pub use measure::{borel_transform, Atom, DensityPiece, MeasureError, MeasureModel};
