//! Algebra of curvature-type tensors in an orthonormal frame.

mod extremes;
mod tensor;

pub use extremes::{
    bounds_of, bounds_of_with, chi_ic1, chi_ic1_with, optimal_mu, pic1_defect, ric3_min,
    ric3_min_with, sectional_range, CurvatureBounds, Extremum, FrameSearch, FRAME_TOL,
};
pub use tensor::{
    constant_curvature, kulkarni_nomizu, product_curvature, sectional, CurvatureTensor,
    SymBilinear, SYMMETRY_TOL,
};
