//! Bidirectional maps among hyperspherical angles, Cholesky factors and
//! partial correlations.

mod angles;
mod maps;
mod recursion;

pub use angles::{angle_count, row_len, sphere_angles, sphere_point, AngleSet, AngleSetJson, SINE_PRODUCT_FLOOR};
pub use maps::{
    angles_to_cholesky, angles_to_partials, cholesky_to_angles, partials_from_schur, partials_to_cholesky,
    PartialCorrelationTable,
};
pub use recursion::{
    partial_corr_recursion, partial_cov_recursion, LevelTable, PartialCorrelationLevels, PartialCovarianceTable,
};
