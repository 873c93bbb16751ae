//! Sampling, evaluation and verification harness over `corrlab-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod fd;
pub mod mc;
pub mod report;
pub mod stats;
pub mod suites;

pub use error::CliError;

/// Runs `$body` with `$S` bound to the scalar type of `$field`.
#[macro_export]
macro_rules! with_scalar {
    ($field:expr, $S:ident => $body:expr) => {
        match $field {
            corrlab_core::algebra::Field::Real => {
                type $S = f64;
                $body
            }
            corrlab_core::algebra::Field::Complex => {
                type $S = corrlab_core::algebra::Complex64;
                $body
            }
            corrlab_core::algebra::Field::Quaternion => {
                type $S = corrlab_core::algebra::Quaternion;
                $body
            }
        }
    };
}
