//! Zeros of Dirichlet L-functions on the critical line.

pub mod count;
pub mod diag;
pub mod find;
pub mod lfunc;
pub mod mp;
pub mod store;

pub use count::{contour_count, rvm_allowance, rvm_main_term, ContourCount};
pub use diag::{fejer, fejer_density, multiplicity_at_half, FejerDensity};
pub use find::{find_zero_pair, find_zeros, residuals, CriticalZero, ZeroConfig, ZeroSet, ZeroStatus};
pub use lfunc::{hardy_z, ln_gamma, LFunction};
pub use mp::{evaluate_l, evaluate_l_limited, format_fixed};
pub use store::{export_zeros, ingest_zeros, read_zeros, verify_pair, write_zeros, ZeroStore, STORE_ENV};
