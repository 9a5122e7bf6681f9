//! Bessel functions of the first kind and tables of their positive zeros.

mod bessel;
mod zeros;

pub use bessel::{
    bessel_j, bessel_j_with_derivative, BesselEval, BesselKind, BesselOrder, MAX_DEGREE,
};
pub use zeros::{
    bessel_zero, count_sign_changes, first_zeros, interlaces, mcmahon_guess, zero_tables,
    zeros_upto, zeros_upto_with_tol, ZeroTable, DEFAULT_RESIDUAL_TOL, SCAN_STEP,
};
