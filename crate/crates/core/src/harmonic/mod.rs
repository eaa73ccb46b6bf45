//! Exponential sums and the analytic side of the counting problem: Gauss
//! sums, the square majorant and its Fourier transform, exact even moments,
//! rational approximation, divisor sums, the Fejér kernel and quadratic Bohr
//! sets.

mod approx;
mod bohr;
mod divisor;
mod expsum;
mod gauss;
pub mod hypotheses;
mod majorant;
mod moments;

pub use approx::{rational_approx, rational_approx_within, RationalApprox, MAX_APPROX_DENOMINATOR};
pub use bohr::{quadratic_bohr_set, Frequency, MAX_BOHR_DIM, MAX_BOHR_N};
pub use divisor::{divisor_moment, divisor_partial, DIVISOR_BUDGET};
pub use expsum::{fejer_kernel, interval_transform, lp_norm_quadrature, ExpSum, ExpSumGrid};
pub use gauss::{
    gauss_bound, gauss_sum, w_gauss_bound, w_gauss_vanishes, w_gauss_vanishing_check, GaussTable, MAX_GAUSS_MODULUS,
};
pub use majorant::{build_majorant, interval_integral, major_arc_approx, majorant_fourier, Majorant};
pub use moments::{lp_moment_even, mixed_moment};
