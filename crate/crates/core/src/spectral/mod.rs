//! Chebyshev polynomials, the mixed measures `μ_ρ`, quadrature, and numerical
//! certificates for the integral representations of path-weight sums.

mod certify;
mod chebyshev;
mod measure;
mod quadrature;

pub use certify::*;
pub use chebyshev::{boundary_series, cheb_u, cheb_u_all, cheb_u_closed, chebyshev_series, Neumaier};
pub use measure::{
    h_m_dp, mu_moment, mu_moment_scaled, ratio_probe, viennot_integral, viennot_with_scale, MixedMeasure,
    MomentValue, RatioRow,
};
pub use quadrature::{GaussU, ThetaRule, ThetaValue};
