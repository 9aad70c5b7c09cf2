//! Deterministic numerical core: special functions, quadrature, covariance
//! families with long-range dependence classification, distance densities of
//! convex bodies and spheres, Hermite chaos coefficients, and variance
//! engines for sojourn functionals of spatiotemporal Gaussian fields.

pub mod bessel;
pub mod covariance;
pub mod error;
pub mod geomprob;
pub mod hermite;
pub mod legendre;
pub mod mittag;
pub mod quad;
pub mod special;
pub mod variance;

pub use covariance::{check_lrd_conditions, sup_cov_outside, Cov, CovarianceModel, LrdCheckResult, LrdVerdict, Regime};
pub use error::{Error, Result};
pub use geomprob::{BodySpec, ChordCdf, DistanceDensity};
pub use hermite::{chaos_coeffs, gauss_hermite, hermite, hermite_all, hermite_rank, indicator_coeffs, HermiteCoeffs};
pub use variance::{
    asymptotic_constants, growth_ratio_diagnostic, joint_exceed_prob, separable_factors, sigma2_ball, sigma2_body,
    sigma2_sphere, var_sojourn_exact, AsymptoticConstants, ExceedTable, GrowthDiagnostic, ThresholdSpec,
    VarianceMethod, VarianceReport,
};
