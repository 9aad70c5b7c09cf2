//! Simulation layer: seeded Gaussian field generation on masked grids and
//! spheres, sojourn statistics of excursion sets, and empirical checks
//! against the analytic covariance and variance engines.
