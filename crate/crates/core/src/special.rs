//! Scalar special functions: gamma/beta wrappers, the regularized incomplete
//! beta function, and the standard normal density/CDF/quantile.

use crate::error::{Error, Result};

// libm carries the classic 1-ulp FDLIBM ports; the statrs equivalents only
// reach ~1e-11 and that is not enough for tail-sensitive oracles.
pub use libm::{erf, erfc, lgamma as ln_gamma, tgamma as gamma};

/// Complete beta function B(a, b).
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Regularized incomplete beta function I_mu(p, q).
///
/// Continued fraction (modified Lentz) with the usual symmetry switch at
/// mu = (p+1)/(p+q+2); absolute accuracy around 1e-14 on the unit interval.
/// The public domain is mu in (0, 1]; interior callers that need the
/// continuity value at mu = 0 use [`incomplete_beta_clamped`].
pub fn incomplete_beta(mu: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::Domain(format!("incomplete_beta needs p, q > 0, got p={p}, q={q}")));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Domain(format!("incomplete_beta needs mu in (0, 1], got {mu}")));
    }
    Ok(incomplete_beta_clamped(mu, p, q))
}

/// I_mu(p, q) extended by continuity with I_0 = 0. Panics on p, q <= 0.
pub fn incomplete_beta_clamped(mu: f64, p: f64, q: f64) -> f64 {
    assert!(p > 0.0 && q > 0.0);
    if mu <= 0.0 {
        return 0.0;
    }
    if mu >= 1.0 {
        return 1.0;
    }
    let front =
        (p * mu.ln() + q * (1.0 - mu).ln() + ln_gamma(p + q) - ln_gamma(p) - ln_gamma(q)).exp();
    if mu < (p + 1.0) / (p + q + 2.0) {
        front * beta_cf(mu, p, q) / p
    } else {
        1.0 - front * beta_cf(1.0 - mu, q, p) / q
    }
}

/// Derivative of I_mu(p, q) in mu: the beta density.
pub fn incomplete_beta_deriv(mu: f64, p: f64, q: f64) -> f64 {
    if mu <= 0.0 || mu >= 1.0 {
        return 0.0;
    }
    ((p - 1.0) * mu.ln() + (q - 1.0) * (1.0 - mu).ln() + ln_gamma(p + q)
        - ln_gamma(p)
        - ln_gamma(q))
    .exp()
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..400 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Standard normal density.
pub fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF, accurate in both tails.
pub fn normal_cdf(u: f64) -> f64 {
    if u.is_infinite() {
        return if u > 0.0 { 1.0 } else { 0.0 };
    }
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

/// Upper tail 1 - Phi(u) without cancellation.
pub fn normal_sf(u: f64) -> f64 {
    if u.is_infinite() {
        return if u > 0.0 { 0.0 } else { 1.0 };
    }
    0.5 * erfc(u / std::f64::consts::SQRT_2)
}

/// Density and CDF of the standard normal at u, as a pair.
pub fn std_normal(u: f64) -> (f64, f64) {
    (normal_pdf(u), normal_cdf(u))
}

/// Standard normal quantile Phi^{-1}(p).
///
/// Seed from the closed-form inverse, then one Newton step against the
/// high-accuracy CDF to pin the self-consistency |Phi(u) - p| near machine
/// precision.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal_quantile needs p in (0, 1), got {p}")));
    }
    let mut u = -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p);
    for _ in 0..2 {
        let pdf = normal_pdf(u);
        if pdf > 1e-300 {
            u -= (normal_cdf(u) - p) / pdf;
        }
    }
    Ok(u)
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    let d = d as f64;
    (0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * d + 1.0)).exp()
}

/// Surface measure of the unit sphere S^{d-1} in R^d.
pub fn unit_sphere_surface(d: usize) -> f64 {
    let d = d as f64;
    2.0 * (0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * d)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn incomplete_beta_matches_quadrature() {
        // Independent route: direct adaptive integration of the beta density.
        for &(mu, p, q) in
            &[(0.3, 1.5, 0.5), (0.75, 1.5, 0.5), (0.5, 2.5, 1.5), (0.9, 0.5, 0.5), (0.05, 3.0, 2.0)]
        {
            let num = quad::adaptive(
                |t| t.powf(p - 1.0) * (1.0 - t).powf(q - 1.0),
                0.0,
                mu,
                1e-13,
                1e-13,
                20_000,
            );
            assert!(num.converged);
            let want = num.value / beta(p, q);
            let got = incomplete_beta(mu, p, q).unwrap();
            assert!((got - want).abs() < 1e-12, "mu={mu} p={p} q={q}: {got} vs {want}");
        }
    }

    #[test]
    fn incomplete_beta_edges_and_domain() {
        assert!((incomplete_beta(1.0, 2.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(incomplete_beta(0.0, 2.0, 3.0).is_err());
        assert!(incomplete_beta(1.5, 2.0, 3.0).is_err());
        assert!(incomplete_beta(0.5, -1.0, 3.0).is_err());
        assert_eq!(incomplete_beta_clamped(0.0, 2.0, 3.0), 0.0);
    }

    #[test]
    fn incomplete_beta_reflection() {
        let mut mu = 0.05;
        while mu < 1.0 {
            for &(p, q) in &[(1.5, 0.5), (2.0, 2.0), (0.7, 3.3)] {
                let lhs = incomplete_beta_clamped(mu, p, q) + incomplete_beta_clamped(1.0 - mu, q, p);
                assert!((lhs - 1.0).abs() < 1e-12, "mu={mu} p={p} q={q}");
            }
            mu += 0.05;
        }
    }

    #[test]
    fn normal_matches_quadrature() {
        // Phi(1) by integrating the density from a far-left cutoff.
        let r = quad::adaptive(normal_pdf, -40.0, 1.0, 1e-12, 0.0, 20_000);
        assert!(r.converged);
        assert!((normal_cdf(1.0) - r.value).abs() < 1e-10);
        assert!((normal_pdf(1.0) - 0.24197072451914337).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-13);
        assert_eq!(normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(normal_sf(f64::INFINITY), 0.0);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let mut p = 0.01;
        while p < 1.0 {
            let u = normal_quantile(p).unwrap();
            assert!((normal_cdf(u) - p).abs() < 1e-12, "p={p}");
            p += 0.01;
        }
        assert!(normal_quantile(0.0).is_err());
    }

    #[test]
    fn ball_and_sphere_measures() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
        assert!((unit_sphere_surface(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_surface(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }
}
