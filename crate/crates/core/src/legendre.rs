//! Legendre polynomials, normalized associated Legendre functions, real
//! spherical harmonics on S^2, and the normalized Gegenbauer ratios that
//! appear in isotropic covariance expansions on spheres of any dimension.

use crate::error::{Error, Result};

/// P_0(x), ..., P_lmax(x) by the three-term recurrence.
pub fn legendre_p_list(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax == 0 {
        return out;
    }
    out.push(x);
    for l in 1..lmax {
        let fl = l as f64;
        let next = ((2.0 * fl + 1.0) * x * out[l] - fl * out[l - 1]) / (fl + 1.0);
        out.push(next);
    }
    out
}

/// Normalized Gegenbauer ratios R_l(x) = C_l^kappa(x) / C_l^kappa(1) with
/// kappa = (d-2)/2, for l = 0..=lmax.
///
/// These satisfy R_{l+1} = 2(l+kappa)/(l+2kappa) x R_l - l/(l+2kappa) R_{l-1},
/// which covers d = 2 (Chebyshev, kappa -> 0) and d = 3 (Legendre) in one
/// formula, stays bounded by 1 on [-1, 1], and never overflows.
pub fn gegenbauer_ratio_list(d: usize, lmax: usize, x: f64) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::Domain(format!("gegenbauer_ratio_list needs d >= 2, got {d}")));
    }
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Domain(format!("gegenbauer argument {x} outside [-1, 1]")));
    }
    let x = x.clamp(-1.0, 1.0);
    let kappa = (d as f64 - 2.0) / 2.0;
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax == 0 {
        return Ok(out);
    }
    out.push(x);
    for l in 1..lmax {
        let fl = l as f64;
        let next =
            2.0 * (fl + kappa) / (fl + 2.0 * kappa) * x * out[l] - fl / (fl + 2.0 * kappa) * out[l - 1];
        out.push(next);
    }
    Ok(out)
}

/// Dimension of the space of degree-l spherical harmonics on S^{d-1}.
pub fn harmonic_dim(l: usize, d: usize) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let fl = l as f64;
    let fd = d as f64;
    // (2l + d - 2)/l * binom(l + d - 3, d - 2), the binomial expanded as
    // prod_{j=1..d-2} (l - 1 + j)/j; the empty product handles d = 2.
    let mut binom = 1.0;
    for j in 1..=(d.saturating_sub(2)) {
        binom *= (fl - 1.0 + j as f64) / j as f64;
    }
    (2.0 * fl + fd - 2.0) / fl * binom
}

/// Normalized associated Legendre P-bar_l^m(x) for fixed m and l = m..=lmax,
/// with the Condon-Shortley phase and the spherical-harmonic normalization
/// sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x).
pub fn assoc_legendre_norm_list(lmax: usize, m: usize, x: f64) -> Result<Vec<f64>> {
    if m > lmax {
        return Err(Error::Domain(format!("assoc legendre needs m <= lmax, got m={m}, lmax={lmax}")));
    }
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Domain(format!("assoc legendre argument {x} outside [-1, 1]")));
    }
    let x = x.clamp(-1.0, 1.0);
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P-bar_m^m by the product formula, then upward in l.
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        let fk = k as f64;
        pmm *= -((2.0 * fk + 1.0) / (2.0 * fk)).sqrt() * s;
    }
    let mut out = Vec::with_capacity(lmax - m + 1);
    out.push(pmm);
    if lmax == m {
        return Ok(out);
    }
    let a = |l: usize| {
        let fl = l as f64;
        let fm = m as f64;
        ((4.0 * fl * fl - 1.0) / (fl * fl - fm * fm)).sqrt()
    };
    let mut prev = pmm;
    let mut cur = a(m + 1) * x * pmm;
    out.push(cur);
    for l in (m + 2)..=lmax {
        let next = a(l) * (x * cur - prev / a(l - 1));
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

/// Real orthonormal spherical harmonics on S^2 at colatitude theta, longitude
/// phi, returned as rows indexed by l; row l holds the 2l+1 values ordered
/// m = -l..=l (sin harmonics, zonal, cos harmonics).
pub fn real_sph_harmonics(lmax: usize, theta: f64, phi: f64) -> Result<Vec<Vec<f64>>> {
    let x = theta.cos();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut rows: Vec<Vec<f64>> = (0..=lmax).map(|l| vec![0.0; 2 * l + 1]).collect();
    for m in 0..=lmax {
        let plm = assoc_legendre_norm_list(lmax, m, x)?;
        for (i, val) in plm.iter().enumerate() {
            let l = m + i;
            if m == 0 {
                rows[l][l] = *val;
            } else {
                rows[l][l + m] = sqrt2 * val * (m as f64 * phi).cos();
                rows[l][l - m] = sqrt2 * val * (m as f64 * phi).sin();
            }
        }
    }
    Ok(rows)
}
