//! Bessel routines needed by the Matern family and the sphere machinery.
//!
//! Orders that occur are l + (d-2)/2 for integer dimensions d >= 2, so only
//! integer orders (even d) and half-integer orders (odd d, reduced to
//! spherical Bessel functions) are required, plus K_nu of real order for the
//! Matern kernel.

use crate::error::{Error, Result};
use crate::special::ln_gamma;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 10_000;

/// Modified Bessel function of the second kind K_nu(x), nu >= 0, x > 0.
///
/// Temme series for x < 2, Steed continued fraction beyond, with upward
/// recurrence in the order; the standard algorithm.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !(nu >= 0.0) {
        return Err(Error::Domain(format!("bessel_k needs x > 0 and nu >= 0, got nu={nu}, x={x}")));
    }
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let (mut rkmu, mut rk1);
    if x < 2.0 {
        // Temme series for K_mu and K_{mu+1}.
        let x2 = 0.5 * x;
        let pimu = std::f64::consts::PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!("bessel_k series stalled at nu={nu}, x={x}")));
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        // Steed's continued fraction CF2.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = delh;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!("bessel_k CF2 stalled at nu={nu}, x={x}")));
        }
        let h = a1 * h;
        rkmu = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    Ok(rkmu)
}

/// Temme's Gamma combinations for |mu| <= 1/2:
/// gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)]/(2 mu), gam2 = [ ... + ... ]/2,
/// gampl = 1/Gamma(1+mu), gammi = 1/Gamma(1-mu).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = (-ln_gamma(1.0 + mu)).exp();
    let gammi = (-ln_gamma(1.0 - mu)).exp();
    let gam1 = if mu.abs() < 1e-3 {
        // Series around 0 avoids the 0/0 cancellation.
        const EULER: f64 = 0.577_215_664_901_532_9;
        const C3: f64 = -0.042_002_635_034_095_24; // mu^3 coefficient of 1/Gamma(1+mu)
        -EULER - C3 * mu * mu
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    let gam2 = 0.5 * (gammi + gampl);
    (gam1, gam2, gampl, gammi)
}

/// J_0(x), ..., J_nmax(x) for integer orders.
///
/// Miller downward recurrence normalized by J_0 + 2 sum J_{2k} = 1; upward
/// recurrence from the same machinery when x dominates the top order.
pub fn bessel_j_list(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    if ax < 1e-12 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        if nmax >= 1 {
            out[1] = 0.5 * x;
        }
        return out;
    }
    let top = ((nmax as f64).max(ax) as usize) + 16 + (nmax as f64).max(ax).sqrt() as usize * 2;
    let mut jj = vec![0.0f64; top + 2];
    jj[top + 1] = 0.0;
    jj[top] = FPMIN;
    let mut norm = 0.0;
    for k in (1..=top).rev() {
        jj[k - 1] = (2.0 * k as f64 / x) * jj[k] - jj[k + 1];
        if k - 1 > 0 && (k - 1) % 2 == 0 {
            norm += 2.0 * jj[k - 1];
        }
        if jj[k - 1].abs() > 1e250 {
            for v in jj[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            norm *= 1e-250;
        }
    }
    norm += jj[0];
    let scale = 1.0 / norm;
    jj[..=nmax].iter().map(|v| v * scale).collect()
}

/// Spherical Bessel functions j_0(x), ..., j_lmax(x).
pub fn sph_bessel_j_list(lmax: usize, x: f64) -> Vec<f64> {
    if x.abs() < 1e-8 {
        // j_l(x) ~ x^l / (2l+1)!!
        let mut out = vec![0.0; lmax + 1];
        let mut v = 1.0;
        for (l, slot) in out.iter_mut().enumerate() {
            *slot = v;
            v *= x / (2.0 * l as f64 + 3.0);
        }
        return out;
    }
    let j0 = x.sin() / x;
    if lmax == 0 {
        return vec![j0];
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if x > lmax as f64 {
        // Upward recurrence is stable when the argument exceeds the order.
        let mut out = vec![0.0; lmax + 1];
        out[0] = j0;
        out[1] = j1;
        for l in 1..lmax {
            out[l + 1] = (2.0 * l as f64 + 1.0) / x * out[l] - out[l - 1];
        }
        return out;
    }
    // Miller downward, normalized against whichever seed is better conditioned.
    let top = lmax + 16 + ((lmax as f64).max(x).sqrt() as usize) * 2;
    let mut jj = vec![0.0f64; top + 2];
    jj[top + 1] = 0.0;
    jj[top] = FPMIN;
    for l in (1..=top).rev() {
        jj[l - 1] = (2.0 * l as f64 + 1.0) / x * jj[l] - jj[l + 1];
        if jj[l - 1].abs() > 1e250 {
            for v in jj[l - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let scale = if jj[0].abs() >= jj[1].abs() { j0 / jj[0] } else { j1 / jj[1] };
    jj[..=lmax].iter().map(|v| v * scale).collect()
}

/// Spectral kernel Y_d(z) = 2^{(d-2)/2} Gamma(d/2) J_{(d-2)/2}(z) z^{-(d-2)/2}.
///
/// Y_d(0) = 1 for every d; d = 3 reduces to sin(z)/z and d = 2 to J_0(z).
pub fn y_d_kernel(d: usize, z: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("y_d_kernel needs d >= 2, got {d}")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("y_d_kernel needs z >= 0, got {z}")));
    }
    Ok(j_ratio_list(d, 0, z)?[0] * (0.5 * (d as f64 - 2.0) * 2f64.ln() + ln_gamma(d as f64 / 2.0)).exp())
}

/// J_{l+(d-2)/2}(lambda) / lambda^{(d-2)/2} for l = 0..=lmax.
///
/// The lambda -> 0 limit is 2^{-(d-2)/2}/Gamma(d/2) at l = 0 and 0 above.
pub fn j_ratio_list(d: usize, lmax: usize, lambda: f64) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::Domain(format!("j_ratio_list needs d >= 2, got {d}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("j_ratio_list needs lambda >= 0, got {lambda}")));
    }
    let half = (d as f64 - 2.0) / 2.0;
    if lambda < 1e-9 {
        let mut out = vec![0.0; lmax + 1];
        out[0] = (-half * 2f64.ln() - ln_gamma(d as f64 / 2.0)).exp();
        if lmax >= 1 && lambda > 0.0 {
            out[1] = lambda * (-(half + 1.0) * 2f64.ln() - ln_gamma(d as f64 / 2.0 + 1.0)).exp();
        }
        return Ok(out);
    }
    let scale = lambda.powf(-half);
    if d % 2 == 0 {
        let n0 = (d - 2) / 2;
        let all = bessel_j_list(lmax + n0, lambda);
        Ok(all[n0..=n0 + lmax].iter().map(|v| v * scale).collect())
    } else {
        // J_{l + n0 + 1/2}(x) = sqrt(2x/pi) j_{l + n0}(x) with n0 = (d-3)/2.
        let n0 = (d - 3) / 2;
        let all = sph_bessel_j_list(lmax + n0, lambda);
        let pref = (2.0 * lambda / std::f64::consts::PI).sqrt() * scale;
        Ok(all[n0..=n0 + lmax].iter().map(|v| v * pref).collect())
    }
}
