//! Hermite polynomials (probabilists' convention), Gauss-Hermite
//! quadrature, chaos coefficients of subordinating functions, and
//! Hermite-rank detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{normal_pdf, normal_sf};

/// Probabilists' Hermite polynomial H_n(z), H_{n+1} = z H_n - n H_{n-1}.
pub fn hermite(n: usize, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = z;
    for k in 1..n {
        let next = z * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// H_0(z) .. H_n(z).
pub fn hermite_all(n: usize, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(z);
    for k in 1..n {
        let next = z * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// Gauss-Hermite nodes and weights for the weight exp(-x^2) (physicists'
/// convention), by Sturm bisection on the Jacobi matrix. n <= 320 keeps the
/// Christoffel sums inside f64 range at the extreme nodes.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 || n > 320 {
        return Err(Error::Param(format!("gauss_hermite supports 1 <= n <= 320, got {n}")));
    }
    // Number of eigenvalues of the Jacobi matrix strictly below x, via the
    // LDL^T sign count. Off-diagonal entries b_k = sqrt(k/2).
    let count_below = |x: f64| -> usize {
        let mut cnt = 0usize;
        let mut d = -x;
        if d < 0.0 {
            cnt += 1;
        }
        for k in 1..n {
            let denom = if d.abs() < 1e-300 { if d >= 0.0 { 1e-300 } else { -1e-300 } } else { d };
            d = -x - (k as f64 / 2.0) / denom;
            if d < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    let bound = (2.0 * n as f64 + 2.0).sqrt() + 1.0;
    let mut nodes = vec![0.0f64; n];
    for (i, node) in nodes.iter_mut().enumerate() {
        let mut lo = -bound;
        let mut hi = bound;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid) >= i + 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        *node = 0.5 * (lo + hi);
    }
    // The spectrum is symmetric; enforce it exactly.
    for i in 0..n / 2 {
        let s = 0.5 * (nodes[i] - nodes[n - 1 - i]);
        nodes[i] = s;
        nodes[n - 1 - i] = -s;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let p0 = std::f64::consts::PI.powf(-0.25);
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut sum = p0 * p0;
            let mut pkm1 = 0.0f64;
            let mut pk = p0;
            for k in 1..n {
                let next =
                    (x * pk - ((k as f64 - 1.0) / 2.0).sqrt() * pkm1) / ((k as f64) / 2.0).sqrt();
                pkm1 = pk;
                pk = next;
                sum += pk * pk;
            }
            1.0 / sum
        })
        .collect();
    Ok((nodes, weights))
}

/// How a coefficient set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoeffSource {
    ClosedFormIndicator { u: f64 },
    Quadrature,
}

/// Chaos coefficients J_0..J_N of a subordinating function G, where
/// J_n = E[G(Z) H_n(Z)] for standard normal Z, together with the detected
/// Hermite rank (smallest n >= 1 with J_n significantly nonzero).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermiteCoeffs {
    pub coeffs: Vec<f64>,
    pub rank: usize,
    pub source: CoeffSource,
    pub truncation: usize,
    /// False when the quadrature did not stabilize.
    pub converged: bool,
    /// True when the fixed-order rule disagreed with its doubled version and
    /// the coefficients were recomputed adaptively.
    pub refined: bool,
}

impl HermiteCoeffs {
    /// Cumulative Parseval sums S_k = sum_{n=0}^{k} J_n^2 / n!.
    /// S_N -> E[G(Z)^2] as the truncation grows.
    pub fn parseval_partials(&self) -> Vec<f64> {
        let mut fact = 1.0;
        let mut acc = 0.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, &j)| {
                if n > 0 {
                    fact *= n as f64;
                }
                acc += j * j / fact;
                acc
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,J_n\n");
        for (n, j) in self.coeffs.iter().enumerate() {
            s.push_str(&format!("{n},{j:.17e}\n"));
        }
        s
    }
}

fn coeffs_via_gh(g: &dyn Fn(f64) -> f64, n_max: usize, order: usize) -> Result<Vec<f64>> {
    let (x, w) = gauss_hermite(order)?;
    let mut out = vec![0.0f64; n_max + 1];
    for (&xi, &wi) in x.iter().zip(&w) {
        let z = std::f64::consts::SQRT_2 * xi;
        let gz = g(z);
        if !gz.is_finite() {
            return Err(Error::Domain(format!("subordinating function not finite at z = {z}")));
        }
        let h = hermite_all(n_max, z);
        for (acc, hn) in out.iter_mut().zip(&h) {
            *acc += wi * gz * hn;
        }
    }
    let norm = std::f64::consts::PI.sqrt();
    for v in &mut out {
        *v /= norm;
    }
    Ok(out)
}

fn rank_from_slice(coeffs: &[f64], tol: f64) -> Result<usize> {
    for (n, &j) in coeffs.iter().enumerate().skip(1) {
        if j.abs() > tol {
            return Ok(n);
        }
    }
    Err(Error::RankNotFound { tol })
}

/// Default rank tolerance: 1e-10 relative to the largest coefficient.
pub fn default_rank_tol(coeffs: &[f64]) -> f64 {
    1e-10 * coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

/// Chaos coefficients of G by Gauss-Hermite quadrature of the stated order,
/// cross-checked against the doubled order; when any coefficient moves by
/// more than 1e-8 the integrals are recomputed by adaptive quadrature on a
/// window that carries all the Gaussian mass. quad_order must lie in
/// [8, 160] so the doubled rule stays within the node-count cap.
pub fn chaos_coeffs(g: &dyn Fn(f64) -> f64, n_max: usize, quad_order: usize) -> Result<HermiteCoeffs> {
    if n_max < 1 {
        return Err(Error::Param("chaos truncation N must be >= 1".into()));
    }
    if quad_order < 8 || quad_order > 160 {
        return Err(Error::Param(format!("quad_order must lie in [8, 160], got {quad_order}")));
    }
    let c1 = coeffs_via_gh(g, n_max, quad_order)?;
    let c2 = coeffs_via_gh(g, n_max, 2 * quad_order)?;
    let moved = c1.iter().zip(&c2).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let (coeffs, refined, converged) = if moved <= 1e-8 {
        (c2, false, true)
    } else {
        let r = 14.0f64.max(1.5 * (2.0 * n_max as f64 + 1.0).sqrt() + 8.0);
        let mut vals = Vec::with_capacity(n_max + 1);
        let mut all_ok = true;
        for n in 0..=n_max {
            let q = quad::adaptive(
                |z| g(z) * hermite(n, z) * normal_pdf(z),
                -r,
                r,
                1e-11,
                1e-9,
                40_000,
            );
            all_ok &= q.converged;
            vals.push(q.value);
        }
        (vals, true, all_ok)
    };
    let tol = default_rank_tol(&coeffs);
    let rank = rank_from_slice(&coeffs, tol)?;
    Ok(HermiteCoeffs { coeffs, rank, source: CoeffSource::Quadrature, truncation: n_max, converged, refined })
}

/// Closed-form coefficients of the threshold indicator 1_{z >= u}:
/// J_0 = 1 - Phi(u), J_q = phi(u) H_{q-1}(u). The rank is 1 for every u.
pub fn indicator_coeffs(u: f64, n_max: usize) -> Result<HermiteCoeffs> {
    if n_max < 1 {
        return Err(Error::Param("chaos truncation N must be >= 1".into()));
    }
    if !u.is_finite() {
        return Err(Error::Domain(format!("threshold must be finite, got {u}")));
    }
    let pdf = normal_pdf(u);
    let h = hermite_all(n_max - 1, u);
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(normal_sf(u));
    for q in 1..=n_max {
        coeffs.push(pdf * h[q - 1]);
    }
    Ok(HermiteCoeffs {
        coeffs,
        rank: 1,
        source: CoeffSource::ClosedFormIndicator { u },
        truncation: n_max,
        converged: true,
        refined: false,
    })
}

/// Smallest n >= 1 with |J_n| > tol; errors when every coefficient past
/// J_0 sits below tolerance (the function is constant up to truncation).
pub fn hermite_rank(coeffs: &HermiteCoeffs, tol: f64) -> Result<usize> {
    if coeffs.coeffs.is_empty() {
        return Err(Error::Param("empty coefficient sequence".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Param(format!("rank tolerance must be positive, got {tol}")));
    }
    rank_from_slice(&coeffs.coeffs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{ln_gamma, normal_cdf};

    #[test]
    fn polynomial_values() {
        assert_eq!(hermite(0, 5.0), 1.0);
        assert_eq!(hermite(1, 3.0), 3.0);
        for &z in &[-2.0, -0.5, 0.0, 1.0, 2.5] {
            assert!((hermite(2, z) - (z * z - 1.0)).abs() < 1e-14);
            assert!((hermite(3, z) - (z * z * z - 3.0 * z)).abs() < 1e-12);
        }
        assert_eq!(hermite(4, 0.0), 3.0);
        let all = hermite_all(6, 1.3);
        for (n, v) in all.iter().enumerate() {
            assert!((v - hermite(n, 1.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_hermite_low_orders_and_moments() {
        let (x, w) = gauss_hermite(1).unwrap();
        assert!(x[0].abs() < 1e-15 && (w[0] - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        let (x, w) = gauss_hermite(2).unwrap();
        assert!((x[1] - 0.5f64.sqrt()).abs() < 1e-14 && (x[0] + x[1]).abs() < 1e-15);
        assert!((w[0] - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        let (x, w) = gauss_hermite(3).unwrap();
        assert!(x[1].abs() < 1e-15);
        assert!((x[2] - 1.5f64.sqrt()).abs() < 1e-13);
        assert!((w[1] - 2.0 * std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-13);
        assert!((w[0] - std::f64::consts::PI.sqrt() / 6.0).abs() < 1e-13);

        // A rule with n nodes is exact through degree 2n-1.
        let (x, w) = gauss_hermite(10).unwrap();
        for k in 0..=19usize {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let want = if k % 2 == 1 { 0.0 } else { ln_gamma((k as f64 + 1.0) / 2.0).exp() };
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn orthogonality_under_quadrature() {
        // E[H_n H_k] = delta_{nk} n! under the probabilists' weight change.
        let (x, w) = gauss_hermite(128).unwrap();
        let norm = std::f64::consts::PI.sqrt();
        let mut fact = vec![1.0f64];
        for n in 1..=12 {
            fact.push(fact[n - 1] * n as f64);
        }
        for n in 0..=12usize {
            for k in 0..=12usize {
                let mut acc = 0.0;
                for (&xi, &wi) in x.iter().zip(&w) {
                    let z = std::f64::consts::SQRT_2 * xi;
                    acc += wi * hermite(n, z) * hermite(k, z);
                }
                acc /= norm;
                let want = if n == k { fact[n] } else { 0.0 };
                let scale = (fact[n] * fact[k]).sqrt().max(1.0);
                assert!((acc - want).abs() < 1e-8 * scale, "n={n} k={k}: {acc} vs {want}");
            }
        }
    }

    #[test]
    fn chaos_of_simple_polynomials() {
        let c = chaos_coeffs(&|z| z, 8, 64).unwrap();
        assert_eq!(c.rank, 1);
        assert!(!c.refined && c.converged);
        assert!((c.coeffs[1] - 1.0).abs() < 1e-12);
        for (n, &j) in c.coeffs.iter().enumerate() {
            if n != 1 {
                assert!(j.abs() < 1e-11, "n={n}: {j}");
            }
        }

        let c = chaos_coeffs(&|z| z * z - 1.0, 8, 64).unwrap();
        assert_eq!(c.rank, 2);
        assert!((c.coeffs[2] - 2.0).abs() < 1e-11);
        assert!(c.coeffs[0].abs() < 1e-11);

        let c = chaos_coeffs(&|z| hermite(3, z), 10, 64).unwrap();
        assert_eq!(c.rank, 3);
        assert!((c.coeffs[3] - 6.0).abs() < 1e-10);

        // Even function: J_1 vanishes, rank 2, J_0 = E[z^2] = 1.
        let c = chaos_coeffs(&|z| z * z, 8, 64).unwrap();
        assert_eq!(c.rank, 2);
        assert!((c.coeffs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_closed_forms() {
        let c = indicator_coeffs(0.0, 6).unwrap();
        assert_eq!(c.rank, 1);
        assert!((c.coeffs[0] - 0.5).abs() < 1e-15);
        assert!((c.coeffs[1] - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!(c.coeffs[2].abs() < 1e-16);

        let c = indicator_coeffs(1.0, 6).unwrap();
        assert!((c.coeffs[2] - 0.24197072451914337).abs() < 1e-12);

        let far = indicator_coeffs(12.0, 6).unwrap();
        for &j in &far.coeffs {
            assert!(j.abs() < 1e-20);
        }
        assert_eq!(far.rank, 1);
    }

    #[test]
    fn quadrature_indicator_matches_closed_form() {
        for &u in &[-2.0f64, -1.0, 0.0, 1.0, 2.0] {
            let g = move |z: f64| if z >= u { 1.0 } else { 0.0 };
            let q = chaos_coeffs(&g, 10, 128).unwrap();
            assert!(q.converged, "u={u}");
            let closed = indicator_coeffs(u, 10).unwrap();
            for n in 0..=10 {
                assert!(
                    (q.coeffs[n] - closed.coeffs[n]).abs() < 1e-8,
                    "u={u} n={n}: {} vs {}",
                    q.coeffs[n],
                    closed.coeffs[n]
                );
            }
            assert_eq!(q.rank, 1);
        }
    }

    #[test]
    fn parseval_partial_sums_for_indicators() {
        for &u in &[-1.5f64, 0.0, 0.7, 2.2] {
            let c = indicator_coeffs(u, 160).unwrap();
            let partials = c.parseval_partials();
            let total = 1.0 - normal_cdf(u);
            let mut prev = 0.0;
            for &p in &partials {
                assert!(p >= prev - 1e-15);
                assert!(p <= total + 1e-10, "u={u}: partial {p} exceeds {total}");
                prev = p;
            }
            // Indicator coefficients decay like q^{-3/2} in the Parseval sum,
            // so capture improves slowly; 160 terms is enough for 85% at
            // every threshold tested while staying well inside f64 range.
            assert!(partials.last().unwrap() > &(0.85 * total), "u={u}");
        }
    }

    #[test]
    fn rank_detection_and_errors() {
        let c = indicator_coeffs(1.0, 8).unwrap();
        assert_eq!(hermite_rank(&c, 1e-12).unwrap(), 1);
        assert!(hermite_rank(&c, -1.0).is_err());

        match chaos_coeffs(&|_| 1.0, 6, 64) {
            Err(Error::RankNotFound { .. }) => {}
            other => panic!("constant function should have no rank, got {other:?}"),
        }

        let mut fake = indicator_coeffs(0.0, 5).unwrap();
        fake.coeffs = vec![0.3, 0.0, 0.0, 7.0, 0.0, 0.0];
        assert_eq!(hermite_rank(&fake, 1e-10).unwrap(), 3);
    }

    #[test]
    fn csv_export_shape() {
        let c = indicator_coeffs(0.5, 3).unwrap();
        let text = c.to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,J_n"));
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("0,"));
    }
}
