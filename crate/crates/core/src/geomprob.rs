//! Distance densities for pairs of uniform points in scaled balls and convex
//! bodies, chord-length tables, sphere-surface chord densities, and the
//! sandwich bounds that compare a convex body with its inscribed and
//! circumscribed balls.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{beta, incomplete_beta_clamped, unit_ball_volume, unit_sphere_surface};

/// How the body is described.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    UnitBall,
    TabulatedConvex,
}

/// Piecewise-linear chord-length distribution table on [0, diameter].
#[derive(Debug, Clone)]
pub struct ChordCdf {
    v: Vec<f64>,
    f: Vec<f64>,
    /// Cumulative integral of (1 - F) up to each knot, exact for the
    /// piecewise-linear interpolant.
    cum: Vec<f64>,
}

impl ChordCdf {
    pub fn new(mut v: Vec<f64>, mut f: Vec<f64>) -> Result<Self> {
        if v.len() != f.len() || v.len() < 2 {
            return Err(Error::Table("chord table needs >= 2 aligned knots".into()));
        }
        if v[0] < 0.0 {
            return Err(Error::Table("chord lengths must be nonnegative".into()));
        }
        for w in v.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Table(format!("chord knots must be strictly increasing at v={}", w[1])));
            }
        }
        for w in f.windows(2) {
            if w[1] < w[0] - 1e-12 {
                return Err(Error::Table("chord CDF must be nondecreasing".into()));
            }
        }
        if v[0] > 0.0 {
            if f[0] < -1e-9 {
                return Err(Error::Table("chord CDF negative at first knot".into()));
            }
            v.insert(0, 0.0);
            f.insert(0, 0.0);
        } else if f[0].abs() > 1e-9 {
            return Err(Error::Table("chord CDF must vanish at 0".into()));
        }
        let last = *f.last().unwrap();
        if (last - 1.0).abs() > 1e-6 {
            return Err(Error::Table(format!("chord CDF must reach 1 at the diameter, got {last}")));
        }
        *f.last_mut().unwrap() = 1.0;
        f[0] = 0.0;
        let mut cum = Vec::with_capacity(v.len());
        cum.push(0.0);
        for k in 1..v.len() {
            let seg = (v[k] - v[k - 1]) * (1.0 - 0.5 * (f[k] + f[k - 1]));
            cum.push(cum[k - 1] + seg);
        }
        Ok(Self { v, f, cum })
    }

    /// Load from CSV with header `v,F`.
    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Table(format!("cannot read chord table {}: {e}", path.display())))?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Table("empty chord table".into()))?;
        let header: Vec<&str> = header.split(',').map(|s| s.trim()).collect();
        if header != ["v", "F"] {
            return Err(Error::Table(format!("chord table header must be `v,F`, got `{}`", header.join(","))));
        }
        let mut v = Vec::new();
        let mut f = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let (a, b) = (it.next(), it.next());
            match (a, b, it.next()) {
                (Some(a), Some(b), None) => {
                    let av: f64 = a
                        .trim()
                        .parse()
                        .map_err(|_| Error::Table(format!("bad chord value on line {}", i + 2)))?;
                    let bv: f64 = b
                        .trim()
                        .parse()
                        .map_err(|_| Error::Table(format!("bad CDF value on line {}", i + 2)))?;
                    v.push(av);
                    f.push(bv);
                }
                _ => return Err(Error::Table(format!("line {} is not `v,F`", i + 2))),
            }
        }
        Self::new(v, f)
    }

    pub fn diameter(&self) -> f64 {
        *self.v.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        // Largest k with v[k] <= x, capped to the next-to-last knot.
        match self.v.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(k) => k.min(self.v.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.v.len() - 2),
        }
    }

    /// F(x), clamped to [0, 1] outside the table.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.diameter() {
            return 1.0;
        }
        let k = self.segment(x);
        let t = (x - self.v[k]) / (self.v[k + 1] - self.v[k]);
        self.f[k] + t * (self.f[k + 1] - self.f[k])
    }

    /// Integral of (1 - F(v)) dv over [0, x], exact for the interpolant.
    pub fn integral_one_minus(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.diameter() {
            return *self.cum.last().unwrap();
        }
        let k = self.segment(x);
        let fx = self.eval(x);
        self.cum[k] + (x - self.v[k]) * (1.0 - 0.5 * (self.f[k] + fx))
    }
}

/// Chord-length CDF of the unit ball: F(v) = 1 - (1 - v^2/4)^{(d-1)/2}.
pub fn ball_chord_cdf(d: usize, v: f64) -> f64 {
    let v = v.clamp(0.0, 2.0);
    1.0 - (1.0 - 0.25 * v * v).max(0.0).powf((d as f64 - 1.0) / 2.0)
}

/// A convex observation body: the unit ball, or a tabulated convex set.
#[derive(Debug, Clone)]
pub struct BodySpec {
    pub d: usize,
    pub kind: BodyKind,
    /// d-dimensional volume |K|.
    pub volume: f64,
    /// Surface content U_{d-1}(K).
    pub surface: f64,
    /// Diameter D(K).
    pub diameter: f64,
    pub chord_cdf: Option<ChordCdf>,
    /// Radii (F1, F2) with F1 B(1) contained in K contained in F2 B(1).
    pub sandwich: (f64, f64),
}

impl BodySpec {
    pub fn unit_ball(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Param(format!("bodies need dimension >= 2, got {d}")));
        }
        Ok(Self {
            d,
            kind: BodyKind::UnitBall,
            volume: unit_ball_volume(d),
            surface: unit_sphere_surface(d),
            diameter: 2.0,
            chord_cdf: None,
            sandwich: (1.0, 1.0),
        })
    }

    pub fn tabulated(d: usize, volume: f64, surface: f64, sandwich: (f64, f64), chord: ChordCdf) -> Result<Self> {
        if d < 2 {
            return Err(Error::Param(format!("bodies need dimension >= 2, got {d}")));
        }
        if !(volume > 0.0 && surface > 0.0) {
            return Err(Error::Param("body volume and surface must be positive".into()));
        }
        let (f1, f2) = sandwich;
        if !(0.0 < f1 && f1 <= f2) {
            return Err(Error::Param(format!("sandwich radii need 0 < F1 <= F2, got ({f1}, {f2})")));
        }
        let diameter = chord.diameter();
        if !(f1 <= diameter / 2.0 + 1e-9 && diameter / 2.0 <= f2 + 1e-9) {
            return Err(Error::Param(format!(
                "sandwich radii ({f1}, {f2}) inconsistent with diameter {diameter}"
            )));
        }
        let (vlo, vhi) = (f1.powi(d as i32) * unit_ball_volume(d), f2.powi(d as i32) * unit_ball_volume(d));
        if !(vlo * (1.0 - 1e-9) <= volume && volume <= vhi * (1.0 + 1e-9)) {
            return Err(Error::Param(format!(
                "volume {volume} outside the sandwich range [{vlo}, {vhi}]"
            )));
        }
        Ok(Self { d, kind: BodyKind::TabulatedConvex, volume, surface, diameter, chord_cdf: Some(chord), sandwich })
    }

    /// Relative residual of the mean-chord identity
    /// int_0^D (1 - F) dv = (d-1)|S_{d-1}||K| / (|S_{d-2}| U_{d-1}(K)),
    /// which is exactly the condition for the distance density to vanish at
    /// the diameter. Large residuals signal an inconsistent table.
    pub fn mean_chord_residual(&self) -> Result<f64> {
        let d = self.d;
        let want = (d as f64 - 1.0) * unit_sphere_surface(d) * self.volume
            / (unit_sphere_surface(d - 1) * self.surface);
        let got = match self.kind {
            BodyKind::UnitBall => {
                quad::adaptive(|v| (1.0 - ball_chord_cdf(d, v)).max(0.0), 0.0, 2.0, 1e-12, 1e-12, 20_000).value
            }
            BodyKind::TabulatedConvex => {
                let table = self
                    .chord_cdf
                    .as_ref()
                    .ok_or_else(|| Error::MissingChordCdf("tabulated body without chord table".into()))?;
                table.integral_one_minus(table.diameter())
            }
        };
        Ok((got - want).abs() / want)
    }
}

/// Density of the distance between two uniform points in the ball of radius
/// `scale`: (d / scale^d) z^{d-1} I_{1-(z/(2 scale))^2}((d+1)/2, 1/2).
pub fn ball_distance_density(d: usize, scale: f64, z: f64) -> Result<f64> {
    if d < 2 || !(scale > 0.0) {
        return Err(Error::Domain(format!("ball density needs d >= 2 and scale > 0, got d={d}, scale={scale}")));
    }
    if !(0.0..=2.0 * scale + 1e-12 * scale).contains(&z) {
        return Err(Error::Domain(format!("distance {z} outside the support [0, {}]", 2.0 * scale)));
    }
    let half = z / (2.0 * scale);
    let mu = (1.0 - half * half).max(0.0);
    let fd = d as f64;
    Ok(fd * scale.powi(-(d as i32)) * z.powi(d as i32 - 1) * incomplete_beta_clamped(mu, (fd + 1.0) / 2.0, 0.5))
}

/// Distance density for a general convex body at scale Lambda, built from the
/// chord-length CDF:
/// psi(z) = (|K_L| z^{d-1} |S_{d-1}| - |S_{d-2}| z^{d-1} U_L/(d-1) int_0^z (1-F_L)) / |K_L|^2
/// with K_L the scaled body. The unit-ball kind delegates to the closed form.
pub fn convex_distance_density(body: &BodySpec, scale: f64, z: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    if body.kind == BodyKind::UnitBall {
        return ball_distance_density(body.d, scale, z);
    }
    let table = body
        .chord_cdf
        .as_ref()
        .ok_or_else(|| Error::MissingChordCdf(format!("body of dimension {} lacks a chord table", body.d)))?;
    let support = body.diameter * scale;
    if !(0.0..=support * (1.0 + 1e-12)).contains(&z) {
        return Err(Error::Domain(format!("distance {z} outside the support [0, {support}]")));
    }
    let d = body.d;
    let fd = d as f64;
    let vol = body.volume * scale.powi(d as i32);
    let surf = body.surface * scale.powi(d as i32 - 1);
    // int_0^z (1 - F_K(v / scale)) dv = scale * int_0^{z/scale} (1 - F_K)
    let tail_int = scale * table.integral_one_minus(z / scale);
    let zd1 = z.powi(d as i32 - 1);
    let raw = (vol * zd1 * unit_sphere_surface(d)
        - unit_sphere_surface(d - 1) * zd1 * surf / (fd - 1.0) * tail_int)
        / (vol * vol);
    // Noisy tables can dip microscopically negative near the diameter.
    Ok(raw.max(0.0))
}

/// Chord-length density between two uniform points on the sphere surface
/// S_{d-1}(1): (1/sqrt(pi)) Gamma(d/2)/Gamma((d-1)/2) z^{d-2} (1-z^2/4)^{(d-3)/2}.
pub fn sphere_chord_density(d: usize, z: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("sphere chord density needs d >= 2, got {d}")));
    }
    if !(0.0..=2.0 + 1e-12).contains(&z) {
        return Err(Error::Domain(format!("chord {z} outside [0, 2]")));
    }
    let fd = d as f64;
    let pref = (crate::special::ln_gamma(fd / 2.0) - crate::special::ln_gamma((fd - 1.0) / 2.0)).exp()
        / std::f64::consts::PI.sqrt();
    Ok(pref * z.powi(d as i32 - 2) * (1.0 - 0.25 * z * z).max(0.0).powf((fd - 3.0) / 2.0))
}

/// Closed form of int_0^2 u^{d-1} I_{1-(u/2)^2}((d+1)/2, 1/2) du.
pub fn ball_moment_integral(d: usize) -> f64 {
    let p = (d as f64 + 1.0) / 2.0;
    2f64.powi(d as i32) * beta(p, p) / (d as f64 * beta(p, 0.5))
}

/// Outcome of the ball sandwich comparison.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub pass: bool,
    /// Largest signed violation of either inequality (<= 0 means pass).
    pub worst_violation: f64,
    pub worst_z: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Check C1 psi_{ball(S1)} <= psi_K <= C2 psi_{ball(S2)} on a z grid, at
/// scale Lambda, with the volume-ratio constants C_i = (|B(S_i)|/|K|)^2 that
/// follow from covariogram monotonicity under inclusion.
pub fn lord_sandwich_check(body: &BodySpec, scale: f64, z_grid: &[f64]) -> Result<SandwichReport> {
    let (s1, s2) = body.sandwich;
    let d = body.d;
    let c1 = (unit_ball_volume(d) * s1.powi(d as i32) / body.volume).powi(2);
    let c2 = (unit_ball_volume(d) * s2.powi(d as i32) / body.volume).powi(2);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_z = f64::NAN;
    for &z in z_grid {
        if z < 0.0 || z > body.diameter * scale {
            continue;
        }
        let psi = convex_distance_density(body, scale, z)?;
        let lower = if z <= 2.0 * s1 * scale { c1 * ball_distance_density(d, s1 * scale, z)? } else { 0.0 };
        let upper = if z <= 2.0 * s2 * scale { c2 * ball_distance_density(d, s2 * scale, z)? } else { 0.0 };
        let viol = (lower - psi).max(psi - upper);
        if viol > worst {
            worst = viol;
            worst_z = z;
        }
    }
    let tol = 1e-9;
    Ok(SandwichReport { pass: worst <= tol, worst_violation: worst, worst_z, c1, c2 })
}

/// A distance density bound to a body and scale, with its support and the
/// quadrature normalization check baked in.
#[derive(Debug, Clone)]
pub struct DistanceDensity {
    pub body: BodySpec,
    pub scale: f64,
    pub support: (f64, f64),
    /// Integral of the raw formula over the support.
    pub raw_norm: f64,
    pub norm_err: f64,
    pub norm_converged: bool,
    renormalize: bool,
}

impl DistanceDensity {
    pub fn new(body: BodySpec, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {scale}")));
        }
        let support = (0.0, body.diameter * scale);
        let r = quad::adaptive(
            |z| convex_distance_density(&body, scale, z).unwrap_or(0.0),
            support.0,
            support.1,
            1e-8,
            1e-10,
            20_000,
        );
        let renormalize = body.kind == BodyKind::TabulatedConvex;
        if renormalize && (r.value - 1.0).abs() > 0.02 {
            return Err(Error::Table(format!(
                "tabulated distance density integrates to {} rather than 1; table inconsistent",
                r.value
            )));
        }
        Ok(Self { body, scale, support, raw_norm: r.value, norm_err: r.abs_err, norm_converged: r.converged, renormalize })
    }

    /// Density value; tabulated bodies are renormalized by the raw integral
    /// so the result is a genuine probability density even when the table
    /// carries Monte Carlo noise.
    pub fn eval(&self, z: f64) -> Result<f64> {
        let raw = convex_distance_density(&self.body, self.scale, z)?;
        Ok(if self.renormalize { raw / self.raw_norm } else { raw })
    }

    /// (z, CDF) table on n+1 equispaced knots across the support.
    pub fn cdf_table(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        let n = n.max(2);
        let h = (self.support.1 - self.support.0) / n as f64;
        let mut out = Vec::with_capacity(n + 1);
        out.push((self.support.0, 0.0));
        let mut acc = 0.0;
        for k in 0..n {
            let a = self.support.0 + k as f64 * h;
            let r = quad::adaptive(|z| self.eval(z).unwrap_or(0.0), a, a + h, 1e-10, 1e-9, 200);
            acc += r.value;
            out.push((a + h, acc.min(1.0)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    #[test]
    fn unit_ball_closed_forms() {
        for d in 2..=6 {
            let b = BodySpec::unit_ball(d).unwrap();
            let fd = d as f64;
            let vol = std::f64::consts::PI.powf(fd / 2.0) / (ln_gamma(fd / 2.0 + 1.0)).exp();
            let surf = 2.0 * std::f64::consts::PI.powf(fd / 2.0) / (ln_gamma(fd / 2.0)).exp();
            assert!((b.volume - vol).abs() < 1e-12 * vol);
            assert!((b.surface - surf).abs() < 1e-12 * surf);
            assert_eq!(b.diameter, 2.0);
        }
        assert!(BodySpec::unit_ball(1).is_err());
    }

    #[test]
    fn ball_density_d3_polynomial_oracle() {
        // For the unit 3-ball the density is the classical cubic
        // 3z^2 - (9/4)z^3 + (3/16)z^5 on [0, 2].
        for k in 0..=40 {
            let z = 2.0 * k as f64 / 40.0;
            let want = 3.0 * z * z - 2.25 * z * z * z + 3.0 / 16.0 * z.powi(5);
            let got = ball_distance_density(3, 1.0, z).unwrap();
            assert!((got - want).abs() < 1e-12, "z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn ball_density_normalization_and_endpoint() {
        for d in 2..=6 {
            for &scale in &[1.0, 10.0] {
                let r = quad::adaptive(
                    |z| ball_distance_density(d, scale, z).unwrap(),
                    0.0,
                    2.0 * scale,
                    1e-10,
                    1e-10,
                    20_000,
                );
                assert!(r.converged);
                assert!((r.value - 1.0).abs() < 1e-8, "d={d} scale={scale}: {}", r.value);
                assert_eq!(ball_distance_density(d, scale, 2.0 * scale).unwrap(), 0.0);
            }
        }
        assert!(ball_distance_density(3, 1.0, 2.5).is_err());
        assert!(ball_distance_density(3, 1.0, -0.1).is_err());
    }

    #[test]
    fn ball_density_scaling_law() {
        for d in [2, 3, 5] {
            for &z in &[0.3, 1.1, 1.9] {
                let lam = 7.5;
                let a = ball_distance_density(d, lam, z * lam).unwrap();
                let b = ball_distance_density(d, 1.0, z).unwrap() / lam;
                assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "d={d} z={z}");
            }
        }
    }

    #[test]
    fn chord_formula_reproduces_ball_density_exactly() {
        // Assemble the chord-CDF form with the analytic ball chord CDF and
        // its exact tail integral; it must match the incomplete-beta form.
        for d in 2..=5 {
            let fd = d as f64;
            let vol = unit_ball_volume(d);
            let surf = unit_sphere_surface(d);
            for &z in &[0.25, 0.8, 1.3, 1.85] {
                let tail = quad::adaptive(
                    |v| (1.0 - 0.25 * v * v).powf((fd - 1.0) / 2.0),
                    0.0,
                    z,
                    1e-13,
                    1e-13,
                    20_000,
                )
                .value;
                let zd1 = z.powi(d as i32 - 1);
                let psi = (vol * zd1 * unit_sphere_surface(d)
                    - unit_sphere_surface(d - 1) * zd1 * surf / (fd - 1.0) * tail)
                    / (vol * vol);
                let want = ball_distance_density(d, 1.0, z).unwrap();
                assert!((psi - want).abs() < 1e-10 * want.max(1.0), "d={d} z={z}: {psi} vs {want}");
            }
        }
    }

    #[test]
    fn tabulated_ball_matches_closed_form() {
        let d = 3;
        let n = 4000;
        let v: Vec<f64> = (0..=n).map(|k| 2.0 * k as f64 / n as f64).collect();
        let f: Vec<f64> = v.iter().map(|&x| ball_chord_cdf(d, x)).collect();
        let table = ChordCdf::new(v, f).unwrap();
        let body = BodySpec::tabulated(d, unit_ball_volume(d), unit_sphere_surface(d), (1.0, 1.0), table).unwrap();
        assert!(body.mean_chord_residual().unwrap() < 1e-7);
        for &z in &[0.2, 0.7, 1.4, 1.95] {
            let got = convex_distance_density(&body, 1.0, z).unwrap();
            let want = ball_distance_density(d, 1.0, z).unwrap();
            assert!((got - want).abs() < 1e-6, "z={z}: {got} vs {want}");
        }
        // And at a nontrivial scale, via the scaled-table route.
        for &z in &[0.5, 2.0, 3.7] {
            let got = convex_distance_density(&body, 2.0, z).unwrap();
            let want = ball_distance_density(d, 2.0, z).unwrap();
            assert!((got - want).abs() < 1e-6, "z={z}: {got} vs {want}");
        }
        let dd = DistanceDensity::new(body, 1.0).unwrap();
        assert!(dd.norm_converged);
        assert!((dd.raw_norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unit_ball_distance_density_delegates() {
        let body = BodySpec::unit_ball(4).unwrap();
        let dd = DistanceDensity::new(body.clone(), 3.0).unwrap();
        for &z in &[0.1, 2.0, 5.5] {
            let a = dd.eval(z).unwrap();
            let b = ball_distance_density(4, 3.0, z).unwrap();
            assert!((a - b).abs() <= 1e-15 * b.max(1.0));
            let c = convex_distance_density(&body, 3.0, z).unwrap();
            assert!((c - b).abs() <= 1e-15 * b.max(1.0));
        }
        assert!((dd.raw_norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sphere_chord_d3_is_half_z() {
        for k in 0..=20 {
            let z = 2.0 * k as f64 / 20.0;
            assert!((sphere_chord_density(3, z).unwrap() - z / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_chord_normalization() {
        // z = 2 sin(phi) turns the d=2 inverse-square-root endpoint into a
        // smooth integrand; d >= 3 is smooth either way.
        for d in 2..=5 {
            let r = quad::adaptive(
                |phi| {
                    let (s, c) = phi.sin_cos();
                    sphere_chord_density(d, 2.0 * s).unwrap() * 2.0 * c
                },
                0.0,
                std::f64::consts::FRAC_PI_2,
                1e-10,
                1e-10,
                40_000,
            );
            assert!((r.value - 1.0).abs() < 1e-7, "d={d}: {}", r.value);
        }
        assert!(sphere_chord_density(3, 2.5).is_err());
    }

    #[test]
    fn moment_integral_closed_form_vs_quadrature() {
        assert!((ball_moment_integral(2) - 0.5).abs() < 1e-12);
        for d in 2..=4 {
            let fd = d as f64;
            let r = quad::adaptive(
                |u| {
                    u.powi(d as i32 - 1)
                        * incomplete_beta_clamped((1.0 - 0.25 * u * u).max(0.0), (fd + 1.0) / 2.0, 0.5)
                },
                0.0,
                2.0,
                1e-12,
                1e-12,
                40_000,
            );
            let want = ball_moment_integral(d);
            assert!((r.value - want).abs() < 1e-8 * want, "d={d}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn sandwich_ball_equality_and_constructed_failure() {
        let ball = BodySpec::unit_ball(3).unwrap();
        let grid: Vec<f64> = (0..=50).map(|k| 2.0 * k as f64 / 50.0).collect();
        let rep = lord_sandwich_check(&ball, 1.0, &grid).unwrap();
        assert!(rep.pass, "worst violation {} at z={}", rep.worst_violation, rep.worst_z);
        assert!((rep.c1 - 1.0).abs() < 1e-12 && (rep.c2 - 1.0).abs() < 1e-12);

        // A unit-ball chord table that falsely claims to fit inside radius
        // 0.95 must fail, with the violation located.
        let n = 800;
        let v: Vec<f64> = (0..=n).map(|k| 2.0 * k as f64 / n as f64).collect();
        let f: Vec<f64> = v.iter().map(|&x| ball_chord_cdf(3, x)).collect();
        let table = ChordCdf::new(v, f).unwrap();
        let liar = BodySpec {
            d: 3,
            kind: BodyKind::TabulatedConvex,
            volume: unit_ball_volume(3),
            surface: unit_sphere_surface(3),
            diameter: 2.0,
            chord_cdf: Some(table),
            sandwich: (0.9, 0.95),
        };
        let rep = lord_sandwich_check(&liar, 1.0, &grid).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_violation > 1e-3);
        assert!(rep.worst_z.is_finite());
    }

    #[test]
    fn sandwich_validation_rejects_inconsistent_bodies() {
        let n = 100;
        let v: Vec<f64> = (0..=n).map(|k| 2.0 * k as f64 / n as f64).collect();
        let f: Vec<f64> = v.iter().map(|&x| ball_chord_cdf(3, x)).collect();
        let table = ChordCdf::new(v.clone(), f.clone()).unwrap();
        // Diameter 2 cannot fit inside a ball of radius 0.8.
        assert!(BodySpec::tabulated(3, unit_ball_volume(3), unit_sphere_surface(3), (0.5, 0.8), table).is_err());
        let table = ChordCdf::new(v, f).unwrap();
        // Volume larger than the outer ball allows.
        assert!(BodySpec::tabulated(3, 10.0, unit_sphere_surface(3), (1.0, 1.0), table).is_err());
    }

    #[test]
    fn chord_table_validation() {
        assert!(ChordCdf::new(vec![0.0, 1.0], vec![0.0, 0.9]).is_err()); // does not reach 1
        assert!(ChordCdf::new(vec![0.0, 0.0, 1.0], vec![0.0, 0.5, 1.0]).is_err()); // not strictly increasing
        assert!(ChordCdf::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.8, 1.0].into_iter().rev().collect()).is_err());
        let t = ChordCdf::new(vec![0.5, 1.0], vec![0.3, 1.0]).unwrap(); // 0-knot prepended
        assert_eq!(t.eval(0.0), 0.0);
        assert!((t.eval(0.25) - 0.15).abs() < 1e-12);
        // Exact tail integral of the piecewise interpolant.
        let got = t.integral_one_minus(0.75);
        // Segments: [0,0.5] mean 1-(0+0.3)/2=0.85 -> 0.425; [0.5,0.75]: F goes
        // 0.3 -> 0.65, mean 1-0.475=0.525 -> 0.13125.
        assert!((got - 0.55625).abs() < 1e-12);
    }

    #[test]
    fn chord_csv_roundtrip() {
        let dir = std::env::temp_dir().join(format!("chordcdf-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ball.csv");
        let mut text = String::from("v,F\n");
        for k in 0..=100 {
            let v = 2.0 * k as f64 / 100.0;
            text.push_str(&format!("{},{}\n", v, ball_chord_cdf(3, v)));
        }
        std::fs::write(&path, text).unwrap();
        let t = ChordCdf::from_csv_path(&path).unwrap();
        assert!((t.diameter() - 2.0).abs() < 1e-12);
        assert!((t.eval(1.0) - ball_chord_cdf(3, 1.0)).abs() < 1e-4);
        std::fs::remove_dir_all(&dir).ok();
        assert!(ChordCdf::from_csv_path(std::path::Path::new("/nonexistent/t.csv")).is_err());
    }

    #[test]
    fn cdf_table_monotone_and_normalized() {
        let dd = DistanceDensity::new(BodySpec::unit_ball(2).unwrap(), 1.0).unwrap();
        let tab = dd.cdf_table(64).unwrap();
        assert_eq!(tab.len(), 65);
        for w in tab.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        assert!((tab.last().unwrap().1 - 1.0).abs() < 1e-7);
    }
}
