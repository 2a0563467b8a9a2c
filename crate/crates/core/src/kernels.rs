//! Composite impedance kernels in the Laplace domain.
//!
//! A kernel is the sum of positive-real terms
//!
//! ```text
//! z(s) = z0 + z_tau e^{-tau s} + z1 s + int 1/(s+xi) dmu1 + int s/(s+xi) dmu2
//!        (+ z_tau_d e^{-tau_d s} / sqrt(s))
//! ```
//!
//! Positive-realness is checked by sampling, which can falsify but never
//! prove the property.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiffusiveDescriptor, Quadrature};

/// Absolute tolerance on `Re z(s)` before a sample counts as a violation.
pub const TOL_PR: f64 = 1e-10;

/// Delayed half-order integral `z_tau_d e^{-tau_d s} / sqrt(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayedSqrt {
    pub z_tau_d: f64,
    pub tau_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default)]
    pub z0: f64,
    #[serde(default)]
    pub z_tau: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub z1: f64,
    /// Measure of the standard diffusive term `int 1/(s+xi) dmu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard: Option<DiffusiveDescriptor>,
    /// Measure of the extended diffusive term `int s/(s+xi) dmu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extended: Option<DiffusiveDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delayed_sqrt: Option<DelayedSqrt>,
    /// Energy weight of the delay line; defaults to `z0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Reject the kernel unless the closed-form PR condition holds.
    #[serde(default)]
    pub certified_pr: bool,
    /// Bank used when a descriptor has to be realized in time.
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            z0: 0.0,
            z_tau: 0.0,
            tau: 0.0,
            z1: 0.0,
            standard: None,
            extended: None,
            delayed_sqrt: None,
            k: None,
            certified_pr: false,
            quadrature: Quadrature::default(),
        }
    }
}

impl KernelSpec {
    pub fn proportional(z0: f64) -> Self {
        KernelSpec {
            z0,
            ..Default::default()
        }
    }

    pub fn delay(z0: f64, z_tau: f64, tau: f64) -> Self {
        KernelSpec {
            z0,
            z_tau,
            tau,
            ..Default::default()
        }
    }

    pub fn with_derivative(mut self, z1: f64) -> Self {
        self.z1 = z1;
        self
    }

    pub fn with_standard(mut self, desc: DiffusiveDescriptor) -> Self {
        self.standard = Some(desc);
        self
    }

    pub fn with_extended(mut self, desc: DiffusiveDescriptor) -> Self {
        self.extended = Some(desc);
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn certified(mut self) -> Self {
        self.certified_pr = true;
        self
    }

    pub fn has_delay(&self) -> bool {
        self.z_tau != 0.0 && self.tau > 0.0
    }

    /// Delay-line energy weight (center of the admissible interval by default).
    pub fn delay_weight(&self) -> f64 {
        self.k.unwrap_or(self.z0)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.z0, self.z_tau, self.tau, self.z1]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("kernel", "coefficients must be finite"));
        }
        if self.z0 < 0.0 {
            return Err(Error::param("z0", format!("{} < 0", self.z0)));
        }
        if self.tau < 0.0 {
            return Err(Error::param("tau", format!("{} < 0", self.tau)));
        }
        if self.z1 < 0.0 {
            return Err(Error::param("z1", format!("{} < 0", self.z1)));
        }
        if let Some(k) = self.k {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::param("k", format!("delay weight {k} must be > 0")));
            }
        }
        for desc in self.standard.iter().chain(self.extended.iter()) {
            desc.validate()?;
        }
        if let Some(d) = self.delayed_sqrt {
            if !(d.tau_d >= 0.0 && d.z_tau_d.is_finite()) {
                return Err(Error::param("tau_d", "delayed sqrt term needs tau_d >= 0"));
            }
        }
        if self.certified_pr
            && self.has_delay()
            && !delay_pr_condition(self.z0, self.z_tau, self.tau)
        {
            return Err(Error::param(
                "z_tau",
                format!(
                    "certified_pr requires z0 >= |z_tau| for the delay term to be positive-real (z0 = {}, z_tau = {})",
                    self.z0, self.z_tau
                ),
            ));
        }
        Ok(())
    }

    /// `z(0)` when finite. `None` if a term is singular at the origin.
    pub fn value_at_zero(&self) -> Option<f64> {
        if self.delayed_sqrt.is_some_and(|d| d.z_tau_d != 0.0) {
            return None;
        }
        let mut z = self.z0 + self.z_tau;
        if let Some(desc) = &self.standard {
            if desc.singular_at_origin() {
                return None;
            }
            let bank = desc.discretize(&self.quadrature).ok()?;
            z += bank.iter().map(|(x, w)| w / x).sum::<f64>();
        }
        Some(z)
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(z) = self.value_at_zero() {
            if z.abs() < 1e-14 && (self.has_delay() || self.z0 != 0.0) {
                out.push(format!(
                    "z(0) = {z:e}: the coupled generator is not injective (constant flux mode)"
                ));
            }
        }
        if self.delayed_sqrt.is_some() {
            out.push("delayed sqrt term has no known dissipative realization".into());
        }
        out
    }

    /// Evaluate `z(s)` for `Re(s) >= 0`.
    pub fn eval_laplace(&self, s: Complex64) -> Result<Complex64> {
        if s.re < 0.0 || !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::LeftHalfPlane { s });
        }
        let at_origin = s == Complex64::new(0.0, 0.0);
        let mut z = Complex64::new(self.z0, 0.0) + self.z1 * s;
        if self.z_tau != 0.0 {
            z += self.z_tau * (-self.tau * s).exp();
        }
        if let Some(desc) = &self.standard {
            z += match desc.analytic_standard(s) {
                Some(_) if at_origin => return Err(Error::SingularAtOrigin),
                Some(v) => v,
                None => desc.discretize(&self.quadrature)?.eval_standard(s)?,
            };
        }
        if let Some(desc) = &self.extended {
            z += match desc.analytic_extended(s) {
                Some(_) if at_origin => Complex64::new(0.0, 0.0),
                Some(v) => v,
                None => desc.discretize(&self.quadrature)?.eval_extended(s)?,
            };
        }
        if let Some(d) = self.delayed_sqrt {
            if d.z_tau_d != 0.0 {
                if at_origin {
                    return Err(Error::SingularAtOrigin);
                }
                z += d.z_tau_d * (-d.tau_d * s).exp() / s.sqrt();
            }
        }
        Ok(z)
    }

    pub fn check_positive_real(&self, sampler: &SamplerConfig) -> PRReport {
        check_positive_real(self, sampler)
    }
}

pub fn eval_laplace(kernel: &KernelSpec, s: Complex64) -> Result<Complex64> {
    kernel.eval_laplace(s)
}

/// Sample layout for positive-realness falsification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    /// Distance of the boundary scan from the imaginary axis.
    pub eps: f64,
    /// Half-width of the interior box.
    pub radius: f64,
    pub grid_re: usize,
    pub grid_im: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub boundary_points: usize,
    pub real_axis_points: usize,
    pub tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            eps: 1e-8,
            radius: 100.0,
            grid_re: 24,
            grid_im: 81,
            omega_min: 1e-3,
            omega_max: 1e4,
            boundary_points: 20_000,
            real_axis_points: 200,
            tol: TOL_PR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PRReport {
    pub certified: bool,
    /// At most [`PRReport::MAX_LISTED`] violations are kept.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub samples_checked: usize,
    /// Largest `|Im z(s)| / max(1, |z(s)|)` on sampled positive reals.
    pub reality_defect: f64,
    pub min_re: f64,
    pub warnings: Vec<String>,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub s: Complex64,
    pub re_z: f64,
}

impl PRReport {
    pub const MAX_LISTED: usize = 64;
}

fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 {
        (hi / lo).ln() / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |k| lo * (k as f64 * step).exp())
}

pub fn check_positive_real(kernel: &KernelSpec, sampler: &SamplerConfig) -> PRReport {
    // Banks are discretized once instead of at every sample.
    let mut resolved = kernel.clone();
    for desc in [&mut resolved.standard, &mut resolved.extended]
        .into_iter()
        .flatten()
    {
        if matches!(desc, DiffusiveDescriptor::Tabulated { .. }) {
            if let Ok(measure) = desc.discretize(&kernel.quadrature) {
                *desc = DiffusiveDescriptor::Discrete { measure };
            }
        }
    }

    let mut report = PRReport {
        certified: true,
        violations: Vec::new(),
        violation_count: 0,
        samples_checked: 0,
        reality_defect: 0.0,
        min_re: f64::INFINITY,
        warnings: kernel.warnings(),
        note: "sampling-based falsification; certified=true is not a proof of positive-realness"
            .into(),
    };
    let visit = |s: Complex64, report: &mut PRReport| {
        report.samples_checked += 1;
        match resolved.eval_laplace(s) {
            Ok(z) if z.re.is_finite() => {
                report.min_re = report.min_re.min(z.re);
                if z.re < -sampler.tol {
                    report.certified = false;
                    report.violation_count += 1;
                    if report.violations.len() < PRReport::MAX_LISTED {
                        report.violations.push(Violation { s, re_z: z.re });
                    }
                }
            }
            _ => {
                report.certified = false;
                report
                    .warnings
                    .push(format!("kernel not evaluable at s = {s}"));
            }
        }
    };

    for sr in log_space(sampler.eps.max(1e-12), sampler.radius, sampler.grid_re) {
        for j in 0..sampler.grid_im {
            let si = if sampler.grid_im > 1 {
                -sampler.radius + 2.0 * sampler.radius * j as f64 / (sampler.grid_im - 1) as f64
            } else {
                0.0
            };
            visit(Complex64::new(sr, si), &mut report);
        }
    }
    for w in log_space(
        sampler.omega_min,
        sampler.omega_max,
        sampler.boundary_points,
    ) {
        visit(Complex64::new(sampler.eps, w), &mut report);
        visit(Complex64::new(sampler.eps, -w), &mut report);
    }
    for sr in log_space(
        sampler.omega_min,
        sampler.omega_max,
        sampler.real_axis_points,
    ) {
        let s = Complex64::new(sr, 0.0);
        visit(s, &mut report);
        if let Ok(z) = resolved.eval_laplace(s) {
            let defect = z.im.abs() / z.norm().max(1.0);
            report.reality_defect = report.reality_defect.max(defect);
        }
    }
    if report.reality_defect > sampler.tol {
        report.certified = false;
    }
    report
}

/// Closed-form PR condition of `z0 + z_tau e^{-tau s}`.
pub fn delay_pr_condition(z0: f64, z_tau: f64, tau: f64) -> bool {
    z0 >= z_tau.abs() && tau >= 0.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    /// `-inf` when the polynomial is a nonzero constant.
    pub max_re: f64,
}

/// Roots of `z a2 s^2 + a1 s + z a0` for nonnegative `a_i` and `Re z > 0`.
pub fn quadratic_halfplane_roots(a0: f64, a1: f64, a2: f64, z: Complex64) -> Result<RootReport> {
    if a0 < 0.0 || a1 < 0.0 || a2 < 0.0 {
        return Err(Error::param("a", "coefficients must be nonnegative"));
    }
    if !(z.re > 0.0) {
        return Err(Error::param(
            "z",
            format!("{z} is not in the open right half-plane"),
        ));
    }
    if a0 == 0.0 && a1 == 0.0 && a2 == 0.0 {
        return Err(Error::DegeneratePolynomial);
    }
    let qa = z * a2;
    let qb = Complex64::new(a1, 0.0);
    let qc = z * a0;
    let roots = if a2 == 0.0 {
        if a1 == 0.0 {
            Vec::new()
        } else {
            vec![-qc / qb]
        }
    } else {
        let sq = (qb * qb - 4.0 * qa * qc).sqrt();
        // Pick the sign that avoids cancellation.
        let q = if (qb.conj() * sq).re >= 0.0 {
            -0.5 * (qb + sq)
        } else {
            -0.5 * (qb - sq)
        };
        if q == Complex64::new(0.0, 0.0) {
            vec![Complex64::new(0.0, 0.0); 2]
        } else {
            vec![q / qa, qc / q]
        }
    };
    let max_re = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(RootReport { roots, max_re })
}

fn x_tilde_residual(x: f64) -> f64 {
    (x + FRAC_PI_4).tan() + 0.5 / x
}

/// Smallest positive root of `tan(x + pi/4) + 1/(2x)`.
///
/// On `(pi/4, 5pi/4)` the tangent sweeps from `-inf` to `+inf`, so the root
/// is bracketed by the two poles.
pub fn find_x_tilde() -> f64 {
    let mut lo = FRAC_PI_4 + 1e-9;
    let mut hi = 5.0 * FRAC_PI_4 - 1e-9;
    debug_assert!(x_tilde_residual(lo) < 0.0 && x_tilde_residual(hi) > 0.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f = x_tilde_residual(mid);
        if f.abs() < 1e-13 || hi - lo < 4.0 * f64::EPSILON {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Smallest `z0` keeping `z0 + z_tau e^{-tau s}/sqrt(s)` positive-real.
pub fn min_z0_delayed_sqrt(z_tau: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::param("tau", format!("{tau} must be > 0")));
    }
    if z_tau < 0.0 {
        return Err(Error::param("z_tau", format!("{z_tau} must be >= 0")));
    }
    let x = find_x_tilde();
    Ok(-z_tau * (x + FRAC_PI_4).cos() * (tau / x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::fractional_density;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let k = KernelSpec::delay(1.0, 1.0, 1.0);
        assert!(k.eval_laplace(c(0.0, PI)).unwrap().norm() < 1e-15);

        let k = KernelSpec::default().with_standard(fractional_density(0.5).unwrap());
        assert_abs_diff_eq!(
            k.eval_laplace(c(4.0, 0.0)).unwrap().re,
            0.5,
            epsilon = 1e-15
        );

        let k = KernelSpec::proportional(1.0).with_derivative(2.0);
        assert_abs_diff_eq!(
            k.eval_laplace(c(3.0, 0.0)).unwrap().re,
            7.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn eval_errors() {
        let k = KernelSpec::default().with_standard(fractional_density(0.5).unwrap());
        assert!(matches!(
            k.eval_laplace(c(0.0, 0.0)),
            Err(Error::SingularAtOrigin)
        ));
        assert!(matches!(
            KernelSpec::proportional(1.0).eval_laplace(c(-1.0, 0.0)),
            Err(Error::LeftHalfPlane { .. })
        ));
        // Extended fractional term vanishes at the origin.
        let k = KernelSpec::proportional(1.0).with_extended(fractional_density(0.5).unwrap());
        assert_eq!(k.eval_laplace(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn fractional_branch_is_principal() {
        let k = KernelSpec::default().with_standard(fractional_density(0.5).unwrap());
        let z = k.eval_laplace(c(0.0, 1.0)).unwrap();
        assert!((z - Complex64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-15);
        let z = k.eval_laplace(c(0.0, -1.0)).unwrap();
        assert!((z - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
    }

    #[test]
    fn pr_check_examples() {
        let sampler = SamplerConfig::default();
        let bad = KernelSpec::delay(1.0, 2.0, 1.0).check_positive_real(&sampler);
        assert!(!bad.certified);
        assert!(!bad.violations.is_empty());
        assert!(bad
            .violations
            .iter()
            .all(|v| v.s.re > 0.0 && v.re_z < -TOL_PR));

        let good = KernelSpec::delay(2.0, 1.0, 1.0).check_positive_real(&sampler);
        assert!(good.certified, "{:?}", good.violations.first());

        let der = KernelSpec::default()
            .with_derivative(1.0)
            .check_positive_real(&sampler);
        assert!(der.certified);
        assert!(der.note.contains("not a proof"));
    }

    #[test]
    fn delay_condition_examples() {
        assert!(delay_pr_condition(1.0, 1.0, 0.5));
        assert!(delay_pr_condition(1.0, -1.0, 0.5));
        assert!(!delay_pr_condition(0.9, 1.0, 0.5));
        assert!(!delay_pr_condition(1.0, 0.5, -0.1));
    }

    #[test]
    fn certified_flag_enforces_condition() {
        let k = KernelSpec::delay(0.5, 1.0, 0.3).certified();
        assert!(k.validate().is_err());
        assert!(KernelSpec::delay(1.0, 1.0, 0.3)
            .certified()
            .validate()
            .is_ok());
    }

    /// Textbook quadratic formula, used as the oracle.
    fn naive_roots(a: Complex64, b: Complex64, cc: Complex64) -> [Complex64; 2] {
        let d = (b * b - 4.0 * a * cc).sqrt();
        [(-b + d) / (2.0 * a), (-b - d) / (2.0 * a)]
    }

    #[test]
    fn quadratic_examples() {
        let r = quadratic_halfplane_roots(1.0, 1.0, 1.0, c(1.0, 0.0)).unwrap();
        let want = naive_roots(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert_abs_diff_eq!(want[0].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(want[0].im.abs(), 3f64.sqrt() / 2.0, epsilon = 1e-15);
        for w in want {
            assert!(r.roots.iter().any(|x| (x - w).norm() < 1e-14));
        }
        assert_abs_diff_eq!(r.max_re, -0.5, epsilon = 1e-15);

        let r = quadratic_halfplane_roots(0.0, 1.0, 0.0, c(0.3, 2.0)).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert_eq!(r.max_re, 0.0);

        let z = c(1.0, 1.0);
        let r = quadratic_halfplane_roots(1.0, 2.0, 1.0, z).unwrap();
        let want = naive_roots(z, c(2.0, 0.0), z);
        assert!(want.iter().all(|w| w.re <= 0.0));
        assert!(r.max_re <= 0.0);
        for w in want {
            assert!(r.roots.iter().any(|x| (x - w).norm() < 1e-12));
        }

        assert!(matches!(
            quadratic_halfplane_roots(0.0, 0.0, 0.0, z),
            Err(Error::DegeneratePolynomial)
        ));
    }

    #[test]
    fn x_tilde_value() {
        let x = find_x_tilde();
        assert!((x - 2.13).abs() < 0.01, "{x}");
        assert!(x_tilde_residual(x).abs() < 1e-10);
        // Sign scan: exactly one sign change of the residual in the bracket
        // (the poles sit at the ends).
        let (lo, hi) = (FRAC_PI_4, 5.0 * FRAC_PI_4);
        let n = 100_000;
        let vals: Vec<f64> = (1..n)
            .map(|i| x_tilde_residual(lo + (hi - lo) * i as f64 / n as f64))
            .collect();
        let changes: Vec<usize> = (1..vals.len())
            .filter(|&i| vals[i - 1].signum() != vals[i].signum())
            .collect();
        assert_eq!(changes.len(), 1);
        let xc = lo + (hi - lo) * (changes[0] + 1) as f64 / n as f64;
        assert!((xc - x).abs() < 1e-4);
        // And nothing smaller on (0, pi/4): tan there exceeds 1.
        assert!((1..1000).all(|i| x_tilde_residual(FRAC_PI_4 * i as f64 / 1000.0) > 0.0));
    }

    /// Dense imaginary-axis scan for the threshold of the delayed sqrt kernel.
    fn scan_threshold(z_tau: f64, tau: f64) -> f64 {
        let n = 400_000;
        let (lo, hi) = (1e-4f64, 1e3f64 / tau);
        (0..n)
            .map(|i| {
                let w = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
                let s = c(0.0, w);
                let term = z_tau * (-tau * s).exp() / s.sqrt();
                -term.re
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn delayed_sqrt_threshold() {
        assert_eq!(min_z0_delayed_sqrt(0.0, 1.0).unwrap(), 0.0);
        let v = min_z0_delayed_sqrt(1.0, 2.13).unwrap();
        assert!((v - 0.974).abs() < 2e-3, "{v}");
        let scan = scan_threshold(1.0, 2.13);
        assert!((scan / v - 1.0).abs() < 1e-3, "{scan} vs {v}");
        let a = min_z0_delayed_sqrt(0.7, 0.4).unwrap();
        let b = min_z0_delayed_sqrt(0.7, 1.6).unwrap();
        assert_abs_diff_eq!(b, 2.0 * a, epsilon = 1e-12);
        assert!(min_z0_delayed_sqrt(1.0, 0.0).is_err());
    }

    #[test]
    fn delayed_sqrt_pr_boundary() {
        let z0 = min_z0_delayed_sqrt(1.0, 1.0).unwrap();
        let mk = |z0: f64| KernelSpec {
            z0,
            delayed_sqrt: Some(DelayedSqrt {
                z_tau_d: 1.0,
                tau_d: 1.0,
            }),
            ..Default::default()
        };
        let sampler = SamplerConfig {
            eps: 1e-10,
            ..Default::default()
        };
        assert!(mk(z0 * 1.01).check_positive_real(&sampler).certified);
        assert!(!mk(z0 * 0.99).check_positive_real(&sampler).certified);
    }

    #[test]
    fn zero_dc_warning() {
        let k = KernelSpec::delay(1.0, -1.0, 0.5);
        assert_eq!(k.value_at_zero(), Some(0.0));
        assert!(!k.warnings().is_empty());
        assert!(KernelSpec::delay(1.0, 0.5, 0.5).warnings().is_empty());
    }
}
