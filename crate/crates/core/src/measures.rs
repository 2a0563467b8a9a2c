//! Diffusive measures and their discretization into positive pole banks.
//!
//! A diffusive kernel is described by a positive measure `mu` on `(0, inf)`.
//! Its standard Laplace transform is `int 1/(s+xi) dmu(xi)` and its extended
//! transform is `int s/(s+xi) dmu(xi)`. For time-domain work the measure is
//! replaced by a finite bank of poles `xi_k` with weights `w_k`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite positive measure `sum_k w_k delta(xi - xi_k)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawMeasure")]
pub struct DiscreteMeasure {
    xi: Vec<f64>,
    w: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    xi: Vec<f64>,
    w: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        DiscreteMeasure::new(raw.xi, raw.w)
    }
}

impl DiscreteMeasure {
    /// Nodes must be strictly positive and strictly increasing, weights
    /// strictly positive.
    pub fn new(xi: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let m = DiscreteMeasure { xi, w };
        m.validate()?;
        Ok(m)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.xi.len() != self.w.len() {
            return Err(Error::param(
                "measure",
                format!("{} nodes but {} weights", self.xi.len(), self.w.len()),
            ));
        }
        for (k, (&x, &w)) in self.xi.iter().zip(&self.w).enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::param("xi", format!("node {k} = {x} is not > 0")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::param("w", format!("weight {k} = {w} is not > 0")));
            }
            if k > 0 && self.xi[k - 1] >= x {
                return Err(Error::param("xi", "nodes must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xi
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xi.iter().copied().zip(self.w.iter().copied())
    }

    /// `sum_k w_k / (s + xi_k)`.
    pub fn eval_standard(&self, s: Complex64) -> Result<Complex64> {
        check_half_plane(s)?;
        Ok(self.iter().map(|(x, w)| w / (s + x)).sum())
    }

    /// `sum_k w_k s / (s + xi_k)`.
    pub fn eval_extended(&self, s: Complex64) -> Result<Complex64> {
        check_half_plane(s)?;
        Ok(self.iter().map(|(x, w)| w * s / (s + x)).sum())
    }

    pub fn integrability_report(&self) -> IntegrabilityReport {
        IntegrabilityReport {
            sum_wellposed: self.iter().map(|(x, w)| w / (1.0 + x)).sum(),
            sum_inv_xi: self.iter().map(|(x, w)| w / x).sum(),
        }
    }

    /// CSV with header `xi,w`; floats use 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,w\n");
        for (x, w) in self.iter() {
            let _ = writeln!(out, "{},{}", fmt_f64(x), fmt_f64(w));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("xi,w") => {}
            other => {
                return Err(Error::config(
                    "csv:1",
                    format!("expected header `xi,w`, found {other:?}"),
                ))
            }
        }
        let mut xi = Vec::new();
        let mut w = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |field: Option<&str>| -> Result<f64> {
                field
                    .and_then(|f| f.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::config(format!("csv:{}", i + 2), "malformed row"))
            };
            let mut fields = line.split(',');
            xi.push(parse(fields.next())?);
            w.push(parse(fields.next())?);
        }
        Self::new(xi, w)
    }
}

/// Discrete analogues of the integrability conditions on `mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    /// `sum w_k / (1 + xi_k)`, finite for any bank.
    pub sum_wellposed: f64,
    /// `sum w_k / xi_k`; the extended case needs the continuum version to diverge.
    pub sum_inv_xi: f64,
}

/// Shape of a diffusive measure before discretization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiffusiveDescriptor {
    /// Density `sin(alpha pi)/pi * xi^-alpha`; standard transform `s^-alpha`,
    /// extended transform `s^(1-alpha)`.
    Fractional { alpha: f64 },
    /// Piecewise-linear density through `(xi, density)` samples, zero outside.
    Tabulated { xi: Vec<f64>, density: Vec<f64> },
    /// Already a pole bank.
    Discrete { measure: DiscreteMeasure },
}

pub fn fractional_density(alpha: f64) -> Result<DiffusiveDescriptor> {
    check_alpha(alpha)?;
    Ok(DiffusiveDescriptor::Fractional { alpha })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} is not in (0, 1)")))
    }
}

impl DiffusiveDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            DiffusiveDescriptor::Fractional { alpha } => check_alpha(*alpha),
            DiffusiveDescriptor::Tabulated { xi, density } => {
                if xi.len() != density.len() || xi.len() < 2 {
                    return Err(Error::param(
                        "density",
                        "tabulated density needs at least two (xi, density) pairs of equal length",
                    ));
                }
                if xi[0] < 0.0 || xi.windows(2).any(|p| p[0] >= p[1]) {
                    return Err(Error::param(
                        "xi",
                        "tabulated abscissae must be nonnegative and strictly increasing",
                    ));
                }
                if density.iter().any(|d| !(*d >= 0.0)) {
                    return Err(Error::param(
                        "density",
                        "tabulated density must be nonnegative",
                    ));
                }
                Ok(())
            }
            DiffusiveDescriptor::Discrete { measure } => measure.validate(),
        }
    }

    /// Density of `mu` with respect to `dxi`. Discrete measures have none.
    pub fn density(&self, xi: f64) -> Option<f64> {
        match self {
            DiffusiveDescriptor::Fractional { alpha } => {
                Some((alpha * PI).sin() / PI * xi.powf(-alpha))
            }
            DiffusiveDescriptor::Tabulated { xi: xs, density } => {
                Some(piecewise_linear(xs, density, xi))
            }
            DiffusiveDescriptor::Discrete { .. } => None,
        }
    }

    /// Closed-form transforms where they exist (principal branch of `s^a`).
    pub fn analytic_standard(&self, s: Complex64) -> Option<Complex64> {
        match self {
            DiffusiveDescriptor::Fractional { alpha } => Some(s.powf(-alpha)),
            _ => None,
        }
    }

    pub fn analytic_extended(&self, s: Complex64) -> Option<Complex64> {
        match self {
            DiffusiveDescriptor::Fractional { alpha } => Some(s.powf(1.0 - alpha)),
            _ => None,
        }
    }

    /// True when the standard transform blows up at `s = 0`.
    pub fn singular_at_origin(&self) -> bool {
        matches!(self, DiffusiveDescriptor::Fractional { .. })
    }

    /// Geometric node placement on `[xi_min, xi_max]` with log-midpoint
    /// weights. The mass below the first cell and the `1/xi`-weighted mass
    /// above the last cell are lumped into the end nodes.
    pub fn discretize(&self, quad: &Quadrature) -> Result<DiscreteMeasure> {
        self.validate()?;
        let Quadrature {
            nodes: n,
            xi_min,
            xi_max,
        } = *quad;
        if let DiffusiveDescriptor::Discrete { measure } = self {
            return Ok(measure.clone());
        }
        if n == 0 {
            return Err(Error::param("nodes", "N must be at least 1"));
        }
        if !(xi_min > 0.0 && xi_max.is_finite()) {
            return Err(Error::param(
                "xi_min",
                format!("bounds [{xi_min}, {xi_max}] must be positive and finite"),
            ));
        }
        if n == 1 || xi_min == xi_max {
            // Single pole: all the mass it can represent, lumped at xi_min.
            if n != 1 || xi_min != xi_max {
                return Err(Error::param(
                    "xi_max",
                    "xi_min < xi_max is required when N > 1, and N = 1 requires xi_min = xi_max",
                ));
            }
            let x = xi_min;
            let w = self.lower_mass(x) + x * self.upper_inv_mass(x);
            return DiscreteMeasure::new(vec![x], vec![w]);
        }
        if xi_min >= xi_max {
            return Err(Error::param("xi_max", "xi_min must be < xi_max"));
        }
        let log_step = (xi_max / xi_min).ln() / (n - 1) as f64;
        let half = (0.5 * log_step).exp();
        let xi: Vec<f64> = (0..n)
            .map(|k| xi_min * (k as f64 * log_step).exp())
            .collect();
        let mut w: Vec<f64> = xi
            .iter()
            .map(|&x| self.density(x).unwrap_or(0.0) * x * log_step)
            .collect();
        w[0] += self.lower_mass(xi[0] / half);
        w[n - 1] += xi[n - 1] * self.upper_inv_mass(xi[n - 1] * half);

        // Tabulated densities may vanish on part of the support.
        let (xi, w): (Vec<f64>, Vec<f64>) = xi.into_iter().zip(w).filter(|(_, w)| *w > 0.0).unzip();
        DiscreteMeasure::new(xi, w)
    }

    /// `mu((0, a))`.
    fn lower_mass(&self, a: f64) -> f64 {
        match self {
            DiffusiveDescriptor::Fractional { alpha } => {
                (alpha * PI).sin() / PI * a.powf(1.0 - alpha) / (1.0 - alpha)
            }
            DiffusiveDescriptor::Tabulated { xi, density } => {
                integrate_pl(xi, density, 0.0, a, false)
            }
            DiffusiveDescriptor::Discrete { .. } => 0.0,
        }
    }

    /// `int_b^inf dmu(xi) / xi`.
    fn upper_inv_mass(&self, b: f64) -> f64 {
        match self {
            DiffusiveDescriptor::Fractional { alpha } => {
                (alpha * PI).sin() / PI * b.powf(-alpha) / alpha
            }
            DiffusiveDescriptor::Tabulated { xi, density } => {
                integrate_pl(xi, density, b, f64::INFINITY, true)
            }
            DiffusiveDescriptor::Discrete { .. } => 0.0,
        }
    }
}

/// Node count and support used to turn a descriptor into a bank.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quadrature {
    pub nodes: usize,
    pub xi_min: f64,
    pub xi_max: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            nodes: 100,
            xi_min: 1e-6,
            xi_max: 1e6,
        }
    }
}

pub fn discretize(
    desc: &DiffusiveDescriptor,
    nodes: usize,
    xi_min: f64,
    xi_max: f64,
) -> Result<DiscreteMeasure> {
    desc.discretize(&Quadrature {
        nodes,
        xi_min,
        xi_max,
    })
}

/// `sum w/xi` for a sequence of refinements; the extended-diffusive
/// condition `int dmu/xi = inf` shows up as unbounded growth.
pub fn inv_xi_growth(
    desc: &DiffusiveDescriptor,
    levels: &[Quadrature],
) -> Result<(Vec<f64>, bool)> {
    let sums = levels
        .iter()
        .map(|q| Ok(desc.discretize(q)?.integrability_report().sum_inv_xi))
        .collect::<Result<Vec<_>>>()?;
    let grows = sums.windows(2).all(|p| p[1] > p[0]);
    Ok((sums, grows))
}

fn check_half_plane(s: Complex64) -> Result<()> {
    if s.re < 0.0 || !s.re.is_finite() || !s.im.is_finite() {
        Err(Error::LeftHalfPlane { s })
    } else {
        Ok(())
    }
}

fn piecewise_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}

/// Exact integral of a piecewise-linear density over `[lo, hi]`, optionally
/// weighted by `1/xi`.
fn integrate_pl(xs: &[f64], ys: &[f64], lo: f64, hi: f64, inv_xi: bool) -> f64 {
    let mut total = 0.0;
    for j in 1..xs.len() {
        let a = xs[j - 1].max(lo);
        let b = xs[j].min(hi);
        if b <= a {
            continue;
        }
        let slope = (ys[j] - ys[j - 1]) / (xs[j] - xs[j - 1]);
        let intercept = ys[j - 1] - slope * xs[j - 1];
        total += if inv_xi {
            if a == 0.0 && intercept != 0.0 {
                return f64::INFINITY;
            }
            let log_part = if intercept == 0.0 {
                0.0
            } else {
                intercept * (b / a).ln()
            };
            log_part + slope * (b - a)
        } else {
            intercept * (b - a) + 0.5 * slope * (b * b - a * a)
        };
    }
    total
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
