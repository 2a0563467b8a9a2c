//! Time-domain state machines realizing each IBC family.
//!
//! All updates are written for a step of length `dt` whose input is the
//! midpoint value `u^{n+1/2}`, so every energy balance below is an exact
//! discrete identity rather than an approximation.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{fmt_f64, DiscreteMeasure};

/// Number of delay cells `M` with `M dt = tau`; fails if `tau / dt` is not
/// an integer (relative tolerance 1e-9).
pub fn delay_cells(tau: f64, dt: f64) -> Result<usize> {
    if !(tau > 0.0 && dt > 0.0) {
        return Err(Error::DelayAlignment { tau, dt });
    }
    let m = (tau / dt).round();
    if m < 1.0 || (m * dt - tau).abs() > 1e-9 * tau {
        return Err(Error::DelayAlignment { tau, dt });
    }
    Ok(m as usize)
}

/// Exact-shift transport line for `chi_t = chi_theta` on `(-tau, 0)`.
///
/// Cell `j` holds the inflow received `j` steps ago, i.e. `chi` at
/// `theta = -(j + 1/2) dtheta` when the inflow is a midpoint value.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayLine {
    dtheta: f64,
    k: f64,
    cells: VecDeque<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayStep {
    /// `chi(-tau)` leaving the line during this step.
    pub out: f64,
    /// Change of the stored energy `(k/2) dtheta sum chi_j^2`.
    pub energy_delta: f64,
}

impl DelayLine {
    pub fn new(tau: f64, cells: usize, k: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::param(
                "cells",
                "a delay line needs at least one cell",
            ));
        }
        if !(tau > 0.0) {
            return Err(Error::param("tau", format!("{tau} must be > 0")));
        }
        if !(k > 0.0) {
            return Err(Error::param("k", format!("energy weight {k} must be > 0")));
        }
        Ok(DelayLine {
            dtheta: tau / cells as f64,
            k,
            cells: std::iter::repeat_n(0.0, cells).collect(),
        })
    }

    /// Line aligned with a simulation step `dt`.
    pub fn for_step(tau: f64, dt: f64, k: f64) -> Result<Self> {
        Self::new(tau, delay_cells(tau, dt)?, k)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn tau(&self) -> f64 {
        self.dtheta * self.cells.len() as f64
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Value that the next step will emit.
    pub fn peek_out(&self) -> f64 {
        *self.cells.back().expect("delay line is never empty")
    }

    pub fn step(&mut self, u_in: f64) -> DelayStep {
        let out = self.cells.pop_back().expect("delay line is never empty");
        self.cells.push_front(u_in);
        DelayStep {
            out,
            energy_delta: 0.5 * self.k * self.dtheta * (u_in * u_in - out * out),
        }
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.k * self.dtheta * self.cells.iter().map(|c| c * c).sum::<f64>()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().copied()
    }

    /// `(theta_j, chi_j)` pairs at cell centers.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(j, &v)| (-(j as f64 + 0.5) * self.dtheta, v))
    }
}

pub fn delay_step(line: &mut DelayLine, u_in: f64) -> DelayStep {
    line.step(u_in)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BankMode {
    /// Output `sum w phi`, energy weight `w`.
    Standard,
    /// Output `sum w (-xi phi + u)`, energy weight `w xi`.
    Extended,
}

impl BankMode {
    fn name(self) -> &'static str {
        match self {
            BankMode::Standard => "standard",
            BankMode::Extended => "extended",
        }
    }
}

/// Bank of first-order relaxations `phi_k' = -xi_k phi_k + u`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusiveBank {
    mode: BankMode,
    measure: DiscreteMeasure,
    phi: Vec<f64>,
}

impl DiffusiveBank {
    pub fn new(mode: BankMode, measure: DiscreteMeasure) -> Self {
        let phi = vec![0.0; measure.len()];
        DiffusiveBank { mode, measure, phi }
    }

    pub fn mode(&self) -> BankMode {
        self.mode
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn state(&self) -> &[f64] {
        &self.phi
    }

    pub fn set_state(&mut self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.phi.len() {
            return Err(Error::param("phi", "state length does not match the bank"));
        }
        self.phi.copy_from_slice(phi);
        Ok(())
    }

    /// Initialization `phi(0, xi) = u0 / xi`, which turns the extended
    /// fractional realization into a Caputo-type derivative.
    pub fn init_caputo(&mut self, u0: f64) {
        for (p, x) in self.phi.iter_mut().zip(self.measure.nodes()) {
            *p = u0 / x;
        }
    }

    /// Implicit-midpoint step driven by the midpoint input `u_mid`.
    pub fn step(&mut self, u_mid: f64, dt: f64) {
        for (p, &x) in self.phi.iter_mut().zip(self.measure.nodes()) {
            let h = 0.5 * x * dt;
            *p = ((1.0 - h) * *p + dt * u_mid) / (1.0 + h);
        }
    }

    /// Midpoint state `phi^{n+1/2}` the next step would use for input `u_mid`.
    pub fn midpoint_state(&self, u_mid: f64, dt: f64) -> Vec<f64> {
        self.phi
            .iter()
            .zip(self.measure.nodes())
            .map(|(&p, &x)| (p + 0.5 * dt * u_mid) / (1.0 + 0.5 * x * dt))
            .collect()
    }

    /// Output at the midpoint of the next step as `gain * u_mid + offset`.
    pub fn midpoint_response(&self, dt: f64) -> (f64, f64) {
        let mut gain = 0.0;
        let mut offset = 0.0;
        for ((&p, &x), &w) in self
            .phi
            .iter()
            .zip(self.measure.nodes())
            .zip(self.measure.weights())
        {
            let den = 1.0 + 0.5 * x * dt;
            match self.mode {
                BankMode::Standard => {
                    gain += w * 0.5 * dt / den;
                    offset += w * p / den;
                }
                BankMode::Extended => {
                    // -xi (p + dt u/2)/den + u = (u - xi p)/den
                    gain += w / den;
                    offset -= w * x * p / den;
                }
            }
        }
        (gain, offset)
    }

    pub fn output_standard(&self) -> Result<f64> {
        self.require(BankMode::Standard)?;
        Ok(standard_output(&self.measure, &self.phi))
    }

    pub fn output_extended(&self, u: f64) -> Result<f64> {
        self.require(BankMode::Extended)?;
        Ok(extended_output(&self.measure, &self.phi, u))
    }

    /// Output for whichever mode the bank has, evaluated at state `phi`.
    pub fn output_at(&self, phi: &[f64], u: f64) -> f64 {
        match self.mode {
            BankMode::Standard => standard_output(&self.measure, phi),
            BankMode::Extended => extended_output(&self.measure, phi, u),
        }
    }

    fn require(&self, mode: BankMode) -> Result<()> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                expected: mode.name(),
                found: self.mode.name(),
            })
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy_of(&self.phi)
    }

    pub fn energy_of(&self, phi: &[f64]) -> f64 {
        0.5 * self
            .measure
            .iter()
            .zip(phi)
            .map(|((x, w), p)| match self.mode {
                BankMode::Standard => w * p * p,
                BankMode::Extended => w * x * p * p,
            })
            .sum::<f64>()
    }

    /// Right-hand side of the passivity identity at the current state.
    pub fn dissipation_residual(&self, u: f64) -> f64 {
        self.dissipation_at(&self.phi, u)
    }

    pub fn dissipation_at(&self, phi: &[f64], u: f64) -> f64 {
        -self
            .measure
            .iter()
            .zip(phi)
            .map(|((x, w), p)| match self.mode {
                BankMode::Standard => w * x * p * p,
                BankMode::Extended => {
                    let r = -x * p + u;
                    w * r * r
                }
            })
            .sum::<f64>()
    }

    /// Left-hand side `(A phi + B u, phi)_{V0} - u C phi`, computed from the
    /// state equation rather than the closed form.
    pub fn passivity_lhs(&self, u: f64) -> f64 {
        let weight = |x: f64, w: f64| match self.mode {
            BankMode::Standard => w,
            BankMode::Extended => w * x,
        };
        let rate: f64 = self
            .measure
            .iter()
            .zip(&self.phi)
            .map(|((x, w), p)| weight(x, w) * (-x * p + u) * p)
            .sum();
        rate - u * self.output_at(&self.phi, u)
    }

    /// CSV rows `node,xi_or_theta,value` for this bank at boundary `node`.
    pub fn snapshot_rows(&self, node: usize, out: &mut String) {
        for (x, p) in self.measure.nodes().iter().zip(&self.phi) {
            let _ = writeln!(out, "{node},{},{}", fmt_f64(*x), fmt_f64(*p));
        }
    }
}

fn standard_output(m: &DiscreteMeasure, phi: &[f64]) -> f64 {
    m.weights().iter().zip(phi).map(|(w, p)| w * p).sum()
}

fn extended_output(m: &DiscreteMeasure, phi: &[f64], u: f64) -> f64 {
    m.iter().zip(phi).map(|((x, w), p)| w * (-x * p + u)).sum()
}

pub fn diffusive_step(bank: &mut DiffusiveBank, u_mid: f64, dt: f64) {
    bank.step(u_mid, dt)
}

/// Auxiliary state `eta = u.n` carrying the derivative term `z1 s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeState {
    pub z1: f64,
    pub eta: f64,
}

impl DerivativeState {
    pub fn new(z1: f64) -> Self {
        DerivativeState { z1, eta: 0.0 }
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.z1 * self.eta * self.eta
    }
}

/// Closed interval of delay-line weights `k` making the transport
/// realization dissipative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRange {
    pub lo: f64,
    pub hi: f64,
    pub z0: f64,
    pub z_tau: f64,
}

pub fn admissible_k_range(z0: f64, z_tau: f64) -> Result<KRange> {
    if !(z0 >= z_tau.abs()) {
        return Err(Error::param(
            "z0",
            format!("admissible k range needs z0 >= |z_tau| (z0 = {z0}, z_tau = {z_tau})"),
        ));
    }
    let r = (z0 * z0 - z_tau * z_tau).sqrt();
    Ok(KRange {
        lo: z0 - r,
        hi: z0 + r,
        z0,
        z_tau,
    })
}

impl KRange {
    pub fn contains(&self, k: f64) -> bool {
        k >= self.lo && k <= self.hi
    }

    /// Quadratic form in `(chi(0), chi(-tau))` whose semidefiniteness is
    /// equivalent to dissipativity: `[[z0 - k/2, z_tau/2], [z_tau/2, k/2]]`.
    pub fn form(&self, k: f64) -> [[f64; 2]; 2] {
        psd_test_matrix(self.z0, self.z_tau, k)
    }
}

pub fn psd_test_matrix(z0: f64, z_tau: f64, k: f64) -> [[f64; 2]; 2] {
    [[z0 - 0.5 * k, 0.5 * z_tau], [0.5 * z_tau, 0.5 * k]]
}

/// Eigenvalues `(min, max)` and the unit eigenvector of `min` for a
/// symmetric 2x2 matrix.
pub fn sym2_eigen(m: [[f64; 2]; 2]) -> (f64, f64, [f64; 2]) {
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let lmin = mean - rad;
    let lmax = mean + rad;
    let v = if b != 0.0 {
        [b, lmin - a]
    } else if a <= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    (lmin, lmax, [v[0] / n, v[1] / n])
}

pub fn quadratic_form(m: [[f64; 2]; 2], v: [f64; 2]) -> f64 {
    m[0][0] * v[0] * v[0] + 2.0 * m[0][1] * v[0] * v[1] + m[1][1] * v[1] * v[1]
}
