//! 1D first-order wave system `u_t + p_x = 0`, `p_t + u_x = 0` on `(0, L)`
//! coupled to impedance boundary realizations.
//!
//! Layout: `p` at the `n` cell centers, `u` at the `n + 1` faces. Boundary
//! faces carry half-cell mass, which makes the centered difference pair a
//! summation-by-parts operator:
//!
//! ```text
//! dE/dt = -sum_{x in {0, L}} (u.n)(x) p_b(x)
//! ```
//!
//! One step is the implicit midpoint rule on the monolithic system (wave,
//! delay lines, diffusive banks, derivative state) with the IBC imposed at the
//! time midpoint. Every realization state is affine in the midpoint normal
//! velocity, so it is eliminated exactly and the remaining system is
//! tridiagonal in the interleaved ordering `u_0, p_0, u_1, ..., p_{n-1}, u_n`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::Tridiagonal;
use crate::realizations::{delay_cells, BankMode, DelayLine, DerivativeState, DiffusiveBank};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub length: f64,
    pub cells: usize,
}

impl Grid1D {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::param("length", format!("{length} must be > 0")));
        }
        if cells < 2 {
            return Err(Error::param("cells", "at least two cells are required"));
        }
        Ok(Grid1D { length, cells })
    }

    pub fn h(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        (0..self.cells).map(move |i| (i as f64 + 0.5) * h)
    }

    pub fn faces(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        (0..=self.cells).map(move |j| j as f64 * h)
    }

    /// Quadrature weight of face `j`.
    pub fn face_weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.cells {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    /// `sum p_i (D u)_i + sum u_j (G p)_j`, which must reduce to the boundary
    /// terms `u_n p_b(L) - u_0 p_b(0)` with `p_b` the supplied boundary values.
    pub fn sbp_defect(&self, u: &[f64], p: &[f64], pb_left: f64, pb_right: f64) -> f64 {
        let n = self.cells;
        let h = self.h();
        let mut total = 0.0;
        for i in 0..n {
            total += h * p[i] * (u[i + 1] - u[i]) / h;
        }
        for j in 0..=n {
            let left = if j == 0 { pb_left } else { p[j - 1] };
            let right = if j == n { pb_right } else { p[j] };
            total += u[j] * (right - left);
        }
        total - (u[n] * pb_right - u[0] * pb_left)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Outward normal.
    pub fn normal(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum BoundaryCondition {
    /// `p = 0`.
    Dirichlet,
    /// `u.n = 0`.
    Neumann,
    /// `p = z * (u.n)`.
    Impedance(KernelSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BCSpec {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BCSpec {
    pub fn new(left: BoundaryCondition, right: BoundaryCondition) -> Self {
        BCSpec { left, right }
    }

    pub fn get(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Realization memory attached to one impedance endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryState {
    pub side: Side,
    pub z0: f64,
    pub z_tau: f64,
    pub delay: Option<DelayLine>,
    pub standard: Option<DiffusiveBank>,
    pub extended: Option<DiffusiveBank>,
    pub derivative: Option<DerivativeState>,
}

impl BoundaryState {
    pub fn new(side: Side, kernel: &KernelSpec, dt: f64) -> Result<Self> {
        kernel.validate()?;
        if kernel.delayed_sqrt.is_some_and(|d| d.z_tau_d != 0.0) {
            return Err(Error::Unsupported(
                "the delayed sqrt kernel has no known Lyapunov functional; it is available for Laplace-domain checks only".into(),
            ));
        }
        let (z0, z_tau, delay) = if kernel.has_delay() {
            let line = DelayLine::for_step(kernel.tau, dt, kernel.delay_weight())?;
            (kernel.z0, kernel.z_tau, Some(line))
        } else {
            // A zero delay is just a proportional term.
            (kernel.z0 + kernel.z_tau, 0.0, None)
        };
        let bank = |desc: &Option<_>, mode| -> Result<Option<DiffusiveBank>> {
            desc.as_ref()
                .map(|d: &crate::measures::DiffusiveDescriptor| {
                    Ok(DiffusiveBank::new(mode, d.discretize(&kernel.quadrature)?))
                })
                .transpose()
        };
        Ok(BoundaryState {
            side,
            z0,
            z_tau,
            delay,
            standard: bank(&kernel.standard, BankMode::Standard)?,
            extended: bank(&kernel.extended, BankMode::Extended)?,
            derivative: (kernel.z1 > 0.0).then(|| DerivativeState::new(kernel.z1)),
        })
    }

    fn z1(&self) -> f64 {
        self.derivative.map_or(0.0, |d| d.z1)
    }

    /// Midpoint boundary pressure as `gain * w_mid + offset`, where `w` is
    /// the outward normal velocity and `w_old` its value at the step start.
    fn midpoint_law(&self, dt: f64, w_old: f64) -> (f64, f64) {
        let mut gain = self.z0 + 2.0 * self.z1() / dt;
        let mut offset = -2.0 * self.z1() * w_old / dt;
        if let Some(line) = &self.delay {
            offset += self.z_tau * line.peek_out();
        }
        for bank in self.standard.iter().chain(self.extended.iter()) {
            let (g, o) = bank.midpoint_response(dt);
            gain += g;
            offset += o;
        }
        (gain, offset)
    }

    /// Advance the memory with the midpoint input and return the closed-form
    /// dissipation rate over the step (nonpositive for admissible configs).
    fn advance(&mut self, dt: f64, w_mid: f64, w_new: f64) -> f64 {
        let mut rate = -self.z0 * w_mid * w_mid;
        if let Some(line) = &mut self.delay {
            let k = line.k();
            let out = line.step(w_mid).out;
            rate += 0.5 * k * w_mid * w_mid - self.z_tau * w_mid * out - 0.5 * k * out * out;
        }
        for bank in [&mut self.standard, &mut self.extended]
            .into_iter()
            .flatten()
        {
            let half = bank.midpoint_state(w_mid, dt);
            rate += bank.dissipation_at(&half, w_mid);
            bank.step(w_mid, dt);
        }
        if let Some(d) = &mut self.derivative {
            d.eta = w_new;
        }
        rate
    }

    pub fn delay_energy(&self) -> f64 {
        self.delay.as_ref().map_or(0.0, DelayLine::energy)
    }

    pub fn diffusive_energy(&self) -> f64 {
        self.standard
            .iter()
            .chain(self.extended.iter())
            .map(DiffusiveBank::energy)
            .sum()
    }

    pub fn eta_energy(&self) -> f64 {
        self.derivative.map_or(0.0, |d| d.energy())
    }

    pub fn realization_dim(&self) -> usize {
        self.delay.as_ref().map_or(0, DelayLine::len)
            + self.standard.as_ref().map_or(0, |b| b.state().len())
            + self.extended.as_ref().map_or(0, |b| b.state().len())
            + usize::from(self.derivative.is_some())
    }
}

/// Pressure source `profile(x) cos(omega t)` added to the `p` equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSource {
    pub omega: f64,
    /// One value per cell.
    pub profile: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub wave: f64,
    pub delay: f64,
    pub diffusive: f64,
    pub eta: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub grid: Grid1D,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
    pub boundaries: Vec<BoundaryState>,
    pub neumann: [bool; 2],
    pub source: Option<HarmonicSource>,
}

/// Midpoint diagnostics of the last step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepInfo {
    /// Closed-form rate `D` such that `E^{n+1} - E^n = dt D`.
    pub dissipation: f64,
    /// Outward normal velocity at the probe endpoint (midpoint value).
    pub un: f64,
    /// Boundary pressure at the probe endpoint (midpoint value).
    pub p_boundary: f64,
}

impl WaveState {
    pub fn new(grid: Grid1D, bc: &BCSpec, dt: f64) -> Result<Self> {
        let mut boundaries = Vec::new();
        for side in [Side::Left, Side::Right] {
            if let BoundaryCondition::Impedance(k) = bc.get(side) {
                boundaries.push(BoundaryState::new(side, k, dt)?);
            }
        }
        Ok(WaveState {
            grid,
            u: vec![0.0; grid.cells + 1],
            p: vec![0.0; grid.cells],
            t: 0.0,
            boundaries,
            neumann: [
                matches!(bc.left, BoundaryCondition::Neumann),
                matches!(bc.right, BoundaryCondition::Neumann),
            ],
            source: None,
        })
    }

    pub fn with_fields(mut self, u: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if u.len() != self.grid.cells + 1 || p.len() != self.grid.cells {
            return Err(Error::param(
                "fields",
                "u needs n+1 face values and p needs n cell values",
            ));
        }
        self.u = u;
        self.p = p;
        self.enforce_neumann();
        self.sync_eta();
        Ok(self)
    }

    pub fn with_source(mut self, source: HarmonicSource) -> Result<Self> {
        if source.profile.len() != self.grid.cells {
            return Err(Error::param("source", "profile needs one value per cell"));
        }
        self.source = Some(source);
        Ok(self)
    }

    fn enforce_neumann(&mut self) {
        let n = self.grid.cells;
        if self.neumann[0] {
            self.u[0] = 0.0;
        }
        if self.neumann[1] {
            self.u[n] = 0.0;
        }
    }

    fn sync_eta(&mut self) {
        let n = self.grid.cells;
        let (u0, un) = (self.u[0], self.u[n]);
        for b in &mut self.boundaries {
            let w = match b.side {
                Side::Left => -u0,
                Side::Right => un,
            };
            if let Some(d) = &mut b.derivative {
                d.eta = w;
            }
        }
    }

    /// Outward normal velocity at `side`.
    pub fn normal_velocity(&self, side: Side) -> f64 {
        match side {
            Side::Left => -self.u[0],
            Side::Right => self.u[self.grid.cells],
        }
    }

    pub fn boundary(&self, side: Side) -> Option<&BoundaryState> {
        self.boundaries.iter().find(|b| b.side == side)
    }

    pub fn energy(&self) -> EnergyBreakdown {
        let g = &self.grid;
        let h = g.h();
        let wave = 0.5
            * (self.p.iter().map(|p| h * p * p).sum::<f64>()
                + self
                    .u
                    .iter()
                    .enumerate()
                    .map(|(j, u)| g.face_weight(j) * u * u)
                    .sum::<f64>());
        let delay: f64 = self
            .boundaries
            .iter()
            .map(BoundaryState::delay_energy)
            .sum();
        let diffusive: f64 = self
            .boundaries
            .iter()
            .map(BoundaryState::diffusive_energy)
            .sum();
        let eta: f64 = self.boundaries.iter().map(BoundaryState::eta_energy).sum();
        EnergyBreakdown {
            wave,
            delay,
            diffusive,
            eta,
            total: wave + delay + diffusive + eta,
        }
    }

    /// Endpoint whose traces are reported: the first impedance endpoint,
    /// preferring the right one.
    pub fn probe_side(&self) -> Side {
        if self.boundary(Side::Right).is_some() || self.boundary(Side::Left).is_none() {
            Side::Right
        } else {
            Side::Left
        }
    }

    /// One implicit-midpoint step of the coupled system.
    pub fn step(&mut self, dt: f64) -> Result<StepInfo> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", format!("{dt} must be > 0")));
        }
        for b in &self.boundaries {
            if let Some(line) = &b.delay {
                if (line.dtheta() - dt).abs() > 1e-9 * dt {
                    return Err(Error::DelayAlignment {
                        tau: line.tau(),
                        dt,
                    });
                }
            }
        }
        let n = self.grid.cells;
        let h = self.grid.h();
        let size = 2 * n + 1;
        let mut mat = Tridiagonal::<f64>::zeros(size);
        let mut rhs = vec![0.0; size];
        let c = 2.0 * h / dt;
        let t_mid = self.t + 0.5 * dt;

        for i in 0..n {
            let r = 2 * i + 1;
            mat.diag[r] = c;
            mat.lower[r - 1] = -1.0; // u_i
            mat.upper[r] = 1.0; // u_{i+1}
            rhs[r] = c * self.p[i];
            if let Some(src) = &self.source {
                rhs[r] += h * src.profile[i] * (src.omega * t_mid).cos();
            }
        }
        for j in 1..n {
            let r = 2 * j;
            mat.diag[r] = c;
            mat.lower[r - 1] = -1.0; // p_{j-1}
            mat.upper[r] = 1.0; // p_j
            rhs[r] = c * self.u[j];
        }

        let mut laws = [(0.0, 0.0); 2];
        for b in &self.boundaries {
            let w_old = self.normal_velocity(b.side);
            laws[b.side as usize] = b.midpoint_law(dt, w_old);
        }
        // Left face: (h/dt + a) u_0 + p_0 = (h/dt) u_0^n + b.
        if self.neumann[0] {
            mat.diag[0] = 1.0;
            mat.upper[0] = 0.0;
            rhs[0] = 0.0;
        } else {
            let (a, b) = laws[0];
            mat.diag[0] = h / dt + a;
            mat.upper[0] = 1.0;
            rhs[0] = h / dt * self.u[0] + b;
        }
        // Right face: (h/dt + a) u_n - p_{n-1} = (h/dt) u_n^n - b.
        let r = 2 * n;
        if self.neumann[1] {
            mat.diag[r] = 1.0;
            mat.lower[r - 1] = 0.0;
            rhs[r] = 0.0;
        } else {
            let (a, b) = laws[1];
            mat.diag[r] = h / dt + a;
            mat.lower[r - 1] = -1.0;
            rhs[r] = h / dt * self.u[n] - b;
        }

        let mid = mat.factor()?.solve(&rhs);

        let mut source_work = 0.0;
        if let Some(src) = &self.source {
            let phase = (src.omega * t_mid).cos();
            source_work = (0..n)
                .map(|i| h * src.profile[i] * phase * mid[2 * i + 1])
                .sum();
        }
        for j in 0..=n {
            self.u[j] = 2.0 * mid[2 * j] - self.u[j];
        }
        for i in 0..n {
            self.p[i] = 2.0 * mid[2 * i + 1] - self.p[i];
        }
        self.enforce_neumann();

        let probe = self.probe_side();
        let mut info = StepInfo {
            dissipation: source_work,
            ..Default::default()
        };
        let (u0_mid, un_mid) = (mid[0], mid[2 * n]);
        let (u0_new, un_new) = (self.u[0], self.u[n]);
        for (side, w_mid, w_new) in [
            (Side::Left, -u0_mid, -u0_new),
            (Side::Right, un_mid, un_new),
        ] {
            let idx = side as usize;
            let p_b = match self.boundaries.iter_mut().find(|b| b.side == side) {
                Some(b) => {
                    info.dissipation += b.advance(dt, w_mid, w_new);
                    laws[idx].0 * w_mid + laws[idx].1
                }
                None if self.neumann[idx] => match side {
                    Side::Left => mid[1],
                    Side::Right => mid[2 * n - 1],
                },
                None => 0.0,
            };
            if side == probe {
                info.un = w_mid;
                info.p_boundary = p_b;
            }
        }
        self.t += dt;
        Ok(info)
    }
}

pub fn step(state: &mut WaveState, dt: f64) -> Result<StepInfo> {
    state.step(dt)
}

pub fn energy(state: &WaveState) -> EnergyBreakdown {
    state.energy()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Zero,
    Constant {
        #[serde(default)]
        u: f64,
        #[serde(default)]
        p: f64,
    },
    /// Gaussian `exp(-((x - center)/width)^2)`; `direction` +1 travels right
    /// (`u = p`), -1 left (`u = -p`), 0 is a pressure bump at rest.
    Pulse {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        direction: f64,
    },
    /// Random low-mode Fourier data drawn from the run seed.
    RandomSmooth {
        #[serde(default = "default_modes")]
        modes: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn default_modes() -> usize {
    6
}

impl InitialCondition {
    pub fn fields(&self, grid: &Grid1D, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let faces: Vec<f64> = grid.faces().collect();
        let centers: Vec<f64> = grid.centers().collect();
        match *self {
            InitialCondition::Zero => (vec![0.0; faces.len()], vec![0.0; centers.len()]),
            InitialCondition::Constant { u, p } => (vec![u; faces.len()], vec![p; centers.len()]),
            InitialCondition::Pulse {
                center,
                width,
                direction,
            } => {
                let f = |x: f64| (-((x - center) / width).powi(2)).exp();
                (
                    faces.iter().map(|&x| direction * f(x)).collect(),
                    centers.iter().map(|&x| f(x)).collect(),
                )
            }
            InitialCondition::RandomSmooth { modes } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let l = grid.length;
                let mut coef = |m: usize| -> (f64, f64) {
                    let decay = 1.0 / (1.0 + m as f64);
                    (
                        rng.gen_range(-1.0..1.0) * decay,
                        rng.gen_range(-1.0..1.0) * decay,
                    )
                };
                let cu: Vec<(f64, f64)> = (1..=modes).map(&mut coef).collect();
                let cp: Vec<(f64, f64)> = (0..=modes).map(&mut coef).collect();
                let eval = |cs: &[(f64, f64)], first: usize, x: f64| -> f64 {
                    cs.iter()
                        .enumerate()
                        .map(|(i, (a, b))| {
                            let k = (first + i) as f64 * PI / l;
                            a * (k * x).cos() + b * (k * x).sin()
                        })
                        .sum()
                };
                (
                    faces.iter().map(|&x| eval(&cu, 1, x)).collect(),
                    centers.iter().map(|&x| eval(&cp, 0, x)).collect(),
                )
            }
        }
    }
}

/// Everything needed to advance a simulation to its final time.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub grid: Grid1D,
    pub bc: BCSpec,
    pub dt: f64,
    pub t_final: f64,
    pub initial: InitialCondition,
    pub seed: u64,
    pub source: Option<HarmonicSource>,
}

impl Simulation {
    /// `tau / M` when a delay is present, otherwise `h / 2`.
    pub fn default_dt(grid: &Grid1D, bc: &BCSpec) -> f64 {
        let base = 0.5 * grid.h();
        let taus = [&bc.left, &bc.right].into_iter().filter_map(|b| match b {
            BoundaryCondition::Impedance(k) if k.has_delay() => Some(k.tau),
            _ => None,
        });
        let mut dt = base;
        for tau in taus {
            let m = (tau / base).ceil().max(1.0);
            dt = dt.min(tau / m);
        }
        dt
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_final >= 0.0) {
            return Err(Error::param("dt", "dt must be > 0 and t_final >= 0"));
        }
        for b in [&self.bc.left, &self.bc.right] {
            if let BoundaryCondition::Impedance(k) = b {
                k.validate()?;
                if k.has_delay() {
                    delay_cells(k.tau, self.dt)?;
                }
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<WaveState> {
        let (u, p) = self.initial.fields(&self.grid, self.seed);
        let state = WaveState::new(self.grid, &self.bc, self.dt)?.with_fields(u, p)?;
        match &self.source {
            Some(src) => state.with_source(src.clone()),
            None => Ok(state),
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn run(&self) -> Result<TimeSeriesReport> {
        self.validate()?;
        let mut state = self.initial_state()?;
        let steps = self.steps();
        let e0 = state.energy();
        let probe = state.probe_side();
        let mut rows = Vec::with_capacity(steps + 1);
        rows.push(TimeSeriesRow {
            t: 0.0,
            energy: e0,
            un: state.normal_velocity(probe),
            p_boundary: f64::NAN,
        });
        let mut report = TimeSeriesReport {
            dt: self.dt,
            steps,
            e0: e0.total,
            max_energy_increase: f64::NEG_INFINITY,
            max_identity_residual: 0.0,
            cumulative_dissipation: 0.0,
            rows: Vec::new(),
        };
        let mut prev = e0.total;
        for _ in 0..steps {
            let info = state.step(self.dt)?;
            let e = state.energy();
            let delta = e.total - prev;
            report.max_energy_increase = report.max_energy_increase.max(delta);
            report.max_identity_residual = report
                .max_identity_residual
                .max((delta - self.dt * info.dissipation).abs());
            report.cumulative_dissipation += self.dt * info.dissipation;
            prev = e.total;
            rows.push(TimeSeriesRow {
                t: state.t,
                energy: e,
                un: info.un,
                p_boundary: info.p_boundary,
            });
        }
        if steps == 0 {
            report.max_energy_increase = 0.0;
        }
        report.rows = rows;
        Ok(report)
    }
}

pub fn run(sim: &Simulation) -> Result<TimeSeriesReport> {
    sim.run()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRow {
    pub t: f64,
    pub energy: EnergyBreakdown,
    /// Step-midpoint outward normal velocity at the probe endpoint.
    pub un: f64,
    /// Step-midpoint boundary pressure (NaN on the initial row).
    pub p_boundary: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesReport {
    pub dt: f64,
    pub steps: usize,
    pub e0: f64,
    pub max_energy_increase: f64,
    /// `max_n |E^{n+1} - E^n - dt D^{n+1/2}|`.
    pub max_identity_residual: f64,
    /// `sum_n dt D^{n+1/2}`.
    pub cumulative_dissipation: f64,
    #[serde(skip)]
    pub rows: Vec<TimeSeriesRow>,
}

impl TimeSeriesReport {
    pub fn final_energy(&self) -> f64 {
        self.rows.last().map_or(self.e0, |r| r.energy.total)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.max_energy_increase <= tol
    }
}
