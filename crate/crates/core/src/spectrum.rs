//! Semi-discrete generator of the coupled wave/IBC system and its spectral
//! diagnostics.
//!
//! The state is `[u faces (Neumann faces removed), p cells, per impedance
//! endpoint: delay cells, standard bank, extended bank]`. The derivative term
//! is folded into the boundary face mass, and the delay transport uses
//! first-order upwinding with inflow `chi_0 = u.n`.
//!
//! Dissipativity is measured in the energy inner product `(x, y)_W`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::measures::fmt_f64;
use crate::wavesim::{BCSpec, BoundaryCondition, Grid1D, Side};

/// Spectra with `|Re| < IMAG_AXIS_TOL` count as lying on the imaginary axis.
pub const IMAG_AXIS_TOL: f64 = 1e-8;

/// Largest dimension accepted by the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub grid: Grid1D,
    pub bc: BCSpec,
    /// Upwind cells per delay line; `None` uses `ceil(tau / (h/2))`.
    #[serde(default)]
    pub delay_cells: Option<usize>,
}

impl GeneratorConfig {
    pub fn new(grid: Grid1D, bc: BCSpec) -> Self {
        GeneratorConfig {
            grid,
            bc,
            delay_cells: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    pub g: DMatrix<f64>,
    /// Diagonal of the energy weight.
    pub w: DVector<f64>,
    /// Block sizes in state order: faces, cells, realization states.
    pub blocks: Vec<(String, usize)>,
}

impl GeneratorMatrix {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `W^{1/2} G W^{-1/2}`: similar to `G`, and its symmetric part carries
    /// the W-dissipativity.
    pub fn balanced(&self) -> DMatrix<f64> {
        let n = self.dim();
        let sw: Vec<f64> = self.w.iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(n, n, |i, j| self.g[(i, j)] * sw[i] / sw[j])
    }

    /// Symmetric part of the balanced generator.
    pub fn symmetric_part(&self) -> DMatrix<f64> {
        let s = self.balanced();
        (&s + s.transpose()) * 0.5
    }

    /// Append a decoupled zero row and column (unit weight).
    pub fn with_null_state(&self) -> Self {
        let n = self.dim();
        let mut g = DMatrix::zeros(n + 1, n + 1);
        g.view_mut((0, 0), (n, n)).copy_from(&self.g);
        let mut w = DVector::from_element(n + 1, 1.0);
        w.rows_mut(0, n).copy_from(&self.w);
        let mut blocks = self.blocks.clone();
        blocks.push(("null".into(), 1));
        GeneratorMatrix { g, w, blocks }
    }
}

struct Builder {
    g: Vec<(usize, usize, f64)>,
    w: Vec<f64>,
    blocks: Vec<(String, usize)>,
}

impl Builder {
    fn alloc(&mut self, name: String, weights: &[f64]) -> usize {
        let start = self.w.len();
        self.w.extend_from_slice(weights);
        self.blocks.push((name, weights.len()));
        start
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.g.push((i, j, v));
    }
}

pub fn assemble_generator(config: &GeneratorConfig) -> Result<GeneratorMatrix> {
    let grid = config.grid;
    let n = grid.cells;
    let h = grid.h();
    let bc_of = |side| config.bc.get(side);
    let kernel_of = |side| match bc_of(side) {
        BoundaryCondition::Impedance(k) => Some(k),
        _ => None,
    };
    for side in [Side::Left, Side::Right] {
        if let Some(k) = kernel_of(side) {
            check_kernel(k)?;
        }
    }

    let mut b = Builder {
        g: Vec::new(),
        w: Vec::new(),
        blocks: Vec::new(),
    };

    let neumann = |side| matches!(bc_of(side), BoundaryCondition::Neumann);
    let mut face_idx = vec![None; n + 1];
    let mut face_w = Vec::new();
    for (j, slot) in face_idx.iter_mut().enumerate() {
        let side = match j {
            0 => Some(Side::Left),
            _ if j == n => Some(Side::Right),
            _ => None,
        };
        if side.is_some_and(neumann) {
            continue;
        }
        let z1 = side.and_then(kernel_of).map_or(0.0, |k| k.z1);
        *slot = Some(face_w.len());
        face_w.push(grid.face_weight(j) + z1);
    }
    let f0 = b.alloc("u".into(), &face_w);
    let face = |j: usize| face_idx[j].map(|k| f0 + k);
    let p0 = b.alloc("p".into(), &vec![h; n]);

    for i in 0..n {
        if let Some(f) = face(i) {
            b.add(p0 + i, f, 1.0 / h);
        }
        if let Some(f) = face(i + 1) {
            b.add(p0 + i, f, -1.0 / h);
        }
    }
    for j in 1..n {
        let f = face(j).expect("interior faces are always active");
        b.add(f, p0 + j - 1, 1.0 / h);
        b.add(f, p0 + j, -1.0 / h);
    }

    for side in [Side::Left, Side::Right] {
        let j = if side == Side::Left { 0 } else { n };
        let Some(f) = face(j) else { continue };
        let sigma = side.normal();
        let m = b.w[f];
        let adj = p0 + if side == Side::Left { 0 } else { n - 1 };
        // m du/dt = sigma (p_adj - p_b)
        b.add(f, adj, sigma / m);
        let Some(k) = kernel_of(side) else { continue };
        let tag = match side {
            Side::Left => "left",
            Side::Right => "right",
        };
        let mut z0 = k.z0;
        if k.has_delay() {
            let cells = match config.delay_cells {
                Some(c) if c > 0 => c,
                Some(_) => return Err(Error::param("delay_cells", "must be positive")),
                None => (k.tau / (0.5 * h)).ceil().max(1.0) as usize,
            };
            let dth = k.tau / cells as f64;
            let kw = k.delay_weight();
            let c0 = b.alloc(format!("{tag}.delay"), &vec![kw * dth; cells]);
            b.add(c0, f, sigma / dth);
            for c in 0..cells {
                b.add(c0 + c, c0 + c, -1.0 / dth);
                if c > 0 {
                    b.add(c0 + c, c0 + c - 1, 1.0 / dth);
                }
            }
            b.add(f, c0 + cells - 1, -sigma * k.z_tau / m);
        } else {
            z0 += k.z_tau;
        }
        if let Some(desc) = &k.standard {
            let mu = desc.discretize(&k.quadrature)?;
            let s0 = b.alloc(format!("{tag}.standard"), mu.weights());
            for (q, (xi, wq)) in mu.iter().enumerate() {
                b.add(s0 + q, s0 + q, -xi);
                b.add(s0 + q, f, sigma);
                b.add(f, s0 + q, -sigma * wq / m);
            }
        }
        if let Some(desc) = &k.extended {
            let mu = desc.discretize(&k.quadrature)?;
            let weights: Vec<f64> = mu.iter().map(|(x, w)| w * x).collect();
            let e0 = b.alloc(format!("{tag}.extended"), &weights);
            for (q, (xi, wq)) in mu.iter().enumerate() {
                b.add(e0 + q, e0 + q, -xi);
                b.add(e0 + q, f, sigma);
                b.add(f, e0 + q, sigma * wq * xi / m);
                z0 += wq;
            }
        }
        b.add(f, f, -z0 / m);
    }

    if let Some(bad) = b.w.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::param(
            "energy weight",
            format!("entry {bad} is {}; weights must be positive", b.w[bad]),
        ));
    }
    let dim = b.w.len();
    let mut g = DMatrix::zeros(dim, dim);
    for (i, j, v) in b.g {
        g[(i, j)] += v;
    }
    Ok(GeneratorMatrix {
        g,
        w: DVector::from_vec(b.w),
        blocks: b.blocks,
    })
}

fn check_kernel(k: &KernelSpec) -> Result<()> {
    k.validate()?;
    if k.delayed_sqrt.is_some_and(|d| d.z_tau_d != 0.0) {
        return Err(Error::Unsupported(
            "the delayed sqrt kernel has no finite-dimensional dissipative generator".into(),
        ));
    }
    if k.has_delay() && k.delay_weight() <= 0.0 {
        return Err(Error::param("k", "the delay energy weight must be > 0"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_re: f64,
    pub min_abs: f64,
    /// `|Re lambda| < IMAG_AXIS_TOL` per eigenvalue.
    pub purely_imag_flags: Vec<bool>,
}

impl EigenReport {
    pub fn near_axis_count(&self) -> usize {
        self.purely_imag_flags.iter().filter(|&&f| f).count()
    }

    /// Largest `|Im lambda|` among eigenvalues flagged as on the axis.
    pub fn max_axis_frequency(&self) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.purely_imag_flags)
            .filter(|(_, &f)| f)
            .map(|(l, _)| l.im.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Re lambda|` over the whole spectrum.
    pub fn max_abs_re(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.re.abs())
            .fold(0.0, f64::max)
    }

    /// Distance between the spectrum and its complex conjugate.
    pub fn conjugate_asymmetry(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| {
                self.eigenvalues
                    .iter()
                    .map(|m| (m - l.conj()).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for l in &self.eigenvalues {
            out.push_str(&format!("{},{}\n", fmt_f64(l.re), fmt_f64(l.im)));
        }
        out
    }
}

pub fn eigen_report(gen: &GeneratorMatrix) -> Result<EigenReport> {
    let dim = gen.dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::param(
            "dimension",
            format!("{dim} exceeds the dense eigensolver budget {MAX_DENSE_DIM}"),
        ));
    }
    let schur = Schur::try_new(gen.balanced(), f64::EPSILON, 100 * dim.max(10))
        .ok_or(Error::EigenNoConvergence { dim })?;
    let mut eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let max_re = eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_abs = eigenvalues
        .iter()
        .map(|l| l.norm())
        .fold(f64::INFINITY, f64::min);
    let purely_imag_flags = eigenvalues
        .iter()
        .map(|l| l.re.abs() < IMAG_AXIS_TOL)
        .collect();
    Ok(EigenReport {
        eigenvalues,
        max_re,
        min_abs,
        purely_imag_flags,
    })
}

/// Largest eigenvalue of `W^{-1/2} (W G + G^T W)/2 W^{-1/2}`.
pub fn dissipativity_check(gen: &GeneratorMatrix) -> f64 {
    SymmetricEigen::new(gen.symmetric_part())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Spectral norm of the W-symmetric part.
pub fn symmetric_part_norm(gen: &GeneratorMatrix) -> f64 {
    SymmetricEigen::new(gen.symmetric_part())
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
}

/// Smallest singular value of `G`.
pub fn injectivity_check(gen: &GeneratorMatrix) -> f64 {
    gen.g
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn operator_norm(gen: &GeneratorMatrix) -> f64 {
    gen.g.singular_values().iter().copied().fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub dim: usize,
    pub max_re: f64,
    pub min_abs: f64,
    pub dissipativity: f64,
    pub sigma_min: f64,
    pub norm: f64,
    pub near_axis: usize,
}

pub fn analyze(config: &GeneratorConfig) -> Result<(SpectrumSummary, EigenReport)> {
    let gen = assemble_generator(config)?;
    let eig = eigen_report(&gen)?;
    let summary = SpectrumSummary {
        dim: gen.dim(),
        max_re: eig.max_re,
        min_abs: eig.min_abs,
        dissipativity: dissipativity_check(&gen),
        sigma_min: injectivity_check(&gen),
        norm: operator_norm(&gen),
        near_axis: eig.near_axis_count(),
    };
    Ok((summary, eig))
}

/// Independent analyses of several configurations, in parallel.
pub fn sweep(configs: &[GeneratorConfig]) -> Vec<Result<SpectrumSummary>> {
    configs
        .par_iter()
        .map(|c| analyze(c).map(|(s, _)| s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::DiffusiveDescriptor;

    fn cfg(n: usize, left: BoundaryCondition, right: BoundaryCondition) -> GeneratorConfig {
        GeneratorConfig::new(Grid1D::new(1.0, n).unwrap(), BCSpec::new(left, right))
    }

    fn ibc(k: KernelSpec) -> BoundaryCondition {
        BoundaryCondition::Impedance(k)
    }

    #[test]
    fn hand_assembled_two_cells() {
        // h = 1/2, faces u0 (Neumann, removed), u1, u2 (IBC z0 = 1, mass 1/4).
        let c = cfg(
            2,
            BoundaryCondition::Neumann,
            ibc(KernelSpec::proportional(1.0)),
        );
        let gen = assemble_generator(&c).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            // u1    u2     p0    p1
            0.0,  0.0,   2.0, -2.0,
            0.0, -4.0,   0.0,  4.0,
            -2.0, 0.0,   0.0,  0.0,
            2.0, -2.0,   0.0,  0.0,
        ]);
        assert!((&gen.g - &expected).abs().max() < 1e-14, "{}", gen.g);
        assert_eq!(gen.w.as_slice(), &[0.5, 0.25, 0.5, 0.5]);
    }

    #[test]
    fn lossless_is_skew_with_imaginary_spectrum() {
        let c = cfg(40, BoundaryCondition::Neumann, BoundaryCondition::Dirichlet);
        let gen = assemble_generator(&c).unwrap();
        assert!(symmetric_part_norm(&gen) <= 1e-10);
        let eig = eigen_report(&gen).unwrap();
        assert!(eig.max_abs_re() <= 1e-10);
        assert!(eig.conjugate_asymmetry() < 1e-9);
        assert!(dissipativity_check(&gen).abs() <= 1e-10);
    }

    #[test]
    fn upwind_block_is_bidiagonal() {
        let k = KernelSpec::delay(1.0, 0.5, 0.3);
        let mut c = cfg(10, BoundaryCondition::Neumann, ibc(k));
        c.delay_cells = Some(6);
        let gen = assemble_generator(&c).unwrap();
        let start = 10 + 10;
        let dth = 0.05;
        for r in 0..6 {
            for col in 0..6 {
                let v = gen.g[(start + r, start + col)];
                let want = if r == col {
                    -1.0 / dth
                } else if col + 1 == r {
                    1.0 / dth
                } else {
                    0.0
                };
                assert!((v - want).abs() < 1e-9, "({r},{col}) {v}");
            }
        }
    }

    #[test]
    fn proportional_is_strictly_stable() {
        let c = cfg(
            50,
            BoundaryCondition::Neumann,
            ibc(KernelSpec::proportional(1.0)),
        );
        let (s, eig) = analyze(&c).unwrap();
        assert!(s.max_re < 0.0, "{}", s.max_re);
        assert!(s.sigma_min > 1e-10 * s.norm);
        assert!(s.dissipativity <= 1e-10);
        assert_eq!(eig.max_axis_frequency(), 0.0);
    }

    #[test]
    fn pure_derivative_is_conservative() {
        let k = KernelSpec::proportional(0.0).with_derivative(1.0);
        let c = cfg(30, BoundaryCondition::Neumann, ibc(k));
        let (s, eig) = analyze(&c).unwrap();
        assert!(eig.max_abs_re() <= 1e-8);
        assert!(s.dissipativity.abs() <= 1e-10);
    }

    #[test]
    fn delay_k_range_controls_dissipativity() {
        let inside = KernelSpec::delay(1.0, 0.5, 0.3).with_k(1.0);
        let c = cfg(20, BoundaryCondition::Neumann, ibc(inside));
        assert!(dissipativity_check(&assemble_generator(&c).unwrap()) <= 1e-10);
        let outside = KernelSpec::delay(1.0, 0.5, 0.3).with_k(3.0);
        let c = cfg(20, BoundaryCondition::Neumann, ibc(outside));
        assert!(dissipativity_check(&assemble_generator(&c).unwrap()) > 0.0);
    }

    #[test]
    fn zero_dc_impedance_loses_injectivity() {
        let k = KernelSpec::delay(1.0, -1.0, 0.2);
        let c = cfg(20, ibc(k.clone()), ibc(k));
        let (s, _) = analyze(&c).unwrap();
        assert!(s.sigma_min < 1e-10 * s.norm, "{:e}", s.sigma_min);
        let c = cfg(
            20,
            ibc(KernelSpec::delay(1.0, -0.5, 0.2)),
            ibc(KernelSpec::delay(1.0, -0.5, 0.2)),
        );
        let (s, _) = analyze(&c).unwrap();
        assert!(s.sigma_min > 1e-6 * s.norm);
    }

    #[test]
    fn synthetic_null_state_detected() {
        let c = cfg(
            10,
            BoundaryCondition::Neumann,
            ibc(KernelSpec::proportional(1.0)),
        );
        let gen = assemble_generator(&c).unwrap().with_null_state();
        assert_eq!(injectivity_check(&gen), 0.0);
    }

    #[test]
    fn diffusive_families_are_dissipative() {
        let q = crate::measures::Quadrature {
            nodes: 30,
            ..Default::default()
        };
        let mut std = KernelSpec::proportional(0.1)
            .with_standard(DiffusiveDescriptor::Fractional { alpha: 0.5 });
        std.quadrature = q;
        let mut ext = KernelSpec::proportional(0.1)
            .with_extended(DiffusiveDescriptor::Fractional { alpha: 0.5 });
        ext.quadrature = q;
        let configs = vec![
            cfg(20, BoundaryCondition::Neumann, ibc(std)),
            cfg(20, BoundaryCondition::Dirichlet, ibc(ext)),
        ];
        for s in sweep(&configs) {
            let s = s.unwrap();
            assert!(s.dissipativity <= 1e-10 && s.max_re <= 1e-10, "{s:?}");
        }
    }

    #[test]
    fn delayed_sqrt_rejected() {
        let k = KernelSpec {
            z0: 2.0,
            delayed_sqrt: Some(crate::kernels::DelayedSqrt {
                z_tau_d: 1.0,
                tau_d: 0.5,
            }),
            ..Default::default()
        };
        let c = cfg(10, BoundaryCondition::Neumann, ibc(k));
        assert!(matches!(assemble_generator(&c), Err(Error::Unsupported(_))));
    }
}
