//! Laplace-domain solvability on 1D P1 meshes:
//!
//! ```text
//! (p', psi') + s^2 (p, psi) + (s / z(s)) (p, psi)_boundary = l(psi)
//! ```
//!
//! In 1D the boundary form is a point evaluation, so the system stays
//! tridiagonal and is solved directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{norm2, Tridiagonal};
use crate::measures::fmt_f64;
use crate::wavesim::Grid1D;
use crate::Complex64;

/// Condition numbers above this are reported as near-singular.
pub const COND_LIMIT: f64 = 1e14;
/// Accepted solves must reach this relative residual.
pub const RESIDUAL_LIMIT: f64 = 1e-10;

/// Endpoints carrying the impedance (Robin) term; the others are natural
/// (Neumann) boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobinEnds {
    pub left: bool,
    pub right: bool,
}

impl RobinEnds {
    pub const BOTH: RobinEnds = RobinEnds {
        left: true,
        right: true,
    };
    pub const NONE: RobinEnds = RobinEnds {
        left: false,
        right: false,
    };
}

impl Default for RobinEnds {
    fn default() -> Self {
        RobinEnds::BOTH
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HelmholtzSystem {
    pub grid: Grid1D,
    pub s: Complex64,
    /// `s / z(s)`, or `None` when no endpoint carries the impedance term.
    pub robin: Option<Complex64>,
    pub ends: RobinEnds,
    pub matrix: Tridiagonal<Complex64>,
}

/// Stiffness and mass of one P1 element of length `h`.
fn element(h: f64) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    (
        [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]],
        [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]],
    )
}

pub fn assemble(grid: Grid1D, kernel: &KernelSpec, s: Complex64) -> Result<HelmholtzSystem> {
    assemble_with(grid, kernel, s, RobinEnds::BOTH)
}

pub fn assemble_with(
    grid: Grid1D,
    kernel: &KernelSpec,
    s: Complex64,
    ends: RobinEnds,
) -> Result<HelmholtzSystem> {
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::param(
            "s",
            "s = 0 is excluded; use the spectrum injectivity check",
        ));
    }
    if s.re < 0.0 {
        return Err(Error::LeftHalfPlane { s });
    }
    let robin = if ends == RobinEnds::NONE {
        None
    } else {
        let z = kernel.eval_laplace(s)?;
        if z.norm() == 0.0 || !z.is_finite() {
            return Err(Error::ZeroImpedance { s });
        }
        Some(s / z)
    };
    let n = grid.cells;
    let (ke, me) = element(grid.h());
    let s2 = s * s;
    let mut a = Tridiagonal::<Complex64>::zeros(n + 1);
    for e in 0..n {
        for (r, row) in [e, e + 1].into_iter().enumerate() {
            for (c, col) in [e, e + 1].into_iter().enumerate() {
                let v = Complex64::from(ke[r][c]) + s2 * me[r][c];
                if row == col {
                    a.diag[row] += v;
                } else if col < row {
                    a.lower[col] += v;
                } else {
                    a.upper[row] += v;
                }
            }
        }
    }
    if let Some(rc) = robin {
        if ends.left {
            a.diag[0] += rc;
        }
        if ends.right {
            a.diag[n] += rc;
        }
    }
    Ok(HelmholtzSystem {
        grid,
        s,
        robin,
        ends,
        matrix: a,
    })
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// `l(psi) = (f, psi) + g_left psi(0) + g_right psi(L)` with 3-point Gauss.
pub fn load_vector(
    grid: &Grid1D,
    f: impl Fn(f64) -> Complex64,
    g: [Complex64; 2],
) -> Vec<Complex64> {
    let n = grid.cells;
    let h = grid.h();
    let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
    for e in 0..n {
        let x0 = e as f64 * h;
        for (xi, wq) in GAUSS3 {
            let t = 0.5 * (xi + 1.0);
            let fx = f(x0 + t * h) * (0.5 * h * wq);
            b[e] += fx * (1.0 - t);
            b[e + 1] += fx * t;
        }
    }
    b[0] += g[0];
    b[n] += g[1];
    b
}

/// `||p_h - p||_{L2}` with 3-point Gauss per element.
pub fn l2_error(grid: &Grid1D, p_h: &[Complex64], exact: impl Fn(f64) -> Complex64) -> f64 {
    let h = grid.h();
    let mut acc = 0.0;
    for e in 0..grid.cells {
        let x0 = e as f64 * h;
        for (xi, wq) in GAUSS3 {
            let t = 0.5 * (xi + 1.0);
            let ph = p_h[e] * (1.0 - t) + p_h[e + 1] * t;
            acc += 0.5 * h * wq * (ph - exact(x0 + t * h)).norm_sqr();
        }
    }
    acc.sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub p: Vec<Complex64>,
    /// `||A p - b|| / ||b||` (zero for `b = 0`).
    pub residual: f64,
    /// Exact 1-norm condition number.
    pub cond: f64,
    pub near_singular: bool,
}

impl HelmholtzSystem {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<SolveReport> {
        if rhs.len() != self.dim() {
            return Err(Error::param(
                "rhs",
                "length must equal the number of mesh nodes",
            ));
        }
        let lu = match self.matrix.factor() {
            Ok(lu) => lu,
            Err(Error::SingularStep { .. }) => {
                return Ok(SolveReport {
                    p: Vec::new(),
                    residual: f64::INFINITY,
                    cond: f64::INFINITY,
                    near_singular: true,
                })
            }
            Err(e) => return Err(e),
        };
        let cond = self.matrix.norm1() * lu.inverse_norm1();
        let p = lu.solve(rhs);
        let bn = norm2(rhs);
        let residual = if bn == 0.0 {
            0.0
        } else {
            let ap = self.matrix.mul_vec(&p);
            let r: Vec<Complex64> = ap.iter().zip(rhs).map(|(a, b)| a - b).collect();
            norm2(&r) / bn
        };
        let near_singular = !(cond <= COND_LIMIT) || !(residual <= RESIDUAL_LIMIT);
        Ok(SolveReport {
            p,
            residual,
            cond,
            near_singular,
        })
    }
}

pub fn solve(sys: &HelmholtzSystem, rhs: &[Complex64]) -> Result<SolveReport> {
    sys.solve(rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub s: Complex64,
    pub cond: f64,
    pub residual: f64,
    pub flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    pub fn flagged(&self) -> usize {
        self.entries.iter().filter(|e| e.flag).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn max_cond(&self) -> f64 {
        self.entries.iter().map(|e| e.cond).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s_re,s_im,cond_estimate,residual,flag\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(e.s.re),
                fmt_f64(e.s.im),
                fmt_f64(e.cond),
                fmt_f64(e.residual),
                u8::from(e.flag)
            ));
        }
        out
    }
}

/// `n_real` log-spaced points of `(lo, hi)` plus `n_imag` on each of `+i(lo, hi)`
/// and `-i(lo, hi)`.
pub fn scan_samples(n_real: usize, n_imag: usize, lo: f64, hi: f64) -> Vec<Complex64> {
    let logs = |m: usize| -> Vec<f64> {
        (0..m)
            .map(|k| {
                let t = if m == 1 {
                    0.5
                } else {
                    k as f64 / (m - 1) as f64
                };
                lo * (hi / lo).powf(t)
            })
            .collect()
    };
    let mut out: Vec<Complex64> = logs(n_real).into_iter().map(Complex64::from).collect();
    for w in logs(n_imag) {
        out.push(Complex64::new(0.0, w));
        out.push(Complex64::new(0.0, -w));
    }
    out
}

/// Smooth load used by scans: `f = 1 + x`, unit boundary data.
pub fn scan_load(grid: &Grid1D) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    load_vector(grid, |x| Complex64::new(1.0 + x, 0.0), [one, one])
}

pub fn bijectivity_scan(
    grid: Grid1D,
    kernel: &KernelSpec,
    samples: &[Complex64],
    ends: RobinEnds,
) -> Result<ScanReport> {
    let b = scan_load(&grid);
    let entries = samples
        .par_iter()
        .map(|&s| {
            let rep = assemble_with(grid, kernel, s, ends)?.solve(&b)?;
            Ok(ScanEntry {
                s,
                cond: rep.cond,
                residual: rep.residual,
                flag: rep.near_singular,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport { entries })
}

/// Discrete Neumann eigenfrequency of mode `k` for P1 on a uniform mesh:
/// `omega^2 = (6/h^2)(1 - cos(k pi h / L))/(2 + cos(k pi h / L))`.
pub fn p1_neumann_frequency(grid: &Grid1D, k: usize) -> f64 {
    let h = grid.h();
    let c = (k as f64 * std::f64::consts::PI * h / grid.length).cos();
    (6.0 / (h * h) * (1.0 - c) / (2.0 + c)).sqrt()
}
