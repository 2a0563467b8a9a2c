use std::fs;
use std::path::{Path, PathBuf};

use ibc_core::config::{parse_config, FitMode, MeasureFitConfig, RunConfig};
use ibc_core::kernels::{delay_pr_condition, min_z0_delayed_sqrt, PRReport};
use ibc_core::measures::Quadrature;
use ibc_core::realizations::admissible_k_range;
use ibc_core::report::{timeseries_csv, to_json, write_json, write_text};
use ibc_core::resolvent::{bijectivity_scan, scan_samples};
use ibc_core::spectrum::analyze;
use ibc_core::{Complex64, Error, Result};
use serde::Serialize;

use crate::Outcome;

/// Generator checks use this tolerance for `max Re` and dissipativity.
const SPECTRUM_TOL: f64 = 1e-10;
/// Relative per-step energy growth tolerated by `simulate`.
const ENERGY_TOL: f64 = 1e-12;

struct Loaded {
    cfg: RunConfig,
    dir: PathBuf,
}

impl Loaded {
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    /// Write the primary table to `outputs.csv`, or stdout when unset.
    fn emit_csv(&self, csv: &str) -> Result<()> {
        match &self.cfg.outputs.csv {
            Some(p) => write_text(&self.resolve(p), csv),
            None => {
                print!("{csv}");
                Ok(())
            }
        }
    }

    /// Write the summary to `outputs.json` and to stdout (stderr when the
    /// CSV already went to stdout).
    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        if let Some(p) = &self.cfg.outputs.json {
            write_json(&self.resolve(p), value)?;
        }
        let text = to_json(value)?;
        if self.cfg.outputs.csv.is_none() {
            eprintln!("{text}");
        } else {
            println!("{text}");
        }
        Ok(())
    }
}

fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path)?;
    let cfg = parse_config(&text)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { cfg, dir })
}

#[derive(Serialize)]
struct SimulateSummary {
    steps: usize,
    dt: f64,
    e0: f64,
    e_final: f64,
    max_energy_increase: f64,
    max_identity_residual: f64,
    warnings: Vec<String>,
}

pub fn simulate(path: &Path) -> Result<Outcome> {
    let l = load(path)?;
    let report = l.cfg.simulation().run()?;
    l.emit_csv(&timeseries_csv(&report))?;
    let summary = SimulateSummary {
        steps: report.steps,
        dt: report.dt,
        e0: report.e0,
        e_final: report.final_energy(),
        max_energy_increase: report.max_energy_increase,
        max_identity_residual: report.max_identity_residual,
        warnings: l
            .cfg
            .kernel
            .as_ref()
            .map(|k| k.warnings())
            .unwrap_or_default(),
    };
    l.emit_json(&summary)?;
    if report.max_energy_increase > ENERGY_TOL * report.e0 {
        return Ok(Outcome::Violation(format!(
            "energy increased by {:e} in one step (E0 = {:e})",
            report.max_energy_increase, report.e0
        )));
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct KernelCheckSummary {
    pr: PRReport,
    value_at_zero: Option<f64>,
    delay_pr_condition: Option<bool>,
    k_range: Option<[f64; 2]>,
    delayed_sqrt_min_z0: Option<f64>,
}

pub fn kernel_check(path: &Path) -> Result<Outcome> {
    let l = load(path)?;
    let k = l.cfg.kernel_or_err()?;
    let sampler = l.cfg.sampler.clone().unwrap_or_default();
    let pr = k.check_positive_real(&sampler);
    let delay = k.has_delay();
    let summary = KernelCheckSummary {
        value_at_zero: k.value_at_zero(),
        delay_pr_condition: delay.then(|| delay_pr_condition(k.z0, k.z_tau, k.tau)),
        k_range: delay
            .then(|| admissible_k_range(k.z0, k.z_tau).ok())
            .flatten()
            .map(|r| [r.lo, r.hi]),
        delayed_sqrt_min_z0: k
            .delayed_sqrt
            .and_then(|d| min_z0_delayed_sqrt(d.z_tau_d, d.tau_d).ok()),
        pr,
    };
    println!("{}", to_json(&summary)?);
    if let Some(p) = &l.cfg.outputs.json {
        write_json(&l.resolve(p), &summary)?;
    }
    if !summary.pr.certified {
        return Ok(Outcome::Violation(format!(
            "{} sampled points with Re z(s) < -{:e}",
            summary.pr.violation_count, sampler.tol
        )));
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct FitPoint {
    s: f64,
    discrete: f64,
    exact: Option<f64>,
    rel_error: Option<f64>,
}

#[derive(Serialize)]
struct FitSummary {
    nodes: usize,
    sum_wellposed: f64,
    sum_inv_xi: f64,
    points: Vec<FitPoint>,
    max_rel_error: Option<f64>,
}

fn fit_config(cfg: &RunConfig) -> Result<MeasureFitConfig> {
    if let Some(m) = &cfg.measure {
        return Ok(m.clone());
    }
    let k = cfg.kernel_or_err()?;
    let (descriptor, mode) = match (&k.standard, &k.extended) {
        (Some(d), _) => (d.clone(), FitMode::Standard),
        (None, Some(d)) => (d.clone(), FitMode::Extended),
        (None, None) => {
            return Err(Error::Config {
                path: "measure".into(),
                reason: "no [measure] section and the kernel has no diffusive term".into(),
            })
        }
    };
    Ok(MeasureFitConfig {
        descriptor,
        quadrature: k.quadrature,
        mode,
        samples: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        tolerance: 1e-3,
    })
}

pub fn measure_fit(path: &Path) -> Result<Outcome> {
    let l = load(path)?;
    let fit = fit_config(&l.cfg)?;
    let q: Quadrature = fit.quadrature;
    let mu = fit.descriptor.discretize(&q)?;
    let mut points = Vec::new();
    for &s in &fit.samples {
        let sc = Complex64::new(s, 0.0);
        let (discrete, exact) = match fit.mode {
            FitMode::Standard => (mu.eval_standard(sc)?, fit.descriptor.analytic_standard(sc)),
            FitMode::Extended => (mu.eval_extended(sc)?, fit.descriptor.analytic_extended(sc)),
        };
        let exact = exact.map(|e| e.re);
        points.push(FitPoint {
            s,
            discrete: discrete.re,
            exact,
            rel_error: exact.map(|e| ((discrete.re - e) / e).abs()),
        });
    }
    let integ = mu.integrability_report();
    let max_rel_error = points.iter().filter_map(|p| p.rel_error).reduce(f64::max);
    let summary = FitSummary {
        nodes: mu.len(),
        sum_wellposed: integ.sum_wellposed,
        sum_inv_xi: integ.sum_inv_xi,
        points,
        max_rel_error,
    };
    l.emit_csv(&mu.to_csv())?;
    l.emit_json(&summary)?;
    match max_rel_error {
        Some(e) if e > fit.tolerance => Ok(Outcome::Violation(format!(
            "max relative error {e:e} exceeds {:e}",
            fit.tolerance
        ))),
        _ => Ok(Outcome::Pass),
    }
}

#[derive(Serialize)]
struct ScanSummary {
    samples: usize,
    flagged: usize,
    max_residual: f64,
    max_cond: f64,
}

pub fn resolvent_scan(path: &Path) -> Result<Outcome> {
    let l = load(path)?;
    let k = l.cfg.kernel_or_err()?;
    let sc = l.cfg.scan_config();
    let samples = scan_samples(sc.n_real, sc.n_imag, sc.lo, sc.hi);
    let rep = bijectivity_scan(l.cfg.grid(), k, &samples, sc.ends)?;
    l.emit_csv(&rep.to_csv())?;
    let summary = ScanSummary {
        samples: rep.entries.len(),
        flagged: rep.flagged(),
        max_residual: rep.max_residual(),
        max_cond: rep.max_cond(),
    };
    l.emit_json(&summary)?;
    if summary.flagged > 0 {
        return Ok(Outcome::Violation(format!(
            "{} near-singular samples",
            summary.flagged
        )));
    }
    Ok(Outcome::Pass)
}

pub fn spectrum(path: &Path) -> Result<Outcome> {
    let l = load(path)?;
    let (summary, eig) = analyze(&l.cfg.generator_config())?;
    if let Some(p) = &l.cfg.outputs.csv {
        write_text(&l.resolve(p), &eig.to_csv())?;
    }
    if let Some(p) = &l.cfg.outputs.json {
        write_json(&l.resolve(p), &summary)?;
    }
    println!("{}", to_json(&summary)?);
    if summary.max_re > SPECTRUM_TOL || summary.dissipativity > SPECTRUM_TOL {
        return Ok(Outcome::Violation(format!(
            "max Re = {:e}, dissipativity = {:e}",
            summary.max_re, summary.dissipativity
        )));
    }
    Ok(Outcome::Pass)
}
