//! Reduced-size invariant suite. Each check prints one PASS/FAIL line.

use ibc_core::kernels::{find_x_tilde, quadratic_halfplane_roots, KernelSpec};
use ibc_core::measures::{fractional_density, Quadrature};
use ibc_core::realizations::{
    admissible_k_range, psd_test_matrix, sym2_eigen, BankMode, DiffusiveBank,
};
use ibc_core::resolvent::{bijectivity_scan, scan_samples, RobinEnds};
use ibc_core::spectrum::{analyze, GeneratorConfig};
use ibc_core::wavesim::{BCSpec, BoundaryCondition, Grid1D, InitialCondition, Simulation};
use ibc_core::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Outcome;

type Check = fn() -> Result<bool>;

const CHECKS: &[(&str, Check)] = &[
    ("delay energy monotone", delay_energy),
    ("k-range PSD sharpness", k_range),
    ("bank passivity identities", passivity),
    ("fractional quadrature", quadrature),
    ("quadratic roots in closed left half-plane", roots),
    ("resolvent scan clean", scan),
    ("generator spectrum", spectrum),
    ("x-tilde", x_tilde),
];

pub fn run() -> Outcome {
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        let ok = match check() {
            Ok(ok) => ok,
            Err(e) => {
                eprintln!("  {name}: {e}");
                false
            }
        };
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(*name);
        }
    }
    if failed.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Violation(failed.join(", "))
    }
}

fn delay_energy() -> Result<bool> {
    let grid = Grid1D::new(1.0, 100)?;
    let bc = BCSpec::new(
        BoundaryCondition::Neumann,
        BoundaryCondition::Impedance(KernelSpec::delay(1.0, 0.5, 0.3).with_k(1.0)),
    );
    let dt = Simulation::default_dt(&grid, &bc);
    let sim = Simulation {
        grid,
        bc,
        dt,
        t_final: 2000.0 * dt,
        initial: InitialCondition::RandomSmooth { modes: 6 },
        seed: 1,
        source: None,
    };
    let rep = sim.run()?;
    Ok(rep.max_energy_increase <= 1e-12 * rep.e0)
}

fn k_range() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let z0: f64 = rng.gen_range(0.1..3.0);
        let zt = z0 * rng.gen_range(-1.0..1.0);
        let r = admissible_k_range(z0, zt)?;
        let k: f64 = rng.gen_range(0.0..2.5 * z0);
        let (min_eig, _, _) = sym2_eigen(psd_test_matrix(z0, zt, k));
        let psd = min_eig >= -1e-12;
        if psd != r.contains(k) && (k - r.lo).abs() > 1e-9 && (k - r.hi).abs() > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn passivity() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mu = fractional_density(0.5)?.discretize(&Quadrature {
        nodes: 20,
        ..Default::default()
    })?;
    for mode in [BankMode::Standard, BankMode::Extended] {
        let mut bank = DiffusiveBank::new(mode, mu.clone());
        for _ in 0..100 {
            let phi: Vec<f64> = (0..mu.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            bank.set_state(&phi)?;
            let u = rng.gen_range(-1.0..1.0);
            let closed = bank.dissipation_residual(u);
            let lhs = bank.passivity_lhs(u);
            if (closed - lhs).abs() > 1e-12 * closed.abs().max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn quadrature() -> Result<bool> {
    let q = Quadrature::default();
    for alpha in [0.25, 0.5, 0.75] {
        let d = fractional_density(alpha)?;
        let mu = d.discretize(&q)?;
        for s in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let sc = Complex64::new(s, 0.0);
            let es = (mu.eval_standard(sc)?.re - s.powf(-alpha)).abs() / s.powf(-alpha);
            let ee = (mu.eval_extended(sc)?.re - s.powf(1.0 - alpha)).abs() / s.powf(1.0 - alpha);
            if es > 1e-3 || ee > 1e-3 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn roots() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a = [
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.01..5.0),
        ];
        let z = Complex64::new(rng.gen_range(1e-3..5.0), rng.gen_range(-5.0..5.0));
        if quadratic_halfplane_roots(a[0], a[1], a[2], z)?.max_re > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn scan() -> Result<bool> {
    let grid = Grid1D::new(1.0, 100)?;
    let samples = scan_samples(20, 10, 1e-2, 1e2);
    let rep = bijectivity_scan(
        grid,
        &KernelSpec::delay(1.0, 0.5, 0.3).certified(),
        &samples,
        RobinEnds::BOTH,
    )?;
    Ok(rep.flagged() == 0)
}

fn spectrum() -> Result<bool> {
    let grid = Grid1D::new(1.0, 20)?;
    let lossless = GeneratorConfig::new(
        grid,
        BCSpec::new(BoundaryCondition::Neumann, BoundaryCondition::Dirichlet),
    );
    let (l, _) = analyze(&lossless)?;
    let damped = GeneratorConfig::new(
        grid,
        BCSpec::new(
            BoundaryCondition::Neumann,
            BoundaryCondition::Impedance(KernelSpec::proportional(1.0)),
        ),
    );
    let (d, _) = analyze(&damped)?;
    Ok(l.max_re.abs() <= 1e-10
        && l.dissipativity.abs() <= 1e-10
        && d.max_re < 0.0
        && d.sigma_min > 0.0)
}

fn x_tilde() -> Result<bool> {
    Ok((find_x_tilde() - 2.13).abs() <= 0.01)
}
