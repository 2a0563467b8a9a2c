use ibc_core::kernels::{delay_pr_condition, quadratic_halfplane_roots, KernelSpec, SamplerConfig};
use ibc_core::measures::{DiffusiveDescriptor, DiscreteMeasure, Quadrature};
use ibc_core::realizations::{BankMode, DiffusiveBank};
use ibc_core::resolvent::{assemble, scan_load};
use ibc_core::spectrum::{analyze, GeneratorConfig};
use ibc_core::wavesim::{BCSpec, BoundaryCondition, Grid1D, InitialCondition, Simulation};
use ibc_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn measure_strategy() -> impl Strategy<Value = DiscreteMeasure> {
    (
        1e-4f64..1.0,
        proptest::collection::vec((0.05f64..1.5, 1e-3f64..10.0), 1..12),
    )
        .prop_map(|(start, steps)| {
            let mut x = start;
            let (xi, w): (Vec<f64>, Vec<f64>) = steps
                .into_iter()
                .map(|(lg, w)| {
                    x *= 10f64.powf(lg);
                    (x, w)
                })
                .unzip();
            DiscreteMeasure::new(xi, w).unwrap()
        })
}

fn sampler() -> SamplerConfig {
    SamplerConfig {
        boundary_points: 4000,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delay_pr_matches_sampling(z0 in 0.01f64..5.0, ratio in -1.0f64..=1.0, tau in 0.05f64..3.0) {
        let k = KernelSpec::delay(z0, ratio * z0, tau);
        prop_assert!(delay_pr_condition(k.z0, k.z_tau, k.tau));
        prop_assert!(k.check_positive_real(&sampler()).certified);
    }

    #[test]
    fn delay_violation_is_found(zt in 0.1f64..5.0, frac in 0.0f64..0.9, sign in prop::bool::ANY, tau in 0.1f64..2.0) {
        let z_tau = if sign { zt } else { -zt };
        let k = KernelSpec::delay(frac * zt, z_tau, tau);
        prop_assert!(!delay_pr_condition(k.z0, k.z_tau, k.tau));
        prop_assert!(!k.check_positive_real(&sampler()).certified);
    }

    #[test]
    fn quadratic_roots_stay_left(a0 in 0.0f64..10.0, a1 in 0.0f64..10.0, a2 in 0.0f64..10.0,
                                 zr in 1e-6f64..10.0, zi in -10.0f64..10.0) {
        prop_assume!(a1 > 0.0 || a2 > 0.0);
        let rep = quadratic_halfplane_roots(a0, a1, a2, c(zr, zi)).unwrap();
        prop_assert!(rep.max_re <= 1e-12);
    }

    #[test]
    fn standard_term_is_real_positive_decreasing(mu in measure_strategy()) {
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let s = 1e-3 * 10f64.powf(i as f64 / 10.0);
            let v = mu.eval_standard(c(s, 0.0)).unwrap();
            prop_assert_eq!(v.im, 0.0);
            prop_assert!(v.re > 0.0 && v.re < prev);
            prev = v.re;
        }
    }

    #[test]
    fn bank_terms_are_positive_real(mu in measure_strategy(), sr in 0.0f64..50.0, si in -50.0f64..50.0) {
        let s = c(sr, si);
        prop_assume!(s.norm() > 1e-9);
        let st = mu.eval_standard(s).unwrap();
        let ex = mu.eval_extended(s).unwrap();
        prop_assert!(st.re >= -1e-12 * st.norm());
        prop_assert!(ex.re >= -1e-12 * ex.norm());
        prop_assert!((ex - s * st).norm() <= 1e-12 * (ex.norm() + (s * st).norm()));
    }

    #[test]
    fn kernel_reality(z0 in 0.0f64..3.0, zt in -3.0f64..3.0, tau in 0.0f64..2.0, z1 in 0.0f64..2.0,
                      alpha in 0.05f64..0.95, sr in 0.0f64..20.0, si in -20.0f64..20.0) {
        let s = c(sr, si);
        prop_assume!(s.norm() > 1e-6);
        let k = KernelSpec::delay(z0, zt, tau)
            .with_derivative(z1)
            .with_standard(DiffusiveDescriptor::Fractional { alpha })
            .with_extended(DiffusiveDescriptor::Fractional { alpha: 1.0 - alpha });
        let a = k.eval_laplace(s.conj()).unwrap();
        let b = k.eval_laplace(s).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn resolvent_pole_estimate(sr in 0.0f64..100.0, si in -100.0f64..100.0, xi in 0.0f64..1e6) {
        let s = c(sr, si);
        prop_assume!(s.norm() > 1e-8);
        let lhs = 1.0 / (s + xi).norm();
        let rhs = 2f64.sqrt() * (1.0f64).max(1.0 / s.norm()) / (1.0 + xi);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn free_bank_is_contractive(mu in measure_strategy(), dt in 1e-6f64..1e3,
                                phi in proptest::collection::vec(-10.0f64..10.0, 12)) {
        for mode in [BankMode::Standard, BankMode::Extended] {
            let mut bank = DiffusiveBank::new(mode, mu.clone());
            bank.set_state(&phi[..mu.len()]).unwrap();
            let before = bank.energy();
            bank.step(0.0, dt);
            prop_assert!(bank.energy() <= before);
            prop_assert!(bank.state().iter().zip(&phi).all(|(a, b)| a.abs() <= b.abs()));
        }
    }

    #[test]
    fn bank_midpoint_energy_identity(mu in measure_strategy(), dt in 1e-4f64..1.0,
                                     inputs in proptest::collection::vec(-5.0f64..5.0, 1..40)) {
        for mode in [BankMode::Standard, BankMode::Extended] {
            let mut bank = DiffusiveBank::new(mode, mu.clone());
            for &u in &inputs {
                let half = bank.midpoint_state(u, dt);
                let output = bank.output_at(&half, u);
                let rate = bank.dissipation_at(&half, u) + u * output;
                let e0 = bank.energy();
                bank.step(u, dt);
                let delta = bank.energy() - e0;
                prop_assert!((delta - dt * rate).abs() <= 1e-12 * (e0 + bank.energy() + dt * rate.abs()).max(1e-300));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coupled_energy_identity(z0 in 0.1f64..3.0, ratio in -1.0f64..1.0, tau in 0.05f64..0.5,
                               z1 in 0.0f64..0.5, alpha in 0.1f64..0.9, seed in 0u64..1000,
                               left_ibc in prop::bool::ANY) {
        let mut k = KernelSpec::delay(z0, ratio * z0, tau)
            .with_derivative(z1)
            .with_standard(DiffusiveDescriptor::Fractional { alpha })
            .with_extended(DiffusiveDescriptor::Fractional { alpha: 1.0 - alpha });
        k.quadrature = Quadrature { nodes: 30, ..Default::default() };
        let left = if left_ibc { BoundaryCondition::Impedance(k.clone()) } else { BoundaryCondition::Dirichlet };
        let grid = Grid1D::new(1.0, 40).unwrap();
        let bc = BCSpec::new(left, BoundaryCondition::Impedance(k));
        let dt = Simulation::default_dt(&grid, &bc);
        let sim = Simulation {
            grid, bc, dt, t_final: 400.0 * dt,
            initial: InitialCondition::RandomSmooth { modes: 5 }, seed, source: None,
        };
        let rep = sim.run().unwrap();
        prop_assert!(rep.max_identity_residual <= 1e-12 * rep.e0);
        prop_assert!(rep.max_energy_increase <= 1e-12 * rep.e0);
    }

    #[test]
    fn certified_generators_meet_spectral_conditions(z0 in 0.2f64..3.0, ratio in -0.95f64..0.95,
                                                     tau in 0.05f64..0.5, z1 in 0.0f64..0.5) {
        let k = KernelSpec::delay(z0, ratio * z0, tau).with_derivative(z1).certified();
        prop_assume!(k.value_at_zero().is_some_and(|v| v.abs() > 1e-3));
        let grid = Grid1D::new(1.0, 16).unwrap();
        let cfg = GeneratorConfig::new(grid, BCSpec::new(BoundaryCondition::Neumann, BoundaryCondition::Impedance(k)));
        let (s, eig) = analyze(&cfg).unwrap();
        prop_assert!(s.max_re <= 1e-10);
        prop_assert!(s.dissipativity <= 1e-10);
        prop_assert!(s.sigma_min >= 1e-10 * s.norm);
        prop_assert_eq!(eig.max_axis_frequency(), 0.0);
    }

    #[test]
    fn positive_real_s_gives_nonsingular_system(s in 1e-3f64..1e3, z0 in 0.01f64..100.0, n in 4usize..300) {
        let grid = Grid1D::new(1.0, n).unwrap();
        let sys = assemble(grid, &KernelSpec::proportional(z0), c(s, 0.0)).unwrap();
        let rep = sys.solve(&scan_load(&grid)).unwrap();
        prop_assert!(!rep.near_singular, "{:?}", rep);
    }
}
