use proptest::prelude::*;
use rieszflow_core::decay::{
    check_rate, fit_decay, DecayFit, NormTimeSeries, Provenance, Quantity,
};
use rieszflow_core::norms::{lebesgue_norm, sobolev_seminorm, spectral_l2};
use rieszflow_core::propagator::DOUBLE_ROOT_BAND;
use rieszflow_core::solver::{apply_dealias, nonlinearity};
use rieszflow_core::symbol::{
    apply_symbol, fractional_laplacian, riesz_potential, MultiplierSymbol,
};
use rieszflow_core::theory::{
    admissibility, dimension_bound, duhamel_decay, gn_theta, integral_inequality_check,
    log_time_grid, nonlinearity_decay_exponent, TargetSpace,
};
use rieszflow_core::{
    kernels, propagate_linear, transform_forward, transform_inverse, GridSpec, ModelParams,
    NormRecord, Outcome, RealField,
};

fn grid_strategy() -> impl Strategy<Value = GridSpec> {
    (1usize..=3, 2.0f64..50.0).prop_map(|(dim, l)| {
        let n = match dim {
            1 => 128,
            2 => 16,
            _ => 8,
        };
        GridSpec::new(dim, n, l).unwrap()
    })
}

fn field_strategy() -> impl Strategy<Value = RealField> {
    (grid_strategy(), any::<u64>()).prop_map(|(grid, seed)| {
        let mut state = seed | 1;
        let values = (0..grid.len())
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        RealField::new(grid, values).unwrap()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_holds(f in field_strategy()) {
        let spec = transform_forward(&f).unwrap();
        let physical = lebesgue_norm(&f, 2.0).unwrap();
        prop_assert!(rel(spectral_l2(&spec), physical) <= 1e-10);
    }

    #[test]
    fn roundtrip_is_identity(f in field_strategy()) {
        let back = transform_inverse(&transform_forward(&f).unwrap()).unwrap();
        let scale = f.max_abs();
        for (a, b) in back.values.iter().zip(&f.values) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn symbols_compose(f in field_strategy(), s1 in 0.0f64..3.0, s2 in -1.0f64..2.0) {
        let spec = transform_forward(&f).unwrap();
        let two = apply_symbol(
            &apply_symbol(&spec, &MultiplierSymbol::power(s1)).unwrap(),
            &MultiplierSymbol::bessel(s2),
        ).unwrap();
        let one = apply_symbol(
            &spec,
            &MultiplierSymbol::power(s1).product(MultiplierSymbol::bessel(s2)),
        ).unwrap();
        let scale = one.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        for (a, b) in two.coeffs.iter().zip(&one.coeffs) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn riesz_inverted_by_its_reciprocal(f in field_strategy(), frac in 0.05f64..0.95) {
        let alpha = frac * f.grid.dim as f64;
        let smoothed = riesz_potential(&f, alpha).unwrap();
        let spec = transform_forward(&smoothed).unwrap();
        let back = transform_inverse(&apply_symbol(&spec, &MultiplierSymbol::power(alpha)).unwrap()).unwrap();
        let mean = f.mean();
        let scale = f.max_abs();
        for (a, b) in back.values.iter().zip(&f.values) {
            prop_assert!((a - (b - mean)).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn real_even_symbols_keep_conjugate_symmetry(f in field_strategy(), s in 0.0f64..4.0) {
        let spec = transform_forward(&f).unwrap();
        let scale = spec.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        prop_assert!(spec.conjugate_asymmetry() <= 1e-12 * scale);
        for sym in [MultiplierSymbol::fractional_laplacian(s), MultiplierSymbol::bessel(-s)] {
            let out = apply_symbol(&spec, &sym).unwrap();
            let top = out.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            prop_assert!(out.conjugate_asymmetry() <= 1e-12 * top.max(1e-300));
        }
    }

    #[test]
    fn dealias_is_idempotent(f in field_strategy()) {
        let mut once = transform_forward(&f).unwrap();
        apply_dealias(&mut once);
        let mut twice = once.clone();
        apply_dealias(&mut twice);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn nonlinearity_is_homogeneous(f in field_strategy(), lambda in 0.1f64..10.0, p in 1.1f64..5.0) {
        let dim = f.grid.dim;
        let params = ModelParams::new(dim, 1.0, 0.5, p, 1.0).unwrap();
        let a = nonlinearity(&f.scaled(lambda), &params, true).unwrap();
        let b = nonlinearity(&f, &params, true).unwrap().scaled(lambda.powf(p));
        let scale = b.max_abs();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn kernel_identities(k in 0.0f64..1e4, t in 0.0f64..200.0) {
        let zero = kernels(k, 0.0).unwrap();
        prop_assert_eq!((zero.a, zero.k1, zero.da, zero.dk1), (1.0, 0.0, 0.0, 1.0));
        let kern = kernels(k, t).unwrap();
        prop_assert!((kern.da + k * kern.k1).abs() <= 1e-12);
        prop_assert!(kern.k1.abs() <= 1.0 + 1e-12);
        prop_assert!(kern.a.is_finite() && kern.dk1.is_finite());
    }

    #[test]
    fn kernels_near_double_root_are_finite_and_bounded(d in -1e-3f64..1e-3, t in 0.0f64..100.0) {
        let kern = kernels(1.0 + d, t).unwrap();
        prop_assert!(kern.k1.abs() <= 1.0 + 1e-12);
        prop_assert!(kern.a.is_finite() && kern.dk1.is_finite());
    }

    #[test]
    fn linear_flow_contracts_l2(f in field_strategy(), t in 0.0f64..50.0, sigma in 1.0f64..3.0) {
        let spec = transform_forward(&f).unwrap();
        let (u, _) = propagate_linear(&spec, sigma, t).unwrap();
        let out = transform_inverse(&u).unwrap();
        prop_assert!(lebesgue_norm(&out, 2.0).unwrap() <= (1.0 + 1e-10) * lebesgue_norm(&f, 2.0).unwrap());
    }

    #[test]
    fn duhamel_decay_is_symmetric(a in -3.0f64..5.0, b in -3.0f64..5.0) {
        prop_assert_eq!(duhamel_decay(a, b), duhamel_decay(b, a));
    }

    #[test]
    fn gn_theta_increases_with_q(q in 1.01f64..50.0, dq in 0.01f64..10.0, n in 1usize..=3, sigma in 1.0f64..4.0) {
        prop_assert!(gn_theta(q + dq, n, sigma) > gn_theta(q, n, sigma));
    }

    #[test]
    fn verdicts_are_one_sided(slope in -5.0f64..0.0, tol in 0.0f64..0.2) {
        let params = ModelParams::new(1, 1.0, 0.5, 4.0, 1.0).unwrap();
        let fit = DecayFit {
            quantity: Quantity::UL2,
            slope,
            intercept: 0.0,
            stderr: 0.0,
            window: (1.0, 10.0),
            samples: 20,
            r_squared: 1.0,
        };
        let v = check_rate(&fit, &params, Quantity::UL2, tol).unwrap();
        if slope <= -0.25 {
            prop_assert!(v.pass);
        }
    }

    #[test]
    fn power_law_fits_are_exact(rate in -3.0f64..0.0, amp in 0.01f64..100.0) {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 10.0).collect();
        let norms = times.iter().map(|&t| {
            let v = amp * (1.0 + t).powf(rate);
            NormRecord { l2: v, dt_l2: v, hsigma: v, lm: v }
        }).collect();
        let series = NormTimeSeries {
            times,
            norms,
            params: ModelParams::new(1, 1.0, 0.5, 4.0, 1.0).unwrap(),
            grid: GridSpec::new(1, 8, 1.0).unwrap(),
            provenance: Provenance { config_hash: 0, admissibility: None },
            outcome: Outcome::Completed,
        };
        let fit = fit_decay(&series, Quantity::HsigmaSemi, None).unwrap();
        prop_assert!((fit.slope - rate).abs() <= 1e-12);
        prop_assert!(fit.r_squared >= 1.0 - 1e-12);
    }

    #[test]
    fn strict_condition_matches_integrability(
        n in 1usize..=4, sigma in 1.0f64..3.0, frac in 0.05f64..0.95, m in 1.0f64..2.0, p in 1.01f64..12.0,
    ) {
        let params = ModelParams { n, sigma, alpha: frac * n as f64, p, m };
        let bound = admissibility(&params).cond_strict.bound;
        prop_assume!((p - bound).abs() > 1e-9);
        let integrable = nonlinearity_decay_exponent(&params, TargetSpace::Data) < -1.0;
        prop_assert_eq!(integrable, p > bound);
    }
}

#[test]
fn kernels_continuous_across_switch() {
    for t in [0.1, 1.0, 10.0, 50.0] {
        for side in [-1.0, 1.0] {
            let k = 1.0 + side * DOUBLE_ROOT_BAND;
            let inner = kernels(k - side * 1e-15, t).unwrap();
            let outer = kernels(k + side * 1e-15, t).unwrap();
            // dk1 changes sign near t = 1, so errors are measured against the kernel scale e^{-t}.
            let scale = (-t).exp();
            for (x, y) in [
                (inner.a, outer.a),
                (inner.k1, outer.k1),
                (inner.dk1, outer.dk1),
            ] {
                assert!(
                    (x - y).abs() <= 1e-10 * y.abs().max(scale),
                    "t={t} k={k}: {x} vs {y}"
                );
            }
        }
    }
}

#[test]
fn dimension_bound_monotone_in_alpha_and_sigma() {
    for m in [1.0, 1.25, 1.5, 1.75, 1.99] {
        for i in 0..20 {
            let sigma = 1.0 + 0.25 * i as f64;
            for j in 0..20 {
                let alpha = 0.1 + 0.2 * j as f64;
                let base = dimension_bound(sigma, alpha, m);
                assert!(dimension_bound(sigma, alpha + 0.2, m) >= base);
                assert!(dimension_bound(sigma + 0.25, alpha, m) >= base);
            }
        }
    }
    assert!(dimension_bound(1.0, 0.5, 2.0).is_infinite());
}

#[test]
fn vanishing_alpha_limit_is_linear_in_alpha() {
    for (n, sigma, m) in [(1, 1.0, 1.0), (2, 1.5, 1.5), (3, 2.0, 1.2)] {
        let p_crit = 1.0 + 2.0 * m * sigma / n as f64;
        for alpha in [1e-2, 1e-4, 1e-6, 1e-9] {
            let params = ModelParams {
                n,
                sigma,
                alpha,
                p: 4.0,
                m,
            };
            let gap = admissibility(&params).cond_strict.bound - p_crit;
            assert!((gap - alpha * m / n as f64).abs() <= 1e-12);
        }
    }
}

#[test]
fn integral_inequality_ratios_bounded() {
    let times = log_time_grid(41);
    for (a, b) in [
        (2.0, 0.5),
        (1.5, 1.2),
        (3.0, 3.0),
        (0.5, 2.0),
        (1.1, 0.0),
        (4.0, 1.01),
    ] {
        let full = integral_inequality_check(a, b, &times).unwrap();
        assert!(full.is_finite() && full < 20.0, "({a}, {b}) -> {full}");
    }
}

#[test]
fn fractional_laplacian_has_no_mean() {
    let grid = GridSpec::new(2, 32, 10.0).unwrap();
    let f = RealField::from_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1])).exp() + 0.5);
    let g = fractional_laplacian(&f, 1.5).unwrap();
    assert!(g.mean().abs() < 1e-14);
}

#[test]
fn seminorm_of_sine_is_norm_of_cosine() {
    let grid = GridSpec::new(1, 64, 2.0 * std::f64::consts::PI).unwrap();
    let s = RealField::from_fn(grid, |x| x[0].sin());
    let c = RealField::from_fn(grid, |x| x[0].cos());
    assert!(
        rel(
            sobolev_seminorm(&s, 1.0).unwrap(),
            lebesgue_norm(&c, 2.0).unwrap()
        ) < 1e-12
    );
}
