use proptest::prelude::*;

use stabreg_core::analysis::gamma_grid;
use stabreg_core::linalg::{fmt17, min_norm_solution, numerical_rank, svd, DenseMatrix, Vector};
use stabreg_core::operators::derivative_operator;
use stabreg_core::perturbation::white_noise;
use stabreg_core::solvers::{
    limit_filter_factors, stabreg_damping_factors, stabreg_filter_factors,
    tikhonov_damping_factors, tikhonov_filter_factors,
};

fn sigma_vec(raw: &[f64]) -> Vector {
    let mut s: Vec<f64> = raw.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    Vector::from_vec(s).unwrap()
}

fn dense_from(m: usize, n: usize, data: &[f64]) -> DenseMatrix {
    DenseMatrix::from_shape_fn(m, n, |(i, j)| data[i * n + j]).unwrap()
}

proptest! {
    #[test]
    fn filter_factors_stay_in_the_unit_interval(
        raw in prop::collection::vec(1e-10f64..1e4, 1..12),
        gamma in 1e-12f64..1e14,
    ) {
        let s = sigma_vec(&raw);
        for prof in [
            stabreg_filter_factors(&s, gamma).unwrap(),
            tikhonov_filter_factors(&s, gamma).unwrap(),
            limit_filter_factors(&s).unwrap(),
        ] {
            for &phi in prof.factors.iter() {
                prop_assert!((0.0..=1.0).contains(&phi), "phi = {phi}");
            }
        }
    }

    #[test]
    fn stabilized_damping_never_exceeds_tikhonov_damping(
        raw in prop::collection::vec(1e-10f64..1e4, 1..12),
        gamma in 1e-12f64..1e14,
    ) {
        let s = sigma_vec(&raw);
        let ds = stabreg_damping_factors(&s, gamma).unwrap();
        let dt = tikhonov_damping_factors(&s, gamma).unwrap();
        for i in 0..s.len() {
            prop_assert!(ds.get(i) <= dt.get(i));
        }
    }

    #[test]
    fn damping_complements_the_filter(
        raw in prop::collection::vec(1e-8f64..1e3, 1..10),
        gamma in 1e-9f64..1e12,
    ) {
        let s = sigma_vec(&raw);
        let phi = stabreg_filter_factors(&s, gamma).unwrap();
        let d = stabreg_damping_factors(&s, gamma).unwrap();
        for i in 0..s.len() {
            prop_assert!((phi.factors.get(i) + d.get(i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn filters_approach_their_large_gamma_limit_monotonically(
        sigma in 1e-4f64..1.0,
    ) {
        let s = Vector::from_vec(vec![sigma]).unwrap();
        let lim = limit_filter_factors(&s).unwrap().factors.get(0);
        let mut prev_gap = f64::INFINITY;
        for k in 0..8 {
            let gamma = 10f64.powi(2 * k);
            let phi = stabreg_filter_factors(&s, gamma).unwrap().factors.get(0);
            let gap = (phi - lim).abs();
            prop_assert!(gap <= prev_gap + 1e-15, "gap grew at gamma = {gamma}");
            prev_gap = gap;
        }
        prop_assert!(prev_gap < 1e-10);
    }

    #[test]
    fn gamma_grid_is_sorted_with_exact_endpoints(
        lo_exp in -8f64..2.0,
        span in 0.5f64..12.0,
        count in 2usize..40,
    ) {
        let lo = 10f64.powf(lo_exp);
        let hi = 10f64.powf(lo_exp + span);
        let g = gamma_grid(lo, hi, count).unwrap();
        prop_assert_eq!(g.len(), count);
        prop_assert_eq!(g.get(0).to_bits(), lo.to_bits());
        prop_assert_eq!(g.get(count - 1).to_bits(), hi.to_bits());
        for i in 1..count {
            prop_assert!(g.get(i) > g.get(i - 1));
        }
    }

    #[test]
    fn white_noise_is_deterministic_per_seed(
        data in prop::collection::vec(-10.0f64..10.0, 1..20),
        eta in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let b = Vector::from_vec(data).unwrap();
        let x = white_noise(&b, eta, seed).unwrap();
        let y = white_noise(&b, eta, seed).unwrap();
        for i in 0..b.len() {
            prop_assert_eq!(x.get(i).to_bits(), y.get(i).to_bits());
        }
    }

    #[test]
    fn derivative_operators_annihilate_their_null_spaces(
        n in 3usize..40,
        c0 in -5.0f64..5.0,
        c1 in -5.0f64..5.0,
    ) {
        let d1 = derivative_operator(n, 1).unwrap();
        let constant = Vector::from_fn(n, |_| c0).unwrap();
        for &v in d1.matvec(&constant).iter() {
            prop_assert_eq!(v, 0.0);
        }
        let d2 = derivative_operator(n, 2).unwrap();
        let affine = Vector::from_fn(n, |i| c0 + c1 * i as f64).unwrap();
        for &v in d2.matvec(&affine).iter() {
            prop_assert!(v.abs() < 1e-9 * (c0.abs() + c1.abs() * n as f64 + 1.0));
        }
    }

    #[test]
    fn svd_reconstructs_small_matrices(
        data in prop::collection::vec(-5.0f64..5.0, 12),
    ) {
        let a = dense_from(4, 3, &data);
        let s = svd(&a).unwrap();
        let mut max_dev = 0.0f64;
        for i in 0..4 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += s.u_factor.get(i, k) * s.singular_values.get(k) * s.v_factor.get(j, k);
                }
                max_dev = max_dev.max((acc - a.get(i, j)).abs());
            }
        }
        prop_assert!(max_dev < 1e-10, "max deviation = {max_dev:e}");
        for i in 1..3 {
            prop_assert!(s.singular_values.get(i) <= s.singular_values.get(i - 1));
        }
    }

    #[test]
    fn min_norm_solution_satisfies_the_normal_equations(
        data in prop::collection::vec(-3.0f64..3.0, 20),
        rhs in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let a = dense_from(5, 4, &data);
        let b = Vector::from_vec(rhs).unwrap();
        let s = svd(&a).unwrap();
        let u = min_norm_solution(&s, &b, None);
        let lhs = a.gram().matvec(&u);
        let want = a.tr_matvec(&b);
        let scale = 1.0 + want.norm();
        for i in 0..4 {
            prop_assert!((lhs.get(i) - want.get(i)).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn rank_is_invariant_under_row_reversal(
        data in prop::collection::vec(-2.0f64..2.0, 24),
    ) {
        let a = dense_from(6, 4, &data);
        let rev = DenseMatrix::from_shape_fn(6, 4, |(i, j)| a.get(5 - i, j)).unwrap();
        let ra = numerical_rank(&svd(&a).unwrap(), None);
        let rb = numerical_rank(&svd(&rev).unwrap(), None);
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn fmt17_round_trips_every_double(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt17(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn data_space_bound_holds_for_random_problems(
        data in prop::collection::vec(-2.0f64..2.0, 30),
        delta in prop::collection::vec(-0.01f64..0.01, 6),
        gamma_exp in -6f64..6.0,
    ) {
        use stabreg_core::analysis::bound_report;
        use stabreg_core::operators::identity_operator;
        use stabreg_core::solvers::{stabreg_solve, RegConfig};

        let a = dense_from(6, 5, &data);
        let b = Vector::from_fn(6, |i| data[i] + 0.5).unwrap();
        let bt = Vector::from_fn(6, |i| b.get(i) + delta[i]).unwrap();
        let gamma = 10f64.powf(gamma_exp);
        let cfg = RegConfig::zero(gamma, identity_operator(5).unwrap()).unwrap();
        let u_g = stabreg_solve(&a, &b, &cfg).unwrap();
        let u_gt = stabreg_solve(&a, &bt, &cfg).unwrap();
        let r = bound_report(&a, &b, &bt, &u_g, &u_gt, gamma).unwrap();
        prop_assert!(
            r.lhs_data <= r.rhs_data + 1e-10 * (1.0 + r.rhs_data),
            "lhs = {:e}, rhs = {:e}", r.lhs_data, r.rhs_data
        );
        if let (Some(lhs), Some(rhs)) = (r.lhs_sol, r.rhs_sol) {
            prop_assert!(lhs <= rhs + 1e-10 * (1.0 + rhs));
        }
    }

    #[test]
    fn spectral_norm_bounds_random_products(
        data in prop::collection::vec(-4.0f64..4.0, 35),
        xs in prop::collection::vec(-4.0f64..4.0, 5),
    ) {
        let a = dense_from(7, 5, &data);
        let x = Vector::from_vec(xs).unwrap();
        let s = svd(&a).unwrap();
        let s1 = s.singular_values.get(0);
        let ax = a.matvec(&x).norm();
        prop_assert!(ax <= s1 * x.norm() + 1e-9 * (1.0 + s1 * x.norm()));
        let sk = s.singular_values.get(4);
        prop_assert!(ax >= sk * x.norm() - 1e-9 * (1.0 + sk * x.norm()));
    }
}
