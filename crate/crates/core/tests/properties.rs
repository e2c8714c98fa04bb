use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use uwmi::coupling::{coupling_from_kernel, random_frame, CouplingMatrix};
use uwmi::estimation::{estimate_mii, estimation_error, orthogonal_pilot_currents, simulate_measurement};
use uwmi::linalg::{CMatrix3, CVector3};
use uwmi::multiuser::{max_leakage, nullspace_precoders};
use uwmi::strategies::{select_siso_cs, simo_cs_capacity, waterfill, LinkBudget, Strategy as CoilStrategy};

fn complex_matrix() -> impl Strategy<Value = CMatrix3> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9)
        .prop_map(|v| CMatrix3::from_iterator(v.into_iter().map(|(re, im)| Complex64::new(re * 1e-11, im * 1e-11))))
}

fn complex_vector() -> impl Strategy<Value = CVector3> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3)
        .prop_map(|v| CVector3::from_iterator(v.into_iter().map(|(re, im)| Complex64::new(re, im))))
}

fn budget(p_dbm: f64) -> LinkBudget {
    LinkBudget::from_dbm(1e6, p_dbm, 0.5, -140.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frames_are_rotations(seed in any::<u64>()) {
        let f = random_frame(seed);
        let m = f.matrix();
        prop_assert!((m.transpose() * m - Matrix3::identity()).norm() < 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frobenius_is_orientation_free(k in complex_matrix(), a in any::<u64>(), b in any::<u64>()) {
        let c = coupling_from_kernel(&k, &random_frame(a), &random_frame(b));
        prop_assert!((c.frobenius() - k.norm()).abs() <= 1e-12 * k.norm());
    }

    #[test]
    fn selected_entry_and_column_bounds(k in complex_matrix(), a in any::<u64>(), b in any::<u64>()) {
        let c = coupling_from_kernel(&k, &random_frame(a), &random_frame(b));
        let f = c.frobenius();
        let (p, q) = select_siso_cs(&c);
        let best = c.entry(q, p).norm();
        prop_assert!(best >= f / 3.0 * (1.0 - 1e-12));
        prop_assert!(best <= c.m_star * (1.0 + 1e-12));
        let tx = simo_cs_capacity(&c, &budget(0.0)).selected_tx[0];
        let energy: f64 = (0..3).map(|r| c.entry(r, tx).norm_sqr()).sum();
        prop_assert!(energy >= f * f / 3.0 * (1.0 - 1e-12));
        prop_assert!(energy <= c.m_star * c.m_star * (1.0 + 1e-12));
    }

    #[test]
    fn waterfill_spends_exactly_the_budget(g in prop::array::uniform3(0.0f64..10.0), p in 0.0f64..100.0) {
        prop_assume!(g.iter().any(|&x| x > 1e-6));
        let a = waterfill(g, p).unwrap();
        prop_assert!((a.iter().sum::<f64>() - p).abs() <= 1e-9 * p.max(1.0));
        // Active channels share one water level; silent ones sit above it.
        let level: Vec<f64> = (0..3).filter(|&i| a[i] > 0.0).map(|i| a[i] + 1.0 / g[i]).collect();
        for l in &level {
            prop_assert!((l - level[0]).abs() <= 1e-9 * level[0]);
        }
        for i in 0..3 {
            if a[i] == 0.0 && g[i] > 0.0 && !level.is_empty() {
                prop_assert!(1.0 / g[i] >= level[0] * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn capacity_grows_with_power(k in complex_matrix(), a in any::<u64>(), p in -60.0f64..30.0) {
        let c = coupling_from_kernel(&k, &random_frame(a), &random_frame(a ^ 1));
        for s in CoilStrategy::ALL {
            let lo = s.evaluate(&c, &budget(p)).capacity;
            let hi = s.evaluate(&c, &budget(p + 3.0)).capacity;
            prop_assert!(hi >= lo, "{}", s.name());
        }
    }

    #[test]
    fn mimo_with_mii_dominates(k in complex_matrix(), a in any::<u64>(), p in -60.0f64..30.0) {
        let c = coupling_from_kernel(&k, &random_frame(a), &random_frame(a ^ 1));
        let lb = budget(p);
        let best = CoilStrategy::MimoMii.evaluate(&c, &lb).capacity;
        for s in CoilStrategy::ALL {
            prop_assert!(s.evaluate(&c, &lb).capacity <= best * (1.0 + 1e-9) + 1e-12, "{}", s.name());
        }
    }

    #[test]
    fn precoders_null_other_rows(r0 in complex_vector(), r1 in complex_vector(), r2 in complex_vector()) {
        let rows = vec![r0, r1, r2];
        let set = nullspace_precoders(&rows, 1.0).unwrap();
        prop_assume!(!set.has_warning());
        prop_assert!(max_leakage(&rows, &set) < 1e-10);
        for u in &set.precoders {
            prop_assert!((u.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_estimation_is_exact(k in complex_matrix(), seed in any::<u64>(), p_dbm in -60.0f64..40.0) {
        prop_assume!(k.norm() > 0.0);
        let truth = CouplingMatrix::from_matrix(k);
        let w = std::f64::consts::TAU * 1e6;
        let pilots = orthogonal_pilot_currents(10f64.powf(p_dbm / 10.0) * 1e-3, 0.5, seed).unwrap();
        let meas = simulate_measurement(&[truth], &pilots, 0.0, w, 0.5, seed).unwrap();
        let est = estimate_mii(&meas, &pilots, 0.5, w).unwrap();
        prop_assert!(estimation_error(&k, &est[0].m).unwrap() < 1e-10);
    }
}

#[test]
fn strategy_names_round_trip() {
    for s in CoilStrategy::ALL {
        assert_eq!(CoilStrategy::from_name(s.name()), Some(s));
    }
}
