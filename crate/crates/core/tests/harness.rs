use proptest::prelude::*;
use relaxpi::harness::{
    self, error_norms, richardson, validate_ladder, ConvergenceTable, Method, Norms, RunSpec,
};
use relaxpi::problems::catalog;

fn norms(e: f64) -> Norms {
    Norms { l1: e, l2: e, linf: e }
}

#[test]
fn runs_are_deterministic() {
    let p = catalog("viscous_lwr").unwrap();
    let spec = RunSpec { cells: 50, t_end: 0.01, ..RunSpec::recommended(&p) };
    let a = harness::run(&p, &spec, &[0.005]).unwrap();
    let b = harness::run(&p, &spec, &[0.005]).unwrap();
    assert_eq!(a.u.data, b.u.data);
    assert_eq!(a.snapshots[0].1.data, b.snapshots[0].1.data);
    assert_eq!(a.u.to_csv(&a.grid), b.u.to_csv(&b.grid));
}

#[test]
fn runs_conserve_mass_and_hit_snapshot_times() {
    for name in ["linear_diffusion", "viscous_lwr", "bl_gravity"] {
        let p = catalog(name).unwrap();
        let spec = RunSpec { cells: 40, t_end: 0.02, ..RunSpec::recommended(&p) };
        let out = harness::run(&p, &spec, &[0.0, 0.0137, 0.5]).unwrap();
        assert!(out.mass_drift() <= 1e-12, "{name}: {:e}", out.mass_drift());
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(times, vec![0.0, 0.0137, 0.02]);
    }
}

#[test]
fn direct_and_projective_agree_at_small_eps() {
    let p = catalog("linear_diffusion").unwrap();
    let base = RunSpec { cells: 32, t_end: 2e-3, epsilon: 1e-6, ..RunSpec::recommended(&p) };
    let pi = harness::run(&p, &base, &[]).unwrap();
    let direct = harness::run(&p, &RunSpec { method: Method::Direct, ..base.clone() }, &[]).unwrap();
    let imex = harness::run(&p, &RunSpec { method: Method::Imex, ..base.clone() }, &[]).unwrap();
    let d = error_norms(&pi.grid, &pi.u, &direct.u).linf;
    let i = error_norms(&pi.grid, &pi.u, &imex.u).linf;
    assert!(d < 1e-8, "direct {d:e}");
    // The IMEX step is first order in time, so only closeness is expected.
    assert!(i < 1e-4, "imex {i:e}");
}

#[test]
fn spatial_convergence_needs_an_exact_solution() {
    let p = catalog("viscous_lwr").unwrap();
    let spec = RunSpec::recommended(&p);
    assert!(harness::spatial_convergence(&p, &spec, &[16, 32], false).is_err());
}

#[test]
fn ladders_must_halve() {
    assert!(validate_ladder(&[0.1, 0.05, 0.025], 1e-3).is_ok());
    assert!(validate_ladder(&[0.1, 0.06], 1e-3).is_err());
    assert!(validate_ladder(&[0.1], 1e-3).is_err());
    assert!(validate_ladder(&[0.1, 0.05], 0.06).is_err());
}

#[test]
fn parallel_ladders_match_serial_ones() {
    let p = catalog("advection_diffusion").unwrap();
    let spec = RunSpec { cells: 16, t_end: 2e-3, epsilon: 1e-10, k: 3, ..RunSpec::recommended(&p) };
    let dts = [5e-4, 2.5e-4, 1.25e-4];
    let a = harness::temporal_convergence(&p, &spec, &dts, false).unwrap();
    let b = harness::temporal_convergence(&p, &spec, &dts, true).unwrap();
    assert_eq!(a, b);
}

#[test]
fn table_fits_known_orders() {
    let h = [0.1, 0.05, 0.025, 0.0125];
    let e: Vec<Norms> = h.iter().map(|h: &f64| norms(3.0 * h.powi(3))).collect();
    let t = ConvergenceTable::from_errors(&h, &e, 0.0);
    for o in t.pre_plateau_orders() {
        assert!((o[0] - 3.0).abs() < 1e-12);
    }
    assert!((t.fitted_orders().unwrap()[2] - 3.0).abs() < 1e-12);
    // Rows below the threshold are excluded from the fit.
    let mut e2 = e.clone();
    e2[3] = norms(1e-12);
    let t2 = ConvergenceTable::from_errors(&h, &e2, 1e-10);
    assert!(t2.rows[3].plateau);
    assert!((t2.fitted_orders().unwrap()[0] - 3.0).abs() < 1e-12);
    assert_eq!(t2.pre_plateau_orders().len(), 2);
    assert_eq!(t2.floor().l1, 1e-12);
}

#[test]
fn speedup_formula() {
    assert!((harness::theoretical_speedup(5.1e-5, 1e-5, 2) - 1.7).abs() < 1e-12);
    assert!((harness::theoretical_speedup(5.13e-5, 1e-7, 2) - 171.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn richardson_removes_the_leading_term(
        u in prop::collection::vec(-5.0f64..5.0, 1..8),
        c in -3.0f64..3.0,
        dt in 1e-3f64..0.5,
        p in 1u32..5,
    ) {
        let a: Vec<f64> = u.iter().map(|v| v + c * dt.powi(p as i32)).collect();
        let b: Vec<f64> = u.iter().map(|v| v + c * (dt / 2.0).powi(p as i32)).collect();
        let r = richardson(&a, &b, p as f64);
        for (x, y) in r.iter().zip(&u) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn csv_round_trip(errs in prop::collection::vec(1e-12f64..1.0, 2..6)) {
        let h: Vec<f64> = (0..errs.len()).map(|i| 0.1 / 2f64.powi(i as i32)).collect();
        let e: Vec<Norms> = errs.iter().map(|v| Norms { l1: *v, l2: 2.0 * v, linf: 3.0 * v }).collect();
        let t = ConvergenceTable::from_errors(&h, &e, 1e-9);
        let back = ConvergenceTable::from_csv(&t.to_csv(), 1e-9).unwrap();
        prop_assert_eq!(t, back);
    }
}
