use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaxpi::grid::{Boundary, Grid};
use relaxpi::model::{build_drm1_1d, build_drm1_2d, Flux};
use relaxpi::spectral::stencil_symbol;
use relaxpi::transport::{
    advective_derivative, centered_stencil, cweno3_faces, upwind_stencil, HypScheme, ParScheme, Scheme, SchemeSpec,
    TransportOperator, CWENO_EPS, CWENO_P,
};

/// Max error of `d/dx sin(2 pi x)` on a periodic row of `n` cells with 4 ghosts.
fn derivative_error(scheme: Scheme, gamma: f64, n: usize) -> f64 {
    let dx = 1.0 / n as f64;
    let g = 4;
    let row: Vec<f64> = (0..n + 2 * g).map(|i| (2.0 * PI * (i as f64 - g as f64 + 0.5) * dx).sin()).collect();
    (g..n + g)
        .map(|i| {
            let x = (i as f64 - g as f64 + 0.5) * dx;
            let d = advective_derivative(scheme, gamma, &row, i, 1, dx) / gamma;
            (d - 2.0 * PI * (2.0 * PI * x).cos()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn stencils_converge_at_their_order() {
    let cases = [
        (Scheme::hyperbolic(HypScheme::Upwind1, 1.0), 1.0, 1.0),
        (Scheme::hyperbolic(HypScheme::Upwind1, -1.0), -1.0, 1.0),
        (Scheme::hyperbolic(HypScheme::Upwind3, 1.0), 1.0, 3.0),
        (Scheme::hyperbolic(HypScheme::Upwind3, -1.0), -1.0, 3.0),
        (Scheme::hyperbolic(HypScheme::Upwind4, 2.0), 2.0, 4.0),
        (Scheme::hyperbolic(HypScheme::Upwind4, -2.0), -2.0, 4.0),
        (Scheme::parabolic(ParScheme::Centered2), 3.0, 2.0),
        (Scheme::parabolic(ParScheme::Centered4), -3.0, 4.0),
    ];
    for (s, g, p) in cases {
        let e1 = derivative_error(s, g, 64);
        let e2 = derivative_error(s, g, 128);
        let order = (e1 / e2).log2();
        assert!((order - p).abs() < 0.15, "{s:?} gamma={g}: order {order}");
    }
}

#[test]
fn symbols_match_derivative_at_small_wavenumber() {
    for s in [HypScheme::Upwind1, HypScheme::Upwind3, HypScheme::Upwind4] {
        for g in [1.0, -1.0] {
            let st = upwind_stencil(s, g).unwrap();
            let z = 1e-3;
            let sym = stencil_symbol(&st, z);
            assert!((sym.im - z).abs() < 1e-6 * z, "{s:?}");
        }
    }
    for p in [ParScheme::Centered2, ParScheme::Centered4] {
        let sym = stencil_symbol(&centered_stencil(p), 0.7);
        assert!(sym.re.abs() < 1e-15);
    }
    // Upwind damping: the real part of the symbol of d/dx has the sign of
    // gamma, so -gamma d/dx dissipates.
    for z in [0.3, 1.0, 2.0, PI] {
        for s in [HypScheme::Upwind1, HypScheme::Upwind3, HypScheme::Upwind4] {
            assert!(stencil_symbol(&upwind_stencil(s, 1.0).unwrap(), z).re >= -1e-15);
            assert!(stencil_symbol(&upwind_stencil(s, -1.0).unwrap(), z).re <= 1e-15);
        }
    }
}

#[test]
fn cweno3_is_exact_on_linear_data_and_bounded_at_jumps() {
    let (l, r) = cweno3_faces(1.0, 2.0, 3.0, CWENO_EPS, CWENO_P);
    assert!((l - 1.5).abs() < 1e-12 && (r - 2.5).abs() < 1e-12);
    for (a, b, c) in [(0.0, 0.0, 1.0), (0.0, 1.0, 1.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)] {
        let (l, r) = cweno3_faces(a, b, c, CWENO_EPS, CWENO_P);
        for v in [l, r] {
            assert!((-1e-15..=1.0 + 1e-15).contains(&v), "{a} {b} {c}: {v}");
        }
    }
}

#[test]
fn cweno3_is_rejected_in_one_dimension() {
    let m = build_drm1_1d(1.0, 1.0, 0.0, 1e-4, Flux::identity(1), Flux::identity(1)).unwrap();
    let grid = Grid::new_1d(0.0, 1.0, 16).unwrap();
    let s = SchemeSpec::new(HypScheme::Cweno3, ParScheme::Centered2);
    assert!(TransportOperator::new(m, grid, s, [Boundary::Periodic; 2]).is_err());
}

fn random_state(op: &TransportOperator, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..op.state_len()).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `d/dt` of interior mass plus outflow, per component.
fn mass_rate(op: &TransportOperator, state: &mut [f64]) -> Vec<f64> {
    let mut out = vec![0.0; state.len()];
    op.rhs(state, &mut out);
    let (m, a) = op.balance(&out);
    m.iter().zip(&a).map(|(x, y)| x + y).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semidiscrete_operator_conserves_mass(
        seed in 0u64..1000,
        hyp in prop::sample::select(vec![HypScheme::Upwind1, HypScheme::Upwind3, HypScheme::Upwind4]),
        par in prop::sample::select(vec![ParScheme::Centered2, ParScheme::Centered4]),
        periodic in any::<bool>(),
        le in -10.0f64..-2.0,
    ) {
        let b = Flux::scalar_with_derivative(|u| 0.1 * u * u * u, |u| 0.3 * u * u);
        let a = Flux::scalar_with_derivative(|u| 0.5 * u * u, |u| u);
        let m = build_drm1_1d(2.0, 1.0, 0.0, 10f64.powf(le), a, b).unwrap();
        let grid = Grid::new_1d(0.0, 1.0, 24).unwrap();
        let bc = if periodic { Boundary::Periodic } else { Boundary::ZeroGradient };
        let op = TransportOperator::new(m, grid, SchemeSpec::new(hyp, par), [bc; 2]).unwrap();
        let mut st = random_state(&op, seed);
        let scale = 10f64.powf(-le);
        for r in mass_rate(&op, &mut st) {
            prop_assert!(r.abs() <= 1e-12 * scale, "rate {r:e}");
        }
    }
}

#[test]
fn planar_operator_conserves_mass() {
    let a1 = Flux::scalar_with_derivative(|u| u * u, |u| 2.0 * u);
    let a2 = Flux::linear(1, 0.5);
    let m = build_drm1_2d(3.0, 3.0, 1.0, 0.0, 1e-6, a1, a2, Flux::linear(1, 0.1), None).unwrap();
    let grid = Grid::new_2d((0.0, 1.0), 12, (0.0, 1.0), 12).unwrap();
    for hyp in [HypScheme::Upwind3, HypScheme::Cweno3] {
        for bc in [Boundary::Periodic, Boundary::ZeroGradient] {
            let op = TransportOperator::new(m.clone(), grid.clone(), SchemeSpec::new(hyp, ParScheme::Centered4), [bc; 2])
                .unwrap();
            let mut st = random_state(&op, 3);
            let r = mass_rate(&op, &mut st)[0];
            assert!(r.abs() <= 1e-12 * 1e6, "{hyp:?} {bc:?}: {r:e}");
        }
    }
}

#[test]
fn equilibrium_constant_state_is_stationary() {
    let m = build_drm1_1d(2.0, 1.0, 0.3, 1e-8, Flux::scalar(|u| u * u), Flux::linear(1, 0.2)).unwrap();
    let grid = Grid::new_1d(0.0, 1.0, 20).unwrap();
    let op = TransportOperator::new(m.clone(), grid.clone(), SchemeSpec::new(HypScheme::Upwind4, ParScheme::Centered4), [
        Boundary::ZeroGradient;
        2
    ])
    .unwrap();
    let u0 = relaxpi::grid::MacroField::from_values(&grid, 1, vec![0.7; 20]).unwrap();
    let mut st = relaxpi::grid::init_kinetic(&m, &grid, &u0).unwrap().data;
    let mut out = vec![0.0; st.len()];
    op.rhs(&mut st, &mut out);
    let worst = out.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(worst < 1e-6, "{worst:e}");
}
