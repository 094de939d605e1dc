//! Catalog of test problems: fluxes, diffusions, initial data, domains,
//! boundary rules, final times, exact solutions and recommended constants.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::grid::{cell_averages, Boundary, Grid, MacroField};
use crate::model::{build_drm1_1d, build_drm1_2d, build_drm2_1d, build_ovm_1d, check_mmf, Flux, KineticModel, ModelKind};
use crate::transport::{HypScheme, ParScheme, SchemeSpec};
use crate::{Error, Result};

pub type InitFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;

pub const NAMES: [&str; 9] = [
    "linear_diffusion",
    "advection_diffusion",
    "viscous_lwr",
    "burgers_steady_shock",
    "burgers_strongly_degenerate",
    "burgers_2d_degenerate",
    "three_phase",
    "bl_gravity",
    "bl_2d",
];

/// Kinetic model and its constants.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelChoice {
    pub kind: ModelKind,
    /// `lambda` (twice), `(lambda_m, lambda_p)` or `(lambda1, lambda2)`.
    pub lambda: [f64; 2],
    pub theta: f64,
    pub mu: f64,
}

/// Recommended discretization for a problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Recommended {
    pub model: ModelChoice,
    pub epsilon: f64,
    pub cfl: f64,
    pub k: usize,
    pub order: usize,
    pub scheme: SchemeSpec,
}

#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub dim: usize,
    pub nk: usize,
    /// `A_d` per direction.
    pub flux: Vec<Flux>,
    /// Effective diffusion, scaling `xi` included.
    pub diffusion: Flux,
    pub xi: f64,
    pub domain: [(f64, f64); 2],
    pub cells: [usize; 2],
    pub boundary: [Boundary; 2],
    pub t_end: f64,
    pub discontinuous: bool,
    pub u0: InitFn,
    pub exact: Option<ExactFn>,
    pub recommended: Recommended,
    /// States reachable by the solution, used for admissibility checks.
    pub state_box: Vec<(f64, f64)>,
    /// Named scalar parameters, for the catalog dump.
    pub params: Vec<(String, f64)>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl Problem {
    pub fn grid(&self) -> Result<Grid> {
        self.grid_with(self.cells[0])
    }

    /// Grid with `cells` cells along `x` (and the matching count along `y`).
    pub fn grid_with(&self, cells: usize) -> Result<Grid> {
        let (x0, x1) = self.domain[0];
        if self.dim == 1 {
            Grid::new_1d(x0, x1, cells)
        } else {
            let (y0, y1) = self.domain[1];
            let ny = ((y1 - y0) / (x1 - x0) * cells as f64).round() as usize;
            Grid::new_2d((x0, x1), cells, (y0, y1), ny)
        }
    }

    pub fn initial(&self, grid: &Grid) -> Result<MacroField> {
        cell_averages(grid, self.nk, &*self.u0, self.discontinuous)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn evaluate_exact(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        let e = self.exact.as_ref().ok_or_else(|| Error::NoExact(self.name.clone()))?;
        let mut out = vec![0.0; self.nk];
        e(x, t, &mut out);
        Ok(out)
    }

    /// Cell averages of the exact solution at time `t`.
    pub fn exact_averages(&self, grid: &Grid, t: f64) -> Result<MacroField> {
        let e = self.exact.as_ref().ok_or_else(|| Error::NoExact(self.name.clone()))?.clone();
        cell_averages(grid, self.nk, &move |x: &[f64], o: &mut [f64]| e(x, t, o), false)
    }

    pub fn build_model(&self, choice: &ModelChoice, epsilon: f64) -> Result<KineticModel> {
        let b = self.diffusion.clone();
        let a = self.flux[0].clone();
        match (choice.kind, self.dim) {
            (ModelKind::Drm1, 1) => build_drm1_1d(choice.lambda[0], choice.theta, choice.mu, epsilon, a, b),
            (ModelKind::Drm2, 1) => {
                build_drm2_1d(choice.lambda[0], choice.lambda[1], choice.theta, choice.mu, epsilon, a, b)
            }
            (ModelKind::Ovm, 1) => build_ovm_1d(choice.lambda[0], choice.theta, epsilon, a, b),
            (ModelKind::Drm1Planar, 2) => build_drm1_2d(
                choice.lambda[0],
                choice.lambda[1],
                choice.theta,
                choice.mu,
                epsilon,
                a,
                self.flux[1].clone(),
                b,
                None,
            ),
            (k, d) => Err(Error::param("model", format!("{} is not available in {d}D", k.as_str()))),
        }
    }

    pub fn recommended_model(&self) -> Result<KineticModel> {
        self.build_model(&self.recommended.model, self.recommended.epsilon)
    }

    /// Structured text description of every parameter.
    pub fn describe(&self) -> String {
        let r = &self.recommended;
        let mut s = String::new();
        let _ = writeln!(s, "[{}]", self.name);
        let _ = writeln!(s, "dim = {}", self.dim);
        let _ = writeln!(s, "components = {}", self.nk);
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "x = [{}, {}]", self.domain[0].0, self.domain[0].1);
        if self.dim == 2 {
            let _ = writeln!(s, "y = [{}, {}]", self.domain[1].0, self.domain[1].1);
        }
        let _ = writeln!(s, "cells = {}", self.cells[0]);
        let _ = writeln!(s, "boundary = {:?}", self.boundary[0]);
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let _ = writeln!(s, "discontinuous = {}", self.discontinuous);
        let _ = writeln!(s, "exact = {}", self.has_exact());
        let _ = writeln!(s, "model = {}", r.model.kind.as_str());
        let _ = writeln!(s, "lambda = [{}, {}]", r.model.lambda[0], r.model.lambda[1]);
        let _ = writeln!(s, "theta = {}", r.model.theta);
        let _ = writeln!(s, "mu = {}", r.model.mu);
        let _ = writeln!(s, "epsilon = {}", r.epsilon);
        let _ = writeln!(s, "cfl = {}", r.cfl);
        let _ = writeln!(s, "K = {}", r.k);
        let _ = writeln!(s, "order = {}", r.order);
        let _ = writeln!(s, "hyperbolic = {:?}", r.scheme.hyperbolic);
        let _ = writeln!(s, "parabolic = {:?}", r.scheme.parabolic);
        s
    }

    /// Sampled admissibility of the recommended model over the state box.
    pub fn check_recommended(&self) -> Result<bool> {
        Ok(check_mmf(&self.recommended_model()?, &self.state_box, 401)?.is_mmf)
    }
}

fn get(params: &[(&str, f64)], allowed: &[&str], name: &str, default: f64) -> f64 {
    debug_assert!(allowed.contains(&name));
    params.iter().rev().find(|(k, _)| *k == name).map(|(_, v)| *v).unwrap_or(default)
}

fn check_params(problem: &str, params: &[(&str, f64)], allowed: &[&str]) -> Result<()> {
    for (k, v) in params {
        if !allowed.contains(k) {
            return Err(Error::param(k, format!("not a parameter of `{problem}` (allowed: {})", allowed.join(", "))));
        }
        if !v.is_finite() {
            return Err(Error::param(k, "must be finite"));
        }
    }
    Ok(())
}

pub fn catalog(name: &str) -> Result<Problem> {
    catalog_with(name, &[])
}

/// Catalog entry with overridden problem parameters (e.g. `xi`, `a`, `g`).
pub fn catalog_with(name: &str, params: &[(&str, f64)]) -> Result<Problem> {
    match name {
        "linear_diffusion" => {
            let allowed = ["xi", "delta"];
            check_params(name, params, &allowed)?;
            Ok(linear_diffusion(get(params, &allowed, "xi", 1e-2), get(params, &allowed, "delta", 0.1)))
        }
        "advection_diffusion" => {
            let allowed = ["c", "xi", "delta"];
            check_params(name, params, &allowed)?;
            Ok(advection_diffusion(
                get(params, &allowed, "c", 10.0),
                get(params, &allowed, "xi", 1.0),
                get(params, &allowed, "delta", 0.1),
            ))
        }
        "viscous_lwr" => {
            let allowed = ["xi"];
            check_params(name, params, &allowed)?;
            Ok(viscous_lwr(get(params, &allowed, "xi", 1e-2)))
        }
        "burgers_steady_shock" => {
            let allowed = ["xi", "delta"];
            check_params(name, params, &allowed)?;
            Ok(burgers_steady_shock(get(params, &allowed, "xi", 1e-3), get(params, &allowed, "delta", 0.01)))
        }
        "burgers_strongly_degenerate" => {
            let allowed = ["xi"];
            check_params(name, params, &allowed)?;
            Ok(burgers_strongly_degenerate(get(params, &allowed, "xi", 0.1)))
        }
        "burgers_2d_degenerate" => {
            let allowed = ["xi"];
            check_params(name, params, &allowed)?;
            Ok(burgers_2d_degenerate(get(params, &allowed, "xi", 0.1)))
        }
        "three_phase" => {
            let allowed = ["xi"];
            check_params(name, params, &allowed)?;
            Ok(three_phase(get(params, &allowed, "xi", 0.1)))
        }
        "bl_gravity" => {
            let allowed = ["xi", "a", "g"];
            check_params(name, params, &allowed)?;
            let a = get(params, &allowed, "a", 1.0);
            if !(a > 0.0) {
                return Err(Error::param("a", "viscosity ratio must be positive"));
            }
            Ok(bl_gravity(get(params, &allowed, "xi", 0.01), a, get(params, &allowed, "g", 0.0)))
        }
        "bl_2d" => {
            let allowed = ["xi"];
            check_params(name, params, &allowed)?;
            Ok(bl_2d(get(params, &allowed, "xi", 0.01)))
        }
        _ => Err(Error::UnknownProblem(name.to_string())),
    }
}

fn drm1(lambda: f64, theta: f64) -> ModelChoice {
    ModelChoice { kind: ModelKind::Drm1, lambda: [lambda, lambda], theta, mu: 0.0 }
}

fn default_scheme() -> SchemeSpec {
    SchemeSpec::new(HypScheme::Upwind3, ParScheme::Centered4)
}

fn rec(model: ModelChoice, cfl: f64, order: usize) -> Recommended {
    Recommended { model, epsilon: 1e-7, cfl, k: 2, order, scheme: default_scheme() }
}

/// Large `theta` relative to `dx` leaves fast modes with `|tau| ~ theta sqrt(eps)/dx`,
/// which two damping steps do not bring below `dt/Dt`.
fn with_damping(r: Recommended, k: usize) -> Recommended {
    Recommended { k, ..r }
}

/// Periodic heat kernel of `1 + 0.01 exp(-(x - 0.5)^2/delta^2)` on `[0, 1]`.
fn gaussian_bump(x: f64, t: f64, xi: f64, delta: f64) -> f64 {
    let w = delta * delta + 4.0 * xi * t;
    let amp = (delta * delta / w).sqrt();
    let mut s = 0.0;
    for n in -3..=3 {
        let d = x - 0.5 - n as f64;
        s += (-d * d / w).exp();
    }
    1.0 + 0.01 * amp * s
}

pub fn linear_diffusion(xi: f64, delta: f64) -> Problem {
    Problem {
        name: "linear_diffusion".into(),
        dim: 1,
        nk: 1,
        flux: vec![Flux::zero(1)],
        diffusion: Flux::linear(1, xi),
        xi,
        domain: [(0.0, 1.0), (0.0, 0.0)],
        cells: [64, 1],
        boundary: [Boundary::Periodic; 2],
        t_end: 0.01,
        discontinuous: false,
        u0: Arc::new(move |x, o| o[0] = gaussian_bump(x[0], 0.0, xi, delta)),
        exact: Some(Arc::new(move |x, t, o| o[0] = gaussian_bump(x[0], t, xi, delta))),
        recommended: rec(drm1(1.0, 0.2), 1.0, 4),
        state_box: vec![(1.0, 1.01)],
        params: vec![("xi".into(), xi), ("delta".into(), delta)],
    }
}

pub fn advection_diffusion(c: f64, xi: f64, delta: f64) -> Problem {
    let shift = move |x: f64, t: f64| (x - c * t).rem_euclid(1.0);
    Problem {
        name: "advection_diffusion".into(),
        dim: 1,
        nk: 1,
        flux: vec![Flux::linear(1, c)],
        diffusion: Flux::linear(1, xi),
        xi,
        domain: [(0.0, 1.0), (0.0, 0.0)],
        cells: [64, 1],
        boundary: [Boundary::Periodic; 2],
        t_end: 0.01,
        discontinuous: false,
        u0: Arc::new(move |x, o| o[0] = gaussian_bump(x[0], 0.0, xi, delta)),
        exact: Some(Arc::new(move |x, t, o| o[0] = gaussian_bump(shift(x[0], t), t, xi, delta))),
        recommended: with_damping(rec(drm1(1.5 * c.abs().max(1.0), 2.0 * xi.sqrt().max(0.1)), 1.0, 4), 3),
        state_box: vec![(1.0, 1.01)],
        params: vec![("c".into(), c), ("xi".into(), xi), ("delta".into(), delta)],
    }
}

pub fn viscous_lwr(xi: f64) -> Problem {
    Problem {
        name: "viscous_lwr".into(),
        dim: 1,
        nk: 1,
        flux: vec![Flux::scalar_with_derivative(|u| 0.5 * (u - u * u), |u| 0.5 - u)],
        diffusion: Flux::linear(1, xi),
        xi,
        domain: [(0.0, 1.0), (0.0, 0.0)],
        cells: [200, 1],
        boundary: [Boundary::Periodic; 2],
        t_end: 0.1,
        discontinuous: false,
        u0: Arc::new(|x, o| o[0] = 0.6 + 0.25 * (2.0 * std::f64::consts::PI * x[0]).sin()),
        exact: None,
        recommended: rec(drm1(0.5, 0.3), 2.05, 1),
        state_box: vec![(0.35, 0.85)],
        params: vec![("xi".into(), xi)],
    }
}

pub fn burgers_steady_shock(xi: f64, delta: f64) -> Problem {
    let profile = move |x: f64| -(2.0 * xi / delta) * ((x - 0.5) / delta).tanh();
    let amp = 2.0 * xi / delta;
    Problem {
        name: "burgers_steady_shock".into(),
        dim: 1,
        nk: 1,
        flux: vec![Flux::scalar_with_derivative(|u| 0.5 * u * u, |u| u)],
        diffusion: Flux::linear(1, xi),
        xi,
        domain: [(0.0, 1.0), (0.0, 0.0)],
        cells: [333, 1],
        boundary: [Boundary::ZeroGradient; 2],
        t_end: 0.5,
        discontinuous: false,
        u0: Arc::new(move |x, o| o[0] = profile(x[0])),
        exact: Some(Arc::new(move |x, _, o| o[0] = profile(x[0]))),
        recommended: rec(drm1((2.5 * amp).max(0.1), (10.0 * xi).sqrt().max(1e-3)), 2.05, 4),
        state_box: vec![(-amp, amp)],
        params: vec![("xi".into(), xi), ("delta".into(), delta)],
    }
}

/// `xi (u - 0.25 sign u)` outside `[-0.25, 0.25]`, zero inside.
fn degenerate_diffusion(xi: f64) -> Flux {
    Flux::scalar_with_derivative(
        move |u| if u.abs() > 0.25 { xi * (u - 0.25 * u.signum()) } else { 0.0 },
        move |u| if u.abs() > 0.25 { xi } else { 0.0 },
    )
}

pub fn burgers_strongly_degenerate(xi: f64) -> Problem {
    let c = FRAC_1_SQRT_2;
    Problem {
        name: "burgers_strongly_degenerate".into(),
        dim: 1,
        nk: 1,
        flux: vec![Flux::scalar_with_derivative(|u| u * u, |u| 2.0 * u)],
        diffusion: degenerate_diffusion(xi),
        xi,
        domain: [(-2.0, 2.0), (0.0, 0.0)],
        cells: [267, 1],
        boundary: [Boundary::ZeroGradient; 2],
        t_end: 0.7,
        discontinuous: true,
        u0: Arc::new(move |x, o| {
            let x = x[0];
            o[0] = if (-c - 0.4..=-c + 0.4).contains(&x) {
                1.0
            } else if (c - 0.4..=c + 0.4).contains(&x) {
                -1.0
            } else {
                0.0
            };
        }),
        exact: None,
        recommended: with_damping(rec(drm1(2.5, 1.0), 1.0, 4), 3),
        state_box: vec![(-1.0, 1.0)],
        params: vec![("xi".into(), xi)],
    }
}

pub fn burgers_2d_degenerate(xi: f64) -> Problem {
    let sq = || Flux::scalar_with_derivative(|u| u * u, |u| 2.0 * u);
    Problem {
        name: "burgers_2d_degenerate".into(),
        dim: 2,
        nk: 1,
        flux: vec![sq(), sq()],
        diffusion: degenerate_diffusion(xi),
        xi,
        domain: [(-1.5, 1.5), (-1.5, 1.5)],
        cells: [100, 100],
        boundary: [Boundary::ZeroGradient; 2],
        t_end: 0.5,
        discontinuous: true,
        u0: Arc::new(|x, o| {
            let (a, b) = (x[0], x[1]);
            o[0] = if (a - 0.5).powi(2) + (b - 0.5).powi(2) <= 0.16 {
                -1.0
            } else if (a + 0.5).powi(2) + (b + 0.5).powi(2) <= 0.16 {
                1.0
            } else {
                0.0
            };
        }),
        exact: None,
        recommended: Recommended {
            model: ModelChoice { kind: ModelKind::Drm1Planar, lambda: [5.0, 5.0], theta: 1.0, mu: 0.0 },
            epsilon: 1e-7,
            cfl: 0.4,
            k: 3,
            order: 4,
            scheme: default_scheme(),
        },
        state_box: vec![(-1.0, 1.0)],
        params: vec![("xi".into(), xi)],
    }
}

/// `xi (2w^2 - 4/3 w^3)` on `[0, 1]`, continued by constants outside.
fn cubic_saturation_diffusion(xi: f64) -> (impl Fn(f64) -> f64 + Copy, impl Fn(f64) -> f64 + Copy) {
    let b = move |w: f64| {
        let w = w.clamp(0.0, 1.0);
        xi * (2.0 * w * w - 4.0 / 3.0 * w * w * w)
    };
    let db = move |w: f64| if (0.0..=1.0).contains(&w) { xi * 4.0 * w * (1.0 - w) } else { 0.0 };
    (b, db)
}

/// `u^2/(u^2 + a(1 - u)^2)` and its derivative.
fn mobility_ratio(u: f64, a: f64) -> (f64, f64) {
    let d = u * u + a * (1.0 - u) * (1.0 - u);
    let dd = 2.0 * u - 2.0 * a * (1.0 - u);
    (u * u / d, (2.0 * u * d - u * u * dd) / (d * d))
}

/// `u^2/(u^2 + a(1-u)^2) (1 - g(1-u)^2)` and its derivative.
fn gravity_flux(u: f64, a: f64, g: f64) -> (f64, f64) {
    let (q, dq) = mobility_ratio(u, a);
    let w = 1.0 - g * (1.0 - u) * (1.0 - u);
    (q * w, dq * w + q * 2.0 * g * (1.0 - u))
}

pub fn three_phase(xi: f64) -> Problem {
    let f = |u: f64| mobility_ratio(u, 0.1);
    let h = |u: f64| {
        let n = (1.0 - u).powi(2) + u * u / 10.0;
        let dn = -2.0 * (1.0 - u) + u / 5.0;
        let e = 10.0 * u * u + (1.0 - u).powi(2);
        let de = 20.0 * u - 2.0 * (1.0 - u);
        (n / e, (dn * e - n * de) / (e * e))
    };
    let flux = Flux::new(2, move |w, o| {
        o[0] = f(w[0]).0;
        o[1] = h(w[0]).0 * f(w[1]).0;
    })
    .with_jacobian(move |w, o| {
        let (fu, dfu) = f(w[0]);
        let (fv, dfv) = f(w[1]);
        let (hu, dhu) = h(w[0]);
        let _ = fu;
        o[0] = dfu;
        o[1] = 0.0;
        o[2] = dhu * fv;
        o[3] = hu * dfv;
    });
    let (b, db) = cubic_saturation_diffusion(xi);
    Problem {
        name: "three_phase".into(),
        dim: 1,
        nk: 2,
        flux: vec![flux],
        diffusion: Flux::componentwise(2, b, db),
        xi,
        domain: [(0.0, 2.5), (0.0, 0.0)],
        cells: [500, 1],
        boundary: [Boundary::ZeroGradient; 2],
        t_end: 0.2,
        discontinuous: true,
        u0: Arc::new(|x, o| {
            if x[0] < 1.0 {
                o[0] = 0.4;
                o[1] = 0.6;
            } else {
                o[0] = 0.0;
                o[1] = 0.0;
            }
        }),
        exact: None,
        recommended: with_damping(rec(drm1(4.0, 1.0), 1.0, 4), 3),
        state_box: vec![(0.0, 1.0), (0.0, 1.0)],
        params: vec![("xi".into(), xi)],
    }
}

pub fn bl_gravity(xi: f64, a: f64, g: f64) -> Problem {
    let (b, db) = cubic_saturation_diffusion(xi);
    let step = 1.0 - FRAC_1_SQRT_2;
    Problem {
        name: "bl_gravity".into(),
        dim: 1,
        nk: 1,
        flux: vec![Flux::scalar_with_derivative(move |u| gravity_flux(u, a, g).0, move |u| gravity_flux(u, a, g).1)],
        diffusion: Flux::scalar_with_derivative(b, db),
        xi,
        domain: [(0.0, 1.0), (0.0, 0.0)],
        cells: [100, 1],
        boundary: [Boundary::ZeroGradient; 2],
        t_end: 0.1,
        discontinuous: true,
        u0: Arc::new(move |x, o| o[0] = if x[0] <= step { 0.0 } else { 1.0 }),
        exact: None,
        recommended: rec(drm1(4.0, 0.5), 1.0, 4),
        state_box: vec![(0.0, 1.0)],
        params: vec![("xi".into(), xi), ("a".into(), a), ("g".into(), g)],
    }
}

pub fn bl_2d(xi: f64) -> Problem {
    let f1 = Flux::scalar_with_derivative(|u| mobility_ratio(u, 1.0).0, |u| mobility_ratio(u, 1.0).1);
    let f2 = Flux::scalar_with_derivative(|u| gravity_flux(u, 1.0, 5.0).0, |u| gravity_flux(u, 1.0, 5.0).1);
    Problem {
        name: "bl_2d".into(),
        dim: 2,
        nk: 1,
        flux: vec![f1, f2],
        diffusion: Flux::linear(1, xi),
        xi,
        domain: [(-1.5, 1.5), (-1.5, 1.5)],
        cells: [200, 200],
        boundary: [Boundary::ZeroGradient; 2],
        t_end: 0.5,
        discontinuous: true,
        u0: Arc::new(|x, o| o[0] = if x[0] * x[0] + x[1] * x[1] < 0.5 { 1.0 } else { 0.0 }),
        exact: None,
        recommended: Recommended {
            model: ModelChoice { kind: ModelKind::Drm1Planar, lambda: [8.0, 8.0], theta: 0.5, mu: 0.0 },
            epsilon: 1e-7,
            cfl: 0.4,
            k: 2,
            order: 4,
            scheme: SchemeSpec::new(HypScheme::Cweno3, ParScheme::Centered2),
        },
        state_box: vec![(0.0, 1.0)],
        params: vec![("xi".into(), xi)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_diffusion_peak() {
        let p = catalog("linear_diffusion").unwrap();
        assert!((p.evaluate_exact(&[0.5], 0.0).unwrap()[0] - 1.01).abs() < 1e-15);
        let t: f64 = 0.3;
        let peak = 1.0 + 0.01 * (0.01f64 / (0.01 + 4.0 * 1e-2 * t)).sqrt();
        assert!((p.evaluate_exact(&[0.5], t).unwrap()[0] - peak).abs() < 1e-12);
    }

    #[test]
    fn three_phase_diffusion_at_one() {
        let p = catalog_with("three_phase", &[("xi", 1.0)]).unwrap();
        let b = p.diffusion.value(&[1.0, 0.5]);
        assert!((b[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_names_and_params() {
        assert!(matches!(catalog("nope"), Err(Error::UnknownProblem(_))));
        assert!(catalog_with("viscous_lwr", &[("a", 1.0)]).is_err());
        assert!(matches!(catalog("viscous_lwr").unwrap().evaluate_exact(&[0.1], 0.0), Err(Error::NoExact(_))));
    }

    #[test]
    fn every_entry_is_admissible() {
        for name in NAMES {
            let p = catalog(name).unwrap();
            assert!(p.check_recommended().unwrap(), "{name}");
        }
        let p = catalog_with("bl_gravity", &[("g", 5.0)]).unwrap();
        assert!(p.check_recommended().unwrap());
    }
}
