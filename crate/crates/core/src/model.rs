//! Discrete-kinetic velocity models and their Maxwellians.
//!
//! Every model here has Maxwellians that are linear combinations of the state
//! `u`, the fluxes `A_d(u)` and the diffusion `B(u)`:
//!
//! ```text
//! M_l(u) = cu_l * u + sum_d ca_{l,d} * A_d(u) + cb_l * B(u)
//! ```
//!
//! so a model is fully described by its velocity split `gamma_ld = lam_ld +
//! th_ld / sqrt(eps)` and the coefficient table `(cu, ca, cb)` per velocity.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Default widening applied to sampled speed bounds.
pub const SPEED_SAFETY: f64 = 1.05;

/// Tolerance used by [`check_mmf`] when all Jacobians are closed forms.
pub const MMF_TOL_EXACT: f64 = 1e-12;
/// Tolerance used by [`check_mmf`] when a Jacobian is finite-differenced.
pub const MMF_TOL_FD: f64 = 1e-8;

pub type VecMap = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A map `R^K -> R^K` with an optional closed-form Jacobian (row-major).
#[derive(Clone)]
pub struct Flux {
    dim: usize,
    map: VecMap,
    jac: Option<VecMap>,
}

impl fmt::Debug for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Flux")
            .field("dim", &self.dim)
            .field("closed_jacobian", &self.jac.is_some())
            .finish()
    }
}

impl Flux {
    pub fn new(dim: usize, map: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        Flux { dim, map: Arc::new(map), jac: None }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.jac = Some(Arc::new(jac));
        self
    }

    pub fn scalar(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Flux::new(1, move |u, out| out[0] = f(u[0]))
    }

    pub fn scalar_with_derivative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Flux::scalar(f).with_jacobian(move |u, out| out[0] = df(u[0]))
    }

    /// `u -> c u` componentwise.
    pub fn linear(dim: usize, c: f64) -> Self {
        Flux::new(dim, move |u, out| {
            for (o, x) in out.iter_mut().zip(u) {
                *o = c * x;
            }
        })
        .with_jacobian(move |_, out| {
            out.fill(0.0);
            for k in 0..dim {
                out[k * dim + k] = c;
            }
        })
    }

    pub fn identity(dim: usize) -> Self {
        Flux::linear(dim, 1.0)
    }

    pub fn zero(dim: usize) -> Self {
        Flux::linear(dim, 0.0)
    }

    /// Applies a scalar map to every component.
    pub fn componentwise(
        dim: usize,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Flux::new(dim, move |u, out| {
            for (o, &x) in out.iter_mut().zip(u) {
                *o = f(x);
            }
        })
        .with_jacobian(move |u, out| {
            out.fill(0.0);
            for k in 0..dim {
                out[k * dim + k] = df(u[k]);
            }
        })
    }

    /// Multiplies the map (and its Jacobian) by `s`.
    pub fn scaled(self, s: f64) -> Self {
        let map = self.map.clone();
        let dim = self.dim;
        let mut out = Flux::new(dim, move |u, o| {
            map(u, o);
            for v in o.iter_mut() {
                *v *= s;
            }
        });
        if let Some(j) = self.jac {
            out = out.with_jacobian(move |u, o| {
                j(u, o);
                for v in o.iter_mut() {
                    *v *= s;
                }
            });
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    #[inline]
    pub fn eval(&self, u: &[f64], out: &mut [f64]) {
        (self.map)(u, out)
    }

    pub fn value(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval(u, &mut out);
        out
    }

    /// Row-major `K x K` Jacobian. Falls back to fourth-order central
    /// differences with step `max(1e-6, 1e-6 |u_j|)`.
    pub fn jacobian(&self, u: &[f64], out: &mut [f64]) {
        if let Some(j) = &self.jac {
            j(u, out);
            return;
        }
        let n = self.dim;
        let mut x = u.to_vec();
        let mut fp2 = vec![0.0; n];
        let mut fp1 = vec![0.0; n];
        let mut fm1 = vec![0.0; n];
        let mut fm2 = vec![0.0; n];
        for j in 0..n {
            let h = (1e-6 * u[j].abs()).max(1e-6);
            x[j] = u[j] + 2.0 * h;
            self.eval(&x, &mut fp2);
            x[j] = u[j] + h;
            self.eval(&x, &mut fp1);
            x[j] = u[j] - h;
            self.eval(&x, &mut fm1);
            x[j] = u[j] - 2.0 * h;
            self.eval(&x, &mut fm2);
            x[j] = u[j];
            for i in 0..n {
                out[i * n + j] = (-fp2[i] + 8.0 * fp1[i] - 8.0 * fm1[i] + fm2[i]) / (12.0 * h);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Diagonal relaxation model with symmetric hyperbolic speeds `-lambda, lambda`.
    Drm1,
    /// Diagonal relaxation model with speeds `lambda_m < lambda_p`.
    Drm2,
    /// Three-velocity model with `eps`-dependent Maxwellians.
    Ovm,
    /// Two-dimensional diagonal relaxation model, `L = 6`.
    Drm1Planar,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Drm1 => "drm1",
            ModelKind::Drm2 => "drm2",
            ModelKind::Ovm => "ovm",
            ModelKind::Drm1Planar => "drm1-2d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "drm1" | "drm1-1d" | "drm1_1d" => Some(ModelKind::Drm1),
            "drm2" | "drm2-1d" | "drm2_1d" => Some(ModelKind::Drm2),
            "ovm" | "ovm-1d" | "ovm_1d" => Some(ModelKind::Ovm),
            "drm1-2d" | "drm1_2d" => Some(ModelKind::Drm1Planar),
            _ => None,
        }
    }
}

/// Coefficients of one Maxwellian component, see the module docs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equilibrium {
    pub u: f64,
    pub a: [f64; 2],
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    /// `|A'|/lambda + B'/theta^2 <= 1`.
    Subcharacteristic,
    /// `lambda_m (1 - B'/theta^2) <= A' <= lambda_p (1 - B'/theta^2)`.
    SplitSpeed,
    /// Nonnegative Jacobians of the three-velocity Maxwellian.
    ThreeVelocity,
    /// The three planar hyperbolic combinations bounded by `1 - B'/theta^2`.
    Planar,
}

#[derive(Clone, Debug)]
pub struct KineticModel {
    kind: ModelKind,
    dim: usize,
    nk: usize,
    n_hyp: usize,
    n_par: usize,
    epsilon: f64,
    lam: Vec<[f64; 2]>,
    th: Vec<[f64; 2]>,
    speeds: [f64; 2],
    theta: f64,
    mu: f64,
    sigma: Option<[[f64; 3]; 2]>,
    flux: Vec<Flux>,
    diffusion: Flux,
    coef: Vec<Equilibrium>,
}

/// Reusable buffers for [`KineticModel::maxwellian_into`].
#[derive(Clone, Debug, Default)]
pub struct MaxwellianScratch {
    buf: Vec<f64>,
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::param(
            "epsilon",
            format!("{epsilon} outside (0, 1]; the scheme is explicit and cannot run at eps = 0"),
        ));
    }
    Ok(())
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(name, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::param("mu", format!("must be nonnegative, got {mu}")));
    }
    Ok(())
}

fn check_dims(fluxes: &[&Flux], b: &Flux) -> Result<usize> {
    let nk = b.dim();
    if nk == 0 {
        return Err(Error::param("diffusion", "zero components"));
    }
    for f in fluxes {
        if f.dim() != nk {
            return Err(Error::param(
                "flux",
                format!("flux has {} components, diffusion has {nk}", f.dim()),
            ));
        }
    }
    Ok(nk)
}

/// Default planar basis of the zero-sum plane in `R^3`.
pub fn default_sigma() -> [[f64; 3]; 2] {
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    [[1.0 / s2, -1.0 / s2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6]]
}

fn check_sigma(sigma: &[[f64; 3]; 2]) -> Result<()> {
    let tol = 1e-12;
    for (i, s) in sigma.iter().enumerate() {
        let sum: f64 = s.iter().sum();
        let norm: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        if sum.abs() > tol {
            return Err(Error::param("sigma", format!("sigma[{i}] sums to {sum:e}, expected 0")));
        }
        if (norm - 1.0).abs() > tol {
            return Err(Error::param("sigma", format!("sigma[{i}] has norm {norm}, expected 1")));
        }
    }
    let dot: f64 = (0..3).map(|m| sigma[0][m] * sigma[1][m]).sum();
    if dot.abs() > tol {
        return Err(Error::param("sigma", format!("basis vectors not orthogonal (dot = {dot:e})")));
    }
    Ok(())
}

/// Builds the one-dimensional model with velocities
/// `(-lambda, lambda, -mu/sqrt2 - theta/sqrt(eps), mu/sqrt2 + theta/sqrt(eps))`.
pub fn build_drm1_1d(
    lambda: f64,
    theta: f64,
    mu: f64,
    epsilon: f64,
    a: Flux,
    b: Flux,
) -> Result<KineticModel> {
    check_pos("lambda", lambda)?;
    check_pos("theta", theta)?;
    check_mu(mu)?;
    check_eps(epsilon)?;
    let nk = check_dims(&[&a], &b)?;
    let m = mu / 2f64.sqrt();
    let t2 = theta * theta;
    let h = 0.5;
    Ok(KineticModel {
        kind: ModelKind::Drm1,
        dim: 1,
        nk,
        n_hyp: 2,
        n_par: 2,
        epsilon,
        lam: vec![[-lambda, 0.0], [lambda, 0.0], [-m, 0.0], [m, 0.0]],
        th: vec![[0.0; 2], [0.0; 2], [-theta, 0.0], [theta, 0.0]],
        speeds: [lambda, lambda],
        theta,
        mu,
        sigma: None,
        flux: vec![a],
        diffusion: b,
        coef: vec![
            Equilibrium { u: h, a: [-h / lambda, 0.0], b: -h / t2 },
            Equilibrium { u: h, a: [h / lambda, 0.0], b: -h / t2 },
            Equilibrium { u: 0.0, a: [0.0; 2], b: h / t2 },
            Equilibrium { u: 0.0, a: [0.0; 2], b: h / t2 },
        ],
    })
}

/// One-dimensional model with asymmetric hyperbolic speeds `lambda_m < lambda_p`.
pub fn build_drm2_1d(
    lambda_m: f64,
    lambda_p: f64,
    theta: f64,
    mu: f64,
    epsilon: f64,
    a: Flux,
    b: Flux,
) -> Result<KineticModel> {
    if !(lambda_m.is_finite() && lambda_p.is_finite()) || lambda_m >= lambda_p {
        return Err(Error::param(
            "lambda_m",
            format!("need lambda_m < lambda_p, got {lambda_m} >= {lambda_p}"),
        ));
    }
    check_pos("theta", theta)?;
    check_mu(mu)?;
    check_eps(epsilon)?;
    let nk = check_dims(&[&a], &b)?;
    let m = mu / 2f64.sqrt();
    let t2 = theta * theta;
    let w = lambda_p - lambda_m;
    Ok(KineticModel {
        kind: ModelKind::Drm2,
        dim: 1,
        nk,
        n_hyp: 2,
        n_par: 2,
        epsilon,
        lam: vec![[lambda_m, 0.0], [lambda_p, 0.0], [-m, 0.0], [m, 0.0]],
        th: vec![[0.0; 2], [0.0; 2], [-theta, 0.0], [theta, 0.0]],
        speeds: [lambda_m, lambda_p],
        theta,
        mu,
        sigma: None,
        flux: vec![a],
        diffusion: b,
        coef: vec![
            Equilibrium { u: lambda_p / w, a: [-1.0 / w, 0.0], b: -lambda_p / (w * t2) },
            Equilibrium { u: -lambda_m / w, a: [1.0 / w, 0.0], b: lambda_m / (w * t2) },
            Equilibrium { u: 0.0, a: [0.0; 2], b: 0.5 / t2 },
            Equilibrium { u: 0.0, a: [0.0; 2], b: 0.5 / t2 },
        ],
    })
}

fn ovm_coef(lambda: f64, theta: f64, epsilon: f64) -> Vec<Equilibrium> {
    let t2 = theta * theta;
    // Outer speed lambda + theta/sqrt(eps); the limit eps -> 0 kills the A part.
    let c = if epsilon == 0.0 { 0.0 } else { 0.5 / (lambda + theta / epsilon.sqrt()) };
    vec![
        Equilibrium { u: 1.0, a: [0.0; 2], b: -1.0 / t2 },
        Equilibrium { u: 0.0, a: [c, 0.0], b: 0.5 / t2 },
        Equilibrium { u: 0.0, a: [-c, 0.0], b: 0.5 / t2 },
    ]
}

/// Three-velocity model: velocities `(0, Lambda, -Lambda)` with
/// `Lambda = lambda + theta/sqrt(eps)`.
pub fn build_ovm_1d(lambda: f64, theta: f64, epsilon: f64, a: Flux, b: Flux) -> Result<KineticModel> {
    check_pos("lambda", lambda)?;
    check_pos("theta", theta)?;
    check_eps(epsilon)?;
    let nk = check_dims(&[&a], &b)?;
    Ok(KineticModel {
        kind: ModelKind::Ovm,
        dim: 1,
        nk,
        n_hyp: 1,
        n_par: 2,
        epsilon,
        lam: vec![[0.0; 2], [lambda, 0.0], [-lambda, 0.0]],
        th: vec![[0.0; 2], [theta, 0.0], [-theta, 0.0]],
        speeds: [lambda, lambda],
        theta,
        mu: 0.0,
        sigma: None,
        flux: vec![a],
        diffusion: b,
        coef: ovm_coef(lambda, theta, epsilon),
    })
}

/// Two-dimensional model with `J = J' = 3`. Hyperbolic velocities are
/// `(-lambda1, 0)`, `(0, -lambda2)`, `(lambda1, lambda2)`; parabolic velocities
/// are `(mu + theta sqrt(3)/sqrt(eps)) (sigma1_m, sigma2_m)`.
#[allow(clippy::too_many_arguments)]
pub fn build_drm1_2d(
    lambda1: f64,
    lambda2: f64,
    theta: f64,
    mu: f64,
    epsilon: f64,
    a1: Flux,
    a2: Flux,
    b: Flux,
    sigma: Option<[[f64; 3]; 2]>,
) -> Result<KineticModel> {
    check_pos("lambda1", lambda1)?;
    check_pos("lambda2", lambda2)?;
    check_pos("theta", theta)?;
    check_mu(mu)?;
    check_eps(epsilon)?;
    let nk = check_dims(&[&a1, &a2], &b)?;
    let sigma = sigma.unwrap_or_else(default_sigma);
    check_sigma(&sigma)?;
    let t2 = theta * theta;
    let s3 = 3f64.sqrt();
    let third = 1.0 / 3.0;
    let mut lam = vec![[-lambda1, 0.0], [0.0, -lambda2], [lambda1, lambda2]];
    let mut th = vec![[0.0; 2]; 3];
    for m in 0..3 {
        lam.push([mu * sigma[0][m], mu * sigma[1][m]]);
        th.push([theta * s3 * sigma[0][m], theta * s3 * sigma[1][m]]);
    }
    let (p1, p2) = (third / lambda1, third / lambda2);
    let mut coef = vec![
        Equilibrium { u: third, a: [-2.0 * p1, p2], b: -third / t2 },
        Equilibrium { u: third, a: [p1, -2.0 * p2], b: -third / t2 },
        Equilibrium { u: third, a: [p1, p2], b: -third / t2 },
    ];
    for _ in 0..3 {
        coef.push(Equilibrium { u: 0.0, a: [0.0; 2], b: third / t2 });
    }
    Ok(KineticModel {
        kind: ModelKind::Drm1Planar,
        dim: 2,
        nk,
        n_hyp: 3,
        n_par: 3,
        epsilon,
        lam,
        th,
        speeds: [lambda1, lambda2],
        theta,
        mu,
        sigma: Some(sigma),
        flux: vec![a1, a2],
        diffusion: b,
        coef,
    })
}

impl KineticModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    /// Number of macroscopic components `K`.
    pub fn n_components(&self) -> usize {
        self.nk
    }
    /// Number of velocities `L`.
    pub fn n_velocities(&self) -> usize {
        self.lam.len()
    }
    pub fn n_hyperbolic(&self) -> usize {
        self.n_hyp
    }
    pub fn n_parabolic(&self) -> usize {
        self.n_par
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    /// `(lambda, lambda)`, `(lambda_m, lambda_p)` or `(lambda1, lambda2)`.
    pub fn speeds(&self) -> [f64; 2] {
        self.speeds
    }
    pub fn sigma(&self) -> Option<[[f64; 3]; 2]> {
        self.sigma
    }
    pub fn flux(&self, d: usize) -> &Flux {
        &self.flux[d]
    }
    pub fn diffusion(&self) -> &Flux {
        &self.diffusion
    }
    pub fn coefficients(&self) -> &[Equilibrium] {
        &self.coef
    }

    /// Coefficients of `M(eps, .)` at another `eps`; `eps = 0` gives the limit.
    pub fn coefficients_at(&self, epsilon: f64) -> Vec<Equilibrium> {
        match self.kind {
            ModelKind::Ovm => ovm_coef(self.speeds[0], self.theta, epsilon),
            _ => self.coef.clone(),
        }
    }

    /// `gamma_ld = lam_ld + th_ld / sqrt(eps)`.
    #[inline]
    pub fn velocity(&self, l: usize, d: usize) -> f64 {
        self.lam[l][d] + self.th[l][d] / self.epsilon.sqrt()
    }

    /// The `(lam_ld, th_ld)` split of a velocity.
    pub fn velocity_parts(&self, l: usize, d: usize) -> (f64, f64) {
        (self.lam[l][d], self.th[l][d])
    }

    pub fn velocities(&self, d: usize) -> Vec<f64> {
        (0..self.n_velocities()).map(|l| self.velocity(l, d)).collect()
    }

    /// Same model at a different relaxation parameter.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<KineticModel> {
        check_eps(epsilon)?;
        let mut m = self.clone();
        m.epsilon = epsilon;
        m.coef = m.coefficients_at(epsilon);
        Ok(m)
    }

    /// Writes `M(u)` into `out` with layout `out[l * K + k]`.
    pub fn maxwellian_into(&self, u: &[f64], out: &mut [f64], scratch: &mut MaxwellianScratch) {
        let nk = self.nk;
        scratch.buf.resize((self.dim + 1) * nk, 0.0);
        let (abuf, bbuf) = scratch.buf.split_at_mut(self.dim * nk);
        for d in 0..self.dim {
            self.flux[d].eval(u, &mut abuf[d * nk..(d + 1) * nk]);
        }
        self.diffusion.eval(u, bbuf);
        combine(&self.coef, self.dim, nk, u, abuf, bbuf, out);
    }

    pub fn maxwellian(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_velocities() * self.nk];
        self.maxwellian_into(u, &mut out, &mut MaxwellianScratch::default());
        out
    }

    /// `M(eps, u)` at an arbitrary `eps` (`0` for the limit Maxwellian).
    pub fn maxwellian_at(&self, epsilon: f64, u: &[f64]) -> Vec<f64> {
        let nk = self.nk;
        let mut a = vec![0.0; self.dim * nk];
        let mut b = vec![0.0; nk];
        for d in 0..self.dim {
            self.flux[d].eval(u, &mut a[d * nk..(d + 1) * nk]);
        }
        self.diffusion.eval(u, &mut b);
        let mut out = vec![0.0; self.n_velocities() * nk];
        combine(&self.coefficients_at(epsilon), self.dim, nk, u, &a, &b, &mut out);
        out
    }

    /// Row-major Jacobian of `M_l` at `u`, plus whether it came from closed forms.
    pub fn maxwellian_jacobian(&self, l: usize, u: &[f64]) -> (Vec<f64>, bool) {
        let nk = self.nk;
        let c = self.coef[l];
        let mut out = vec![0.0; nk * nk];
        let mut tmp = vec![0.0; nk * nk];
        let mut exact = true;
        for k in 0..nk {
            out[k * nk + k] = c.u;
        }
        for d in 0..self.dim {
            if c.a[d] != 0.0 {
                self.flux[d].jacobian(u, &mut tmp);
                exact &= self.flux[d].has_jacobian();
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o += c.a[d] * t;
                }
            }
        }
        if c.b != 0.0 {
            self.diffusion.jacobian(u, &mut tmp);
            exact &= self.diffusion.has_jacobian();
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += c.b * t;
            }
        }
        (out, exact)
    }
}

#[inline]
fn combine(coef: &[Equilibrium], dim: usize, nk: usize, u: &[f64], a: &[f64], b: &[f64], out: &mut [f64]) {
    for (l, c) in coef.iter().enumerate() {
        let row = &mut out[l * nk..(l + 1) * nk];
        for k in 0..nk {
            let mut v = c.u * u[k] + c.b * b[k];
            for d in 0..dim {
                v += c.a[d] * a[d * nk + k];
            }
            row[k] = v;
        }
    }
}

/// `u = sum_l f_l` for a single cell with layout `f[l * K + k]`.
pub fn project(f: &[f64], nk: usize) -> Vec<f64> {
    let mut u = vec![0.0; nk];
    for chunk in f.chunks_exact(nk) {
        for (acc, v) in u.iter_mut().zip(chunk) {
            *acc += v;
        }
    }
    u
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub is_mmf: bool,
    /// Largest normalized condition value over the samples; `<= 1` is admissible.
    pub max_condition_value: f64,
    pub violating_state: Option<Vec<f64>>,
    pub condition_kind: ConditionKind,
    pub tolerance: f64,
    pub samples: usize,
    pub warning: Option<String>,
}

fn min_real_eig(mat: &[f64], n: usize) -> f64 {
    if n == 1 {
        return mat[0];
    }
    let m = DMatrix::from_row_slice(n, n, mat);
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

fn sample_box(state_box: &[(f64, f64)], n_samples: usize) -> Vec<Vec<f64>> {
    let nk = state_box.len();
    let per_axis = if nk == 1 {
        n_samples.max(1)
    } else {
        ((n_samples as f64).powf(1.0 / nk as f64).ceil() as usize).max(2)
    };
    let axis = |k: usize, i: usize| {
        let (lo, hi) = state_box[k];
        if per_axis == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (per_axis - 1) as f64
        }
    };
    let total = per_axis.pow(nk as u32);
    (0..total)
        .map(|mut idx| {
            (0..nk)
                .map(|k| {
                    let i = idx % per_axis;
                    idx /= per_axis;
                    axis(k, i)
                })
                .collect()
        })
        .collect()
}

/// Normalized monotonicity condition at one state: the Maxwellian is
/// monotone at `u` iff the returned value is `<= 1`.
fn condition_value(model: &KineticModel, u: &[f64]) -> (f64, bool) {
    let nk = model.nk;
    let mut worst = f64::NEG_INFINITY;
    let mut exact = true;
    for (l, c) in model.coef.iter().enumerate() {
        let (jac, ex) = model.maxwellian_jacobian(l, u);
        exact &= ex;
        let m = min_real_eig(&jac, nk);
        let w = if c.u > 0.0 {
            c.u
        } else if l < model.n_hyp && model.kind != ModelKind::Ovm {
            1.0 / model.n_hyp as f64
        } else {
            0.0
        };
        let v = if w > 0.0 {
            1.0 - m / w
        } else if m >= 0.0 {
            0.0
        } else {
            1.0 - m * model.n_velocities() as f64
        };
        worst = worst.max(v);
    }
    (worst, exact)
}

/// Samples the model-specific monotonicity (MMF) condition over a box of states.
pub fn check_mmf(model: &KineticModel, state_box: &[(f64, f64)], n_samples: usize) -> Result<AdmissibilityReport> {
    if state_box.len() != model.nk {
        return Err(Error::param(
            "state_box",
            format!("{} intervals for {} components", state_box.len(), model.nk),
        ));
    }
    if n_samples == 0 || state_box.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::param("state_box", "empty or non-finite box"));
    }
    let kind = match model.kind {
        ModelKind::Drm1 => ConditionKind::Subcharacteristic,
        ModelKind::Drm2 => ConditionKind::SplitSpeed,
        ModelKind::Ovm => ConditionKind::ThreeVelocity,
        ModelKind::Drm1Planar => ConditionKind::Planar,
    };
    let samples = sample_box(state_box, n_samples);
    let mut max_v = f64::NEG_INFINITY;
    let mut all_exact = true;
    let mut values = Vec::with_capacity(samples.len());
    for u in &samples {
        let (v, ex) = condition_value(model, u);
        all_exact &= ex;
        max_v = max_v.max(v);
        values.push(v);
    }
    let tolerance = if all_exact { MMF_TOL_EXACT } else { MMF_TOL_FD };
    let violating_state = samples
        .iter()
        .zip(&values)
        .find(|(_, &v)| v > 1.0 + tolerance)
        .map(|(u, _)| u.clone());
    let warning = if model.kind == ModelKind::Ovm {
        let t2 = model.theta * model.theta;
        let mut bmax = f64::NEG_INFINITY;
        let mut jac = vec![0.0; model.nk * model.nk];
        for u in &samples {
            model.diffusion.jacobian(u, &mut jac);
            bmax = bmax.max(min_real_eig(&jac, model.nk).max(jac[0]));
        }
        (t2 <= bmax).then(|| format!("theta^2 = {t2} does not exceed max B' = {bmax}"))
    } else {
        None
    };
    Ok(AdmissibilityReport {
        is_mmf: violating_state.is_none(),
        max_condition_value: max_v,
        violating_state,
        condition_kind: kind,
        tolerance,
        samples: samples.len(),
        warning,
    })
}

/// Sampled `inf`/`sup` of `A'/(1 - B'/theta^2)` over `interval`, widened by
/// `safety` (use `1.0` for the raw bounds).
pub fn compute_lambda_bounds(
    a_prime: &dyn Fn(f64) -> f64,
    b_prime: &dyn Fn(f64) -> f64,
    theta: f64,
    interval: (f64, f64),
    n_samples: usize,
    safety: f64,
) -> Result<(f64, f64)> {
    check_pos("theta", theta)?;
    let (lo, hi) = interval;
    if !(lo <= hi) || n_samples == 0 {
        return Err(Error::param("interval", "empty interval"));
    }
    let t2 = theta * theta;
    let mut lm = f64::INFINITY;
    let mut lp = f64::NEG_INFINITY;
    for i in 0..n_samples {
        let u = if n_samples == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (n_samples - 1) as f64 };
        let denom = 1.0 - b_prime(u) / t2;
        if denom <= 0.0 {
            return Err(Error::Degenerate { u, denom });
        }
        let r = a_prime(u) / denom;
        lm = lm.min(r);
        lp = lp.max(r);
    }
    let grow = safety - 1.0;
    Ok((lm - grow * lm.abs(), lp + grow * lp.abs()))
}
