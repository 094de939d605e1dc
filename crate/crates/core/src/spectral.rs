//! Fourier symbols, spectra of the linearized kinetic operator, amplification
//! factors of the projective integrators and stability-region rasters.
//!
//! For a one-dimensional model with linear `A`, `B` and a single Fourier mode,
//! the semidiscrete operator acts as `K = D + (m 1^T - I)/eps`, where `D` is
//! the diagonal symbol of `-Phi` and `m` the Maxwellian coefficients. Hence
//! `A = eps K + I = eps D + m 1^T` is diagonal plus rank one and its
//! eigenvalues solve `sum_j m_j / (z - eps D_j) = 1`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::integrate::ButcherTableau;
use crate::model::KineticModel;
use crate::transport::{centered_stencil, upwind_stencil, HypScheme, ParScheme, SchemeSpec, Stencil, TransportOperator};
use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Real and imaginary parts of the upwind (`alpha`, `beta`) and centered
/// (`xi`, `gamma`) symbols of `-Phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSet {
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub gamma: f64,
}

/// `sum_j c_j e^{i (lo + j) zeta} / den`, the symbol of `d/dx` times `dx`.
pub fn stencil_symbol(st: &Stencil, zeta: f64) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (j, c) in st.c.iter().enumerate() {
        let k = (st.lo + j as isize) as f64;
        s += C64::from_polar(*c, k * zeta);
    }
    s / st.den
}

fn linear_hyp(s: HypScheme) -> Result<Stencil> {
    upwind_stencil(s, 1.0).ok_or_else(|| Error::Unsupported("CWENO3 has no linear Fourier symbol".into()))
}

/// Symbols of the upwind scheme for speed `lambda` and of the centered scheme
/// for the parabolic speed `mu/sqrt2 + theta/sqrt(eps)`.
#[allow(clippy::too_many_arguments)]
pub fn fourier_symbols(
    zeta: f64,
    dx: f64,
    lambda: f64,
    theta: f64,
    mu: f64,
    epsilon: f64,
    hyp: HypScheme,
    par: ParScheme,
) -> Result<SymbolSet> {
    let sp = stencil_symbol(&linear_hyp(hyp)?, zeta);
    let sc = stencil_symbol(&centered_stencil(par), zeta);
    let c = mu / 2f64.sqrt() + theta / epsilon.sqrt();
    Ok(SymbolSet {
        alpha: -lambda.abs() * sp.re / dx,
        beta: -lambda * sp.im / dx,
        // Centered stencils are antisymmetric, so the real part vanishes exactly.
        xi: 0.0,
        gamma: c * sc.im / dx,
    })
}

/// Diagonal of `D` (the symbol of `-Phi`) in the model's velocity order.
pub fn mode_diagonal(model: &KineticModel, scheme: SchemeSpec, zeta: f64, dx: f64) -> Result<Vec<C64>> {
    if model.dim() != 1 || model.n_components() != 1 {
        return Err(Error::Unsupported("spectra are available for scalar 1D models".into()));
    }
    let hyp = linear_hyp(scheme.hyperbolic)?;
    let par = centered_stencil(scheme.parabolic);
    Ok((0..model.n_velocities())
        .map(|l| {
            let g = model.velocity(l, 0);
            if g == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let st = if l < model.n_hyperbolic() {
                if g > 0.0 {
                    hyp
                } else {
                    upwind_stencil(scheme.hyperbolic, g).unwrap()
                }
            } else {
                let s = stencil_symbol(&par, zeta);
                return C64::new(0.0, -s.im * g / dx);
            };
            -stencil_symbol(&st, zeta) * g / dx
        })
        .collect())
}

/// Coefficients `m_l = M_l'(0)` of the linearized Maxwellian.
pub fn relaxation_vector(model: &KineticModel) -> Vec<f64> {
    (0..model.n_velocities()).map(|l| model.maxwellian_jacobian(l, &[0.0]).0[0]).collect()
}

/// Dense `K = D + (m 1^T - I)/eps`.
pub fn bgk_symbol_matrix(d: &[C64], m: &[f64], epsilon: f64) -> DMatrix<C64> {
    let n = d.len();
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = C64::new(m[i] / epsilon, 0.0);
        if i == j {
            v += d[i] - 1.0 / epsilon;
        }
        v
    })
}

fn dense_eigenvalues(mat: &DMatrix<C64>) -> Result<Vec<C64>> {
    let ev = mat
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Eigen("complex Schur decomposition did not produce eigenvalues".into()))?;
    Ok(ev.iter().copied().collect())
}

/// Roots of `sum_j m_j/(z - e_j) = 1` by Aberth iteration on the polynomial
/// `prod(z - e_j) (1 - sum m_j/(z - e_j))`. Returns `None` without convergence.
pub fn secular_roots(e: &[C64], m: &[f64]) -> Option<Vec<C64>> {
    let n = e.len();
    let scale = e.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let center = e.iter().sum::<C64>() / n as f64;
    let spread = e.iter().map(|v| (v - center).norm()).fold(0.0, f64::max) + 1e-3 * scale;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            if k == 0 {
                C64::new(1.0, 0.0)
            } else {
                center + C64::from_polar(spread, 0.4 + 2.0 * PI * k as f64 / (n - 1).max(1) as f64)
            }
        })
        .collect();
    let newton = |x: C64| -> Option<C64> {
        let mut inv_sum = C64::new(0.0, 0.0);
        let mut s = C64::new(0.0, 0.0);
        let mut t = C64::new(0.0, 0.0);
        for (ej, mj) in e.iter().zip(m) {
            let r = x - ej;
            if r.norm() == 0.0 {
                return None;
            }
            let q = 1.0 / r;
            inv_sum += q;
            s += q * mj;
            t += q * q * mj;
        }
        let one_minus = C64::new(1.0, 0.0) - s;
        let dlog = inv_sum + t / one_minus;
        Some(1.0 / dlog)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let w = match newton(z[k]) {
                Some(w) => w,
                None => {
                    // Landed on a pole: a zero-weight pole is itself a root.
                    continue;
                }
            };
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            let mut rep = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    rep += 1.0 / (z[k] - z[j]);
                }
            }
            let step = w / (C64::new(1.0, 0.0) - w * rep);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (z[k].norm() + 1e-300).max(1e-300 + scale * 1e-12));
            }
        }
        if moved < 1e-15 {
            return Some(z);
        }
    }
    None
}

/// Dominant root of the secular equation written as `z = 1 + d`:
/// `sum_j m_j (e_j - d)/(1 + d - e_j) = 0`, refined by Newton from `d0`.
fn refine_dominant(e: &[C64], m: &[f64], d0: C64) -> C64 {
    let mut d = d0;
    for _ in 0..50 {
        let mut h = C64::new(0.0, 0.0);
        let mut dh = C64::new(0.0, 0.0);
        for (ej, mj) in e.iter().zip(m) {
            let den = 1.0 + d - ej;
            h += (ej - d) / den * mj;
            dh -= 1.0 / (den * den) * mj;
        }
        let step = h / dh;
        d -= step;
        if step.norm() <= 1e-17 * (1.0 + d.norm()) {
            break;
        }
    }
    d
}

/// Spectrum of `K` for one Fourier mode.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub zeta: f64,
    /// Eigenvalues of `K`; the dominant one first.
    pub eigenvalues: Vec<C64>,
    pub dominant: C64,
    /// `-1/eps`.
    pub fast_cluster_center: f64,
    /// Largest distance of a fast eigenvalue from the center.
    pub fast_cluster_radius: f64,
    /// `|xi| + |gamma| + |alpha| + |beta|` of the mode (`1/sqrt(eps)` included in
    /// `gamma`). The upwind part keeps the bound meaningful where the centered
    /// symbols vanish, e.g. at `zeta = pi`.
    pub radius_scale: f64,
    /// Second-order asymptotic prediction of the dominant eigenvalue of `K`.
    pub asymptotic_prediction: C64,
    /// True if the Aberth iteration failed and the dense solver was used.
    pub fallback: bool,
}

impl SpectrumReport {
    /// `radius <= C radius_scale`.
    pub fn within_bound(&self, c: f64) -> bool {
        self.fast_cluster_radius <= c * self.radius_scale * (1.0 + 1e-12) + 1e-9
    }
    /// Empirical constant `radius / radius_scale`, `None` for a zero scale.
    pub fn cluster_constant(&self) -> Option<f64> {
        (self.radius_scale > 0.0).then(|| self.fast_cluster_radius / self.radius_scale)
    }
}

/// Terms of the small-`eps` expansion of the dominant eigenvalue of `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expansion {
    /// Leading term, including the diffusion `-b eps gamma^2`.
    pub first: C64,
    /// Coefficient of `eps`.
    pub second: C64,
    /// Leading term without diffusion: `(1 - b) alpha + b xi + i beta/lambda`.
    pub transport_only: C64,
}

impl Expansion {
    /// Prediction for `K`: `first + eps second`.
    pub fn kinetic(&self, epsilon: f64) -> C64 {
        self.first + self.second * epsilon
    }
    /// Prediction for `A = eps K + I`, truncated after `eps^order`.
    pub fn relaxed(&self, epsilon: f64, order: usize) -> C64 {
        let mut z = C64::new(1.0, 0.0);
        if order >= 1 {
            z += self.first * epsilon;
        }
        if order >= 2 {
            z += self.second * epsilon * epsilon;
        }
        z
    }
}

/// Expansion of the dominant eigenvalue for the symmetric four-velocity model
/// with `A(u) = u`, `B(u) = u/theta^2 * b theta^2`, i.e. Maxwellian weights
/// `(1 +- 1/lambda - b)/2` on the hyperbolic pair and `b/2` on the parabolic pair.
pub fn dominant_eigenvalue_asymptotic(sym: &SymbolSet, lambda: f64, b: f64, epsilon: f64) -> Expansion {
    let SymbolSet { alpha, beta, xi, gamma } = *sym;
    let i = C64::new(0.0, 1.0);
    let a1 = C64::new((1.0 - b) * alpha + b * xi, beta / lambda);
    let p2 = b * epsilon * (xi * xi - gamma * gamma);
    let q2 = C64::new((1.0 - b) * (alpha * alpha - beta * beta), 0.0) + i * (2.0 * alpha * beta / lambda);
    let p3 = b * epsilon * (xi * xi * xi - 3.0 * xi * gamma * gamma);
    let e2 = epsilon * epsilon;
    let p4 = b * e2 * (xi.powi(4) - 6.0 * xi * xi * gamma * gamma + gamma.powi(4));
    let d1 = a1 + p2;
    let d2 = d1 * d1 - d1 * a1 * 2.0 + q2 - d1 * (3.0 * p2) + p4 + p3;
    Expansion { first: d1, second: d2, transport_only: a1 }
}

/// The leading-order prediction as printed in closed form:
/// `(1 - 1/theta^2) alpha + xi/(theta^2 sqrt(eps)) + i beta/lambda`.
pub fn printed_first_order(sym: &SymbolSet, lambda: f64, theta: f64, epsilon: f64) -> C64 {
    let t2 = theta * theta;
    C64::new((1.0 - 1.0 / t2) * sym.alpha + sym.xi / (t2 * epsilon.sqrt()), sym.beta / lambda)
}

/// Spectrum of one Fourier mode of a scalar 1D model with linear `A`, `B`.
pub fn analytic_spectrum(model: &KineticModel, scheme: SchemeSpec, dx: f64, zeta: f64) -> Result<SpectrumReport> {
    let eps = model.epsilon();
    let d = mode_diagonal(model, scheme, zeta, dx)?;
    let m = relaxation_vector(model);
    let e: Vec<C64> = d.iter().map(|v| v * eps).collect();
    let (roots, fallback) = match secular_roots(&e, &m) {
        Some(r) => (r, false),
        None => {
            let a = DMatrix::from_fn(e.len(), e.len(), |i, j| {
                let mut v = C64::new(m[i], 0.0);
                if i == j {
                    v += e[i];
                }
                v
            });
            (dense_eigenvalues(&a)?, true)
        }
    };
    let di = roots
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
        .map(|(i, _)| i)
        .unwrap();
    let delta = refine_dominant(&e, &m, roots[di] - 1.0);
    let dominant = delta / eps;
    let mut eigenvalues = vec![dominant];
    let mut radius: f64 = 0.0;
    for (i, z) in roots.iter().enumerate() {
        if i != di {
            let k = (z - 1.0) / eps;
            radius = radius.max(z.norm() / eps);
            eigenvalues.push(k);
        }
    }
    let (lambda, b) = linear_weights(model);
    let sym = fourier_symbols(
        zeta,
        dx,
        lambda,
        model.theta(),
        model.mu(),
        eps,
        scheme.hyperbolic,
        scheme.parabolic,
    )?;
    let pred = dominant_eigenvalue_asymptotic(&sym, lambda, b, eps).kinetic(eps);
    Ok(SpectrumReport {
        zeta,
        eigenvalues,
        dominant,
        fast_cluster_center: -1.0 / eps,
        fast_cluster_radius: radius,
        radius_scale: sym.xi.abs() + sym.gamma.abs() + sym.alpha.abs() + sym.beta.abs(),
        asymptotic_prediction: pred,
        fallback,
    })
}

/// `(lambda, b)` read off the linearized Maxwellian of a symmetric model:
/// `m_par = b/2`, `m_+ - m_- = 1/lambda`.
fn linear_weights(model: &KineticModel) -> (f64, f64) {
    let m = relaxation_vector(model);
    let lambda = model.speeds()[1];
    let b = if model.n_velocities() == 4 { 2.0 * m[3] } else { 0.0 };
    (lambda, b)
}

/// All Fourier modes `zeta = 2 pi k / I` of a periodic grid with `I` cells.
pub fn analytic_spectrum_all(model: &KineticModel, scheme: SchemeSpec, dx: f64, cells: usize) -> Result<Vec<SpectrumReport>> {
    (0..cells)
        .map(|k| analytic_spectrum(model, scheme, dx, 2.0 * PI * k as f64 / cells as f64))
        .collect()
}

/// Largest empirical cluster constant over a set of modes.
pub fn fast_cluster_constant(reports: &[SpectrumReport]) -> f64 {
    reports.iter().filter_map(|r| r.cluster_constant()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenClass {
    Dominant,
    Fast,
}

impl EigenClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EigenClass::Dominant => "dominant",
            EigenClass::Fast => "fast",
        }
    }
}

/// `Re > -1/(2 eps)` is dominant.
pub fn classify(z: C64, epsilon: f64) -> EigenClass {
    if z.re > -0.5 / epsilon {
        EigenClass::Dominant
    } else {
        EigenClass::Fast
    }
}

#[derive(Clone, Debug)]
pub struct NumericalSpectrum {
    pub eigenvalues: Vec<C64>,
    pub classes: Vec<EigenClass>,
    pub epsilon: f64,
}

impl NumericalSpectrum {
    pub fn of_class(&self, c: EigenClass) -> impl Iterator<Item = C64> + '_ {
        self.eigenvalues.iter().zip(&self.classes).filter(move |(_, k)| **k == c).map(|(z, _)| *z)
    }

    /// CSV with columns `re,im,class`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,class\n");
        for (z, c) in self.eigenvalues.iter().zip(&self.classes) {
            s.push_str(&format!("{},{},{}\n", z.re, z.im, c.as_str()));
        }
        s
    }
}

/// Largest number of cells accepted by [`numerical_spectrum`].
pub const MAX_DENSE_CELLS: usize = 200;

/// Dense Jacobian of the semidiscrete operator at `base` (forward
/// differences, `h = 1e-7 (1 + |f|)`) restricted to interior unknowns.
pub fn jacobian(op: &TransportOperator, base: &[f64]) -> Result<DMatrix<f64>> {
    let grid = op.grid();
    if grid.n_cells() > MAX_DENSE_CELLS {
        return Err(Error::param("cells", format!("{} cells exceed the dense limit {MAX_DENSE_CELLS}", grid.n_cells())));
    }
    if base.len() != op.state_len() {
        return Err(Error::Input("base state has the wrong length".into()));
    }
    let rl = grid.row_len();
    let idx: Vec<usize> = (0..op.n_rows())
        .flat_map(|r| grid.interior().map(move |(_, _, p)| r * rl + p).collect::<Vec<_>>())
        .collect();
    let n = idx.len();
    let mut x = base.to_vec();
    let mut f0 = vec![0.0; x.len()];
    op.rhs(&mut x, &mut f0);
    let cols: Vec<Vec<f64>> = idx
        .par_iter()
        .map(|&j| {
            let mut x = base.to_vec();
            let h = 1e-7 * (1.0 + base[j].abs());
            x[j] += h;
            let mut f = vec![0.0; x.len()];
            op.rhs(&mut x, &mut f);
            idx.iter().map(|&i| (f[i] - f0[i]) / h).collect()
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

pub fn numerical_spectrum(op: &TransportOperator, base: &[f64]) -> Result<NumericalSpectrum> {
    let jac = jacobian(op, base)?;
    if jac.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("Jacobian has non-finite entries".into()));
    }
    let ev = jac.complex_eigenvalues();
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        let norm = jac.norm();
        return Err(Error::Eigen(format!("eigensolver produced non-finite values (Frobenius norm {norm:e})")));
    }
    let eps = op.epsilon();
    let eigenvalues: Vec<C64> = ev.iter().copied().collect();
    let classes = eigenvalues.iter().map(|z| classify(*z, eps)).collect();
    Ok(NumericalSpectrum { eigenvalues, classes, epsilon: eps })
}

/// `sigma = tau^K ((M + 1) tau - M)` with `M = Dt/dt - (K + 1)`.
pub fn pfe_amplification(tau: C64, big_dt: f64, delta_t: f64, k: usize) -> C64 {
    let m = big_dt / delta_t - (k + 1) as f64;
    tau.powu(k as u32) * (tau * (m + 1.0) - m)
}

/// Amplification of a projective Runge-Kutta step on `y' = lambda y` with
/// inner factor `tau = 1 + lambda dt`.
pub fn prk_amplification(tau: C64, tableau: &ButcherTableau, big_dt: f64, delta_t: f64, k: usize) -> Result<C64> {
    tableau.validate()?;
    let tk = tau.powu(k as u32);
    let tk1 = tk * tau;
    let slope = (tk1 - tk) / delta_t;
    let span = (k + 1) as f64 * delta_t;
    let mut kappa: Vec<C64> = Vec::with_capacity(tableau.stages());
    kappa.push(slope);
    for s in 1..tableau.stages() {
        let c = tableau.c[s];
        let ms_dt = c * big_dt - span;
        let mut acc = C64::new(0.0, 0.0);
        for (l, a) in tableau.a[s].iter().enumerate() {
            acc += kappa[l] * (a / c);
        }
        kappa.push(slope * (tk1 + acc * ms_dt));
    }
    let mut sum = C64::new(0.0, 0.0);
    for (b, kv) in tableau.b.iter().zip(&kappa) {
        sum += kv * *b;
    }
    Ok(tk1 + sum * (big_dt - span))
}

/// Rectangle `[re0, re1] x [im0, im1]` of the complex `tau` plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Default for Window {
    fn default() -> Self {
        Window { re: (-2.0, 2.0), im: (-2.0, 2.0) }
    }
}

/// Boolean raster of `|sigma(tau)| <= 1`, rows by imaginary part.
#[derive(Clone, Debug)]
pub struct Raster {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub stable: Vec<bool>,
}

impl Raster {
    pub fn point(&self, i: usize, j: usize) -> C64 {
        let fx = if self.nx > 1 { i as f64 / (self.nx - 1) as f64 } else { 0.5 };
        let fy = if self.ny > 1 { j as f64 / (self.ny - 1) as f64 } else { 0.5 };
        C64::new(
            self.window.re.0 + fx * (self.window.re.1 - self.window.re.0),
            self.window.im.0 + fy * (self.window.im.1 - self.window.im.0),
        )
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.stable[j * self.nx + i]
    }

    /// Stable pixels with an unstable (or missing) 4-neighbour.
    pub fn contour(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if !self.get(i, j) {
                    continue;
                }
                let edge = i == 0
                    || j == 0
                    || i + 1 == self.nx
                    || j + 1 == self.ny
                    || !self.get(i - 1, j)
                    || !self.get(i + 1, j)
                    || !self.get(i, j - 1)
                    || !self.get(i, j + 1);
                if edge {
                    out.push(self.point(i, j));
                }
            }
        }
        out
    }

    /// Number of 4-connected stable components.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.stable.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.stable.len() {
            if !self.stable[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(p) = stack.pop() {
                let (i, j) = (p % self.nx, p / self.nx);
                let mut push = |q: usize| {
                    if self.stable[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                };
                if i > 0 {
                    push(p - 1);
                }
                if i + 1 < self.nx {
                    push(p + 1);
                }
                if j > 0 {
                    push(p - self.nx);
                }
                if j + 1 < self.ny {
                    push(p + self.nx);
                }
            }
        }
        count
    }

    /// CSV with columns `re,im,stable`.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.stable.len() * 24);
        s.push_str("re,im,stable\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                let z = self.point(i, j);
                s.push_str(&format!("{},{},{}\n", z.re, z.im, self.get(i, j) as u8));
            }
        }
        s
    }
}

/// Rasterizes `{tau : |sigma(tau)| <= 1}` for the projective method with the
/// given tableau, `Dt/dt = ratio` and `K` damping steps.
pub fn stability_region(
    tableau: &ButcherTableau,
    ratio: f64,
    k: usize,
    window: Window,
    nx: usize,
    ny: usize,
) -> Result<Raster> {
    tableau.validate()?;
    if nx < 2 || ny < 2 {
        return Err(Error::param("resolution", "need at least 2 x 2 pixels"));
    }
    if ratio < (k + 1) as f64 {
        return Err(Error::param("ratio", format!("Dt/dt = {ratio} < K + 1 = {}", k + 1)));
    }
    let mut r = Raster { window, nx, ny, stable: vec![false; nx * ny] };
    let euler = tableau.stages() == 1;
    let rows: Vec<Vec<bool>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let tau = r.point(i, j);
                    let s = if euler {
                        pfe_amplification(tau, ratio, 1.0, k)
                    } else {
                        prk_amplification(tau, tableau, ratio, 1.0, k).unwrap()
                    };
                    s.norm() <= 1.0 + 1e-12
                })
                .collect()
        })
        .collect();
    for (j, row) in rows.into_iter().enumerate() {
        r.stable[j * nx..(j + 1) * nx].copy_from_slice(&row);
    }
    Ok(r)
}

/// The two disks `D(1 - dt/Dt, dt/Dt)` and `D(0, (dt/Dt)^(1/K))` as `(center, radius)`.
pub fn pfe_disks(ratio: f64, k: usize) -> [(f64, f64); 2] {
    let r = 1.0 / ratio;
    [(1.0 - r, r), (0.0, r.powf(1.0 / k as f64))]
}
