//! Inner forward Euler, projective forward Euler / Runge-Kutta outer
//! integrators, and the direct and IMEX baselines.
//!
//! Integrators see the state as a flat slice and the right-hand side as
//! `rhs(state, out)`; `rhs` may refresh ghost values of `state` in place.

use crate::transport::TransportOperator;
use crate::{Error, Result};

/// Refuse direct integrations longer than this unless forced.
pub const DIRECT_STEP_LIMIT: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn euler() -> Self {
        ButcherTableau { a: vec![vec![]], b: vec![1.0], c: vec![0.0] }
    }

    pub fn heun() -> Self {
        ButcherTableau { a: vec![vec![], vec![1.0]], b: vec![0.5, 0.5], c: vec![0.0, 1.0] }
    }

    /// Third-order strong-stability-preserving Runge-Kutta.
    pub fn ssp3() -> Self {
        ButcherTableau {
            a: vec![vec![], vec![1.0], vec![0.25, 0.25]],
            b: vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            c: vec![0.0, 1.0, 0.5],
        }
    }

    /// Classical fourth-order Runge-Kutta.
    pub fn rk4() -> Self {
        ButcherTableau {
            a: vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        }
    }

    pub fn for_order(order: usize) -> Result<Self> {
        match order {
            1 => Ok(Self::euler()),
            2 => Ok(Self::heun()),
            3 => Ok(Self::ssp3()),
            4 => Ok(Self::rk4()),
            _ => Err(Error::param("order", format!("no projective tableau of order {order}"))),
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        let tol = 1e-14;
        if s == 0 || self.c.len() != s || self.a.len() != s {
            return Err(Error::Tableau("inconsistent stage counts".into()));
        }
        if (self.b.iter().sum::<f64>() - 1.0).abs() > tol {
            return Err(Error::Tableau("weights do not sum to 1".into()));
        }
        for i in 0..s {
            if self.a[i].len() != i {
                return Err(Error::Tableau(format!("row {i} must have {i} entries (explicit scheme)")));
            }
            if !(0.0..=1.0).contains(&self.b[i]) || !(0.0..=1.0).contains(&self.c[i]) {
                return Err(Error::Tableau(format!("b or c of stage {i} outside [0, 1]")));
            }
            if (self.a[i].iter().sum::<f64>() - self.c[i]).abs() > tol {
                return Err(Error::Tableau(format!("row sum of stage {i} differs from c")));
            }
            if self.a[i].iter().any(|&a| a < 0.0 || a > self.c[i] + tol) {
                return Err(Error::Tableau(format!("stage {i} has a_sl outside [0, c_s]")));
            }
            if i > 0 && self.c[i] == 0.0 {
                return Err(Error::Tableau(format!("c = 0 at stage {i}; the stage seed divides by c")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveParams {
    pub epsilon: f64,
    /// Inner step `dt`.
    pub delta_t: f64,
    /// Outer step `Dt`.
    pub big_dt: f64,
    /// Damping steps; `K + 1` inner steps per stage.
    pub k: usize,
    pub cfl: f64,
    pub tableau: ButcherTableau,
}

impl ProjectiveParams {
    /// Relative extrapolation length `M = Dt/dt - (K + 1)`.
    pub fn extrapolation(&self) -> f64 {
        self.big_dt / self.delta_t - (self.k + 1) as f64
    }

    /// Theoretical speedup over direct stepping per outer step.
    pub fn speedup(&self) -> f64 {
        self.big_dt / (self.delta_t * (self.k + 1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t > 0.0 && self.delta_t.is_finite()) {
            return Err(Error::param("delta_t", format!("must be positive, got {}", self.delta_t)));
        }
        if !(self.big_dt.is_finite()) || self.big_dt < (self.k + 1) as f64 * self.delta_t {
            return Err(Error::param(
                "Delta_t",
                format!(
                    "Delta_t = {:e} < (K+1) delta_t = {:e}: no room to extrapolate; reduce K or use direct integration",
                    self.big_dt,
                    (self.k + 1) as f64 * self.delta_t
                ),
            ));
        }
        self.tableau.validate()
    }
}

/// `dt = eps`, `K >= 2`, `Dt = C dx^2`.
pub fn select_parameters(epsilon: f64, dx: f64, cfl: f64, k: usize, order: usize) -> Result<ProjectiveParams> {
    if !(epsilon > 0.0) {
        return Err(Error::param("epsilon", "must be positive"));
    }
    if !(cfl > 0.0 && dx > 0.0) {
        return Err(Error::param("cfl", "C and dx must be positive"));
    }
    let p = ProjectiveParams {
        epsilon,
        delta_t: epsilon,
        big_dt: cfl * dx * dx,
        k: k.max(2),
        cfl,
        tableau: ButcherTableau::for_order(order)?,
    };
    p.validate()?;
    Ok(p)
}

fn check_finite(f: &[f64], step: usize) -> Result<()> {
    if f.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { step })
    }
}

/// `f <- f + dt rhs(f)`.
pub fn inner_euler<R: FnMut(&mut [f64], &mut [f64])>(rhs: &mut R, f: &mut [f64], dt: f64, buf: &mut [f64]) {
    rhs(f, buf);
    for (x, d) in f.iter_mut().zip(buf.iter()) {
        *x += dt * d;
    }
}

/// Counters accumulated over an integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub outer_steps: usize,
    pub inner_steps: u64,
}

/// Buffers for projective steps over states of one length.
#[derive(Clone, Debug)]
pub struct Projective {
    pub params: ProjectiveParams,
    buf: Vec<f64>,
    base: Vec<f64>,
    work: Vec<f64>,
    slopes: Vec<Vec<f64>>,
    /// Inner trajectory of the first stage of the last step, when enabled.
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub stats: StepStats,
}

impl Projective {
    pub fn new(params: ProjectiveParams, len: usize) -> Result<Self> {
        params.validate()?;
        let s = params.tableau.stages();
        Ok(Projective {
            params,
            buf: vec![0.0; len],
            base: vec![0.0; len],
            work: vec![0.0; len],
            slopes: vec![vec![0.0; len]; s],
            trajectory: None,
            stats: StepStats::default(),
        })
    }

    pub fn keep_trajectory(&mut self, on: bool) {
        self.trajectory = on.then(Vec::new);
    }

    /// `K + 1` inner steps on `x`; leaves the slope `(x_{K+1} - x_K)/dt` in `slope`.
    fn inner_run<R: FnMut(&mut [f64], &mut [f64])>(
        rhs: &mut R,
        x: &mut [f64],
        buf: &mut [f64],
        slope: &mut [f64],
        k: usize,
        dt: f64,
        mut record: Option<&mut Vec<Vec<f64>>>,
    ) {
        for _ in 0..k {
            inner_euler(rhs, x, dt, buf);
            if let Some(r) = record.as_deref_mut() {
                r.push(x.to_vec());
            }
        }
        inner_euler(rhs, x, dt, buf);
        if let Some(r) = record {
            r.push(x.to_vec());
        }
        // (x_{K+1} - x_K)/dt is exactly the last right-hand side; taking it
        // from the buffer avoids cancellation when dt is tiny.
        slope.copy_from_slice(buf);
    }

    /// One projective Runge-Kutta step of outer size `big_dt` (may be shorter
    /// than the configured step, but not below `(K+1) dt`).
    pub fn step_with<R: FnMut(&mut [f64], &mut [f64])>(&mut self, rhs: &mut R, f: &mut [f64], big_dt: f64) {
        let dt = self.params.delta_t;
        let k = self.params.k;
        let inner_span = (k + 1) as f64 * dt;
        let tab = &self.params.tableau;
        if let Some(t) = self.trajectory.as_mut() {
            t.clear();
            t.push(f.to_vec());
        }
        self.base.copy_from_slice(f);
        Self::inner_run(
            rhs,
            &mut self.base,
            &mut self.buf,
            &mut self.slopes[0],
            k,
            dt,
            self.trajectory.as_mut(),
        );
        for s in 1..tab.stages() {
            let scale = (tab.c[s] * big_dt - inner_span) / tab.c[s];
            self.work.copy_from_slice(&self.base);
            for (l, a) in tab.a[s].iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                let w = scale * a;
                for (x, kl) in self.work.iter_mut().zip(&self.slopes[l]) {
                    *x += w * kl;
                }
            }
            let rest = &mut self.slopes[s..];
            Self::inner_run(rhs, &mut self.work, &mut self.buf, &mut rest[0], k, dt, None);
        }
        let span = big_dt - inner_span;
        f.copy_from_slice(&self.base);
        for (s, b) in tab.b.iter().enumerate() {
            if *b == 0.0 {
                continue;
            }
            let w = span * b;
            for (x, ks) in f.iter_mut().zip(&self.slopes[s]) {
                *x += w * ks;
            }
        }
        self.stats.outer_steps += 1;
        self.stats.inner_steps += (tab.stages() * (k + 1)) as u64;
    }

    pub fn step<R: FnMut(&mut [f64], &mut [f64])>(&mut self, rhs: &mut R, f: &mut [f64]) {
        let big = self.params.big_dt;
        self.step_with(rhs, f, big);
    }

    /// Integrates from `t0` to `t_end`, shortening the last outer step; calls
    /// `observe(t, f)` after every outer step.
    pub fn integrate<R, O>(&mut self, rhs: &mut R, f: &mut [f64], t0: f64, t_end: f64, mut observe: O) -> Result<()>
    where
        R: FnMut(&mut [f64], &mut [f64]),
        O: FnMut(f64, &[f64]),
    {
        let big = self.params.big_dt;
        let dt = self.params.delta_t;
        let span = (self.params.k + 1) as f64 * dt;
        let mut t = t0;
        let mut n = 0usize;
        let tol = 1e-12 * big;
        while t_end - t > tol {
            let remaining = t_end - t;
            if remaining >= big - tol {
                self.step_with(rhs, f, big);
                t = t0 + (n + 1) as f64 * big;
                if t_end - t < tol {
                    t = t_end;
                }
            } else if remaining >= span {
                self.step_with(rhs, f, remaining);
                t = t_end;
            } else {
                let steps = (remaining / dt).floor() as u64;
                for _ in 0..steps {
                    inner_euler(rhs, f, dt, &mut self.buf);
                }
                let rest = remaining - steps as f64 * dt;
                if rest > 1e-12 * dt {
                    inner_euler(rhs, f, rest, &mut self.buf);
                }
                self.stats.inner_steps += steps + 1;
                t = t_end;
            }
            n += 1;
            check_finite(f, n)?;
            observe(t, f);
        }
        Ok(())
    }
}

/// One projective forward Euler step (the one-stage projective Runge-Kutta path).
pub fn pfe_step<R: FnMut(&mut [f64], &mut [f64])>(rhs: &mut R, f: &mut [f64], params: &ProjectiveParams) -> Result<()> {
    let mut p = params.clone();
    p.tableau = ButcherTableau::euler();
    prk_step(rhs, f, &p)
}

pub fn prk_step<R: FnMut(&mut [f64], &mut [f64])>(rhs: &mut R, f: &mut [f64], params: &ProjectiveParams) -> Result<()> {
    let mut p = Projective::new(params.clone(), f.len())?;
    p.step(rhs, f);
    check_finite(f, 1)
}

/// Forward Euler with step `dt` up to `t_end` (the last step is shortened).
pub fn direct_integrate<R: FnMut(&mut [f64], &mut [f64])>(
    rhs: &mut R,
    f: &mut [f64],
    t_end: f64,
    dt: f64,
    force: bool,
) -> Result<u64> {
    if !(dt > 0.0) {
        return Err(Error::param("delta_t", "must be positive"));
    }
    let full = (t_end / dt * (1.0 - 1e-12)).floor().max(0.0);
    let steps = full as u64 + 1;
    if steps > DIRECT_STEP_LIMIT && !force {
        return Err(Error::StepBudget { steps, limit: DIRECT_STEP_LIMIT });
    }
    let mut buf = vec![0.0; f.len()];
    let n = full as u64;
    for s in 0..n {
        inner_euler(rhs, f, dt, &mut buf);
        if s % 4096 == 4095 {
            check_finite(f, s as usize + 1)?;
        }
    }
    let rest = t_end - n as f64 * dt;
    let mut taken = n;
    if rest > 1e-12 * dt {
        inner_euler(rhs, f, rest, &mut buf);
        taken += 1;
    }
    check_finite(f, taken as usize)?;
    Ok(taken)
}

/// Buffers for first-order IMEX steps.
#[derive(Clone, Debug)]
pub struct Imex1 {
    phi: Vec<f64>,
    maxw: Vec<f64>,
}

impl Imex1 {
    pub fn new(len: usize) -> Self {
        Imex1 { phi: vec![0.0; len], maxw: vec![0.0; len] }
    }

    /// `f' = (g + (Dt/eps) M(P g)) / (1 + Dt/eps)` with `g = f - Dt Phi(f)`.
    pub fn step(&mut self, op: &TransportOperator, f: &mut [f64], big_dt: f64) {
        op.neg_transport(f, &mut self.phi);
        for (x, d) in f.iter_mut().zip(&self.phi) {
            *x += big_dt * d;
        }
        op.maxwellian_state(f, &mut self.maxw);
        let r = big_dt / op.epsilon();
        let inv = 1.0 / (1.0 + r);
        let grid = op.grid();
        let rl = grid.row_len();
        for row in 0..op.n_rows() {
            for (_, _, p) in grid.interior() {
                let q = row * rl + p;
                f[q] = (f[q] + r * self.maxw[q]) * inv;
            }
        }
    }

    pub fn integrate(&mut self, op: &TransportOperator, f: &mut [f64], t_end: f64, big_dt: f64) -> Result<usize> {
        let mut t = 0.0;
        let mut n = 0;
        while t_end - t > 1e-12 * big_dt {
            let h = big_dt.min(t_end - t);
            self.step(op, f, h);
            t = if h == big_dt { (n + 1) as f64 * big_dt } else { t_end };
            n += 1;
            check_finite(f, n)?;
        }
        Ok(n)
    }
}
