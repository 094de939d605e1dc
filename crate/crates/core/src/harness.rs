//! Experiment drivers: single runs with snapshots, spatial and temporal
//! convergence studies, speedup and IMEX timing comparisons.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::grid::{init_kinetic, Grid, MacroField};
use crate::integrate::{direct_integrate, inner_euler, ButcherTableau, Imex1, Projective, ProjectiveParams, StepStats};
use crate::problems::{ModelChoice, Problem};
use crate::transport::{SchemeSpec, TransportOperator};
use crate::{Error, Result};

/// Errors below `PLATEAU_FACTOR * eps` are attributed to the inner integrator.
pub const PLATEAU_FACTOR: f64 = 10.0;
/// Direct runs longer than this are timed on a sample and extrapolated.
pub const DIRECT_EXTRAPOLATE_ABOVE: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Projective,
    Direct,
    Imex,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "projective" | "pi" => Some(Method::Projective),
            "direct" => Some(Method::Direct),
            "imex" => Some(Method::Imex),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Projective => "projective",
            Method::Direct => "direct",
            Method::Imex => "imex",
        }
    }
}

/// Everything needed to run one problem.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub model: ModelChoice,
    pub scheme: SchemeSpec,
    pub epsilon: f64,
    pub k: usize,
    /// Order of the projective Runge-Kutta method (1 is forward Euler).
    pub order: usize,
    pub cfl: f64,
    /// Outer step; `cfl * dx^2` when unset.
    pub big_dt: Option<f64>,
    /// Inner step; `epsilon` when unset.
    pub delta_t: Option<f64>,
    pub cells: usize,
    pub t_end: f64,
    pub method: Method,
}

impl RunSpec {
    pub fn recommended(p: &Problem) -> Self {
        let r = &p.recommended;
        RunSpec {
            model: r.model.clone(),
            scheme: r.scheme,
            epsilon: r.epsilon,
            k: r.k,
            order: r.order,
            cfl: r.cfl,
            big_dt: None,
            delta_t: None,
            cells: p.cells[0],
            t_end: p.t_end,
            method: Method::Projective,
        }
    }

    pub fn outer_step(&self, dx: f64) -> f64 {
        self.big_dt.unwrap_or(self.cfl * dx * dx)
    }

    pub fn inner_step(&self) -> f64 {
        self.delta_t.unwrap_or(self.epsilon)
    }

    pub fn params(&self, dx: f64) -> Result<ProjectiveParams> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param("epsilon", "must be positive: the schemes are explicit in the relaxation"));
        }
        if self.k < 1 {
            return Err(Error::param("K", "at least one damping step is needed"));
        }
        let p = ProjectiveParams {
            epsilon: self.epsilon,
            delta_t: self.inner_step(),
            big_dt: self.outer_step(dx),
            k: self.k,
            cfl: self.cfl,
            tableau: ButcherTableau::for_order(self.order)?,
        };
        p.validate()?;
        Ok(p)
    }

    /// Flat `key = value` description.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("model.kind".to_string(), self.model.kind.as_str().to_string()),
            ("model.lambda".into(), format!("[{}, {}]", self.model.lambda[0], self.model.lambda[1])),
            ("model.theta".into(), self.model.theta.to_string()),
            ("model.mu".into(), self.model.mu.to_string()),
            ("scheme.hyperbolic".into(), format!("{:?}", self.scheme.hyperbolic)),
            ("scheme.parabolic".into(), format!("{:?}", self.scheme.parabolic)),
            ("epsilon".into(), self.epsilon.to_string()),
            ("K".into(), self.k.to_string()),
            ("order".into(), self.order.to_string()),
            ("cfl".into(), self.cfl.to_string()),
            ("cells".into(), self.cells.to_string()),
            ("t_end".into(), self.t_end.to_string()),
            ("method".into(), self.method.as_str().to_string()),
        ];
        if let Some(d) = self.big_dt {
            v.push(("Delta_t".into(), d.to_string()));
        }
        if let Some(d) = self.delta_t {
            v.push(("delta_t".into(), d.to_string()));
        }
        v
    }
}

/// Problem, grid, operator and initial kinetic state for one run.
pub struct Setup {
    pub grid: Grid,
    pub op: TransportOperator,
    pub state: Vec<f64>,
}

pub fn setup(problem: &Problem, spec: &RunSpec) -> Result<Setup> {
    let grid = problem.grid_with(spec.cells)?;
    let model = problem.build_model(&spec.model, spec.epsilon)?;
    let u0 = problem.initial(&grid)?;
    let f0 = init_kinetic(&model, &grid, &u0)?;
    let op = TransportOperator::new(model, grid.clone(), spec.scheme, problem.boundary)?;
    Ok(Setup { grid, op, state: f0.data })
}

impl Setup {
    pub fn macro_field(&self) -> MacroField {
        self.macro_of(&self.state)
    }

    pub fn macro_of(&self, state: &[f64]) -> MacroField {
        let m = self.op.model();
        crate::grid::project_state(&self.grid, state, m.n_velocities(), m.n_components())
    }

    /// Interior mass plus accumulated outflow, per component.
    pub fn total_mass(&self) -> Vec<f64> {
        let (m, a) = self.op.balance(&self.state);
        m.iter().zip(&a).map(|(x, y)| x + y).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub grid: Grid,
    pub u: MacroField,
    /// `(t, u)` at each requested output time.
    pub snapshots: Vec<(f64, MacroField)>,
    pub mass_start: Vec<f64>,
    pub mass_end: Vec<f64>,
    pub stats: StepStats,
    pub seconds: f64,
}

impl RunOutput {
    pub fn mass_drift(&self) -> f64 {
        self.mass_start.iter().zip(&self.mass_end).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Advances `s.state` from `t0` to `t1` with the chosen method.
fn advance(s: &mut Setup, spec: &RunSpec, pi: &mut Option<Projective>, imex: &mut Imex1, t0: f64, t1: f64) -> Result<()> {
    if t1 <= t0 {
        return Ok(());
    }
    let op = &s.op;
    let mut rhs = |x: &mut [f64], o: &mut [f64]| op.rhs(x, o);
    match spec.method {
        Method::Projective => {
            let p = pi.as_mut().expect("projective integrator");
            p.integrate(&mut rhs, &mut s.state, t0, t1, |_, _| {})
        }
        Method::Direct => {
            let n = direct_integrate(&mut rhs, &mut s.state, t1 - t0, spec.inner_step(), false)?;
            if let Some(p) = pi.as_mut() {
                p.stats.inner_steps += n;
            }
            Ok(())
        }
        Method::Imex => {
            let n = imex.integrate(op, &mut s.state, t1 - t0, spec.outer_step(s.grid.dx()))?;
            if let Some(p) = pi.as_mut() {
                p.stats.outer_steps += n;
            }
            Ok(())
        }
    }
}

/// Runs `problem` to `spec.t_end`, recording the macroscopic field at each of
/// `times` (clamped to `[0, t_end]`).
pub fn run(problem: &Problem, spec: &RunSpec, times: &[f64]) -> Result<RunOutput> {
    if !(spec.t_end >= 0.0 && spec.t_end.is_finite()) {
        return Err(Error::param("t_end", "must be finite and nonnegative"));
    }
    let mut s = setup(problem, spec)?;
    let params = spec.params(s.grid.dx())?;
    let mut pi = Some(Projective::new(params, s.state.len())?);
    let mut imex = Imex1::new(if spec.method == Method::Imex { s.state.len() } else { 0 });
    let mut marks: Vec<f64> = times.iter().map(|t| t.clamp(0.0, spec.t_end)).collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let mass_start = s.total_mass();
    let clock = Instant::now();
    let mut snapshots = Vec::with_capacity(marks.len());
    let mut t = 0.0;
    for m in marks {
        advance(&mut s, spec, &mut pi, &mut imex, t, m)?;
        t = t.max(m);
        snapshots.push((m, s.macro_field()));
    }
    advance(&mut s, spec, &mut pi, &mut imex, t, spec.t_end)?;
    let seconds = clock.elapsed().as_secs_f64();
    Ok(RunOutput {
        u: s.macro_field(),
        mass_end: s.total_mass(),
        grid: s.grid,
        snapshots,
        mass_start,
        stats: pi.map(|p| p.stats).unwrap_or_default(),
        seconds,
    })
}

/// Discrete `L1`, `L2` (scaled by the cell volume) and `Linf` norms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Norms {
    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.linf]
    }
}

pub fn norms(grid: &Grid, values: &[f64]) -> Norms {
    let vol = grid.cell_volume();
    let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0f64);
    for v in values {
        let a = v.abs();
        l1 += a;
        l2 += a * a;
        linf = linf.max(a);
    }
    Norms { l1: l1 * vol, l2: (l2 * vol).sqrt(), linf }
}

pub fn error_norms(grid: &Grid, a: &MacroField, b: &MacroField) -> Norms {
    let d: Vec<f64> = a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
    norms(grid, &d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvRow {
    /// `dx` or `Dt`.
    pub h: f64,
    pub errors: Norms,
    /// Fitted order against the previous row.
    pub order: Option<[f64; 3]>,
    pub plateau: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvRow>,
    pub threshold: f64,
}

impl ConvergenceTable {
    /// Fits local orders `log(e_{i-1}/e_i)/log(h_{i-1}/h_i)` and flags rows
    /// whose `L1` error is below `threshold`.
    pub fn from_errors(h: &[f64], errors: &[Norms], threshold: f64) -> Self {
        let mut rows: Vec<ConvRow> = Vec::with_capacity(h.len());
        for (i, (&h, &e)) in h.iter().zip(errors).enumerate() {
            let order = (i > 0).then(|| {
                let prev = &rows[i - 1];
                let r = (prev.h / h).ln();
                let pe = prev.errors.as_array();
                let ce = e.as_array();
                [0, 1, 2].map(|n| (pe[n] / ce[n]).ln() / r)
            });
            rows.push(ConvRow { h, errors: e, order, plateau: e.l1 < threshold });
        }
        ConvergenceTable { rows, threshold }
    }

    /// Orders between consecutive rows that are both above the plateau.
    pub fn pre_plateau_orders(&self) -> Vec<[f64; 3]> {
        self.rows
            .windows(2)
            .filter(|w| !w[0].plateau && !w[1].plateau)
            .filter_map(|w| w[1].order)
            .collect()
    }

    /// Least-squares slope of `log e` against `log h` over the rows above the
    /// plateau, per norm; `None` with fewer than two such rows.
    pub fn fitted_orders(&self) -> Option<[f64; 3]> {
        let rows: Vec<&ConvRow> = self.rows.iter().filter(|r| !r.plateau).collect();
        if rows.len() < 2 {
            return None;
        }
        let n = rows.len() as f64;
        let x: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
        let xm = x.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
        Some([0, 1, 2].map(|k| {
            let y: Vec<f64> = rows.iter().map(|r| r.errors.as_array()[k].ln()).collect();
            let ym = y.iter().sum::<f64>() / n;
            x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum::<f64>() / sxx
        }))
    }

    /// Smallest error reached, per norm.
    pub fn floor(&self) -> Norms {
        let mut n = Norms { l1: f64::INFINITY, l2: f64::INFINITY, linf: f64::INFINITY };
        for r in &self.rows {
            n.l1 = n.l1.min(r.errors.l1);
            n.l2 = n.l2.min(r.errors.l2);
            n.linf = n.linf.min(r.errors.linf);
        }
        n
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,err_l1,err_l2,err_linf,order_l1,order_l2,order_linf,plateau\n");
        for r in &self.rows {
            let _ = write!(s, "{},{},{},{}", r.h, r.errors.l1, r.errors.l2, r.errors.linf);
            match r.order {
                Some(o) => {
                    let _ = write!(s, ",{},{},{}", o[0], o[1], o[2]);
                }
                None => s.push_str(",,,"),
            }
            let _ = writeln!(s, ",{}", r.plateau);
        }
        s
    }

    /// Re-fits a table from the `h` and error columns of a CSV written by
    /// [`ConvergenceTable::to_csv`].
    pub fn from_csv(text: &str, threshold: f64) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Input("empty convergence table".into()))?;
        if !header.starts_with("h,err_l1,err_l2,err_linf") {
            return Err(Error::Input(format!("unexpected header `{header}`")));
        }
        let mut h = Vec::new();
        let mut e = Vec::new();
        for (n, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            let num = |i: usize| -> Result<f64> {
                f.get(i)
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::Input(format!("row {}: bad field {}", n + 1, i + 1)))
            };
            h.push(num(0)?);
            e.push(Norms { l1: num(1)?, l2: num(2)?, linf: num(3)? });
        }
        Ok(Self::from_errors(&h, &e, threshold))
    }
}

fn map_ladder<T: Send, F>(n: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Errors against the exact solution at `spec.t_end` for each grid size.
pub fn spatial_convergence(problem: &Problem, spec: &RunSpec, cells: &[usize], parallel: bool) -> Result<ConvergenceTable> {
    if !problem.has_exact() {
        return Err(Error::NoExact(problem.name.clone()));
    }
    let runs = map_ladder(cells.len(), parallel, |i| {
        let s = RunSpec { cells: cells[i], ..spec.clone() };
        let out = run(problem, &s, &[])?;
        let exact = problem.exact_averages(&out.grid, spec.t_end)?;
        Ok((out.grid.dx(), error_norms(&out.grid, &out.u, &exact)))
    })?;
    let (h, e): (Vec<f64>, Vec<Norms>) = runs.into_iter().unzip();
    Ok(ConvergenceTable::from_errors(&h, &e, PLATEAU_FACTOR * spec.epsilon))
}

/// Checks that each entry halves the previous one and leaves room for the
/// inner steps.
pub fn validate_ladder(dts: &[f64], inner_span: f64) -> Result<()> {
    if dts.len() < 2 {
        return Err(Error::param("ladder", "needs at least two time steps"));
    }
    for w in dts.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::param("ladder", format!("{} is not half of {}", w[1], w[0])));
        }
    }
    if let Some(d) = dts.iter().find(|d| !(**d >= inner_span)) {
        return Err(Error::param("ladder", format!("Dt = {d} is below (K+1) dt = {inner_span}")));
    }
    Ok(())
}

/// Endpoint fields for each outer step of the ladder.
pub fn time_ladder(problem: &Problem, spec: &RunSpec, dts: &[f64], parallel: bool) -> Result<(Grid, Vec<MacroField>)> {
    validate_ladder(dts, (spec.k + 1) as f64 * spec.inner_step())?;
    let outs = map_ladder(dts.len(), parallel, |i| {
        let s = RunSpec { big_dt: Some(dts[i]), ..spec.clone() };
        run(problem, &s, &[])
    })?;
    let grid = outs[0].grid.clone();
    Ok((grid, outs.into_iter().map(|o| o.u).collect()))
}

/// Errors `||u_Dt(T) - u_{Dt/2}(T)||` along a halving ladder.
pub fn temporal_convergence(problem: &Problem, spec: &RunSpec, dts: &[f64], parallel: bool) -> Result<ConvergenceTable> {
    let (grid, us) = time_ladder(problem, spec, dts, parallel)?;
    let e: Vec<Norms> = us.windows(2).map(|w| error_norms(&grid, &w[0], &w[1])).collect();
    Ok(ConvergenceTable::from_errors(&dts[..dts.len() - 1], &e, PLATEAU_FACTOR * spec.epsilon))
}

/// Richardson combination `(u_Dt - 2^p u_{Dt/2})/(1 - 2^p)`.
pub fn richardson(u_dt: &[f64], u_half: &[f64], p: f64) -> Vec<f64> {
    let s = 2f64.powf(p);
    u_dt.iter().zip(u_half).map(|(a, b)| (a - s * b) / (1.0 - s)).collect()
}

/// Median of `repeats` timings of `f`, after one discarded warm-up call.
pub fn time_median<F: FnMut() -> Result<()>>(repeats: usize, mut f: F) -> Result<f64> {
    f()?;
    let mut t = Vec::with_capacity(repeats.max(1));
    for _ in 0..repeats.max(1) {
        let c = Instant::now();
        f()?;
        t.push(c.elapsed().as_secs_f64());
    }
    t.sort_by(f64::total_cmp);
    Ok(t[t.len() / 2])
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedupRow {
    pub epsilon: f64,
    pub big_dt: f64,
    pub delta_t: f64,
    pub cpu_direct: f64,
    pub cpu_pi: f64,
    pub real_factor: f64,
    pub theoretical_factor: f64,
    /// Direct time extrapolated from a sample of steps.
    pub direct_estimated: bool,
}

/// `Dt/(dt (K + 1))`.
pub fn theoretical_speedup(big_dt: f64, delta_t: f64, k: usize) -> f64 {
    big_dt / (delta_t * (k + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchOptions {
    pub repeats: usize,
    /// Direct runs with more steps than this are extrapolated.
    pub direct_budget: u64,
    /// Steps timed when extrapolating.
    pub direct_sample: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { repeats: 3, direct_budget: DIRECT_EXTRAPOLATE_ABOVE, direct_sample: 1_000_000 }
    }
}

fn time_pi(problem: &Problem, spec: &RunSpec, repeats: usize) -> Result<(f64, MacroField)> {
    let base = setup(problem, spec)?;
    let params = spec.params(base.grid.dx())?;
    let mut end = None;
    let t = time_median(repeats, || {
        let mut st = base.state.clone();
        let mut p = Projective::new(params.clone(), st.len())?;
        let op = &base.op;
        p.integrate(&mut |x: &mut [f64], o: &mut [f64]| op.rhs(x, o), &mut st, 0.0, spec.t_end, |_, _| {})?;
        end = Some(st);
        Ok(())
    })?;
    Ok((t, base.macro_of(&end.expect("timed at least once"))))
}

pub fn speedup_bench(problem: &Problem, spec: &RunSpec, eps_list: &[f64], opts: BenchOptions) -> Result<Vec<SpeedupRow>> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let s = RunSpec { epsilon: eps, method: Method::Projective, ..spec.clone() };
        let base = setup(problem, &s)?;
        let big_dt = s.outer_step(base.grid.dx());
        let dt = s.inner_step();
        let (cpu_pi, _) = time_pi(problem, &s, opts.repeats)?;
        let steps = (s.t_end / dt).ceil() as u64;
        let estimated = steps > opts.direct_budget;
        let op = &base.op;
        let cpu_direct = if estimated {
            let n = opts.direct_sample.max(1).min(steps);
            let per = time_median(opts.repeats, || {
                let mut st = base.state.clone();
                let mut buf = vec![0.0; st.len()];
                let mut rhs = |x: &mut [f64], o: &mut [f64]| op.rhs(x, o);
                for _ in 0..n {
                    inner_euler(&mut rhs, &mut st, dt, &mut buf);
                }
                Ok(())
            })? / n as f64;
            per * steps as f64
        } else {
            time_median(opts.repeats, || {
                let mut st = base.state.clone();
                direct_integrate(&mut |x: &mut [f64], o: &mut [f64]| op.rhs(x, o), &mut st, s.t_end, dt, true)?;
                Ok(())
            })?
        };
        rows.push(SpeedupRow {
            epsilon: eps,
            big_dt,
            delta_t: dt,
            cpu_direct,
            cpu_pi,
            real_factor: cpu_direct / cpu_pi,
            theoretical_factor: theoretical_speedup(big_dt, dt, s.k),
            direct_estimated: estimated,
        });
    }
    Ok(rows)
}

pub fn speedup_csv(rows: &[SpeedupRow]) -> String {
    let mut s = String::from("epsilon,Delta_t,delta_t,cpu_direct,cpu_pi,real_factor,theoretical_factor,direct_estimated\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.epsilon,
            r.big_dt,
            r.delta_t,
            r.cpu_direct,
            r.cpu_pi,
            r.real_factor,
            r.theoretical_factor,
            r.direct_estimated
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImexRow {
    pub epsilon: f64,
    pub big_dt: f64,
    pub cpu_pi: f64,
    pub cpu_imex: f64,
    /// `L1` distance between the two macroscopic endpoints.
    pub l1_distance: f64,
}

pub fn imex_comparison(problem: &Problem, spec: &RunSpec, eps_list: &[f64], repeats: usize) -> Result<Vec<ImexRow>> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let s = RunSpec { epsilon: eps, ..spec.clone() };
        let (cpu_pi, u_pi) = time_pi(problem, &s, repeats)?;
        let base = setup(problem, &s)?;
        let big_dt = s.outer_step(base.grid.dx());
        let mut end = None;
        let cpu_imex = time_median(repeats, || {
            let mut st = base.state.clone();
            Imex1::new(st.len()).integrate(&base.op, &mut st, s.t_end, big_dt)?;
            end = Some(st);
            Ok(())
        })?;
        let u_imex = base.macro_of(&end.expect("timed at least once"));
        rows.push(ImexRow {
            epsilon: eps,
            big_dt,
            cpu_pi,
            cpu_imex,
            l1_distance: error_norms(&base.grid, &u_pi, &u_imex).l1,
        });
    }
    Ok(rows)
}

pub fn imex_csv(rows: &[ImexRow]) -> String {
    let mut s = String::from("epsilon,Delta_t,cpu_pi,cpu_imex,l1_distance\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.epsilon, r.big_dt, r.cpu_pi, r.cpu_imex, r.l1_distance);
    }
    s
}

/// `key = value` lines, with strings quoted so the file parses as TOML.
pub fn manifest(entries: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in entries {
        let quoted = v.parse::<f64>().is_err() && v != "true" && v != "false" && !v.starts_with('[');
        if quoted {
            let _ = writeln!(s, "{k} = {v:?}");
        } else {
            let _ = writeln!(s, "{k} = {v}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::catalog;

    #[test]
    fn fitted_orders_of_exact_powers() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<Norms> = h.iter().map(|h| Norms { l1: h * h * h, l2: 2.0 * h * h * h, linf: h.powi(4) }).collect();
        let t = ConvergenceTable::from_errors(&h, &e, 0.0);
        let o = t.rows[2].order.unwrap();
        assert!((o[0] - 3.0).abs() < 1e-12 && (o[1] - 3.0).abs() < 1e-12 && (o[2] - 4.0).abs() < 1e-12);
        let back = ConvergenceTable::from_csv(&t.to_csv(), 0.0).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ladder_must_halve() {
        assert!(validate_ladder(&[0.1, 0.05, 0.025], 1e-3).is_ok());
        assert!(validate_ladder(&[0.1, 0.04], 1e-3).is_err());
        assert!(validate_ladder(&[0.1, 0.05], 0.06).is_err());
    }

    #[test]
    fn theoretical_speedups() {
        assert_eq!(theoretical_speedup(6.0, 1.0, 2), 2.0);
        assert!((theoretical_speedup(5.1e-5, 1e-5, 2) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn short_run_conserves_mass() {
        let p = catalog("viscous_lwr").unwrap();
        let spec = RunSpec { cells: 50, t_end: 1e-3, ..RunSpec::recommended(&p) };
        let out = run(&p, &spec, &[5e-4]).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert!(out.mass_drift() < 1e-13);
    }
}
