//! Advection stencils and the semidiscrete kinetic operator
//! `D(f) = -Phi(f) + (M(P f) - f) / eps`.

use rayon::prelude::*;

use crate::grid::{Boundary, Grid};
use crate::model::{KineticModel, MaxwellianScratch};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypScheme {
    Upwind1,
    Upwind3,
    Upwind4,
    Cweno3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParScheme {
    Centered2,
    Centered4,
}

impl HypScheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "upwind1" => Some(HypScheme::Upwind1),
            "3" | "upwind3" => Some(HypScheme::Upwind3),
            "4" | "upwind4" => Some(HypScheme::Upwind4),
            "cweno3" => Some(HypScheme::Cweno3),
            _ => None,
        }
    }
    pub fn order(self) -> usize {
        match self {
            HypScheme::Upwind1 => 1,
            HypScheme::Upwind3 | HypScheme::Cweno3 => 3,
            HypScheme::Upwind4 => 4,
        }
    }
}

impl ParScheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2" | "centered2" => Some(ParScheme::Centered2),
            "4" | "centered4" => Some(ParScheme::Centered4),
            _ => None,
        }
    }
    pub fn order(self) -> usize {
        match self {
            ParScheme::Centered2 => 2,
            ParScheme::Centered4 => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    pub hyperbolic: HypScheme,
    pub parabolic: ParScheme,
}

impl SchemeSpec {
    pub fn new(hyperbolic: HypScheme, parabolic: ParScheme) -> Self {
        SchemeSpec { hyperbolic, parabolic }
    }
}

/// A linear derivative stencil: `f'(x_i) ~ sum_j c_j f_{i + lo + j} / (den dx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub lo: isize,
    pub c: &'static [f64],
    pub den: f64,
}

const UP1_P: Stencil = Stencil { lo: -1, c: &[-1.0, 1.0], den: 1.0 };
const UP1_M: Stencil = Stencil { lo: 0, c: &[-1.0, 1.0], den: 1.0 };
const UP3_P: Stencil = Stencil { lo: -2, c: &[1.0, -6.0, 3.0, 2.0], den: 6.0 };
const UP3_M: Stencil = Stencil { lo: -1, c: &[-2.0, -3.0, 6.0, -1.0], den: 6.0 };
const UP4_P: Stencil = Stencil { lo: -3, c: &[-1.0, 6.0, -18.0, 10.0, 3.0], den: 12.0 };
const UP4_M: Stencil = Stencil { lo: -1, c: &[-3.0, -10.0, 18.0, -6.0, 1.0], den: 12.0 };
const CEN2: Stencil = Stencil { lo: -1, c: &[-1.0, 0.0, 1.0], den: 2.0 };
const CEN4: Stencil = Stencil { lo: -2, c: &[1.0, -8.0, 0.0, 8.0, -1.0], den: 12.0 };

/// Linear stencil for an upwind scheme; `gamma = 0` takes the positive branch.
pub fn upwind_stencil(scheme: HypScheme, gamma: f64) -> Option<Stencil> {
    let pos = gamma >= 0.0;
    match scheme {
        HypScheme::Upwind1 => Some(if pos { UP1_P } else { UP1_M }),
        HypScheme::Upwind3 => Some(if pos { UP3_P } else { UP3_M }),
        HypScheme::Upwind4 => Some(if pos { UP4_P } else { UP4_M }),
        HypScheme::Cweno3 => None,
    }
}

pub fn centered_stencil(scheme: ParScheme) -> Stencil {
    match scheme {
        ParScheme::Centered2 => CEN2,
        ParScheme::Centered4 => CEN4,
    }
}

impl Stencil {
    #[inline]
    pub fn apply(&self, row: &[f64], i: usize, stride: usize) -> f64 {
        let base = i as isize + self.lo * stride as isize;
        let mut s = 0.0;
        for (j, c) in self.c.iter().enumerate() {
            s += c * row[(base + (j * stride) as isize) as usize];
        }
        s / self.den
    }
}

/// Which stencil family a velocity uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    Linear(Stencil),
    Cweno3 { positive: bool },
}

impl Scheme {
    pub fn hyperbolic(s: HypScheme, gamma: f64) -> Scheme {
        match upwind_stencil(s, gamma) {
            Some(st) => Scheme::Linear(st),
            None => Scheme::Cweno3 { positive: gamma >= 0.0 },
        }
    }
    pub fn parabolic(s: ParScheme) -> Scheme {
        Scheme::Linear(centered_stencil(s))
    }
}

/// `gamma * d f / dx` at padded index `i` along a line with the given stride.
#[inline]
pub fn advective_derivative(scheme: Scheme, gamma: f64, row: &[f64], i: usize, stride: usize, dx: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let d = match scheme {
        Scheme::Linear(st) => st.apply(row, i, stride),
        Scheme::Cweno3 { .. } => cweno3_difference(gamma, row, i, stride, CWENO_EPS, CWENO_P),
    };
    gamma * d / dx
}

pub const CWENO_EPS: f64 = 1e-6;
pub const CWENO_P: i32 = 2;

/// Values of the CWENO3 reconstruction in cell `i` at its left and right faces.
#[inline]
pub fn cweno3_faces(fm: f64, f0: f64, fp: f64, eps: f64, p: i32) -> (f64, f64) {
    let d2 = fp - 2.0 * f0 + fm;
    let d1 = 0.5 * (fp - fm);
    let (sl, sr) = (f0 - fm, fp - f0);
    let is_l = sl * sl;
    let is_r = sr * sr;
    let is_c = 13.0 / 3.0 * d2 * d2 + d1 * d1;
    let al = 0.25 / (eps + is_l).powi(p);
    let ar = 0.25 / (eps + is_r).powi(p);
    let ac = 0.5 / (eps + is_c).powi(p);
    let sum = al + ar + ac;
    let (wl, wr, wc) = (al / sum, ar / sum, ac / sum);
    let at = |s: f64| {
        let pl = f0 + sl * s;
        let pr = f0 + sr * s;
        let popt = f0 - d2 / 24.0 + d1 * s + 0.5 * d2 * s * s;
        let pc = (popt - 0.25 * pl - 0.25 * pr) / 0.5;
        wl * pl + wr * pr + wc * pc
    };
    let (l, r) = (at(-0.5), at(0.5));
    // Scale the reconstruction about the cell average so that both face
    // values stay within the neighbouring averages.
    let (lo, hi) = (fm.min(f0).min(fp), fm.max(f0).max(fp));
    let mut s = 1.0f64;
    for v in [l, r] {
        if v > hi {
            s = s.min((hi - f0) / (v - f0));
        } else if v < lo {
            s = s.min((lo - f0) / (v - f0));
        }
    }
    (f0 + s * (l - f0), f0 + s * (r - f0))
}

/// Upwinded CWENO3 flux difference (not divided by `dx`).
#[inline]
pub fn cweno3_difference(gamma: f64, row: &[f64], i: usize, stride: usize, eps: f64, p: i32) -> f64 {
    let f = |k: isize| row[(i as isize + k * stride as isize) as usize];
    if gamma >= 0.0 {
        let (_, right_i) = cweno3_faces(f(-1), f(0), f(1), eps, p);
        let (_, right_im) = cweno3_faces(f(-2), f(-1), f(0), eps, p);
        right_i - right_im
    } else {
        let (left_ip, _) = cweno3_faces(f(0), f(1), f(2), eps, p);
        let (left_i, _) = cweno3_faces(f(-1), f(0), f(1), eps, p);
        left_ip - left_i
    }
}

/// `gamma * d f / dx` by CWENO3 at padded index `i`.
pub fn cweno3_derivative(gamma: f64, row: &[f64], i: usize, stride: usize, dx: f64, eps: f64, p: i32) -> f64 {
    gamma * cweno3_difference(gamma, row, i, stride, eps, p) / dx
}

/// Semidiscrete operator for one model on one grid.
#[derive(Clone, Debug)]
pub struct TransportOperator {
    model: KineticModel,
    grid: Grid,
    scheme: SchemeSpec,
    boundary: [Boundary; 2],
    /// Per row `(l, k)`: per direction `(velocity, scheme)`.
    rows: Vec<Vec<(f64, Scheme)>>,
}

/// Rows are swept in parallel once a state is at least this large.
const PAR_THRESHOLD: usize = 40_000;

impl TransportOperator {
    pub fn new(model: KineticModel, grid: Grid, scheme: SchemeSpec, boundary: [Boundary; 2]) -> Result<Self> {
        if model.dim() != grid.dim() {
            return Err(Error::param("grid", format!("{}D model on a {}D grid", model.dim(), grid.dim())));
        }
        if scheme.hyperbolic == HypScheme::Cweno3 && grid.dim() != 2 {
            return Err(Error::param("hyperbolic_order", "CWENO3 is only available in 2D"));
        }
        let nk = model.n_components();
        let mut rows = Vec::new();
        for l in 0..model.n_velocities() {
            let dirs: Vec<(f64, Scheme)> = (0..model.dim())
                .map(|d| {
                    let g = model.velocity(l, d);
                    let s = if l < model.n_hyperbolic() {
                        Scheme::hyperbolic(scheme.hyperbolic, g)
                    } else {
                        Scheme::parabolic(scheme.parabolic)
                    };
                    (g, s)
                })
                .collect();
            for _ in 0..nk {
                rows.push(dirs.clone());
            }
        }
        Ok(TransportOperator { model, grid, scheme, boundary, rows })
    }

    pub fn model(&self) -> &KineticModel {
        &self.model
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn scheme(&self) -> SchemeSpec {
        self.scheme
    }
    pub fn boundary(&self) -> [Boundary; 2] {
        self.boundary
    }
    pub fn epsilon(&self) -> f64 {
        self.model.epsilon()
    }
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
    pub fn state_len(&self) -> usize {
        self.rows.len() * self.grid.row_len() + self.model.n_components()
    }

    /// Fills the ghost layers of every row of a flat state.
    pub fn fill_ghosts(&self, state: &mut [f64]) {
        let rl = self.grid.row_len();
        let n = self.rows.len() * rl;
        for row in state[..n].chunks_exact_mut(rl) {
            self.grid.fill_ghosts(row, self.boundary);
        }
    }

    fn transport_row(&self, r: usize, row: &[f64], out: &mut [f64]) -> f64 {
        let g = &self.grid;
        let dx = g.dx();
        out.fill(0.0);
        let mut total = 0.0;
        for (d, &(gamma, scheme)) in self.rows[r].iter().enumerate() {
            if gamma == 0.0 {
                continue;
            }
            let stride = g.stride(d);
            for (_, _, p) in g.interior() {
                let phi = advective_derivative(scheme, gamma, row, p, stride, dx);
                out[p] -= phi;
                total += phi;
            }
        }
        total
    }

    /// Writes `-Phi(f)` into `out` (zero on ghosts) and the outflow rate
    /// `dx^dim sum Phi` into the auxiliary slots. Fills ghosts of `state` first.
    pub fn neg_transport(&self, state: &mut [f64], out: &mut [f64]) {
        self.fill_ghosts(state);
        let rl = self.grid.row_len();
        let nrows = self.rows.len();
        let nk = self.model.n_components();
        let (body, aux) = out.split_at_mut(nrows * rl);
        let src = &state[..nrows * rl];
        let totals: Vec<f64> = if body.len() >= PAR_THRESHOLD {
            body.par_chunks_mut(rl)
                .zip(src.par_chunks(rl))
                .enumerate()
                .map(|(r, (o, row))| self.transport_row(r, row, o))
                .collect()
        } else {
            body.chunks_mut(rl)
                .zip(src.chunks(rl))
                .enumerate()
                .map(|(r, (o, row))| self.transport_row(r, row, o))
                .collect()
        };
        let vol = self.grid.cell_volume();
        aux[..nk].fill(0.0);
        for (r, t) in totals.iter().enumerate() {
            aux[r % nk] += vol * t;
        }
    }

    /// Writes `M(P f)` into the interior of `out` (rows only).
    pub fn maxwellian_state(&self, state: &[f64], out: &mut [f64]) {
        let rl = self.grid.row_len();
        let nk = self.model.n_components();
        let nl = self.model.n_velocities();
        let mut u = vec![0.0; nk];
        let mut m = vec![0.0; nl * nk];
        let mut scratch = MaxwellianScratch::default();
        for (_, _, p) in self.grid.interior() {
            for (k, uk) in u.iter_mut().enumerate() {
                let mut s = 0.0;
                for l in 0..nl {
                    s += state[(l * nk + k) * rl + p];
                }
                *uk = s;
            }
            self.model.maxwellian_into(&u, &mut m, &mut scratch);
            for (r, v) in m.iter().enumerate() {
                out[r * rl + p] = *v;
            }
        }
    }

    /// Adds `(M(P f) - f) / eps` to the interior of `out`.
    pub fn add_relaxation(&self, state: &[f64], out: &mut [f64]) {
        let rl = self.grid.row_len();
        let nk = self.model.n_components();
        let nl = self.model.n_velocities();
        let inv = 1.0 / self.model.epsilon();
        let mut u = vec![0.0; nk];
        let mut m = vec![0.0; nl * nk];
        let mut scratch = MaxwellianScratch::default();
        for (_, _, p) in self.grid.interior() {
            for (k, uk) in u.iter_mut().enumerate() {
                let mut s = 0.0;
                for l in 0..nl {
                    s += state[(l * nk + k) * rl + p];
                }
                *uk = s;
            }
            self.model.maxwellian_into(&u, &mut m, &mut scratch);
            for (r, v) in m.iter_mut().enumerate() {
                *v -= state[r * rl + p];
            }
            // Remove the rounding defect of sum_l M_l = u so that the 1/eps
            // scaling does not turn it into a mass source.
            for k in 0..nk {
                let defect: f64 = (0..nl).map(|l| m[l * nk + k]).sum::<f64>() / nl as f64;
                for l in 0..nl {
                    m[l * nk + k] -= defect;
                }
            }
            for (r, v) in m.iter().enumerate() {
                out[r * rl + p] += v * inv;
            }
        }
    }

    /// Full right-hand side; ghosts of `state` are refreshed in place.
    pub fn rhs(&self, state: &mut [f64], out: &mut [f64]) {
        self.neg_transport(state, out);
        self.add_relaxation(state, out);
    }

    /// Sum of the projected interior `u` times `dx^dim`, per component, plus the
    /// accumulated outflow in the auxiliary slots.
    pub fn balance(&self, state: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let rl = self.grid.row_len();
        let nk = self.model.n_components();
        let nrows = self.rows.len();
        let mut mass = vec![0.0; nk];
        for r in 0..nrows {
            let row = &state[r * rl..(r + 1) * rl];
            let s: f64 = self.grid.interior().map(|(_, _, p)| row[p]).sum();
            mass[r % nk] += s;
        }
        let vol = self.grid.cell_volume();
        mass.iter_mut().for_each(|v| *v *= vol);
        (mass, state[nrows * rl..nrows * rl + nk].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_LINEAR: [Stencil; 8] = [UP1_P, UP1_M, UP3_P, UP3_M, UP4_P, UP4_M, CEN2, CEN4];

    fn taylor_moment(st: &Stencil, q: u32) -> f64 {
        st.c.iter().enumerate().map(|(j, c)| c * ((st.lo + j as isize) as f64).powi(q as i32)).sum::<f64>() / st.den
    }

    #[test]
    fn stencils_are_consistent() {
        for st in ALL_LINEAR {
            assert_eq!(taylor_moment(&st, 0), 0.0);
            assert!((taylor_moment(&st, 1) - 1.0).abs() < 1e-15, "{st:?}");
        }
    }

    #[test]
    fn nominal_orders_by_taylor() {
        let orders = [1, 1, 3, 3, 4, 4, 2, 4];
        for (st, p) in ALL_LINEAR.iter().zip(orders) {
            for q in 2..=p {
                assert!(taylor_moment(st, q as u32).abs() < 1e-14, "{st:?} q={q}");
            }
            assert!(taylor_moment(st, p as u32 + 1).abs() > 1e-3, "{st:?}");
        }
    }

    #[test]
    fn zero_velocity_is_zero() {
        let row = [1.0, 5.0, -2.0, 3.0, 0.0, 7.0, 1.0];
        for s in [HypScheme::Upwind1, HypScheme::Upwind3, HypScheme::Upwind4, HypScheme::Cweno3] {
            assert_eq!(advective_derivative(Scheme::hyperbolic(s, 0.0), 0.0, &row, 3, 1, 0.1), 0.0);
        }
    }

    #[test]
    fn cweno_constant_and_linear() {
        let row = [2.0; 9];
        assert_eq!(cweno3_derivative(1.5, &row, 4, 1, 0.1, CWENO_EPS, CWENO_P), 0.0);
        let lin: Vec<f64> = (0..9).map(|j| 1.0 + 0.3 * j as f64).collect();
        let d = cweno3_derivative(-2.0, &lin, 4, 1, 1.0, CWENO_EPS, CWENO_P);
        assert!((d + 0.6).abs() < 1e-12);
    }

    #[test]
    fn cweno_faces_of_smooth_data_match_optimal() {
        // For a quadratic the central polynomial reproduces the cell-average
        // reconstruction exactly when the weights are linear.
        let (l, r) = cweno3_faces(1.0, 1.0, 1.0, CWENO_EPS, CWENO_P);
        assert_eq!((l, r), (1.0, 1.0));
    }
}
