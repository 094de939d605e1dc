//! Uniform grids, field storage and ghost cells.
//!
//! Kinetic data is stored as one padded row per `(l, k)` pair so every
//! transport sweep is a unit-stride pass. A 1D row holds `I + 6` values, a 2D
//! row `(I + 6)(I2 + 6)` values with `x` fastest. The flat state vector seen
//! by the integrators is all rows followed by `K` auxiliary slots that
//! accumulate the boundary outflow of each component.

use std::fmt::Write as _;

use crate::model::KineticModel;
use crate::{Error, Result};

/// Ghost layers on each side of every axis.
pub const GHOST: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    ZeroGradient,
}

impl Boundary {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Some(Boundary::Periodic),
            "zero_gradient" | "zero-gradient" | "zerogradient" | "neumann" => Some(Boundary::ZeroGradient),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    n: [usize; 2],
    dx: f64,
}

impl Grid {
    pub fn new_1d(x_lo: f64, x_hi: f64, cells: usize) -> Result<Grid> {
        if cells < 7 {
            return Err(Error::param("cells", format!("need at least 7 cells, got {cells}")));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::param("extent", format!("empty interval [{x_lo}, {x_hi}]")));
        }
        Ok(Grid { dim: 1, lo: [x_lo, 0.0], hi: [x_hi, 0.0], n: [cells, 1], dx: (x_hi - x_lo) / cells as f64 })
    }

    /// Two-dimensional grid; the cell must be square.
    pub fn new_2d(x: (f64, f64), nx: usize, y: (f64, f64), ny: usize) -> Result<Grid> {
        let gx = Grid::new_1d(x.0, x.1, nx)?;
        let gy = Grid::new_1d(y.0, y.1, ny)?;
        if (gx.dx - gy.dx).abs() > 1e-12 * gx.dx {
            return Err(Error::param("extent", format!("dx = {} differs from dy = {}", gx.dx, gy.dx)));
        }
        Ok(Grid { dim: 2, lo: [x.0, y.0], hi: [x.1, y.1], n: [nx, ny], dx: gx.dx })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn cells(&self, axis: usize) -> usize {
        self.n[axis]
    }
    pub fn n_cells(&self) -> usize {
        self.n[0] * self.n[1]
    }
    pub fn extent(&self, axis: usize) -> (f64, f64) {
        (self.lo[axis], self.hi[axis])
    }
    /// Cell volume `dx^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    pub fn center(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.dx
    }

    /// Padded length along an axis.
    pub fn padded(&self, axis: usize) -> usize {
        if axis < self.dim {
            self.n[axis] + 2 * GHOST
        } else {
            1
        }
    }

    pub fn row_len(&self) -> usize {
        self.padded(0) * self.padded(1)
    }

    /// Distance between neighbours along `axis` in a padded row.
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.padded(0)
        }
    }

    /// Padded index of interior cell `(i, j)`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        if self.dim == 1 {
            i + GHOST
        } else {
            (j + GHOST) * self.padded(0) + i + GHOST
        }
    }

    /// Interior cells `(i, j, padded index)` in `x`-fastest order.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.n[1]).flat_map(move |j| (0..self.n[0]).map(move |i| (i, j, self.idx(i, j))))
    }

    /// Populates the ghost layers of one padded row.
    pub fn fill_ghosts(&self, row: &mut [f64], rule: [Boundary; 2]) {
        let nx = self.n[0];
        let px = self.padded(0);
        if self.dim == 1 {
            fill_line(row, 0, 1, nx, rule[0]);
            return;
        }
        let ny = self.n[1];
        for j in 0..ny {
            fill_line(row, (j + GHOST) * px, 1, nx, rule[0]);
        }
        for i in 0..px {
            fill_line(row, i, px, ny, rule[1]);
        }
    }
}

/// Fills the ghosts of one line: `start` is the padded index of the first ghost.
fn fill_line(row: &mut [f64], start: usize, stride: usize, n: usize, rule: Boundary) {
    let at = |k: usize| start + k * stride;
    for g in 0..GHOST {
        let (src_l, src_r) = match rule {
            Boundary::Periodic => (GHOST + (n + g - GHOST % n) % n, GHOST + g % n),
            Boundary::ZeroGradient => (GHOST, GHOST + n - 1),
        };
        row[at(g)] = row[at(src_l)];
        row[at(GHOST + n + g)] = row[at(src_r)];
    }
}

/// Cell averages `u_i` with layout `data[cell * K + k]`, cells `x`-fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroField {
    pub nk: usize,
    pub data: Vec<f64>,
}

impl MacroField {
    pub fn zeros(grid: &Grid, nk: usize) -> Self {
        MacroField { nk, data: vec![0.0; grid.n_cells() * nk] }
    }

    pub fn from_values(grid: &Grid, nk: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.n_cells() * nk {
            return Err(Error::Input(format!("{} values for {} cells x {nk} components", data.len(), grid.n_cells())));
        }
        Ok(MacroField { nk, data })
    }

    pub fn cell(&self, c: usize) -> &[f64] {
        &self.data[c * self.nk..(c + 1) * self.nk]
    }

    /// `sum_i u_i dx^dim` per component.
    pub fn mass(&self, grid: &Grid) -> Vec<f64> {
        let mut m = vec![0.0; self.nk];
        for c in self.data.chunks_exact(self.nk) {
            for (a, v) in m.iter_mut().zip(c) {
                *a += v;
            }
        }
        let vol = grid.cell_volume();
        m.iter_mut().for_each(|v| *v *= vol);
        m
    }

    /// Component `k` as a plain vector.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.data.iter().skip(k).step_by(self.nk).copied().collect()
    }

    /// CSV with header `x[,y],u1..uK`, shortest round-trip floats.
    pub fn to_csv(&self, grid: &Grid) -> String {
        let mut s = String::from("x");
        if grid.dim() == 2 {
            s.push_str(",y");
        }
        for k in 1..=self.nk {
            let _ = write!(s, ",u{k}");
        }
        s.push('\n');
        for (c, (i, j, _)) in grid.interior().enumerate() {
            let _ = write!(s, "{}", grid.center(0, i));
            if grid.dim() == 2 {
                let _ = write!(s, ",{}", grid.center(1, j));
            }
            for v in self.cell(c) {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Kinetic unknowns plus per-component outflow accumulators.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticField {
    pub nl: usize,
    pub nk: usize,
    pub row_len: usize,
    /// `nl * nk` padded rows followed by `nk` auxiliary slots.
    pub data: Vec<f64>,
}

impl KineticField {
    pub fn zeros(grid: &Grid, nl: usize, nk: usize) -> Self {
        let row_len = grid.row_len();
        KineticField { nl, nk, row_len, data: vec![0.0; nl * nk * row_len + nk] }
    }

    pub fn state_len(grid: &Grid, nl: usize, nk: usize) -> usize {
        nl * nk * grid.row_len() + nk
    }

    pub fn row(&self, l: usize, k: usize) -> &[f64] {
        let r = l * self.nk + k;
        &self.data[r * self.row_len..(r + 1) * self.row_len]
    }

    pub fn row_mut(&mut self, l: usize, k: usize) -> &mut [f64] {
        let r = l * self.nk + k;
        &mut self.data[r * self.row_len..(r + 1) * self.row_len]
    }

    /// Accumulated outflow `integral of sum_l gamma_l f_l` over the boundary, per component.
    pub fn aux(&self) -> &[f64] {
        &self.data[self.nl * self.nk * self.row_len..]
    }

    pub fn project(&self, grid: &Grid) -> MacroField {
        project_state(grid, &self.data, self.nl, self.nk)
    }

    pub fn fill_ghosts(&mut self, grid: &Grid, rule: [Boundary; 2]) {
        let rows = self.nl * self.nk;
        for row in self.data[..rows * self.row_len].chunks_exact_mut(self.row_len) {
            grid.fill_ghosts(row, rule);
        }
    }
}

/// Projection `u = sum_l f_l` read directly from a flat state vector.
pub fn project_state(grid: &Grid, state: &[f64], nl: usize, nk: usize) -> MacroField {
    let rl = grid.row_len();
    let mut u = MacroField::zeros(grid, nk);
    for (c, (_, _, p)) in grid.interior().enumerate() {
        for k in 0..nk {
            let mut s = 0.0;
            for l in 0..nl {
                s += state[(l * nk + k) * rl + p];
            }
            u.data[c * nk + k] = s;
        }
    }
    u
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 18.0),
    (0.0, 8.0 / 18.0),
    (0.774_596_669_241_483_4, 5.0 / 18.0),
];

/// Cell averages of `u0(x, out)`: three-point Gauss per axis for smooth data,
/// the midpoint value for discontinuous data.
pub fn cell_averages(
    grid: &Grid,
    nk: usize,
    u0: &dyn Fn(&[f64], &mut [f64]),
    discontinuous: bool,
) -> Result<MacroField> {
    let mut out = MacroField::zeros(grid, nk);
    let mut tmp = vec![0.0; nk];
    let h = 0.5 * grid.dx();
    let nodes: &[(f64, f64)] = if discontinuous { &[(0.0, 1.0)] } else { &GAUSS3 };
    let ynodes: &[(f64, f64)] = if grid.dim() == 2 { nodes } else { &[(0.0, 1.0)] };
    for (c, (i, j, _)) in grid.interior().enumerate() {
        let (xc, yc) = (grid.center(0, i), if grid.dim() == 2 { grid.center(1, j) } else { 0.0 });
        let acc = &mut out.data[c * nk..(c + 1) * nk];
        for &(sy, wy) in ynodes {
            for &(sx, wx) in nodes {
                let pos = [xc + sx * h, yc + sy * h];
                u0(&pos[..grid.dim()], &mut tmp);
                for (a, v) in acc.iter_mut().zip(&tmp) {
                    *a += wx * wy * v;
                }
            }
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite initial value in cell {c}")));
        }
    }
    Ok(out)
}

/// Well-prepared kinetic data `f_l = M_l(u_i)` (ghosts left unfilled).
pub fn init_kinetic(model: &KineticModel, grid: &Grid, u0: &MacroField) -> Result<KineticField> {
    let nk = model.n_components();
    let nl = model.n_velocities();
    if u0.nk != nk || u0.data.len() != grid.n_cells() * nk {
        return Err(Error::Input("initial field does not match model and grid".into()));
    }
    if let Some(c) = u0.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite initial value at index {c}")));
    }
    if model.dim() != grid.dim() {
        return Err(Error::Input(format!("{}D model on a {}D grid", model.dim(), grid.dim())));
    }
    let mut f = KineticField::zeros(grid, nl, nk);
    let mut m = vec![0.0; nl * nk];
    let mut scratch = Default::default();
    let rl = f.row_len;
    for (c, (_, _, p)) in grid.interior().enumerate() {
        model.maxwellian_into(u0.cell(c), &mut m, &mut scratch);
        for (r, v) in m.iter().enumerate() {
            f.data[r * rl + p] = *v;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_drm1_1d, Flux};

    fn ghosts_1d(rule: Boundary) -> Vec<f64> {
        let g = Grid::new_1d(0.0, 1.0, 7).unwrap();
        let mut row = vec![f64::NAN; g.row_len()];
        for i in 0..7 {
            row[g.idx(i, 0)] = (i + 1) as f64;
        }
        g.fill_ghosts(&mut row, [rule; 2]);
        row
    }

    #[test]
    fn periodic_wraps() {
        let r = ghosts_1d(Boundary::Periodic);
        assert_eq!(&r[..3], &[5.0, 6.0, 7.0]);
        assert_eq!(&r[10..], &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn periodic_wraps_short_line() {
        let mut line = [0.0; 4 + 6];
        for (i, v) in line[3..7].iter_mut().enumerate() {
            *v = (i + 1) as f64;
        }
        fill_line(&mut line, 0, 1, 4, Boundary::Periodic);
        assert_eq!(&line[..3], &[2.0, 3.0, 4.0]);
        assert_eq!(&line[7..], &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_gradient_copies() {
        let r = ghosts_1d(Boundary::ZeroGradient);
        assert_eq!(&r[..3], &[1.0; 3]);
        assert_eq!(&r[10..], &[7.0; 3]);
    }

    #[test]
    fn fill_is_idempotent_2d() {
        let g = Grid::new_2d((0.0, 1.0), 8, (0.0, 1.0), 8).unwrap();
        let mut row: Vec<f64> = (0..g.row_len()).map(|v| (v as f64).sin()).collect();
        g.fill_ghosts(&mut row, [Boundary::Periodic, Boundary::ZeroGradient]);
        let once = row.clone();
        g.fill_ghosts(&mut row, [Boundary::Periodic, Boundary::ZeroGradient]);
        assert_eq!(once, row);
        // periodic in x: left ghost of row j equals last interior of row j
        assert_eq!(row[g.idx(0, 2) - 1], row[g.idx(7, 2)]);
        // zero gradient in y
        assert_eq!(row[g.idx(3, 0) - g.stride(1)], row[g.idx(3, 0)]);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(Grid::new_1d(0.0, 1.0, 6).is_err());
        assert!(Grid::new_1d(1.0, 1.0, 10).is_err());
        assert!(Grid::new_2d((0.0, 1.0), 10, (0.0, 2.0), 10).is_err());
    }

    #[test]
    fn init_constant_state() {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        let m = build_drm1_1d(2.0, 2f64.sqrt(), 0.0, 1e-4, Flux::identity(1), Flux::identity(1)).unwrap();
        let u0 = cell_averages(&g, 1, &|_, o| o[0] = 1.0, false).unwrap();
        let f = init_kinetic(&m, &g, &u0).unwrap();
        for i in 0..10 {
            let p = g.idx(i, 0);
            let cell: Vec<f64> = (0..4).map(|l| f.row(l, 0)[p]).collect();
            for (a, b) in cell.iter().zip([0.0, 0.5, 0.25, 0.25]) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let u = f.project(&g);
        assert!(u.data.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn init_rejects_nan() {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        assert!(cell_averages(&g, 1, &|_, o| o[0] = f64::NAN, false).is_err());
    }

    #[test]
    fn gauss_averages_quadratics_exactly() {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        let u = cell_averages(&g, 1, &|x, o| o[0] = x[0] * x[0] * x[0] * x[0], false).unwrap();
        for i in 0..10 {
            let (a, b) = (i as f64 * 0.1, (i + 1) as f64 * 0.1);
            let exact = (b.powi(5) - a.powi(5)) / 5.0 / 0.1;
            assert!((u.data[i] - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_header_and_roundtrip() {
        let g = Grid::new_1d(0.0, 1.0, 7).unwrap();
        let u = MacroField::from_values(&g, 1, vec![0.1, 1.0 / 3.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let s = u.to_csv(&g);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("x,u1"));
        let second: Vec<f64> = lines.nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(second[1], 1.0 / 3.0);
    }
}
