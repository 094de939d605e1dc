//! Flat dotted-key configuration: a TOML file, `--set key=value` overrides,
//! defaults from the catalog entry.

use std::collections::BTreeMap;

use relaxpi::harness::{Method, RunSpec};
use relaxpi::model::{check_mmf, compute_lambda_bounds, ModelKind, SPEED_SAFETY};
use relaxpi::problems::{catalog_with, ModelChoice, Problem};
use relaxpi::spectral::Window;
use relaxpi::transport::{HypScheme, ParScheme};
use toml::Value;

pub const KEYS: &[&str] = &[
    "problem.name",
    "problem.xi",
    "problem.a",
    "problem.g",
    "problem.c",
    "problem.delta",
    "model.kind",
    "model.lambda",
    "model.theta",
    "model.mu",
    "scheme.hyperbolic",
    "scheme.parabolic",
    "epsilon",
    "K",
    "order",
    "cfl",
    "Delta_t",
    "delta_t",
    "cells",
    "t_end",
    "method",
    "output.times",
    "converge.cells",
    "converge.dt",
    "converge.parallel",
    "spectrum.cells",
    "spectrum.mode",
    "region.ratio",
    "region.nx",
    "region.ny",
    "region.window",
    "bench.eps",
    "bench.repeats",
    "bench.budget",
    "bench.sample",
    "bench.imex",
];

const PROBLEM_PARAMS: [&str; 5] = ["xi", "a", "g", "c", "delta"];

pub type Flat = BTreeMap<String, Value>;

pub fn flatten(table: &toml::Table) -> Flat {
    fn walk(prefix: &str, t: &toml::Table, out: &mut Flat) {
        for (k, v) in t {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Table(inner) => walk(&key, inner, out),
                _ => {
                    out.insert(key, v.clone());
                }
            }
        }
    }
    let mut out = Flat::new();
    walk("", table, &mut out);
    out
}

pub fn parse_text(text: &str) -> Result<Flat, String> {
    let t: toml::Table = text.parse().map_err(|e| format!("config is not valid TOML: {e}"))?;
    Ok(flatten(&t))
}

/// `key=value`, the value read as a TOML value or else as a bare string.
pub fn parse_override(s: &str) -> Result<(String, Value), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("--set `{s}`: expected key=value"))?;
    let k = k.trim().to_string();
    let v = v.trim();
    let value = match format!("v = {v}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(v.to_string()),
    };
    Ok((k, value))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub params: Vec<(String, f64)>,
    /// `true` when the model constants came from `model.kind = "auto"`.
    pub auto_model: bool,
    pub spec: RunSpec,
    pub output_times: Vec<f64>,
    pub converge_cells: Vec<usize>,
    pub converge_dt: Vec<f64>,
    pub converge_parallel: bool,
    pub spectrum_cells: usize,
    pub spectrum_mode: String,
    pub region_ratio: f64,
    pub region_nx: usize,
    pub region_ny: usize,
    pub region_window: Window,
    pub bench_eps: Vec<f64>,
    pub bench_repeats: usize,
    pub bench_budget: u64,
    pub bench_sample: u64,
    pub bench_imex: bool,
}

struct Reader<'a> {
    flat: &'a Flat,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn err(&mut self, key: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("{key}: {msg}"));
    }

    fn num(&mut self, key: &str) -> Option<f64> {
        match self.flat.get(key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            v => {
                self.err(key, format!("expected a number, got {v}"));
                None
            }
        }
    }

    fn uint(&mut self, key: &str) -> Option<usize> {
        match self.flat.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            v => {
                self.err(key, format!("expected a nonnegative integer, got {v}"));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.flat.get(key)? {
            Value::String(s) => Some(s.clone()),
            v => {
                self.err(key, format!("expected a string, got {v}"));
                None
            }
        }
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        match self.flat.get(key)? {
            Value::Boolean(b) => Some(*b),
            v => {
                self.err(key, format!("expected true or false, got {v}"));
                None
            }
        }
    }

    fn nums(&mut self, key: &str) -> Option<Vec<f64>> {
        let v = self.flat.get(key)?;
        let items: Vec<Value> = match v {
            Value::Array(a) => a.clone(),
            other => vec![other.clone()],
        };
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match it {
                Value::Float(f) => out.push(f),
                Value::Integer(i) => out.push(i as f64),
                other => {
                    self.err(key, format!("expected numbers, got {other}"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn uints(&mut self, key: &str) -> Option<Vec<usize>> {
        let v = self.nums(key)?;
        if v.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
            self.err(key, "expected nonnegative integers");
            return None;
        }
        Some(v.into_iter().map(|x| x as usize).collect())
    }
}

fn model_kind(s: &str) -> Option<ModelKind> {
    ModelKind::parse(s)
}

/// Validates `flat` into a configuration, or returns every field-level error.
pub fn build(flat: &Flat) -> Result<(RunConfig, Problem), Vec<String>> {
    let mut r = Reader { flat, errors: Vec::new() };
    for k in flat.keys() {
        if !KEYS.contains(&k.as_str()) {
            r.err(k, "unknown key");
        }
    }
    let Some(name) = r.string("problem.name") else {
        if !flat.contains_key("problem.name") {
            r.err("problem.name", "required");
        }
        return Err(r.errors);
    };
    let mut params = Vec::new();
    for p in PROBLEM_PARAMS {
        if let Some(v) = r.num(&format!("problem.{p}")) {
            params.push((p.to_string(), v));
        }
    }
    let pairs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let problem = match catalog_with(&name, &pairs) {
        Ok(p) => p,
        Err(e) => {
            let key = if matches!(e, relaxpi::Error::UnknownProblem(_)) { "problem.name" } else { "problem" };
            r.err(key, e);
            return Err(r.errors);
        }
    };
    let mut spec = RunSpec::recommended(&problem);

    let mut auto_model = false;
    let mut explicit_kind = None;
    if let Some(k) = r.string("model.kind") {
        if k == "auto" {
            auto_model = true;
        } else {
            match model_kind(&k) {
                Some(kind) => explicit_kind = Some(kind),
                None => r.err("model.kind", format!("unknown model `{k}` (drm1, drm2, ovm, drm1-2d, auto)")),
            }
        }
    }
    if let Some(kind) = explicit_kind {
        spec.model.kind = kind;
    }
    if let Some(l) = r.nums("model.lambda") {
        match l.as_slice() {
            [a] => spec.model.lambda = [*a, *a],
            [a, b] => spec.model.lambda = [*a, *b],
            _ => r.err("model.lambda", "expected one or two numbers"),
        }
    }
    if let Some(v) = r.num("model.theta") {
        spec.model.theta = v;
    }
    if let Some(v) = r.num("model.mu") {
        spec.model.mu = v;
    }
    if let Some(s) = r.string("scheme.hyperbolic") {
        match HypScheme::parse(&s) {
            Some(h) => spec.scheme.hyperbolic = h,
            None => r.err("scheme.hyperbolic", format!("unknown scheme `{s}` (upwind1, upwind3, upwind4, cweno3)")),
        }
    }
    if let Some(s) = r.string("scheme.parabolic") {
        match ParScheme::parse(&s) {
            Some(p) => spec.scheme.parabolic = p,
            None => r.err("scheme.parabolic", format!("unknown scheme `{s}` (centered2, centered4)")),
        }
    }
    if let Some(v) = r.num("epsilon") {
        if v > 0.0 && v.is_finite() {
            spec.epsilon = v;
        } else {
            r.err("epsilon", format!("must be positive (got {v}): the relaxation is integrated explicitly and needs dt = eps > 0"));
        }
    }
    if let Some(v) = r.uint("K") {
        if v >= 1 {
            spec.k = v;
        } else {
            r.err("K", "must be at least 1");
        }
    }
    if let Some(v) = r.uint("order") {
        if (1..=4).contains(&v) {
            spec.order = v;
        } else {
            r.err("order", "must be 1, 2, 3 or 4");
        }
    }
    let positive = |r: &mut Reader, key: &str| -> Option<f64> {
        let v = r.num(key)?;
        if v > 0.0 && v.is_finite() {
            Some(v)
        } else {
            r.err(key, format!("must be positive, got {v}"));
            None
        }
    };
    if let Some(v) = positive(&mut r, "cfl") {
        spec.cfl = v;
    }
    spec.big_dt = positive(&mut r, "Delta_t");
    spec.delta_t = positive(&mut r, "delta_t");
    if let Some(v) = r.uint("cells") {
        spec.cells = v;
    }
    if let Some(v) = r.num("t_end") {
        if v >= 0.0 && v.is_finite() {
            spec.t_end = v;
        } else {
            r.err("t_end", "must be finite and nonnegative");
        }
    }
    if let Some(s) = r.string("method") {
        match Method::parse(&s) {
            Some(m) => spec.method = m,
            None => r.err("method", format!("unknown method `{s}` (projective, direct, imex)")),
        }
    }

    if auto_model {
        match auto_constants(&problem, &spec.model) {
            Ok(m) => spec.model = m,
            Err(e) => r.err("model.kind", e),
        }
    }

    let output_times = r.nums("output.times").unwrap_or_default();
    let converge_cells = r.uints("converge.cells").unwrap_or_else(|| vec![32, 64, 128, 256]);
    let converge_dt = r.nums("converge.dt").unwrap_or_default();
    let converge_parallel = r.boolean("converge.parallel").unwrap_or(false);
    let spectrum_cells = r.uint("spectrum.cells").unwrap_or(32);
    let spectrum_mode = r.string("spectrum.mode").unwrap_or_else(|| "numerical".into());
    if !matches!(spectrum_mode.as_str(), "numerical" | "analytic") {
        r.err("spectrum.mode", "expected `numerical` or `analytic`");
    }
    let region_ratio = r.num("region.ratio").unwrap_or(1e4);
    // odd counts put pixels on tau = 0 and tau = 1, the centers of the two disks
    let region_nx = r.uint("region.nx").unwrap_or(513);
    let region_ny = r.uint("region.ny").unwrap_or(513);
    let mut region_window = Window::default();
    if let Some(w) = r.nums("region.window") {
        if let [a, b, c, d] = w.as_slice() {
            region_window = Window { re: (*a, *b), im: (*c, *d) };
        } else {
            r.err("region.window", "expected [re_min, re_max, im_min, im_max]");
        }
    }
    let bench_eps = r.nums("bench.eps").unwrap_or_else(|| vec![1e-5, 1e-7]);
    let bench_repeats = r.uint("bench.repeats").unwrap_or(3);
    let bench_budget = r.uint("bench.budget").map(|v| v as u64).unwrap_or(100_000_000);
    let bench_sample = r.uint("bench.sample").map(|v| v as u64).unwrap_or(1_000_000);
    let bench_imex = r.boolean("bench.imex").unwrap_or(false);

    if !r.errors.is_empty() {
        return Err(r.errors);
    }
    Ok((
        RunConfig {
            problem: name,
            params,
            auto_model,
            spec,
            output_times,
            converge_cells,
            converge_dt,
            converge_parallel,
            spectrum_cells,
            spectrum_mode,
            region_ratio,
            region_nx,
            region_ny,
            region_window,
            bench_eps,
            bench_repeats,
            bench_budget,
            bench_sample,
            bench_imex,
        },
        problem,
    ))
}

/// Smallest admissible hyperbolic speed for scalar 1D problems, otherwise the
/// recommended constants; checked by sampling the state box.
fn auto_constants(problem: &Problem, base: &ModelChoice) -> Result<ModelChoice, String> {
    let mut m = base.clone();
    if problem.dim == 1 && problem.nk == 1 {
        let a = problem.flux[0].clone();
        let b = problem.diffusion.clone();
        let ap = move |u: f64| {
            let mut j = [0.0];
            a.jacobian(&[u], &mut j);
            j[0]
        };
        let bp = move |u: f64| {
            let mut j = [0.0];
            b.jacobian(&[u], &mut j);
            j[0]
        };
        let (lo, hi) = compute_lambda_bounds(&ap, &bp, m.theta, problem.state_box[0], 2001, SPEED_SAFETY)
            .map_err(|e| e.to_string())?;
        let l = lo.abs().max(hi.abs()).max(1e-3);
        m.kind = ModelKind::Drm1;
        m.lambda = [l, l];
    }
    let model = problem.build_model(&m, problem.recommended.epsilon).map_err(|e| e.to_string())?;
    let rep = check_mmf(&model, &problem.state_box, 401).map_err(|e| e.to_string())?;
    if !rep.is_mmf {
        return Err(format!(
            "automatic constants lambda = {:?}, theta = {} fail the monotonicity check at u = {:?}",
            m.lambda, m.theta, rep.violating_state
        ));
    }
    Ok(m)
}

fn float(v: f64) -> Value {
    Value::Float(v)
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| Value::Float(*x)).collect())
}

impl RunConfig {
    /// Fully resolved flat configuration; parses back to an equal config.
    pub fn entries(&self) -> Flat {
        let s = &self.spec;
        let mut f = Flat::new();
        f.insert("problem.name".into(), Value::String(self.problem.clone()));
        for (k, v) in &self.params {
            f.insert(format!("problem.{k}"), float(*v));
        }
        f.insert("model.kind".into(), Value::String(s.model.kind.as_str().into()));
        f.insert("model.lambda".into(), floats(&s.model.lambda));
        f.insert("model.theta".into(), float(s.model.theta));
        f.insert("model.mu".into(), float(s.model.mu));
        f.insert("scheme.hyperbolic".into(), Value::String(hyp_name(s.scheme.hyperbolic).into()));
        f.insert("scheme.parabolic".into(), Value::String(par_name(s.scheme.parabolic).into()));
        f.insert("epsilon".into(), float(s.epsilon));
        f.insert("K".into(), Value::Integer(s.k as i64));
        f.insert("order".into(), Value::Integer(s.order as i64));
        f.insert("cfl".into(), float(s.cfl));
        if let Some(d) = s.big_dt {
            f.insert("Delta_t".into(), float(d));
        }
        if let Some(d) = s.delta_t {
            f.insert("delta_t".into(), float(d));
        }
        f.insert("cells".into(), Value::Integer(s.cells as i64));
        f.insert("t_end".into(), float(s.t_end));
        f.insert("method".into(), Value::String(s.method.as_str().into()));
        f.insert("output.times".into(), floats(&self.output_times));
        f.insert(
            "converge.cells".into(),
            Value::Array(self.converge_cells.iter().map(|c| Value::Integer(*c as i64)).collect()),
        );
        f.insert("converge.dt".into(), floats(&self.converge_dt));
        f.insert("converge.parallel".into(), Value::Boolean(self.converge_parallel));
        f.insert("spectrum.cells".into(), Value::Integer(self.spectrum_cells as i64));
        f.insert("spectrum.mode".into(), Value::String(self.spectrum_mode.clone()));
        f.insert("region.ratio".into(), float(self.region_ratio));
        f.insert("region.nx".into(), Value::Integer(self.region_nx as i64));
        f.insert("region.ny".into(), Value::Integer(self.region_ny as i64));
        let w = self.region_window;
        f.insert("region.window".into(), floats(&[w.re.0, w.re.1, w.im.0, w.im.1]));
        f.insert("bench.eps".into(), floats(&self.bench_eps));
        f.insert("bench.repeats".into(), Value::Integer(self.bench_repeats as i64));
        f.insert("bench.budget".into(), Value::Integer(self.bench_budget as i64));
        f.insert("bench.sample".into(), Value::Integer(self.bench_sample as i64));
        f.insert("bench.imex".into(), Value::Boolean(self.bench_imex));
        f
    }

    /// TOML text with one dotted `key = value` per line.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

pub fn hyp_name(h: HypScheme) -> &'static str {
    match h {
        HypScheme::Upwind1 => "upwind1",
        HypScheme::Upwind3 => "upwind3",
        HypScheme::Upwind4 => "upwind4",
        HypScheme::Cweno3 => "cweno3",
    }
}

pub fn par_name(p: ParScheme) -> &'static str {
    match p {
        ParScheme::Centered2 => "centered2",
        ParScheme::Centered4 => "centered4",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(text: &str) -> Flat {
        parse_text(text).unwrap()
    }

    #[test]
    fn manifest_round_trip() {
        let f = flat("problem.name = \"viscous_lwr\"\nproblem.xi = 1e-3\nepsilon = 1e-5\noutput.times = [0.05]\n");
        let (c, _) = build(&f).unwrap();
        let back = parse_text(&c.manifest()).unwrap();
        let (c2, _) = build(&back).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn field_errors_are_collected() {
        let e = build(&flat("problem.name = \"viscous_lwr\"\nepsilon = 0\nbogus = 1\norder = 7\n")).unwrap_err();
        assert_eq!(e.len(), 3, "{e:?}");
        assert!(e.iter().any(|m| m.starts_with("bogus")));
        assert!(e.iter().any(|m| m.starts_with("epsilon")));
    }

    #[test]
    fn overrides_parse_as_toml() {
        assert_eq!(parse_override("epsilon=1e-6").unwrap(), ("epsilon".into(), Value::Float(1e-6)));
        assert_eq!(parse_override("method=direct").unwrap().1, Value::String("direct".into()));
        assert_eq!(parse_override("cells = 40").unwrap().1, Value::Integer(40));
        assert!(parse_override("nothing").is_err());
    }

    #[test]
    fn auto_model_checks_admissibility() {
        // max |A'| = |0.5 - 0.85| over the state box, widened by the safety factor
        let (c, _) = build(&flat("problem.name = \"viscous_lwr\"\nmodel.kind = \"auto\"\n")).unwrap();
        assert!(c.auto_model);
        assert!((c.spec.model.lambda[0] - 0.35 * SPEED_SAFETY / (1.0 - 0.01 / 0.09)).abs() < 1e-9);
    }
}
