mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use relaxpi::harness::{self, BenchOptions};
use relaxpi::integrate::ButcherTableau;
use relaxpi::problems::{catalog, Problem, NAMES};
use relaxpi::spectral::{self, stability_region};
use relaxpi::Error;

use config::{build, parse_override, parse_text, Flat, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "relaxpi", version, about = "Relaxation solvers with projective time integration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (TOML with dotted keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for the internally parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override a configuration key, e.g. `--set epsilon=1e-6`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a problem and dump the solution at the output times.
    Solve,
    /// Spatial convergence against the exact solution.
    ConvergeSpace,
    /// Temporal convergence along a halving ladder of outer steps.
    ConvergeTime,
    /// Spectrum of the semidiscrete kinetic operator.
    Spectrum,
    /// Stability region raster of the projective method.
    Region,
    /// Speedup over direct integration (and optionally IMEX timings).
    Bench,
    /// Print catalog entries.
    Catalog {
        /// Problem name; all entries when omitted.
        name: Option<String>,
    },
}

/// Exit 1 for configuration errors, 2 for failures during a run.
enum Failure {
    Config(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::NonFinite { .. } | Error::StepBudget { .. } | Error::Eigen(_) => Failure::Runtime(e.into()),
        other => Failure::Config(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error:\n{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("run failed: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli) -> Result<(RunConfig, Problem), Failure> {
    let mut flat: Flat = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            parse_text(&text).map_err(Failure::Config)?
        }
        None => Flat::new(),
    };
    for s in &cli.set {
        let (k, v) = parse_override(s).map_err(Failure::Config)?;
        flat.insert(k, v);
    }
    build(&flat).map_err(|errs| Failure::Config(errs.join("\n")))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    if let Command::Catalog { name } = &cli.command {
        return cmd_catalog(name.as_deref());
    }
    let (cfg, problem) = load(&cli)?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Solve => cmd_solve(&cfg, &problem, out),
        Command::ConvergeSpace => cmd_converge(&cfg, &problem, out, false),
        Command::ConvergeTime => cmd_converge(&cfg, &problem, out, true),
        Command::Spectrum => cmd_spectrum(&cfg, &problem, out),
        Command::Region => cmd_region(&cfg, out),
        Command::Bench => cmd_bench(&cfg, &problem, out),
        Command::Catalog { .. } => unreachable!(),
    }
}

fn cmd_catalog(name: Option<&str>) -> Result<(), Failure> {
    let names: Vec<&str> = match name {
        Some(n) => vec![n],
        None => NAMES.to_vec(),
    };
    for n in names {
        let p = catalog(n).map_err(classify)?;
        println!("{}", p.describe());
    }
    Ok(())
}

fn cmd_solve(cfg: &RunConfig, problem: &Problem, out: &Path) -> Result<(), Failure> {
    let res = harness::run(problem, &cfg.spec, &cfg.output_times).map_err(classify)?;
    for (n, (t, u)) in res.snapshots.iter().enumerate() {
        write(out, &format!("solution_{n:03}.csv"), &u.to_csv(&res.grid))?;
        println!("t = {t}: solution_{n:03}.csv");
    }
    write(out, "solution.csv", &res.u.to_csv(&res.grid))?;
    write(out, "manifest.toml", &cfg.manifest())?;
    let (lo, hi) = res.u.data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    println!(
        "{}: t_end = {}, {} outer / {} inner steps, range [{lo}, {hi}], mass drift {:e}",
        problem.name, cfg.spec.t_end, res.stats.outer_steps, res.stats.inner_steps, res.mass_drift()
    );
    Ok(())
}

fn print_table(t: &harness::ConvergenceTable) {
    println!("{:>12} {:>12} {:>12} {:>12} {:>7} {:>7} {:>7}", "h", "L1", "L2", "Linf", "p_L1", "p_L2", "p_Linf");
    for r in &t.rows {
        let mut line = format!("{:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", r.h, r.errors.l1, r.errors.l2, r.errors.linf);
        if let Some(o) = r.order {
            let _ = write!(line, " {:>7.3} {:>7.3} {:>7.3}", o[0], o[1], o[2]);
        } else {
            let _ = write!(line, " {:>7} {:>7} {:>7}", "-", "-", "-");
        }
        if r.plateau {
            line.push_str("  plateau");
        }
        println!("{line}");
    }
}

fn cmd_converge(cfg: &RunConfig, problem: &Problem, out: &Path, time: bool) -> Result<(), Failure> {
    let table = if time {
        if cfg.converge_dt.is_empty() {
            return Err(Failure::Config("converge.dt: a halving ladder of outer steps is required".into()));
        }
        harness::validate_ladder(&cfg.converge_dt, (cfg.spec.k + 1) as f64 * cfg.spec.inner_step())
            .map_err(|e| Failure::Config(format!("converge.dt: {e}")))?;
        harness::temporal_convergence(problem, &cfg.spec, &cfg.converge_dt, cfg.converge_parallel).map_err(classify)?
    } else {
        harness::spatial_convergence(problem, &cfg.spec, &cfg.converge_cells, cfg.converge_parallel).map_err(classify)?
    };
    print_table(&table);
    let name = if time { "convergence_time.csv" } else { "convergence_space.csv" };
    write(out, name, &table.to_csv())?;
    write(out, "manifest.toml", &cfg.manifest())?;
    Ok(())
}

fn cmd_spectrum(cfg: &RunConfig, problem: &Problem, out: &Path) -> Result<(), Failure> {
    let spec = harness::RunSpec { cells: cfg.spectrum_cells, ..cfg.spec.clone() };
    let s = harness::setup(problem, &spec).map_err(classify)?;
    let csv = if cfg.spectrum_mode == "analytic" {
        let reps = spectral::analytic_spectrum_all(s.op.model(), spec.scheme, s.grid.dx(), s.grid.cells(0))
            .map_err(classify)?;
        let mut csv = String::from("zeta,re,im,class\n");
        let eps = spec.epsilon;
        for r in &reps {
            for z in &r.eigenvalues {
                let _ = writeln!(csv, "{},{},{},{}", r.zeta, z.re, z.im, spectral::classify(*z, eps).as_str());
            }
        }
        println!("{} modes, fitted cluster constant {}", reps.len(), spectral::fast_cluster_constant(&reps));
        csv
    } else {
        let ns = spectral::numerical_spectrum(&s.op, &s.state).map_err(classify)?;
        let dom = ns.of_class(spectral::EigenClass::Dominant).count();
        let fast = ns.of_class(spectral::EigenClass::Fast).count();
        println!("{} eigenvalues: {dom} dominant, {fast} fast", ns.eigenvalues.len());
        ns.to_csv()
    };
    write(out, "spectrum.csv", &csv)?;
    write(out, "manifest.toml", &cfg.manifest())?;
    Ok(())
}

fn cmd_region(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let tab = ButcherTableau::for_order(cfg.spec.order).map_err(classify)?;
    let r = stability_region(&tab, cfg.region_ratio, cfg.spec.k, cfg.region_window, cfg.region_nx, cfg.region_ny)
        .map_err(classify)?;
    let stable = r.stable.iter().filter(|s| **s).count();
    println!(
        "Dt/dt = {}, K = {}, order {}: {stable} stable pixels in {} connected components",
        cfg.region_ratio,
        cfg.spec.k,
        cfg.spec.order,
        r.components()
    );
    if cfg.spec.order == 1 {
        for (c, rad) in spectral::pfe_disks(cfg.region_ratio, cfg.spec.k) {
            println!("disk center {c}, radius {rad}");
        }
    }
    write(out, "region.csv", &r.to_csv())?;
    write(out, "manifest.toml", &cfg.manifest())?;
    Ok(())
}

fn cmd_bench(cfg: &RunConfig, problem: &Problem, out: &Path) -> Result<(), Failure> {
    let opts = BenchOptions { repeats: cfg.bench_repeats, direct_budget: cfg.bench_budget, direct_sample: cfg.bench_sample };
    let rows = harness::speedup_bench(problem, &cfg.spec, &cfg.bench_eps, opts).map_err(classify)?;
    println!("{:>10} {:>12} {:>12} {:>10} {:>12}", "eps", "direct (s)", "PI (s)", "real", "theoretical");
    for r in &rows {
        println!(
            "{:>10.1e} {:>12.4} {:>12.4} {:>10.2} {:>12.2}{}",
            r.epsilon,
            r.cpu_direct,
            r.cpu_pi,
            r.real_factor,
            r.theoretical_factor,
            if r.direct_estimated { "  (direct estimated)" } else { "" }
        );
    }
    write(out, "speedup.csv", &harness::speedup_csv(&rows))?;
    if cfg.bench_imex {
        let rows = harness::imex_comparison(problem, &cfg.spec, &cfg.bench_eps, cfg.bench_repeats).map_err(classify)?;
        println!("{:>10} {:>12} {:>12} {:>12}", "eps", "PI (s)", "IMEX (s)", "L1 distance");
        for r in &rows {
            println!("{:>10.1e} {:>12.4} {:>12.4} {:>12.3e}", r.epsilon, r.cpu_pi, r.cpu_imex, r.l1_distance);
        }
        write(out, "imex.csv", &harness::imex_csv(&rows))?;
    }
    write(out, "manifest.toml", &cfg.manifest())?;
    Ok(())
}
