//! Batch driver for the p-mean laboratory.
//!
//! Subcommands: `pmean`, `amvp`, `solve`, `converge`, `boundary-iter`,
//! `verify`. Exit codes: 0 success, 1 usage/config error, 2 numerical
//! failure. All output is deterministic for a fixed config and seed.

mod config;

use clap::{Args, Parser, Subcommand};
use config::Config;
use pmean_lab::dpp::{self, DomainShape, DomainSpec};
use pmean_lab::fields::{self, TestField};
use pmean_lab::geometry::{Metric, Point};
use pmean_lab::harmonics;
use pmean_lab::pmean::{self, Exponent, SampleSet};
use pmean_lab::studies;
use pmean_lab::verify;
use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
}

trait IntoCli<T> {
    fn usage(self) -> Result<T, CliError>;
    fn numerical(self) -> Result<T, CliError>;
}

impl<T, E: Display> IntoCli<T> for Result<T, E> {
    fn usage(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Usage(e.to_string()))
    }
    fn numerical(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Numerical(e.to_string()))
    }
}

#[derive(Parser)]
#[command(
    name = "pmean-lab",
    version,
    about = "Natural p-means on Korányi balls: evaluation, expansion sweeps, DPP solves, convergence tables, boundary-iteration constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the natural p-mean of a sample set
    Pmean(PmeanArgs),
    /// Mean-value expansion sweep at a point: μ_p − u vs c·ε²·Δ^N u
    Amvp(AmvpArgs),
    /// Solve the DPP u = μ_p(u, ε) on a discretized domain
    Solve(SolveArgs),
    /// Solve across an ε list against a reference solution
    Converge(ConvergeArgs),
    /// Boundary-iteration constants ξ, θ, k₀ and the (δ_k, M_k) schedule
    BoundaryIter(BoundaryIterArgs),
    /// Run the acceptance suite
    Verify(VerifyArgs),
}

fn parse_exponent(text: &str) -> Result<Exponent, CliError> {
    if text.eq_ignore_ascii_case("inf") || text == "∞" {
        return Ok(Exponent::Infinity);
    }
    let p: f64 = text
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse exponent '{text}'")))?;
    Exponent::finite(p).usage()
}

fn parse_point(text: &str) -> Result<Point, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "expected x1,x2,x3 coordinates, got '{text}'"
        )));
    }
    let mut c = [0.0f64; 3];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad coordinate '{part}'")))?;
    }
    Point::new(c[0], c[1], c[2]).usage()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad number '{s}'")))
        })
        .collect()
}

// ── pmean ──

#[derive(Args)]
struct PmeanArgs {
    /// Inline sample values, comma separated
    #[arg(long)]
    values: Option<String>,
    /// Optional weights matching --values
    #[arg(long)]
    weights: Option<String>,
    /// Sample file: one `value` or `value,weight` per line
    #[arg(long)]
    file: Option<PathBuf>,
    /// Exponent p (a real > 1, 'inf', or 1 for continuous-origin data)
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = pmean::DEFAULT_TOL)]
    tol: f64,
}

fn load_samples(args: &PmeanArgs) -> Result<SampleSet, CliError> {
    let (values, weights): (Vec<f64>, Option<Vec<f64>>) = match (&args.values, &args.file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "pass either --values or --file, not both".into(),
            ))
        }
        (Some(inline), None) => {
            let values = parse_f64_list(inline)?;
            let weights = args.weights.as_deref().map(parse_f64_list).transpose()?;
            (values, weights)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let mut values = Vec::new();
            let mut weights = Vec::new();
            let mut any_weight = false;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let fields: Vec<&str> = line.split([',', ' ', '\t']).filter(|s| !s.is_empty()).collect();
                let bad = || {
                    CliError::Usage(format!(
                        "{}:{}: expected 'value' or 'value,weight'",
                        path.display(),
                        lineno + 1
                    ))
                };
                match fields.as_slice() {
                    [v] => {
                        values.push(v.parse().map_err(|_| bad())?);
                        weights.push(1.0);
                    }
                    [v, w] => {
                        values.push(v.parse().map_err(|_| bad())?);
                        weights.push(w.parse().map_err(|_| bad())?);
                        any_weight = true;
                    }
                    _ => return Err(bad()),
                }
            }
            (values, any_weight.then_some(weights))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "no samples: pass --values or --file".into(),
            ))
        }
    };
    if values.is_empty() {
        return Err(CliError::Usage("empty sample input".into()));
    }
    let set = match weights {
        Some(w) => SampleSet::new(values, w).usage()?,
        None => SampleSet::unit(values).usage()?,
    };
    Ok(set.continuous())
}

fn cmd_pmean(args: PmeanArgs) -> Result<(), CliError> {
    let p = parse_exponent(&args.p)?;
    let samples = load_samples(&args)?;
    let (mean, iterations, residual) =
        pmean::pmean_with_stats(&samples, p, args.tol).numerical()?;
    println!("pmean = {mean}");
    println!("residual = {residual:e}");
    println!("iterations = {iterations}");
    Ok(())
}

// ── amvp ──

#[derive(Args)]
struct AmvpArgs {
    /// Field id: x1 | rsq | x3 | gauge:<s>[@c] | radial:<p>,<a>,<b>[@c]
    #[arg(long, default_value = "rsq")]
    field: String,
    #[arg(long, default_value = "1,0,0")]
    point: String,
    #[arg(long, default_value = "2")]
    p: String,
    /// Comma-separated ε list
    #[arg(long, default_value = "0.4,0.2,0.1,0.05")]
    eps: String,
    /// Lattice resolution (cells per axis) used for every ε
    #[arg(long, default_value_t = 128)]
    resolution: usize,
    #[arg(long, default_value = "heisenberg")]
    metric: String,
    /// Write the table as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_metric(text: &str) -> Result<Metric, CliError> {
    match text {
        "heisenberg" | "koranyi" => Ok(Metric::HeisenbergKoranyi),
        "euclidean" => Ok(Metric::Euclidean3),
        other => Err(CliError::Usage(format!(
            "unknown metric '{other}' (heisenberg | euclidean)"
        ))),
    }
}

fn cmd_amvp(args: AmvpArgs) -> Result<(), CliError> {
    let field = fields::parse_field(&args.field).usage()?;
    let x0 = parse_point(&args.point)?;
    let p = parse_exponent(&args.p)?;
    let eps = parse_f64_list(&args.eps)?;
    let metric = parse_metric(&args.metric)?;
    let resolutions = vec![args.resolution; eps.len()];
    let study = studies::expansion_sweep(&field, x0, p, &eps, &resolutions, metric)
        .numerical()?;

    let mut table = String::new();
    table.push_str("eps,resolution,nodes,mu,mu_minus_u,predicted,remainder\n");
    for r in &study.rows {
        table.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.epsilon, r.resolution, r.nodes, r.mu, r.mu_minus_u, r.predicted, r.remainder
        ));
    }
    table.push_str(&format!("# constant = {}\n", study.constant));
    table.push_str(&format!("# operator_value = {}\n", study.operator_value));
    if study.degenerate {
        table.push_str("# degenerate: operator value ~ 0, rows are quadrature noise\n");
    } else {
        table.push_str(&format!(
            "# leading_order = {}\n# leading_coeff = {}\n# remainder_order = {}\n",
            study.leading_order.unwrap_or(f64::NAN),
            study.leading_coeff.unwrap_or(f64::NAN),
            study.remainder_order.unwrap_or(f64::NAN)
        ));
    }
    print!("{table}");
    if let Some(path) = &args.out {
        std::fs::write(path, &table)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

// ── solve / converge ──

#[derive(Args, Clone)]
struct DomainArgs {
    /// koranyi-ball | koranyi-annulus | euclidean-ball | euclidean-annulus |
    /// axis-excluded-annulus
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    center: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    r_inner: Option<f64>,
    #[arg(long)]
    r_outer: Option<f64>,
    #[arg(long)]
    clearance: Option<f64>,
}

fn build_spec(cfg: &Config, args: &DomainArgs) -> Result<DomainSpec, CliError> {
    let shape = cfg
        .pick(args.shape.clone(), "shape")
        .usage()?
        .ok_or_else(|| CliError::Usage("missing shape".into()))?;
    let center_text = cfg
        .pick(args.center.clone(), "center")
        .usage()?
        .unwrap_or_else(|| "0,0,0".into());
    let center = parse_point(&center_text)?;
    let c = [center.x1, center.x2, center.x3];
    let radius = cfg.pick(args.radius, "radius").usage()?;
    let r_inner = cfg.pick(args.r_inner, "r_inner").usage()?;
    let r_outer = cfg.pick(args.r_outer, "r_outer").usage()?;
    let clearance = cfg.pick(args.clearance, "clearance").usage()?;
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| CliError::Usage(format!("shape '{shape}' needs --{name}")))
    };
    let shape = match shape.as_str() {
        "koranyi-ball" => DomainShape::KoranyiBall {
            center: c,
            radius: need(radius, "radius")?,
        },
        "euclidean-ball" => DomainShape::EuclideanBall {
            center: c,
            radius: need(radius, "radius")?,
        },
        "koranyi-annulus" => DomainShape::KoranyiAnnulus {
            center: c,
            r_inner: need(r_inner, "r-inner")?,
            r_outer: need(r_outer, "r-outer")?,
        },
        "euclidean-annulus" => DomainShape::EuclideanAnnulus {
            center: c,
            r_inner: need(r_inner, "r-inner")?,
            r_outer: need(r_outer, "r-outer")?,
        },
        "axis-excluded-annulus" => DomainShape::AxisExcludedAnnulus {
            center: c,
            r_inner: need(r_inner, "r-inner")?,
            r_outer: need(r_outer, "r-outer")?,
            axis_clearance: need(clearance, "clearance")?,
        },
        other => {
            return Err(CliError::Usage(format!("unknown shape '{other}'")));
        }
    };
    DomainSpec::new(shape).usage()
}

/// Resolve a datum id; `radial-fit:<v_inner>,<v_outer>` fits the radial
/// p-harmonic profile to the spec's annulus radii.
fn build_datum(id: &str, spec: &DomainSpec, p: Exponent) -> Result<TestField, CliError> {
    if let Some(rest) = id.strip_prefix("radial-fit:") {
        let vals = parse_f64_list(rest)?;
        if vals.len() != 2 {
            return Err(CliError::Usage(
                "radial-fit needs two boundary values: radial-fit:<v_inner>,<v_outer>".into(),
            ));
        }
        let (r_inner, r_outer) = match spec.shape {
            DomainShape::KoranyiAnnulus {
                r_inner, r_outer, ..
            }
            | DomainShape::AxisExcludedAnnulus {
                r_inner, r_outer, ..
            } => (r_inner, r_outer),
            _ => {
                return Err(CliError::Usage(
                    "radial-fit datum needs a Korányi annulus shape".into(),
                ))
            }
        };
        let pv = p
            .finite_value()
            .ok_or_else(|| CliError::Usage("radial-fit needs finite p".into()))?;
        let sol =
            harmonics::fit_radial_coeffs(spec.center(), r_inner, r_outer, vals[0], vals[1], pv)
                .usage()?;
        return Ok(TestField::Radial(sol));
    }
    fields::parse_field(id).usage()
}

#[derive(Args)]
struct SolveArgs {
    /// Flat key-value config file; explicit flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    eps: Option<f64>,
    /// Lattice spacing (default ε/8)
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    p: Option<String>,
    /// Datum field id (see `amvp --help` plus radial-fit:<vi>,<vo>)
    #[arg(long)]
    datum: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<u64>,
    /// Output prefix; writes <out>.json and <out>.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

struct SolveSetup {
    spec: DomainSpec,
    eps: f64,
    h: f64,
    p: Exponent,
    datum: TestField,
    tol: Option<f64>,
    max_iter: u64,
}

fn build_solve_setup(cfg: &Config, args: &SolveArgs) -> Result<SolveSetup, CliError> {
    let spec = build_spec(cfg, &args.domain)?;
    let eps = cfg
        .pick(args.eps, "eps")
        .usage()?
        .ok_or_else(|| CliError::Usage("missing --eps".into()))?;
    let h = cfg.pick(args.h, "h").usage()?.unwrap_or(eps / 8.0);
    let p_text = cfg
        .pick(args.p.clone(), "p")
        .usage()?
        .unwrap_or_else(|| "2".into());
    let p = parse_exponent(&p_text)?;
    let datum_id = cfg
        .pick(args.datum.clone(), "datum")
        .usage()?
        .ok_or_else(|| CliError::Usage("missing --datum".into()))?;
    let datum = build_datum(&datum_id, &spec, p)?;
    let tol = cfg.pick(args.tol, "tol").usage()?;
    let max_iter = cfg
        .pick(args.max_iter, "max_iter")
        .usage()?
        .unwrap_or(dpp::DEFAULT_MAX_ITER);
    Ok(SolveSetup {
        spec,
        eps,
        h,
        p,
        datum,
        tol,
        max_iter,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let cfg = match &args.config {
        Some(path) => Config::load(path).usage()?,
        None => Config::empty(),
    };
    let out = cfg
        .pick(args.out.clone(), "out")
        .usage()?
        .unwrap_or_else(|| PathBuf::from("solve-run"));
    let setup = build_solve_setup(&cfg, &args)?;
    let started = std::time::Instant::now();
    let dom = dpp::discretize(setup.spec, setup.eps, setup.h).usage()?;
    let result = dpp::solve(&dom, &setup.datum, setup.p, setup.tol, setup.max_iter)
        .map_err(|e| match e {
            dpp::DppError::SolverDidNotConverge {
                iterations,
                last_change,
                ref history,
            } => CliError::Numerical(format!(
                "solver did not converge in {iterations} iterations \
                 (last sup-change {last_change:e}); residual history: {history:?}"
            )),
            other => CliError::Numerical(other.to_string()),
        })?;
    let elapsed = started.elapsed().as_secs_f64();

    let json_path = out.with_extension("json");
    let csv_path = out.with_extension("csv");
    let jf = File::create(&json_path)
        .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", json_path.display())))?;
    dpp::write_run_json(&dom, &result, BufWriter::new(jf)).numerical()?;
    let cf = File::create(&csv_path)
        .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", csv_path.display())))?;
    dpp::write_run_csv(&dom, &result, BufWriter::new(cf)).numerical()?;

    println!(
        "solved: {} interior + {} strip nodes, p = {}, eps = {}, h = {}",
        dom.n_interior(),
        dom.n_strip(),
        result.p,
        dom.epsilon,
        dom.h
    );
    println!(
        "iterations = {}, final_residual = {:e}, tol = {:e}, runtime = {elapsed:.2}s",
        result.iterations, result.final_residual, result.tol
    );
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    domain: DomainArgs,
    /// Comma-separated ε list
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    datum: Option<String>,
    /// Reference field id (defaults to the datum)
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<u64>,
    /// Write the table as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_converge(args: ConvergeArgs) -> Result<(), CliError> {
    use pmean_lab::calculus::ScalarField;
    let cfg = match &args.config {
        Some(path) => Config::load(path).usage()?,
        None => Config::empty(),
    };
    let spec = build_spec(&cfg, &args.domain)?;
    let eps_text = cfg
        .pick(args.eps.clone(), "eps")
        .usage()?
        .ok_or_else(|| CliError::Usage("missing --eps list".into()))?;
    let eps_list = parse_f64_list(&eps_text)?;
    if eps_list.is_empty() {
        return Err(CliError::Usage("empty eps list".into()));
    }
    let p_text = cfg
        .pick(args.p.clone(), "p")
        .usage()?
        .unwrap_or_else(|| "2".into());
    let p = parse_exponent(&p_text)?;
    let datum_id = cfg
        .pick(args.datum.clone(), "datum")
        .usage()?
        .ok_or_else(|| CliError::Usage("missing --datum".into()))?;
    let datum = build_datum(&datum_id, &spec, p)?;
    let reference = match cfg.pick(args.reference.clone(), "reference").usage()? {
        Some(id) => build_datum(&id, &spec, p)?,
        None => datum,
    };
    let tol = cfg.pick(args.tol, "tol").usage()?;
    let max_iter = cfg
        .pick(args.max_iter, "max_iter")
        .usage()?
        .unwrap_or(dpp::DEFAULT_MAX_ITER);

    let mut rows = Vec::new();
    for &eps in &eps_list {
        let dom = dpp::discretize(spec, eps, eps / 8.0).usage()?;
        let result = dpp::solve(&dom, &datum, p, tol, max_iter).numerical()?;
        let mut sup_error = 0.0f64;
        for (i, &x) in dom.interior_nodes().iter().enumerate() {
            sup_error = sup_error.max((result.values[i] - reference.value(x)).abs());
        }
        rows.push(studies::ConvergenceRow {
            epsilon: eps,
            h: dom.h,
            n_interior: dom.n_interior(),
            iterations: result.iterations,
            final_residual: result.final_residual,
            sup_error,
        });
    }
    let mut table = String::new();
    table.push_str("eps,h,n_interior,iterations,final_residual,sup_error\n");
    for r in &rows {
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.epsilon, r.h, r.n_interior, r.iterations, r.final_residual, r.sup_error
        ));
    }
    match studies::convergence_rate(&rows) {
        Some(rate) => table.push_str(&format!("# fitted_rate = {rate}\n")),
        None => table.push_str("# fitted_rate requires at least two eps values\n"),
    }
    print!("{table}");
    if let Some(path) = &args.out {
        std::fs::write(path, &table)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

// ── boundary-iter ──

#[derive(Args)]
struct BoundaryIterArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    sup_g: f64,
    #[arg(long)]
    inf_g: f64,
    #[arg(long)]
    delta: f64,
}

fn cmd_boundary_iter(args: BoundaryIterArgs) -> Result<(), CliError> {
    let params =
        harmonics::BoundaryIterationParams::new(args.mu, args.p, args.delta, args.eta).usage()?;
    let xi = harmonics::xi(args.p).usage()?;
    let theta = harmonics::theta(args.mu, args.p).numerical()?;
    if args.p == 4.0 {
        println!("note: p = 4 makes the theta expression a 0/0 form in xi; printing its logarithmic limit");
    }
    let k0 = harmonics::k0(args.eta, args.sup_g, args.inf_g, theta).numerical()?;
    let schedule = harmonics::iteration_schedule(&params, args.sup_g, args.inf_g).numerical()?;
    println!("xi = {xi}");
    println!("theta = {theta}");
    println!("k0 = {k0}");
    if let Some(last) = schedule.last() {
        println!("delta_k0 = {}", last.delta_k);
    }
    println!("k,delta_k,m_k_gap");
    for entry in &schedule {
        println!("{},{},{}", entry.k, entry.delta_k, entry.m_k - args.inf_g);
    }
    Ok(())
}

// ── verify ──

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated criterion ids (default: all)
    #[arg(long)]
    criteria: Option<String>,
    /// List available criterion ids and exit
    #[arg(long)]
    list: bool,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.list {
        for id in verify::CRITERION_IDS {
            println!("{id}");
        }
        return Ok(());
    }
    let reports = match &args.criteria {
        None => verify::run_all(),
        Some(list) => {
            let mut reports = Vec::new();
            for id in list.split(',') {
                let id = id.trim();
                let report = verify::run_one(id)
                    .ok_or_else(|| CliError::Usage(format!("unknown criterion '{id}'")))?;
                reports.push(report);
            }
            reports
        }
    };
    let mut all_pass = true;
    for report in &reports {
        println!("{report}");
        all_pass &= report.pass;
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Numerical("acceptance criteria failed".into()))
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pmean(args) => cmd_pmean(args),
        Command::Amvp(args) => cmd_amvp(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Converge(args) => cmd_converge(args),
        Command::BoundaryIter(args) => cmd_boundary_iter(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
