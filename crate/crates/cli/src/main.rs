//! Command-line interface: validation, balls, distances with certificates,
//! couplings, subspace projection, convergence reports and empirical weak
//! distances over JSON-shaped space and graph files.
//!
//! Results go to stdout and are byte-deterministic for identical inputs and
//! flags; timing and diagnostics go to stderr. Exit codes: 0 success,
//! 1 usage error, 2 validation error, 3 budget exceeded.

mod format;

use clap::{Parser, Subcommand, ValueEnum};
use format::*;
use ghp_metrics::cghp::{
    cghp_distance_with, project_subspace, CghpCertificate, Mode, DEFAULT_CELL_BUDGET,
};
use ghp_metrics::flat::{
    hausdorff_distance, prokhorov_distance, strassen_coupling, total_variation, FiniteMeasure,
    GroundSpace, TransportPlan,
};
use ghp_metrics::ghp::{
    check_convergence, empirical_weak_distance, ghp_distance_with, integral_ghp_with,
    ConvergenceCriteria, ConvergenceOptions, GhpResult, LocalizedWitness,
};
use ghp_metrics::graphs::bs_distance;
use ghp_metrics::scalar::{Rational, Scalar};
use ghp_metrics::spaces::{FiniteSpace, SubspaceSpec};
use serde_json::{json, Value};
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "ghp",
    about = "Distances between finite pointed measured metric spaces",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Rational,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistMetric {
    Hausdorff,
    Tv,
    Prokhorov,
    Cgh,
    Cghp,
    Ghp,
    #[value(name = "integral-ghp")]
    IntegralGhp,
    Bs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchMode {
    Exact,
    Bounds,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a space file and report its basic quantities.
    Validate { file: String },
    /// The closed ball of the given radius, as a space document.
    Ball {
        file: String,
        radius: String,
        #[arg(long)]
        backend: Option<Backend>,
    },
    /// Discontinuity radii of the ball curve.
    Radii {
        file: String,
        #[arg(long)]
        backend: Option<Backend>,
    },
    /// Distance between two files under the chosen metric.
    Dist {
        metric: DistMetric,
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: SearchMode,
        /// Bisection tolerance for localized metrics.
        #[arg(long, default_value = "1e-6")]
        tol: String,
        #[arg(long)]
        backend: Option<Backend>,
        /// Cell budget for the exact correspondence search.
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: usize,
        /// Print every plan entry instead of those above 1e-12.
        #[arg(long)]
        full_plan: bool,
    },
    /// Exact coupling between two equal-mass measures on one ground space.
    Coupling {
        a: String,
        b: String,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long)]
        full_plan: bool,
    },
    /// Project a subspace of A across an exact distance witness into B.
    Project {
        a: String,
        b: String,
        subspec: String,
        /// Radius for the inner-ball clause (overrides the file).
        #[arg(long)]
        radius: Option<String>,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: usize,
    },
    /// Numeric convergence report of a sequence against a limit space.
    Converge {
        limit: String,
        #[arg(required = true)]
        seq: Vec<String>,
        /// Comma-separated subset of ghp,balls,integral.
        #[arg(long, default_value = "ghp,balls,integral")]
        criteria: String,
        /// Comma-separated ball radii to probe.
        #[arg(long, default_value = "0.5,1,2,4")]
        grid: String,
        #[arg(long, default_value = "1e-6")]
        tol: String,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: usize,
    },
    /// Empirical weak distance between two directories of space files.
    WeakDist {
        dir_a: String,
        dir_b: String,
        #[arg(long, default_value = "1e-6")]
        tol: String,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let start = Instant::now();
    match run(&cli.command) {
        Ok(doc) => {
            print_result(&doc);
            eprintln!("computed in {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
            std::process::exit(0);
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn pick_backend(explicit: Option<Backend>, docs: &[&Value]) -> Backend {
    explicit.unwrap_or_else(|| {
        if docs.iter().any(|d| contains_rational_literal(d)) {
            Backend::Rational
        } else {
            Backend::Float
        }
    })
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Rational => "rational",
        Backend::Float => "float",
    }
}

fn scalar_from_cli<S: Scalar>(s: &str, what: &str) -> CliResult<S> {
    if let Ok(f) = s.parse::<f64>() {
        if !s.contains('/') {
            return S::from_f64_exact(f)
                .ok_or_else(|| CliError::Usage(format!("{what}: non-finite value")));
        }
    }
    scalar_from_value::<S>(&Value::String(s.to_string()), what)
        .map_err(|e| CliError::Usage(e.message().to_string()))
}

fn run(cmd: &Command) -> CliResult<Value> {
    match cmd {
        Command::Validate { file } => {
            let doc = read_json(file)?;
            let backend = pick_backend(None, &[&doc]);
            match backend {
                Backend::Rational => validate_cmd::<Rational>(&doc, file, backend),
                Backend::Float => validate_cmd::<f64>(&doc, file, backend),
            }
        }
        Command::Ball {
            file,
            radius,
            backend,
        } => {
            let doc = read_json(file)?;
            let backend = pick_backend(*backend, &[&doc]);
            match backend {
                Backend::Rational => ball_cmd::<Rational>(&doc, file, radius, backend),
                Backend::Float => ball_cmd::<f64>(&doc, file, radius, backend),
            }
        }
        Command::Radii { file, backend } => {
            let doc = read_json(file)?;
            let backend = pick_backend(*backend, &[&doc]);
            match backend {
                Backend::Rational => radii_cmd::<Rational>(&doc, file, backend),
                Backend::Float => radii_cmd::<f64>(&doc, file, backend),
            }
        }
        Command::Dist {
            metric,
            a,
            b,
            mode,
            tol,
            backend,
            budget,
            full_plan,
        } => {
            let da = read_json(a)?;
            let db = read_json(b)?;
            let backend = pick_backend(*backend, &[&da, &db]);
            let args = DistArgs {
                metric: *metric,
                mode: *mode,
                tol: tol.clone(),
                budget: *budget,
                full_plan: *full_plan,
            };
            match backend {
                Backend::Rational => dist_cmd::<Rational>(&da, a, &db, b, &args, backend),
                Backend::Float => dist_cmd::<f64>(&da, a, &db, b, &args, backend),
            }
        }
        Command::Coupling {
            a,
            b,
            backend,
            full_plan,
        } => {
            let da = read_json(a)?;
            let db = read_json(b)?;
            let backend = pick_backend(*backend, &[&da, &db]);
            match backend {
                Backend::Rational => coupling_cmd::<Rational>(&da, a, &db, b, *full_plan, backend),
                Backend::Float => coupling_cmd::<f64>(&da, a, &db, b, *full_plan, backend),
            }
        }
        Command::Project {
            a,
            b,
            subspec,
            radius,
            backend,
            budget,
        } => {
            let da = read_json(a)?;
            let db = read_json(b)?;
            let ds = read_json(subspec)?;
            let backend = pick_backend(*backend, &[&da, &db, &ds]);
            match backend {
                Backend::Rational => {
                    project_cmd::<Rational>(&da, a, &db, b, &ds, subspec, radius, *budget, backend)
                }
                Backend::Float => {
                    project_cmd::<f64>(&da, a, &db, b, &ds, subspec, radius, *budget, backend)
                }
            }
        }
        Command::Converge {
            limit,
            seq,
            criteria,
            grid,
            tol,
            backend,
            budget,
        } => {
            let dl = read_json(limit)?;
            let dseq: Vec<(Value, &String)> = seq
                .iter()
                .map(|p| read_json(p).map(|d| (d, p)))
                .collect::<CliResult<_>>()?;
            let mut all: Vec<&Value> = vec![&dl];
            all.extend(dseq.iter().map(|(d, _)| d));
            let backend = pick_backend(*backend, &all);
            match backend {
                Backend::Rational => converge_cmd::<Rational>(
                    &dl, limit, &dseq, criteria, grid, tol, *budget, backend,
                ),
                Backend::Float => {
                    converge_cmd::<f64>(&dl, limit, &dseq, criteria, grid, tol, *budget, backend)
                }
            }
        }
        Command::WeakDist {
            dir_a,
            dir_b,
            tol,
            backend,
            budget,
        } => {
            let files_a = list_space_files(dir_a)?;
            let files_b = list_space_files(dir_b)?;
            let docs_a: Vec<(Value, String)> = files_a
                .iter()
                .map(|p| read_json(p).map(|d| (d, p.clone())))
                .collect::<CliResult<_>>()?;
            let docs_b: Vec<(Value, String)> = files_b
                .iter()
                .map(|p| read_json(p).map(|d| (d, p.clone())))
                .collect::<CliResult<_>>()?;
            let mut all: Vec<&Value> = docs_a.iter().map(|(d, _)| d).collect();
            all.extend(docs_b.iter().map(|(d, _)| d));
            let backend = pick_backend(*backend, &all);
            match backend {
                Backend::Rational => {
                    weak_dist_cmd::<Rational>(&docs_a, &docs_b, tol, *budget, backend)
                }
                Backend::Float => weak_dist_cmd::<f64>(&docs_a, &docs_b, tol, *budget, backend),
            }
        }
    }
}

fn list_space_files(dir: &str) -> CliResult<Vec<String>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("cannot read directory {dir}: {e}")))?;
    let mut files: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("no .json space files in {dir}")));
    }
    Ok(files)
}

fn validate_cmd<S: Scalar>(doc: &Value, path: &str, backend: Backend) -> CliResult<Value> {
    let (space, _) = parse_space::<S>(doc, path)?;
    Ok(json!({
        "command": "validate",
        "backend": backend_name(backend),
        "valid": true,
        "points": space.n(),
        "root": space.label(space.root()),
        "total_mass": scalar_to_value(&space.total_mass()),
        "radius": scalar_to_value(&space.radius()),
    }))
}

fn ball_cmd<S: Scalar>(
    doc: &Value,
    path: &str,
    radius: &str,
    backend: Backend,
) -> CliResult<Value> {
    let (space, _) = parse_space::<S>(doc, path)?;
    let r: S = scalar_from_cli(radius, "radius")?;
    let ball = space.closed_ball(&r);
    Ok(json!({
        "command": "ball",
        "backend": backend_name(backend),
        "radius": scalar_to_value(&r),
        "space": space_to_value(&ball),
    }))
}

fn radii_cmd<S: Scalar>(doc: &Value, path: &str, backend: Backend) -> CliResult<Value> {
    let (space, _) = parse_space::<S>(doc, path)?;
    let radii: Vec<Value> = space
        .discontinuity_radii()
        .iter()
        .map(scalar_to_value)
        .collect();
    Ok(json!({
        "command": "radii",
        "backend": backend_name(backend),
        "radii": radii,
    }))
}

struct DistArgs {
    metric: DistMetric,
    mode: SearchMode,
    tol: String,
    budget: usize,
    full_plan: bool,
}

/// Shared ground for the flat metrics: both files must carry the same
/// metric matrix; subsets and measures are encoded by the mass vectors.
fn shared_ground<S: Scalar>(
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> CliResult<Arc<GroundSpace<S>>> {
    if x.n() != y.n() {
        return Err(CliError::Validation(
            "flat metrics need both files on one ground space (same points)".into(),
        ));
    }
    for i in 0..x.n() {
        for j in 0..x.n() {
            if !x.dist(i, j).eq_tol(y.dist(i, j)) {
                return Err(CliError::Validation(format!(
                    "ground metrics differ at ({i}, {j})"
                )));
            }
        }
    }
    Ok(Arc::new(GroundSpace::from_space(x)))
}

fn plan_to_value<S: Scalar>(
    plan: &TransportPlan<S>,
    row_name: &dyn Fn(usize) -> String,
    col_name: &dyn Fn(usize) -> String,
    full: bool,
) -> Value {
    let mut entries = Vec::new();
    for i in 0..plan.rows {
        for j in 0..plan.cols {
            let v = plan.get(i, j);
            if full || v.to_f64().abs() >= 1e-12 {
                entries.push(json!({
                    "from": row_name(i),
                    "to": col_name(j),
                    "mass": scalar_to_value(v),
                }));
            }
        }
    }
    Value::Array(entries)
}

fn cghp_witness_to_value<S: Scalar>(
    cert: &CghpCertificate<S>,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
    full_plan: bool,
) -> Value {
    let pairs: Vec<Value> = cert
        .correspondence
        .pairs()
        .iter()
        .map(|&(i, j)| json!([x.label(i), y.label(j)]))
        .collect();
    json!({
        "correspondence": pairs,
        "distortion": scalar_to_value(&cert.distortion),
        "coupling": scalar_to_value(&cert.coupling),
        "plan": plan_to_value(&cert.plan, &|i| x.label(i), &|j| y.label(j), full_plan),
    })
}

fn ghp_witness_to_value<S: Scalar>(w: &LocalizedWitness<S>, y: &FiniteSpace<S>) -> Value {
    let support: Vec<String> = w.support.iter().map(|&j| y.label(j)).collect();
    let mass: Vec<Value> = w.mass_choice.iter().map(scalar_to_value).collect();
    json!({
        "value": scalar_to_value(&w.value),
        "subspace_support": support,
        "subspace_mass": mass,
        "distortion": scalar_to_value(&w.certificate.distortion),
        "coupling": scalar_to_value(&w.certificate.coupling),
    })
}

fn ghp_result_to_value<S: Scalar>(
    res: &GhpResult<S>,
    x: &FiniteSpace<S>,
    y: &FiniteSpace<S>,
) -> Value {
    let mut doc = json!({
        "value": scalar_to_value(&res.value),
        "bracket": [scalar_to_value(&res.lower), scalar_to_value(&res.upper)],
    });
    if let Some(w) = &res.witness_xy {
        doc["witness_xy"] = ghp_witness_to_value(w, y);
    }
    if let Some(w) = &res.witness_yx {
        doc["witness_yx"] = ghp_witness_to_value(w, x);
    }
    doc
}

fn dist_cmd<S: Scalar>(
    da: &Value,
    pa: &str,
    db: &Value,
    pb: &str,
    args: &DistArgs,
    backend: Backend,
) -> CliResult<Value> {
    let header = |metric: &str| {
        json!({
            "command": "dist",
            "metric": metric,
            "backend": backend_name(backend),
            "inputs": [pa, pb],
        })
    };
    let merge = |mut head: Value, tail: Value| {
        let h = head.as_object_mut().unwrap();
        for (k, v) in tail.as_object().unwrap() {
            h.insert(k.clone(), v.clone());
        }
        head
    };

    if args.metric == DistMetric::Bs {
        let (g1, _) = parse_graph(da, pa)?;
        let (g2, _) = parse_graph(db, pb)?;
        let (d, alpha) = bs_distance::<S>(&g1, &g2);
        return Ok(merge(
            header("bs"),
            json!({
                "value": scalar_to_value(&d),
                "first_differing_radius": alpha,
            }),
        ));
    }

    let (x, _) = parse_space::<S>(da, pa)?;
    let (y, _) = parse_space::<S>(db, pb)?;
    match args.metric {
        DistMetric::Hausdorff => {
            let ground = shared_ground(&x, &y)?;
            let a: Vec<usize> = (0..x.n()).filter(|&i| !x.mass(i).is_zero_tol()).collect();
            let b: Vec<usize> = (0..y.n()).filter(|&j| !y.mass(j).is_zero_tol()).collect();
            let d = hausdorff_distance(&a, &b, &ground).map_err(from_core)?;
            Ok(merge(
                header("hausdorff"),
                json!({
                    "value": scalar_to_value(&d),
                    "set_a": a.iter().map(|&i| x.label(i)).collect::<Vec<_>>(),
                    "set_b": b.iter().map(|&j| y.label(j)).collect::<Vec<_>>(),
                }),
            ))
        }
        DistMetric::Tv => {
            let ground = shared_ground(&x, &y)?;
            let mu = FiniteMeasure::new(ground.clone(), x.masses().to_vec()).map_err(from_core)?;
            let nu = FiniteMeasure::new(ground, y.masses().to_vec()).map_err(from_core)?;
            let d = total_variation(&mu, &nu).map_err(from_core)?;
            Ok(merge(header("tv"), json!({ "value": scalar_to_value(&d) })))
        }
        DistMetric::Prokhorov => {
            let ground = shared_ground(&x, &y)?;
            let mu = FiniteMeasure::new(ground.clone(), x.masses().to_vec()).map_err(from_core)?;
            let nu = FiniteMeasure::new(ground, y.masses().to_vec()).map_err(from_core)?;
            let res = prokhorov_distance(&mu, &nu).map_err(from_core)?;
            Ok(merge(
                header("prokhorov"),
                json!({
                    "value": scalar_to_value(&res.p),
                    "witness": {
                        "plan": plan_to_value(&res.plan, &|i| x.label(i), &|j| x.label(j), args.full_plan),
                    },
                }),
            ))
        }
        DistMetric::Cgh | DistMetric::Cghp => {
            let name = if args.metric == DistMetric::Cgh {
                "cgh"
            } else {
                "cghp"
            };
            let (x, y) = if args.metric == DistMetric::Cgh {
                (x.with_zero_mass(), y.with_zero_mass())
            } else {
                (x, y)
            };
            let mode = match args.mode {
                SearchMode::Exact => Mode::Exact,
                SearchMode::Bounds => Mode::Bounds,
            };
            let cert = cghp_distance_with(&x, &y, mode, args.budget).map_err(from_core)?;
            Ok(merge(
                header(name),
                json!({
                    "value": scalar_to_value(&cert.value),
                    "bracket": [scalar_to_value(&cert.lower), scalar_to_value(&cert.upper)],
                    "exact": cert.exact,
                    "witness": cghp_witness_to_value(&cert, &x, &y, args.full_plan),
                }),
            ))
        }
        DistMetric::Ghp => {
            let tol: S = scalar_from_cli(&args.tol, "tol")?;
            let res = ghp_distance_with(&x, &y, &tol, args.budget).map_err(from_core)?;
            Ok(merge(header("ghp"), ghp_result_to_value(&res, &x, &y)))
        }
        DistMetric::IntegralGhp => {
            let v = integral_ghp_with(&x, &y, args.budget).map_err(from_core)?;
            Ok(merge(header("integral-ghp"), json!({ "value": sig12(v) })))
        }
        DistMetric::Bs => unreachable!("handled above"),
    }
}

fn coupling_cmd<S: Scalar>(
    da: &Value,
    pa: &str,
    db: &Value,
    pb: &str,
    full_plan: bool,
    backend: Backend,
) -> CliResult<Value> {
    let (x, _) = parse_space::<S>(da, pa)?;
    let (y, _) = parse_space::<S>(db, pb)?;
    let ground = shared_ground(&x, &y)?;
    let mu = FiniteMeasure::new(ground.clone(), x.masses().to_vec()).map_err(from_core)?;
    let nu = FiniteMeasure::new(ground.clone(), y.masses().to_vec()).map_err(from_core)?;
    let p = prokhorov_distance(&mu, &nu).map_err(from_core)?.p;
    let plan = strassen_coupling(&mu, &nu).map_err(from_core)?;
    let far =
        plan.mass_where(|i, j| ground.dist(i, j).cmp_total(&p) == std::cmp::Ordering::Greater);
    Ok(json!({
        "command": "coupling",
        "backend": backend_name(backend),
        "inputs": [pa, pb],
        "prokhorov": scalar_to_value(&p),
        "far_mass": scalar_to_value(&far),
        "plan": plan_to_value(&plan, &|i| x.label(i), &|j| x.label(j), full_plan),
    }))
}

#[allow(clippy::too_many_arguments)]
fn project_cmd<S: Scalar>(
    da: &Value,
    pa: &str,
    db: &Value,
    pb: &str,
    ds: &Value,
    ps: &str,
    radius: &Option<String>,
    budget: usize,
    backend: Backend,
) -> CliResult<Value> {
    let (x, x_names) = parse_space::<S>(da, pa)?;
    let (y, _) = parse_space::<S>(db, pb)?;
    let sub_doc = parse_subspace(ds, &x_names, ps)?;
    let choice: Vec<S> = match &sub_doc.mass {
        Some(values) => values
            .iter()
            .enumerate()
            .map(|(k, v)| scalar_from_value::<S>(v, &format!("{ps}: mass[{k}]")))
            .collect::<CliResult<_>>()?,
        None => sub_doc.support.iter().map(|&i| x.mass(i).clone()).collect(),
    };
    let sub_spec =
        SubspaceSpec::fixed(&x, sub_doc.support.clone(), choice.clone()).map_err(from_core)?;
    let r: Option<S> = match (radius, &sub_doc.radius) {
        (Some(flag), _) => Some(scalar_from_cli(flag, "radius")?),
        (None, Some(v)) => Some(scalar_from_value::<S>(v, &format!("{ps}: radius"))?),
        (None, None) => None,
    };
    let witness = cghp_distance_with(&x, &y, Mode::Exact, budget).map_err(from_core)?;
    let proj =
        project_subspace(&x, &y, &sub_spec, &choice, &witness, r.as_ref()).map_err(from_core)?;
    Ok(json!({
        "command": "project",
        "backend": backend_name(backend),
        "inputs": [pa, pb, ps],
        "witness_value": scalar_to_value(&witness.value),
        "projected": space_to_value(&proj.space),
        "projected_support": proj.support.iter().map(|&j| y.label(j)).collect::<Vec<_>>(),
        "verified_value": scalar_to_value(&proj.verified.value),
    }))
}

#[allow(clippy::too_many_arguments)]
fn converge_cmd<S: Scalar>(
    dl: &Value,
    pl: &str,
    dseq: &[(Value, &String)],
    criteria: &str,
    grid: &str,
    tol: &str,
    budget: usize,
    backend: Backend,
) -> CliResult<Value> {
    let (limit, _) = parse_space::<S>(dl, pl)?;
    let seq: Vec<FiniteSpace<S>> = dseq
        .iter()
        .map(|(d, p)| parse_space::<S>(d, p).map(|(s, _)| s))
        .collect::<CliResult<_>>()?;
    let mut chosen = ConvergenceCriteria {
        ghp: false,
        balls: false,
        integral: false,
    };
    for c in criteria.split(',') {
        match c.trim() {
            "ghp" => chosen.ghp = true,
            "balls" => chosen.balls = true,
            "integral" => chosen.integral = true,
            "" => {}
            other => return Err(CliError::Usage(format!("unknown criterion '{other}'"))),
        }
    }
    let radius_grid: Vec<S> = grid
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| scalar_from_cli(s.trim(), "grid"))
        .collect::<CliResult<_>>()?;
    let opts = ConvergenceOptions {
        criteria: chosen,
        radius_grid,
        tol: scalar_from_cli(tol, "tol")?,
        budget,
    };
    let report = check_convergence(&seq, &limit, &opts).map_err(from_core)?;
    let mut doc = json!({
        "command": "converge",
        "backend": backend_name(backend),
        "limit": pl,
        "sequence_length": seq.len(),
        "skipped_radii": report.skipped_radii.iter().map(scalar_to_value).collect::<Vec<_>>(),
    });
    if let Some((values, summary)) = &report.ghp {
        doc["ghp"] = json!({
            "values": values.iter().map(scalar_to_value).collect::<Vec<_>>(),
            "nonincreasing": summary.nonincreasing,
            "last": sig12(summary.last),
        });
    }
    if let Some(rows) = &report.balls {
        doc["balls"] = Value::Array(
            rows.iter()
                .map(|(r, values, summary)| {
                    json!({
                        "radius": scalar_to_value(r),
                        "values": values.iter().map(scalar_to_value).collect::<Vec<_>>(),
                        "nonincreasing": summary.nonincreasing,
                        "last": sig12(summary.last),
                    })
                })
                .collect(),
        );
    }
    if let Some((values, summary)) = &report.integral {
        doc["integral"] = json!({
            "values": values.iter().map(|v| sig12(*v)).collect::<Vec<_>>(),
            "nonincreasing": summary.nonincreasing,
            "last": sig12(summary.last),
        });
    }
    Ok(doc)
}

fn weak_dist_cmd<S: Scalar>(
    docs_a: &[(Value, String)],
    docs_b: &[(Value, String)],
    tol: &str,
    budget: usize,
    backend: Backend,
) -> CliResult<Value> {
    let a: Vec<FiniteSpace<S>> = docs_a
        .iter()
        .map(|(d, p)| parse_space::<S>(d, p).map(|(s, _)| s))
        .collect::<CliResult<_>>()?;
    let b: Vec<FiniteSpace<S>> = docs_b
        .iter()
        .map(|(d, p)| parse_space::<S>(d, p).map(|(s, _)| s))
        .collect::<CliResult<_>>()?;
    let tol: S = scalar_from_cli(tol, "tol")?;
    let res = empirical_weak_distance(&a, &b, &tol, budget).map_err(from_core)?;
    Ok(json!({
        "command": "weak-dist",
        "backend": backend_name(backend),
        "collection_sizes": [a.len(), b.len()],
        "value": scalar_to_value(&res.p),
        "files_a": docs_a.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>(),
        "files_b": docs_b.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>(),
    }))
}
