//! qlr: typecheck, evaluate, and compare simply typed λ-terms over the
//! reals under the quantitative liftings; verify the law suites; emit the
//! counter-example figure data.
//!
//! Exit codes: 0 all checks pass, 1 a check or gate fails (including type
//! diagnostics for input files), 2 usage or IO errors.

mod config;
mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use qlr_core::finite::parse_space;
use qlr_core::lambda::{parse, typecheck, Registry, SimpleType, Term};
use qlr_core::ll::local_contextuality_bound;
use qlr_core::semantics::{contextuality_bound, dist_d, dist_e, fig1_csv, reproduce_fig1, Fig1Variant};
use qlr_core::valuation::lifted_p;
use qlr_core::{
    denote, denote_ll, ll_dist, Diff, Env, IntervalElem, LLEnv, LLValue, LawReport, Value,
};

use config::{Format, Model, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "qlr",
    version,
    about = "quantitative logical relations for simply typed λ-terms over the reals"
)]
struct Cli {
    /// TOML config file; QLR_CONFIG is consulted when absent
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// report format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// grid points per bounded interval (at least 3)
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// probe radii, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// numeric tolerance for pass/fail decisions
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// seed for sampled law checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Typecheck a term file and print its type
    Check { file: PathBuf },
    /// Evaluate a term file, applying real arguments left to right
    Eval {
        file: PathBuf,
        /// argument to apply (repeatable)
        #[arg(long = "arg", value_name = "REAL")]
        args: Vec<f64>,
    },
    /// Distance between two terms of the same type under a model
    Dist {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum)]
        model: Option<Model>,
        /// probe point, required at arrow types
        #[arg(long)]
        at: Option<f64>,
        /// probe radius (input budget), required at arrow types
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Bound a context's output difference by the context's derivative
    Bound {
        ctx: PathBuf,
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum)]
        model: Option<Model>,
        /// probe radius widening the plugged terms (model q)
        #[arg(long)]
        radius: Option<f64>,
        /// distance gate δ (model ll)
        #[arg(long)]
        delta: Option<f64>,
        /// half-width of the window backing the gate (model ll)
        #[arg(long)]
        window: Option<f64>,
    },
    /// Run law suites and report pass/fail
    Verify {
        /// all, or one of the named suites
        #[arg(long, default_value = "all")]
        suite: String,
        /// exhaustive enumeration cap for the finite suite
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// finite suite: check the axioms of this space file instead
        #[arg(long)]
        space: Option<PathBuf>,
        /// fig1 suite: also write the CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the lifted-distance counter-example data as CSV
    Counterexample {
        /// write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        x: f64,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let ov = Overrides {
        model: None,
        resolution: cli.resolution,
        radii: cli.radii.clone(),
        tolerance: cli.tolerance,
        seed: cli.seed,
        format: cli.format,
    };
    let run = RunConfig::load(cli.config.as_deref(), &ov)?;
    let reg = Registry::default();
    match cli.cmd {
        Cmd::Check { file } => cmd_check(&reg, &run, &file),
        Cmd::Eval { file, args } => cmd_eval(&reg, &run, &file, &args),
        Cmd::Dist { file_a, file_b, model, at, radius } => {
            cmd_dist(&reg, &run, &file_a, &file_b, model.unwrap_or(run.model), at, radius)
        }
        Cmd::Bound { ctx, file_a, file_b, model, radius, delta, window } => cmd_bound(
            &reg,
            &run,
            &ctx,
            &file_a,
            &file_b,
            model.unwrap_or(run.model),
            radius,
            delta,
            window,
        ),
        Cmd::Verify { suite, max_size, space, out } => {
            cmd_verify(&reg, &run, &suite, max_size, space.as_deref(), out.as_deref())
        }
        Cmd::Counterexample { out, x, r } => cmd_counterexample(&run, out.as_deref(), x, r),
    }
}

fn read_source(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses and typechecks a closed term file. `Ok(Err(..))` is a content
/// diagnostic (exit 1), `Err(..)` an IO failure (exit 2).
fn load_term(
    reg: &Registry,
    path: &Path,
) -> Result<std::result::Result<(Term, SimpleType), String>> {
    let src = read_source(path)?;
    Ok(parse(reg, &src)
        .and_then(|t| typecheck(reg, &[], &t).map(|ty| (t, ty)))
        .map_err(|e| format!("{}: {e}", path.display())))
}

fn render_value(v: &Value) -> String {
    match v {
        Value::RealV(r) => format!("{r:?}"),
        Value::PairV(a, b) => format!("({}, {})", render_value(a), render_value(b)),
        Value::ClosV(_) => "<fun>".into(),
    }
}

fn cmd_check(reg: &Registry, run: &RunConfig, file: &Path) -> Result<u8> {
    match load_term(reg, file)? {
        Ok((_, ty)) => {
            match run.format {
                Format::Json => println!(
                    "{}",
                    json!({"file": file.display().to_string(), "type": ty.to_string()})
                ),
                _ => println!("{ty}"),
            }
            Ok(0)
        }
        Err(diag) => {
            eprintln!("{diag}");
            Ok(1)
        }
    }
}

fn cmd_eval(reg: &Registry, run: &RunConfig, file: &Path, args: &[f64]) -> Result<u8> {
    let (term, ty) = match load_term(reg, file)? {
        Ok(t) => t,
        Err(diag) => {
            eprintln!("{diag}");
            return Ok(1);
        }
    };
    let mut cur = ty.clone();
    for _ in args {
        match cur {
            SimpleType::Arrow(d, c) if *d == SimpleType::Real => cur = *c,
            _ => bail!("term of type {ty} does not take {} real arguments", args.len()),
        }
    }
    let mut v = denote(reg, &term, &Env::empty());
    for a in args {
        v = v.apply(&Value::RealV(*a));
    }
    match run.format {
        Format::Json => println!(
            "{}",
            json!({
                "file": file.display().to_string(),
                "type": ty.to_string(),
                "args": args,
                "value": render_value(&v),
            })
        ),
        _ => println!("{}", render_value(&v)),
    }
    Ok(0)
}

/// Loads two term files and insists they share a type.
fn load_pair(
    reg: &Registry,
    a: &Path,
    b: &Path,
) -> Result<std::result::Result<(Term, Term, SimpleType), String>> {
    let ta = match load_term(reg, a)? {
        Ok(t) => t,
        Err(d) => return Ok(Err(d)),
    };
    let tb = match load_term(reg, b)? {
        Ok(t) => t,
        Err(d) => return Ok(Err(d)),
    };
    if ta.1 != tb.1 {
        return Ok(Err(format!(
            "terms do not share a type: {} : {} but {} : {}",
            a.display(),
            ta.1,
            b.display(),
            tb.1
        )));
    }
    Ok(Ok((ta.0, tb.0, ta.1)))
}

fn is_real_to_real(ty: &SimpleType) -> bool {
    matches!(ty, SimpleType::Arrow(d, c) if **d == SimpleType::Real && **c == SimpleType::Real)
}

fn cmd_dist(
    reg: &Registry,
    run: &RunConfig,
    file_a: &Path,
    file_b: &Path,
    model: Model,
    at: Option<f64>,
    radius: Option<f64>,
) -> Result<u8> {
    let (ta, tb, ty) = match load_pair(reg, file_a, file_b)? {
        Ok(t) => t,
        Err(diag) => {
            eprintln!("{diag}");
            return Ok(1);
        }
    };
    let grid = run.grid();
    let (va, vb) = (denote(reg, &ta, &Env::empty()), denote(reg, &tb, &Env::empty()));
    let need_probe = || -> Result<(f64, f64)> {
        match (at, radius) {
            (Some(x), Some(r)) => Ok((x, r)),
            _ => bail!("--at and --radius are required at type {ty}"),
        }
    };
    let d = match model {
        Model::Q | Model::Qr => {
            let probe = match &ty {
                SimpleType::Real => None,
                t if is_real_to_real(t) => {
                    let (x, r) = need_probe()?;
                    Some((Value::RealV(x), Diff::DReal(r)))
                }
                _ => bail!("model {model} does not support distances at type {ty}"),
            };
            let pr = probe.as_ref().map(|(v, d)| (v, d));
            if model == Model::Q {
                dist_d(&ty, &va, &vb, pr, &grid)
            } else {
                dist_e(&ty, &va, &vb, pr, &grid)
            }
            .map_err(|e| anyhow!("{e}"))?
        }
        Model::Pv => {
            if !is_real_to_real(&ty) {
                bail!("model pv measures real functions, not {ty}");
            }
            let (x, r) = need_probe()?;
            let i = IntervalElem::bounded(x - r, x + r);
            lifted_p(&va, &vb, x, &i, &grid).map_err(|e| anyhow!("{e}"))?
        }
        Model::Ll => {
            let (la, lb) = (denote_ll(reg, &ta, &LLEnv::empty()), denote_ll(reg, &tb, &LLEnv::empty()));
            match &ty {
                SimpleType::Real => ll_dist(&ty, &la, &lb).as_real(),
                t if is_real_to_real(t) => {
                    let x = at.ok_or_else(|| anyhow!("--at is required at type {ty}"))?;
                    ll_dist(&ty, &la, &lb).table_apply(&LLValue::RealV(x)).as_real()
                }
                _ => bail!("model ll reports pointwise distances at Real or Real -> Real, not {ty}"),
            }
        }
    };
    match run.format {
        Format::Json => println!(
            "{}",
            json!({
                "model": model.to_string(),
                "type": ty.to_string(),
                "at": at,
                "radius": radius,
                "grid_points": run.resolution,
                "distance": d,
            })
        ),
        _ => println!("{d}"),
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    reg: &Registry,
    run: &RunConfig,
    ctx_file: &Path,
    file_a: &Path,
    file_b: &Path,
    model: Model,
    radius: Option<f64>,
    delta: Option<f64>,
    window: Option<f64>,
) -> Result<u8> {
    let ctx_src = read_source(ctx_file)?;
    let c = match parse(reg, &ctx_src) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", ctx_file.display());
            return Ok(1);
        }
    };
    let (t, u, sigma) = match load_pair(reg, file_a, file_b)? {
        Ok(t) => t,
        Err(diag) => {
            eprintln!("{diag}");
            return Ok(1);
        }
    };
    match model {
        Model::Q => {
            let radius = radius.unwrap_or(0.1);
            let rep = match contextuality_bound(reg, &c, &t, &u, &sigma, radius, &run.grid()) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(1);
                }
            };
            let pass = rep.actual <= rep.bound + run.tolerance;
            match run.format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "model": "q",
                        "radius": rep.radius,
                        "bound": rep.bound,
                        "actual": rep.actual,
                        "margin": rep.bound - rep.actual,
                        "pass": pass,
                    })
                ),
                _ => {
                    println!("bound  = {}", rep.bound);
                    println!("actual = {}", rep.actual);
                    println!("margin = {}", rep.bound - rep.actual);
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
        Model::Ll => {
            let delta = delta.unwrap_or(0.1);
            let window = window.unwrap_or(0.5);
            let rep = match local_contextuality_bound(reg, &c, &t, &u, &sigma, delta, window) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(1);
                }
            };
            let pass = rep.in_regime && rep.actual <= rep.bound + run.tolerance;
            match run.format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "model": "ll",
                        "delta": rep.delta,
                        "window": rep.window,
                        "gate_gap": rep.gate_gap,
                        "in_regime": rep.in_regime,
                        "bound": rep.bound,
                        "actual": rep.actual,
                        "margin": rep.bound - rep.actual,
                        "pass": pass,
                    })
                ),
                _ => {
                    if !rep.in_regime {
                        println!(
                            "out of local regime: distance {} exceeds the gate {}",
                            rep.gate_gap, rep.delta
                        );
                    } else {
                        println!("gate   = {} (distance {})", rep.delta, rep.gate_gap);
                        println!("bound  = {}", rep.bound);
                        println!("actual = {}", rep.actual);
                    }
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
        _ => bail!("bound supports models q and ll, not {model}"),
    }
}

fn cmd_verify(
    reg: &Registry,
    run: &RunConfig,
    suite: &str,
    max_size: usize,
    space: Option<&Path>,
    out: Option<&Path>,
) -> Result<u8> {
    let names: Vec<&str> = if suite == "all" {
        suites::SUITE_NAMES.to_vec()
    } else if suites::SUITE_NAMES.contains(&suite) {
        vec![suite]
    } else {
        bail!("unknown suite {suite}; expected all or one of {}", suites::SUITE_NAMES.join(", "));
    };
    let parsed_space = match space {
        Some(p) => {
            if !names.contains(&"finite") {
                bail!("--space only applies to the finite suite");
            }
            match parse_space(&read_source(p)?) {
                Ok(s) => Some(s),
                Err(e) => {
                    eprintln!("{}: {e}", p.display());
                    return Ok(1);
                }
            }
        }
        None => None,
    };
    let mut reports: Vec<LawReport> = Vec::new();
    let mut csv = None;
    for name in names {
        let rep = match name {
            "derivative" => suites::suite_derivative()?,
            "dlambda" => suites::suite_dlambda(reg),
            "fig1" => {
                let (r, c) = suites::suite_fig1(run)?;
                csv = Some(c);
                r
            }
            "finite" => suites::suite_finite(max_size, parsed_space.as_ref())?,
            "ll" => suites::suite_ll(reg, run)?,
            "motivating" => suites::suite_motivating(reg, run)?,
            "quantale" => suites::suite_quantale(run)?,
            "soundness" => suites::suite_soundness(reg, run)?,
            "valuation" => suites::suite_valuation(run)?,
            _ => unreachable!("suite list is fixed"),
        };
        reports.push(rep);
    }
    if let Some(path) = out {
        let csv = csv.ok_or_else(|| anyhow!("--out only applies when the fig1 suite runs"))?;
        fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let pass = reports.iter().all(|r| r.all_pass());
    match run.format {
        Format::Json => println!("{}", json!({"suites": reports, "pass": pass})),
        _ => {
            for r in &reports {
                println!("{}", r.render_text());
            }
            let laws: usize = reports.iter().map(|r| r.entries.len()).sum();
            println!(
                "verify: {} suites, {} laws, {}",
                reports.len(),
                laws,
                if pass { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(if pass { 0 } else { 1 })
}

fn cmd_counterexample(run: &RunConfig, out: Option<&Path>, x: f64, r: f64) -> Result<u8> {
    let grid = run.grid();
    let rows = [reproduce_fig1(Fig1Variant::A, x, r, &grid), reproduce_fig1(Fig1Variant::B, x, r, &grid)];
    let csv = fig1_csv(&rows);
    match out {
        Some(p) => {
            fs::write(p, &csv).with_context(|| format!("cannot write {}", p.display()))?;
            println!(
                "wrote {}; partial-metric violated: {}, triangle violated: {}",
                p.display(),
                rows[0].violated,
                rows[1].violated
            );
        }
        None => print!("{csv}"),
    }
    Ok(if rows[0].violated && rows[1].violated { 0 } else { 1 })
}
