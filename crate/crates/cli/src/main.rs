//! Command-line front end: fit densities on CSV data, probe Mellin lines,
//! and run Monte Carlo benchmarks, emitting plot-ready CSV/JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mmkde::estimator::fit;
use mmkde::mellin::{analytic_mellin, mellin_line};
use mmkde::selector::{plugin_eta_detail, PluginSelection};
use mmkde::simlab::{bench_table, parse_theta, relative_mise, EstimatorConfig};
use mmkde::{KernelShape, Sample, SelectorConfig};

#[derive(Parser)]
#[command(name = "mmkde", version, about = "Kernel density estimation on the positive half-line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a density from a one-column CSV of positive values.
    Fit(FitArgs),
    /// Evaluate the empirical Mellin transform along a vertical line.
    Mellin(MellinArgs),
    /// Monte Carlo MISE benchmark over the built-in test densities.
    Bench(BenchArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV (one positive numeric column, optional header).
    #[arg(long)]
    input: PathBuf,
    /// Output file for the (x, y) density grid.
    #[arg(long)]
    output: PathBuf,
    /// Kernel power parameter ξ.
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Kernel angle θ: radians or one of 0, pi/4, pi/2.
    #[arg(long, default_value = "pi/4")]
    theta: String,
    /// Fixed smoothing parameter (bypasses the plug-in selector).
    #[arg(long)]
    eta: Option<f64>,
    /// Plug-in selector weight exponent.
    #[arg(long)]
    c: Option<f64>,
    /// Grid lower end (default: smallest observation / 100).
    #[arg(long)]
    grid_min: Option<f64>,
    /// Grid upper end (default: empirical 0.999 quantile).
    #[arg(long)]
    grid_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 512)]
    grid_count: usize,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct MellinArgs {
    /// Input CSV (one positive numeric column, optional header).
    #[arg(long)]
    input: PathBuf,
    /// Output file for the (omega, re, im, abs) line.
    #[arg(long)]
    output: PathBuf,
    /// Real part of the evaluation line.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Largest frequency on the line.
    #[arg(long, default_value_t = 200.0)]
    omega_max: f64,
    /// Frequency step.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Add the analytic transform of a named density, e.g. exp:1 or gamma:2:0.5.
    #[arg(long)]
    analytic: Option<String>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Output file for the benchmark table.
    #[arg(long)]
    output: PathBuf,
    /// Comma-separated benchmark density ids (1-10).
    #[arg(long)]
    densities: String,
    /// Comma-separated estimator labels, e.g. mm:1:pi/4:c1.5,mgamma.
    #[arg(long)]
    estimators: String,
    /// Sample size per replicate.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Number of Monte Carlo replicates.
    #[arg(long = "M", default_value_t = 100)]
    m: usize,
    /// Seed for the replicate RNG streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report MISE relative to this estimator label.
    #[arg(long)]
    relative: Option<String>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Mellin(args) => cmd_mellin(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

/// First line of every output file: tool version plus the full invocation.
fn header_line() -> String {
    let args: Vec<String> = std::env::args().collect();
    format!("# mmkde {} | {}", env!("CARGO_PKG_VERSION"), args.join(" "))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write the finished contents through a temporary file and an atomic
/// rename, so a failure never leaves a partial artifact behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    if let Err(e) = fs::write(&tmp, contents) {
        let _ = fs::remove_file(&tmp);
        return Err(format!("cannot write {}: {e}", tmp.display()));
    }
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(format!("cannot finalize {}: {e}", path.display()));
    }
    Ok(())
}

fn check_format(format: &str) -> Result<(), String> {
    match format {
        "csv" | "json" => Ok(()),
        other => Err(format!("unsupported format {other:?} (expected csv or json)")),
    }
}

/// Read a single-column CSV of positive reals; one optional non-numeric
/// header line is tolerated.
fn read_sample(path: &Path) -> Result<Vec<f64>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut values = Vec::new();
    let mut seen_any = false;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let field = trimmed.split(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => {
                values.push(v);
                seen_any = true;
            }
            Ok(v) => {
                return Err(format!(
                    "{}: line {row}: value must be positive and finite, got {v}",
                    path.display()
                ))
            }
            Err(_) if !seen_any => continue, // header line
            Err(_) => {
                return Err(format!(
                    "{}: line {row}: cannot parse {field:?} as a number",
                    path.display()
                ))
            }
        }
    }
    if values.is_empty() {
        return Err(format!("{}: no numeric data rows found", path.display()));
    }
    Ok(values)
}

fn cmd_fit(args: FitArgs) -> Result<(), String> {
    check_format(&args.format)?;
    if args.grid_count < 2 {
        return Err("grid count must be at least 2".into());
    }
    if args.eta.is_some() && args.c.is_some() {
        return Err("--eta and --c are mutually exclusive (a fixed eta bypasses the selector)".into());
    }
    let theta = parse_theta(&args.theta).map_err(|e| e.to_string())?;
    let shape = KernelShape::new(args.xi, theta).map_err(|e| e.to_string())?;
    let values = read_sample(&args.input)?;
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let sample = Sample::new(values).map_err(|e| e.to_string())?;

    let c = args.c.unwrap_or(1.5);
    let (eta, selector, selection): (f64, &str, Option<PluginSelection>) = match args.eta {
        Some(eta) => {
            if !(eta > 0.0) {
                return Err(format!("eta must be positive, got {eta}"));
            }
            (eta, "manual", None)
        }
        None => {
            let cfg = SelectorConfig { c, ..SelectorConfig::default() };
            let sel = plugin_eta_detail(&sample, &cfg).map_err(|e| e.to_string())?;
            (sel.eta, "plugin", Some(sel))
        }
    };

    let grid_min = args.grid_min.unwrap_or(sorted[0] / 100.0);
    let q999 = sorted[(((0.999 * n as f64).ceil() as usize).max(1) - 1).min(n - 1)];
    let grid_max = args.grid_max.unwrap_or(q999);
    if !(grid_max > grid_min) || !(grid_min > 0.0) {
        return Err(format!(
            "grid bounds must satisfy 0 < min < max, got [{grid_min}, {grid_max}]"
        ));
    }
    let step = (grid_max - grid_min) / (args.grid_count - 1) as f64;
    let xs: Vec<f64> = (0..args.grid_count).map(|i| grid_min + i as f64 * step).collect();

    let est = fit(sample, shape, eta).map_err(|e| e.to_string())?;
    for w in est.warnings() {
        eprintln!("warning: {w}");
    }
    let ys = est.evaluate_grid(&xs).map_err(|e| e.to_string())?;

    let header = header_line();
    let contents = match args.format.as_str() {
        "csv" => {
            let mut out = format!("{header}\nx,y\n");
            for (x, y) in xs.iter().zip(&ys) {
                let _ = writeln!(out, "{},{}", num(*x), num(*y));
            }
            out
        }
        _ => {
            let body = json!({ "x": xs, "y": ys });
            format!("{header}\n{}\n", serde_json::to_string_pretty(&body).unwrap())
        }
    };
    write_atomic(&args.output, &contents)?;

    let metadata = json!({
        "eta": eta,
        "xi": args.xi,
        "theta": theta,
        "c": c,
        "n": n,
        "selector": selector,
        "T0": selection.map(|s| s.t0),
    });
    let mut meta_path = args.output.as_os_str().to_owned();
    meta_path.push(".meta.json");
    write_atomic(
        &PathBuf::from(meta_path),
        &format!("{}\n", serde_json::to_string_pretty(&metadata).unwrap()),
    )
}

fn parse_analytic(spec: &str) -> Result<(String, Vec<f64>), String> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("").to_string();
    if name.is_empty() {
        return Err("--analytic expects name:param[:param...]".into());
    }
    let params: Vec<f64> = parts
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| format!("--analytic parameter {p:?} is not a number"))
        })
        .collect::<Result<_, _>>()?;
    Ok((name, params))
}

fn cmd_mellin(args: MellinArgs) -> Result<(), String> {
    check_format(&args.format)?;
    if !(args.step > 0.0) {
        return Err(format!("step must be positive, got {}", args.step));
    }
    if !(args.omega_max > 0.0) {
        return Err(format!("omega-max must be positive, got {}", args.omega_max));
    }
    let values = read_sample(&args.input)?;
    let sample = Sample::new(values).map_err(|e| e.to_string())?;
    let line = mellin_line(&sample, args.c, args.omega_max, args.step).map_err(|e| e.to_string())?;

    let analytic = match &args.analytic {
        None => None,
        Some(spec) => {
            let (name, params) = parse_analytic(spec)?;
            let abs: Vec<f64> = line
                .omegas
                .iter()
                .map(|&omega| {
                    analytic_mellin(&name, &params, num_complex::Complex64::new(args.c, omega))
                        .map(|v| v.norm())
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?;
            Some(abs)
        }
    };

    let header = header_line();
    let contents = match args.format.as_str() {
        "csv" => {
            let mut out = String::new();
            let _ = writeln!(out, "{header}");
            let _ = writeln!(
                out,
                "omega,re,im,abs{}",
                if analytic.is_some() { ",analytic_abs" } else { "" }
            );
            for (i, &omega) in line.omegas.iter().enumerate() {
                let v = line.values[i];
                let _ = write!(
                    out,
                    "{},{},{},{}",
                    num(omega),
                    num(v.re),
                    num(v.im),
                    num(v.norm())
                );
                if let Some(a) = &analytic {
                    let _ = write!(out, ",{}", num(a[i]));
                }
                out.push('\n');
            }
            out
        }
        _ => {
            let re: Vec<f64> = line.values.iter().map(|v| v.re).collect();
            let im: Vec<f64> = line.values.iter().map(|v| v.im).collect();
            let abs: Vec<f64> = line.values.iter().map(|v| v.norm()).collect();
            let mut body = json!({ "omega": line.omegas, "re": re, "im": im, "abs": abs });
            if let Some(a) = &analytic {
                body["analytic_abs"] = json!(a);
            }
            format!("{header}\n{}\n", serde_json::to_string_pretty(&body).unwrap())
        }
    };
    write_atomic(&args.output, &contents)
}

fn cmd_bench(args: BenchArgs) -> Result<(), String> {
    check_format(&args.format)?;
    let densities: Vec<u8> = args
        .densities
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<u8>()
                .map_err(|_| format!("invalid density id {d:?} (expected 1-10)"))
        })
        .collect::<Result<_, _>>()?;
    let estimators: Vec<EstimatorConfig> = args
        .estimators
        .split(',')
        .map(|l| EstimatorConfig::parse(l.trim()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if let Some(base) = &args.relative {
        if !estimators.iter().any(|e| &e.label == base) {
            return Err(format!(
                "--relative baseline {base:?} is not among the requested estimators"
            ));
        }
    }
    let table =
        bench_table(&estimators, &densities, args.n, args.m, args.seed).map_err(|e| e.to_string())?;
    let relative = match &args.relative {
        Some(base) => Some(relative_mise(&table, base).map_err(|e| e.to_string())?),
        None => None,
    };

    let header = header_line();
    let contents = match args.format.as_str() {
        "csv" => {
            let mut out = String::new();
            let _ = writeln!(out, "{header}");
            let _ = writeln!(
                out,
                "density,estimator,n,M,mise{}",
                if relative.is_some() { ",relative" } else { "" }
            );
            for (i, row) in table.iter().enumerate() {
                let _ = write!(
                    out,
                    "{},{},{},{},{}",
                    row.density_id,
                    row.estimator_label,
                    row.n,
                    row.m,
                    num(row.mise)
                );
                if let Some(rel) = &relative {
                    let _ = write!(out, ",{}", num(rel[i]));
                }
                out.push('\n');
            }
            out
        }
        _ => {
            let rows: Vec<serde_json::Value> = table
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut v = json!({
                        "density": row.density_id,
                        "estimator": row.estimator_label,
                        "n": row.n,
                        "M": row.m,
                        "mise": row.mise,
                        "per_replicate_ise": row.per_replicate_ise,
                        "seed": row.seed,
                    });
                    if let Some(rel) = &relative {
                        v["relative"] = json!(rel[i]);
                    }
                    v
                })
                .collect();
            format!("{header}\n{}\n", serde_json::to_string_pretty(&json!(rows)).unwrap())
        }
    };
    write_atomic(&args.output, &contents)
}
