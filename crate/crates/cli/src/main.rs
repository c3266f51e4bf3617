//! `metawave` — comoving-pulse matter-wave optics toolbox.

mod commands;
mod config;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use commands::RunError;
use config::RunConfig;

const USAGE: &str = "\
metawave — matter-wave optics in pulsed comoving potentials

USAGE:
    metawave <SUBCOMMAND> [FIGURE] [OPTIONS]

SUBCOMMANDS:
    trace       one ray trajectory through the device
    phase       running phase at fixed k, or the asymptotic phase profile
    vg          packet center and group velocity time series
    lens-scan   image distance over (v0, theta)
    threshold   negative-refraction onset field vs angle
    spectrum    pulse spectrum H(nu) on a frequency grid
    design      synthesize a pulse for a target phase profile
    evolve      direct split-step solver run (scaled units)
    figure      frozen recipes: fig2 | fig3 | fig4a | fig4b | fig5
    validate    report configuration diagnostics and exit

OPTIONS:
    --config PATH      plain-text configuration file
    --set key=value    override one configuration key (repeatable)
    --out PATH         output CSV path (default: <subcommand>.csv)
    --threads N        worker threads for sweeps (default 1)
    --target PATH      design: target CSV with columns k_per_m,phi_rad
    --T SECONDS        design: signal horizon (default 1.2e-3)
    --lambda X         design: ridge weight (default 1e-10)

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
Formats are documented in FORMATS.md.
";

struct Args {
    subcommand: String,
    figure: Option<String>,
    config_path: Option<PathBuf>,
    out: Option<PathBuf>,
    sets: Vec<(String, String)>,
    threads: usize,
    target: Option<PathBuf>,
    horizon: f64,
    lambda: f64,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut it = argv.iter().peekable();
    let subcommand = it.next().ok_or_else(|| "missing subcommand".to_string())?.clone();
    let mut args = Args {
        subcommand,
        figure: None,
        config_path: None,
        out: None,
        sets: Vec::new(),
        threads: 1,
        target: None,
        horizon: 1.2e-3,
        lambda: 1e-10,
    };
    if args.subcommand == "figure" {
        let fig = it
            .next()
            .ok_or_else(|| "figure requires an identifier (fig2..fig5)".to_string())?;
        args.figure = Some(fig.clone());
    }
    while let Some(flag) = it.next() {
        let mut value_of = |name: &str| -> Result<String, String> {
            it.next()
                .cloned()
                .ok_or_else(|| format!("flag {name} requires a value"))
        };
        match flag.as_str() {
            "--config" => args.config_path = Some(PathBuf::from(value_of("--config")?)),
            "--out" => args.out = Some(PathBuf::from(value_of("--out")?)),
            "--set" => {
                let kv = value_of("--set")?;
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| format!("--set expects key=value, got `{kv}`"))?;
                args.sets.push((k.trim().to_string(), v.trim().to_string()));
            }
            "--threads" => {
                args.threads = value_of("--threads")?
                    .parse()
                    .map_err(|_| "--threads expects a positive integer".to_string())?;
                if args.threads == 0 {
                    return Err("--threads expects a positive integer".into());
                }
            }
            "--target" => args.target = Some(PathBuf::from(value_of("--target")?)),
            "--T" => {
                args.horizon = value_of("--T")?
                    .parse()
                    .map_err(|_| "--T expects seconds".to_string())?;
            }
            "--lambda" => {
                args.lambda = value_of("--lambda")?
                    .parse()
                    .map_err(|_| "--lambda expects a number".to_string())?;
            }
            other => return Err(format!("unknown flag `{other}`")),
        }
    }
    Ok(args)
}

fn run(args: &Args) -> Result<(), RunError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text, &path.display().to_string())?;
    }
    // figure recipes are frozen: their bundle overrides any config file,
    // and only explicit --set flags may deviate from it
    if args.subcommand == "figure" {
        let fig = args.figure.as_deref().unwrap();
        if let Some(overrides) = commands::recipe_overrides(fig) {
            for (k, v) in overrides {
                cfg.set(k, v)?;
            }
        }
    }
    for (k, v) in &args.sets {
        cfg.set(k, v)?;
    }

    let default_name = match args.subcommand.as_str() {
        "figure" => format!("{}.csv", args.figure.as_deref().unwrap_or("figure")),
        s => format!("{s}.csv"),
    };
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(default_name));

    match args.subcommand.as_str() {
        "trace" => commands::run_trace(&cfg, &out),
        "phase" => commands::run_phase(&cfg, &out),
        "vg" => commands::run_vg(&cfg, &out),
        "lens-scan" => commands::run_lens_scan(&cfg, &out, args.threads),
        "threshold" => commands::run_threshold(&cfg, &out, args.threads),
        "spectrum" => commands::run_spectrum(&cfg, &out),
        "evolve" => commands::run_evolve(&cfg, &out),
        "design" => {
            let target = args
                .target
                .as_ref()
                .ok_or_else(|| RunError::Config("design requires --target PATH".into()))?;
            commands::run_design(&cfg, target, args.horizon, args.lambda, &out)
        }
        "figure" => commands::run_figure(&cfg, args.figure.as_deref().unwrap(), &out, args.threads),
        "validate" => {
            let diags = cfg.validate();
            if diags.is_empty() {
                println!("configuration ok");
                Ok(())
            } else {
                let mut fatal = false;
                for d in &diags {
                    match d.severity {
                        config::Severity::Fatal => {
                            fatal = true;
                            println!("fatal: {}", d.message);
                        }
                        config::Severity::Warning => println!("warning: {}", d.message),
                    }
                }
                if fatal {
                    Err(RunError::Config("configuration has fatal diagnostics".into()))
                } else {
                    Ok(())
                }
            }
        }
        other => Err(RunError::Config(format!("unknown subcommand `{other}`"))),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.is_empty() || argv[0] == "--help" || argv[0] == "-h" || argv[0] == "help" {
        eprint!("{USAGE}");
        return ExitCode::from(1);
    }
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, RunError::Config(_)) {
                eprint!("{USAGE}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
