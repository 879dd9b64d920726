use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liblab::cli_report::{emit_report, load_config, read_report, ReportFormat, RunConfig};
use liblab::free_moments::{burgers_residual, ubm_moment};
use liblab::matrix_sim::{simulate_paths, write_paths};
use liblab::rate_and_checks::{check_suite, letter_times_of, rate_of_potential, rate_term, resolve_names, uniform_grid, CheckReport, CheckSettings, EmpiricalOracle};
use liblab::nc_algebra::Time;
use liblab::{LabError, Result};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "liblab", version, about = "Unitary Brownian motion and liberation laboratory")]
struct Cli {
    /// Worker threads; LIBLAB_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate an ensemble and write the path store.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run named checks.
    Check {
        /// Comma separated check names, or `all`.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report file; `.csv` selects CSV, anything else JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rate term of `rate.a` and rate of the drift potential under the simulated ensemble.
    Rate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Free unitary Brownian motion moments as CSV `n,t,m_n(t)`.
    Moments {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        n: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Burgers characteristic residuals as CSV `t,Re z,Im z,residual`.
    Burgers {
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        re: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        im: Vec<f64>,
    },
    /// Convert a JSON report to other formats.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "csv")]
        formats: Vec<String>,
    },
}

enum Failure {
    Config(String),
    Run(String),
    Checks,
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Config { .. } | LabError::Parse { .. } | LabError::InvalidArgument(_) | LabError::NotSelfAdjoint(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads(cli.threads) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn init_threads(flag: Option<usize>) -> std::result::Result<(), String> {
    let threads = match std::env::var("LIBLAB_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| format!("LIBLAB_THREADS: not a thread count: {v}"))?),
        Err(_) => flag,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cmd: Cmd) -> std::result::Result<(), Failure> {
    match cmd {
        Cmd::Simulate { config, out, seed, samples } => simulate(&config, &out, seed, samples)?,
        Cmd::Check { suite, config, report } => return check(suite, config.as_deref(), report.as_deref()),
        Cmd::Rate { config } => rate(&config)?,
        Cmd::Moments { n, t } => moments(&n, &t)?,
        Cmd::Burgers { t, re, im } => burgers(&t, &re, &im)?,
        Cmd::Report { input, out_dir, formats } => {
            let doc = read_report(&input)?;
            let formats = parse_formats(&formats)?;
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
            for f in emit_report(&doc.reports, &out_dir, stem, &formats)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn parse_formats(names: &[String]) -> Result<Vec<ReportFormat>> {
    names
        .iter()
        .map(|n| match n.as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(LabError::InvalidArgument(format!("unknown report format '{n}'"))),
        })
        .collect()
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>, samples: Option<usize>) -> Result<()> {
    let cfg = load_config(config)?;
    let mut sim = cfg.sim_config()?;
    if let Some(s) = seed {
        sim.seed = s;
    }
    if let Some(m) = samples {
        sim.samples = m;
    }
    sim.validate()?;
    let ens = simulate_paths(&sim)?;
    write_paths(out, &ens)?;
    println!("wrote {} samples (N = {}, hash {}) to {}", ens.len(), sim.size, sim.hash(), out.display());
    Ok(())
}

fn check(suite: Option<String>, config: Option<&Path>, report: Option<&Path>) -> std::result::Result<(), Failure> {
    let cfg: Option<RunConfig> = config.map(load_config).transpose()?;
    let spec = match (&suite, &cfg) {
        (Some(s), _) => s.clone(),
        (None, Some(c)) if !c.checks.is_empty() => c.checks.join(","),
        _ => return Err(Failure::Config("no checks selected: pass --suite or list them under `checks`".into())),
    };
    let names = resolve_names(&spec).map_err(|e| Failure::Config(e.to_string()))?;
    let settings = match &cfg {
        Some(c) => c.check_settings()?,
        None => CheckSettings::default(),
    };
    let mut reports: Vec<CheckReport> = Vec::new();
    for name in names {
        let batch = check_suite(name, &settings);
        for r in &batch {
            print_line(r);
        }
        reports.extend(batch);
    }
    if let Some(path) = report {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        };
        emit_report(&reports, dir, stem, &[format])?;
    } else if let Some(c) = &cfg {
        emit_report(&reports, &c.output.dir, "report", &c.output.formats)?;
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} of {} passed", reports.len() - failed, reports.len());
    if failed > 0 {
        return Err(Failure::Checks);
    }
    Ok(())
}

fn print_line(r: &CheckReport) {
    let se = r.stderr.map(|s| format!(" stderr={s:.3e}")).unwrap_or_default();
    let note = r.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
    println!(
        "{} {}: observed={:.6e} expected={:.6e} tol={:.3e}{se}{note}",
        if r.pass { "PASS" } else { "FAIL" },
        r.name,
        r.observed,
        r.expected,
        r.tolerance
    );
}

fn rate(config: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let section = cfg.rate.as_ref().ok_or_else(|| LabError::Config { path: "rate".into(), msg: "missing".into() })?;
    let a = cfg.rate_poly()?.expect("rate section present");
    let potential = cfg.potential()?;
    let mut sim = cfg.sim_config()?;
    let dt = sim.dt.ticks();
    let on_lattice = |grid: Vec<Time>| -> Vec<Time> {
        let mut g: Vec<Time> = grid.into_iter().map(|t| Time::from_ticks(t.ticks() / dt * dt)).collect();
        g.dedup();
        g
    };
    let t_end = section.horizon;
    let a_grid = on_lattice(uniform_grid(t_end, section.grid_steps, letter_times_of(&a)));
    let c_grid = potential.as_ref().map(|c| {
        let last = c.max_time().unwrap_or(Time::ZERO);
        on_lattice(uniform_grid(last, section.grid_steps, letter_times_of(c)))
    });
    let mut snaps = sim.snapshot_times.clone();
    snaps.extend(a_grid.iter().copied());
    snaps.extend(c_grid.iter().flatten().copied());
    snaps.extend(letter_times_of(&a));
    sim = sim.with_snapshot_times(snaps);
    sim.validate()?;
    let ens = simulate_paths(&sim)?;
    let oracle = EmpiricalOracle::new(&ens);
    let mut out = std::io::stdout().lock();
    writeln!(out, "quantity,value")?;
    writeln!(out, "rate_term,{}", fmt_num(rate_term(&oracle, &a, t_end, &a_grid)?))?;
    if let (Some(c), Some(grid)) = (&potential, &c_grid) {
        writeln!(out, "rate_of_potential,{}", fmt_num(rate_of_potential(&oracle, c, grid)?))?;
    }
    Ok(())
}

/// Shortest representation after rounding to 12 significant digits, so
/// values that are zero up to rounding print as `0`.
fn fmt_num(v: f64) -> String {
    if v.abs() < 1e-12 {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{r}")
}

fn moments(ns: &[i64], ts: &[f64]) -> Result<()> {
    if ns.is_empty() || ts.is_empty() {
        return Err(LabError::InvalidArgument("moments needs --n and --t".into()));
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "n,t,m_n(t)")?;
    for &n in ns {
        for &t in ts {
            writeln!(out, "{n},{},{}", fmt_num(t), fmt_num(ubm_moment(n, t)?))?;
        }
    }
    Ok(())
}

fn burgers(ts: &[f64], re: &[f64], im: &[f64]) -> Result<()> {
    if ts.is_empty() || re.is_empty() || im.is_empty() {
        return Err(LabError::InvalidArgument("burgers needs --t, --re and --im".into()));
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "t,Re z,Im z,residual")?;
    for &t in ts {
        for &x in re {
            for &y in im {
                let r = burgers_residual(t, Complex64::new(x, y))?;
                writeln!(out, "{},{},{},{r:e}", fmt_num(t), fmt_num(x), fmt_num(y))?;
            }
        }
    }
    Ok(())
}
