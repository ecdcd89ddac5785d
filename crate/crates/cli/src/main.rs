use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rankone_core::acceptance::{self, Suite};
use rankone_core::ball::{ball_volume, psi_on_grid};
use rankone_core::grid::{finite_sum_check, time_grid};
use rankone_core::group::{GroupName, RankOneGroup, SpectralParam};
use rankone_core::hyperbolic::{decay_scan, mc_average, HPoint, McSettings, Observable};
use rankone_core::report::Table;
use rankone_core::spectral::{theorem_mean_report, SpectrumConfig};
use rankone_core::spherical::{hc_c_function, phi};
use rankone_core::Error;

/// Default worker count when `--threads` is absent.
const THREADS_ENV: &str = "RANKONE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rankone", version, about = "Spherical functions, ball averages and ergodic averages on rank-one groups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: $RANKONE_THREADS, then all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spherical function phi_s(a_t), or the c-function c(s).
    Sphfn {
        #[command(flatten)]
        args: ParamArgs,
        /// Print c(s) instead of phi_s.
        #[arg(long)]
        c_function: bool,
    },
    /// Ball average psi_s(t) of the spherical function.
    Psi(ParamArgs),
    /// Volume m(B_t) of the ball of radius t.
    Volume {
        #[arg(long)]
        group: RankOneGroup,
        #[command(flatten)]
        times: Times,
    },
    /// Deviation report of the averaging operators for a spectrum file.
    Simulate {
        /// JSON spectrum file.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 40.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.1)]
        t_step: f64,
    },
    /// Monte Carlo ball average on the modular surface.
    Mc {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        mc: McArgs,
        /// Append the result as a CSV row to this file.
        #[arg(long)]
        append: Option<PathBuf>,
    },
    /// Monte Carlo averages along a grid of radii.
    McScan {
        /// `start:end:step`, inclusive.
        #[arg(long)]
        t_grid: TGrid,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Time grid with ⌊e^{δm/2} + 1⌋ points per unit interval.
    Grid {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        m_max: u64,
        /// Print partial sums of t_n^2 e^{-δ t_n} per interval instead of the points.
        #[arg(long)]
        sums: bool,
    },
    /// Run the acceptance checks.
    Verify {
        /// Closed-form checks for this group (only so:3 is supported).
        #[arg(long, required_unless_present = "all")]
        group: Option<RankOneGroup>,
        /// Run every check, including the spectral model and Monte Carlo runs.
        #[arg(long, conflicts_with = "group")]
        all: bool,
    },
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long)]
    group: RankOneGroup,
    /// `trivial`, `c:s` or `p:lambda`.
    #[arg(long)]
    param: SpectralParam,
    #[command(flatten)]
    times: Times,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct Times {
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// `start:end:step`, inclusive.
    #[arg(long)]
    t_grid: Option<TGrid>,
}

impl Times {
    fn values(&self) -> Vec<f64> {
        match &self.t_grid {
            Some(g) => g.0.clone(),
            None => self.t.clone(),
        }
    }

    fn is_empty(&self) -> bool {
        self.t.is_empty() && self.t_grid.is_none()
    }
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// `const`, `cusp:Y` or `disk:X,Y,R`.
    #[arg(long)]
    obs: Observable,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Base point `x,y` in the upper half-plane.
    #[arg(long, default_value = "0.1,1.3")]
    base: HPoint,
}

impl McArgs {
    fn settings(&self) -> McSettings {
        McSettings::new(self.samples, self.seed, self.obs, self.base)
    }
}

#[derive(Debug, Clone)]
struct TGrid(Vec<f64>);

impl std::str::FromStr for TGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}'")))
            .collect::<Result<_, _>>()?;
        let [a, b, h] = parts[..] else {
            return Err(format!("'{s}' is not start:end:step"));
        };
        if !(h > 0.0 && b >= a) {
            return Err(format!("'{s}' needs step > 0 and end >= start"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        if n > 10_000_000 {
            return Err(format!("'{s}' has too many points"));
        }
        Ok(TGrid((0..=n).map(|i| a + i as f64 * h).collect()))
    }
}

struct Output {
    format: Format,
    path: Option<PathBuf>,
    header: String,
}

impl Output {
    fn emit(&self, table: &Table) -> rankone_core::Result<()> {
        let text = match self.format {
            Format::Csv => table.to_csv_string(&self.header)?,
            Format::Json => table.to_json(&self.header)? + "\n",
        };
        match &self.path {
            Some(p) => fs::write(p, text)?,
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn invocation() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("rankone {} {}", env!("CARGO_PKG_VERSION"), args.join(" "))
}

fn configure_threads(flag: Option<usize>) -> rankone_core::Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("{THREADS_ENV}='{v}' is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid(e.to_string()))?;
    }
    Ok(())
}

fn column_table(name: &str, times: &[f64], values: &[f64]) -> rankone_core::Result<Table> {
    let mut table = Table::new(["t", name]);
    for (&t, &v) in times.iter().zip(values) {
        table.push(vec![t, v])?;
    }
    Ok(table)
}

fn append_row(path: &Path, header: &str, table: &Table) -> rankone_core::Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let text = table.to_csv_string(header)?;
    if fresh {
        file.write_all(text.as_bytes())?;
    } else {
        // keep only the data rows
        for line in text.lines().skip(2) {
            writeln!(file, "{line}")?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> rankone_core::Result<ExitCode> {
    configure_threads(cli.threads)?;
    let out = Output {
        format: cli.format,
        path: cli.out.clone(),
        header: invocation(),
    };
    match cli.command {
        Command::Sphfn { args: a, c_function: true } => {
            let c = hc_c_function(&a.group, a.param)?.c;
            let mut table = Table::new(["c_re", "c_im"]);
            table.push(vec![c.re, c.im])?;
            out.emit(&table)?;
        }
        Command::Sphfn { args: a, .. } => {
            let times = a.times.values();
            let values = times
                .iter()
                .map(|&t| phi(&a.group, a.param, t))
                .collect::<rankone_core::Result<Vec<_>>>()?;
            out.emit(&column_table("phi", &times, &values)?)?;
        }
        Command::Psi(a) => {
            a.param.validate(&a.group)?;
            let times = a.times.values();
            let values = psi_on_grid(&a.group, a.param, &times)?;
            out.emit(&column_table("psi", &times, &values)?)?;
        }
        Command::Volume { group, times } => {
            let times = times.values();
            let values = times
                .iter()
                .map(|&t| ball_volume(&group, t))
                .collect::<rankone_core::Result<Vec<_>>>()?;
            out.emit(&column_table("volume", &times, &values)?)?;
        }
        Command::Simulate { spec, t_max, t_step } => {
            let cfg = SpectrumConfig::from_json(&fs::read_to_string(&spec)?)?;
            let (spectrum, f) = cfg.build()?;
            let grid: TGrid = format!("1:{t_max}:{t_step}").parse().map_err(Error::Invalid)?;
            let report = theorem_mean_report(&spectrum, &f, &grid.0)?;
            let mut table = Table::new(["t", "deviation", "envelope", "ratio", "direction_distance"]);
            for r in &report.rows {
                table.push(vec![r.t, r.deviation, r.envelope, r.ratio, r.direction_distance])?;
            }
            out.emit(&table)?;
            if out.path.is_some() {
                println!(
                    "sup ratio {}, fitted exponent {}",
                    report.sup_ratio,
                    report.fitted_exponent.map_or("n/a".to_string(), |k| k.to_string())
                );
            }
        }
        Command::Mc { t, mc, append } => {
            let run = mc_average(t, &mc.settings())?;
            println!(
                "t={} samples={} seed={} obs={} base={} estimate={} stderr={} mean={} deviation={}",
                run.t,
                run.samples,
                run.seed,
                run.observable,
                run.base,
                run.estimate,
                run.standard_error,
                run.observable.mean(),
                run.deviation()
            );
            let mut table = Table::new(["t", "samples", "estimate", "stderr", "mean", "deviation"]);
            table.push(vec![
                run.t,
                run.samples as f64,
                run.estimate,
                run.standard_error,
                run.observable.mean(),
                run.deviation(),
            ])?;
            if let Some(path) = append {
                append_row(&path, &out.header, &table)?;
            }
            if out.path.is_some() || out.format == Format::Json {
                out.emit(&table)?;
            }
        }
        Command::McScan { t_grid, mc } => {
            let report = decay_scan(&t_grid.0, &mc.settings())?;
            let mut table = Table::new(["t", "estimate", "stderr", "deviation", "envelope"]);
            for r in &report.rows {
                table.push(vec![r.t, r.estimate, r.stderr, r.deviation, r.envelope])?;
            }
            out.emit(&table)?;
        }
        Command::Grid { delta, m_max, sums } => {
            if sums {
                let report = finite_sum_check(delta, m_max)?;
                let mut table = Table::new(["m", "partial_sum", "dominating"]);
                for (i, (s, d)) in report.partial_sums.iter().zip(&report.dominating).enumerate() {
                    table.push(vec![(i + 1) as f64, *s, *d])?;
                }
                out.emit(&table)?;
            } else {
                let mut table = Table::new(["m", "t"]);
                for p in time_grid(delta, m_max)? {
                    table.push(vec![p.m as f64, p.t])?;
                }
                out.emit(&table)?;
            }
        }
        Command::Verify { group, all } => {
            let suites: Vec<Suite> = if all {
                acceptance::ALL.to_vec()
            } else {
                let group = group.expect("clap requires --group without --all");
                if group.name() != GroupName::So(3) {
                    return Err(Error::invalid(format!(
                        "closed-form checks exist for so:3 only, got {}",
                        group.name()
                    )));
                }
                vec![Suite::Hyperbolic3]
            };
            let outcomes = acceptance::run(&suites, |o| println!("{o}"));
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Radii are required except for `sphfn --c-function`.
fn check_times(cli: &Cli) -> Result<(), clap::Error> {
    let times = match &cli.command {
        Command::Sphfn { c_function: true, .. } => return Ok(()),
        Command::Sphfn { args, .. } | Command::Psi(args) => &args.times,
        Command::Volume { times, .. } => times,
        _ => return Ok(()),
    };
    if times.is_empty() {
        let mut cmd = Cli::command();
        cmd.build();
        let name = cli_subcommand_name(&cli.command);
        let sub = cmd.find_subcommand_mut(name).expect("known subcommand");
        return Err(sub.error(
            clap::error::ErrorKind::MissingRequiredArgument,
            "one of --t or --t-grid is required",
        ));
    }
    Ok(())
}

fn cli_subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Sphfn { .. } => "sphfn",
        Command::Psi(_) => "psi",
        Command::Volume { .. } => "volume",
        Command::Simulate { .. } => "simulate",
        Command::Mc { .. } => "mc",
        Command::McScan { .. } => "mc-scan",
        Command::Grid { .. } => "grid",
        Command::Verify { .. } => "verify",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse().and_then(|cli| check_times(&cli).map(|_| cli)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
