#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use threeway_dof::allocation::{
    optimal_broadcast, optimal_unicast_bruteforce, optimal_unicast_closed_form, optimal_unicast_enumerated_with,
    AllocationResult, EnumerationScope,
};
use threeway_dof::bounds::{cutset_bound_broadcast, cutset_bound_unicast, genie_bound_unicast};
use threeway_dof::rate::{estimate_dof_with, ReceiveMode, SlopeFit, SlopeOptions};
use threeway_dof::rational::{self, Rational};
use threeway_dof::schemes::{build_scheme, verify_scheme, SchemeKind};
use threeway_dof::sweep::{sweep, SweepSpec};
use threeway_dof::{AntennaConfig, AntennaSplit, Error, MessageConfig, DEFAULT_SEED};

use render::{Format, Table};

#[derive(Parser, Debug)]
#[command(name = "threeway-dof", version, about = "DoF bounds, antenna allocation and zero-forcing schemes for the MIMO 3-way channel")]
struct Cli {
    /// Output format; defaults to csv for `sweep` and json otherwise.
    #[arg(long, short, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cut-set and genie-aided bounds for an explicit or optimised split.
    Bounds(BoundsArgs),
    /// Optimal transmit/receive antenna allocation.
    Allocate(AllocateArgs),
    /// Build a zero-forcing scheme on a random channel and check it.
    VerifyScheme(VerifyArgs),
    /// Estimate the DoF as the high-SNR slope of the Monte-Carlo sum rate.
    Slope(SlopeArgs),
    /// Normalised optimal DoF d*/M3 over a grid of M1/M3 and M2/M3.
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Msgs {
    Unicast,
    Broadcast,
}

impl Msgs {
    fn config(self) -> MessageConfig {
        match self {
            Msgs::Unicast => MessageConfig::UnicastOnly,
            Msgs::Broadcast => MessageConfig::UnicastAndBroadcast,
        }
    }
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Antenna counts M1,M2,M3 with M1 >= M2 >= M3.
    #[arg(long, value_parser = parse_counts)]
    m: [u32; 3],
    /// Sort the counts into decreasing order instead of rejecting them.
    #[arg(long)]
    sort: bool,
}

impl ConfigArg {
    fn config(&self) -> Result<AntennaConfig, Error> {
        if self.sort {
            Ok(AntennaConfig::sorted(self.m))
        } else {
            AntennaConfig::new(self.m[0], self.m[1], self.m[2])
        }
    }
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Antenna counts M1,M2,M3; requires --allocate.
    #[arg(long, value_parser = parse_counts, conflicts_with_all = ["mt", "mr"])]
    m: Option<[u32; 3]>,
    /// Transmit antennas per node (integers or p/q).
    #[arg(long, value_parser = parse_rationals, requires = "mr")]
    mt: Option<[Rational; 3]>,
    /// Receive antennas per node (integers or p/q).
    #[arg(long, value_parser = parse_rationals, requires = "mt")]
    mr: Option<[Rational; 3]>,
    #[arg(long, value_enum, default_value_t = Msgs::Unicast)]
    msgs: Msgs,
    /// Run the optimiser on --m and report bounds at its split.
    #[arg(long, requires = "m")]
    allocate: bool,
    #[arg(long)]
    sort: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    ClosedForm,
    Enumerated,
    Bruteforce,
}

#[derive(Args, Debug)]
struct AllocateArgs {
    #[command(flatten)]
    cfg: ConfigArg,
    #[arg(long, value_enum, default_value_t = Msgs::Unicast)]
    msgs: Msgs,
    /// Unicast solver; broadcast always uses the closed form.
    #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
    method: Method,
    /// Grid denominator for --method bruteforce.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    denominator: u32,
    /// Enumerate all 64 branch subproblems instead of 32.
    #[arg(long)]
    full: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    cfg: ConfigArg,
    #[arg(long, value_parser = parse_scheme)]
    scheme: SchemeKind,
    #[arg(long, env = "THREEWAY_DOF_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Fit {
    TopTwo,
    LeastSquares,
}

#[derive(Args, Debug)]
struct SlopeArgs {
    #[command(flatten)]
    cfg: ConfigArg,
    #[arg(long, value_parser = parse_scheme)]
    scheme: SchemeKind,
    /// SNR grid in dB.
    #[arg(long, value_delimiter = ',', default_values_t = [30.0, 50.0])]
    snr: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, env = "THREEWAY_DOF_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Fit::TopTwo)]
    fit: Fit,
    /// Replace the zero-forcing projectors by random ones (ablation).
    #[arg(long)]
    blind: bool,
    /// Largest accepted |slope - theoretical DoF| for exit status 0.
    #[arg(long, default_value_t = 0.2)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    m3: u32,
    /// Range of M1/M3 as lo:hi (rationals allowed).
    #[arg(long, value_parser = parse_range, default_value = "1:4")]
    m1_ratio: [Rational; 2],
    /// Range of M2/M3 as lo:hi.
    #[arg(long, value_parser = parse_range, default_value = "1:4")]
    m2_ratio: [Rational; 2],
    #[arg(long, value_enum, default_value_t = Msgs::Unicast)]
    msgs: Msgs,
}

fn parse_triple<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<[T; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    }
    let v = parts.into_iter().map(item).collect::<Result<Vec<T>, String>>()?;
    v.try_into().map_err(|_| "expected three values".to_string())
}

fn parse_counts(s: &str) -> Result<[u32; 3], String> {
    parse_triple(s, |p| p.parse::<u32>().map_err(|_| format!("{p:?} is not a nonnegative integer")))
}

fn parse_rationals(s: &str) -> Result<[Rational; 3], String> {
    parse_triple(s, |p| {
        let r = rational::parse(p).map_err(|e| e.to_string())?;
        if rational::is_nonneg(&r) {
            Ok(r)
        } else {
            Err(format!("{p:?} is negative"))
        }
    })
}

fn parse_range(s: &str) -> Result<[Rational; 2], String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let p = |x: &str| rational::parse(x.trim()).map_err(|e| e.to_string());
    Ok([p(lo)?, p(hi)?])
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure of a command, rendered as one `error[kind]: message` line.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn line(&self) -> String {
        let (kind, msg) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Validation(m) => ("validation", m),
            Failure::Internal(m) => ("internal", m),
        };
        format!("error[{kind}]: {}", msg.replace('\n', " "))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::AllTrialsInvalid(_) => Failure::Internal(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

/// What a command produced: text for stdout, and an optional failure that
/// still sets the exit status after the output is printed.
struct Outcome {
    text: String,
    failure: Option<Failure>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(format!("serialization failed: {e}")))
}

fn cmd_bounds(a: &BoundsArgs, format: Format) -> Result<Outcome, Failure> {
    let msgs = a.msgs.config();
    let (split, allocation): (AntennaSplit, Option<AllocationResult>) = match (&a.m, &a.mt, &a.mr) {
        (Some(m), _, _) => {
            if !a.allocate {
                return Err(Failure::Usage("--m needs --allocate; pass --mt/--mr for an explicit split".into()));
            }
            let cfg = ConfigArg { m: *m, sort: a.sort }.config()?;
            let alloc = match msgs {
                MessageConfig::UnicastOnly => optimal_unicast_closed_form(&cfg),
                MessageConfig::UnicastAndBroadcast => optimal_broadcast(&cfg)?,
            };
            (alloc.split.clone(), Some(alloc))
        }
        (None, Some(mt), Some(mr)) => (AntennaSplit::new(*mt, *mr)?, None),
        _ => return Err(Failure::Usage("give either --mt and --mr, or --m with --allocate".into())),
    };

    let reports = match msgs {
        MessageConfig::UnicastOnly => vec![("cutset", cutset_bound_unicast(&split)), ("genie", genie_bound_unicast(&split))],
        MessageConfig::UnicastAndBroadcast => vec![("cutset", cutset_bound_broadcast(&split))],
    };
    let bound = reports.last().expect("at least one report").1.value();

    let text = match format {
        Format::Json => {
            let mut obj = json!({
                "messages": msgs,
                "split": split,
                "bound": rational::to_pq(&bound),
            });
            for (name, r) in &reports {
                obj[*name] = serde_json::to_value(r).map_err(|e| Failure::Internal(e.to_string()))?;
            }
            if let Some(alloc) = &allocation {
                obj["allocation"] = serde_json::to_value(alloc).map_err(|e| Failure::Internal(e.to_string()))?;
            }
            to_json(&obj)?
        }
        Format::Csv | Format::Table => {
            let mut t = Table::new(["report", "term", "value", "binding"]);
            for (name, r) in &reports {
                for term in &r.per_cut {
                    t.row([name.to_string(), term.label.clone(), render::dec(&term.value), String::new()]);
                }
                for term in &r.combined_terms {
                    let binding = if r.binding_terms.contains(&term.label) { "*" } else { "" };
                    t.row([format!("{name}-combined"), term.label.clone(), render::dec(&term.value), binding.into()]);
                }
            }
            t.row(["bound".into(), split.to_string(), render::dec(&bound), String::new()]);
            t.render(format)
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_allocate(a: &AllocateArgs, format: Format) -> Result<Outcome, Failure> {
    let cfg = a.cfg.config()?;
    let result = match (a.msgs, a.method) {
        (Msgs::Broadcast, _) => optimal_broadcast(&cfg)?,
        (Msgs::Unicast, Method::ClosedForm) => optimal_unicast_closed_form(&cfg),
        (Msgs::Unicast, Method::Enumerated) => {
            let scope = if a.full { EnumerationScope::Full } else { EnumerationScope::Halved };
            optimal_unicast_enumerated_with(&cfg, scope)?
        }
        (Msgs::Unicast, Method::Bruteforce) => optimal_unicast_bruteforce(&cfg, a.denominator)?,
    };
    let text = match format {
        Format::Json => to_json(&result)?,
        _ => {
            let mut t = Table::new(["field", "value"]);
            t.row(["config".into(), cfg.to_string()]);
            t.row(["optimal_dof".into(), render::dec(&result.optimal_dof)]);
            for node in 1..=3 {
                t.row([format!("M_T{node}"), render::dec(&result.split.mt(node))]);
                t.row([format!("M_R{node}"), render::dec(&result.split.mr(node))]);
            }
            t.row(["regime".into(), render::tag(&result.regime)]);
            t.row(["certificate".into(), render::certificate(&result.certificate)]);
            t.row(["extension_factor".into(), result.extension_factor.to_string()]);
            if let Some(band) = &result.band {
                t.row(["transmit_sum_band".into(), format!("[{}, {}]", render::dec(&band.lower), render::dec(&band.upper))]);
            }
            t.render(format)
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_verify(a: &VerifyArgs, format: Format) -> Result<Outcome, Failure> {
    let cfg = a.cfg.config()?;
    let layout = a.scheme.layout(&cfg)?;
    let channels = layout.draw_channels(a.seed)?;
    let scheme = build_scheme(a.scheme, &cfg, &channels, a.seed)?;
    let report = verify_scheme(&scheme, &channels)?;
    let text = match format {
        Format::Json => to_json(&report)?,
        _ => {
            let mut t = Table::new(["message", "receiver", "projector", "dim", "residual", "sigma_min", "round_trip"]);
            for d in &report.decoders {
                t.row([
                    d.message.to_string(),
                    d.receiver.to_string(),
                    d.projector.clone(),
                    d.dim.to_string(),
                    format!("{:.3e}", d.interference_residual),
                    format!("{:.4}", d.sigma_min),
                    format!("{:.3e}", d.round_trip_error),
                ]);
            }
            let mut out = t.render(format);
            if format == Format::Table {
                out.push_str(&format!(
                    "status: {}  achieved_dof: {}  extension: {}\n",
                    render::tag(&report.status),
                    render::dec(&report.achieved_dof),
                    report.extension_factor
                ));
            }
            out
        }
    };
    let failure = (!report.is_valid())
        .then(|| Failure::Validation(format!("scheme {} invalid on seed {}: {}", a.scheme, a.seed, report.failures.join(", "))));
    Ok(Outcome { text, failure })
}

fn cmd_slope(a: &SlopeArgs, format: Format) -> Result<Outcome, Failure> {
    let cfg = a.cfg.config()?;
    let opts = SlopeOptions {
        fit: match a.fit {
            Fit::TopTwo => SlopeFit::TopTwo,
            Fit::LeastSquares => SlopeFit::LeastSquaresTopHalf,
        },
        mode: if a.blind { ReceiveMode::Blind } else { ReceiveMode::ZeroForcing },
    };
    let est = estimate_dof_with(&cfg, a.scheme, &a.snr, a.trials, a.seed, opts)?;
    let text = match format {
        Format::Json => to_json(&est)?,
        Format::Csv => est.to_csv(),
        Format::Table => {
            let mut t = Table::new(["snr_db", "mean_rate"]);
            for (db, r) in est.snr_grid_db.iter().zip(&est.mean_sum_rate_bits) {
                t.row([format!("{db}"), format!("{r:.4}")]);
            }
            let mut out = t.render(format);
            out.push_str(&format!(
                "slope_dof: {:.4}  theoretical: {}  abs_error: {:.4}  valid_trials: {}/{}\n",
                est.slope_dof,
                render::dec(&est.theoretical_dof),
                est.abs_error,
                est.valid_trials,
                est.trials
            ));
            out
        }
    };
    let failure = (!(est.abs_error <= a.tolerance)).then(|| {
        Failure::Validation(format!(
            "slope {:.4} differs from {} by {:.4} > {}",
            est.slope_dof,
            rational::to_pq(&est.theoretical_dof),
            est.abs_error,
            a.tolerance
        ))
    });
    Ok(Outcome { text, failure })
}

fn cmd_sweep(a: &SweepArgs, format: Format) -> Result<Outcome, Failure> {
    let spec = SweepSpec { m3: a.m3, m1_ratio: a.m1_ratio, m2_ratio: a.m2_ratio, messages: a.msgs.config() };
    let points = sweep(&spec)?;
    let text = match format {
        Format::Json => to_json(&json!({ "spec": spec, "points": points }))?,
        _ => {
            let mut t = Table::new(["m1_over_m3", "m2_over_m3", "dof_over_m3"]);
            for p in &points {
                t.row([render::dec(&p.m1_over_m3), render::dec(&p.m2_over_m3), render::dec(&p.dof_over_m3)]);
            }
            t.render(format)
        }
    };
    Ok(Outcome::ok(text))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Json,
    });
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, format),
        Command::Allocate(a) => cmd_allocate(a, format),
        Command::VerifyScheme(a) => cmd_verify(a, format),
        Command::Slope(a) => cmd_slope(a, format),
        Command::Sweep(a) => cmd_sweep(a, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", Failure::Usage(first.to_string()).line());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut text = out.text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            // A closed downstream pipe is not an error for a report writer.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(f) => {
                    eprintln!("{}", f.line());
                    ExitCode::from(f.code())
                }
            }
        }
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code())
        }
    }
}
