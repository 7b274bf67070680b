//! Command-line surface over the exact Fabius-function pipeline: value
//! tables, verification sweeps and the brute-force oracle, with exact
//! (`p/q`) and optional decimal output.
//!
//! Exit codes: 0 on success, 1 when `verify` reports any failed check,
//! 2 on usage errors (unknown flags, out-of-range values, depth-cap
//! violations). Stdout carries data; diagnostics go to stderr.

use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fabius::exact::to_decimal;
use fabius::fabius::TableKind;
use fabius::verify::Fault;
use fabius::{
    closed_form_row, d_odd_closed_form, d_value, fabius_dyadic, matrix_g, moment, poly_coeff,
    sandwich_check, Rational, Route,
};

#[derive(Parser)]
#[command(
    name = "fabius",
    version,
    about = "Exact Fabius-function values at dyadic points, scaled values d_i and moments",
    after_help = "The FABIUS_DEPTH_CAP environment variable overrides the oracle depth cap \
                  (default 16)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit F(2^-k) for k = 0..=max
    Fvals {
        /// Largest dyadic index k
        #[arg(long)]
        max: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Emit the scaled values d_i = 2^(i(i+1)/2) i! F(2^-i-1) for i = 0..=max
    Dvals {
        /// Largest index i
        #[arg(long)]
        max: u32,
        /// Computation route; `theorem` covers odd indices only
        #[arg(long, value_enum, default_value_t = RouteArg::Alternating)]
        route: RouteArg,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Emit the moments mu_n = 1/(n+1) - d_n for n = 0..=max
    Moments {
        /// Largest moment order n
        #[arg(long)]
        max: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Emit the polynomial coefficients c_i(j) for j = 0..i-1
    Coeffs {
        /// Polynomial scale index (>= 1)
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        i: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Emit the last row of the odd-step matrix G_i
    Gmatrix {
        /// Matrix index (>= 1)
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        i: u32,
        /// Exact product route or the closed form for the last row
        #[arg(long, value_enum, default_value_t = SourceArg::Product)]
        source: SourceArg,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Run the invariant suite up to an index and report PASS/FAIL per check
    Verify {
        /// Largest table index covered by the sweeps
        #[arg(long)]
        max: u32,
        /// Truncation depth for the oracle brackets
        #[arg(long, default_value_t = 16)]
        oracle_depth: u32,
        /// Corrupt one table entry (`f:K`, `d:I` or `mu:N`) before checking;
        /// fault injection for exercising the failure path
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Emit the oracle sandwich bounds for F(2^-k) at a truncation depth
    Oracle {
        /// Truncation depth N (1..=depth cap)
        #[arg(long)]
        depth: u32,
        /// Dyadic index k of the bracketed value F(2^-k)
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Alternating,
    #[value(name = "from_f")]
    FromF,
    Theorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Product,
    ClosedForm,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Append a decimal column rounded (half to even) at this many digits
    #[arg(long)]
    digits: Option<u32>,
    /// Start table/CSV output with a header line
    #[arg(long)]
    header: bool,
}

/// One output row. `value` is always the exact canonical `p/q` rendering;
/// the decimal column is advisory.
#[derive(Serialize)]
struct OutputRecord {
    index: u64,
    value: String,
    route: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimal: Option<String>,
}

impl OutputRecord {
    fn new(index: u64, value: &Rational, route: &'static str, digits: Option<u32>) -> Self {
        OutputRecord {
            index,
            value: value.to_string(),
            route,
            decimal: digits.map(|d| to_decimal(value, d)),
        }
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("fabius: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match std::env::var("FABIUS_DEPTH_CAP") {
        Ok(raw) => match raw.parse::<u32>() {
            Ok(cap) if cap >= 1 => fabius::set_depth_cap(cap),
            _ => return usage_error(&format!("invalid FABIUS_DEPTH_CAP value `{raw}`")),
        },
        Err(std::env::VarError::NotPresent) => {}
        Err(e) => return usage_error(&format!("unreadable FABIUS_DEPTH_CAP: {e}")),
    }

    let cli = Cli::parse();
    match cli.command {
        Command::Fvals { max, out } => {
            let records = (0..=max)
                .map(|k| OutputRecord::new(k.into(), &fabius_dyadic(k), "recurrence", out.digits))
                .collect();
            emit(&out, records)
        }
        Command::Dvals { max, route, out } => {
            let records = match route {
                RouteArg::Alternating => d_records(max, Route::Alternating, &out),
                RouteArg::FromF => d_records(max, Route::FromF, &out),
                RouteArg::Theorem => (1..=max)
                    .step_by(2)
                    .map(|i| {
                        OutputRecord::new(i.into(), &d_odd_closed_form(i), "theorem", out.digits)
                    })
                    .collect(),
            };
            emit(&out, records)
        }
        Command::Moments { max, out } => {
            let records = (0..=max)
                .map(|n| OutputRecord::new(n.into(), &moment(n), "alternating", out.digits))
                .collect();
            emit(&out, records)
        }
        Command::Coeffs { i, out } => {
            let records = (0..i)
                .map(|j| {
                    OutputRecord::new(j.into(), &poly_coeff(i, j), "closed-form", out.digits)
                })
                .collect();
            emit(&out, records)
        }
        Command::Gmatrix { i, source, out } => {
            let (row, route) = match source {
                SourceArg::Product => (matrix_g(i).row(i as usize), "product"),
                SourceArg::ClosedForm => (closed_form_row(i), "closed-form"),
            };
            let records = row
                .iter()
                .enumerate()
                .map(|(idx, value)| {
                    OutputRecord::new(idx as u64 + 1, value, route, out.digits)
                })
                .collect();
            emit(&out, records)
        }
        Command::Verify {
            max,
            oracle_depth,
            inject_fault,
        } => {
            let fault = match inject_fault.as_deref().map(|spec| parse_fault(spec, max)) {
                None => None,
                Some(Ok(fault)) => Some(fault),
                Some(Err(message)) => return usage_error(&message),
            };
            run_verify(max, oracle_depth, fault)
        }
        Command::Oracle { depth, k, out } => {
            if depth == 0 || depth > fabius::depth_cap() {
                return usage_error(&format!(
                    "oracle depth {depth} outside 1..={} (override the cap with FABIUS_DEPTH_CAP)",
                    fabius::depth_cap()
                ));
            }
            let bounds = match sandwich_check(depth, k) {
                Ok(bounds) => bounds,
                Err(e) => return usage_error(&e.to_string()),
            };
            let records = vec![
                OutputRecord::new(k.into(), &bounds.lower, "oracle-lower", out.digits),
                OutputRecord::new(k.into(), &bounds.upper, "oracle-upper", out.digits),
            ];
            emit(&out, records)
        }
    }
}

fn d_records(max: u32, route: Route, out: &OutputOpts) -> Vec<OutputRecord> {
    (0..=max)
        .map(|i| {
            OutputRecord::new(
                i.into(),
                &d_value(i, route),
                match route {
                    Route::Alternating => "alternating",
                    Route::FromF => "from_f",
                },
                out.digits,
            )
        })
        .collect()
}

fn parse_fault(spec: &str, max: u32) -> Result<Fault, String> {
    let parsed = spec.split_once(':').and_then(|(table, index)| {
        let table = match table {
            "f" => TableKind::F,
            "d" => TableKind::D,
            "mu" => TableKind::Mu,
            _ => return None,
        };
        index.parse::<u32>().ok().map(|index| Fault { table, index })
    });
    let fault = parsed.ok_or_else(|| {
        format!("invalid fault spec `{spec}` (expected f:K, d:I or mu:N)")
    })?;
    let limit = match fault.table {
        TableKind::F => max + 1,
        TableKind::D | TableKind::Mu => max,
    };
    if fault.index > limit {
        return Err(format!(
            "fault index {} outside the {} table (0..={limit})",
            fault.index, fault.table
        ));
    }
    Ok(fault)
}

fn run_verify(max: u32, oracle_depth: u32, fault: Option<Fault>) -> ExitCode {
    let reports = match fabius::run_verification(max, oracle_depth, fault) {
        Ok(reports) => reports,
        Err(e) => {
            return usage_error(&format!(
                "{e} (override the cap with FABIUS_DEPTH_CAP)"
            ))
        }
    };
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut failed = false;
    for report in &reports {
        let status = if report.passed { "PASS" } else { "FAIL" };
        failed |= !report.passed;
        writeln!(out, "{status} {}: {}", report.name, report.detail).expect("stdout write");
    }
    out.flush().expect("stdout flush");
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit(opts: &OutputOpts, records: Vec<OutputRecord>) -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match opts.format {
        Format::Json => {
            let body = serde_json::to_string(&records).expect("record serialization");
            writeln!(out, "{body}").expect("stdout write");
        }
        Format::Csv | Format::Table => {
            let sep = if opts.format == Format::Csv { "," } else { "  " };
            if opts.header {
                let mut header = format!("index{sep}value");
                if opts.digits.is_some() {
                    header.push_str(sep);
                    header.push_str("decimal");
                }
                writeln!(out, "{header}").expect("stdout write");
            }
            for record in &records {
                let mut line = format!("{}{sep}{}", record.index, record.value);
                if let Some(decimal) = &record.decimal {
                    line.push_str(sep);
                    line.push_str(decimal);
                }
                writeln!(out, "{line}").expect("stdout write");
            }
        }
    }
    out.flush().expect("stdout flush");
    ExitCode::SUCCESS
}
