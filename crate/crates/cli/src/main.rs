use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use vop_core::families::{build_family, generate_table, FamilySpec, Ordering, PolyTable};
use vop_core::verify::{
    audit_with_table, builtin_corpus, extract_recurrence, full_report, maroni_check, CorpusEntry, Report,
};
use vop_core::{Error, Scalar};

#[derive(Parser, Debug)]
#[command(name = "vop", version, about = "Exact construction and audit of vector orthogonal polynomial families")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Override the table size N of the given specs.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Ordering convention for ordering-sensitive printed claims.
    #[arg(long, value_enum, default_value_t = OrderingArg::Both, global = true)]
    ordering: OrderingArg,

    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate P_0..P_N.
    Gen(SpecArg),
    /// Audit one family and its printed claims.
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        /// Audit this table (a `gen` document) instead of regenerating it.
        #[arg(long)]
        table: Option<String>,
    },
    /// Extract the recurrence x P_n = P_(n+1) + sum_j gamma_j(n) P_(n-j).
    Recur(SpecArg),
    /// Dual functionals and d-orthogonality checks.
    Functionals(SpecArg),
    /// Audit the built-in corpus plus any given specs.
    Report {
        /// Additional specs (path, `-`, or inline JSON).
        #[arg(long = "spec")]
        specs: Vec<String>,
    },
}

#[derive(clap::Args, Debug)]
struct SpecArg {
    /// Family spec: a file path, `-` for stdin, or inline JSON.
    #[arg(long)]
    spec: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrderingArg {
    AsWritten,
    Reversed,
    Both,
}

impl OrderingArg {
    fn orderings(self) -> &'static [Ordering] {
        match self {
            OrderingArg::AsWritten => &[Ordering::AsWritten],
            OrderingArg::Reversed => &[Ordering::Reversed],
            OrderingArg::Both => &Ordering::BOTH,
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

struct Output {
    doc: String,
    mismatch: bool,
}

fn read_source(src: &str) -> Result<String, Failure> {
    if src == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        Ok(s)
    } else if src.trim_start().starts_with('{') {
        Ok(src.to_string())
    } else {
        std::fs::read_to_string(src).map_err(|e| Failure::Usage(format!("reading {src}: {e}")))
    }
}

fn load_spec(src: &str, n: Option<usize>) -> Result<FamilySpec, Failure> {
    let spec = FamilySpec::from_json(&read_source(src)?)?;
    Ok(match n {
        Some(n) => spec.with_n(n),
        None => spec,
    })
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize")
}

fn report_output(report: &Report, format: Format) -> Output {
    let doc = match format {
        Format::Json => to_json(report),
        Format::Text => report.to_string(),
    };
    Output {
        doc,
        mismatch: !report.all_match(),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let ok = |doc| Ok(Output { doc, mismatch: false });
    match &cli.command {
        Command::Gen(s) => {
            let spec = load_spec(&s.spec, cli.n)?;
            let table = generate_table(&build_family::<Scalar>(&spec)?)?;
            match cli.format {
                Format::Json => ok(to_json(&table)),
                Format::Text => {
                    let mut out = format!("# {spec}\n");
                    for (n, p) in table.polys.iter().enumerate() {
                        let _ = writeln!(out, "P_{n} = {p}");
                    }
                    ok(out.trim_end().to_string())
                }
            }
        }
        Command::Recur(s) => {
            let spec = load_spec(&s.spec, cli.n)?;
            let table = generate_table(&build_family::<Scalar>(&spec)?)?;
            let rec = extract_recurrence(&table)?;
            match cli.format {
                Format::Json => ok(to_json(&rec)),
                Format::Text => {
                    let mut out = format!("# {spec}\nbandwidth d = {}\n", rec.bandwidth);
                    for j in 0..=rec.bandwidth {
                        match rec.closed_form(j) {
                            Some(p) => {
                                let _ = writeln!(out, "gamma_{j}(n) = {p}");
                            }
                            None => {
                                let _ = writeln!(out, "gamma_{j}(n): no polynomial fit within N");
                            }
                        }
                    }
                    for n in 0..rec.rows() {
                        let row: Vec<String> = (0..=rec.bandwidth.min(n))
                            .map(|j| format!("gamma_{j}({n}) = {}", rec.gammas[n][j]))
                            .collect();
                        let _ = writeln!(out, "{}", row.join("; "));
                    }
                    ok(out.trim_end().to_string())
                }
            }
        }
        Command::Functionals(s) => {
            let spec = load_spec(&s.spec, cli.n)?;
            let table = generate_table(&build_family::<Scalar>(&spec)?)?;
            let rec = extract_recurrence(&table)?;
            let (funcs, checks) = maroni_check(&table, &rec)?;
            let mismatch = checks.iter().any(|c| c.is_mismatch());
            let doc = match cli.format {
                Format::Json => to_json(&json!({ "functionals": funcs, "checks": checks })),
                Format::Text => {
                    let mut out = format!("# {spec}\nd = {}\n", funcs.d);
                    for (k, row) in funcs.moments.iter().enumerate() {
                        for (j, m) in row.iter().enumerate() {
                            let _ = writeln!(out, "u_{k}(x^{j}) = {m}");
                        }
                    }
                    for c in &checks {
                        let _ = writeln!(out, "{c}");
                    }
                    out.trim_end().to_string()
                }
            };
            Ok(Output { doc, mismatch })
        }
        Command::Verify { spec, table } => {
            let spec = load_spec(&spec.spec, cli.n)?;
            let entry = CorpusEntry::from_spec(spec).with_orderings(cli.ordering.orderings());
            let table = match table {
                Some(src) => Some(PolyTable::<Scalar>::from_json(&read_source(src)?)?),
                None => None,
            };
            let checks = audit_with_table(&entry, table)?;
            Ok(report_output(&Report::from_checks(checks), cli.format))
        }
        Command::Report { specs } => {
            let mut entries = builtin_corpus();
            for s in specs {
                let spec = load_spec(s, cli.n)?;
                entries.push(CorpusEntry::from_spec(spec));
            }
            let orderings = cli.ordering.orderings();
            let entries: Vec<CorpusEntry> = entries.into_iter().map(|e| e.with_orderings(orderings)).collect();
            Ok(report_output(&full_report(&entries)?, cli.format))
        }
    }
}

fn emit(doc: &str, out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{doc}\n")),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{doc}")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&out.doc, cli.out.as_ref()) {
                if e.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(u8::from(out.mismatch))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}
