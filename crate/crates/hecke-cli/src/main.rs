//! Command line interface to the hecke crate: character tables, central
//! eigenvalue reports, the matrix verification suite, and Casimir
//! computations, each emitted as deterministic JSON or CSV.

use std::env;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hecke::casimir::{
    casimir_delta_series, casimir_eigenvalue, decode_spectrum, hecke_casimir_relation_check,
};
use hecke::characters::{character_table, class_character, class_word};
use hecke::diagrams::{
    classical_collisions, fundamental_eigenvalue, partitions_of, Partition,
};
use hecke::laurent::{eval_at, rint, DeltaSeries, LaurentPoly};
use hecke::murphy::murphy_trace;
use hecke::oracle::{
    build_irrep, murphy_matrix, verify_relations, word_trace, CheckRecord, VerifyReport,
};

/// Exact Hecke algebra computations: characters, central eigenvalues,
/// verification, and Casimir spectra.
#[derive(Parser)]
#[command(name = "hecke", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full character table on n strands.
    Characters {
        /// Number of strands.
        n: usize,
        #[command(flatten)]
        io: IoArgs,
        /// Safety bound on n; values above the default are allowed but warned
        /// about, since table size grows quickly.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// List the central invariant eigenvalue of every module on n strands,
    /// with collision reports at generic q and at q = 1.
    Eigenvalues {
        /// Number of strands.
        n: usize,
        #[command(flatten)]
        io: IoArgs,
        /// Safety bound on n.
        #[arg(long, default_value_t = 12)]
        limit: usize,
    },
    /// Run the matrix verification suite on every module with n boxes and
    /// emit one record per checked identity.
    Verify {
        /// Number of strands.
        n: usize,
        /// Write the JSON report to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Safety bound on n; matrix checks grow quickly with it.
        #[arg(long, default_value_t = 6)]
        limit: usize,
    },
    /// Casimir eigenvalue, delta series, and relation check for a diagram,
    /// or decode a spectrum polynomial back into its diagram.
    #[command(group(ArgGroup::new("input").required(true).args(["diagram", "decode"])))]
    Casimir {
        /// Rank parameter N of the quantum group.
        rank: usize,
        /// Diagram as a bracketed part list, e.g. [2,1].
        diagram: Option<String>,
        /// Spectrum polynomial to decode, in canonical text form.
        #[arg(long)]
        decode: Option<String>,
        /// Truncation order of the delta series.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Write the JSON output to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// A failure with its process exit code: usage errors exit 2, verification
/// and internal failures exit 1.
enum CliError {
    Usage(String),
    Failure(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Characters { n, io, limit } => cmd_characters(n, &io, limit),
        Command::Eigenvalues { n, io, limit } => cmd_eigenvalues(n, &io, limit),
        Command::Verify { n, out, limit } => cmd_verify(n, &out, limit),
        Command::Casimir { rank, diagram, decode, order, out } => {
            cmd_casimir(rank, diagram.as_deref(), decode.as_deref(), order, &out)
        }
    }
}

/// Validates `1 <= n <= limit` and warns when the caller raised the limit
/// past the command's default.
fn check_bound(n: usize, limit: usize, default_limit: usize) -> Result<(), CliError> {
    if limit > default_limit {
        eprintln!(
            "warning: safety limit raised to {limit} (default {default_limit}); \
             expect long runtimes"
        );
    }
    if n < 1 {
        return Err(usage("n must be at least 1"));
    }
    if n > limit {
        return Err(usage(format!(
            "n = {n} exceeds the safety limit {limit}; raise it with --limit"
        )));
    }
    Ok(())
}

/// Writes `content` to `--out` if given, else to `$HECKE_OUT_DIR/<name>` if
/// the variable is set and nonempty, else to stdout.
fn write_output(out: &Option<PathBuf>, default_name: &str, content: &str) -> Result<(), CliError> {
    let target = out.clone().or_else(|| {
        env::var("HECKE_OUT_DIR")
            .ok()
            .filter(|dir| !dir.is_empty())
            .map(|dir| PathBuf::from(dir).join(default_name))
    });
    match target {
        Some(path) => fs::write(&path, content)
            .map_err(|e| failure(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| failure(format!("cannot write to stdout: {e}"))),
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| failure(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn cmd_characters(n: usize, io: &IoArgs, limit: usize) -> Result<(), CliError> {
    check_bound(n, limit, 10)?;
    let table = character_table(n).map_err(|e| failure(e.to_string()))?;
    let content = match io.format {
        Format::Json => to_pretty_json(&table)?,
        Format::Csv => table.to_csv(),
    };
    let name = format!("characters_{n}.{}", io.format.extension());
    write_output(&io.out, &name, &content)
}

#[derive(Serialize)]
struct EigenvalueEntry {
    diagram: String,
    eigenvalue: LaurentPoly,
    classical: String,
}

#[derive(Serialize)]
struct EigenvalueReport {
    n: usize,
    values: Vec<EigenvalueEntry>,
    generic_collisions: Vec<[String; 2]>,
    classical_collisions: Vec<[String; 2]>,
}

fn eigenvalue_report(n: usize) -> Result<EigenvalueReport, CliError> {
    let shapes = partitions_of(n);
    let polys: Vec<LaurentPoly> = shapes.iter().map(fundamental_eigenvalue).collect();
    let mut values = Vec::with_capacity(shapes.len());
    for (g, v) in shapes.iter().zip(&polys) {
        let classical = eval_at(v, &rint(1)).map_err(|e| failure(e.to_string()))?;
        values.push(EigenvalueEntry {
            diagram: g.to_string(),
            eigenvalue: v.clone(),
            classical: classical.to_string(),
        });
    }
    let mut generic = Vec::new();
    for i in 0..shapes.len() {
        for j in (i + 1)..shapes.len() {
            if polys[i] == polys[j] {
                generic.push([shapes[i].to_string(), shapes[j].to_string()]);
            }
        }
    }
    let classical = classical_collisions(n)
        .into_iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect();
    Ok(EigenvalueReport {
        n,
        values,
        generic_collisions: generic,
        classical_collisions: classical,
    })
}

fn eigenvalue_csv(report: &EigenvalueReport) -> String {
    let mut partners: Vec<Vec<&str>> = vec![Vec::new(); report.values.len()];
    for [a, b] in &report.classical_collisions {
        for (entry, list) in report.values.iter().zip(partners.iter_mut()) {
            if entry.diagram == *a {
                list.push(b);
            } else if entry.diagram == *b {
                list.push(a);
            }
        }
    }
    let mut out = String::from("diagram,eigenvalue,classical,classical_collides_with\n");
    for (entry, list) in report.values.iter().zip(&partners) {
        out.push('"');
        out.push_str(&entry.diagram);
        out.push_str("\",");
        out.push_str(&entry.eigenvalue.to_string());
        out.push(',');
        out.push_str(&entry.classical);
        out.push_str(",\"");
        out.push_str(&list.join(";"));
        out.push_str("\"\n");
    }
    out
}

fn cmd_eigenvalues(n: usize, io: &IoArgs, limit: usize) -> Result<(), CliError> {
    check_bound(n, limit, 12)?;
    let report = eigenvalue_report(n)?;
    let content = match io.format {
        Format::Json => to_pretty_json(&report)?,
        Format::Csv => eigenvalue_csv(&report),
    };
    let name = format!("eigenvalues_{n}.{}", io.format.extension());
    write_output(&io.out, &name, &content)
}

#[derive(Serialize)]
struct VerifySummary {
    n: usize,
    ok: bool,
    reports: Vec<VerifyReport>,
}

fn verify_summary(n: usize) -> Result<VerifySummary, CliError> {
    let shapes = partitions_of(n);
    let mut reports = Vec::new();
    let mut irreps = Vec::with_capacity(shapes.len());
    for g in &shapes {
        let m = build_irrep(g).map_err(|e| failure(e.to_string()))?;
        reports.push(verify_relations(&m));
        irreps.push(m);
    }

    let mut pipeline = VerifyReport {
        subject: "character pipeline against matrix traces".to_string(),
        checks: Vec::new(),
    };
    for mu in &shapes {
        let w = class_word(mu, n);
        for (g, m) in shapes.iter().zip(&irreps) {
            let lhs = class_character(g, mu).map_err(|e| failure(e.to_string()))?;
            let rhs = word_trace(m, w.letters()).map_err(|e| failure(e.to_string()))?;
            pipeline.checks.push(CheckRecord {
                name: format!("character of {g} on class {mu}"),
                ok: lhs == rhs,
            });
        }
    }
    reports.push(pipeline);

    let mut murphy = VerifyReport {
        subject: "murphy traces against matrix traces".to_string(),
        checks: Vec::new(),
    };
    for (g, m) in shapes.iter().zip(&irreps) {
        for p in 2..=n {
            let lhs = murphy_trace(g, p).map_err(|e| failure(e.to_string()))?;
            let rhs = murphy_matrix(m, p)
                .trace()
                .to_laurent()
                .map_err(|e| failure(e.to_string()))?;
            murphy.checks.push(CheckRecord {
                name: format!("trace of L{p} on {g}"),
                ok: lhs == rhs,
            });
        }
    }
    reports.push(murphy);

    let mut casimir = VerifyReport {
        subject: "central invariant to Casimir relation".to_string(),
        checks: Vec::new(),
    };
    for rank in 2..=5usize {
        for g in &shapes {
            if g.rows() >= rank {
                continue;
            }
            let check =
                hecke_casimir_relation_check(g, rank).map_err(|e| failure(e.to_string()))?;
            casimir.checks.push(CheckRecord {
                name: format!("relation for {g} at rank {rank}"),
                ok: check.holds,
            });
        }
    }
    reports.push(casimir);

    let ok = reports.iter().all(|r| r.all_ok());
    Ok(VerifySummary { n, ok, reports })
}

fn cmd_verify(n: usize, out: &Option<PathBuf>, limit: usize) -> Result<(), CliError> {
    check_bound(n, limit, 6)?;
    let summary = verify_summary(n)?;
    let content = to_pretty_json(&summary)?;
    write_output(out, &format!("verify_{n}.json"), &content)?;
    if summary.ok {
        Ok(())
    } else {
        let name = summary
            .reports
            .iter()
            .find_map(|r| r.first_failure().map(|f| format!("{}: {f}", r.subject)))
            .unwrap_or_else(|| "unknown check".to_string());
        Err(failure(format!("verification failed at: {name}")))
    }
}

#[derive(Serialize)]
struct CasimirOutput {
    rank: usize,
    diagram: String,
    eigenvalue: LaurentPoly,
    series: DeltaSeries,
    relation: hecke::casimir::RelationReport,
}

#[derive(Serialize)]
struct DecodeOutput {
    rank: usize,
    spectrum: LaurentPoly,
    diagram: String,
}

fn cmd_casimir(
    rank: usize,
    diagram: Option<&str>,
    decode: Option<&str>,
    order: usize,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    if let Some(text) = decode {
        let poly: LaurentPoly = text
            .parse()
            .map_err(|e| usage(format!("spectrum polynomial {text:?}: {e}")))?;
        let g = decode_spectrum(&poly, rank)
            .map_err(|e| usage(format!("spectrum {text:?} does not decode: {e}")))?;
        let output = DecodeOutput { rank, spectrum: poly, diagram: g.to_string() };
        let content = to_pretty_json(&output)?;
        return write_output(out, &format!("casimir_{rank}_decode.json"), &content);
    }
    let text = diagram.expect("clap guarantees one input form");
    let g: Partition = text
        .parse()
        .map_err(|e| usage(format!("diagram {text:?}: {e}")))?;
    let eigenvalue =
        casimir_eigenvalue(&g, rank).map_err(|e| usage(format!("diagram {text:?}: {e}")))?;
    let series = casimir_delta_series(&g, rank, order)
        .map_err(|e| usage(format!("diagram {text:?}: {e}")))?;
    let relation =
        hecke_casimir_relation_check(&g, rank).map_err(|e| usage(format!("diagram {text:?}: {e}")))?;
    let holds = relation.holds;
    let output = CasimirOutput { rank, diagram: g.to_string(), eigenvalue, series, relation };
    let content = to_pretty_json(&output)?;
    write_output(out, &format!("casimir_{rank}.json"), &content)?;
    if holds {
        Ok(())
    } else {
        Err(failure(format!(
            "the invariant relation does not hold for {g} at rank {rank}"
        )))
    }
}
