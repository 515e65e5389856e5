//! `darboux`: analyze potentials at Darboux points, export table A, print
//! residue sequences and run the self-verification suites.

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use darboux_core::analysis::input::{parse_input_document, InputDocument};
use darboux_core::analysis::pipeline::{analyze, AnalysisOptions};
use darboux_core::analysis::report::{exit_code, render_text};
use darboux_core::residue::{closed_form_alpha_coefficient, ResidueEngine, ResiduePoly, TripleResidues};
use darboux_core::selfcheck::{run_selfcheck, SelfcheckConfig};
use darboux_core::table::a_table;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "darboux", version, about = "Order-1 and order-2 integrability conditions for homogeneous potentials of degree -1")]
struct Cli {
    /// Worker threads for bulk work (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Residual tolerance [default: 1e-9].
    #[arg(long, global = true, value_parser = positive_f64)]
    tolerance: Option<f64>,
    /// Tolerance for integer p-index detection [default: 1e-6].
    #[arg(long = "int-tolerance", global = true, value_parser = positive_f64)]
    int_tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a potential at one or more Darboux points.
    Analyze {
        /// Input document file, inline document, or a potential expression.
        #[arg(short, long, allow_hyphen_values = true)]
        input: String,
        /// Darboux candidate such as "(-1, 0)"; repeatable.
        #[arg(long)]
        darboux: Vec<String>,
        /// Use floating point even for rational points.
        #[arg(long)]
        float: bool,
        /// Include per-stage timings.
        #[arg(long)]
        timings: bool,
    },
    /// Export table A for 0 <= i <= j <= k <= range.
    Table {
        #[arg(long, default_value_t = 7)]
        range: u32,
        /// Eight-by-eight block layout instead of rows.
        #[arg(long)]
        blocks: bool,
    },
    /// Print the residue polynomial S_{i,j,k}(alpha).
    Residue { i: u32, j: u32, k: u32 },
    /// Run the self-verification suites.
    Selfcheck {
        #[arg(long, default_value_t = 12)]
        range: u32,
        /// Perturb P_i before running (detector test).
        #[arg(long, hide = true)]
        perturb_p: Option<u32>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, found {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let code = match &cli.command {
        Command::Analyze {
            input,
            darboux,
            float,
            timings,
        } => cmd_analyze(&cli, input, darboux, *float, *timings),
        Command::Table { range, blocks } => cmd_table(cli.format, *range, *blocks),
        Command::Residue { i, j, k } => cmd_residue(cli.format, *i, *j, *k),
        Command::Selfcheck { range, perturb_p } => cmd_selfcheck(cli.format, *range, *perturb_p),
    };
    ExitCode::from(code)
}

/// A path that exists is read; otherwise text containing `potential:` is a
/// document and anything else is a bare expression.
fn load_document(input: &str) -> Result<InputDocument, String> {
    let text = if Path::new(input).is_file() {
        std::fs::read_to_string(input).map_err(|e| format!("{input}: {e}"))?
    } else if input.contains("potential:") {
        input.to_string()
    } else {
        return Ok(InputDocument {
            potential: input.to_string(),
            ..InputDocument::default()
        });
    };
    parse_input_document(&text).map_err(|e| format!("input document: {e}"))
}

fn cmd_analyze(cli: &Cli, input: &str, darboux: &[String], float: bool, timings: bool) -> u8 {
    let mut doc = match load_document(input) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    doc.darboux.extend(darboux.iter().cloned());
    let defaults = AnalysisOptions::default();
    let opts = AnalysisOptions {
        tolerance: cli.tolerance.or(doc.tolerance).unwrap_or(defaults.tolerance),
        int_tolerance: cli.int_tolerance.or(doc.int_tolerance).unwrap_or(defaults.int_tolerance),
        force_floating: float,
        timings,
    };
    let reports = analyze(&doc.potential, &doc.darboux, &opts);
    let mut out = String::new();
    for (n, r) in reports.iter().enumerate() {
        match cli.format {
            Format::Structured => {
                out.push_str(&r.to_json());
                out.push('\n');
            }
            Format::Text => {
                if n > 0 {
                    out.push('\n');
                }
                out.push_str(&render_text(r));
            }
        }
    }
    print!("{out}");
    exit_code(&reports) as u8
}

fn cmd_table(format: Format, range: u32, blocks: bool) -> u8 {
    let table = a_table(range);
    match format {
        Format::Text if blocks => print!("{}", table.render_blocks()),
        Format::Text => print!("{}", table.render_rows()),
        Format::Structured => {
            let rows: Vec<[u32; 4]> = table.rows().into_iter().map(|([i, j, k], v)| [i, j, k, u32::from(v)]).collect();
            println!("{}", json!({ "max_index": range, "rows": rows }));
        }
    }
    0
}

fn poly_lines(out: &mut String, prefix: &str, p: &ResiduePoly) {
    for k in 0..4 {
        let _ = writeln!(out, "{prefix}c{k} = {}", p.c(k));
    }
}

fn poly_json(p: &ResiduePoly) -> serde_json::Value {
    json!((0..4).map(|k| p.c(k).to_string()).collect::<Vec<_>>())
}

fn cmd_residue(format: Format, i: u32, j: u32, k: u32) -> u8 {
    let engine = ResidueEngine::new(i.max(j).max(k));
    let residues = match engine.s_poly(i, j, k) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let closed = (i > 0 && j > 0 && k > 0).then(|| {
        let odd = (i + j + k) % 2 == 1;
        let power = if odd { 2 } else { 1 };
        (power, closed_form_alpha_coefficient(i, j, k))
    });
    match format {
        Format::Text => {
            let mut out = format!("S({i},{j},{k})\n");
            match &residues {
                TripleResidues::Positive(p) => poly_lines(&mut out, "", p),
                TripleResidues::OneZero { moment0, moment1 } => {
                    poly_lines(&mut out, "weight s: ", moment0);
                    poly_lines(&mut out, "weight s*t: ", moment1);
                }
                TripleResidues::TwoZero(ps) => {
                    for (m, p) in ps.iter().enumerate() {
                        poly_lines(&mut out, &format!("weight t^{m}: "), p);
                    }
                }
                TripleResidues::AllZero(ps) => {
                    for (m, p) in ps.iter().enumerate() {
                        poly_lines(&mut out, &format!("weight t^{m}/s: "), p);
                    }
                }
            }
            if let (Some((power, cf)), TripleResidues::Positive(p)) = (&closed, &residues) {
                match cf {
                    Ok(v) => {
                        let verdict = if v == p.c(*power) { "matches" } else { "MISMATCH" };
                        let _ = writeln!(out, "closed form c{power} = {v} ({verdict})");
                    }
                    Err(e) => {
                        let _ = writeln!(out, "closed form c{power}: {e}");
                    }
                }
            }
            print!("{out}");
        }
        Format::Structured => {
            let body = match &residues {
                TripleResidues::Positive(p) => json!({ "coefficients": poly_json(p) }),
                TripleResidues::OneZero { moment0, moment1 } => {
                    json!({ "weights": { "s": poly_json(moment0), "s*t": poly_json(moment1) } })
                }
                TripleResidues::TwoZero(ps) => json!({ "moments": ps.iter().map(poly_json).collect::<Vec<_>>() }),
                TripleResidues::AllZero(ps) => json!({ "moments": ps.iter().map(poly_json).collect::<Vec<_>>() }),
            };
            let closed = closed.map(|(power, cf)| match cf {
                Ok(v) => json!({ "power": power, "value": v.to_string() }),
                Err(e) => json!({ "power": power, "error": e.to_string() }),
            });
            println!("{}", json!({ "triple": [i, j, k], "residues": body, "closed_form": closed }));
        }
    }
    0
}

fn cmd_selfcheck(format: Format, range: u32, perturb_p: Option<u32>) -> u8 {
    let config = SelfcheckConfig {
        range,
        perturb_p,
        ..SelfcheckConfig::default()
    };
    let report = run_selfcheck(&config);
    match format {
        Format::Structured => println!("{}", serde_json::to_string(&report).expect("plain data")),
        Format::Text => {
            for s in &report.suites {
                let ms = s.elapsed_ms.map(|m| format!(", {m} ms")).unwrap_or_default();
                println!(
                    "{} {} ({} checks{ms})",
                    if s.passed { "PASS" } else { "FAIL" },
                    s.name,
                    s.checked
                );
                for f in &s.failures {
                    println!("  {f}");
                }
            }
        }
    }
    if report.passed() {
        0
    } else {
        2
    }
}
