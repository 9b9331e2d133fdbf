use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flagdegen_core::degenverify::suites::{reports_json, run_suite, tally, SuiteConfig};
use flagdegen_core::pipedream::{perm_of_subset, r_table};
use flagdegen_core::polytope_b::{lattice_points_b, polytope_b_json};
use flagdegen_core::polytope_c::{lattice_points_c, polytope_json};
use flagdegen_core::{LieType, OSet, PosetElement, PosetP, WeightB, WeightC};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "flagdegen",
    version,
    about = "Poset polytopes, pipe dreams and degeneration checks for types B and C"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum TypeArg {
    C,
    B,
}

#[derive(Copy, Clone, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Signed permutation of a subset, or the r-table of a marking.
    Pipedream {
        #[arg(long)]
        n: usize,
        /// Subset as "(i,j),(i,j),…".
        #[arg(long = "M", conflicts_with = "o")]
        m: Option<String>,
        /// Marking (type C) whose r-table is printed.
        #[arg(long = "O")]
        o: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Lattice points of a marked poset polytope.
    Polytope {
        #[arg(long = "type", value_enum, ignore_case = true)]
        ty: TypeArg,
        #[arg(long)]
        n: usize,
        /// Non-forced part of the marking, or GT, FFLV, all.
        #[arg(long = "O", default_value = "GT")]
        o: String,
        /// Coefficients "a1,…,an".
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        output: Output,
    },
    /// Runs a verification suite.
    Verify {
        #[arg(long = "type", value_enum, ignore_case = true)]
        ty: TypeArg,
        #[arg(long)]
        n: usize,
        #[arg(long = "O", default_value = "all")]
        o: String,
        /// Weights "a1,…,an" separated by ';'; default depends on the suite.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Force ideal certificates on or off.
        #[arg(long)]
        certify: Option<bool>,
        #[command(flatten)]
        output: Output,
    },
}

struct UsageError(String);

fn parse_pairs(s: &str) -> Result<Vec<PosetElement>, UsageError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Ok(Vec::new());
    }
    let inner = compact
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| UsageError(format!("expected pairs like (1,2),(1,-2): {s}")))?;
    inner
        .split("),(")
        .map(|pair| {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| UsageError(format!("bad pair {pair}")))?;
            let i = a
                .parse()
                .map_err(|_| UsageError(format!("bad integer {a}")))?;
            let j = b
                .parse()
                .map_err(|_| UsageError(format!("bad integer {b}")))?;
            Ok(PosetElement::new(i, j))
        })
        .collect()
}

fn parse_markings(p: &PosetP, s: &str, type_b: bool) -> Result<Vec<OSet>, UsageError> {
    match s.to_ascii_lowercase().as_str() {
        "gt" => Ok(vec![OSet::gt(p, type_b)]),
        "fflv" => Ok(vec![OSet::fflv(p, type_b)]),
        "all" => Ok(OSet::all(p, type_b)),
        _ => {
            let elems = parse_pairs(s)?;
            Ok(vec![
                OSet::new(p, &elems, type_b).map_err(|e| UsageError(e.to_string()))?
            ])
        }
    }
}

fn parse_weight(s: &str, n: usize) -> Result<Vec<u32>, UsageError> {
    let a: Vec<u32> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| UsageError(format!("bad coefficient {t}")))
        })
        .collect::<Result<_, _>>()?;
    if a.len() != n {
        return Err(UsageError(format!(
            "expected {n} coefficients, got {}",
            a.len()
        )));
    }
    Ok(a)
}

fn build_poset(n: usize) -> Result<PosetP, UsageError> {
    PosetP::build(n).map_err(|e| UsageError(e.to_string()))
}

fn emit(output: &Output, value: &Value, text: &str) -> std::io::Result<()> {
    let body = match output.format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        Format::Text => text.to_string(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn tuple_text(xs: impl IntoIterator<Item = String>) -> String {
    format!("({})", xs.into_iter().collect::<Vec<_>>().join(","))
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    let io = |e: std::io::Error| UsageError(e.to_string());
    match cli.command {
        Command::Pipedream { n, m, o, output } => {
            let p = build_poset(n)?;
            match (m, o) {
                (Some(m), _) => {
                    let mask = p
                        .mask_of(&parse_pairs(&m)?)
                        .map_err(|e| UsageError(e.to_string()))?;
                    let w = perm_of_subset(&p, mask);
                    let text = tuple_text(w.image_list().iter().map(i32::to_string)) + "\n";
                    emit(
                        &output,
                        &json!({"n": n, "M": p.elements_of(mask), "w": w}),
                        &text,
                    )
                    .map_err(io)?;
                }
                (None, Some(o)) => {
                    let markings = parse_markings(&p, &o, false)?;
                    let mut values = Vec::new();
                    let mut text = String::new();
                    for o in &markings {
                        let table = r_table(&p, o);
                        for (e, r) in &table.entries {
                            text += &format!("r{e} = {r}\n");
                        }
                        values.push(json!({"O": o.to_json(&p), "r": table}));
                    }
                    emit(&output, &json!(values), &text).map_err(io)?;
                }
                (None, None) => return Err(UsageError("one of --M or --O is required".into())),
            }
            Ok(true)
        }
        Command::Polytope {
            ty,
            n,
            o,
            lambda,
            output,
        } => {
            let p = build_poset(n)?;
            let a = parse_weight(&lambda, n)?;
            let markings = parse_markings(&p, &o, matches!(ty, TypeArg::B))?;
            let mut values = Vec::new();
            let mut text = String::new();
            for o in &markings {
                let (value, count) = match ty {
                    TypeArg::C => {
                        let w = WeightC::new(a.clone());
                        let pts =
                            lattice_points_c(&p, o, &w).map_err(|e| UsageError(e.to_string()))?;
                        (polytope_json(&p, o, &w, &pts), pts.len())
                    }
                    TypeArg::B => {
                        let w = WeightB::new(a.clone());
                        let pts =
                            lattice_points_b(&p, o, &w).map_err(|e| UsageError(e.to_string()))?;
                        (
                            polytope_b_json(&p, o, &w, &pts)
                                .map_err(|e| UsageError(e.to_string()))?,
                            pts.len(),
                        )
                    }
                };
                text += &format!("O = {}: {count} lattice points\n", o.to_json(&p));
                if let Some(pts) = value["lattice_points"].as_array() {
                    for pt in pts {
                        let coords = pt
                            .as_array()
                            .into_iter()
                            .flatten()
                            .map(|c| c.to_string().trim_matches('"').to_string());
                        text += &format!("  {}\n", tuple_text(coords));
                    }
                }
                values.push(value);
            }
            let value = if values.len() == 1 {
                values.pop().unwrap()
            } else {
                json!(values)
            };
            emit(&output, &value, &text).map_err(io)?;
            Ok(true)
        }
        Command::Verify {
            ty,
            n,
            o,
            lambda,
            suite,
            certify,
            output,
        } => {
            let p = build_poset(n)?;
            let type_b = matches!(ty, TypeArg::B);
            let markings = parse_markings(&p, &o, type_b)?;
            let lambdas = lambda
                .map(|s| {
                    s.split(';')
                        .map(|w| parse_weight(w, n))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?;
            let cfg = SuiteConfig {
                ty: if type_b { LieType::B } else { LieType::C },
                n,
                markings,
                lambdas,
                certify,
            };
            let reports = run_suite(&cfg, &suite).map_err(UsageError)?;
            let (passed, failed) = tally(&reports);
            let mut text = String::new();
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                text += &format!("{status} {} {} {}ms", r.suite, r.case, r.timing_ms);
                if !r.passed() {
                    text += &format!(" {}", r.witness);
                }
                text.push('\n');
            }
            text += &format!("{passed} passed, {failed} failed\n");
            emit(&output, &reports_json(&reports), &text).map_err(io)?;
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
