use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use heaplab::{
    balanced_convex_chains, boundary_map, classify_component, connected_components, dismantle,
    has_p2, is_acyclic, is_strongly_acyclic, kernel_dim, run_suite, tl_reduce,
    witness_for_component, ConcurrencyStructure, EnumerationSpec, FieldChoice, Heap, Side, Suite,
    VerificationReport,
};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "heaplab", version, about = "Heaps of pieces: normal forms, properties P1/P2, classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Temperley-Lieb normal form and the Cartier-Foata form of a heap.
    Nf {
        structure: PathBuf,
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Decide P1, P2 and acyclicity of a heap.
    Check(CheckArgs),
    /// Classify each connected component of a concurrency graph.
    Classify {
        structure: PathBuf,
        /// Build and verify a P2-but-not-P1 heap for each component without property R.
        #[arg(long)]
        witness: bool,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        /// Print the concurrency graph in Graphviz format instead.
        #[arg(long)]
        dot: bool,
    },
    /// Run verification suites over every heap up to a size bound.
    Verify {
        structure: PathBuf,
        #[arg(long)]
        max_size: usize,
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Write the reports as JSON to this file.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Field characteristic for rank computations (0 or a prime).
        #[arg(long = "char", value_name = "P", default_value_t = 0)]
        characteristic: u64,
        /// Check at most this many heaps of each size.
        #[arg(long, value_name = "N")]
        per_size_cap: Option<u64>,
        /// Stop enumerating after this many seconds.
        #[arg(long, value_name = "SECS")]
        time_budget: Option<u64>,
    },
    /// Print a Graphviz rendering: the Hasse diagram of a heap if a word is
    /// given, the concurrency graph otherwise.
    ExportDot {
        structure: PathBuf,
        word: Option<String>,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("rank").multiple(true).args(["acyclic", "strongly_acyclic", "matrix"])))]
struct CheckArgs {
    structure: PathBuf,
    word: String,
    #[arg(long)]
    p1: bool,
    #[arg(long)]
    p2: bool,
    #[arg(long)]
    acyclic: bool,
    #[arg(long)]
    strongly_acyclic: bool,
    /// List the balanced convex chains of length at most 3.
    #[arg(long)]
    chains: bool,
    /// Dump the boundary map as an integer grid.
    #[arg(long)]
    matrix: bool,
    /// Field characteristic for rank computations (0 or a prime).
    #[arg(long = "char", value_name = "P", requires = "rank")]
    characteristic: Option<u64>,
    #[arg(long)]
    json: bool,
    /// Exit with status 1 if any checked property is false.
    #[arg(long)]
    assert: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Universal,
    Regularity,
    Kernel,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Universal => vec![Suite::Universal],
            SuiteArg::Regularity => vec![Suite::Regularity],
            SuiteArg::Kernel => vec![Suite::Kernel],
            SuiteArg::All => vec![Suite::Universal, Suite::Regularity, Suite::Kernel],
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Structure {
        path: PathBuf,
        source: heaplab::Error,
    },
    #[error("word `{word}`: {source}")]
    Word {
        word: String,
        source: heaplab::Error,
    },
    #[error(transparent)]
    Library(#[from] heaplab::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(heaplab::Error::WitnessVerification(_)) => 1,
            _ => 2,
        }
    }
}

type CliResult = Result<bool, CliError>;

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Nf {
            structure,
            word,
            json,
        } => nf(&structure, &word, json),
        Command::Check(args) => check(&args),
        Command::Classify {
            structure,
            witness,
            json,
            dot,
        } => classify(&structure, witness, json, dot),
        Command::Verify {
            structure,
            max_size,
            suite,
            json,
            characteristic,
            per_size_cap,
            time_budget,
        } => verify(
            &structure,
            max_size,
            suite,
            json.as_deref(),
            characteristic,
            per_size_cap,
            time_budget,
        ),
        Command::ExportDot { structure, word } => export_dot(&structure, word.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_structure(path: &Path) -> Result<Arc<ConcurrencyStructure>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    ConcurrencyStructure::parse(&text)
        .map(Arc::new)
        .map_err(|source| CliError::Structure {
            path: path.to_owned(),
            source,
        })
}

fn load_heap(path: &Path, word: &str) -> Result<Heap, CliError> {
    let s = load_structure(path)?;
    Heap::parse(&s, word).map_err(|source| CliError::Word {
        word: word.to_string(),
        source,
    })
}

fn field(characteristic: u64) -> Result<FieldChoice, CliError> {
    Ok(FieldChoice::with_characteristic(characteristic)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn nf(path: &Path, word: &str, as_json: bool) -> CliResult {
    let e = load_heap(path, word)?;
    let r = tl_reduce(&e);
    if as_json {
        print_json(&json!({
            "cf": e.cf_string(),
            "deltaExponent": r.delta_exponent,
            "basis": r.basis.cf_string(),
            "basisWord": r.basis.word_string(),
        }));
    } else {
        println!("{r}");
        println!("{}", e.cf_string());
    }
    Ok(true)
}

fn check(args: &CheckArgs) -> CliResult {
    let e = load_heap(&args.structure, &args.word)?;
    let s = e.structure().clone();
    let k = field(args.characteristic.unwrap_or(0))?;
    let any = args.p1 || args.p2 || args.acyclic || args.strongly_acyclic;
    let (want_p1, want_p2, want_acyclic) = if any {
        (args.p1, args.p2, args.acyclic)
    } else {
        (true, true, true)
    };

    let mut results: Vec<(&str, &str, bool)> = Vec::new();
    let dismantling = if want_p1 || args.json { dismantle(&e) } else { None };
    if want_p2 {
        results.push(("P2", "p2", has_p2(&e)));
    }
    if want_p1 {
        results.push(("P1", "p1", dismantling.is_some()));
    }
    if want_acyclic {
        results.push(("acyclic", "acyclic", is_acyclic(&e, k)));
    }
    if args.strongly_acyclic {
        results.push(("strongly-acyclic", "stronglyAcyclic", is_strongly_acyclic(&e, k)));
    }
    let chains = if args.chains || args.json {
        balanced_convex_chains(&e, 3)
    } else {
        Vec::new()
    };
    let bmap = args.matrix.then(|| boundary_map(&e));

    if args.json {
        let mut out = serde_json::Map::new();
        out.insert("word".into(), json!(e.word_string()));
        out.insert("cf".into(), json!(e.cf_string()));
        out.insert("field".into(), json!(k.to_string()));
        for &(_, key, value) in &results {
            out.insert(key.into(), json!(value));
        }
        out.insert("p1".into(), json!(dismantling.is_some()));
        out.insert("p2".into(), json!(has_p2(&e)));
        out.insert(
            "chains".into(),
            chains
                .iter()
                .map(|c| {
                    json!({
                        "vertices": c.vertices(),
                        "labels": s.format_word(&c.vertices().iter().map(|&v| e.label(v)).collect::<Vec<_>>()),
                    })
                })
                .collect(),
        );
        out.insert(
            "dismantling".into(),
            dismantling
                .iter()
                .flatten()
                .map(|r| {
                    json!({
                        "vertex": r.vertex,
                        "piece": s.name(e.label(r.vertex)),
                        "side": r.side,
                    })
                })
                .collect(),
        );
        if let Some(b) = &bmap {
            out.insert("kernelDim".into(), json!(kernel_dim(b, k)));
            out.insert("matrix".into(), json!(b.rows()));
        }
        print_json(&Value::Object(out));
    } else {
        let line: Vec<String> = results
            .iter()
            .map(|(name, _, value)| format!("{name}={value}"))
            .collect();
        if !line.is_empty() {
            println!("{}", line.join(" "));
        }
        if args.chains {
            for c in &chains {
                let labels: Vec<_> = c.vertices().iter().map(|&v| e.label(v)).collect();
                let vs: Vec<String> = c.vertices().iter().map(usize::to_string).collect();
                println!("chain {}: {}", vs.join(" "), s.format_word(&labels));
            }
        }
        if want_p1 {
            if let Some(steps) = &dismantling {
                let parts: Vec<String> = steps
                    .iter()
                    .map(|r| {
                        let sign = match r.side {
                            Side::Minus => '-',
                            Side::Plus => '+',
                        };
                        format!("{sign}{}:{}", r.vertex, s.name(e.label(r.vertex)))
                    })
                    .collect();
                println!("dismantling: {}", parts.join(" "));
            }
        }
        if let Some(b) = &bmap {
            print!("{}", b.to_text());
            println!("kernel dimension over {k}: {}", kernel_dim(b, k));
        }
    }
    Ok(!args.assert || results.iter().all(|&(_, _, v)| v))
}

fn classify(path: &Path, witness: bool, as_json: bool, dot: bool) -> CliResult {
    let s = load_structure(path)?;
    if dot {
        print!("{}", s.to_dot());
        return Ok(true);
    }
    let components = connected_components(&s);
    if components.is_empty() {
        return Err(heaplab::Error::EmptyStructure.into());
    }
    let several = components.len() > 1;
    let mut entries = Vec::new();
    for c in &components {
        let tag = classify_component(&c.structure)?;
        let names: Vec<&str> = c.pieces.iter().map(|&p| s.name(p)).collect();
        let cert = if witness && !tag.has_r() {
            Some(witness_for_component(&c.structure, &s)?)
        } else {
            None
        };
        if as_json {
            let mut entry = json!({
                "tag": tag.name(),
                "params": tag.params(),
                "hasR": tag.has_r(),
                "pieces": names,
            });
            if let heaplab::FamilyTag::NonR {
                reason,
                substructure,
            } = &tag
            {
                entry["reason"] = json!(reason);
                entry["substructure"] = json!(substructure);
            }
            if let Some(cert) = &cert {
                entry["witnessWord"] = json!(cert.heap.word_string());
            }
            entries.push(entry);
        } else {
            let mut line = format!("{tag}: property R = {}", tag.has_r());
            if several {
                line.push_str(&format!(" [pieces {}]", names.join(" ")));
            }
            println!("{line}");
            if let heaplab::FamilyTag::NonR { substructure, .. } = &tag {
                println!("  forbidden full subgraph on: {}", substructure.join(" "));
            }
            if let Some(cert) = &cert {
                println!(
                    "  witness: {}  (P2={} P1={})",
                    cert.heap.cf_string(),
                    cert.has_p2,
                    cert.has_p1
                );
            }
        }
    }
    if as_json {
        print_json(&Value::Array(entries));
    }
    Ok(true)
}

fn verify(
    path: &Path,
    max_size: usize,
    suite: SuiteArg,
    json_out: Option<&Path>,
    characteristic: u64,
    per_size_cap: Option<u64>,
    time_budget: Option<u64>,
) -> CliResult {
    let s = load_structure(path)?;
    let mut spec = EnumerationSpec::new(s, max_size).with_field(field(characteristic)?);
    if let Some(cap) = per_size_cap {
        spec = spec.with_per_size_cap(cap);
    }
    if let Some(secs) = time_budget {
        spec = spec.with_time_budget(Duration::from_secs(secs));
    }
    let mut reports: Vec<VerificationReport> = Vec::new();
    for which in suite.suites() {
        let report = run_suite(&spec, which)?;
        print_report(&report);
        reports.push(report);
    }
    if let Some(out) = json_out {
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
        fs::write(out, text).map_err(|source| CliError::Write {
            path: out.to_owned(),
            source,
        })?;
    }
    Ok(reports.iter().all(VerificationReport::passed))
}

fn print_report(r: &VerificationReport) {
    let suite = serde_json::to_value(r.suite).expect("suite serializes");
    let status = if r.passed() { "PASS" } else { "FAIL" };
    let truncated = if r.truncated { " (truncated)" } else { "" };
    println!(
        "{} {status}: {} heaps with at most {} vertices over {}, {} violations{truncated}",
        suite.as_str().unwrap_or("suite"),
        r.heaps_checked(),
        r.max_vertices,
        r.field,
        r.violations.len()
    );
    for (name, count) in &r.counters {
        println!("  {name}: {count}");
    }
    if let Some(v) = &r.verdict {
        println!(
            "  classified {}: {}",
            if v.classified_r { "R" } else { "not R" },
            v.families.join(", ")
        );
        if let Some(c) = &v.counterexample {
            println!("  smallest P2 heap without P1: {c}");
        }
        if let Some(w) = &v.witness {
            println!("  witness: {w}");
        }
    }
    for v in &r.violations {
        println!("  violation {}: {}", v.kind, v.word);
    }
}

fn export_dot(path: &Path, word: Option<&str>) -> CliResult {
    match word {
        Some(w) => print!("{}", load_heap(path, w)?.to_dot()),
        None => print!("{}", load_structure(path)?.to_dot()),
    }
    Ok(true)
}
