use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semifree::amalgam::amalgamate;
use semifree::catalogue::{
    catalogue_checksum, catalogue_text, classify_entry, find_entry, load_catalogue, verify_table,
    CatalogueEntry, ClassifyOptions,
};
use semifree::color::{parse_order, ColorLanguage};
use semifree::format::{parse_instance, parse_structure, ConstraintFile};
use semifree::generic::{
    build_generic_with, write_approximation, BuildOptions, MAX_SATURATION_LEVEL,
};
use semifree::independence::{
    check_axiom, check_deletion, Axiom, Caps, DeletionVariant, MAX_SIZE_CEILING,
};
use semifree::report;
use semifree::search::{check_closure, find_solution_sets};
use semifree::structure::validate_structure;
use semifree::triangle::TriangleSet;
use semifree::Error;

const MAX_BOUND: usize = 4;
const MAX_VERTEX_LIMIT: usize = 20_000;

#[derive(Parser)]
#[command(
    name = "semifree",
    version,
    about = "Prioritised semi-free amalgamation checks for forbidden-triangle classes"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the forbidden triangles a structure file contains.
    Validate {
        structure: PathBuf,
        constraints: PathBuf,
    },
    /// Complete an amalgamation instance with the prioritised rule.
    Amalgamate {
        instance: PathBuf,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Decide whether the order keeps the class closed under amalgamation.
    CheckClosure {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Forced colors and minimal solution sets with their admissible orders.
    FindSolutions {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Sweep the stationary-independence axioms.
    CheckSir {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        /// Restrict to these axioms (repeatable).
        #[arg(long)]
        axiom: Vec<String>,
        #[arg(long, default_value_t = 3)]
        base_cap: usize,
        #[arg(long, default_value_t = 2)]
        side_cap: usize,
    },
    /// Sweep a deletion property.
    CheckDeletion {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        /// one_sided or two_sided.
        #[arg(long, default_value = "one_sided")]
        variant: String,
    },
    /// Build a finite structure with the extension property up to level t.
    BuildGeneric {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = semifree::generic::DEFAULT_VERTEX_LIMIT)]
        vertex_limit: usize,
    },
    /// Classify one catalogue entry.
    Classify {
        #[arg(long)]
        entry: String,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 5)]
        deletion_size: usize,
    },
    /// Classify every catalogue entry and compare with the expected results.
    VerifyTable {
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 5)]
        deletion_size: usize,
        /// Override an entry's order, e.g. `#11=G>R` (repeatable).
        #[arg(long)]
        order: Vec<String>,
        /// Only these entries (repeatable).
        #[arg(long)]
        entry: Vec<String>,
    },
    /// Catalogue data.
    Catalogue {
        #[command(subcommand)]
        action: CatalogueAction,
    },
}

#[derive(Subcommand)]
enum CatalogueAction {
    /// Dump the embedded catalogue file.
    Export,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Catalogue entry id, e.g. "#11" or "3col#1".
    #[arg(long)]
    entry: Option<String>,
    /// Constraint file.
    #[arg(long)]
    constraints: Option<PathBuf>,
}

#[derive(Args)]
struct OrderArg {
    /// Priority order such as "G>R>Y"; defaults to the input's own order.
    #[arg(long)]
    order: Option<String>,
}

/// Outcome of a command: report plus whether every check passed.
struct Outcome {
    json: Value,
    text: String,
    ok: bool,
}

enum Failure {
    Input(String),
    /// A check failed in a way that carries a report.
    Check(Outcome),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let name = command_name(&cli.command);
    let (outcome, code) = match run(cli.command) {
        Ok(o) => {
            let code = if o.ok { 0 } else { 1 };
            (o, code)
        }
        Err(Failure::Check(o)) => (o, 1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let body = match cli.format {
        Format::Json => report::render(&report::envelope(name, outcome.json)),
        Format::Text => outcome.text,
    };
    let written = match &cli.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(format!("cannot write output: {e}"))
            }
            _ => Ok(()),
        },
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("AMALGAM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("AMALGAM_THREADS must be a non-negative integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Amalgamate { .. } => "amalgamate",
        Command::CheckClosure { .. } => "check-closure",
        Command::FindSolutions { .. } => "find-solutions",
        Command::CheckSir { .. } => "check-sir",
        Command::CheckDeletion { .. } => "check-deletion",
        Command::BuildGeneric { .. } => "build-generic",
        Command::Classify { .. } => "classify",
        Command::VerifyTable { .. } => "verify-table",
        Command::Catalogue { .. } => "catalogue export",
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn in_file(path: &std::path::Path, e: Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn ceiling(name: &str, value: usize, min: usize, max: usize) -> Result<(), Failure> {
    if value < min || value > max {
        return Err(Failure::Input(format!(
            "--{name} must be between {min} and {max}, got {value}"
        )));
    }
    Ok(())
}

/// Triangle set and optional language of the input, with `--order` applied.
fn load(
    input: &Input,
    order: Option<&str>,
) -> Result<(String, TriangleSet, Option<ColorLanguage>), Failure> {
    let (label, s, lang) = match (&input.entry, &input.constraints) {
        (Some(id), None) => {
            let entries = load_catalogue();
            let e = find_entry(&entries, id)
                .ok_or_else(|| Failure::Input(format!("unknown catalogue entry {id:?}")))?;
            (e.id.clone(), e.triangles.clone(), Some(e.language.clone()))
        }
        (None, Some(path)) => {
            let f = ConstraintFile::parse(&read(path)?).map_err(|e| in_file(path, e))?;
            (path.display().to_string(), f.triangles, f.language)
        }
        _ => {
            return Err(Failure::Input(
                "give exactly one of --entry and --constraints".into(),
            ))
        }
    };
    let lang = match order {
        Some(o) => {
            let p = s.palette().clone();
            Some(ColorLanguage::new(p.clone(), parse_order(&p, o)?)?)
        }
        None => lang,
    };
    Ok((label, s, lang))
}

fn need_lang(lang: Option<ColorLanguage>) -> Result<ColorLanguage, Failure> {
    lang.ok_or_else(|| {
        Failure::Input(
            "no priority order: pass --order or use an input with `solutions:`/`order:`".into(),
        )
    })
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Validate {
            structure,
            constraints,
        } => {
            let f = ConstraintFile::parse(&read(&constraints)?)
                .map_err(|e| in_file(&constraints, e))?;
            let m = parse_structure(&read(&structure)?, f.palette())
                .map_err(|e| in_file(&structure, e))?;
            let v = validate_structure(&m, &f.triangles)?;
            let p = f.palette();
            let mut text = format!("{} vertices, {} forbidden triangles\n", m.len(), v.len());
            for x in &v {
                let _ = writeln!(
                    text,
                    "  {} {} {}: {}",
                    x.vertices[0],
                    x.vertices[1],
                    x.vertices[2],
                    x.triangle.word(p)
                );
            }
            Ok(Outcome {
                json: json!({ "vertices": m.len(), "valid": v.is_empty(), "violations": report::violations(&v, p) }),
                text,
                ok: v.is_empty(),
            })
        }
        Command::Amalgamate {
            instance,
            input,
            order,
        } => {
            let (_, s, lang) = load(&input, order.order.as_deref())?;
            let lang = need_lang(lang)?;
            let inst = parse_instance(&read(&instance)?, s.palette())
                .map_err(|e| in_file(&instance, e))?;
            let r = amalgamate(&inst, &lang, &s)?;
            let p = s.palette();
            let mut text = format!("order {}\n", lang.order_compact());
            for e in &r.cross_colors {
                let _ = writeln!(text, "  {} {} {}", e.left, e.right, p.symbol(e.color));
            }
            for &(a, c) in &r.failed_edges {
                let _ = writeln!(text, "  {a} {c}: no admissible solution color");
            }
            for x in &r.violations {
                let _ = writeln!(
                    text,
                    "  forbidden {} at {:?}",
                    x.triangle.word(p),
                    x.vertices
                );
            }
            let _ = writeln!(
                text,
                "{}",
                if r.is_clean() {
                    "clean"
                } else {
                    "not in the class"
                }
            );
            Ok(Outcome {
                json: json!({ "language": report::language(&lang), "completion": report::completion(&r, p) }),
                text,
                ok: r.is_clean(),
            })
        }
        Command::CheckClosure {
            input,
            order,
            bound,
        } => {
            ceiling("bound", bound, 1, MAX_BOUND)?;
            let (label, s, lang) = load(&input, order.order.as_deref())?;
            let lang = need_lang(lang)?;
            let v = check_closure(&s, &lang, bound)?;
            let p = s.palette();
            let mut text = format!(
                "{label} order {}: {}\n",
                lang.order_compact(),
                serde_json::to_value(v.status)
                    .expect("status")
                    .as_str()
                    .unwrap_or_default()
            );
            if let Some(w) = &v.witness {
                text.push_str(&counterexample_text(w, p));
            }
            Ok(Outcome {
                json: json!({ "input": label, "language": report::language(&lang), "verdict": report::closure(&v, p) }),
                text,
                ok: v.status.passes(),
            })
        }
        Command::FindSolutions { input, bound } => {
            ceiling("bound", bound, 1, MAX_BOUND)?;
            let (label, s, _) = load(&input, None)?;
            let r = find_solution_sets(&s, bound)?;
            let p = s.palette();
            let mut text = format!("{label}: forced {{{}}}\n", p.set_word(r.forced_set()));
            for m in &r.minimal {
                let orders: Vec<String> = m
                    .orders
                    .iter()
                    .map(|o| {
                        o.iter()
                            .map(|&c| p.symbol(c).to_string())
                            .collect::<Vec<_>>()
                            .join(">")
                    })
                    .collect();
                let _ = writeln!(
                    text,
                    "  {{{}}}: {}",
                    p.set_word(m.colors),
                    orders.join(", ")
                );
            }
            Ok(Outcome {
                json: json!({ "input": label, "solution_sets": report::solution_sets(&r, p) }),
                text,
                ok: !r.minimal.is_empty(),
            })
        }
        Command::CheckSir {
            input,
            order,
            max_size,
            axiom,
            base_cap,
            side_cap,
        } => {
            ceiling("max-size", max_size, 1, MAX_SIZE_CEILING)?;
            let (label, s, lang) = load(&input, order.order.as_deref())?;
            let lang = need_lang(lang)?;
            let axioms: Vec<Axiom> = if axiom.is_empty() {
                Axiom::ALL.to_vec()
            } else {
                axiom
                    .iter()
                    .map(|a| Axiom::parse(a))
                    .collect::<Result<_, _>>()?
            };
            let caps = Caps {
                base: base_cap,
                side: side_cap,
            };
            let p = s.palette();
            let mut text = format!(
                "{label} order {} up to {max_size} vertices\n",
                lang.order_compact()
            );
            let mut reports = Vec::new();
            let mut ok = true;
            for a in axioms {
                let r = check_axiom(a, &s, &lang, max_size, caps)?;
                ok &= r.holds();
                let _ = writeln!(text, "  {}: {} violations", a.name(), r.violation_count);
                reports.push(report::axiom(&r, p));
            }
            Ok(Outcome {
                json: json!({ "input": label, "language": report::language(&lang), "axioms": reports }),
                text,
                ok,
            })
        }
        Command::CheckDeletion {
            input,
            order,
            max_size,
            variant,
        } => {
            ceiling("max-size", max_size, 1, MAX_SIZE_CEILING)?;
            let variant = DeletionVariant::parse(&variant)?;
            let (label, s, lang) = load(&input, order.order.as_deref())?;
            let lang = need_lang(lang)?;
            let r = check_deletion(&s, &lang, variant, max_size)?;
            let mut text = format!(
                "{label} order {} {} deletion up to {max_size} vertices: {} violations\n",
                lang.order_compact(),
                variant.name(),
                r.violation_count
            );
            for g in &r.groups {
                let _ = writeln!(text, "  |B| = {}: {}", g.base_size, g.count);
            }
            Ok(Outcome {
                json: json!({ "input": label, "language": report::language(&lang), "deletion": report::deletion(&r, s.palette()) }),
                text,
                ok: r.holds(),
            })
        }
        Command::BuildGeneric {
            input,
            order,
            t,
            seed,
            vertex_limit,
        } => {
            ceiling("t", t, 0, MAX_SATURATION_LEVEL)?;
            ceiling("vertex-limit", vertex_limit, 1, MAX_VERTEX_LIMIT)?;
            let (label, s, lang) = load(&input, order.order.as_deref())?;
            let lang = need_lang(lang)?;
            let opts = BuildOptions {
                vertex_limit,
                ..BuildOptions::default()
            };
            match build_generic_with(&s, &lang, t, seed, opts) {
                Ok(g) => Ok(Outcome {
                    json: json!({ "input": label, "language": report::language(&lang), "approximation": report::approximation(&g, &s) }),
                    text: write_approximation(&g, s.palette(), &label),
                    ok: true,
                }),
                Err(Error::Construction(f)) => {
                    let p = s.palette();
                    let mut text = format!("construction failed: {}\n", f.message);
                    text.push_str(&semifree::format::write_instance(&f.instance, p));
                    Err(Failure::Check(Outcome {
                        json: json!({ "input": label, "language": report::language(&lang), "failure": report::construction_failure(&f, p) }),
                        text,
                        ok: false,
                    }))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Classify {
            entry,
            order,
            bound,
            deletion_size,
        } => {
            ceiling("bound", bound, 1, MAX_BOUND)?;
            ceiling("deletion-size", deletion_size, 0, MAX_SIZE_CEILING)?;
            let entries = load_catalogue();
            let e = find_entry(&entries, &entry)
                .ok_or_else(|| Failure::Input(format!("unknown catalogue entry {entry:?}")))?;
            let r = classify_entry(
                e,
                &ClassifyOptions {
                    bound,
                    deletion_size,
                },
                order.order.as_deref(),
            )?;
            Ok(Outcome {
                text: entry_line(&r),
                json: report::entry(&r),
                ok: r.matches,
            })
        }
        Command::VerifyTable {
            bound,
            deletion_size,
            order,
            entry,
        } => {
            ceiling("bound", bound, 1, MAX_BOUND)?;
            ceiling("deletion-size", deletion_size, 0, MAX_SIZE_CEILING)?;
            let mut overrides = BTreeMap::new();
            for o in &order {
                let (id, ord) = o.split_once('=').ok_or_else(|| {
                    Failure::Input(format!("--order expects ID=ORDER, got {o:?}"))
                })?;
                overrides.insert(id.trim().to_string(), ord.trim().to_string());
            }
            let all = load_catalogue();
            let selected: Vec<CatalogueEntry> = if entry.is_empty() {
                all
            } else {
                entry
                    .iter()
                    .map(|id| {
                        find_entry(&all, id).cloned().ok_or_else(|| {
                            Failure::Input(format!("unknown catalogue entry {id:?}"))
                        })
                    })
                    .collect::<Result<_, _>>()?
            };
            let summary = verify_table(
                &selected,
                &ClassifyOptions {
                    bound,
                    deletion_size,
                },
                &overrides,
            )?;
            let mut text = String::new();
            for r in &summary.entries {
                text.push_str(&entry_line(r));
            }
            let _ = writeln!(
                text,
                "{}/{} match ({})",
                summary.passed(),
                summary.entries.len(),
                if summary.pass() { "PASS" } else { "FAIL" }
            );
            Ok(Outcome {
                json: report::table(&summary),
                text,
                ok: summary.pass(),
            })
        }
        Command::Catalogue {
            action: CatalogueAction::Export,
        } => Ok(Outcome {
            json: json!({ "sha256": catalogue_checksum(), "text": catalogue_text() }),
            text: catalogue_text().to_string(),
            ok: true,
        }),
    }
}

fn entry_line(r: &semifree::catalogue::EntryReport) -> String {
    let p = r.language.palette();
    let computed = r.computed.map_or("none", |c| c.name());
    let params = match (r.computed, r.condition2.first()) {
        (Some(semifree::catalogue::Classification::Condition2), Some(x)) => {
            let x = r
                .expected_params
                .filter(|e| r.condition2.contains(e))
                .unwrap_or(*x);
            format!(
                " L*={{{}}} L^={{{}}}",
                p.set_word(x.l_star),
                p.set_word(x.l_hat)
            )
        }
        _ => String::new(),
    };
    let mut line = format!(
        "{:<7} {} {}{} order {}",
        r.id,
        if r.matches { "PASS" } else { "FAIL" },
        computed,
        params,
        r.language.order_compact()
    );
    if !r.mismatch.is_empty() {
        let _ = write!(line, " ({})", r.mismatch.join("; "));
    }
    if let Some(w) = &r.closure.witness {
        line.push('\n');
        line.push_str(&counterexample_text(w, p));
    }
    line.push('\n');
    line
}

fn counterexample_text(
    w: &semifree::search::Counterexample,
    p: &semifree::color::Palette,
) -> String {
    let mut text = String::from("counterexample:\n");
    text.push_str(&semifree::format::write_instance(&w.instance, p));
    for x in &w.completion.violations {
        let _ = writeln!(text, "forbidden {} at {:?}", x.triangle.word(p), x.vertices);
    }
    for &(a, c) in &w.completion.failed_edges {
        let _ = writeln!(text, "no solution color for {a} {c}");
    }
    text
}
