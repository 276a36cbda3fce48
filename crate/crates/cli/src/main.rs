//! `graftree`: generate, validate, analyze, project and export trees of spheres.
//!
//! Exit status: 0 success, 1 semantic violation, 2 construction failure,
//! 3 I/O or parse failure.

mod dot;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graftree_core::dynamics::analyze;
use graftree_core::format::{detect_kind, to_canonical_json, DocumentKind};
use graftree_core::grafting::{default_seed, generate_from, load_seed, validate_state, GraftState};
use graftree_core::spheres::{
    check_translation, project_cover, validate_cover, validate_system, DynamicalTreeMap,
};
use graftree_core::{
    CombinatorialTree, DynamicalTreeSystem, Error, MarkedTreeOfSpheres, Report, TreeCover,
    ViolationKind,
};

#[derive(Parser)]
#[command(
    name = "graftree",
    version,
    about = "Trees of spheres, their covers and the self-grafting construction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply N grafting steps to the seed and write the resulting state.
    Generate {
        #[arg(short = 'n', value_name = "COUNT")]
        n: usize,
        #[arg(short = 'o', value_name = "PATH")]
        out: PathBuf,
        /// Start from this seed file instead of the shipped one.
        #[arg(long, value_name = "PATH")]
        seed: Option<PathBuf>,
    },
    /// Check every invariant of a tree, marked tree, cover, system or state file.
    Validate { path: PathBuf },
    /// Report cycles, return degrees and certificates of a system or state.
    Analyze {
        path: PathBuf,
        /// Also write the analysis as canonical JSON.
        #[arg(short = 'o', value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Project a cover onto a subset of its target leaves.
    Project {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        leaves: Vec<String>,
        #[arg(short = 'o', value_name = "PATH")]
        out: PathBuf,
    },
    /// Render a file as a graph.
    Export {
        path: PathBuf,
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(short = 'o', value_name = "PATH")]
        out: PathBuf,
    },
}

/// Why a command failed, with its exit status.
enum Failure {
    Semantic(String),
    Construction(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Construction(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Semantic(m) | Failure::Construction(m) | Failure::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Construction(_) => Failure::Construction(e.to_string()),
            Error::Json(_) | Error::Parse(_) => Failure::Input(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(doc: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(doc).map_err(|e| Failure::Input(format!("ill-formed document: {e}")))
}

/// Parsed input document of any kind.
enum Document {
    Tree(CombinatorialTree),
    MarkedTree(MarkedTreeOfSpheres),
    Cover(TreeCover),
    System(DynamicalTreeSystem),
    State(Box<GraftState>),
}

fn load(path: &Path) -> std::result::Result<Document, Failure> {
    let doc = read(path)?;
    let kind = detect_kind(&doc).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(match kind {
        DocumentKind::Tree => Document::Tree(parse(&doc)?),
        DocumentKind::MarkedTree => Document::MarkedTree(parse(&doc)?),
        DocumentKind::Cover => Document::Cover(parse(&doc)?),
        DocumentKind::System => Document::System(parse(&doc)?),
        DocumentKind::State => Document::State(Box::new(parse(&doc)?)),
    })
}

fn system_of(doc: &Document) -> std::result::Result<&DynamicalTreeSystem, Failure> {
    match doc {
        Document::System(s) => Ok(s),
        Document::State(s) => Ok(&s.system),
        _ => Err(Failure::Semantic(
            "expected a system or state document".into(),
        )),
    }
}

fn stability_report(tree: &CombinatorialTree) -> Report {
    let mut r = Report::new();
    for v in tree.internal() {
        if tree.degree(v).unwrap_or(0) < 3 {
            r.push(
                ViolationKind::Stability,
                v,
                "internal vertex has fewer than 3 neighbors",
            );
        }
    }
    r
}

fn cmd_generate(n: usize, out: &Path, seed: Option<&Path>) -> CmdResult {
    let seed = match seed {
        Some(p) => load_seed(&read(p)?)?,
        None => default_seed(),
    };
    let state = generate_from(seed, n)?;
    write(out, &state.to_json())?;
    println!(
        "generation {}: {} dynamical vertices, {} source vertices, {} certified cycles -> {}",
        state.generation(),
        state.system.x_tree().len(),
        state.system.y_tree().len(),
        state.roles.certified_cycles,
        out.display()
    );
    Ok(())
}

fn cmd_validate(path: &Path) -> CmdResult {
    let doc = load(path)?;
    let (kind, report) = match &doc {
        Document::Tree(t) => ("tree", stability_report(t)),
        Document::MarkedTree(m) => ("marked tree", stability_report(m.tree())),
        Document::Cover(c) => ("cover", validate_cover(c)),
        Document::System(s) => {
            let mut r = validate_system(s);
            if r.is_empty() {
                r.extend(check_translation(s, &DynamicalTreeMap::restrict(s)));
            }
            ("system", r)
        }
        Document::State(s) => ("state", validate_state(s)),
    };
    if report.is_empty() {
        println!("{}: valid {kind}", path.display());
        Ok(())
    } else {
        print!("{report}");
        Err(Failure::Semantic(format!(
            "{}: {} violation(s)",
            path.display(),
            report.len()
        )))
    }
}

fn cmd_analyze(path: &Path, out: Option<&Path>) -> CmdResult {
    let doc = load(path)?;
    let sys = system_of(&doc)?;
    let a = analyze(sys)?;
    println!("global degree: {}", a.global_degree);
    println!(
        "cycles: {} ({} critical, {} certified non-monomial)",
        a.counts.cycles, a.counts.critical, a.counts.certified
    );
    for c in &a.cycles {
        let cert = a.certificates.iter().find(|x| x.cycle == c.vertices);
        let tag = match (c.critical, cert) {
            (_, Some(x)) => format!(
                "certified: {}",
                serde_json::to_string(&x.witness).expect("serializable")
            ),
            (true, None) => "critical, no certificate".to_owned(),
            (false, None) => "not critical".to_owned(),
        };
        println!(
            "  period {:>3}  return degree {:>3}  {}  [{}]",
            c.period,
            c.return_degree,
            c.vertices.first().map_or("", String::as_str),
            tag
        );
    }
    if let Some(o) = out {
        write(o, &to_canonical_json(&a))?;
    }
    Ok(())
}

fn cmd_project(path: &Path, leaves: &[String], out: &Path) -> CmdResult {
    let doc = load(path)?;
    let cover = match &doc {
        Document::Cover(c) => c,
        Document::System(s) => &s.cover,
        Document::State(s) => &s.system.cover,
        _ => {
            return Err(Failure::Semantic(
                "expected a cover, system or state document".into(),
            ))
        }
    };
    let keep: BTreeSet<String> = leaves
        .iter()
        .map(|l| l.trim().to_owned())
        .filter(|l| !l.is_empty())
        .collect();
    let projected = project_cover(cover, &keep)?;
    write(out, &to_canonical_json(&projected))?;
    println!(
        "projected onto {} leaves: source {} vertices, target {} vertices -> {}",
        keep.len(),
        projected.source.tree().len(),
        projected.target.tree().len(),
        out.display()
    );
    Ok(())
}

fn cmd_export(path: &Path, format: &str, out: &Path) -> CmdResult {
    if format != "dot" {
        return Err(Failure::Semantic(format!(
            "unknown export format {format:?}; supported: dot"
        )));
    }
    let doc = load(path)?;
    let text = match &doc {
        Document::Tree(t) => dot::tree_to_dot(t),
        Document::MarkedTree(m) => dot::tree_to_dot(m.tree()),
        Document::Cover(c) => dot::cover_to_dot(c),
        Document::System(s) => dot::system_to_dot(s)?,
        Document::State(s) => dot::system_to_dot(&s.system)?,
    };
    write(out, &text)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate { n, out, seed } => cmd_generate(*n, out, seed.as_deref()),
        Command::Validate { path } => cmd_validate(path),
        Command::Analyze { path, out } => cmd_analyze(path, out.as_deref()),
        Command::Project { path, leaves, out } => cmd_project(path, leaves, out),
        Command::Export { path, format, out } => cmd_export(path, format, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
