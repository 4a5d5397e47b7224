//! `treedist` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use treedist::align::{align, symbols};
use treedist::classic::tree_distance;
use treedist::contour::{build_contour_tree, compare_terrains, load_terrain};
use treedist::cost::{format_rational, parse_rational};
use treedist::exec::Execution;
use treedist::gap_general::{gap_distance_general, GapOutcome};
use treedist::gap_subtree::gap_distance_subtree;
use treedist::oracle::{Oracle, DEFAULT_MAX_SIZE};
use treedist::suite::{self, SuiteReport};
use treedist::{Cost, CostModel, EditMapping, Error, LabeledTree, Model, Rational, Relabel, RelabelTable};

const MAX_ORACLE_VAR: &str = "TREEDIST_MAX_ORACLE";

#[derive(Parser)]
#[command(name = "treedist", version, about = "Edit distances between ordered labeled trees")]
struct Cli {
    /// Print a single JSON line instead of the human-readable report.
    #[arg(long, global = true)]
    machine: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classic tree edit distance.
    Ted {
        #[command(flatten)]
        trees: TreePair,
        #[command(flatten)]
        costs: TableArg,
        /// Print an optimal mapping.
        #[arg(long)]
        mapping: bool,
        /// Print the complexity counters.
        #[arg(long)]
        counters: bool,
    },
    /// Affine-gap distance with connected gaps, binary trees only.
    TedGapGeneral {
        #[command(flatten)]
        trees: TreePair,
        #[command(flatten)]
        gaps: RequiredGaps,
        #[command(flatten)]
        costs: TableArg,
        #[arg(long)]
        mapping: bool,
        #[arg(long)]
        counters: bool,
    },
    /// Affine-gap distance where every gap is a complete subtree.
    TedGapSubtree {
        #[command(flatten)]
        trees: TreePair,
        #[command(flatten)]
        gaps: RequiredGaps,
        #[command(flatten)]
        costs: TableArg,
        #[arg(long)]
        mapping: bool,
        #[arg(long)]
        counters: bool,
    },
    /// Affine-gap global alignment of two strings, one symbol per character.
    SeqAlign {
        s1: String,
        s2: String,
        #[command(flatten)]
        gaps: OptionalGaps,
        #[command(flatten)]
        costs: TableArg,
    },
    /// Exhaustive minimum over all valid mappings.
    Oracle {
        #[command(flatten)]
        trees: TreePair,
        #[arg(long, value_enum)]
        model: OracleModel,
        #[command(flatten)]
        gaps: OptionalGaps,
        #[command(flatten)]
        costs: TableArg,
        /// Enumerate on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Contour trees of grid terrains given as CSV height fields.
    Contour {
        #[command(subcommand)]
        action: ContourAction,
    },
    /// Run the exhaustive oracle-equivalence suites.
    Verify {
        /// Largest tree size to enumerate.
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Subcommand)]
enum ContourAction {
    /// Build the contour tree of one terrain.
    Build {
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Nodes)]
        emit: Emit,
        /// Height bucket width for labels.
        #[arg(long, default_value = "1", value_parser = rational)]
        quantum: Rational,
    },
    /// Subtree-gap distance between the contour trees of two terrains.
    Compare {
        csv1: PathBuf,
        csv2: PathBuf,
        #[command(flatten)]
        gaps: OptionalGaps,
        #[command(flatten)]
        costs: TableArg,
        #[arg(long, default_value = "1", value_parser = rational)]
        quantum: Rational,
        #[arg(long)]
        mapping: bool,
        #[arg(long)]
        counters: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Nodes,
    Bracket,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleModel {
    Classic,
    General,
    Subtree,
}

impl From<OracleModel> for Model {
    fn from(m: OracleModel) -> Model {
        match m {
            OracleModel::Classic => Model::Classic,
            OracleModel::General => Model::General,
            OracleModel::Subtree => Model::Subtree,
        }
    }
}

/// Two trees in bracket notation, or `@path` to read one from a file.
#[derive(Args)]
struct TreePair {
    tree1: String,
    tree2: String,
}

#[derive(Args)]
struct TableArg {
    /// `unit` or `table:<path>`.
    #[arg(long, default_value = "unit")]
    costs: String,
}

#[derive(Args)]
struct RequiredGaps {
    /// Gap open cost `a`.
    #[arg(long, value_parser = rational)]
    gap_open: Rational,
    /// Gap extend cost `b`.
    #[arg(long, value_parser = rational)]
    gap_extend: Rational,
}

#[derive(Args)]
struct OptionalGaps {
    #[arg(long, default_value = "0", value_parser = rational)]
    gap_open: Rational,
    #[arg(long, default_value = "1", value_parser = rational)]
    gap_extend: Rational,
}

fn rational(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read_tree(arg: &str) -> Result<LabeledTree> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    Ok(LabeledTree::parse_bracket(text.trim())?)
}

fn read_pair(trees: &TreePair) -> Result<(LabeledTree, LabeledTree)> {
    Ok((read_tree(&trees.tree1)?, read_tree(&trees.tree2)?))
}

fn cost_model(table: &TableArg, gaps: Option<(Rational, Rational)>) -> Result<CostModel> {
    let mut model = CostModel::unit();
    match table.costs.as_str() {
        "unit" => {}
        other => {
            let Some(path) = other.strip_prefix("table:") else {
                bail!("InvalidCost: --costs expects unit or table:<path>, got {other:?}");
            };
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            model = model.with_relabel(Relabel::Table(RelabelTable::parse(&text)?));
        }
    }
    if let Some((a, b)) = gaps {
        model = model.with_gaps(a, b)?;
    }
    Ok(model)
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn oracle_cap() -> Result<usize> {
    match std::env::var(MAX_ORACLE_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("InvalidConfig: {MAX_ORACLE_VAR} must be a node count, got {v:?}")),
        Err(_) => Ok(DEFAULT_MAX_SIZE),
    }
}

/// Everything a distance subcommand reports.
struct Report {
    distance: Rational,
    model: &'static str,
    sizes: (usize, usize),
    counters: Vec<(&'static str, u64)>,
    mapping: Option<(EditMapping, LabeledTree, LabeledTree)>,
    show_counters: bool,
    extra: Vec<String>,
}

impl Report {
    fn new(distance: Rational, model: &'static str, t1: &LabeledTree, t2: &LabeledTree) -> Self {
        Report {
            distance,
            model,
            sizes: (t1.len(), t2.len()),
            counters: Vec::new(),
            mapping: None,
            show_counters: false,
            extra: Vec::new(),
        }
    }

    fn gap(outcome: GapOutcome, model: &'static str, t1: LabeledTree, t2: LabeledTree, mapping: bool, counters: bool) -> Self {
        let mut r = Report::new(outcome.distance, model, &t1, &t2);
        let c = outcome.counters;
        r.counters = vec![("cells", c.cells), ("boundary_cells", c.boundary_cells), ("anchor_pairs", c.anchor_pairs)];
        r.show_counters = counters;
        if mapping {
            r.mapping = Some((outcome.mapping, t1, t2));
        }
        r
    }

    fn print(&self, machine: bool) {
        if machine {
            let counters: Map<String, Value> = self.counters.iter().map(|&(k, v)| (k.to_string(), json!(v))).collect();
            let mut obj = json!({
                "distance": format_rational(&self.distance),
                "model": self.model,
                "sizes": [self.sizes.0, self.sizes.1],
                "counters": counters,
            });
            if let Some((m, _, _)) = &self.mapping {
                obj["mapping"] = json!(m.pairs);
            }
            println!("{obj}");
            return;
        }
        println!("distance={}", format_rational(&self.distance));
        if let Some((m, t1, t2)) = &self.mapping {
            println!("mapping:");
            for &(u, v) in &m.pairs {
                println!("  {u} {} -> {v} {}", t1.label(u), t2.label(v));
            }
        }
        if self.show_counters {
            let parts: Vec<String> = self.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("counters: {}", parts.join(" "));
        }
        for line in &self.extra {
            println!("{line}");
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let machine = cli.machine;
    match cli.command {
        Command::Ted { trees, costs, mapping, counters } => {
            let (t1, t2) = read_pair(&trees)?;
            let out = tree_distance(&t1, &t2, &cost_model(&costs, None)?)?;
            let mut r = Report::new(out.distance, "classic", &t1, &t2);
            r.counters = vec![
                ("forest_cells", out.counters.forest_cells),
                ("tree_pairs", out.counters.tree_pairs),
            ];
            r.show_counters = counters;
            if mapping {
                r.mapping = Some((out.mapping, t1, t2));
            }
            r.print(machine);
        }
        Command::TedGapGeneral { trees, gaps, costs, mapping, counters } => {
            let (t1, t2) = read_pair(&trees)?;
            let model = cost_model(&costs, Some((gaps.gap_open, gaps.gap_extend)))?;
            let out = gap_distance_general(&t1, &t2, &model)?;
            Report::gap(out, "general", t1, t2, mapping, counters).print(machine);
        }
        Command::TedGapSubtree { trees, gaps, costs, mapping, counters } => {
            let (t1, t2) = read_pair(&trees)?;
            let model = cost_model(&costs, Some((gaps.gap_open, gaps.gap_extend)))?;
            let out = gap_distance_subtree(&t1, &t2, &model)?;
            Report::gap(out, "subtree", t1, t2, mapping, counters).print(machine);
        }
        Command::SeqAlign { s1, s2, gaps, costs } => {
            let model = cost_model(&costs, Some((gaps.gap_open, gaps.gap_extend)))?;
            let (a, b) = (symbols(&s1), symbols(&s2));
            let alignment = align(&a, &b, &model)?;
            let (row1, row2) = alignment.rows(&a, &b, "");
            if machine {
                let obj = json!({
                    "distance": format_rational(&alignment.distance),
                    "model": "alignment",
                    "sizes": [a.len(), b.len()],
                    "counters": {},
                    "rows": [row1, row2],
                });
                println!("{obj}");
            } else {
                println!("distance={}", format_rational(&alignment.distance));
                println!("{row1}");
                println!("{row2}");
            }
        }
        Command::Oracle { trees, model, gaps, costs, sequential } => {
            let (t1, t2) = read_pair(&trees)?;
            let costs = cost_model(&costs, Some((gaps.gap_open, gaps.gap_extend)))?;
            let oracle = Oracle { max_size: oracle_cap()?, execution: execution(sequential) };
            let which = Model::from(model);
            let out = oracle.distance(&t1, &t2, &costs, which)?;
            let distance = match out.distance {
                Cost::Finite(d) => d,
                Cost::Infinite => bail!("NoMapping: no valid {which} mapping exists"),
            };
            let mut r = Report::new(distance, which.name(), &t1, &t2);
            r.counters = vec![("mappings", out.mappings as u64)];
            r.show_counters = true;
            r.mapping = Some((out.witness, t1, t2));
            r.print(machine);
        }
        Command::Contour { action } => contour(action, machine)?,
        Command::Verify { max_size, sequential } => return verify(max_size, execution(sequential), machine),
    }
    Ok(ExitCode::SUCCESS)
}

fn contour(action: ContourAction, machine: bool) -> Result<()> {
    match action {
        ContourAction::Build { csv, emit, quantum } => {
            let ct = build_contour_tree(&load(&csv)?);
            let bracket = ct.typed_tree(quantum).to_bracket();
            if machine {
                let nodes: Vec<Value> = ct
                    .nodes
                    .iter()
                    .zip(&ct.parent)
                    .map(|(n, p)| {
                        json!({
                            "kind": n.kind.name(),
                            "height": format_rational(&n.height),
                            "row": n.row,
                            "col": n.col,
                            "parent": p,
                        })
                    })
                    .collect();
                println!("{}", json!({ "tree": bracket, "nodes": nodes }));
                return Ok(());
            }
            match emit {
                Emit::Bracket => println!("{bracket}"),
                Emit::Nodes => {
                    println!("nodes={} leaves={}", ct.len(), ct.leaf_count());
                    for (k, (n, p)) in ct.nodes.iter().zip(&ct.parent).enumerate() {
                        let parent = p.map_or("-".to_string(), |p| p.to_string());
                        println!(
                            "{k} {} height={} at=({},{}) parent={parent}",
                            n.kind.name(),
                            format_rational(&n.height),
                            n.row,
                            n.col
                        );
                    }
                }
            }
        }
        ContourAction::Compare { csv1, csv2, gaps, costs, quantum, mapping, counters } => {
            let (a, b) = (load(&csv1)?, load(&csv2)?);
            let model = cost_model(&costs, Some((gaps.gap_open, gaps.gap_extend)))?;
            let out = compare_terrains(&a, &b, &model, quantum)?;
            let t1 = build_contour_tree(&a).bucket_tree(quantum);
            let t2 = build_contour_tree(&b).bucket_tree(quantum);
            let mut r = Report::gap(out, "subtree", t1, t2, mapping, counters);
            if !machine && mapping {
                if let Some((_, t1, t2)) = &r.mapping {
                    r.extra = vec![format!("tree1={}", t1.to_bracket()), format!("tree2={}", t2.to_bracket())];
                }
            }
            r.print(machine);
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<treedist::contour::Terrain> {
    load_terrain(path).map_err(|e| match e {
        Error::Io(msg) => Error::Io(format!("{}: {msg}", path.display())).into(),
        e => e.into(),
    })
}

fn verify(max_size: usize, exec: Execution, machine: bool) -> Result<ExitCode> {
    let cap = oracle_cap()?;
    if max_size > cap {
        return Err(Error::SizeCap { sizes: (max_size, max_size), cap }.into());
    }
    let reports: Vec<SuiteReport> = vec![
        suite::classic_vs_oracle(max_size, exec)?,
        suite::general_vs_oracle(max_size, exec)?,
        suite::subtree_vs_oracle(max_size, exec)?,
        suite::linear_gap_reduction(max_size, Model::General, exec)?,
        suite::dominance(max_size, exec)?,
        suite::alignment_vs_enumeration(max_size, exec)?,
    ];
    let failed = reports.iter().find(|r| !r.passed());
    if machine {
        let suites: Vec<Value> = reports
            .iter()
            .map(|r| json!({ "name": r.name, "checked": r.checked, "mismatches": r.mismatches }))
            .collect();
        let counterexample = failed.and_then(|r| r.first_mismatch.as_ref()).map(|c| {
            json!({
                "first": c.first,
                "second": c.second,
                "setting": c.setting,
                "expected": c.expected.to_string(),
                "actual": c.actual.to_string(),
            })
        });
        println!("{}", json!({ "passed": failed.is_none(), "suites": suites, "counterexample": counterexample }));
    } else {
        for r in &reports {
            let status = if r.passed() { "ok" } else { "FAIL" };
            println!("{status} {}: {} checked, {} mismatches", r.name, r.checked, r.mismatches);
        }
        if let Some(c) = failed.and_then(|r| r.first_mismatch.as_ref()) {
            println!("counterexample: {c}");
        }
    }
    Ok(if failed.is_some() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
