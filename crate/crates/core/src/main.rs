use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relkit::certify::{decide_relation_group, orbit_closure, NotRgCertificate, RgStatus};
use relkit::report::{exit_code, render_jsonl, render_text, verify};
use relkit::set_orbits::{all_set_orbits, regular_set_sizes};
use relkit::{
    invariance_group, Budget, Catalog, Error, PermGroup, Permutation, Relation, SubsetMask,
    VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "relkit",
    version,
    about = "Relation groups of small permutation groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the claims of a catalog and report a verdict for each.
    Verify(VerifyArgs),
    /// Orbits of a group on subsets, by cardinality.
    Orbits(GroupArgs),
    /// Sizes of regular sets (sets with trivial setwise stabilizer).
    Regsets(GroupArgs),
    /// Automorphism group of a relation given by its edges.
    Aut(AutArgs),
    /// Orbit closure of a group: the intersection of the invariance groups of its set-orbits.
    Closure(GroupArgs),
    /// Decide whether a group is the automorphism group of some relation.
    Rg(GroupArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    max_degree_exact: Option<usize>,
    #[arg(long)]
    scan_budget: Option<u64>,
    #[arg(long)]
    enum_budget: Option<u64>,
    #[arg(long)]
    regset_budget: Option<u64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    union_budget: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(v) = self.max_degree_exact {
            b.max_degree_exact = v;
        }
        if let Some(v) = self.scan_budget {
            b.scan_budget = v;
        }
        if let Some(v) = self.enum_budget {
            b.enum_budget = v;
        }
        if let Some(v) = self.regset_budget {
            b.regset_budget = v;
        }
        if let Some(v) = self.node_budget {
            b.node_budget = v;
        }
        if let Some(v) = self.union_budget {
            b.union_budget = v;
        }
        b
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog file; the bundled catalog when omitted.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Degree range such as `5..9` or a single degree.
    #[arg(long, value_parser = parse_range)]
    degrees: Option<RangeInclusive<usize>>,
    /// Glob on entry ids, e.g. `G_12_*`.
    #[arg(long)]
    id: Option<glob::Pattern>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Include per-claim wall time (makes the output run-dependent).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct GroupArgs {
    /// Generators in cycle notation, e.g. "(1,2,3)(4,5)".
    #[arg(long, num_args = 1.., required = true)]
    gens: Vec<String>,
    /// Degree; defaults to the largest point moved.
    #[arg(long)]
    degree: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct AutArgs {
    /// Edges, each in bracket notation, e.g. "[1,2]" "[2,3]".
    #[arg(long, num_args = 1.., required = true)]
    edges: Vec<String>,
    #[arg(long)]
    degree: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected a..b or a single degree, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            Ok(a..=b)
        }
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            Ok(a..=a)
        }
    }
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("RELKIT_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            Err(_) => eprintln!("ignoring RELKIT_THREADS={v:?}"),
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Verify(a) => cmd_verify(a),
        Command::Orbits(a) => cmd_orbits(a),
        Command::Regsets(a) => cmd_regsets(a),
        Command::Aut(a) => cmd_aut(a),
        Command::Closure(a) => cmd_closure(a),
        Command::Rg(a) => cmd_rg(a),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Failure> {
    let catalog = match &a.catalog {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Catalog::parse(&text)?
        }
        None => Catalog::bundled(),
    };
    let opts = VerifyOptions {
        budget: a.budget.budget(),
        degrees: a.degrees,
        id_pattern: a.id,
        timings: a.timings,
    };
    let reports = verify(&catalog, &opts);
    match a.format {
        Format::Text => print!("{}", render_text(&reports)),
        Format::Jsonl => print!("{}", render_jsonl(&reports)),
    }
    Ok(exit_code(&reports) as u8)
}

fn group_from(a: &GroupArgs) -> Result<PermGroup, Failure> {
    let degree = match a.degree {
        Some(d) => d,
        None => a
            .gens
            .iter()
            .flat_map(|g| {
                g.split(|c: char| !c.is_ascii_digit())
                    .filter_map(|t| t.parse::<usize>().ok())
            })
            .max()
            .ok_or_else(|| Failure::Input("cannot infer the degree; pass --degree".into()))?,
    };
    let gens = a
        .gens
        .iter()
        .map(|g| Permutation::parse_cycles(g, degree))
        .collect::<relkit::Result<Vec<_>>>()?;
    Ok(PermGroup::new(&gens)?)
}

fn cmd_orbits(a: GroupArgs) -> Result<u8, Failure> {
    let g = group_from(&a)?;
    let orbits = all_set_orbits(&g, &a.budget.budget())?;
    let mut by_card: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for o in &orbits {
        by_card.entry(o.cardinality).or_default().push(o.size);
    }
    println!("degree {} order {}", g.degree(), g.order());
    for (k, sizes) in by_card {
        let list: Vec<String> = sizes.iter().map(u64::to_string).collect();
        println!(
            "k={k:<2} orbits {:<4} sizes {}",
            sizes.len(),
            list.join(" ")
        );
    }
    Ok(0)
}

fn cmd_regsets(a: GroupArgs) -> Result<u8, Failure> {
    let g = group_from(&a)?;
    let r = regular_set_sizes(&g, &a.budget.budget())?;
    let list: Vec<String> = r.sizes.iter().map(usize::to_string).collect();
    let how = if r.exhaustive {
        "exhaustive"
    } else {
        "heuristic, lower bound"
    };
    println!("sizes {} ({how})", list.join(","));
    Ok(0)
}

fn cmd_aut(a: AutArgs) -> Result<u8, Failure> {
    let edges = a
        .edges
        .iter()
        .map(|e| SubsetMask::parse(e, a.degree))
        .collect::<relkit::Result<Vec<_>>>()?;
    let r = Relation::new(a.degree, edges)?;
    let g = invariance_group(&r, &a.budget.budget())?;
    println!("order {}", g.order());
    for p in g.generators() {
        println!("gen {}", p.print_cycles());
    }
    Ok(0)
}

fn cmd_closure(a: GroupArgs) -> Result<u8, Failure> {
    let g = group_from(&a)?;
    let c = orbit_closure(&g, &a.budget.budget())?;
    let rel = if c.order() == g.order() {
        "orbit closed"
    } else {
        "strict supergroup"
    };
    println!(
        "closure order {} (group order {}, {rel})",
        c.order(),
        g.order()
    );
    Ok(0)
}

fn cmd_rg(a: GroupArgs) -> Result<u8, Failure> {
    let g = group_from(&a)?;
    let v = decide_relation_group(&g, &a.budget.budget())?;
    match v.status {
        RgStatus::RelationGroup { seeds } => {
            let s: Vec<String> = seeds.iter().map(|x| x.to_string()).collect();
            println!("relation group: defined by the orbits of {}", s.join(", "));
        }
        RgStatus::NotRelationGroup(NotRgCertificate::Uniform(p)) => {
            println!(
                "not a relation group: {} preserves every set-orbit",
                p.print_cycles()
            );
        }
        RgStatus::NotRelationGroup(NotRgCertificate::PerUnion { orbits, .. }) => {
            println!(
                "not a relation group: every union of the {} set-orbits has an extra automorphism",
                orbits.len()
            );
        }
        RgStatus::Unknown { reason } => println!("unknown: {reason}"),
    }
    Ok(0)
}
