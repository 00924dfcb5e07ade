//! `pebbling`: pebble games, coalgebras and width invariants from the command line.
//!
//! Boolean verdicts exit with 0 for yes and 1 for no; errors exit with 2.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pebbling_core::comonad::{check_laws_on, BoundedTk, KTraversal, Pebbling, TkDecomposition};
use pebbling_core::constructions::{
    cfi_pair, cfi_witness_iso_capped, generate, grid, mermin, nogo_demo, system_to_structure, z2,
    Kind, Z2System,
};
use pebbling_core::games::{
    arrow_k, back_and_forth_equiv, bijection_game_equiv, consistency_number, determinize,
    existential_strategy,
};
use pebbling_core::hom::{core_with_retraction, find_homomorphism, find_isomorphism, is_homomorphism};
use pebbling_core::logic::{BoxOptions, Formula, ModalEvaluator};
use pebbling_core::width::{coalgebra_witness, find_k_traversal, pebble_number_limited, treewidth_with_order};
use pebbling_core::{Elem, Error, Homomorphism, Structure};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pebbling", version, about = "Pebble games, the pebbling comonad and width invariants")]
struct Cli {
    /// Print the full result as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Largest bounded fragment of T_k to build.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_plays: usize,
    /// Largest universe for the exponential width algorithms.
    #[arg(long, global = true, default_value_t = 20)]
    max_universe: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Game {
    /// Existential game in both directions.
    Ep,
    /// Back-and-forth game.
    Bf,
    /// Bijection game.
    Bij,
}

#[derive(Subcommand)]
enum Command {
    /// Is there a homomorphism A → B?
    Hom { a: PathBuf, b: PathBuf },
    /// Are A and B isomorphic?
    Iso { a: PathBuf, b: PathBuf },
    /// Core of A and a retraction onto it.
    Core { a: PathBuf },
    /// Does Duplicator win the existential k-pebble game on A, B?
    Consistency {
        #[arg(long)]
        k: usize,
        a: PathBuf,
        b: PathBuf,
    },
    /// Largest k with A →_k B, or |A| if A → B.
    ConsistencyNumber { a: PathBuf, b: PathBuf },
    /// k-pebble equivalence of A and B in the chosen game.
    Equiv {
        #[arg(long, value_enum)]
        game: Game,
        #[arg(long)]
        k: usize,
        a: PathBuf,
        b: PathBuf,
    },
    /// Treewidth of the Gaifman graph.
    Treewidth { a: PathBuf },
    /// Least k with a coalgebra A → T_k A.
    CoalgebraNumber { a: PathBuf },
    /// Treewidth of the core plus one.
    PebbleNumber { a: PathBuf },
    /// A k-traversal of A, if one exists.
    Traversal {
        #[arg(long)]
        k: usize,
        a: PathBuf,
    },
    /// Check the comonad laws on the fragment of T_k A up to the given depth.
    Laws {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        depth: usize,
        a: PathBuf,
    },
    /// Validate the tree decomposition of the fragment of T_k A.
    DecompTk {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        depth: usize,
        a: PathBuf,
    },
    /// Write Duplicator's winning strategy as a transducer.
    Transducer {
        #[arg(long)]
        k: usize,
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a graph: complete, cycle, sym-cycle, path, empty, or grid (N×N).
    Gen { kind: String, n: usize },
    /// The two-element parity structure.
    Z2,
    /// The Mermin magic square as a parity structure.
    Mermin,
    /// Convert a Z2 equation system to a structure.
    Sys2str { file: PathBuf },
    /// Build the CFI pair of a system and check the co-Kleisli isomorphism.
    Cfi {
        #[arg(long)]
        k: usize,
        /// Depth of the fragments on which the isomorphism is checked.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        file: PathBuf,
    },
    /// C3 against cycles and paths of length m in the 2-pebble game.
    Nogo {
        #[arg(long)]
        m: usize,
    },
    /// Evaluate a formula; free variables take the tuple in increasing order.
    Eval {
        #[arg(long)]
        formula: PathBuf,
        a: PathBuf,
        /// Comma-separated element names.
        #[arg(long, value_delimiter = ',')]
        tuple: Vec<String>,
    },
}

#[derive(Serialize)]
struct CommandResult {
    verdict: Value,
    witness: Option<Value>,
    /// Milliseconds.
    timing: u128,
}

/// What a command computed, before timing is attached.
struct Report {
    verdict: Value,
    witness: Option<Value>,
    /// Text for the default output.
    text: String,
}

impl Report {
    fn yes_no(verdict: bool, witness: Option<Value>, text: impl Into<String>) -> Report {
        let mut line = String::from(if verdict { "yes" } else { "no" });
        let extra = text.into();
        if !extra.is_empty() {
            line = format!("{line}\n{extra}");
        }
        Report { verdict: Value::Bool(verdict), witness, text: line }
    }

    fn number(n: usize, witness: Option<Value>, text: impl Into<String>) -> Report {
        let extra = text.into();
        let text = if extra.is_empty() { n.to_string() } else { format!("{n}\n{extra}") };
        Report { verdict: json!(n), witness, text }
    }

    fn structure(s: &Structure) -> Result<Report> {
        let witness: Value = serde_json::from_str(&s.to_json())?;
        Ok(Report { verdict: Value::Bool(true), witness: Some(witness), text: s.to_json() })
    }
}

fn load(path: &Path) -> Result<Structure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Structure::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn load_system(path: &Path) -> Result<Z2System> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Z2System::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn map_json(h: &Homomorphism, a: &Structure, b: &Structure) -> Value {
    let m: BTreeMap<String, String> = h.describe(a, b).into_iter().collect();
    json!(m)
}

fn map_text(h: &Homomorphism, a: &Structure, b: &Structure) -> String {
    h.describe(a, b).iter().map(|(x, y)| format!("{x}->{y}")).collect::<Vec<_>>().join(", ")
}

fn traversal_json(t: &KTraversal, a: &Structure) -> Value {
    let parent: BTreeMap<&str, Option<&str>> =
        a.elements().map(|x| (a.name(x), t.parent(x).map(|p| a.name(p)))).collect();
    let label: BTreeMap<&str, usize> = a.elements().map(|x| (a.name(x), t.label(x))).collect();
    json!({"k": t.k(), "parent": parent, "label": label})
}

fn traversal_text(t: &KTraversal, a: &Structure) -> String {
    a.elements()
        .map(|x| match t.parent(x) {
            Some(p) => format!("{} (pebble {}) under {}", a.name(x), t.label(x), a.name(p)),
            None => format!("{} (pebble {}) root", a.name(x), t.label(x)),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn check_universe(a: &Structure, limit: usize) -> Result<()> {
    if a.len() > limit {
        return Err(Error::SizeLimit { size: a.len(), limit }.into());
    }
    Ok(())
}

fn fragment(a: &Structure, k: usize, depth: usize, max_plays: usize) -> Result<BoundedTk> {
    Ok(BoundedTk::with_cap(a, k, depth, max_plays)?)
}

fn element(a: &Structure, name: &str) -> Result<Elem> {
    a.element(name).with_context(|| format!("no element named `{name}`"))
}

fn run(cli: &Cli) -> Result<Report> {
    let max_plays = cli.max_plays;
    let max_universe = cli.max_universe;
    Ok(match &cli.command {
        Command::Hom { a, b } => {
            let (a, b) = (load(a)?, load(b)?);
            match find_homomorphism(&a, &b)? {
                Some(h) => Report::yes_no(true, Some(map_json(&h, &a, &b)), map_text(&h, &a, &b)),
                None => Report::yes_no(false, None, ""),
            }
        }
        Command::Iso { a, b } => {
            let (a, b) = (load(a)?, load(b)?);
            match find_isomorphism(&a, &b)? {
                Some(h) => Report::yes_no(true, Some(map_json(&h, &a, &b)), map_text(&h, &a, &b)),
                None => Report::yes_no(false, None, ""),
            }
        }
        Command::Core { a } => {
            let a = load(a)?;
            let c = core_with_retraction(&a);
            let structure: Value = serde_json::from_str(&c.structure.to_json())?;
            let retraction: BTreeMap<&str, &str> =
                a.elements().map(|x| (a.name(x), a.name(c.retraction.apply(x)))).collect();
            let text = format!("{}\nretraction: {}", c.structure.to_json(), map_text(&c.retraction, &a, &a));
            Report::number(
                c.structure.len(),
                Some(json!({"core": structure, "retraction": retraction})),
                text,
            )
        }
        Command::Consistency { k, a, b } => {
            let (a, b) = (load(a)?, load(b)?);
            let s = existential_strategy(&a, &b, *k)?;
            let size = s.as_ref().map(|s| s.len());
            let text = size.map(|n| format!("{n} positions in the winning strategy")).unwrap_or_default();
            Report::yes_no(s.is_some(), size.map(|n| json!({"positions": n})), text)
        }
        Command::ConsistencyNumber { a, b } => {
            let (a, b) = (load(a)?, load(b)?);
            Report::number(consistency_number(&a, &b)?, None, "")
        }
        Command::Equiv { game, k, a, b } => {
            let (a, b) = (load(a)?, load(b)?);
            let verdict = match game {
                Game::Ep => arrow_k(&a, &b, *k)? && arrow_k(&b, &a, *k)?,
                Game::Bf => back_and_forth_equiv(&a, &b, *k)?,
                Game::Bij => bijection_game_equiv(&a, &b, *k)?,
            };
            Report::yes_no(verdict, None, "")
        }
        Command::Treewidth { a } => {
            let a = load(a)?;
            let (tw, order) = treewidth_with_order(&a, max_universe)?;
            let names: Vec<&str> = order.iter().map(|&v| a.name(v)).collect();
            Report::number(tw, Some(json!({"elimination_order": names})), format!("elimination order: {}", names.join(" ")))
        }
        Command::CoalgebraNumber { a } => {
            let a = load(a)?;
            check_universe(&a, max_universe)?;
            let (k, t) = coalgebra_witness(&a)?;
            Report::number(k, Some(traversal_json(&t, &a)), traversal_text(&t, &a))
        }
        Command::PebbleNumber { a } => {
            let a = load(a)?;
            let pi = pebble_number_limited(&a, max_universe)?;
            Report::number(pi, None, "")
        }
        Command::Traversal { k, a } => {
            let a = load(a)?;
            check_universe(&a, max_universe)?;
            match find_k_traversal(&a, *k)? {
                Some(t) => Report::yes_no(true, Some(traversal_json(&t, &a)), traversal_text(&t, &a)),
                None => Report::yes_no(false, None, ""),
            }
        }
        Command::Laws { k, depth, a } => {
            let a = load(a)?;
            let r = check_laws_on(&Pebbling, &a, &fragment(&a, *k, *depth, max_plays)?)?;
            let text = format!(
                "{} plays, {} checks{}",
                r.plays,
                r.checks,
                r.violation.as_ref().map(|v| format!("\n{v}")).unwrap_or_default()
            );
            Report::yes_no(r.passed(), Some(serde_json::to_value(&r)?), text)
        }
        Command::DecompTk { k, depth, a } => {
            let a = load(a)?;
            let r = TkDecomposition::of(fragment(&a, *k, *depth, max_plays)?).validate();
            let text = format!(
                "{} bags, largest {}, {} tuples covered{}",
                r.nodes,
                r.max_bag,
                r.tuples_checked,
                r.violation.as_ref().map(|v| format!("\n{v}")).unwrap_or_default()
            );
            Report::yes_no(r.valid(), Some(serde_json::to_value(&r)?), text)
        }
        Command::Transducer { k, a, b, out } => {
            let (a, b) = (load(a)?, load(b)?);
            match existential_strategy(&a, &b, *k)? {
                Some(s) => {
                    let t = determinize(&s)?;
                    let doc = t.to_json(&a, &b);
                    std::fs::write(out, serde_json::to_string_pretty(&doc)?)
                        .with_context(|| format!("writing {}", out.display()))?;
                    let text = format!("{} states written to {}", t.len(), out.display());
                    Report::yes_no(true, Some(json!({"states": t.len(), "out": out})), text)
                }
                None => Report::yes_no(false, None, "Spoiler wins; nothing written"),
            }
        }
        Command::Gen { kind, n } => {
            let s = match kind.as_str() {
                "grid" => grid(*n, *n)?,
                other => generate(other.parse::<Kind>()?, *n)?,
            };
            Report::structure(&s)?
        }
        Command::Z2 => Report::structure(&z2())?,
        Command::Mermin => Report::structure(&mermin())?,
        Command::Sys2str { file } => Report::structure(&system_to_structure(&load_system(file)?)?)?,
        Command::Cfi { k, depth, file } => {
            let a = system_to_structure(&load_system(file)?)?;
            let pair = cfi_pair(&a)?;
            let embed = is_homomorphism(&a, &pair.a0, &pair.embed)?;
            let project = is_homomorphism(&pair.a1, &z2(), &pair.project)?;
            let a0_to_z2 = find_homomorphism(&pair.a0, &z2())?.is_some();
            let isomorphic = find_isomorphism(&pair.a0, &pair.a1)?.is_some();
            let equivalent = bijection_game_equiv(&pair.a0, &pair.a1, *k)?;
            let witness = match existential_strategy(&a, &z2(), *k)? {
                Some(s) => Some(cfi_witness_iso_capped(&a, *k, &determinize(&s)?, *depth, max_plays)?),
                None => None,
            };
            let verified = witness.as_ref().is_some_and(|w| w.verified());
            let verdict = embed && project && !a0_to_z2 && !isomorphic && equivalent && verified;
            let a0: Value = serde_json::from_str(&pair.a0.to_json())?;
            let a1: Value = serde_json::from_str(&pair.a1.to_json())?;
            let text = format!(
                "A -> A0: {embed}\nA1 -> Z2: {project}\nA0 -> Z2: {a0_to_z2}\nA0 isomorphic to A1: {isomorphic}\n\
                 A0, A1 equivalent in the {k}-pebble bijection game: {equivalent}\n\
                 co-Kleisli isomorphism on depth-{depth} fragments: {}",
                match &witness {
                    Some(w) => format!("{} ({} plays)", w.verified(), w.plays),
                    None => format!("no strategy for A -> Z2 with {k} pebbles"),
                }
            );
            Report::yes_no(
                verdict,
                Some(json!({
                    "a0": a0,
                    "a1": a1,
                    "embed": embed,
                    "project": project,
                    "a0_to_z2": a0_to_z2,
                    "isomorphic": isomorphic,
                    "bijection_equivalent": equivalent,
                    "witness": witness,
                })),
                text,
            )
        }
        Command::Nogo { m } => {
            let r = nogo_demo(*m)?;
            let verdict = r.into_cycle && !r.into_path && r.chain_linked;
            let text = format!(
                "C3 ->_2 C{m}: {}\nC3 ->_2 P{m}: {}\nE-chain in T_2 C3: {}",
                r.into_cycle,
                r.into_path,
                r.chain.join(" -> ")
            );
            Report::yes_no(verdict, Some(serde_json::to_value(&r)?), text)
        }
        Command::Eval { formula, a, tuple } => {
            let a = load(a)?;
            let text = std::fs::read_to_string(formula).with_context(|| format!("reading {}", formula.display()))?;
            let f: Formula = text.parse().with_context(|| format!("in {}", formula.display()))?;
            let tuple: Vec<Elem> = tuple.iter().map(|n| element(&a, n)).collect::<Result<_>>()?;
            let eval = ModalEvaluator::new(&a, BoxOptions { extra_depth: 0, max_plays });
            let verdict = if matches!(f, Formula::Box { .. }) {
                eval.eval_box(&tuple, &f)?
            } else {
                let free = f.free_vars();
                if free.len() != tuple.len() {
                    bail!("formula has {} free variables but the tuple has {} elements", free.len(), tuple.len());
                }
                eval.evaluate(&free.into_iter().zip(tuple).collect(), &f)?
            };
            Report::yes_no(verdict, None, "")
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            let code = if report.verdict == Value::Bool(false) { 1 } else { 0 };
            if cli.json {
                let result = CommandResult {
                    verdict: report.verdict,
                    witness: report.witness,
                    timing: start.elapsed().as_millis(),
                };
                println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
