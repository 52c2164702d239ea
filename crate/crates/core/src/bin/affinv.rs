//! Thin command line front end over the library: parse and classify elements,
//! test commutation, list neighbors, run verification suites, analyse class
//! graphs. Exit codes: 0 success, 1 verification failure, 2 usage or parse
//! error, 3 budget exceeded.

use affine_involutions::commuting::{commutes_fast, commutes_oracle, neighbors_in_class};
use affine_involutions::conjugacy::{class_of, ClassDescriptor};
use affine_involutions::construct::constructive_path;
use affine_involutions::element::{FamilyTag, GroupFamily};
use affine_involutions::error::Error;
use affine_involutions::graph::{
    components_in_window, predict_connectivity, ClassSearcher, WindowSpec,
};
use affine_involutions::involution::{invariants, labelled_cycle_form};
use affine_involutions::report::{
    components_csv, window_graph_dot, witness_texts, GraphReport, OutputFormat,
};
use affine_involutions::text::{parse_element, print_element};
use affine_involutions::verify::{run_suite, SuiteReport, VerifyConfig};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Dot,
    Text,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Dot => OutputFormat::Dot,
            FormatArg::Text => OutputFormat::Text,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GroupArg {
    A,
    B,
    Bbar,
    C,
    D,
}

impl From<GroupArg> for FamilyTag {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::A => FamilyTag::AffineA,
            GroupArg::B => FamilyTag::AffineB,
            GroupArg::Bbar => FamilyTag::AffineBbar,
            GroupArg::C => FamilyTag::AffineC,
            GroupArg::D => FamilyTag::AffineD,
        }
    }
}

#[derive(Parser)]
#[command(name = "affinv", version, about = "Involutions and commuting involution graphs in classical affine Weyl groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an involution: cycle form, type, invariants, descriptor.
    Classify {
        #[arg(long, value_enum)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        /// Element in labelled cycle text, e.g. "(+1 2)^1 (-3 4)^3".
        element: String,
    },
    /// Test whether two involutions commute.
    Commutes {
        #[arg(long)]
        n: usize,
        x: String,
        y: String,
    },
    /// List the commuting neighbors of a class member inside a window.
    Neighbors {
        #[arg(long, value_enum)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        window: i64,
        #[arg(long)]
        max_nodes: Option<usize>,
        element: String,
    },
    /// Run a verification suite: lemmas | conjugacy | connectivity |
    /// diameters | finite-baseline | all.
    Verify {
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        window: i64,
    },
    /// Analyse the window graph of a class: components, verdict, optional
    /// distances and constructive paths.
    Graph {
        /// Descriptor in compact text, e.g. "B:n=6:(2,2,0,0):f=0".
        descriptor: String,
        #[arg(long, default_value_t = 1)]
        window: i64,
        #[arg(long)]
        max_nodes: Option<usize>,
        /// Build the constructive path from this element to the representative.
        #[arg(long)]
        path_from: Option<String>,
        /// Search a certified distance between these two elements.
        #[arg(long, num_args = 2)]
        between: Option<Vec<String>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| Error::Parse {
                position: 0,
                message: format!("cannot write {}: {e}", path.display()),
            })?;
            file.write_all(text.as_bytes()).map_err(|e| Error::Parse {
                position: 0,
                message: e.to_string(),
            })?;
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Classify { group, n, element } => {
            let family = GroupFamily::new((*group).into(), *n)?;
            let x = parse_element(element, *n)?;
            let form = labelled_cycle_form(&x)?;
            let descriptor = class_of(&x, family)?;
            let inv = invariants(&x);
            match cli.format {
                FormatArg::Json => {
                    let value = serde_json::json!({
                        "element": print_element(&x, false)?,
                        "cycle_form": print_element(&x, true)?,
                        "type": [form.cycle_type().m, form.cycle_type().k_e,
                                 form.cycle_type().k_o, form.cycle_type().l],
                        "sum": inv.sum,
                        "sum_plus": inv.sum_plus,
                        "minus": inv.minus,
                        "f": inv.f,
                        "descriptor": descriptor,
                        "descriptor_text": descriptor.to_compact_text(),
                    });
                    emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
                }
                _ => {
                    let ty = form.cycle_type();
                    emit(
                        cli,
                        &format!(
                            "cycle form : {}\ntype       : {}\nsum        : {}\nsum_plus   : {}\nminus      : {}\nf          : {}\ndescriptor : {}",
                            print_element(&x, true)?,
                            ty,
                            inv.sum,
                            inv.sum_plus,
                            inv.minus,
                            inv.f.map_or("-".to_string(), |f| f.to_string()),
                            descriptor.to_compact_text(),
                        ),
                    )?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Commutes { n, x, y } => {
            let a = parse_element(x, *n)?;
            let b = parse_element(y, *n)?;
            let oracle = commutes_oracle(&a, &b)?;
            if let Ok(fast) = commutes_fast(&a, &b) {
                assert_eq!(fast, oracle, "fast predicate must agree with the oracle");
            }
            emit(cli, if oracle { "commute" } else { "do not commute" })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Neighbors { group, n, window, max_nodes, element } => {
            let family = GroupFamily::new((*group).into(), *n)?;
            let x = parse_element(element, *n)?;
            let d = class_of(&x, family)?;
            let neighbors = neighbors_in_class(&x, &d, *window)?;
            if let Some(cap) = max_nodes {
                if neighbors.len() > *cap {
                    return Err(Error::BudgetExceeded { nodes: neighbors.len(), cap: *cap });
                }
            }
            let mut lines = Vec::new();
            for nb in &neighbors {
                lines.push(print_element(nb, true)?);
            }
            match cli.format {
                FormatArg::Json => emit(cli, &serde_json::to_string_pretty(&lines).unwrap())?,
                _ => emit(cli, &format!("{} neighbors\n{}", lines.len(), lines.join("\n")))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, n, window } => {
            let config = VerifyConfig { seed: cli.seed, rank_filter: *n, window: *window };
            let report = run_suite(suite, &config)?;
            emit_suite(cli, &report)?;
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Graph { descriptor, window, max_nodes, path_from, between } => {
            let d = ClassDescriptor::from_compact_text(descriptor)?;
            let verdict = predict_connectivity(&d)?;
            let spec = WindowSpec { window: *window, max_nodes: *max_nodes };
            let comps = components_in_window(&d, spec)?;
            let mut witness = None;
            if let Some(text) = path_from {
                let x = parse_element(text, d.n())?;
                let w = constructive_path(&x, &d)?;
                witness = Some(witness_texts(&w)?);
            }
            if let Some(pair) = between {
                let x = parse_element(&pair[0], d.n())?;
                let y = parse_element(&pair[1], d.n())?;
                let cap = max_nodes.unwrap_or(4_000_000);
                let cert = ClassSearcher::new(d)
                    .distance(&x, &y, *window + d.n() as i64 + 2, cap)?;
                witness = cert.map(|c| witness_texts(&c.witness)).transpose()?;
            }
            match cli.format {
                FormatArg::Dot => {
                    emit(cli, &window_graph_dot(&d, &comps, *window)?)?;
                }
                FormatArg::Csv => emit(cli, &components_csv(&comps)?)?,
                FormatArg::Json | FormatArg::Text => {
                    let report = GraphReport {
                        descriptor: d,
                        verdict,
                        window: *window,
                        node_count: comps.vertices.len(),
                        component_sizes: comps.components().iter().map(|c| c.len()).collect(),
                        witness,
                    };
                    emit(cli, &serde_json::to_string_pretty(&report).unwrap())?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit_suite(cli: &Cli, report: &SuiteReport) -> Result<(), Error> {
    match cli.format {
        FormatArg::Json => emit(cli, &serde_json::to_string_pretty(report).unwrap()),
        _ => {
            let mut text = format!("suite {} (seed {})\n", report.suite, report.seed);
            for c in &report.checks {
                text.push_str(&format!(
                    "[{}] {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.details
                ));
            }
            text.push_str(if report.passed() { "result: PASS" } else { "result: FAIL" });
            emit(cli, &text)
        }
    }
}
