use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use chainmail_core::graph::compare_ids;
use chainmail_core::orderability::Outcome;
use chainmail_core::{
    chainmail_presentation, check_refutation, dehn_fill, h1_invariants, parse_graph, prove_non_detection, refute,
    run_pipeline, splice, Budget, ConstraintSet, PipelineOptions, PlanarGraph, Presentation, Slope,
};
use clap::{Args, Parser, Subcommand};

/// Chainmail link groups: presentations, surgery, homology, and certified
/// non-left-orderability.
#[derive(Parser, Debug)]
#[command(name = "chainmail", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a graph and check that its embedding is spherical.
    Validate { graph: PathBuf },
    /// Write the chainmail presentation of a graph.
    Present {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// First homology of a presentation or of a graph's chainmail link.
    H1 { input: PathBuf },
    /// Dehn fill one peripheral component.
    Fill {
        presentation: PathBuf,
        component: String,
        #[arg(allow_hyphen_values = true)]
        slope: Slope,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the case analysis for the V+ marks in a graph file and write the
    /// trace.
    Prove {
        graph: PathBuf,
        /// Origin vertex; defaults to the lowest V+ id.
        #[arg(long)]
        origin: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a refutation of a presentation, with strong detection of
    /// every filled slope as constraints. Exits 4 when none is found.
    Refute {
        presentation: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Splice two presentations along one component each.
    Glue {
        first: PathBuf,
        c1: String,
        second: PathBuf,
        c2: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Prove that the surgery described by a slope-annotated graph has a
    /// non-left-orderable fundamental group.
    Pipeline {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also refute the filled presentation directly.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Directory for trace, facts and report.
        #[arg(short, long, default_value = "chainmail-out")]
        output: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, default_value_t = 3)]
    radius: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: usize,
    #[arg(long, default_value_t = 2)]
    conj_len: usize,
}

impl BudgetArgs {
    fn budget(self) -> Result<Budget> {
        if self.radius == 0 || self.max_nodes == 0 {
            return Err(invalid("radius and node budget must be positive"));
        }
        Ok(Budget {
            radius: self.radius,
            max_nodes: self.max_nodes,
            conj_len: self.conj_len,
        })
    }
}

/// An error carrying its own exit code.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn invalid(message: impl fmt::Display) -> anyhow::Error {
    Exit {
        code: 2,
        message: message.to_string(),
    }
    .into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<PlanarGraph> {
    parse_graph(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_presentation(path: &Path) -> Result<Presentation> {
    read(path)?
        .parse()
        .map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn emit(output: Option<&Path>, inputs: &[&Path], text: &str) -> Result<()> {
    match output {
        None => print!("{text}"),
        Some(out) => {
            if inputs.iter().any(|i| same_file(i, out)) {
                return Err(invalid(format!("output {} would overwrite an input", out.display())));
            }
            fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { graph } => {
            let g = read_graph(&graph)?;
            let faces = g.validate_embedding().map_err(invalid)?;
            println!(
                "ok: {} vertices, {} edges, {} components, {} faces, genus 0",
                g.vertices().len(),
                g.edges().len(),
                faces.components.len(),
                faces.components.iter().map(|c| c.faces).sum::<usize>()
            );
        }
        Command::Present { graph, output } => {
            let g = read_graph(&graph)?;
            g.validate_embedding().map_err(invalid)?;
            let p = chainmail_presentation(&g).map_err(invalid)?;
            emit(output.as_deref(), &[&graph], &p.to_string())?;
        }
        Command::H1 { input } => {
            let text = read(&input)?;
            let p = match text.parse::<Presentation>() {
                Ok(p) => p,
                Err(pe) => match parse_graph(&text) {
                    Ok(g) => chainmail_presentation(&g).map_err(invalid)?,
                    Err(_) => return Err(invalid(format!("{}: {pe}", input.display()))),
                },
            };
            print!("{}", h1_invariants(&p));
        }
        Command::Fill {
            presentation,
            component,
            slope,
            output,
        } => {
            let p = read_presentation(&presentation)?;
            let filled = dehn_fill(&p, &component, slope).map_err(invalid)?;
            emit(output.as_deref(), &[&presentation], &filled.to_string())?;
        }
        Command::Prove {
            graph,
            origin,
            jobs,
            output,
        } => {
            if jobs == 0 {
                return Err(invalid("--jobs must be positive"));
            }
            let g = read_graph(&graph)?;
            let vplus = g.vplus();
            let origin = match origin {
                Some(id) => g
                    .vertex_index(&id)
                    .ok_or_else(|| invalid(format!("unknown vertex `{id}`")))?,
                None => *vplus
                    .iter()
                    .min_by(|&&a, &&b| compare_ids(&g.vertex(a).id, &g.vertex(b).id))
                    .ok_or_else(|| invalid("no vertex is marked vplus"))?,
            };
            let trace = prove_non_detection(&g, &vplus, origin, jobs).map_err(|e| match e {
                chainmail_core::StructuralError::Survived(_) => Exit {
                    code: 3,
                    message: e.to_string(),
                }
                .into(),
                e => invalid(e),
            })?;
            emit(output.as_deref(), &[&graph], &trace.to_text(&g))?;
        }
        Command::Refute {
            presentation,
            budget,
            output,
        } => {
            let budget = budget.budget()?;
            let p = read_presentation(&presentation)?;
            let c = ConstraintSet::from_ledger(&p, budget.conj_len);
            match refute(&p, &c, budget)? {
                Outcome::Refuted(r) => {
                    check_refutation(&p, &c, &r).map_err(|e| Exit {
                        code: 3,
                        message: format!("certificate failed its own check: {e}"),
                    })?;
                    emit(output.as_deref(), &[&presentation], &r.to_text(&p))?;
                    eprintln!("refuted at radius {} with {} nodes", r.radius, r.size());
                }
                Outcome::Unknown(u) => {
                    eprintln!(
                        "unknown: {:?} at radius {} with {} classified words",
                        u.reason,
                        u.radius,
                        u.assignment.len()
                    );
                    return Ok(4);
                }
            }
        }
        Command::Glue {
            first,
            c1,
            second,
            c2,
            output,
        } => {
            let p1 = read_presentation(&first)?;
            let p2 = read_presentation(&second)?;
            let p = splice(&p1, &c1, &p2, &c2).map_err(invalid)?;
            emit(output.as_deref(), &[&first, &second], &p.to_string())?;
        }
        Command::Pipeline {
            graph,
            jobs,
            cross_check,
            budget,
            output,
        } => {
            if jobs == 0 {
                return Err(invalid("--jobs must be positive"));
            }
            let budget = budget.budget()?;
            if same_file(&graph, &output) {
                return Err(invalid("output directory is the input file"));
            }
            let g = read_graph(&graph)?;
            let opts = PipelineOptions {
                jobs,
                cross_check: cross_check.then_some(budget),
            };
            let run = run_pipeline(&g, opts).map_err(|e| Exit {
                code: e.exit_code() as u8,
                message: e.to_string(),
            })?;
            fs::create_dir_all(&output).with_context(|| format!("creating {}", output.display()))?;
            let write = |name: &str, text: &str| -> Result<()> {
                let path = output.join(name);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
            };
            write("trace.txt", &run.trace_text)?;
            write("facts.txt", &run.facts.to_text())?;
            write("filled.pres", &run.filled.to_string())?;
            write("report.txt", &run.report)?;
            if let Some(Outcome::Refuted(r)) = &run.refutation {
                write("refutation.txt", &r.to_text(&run.filled))?;
            }
            print!("{}", run.report);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Exit>().map(|x| x.code).unwrap_or(1);
            ExitCode::from(code)
        }
    }
}
