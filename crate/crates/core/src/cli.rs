//! `kgnet` command-line front end.
//!
//! Exit codes: 0 on success, 1 for fatal input errors (unreadable or
//! malformed files, unknown nodes, unwritable output), 2 for usage errors.
//! Flags are validated before any file is opened.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::centrality::{katz_centrality, rank, KatzParams, DEFAULT_ALPHA_SCALE};
use crate::export::{
    render_paths, render_rank_table, render_stats, render_treatment_table, to_dot, to_graphml,
    ColorMap, TableFormat,
};
use crate::graph::{EntityType, KnowledgeGraph};
use crate::ingest::{load_graph_files, IngestReport};
use crate::query::{
    ego_subnetwork, paths_between, treatments_for, PathConstraint, Subnetwork, TREATS,
};

#[derive(Debug, Parser)]
#[command(name = "kgnet", version, about = "Typed knowledge-graph analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GraphFiles {
    /// Entities TSV (`id\tname\ttype`).
    #[arg(long, value_name = "FILE")]
    entities: PathBuf,
    /// Relations TSV (`src_id\tdst_id\trel_type\tdoc_id`).
    #[arg(long, value_name = "FILE")]
    relations: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EgoFormat {
    Dot,
    Graphml,
    Stats,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Graphml,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Node, edge and per-type counts plus an ingest summary.
    Stats {
        #[command(flatten)]
        files: GraphFiles,
    },
    /// Rank nodes by Katz centrality.
    Katz {
        #[command(flatten)]
        files: GraphFiles,
        /// alpha = alpha_scale / lambda_max; must lie in (0, 1).
        #[arg(long, default_value_t = DEFAULT_ALPHA_SCALE)]
        alpha_scale: f64,
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Rank only entities of this type.
        #[arg(long = "type", value_parser = parse_type)]
        etype: Option<EntityType>,
        #[arg(long)]
        no_normalize: bool,
    },
    /// Ego subnetwork around a node.
    Ego {
        #[command(flatten)]
        files: GraphFiles,
        #[arg(long)]
        node: String,
        #[arg(long, value_enum, default_value = "stats")]
        format: EgoFormat,
    },
    /// Simple paths between two nodes.
    Paths {
        #[command(flatten)]
        files: GraphFiles,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 3)]
        max_hops: usize,
        /// Comma-separated types allowed for intermediate nodes.
        #[arg(long, value_delimiter = ',', value_parser = parse_type)]
        intermediate_types: Vec<EntityType>,
    },
    /// Drugs linked to the given diseases by TREATS relations.
    #[command(group = clap::ArgGroup::new("disease_source").required(true))]
    Treats {
        #[command(flatten)]
        files: GraphFiles,
        /// File with one disease id per line.
        #[arg(long, value_name = "FILE", group = "disease_source")]
        diseases_file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', group = "disease_source")]
        diseases: Vec<String>,
    },
    /// Serialize the whole graph.
    Export {
        #[command(flatten)]
        files: GraphFiles,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn parse_type(s: &str) -> Result<EntityType, String> {
    s.parse::<EntityType>().map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Fatal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Fatal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Fatal(m) => m,
        }
    }
}

fn fatal(e: impl std::fmt::Display) -> Failure {
    Failure::Fatal(e.to_string())
}

/// Parse `args` (including the program name) and run the subcommand.
/// Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn load(
    files: &GraphFiles,
    err: &mut dyn Write,
) -> Result<(KnowledgeGraph, IngestReport), Failure> {
    let (graph, report) = load_graph_files(&files.entities, &files.relations).map_err(fatal)?;
    for r in &report.rejection_log {
        let _ = writeln!(err, "warning: rejected {r}");
    }
    Ok((graph, report))
}

fn canonical(id: &str) -> String {
    id.trim().to_lowercase()
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let text = match cmd {
        Command::Stats { files } => {
            let (graph, report) = load(&files, err)?;
            let mut s = format!(
                "entities: {}\nrelations: {}\nedges: {}\n",
                graph.node_count(),
                graph.relations().len(),
                graph.edge_count()
            );
            for (t, count) in graph.type_counts().iter() {
                s.push_str(&format!("{t}: {count}\n"));
            }
            s.push_str(&format!(
                "duplicates_merged: {}\nrows_rejected: {}\n",
                report.duplicates_merged, report.rows_rejected
            ));
            s
        }
        Command::Katz {
            files,
            alpha_scale,
            top,
            etype,
            no_normalize,
        } => {
            let params = KatzParams::new(alpha_scale)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .normalized(!no_normalize);
            let (graph, _) = load(&files, err)?;
            if graph.node_count() == 0 {
                render_rank_table::<f64>(&[], TableFormat::Tsv)
            } else {
                let result = katz_centrality(&graph, &params).map_err(fatal)?;
                render_rank_table(&rank(&result, &graph, top, etype), TableFormat::Tsv)
            }
        }
        Command::Ego {
            files,
            node,
            format,
        } => {
            let (graph, _) = load(&files, err)?;
            let sub = ego_subnetwork(&graph, &canonical(&node)).map_err(fatal)?;
            match format {
                EgoFormat::Stats => {
                    format!("center: {}\n{}", canonical(&node), render_stats(&sub.stats))
                }
                EgoFormat::Dot => to_dot(&graph, &sub, &ColorMap::default()),
                EgoFormat::Graphml => to_graphml(&graph, &sub),
            }
        }
        Command::Paths {
            files,
            from,
            to,
            max_hops,
            intermediate_types,
        } => {
            let (from, to) = (canonical(&from), canonical(&to));
            if from == to {
                return Err(Failure::Usage(format!(
                    "--from and --to name the same node `{from}`"
                )));
            }
            let constraint = PathConstraint::new(max_hops, intermediate_types)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let (graph, _) = load(&files, err)?;
            let paths = paths_between(&graph, &from, &to, &constraint).map_err(fatal)?;
            render_paths(&graph, &paths)
        }
        Command::Treats {
            files,
            diseases_file,
            diseases,
        } => {
            let mut ids: Vec<String> = diseases.iter().map(|d| canonical(d)).collect();
            if let Some(path) = diseases_file {
                let body = fs::read_to_string(&path)
                    .map_err(|e| fatal(format!("cannot read {}: {e}", path.display())))?;
                ids.extend(body.lines().map(canonical).filter(|l| !l.is_empty()));
            }
            let (graph, _) = load(&files, err)?;
            let report = treatments_for(&graph, &ids, TREATS);
            for id in &report.unknown {
                let _ = writeln!(err, "warning: unknown disease id `{id}`");
            }
            render_treatment_table(&report.hits)
        }
        Command::Export {
            files,
            format,
            out: dest,
        } => {
            let (graph, _) = load(&files, err)?;
            let whole = Subnetwork::whole(&graph);
            let doc = match format {
                ExportFormat::Dot => to_dot(&graph, &whole, &ColorMap::default()),
                ExportFormat::Graphml => to_graphml(&graph, &whole),
            };
            match dest {
                Some(path) => {
                    fs::write(&path, doc)
                        .map_err(|e| fatal(format!("cannot write {}: {e}", path.display())))?;
                    String::new()
                }
                None => doc,
            }
        }
    };
    out.write_all(text.as_bytes()).map_err(fatal)
}
