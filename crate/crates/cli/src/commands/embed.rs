use crate::manifest::{write_report, RunManifest};
use crate::schema;
use pcp_forge_core::debruijn::embed::embed;
use pcp_forge_core::graph::expander::{DEFAULT_DEGREE, DEFAULT_THRESHOLD};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args, Debug)]
pub struct EmbedArgs {
    /// Input constraint graph.
    #[arg(long)]
    pub graph: PathBuf,
    /// De Bruijn alphabet size.
    #[arg(long)]
    pub lambda: usize,
    /// De Bruijn word length.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub seed: u64,
    /// Expander degree for the internal degree reduction.
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub expander_degree: usize,
    /// Optional assignment to lift and evaluate.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    /// Embedded graph output (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Routing paths output (JSON): per matching, per source, an array of
    /// vertex words.
    #[arg(long)]
    pub paths_out: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
}

pub fn run(args: EmbedArgs) -> anyhow::Result<ExitCode> {
    let mut manifest = RunManifest::new("embed", args.seed);
    manifest
        .param("lambda", args.lambda)
        .param("m", args.m)
        .param("expander_degree", args.expander_degree)
        .hash_input("graph", &args.graph)?;

    let g = schema::read_graph(&args.graph)?;
    let embedded = embed(
        &g,
        args.lambda,
        args.m,
        args.seed,
        args.expander_degree,
        DEFAULT_THRESHOLD,
    )?;

    let mut rows = vec![
        format!("size,{}", embedded.size()),
        format!("alphabet_exponent,{}", embedded.alphabet_exponent()),
        format!("routings,{}", embedded.d),
        format!("slots_per_routing,{}", embedded.l),
        format!("base_alphabet,{}", embedded.sigma),
    ];
    manifest.param("size", embedded.size());

    if let Some(path) = &args.assignment {
        manifest.hash_input("assignment", path)?;
        let pi64 = schema::read_assignment(path, g.vertex_count)?;
        let pi: Vec<u32> = pi64.iter().map(|&v| v as u32).collect();
        let labels = embedded.lift(&pi);
        let sat = embedded.eval_sat(&labels);
        rows.push(format!("lifted_eval_sat,{sat}"));
    }

    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string(&embedded.to_json())?)?;
    }
    if let Some(path) = &args.paths_out {
        let all: Vec<serde_json::Value> =
            embedded.paths.iter().map(|p| p.to_json()).collect();
        std::fs::write(path, serde_json::to_string(&all)?)?;
    }
    manifest.finish();
    if let Some(path) = &args.manifest_out {
        manifest.write_full(path)?;
    }
    write_report(&args.report, &manifest, "metric,value", &rows)?;
    println!(
        "embedded onto the de Bruijn graph: {} edges, alphabet exponent {}",
        embedded.size(),
        embedded.alphabet_exponent()
    );
    Ok(ExitCode::SUCCESS)
}
