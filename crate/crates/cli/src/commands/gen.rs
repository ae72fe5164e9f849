use crate::manifest::RunManifest;
use crate::schema;
use clap::ValueEnum;
use pcp_forge_core::graph::{cycle_inequality_instance, planted_instance, Constraint, ConstraintGraph};
use pcp_forge_core::rng;
use rand::Rng;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphKind {
    /// Random graph with a planted satisfying assignment.
    Planted,
    /// The directed 3-cycle with inequality constraints over {0, 1}.
    Cycle,
    /// Random pair-set constraints (usually unsatisfiable).
    Random,
}

#[derive(clap::Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    #[arg(long, default_value_t = 8)]
    pub vertices: usize,
    #[arg(long, default_value_t = 16)]
    pub edges: usize,
    #[arg(long, default_value_t = 2)]
    pub alphabet: u32,
    #[arg(long)]
    pub seed: u64,
    /// Output graph file.
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar with the planted assignment (planted kind only).
    #[arg(long)]
    pub assignment_out: Option<PathBuf>,
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct GenCircuitArgs {
    /// Number of witness symbols.
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    /// Bits per witness symbol.
    #[arg(long, default_value_t = 2)]
    pub u: usize,
    /// Gate count.
    #[arg(long, default_value_t = 16)]
    pub gates: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar with one satisfying witness.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

pub fn run_circuit(args: GenCircuitArgs) -> anyhow::Result<ExitCode> {
    let mut r = rng::root(args.seed);
    let (circuit, witness) = pcp_forge_core::decoding::circuit::random_satisfiable_circuit(
        args.t,
        args.u,
        args.gates,
        &mut r,
        &pcp_forge_core::budget::Budget::default(),
    )?;
    schema::write_circuit(&args.out, &circuit)?;
    if let Some(path) = &args.witness_out {
        schema::write_assignment(path, &witness)?;
    }
    println!(
        "wrote {} (t = {}, u = {}, {} gates)",
        args.out.display(),
        circuit.t,
        circuit.u,
        circuit.size()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn run(args: GenArgs) -> anyhow::Result<ExitCode> {
    let mut manifest = RunManifest::new("gen", args.seed);
    manifest
        .param("kind", format!("{:?}", args.kind))
        .param("vertices", args.vertices)
        .param("edges", args.edges)
        .param("alphabet", args.alphabet);

    let mut r = rng::root(args.seed);
    let (graph, planted) = match args.kind {
        GraphKind::Planted => {
            let (g, pi) = planted_instance(args.vertices, args.edges, args.alphabet, 1, &mut r);
            (g, Some(pi))
        }
        GraphKind::Cycle => (cycle_inequality_instance(), None),
        GraphKind::Random => {
            let mut g = ConstraintGraph::new(args.alphabet, args.vertices);
            for _ in 0..args.edges {
                let u = r.gen_range(0..args.vertices);
                let v = r.gen_range(0..args.vertices);
                let mut pairs = BTreeSet::new();
                for _ in 0..2 {
                    pairs.insert((
                        r.gen_range(0..args.alphabet),
                        r.gen_range(0..args.alphabet),
                    ));
                }
                g.add_edge(u, v, Constraint::Pairs(pairs));
            }
            (g, None)
        }
    };
    schema::write_graph(&args.out, &graph)?;
    if let Some(path) = &args.assignment_out {
        let pi = planted.ok_or_else(|| anyhow::anyhow!("only planted graphs carry an assignment"))?;
        schema::write_assignment(path, &pi.iter().map(|&v| v as u64).collect::<Vec<_>>())?;
    }
    manifest.finish();
    if let Some(path) = &args.manifest_out {
        manifest.write_full(path)?;
    }
    println!(
        "wrote {} ({} vertices, {} edges, alphabet {})",
        args.out.display(),
        graph.vertex_count,
        graph.size(),
        graph.alphabet_size
    );
    Ok(ExitCode::SUCCESS)
}
