use super::ExperimentFlags;
use crate::manifest::{write_report, RunManifest};
use crate::schema;
use pcp_forge_core::budget::Budget;
use pcp_forge_core::decoding::build::udpcp_to_vertex_decoding_graph;
use pcp_forge_core::decoding::edecoder::{run_e_decoder, sample_edecoder_instance, LinearDecodingGraph};
use pcp_forge_core::decoding::embed::embed_decoding;
use pcp_forge_core::decoding::pcpp::{pcpp_to_udpcp, toy_pcpp};
use pcp_forge_core::decoding::{eval_decoding, smoothness};
use pcp_forge_core::derand::lift_assignment;
use pcp_forge_core::rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args, Debug)]
pub struct DecodeArgs {
    /// Input circuit (JSON: {t, u, gates}).
    #[arg(long)]
    pub circuit: PathBuf,
    /// De Bruijn alphabet size (must be at least 4 * expander_degree^2).
    #[arg(long)]
    pub lambda: usize,
    /// De Bruijn word length.
    #[arg(long)]
    pub m: usize,
    /// Subspace dimensions for the decoder experiment.
    #[arg(long, default_value_t = 1)]
    pub d0: usize,
    #[arg(long, default_value_t = 2)]
    pub d1: usize,
    /// Consistency-expander degree (even).
    #[arg(long, default_value_t = 4)]
    pub expander_degree: usize,
    /// Spectral bound the expanders must clear; degree-2 expanders on large
    /// clouds cannot pass the default and need this raised.
    #[arg(long, default_value_t = pcp_forge_core::graph::expander::DEFAULT_THRESHOLD)]
    pub expander_threshold: f64,
    #[command(flatten)]
    pub flags: ExperimentFlags,
}

pub fn run(args: DecodeArgs) -> anyhow::Result<ExitCode> {
    let mut manifest = RunManifest::new("decode-pipeline", args.flags.seed);
    manifest
        .param("lambda", args.lambda)
        .param("m", args.m)
        .param("d0", args.d0)
        .param("d1", args.d1)
        .param("expander_degree", args.expander_degree)
        .param("trials", args.flags.trials)
        .hash_input("circuit", &args.circuit)?;

    let budget = Budget::new(args.flags.budget);
    let phi = schema::read_circuit(&args.circuit)?;
    let witnesses = phi.satisfying_assignments(&budget)?;
    anyhow::ensure!(!witnesses.is_empty(), "circuit is unsatisfiable");
    let witness = witnesses[0].clone();

    let decoder = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
    let mut rows = vec![format!(
        "udpcp_params,r={};q={};ell={};rho={},0,{},0,0,0,0",
        decoder.r, decoder.q, decoder.ell, decoder.rho, args.flags.seed
    )];
    let built = udpcp_to_vertex_decoding_graph(
        decoder,
        phi.clone(),
        args.expander_degree,
        args.expander_threshold,
        args.flags.seed,
    )?;
    let honest = built.honest_assignment(&witness);
    let (err, rej) = eval_decoding(&built.graph, &honest, &witness)?;
    rows.push(format!(
        "vertex_decoding_graph,vertices={};size={};smoothness={};err={err};reject={rej},0,{},0,0,0,0",
        built.graph.vertex_count,
        built.graph.edges.len(),
        smoothness(&built.graph)?,
        args.flags.seed
    ));

    let pipeline = embed_decoding(
        &built.graph,
        args.lambda,
        args.m,
        args.expander_degree,
        args.expander_threshold,
        args.flags.seed.wrapping_add(1),
    )?;
    let reduced_labels = pipeline.reduced.lift_assignment(&built.graph, &honest);
    let (err, rej) = eval_decoding(&pipeline.reduced.graph, &reduced_labels, &witness)?;
    rows.push(format!(
        "reduced,vertices={};size={};smoothness={};err={err};reject={rej},0,{},0,0,0,0",
        pipeline.reduced.graph.vertex_count,
        pipeline.reduced.graph.edges.len(),
        smoothness(&pipeline.reduced.graph)?,
        args.flags.seed
    ));
    let padded_labels = pipeline.padded.lift_assignment(&reduced_labels);
    let (err, rej) = eval_decoding(&pipeline.padded.graph, &padded_labels, &witness)?;
    rows.push(format!(
        "padded,vertices={};size={};smoothness={};err={err};reject={rej},0,{},0,0,0,0",
        pipeline.padded.graph.vertex_count,
        pipeline.padded.graph.edges.len(),
        smoothness(&pipeline.padded.graph)?,
        args.flags.seed
    ));
    let embedded_labels = pipeline.embedded.lift_assignment(&padded_labels);
    let (err, rej) = eval_decoding(&pipeline.embedded.graph, &embedded_labels, &witness)?;
    rows.push(format!(
        "embedded,vertices={};size={};smoothness={};err={err};reject={rej},0,{},0,0,0,0",
        pipeline.embedded.graph.vertex_count,
        pipeline.embedded.graph.edges.len(),
        smoothness(&pipeline.embedded.graph)?,
        args.flags.seed
    ));

    // subspace-decoder completeness experiment on a linear decoding graph
    // with the same witness shape
    let m_dec = (2 * args.d1).max(args.m);
    let toy = LinearDecodingGraph::random(
        2,
        m_dec,
        2 * args.d1 + 1,
        phi.t,
        phi.u,
        4,
        args.flags.seed.wrapping_add(2),
        &budget,
    )?;
    let oracle = lift_assignment(toy.pi_star.clone());
    let mut r = rng::stream(args.flags.seed, 500);
    let mut correct = 0u64;
    for trial in 0..args.flags.trials {
        let k = (trial % toy.t as u64) as usize;
        let (e, inst) = sample_edecoder_instance(&toy, k, args.d0, args.d1, &mut r)?;
        let out = run_e_decoder(&toy, &oracle, &e, &inst, &mut r)?;
        if out.output == Some(toy.x_star[k]) {
            correct += 1;
        }
    }
    let rate = correct as f64 / args.flags.trials.max(1) as f64;
    rows.push(format!(
        "edecoder_honest_decode_rate,q=2;m={m_dec};d0={};d1={},{},{},{rate},0,{rate},{rate}",
        args.d0, args.d1, args.flags.trials, args.flags.seed
    ));

    manifest.finish();
    if let Some(path) = &args.flags.manifest_out {
        manifest.write_full(path)?;
    }
    write_report(
        &args.flags.report,
        &manifest,
        "stage,params,trials,seed,estimate,stderr,ci_lo,ci_hi",
        &rows,
    )?;
    println!(
        "pipeline complete: embedded size {} with honest decode rate {rate}",
        pipeline.embedded.graph.edges.len()
    );
    Ok(ExitCode::SUCCESS)
}
