use super::ExperimentFlags;
use crate::manifest::{write_report, RunManifest};
use crate::schema;
use pcp_forge_core::budget::Budget;
use pcp_forge_core::derand::{
    estimate_f_hits_violations, estimate_product_sat, exact_product_acceptance, lift_assignment,
    materialize_small, params_check, LinearGraph, ProductOracle,
};
use pcp_forge_core::stats::EstimatorConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(clap::Args, Debug)]
pub struct DerandArgs {
    /// Input graph (must have linear structure over F_q).
    #[arg(long)]
    pub graph: PathBuf,
    /// Field order of the vertex space.
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub d0: usize,
    #[arg(long)]
    pub d1: usize,
    /// honest:<pi.json>, random, or refuse.
    #[arg(long)]
    pub assignment: String,
    /// Also enumerate the exact acceptance and the materialized graph.
    #[arg(long, default_value_t = false)]
    pub exact: bool,
    /// Configured universal constant for the advisory parameter check.
    #[arg(long, default_value_t = 1.0)]
    pub h_config: f64,
    #[command(flatten)]
    pub flags: ExperimentFlags,
}

pub fn run(args: DerandArgs) -> anyhow::Result<ExitCode> {
    let mut manifest = RunManifest::new("derand", args.flags.seed);
    manifest
        .param("q", args.q)
        .param("d0", args.d0)
        .param("d1", args.d1)
        .param("assignment", &args.assignment)
        .param("trials", args.flags.trials)
        .param("h_config", args.h_config)
        .hash_input("graph", &args.graph)?;

    let budget = Budget::new(args.flags.budget);
    let g = schema::read_graph(&args.graph)?;
    let linear = LinearGraph::from_constraint_graph(&g, args.q, &budget)?;

    let params = params_check(
        args.q,
        linear.m,
        linear.dim_e(),
        args.d0,
        args.d1,
        0.0,
        args.h_config,
    );

    let (oracle, honest_pi) = match args.assignment.as_str() {
        "random" => (
            ProductOracle::Randomized {
                sigma: linear.sigma,
            },
            None,
        ),
        "refuse" => (ProductOracle::RefuseAll, None),
        spec => {
            let path = spec
                .strip_prefix("honest:")
                .ok_or_else(|| anyhow::anyhow!("unknown assignment spec '{spec}'"))?;
            manifest.hash_input("assignment", &PathBuf::from(path))?;
            let pi = schema::read_assignment(
                &PathBuf::from(path),
                (args.q as usize).pow(linear.m as u32),
            )?;
            (lift_assignment(pi.clone()), Some(pi))
        }
    };

    let cfg = EstimatorConfig::new(args.flags.trials, args.flags.seed)
        .with_workers(args.flags.workers);
    let report = estimate_product_sat(&linear, args.d0, args.d1, &oracle, cfg);
    let mut rows = vec![report.csv_row()];
    rows.push(format!(
        "params_check,target={};dim_ok={};rho_target_note=advisory,0,{},{},0,0,0",
        params.target, params.dimension_ok, args.flags.seed, params.target
    ));

    if let Some(pi) = &honest_pi {
        let violated = linear.violated_edges(pi, &budget)?;
        let hit = estimate_f_hits_violations(&linear, args.d0, args.d1, &violated, cfg);
        rows.push(hit.csv_row());
    }
    if args.exact {
        let exact = exact_product_acceptance(&linear, args.d0, args.d1, &oracle, &budget)?;
        rows.push(format!(
            "exact_acceptance,q={};d0={};d1={},0,{},{exact},0,{exact},{exact}",
            args.q, args.d0, args.d1, args.flags.seed
        ));
        let mat = materialize_small(&linear, args.d0, args.d1, &budget)?;
        let mat_sat = mat.eval_sat(&linear, &oracle)?;
        rows.push(format!(
            "materialized_sat,left={};right={},0,{},{mat_sat},0,{mat_sat},{mat_sat}",
            mat.left.len(),
            mat.right.len(),
            args.flags.seed
        ));
    }
    manifest.finish();
    if let Some(path) = &args.flags.manifest_out {
        manifest.write_full(path)?;
    }
    write_report(
        &args.flags.report,
        &manifest,
        pcp_forge_core::ExperimentReport::csv_header(),
        &rows,
    )?;
    println!(
        "product test acceptance {} +- {} over {} trials",
        report.estimate, report.stderr, report.trials
    );
    Ok(ExitCode::SUCCESS)
}
