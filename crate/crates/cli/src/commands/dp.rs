use super::ExperimentFlags;
use crate::manifest::{write_report, RunManifest};
use crate::schema;
use clap::ValueEnum;
use pcp_forge_core::budget::Budget;
use pcp_forge_core::dp::{
    encode_p, encode_p2, encode_s, estimate_acceptance, exact_acceptance, DpKind, DpOracle,
};
use pcp_forge_core::field::Field;
use pcp_forge_core::stats::EstimatorConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TestName {
    P,
    S,
    P2,
}

#[derive(clap::Args, Debug)]
pub struct DpArgs {
    #[arg(long, value_enum)]
    pub test: TestName,
    /// Field order.
    #[arg(long)]
    pub q: u64,
    /// Vertex-space dimension.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub d0: usize,
    #[arg(long)]
    pub d1: usize,
    /// Proof alphabet size.
    #[arg(long, default_value_t = 2)]
    pub sigma: u64,
    /// honest:<pi.json>, random, or refuse.
    #[arg(long, default_value = "random")]
    pub assignment: String,
    /// Optional corruption: point_noise:<p> or block:<fraction>.
    #[arg(long)]
    pub corrupt: Option<String>,
    /// Also compute the exact enumerated acceptance (within budget).
    #[arg(long, default_value_t = false)]
    pub exact: bool,
    #[command(flatten)]
    pub flags: ExperimentFlags,
}

pub fn build_oracle(
    kind: DpKind,
    spec: &str,
    sigma: u64,
    point_count: usize,
    seed: u64,
) -> anyhow::Result<DpOracle> {
    if spec == "random" {
        return Ok(DpOracle::Randomized { sigma });
    }
    if spec == "refuse" {
        return Ok(DpOracle::RefuseAll);
    }
    if let Some(path) = spec.strip_prefix("honest:") {
        let pi = schema::read_assignment(&PathBuf::from(path), point_count)?;
        return Ok(match kind {
            DpKind::P => encode_p(pi),
            DpKind::S => encode_s(pi),
            DpKind::P2 => {
                let pi2 = pi.clone();
                encode_p2(pi, pi2)
            }
        });
    }
    if spec == "honest-random" {
        // honest encoding of a seeded random assignment
        let mut r = pcp_forge_core::rng::stream(seed, 123);
        let pi: Vec<u64> = (0..point_count)
            .map(|_| rand::Rng::gen_range(&mut r, 0..sigma))
            .collect();
        return Ok(match kind {
            DpKind::P => encode_p(pi),
            DpKind::S => encode_s(pi),
            DpKind::P2 => {
                let pi2 = pi.clone();
                encode_p2(pi, pi2)
            }
        });
    }
    anyhow::bail!("unknown assignment spec '{spec}' (use honest:<file>, honest-random, random, refuse)")
}

fn apply_corruption(
    oracle: DpOracle,
    corrupt: &Option<String>,
    sigma: u64,
    seed: u64,
) -> anyhow::Result<DpOracle> {
    let Some(spec) = corrupt else {
        return Ok(oracle);
    };
    if let Some(p) = spec.strip_prefix("point_noise:") {
        return Ok(DpOracle::PointNoise {
            inner: Box::new(oracle),
            p: p.parse()?,
            sigma,
            seed: seed ^ 0x706e,
        });
    }
    if let Some(f) = spec.strip_prefix("block:") {
        return Ok(DpOracle::BlockReplace {
            inner: Box::new(oracle),
            fraction: f.parse()?,
            sigma,
            seed: seed ^ 0x626c,
        });
    }
    anyhow::bail!("unknown corruption '{spec}' (use point_noise:<p> or block:<fraction>)")
}

pub fn run(args: DpArgs) -> anyhow::Result<ExitCode> {
    let kind = match args.test {
        TestName::P => DpKind::P,
        TestName::S => DpKind::S,
        TestName::P2 => DpKind::P2,
    };
    let mut manifest = RunManifest::new("dp", args.flags.seed);
    manifest
        .param("test", format!("{:?}", args.test))
        .param("q", args.q)
        .param("m", args.m)
        .param("d0", args.d0)
        .param("d1", args.d1)
        .param("sigma", args.sigma)
        .param("assignment", &args.assignment)
        .param("trials", args.flags.trials);
    if let Some(c) = &args.corrupt {
        manifest.param("corrupt", c);
    }

    let field = Field::new(args.q)?;
    let point_count = (args.q as u128).pow(args.m as u32);
    anyhow::ensure!(point_count <= 1 << 30, "vertex space too large");
    let oracle = build_oracle(
        kind,
        &args.assignment,
        args.sigma,
        point_count as usize,
        args.flags.seed,
    )?;
    let oracle = apply_corruption(oracle, &args.corrupt, args.sigma, args.flags.seed)?;

    let cfg = EstimatorConfig::new(args.flags.trials, args.flags.seed)
        .with_workers(args.flags.workers);
    let report = estimate_acceptance(&field, kind, &oracle, args.d0, args.d1, args.m, cfg);
    let mut rows = vec![report.csv_row()];
    if args.exact {
        let exact = exact_acceptance(
            &field,
            kind,
            &oracle,
            args.d0,
            args.d1,
            args.m,
            &Budget::new(args.flags.budget),
        )?;
        rows.push(format!(
            "exact,{},0,{},{exact},0,{exact},{exact}",
            report.params, args.flags.seed
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
        "{}: acceptance {} +- {} over {} trials",
        report.test, report.estimate, report.stderr, report.trials
    );
    Ok(ExitCode::SUCCESS)
}
