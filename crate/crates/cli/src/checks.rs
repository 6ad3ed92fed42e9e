use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twocentre::hamiltonians::e0_in_k;
use twocentre::secular::{average_potential_detailed, ei_params, f_tilde, QuadratureSpec};
use twocentre::verify::{run_suite, Suite, SuiteReport};
use twocentre::MassParams;

use crate::output::emit_json;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct MassArgs {
    /// Reduced mass of the moving body.
    #[arg(long)]
    pub m: Option<f64>,
    /// Mass parameter of the primary centre.
    #[arg(long)]
    pub big_m: Option<f64>,
    /// Mass parameter of the secondary centre.
    #[arg(long)]
    pub big_m_prime: Option<f64>,
}

impl MassArgs {
    pub fn masses(&self, secondary: f64) -> Result<MassParams> {
        Ok(MassParams::new(
            self.m.unwrap_or(1.0),
            self.big_m.unwrap_or(1.0),
            self.big_m_prime.unwrap_or(secondary),
            1.0,
        )?)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct AverageArgs {
    /// Distance of the secondary centre.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub gbar: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub masses: MassArgs,
    /// Initial trapezoid node count.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_doublings: Option<u32>,
    /// Report path, `-` for stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct AverageReport {
    r: f64,
    lambda: f64,
    gamma: f64,
    theta: f64,
    gbar: f64,
    masses: MassParams,
    quadrature: QuadratureSpec,
    u: f64,
    nodes: usize,
    change: f64,
    e0: f64,
    ecal: Option<f64>,
    ical: Option<f64>,
    f_tilde: Option<f64>,
    /// `|m M' F̃ + U|`.
    normal_form_residual: Option<f64>,
    note: Option<String>,
}

pub fn average(args: &AverageArgs) -> Result<()> {
    let masses = args.masses.masses(1.0)?;
    let lambda = args.lambda.unwrap_or(1.0);
    let gamma = args.gamma.unwrap_or(0.8 * lambda);
    let theta = args.theta.unwrap_or(0.0);
    let gbar = args.gbar.unwrap_or(0.0);
    let r = args
        .r
        .unwrap_or_else(|| 3.0 * masses.semi_major_axis(lambda));
    let default = QuadratureSpec::default();
    let q = QuadratureSpec {
        nodes: args.nodes.unwrap_or(default.nodes),
        tol: args.tol.unwrap_or(default.tol),
        max_doublings: args.max_doublings.unwrap_or(default.max_doublings),
    };
    let u = average_potential_detailed(r, lambda, theta, gamma, gbar, &masses, &q)?;
    let e0 = e0_in_k(lambda, gamma, theta, r, gbar, &masses)?;
    let (mut ecal, mut ical, mut ft, mut resid, mut note) = (None, None, None, None, None);
    match ei_params(lambda, theta, e0)
        .and_then(|(e, i)| Ok((e, i, f_tilde(r, masses.semi_major_axis(lambda), e, i, &q)?)))
    {
        Ok((e, i, f)) => {
            ecal = Some(e);
            ical = Some(i);
            ft = Some(f);
            resid = Some((masses.m * masses.big_m_prime * f + u.value).abs());
        }
        Err(e) => note = Some(format!("normal form not evaluated: {e}")),
    }
    let report = AverageReport {
        r,
        lambda,
        gamma,
        theta,
        gbar,
        masses,
        quadrature: q,
        u: u.value,
        nodes: u.nodes,
        change: u.change,
        e0,
        ecal,
        ical,
        f_tilde: ft,
        normal_form_residual: resid,
        note,
    };
    emit_json(&args.json.clone().unwrap_or_else(|| "-".into()), &report)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    /// Suites to run, comma-separated; all when absent.
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<Suite>>,
    /// Sample count per suite (grid side for kepler).
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path, `-` for stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Directory of the report when `--json` is absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn verify(args: &VerifyArgs) -> Result<bool> {
    let suites = args.suite.clone().unwrap_or_else(|| Suite::ALL.to_vec());
    let seed = args.seed.unwrap_or(0);
    let reports: Vec<SuiteReport> = suites
        .par_iter()
        .map(|&s| run_suite(s, seed, args.points.unwrap_or_else(|| s.default_points())))
        .collect();
    for r in &reports {
        let worst = r
            .checks
            .iter()
            .map(|c| format!("{} {:.2e}/{:.0e}", c.name, c.max_residual, c.threshold))
            .collect::<Vec<_>>()
            .join(", ");
        eprintln!(
            "{:<15} {}  {worst}{}",
            r.suite.to_string(),
            if r.passed { "pass" } else { "FAIL" },
            r.error
                .as_deref()
                .map(|e| format!(" error: {e}"))
                .unwrap_or_default()
        );
    }
    let report = VerifyReport {
        seed,
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    };
    let target = args.json.clone().unwrap_or_else(|| {
        args.out
            .clone()
            .unwrap_or_else(|| ".".into())
            .join("verify_report.json")
    });
    emit_json(&target, &report)?;
    Ok(report.passed)
}
