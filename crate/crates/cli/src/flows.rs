use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use twocentre::dynamics::{
    integrate, relative_drift, run_experiment, Coupling, ExperimentConfig, ExperimentSummary,
    IntegratorConfig, Sample, Stop, ThreeBodyState, TwoCentre,
};
use twocentre::portrait::{
    aa_action, aa_transform, collision_orbit, ehat0, measure_leading_period,
};

use crate::checks::MassArgs;
use crate::output::{json_text, write_atomic, Csv};

fn out_dir(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CollisionArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Time of closest approach to the circular orbit.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Half-width of the window in units of 1/(σΛ).
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Sign of Γ, 1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    pub branch: Option<i8>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn collision(args: &CollisionArgs) -> Result<()> {
    let delta = args.delta.context("--delta is required")?;
    let l = args.lambda.unwrap_or(1.0);
    let t0 = args.t0.unwrap_or(0.0);
    let span = args.span.unwrap_or(5.0);
    let n = args.samples.unwrap_or(401);
    let branch = args.branch.unwrap_or(1);
    if n < 2 {
        bail!("need at least 2 samples");
    }
    if !(delta > 0.0 && delta < 2.0) {
        bail!("δ = {delta}: the collision level exists only for 0 < δ < 2");
    }
    let sigma = (delta * (2.0 - delta)).sqrt();
    let mut csv = Csv::new(&["t", "Gamma", "gbar", "Ehat"]);
    for k in 0..n {
        let u = 2.0 * k as f64 / (n - 1) as f64 - 1.0;
        let t = t0 + span * u / (sigma * l);
        let (g, gb) = collision_orbit(delta, l, t, t0, branch)?;
        csv.numbers(&[t, g, gb, ehat0(gb, g / l, delta)]);
    }
    csv.save(&out_dir(&args.out).join("collision_orbit.csv"))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ActionAngleArgs {
    /// Action 𝓛.
    #[arg(long)]
    pub l_cal: Option<f64>,
    /// Levels ℰ of the leading term, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ecal: Option<Vec<f64>>,
    /// Samples of the angle γ per level.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct PeriodEntry {
    ecal: f64,
    g_cal: f64,
    period: Option<f64>,
    expected: f64,
    rel_error: Option<f64>,
    error: Option<String>,
}

pub fn action_angle(args: &ActionAngleArgs) -> Result<()> {
    let lc = args.l_cal.unwrap_or(1.0);
    let levels = args
        .ecal
        .clone()
        .unwrap_or_else(|| vec![0.2, 0.7, -0.2, -0.7]);
    let n = args.samples.unwrap_or(64);
    let tol = args.rel_tol.unwrap_or(1e-12);
    let out = out_dir(&args.out);
    let mut csv = Csv::new(&["ecal", "gamma", "Lambda", "Gamma", "gbar", "lead"]);
    let mut entries = vec![];
    for &e in &levels {
        let gc = aa_action(lc, e)?;
        let expected = TAU * lc;
        let (period, rel_error, error) = match measure_leading_period(lc, e, tol) {
            Ok(t) => (Some(t), Some((t / expected - 1.0).abs()), None),
            Err(err) => (None, None, Some(err.to_string())),
        };
        entries.push(PeriodEntry {
            ecal: e,
            g_cal: gc,
            period,
            expected,
            rel_error,
            error,
        });
        if gc == 0.0 {
            continue;
        }
        for k in 0..n {
            let gamma = TAU * k as f64 / n as f64;
            let (big_l, big_g, _, gbar) = aa_transform(lc, gc, 0.0, gamma)?;
            let lead = (1.0 - (big_g / big_l).powi(2)).max(0.0).sqrt() * gbar.cos();
            csv.numbers(&[e, gamma, big_l, big_g, gbar, lead]);
        }
    }
    csv.save(&out.join("action_angle.csv"))?;
    write_atomic(
        &out.join("action_angle.json"),
        json_text(&entries)?.as_bytes(),
    )
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorArgs {
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Output cadence; every accepted step when absent.
    #[arg(long)]
    pub sample_dt: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
}

impl IntegratorArgs {
    fn apply(&self, mut cfg: IntegratorConfig) -> IntegratorConfig {
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if self.sample_dt.is_some() {
            cfg.sample_dt = self.sample_dt;
        }
        if let Some(r) = self.rtol {
            cfg.rel_tol = r;
        }
        if let Some(a) = self.atol {
            cfg.abs_tol = a;
        }
        cfg
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoCentreArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub gbar: Option<f64>,
    #[arg(long)]
    pub vartheta: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub masses: MassArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct TwoCentreSummary {
    y0: [f64; 8],
    config: IntegratorConfig,
    samples: usize,
    t_final: f64,
    energy_drift: f64,
    euler_drift: f64,
    stop: Stop,
}

/// Returns whether the run reached its horizon.
pub fn two_centre(args: &TwoCentreArgs) -> Result<bool> {
    let masses = args.masses.masses(0.1)?;
    let l = args.lambda.unwrap_or(1.0);
    let y0 = [
        l,
        args.gamma.unwrap_or(0.7 * l),
        args.theta.unwrap_or(0.0),
        args.big_r.unwrap_or(0.0),
        args.ell.unwrap_or(0.0),
        args.gbar.unwrap_or(0.0),
        args.vartheta.unwrap_or(PI),
        args.r.unwrap_or_else(|| 10.0 * masses.semi_major_axis(l)),
    ];
    let period = TAU * l.powi(3) / (masses.m.powi(3) * masses.big_m.powi(2));
    let cfg = args.integrator.apply(IntegratorConfig {
        t_end: 10.0 * period,
        sample_dt: Some(period / 100.0),
        ..IntegratorConfig::default()
    });
    let mut samples: Vec<Sample<8>> = vec![];
    let stop = integrate(&TwoCentre { masses }, y0, &cfg, |s| {
        samples.push(s);
        true
    })?;
    let mut csv = Csv::new(&[
        "t", "Lambda", "Gamma", "Theta", "R", "ell", "gbar", "vartheta", "r", "J", "E",
    ]);
    for s in &samples {
        let mut row = vec![s.t];
        row.extend_from_slice(&s.y);
        row.push(s.invariants.energy);
        row.push(s.invariants.euler.unwrap_or(f64::NAN));
        csv.numbers(&row);
    }
    let out = out_dir(&args.out);
    csv.save(&out.join("two_centre.csv"))?;
    let completed = stop == Stop::Completed;
    let summary = TwoCentreSummary {
        y0,
        config: cfg,
        samples: samples.len(),
        t_final: samples.last().map_or(0.0, |s| s.t),
        energy_drift: relative_drift(&samples, |s| s.invariants.energy),
        euler_drift: relative_drift(&samples, |s| s.invariants.euler.unwrap_or(f64::NAN)),
        stop,
    };
    write_atomic(
        &out.join("two_centre_summary.json"),
        json_text(&summary)?.as_bytes(),
    )?;
    Ok(completed)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub gbar: Option<f64>,
    /// Total angular momentum.
    #[arg(long)]
    pub c: Option<f64>,
    /// Mass of each of the three bodies.
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub coupling: Option<Coupling>,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
    /// Also write a two-column projection; only `g-G` is known.
    #[arg(long)]
    pub project: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ExperimentReport {
    config: ExperimentConfig,
    #[serde(flatten)]
    summary: ExperimentSummary,
    files: Vec<String>,
}

/// Returns whether the run reached its horizon.
pub fn experiment(args: &ExperimentArgs) -> Result<bool> {
    if let Some(p) = args.project.as_deref() {
        if p != "g-G" {
            bail!("unknown projection '{p}' (only g-G)");
        }
    }
    let mut cfg = ExperimentConfig::default();
    let s = &mut cfg.state;
    for (field, value) in [
        (&mut s.big_r, args.big_r),
        (&mut s.big_l, args.lambda),
        (&mut s.big_g, args.gamma),
        (&mut s.r, args.r),
        (&mut s.ell, args.ell),
        (&mut s.gbar, args.gbar),
        (&mut cfg.c, args.c),
        (&mut cfg.m0, args.m0),
    ] {
        if let Some(v) = value {
            *field = v;
        }
    }
    if let Some(c) = args.coupling {
        cfg.coupling = c;
    }
    cfg.integrator = args.integrator.apply(cfg.integrator);
    let mut csv = Csv::new(&[
        "t", "R", "r", "Lambda", "ell", "Gamma", "gbar", "H", "E0hat",
    ]);
    let mut proj = Csv::new(&["gbar", "Gamma"]);
    let summary = run_experiment(&cfg, |sample, e0hat| {
        let st = ThreeBodyState::from_array(&sample.y);
        csv.numbers(&[
            sample.t,
            st.big_r,
            st.r,
            st.big_l,
            st.ell,
            st.big_g,
            st.gbar,
            sample.invariants.energy,
            e0hat,
        ]);
        proj.numbers(&[st.gbar, st.big_g]);
        true
    })?;
    let out = out_dir(&args.out);
    let mut files = vec!["experiment.csv".to_string()];
    csv.save(&out.join("experiment.csv"))?;
    if args.project.is_some() {
        proj.save(&out.join("experiment_g-G.csv"))?;
        files.push("experiment_g-G.csv".into());
    }
    let completed = summary.stop == Stop::Completed;
    if let Stop::Guard { t, reason } = &summary.stop {
        eprintln!("integration stopped at t = {t}: guard: {reason}");
    }
    let report = ExperimentReport {
        config: cfg,
        summary,
        files,
    };
    write_atomic(
        &out.join("experiment_summary.json"),
        json_text(&report)?.as_bytes(),
    )?;
    Ok(completed)
}
