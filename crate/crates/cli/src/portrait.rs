use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twocentre::portrait::{
    admissible_range, classify_regime, critical_points, level_curve, separatrices, Regime,
};

use crate::output::{json_text, num, write_atomic, Csv};

/// `auto` or a list of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LevelsRepr", into = "LevelsRepr")]
pub enum Levels {
    Auto,
    List(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LevelsRepr {
    Word(String),
    List(Vec<f64>),
}

impl TryFrom<LevelsRepr> for Levels {
    type Error = String;
    fn try_from(r: LevelsRepr) -> Result<Self, String> {
        match r {
            LevelsRepr::Word(s) => s.parse(),
            LevelsRepr::List(v) => Ok(Levels::List(v)),
        }
    }
}

impl From<Levels> for LevelsRepr {
    fn from(l: Levels) -> Self {
        match l {
            Levels::Auto => LevelsRepr::Word("auto".into()),
            Levels::List(v) => LevelsRepr::List(v),
        }
    }
}

impl FromStr for Levels {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(Levels::Auto);
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad level '{x}': {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Levels::List)
    }
}

impl fmt::Display for Levels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Levels::Auto => f.write_str("auto"),
            Levels::List(v) => {
                let parts: Vec<String> = v.iter().map(f64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct PortraitArgs {
    /// Ratio r/a of the centre separation to the semi-major axis.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Levels of Ê₀: `auto` or a comma-separated list.
    #[arg(long)]
    pub levels: Option<Levels>,
    /// Samples of |Ĝ| per quadrant.
    #[arg(long)]
    pub points: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SeparatrixArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Three levels inside each band between consecutive boundary levels, plus
/// the separatrix levels themselves.
pub fn auto_levels(delta: f64) -> Result<Vec<f64>> {
    let (lo, hi) = admissible_range(delta)?;
    let mut marks = vec![lo, hi];
    for special in [delta, 1.0] {
        if special > lo && special < hi {
            marks.push(special);
        }
    }
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let mut out = vec![];
    for w in marks.windows(2) {
        for f in [0.25, 0.5, 0.75] {
            out.push(w[0] + (w[1] - w[0]) * f);
        }
        if w[1] < hi {
            out.push(w[1]);
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct LevelEntry {
    ehat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SeparatrixEntry {
    s0: Option<String>,
    s1: String,
    note: Option<String>,
}

#[derive(Debug, Serialize)]
struct PortraitManifest {
    delta: f64,
    admissible: (f64, f64),
    levels: Vec<LevelEntry>,
    separatrices: SeparatrixEntry,
    critical_points: String,
}

fn write_separatrices(delta: f64, points: usize, out: &Path) -> Result<SeparatrixEntry> {
    let s = separatrices(delta, points)?;
    let s0 = match &s.s0 {
        Some(curve) => {
            let mut csv = Csv::new(&["gbar", "Ghat", "branch"]);
            for p in curve {
                csv.row(&[num(p.gbar), num(p.ghat), p.branch.to_string()]);
            }
            csv.save(&out.join("S0.csv"))?;
            Some("S0.csv".to_string())
        }
        None => None,
    };
    let mut csv = Csv::new(&["gbar", "Ghat", "part"]);
    for (part, pts) in [
        ("horizontal", &s.s1_horizontal),
        ("vertical", &s.s1_vertical),
    ] {
        for &(g, y) in pts {
            csv.row(&[num(g), num(y), part.to_string()]);
        }
    }
    csv.save(&out.join("S1.csv"))?;
    Ok(SeparatrixEntry {
        s0,
        s1: "S1.csv".into(),
        note: s.note,
    })
}

fn one_level(k: usize, ehat: f64, delta: f64, points: usize, out: &Path) -> LevelEntry {
    let run = || -> Result<LevelEntry> {
        let regime = classify_regime(delta, ehat)?;
        let curve = level_curve(ehat, delta, points)?;
        let tag = regime.label.to_string();
        let mut csv = Csv::new(&["gbar", "Ghat", "branch", "regime"]);
        for p in &curve {
            csv.row(&[num(p.gbar), num(p.ghat), p.branch.to_string(), tag.clone()]);
        }
        let name = format!("level_{k:03}.csv");
        csv.save(&out.join(&name))?;
        Ok(LevelEntry {
            ehat,
            regime: Some(regime),
            file: Some(name),
            points: Some(curve.len()),
            error: None,
        })
    };
    run().unwrap_or_else(|e| LevelEntry {
        ehat,
        regime: None,
        file: None,
        points: None,
        error: Some(e.to_string()),
    })
}

/// Returns the number of levels that could not be drawn.
pub fn portrait(args: &PortraitArgs) -> Result<usize> {
    let delta = args.delta.context("--delta is required")?;
    let points = args.points.unwrap_or(200);
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let admissible = admissible_range(delta)?;
    let levels = match args.levels.clone().unwrap_or(Levels::Auto) {
        Levels::Auto => auto_levels(delta)?,
        Levels::List(v) => v,
    };
    let entries: Vec<LevelEntry> = levels
        .par_iter()
        .enumerate()
        .map(|(k, &e)| one_level(k, e, delta, points, &out))
        .collect();
    let failed = entries.iter().filter(|e| e.error.is_some()).count();
    for e in entries.iter().filter(|e| e.error.is_some()) {
        eprintln!("level {}: {}", e.ehat, e.error.as_deref().unwrap_or(""));
    }
    let separatrices = write_separatrices(delta, points, &out)?;
    write_atomic(
        &out.join("critical_points.json"),
        json_text(&critical_points(delta)?)?.as_bytes(),
    )?;
    let manifest = PortraitManifest {
        delta,
        admissible,
        levels: entries,
        separatrices,
        critical_points: "critical_points.json".into(),
    };
    write_atomic(&out.join("manifest.json"), json_text(&manifest)?.as_bytes())?;
    Ok(failed)
}

pub fn separatrix(args: &SeparatrixArgs) -> Result<()> {
    let delta = args.delta.context("--delta is required")?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let entry = write_separatrices(delta, args.points.unwrap_or(200), &out)?;
    #[derive(Serialize)]
    struct Manifest {
        delta: f64,
        #[serde(flatten)]
        files: SeparatrixEntry,
    }
    write_atomic(
        &out.join("separatrix.json"),
        json_text(&Manifest {
            delta,
            files: entry,
        })?
        .as_bytes(),
    )
}
