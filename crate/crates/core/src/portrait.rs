//! Planar phase portrait of the normalized Kepler part of the Euler integral,
//! `Ê₀(ḡ, Ĝ) = Ĝ² + δ √(1 - Ĝ²) cos ḡ`, its collision orbit and the asymptotic
//! action-angle coordinates of its leading term.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    dop853_step, integrate, HamiltonianSystem, IntegratorConfig, LeadingFlow, Stop,
};
use crate::error::{domain, numeric, Result};
use crate::kepler::{wrap_angle, MassParams};

/// Slack allowed when checking a value against an analytic bound.
const EDGE_TOL: f64 = 1e-12;

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(domain(format!("δ = {delta} must be positive")));
    }
    Ok(())
}

pub fn ehat0(gbar: f64, ghat: f64, delta: f64) -> f64 {
    ghat * ghat + delta * (1.0 - ghat * ghat).max(0.0).sqrt() * gbar.cos()
}

/// Level sets, boundary levels and critical points of the portrait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    #[serde(rename = "1_1")]
    C11,
    #[serde(rename = "1_2")]
    C12,
    #[serde(rename = "1_3")]
    C13,
    #[serde(rename = "1_4")]
    C14,
    #[serde(rename = "1_5")]
    C15,
    #[serde(rename = "2_1")]
    C21,
    #[serde(rename = "2_2")]
    C22,
    #[serde(rename = "2_3")]
    C23,
    #[serde(rename = "2_4")]
    C24,
    #[serde(rename = "2_5")]
    C25,
    #[serde(rename = "3_1")]
    C31,
    #[serde(rename = "3_2")]
    C32,
    #[serde(rename = "3_3")]
    C33,
    S0,
    S1,
    #[serde(rename = "MIN")]
    Min,
    #[serde(rename = "SADDLE")]
    Saddle,
    #[serde(rename = "MAX")]
    Max,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RegimeLabel::*;
        let s = match self {
            C11 => "1_1",
            C12 => "1_2",
            C13 => "1_3",
            C14 => "1_4",
            C15 => "1_5",
            C21 => "2_1",
            C22 => "2_2",
            C23 => "2_3",
            C24 => "2_4",
            C25 => "2_5",
            C31 => "3_1",
            C32 => "3_2",
            C33 => "3_3",
            S0 => "S0",
            S1 => "S1",
            Min => "MIN",
            Saddle => "SADDLE",
            Max => "MAX",
        };
        f.write_str(s)
    }
}

/// Classification of one level `Ê` at given `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub label: RegimeLabel,
    /// Item of the case list the level belongs to, when the label is a curve
    /// or critical tag.
    pub item: Option<RegimeLabel>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub gbar: f64,
    pub ghat: f64,
    pub value: f64,
    pub kind: RegimeLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub delta: f64,
    /// Points with `Ĝ ≥ 0`; the portrait is even in `Ĝ`.
    pub points: Vec<CriticalPoint>,
    pub note: Option<String>,
}

pub fn critical_points(delta: f64) -> Result<CriticalSet> {
    check_delta(delta)?;
    let min = CriticalPoint {
        gbar: PI,
        ghat: 0.0,
        value: -delta,
        kind: RegimeLabel::Min,
    };
    let (points, note) = if delta < 2.0 {
        let saddle = CriticalPoint {
            gbar: 0.0,
            ghat: 0.0,
            value: delta,
            kind: RegimeLabel::Saddle,
        };
        let max = CriticalPoint {
            gbar: 0.0,
            ghat: (1.0 - delta * delta / 4.0).sqrt(),
            value: 1.0 + delta * delta / 4.0,
            kind: RegimeLabel::Max,
        };
        (vec![min, saddle, max], None)
    } else {
        let max = CriticalPoint {
            gbar: 0.0,
            ghat: 0.0,
            value: delta,
            kind: RegimeLabel::Max,
        };
        let note = (delta == 2.0)
            .then(|| "δ = 2: the maximum merges with the saddle, S0 contracts to P0".to_string());
        (vec![min, max], note)
    };
    Ok(CriticalSet {
        delta,
        points,
        note,
    })
}

/// Range `[Ê_min, Ê_max]` of `Ê₀`.
pub fn admissible_range(delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    Ok((
        -delta,
        if delta <= 2.0 {
            1.0 + delta * delta / 4.0
        } else {
            delta
        },
    ))
}

fn check_level(ehat: f64, delta: f64) -> Result<()> {
    let (lo, hi) = admissible_range(delta)?;
    if !(ehat >= lo && ehat <= hi) {
        return Err(domain(format!(
            "level Ê = {ehat} outside [{lo}, {hi}] for δ = {delta}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GRoots {
    /// `Ĝ₋²`, may be negative.
    pub minus_sq: f64,
    /// `Ĝ₊²`.
    pub plus_sq: f64,
    pub g_min: f64,
    pub g_max: f64,
}

/// Band `Ĝmin ≤ |Ĝ| ≤ Ĝmax` where the level `Ê` is defined.
pub fn g_roots(ehat: f64, delta: f64) -> Result<GRoots> {
    check_level(ehat, delta)?;
    let s = (1.0 + delta * delta / 4.0 - ehat).max(0.0).sqrt();
    // Ĝ±² = Ê - δ²/2 ± δ s, written without cancellation.
    let plus_sq = 1.0 - (delta / 2.0 - s).powi(2);
    let minus_sq = 1.0 - (delta / 2.0 + s).powi(2);
    Ok(GRoots {
        minus_sq,
        plus_sq,
        g_min: minus_sq.max(0.0).sqrt(),
        g_max: plus_sq.min(1.0).max(0.0).sqrt(),
    })
}

/// `(ḡ₊, ḡ₋)` on the level `Ê` at `Ĝ`, with `ḡ₊ ∈ [0, π]` and `ḡ₋ = -ḡ₊ mod 2π`.
pub fn level_branch(ehat: f64, delta: f64, ghat: f64) -> Result<(f64, f64)> {
    let roots = g_roots(ehat, delta)?;
    let x = ghat.abs();
    if !(x >= roots.g_min - EDGE_TOL && x <= roots.g_max + EDGE_TOL) {
        return Err(domain(format!(
            "|Ĝ| = {x} outside [{}, {}] on level Ê = {ehat}, δ = {delta}",
            roots.g_min, roots.g_max
        )));
    }
    let plus = if (x - roots.g_max).abs() <= EDGE_TOL {
        if ehat < 1.0 {
            PI
        } else if ehat == 1.0 {
            FRAC_PI_2
        } else {
            0.0
        }
    } else if roots.g_min > 0.0 && (x - roots.g_min).abs() <= EDGE_TOL {
        0.0
    } else {
        let c = (ehat - x * x) / (delta * (1.0 - x * x).sqrt());
        c.clamp(-1.0, 1.0).acos()
    };
    Ok((plus, wrap_angle(-plus)))
}

/// `∂ḡ₊/∂Ĝ` in the interior of the band.
pub fn g_derivative(ehat: f64, delta: f64, ghat: f64) -> Result<f64> {
    check_level(ehat, delta)?;
    let x = ghat;
    let w = 1.0 - x * x;
    if !(w > 0.0) {
        return Err(domain(format!("Ĝ = {x} on the boundary |Ĝ| = 1")));
    }
    let c = (ehat - x * x) / (delta * w.sqrt());
    let dc = x * (ehat - 2.0 + x * x) / (delta * w.powf(1.5));
    let s = 1.0 - c * c;
    if !(s > 0.0) {
        return Err(domain(format!(
            "Ĝ = {x} is an endpoint of the level Ê = {ehat}"
        )));
    }
    Ok(-dc / s.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    pub gbar: f64,
    pub ghat: f64,
    /// `+1` for `ḡ₊`, `-1` for `ḡ₋`.
    pub branch: i8,
}

/// Samples the level `Ê` on `n` values of `|Ĝ|` per quadrant, clustered at
/// the band ends, and glues the four copies `(±ḡ, ±Ĝ)`.
pub fn level_curve(ehat: f64, delta: f64, n: usize) -> Result<Vec<LevelPoint>> {
    if n < 2 {
        return Err(domain(format!("need at least 2 samples, got {n}")));
    }
    let roots = g_roots(ehat, delta)?;
    let mut out = Vec::with_capacity(4 * n);
    for k in 0..n {
        let u = 0.5 * (1.0 - (PI * k as f64 / (n - 1) as f64).cos());
        let x = roots.g_min + (roots.g_max - roots.g_min) * u;
        let (gp, gm) = level_branch(ehat, delta, x)?;
        let signs: &[f64] = if x == 0.0 { &[1.0] } else { &[1.0, -1.0] };
        for &sg in signs {
            out.push(LevelPoint {
                gbar: gp,
                ghat: sg * x,
                branch: 1,
            });
            if gm != gp {
                out.push(LevelPoint {
                    gbar: gm,
                    ghat: sg * x,
                    branch: -1,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separatrices {
    pub delta: f64,
    /// The level through the saddle; absent for `δ ≥ 2`.
    pub s0: Option<Vec<LevelPoint>>,
    /// `Ĝ = ±1`.
    pub s1_horizontal: Vec<(f64, f64)>,
    /// `Ĝ = ±√(1 - δ² cos² ḡ)` with `cos ḡ ≥ 0`.
    pub s1_vertical: Vec<(f64, f64)>,
    pub note: Option<String>,
}

pub fn separatrices(delta: f64, n: usize) -> Result<Separatrices> {
    check_delta(delta)?;
    if n < 2 {
        return Err(domain(format!("need at least 2 samples, got {n}")));
    }
    let s0 = if delta < 2.0 {
        Some(level_curve(delta, delta, n)?)
    } else {
        None
    };
    let mut s1_horizontal = Vec::with_capacity(2 * n);
    for k in 0..n {
        let g = TAU * k as f64 / n as f64;
        s1_horizontal.push((g, 1.0));
        s1_horizontal.push((g, -1.0));
    }
    // Where the vertical branch leaves |Ĝ| ≤ 1.
    let alpha = if delta > 1.0 {
        (1.0 / delta).acos()
    } else {
        0.0
    };
    let mut s1_vertical = Vec::with_capacity(4 * n);
    for k in 0..n {
        let g = alpha + (FRAC_PI_2 - alpha) * k as f64 / (n - 1) as f64;
        let c = g.cos();
        let y = (1.0 - delta * delta * c * c).max(0.0).sqrt();
        for gb in [g, wrap_angle(-g)] {
            s1_vertical.push((gb, y));
            s1_vertical.push((gb, -y));
        }
    }
    let note = if delta >= 2.0 {
        Some("δ ≥ 2: no saddle, S0 absent".to_string())
    } else if delta == 1.0 {
        Some("δ = 1: S0 and S1 merge".to_string())
    } else if delta > 1.0 {
        Some("δ > 1: vertical branch of S1 split near ±π/2".to_string())
    } else {
        None
    };
    Ok(Separatrices {
        delta,
        s0,
        s1_horizontal,
        s1_vertical,
        note,
    })
}

pub fn classify_regime(delta: f64, ehat: f64) -> Result<Regime> {
    use RegimeLabel::*;
    check_level(ehat, delta)?;
    let (_, hi) = admissible_range(delta)?;
    let plain = |label| Regime {
        label,
        item: None,
        note: None,
    };
    let tagged = |label, item, note: Option<&str>| Regime {
        label,
        item: Some(item),
        note: note.map(str::to_string),
    };
    if ehat == -delta {
        return Ok(plain(Min));
    }
    if ehat == hi {
        let note = (delta == 2.0).then_some("δ = 2: S0 contracted to P0");
        return Ok(Regime {
            label: Max,
            item: None,
            note: note.map(str::to_string),
        });
    }
    let r = if delta <= 1.0 {
        if ehat < delta {
            plain(C11)
        } else if ehat == delta {
            if delta == 1.0 {
                tagged(S0, C12, Some("δ = 1: S0 and S1 merge"))
            } else {
                tagged(S0, C12, None)
            }
        } else if ehat < 1.0 {
            plain(C13)
        } else if ehat == 1.0 {
            tagged(
                S1,
                C14,
                Some("the case list names this level S0; it is the level of S1"),
            )
        } else {
            plain(C15)
        }
    } else if delta <= 2.0 {
        if ehat < 1.0 {
            plain(C21)
        } else if ehat == 1.0 {
            tagged(S1, C22, None)
        } else if ehat < delta {
            plain(C23)
        } else if ehat == delta {
            tagged(S0, C24, None)
        } else {
            plain(C25)
        }
    } else if ehat < 1.0 {
        plain(C31)
    } else if ehat == 1.0 {
        tagged(S1, C32, None)
    } else {
        plain(C33)
    };
    Ok(r)
}

/// Closed-form motion on the collision level `Ê = δ` of the `E₀` flow with
/// `m²M r = δ Λ²`, through `(Γ, ḡ) = (±σΛ, π)` at `t₀`. `branch` picks the
/// sign of `Γ`.
///
/// `Γ = ±σΛ / cosh(σΛ(t - t₀))`, `σ² = δ(2 - δ)`, `β² = 2 - δ`; `ḡ` is
/// returned in `(-π, π]`. At `δ = 1` the orbit is circular at `t₀`, where `ḡ`
/// jumps by `π`.
pub fn collision_orbit(delta: f64, l: f64, t: f64, t0: f64, branch: i8) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(domain(format!(
            "δ = {delta}: the collision level exists only for 0 < δ < 2"
        )));
    }
    if !(l > 0.0) {
        return Err(domain(format!("Λ = {l} must be positive")));
    }
    let s = match branch {
        1 => 1.0,
        -1 => -1.0,
        _ => return Err(domain(format!("branch must be ±1, got {branch}"))),
    };
    let sigma = (delta * (2.0 - delta)).sqrt();
    let beta2 = 2.0 - delta;
    let x = sigma * l * (t0 - t);
    let sech = 1.0 / x.cosh();
    let g = s * sigma * l * sech;
    let gbar = f64::atan2(s * beta2 * sech * x.tanh(), 1.0 - beta2 * sech * sech);
    Ok((g, gbar))
}

/// `(Λ, Γ, ℓ, ḡ)` from the action-angle pair `(𝓛, 𝓖, λ, γ)` of the leading
/// term `√(1 - Γ²/Λ²) cos ḡ`.
pub fn aa_transform(
    l_cal: f64,
    g_cal: f64,
    lambda: f64,
    gamma: f64,
) -> Result<(f64, f64, f64, f64)> {
    if g_cal == 0.0 || !(g_cal.abs() <= l_cal) {
        return Err(domain(format!(
            "need 0 < |𝓖| ≤ 𝓛, got 𝓛 = {l_cal}, 𝓖 = {g_cal}"
        )));
    }
    let w = (l_cal * l_cal - g_cal * g_cal).max(0.0).sqrt();
    let (sg, cg) = gamma.sin_cos();
    let big_g = w * cg;
    let gbar = wrap_angle(f64::atan2(-w * sg, g_cal));
    let ell = lambda + f64::atan2(l_cal / g_cal.abs() * sg, cg);
    Ok((l_cal, big_g, ell, gbar))
}

/// `𝓖 = 𝓛ℰ`.
pub fn aa_action(l_cal: f64, ecal: f64) -> Result<f64> {
    if !(l_cal > 0.0) || !(ecal.abs() <= 1.0) {
        return Err(domain(format!(
            "need 𝓛 > 0 and |ℰ| ≤ 1, got 𝓛 = {l_cal}, ℰ = {ecal}"
        )));
    }
    Ok(l_cal * ecal)
}

/// `E₀ = r m²M 𝓖/𝓛 + (𝓛² - 𝓖²) cos² γ`.
pub fn e0_in_aa(l_cal: f64, g_cal: f64, gamma: f64, r: f64, masses: &MassParams) -> f64 {
    r * masses.m * masses.m * masses.big_m * g_cal / l_cal
        + (l_cal * l_cal - g_cal * g_cal) * gamma.cos().powi(2)
}

/// Period of the leading flow on the level `ℰ`, from the first return to the
/// section `ḡ = ḡ₀` through the start point `(𝓛√(1 - ℰ²), ḡ₀)`.
pub fn measure_leading_period(l_cal: f64, ecal: f64, rel_tol: f64) -> Result<f64> {
    if !(l_cal > 0.0) || !(ecal != 0.0 && ecal.abs() < 1.0) {
        return Err(domain(format!(
            "need 𝓛 > 0 and 0 < |ℰ| < 1, got 𝓛 = {l_cal}, ℰ = {ecal}"
        )));
    }
    let sys = LeadingFlow { l_cal };
    let g0 = if ecal > 0.0 { 0.0 } else { PI };
    let y0 = [l_cal * (1.0 - ecal * ecal).sqrt(), g0];
    // Oriented so that the flow leaves the start point towards negative values.
    let section = |y: &[f64; 2]| ecal.signum() * (y[1] - g0).sin();
    let cfg = IntegratorConfig {
        rel_tol,
        abs_tol: rel_tol,
        t_end: 3.0 * TAU * l_cal,
        ..IntegratorConfig::default()
    };
    let mut prev: Option<(f64, [f64; 2])> = None;
    let mut bracket = None;
    let stop = integrate(&sys, y0, &cfg, |s| {
        if let Some((tp, yp)) = prev {
            if section(&yp) > 0.0 && section(&s.y) <= 0.0 {
                bracket = Some((tp, yp, s.t - tp));
                return false;
            }
        }
        prev = Some((s.t, s.y));
        true
    })?;
    let Some((ta, ya, h)) = bracket else {
        return Err(numeric(format!(
            "no return to the section before t = {} ({stop:?})",
            cfg.t_end
        )));
    };
    if let Stop::Guard { reason, .. } = stop {
        return Err(numeric(reason));
    }
    // Secant on the step length from the last state before the crossing.
    let at =
        |tau: f64| -> Result<f64> { Ok(section(&dop853_step(|_, y| sys.rhs(y), ta, &ya, tau)?)) };
    let (mut a, mut fa) = (0.0, section(&ya));
    let (mut b, mut fb) = (h, at(h)?);
    for _ in 0..60 {
        if fb == 0.0 || (b - a).abs() <= 1e-15 * (ta + b).abs() {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        let fc = at(c)?;
        (a, fa, b, fb) = (b, fb, c, fc);
    }
    Ok(ta + b)
}
