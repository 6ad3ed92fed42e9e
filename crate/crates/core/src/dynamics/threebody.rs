use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    integrate, HamiltonianSystem, IntegratorConfig, Invariants, Sample, Stop, CIRCULAR_GUARD,
};
use crate::error::{collision, domain, Result};
use crate::hamiltonians::{e0_generic, kepler_energy};
use crate::kepler::{Ellipse, MassParams};
use crate::scalar::Scalar;

/// Planar three-body state in K-variables. The total angular momentum `C`
/// is a parameter of [`ThreeBody`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeBodyState {
    pub big_r: f64,
    pub big_l: f64,
    pub big_g: f64,
    pub r: f64,
    pub ell: f64,
    pub gbar: f64,
}

impl ThreeBodyState {
    /// `[R, Λ, Γ, r, ℓ, ḡ]`.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.big_r, self.big_l, self.big_g, self.r, self.ell, self.gbar,
        ]
    }

    pub fn from_array(y: &[f64; 6]) -> Self {
        Self {
            big_r: y[0],
            big_l: y[1],
            big_g: y[2],
            r: y[3],
            ell: y[4],
            gbar: y[5],
        }
    }

    /// The initial datum of the equal-mass experiment.
    pub fn experiment_default() -> Self {
        Self {
            big_r: 7.071067e-5,
            big_l: 2.236067e-2,
            big_g: 1.596860e-2,
            r: 100.0,
            ell: 0.751906,
            gbar: PI,
        }
    }
}

/// Sign convention of the kinetic coupling `(1/m₀)((C-Γ)/r y₁ - R y₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// The term added with a plus sign.
    #[default]
    Published,
    /// The term with the sign obtained by composing the Cartesian energy with
    /// the planar K-map at `σ = +1`.
    Consistent,
    /// Interaction with the second centre and `f` both dropped: the flow of
    /// Kepler plus `K`, where `Λ`, `Γ`, `ḡ` are constant.
    Decoupled,
}

impl std::str::FromStr for Coupling {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "published" => Ok(Self::Published),
            "consistent" => Ok(Self::Consistent),
            "decoupled" => Ok(Self::Decoupled),
            _ => Err(format!(
                "unknown coupling '{s}' (published, consistent, decoupled)"
            )),
        }
    }
}

/// `(y₁, y₂)`, the inner momentum in the frame of the outer body.
fn velocity_generic<T: Scalar>(el: &Ellipse<T>, l: T, gbar: T, masses: &MassParams) -> (T, T) {
    let vf = el.velocity_factor(l, masses);
    let (sg, cg) = (gbar.sin(), gbar.cos());
    let y1 = (-(sg * el.sin_xi) + el.eta * cg * el.cos_xi) * vf;
    let y2 = (cg * el.sin_xi + el.eta * sg * el.cos_xi) * vf;
    (y1, y2)
}

pub fn velocity_components(
    l: f64,
    g: f64,
    ell: f64,
    gbar: f64,
    masses: &MassParams,
) -> Result<(f64, f64)> {
    let el = Ellipse::new(l, g, ell, masses)?;
    Ok(velocity_generic(&el, l, gbar, masses))
}

/// The energy split `H = J + K + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeBodySplit {
    pub j: f64,
    pub k: f64,
    pub f: f64,
}

/// Planar three-body Hamiltonian on `[R, Λ, Γ, r, ℓ, ḡ]` with `m' = m`.
#[derive(Debug, Clone, Copy)]
pub struct ThreeBody {
    pub masses: MassParams,
    pub c: f64,
    pub coupling: Coupling,
}

impl ThreeBody {
    fn parts<T: Scalar>(&self, y: &[T; 6]) -> Result<(T, T, T)> {
        let ms = &self.masses;
        let [big_r, l, g, r, ell, gbar] = *y;
        let el = Ellipse::new(l, g, ell, ms)?;
        let kep = kepler_energy(l, ms);
        let k = big_r * big_r / (2.0 * ms.m) + (r * r).recip() * (self.c * self.c / (2.0 * ms.m))
            - r.recip() * (ms.m * ms.big_m_prime);
        if self.coupling == Coupling::Decoupled {
            return Ok((kep, k, T::cst(0.0)));
        }
        let a = el.a;
        let d2 = r * r + r * a * el.p(gbar) * 2.0 + (a * el.rho).sq();
        if !(d2.re() > 1e-300 * r.re() * r.re()) {
            return Err(collision("inner body meets the outer body"));
        }
        let j = kep - d2.sqrt().recip() * (ms.m * ms.big_m_prime);
        let (y1, y2) = velocity_generic(&el, l, gbar, ms);
        let cg = -g + self.c;
        let mut mix = (cg / r * y1 - big_r * y2) / ms.m0;
        if self.coupling == Coupling::Consistent {
            mix = -mix;
        }
        let f = (g * g - g * (2.0 * self.c)) / (r * r * (2.0 * ms.m)) + mix;
        Ok((j, k, f))
    }

    pub fn split(&self, s: &ThreeBodyState) -> Result<ThreeBodySplit> {
        let (j, k, f) = self.parts(&s.to_array())?;
        Ok(ThreeBodySplit { j, k, f })
    }

    /// `r` at the minimum of `K`: `C²/(m'² M')`.
    pub fn equilibrium_r(&self) -> f64 {
        self.c * self.c / (self.masses.m * self.masses.m * self.masses.big_m_prime)
    }
}

impl HamiltonianSystem<6> for ThreeBody {
    fn hamiltonian<T: Scalar>(&self, y: &[T; 6]) -> Result<T> {
        let (j, k, f) = self.parts(y)?;
        Ok(j + k + f)
    }

    fn periodic(&self) -> &'static [usize] {
        &[4]
    }

    fn guard(&self, y: &[f64; 6]) -> Result<()> {
        let (l, g, r) = (y[1], y[2], y[3]);
        if !(l > 0.0) || !(r > 0.0) {
            return Err(domain(format!(
                "need Λ > 0 and r > 0, got Λ = {l}, r = {r}"
            )));
        }
        let eta = g / l;
        if !(eta > CIRCULAR_GUARD) {
            return Err(domain(format!("Γ → 0: Γ/Λ = {eta}")));
        }
        if !(eta < 1.0 - CIRCULAR_GUARD) {
            return Err(domain(format!("near-circular orbit: Γ/Λ = {eta} (e → 0)")));
        }
        Ok(())
    }
}

pub fn threebody_hamiltonian(
    s: &ThreeBodyState,
    c: f64,
    masses: &MassParams,
    coupling: Coupling,
) -> Result<f64> {
    ThreeBody {
        masses: *masses,
        c,
        coupling,
    }
    .hamiltonian(&s.to_array())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub state: ThreeBodyState,
    pub c: f64,
    pub m0: f64,
    pub coupling: Coupling,
    pub integrator: IntegratorConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            state: ThreeBodyState::experiment_default(),
            c: 7.087036,
            m0: 1.0,
            coupling: Coupling::Published,
            integrator: IntegratorConfig {
                rel_tol: 1e-13,
                abs_tol: 1e-15,
                max_step: f64::INFINITY,
                t_end: 10.0,
                sample_dt: Some(1e-3),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    /// Semi-major axis of the initial inner ellipse.
    pub a: f64,
    /// `r/a` at the start.
    pub delta: f64,
    pub equilibrium_r: f64,
    pub h0: f64,
    /// Largest relative deviation of `H` from `h0`.
    pub energy_drift: f64,
    pub r_min: f64,
    pub r_mean: f64,
    pub r_max: f64,
    pub gbar_min: f64,
    pub gbar_max: f64,
    pub samples: usize,
    pub t_final: f64,
    pub stop: Stop,
}

/// Normalized Kepler part of the Euler integral, `E₀/Λ²`, of a planar state.
pub fn e0_hat(s: &ThreeBodyState, masses: &MassParams) -> Result<f64> {
    Ok(e0_generic(s.big_l, s.big_g, 0.0, s.r, s.gbar, masses)? / (s.big_l * s.big_l))
}

/// Runs the equal-mass three-body experiment, passing each sample and its
/// normalized `E₀` to `sink`.
pub fn run_experiment<K>(cfg: &ExperimentConfig, mut sink: K) -> Result<ExperimentSummary>
where
    K: FnMut(&Sample<6>, f64) -> bool,
{
    let masses = MassParams::equal_three_body(cfg.m0)?;
    let sys = ThreeBody {
        masses,
        c: cfg.c,
        coupling: cfg.coupling,
    };
    let a = masses.semi_major_axis(cfg.state.big_l);
    let h0 = sys.hamiltonian(&cfg.state.to_array())?;
    let mut acc = Acc::default();
    let mut failure = None;
    let stop = integrate(&sys, cfg.state.to_array(), &cfg.integrator, |s| {
        let Invariants { energy, .. } = s.invariants;
        acc.push(s.t, s.y[3], s.y[5], ((energy - h0) / h0).abs());
        match e0_hat(&ThreeBodyState::from_array(&s.y), &masses) {
            Ok(e) => sink(&s, e),
            Err(err) => {
                failure = Some(err);
                false
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ExperimentSummary {
        a,
        delta: cfg.state.r / a,
        equilibrium_r: sys.equilibrium_r(),
        h0,
        energy_drift: acc.drift,
        r_min: acc.r_min,
        r_mean: acc.r_mean(),
        r_max: acc.r_max,
        gbar_min: acc.g_min,
        gbar_max: acc.g_max,
        samples: acc.n,
        t_final: acc.t,
        stop,
    })
}

struct Acc {
    n: usize,
    t: f64,
    r_prev: f64,
    r_integral: f64,
    r_min: f64,
    r_max: f64,
    g_min: f64,
    g_max: f64,
    drift: f64,
}

impl Default for Acc {
    fn default() -> Self {
        Self {
            n: 0,
            t: 0.0,
            r_prev: 0.0,
            r_integral: 0.0,
            r_min: f64::INFINITY,
            r_max: f64::NEG_INFINITY,
            g_min: f64::INFINITY,
            g_max: f64::NEG_INFINITY,
            drift: 0.0,
        }
    }
}

impl Acc {
    fn push(&mut self, t: f64, r: f64, gbar: f64, drift: f64) {
        if self.n > 0 {
            self.r_integral += 0.5 * (r + self.r_prev) * (t - self.t);
        }
        self.n += 1;
        self.t = t;
        self.r_prev = r;
        self.r_min = self.r_min.min(r);
        self.r_max = self.r_max.max(r);
        self.g_min = self.g_min.min(gbar);
        self.g_max = self.g_max.max(gbar);
        self.drift = self.drift.max(drift);
    }

    /// Time average by the trapezoid rule.
    fn r_mean(&self) -> f64 {
        if self.t > 0.0 {
            self.r_integral / self.t
        } else {
            self.r_prev
        }
    }
}
