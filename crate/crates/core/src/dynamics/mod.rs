//! Hamiltonian flows in K-coordinates with conserved-quantity monitoring.
//!
//! States are laid out as `[momenta..., conjugate coordinates...]`, so that
//! Hamilton's equations read `q̇ = ∂H/∂p`, `ṗ = -∂H/∂q` with the gradient taken
//! by forward-mode differentiation of the Hamiltonian.

pub mod ode;
mod systems;
mod threebody;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{gradient, Dual, Scalar};

pub use ode::{dop853, dop853_step, OdeConfig, StepInfo, Stop};
pub use systems::{AveragedFlow, LeadingFlow, SecularE0, TwoCentre};
pub use threebody::{
    e0_hat, run_experiment, threebody_hamiltonian, velocity_components, Coupling, ExperimentConfig,
    ExperimentSummary, ThreeBody, ThreeBodySplit, ThreeBodyState,
};

/// Guard band on `Γ/Λ` near the circular boundary.
pub const CIRCULAR_GUARD: f64 = 1e-9;

/// A Hamiltonian on `N/2` degrees of freedom.
pub trait HamiltonianSystem<const N: usize> {
    fn hamiltonian<T: Scalar>(&self, y: &[T; N]) -> Result<T>;

    /// Rejects states too close to a singularity of the flow.
    fn guard(&self, _y: &[f64; N]) -> Result<()> {
        Ok(())
    }

    /// Quantities monitored along the flow.
    fn invariants(&self, y: &[f64; N]) -> Result<Invariants> {
        Ok(Invariants {
            energy: self.hamiltonian(y)?,
            euler: None,
            theta: None,
        })
    }

    /// Angle components the flow is `2π`-periodic in, kept in `[0, 2π)`.
    fn periodic(&self) -> &'static [usize] {
        &[]
    }

    fn rhs(&self, y: &[f64; N]) -> Result<[f64; N]>
    where
        Dual<N>: Scalar,
    {
        self.guard(y)?;
        let (_, g) = gradient(|v: &[Dual<N>; N]| self.hamiltonian(v), y)?;
        let half = N / 2;
        let mut out = [0.0; N];
        for i in 0..half {
            out[i] = -g[i + half];
            out[i + half] = g[i];
        }
        Ok(out)
    }
}

/// Conserved or monitored quantities at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub energy: f64,
    /// Euler integral, two-centre runs only.
    pub euler: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
    /// Output cadence; every accepted step when absent.
    pub sample_dt: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            t_end: 1.0,
            sample_dt: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        if !(self.t_end > 0.0) {
            return Err(domain(format!("t_end = {} must be positive", self.t_end)));
        }
        if !(self.max_step > 0.0) {
            return Err(domain(format!(
                "max_step = {} must be positive",
                self.max_step
            )));
        }
        if let Some(dt) = self.sample_dt {
            if !(dt > 0.0) {
                return Err(domain(format!("sample_dt = {dt} must be positive")));
            }
        }
        Ok(())
    }

    fn ode(&self) -> OdeConfig {
        OdeConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            ..OdeConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub invariants: Invariants,
}

/// Integrates `sys` from `y0` over `[0, cfg.t_end]`, passing the initial
/// state and every output sample to `sink`. `sink` returns `false` to stop.
///
/// A guard trip ends the run with [`Stop::Guard`]; the samples already
/// emitted remain valid.
pub fn integrate<const N: usize, S, K>(
    sys: &S,
    y0: [f64; N],
    cfg: &IntegratorConfig,
    mut sink: K,
) -> Result<Stop>
where
    S: HamiltonianSystem<N>,
    Dual<N>: Scalar,
    K: FnMut(Sample<N>) -> bool,
{
    cfg.validate()?;
    sys.guard(&y0)?;
    if !sink(Sample {
        t: 0.0,
        y: y0,
        invariants: sys.invariants(&y0)?,
    }) {
        return Ok(Stop::Observer { t: 0.0 });
    }
    let mut failure = None;
    let stop = dop853(
        |_, y| sys.rhs(y),
        0.0,
        y0,
        cfg.t_end,
        cfg.sample_dt,
        &cfg.ode(),
        sys.periodic(),
        |step| {
            if cfg.sample_dt.is_some() && !step.on_grid {
                return true;
            }
            match sys.invariants(step.y) {
                Ok(invariants) => sink(Sample {
                    t: step.t,
                    y: *step.y,
                    invariants,
                }),
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        },
    )?;
    match failure {
        Some(e) => match stop {
            Stop::Observer { t } => Ok(Stop::Guard {
                t,
                reason: e.to_string(),
            }),
            _ => Err(e),
        },
        None => Ok(stop),
    }
}

/// Collects all samples of [`integrate`].
pub fn trajectory<const N: usize, S>(
    sys: &S,
    y0: [f64; N],
    cfg: &IntegratorConfig,
) -> Result<(Vec<Sample<N>>, Stop)>
where
    S: HamiltonianSystem<N>,
    Dual<N>: Scalar,
{
    let mut out = Vec::new();
    let stop = integrate(sys, y0, cfg, |s| {
        out.push(s);
        true
    })?;
    Ok((out, stop))
}

/// Largest relative deviation of `f(sample)` from its initial value.
pub fn relative_drift<const N: usize>(samples: &[Sample<N>], f: impl Fn(&Sample<N>) -> f64) -> f64 {
    let Some(first) = samples.first() else {
        return 0.0;
    };
    let v0 = f(first);
    let scale = v0.abs().max(f64::MIN_POSITIVE);
    samples
        .iter()
        .map(|s| (f(s) - v0).abs() / scale)
        .fold(0.0, f64::max)
}
