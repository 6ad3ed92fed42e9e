use std::f64::consts::TAU;

use super::{HamiltonianSystem, Invariants, CIRCULAR_GUARD};
use crate::error::{collision, domain, Result};
use crate::hamiltonians::{e0_generic, e1_generic, j_generic, TwoCentreGeometry};
use crate::kepler::MassParams;
use crate::scalar::Scalar;

fn action_guard(l: f64, g: f64) -> Result<()> {
    if !(l > 0.0) {
        return Err(domain(format!("Λ = {l} must be positive")));
    }
    if !(g.abs() / l < 1.0 - CIRCULAR_GUARD) {
        return Err(domain(format!(
            "near-circular orbit: Γ/Λ = {} (e → 0)",
            g / l
        )));
    }
    Ok(())
}

/// The two-centre energy `J` on `[Λ, Γ, Θ, R, ℓ, ḡ, ϑ, r]`.
#[derive(Debug, Clone, Copy)]
pub struct TwoCentre {
    pub masses: MassParams,
}

impl HamiltonianSystem<8> for TwoCentre {
    fn hamiltonian<T: Scalar>(&self, y: &[T; 8]) -> Result<T> {
        j_generic(y[0], y[1], y[2], y[7], y[4], y[5], &self.masses)
    }

    fn guard(&self, y: &[f64; 8]) -> Result<()> {
        action_guard(y[0], y[1])?;
        if !(y[1] > 0.0) {
            return Err(domain(format!("Γ = {} must be positive", y[1])));
        }
        Ok(())
    }

    fn periodic(&self) -> &'static [usize] {
        &[4]
    }

    fn invariants(&self, y: &[f64; 8]) -> Result<Invariants> {
        let geo = TwoCentreGeometry::new(y[0], y[1], y[2], y[7], y[4], y[5], &self.masses)?;
        let e = e0_generic(y[0], y[1], y[2], y[7], y[5], &self.masses)?
            + e1_generic(&geo, y[7], &self.masses);
        Ok(Invariants {
            energy: self.hamiltonian(y)?,
            euler: Some(e),
            theta: Some(y[2]),
        })
    }
}

/// `E₀` as a flow on `[Γ, ḡ]` at fixed `Λ`, `r`, `Θ`.
#[derive(Debug, Clone, Copy)]
pub struct SecularE0 {
    pub masses: MassParams,
    pub l: f64,
    pub r: f64,
    pub theta: f64,
}

impl HamiltonianSystem<2> for SecularE0 {
    fn hamiltonian<T: Scalar>(&self, y: &[T; 2]) -> Result<T> {
        e0_generic(
            T::cst(self.l),
            y[0],
            T::cst(self.theta),
            T::cst(self.r),
            y[1],
            &self.masses,
        )
    }

    fn guard(&self, y: &[f64; 2]) -> Result<()> {
        action_guard(self.l, y[0])
    }
}

/// The normalized leading term `√(1 - Γ²/𝓛²) cos ḡ` on `[Γ, ḡ]`.
#[derive(Debug, Clone, Copy)]
pub struct LeadingFlow {
    pub l_cal: f64,
}

impl HamiltonianSystem<2> for LeadingFlow {
    fn hamiltonian<T: Scalar>(&self, y: &[T; 2]) -> Result<T> {
        let eta = y[0] / self.l_cal;
        Ok((-(eta * eta) + 1.0).sqrt() * y[1].cos())
    }

    fn guard(&self, y: &[f64; 2]) -> Result<()> {
        action_guard(self.l_cal, y[0])
    }
}

/// The averaged potential `U` as a flow on `[Γ, ḡ]` at fixed `Λ`, `r`, `Θ`,
/// integrated with a fixed trapezoid rule of `nodes` points in the eccentric
/// anomaly.
#[derive(Debug, Clone, Copy)]
pub struct AveragedFlow {
    pub masses: MassParams,
    pub l: f64,
    pub r: f64,
    pub theta: f64,
    pub nodes: usize,
}

impl HamiltonianSystem<2> for AveragedFlow {
    fn hamiltonian<T: Scalar>(&self, y: &[T; 2]) -> Result<T> {
        let ms = &self.masses;
        let (g, gbar) = (y[0], y[1]);
        let l = T::cst(self.l);
        let r = self.r;
        let a = self.l * self.l / (ms.m * ms.m * ms.big_m);
        let eta = g / l;
        let e = (-(eta * eta) + 1.0).sqrt();
        let s = if self.theta == 0.0 {
            T::cst(1.0)
        } else {
            (-(T::cst(self.theta) / g).sq() + 1.0).sqrt()
        };
        let (sg, cg) = (gbar.sin(), gbar.cos());
        let mut sum = T::cst(0.0);
        for k in 0..self.nodes {
            let (sx, cx) = (TAU * k as f64 / self.nodes as f64).sin_cos();
            let rho = -(e * cx) + 1.0;
            let p = (e * -1.0 + cx) * cg - eta * sg * sx;
            let d2 = s * p * (2.0 * r * a) + rho * rho * (a * a) + r * r;
            if !(d2.re() > 1e-8 * r * r) {
                return Err(collision("averaged orbit meets the second centre"));
            }
            sum = sum + rho / d2.sqrt();
        }
        Ok(sum * (-ms.m * ms.big_m_prime / self.nodes as f64))
    }

    fn guard(&self, y: &[f64; 2]) -> Result<()> {
        action_guard(self.l, y[0])?;
        if !(y[0] > self.theta.abs()) || !(y[0] > CIRCULAR_GUARD * self.l) {
            return Err(domain(format!(
                "Γ → 0 or below |Θ|: Γ = {}, Θ = {}",
                y[0], self.theta
            )));
        }
        Ok(())
    }
}
