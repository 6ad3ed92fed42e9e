//! Kepler equation and the orbital elements of the inner ellipse.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{domain, numeric, Result};
use crate::scalar::Scalar;

/// Residual bound used whenever a caller does not pick its own.
pub const KEPLER_TOL: f64 = 1e-14;

const MAX_ITER: usize = 64;

/// Mass parameters of the two-centre and three-body Hamiltonians.
///
/// `m` is the mass of the moving body, `big_m` the mass of the centre at the
/// origin, `big_m_prime` the mass of the centre at `x'`, `m0` the mass of the
/// heliocentric body in the three-body setting. The gravitational constant is
/// absorbed into `big_m` and `big_m_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassParams {
    pub m: f64,
    pub big_m: f64,
    pub big_m_prime: f64,
    pub m0: f64,
}

impl MassParams {
    pub fn new(m: f64, big_m: f64, big_m_prime: f64, m0: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("M", big_m), ("M'", big_m_prime), ("m0", m0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("mass {name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            m,
            big_m,
            big_m_prime,
            m0,
        })
    }

    /// Reduced masses of the heliocentric three-body problem with
    /// `m0 = m1 = m2`: `m' = m = m0/2`, `M' = M = 2 m0`.
    pub fn equal_three_body(m0: f64) -> Result<Self> {
        Self::new(m0 / 2.0, 2.0 * m0, 2.0 * m0, m0)
    }

    /// Semi-major axis `Λ² / (m² M)`.
    pub fn semi_major_axis(&self, l: f64) -> f64 {
        l * l / (self.m * self.m * self.big_m)
    }

    /// Inverse of [`Self::semi_major_axis`].
    pub fn action_from_axis(&self, a: f64) -> f64 {
        self.m * (self.big_m * a).sqrt()
    }
}

/// Orbital elements of the ellipse generated by `(Λ, Γ, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    /// Semi-major axis.
    pub a: f64,
    /// Eccentricity.
    pub e: f64,
    /// Eccentric anomaly.
    pub xi: f64,
    /// True anomaly, in the same `2π` branch as `xi`.
    pub nu: f64,
    /// Radial factor `1 - e cos ξ`.
    pub rho: f64,
    /// Projection factor `(cos ξ - e) cos ḡ - (Γ/Λ) sin ξ sin ḡ`.
    pub p: f64,
}

/// Solves `ξ - e sin ξ = ℓ` for the eccentric anomaly.
///
/// `ℓ` is reduced mod `2π` internally and the root is returned in the branch
/// that contains `ℓ`, so `ξ - ℓ ∈ [-e, e]`.
pub fn solve_kepler(e: f64, ell: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(domain(format!("eccentricity {e} outside [0, 1)")));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    if !ell.is_finite() {
        return Err(domain(format!("mean anomaly is not finite: {ell}")));
    }
    let turns = (ell / TAU).floor();
    let l = ell - turns * TAU;
    let offset = turns * TAU;

    let f = |x: f64| x - e * x.sin() - l;
    let mut lo = l - e;
    let mut hi = l + e;
    let mut x = l + e * l.sin();
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx.abs() < tol {
            return Ok(x + offset);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / (1.0 - e * x.cos());
        let next = x - step;
        x = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let fx = f(x);
            if fx.abs() < tol {
                return Ok(x + offset);
            }
            break;
        }
    }
    Err(numeric(format!(
        "Kepler equation did not reach residual {tol:e} for e = {e}, ℓ = {ell}"
    )))
}

/// Eccentricity `√(1 - Γ²/Λ²)`.
pub fn eccentricity(l: f64, g: f64) -> f64 {
    (1.0 - (g / l).powi(2)).max(0.0).sqrt()
}

/// Elements of the ellipse with actions `(Λ, Γ)`, mean anomaly `ℓ` and
/// perihelion angle `ḡ` (only `p` depends on `ḡ`).
pub fn elements_from_actions(
    l: f64,
    g: f64,
    ell: f64,
    gbar: f64,
    masses: &MassParams,
) -> Result<OrbitalElements> {
    let el = Ellipse::new(l, g, ell, masses)?;
    let nu0 = el.eta * el.sin_xi;
    let nu0 = nu0.atan2(el.cos_xi - el.e);
    let nu = nu0 + TAU * ((el.xi - nu0) / TAU).round();
    Ok(OrbitalElements {
        a: el.a,
        e: el.e,
        xi: el.xi,
        nu,
        rho: el.rho,
        p: el.p(gbar),
    })
}

/// Geometry of the inner ellipse, generic over the scalar type so that the
/// Hamiltonians can be differentiated through it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ellipse<T> {
    pub a: T,
    pub e: T,
    /// `Γ/Λ`.
    pub eta: T,
    pub xi: T,
    pub sin_xi: T,
    pub cos_xi: T,
    /// `1 - e cos ξ`.
    pub rho: T,
}

impl<T: Scalar> Ellipse<T> {
    pub fn new(l: T, g: T, ell: T, masses: &MassParams) -> Result<Self> {
        let (lr, gr) = (l.re(), g.re());
        if !(lr > 0.0) || !(gr.abs() <= lr) {
            return Err(domain(format!(
                "actions must satisfy 0 ≤ |Γ| ≤ Λ, got Λ = {lr}, Γ = {gr}"
            )));
        }
        let a = l * l / (masses.m * masses.m * masses.big_m);
        let eta = g / l;
        let e2 = -(eta * eta) + 1.0;
        let e = if e2.re() > 0.0 {
            e2.sqrt()
        } else {
            T::cst(0.0)
        };
        let xi0 = solve_kepler(e.re(), ell.re(), KEPLER_TOL)?;
        let (s0, c0) = xi0.sin_cos();
        // One Newton step written in T: exact value, and the implicit
        // derivatives ∂ξ/∂ℓ = 1/ϱ, ∂ξ/∂e = sin ξ/ϱ.
        let xi = (ell - xi0 + e * s0) / (1.0 - e.re() * c0) + xi0;
        let sin_xi = xi.sin();
        let cos_xi = xi.cos();
        let rho = -(e * cos_xi) + 1.0;
        Ok(Self {
            a,
            e,
            eta,
            xi,
            sin_xi,
            cos_xi,
            rho,
        })
    }

    /// `p(ḡ) = ϱ cos(ν + ḡ)`.
    pub fn p(&self, gbar: T) -> T {
        (self.cos_xi - self.e) * gbar.cos() - self.eta * self.sin_xi * gbar.sin()
    }

    /// Components of the velocity in the perihelion-rotated frame, before the
    /// `R₃(ḡ - π/2)` rotation: `(-sin ξ, (Γ/Λ) cos ξ) · m²M / (Λ ϱ)`.
    pub fn velocity_factor(&self, l: T, masses: &MassParams) -> T {
        (l * self.rho).recip() * (masses.m * masses.m * masses.big_m)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}
