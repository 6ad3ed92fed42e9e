//! The ℓ-averaged interaction potential and its one-dimensional normal form.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{collision, domain, numeric, Result};
use crate::kepler::{eccentricity, MassParams};

/// Node schedule of the periodic trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Initial node count.
    pub nodes: usize,
    /// Stop once two successive refinements differ by less than this.
    pub tol: f64,
    /// Number of allowed node doublings.
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 64,
            tol: 1e-11,
            max_doublings: 7,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.nodes < 8 || self.nodes % 2 != 0 {
            return Err(domain(format!(
                "node count {} must be even and at least 8",
                self.nodes
            )));
        }
        if !(self.tol > 0.0) {
            return Err(domain(format!(
                "quadrature tolerance {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub nodes: usize,
    /// `|I_n - I_{n/2}|` at the accepted level.
    pub change: f64,
    /// Smallest radicand met on the grid.
    pub min_radicand: f64,
}

/// Mean of a `2π`-periodic integrand by the trapezoid rule, doubling the node
/// count until successive values agree to `quad.tol`. The integrand returns
/// `(value, radicand)`; a radicand below `radicand_floor` anywhere on the grid
/// is reported as a collision.
pub fn periodic_mean(
    quad: &QuadratureSpec,
    radicand_floor: f64,
    f: impl Fn(f64) -> (f64, f64),
) -> Result<Quadrature> {
    quad.validate()?;
    let mut n = quad.nodes;
    let mut sum = 0.0;
    let mut min_rad = f64::INFINITY;
    let mut add = |k0: usize, step: usize, n: usize, sum: &mut f64| -> Result<()> {
        for k in (k0..n).step_by(step) {
            let (v, rad) = f(TAU * k as f64 / n as f64);
            min_rad = min_rad.min(rad);
            if !(rad > radicand_floor) {
                return Err(collision(format!(
                    "radicand {rad:e} below {radicand_floor:e}: collisional orbit"
                )));
            }
            *sum += v;
        }
        Ok(())
    };
    add(0, 1, n, &mut sum)?;
    let mut prev = sum / n as f64;
    for _ in 0..quad.max_doublings {
        n *= 2;
        add(1, 2, n, &mut sum)?;
        let cur = sum / n as f64;
        let change = (cur - prev).abs();
        if change < quad.tol {
            return Ok(Quadrature {
                value: cur,
                nodes: n,
                change,
                min_radicand: min_rad,
            });
        }
        prev = cur;
    }
    Err(numeric(format!(
        "trapezoid rule did not reach {:e} with {n} nodes",
        quad.tol
    )))
}

const COLLISION_FLOOR: f64 = 1e-8;

/// `U = -(mM'/2π) ∫ dℓ / |x' - x|`, integrated in the eccentric anomaly.
pub fn average_potential_detailed(
    r: f64,
    l: f64,
    theta: f64,
    g: f64,
    gbar: f64,
    masses: &MassParams,
    q: &QuadratureSpec,
) -> Result<Quadrature> {
    if !(l > 0.0) || !(g > 0.0 && g <= l) || !(theta.abs() <= g) || !(r > 0.0) {
        return Err(domain(format!(
            "need 0 < Γ ≤ Λ, |Θ| ≤ Γ, r > 0; got Λ = {l}, Γ = {g}, Θ = {theta}, r = {r}"
        )));
    }
    let a = masses.semi_major_axis(l);
    let e = eccentricity(l, g);
    let eta = g / l;
    let s = (1.0 - (theta / g).powi(2)).max(0.0).sqrt();
    let (sg, cg) = gbar.sin_cos();
    let mut out = periodic_mean(q, COLLISION_FLOOR * r * r, |xi| {
        let (sx, cx) = xi.sin_cos();
        let rho = 1.0 - e * cx;
        let p = (cx - e) * cg - eta * sx * sg;
        let d2 = r * r + 2.0 * r * a * s * p + a * a * rho * rho;
        (rho / d2.sqrt(), d2)
    })?;
    let scale = -masses.m * masses.big_m_prime;
    out.value *= scale;
    out.change *= scale.abs();
    Ok(out)
}

pub fn average_potential(
    r: f64,
    l: f64,
    theta: f64,
    g: f64,
    gbar: f64,
    masses: &MassParams,
    q: &QuadratureSpec,
) -> Result<f64> {
    Ok(average_potential_detailed(r, l, theta, g, gbar, masses, q)?.value)
}

/// `(1/2π) ∫ (1 - ℰ cos w) dw / √(r² + a² - 2a(r 𝓘 sin w + a ℰ cos w) + a²ℰ² cos² w)`.
pub fn f_tilde(r: f64, a: f64, ecal: f64, ical: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(0.0..1.0).contains(&ecal) {
        return Err(domain(format!("ℰ = {ecal} outside [0, 1)")));
    }
    if !(r > 0.0) || !(a >= 0.0) {
        return Err(domain(format!(
            "need r > 0 and a ≥ 0, got r = {r}, a = {a}"
        )));
    }
    Ok(periodic_mean(q, COLLISION_FLOOR * r * r, |w| {
        let (sw, cw) = w.sin_cos();
        let d2 =
            r * r + a * a - 2.0 * a * (r * ical * sw + a * ecal * cw) + (a * ecal * cw).powi(2);
        ((1.0 - ecal * cw) / d2.sqrt(), d2)
    })?
    .value)
}

/// `ℰ = √(Λ² - E₀)/Λ`, `𝓘 = √(E₀ - Θ²)/Λ`.
pub fn ei_params(l: f64, theta: f64, e0: f64) -> Result<(f64, f64)> {
    if !(l > 0.0) || !(theta * theta <= e0 && e0 <= l * l) {
        return Err(domain(format!(
            "need Θ² ≤ E₀ ≤ Λ², got Θ = {theta}, E₀ = {e0}, Λ = {l}"
        )));
    }
    Ok(((l * l - e0).sqrt() / l, (e0 - theta * theta).sqrt() / l))
}

/// `{f, g} = ∂_ḡ f ∂_Γ g - ∂_Γ f ∂_ḡ g` at `(Γ, ḡ)` by central differences.
pub fn poisson_bracket_fd(
    f: impl Fn(f64, f64) -> Result<f64>,
    g: impl Fn(f64, f64) -> Result<f64>,
    point: (f64, f64),
    fd_step: f64,
) -> Result<f64> {
    let (gg, gb) = point;
    if !(fd_step >= 1e-12 * gg.abs().max(gb.abs()).max(1.0)) {
        return Err(numeric(format!(
            "finite-difference step {fd_step:e} too small"
        )));
    }
    let d = |h: &dyn Fn(f64, f64) -> Result<f64>| -> Result<(f64, f64)> {
        let dg = (h(gg + fd_step, gb)? - h(gg - fd_step, gb)?) / (2.0 * fd_step);
        let db = (h(gg, gb + fd_step)? - h(gg, gb - fd_step)?) / (2.0 * fd_step);
        Ok((dg, db))
    };
    let (fg, fb) = d(&f)?;
    let (hg, hb) = d(&g)?;
    Ok(fb * hg - fg * hb)
}
