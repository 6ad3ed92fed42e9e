//! Seeded invariant suites with measured residuals.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{relative_drift, trajectory, IntegratorConfig, Stop, TwoCentre};
use crate::error::Result;
use crate::hamiltonians::{
    e0_in_k, e_in_k, euler_integral_cartesian, euler_integral_elliptic, euler_integral_energy_term,
    euler_integral_kepler_part, euler_integral_symmetric,
};
use crate::kepler::{solve_kepler, MassParams, KEPLER_TOL};
use crate::kmap::{
    canonicity_residual, canonicity_residual_planar, cartesian_to_k, k_to_cartesian,
    CartesianState, KCoords, PlanarKCoords,
};
use crate::secular::{average_potential, ei_params, f_tilde, poisson_bracket_fd, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kepler,
    Canonicity,
    Euler,
    Renormalizable,
    Poisson,
    Conservation,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Kepler,
        Suite::Canonicity,
        Suite::Euler,
        Suite::Renormalizable,
        Suite::Poisson,
        Suite::Conservation,
    ];

    pub fn default_points(self) -> usize {
        match self {
            Suite::Kepler => 200,
            Suite::Canonicity => 100,
            Suite::Euler => 100,
            Suite::Renormalizable => 50,
            Suite::Poisson => 50,
            Suite::Conservation => 4,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Kepler => "kepler",
            Suite::Canonicity => "canonicity",
            Suite::Euler => "euler",
            Suite::Renormalizable => "renormalizable",
            Suite::Poisson => "poisson",
            Suite::Conservation => "conservation",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// One measured check inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub points: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, residuals: &[f64], threshold: f64) -> Self {
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        let passed = !residuals.is_empty()
            && residuals.iter().all(|r| r.is_finite())
            && max_residual < threshold;
        Self {
            name: name.to_string(),
            points: residuals.len(),
            max_residual,
            threshold,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Sampled points rejected before measuring (collisions, domain edges).
    pub skipped: usize,
    pub error: Option<String>,
}

/// Runs one suite with `points` samples (a grid side for the Kepler suite).
pub fn run_suite(suite: Suite, seed: u64, points: usize) -> SuiteReport {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (suite as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut skipped = 0;
    let out = match suite {
        Suite::Kepler => kepler(points),
        Suite::Canonicity => canonicity(&mut rng, points, &mut skipped),
        Suite::Euler => euler(&mut rng, points, &mut skipped),
        Suite::Renormalizable => renormalizable(&mut rng, points, &mut skipped),
        Suite::Poisson => poisson(&mut rng, points, &mut skipped),
        Suite::Conservation => conservation(&mut rng, points),
    };
    match out {
        Ok(checks) => {
            let passed = checks.iter().all(|c| c.passed);
            SuiteReport {
                suite,
                seed,
                passed,
                checks,
                skipped,
                error: None,
            }
        }
        Err(e) => SuiteReport {
            suite,
            seed,
            passed: false,
            checks: vec![],
            skipped,
            error: Some(e.to_string()),
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn kepler(n: usize) -> Result<Vec<Check>> {
    let mut res = Vec::with_capacity(n * n);
    for i in 0..n {
        let e = 0.99 * i as f64 / (n.max(2) - 1) as f64;
        for j in 0..n {
            let ell = TAU * j as f64 / n as f64;
            let xi = solve_kepler(e, ell, KEPLER_TOL)?;
            res.push((xi - e * xi.sin() - ell).abs());
        }
    }
    Ok(vec![Check::new("kepler residual", &res, 1e-13)])
}

fn sample_masses(rng: &mut ChaCha8Rng) -> Result<MassParams> {
    MassParams::new(
        rng.gen_range(0.5..1.5),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.1..1.0),
        1.0,
    )
}

fn canonicity(rng: &mut ChaCha8Rng, n: usize, skipped: &mut usize) -> Result<Vec<Check>> {
    let (mut spatial, mut planar) = (vec![], vec![]);
    while spatial.len() < n {
        let ms = sample_masses(rng)?;
        match canonicity_residual(&KCoords::sample(rng, false), &ms, 1e-6) {
            Ok(r) => spatial.push(r),
            Err(_) => *skipped += 1,
        }
    }
    while planar.len() < n {
        let ms = sample_masses(rng)?;
        let k = KCoords::sample(rng, true);
        let pk = PlanarKCoords {
            c: k.big_g + rng.gen_range(0.3..2.0),
            big_r: k.big_r,
            big_l: k.big_l,
            big_g: k.big_g,
            zeta: 0.0,
            i: 0.0,
            g: k.g,
            gbar: k.gbar,
            r: k.r,
            ell: k.ell,
        };
        let sigma = if rng.gen_bool(0.5) { 1 } else { -1 };
        match canonicity_residual_planar(&pk, sigma, &ms, 1e-6) {
            Ok(r) => planar.push(r),
            Err(_) => *skipped += 1,
        }
    }
    Ok(vec![
        Check::new("spatial map", &spatial, 1e-5),
        Check::new("planar map", &planar, 1e-5),
    ])
}

fn euler(rng: &mut ChaCha8Rng, n: usize, skipped: &mut usize) -> Result<Vec<Check>> {
    let (mut sym_ell, mut sym_cart, mut k_cart) = (vec![], vec![], vec![]);
    while k_cart.len() < n {
        let ms = sample_masses(rng)?;
        let k = KCoords::sample(rng, k_cart.len() % 2 == 0);
        let Ok(s) = k_to_cartesian(&k, &ms) else {
            *skipped += 1;
            continue;
        };
        // Centres at 0 and x' seen from their midpoint.
        let u = s.y / ms.m;
        let v0 = s.xprime / 2.0;
        let v = s.x - v0;
        let measured = (|| -> Result<(f64, f64, f64)> {
            let sym = euler_integral_symmetric(&u, &v, &v0, ms.big_m, ms.big_m_prime)?;
            let ell = euler_integral_elliptic(&u, &v, &v0, ms.big_m, ms.big_m_prime)?;
            let cart = euler_integral_cartesian(&s, &ms)?;
            let shifted = cart + euler_integral_energy_term(&s, &ms)?;
            let back = e_in_k(&cartesian_to_k(&s, &ms)?, &ms)?;
            Ok((
                rel(sym, ell),
                rel(ms.m * ms.m * sym, shifted),
                rel(back, cart),
            ))
        })();
        match measured {
            Ok((a, b, c)) => {
                sym_ell.push(a);
                sym_cart.push(b);
                k_cart.push(c);
            }
            Err(_) => *skipped += 1,
        }
    }
    Ok(vec![
        Check::new("symmetric vs elliptic", &sym_ell, 1e-10),
        Check::new("symmetric vs Cartesian", &sym_cart, 1e-10),
        Check::new("K-coordinates vs Cartesian", &k_cart, 1e-10),
    ])
}

/// A random point `(Λ, Θ, Γ, ḡ, r)` away from the collision set.
fn secular_point(rng: &mut ChaCha8Rng, ms: &MassParams) -> (f64, f64, f64, f64, f64) {
    let l: f64 = rng.gen_range(0.8..1.5);
    let g = l * rng.gen_range(0.2..0.95);
    let theta = if rng.gen_bool(0.3) {
        0.0
    } else {
        g * rng.gen_range(-0.8..0.8)
    };
    let r = ms.semi_major_axis(l) * rng.gen_range(0.3..3.0);
    (l, theta, g, rng.gen_range(0.0..TAU), r)
}

fn renormalizable(rng: &mut ChaCha8Rng, n: usize, skipped: &mut usize) -> Result<Vec<Check>> {
    let q = QuadratureSpec {
        nodes: 64,
        tol: 1e-11,
        max_doublings: 9,
    };
    let ms = MassParams::new(0.7, 1.3, 0.4, 1.0)?;
    let (mut normal_form, mut levels) = (vec![], vec![]);
    while normal_form.len() < n {
        let (l, theta, g, gbar, r) = secular_point(rng, &ms);
        let measured = (|| -> Result<f64> {
            let e0 = e0_in_k(l, g, theta, r, gbar, &ms)?;
            let (ec, ic) = ei_params(l, theta, e0)?;
            let u = average_potential(r, l, theta, g, gbar, &ms, &q)?;
            let f = f_tilde(r, ms.semi_major_axis(l), ec, ic, &q)?;
            Ok((ms.m * ms.big_m_prime * f + u).abs())
        })();
        match measured {
            Ok(v) if v.is_finite() => normal_form.push(v),
            _ => *skipped += 1,
        }
    }
    while levels.len() < n {
        let (l, theta, g1, gbar1, r) = secular_point(rng, &ms);
        let measured = (|| -> Result<Option<f64>> {
            let e0 = e0_in_k(l, g1, theta, r, gbar1, &ms)?;
            // Another point of the same level: solve for ḡ at a new Γ.
            let g2 = rng.gen_range(theta.abs().max(0.05 * l)..0.97 * l);
            let s = (1.0 - (theta / g2).powi(2)).max(0.0).sqrt();
            let e = (1.0 - (g2 / l).powi(2)).sqrt();
            let c = (e0 - g2 * g2) / (ms.m * ms.m * ms.big_m * r * s * e);
            if !(c.abs() <= 1.0) {
                return Ok(None);
            }
            let gbar2 = c.acos() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let u1 = average_potential(r, l, theta, g1, gbar1, &ms, &q)?;
            let u2 = average_potential(r, l, theta, g2, gbar2, &ms, &q)?;
            Ok(Some((u1 - u2).abs()))
        })();
        match measured {
            Ok(Some(v)) if v.is_finite() => levels.push(v),
            _ => *skipped += 1,
        }
    }
    Ok(vec![
        Check::new("normal form", &normal_form, 1e-9),
        Check::new("common levels", &levels, 2e-11),
    ])
}

/// Cartesian bracket `Σ ∂f/∂q ∂g/∂p - ∂f/∂p ∂g/∂q` over the pairs
/// `(x', y')` and `(x, y)`, divided by `|∇f| |∇g|`.
fn cartesian_bracket(
    s: &CartesianState,
    f: impl Fn(&CartesianState) -> Result<f64>,
    g: impl Fn(&CartesianState) -> Result<f64>,
    h: f64,
) -> Result<f64> {
    let base = s.to_array();
    let grad = |fun: &dyn Fn(&CartesianState) -> Result<f64>| -> Result<[f64; 12]> {
        let mut out = [0.0; 12];
        for j in 0..12 {
            let (mut p, mut m) = (base, base);
            p[j] += h;
            m[j] -= h;
            out[j] = (fun(&from_array(&p))? - fun(&from_array(&m))?) / (2.0 * h);
        }
        Ok(out)
    };
    let (df, dg) = (grad(&f)?, grad(&g)?);
    let mut b = 0.0;
    for k in 0..6 {
        // momenta in slots 0..6, positions in 6..12
        b += df[6 + k] * dg[k] - df[k] * dg[6 + k];
    }
    let norm = |v: &[f64; 12]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(b.abs() / (norm(&df) * norm(&dg)).max(f64::MIN_POSITIVE))
}

fn from_array(a: &[f64; 12]) -> CartesianState {
    let v = |i: usize| Vector3::new(a[i], a[i + 1], a[i + 2]);
    CartesianState {
        yprime: v(0),
        y: v(3),
        xprime: v(6),
        x: v(9),
    }
}

fn poisson(rng: &mut ChaCha8Rng, n: usize, skipped: &mut usize) -> Result<Vec<Check>> {
    let (mut with_r, mut with_l, mut with_theta, mut with_u) = (vec![], vec![], vec![], vec![]);
    while with_r.len() < n {
        let ms = sample_masses(rng)?;
        let Ok(s) = k_to_cartesian(&KCoords::sample(rng, false), &ms) else {
            *skipped += 1;
            continue;
        };
        let e0 = |s: &CartesianState| euler_integral_kepler_part(s, &ms);
        let r = |s: &CartesianState| Ok(s.xprime.norm());
        let lam = |s: &CartesianState| {
            let h = s.y.norm_squared() / (2.0 * ms.m) - ms.m * ms.big_m / s.x.norm();
            Ok((ms.m.powi(3) * ms.big_m.powi(2) / (-2.0 * h)).sqrt())
        };
        let theta = |s: &CartesianState| Ok(s.inner_momentum().dot(&s.xprime) / s.xprime.norm());
        let measured = (|| -> Result<(f64, f64, f64)> {
            Ok((
                cartesian_bracket(&s, e0, r, 1e-6)?,
                cartesian_bracket(&s, e0, lam, 1e-6)?,
                cartesian_bracket(&s, e0, theta, 1e-6)?,
            ))
        })();
        match measured {
            Ok((a, b, c)) => {
                with_r.push(a);
                with_l.push(b);
                with_theta.push(c);
            }
            Err(_) => *skipped += 1,
        }
    }
    let q = QuadratureSpec {
        nodes: 64,
        tol: 1e-13,
        max_doublings: 9,
    };
    let ms = MassParams::new(0.7, 1.3, 0.4, 1.0)?;
    while with_u.len() < n {
        let (l, theta, g, gbar, r) = secular_point(rng, &ms);
        let measured = (|| -> Result<f64> {
            let e0 = |g: f64, b: f64| e0_in_k(l, g, theta, r, b, &ms);
            let u = |g: f64, b: f64| average_potential(r, l, theta, g, b, &ms, &q);
            let h = 1e-4 * l;
            // Richardson extrapolation over the steps h and h/2.
            let b1 = poisson_bracket_fd(u, e0, (g, gbar), h)?;
            let b2 = poisson_bracket_fd(u, e0, (g, gbar), h / 2.0)?;
            let b = (4.0 * b2 - b1) / 3.0;
            let grad = |f: &dyn Fn(f64, f64) -> Result<f64>| -> Result<f64> {
                let dg = (f(g + h, gbar)? - f(g - h, gbar)?) / (2.0 * h);
                let db = (f(g, gbar + h)? - f(g, gbar - h)?) / (2.0 * h);
                Ok(dg.hypot(db))
            };
            Ok(b.abs() / (grad(&u)? * grad(&e0)?).max(f64::MIN_POSITIVE))
        })();
        match measured {
            Ok(v) if v.is_finite() => with_u.push(v),
            _ => *skipped += 1,
        }
    }
    Ok(vec![
        Check::new("{E0, r}", &with_r, 1e-7),
        Check::new("{E0, Λ}", &with_l, 1e-7),
        Check::new("{E0, Θ}", &with_theta, 1e-7),
        Check::new("{U, E0}", &with_u, 1e-6),
    ])
}

fn conservation(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let ms = MassParams::new(0.7, 1.3, 0.4, 1.0)?;
    let (mut dj, mut de, mut dt) = (vec![], vec![], vec![]);
    for k in 0..n {
        let l: f64 = rng.gen_range(0.8..1.2);
        let g = l * rng.gen_range(0.5..0.9);
        let theta = if k % 2 == 0 {
            0.0
        } else {
            g * rng.gen_range(-0.7..0.7)
        };
        // Second centre well outside the apocentre.
        let apo = ms.semi_major_axis(l) * (1.0 + (1.0 - (g / l).powi(2)).sqrt());
        let r = apo * rng.gen_range(4.0..8.0);
        let y0 = [
            l,
            g,
            theta,
            0.0,
            rng.gen_range(0.0..TAU),
            rng.gen_range(0.0..TAU),
            PI,
            r,
        ];
        let period = TAU * l.powi(3) / (ms.m.powi(3) * ms.big_m.powi(2));
        let cfg = IntegratorConfig {
            t_end: 10.0 * period,
            ..IntegratorConfig::default()
        };
        let (samples, stop) = trajectory(&TwoCentre { masses: ms }, y0, &cfg)?;
        if stop != Stop::Completed {
            return Err(crate::error::numeric(format!(
                "two-centre run stopped early: {stop:?}"
            )));
        }
        dj.push(relative_drift(&samples, |s| s.invariants.energy));
        de.push(relative_drift(&samples, |s| {
            s.invariants.euler.unwrap_or(f64::NAN)
        }));
        // Θ may vanish; measure its absolute drift against Γ.
        let t0 = samples[0].y[2];
        dt.push(
            samples
                .iter()
                .map(|s| (s.y[2] - t0).abs() / g)
                .fold(0.0, f64::max),
        );
    }
    Ok(vec![
        Check::new("J", &dj, 1e-8),
        Check::new("E", &de, 1e-8),
        Check::new("Θ", &dt, 1e-8),
    ])
}
