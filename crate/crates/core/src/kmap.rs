//! The canonical K-coordinates and their map to Cartesian impulses and positions.

use nalgebra::{Matrix3, SMatrix, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{domain, numeric, Result};
use crate::kepler::{wrap_angle, Ellipse, MassParams};

const NODE_TOL: f64 = 1e-9;

/// The twelve K-coordinates. Actions `(Z, C, Θ, Γ, R, Λ)` are conjugate to
/// `(ζ, g, ϑ, ḡ, r, ℓ)` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KCoords {
    pub z: f64,
    pub c: f64,
    pub big_theta: f64,
    pub big_g: f64,
    pub big_r: f64,
    pub big_l: f64,
    pub zeta: f64,
    pub g: f64,
    pub theta: f64,
    pub gbar: f64,
    pub r: f64,
    pub ell: f64,
}

impl KCoords {
    /// `[Z, C, Θ, Γ, R, Λ, ζ, g, ϑ, ḡ, r, ℓ]`.
    pub fn to_array(&self) -> [f64; 12] {
        [
            self.z,
            self.c,
            self.big_theta,
            self.big_g,
            self.big_r,
            self.big_l,
            self.zeta,
            self.g,
            self.theta,
            self.gbar,
            self.r,
            self.ell,
        ]
    }

    pub fn from_array(v: &[f64; 12]) -> Self {
        Self {
            z: v[0],
            c: v[1],
            big_theta: v[2],
            big_g: v[3],
            big_r: v[4],
            big_l: v[5],
            zeta: v[6],
            g: v[7],
            theta: v[8],
            gbar: v[9],
            r: v[10],
            ell: v[11],
        }
    }

    /// Random interior point. With `planar` set, `Θ = 0` and `ϑ ∈ {0, π}`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, planar: bool) -> Self {
        let big_l: f64 = rng.gen_range(0.8..1.5);
        let big_g = big_l * rng.gen_range(0.3..0.9);
        let big_theta: f64 = if planar {
            0.0
        } else {
            big_g * rng.gen_range(-0.8..0.8)
        };
        let c = big_theta.abs() + rng.gen_range(0.3..2.0);
        let i: f64 = rng.gen_range(0.3..2.8);
        let theta = if planar {
            if rng.gen_bool(0.5) {
                PI
            } else {
                0.0
            }
        } else {
            rng.gen_range(0.0..TAU)
        };
        Self {
            z: c * i.cos(),
            c,
            big_theta,
            big_g,
            big_r: rng.gen_range(-1.0..1.0),
            big_l,
            zeta: rng.gen_range(0.0..TAU),
            g: rng.gen_range(0.0..TAU),
            theta,
            gbar: rng.gen_range(0.0..TAU),
            r: rng.gen_range(2.0..5.0),
            ell: rng.gen_range(0.0..TAU),
        }
    }
}

/// Impulses and positions `(y', y, x', x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub yprime: Vector3<f64>,
    pub y: Vector3<f64>,
    pub xprime: Vector3<f64>,
    pub x: Vector3<f64>,
}

impl CartesianState {
    /// `[y', y, x', x]` flattened.
    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (k, v) in [self.yprime, self.y, self.xprime, self.x]
            .iter()
            .enumerate()
        {
            out[3 * k..3 * k + 3].copy_from_slice(v.as_slice());
        }
        out
    }

    /// Angular momentum `M = x × y` of the inner body.
    pub fn inner_momentum(&self) -> Vector3<f64> {
        self.x.cross(&self.y)
    }

    /// Total angular momentum `C = x' × y' + x × y`.
    pub fn total_momentum(&self) -> Vector3<f64> {
        self.xprime.cross(&self.yprime) + self.inner_momentum()
    }

    /// Eccentricity vector `L = y × M - m² M x / |x|`.
    pub fn eccentricity_vector(&self, masses: &MassParams) -> Vector3<f64> {
        let mm = masses.m * masses.m * masses.big_m;
        self.y.cross(&self.inner_momentum()) - self.x * (mm / self.x.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inclinations {
    pub i: f64,
    pub i1: f64,
    pub i2: f64,
}

fn checked_acos(cos: f64, what: &str) -> Result<f64> {
    if !(-1.0..=1.0).contains(&cos) {
        return Err(domain(format!("cos {what} = {cos} outside [-1, 1]")));
    }
    Ok(cos.acos())
}

/// `i = acos(Z/C)`, `i₁ = acos(Θ/C)`, `i₂ = acos(Θ/Γ)`.
pub fn inclinations(k: &KCoords) -> Result<Inclinations> {
    if !(k.c > NODE_TOL) {
        return Err(domain(format!(
            "total angular momentum C = {} vanishes",
            k.c
        )));
    }
    if !(k.big_g > 0.0) {
        return Err(domain(format!("Γ = {} must be positive", k.big_g)));
    }
    Ok(Inclinations {
        i: checked_acos(k.z / k.c, "i")?,
        i1: checked_acos(k.big_theta / k.c, "i1")?,
        i2: checked_acos(k.big_theta / k.big_g, "i2")?,
    })
}

pub fn rot1(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot3(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Position and impulse of the inner body in its own orbital frame.
pub fn planar_frame_state(
    l: f64,
    g: f64,
    ell: f64,
    gbar: f64,
    masses: &MassParams,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let el = Ellipse::new(l, g, ell, masses)?;
    let rot = rot3(gbar - FRAC_PI_2);
    let x = rot * Vector3::new(el.a * (el.cos_xi - el.e), el.a * el.eta * el.sin_xi, 0.0);
    let v = el.velocity_factor(l, masses);
    let y = rot * Vector3::new(-v * el.sin_xi, v * el.eta * el.cos_xi, 0.0);
    Ok((x, y))
}

/// The map from K-coordinates to `(y', y, x', x)`.
///
/// `Z = ±C` is accepted: the node `k × C` then vanishes but the map itself
/// stays defined. `|Θ| → Γ` and `|Θ| → C` are rejected.
pub fn k_to_cartesian(k: &KCoords, masses: &MassParams) -> Result<CartesianState> {
    let inc = inclinations(k)?;
    if k.big_theta.abs() / k.big_g > 1.0 - NODE_TOL {
        return Err(domain("node i3 = x' × M vanishes (|Θ| = Γ)"));
    }
    if k.big_theta.abs() / k.c > 1.0 - NODE_TOL {
        return Err(domain("node i2 = C × x' vanishes (|Θ| = C)"));
    }
    if !(k.r > 0.0) {
        return Err(domain(format!("r = {} must be positive", k.r)));
    }
    let outer = rot3(k.zeta) * rot1(inc.i);
    let a = outer * rot3(k.g) * rot1(inc.i1);
    let b = a * rot3(k.theta) * rot1(inc.i2);
    let kz = Vector3::z();

    let (xb, yb) = planar_frame_state(k.big_l, k.big_g, k.ell, k.gbar, masses)?;
    let x = b * xb;
    let y = b * yb;
    let xprime = a * kz * k.r;
    let m_in = b * kz * k.big_g;
    let m_out = outer * kz * k.c - m_in;
    let yprime = xprime * (k.big_r / k.r) + m_out.cross(&xprime) / (k.r * k.r);
    Ok(CartesianState {
        yprime,
        y,
        xprime,
        x,
    })
}

/// Coordinates of the planar problem. `Θ = 0` and the orientation of the inner
/// angular momentum relative to `C` is carried by `σ = ±1` passed alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarKCoords {
    pub c: f64,
    pub big_r: f64,
    pub big_l: f64,
    pub big_g: f64,
    pub zeta: f64,
    pub i: f64,
    pub g: f64,
    pub gbar: f64,
    pub r: f64,
    pub ell: f64,
}

impl PlanarKCoords {
    pub fn to_k(&self, sigma: i8) -> Result<KCoords> {
        let theta = match sigma {
            1 => PI,
            -1 => 0.0,
            _ => return Err(domain(format!("σ must be ±1, got {sigma}"))),
        };
        Ok(KCoords {
            z: self.c * self.i.cos(),
            c: self.c,
            big_theta: 0.0,
            big_g: self.big_g,
            big_r: self.big_r,
            big_l: self.big_l,
            zeta: self.zeta,
            g: self.g,
            theta,
            gbar: self.gbar,
            r: self.r,
            ell: self.ell,
        })
    }
}

/// Planar map: the general map restricted to `Θ = 0`, `ϑ = π` for `σ = +1`
/// (inner angular momentum along `C`) and `ϑ = 0` for `σ = -1`.
///
/// `x' = -r R₃(ζ)R₁(i)R₃(g) j` and
/// `y' = -R R₃(ζ)R₁(i)R₃(g) j + ((C - σΓ)/r) R₃(ζ)R₁(i)R₃(g) i`.
pub fn k_to_cartesian_planar(
    k: &PlanarKCoords,
    sigma: i8,
    masses: &MassParams,
) -> Result<CartesianState> {
    k_to_cartesian(&k.to_k(sigma)?, masses)
}

/// Oriented angle from `u` to `v` about `w`, after projecting both onto the
/// plane orthogonal to `w`.
pub fn oriented_angle(w: &Vector3<f64>, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    let wh = w.normalize();
    let up = u - wh * wh.dot(u);
    let vp = v - wh * wh.dot(v);
    wh.dot(&up.cross(&vp)).atan2(up.dot(&vp))
}

fn node(v: Vector3<f64>, scale: f64, name: &str) -> Result<Vector3<f64>> {
    let n = v.norm();
    if !(n > NODE_TOL * scale) {
        return Err(domain(format!("node {name} vanishes")));
    }
    Ok(v / n)
}

/// Inverse of [`k_to_cartesian`]. Angles are returned in `[0, 2π)`.
pub fn cartesian_to_k(s: &CartesianState, masses: &MassParams) -> Result<KCoords> {
    let kz = Vector3::z();
    let r = s.xprime.norm();
    let xn = s.x.norm();
    if !(r > 0.0) || !(xn > 0.0) {
        return Err(domain("x and x' must be nonzero"));
    }
    let m_in = s.inner_momentum();
    let c_vec = s.total_momentum();
    let big_g = m_in.norm();
    let c = c_vec.norm();
    if !(c > NODE_TOL) {
        return Err(domain(format!("total angular momentum C = {c} vanishes")));
    }
    if !(big_g > 0.0) {
        return Err(domain("inner angular momentum vanishes"));
    }

    let mm = masses.m * masses.m * masses.big_m;
    let kepler = s.y.norm_squared() / (2.0 * masses.m) - masses.m * masses.big_m / xn;
    if !(kepler < 0.0) {
        return Err(domain(format!("Kepler energy {kepler} is not negative")));
    }
    let big_l = (masses.m.powi(3) * masses.big_m.powi(2) / (-2.0 * kepler)).sqrt();
    let lvec = s.eccentricity_vector(masses);
    let e = lvec.norm() / mm;
    if e < NODE_TOL {
        return Err(domain("circular inner orbit: perihelion undefined"));
    }
    if e >= 1.0 {
        return Err(domain(format!("eccentricity {e} ≥ 1")));
    }

    let i1 = node(kz.cross(&c_vec), c, "i1 = k × C")?;
    let i2 = node(c_vec.cross(&s.xprime), c * r, "i2 = C × x'")?;
    let i3 = node(s.xprime.cross(&m_in), r * big_g, "i3 = x' × M")?;
    let p = lvec / lvec.norm();
    let mh = m_in / big_g;

    let zeta = oriented_angle(&kz, &Vector3::x(), &i1);
    let g = oriented_angle(&c_vec, &i1, &i2);
    let theta = oriented_angle(&s.xprime, &i2, &i3);
    let gbar = oriented_angle(&m_in, &i3, &mh.cross(&p));

    let a = masses.semi_major_axis(big_l);
    let eta = big_g / big_l;
    let q = mh.cross(&p);
    let cos_xi = s.x.dot(&p) / a + e;
    let sin_xi = s.x.dot(&q) / (a * eta);
    let xi = sin_xi.atan2(cos_xi);
    let ell = xi - e * xi.sin();

    Ok(KCoords {
        z: c_vec.dot(&kz),
        c,
        big_theta: m_in.dot(&s.xprime) / r,
        big_g,
        big_r: s.yprime.dot(&s.xprime) / r,
        big_l,
        zeta: wrap_angle(zeta),
        g: wrap_angle(g),
        theta: wrap_angle(theta),
        gbar: wrap_angle(gbar),
        r,
        ell: wrap_angle(ell),
    })
}

fn symplectic_residual<const N: usize>(jac: &SMatrix<f64, N, N>) -> f64 {
    let half = N / 2;
    let mut omega = SMatrix::<f64, N, N>::zeros();
    for i in 0..half {
        omega[(i, half + i)] = 1.0;
        omega[(half + i, i)] = -1.0;
    }
    (jac.transpose() * omega * jac - omega).amax()
}

fn fd_jacobian<const N: usize>(
    x0: &[f64; N],
    h: f64,
    f: impl Fn(&[f64; N]) -> Result<[f64; N]>,
) -> Result<SMatrix<f64, N, N>> {
    if !(h > 0.0) || h < 1e-12 {
        return Err(numeric(format!("finite-difference step {h} too small")));
    }
    let mut jac = SMatrix::<f64, N, N>::zeros();
    for j in 0..N {
        let mut xp = *x0;
        let mut xm = *x0;
        xp[j] += h;
        xm[j] -= h;
        let fp = f(&xp).map_err(|e| numeric(format!("step leaves the domain: {e}")))?;
        let fm = f(&xm).map_err(|e| numeric(format!("step leaves the domain: {e}")))?;
        for i in 0..N {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// `‖JᵀΩJ - Ω‖∞` for the finite-difference Jacobian `J` of [`k_to_cartesian`],
/// with K-coordinates ordered as in [`KCoords::to_array`] and Cartesian
/// coordinates as `(y', y, x', x)`.
pub fn canonicity_residual(k: &KCoords, masses: &MassParams, fd_step: f64) -> Result<f64> {
    k_to_cartesian(k, masses)?;
    let jac = fd_jacobian(&k.to_array(), fd_step, |v| {
        Ok(k_to_cartesian(&KCoords::from_array(v), masses)?.to_array())
    })?;
    Ok(symplectic_residual(&jac))
}

/// Same residual for the planar map in the plane `i = 0`, `ζ = 0`, on the
/// variables `(C, Γ, R, Λ, g, ḡ, r, ℓ)` and the in-plane components of
/// `(y', y, x', x)`.
pub fn canonicity_residual_planar(
    k: &PlanarKCoords,
    sigma: i8,
    masses: &MassParams,
    fd_step: f64,
) -> Result<f64> {
    let base = PlanarKCoords {
        i: 0.0,
        zeta: 0.0,
        ..*k
    };
    let map = |v: &[f64; 8]| -> Result<[f64; 8]> {
        let pk = PlanarKCoords {
            c: v[0],
            big_g: v[1],
            big_r: v[2],
            big_l: v[3],
            g: v[4],
            gbar: v[5],
            r: v[6],
            ell: v[7],
            ..base
        };
        let s = k_to_cartesian_planar(&pk, sigma, masses)?;
        Ok([
            s.yprime[0],
            s.yprime[1],
            s.y[0],
            s.y[1],
            s.xprime[0],
            s.xprime[1],
            s.x[0],
            s.x[1],
        ])
    };
    let x0 = [
        base.c, base.big_g, base.big_r, base.big_l, base.g, base.gbar, base.r, base.ell,
    ];
    map(&x0)?;
    Ok(symplectic_residual(&fd_jacobian(&x0, fd_step, map)?))
}
