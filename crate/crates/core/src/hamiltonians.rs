//! The two-centre Hamiltonian and its Euler integral in Cartesian, symmetric,
//! elliptic and K-coordinates.

use nalgebra::Vector3;

use crate::error::{collision, domain, Result};
use crate::kepler::{Ellipse, MassParams};
use crate::kmap::{CartesianState, KCoords};
use crate::scalar::Scalar;

const COLLISION_TOL: f64 = 1e-300;

fn distance(a: &Vector3<f64>, b: &Vector3<f64>, what: &str) -> Result<f64> {
    let d = (a - b).norm();
    if !(d > 0.0) {
        return Err(collision(format!("{what} coincide")));
    }
    Ok(d)
}

/// `J = |y|²/(2m) - mM/|x| - mM'/|x' - x|`.
pub fn two_centre_energy_cartesian(s: &CartesianState, masses: &MassParams) -> Result<f64> {
    let rx = distance(&s.x, &Vector3::zeros(), "x and the origin")?;
    let rd = distance(&s.xprime, &s.x, "x and x'")?;
    Ok(s.y.norm_squared() / (2.0 * masses.m)
        - masses.m * masses.big_m / rx
        - masses.m * masses.big_m_prime / rd)
}

/// Kepler part `E₀ = |M|² - x'·L` of the Euler integral.
pub fn euler_integral_kepler_part(s: &CartesianState, masses: &MassParams) -> Result<f64> {
    distance(&s.x, &Vector3::zeros(), "x and the origin")?;
    Ok(s.inner_momentum().norm_squared() - s.xprime.dot(&s.eccentricity_vector(masses)))
}

/// `E = |M|² - x'·L + m²M' ((x' - x)·x') / |x' - x|`.
pub fn euler_integral_cartesian(s: &CartesianState, masses: &MassParams) -> Result<f64> {
    let e0 = euler_integral_kepler_part(s, masses)?;
    let d = s.xprime - s.x;
    let rd = distance(&s.xprime, &s.x, "x and x'")?;
    Ok(e0 + masses.m * masses.m * masses.big_m_prime * d.dot(&s.xprime) / rd)
}

/// The term `m (|x'|²/2) J` by which the symmetric and the asymmetric
/// integrals differ.
pub fn euler_integral_energy_term(s: &CartesianState, masses: &MassParams) -> Result<f64> {
    Ok(masses.m * 0.5 * s.xprime.norm_squared() * two_centre_energy_cartesian(s, masses)?)
}

/// Euler integral of the problem with centres at `∓v₀`:
/// `|v×u|² + (v₀·u)² + 2 v·v₀ (m₊/|v+v₀| - m₋/|v-v₀|)`.
pub fn euler_integral_symmetric(
    u: &Vector3<f64>,
    v: &Vector3<f64>,
    v0: &Vector3<f64>,
    m_plus: f64,
    m_minus: f64,
) -> Result<f64> {
    let rp = distance(v, &-v0, "v and -v0")?;
    let rm = distance(v, v0, "v and v0")?;
    Ok(v.cross(u).norm_squared()
        + v0.dot(u).powi(2)
        + 2.0 * v.dot(v0) * (m_plus / rp - m_minus / rm))
}

/// Elliptic coordinates `(λ, β)` of `v` with foci `∓v₀`.
pub fn elliptic_coordinates(v: &Vector3<f64>, v0: &Vector3<f64>) -> Result<(f64, f64)> {
    let r0 = v0.norm();
    if !(r0 > 0.0) {
        return Err(domain("foci coincide (v0 = 0)"));
    }
    let rp = distance(v, &-v0, "v and -v0")?;
    let rm = distance(v, v0, "v and v0")?;
    Ok((0.5 * (rp + rm) / r0, 0.5 * (rp - rm) / r0))
}

/// The same integral through the separated elliptic-coordinate form, with
/// momenta conjugate to `(λ, β)` built from the spherical coordinates about
/// `v₀` and the energy `h` evaluated at the same point.
pub fn euler_integral_elliptic(
    u: &Vector3<f64>,
    v: &Vector3<f64>,
    v0: &Vector3<f64>,
    m_plus: f64,
    m_minus: f64,
) -> Result<f64> {
    let (lam, beta) = elliptic_coordinates(v, v0)?;
    let r0 = v0.norm();
    let (l2, b2) = (lam * lam - 1.0, 1.0 - beta * beta);
    if !(l2 > 1e-12) || !(b2 > 1e-12) {
        return Err(domain(format!(
            "degenerate elliptic coordinates λ = {lam}, β = {beta}"
        )));
    }
    let r = v.norm();
    let mvec = v.cross(u);
    let big_m = mvec.norm();
    let theta = mvec.dot(v0) / r0;
    let big_r = u.dot(v) / r;

    let d = lam * lam + beta * beta - 1.0;
    let sign = if r * r * u.dot(v0) - v.dot(v0) * u.dot(v) >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let root = sign
        * (b2 * l2 * big_m * big_m - d * theta * theta)
            .max(0.0)
            .sqrt();
    let p_lam = r0 * lam * big_r / d.sqrt() - beta * root / (d * l2);
    let p_beta = r0 * beta * big_r / d.sqrt() + lam * root / (d * b2);

    let (rp, rm) = (r0 * (lam + beta), r0 * (lam - beta));
    let h = 0.5 * big_r * big_r + big_m * big_m / (2.0 * r * r) - m_plus / rp - m_minus / rm;

    Ok(0.5 * p_beta * p_beta * b2 - 0.5 * p_lam * p_lam * l2
        + 0.5 * theta * theta * (1.0 / b2 - 1.0 / l2)
        + r0 * (m_plus * (lam + beta) + m_minus * (lam - beta))
        + r0 * r0 * (lam * lam + beta * beta) * h)
}

/// Ingredients shared by the K-coordinate expressions.
pub(crate) struct TwoCentreGeometry<T> {
    pub ellipse: Ellipse<T>,
    /// `√(1 - Θ²/Γ²)`.
    pub sin_i2: T,
    pub p: T,
    /// `|x' - x|`.
    pub dist: T,
}

impl<T: Scalar> TwoCentreGeometry<T> {
    pub fn new(l: T, g: T, theta: T, r: T, ell: T, gbar: T, masses: &MassParams) -> Result<Self> {
        if !(g.re() > 0.0) || !(theta.re().abs() <= g.re()) {
            return Err(domain(format!(
                "need 0 < Γ and |Θ| ≤ Γ, got Γ = {}, Θ = {}",
                g.re(),
                theta.re()
            )));
        }
        if !(r.re() > 0.0) {
            return Err(domain(format!("r = {} must be positive", r.re())));
        }
        let ellipse = Ellipse::new(l, g, ell, masses)?;
        let ratio = theta / g;
        let s2 = -(ratio * ratio) + 1.0;
        let sin_i2 = if s2.re() > 0.0 {
            s2.sqrt()
        } else {
            T::cst(0.0)
        };
        let p = ellipse.p(gbar);
        let a = ellipse.a;
        let d2 = r * r + r * a * sin_i2 * p * 2.0 + (a * ellipse.rho).sq();
        if !(d2.re() > COLLISION_TOL * r.re() * r.re()) {
            return Err(collision("inner body meets the second centre"));
        }
        Ok(Self {
            ellipse,
            sin_i2,
            p,
            dist: d2.sqrt(),
        })
    }
}

pub(crate) fn kepler_energy<T: Scalar>(l: T, masses: &MassParams) -> T {
    -(l * l).recip() * (0.5 * masses.m.powi(3) * masses.big_m.powi(2))
}

/// `J` in K-coordinates as a function of `(Λ, Γ, Θ, r, ℓ, ḡ)`.
pub(crate) fn j_generic<T: Scalar>(
    l: T,
    g: T,
    theta: T,
    r: T,
    ell: T,
    gbar: T,
    masses: &MassParams,
) -> Result<T> {
    let geo = TwoCentreGeometry::new(l, g, theta, r, ell, gbar, masses)?;
    Ok(kepler_energy(l, masses) - geo.dist.recip() * (masses.m * masses.big_m_prime))
}

/// `E₀ = Γ² + m²M r √(1-Θ²/Γ²) √(1-Γ²/Λ²) cos ḡ`.
pub(crate) fn e0_generic<T: Scalar>(
    l: T,
    g: T,
    theta: T,
    r: T,
    gbar: T,
    masses: &MassParams,
) -> Result<T> {
    if !(l.re() > 0.0) || !(g.re().abs() <= l.re()) || !(theta.re().abs() <= g.re().abs()) {
        return Err(domain(format!(
            "need |Θ| ≤ |Γ| ≤ Λ, got Λ = {}, Γ = {}, Θ = {}",
            l.re(),
            g.re(),
            theta.re()
        )));
    }
    let unit = |x: T| {
        let s = -(x * x) + 1.0;
        if s.re() > 0.0 {
            s.sqrt()
        } else {
            T::cst(0.0)
        }
    };
    let sin_i2 = if theta.re() == 0.0 {
        T::cst(1.0)
    } else {
        unit(theta / g)
    };
    let e = unit(g / l);
    Ok(g * g + r * sin_i2 * e * gbar.cos() * (masses.m * masses.m * masses.big_m))
}

/// Interaction part `E₁ = m²M' r (r + a √(1-Θ²/Γ²) p) / |x' - x|`.
pub(crate) fn e1_generic<T: Scalar>(geo: &TwoCentreGeometry<T>, r: T, masses: &MassParams) -> T {
    r * (r + geo.ellipse.a * geo.sin_i2 * geo.p) / geo.dist
        * (masses.m * masses.m * masses.big_m_prime)
}

/// Two-centre energy in K-coordinates.
pub fn j_in_k(k: &KCoords, masses: &MassParams) -> Result<f64> {
    j_generic(k.big_l, k.big_g, k.big_theta, k.r, k.ell, k.gbar, masses)
}

/// Euler integral in K-coordinates.
pub fn e_in_k(k: &KCoords, masses: &MassParams) -> Result<f64> {
    let geo = TwoCentreGeometry::new(k.big_l, k.big_g, k.big_theta, k.r, k.ell, k.gbar, masses)?;
    let e0 = e0_generic(k.big_l, k.big_g, k.big_theta, k.r, k.gbar, masses)?;
    Ok(e0 + e1_generic(&geo, k.r, masses))
}

/// Kepler part of the Euler integral; independent of `ℓ`.
pub fn e0_in_k(l: f64, g: f64, theta: f64, r: f64, gbar: f64, masses: &MassParams) -> Result<f64> {
    e0_generic(l, g, theta, r, gbar, masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmap::{cartesian_to_k, k_to_cartesian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit() -> MassParams {
        MassParams::new(1.0, 1.0, 1.0, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-14)
    }

    fn rand_vec(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
        Vector3::new(
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
        )
    }

    #[test]
    fn direct_energy_sum() {
        let s = CartesianState {
            yprime: Vector3::zeros(),
            y: Vector3::zeros(),
            xprime: Vector3::new(2.0, 0.0, 0.0),
            x: Vector3::new(1.0, 0.0, 0.0),
        };
        assert_eq!(two_centre_energy_cartesian(&s, &unit()).unwrap(), -2.0);
        let s = CartesianState { x: s.xprime, ..s };
        assert!(matches!(
            two_centre_energy_cartesian(&s, &unit()),
            Err(crate::Error::Collision(_))
        ));
    }

    #[test]
    fn merged_centres_leave_angular_momentum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = CartesianState {
            yprime: rand_vec(&mut rng, 1.0),
            y: rand_vec(&mut rng, 1.0),
            xprime: Vector3::zeros(),
            x: rand_vec(&mut rng, 1.0),
        };
        let e = euler_integral_cartesian(&s, &unit()).unwrap();
        assert!(rel(e, s.inner_momentum().norm_squared()) < 1e-14);
    }

    #[test]
    fn symmetric_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = rand_vec(&mut rng, 1.0);
        let v = rand_vec(&mut rng, 1.0);
        let e = euler_integral_symmetric(&u, &v, &Vector3::zeros(), 1.0, 2.0).unwrap();
        assert!(rel(e, v.cross(&u).norm_squared()) < 1e-14);

        let v0 = Vector3::new(0.0, 0.0, 0.7);
        let v = Vector3::new(0.3, -1.1, 0.0);
        let e = euler_integral_symmetric(&u, &v, &v0, 1.3, 1.3).unwrap();
        assert!(rel(e, v.cross(&u).norm_squared() + v0.dot(&u).powi(2)) < 1e-14);
    }

    #[test]
    fn bisector_plane_has_zero_beta() {
        let v0 = Vector3::new(0.0, 0.0, 0.7);
        let v = Vector3::new(0.3, -1.1, 0.0);
        let (lam, beta) = elliptic_coordinates(&v, &v0).unwrap();
        assert!(beta.abs() < 1e-16);
        let v = Vector3::new(0.3, -1.1, 0.4);
        let (lam2, beta2) = elliptic_coordinates(&v, &v0).unwrap();
        let (rp, rm) = ((v + v0).norm(), (v - v0).norm());
        assert!((rp + rm - 2.0 * 0.7 * lam2).abs() < 1e-15);
        assert!((rp - rm - 2.0 * 0.7 * beta2).abs() < 1e-15);
        assert!(lam > 1.0);
    }

    #[test]
    fn elliptic_form_matches_symmetric_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u = rand_vec(&mut rng, 1.0);
            let v = rand_vec(&mut rng, 2.0);
            let v0 = rand_vec(&mut rng, 1.0);
            let (mp, mm) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
            let a = euler_integral_symmetric(&u, &v, &v0, mp, mm).unwrap();
            let b = euler_integral_elliptic(&u, &v, &v0, mp, mm).unwrap();
            assert!(rel(a, b) < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let v0 = Vector3::new(0.0, 0.0, 1.0);
        let v = Vector3::new(0.0, 0.0, 3.0);
        let u = Vector3::new(0.1, 0.2, 0.3);
        assert!(matches!(
            euler_integral_elliptic(&u, &v, &v0, 1.0, 1.0),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn asymmetric_integral_is_shifted_symmetric_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ms = MassParams::new(0.8, 1.4, 0.6, 1.0).unwrap();
        for _ in 0..100 {
            let u = rand_vec(&mut rng, 1.0);
            let v = rand_vec(&mut rng, 2.0);
            let v0 = rand_vec(&mut rng, 1.0);
            let s = CartesianState {
                yprime: rand_vec(&mut rng, 1.0),
                y: u * ms.m,
                xprime: v0 * 2.0,
                x: v0 + v,
            };
            let asym = euler_integral_cartesian(&s, &ms).unwrap()
                + euler_integral_energy_term(&s, &ms).unwrap();
            let sym = ms.m
                * ms.m
                * euler_integral_symmetric(&u, &v, &v0, ms.big_m, ms.big_m_prime).unwrap();
            assert!(rel(asym, sym) < 1e-10, "{asym} {sym}");
        }
    }

    #[test]
    fn keplerian_limit_in_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ms = MassParams::new(0.8, 1.4, 1e-300, 1.0).unwrap();
        let ms0 = MassParams {
            big_m_prime: 0.0,
            ..ms
        };
        let k = KCoords::sample(&mut rng, false);
        let j = j_in_k(&k, &ms0).unwrap();
        assert_eq!(
            j,
            -ms.m.powi(3) * ms.big_m.powi(2) / (2.0 * k.big_l * k.big_l)
        );
        let e = e_in_k(&k, &ms0).unwrap();
        let e0 = e0_in_k(k.big_l, k.big_g, k.big_theta, k.r, k.gbar, &ms0).unwrap();
        assert_eq!(e, e0);
    }

    #[test]
    fn kepler_part_examples() {
        let ms = unit();
        let e = e0_in_k(1.3, 0.7, 0.2, 3.0, FRAC_PI_2, &ms).unwrap();
        assert!((e - 0.49).abs() < 1e-15);
        assert_eq!(e0_in_k(1.3, 1.3, 0.2, 3.0, 0.4, &ms).unwrap(), 1.3 * 1.3);
        let delta = 2.5;
        let ms = MassParams::new(1.0, delta, delta, 1.0).unwrap();
        assert!((e0_in_k(1.0, 0.0, 0.0, 1.0, PI, &ms).unwrap() + delta).abs() < 1e-15);
    }

    #[test]
    fn k_expressions_match_cartesian() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ms = MassParams::new(0.7, 1.3, 0.4, 1.0).unwrap();
        for n in 0..200 {
            let k = KCoords::sample(&mut rng, n % 2 == 0);
            let s = k_to_cartesian(&k, &ms).unwrap();
            assert!(
                rel(
                    j_in_k(&k, &ms).unwrap(),
                    two_centre_energy_cartesian(&s, &ms).unwrap()
                ) < 1e-12
            );
            assert!(
                rel(
                    e_in_k(&k, &ms).unwrap(),
                    euler_integral_cartesian(&s, &ms).unwrap()
                ) < 1e-10
            );
            let e0 = e0_in_k(k.big_l, k.big_g, k.big_theta, k.r, k.gbar, &ms).unwrap();
            assert!(rel(e0, euler_integral_kepler_part(&s, &ms).unwrap()) < 1e-10);
            let back = cartesian_to_k(&s, &ms).unwrap();
            assert!(
                rel(
                    e_in_k(&back, &ms).unwrap(),
                    euler_integral_cartesian(&s, &ms).unwrap()
                ) < 1e-10
            );
        }
    }
}
