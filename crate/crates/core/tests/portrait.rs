use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twocentre::dynamics::{trajectory, HamiltonianSystem, IntegratorConfig, SecularE0, Stop};
use twocentre::hamiltonians::e0_in_k;
use twocentre::kepler::angle_diff;
use twocentre::portrait::*;
use twocentre::MassParams;

const DELTAS: [f64; 7] = [0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 4.0];

fn levels(delta: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = admissible_range(delta).unwrap();
    (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect()
}

#[test]
fn sampled_levels_satisfy_the_level_equation() {
    for d in DELTAS {
        for e in levels(d, 40) {
            for p in level_curve(e, d, 50).unwrap() {
                assert!(
                    (ehat0(p.gbar, p.ghat, d) - e).abs() < 1e-12,
                    "δ={d} Ê={e} {p:?}"
                );
            }
        }
    }
}

#[test]
fn derivative_matches_finite_differences() {
    for d in [0.5, 1.5, 3.0] {
        for e in levels(d, 12) {
            let r = g_roots(e, d).unwrap();
            if r.g_max - r.g_min < 1e-3 {
                continue;
            }
            for k in 1..10 {
                let x = r.g_min + (r.g_max - r.g_min) * k as f64 / 10.0;
                let h = 1e-6;
                let fd = (level_branch(e, d, x + h).unwrap().0
                    - level_branch(e, d, x - h).unwrap().0)
                    / (2.0 * h);
                let an = g_derivative(e, d, x).unwrap();
                assert!(
                    (fd - an).abs() < 1e-6 * an.abs().max(1.0),
                    "δ={d} Ê={e} Ĝ={x}: {fd} vs {an}"
                );
            }
        }
    }
}

#[test]
fn derivative_vanishes_at_extremal_point() {
    for (d, e) in [(0.5, 1.05), (1.5, 1.3), (3.0, 1.5)] {
        let g0 = (2.0f64 - e).sqrt();
        let r = g_roots(e, d).unwrap();
        if g0 > r.g_min && g0 < r.g_max {
            assert!(g_derivative(e, d, g0).unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn branch_increases_below_level_one() {
    for d in [0.5, 1.5, 3.0] {
        for e in levels(d, 20).into_iter().filter(|&e| e < 1.0) {
            let r = g_roots(e, d).unwrap();
            let mut prev = -1.0;
            for k in 0..=200 {
                let x = r.g_min + (r.g_max - r.g_min) * k as f64 / 200.0;
                let g = level_branch(e, d, x).unwrap().0;
                assert!(g >= prev - 1e-12, "δ={d} Ê={e}");
                prev = g;
            }
        }
    }
}

#[test]
fn symmetry_in_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (g, x, d) = (
            rng.gen_range(0.0..TAU),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.1..4.0),
        );
        assert!((ehat0(g, x, d) - ehat0(PI - g, x, -d)).abs() < 1e-14);
    }
}

#[test]
fn separatrix_shapes() {
    let s = separatrices(0.5, 64).unwrap();
    assert!(s.s0.is_some());
    let at_zero = s
        .s1_vertical
        .iter()
        .find(|p| p.0 == 0.0 && p.1 > 0.0)
        .unwrap();
    assert!((at_zero.1 - 0.75f64.sqrt()).abs() < 1e-15);
    for d in [0.5, 1.0, 1.5, 3.0] {
        let s = separatrices(d, 64).unwrap();
        for &(g, y) in s.s1_vertical.iter().chain(&s.s1_horizontal) {
            assert!((ehat0(g, y, d) - 1.0).abs() < 1e-12, "δ={d} ({g}, {y})");
        }
    }
    let s = separatrices(3.0, 64).unwrap();
    assert!(s.s0.is_none() && s.note.is_some());
    assert!(s
        .s1_vertical
        .iter()
        .all(|p| p.0.cos().abs() <= 1.0 / 3.0 + 1e-15));
    assert!(separatrices(1.0, 16)
        .unwrap()
        .note
        .unwrap()
        .contains("merge"));
}

fn collision_setup(delta: f64) -> (MassParams, f64, f64, f64) {
    let ms = MassParams::new(0.8, 1.1, 0.3, 1.0).unwrap();
    let l = 0.9;
    let r = delta * l * l / (ms.m * ms.m * ms.big_m);
    (ms, l, r, (delta * (2.0 - delta)).sqrt())
}

#[test]
fn collision_orbit_solves_hamilton_equations() {
    for delta in [0.5, 1.0, 1.5] {
        let (ms, l, r, sigma) = collision_setup(delta);
        let sys = SecularE0 {
            masses: ms,
            l,
            r,
            theta: 0.0,
        };
        for branch in [1, -1] {
            for k in -20..=20 {
                // At δ = 1 the orbit is circular at t₀.
                if delta == 1.0 && k == 0 {
                    continue;
                }
                let t = 0.3 + 5.0 * k as f64 / (20.0 * sigma * l);
                let (g, gb) = collision_orbit(delta, l, t, 0.3, branch).unwrap();
                let h = 1e-5;
                let (gp, bp) = collision_orbit(delta, l, t + h, 0.3, branch).unwrap();
                let (gm, bm) = collision_orbit(delta, l, t - h, 0.3, branch).unwrap();
                let fd = [(gp - gm) / (2.0 * h), angle_diff(bp, bm) / (2.0 * h)];
                let rhs = sys.rhs(&[g, gb]).unwrap();
                assert!(
                    (fd[0] - rhs[0]).abs() < 1e-8 && (fd[1] - rhs[1]).abs() < 1e-8,
                    "{fd:?} vs {rhs:?}"
                );
                assert!((ehat0(gb, g / l, delta) - delta).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn integrated_collision_orbit_matches_closed_form() {
    for delta in [0.5, 1.0, 1.5] {
        let (ms, l, r, sigma) = collision_setup(delta);
        let sys = SecularE0 {
            masses: ms,
            l,
            r,
            theta: 0.0,
        };
        let half = 5.0 / (sigma * l);
        // At δ = 1 the orbit passes through e = 0 at t₀; integrate up to
        // either side of it.
        let segments: Vec<(f64, f64)> = if delta == 1.0 {
            let gap = 1e-3 / (sigma * l);
            vec![(-half, -gap), (gap, half)]
        } else {
            vec![(-half, half)]
        };
        let mut worst = 0.0f64;
        for (ta, tb) in segments {
            let (g, gb) = collision_orbit(delta, l, ta, 0.0, 1).unwrap();
            let cfg = IntegratorConfig {
                t_end: tb - ta,
                sample_dt: Some((tb - ta) / 200.0),
                ..IntegratorConfig::default()
            };
            let (samples, stop) = trajectory(&sys, [g, gb], &cfg).unwrap();
            assert_eq!(stop, Stop::Completed, "δ={delta}");
            for s in &samples {
                let (ge, be) = collision_orbit(delta, l, ta + s.t, 0.0, 1).unwrap();
                worst = worst
                    .max((s.y[0] - ge).abs() / l)
                    .max(angle_diff(s.y[1], be).abs());
            }
        }
        assert!(worst < 1e-6, "δ={delta}: {worst}");
    }
}

#[test]
fn leading_flow_period_is_two_pi_l() {
    for l in [0.7, 1.3] {
        for e in [0.2, 0.7, -0.2, -0.7] {
            let t = measure_leading_period(l, e, 1e-12).unwrap();
            assert!((t / (TAU * l) - 1.0).abs() < 1e-6, "𝓛={l} ℰ={e}: {t}");
        }
    }
}

#[test]
fn action_angle_image_lies_on_its_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let ms = MassParams::new(0.8, 1.1, 0.3, 1.0).unwrap();
    for _ in 0..200 {
        let lc: f64 = rng.gen_range(0.5..2.0);
        let e: f64 = rng.gen_range(-0.99..0.99);
        let gc = aa_action(lc, e).unwrap();
        if gc == 0.0 {
            continue;
        }
        let gamma = rng.gen_range(0.0..TAU);
        let (l, g, _, gb) = aa_transform(lc, gc, rng.gen_range(0.0..TAU), gamma).unwrap();
        let lead = (1.0 - (g / l).powi(2)).max(0.0).sqrt() * gb.cos();
        assert!((lead - e).abs() < 1e-12);
        let r = rng.gen_range(1.0..10.0);
        let k = e0_in_k(l, g, 0.0, r, gb, &ms).unwrap();
        let a = e0_in_aa(lc, gc, gamma, r, &ms);
        assert!((k - a).abs() < 1e-10 * k.abs().max(1.0));
    }
}
