//! Adaptive Dormand–Prince 8(5,3) integrator over fixed-size states.

use serde::{Deserialize, Serialize};

use crate::error::{domain, numeric, Error, Result};
use crate::kepler::wrap_angle;

const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        5.260_015_195_876_773E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.972_505_698_453_79E-2,
        5.917_517_095_361_37E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.958_758_547_680_685E-2,
        0.0,
        8.876_275_643_042_054E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.413_651_341_592_667E-1,
        0.0,
        -8.845_494_793_282_861E-1,
        9.248_340_032_617_92E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.703_703_703_703_703_5E-2,
        0.0,
        0.0,
        1.708_286_087_294_738_6E-1,
        1.254_676_875_668_224_2E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375E-2,
        0.0,
        0.0,
        1.702_522_110_195_440_5E-1,
        6.021_653_898_045_596E-2,
        -1.7578125E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709_200_011_850_479E-2,
        0.0,
        0.0,
        1.703_839_257_122_399_8E-1,
        1.072_620_304_463_732_8E-1,
        -1.531_943_774_862_440_2E-2,
        8.273_789_163_814_023E-3,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241_109_587_160_757E-1,
        0.0,
        0.0,
        -3.360_892_629_446_941_4,
        -8.682_193_468_417_26E-1,
        2.759_209_969_944_671E1,
        2.015_406_755_047_789_4E1,
        -4.348_988_418_106_996E1,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.776_625_364_382_643_4E-1,
        0.0,
        0.0,
        -2.488_114_619_971_667_7,
        -5.902_908_268_368_43E-1,
        2.123_005_144_818_119_3E1,
        1.527_923_363_288_242_3E1,
        -3.328_821_096_898_486E1,
        -2.033_120_170_850_862_7E-2,
        0.0,
        0.0,
        0.0,
    ],
    [
        -9.371_424_300_859_873E-1,
        0.0,
        0.0,
        5.186_372_428_844_064,
        1.091_437_348_996_729_5,
        -8.149_787_010_746_927,
        -1.852_006_565_999_696E1,
        2.273_948_709_935_050_5E1,
        2.493_605_552_679_652_3,
        -3.046_764_471_898_219_6,
        0.0,
        0.0,
    ],
    [
        2.273_310_147_516_538,
        0.0,
        0.0,
        -1.053_449_546_673_725E1,
        -2.000_872_058_224_862_5,
        -1.795_893_186_311_88E1,
        2.794_888_452_941_996E1,
        -2.858_998_277_135_023_5,
        -8.872_856_933_530_63,
        1.236_056_717_579_430_3E1,
        6.433_927_460_157_636E-1,
        0.0,
    ],
];
const C: [f64; 12] = [
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25E+00,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6E+00,
    8.571_428_571_428_571E-1,
    1.0,
];
const B: [f64; 12] = [
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];
const ER: [f64; 12] = [
    1.312_004_499_419_488E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502E-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6E-1,
    3.341_791_187_130_175E-1,
    8.192_320_648_511_571E-2,
    -2.235_530_786_388_629_4E-2,
];
const BHH: [f64; 3] = [
    2.440_944_881_889_764E-1,
    7.338_466_882_816_118E-1,
    2.205_882_352_941_176_6E-2,
];

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;
const BETA: f64 = 0.04;
/// Smallest usable step as a fraction of the horizon.
pub const MIN_STEP_FRACTION: f64 = 1e-14;

/// Tolerances and step bounds of [`dop853`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Initial step; estimated from the right-hand side when absent.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            initial_step: None,
            max_steps: 50_000_000,
        }
    }
}

/// Why [`dop853`] returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Stop {
    Completed,
    /// The observer asked to stop.
    Observer {
        t: f64,
    },
    /// The right-hand side kept failing its domain guard down to the minimum step.
    Guard {
        t: f64,
        reason: String,
    },
}

/// An accepted step from `(t0, y0)` to `(t, y)`. `on_grid` is set when `t`
/// is one of the requested output times.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo<'a, const N: usize> {
    pub t0: f64,
    pub y0: &'a [f64; N],
    pub t: f64,
    pub y: &'a [f64; N],
    pub on_grid: bool,
}

struct Stages<const N: usize> {
    k: [[f64; N]; 12],
}

fn axpy<const N: usize>(
    y: &[f64; N],
    h: f64,
    row: &[f64; 12],
    k: &[[f64; N]; 12],
    upto: usize,
) -> [f64; N] {
    let mut out = *y;
    for (j, kj) in k.iter().enumerate().take(upto) {
        let c = row[j];
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * kj[i];
            }
        }
    }
    out
}

/// Runs all twelve stages of a step of size `h` from `(t, y)` with slope `f0`.
/// Returns the new state and the scaled error norm.
fn attempt<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    h: f64,
    cfg: &OdeConfig,
) -> Result<([f64; N], f64)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut st = Stages { k: [[0.0; N]; 12] };
    st.k[0] = *f0;
    for s in 1..12 {
        let ys = axpy(y, h, &A[s], &st.k, s);
        st.k[s] = f(t + C[s] * h, &ys)?;
    }
    let y1 = axpy(y, h, &B, &st.k, 12);
    let mut err = 0.0;
    let mut err2 = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y1[i].abs());
        let incr: f64 = (0..12).map(|j| B[j] * st.k[j][i]).sum();
        let e2 = incr - BHH[0] * st.k[0][i] - BHH[1] * st.k[8][i] - BHH[2] * st.k[11][i];
        err2 += (e2 / sk).powi(2);
        let e: f64 = (0..12).map(|j| ER[j] * st.k[j][i]).sum();
        err += (e / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let norm = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();
    Ok((y1, norm))
}

/// One step of size `h` without error control.
pub fn dop853_step<const N: usize, F>(mut f: F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let f0 = f(t, y)?;
    Ok(attempt(&mut f, t, y, &f0, h, &OdeConfig::default())?.0)
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    cfg: &OdeConfig,
    span: f64,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let sk: Vec<f64> = y
        .iter()
        .map(|v| cfg.abs_tol + cfg.rel_tol * v.abs())
        .collect();
    let dnf: f64 = (0..N).map(|i| (f0[i] / sk[i]).powi(2)).sum();
    let dny: f64 = (0..N).map(|i| (y[i] / sk[i]).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * (dny / dnf).sqrt()
    };
    h = h.min(cfg.max_step).min(span);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h * f0[i];
    }
    let Ok(f1) = f(t + h, &y1) else {
        return h * 1e-3;
    };
    let der2 = (0..N)
        .map(|i| ((f1[i] - f0[i]) / sk[i]).powi(2))
        .sum::<f64>()
        .sqrt()
        / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    (100.0 * h).min(h1).min(cfg.max_step).min(span)
}

fn is_guard(e: &Error) -> bool {
    matches!(e, Error::Domain(_) | Error::Collision(_))
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, landing exactly on
/// `t0 + k·grid_dt` when `grid_dt` is given. `observer` sees every accepted
/// step and returns `false` to stop.
///
/// A failing right-hand side (domain or collision error) rejects the step and
/// halves it; below `MIN_STEP_FRACTION · (t_end - t0)` the run stops with
/// [`Stop::Guard`]. Step-size underflow from error control is a numeric error.
///
/// Components listed in `periodic` are reduced to `[0, 2π)` after every
/// accepted step; `f` must be `2π`-periodic in them.
#[allow(clippy::too_many_arguments)]
pub fn dop853<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    grid_dt: Option<f64>,
    cfg: &OdeConfig,
    periodic: &[usize],
    mut observer: O,
) -> Result<Stop>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(StepInfo<'_, N>) -> bool,
{
    let span = t_end - t0;
    if !(span > 0.0) {
        return Err(domain(format!(
            "horizon must be positive, got [{t0}, {t_end}]"
        )));
    }
    if !(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0) {
        return Err(domain("tolerances must be positive"));
    }
    if let Some(dt) = grid_dt {
        if !(dt > 0.0) {
            return Err(domain(format!("output cadence must be positive, got {dt}")));
        }
    }
    let h_min = MIN_STEP_FRACTION * span;
    let mut t = t0;
    let mut y = y0;
    let mut f0 = f(t, &y)?;
    let mut h = cfg
        .initial_step
        .unwrap_or_else(|| initial_step(&mut f, t, &y, &f0, cfg, span));
    let mut facold: f64 = 1e-4;
    let mut rejected = false;
    let mut grid_k: u64 = 1;
    let next_grid = |k: u64| grid_dt.map_or(t_end, |dt| (t0 + k as f64 * dt).min(t_end));
    let mut target = next_grid(grid_k);
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(numeric(format!(
                "step budget {} exhausted at t = {t}",
                cfg.max_steps
            )));
        }
        let proposal = h.min(cfg.max_step);
        let mut hs = proposal;
        let hits = t + hs >= target - 1e-12 * span.max(1.0) * f64::EPSILON.sqrt();
        if hits {
            hs = target - t;
        }
        let (y1, err) = match attempt(&mut f, t, &y, &f0, hs, cfg) {
            Ok(v) => v,
            Err(e) if is_guard(&e) => {
                h = 0.5 * hs;
                if h < h_min {
                    return Ok(Stop::Guard {
                        t,
                        reason: e.to_string(),
                    });
                }
                rejected = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let fac11 = err.powf(1.0 / 8.0 - BETA * 0.2);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = hs / fac;
        if err <= 1.0 {
            let f1 = match f(t + hs, &y1) {
                Ok(v) => v,
                Err(e) if is_guard(&e) => {
                    h = 0.5 * hs;
                    if h < h_min {
                        return Ok(Stop::Guard {
                            t,
                            reason: e.to_string(),
                        });
                    }
                    rejected = true;
                    continue;
                }
                Err(e) => return Err(e),
            };
            facold = err.max(1e-4);
            let mut y1 = y1;
            for &i in periodic {
                y1[i] = wrap_angle(y1[i]);
            }
            let t_new = if hits { target } else { t + hs };
            let keep_going = observer(StepInfo {
                t0: t,
                y0: &y,
                t: t_new,
                y: &y1,
                on_grid: hits,
            });
            t = t_new;
            y = y1;
            f0 = f1;
            if hits {
                grid_k += 1;
                target = next_grid(grid_k);
                h_new = h_new.max(proposal);
            }
            if rejected {
                h_new = h_new.min(hs);
                rejected = false;
            }
            if !keep_going {
                return Ok(Stop::Observer { t });
            }
        } else {
            h_new = hs / (1.0 / FAC_MIN).min(fac11 / SAFE);
            rejected = true;
            if h_new < h_min {
                return Err(numeric(format!(
                    "step size underflow at t = {t}; last state {y:?}"
                )));
            }
        }
        h = h_new;
    }
    Ok(Stop::Completed)
}
