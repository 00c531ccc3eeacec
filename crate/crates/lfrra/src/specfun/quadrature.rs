//! Globally adaptive Gauss–Kronrod (7/15) quadrature and a Beta-weighted
//! integral that removes algebraic endpoint singularities by substitution.

use crate::error::{Error, Result};

use super::SeriesConfig;

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
#[allow(clippy::excessive_precision)] // published table values, kept verbatim
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

/// Kronrod weights matching [`XGK`].
#[allow(clippy::excessive_precision)] // published table values, kept verbatim
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the embedded 7-point rule (abscissae XGK[1], XGK[3],
/// XGK[5], XGK[7]).
#[allow(clippy::excessive_precision)] // published table values, kept verbatim
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on the number of live subintervals.
const MAX_SEGMENTS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Integrates `f` over `[a, b]` with a globally adaptive 15-point
/// Gauss–Kronrod rule.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate is below `abs_tol` (or below a few ulps of the integral, whichever
/// is larger). Subintervals that reach `max_depth` bisections are frozen; if
/// the tolerance cannot be met with the remaining ones a
/// [`Error::Quadrature`] is returned.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut live = vec![Segment { a, b, value, error, depth: 0 }];
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    loop {
        let total: f64 = frozen_value + live.iter().map(|s| s.value).sum::<f64>();
        let total_err: f64 = frozen_error + live.iter().map(|s| s.error).sum::<f64>();
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        let target = abs_tol.max(64.0 * f64::EPSILON * total.abs());
        if total_err <= target {
            return Ok(total);
        }
        let Some((idx, _)) = live.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)) else {
            return Err(Error::Quadrature(format!("depth cap {max_depth} reached with error estimate {total_err:e}")));
        };
        let seg = live.swap_remove(idx);
        if seg.depth >= max_depth || live.len() >= MAX_SEGMENTS {
            frozen_value += seg.value;
            frozen_error += seg.error;
            continue;
        }
        let mid = 0.5 * (seg.a + seg.b);
        let (lv, le) = gauss_kronrod_15(&f, seg.a, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, seg.b);
        live.push(Segment { a: seg.a, b: mid, value: lv, error: le, depth: seg.depth + 1 });
        live.push(Segment { a: mid, b: seg.b, value: rv, error: re, depth: seg.depth + 1 });
    }
}

/// Computes `∫₀¹ t^{p−1} (1−t)^{d−1} g(t, 1−t) dt` for `p, d > 0`.
///
/// The integrand `g` receives both `t` and `1 − t` so that callers can avoid
/// cancellation near the right endpoint. Algebraic singularities are removed
/// before quadrature: on `[0, ½]` the substitution `s = t^p` absorbs
/// `t^{p−1}`, and on `[½, 1]` the substitution `u = (1−t)^d` absorbs
/// `(1−t)^{d−1}`. Each substitution is applied only when its exponent is
/// below one, i.e. when the weight is actually singular.
pub fn beta_weighted_integral<G>(p: f64, d: f64, g: G, cfg: &SeriesConfig) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
{
    if !(p > 0.0 && d > 0.0) {
        return Err(Error::domain(format!("Beta weight exponents must be positive (p={p}, d={d})")));
    }
    let tol = 0.5 * cfg.quad_abs_tol;
    let depth = cfg.quad_max_depth;

    let left = if p < 1.0 {
        // t = s^{1/p}, t^{p-1} dt = ds / p.
        let upper = 0.5f64.powf(p);
        integrate(
            |s| {
                let t = s.powf(1.0 / p);
                let omt = 1.0 - t;
                omt.powf(d - 1.0) * g(t, omt) / p
            },
            0.0,
            upper,
            tol,
            depth,
        )?
    } else {
        integrate(
            |t| {
                let omt = 1.0 - t;
                t.powf(p - 1.0) * omt.powf(d - 1.0) * g(t, omt)
            },
            0.0,
            0.5,
            tol,
            depth,
        )?
    };

    let right = if d < 1.0 {
        // 1 - t = u^{1/d}, (1-t)^{d-1} dt = -du / d.
        let upper = 0.5f64.powf(d);
        integrate(
            |u| {
                let omt = u.powf(1.0 / d);
                let t = 1.0 - omt;
                t.powf(p - 1.0) * g(t, omt) / d
            },
            0.0,
            upper,
            tol,
            depth,
        )?
    } else {
        integrate(
            |t| {
                let omt = 1.0 - t;
                t.powf(p - 1.0) * omt.powf(d - 1.0) * g(t, omt)
            },
            0.5,
            1.0,
            tol,
            depth,
        )?
    };
    Ok(left + right)
}
