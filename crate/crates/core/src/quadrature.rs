//! One-dimensional adaptive quadrature.
//!
//! Two unrelated rules are provided so one can check the other: adaptive
//! Gauss-Kronrod (7/15 points) and adaptive Simpson with Richardson
//! extrapolation.

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Upper bound on the number of panels either rule will refine into.
const MAX_PANELS: usize = 4000;

/// Kronrod estimate and |Kronrod - Gauss| on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Globally adaptive refinement: repeatedly bisects the panel with the
/// largest error estimate until the summed estimate is within `tol` or the
/// panel budget is spent.
fn refine(mut panels: Vec<Panel>, tol: f64, split: impl Fn(f64, f64) -> Panel) -> f64 {
    loop {
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= tol || panels.len() >= MAX_PANELS {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // Panel cannot be split further; accept it as is.
            panels.push(Panel { err: 0.0, ..p });
            continue;
        }
        panels.push(split(p.a, mid));
        panels.push(split(mid, p.b));
    }
    // Sum smallest first for a little extra accuracy.
    let mut values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    values.iter().sum()
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`, by adaptive
/// bisection of Gauss-Kronrod panels.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let split = |a: f64, b: f64| {
        let (value, err) = gk15(&f, a, b);
        Panel { a, b, value, err }
    };
    let first = split(a, b);
    refine(vec![first], tol, split)
}

/// Adaptive Simpson's rule on `[a, b]` to absolute tolerance `tol`, with
/// Richardson extrapolation on each panel.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let split = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let (fa, fl, fm, fr, fb) = (f(a), f(0.5 * (a + m)), f(m), f(0.5 * (m + b)), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let halves = (b - a) / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let delta = halves - whole;
        Panel {
            a,
            b,
            value: halves + delta / 15.0,
            err: delta.abs() / 15.0,
        }
    };
    // Start from a few panels so narrow peaks cannot hide between the first
    // samples.
    let n = 16;
    let h = (b - a) / n as f64;
    let panels = (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            split(lo, hi)
        })
        .collect();
    refine(panels, tol, split)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // Kronrod 15 integrates degree-22 polynomials exactly on one panel.
        let (v, _) = gk15(&|x: f64| x.powi(20), -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
        let (v, _) = gk15(&|x: f64| 3.0 * x * x, 0.0, 2.0);
        assert!((v - 8.0).abs() < 1e-14);
    }

    #[test]
    fn rules_agree_on_smooth_integrands() {
        let exact = std::f64::consts::E - 1.0;
        assert!((gauss_kronrod(f64::exp, 0.0, 1.0, 1e-14) - exact).abs() < 1e-14);
        assert!((adaptive_simpson(f64::exp, 0.0, 1.0, 1e-13) - exact).abs() < 1e-12);
        let gauss = |x: f64| (-0.5 * x * x).exp();
        let root_2pi = (2.0 * std::f64::consts::PI).sqrt();
        assert!((gauss_kronrod(gauss, -40.0, 40.0, 1e-13) - root_2pi).abs() < 1e-12);
        assert!((adaptive_simpson(gauss, -40.0, 40.0, 1e-13) - root_2pi).abs() < 1e-11);
    }
}
