//! Adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The integrator bisects the panel with the largest error estimate until the
//! total estimate meets the requested [`Tolerance`] or the panel budget runs
//! out, in which case a [`SpecFunError::NumericalFailure`] is returned with the
//! best value and its error estimate.

use crate::error::{Result, SpecFunError};

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

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule: the summed error estimate must fall below
/// `max(abs, rel * |I|, l1_rel * integral of |f|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub l1_rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-10, abs: 0.0, l1_rel: 0.0, max_panels: 4000 }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { rel, ..Default::default() }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_l1_rel(mut self, l1_rel: f64) -> Self {
        self.l1_rel = l1_rel;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    /// Integral of |f| over the same range, as seen by the rule.
    pub l1: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    l1: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error, l1: res_abs }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from one panel
/// per consecutive pair of break points.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<Integral> {
    if breaks.len() < 2 {
        return Ok(Integral { value: 0.0, error: 0.0, l1: 0.0, evals: 0 });
    }
    let mut panels: Vec<Panel> =
        breaks.windows(2).filter(|w| w[1] != w[0]).map(|w| kronrod(&mut f, w[0], w[1])).collect();
    let mut evals = 15 * panels.len();
    loop {
        let (mut value, mut error, mut l1) = (0.0, 0.0, 0.0);
        for p in &panels {
            value += p.value;
            error += p.error;
            l1 += p.l1;
        }
        let target = tol.abs.max(tol.rel * value.abs()).max(tol.l1_rel * l1);
        if !value.is_finite() || !error.is_finite() {
            return Err(SpecFunError::NumericalFailure { what: "quadrature", value, error_estimate: error });
        }
        if error <= target {
            return Ok(Integral { value, error, l1, evals });
        }
        if panels.len() >= tol.max_panels {
            return Err(SpecFunError::NumericalFailure { what: "quadrature", value, error_estimate: error });
        }
        let (worst, _) =
            panels.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            // Cannot bisect further in floating point.
            return Err(SpecFunError::NumericalFailure { what: "quadrature", value, error_estimate: error });
        }
        panels.push(kronrod(&mut f, p.a, mid));
        panels.push(kronrod(&mut f, mid, p.b));
        evals += 30;
    }
}

/// Integrates `f` over `[a, inf)` through the map x = a + t / (1 - t).
///
/// `scale` sets where t = 1/2 lands (x = a + scale); pick it near the bulk
/// of the integrand.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, tol: Tolerance) -> Result<Integral> {
    let s = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = a + s * t / u;
        let v = f(x) * s / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let breaks = [0.0, 0.25, 0.5, 0.75, 0.9, 0.97, 1.0];
    integrate_breaks(g, &breaks, tol)
}
