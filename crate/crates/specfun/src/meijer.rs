//! Meijer G-function for real parameters and real positive argument.
//!
//! ```text
//!                 1    /  prod_{j<=m} G(b_j - s) prod_{j<=n} G(1 - a_j + s)
//! G(z) =  ------- |  ------------------------------------------------------  z^s ds
//!          2 pi i /  prod_{j>m} G(1 - b_j + s) prod_{j>n} G(a_j - s)
//! ```
//!
//! The contour is a vertical line Re s = c. When the upper and lower pole
//! families leave a gap, c is placed inside it; otherwise the residues of the
//! poles on the wrong side of the line are added back explicitly.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Result, SpecFunError};
use crate::gamma::{ln_gamma_complex, ln_gamma_signed, lower_incomplete_gamma};
use crate::quad::{integrate_breaks, Tolerance};

const SAME: f64 = 1e-13;
const REG_EPS: f64 = 1e-6;
/// Target relative accuracy of the contour integral.
const REL_TOL: f64 = 1e-10;
/// Contributions smaller than this fraction of the integral of |F| are noise.
const L1_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl MeijerGSpec {
    /// G^{m,n}_{p,q} with upper parameters `a` (length p) and lower `b` (length q).
    ///
    /// Rejects orders out of range, non-finite parameters and specs whose
    /// contour integral does not converge (m + n <= (p + q) / 2).
    pub fn new(m: usize, n: usize, a: &[f64], b: &[f64]) -> Result<Self> {
        let (p, q) = (a.len(), b.len());
        if m > q || n > p {
            return Err(SpecFunError::InvalidSpec(format!("need m <= q and n <= p, got m={m} n={n} p={p} q={q}")));
        }
        if let Some(x) = a.iter().chain(b).find(|x| !x.is_finite()) {
            return Err(SpecFunError::InvalidSpec(format!("non-finite parameter {x}")));
        }
        let spec = MeijerGSpec { m, n, a: a.to_vec(), b: b.to_vec() };
        if spec.delta_star() <= 0.0 {
            return Err(SpecFunError::InvalidSpec(format!(
                "m + n - (p + q)/2 = {} must be positive for G^{{{m},{n}}}_{{{p},{q}}}",
                spec.delta_star()
            )));
        }
        Ok(spec)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.a.len()
    }
    pub fn q(&self) -> usize {
        self.b.len()
    }
    pub fn a(&self) -> &[f64] {
        &self.a
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    fn delta_star(&self) -> f64 {
        (self.m + self.n) as f64 - 0.5 * (self.p() + self.q()) as f64
    }

    /// Drops parameter pairs whose Gamma factors cancel in the integrand.
    pub fn simplified(&self) -> MeijerGSpec {
        let mut s = self.clone();
        loop {
            let mut hit = None;
            'outer: for i in 0..s.n {
                for k in s.m..s.q() {
                    if same(s.a[i], s.b[k]) {
                        hit = Some((i, k, true));
                        break 'outer;
                    }
                }
            }
            if hit.is_none() {
                'outer2: for i in s.n..s.p() {
                    for k in 0..s.m {
                        if same(s.a[i], s.b[k]) {
                            hit = Some((i, k, false));
                            break 'outer2;
                        }
                    }
                }
            }
            match hit {
                Some((i, k, upper_first)) => {
                    s.a.remove(i);
                    s.b.remove(k);
                    if upper_first {
                        s.n -= 1;
                    } else {
                        s.m -= 1;
                    }
                }
                None => return s,
            }
        }
    }

    /// G^{m,n}_{p,q}(z | a; b) = G^{n,m}_{q,p}(1/z | 1 - b; 1 - a).
    pub fn reflected(&self) -> MeijerGSpec {
        MeijerGSpec {
            m: self.n,
            n: self.m,
            a: self.b.iter().map(|x| 1.0 - x).collect(),
            b: self.a.iter().map(|x| 1.0 - x).collect(),
        }
    }

    /// ln F(s) without the z^s factor.
    fn ln_kernel(&self, s: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &b) in self.b.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma_complex(b - s);
            } else {
                acc -= ln_gamma_complex(one - b + s);
            }
        }
        for (j, &a) in self.a.iter().enumerate() {
            if j < self.n {
                acc += ln_gamma_complex(one - a + s);
            } else {
                acc -= ln_gamma_complex(a - s);
            }
        }
        acc
    }

    /// Bounds (L, R) of the strip between the pole families.
    fn gap(&self) -> (f64, f64) {
        let left = self.a[..self.n].iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);
        let right = self.b[..self.m].iter().copied().fold(f64::INFINITY, f64::min);
        (left, right)
    }
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= SAME * x.abs().max(y.abs()).max(1.0)
}

fn near_nonpositive_integer(x: f64) -> bool {
    let r = x.round();
    r <= 0.0 && (x - r).abs() <= SAME * x.abs().max(1.0)
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= SAME * x.abs().max(1.0)
}

/// A value stored as `mantissa * exp(ln_scale)` so that results outside the
/// f64 range survive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerValue {
    pub mantissa: f64,
    pub error: f64,
    pub ln_scale: f64,
    /// Real part of the integration line, `None` for closed forms.
    pub contour: Option<f64>,
    pub evals: usize,
}

impl MeijerValue {
    fn exact(ln_abs: f64, sign: f64) -> Self {
        MeijerValue { mantissa: sign, error: 0.0, ln_scale: ln_abs, contour: None, evals: 0 }
    }

    pub fn value(&self) -> f64 {
        self.mantissa * self.ln_scale.exp()
    }

    pub fn abs_error(&self) -> f64 {
        self.error * self.ln_scale.exp()
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }

    pub fn signum(&self) -> f64 {
        self.mantissa.signum()
    }
}

/// Evaluates G^{m,n}_{p,q}(z) for z > 0.
pub fn meijer_g(spec: &MeijerGSpec, z: f64) -> Result<f64> {
    let v = meijer_g_detailed(spec, z)?;
    let value = v.value();
    if !value.is_finite() {
        return Err(SpecFunError::Overflow { function: "meijer_g", argument: z });
    }
    Ok(value)
}

/// Like [`meijer_g`] but keeps the log scale, the error estimate and
/// diagnostics.
pub fn meijer_g_detailed(spec: &MeijerGSpec, z: f64) -> Result<MeijerValue> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("meijer_g", format!("z = {z} must be positive and finite")));
    }
    let s = spec.simplified();
    if let Some(v) = closed_form(&s, z)? {
        return Ok(v);
    }
    if s.p() > s.q() {
        contour_value(&s.reflected(), 1.0 / z)
    } else {
        contour_value(&s, z)
    }
}

fn closed_form(s: &MeijerGSpec, z: f64) -> Result<Option<MeijerValue>> {
    match (s.m, s.n, s.p(), s.q()) {
        (1, 0, 0, 1) => Ok(Some(MeijerValue::exact(s.b[0] * z.ln() - z, 1.0))),
        (1, 1, 1, 2) if s.a[0] == 1.0 && s.b[1] == 0.0 && s.b[0] > 0.0 => {
            let v = lower_incomplete_gamma(s.b[0], z)?;
            Ok(Some(MeijerValue::exact(v.ln(), 1.0)))
        }
        _ => Ok(None),
    }
}

/// Picks the line Re s = c that minimises the integrand near the real axis.
fn choose_contour(s: &MeijerGSpec, ln_z: f64) -> f64 {
    let (left, right) = s.gap();
    let (lo, hi) = if left < right {
        let lo = if left.is_finite() {
            left
        } else if right.is_finite() {
            right - 30.0
        } else {
            -30.0
        };
        let hi = if right.is_finite() { right } else { lo + 30.0 + if left.is_finite() { 0.0 } else { 30.0 } };
        (lo, hi)
    } else {
        (right - 0.5, left + 0.5)
    };
    // Measured just off the axis as well, so that zeros of 1/Gamma on the
    // axis do not attract the search.
    let objective = |c: f64| {
        let on = (s.ln_kernel(Complex64::new(c, 0.0)).re + c * ln_z).max(-1e300);
        let off = s.ln_kernel(Complex64::new(c, 0.5)).re + c * ln_z;
        let v = on.max(off);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    const GRID: usize = 64;
    let step = (hi - lo) / GRID as f64;
    let mut best = (f64::INFINITY, lo + 0.5 * step);
    for i in 0..GRID {
        let c = lo + (i as f64 + 0.5) * step;
        let v = objective(c);
        if v < best.0 {
            best = (v, c);
        }
    }
    // Golden section on the neighbouring grid cells.
    let (mut x0, mut x3) = ((best.1 - step).max(lo + 0.25 * step), (best.1 + step).min(hi - 0.25 * step));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = x3 - g * (x3 - x0);
    let mut x2 = x0 + g * (x3 - x0);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    for _ in 0..40 {
        if f1 < f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - g * (x3 - x0);
            f1 = objective(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + g * (x3 - x0);
            f2 = objective(x2);
        }
    }
    let c = 0.5 * (x1 + x2);
    if objective(c) <= best.0 {
        c
    } else {
        best.1
    }
}

/// ln |prod of Gamma factors| and sign at a real point, excluding one
/// lower or upper factor that carries the pole. `None` when another
/// numerator factor is singular too.
fn residue_rest(s: &MeijerGSpec, x: f64, skip_b: Option<usize>, skip_a: Option<usize>) -> Result<Option<(f64, f64)>> {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for (j, &b) in s.b.iter().enumerate() {
        if Some(j) == skip_b {
            continue;
        }
        if j < s.m {
            let arg = b - x;
            if near_nonpositive_integer(arg) {
                return Err(SpecFunError::DegenerateParameters(format!("pole at s = {x} of order greater than one")));
            }
            let (l, sg) = ln_gamma_signed(arg)?;
            ln += l;
            sign *= sg;
        } else {
            let arg = 1.0 - b + x;
            if near_nonpositive_integer(arg) {
                return Ok(None);
            }
            let (l, sg) = ln_gamma_signed(arg)?;
            ln -= l;
            sign *= sg;
        }
    }
    for (j, &a) in s.a.iter().enumerate() {
        if Some(j) == skip_a {
            continue;
        }
        if j < s.n {
            let arg = 1.0 - a + x;
            if near_nonpositive_integer(arg) {
                return Err(SpecFunError::DegenerateParameters(format!("pole at s = {x} of order greater than one")));
            }
            let (l, sg) = ln_gamma_signed(arg)?;
            ln += l;
            sign *= sg;
        } else {
            let arg = a - x;
            if near_nonpositive_integer(arg) {
                return Ok(None);
            }
            let (l, sg) = ln_gamma_signed(arg)?;
            ln -= l;
            sign *= sg;
        }
    }
    Ok(Some((ln, sign)))
}

/// Residues that must be added to the straight-line integral at Re s = c.
/// Returned as (ln |r|, sign) pairs, already carrying z^s.
fn residue_corrections(s: &MeijerGSpec, c: f64, ln_z: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    // Right-family poles b_j + l lying left of the line: subtract.
    for j in 0..s.m {
        let mut l = 0usize;
        while s.b[j] + (l as f64) < c {
            let x = s.b[j] + l as f64;
            if let Some((ln, sign)) = residue_rest(s, x, Some(j), None)? {
                let parity = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
                // The residue is -parity * rest; it is subtracted.
                out.push((ln - crate::gamma::ln_factorial(l) + x * ln_z, parity * sign));
            }
            l += 1;
        }
    }
    // Left-family poles a_j - 1 - l lying right of the line: add.
    for j in 0..s.n {
        let mut l = 0usize;
        while s.a[j] - 1.0 - (l as f64) > c {
            let x = s.a[j] - 1.0 - l as f64;
            if let Some((ln, sign)) = residue_rest(s, x, None, Some(j))? {
                let parity = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
                out.push((ln - crate::gamma::ln_factorial(l) + x * ln_z, parity * sign));
            }
            l += 1;
        }
    }
    Ok(out)
}

fn check_separable(s: &MeijerGSpec) -> Result<()> {
    for j in 0..s.m {
        for k in 0..s.n {
            // b_j + l = a_k - 1 - l' for some l, l' >= 0
            let d = s.a[k] - 1.0 - s.b[j];
            if d >= -SAME && near_integer(d) {
                return Err(SpecFunError::DegenerateParameters(format!(
                    "pole of Gamma(b_{j} - s) coincides with pole of Gamma(1 - a_{k} + s)"
                )));
            }
        }
    }
    Ok(())
}

fn contour_value(s: &MeijerGSpec, z: f64) -> Result<MeijerValue> {
    check_separable(s)?;
    let ln_z = z.ln();
    let c = choose_contour(s, ln_z);
    let ln_f = |y: f64| {
        let sv = Complex64::new(c, y);
        s.ln_kernel(sv) + sv * ln_z
    };

    // Walk up the line until the integrand is negligible for a stretch.
    let mut peak = ln_f(0.0).re;
    if !peak.is_finite() {
        peak = ln_f(0.25).re;
    }
    let cutoff = 41.5; // e^-41.5 ~ 1e-18
    let h = 0.25;
    let mut y = 0.0;
    let mut quiet = 0;
    while quiet < 8 {
        y += h;
        let v = ln_f(y).re;
        if v > peak {
            peak = v;
        }
        if v < peak - cutoff {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if y > 1e5 {
            return Err(SpecFunError::NumericalFailure {
                what: "meijer_g contour",
                value: f64::NAN,
                error_estimate: f64::INFINITY,
            });
        }
    }
    let y_max = y;
    let width = (PI / (1.0 + ln_z.abs())).min(1.0);
    let panels = (y_max / width).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| y_max * i as f64 / panels as f64).collect();

    let integrand = |y: f64| {
        let w = (ln_f(y) - peak).exp();
        if w.re.is_finite() {
            w.re
        } else {
            0.0
        }
    };
    let tol = Tolerance { rel: REL_TOL, abs: 0.0, l1_rel: L1_FLOOR, max_panels: 50 * panels + 500 };
    let integral = integrate_breaks(integrand, &breaks, tol).map_err(|e| match e {
        SpecFunError::NumericalFailure { value, error_estimate, .. } => SpecFunError::NumericalFailure {
            what: "meijer_g contour",
            value: value / PI * peak.exp(),
            error_estimate: error_estimate / PI * peak.exp(),
        },
        other => other,
    })?;

    let corrections = residue_corrections(s, c, ln_z)?;
    let ln_scale = corrections.iter().map(|r| r.0).fold(peak, f64::max);
    let mut mantissa = integral.value / PI * (peak - ln_scale).exp();
    let error = integral.error / PI * (peak - ln_scale).exp();
    for (ln, sign) in &corrections {
        mantissa += sign * (ln - ln_scale).exp();
    }
    Ok(MeijerValue { mantissa, error, ln_scale, contour: Some(c), evals: integral.evals })
}

/// Leading-order small-argument expansion from the residues at b_l, l <= m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueTail {
    pub value: f64,
    /// Set when coincident lower parameters forced the symmetric
    /// b_l +/- epsilon evaluation.
    pub regularized: bool,
}

/// Sum over l <= m of the residue of the integrand at s = b_l:
///
/// ```text
/// prod_{j<=m, j!=l} G(b_j - b_l) prod_{j<=n} G(1 - a_j + b_l)
/// ------------------------------------------------------------ z^{b_l}
///    prod_{j>m} G(1 - b_j + b_l) prod_{j>n} G(a_j - b_l)
/// ```
///
/// When a first-group lower parameter coincides with another lower
/// parameter, or two first-group parameters differ by an integer, the
/// offending b_l is evaluated at b_l + eps and b_l - eps (eps = 1e-6) and the
/// two results averaged.
pub fn meijer_g_residue_tail(spec: &MeijerGSpec, z: f64) -> Result<ResidueTail> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("meijer_g_residue_tail", format!("z = {z} must be positive and finite")));
    }
    let q = spec.q();
    let offending: Vec<bool> = (0..q)
        .map(|l| {
            l < spec.m
                && (0..q).any(|j| {
                    j != l && (same(spec.b[j], spec.b[l]) || (j < spec.m && near_integer(spec.b[j] - spec.b[l])))
                })
        })
        .collect();
    let regularized = offending.iter().any(|&o| o);
    let value = if regularized {
        let shifted = |sign: f64| {
            let mut b = spec.b.clone();
            for (l, bl) in b.iter_mut().enumerate() {
                if offending[l] {
                    // Distinct multiples keep shifted parameters apart from each other.
                    *bl += sign * REG_EPS * (1.0 + l as f64);
                }
            }
            residue_tail_sum(spec.m, spec.n, &spec.a, &b, z)
        };
        0.5 * (shifted(1.0)? + shifted(-1.0)?)
    } else {
        residue_tail_sum(spec.m, spec.n, &spec.a, &spec.b, z)?
    };
    Ok(ResidueTail { value, regularized })
}

fn residue_tail_sum(m: usize, n: usize, a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    let ln_z = z.ln();
    let mut total = 0.0;
    'terms: for l in 0..m {
        let bl = b[l];
        let mut ln = bl * ln_z;
        let mut sign = 1.0;
        for (j, &bj) in b.iter().enumerate() {
            if j == l {
                continue;
            }
            if j < m {
                let arg = bj - bl;
                if near_nonpositive_integer(arg) {
                    return Err(SpecFunError::DegenerateParameters(format!(
                        "Gamma(b_{j} - b_{l}) is singular in the residue expansion"
                    )));
                }
                let (lv, sg) = ln_gamma_signed(arg)?;
                ln += lv;
                sign *= sg;
            } else {
                let arg = 1.0 - bj + bl;
                if near_nonpositive_integer(arg) {
                    continue 'terms;
                }
                let (lv, sg) = ln_gamma_signed(arg)?;
                ln -= lv;
                sign *= sg;
            }
        }
        for (j, &aj) in a.iter().enumerate() {
            if j < n {
                let arg = 1.0 - aj + bl;
                if near_nonpositive_integer(arg) {
                    return Err(SpecFunError::DegenerateParameters(format!(
                        "Gamma(1 - a_{j} + b_{l}) is singular in the residue expansion"
                    )));
                }
                let (lv, sg) = ln_gamma_signed(arg)?;
                ln += lv;
                sign *= sg;
            } else {
                let arg = aj - bl;
                if near_nonpositive_integer(arg) {
                    continue 'terms;
                }
                let (lv, sg) = ln_gamma_signed(arg)?;
                ln -= lv;
                sign *= sg;
            }
        }
        total += sign * ln.exp();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn g(m: usize, n: usize, a: &[f64], b: &[f64], z: f64) -> f64 {
        meijer_g(&MeijerGSpec::new(m, n, a, b).unwrap(), z).unwrap()
    }

    /// Forces the contour path, bypassing simplification and closed forms.
    fn g_contour(m: usize, n: usize, a: &[f64], b: &[f64], z: f64) -> f64 {
        contour_value(&MeijerGSpec::new(m, n, a, b).unwrap(), z).unwrap().value()
    }

    fn hyp1f1(a: f64, b: f64, x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..500 {
            let k = k as f64;
            term *= (a + k) / (b + k) * x / (k + 1.0);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn validation() {
        assert!(MeijerGSpec::new(2, 0, &[], &[1.0]).is_err());
        assert!(MeijerGSpec::new(0, 2, &[1.0], &[]).is_err());
        assert!(MeijerGSpec::new(1, 0, &[], &[f64::NAN]).is_err());
        // delta* = 1 - 1 = 0: the Bessel J representation is rejected.
        assert!(MeijerGSpec::new(1, 0, &[], &[0.5, 0.0]).is_err());
        assert!(MeijerGSpec::new(1, 0, &[], &[0.5]).is_ok());
    }

    #[test]
    fn exponential_and_incomplete_gamma() {
        for &z in &[0.01f64, 0.7, 3.0, 25.0] {
            assert_relative_eq!(g(1, 0, &[], &[1.5], z), z.powf(1.5) * (-z).exp(), max_relative = 1e-13);
            assert_relative_eq!(g_contour(1, 0, &[], &[1.5], z), z.powf(1.5) * (-z).exp(), max_relative = 1e-8);
            let gamma_lower = lower_incomplete_gamma(2.3, z).unwrap();
            assert_relative_eq!(g(1, 1, &[1.0], &[2.3, 0.0], z), gamma_lower, max_relative = 1e-13);
            assert_relative_eq!(g_contour(1, 1, &[1.0], &[2.3, 0.0], z), gamma_lower, max_relative = 1e-8);
        }
    }

    #[test]
    fn elementary_forms() {
        for &z in &[0.05f64, 0.9, 4.0, 60.0] {
            // G^{1,1}_{1,1}(z | a; b) = Gamma(1 - a + b) z^b (1 + z)^{a - b - 1}
            let (a, b) = (0.3, 0.45);
            let expected = crate::gamma::ln_gamma_pos(1.0 - a + b).exp() * z.powf(b) * (1.0 + z).powf(a - b - 1.0);
            assert_relative_eq!(g(1, 1, &[a], &[b], z), expected, max_relative = 1e-8);
            // G^{1,2}_{2,2}(z | 1, 1; 1, 0) = ln(1 + z)
            assert_relative_eq!(g(1, 2, &[1.0, 1.0], &[1.0, 0.0], z), z.ln_1p(), max_relative = 1e-8);
            // G^{2,0}_{0,2}(z | ; b, b - 1/2) = sqrt(pi) z^{b - 1/2} e^{-2 sqrt z}
            let b = 0.8;
            let expected = PI.sqrt() * z.powf(b - 0.5) * (-2.0 * z.sqrt()).exp();
            assert_relative_eq!(g(2, 0, &[], &[b, b - 0.5], z), expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn empty_gap_uses_residue_corrections() {
        // a - 1 > b: the pole families overlap on the real axis.
        let (a, b, c) = (2.5, 0.3, -0.2);
        for &z in &[0.1f64, 1.0, 5.0] {
            let expected = (crate::gamma::ln_gamma_signed(1.0 - a + b).unwrap().0).exp()
                * crate::gamma::ln_gamma_signed(1.0 - a + b).unwrap().1
                / crate::gamma::ln_gamma_pos(1.0 + b - c).exp()
                * z.powf(b)
                * hyp1f1(1.0 - a + b, 1.0 + b - c, -z);
            assert_relative_eq!(g(1, 1, &[a], &[b, c], z), expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn coincident_pole_families_are_degenerate() {
        let spec = MeijerGSpec::new(1, 1, &[2.0], &[0.0, 0.5]).unwrap();
        assert!(matches!(meijer_g(&spec, 1.0), Err(SpecFunError::DegenerateParameters(_))));
    }

    #[test]
    fn simplification_cancels_pairs() {
        let spec = MeijerGSpec::new(2, 2, &[0.25, 1.5, 0.7], &[0.7, 2.0, 1.5]).unwrap();
        let s = spec.simplified();
        assert_eq!((s.m(), s.n(), s.p(), s.q()), (1, 1, 1, 1));
        assert_eq!(s.a(), &[0.25]);
        assert_eq!(s.b(), &[2.0]);
    }

    #[test]
    fn residue_tail_single_pole() {
        // G^{1,0}_{0,1}(z | ; b) ~ z^b for small z.
        let spec = MeijerGSpec::new(1, 0, &[], &[1.5]).unwrap();
        let tail = meijer_g_residue_tail(&spec, 1e-3).unwrap();
        assert!(!tail.regularized);
        assert_relative_eq!(tail.value, 1e-3f64.powf(1.5), max_relative = 1e-14);
    }

    #[test]
    fn residue_tail_regularization_flag() {
        let a = [1.0, 0.5, 0.0, -0.5];
        let spec = MeijerGSpec::new(2, 4, &a, &[0.5, 1.0, 0.0, 0.5]).unwrap();
        let tail = meijer_g_residue_tail(&spec, 0.01).unwrap();
        assert!(tail.regularized);
        assert!(tail.value.is_finite());
        let spec = MeijerGSpec::new(2, 4, &a, &[0.75, 1.25, 0.0, 0.5]).unwrap();
        assert!(!meijer_g_residue_tail(&spec, 0.01).unwrap().regularized);
    }

    #[test]
    fn residue_tail_matches_small_argument_behaviour() {
        // G^{2,0}_{0,2}(z | ; b, b - 1/2) ~ sum of the two leading residues.
        let spec = MeijerGSpec::new(2, 0, &[], &[0.8, 0.3]).unwrap();
        let z = 1e-8;
        let tail = meijer_g_residue_tail(&spec, z).unwrap().value;
        assert_relative_eq!(tail, meijer_g(&spec, z).unwrap(), max_relative = 1e-3);
    }

    #[test]
    fn huge_values_keep_their_scale() {
        let spec = MeijerGSpec::new(1, 0, &[], &[400.0]).unwrap();
        let v = meijer_g_detailed(&spec, 1e3).unwrap();
        assert!(v.value().is_infinite());
        assert_relative_eq!(v.ln_abs(), 400.0 * 1e3f64.ln() - 1e3, max_relative = 1e-14);
        assert!(matches!(meijer_g(&spec, 1e3), Err(SpecFunError::Overflow { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reflection_identity(b1 in 0.1f64..2.0, b2 in -0.9f64..0.0, a1 in -0.5f64..0.9, z in 0.05f64..20.0) {
            let direct = g_contour(1, 1, &[a1], &[b1, b2], z);
            let spec = MeijerGSpec::new(1, 1, &[a1], &[b1, b2]).unwrap().reflected();
            let reflected = contour_value(&spec, 1.0 / z).unwrap().value();
            prop_assert!((direct - reflected).abs() <= 1e-8 * direct.abs().max(1e-12));
        }

        #[test]
        fn cancelling_pair_changes_nothing(b1 in 0.1f64..2.0, a1 in -0.5f64..0.9, x in 0.2f64..3.0, z in 0.05f64..20.0) {
            let reduced = g_contour(1, 1, &[a1], &[b1], z);
            let padded = g_contour(1, 2, &[a1, x], &[b1, x], z);
            prop_assert!((reduced - padded).abs() <= 1e-8 * reduced.abs());
        }

        #[test]
        fn multiplication_by_power(b1 in 0.1f64..2.0, a1 in -0.5f64..0.9, sh in -0.4f64..0.4, z in 0.05f64..20.0) {
            // z^sh G(z | a; b) = G(z | a + sh; b + sh)
            let base = g_contour(1, 1, &[a1], &[b1], z);
            let shifted = g_contour(1, 1, &[a1 + sh], &[b1 + sh], z);
            prop_assert!((z.powf(sh) * base - shifted).abs() <= 1e-8 * shifted.abs());
        }
    }
}
