use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{domain, Result};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_{2j} / (2j (2j - 1)) for j = 1..=8, the Stirling series coefficients.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const ZETA_TERMS: usize = 64;

/// zeta(k) - 1 for k in 2..ZETA_TERMS, indexed by k.
fn zeta_minus_one() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Euler-Maclaurin with the direct sum cut at N = 12.
        const BERNOULLI: [f64; 7] =
            [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
        let n_cut = 12.0_f64;
        let mut table = [0.0; ZETA_TERMS];
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            let mut sum = 0.0;
            for n in (2..12).rev() {
                sum += (n as f64).powf(-s);
            }
            sum += n_cut.powf(1.0 - s) / (s - 1.0) + 0.5 * n_cut.powf(-s);
            // B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
            let mut rising = s;
            let mut fact = 2.0;
            for (j, b) in BERNOULLI.iter().enumerate() {
                let j = j + 1;
                sum += b / fact * rising * n_cut.powf(-s - 2.0 * j as f64 + 1.0);
                rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
                fact *= (2.0 * j as f64 + 1.0) * (2.0 * j as f64 + 2.0);
            }
            *slot = sum;
        }
        table
    })
}

/// ln Gamma(2 + eps) for |eps| <= 0.5, from the Taylor series about 2.
fn ln_gamma_near_two(eps: f64) -> f64 {
    let zeta = zeta_minus_one();
    let mut sum = (1.0 - EULER_GAMMA) * eps;
    let mut power = -eps;
    for (k, z) in zeta.iter().enumerate().skip(2) {
        power *= -eps;
        let term = z * power / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn stirling_real(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}

/// ln Gamma(x) for x > 0 without argument checks.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x >= 10.0 {
        stirling_real(x)
    } else if x >= 2.5 {
        // Step down into [1.5, 2.5) and add back the logs of the factors.
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_near_two(y - 2.0)
    } else if x >= 1.5 {
        ln_gamma_near_two(x - 2.0)
    } else if x >= 0.5 {
        ln_gamma_near_two(x - 1.0) - (x - 1.0).ln_1p()
    } else {
        ln_gamma_pos(x + 1.0) - x.ln()
    }
}

/// Natural logarithm of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(domain("ln_gamma", format!("x = {x} must be positive")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(ln_gamma_pos(x))
}

/// sin(pi x) with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        -(PI * (r - 1.0)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `(ln |Gamma(x)|, sign Gamma(x))` for any real x that is not a pole.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return Err(domain("ln_gamma_signed", "x is NaN"));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    if x == x.floor() {
        return Err(domain("ln_gamma_signed", format!("x = {x} is a pole")));
    }
    let s = sin_pi(x);
    let ln_abs = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((ln_abs, s.signum()))
}

/// ln n!, tabulated for small n.
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(256);
        let mut acc = 0.0_f64;
        t.push(0.0);
        for k in 1..256 {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    });
    match table.get(n) {
        Some(v) => *v,
        None => ln_gamma_pos(n as f64 + 1.0),
    }
}

fn stirling_complex(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series
}

/// ln sin(pi z), stable for large |Im z|. The imaginary part is only
/// determined modulo 2 pi.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 15.0 {
        return (z * PI).sin().ln();
    }
    // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i); keep the dominant exponential.
    if z.im > 0.0 {
        let small = (i * z * (2.0 * PI)).exp();
        -i * PI * z - (-2.0 * i).ln() + (-small).ln_1p_c()
    } else {
        let small = (-i * z * (2.0 * PI)).exp();
        i * PI * z - (2.0 * i).ln() + (-small).ln_1p_c()
    }
}

trait Ln1p {
    fn ln_1p_c(self) -> Self;
}

impl Ln1p for Complex64 {
    fn ln_1p_c(self) -> Self {
        if self.norm() < 1e-8 {
            self - self * self * 0.5
        } else {
            (self + 1.0).ln()
        }
    }
}

/// ln Gamma(z) for complex z. Only `exp` of the result is meaningful: the
/// imaginary part is not forced onto the principal branch. Poles give a real
/// part of +inf.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re > 0.0 {
        return Complex64::new(ln_gamma_pos(z.re), 0.0);
    }
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.floor() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.norm_sqr() < 100.0 {
        prod *= w;
        w += 1.0;
        shifted = true;
    }
    let base = stirling_complex(w);
    if shifted {
        base - prod.ln()
    } else {
        base
    }
}

const MAX_ITER: usize = 10_000;

/// Series for gamma(a, z) / (z^a e^{-z}); converges for any z, fast for z < a + 1.
fn lower_series(a: f64, z: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= z / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

/// Continued fraction for Gamma(a, z) / (z^a e^{-z}), z >= a + 1 (modified Lentz).
fn upper_fraction(a: f64, z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

fn check_incomplete(function: &'static str, a: f64, z: f64) -> Result<()> {
    if !(a > 0.0) || a.is_infinite() {
        return Err(domain(function, format!("a = {a} must be positive and finite")));
    }
    if !(z >= 0.0) {
        return Err(domain(function, format!("z = {z} must be non-negative")));
    }
    Ok(())
}

/// Regularized lower incomplete gamma P(a, z).
pub fn gamma_p(a: f64, z: f64) -> Result<f64> {
    check_incomplete("gamma_p", a, z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(1.0);
    }
    let log_prefactor = a * z.ln() - z - ln_gamma_pos(a);
    if z < a + 1.0 {
        Ok((log_prefactor.exp() * lower_series(a, z)).min(1.0))
    } else {
        Ok(1.0 - log_prefactor.exp() * upper_fraction(a, z))
    }
}

/// Regularized upper incomplete gamma Q(a, z) = 1 - P(a, z).
pub fn gamma_q(a: f64, z: f64) -> Result<f64> {
    check_incomplete("gamma_q", a, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = a * z.ln() - z - ln_gamma_pos(a);
    if z < a + 1.0 {
        Ok(1.0 - log_prefactor.exp() * lower_series(a, z))
    } else {
        Ok(log_prefactor.exp() * upper_fraction(a, z))
    }
}

/// Lower incomplete gamma function gamma(a, z) = int_0^z t^{a-1} e^{-t} dt.
pub fn lower_incomplete_gamma(a: f64, z: f64) -> Result<f64> {
    check_incomplete("lower_incomplete_gamma", a, z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let ln_gamma_a = ln_gamma_pos(a);
    if z.is_infinite() {
        return Ok(ln_gamma_a.exp());
    }
    let log_prefactor = a * z.ln() - z;
    if z < a + 1.0 {
        Ok((log_prefactor + lower_series(a, z).ln()).exp())
    } else {
        let q = (log_prefactor - ln_gamma_a).exp() * upper_fraction(a, z);
        Ok(ln_gamma_a.exp() * (1.0 - q))
    }
}
