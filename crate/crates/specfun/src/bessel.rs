use crate::error::{domain, Result, SpecFunError};
use crate::gamma::ln_gamma_pos;

/// Modified Bessel function of the first kind, I_nu(x), for nu >= 0 and x >= 0.
///
/// Evaluated from the ascending series, whose terms are all positive, with
/// the terms scaled by the largest one so intermediate values stay finite.
/// Arguments large enough that the result exceeds `f64::MAX` are reported as
/// [`SpecFunError::Overflow`].
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) || nu.is_infinite() {
        return Err(domain("bessel_i", format!("order nu = {nu} must be finite and non-negative")));
    }
    if !(x >= 0.0) {
        return Err(domain("bessel_i", format!("x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x.is_infinite() {
        return Err(SpecFunError::Overflow { function: "bessel_i", argument: x });
    }
    // log of term j: (2j + nu) ln(x/2) - ln j! - ln Gamma(j + nu + 1)
    let ln_half = (0.5 * x).ln();
    let log_term = |j: f64| (2.0 * j + nu) * ln_half - ln_gamma_pos(j + 1.0) - ln_gamma_pos(j + nu + 1.0);
    // The largest term sits near j* solving j (j + nu) = x^2 / 4.
    let j_peak = (0.5 * (-nu + (nu * nu + x * x).sqrt())).floor().max(0.0);
    let ln_peak = log_term(j_peak);

    // Sum outward from the peak in both directions using term ratios.
    let ratio = |j: f64| 0.25 * x * x / ((j + 1.0) * (j + nu + 1.0));
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = j_peak;
    loop {
        term *= ratio(j);
        sum += term;
        j += 1.0;
        if term < 1e-17 * sum {
            break;
        }
    }
    let mut term = 1.0;
    let mut j = j_peak;
    while j >= 1.0 {
        term /= ratio(j - 1.0);
        sum += term;
        j -= 1.0;
        if term < 1e-17 * sum {
            break;
        }
    }
    let ln_value = ln_peak + sum.ln();
    if ln_value >= f64::MAX.ln() {
        return Err(SpecFunError::Overflow { function: "bessel_i", argument: x });
    }
    Ok(ln_value.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Plain ascending series, term by term. Only trusted for moderate x.
    fn series_oracle(nu: f64, x: f64) -> f64 {
        let mut sum = 0.0;
        for j in 0..200 {
            let j = j as f64;
            let ln_t = (2.0 * j + nu) * (0.5 * x).ln() - ln_gamma_pos(j + 1.0) - ln_gamma_pos(j + nu + 1.0);
            sum += ln_t.exp();
        }
        sum
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(2.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        // Values from an arbitrary-precision reference.
        assert_relative_eq!(bessel_i(0.0, 1.0).unwrap(), 1.266_065_877_752_008_3, max_relative = 1e-13);
        assert_relative_eq!(bessel_i(2.5, 10.0).unwrap(), 2_028.512_757_391_935_7, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(0.0, 50.0).unwrap(), 2.932_553_783_849_336_3e20, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(3.0, 0.1).unwrap(), 2.084_635_742_232_715_6e-5, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(1.5, 30.0).unwrap(), 752_420_533_212.431_5, max_relative = 1e-12);
    }

    #[test]
    fn agrees_with_direct_series() {
        for &nu in &[0.0, 0.5, 1.0, 3.0, 7.0] {
            for &x in &[0.01, 0.7, 4.0, 17.0, 45.0] {
                assert_relative_eq!(bessel_i(nu, x).unwrap(), series_oracle(nu, x), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        // I_{1/2}(x) = sqrt(2 / (pi x)) sinh x
        for &x in &[0.3, 2.0, 20.0] {
            let expected = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sinh();
            assert_relative_eq!(bessel_i(0.5, x).unwrap(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn overflow_is_signalled() {
        assert!(matches!(bessel_i(0.0, 800.0), Err(SpecFunError::Overflow { .. })));
        assert!(bessel_i(0.0, 700.0).unwrap().is_finite());
        assert!(bessel_i(-1.0, 1.0).is_err());
        assert!(bessel_i(0.0, -1.0).is_err());
    }
}
