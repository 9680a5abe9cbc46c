//! Málaga turbulence with pointing error and imperfect channel estimation on
//! the relay-destination optical hop.
//!
//! The estimated gain is `h~ = max(rho h + sqrt(1 - rho^2) e, 0)` with `e`
//! standard normal, so the electrical SNR `gamma_bar * h~^r` has an atom at
//! zero of mass `1 - Z0` and a density on `(0, inf)` given by a series in k.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use specfun::{gamma_q, ln_factorial, ln_gamma, meijer_g, meijer_g_detailed, MeijerGSpec};

use crate::error::{Result, RffsoError};

/// Default number of k-terms kept in the series.
pub const DEFAULT_TRUNCATION: usize = 80;
/// Extra terms used to certify the truncation.
pub const CERTIFICATE_EXTRA_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalagaParams {
    pub alpha: f64,
    pub beta: u32,
    pub omega: f64,
    pub b0: f64,
    pub rho0: f64,
    pub phase_diff: f64,
}

/// Returns `(g, Omega1)`: the uncoupled scatter power and the total coherent
/// power.
pub fn derive_malaga(omega: f64, b0: f64, rho0: f64, phase_diff: f64) -> Result<(f64, f64)> {
    if !(b0 > 0.0) {
        return Err(RffsoError::invalid("b0", format!("{b0} must be positive")));
    }
    if !(0.0..=1.0).contains(&rho0) {
        return Err(RffsoError::invalid("rho0", format!("{rho0} must lie in [0, 1)")));
    }
    if rho0 == 1.0 {
        return Err(RffsoError::Degenerate("rho0 = 1 leaves no uncoupled scatter power (g = 0)".into()));
    }
    if !(omega >= 0.0) || !phase_diff.is_finite() {
        return Err(RffsoError::invalid("omega", format!("{omega} must be non-negative")));
    }
    let g = 2.0 * b0 * (1.0 - rho0);
    let omega1 = omega + 2.0 * b0 * rho0 + 2.0 * (2.0 * b0 * rho0 * omega).sqrt() * phase_diff.cos();
    Ok((g, omega1))
}

impl MalagaParams {
    pub fn new(alpha: f64, beta: u32, omega: f64, b0: f64, rho0: f64, phase_diff: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(RffsoError::invalid("alpha", format!("{alpha} must be positive")));
        }
        if beta == 0 {
            return Err(RffsoError::invalid("beta", "must be a positive integer"));
        }
        let (_, omega1) = derive_malaga(omega, b0, rho0, phase_diff)?;
        if omega1 < 0.0 {
            return Err(RffsoError::invalid("phase_diff", format!("gives negative Omega1 = {omega1}")));
        }
        Ok(MalagaParams { alpha, beta, omega, b0, rho0, phase_diff })
    }

    /// Moderate turbulence used throughout the numerical study.
    pub fn reference() -> Self {
        MalagaParams { alpha: 2.296, beta: 2, omega: 1.3265, b0: 0.1079, rho0: 0.596, phase_diff: PI / 2.0 }
    }

    pub fn g(&self) -> f64 {
        2.0 * self.b0 * (1.0 - self.rho0)
    }

    pub fn omega1(&self) -> f64 {
        let cross = 2.0 * (2.0 * self.b0 * self.rho0 * self.omega).sqrt() * self.phase_diff.cos();
        self.omega + 2.0 * self.b0 * self.rho0 + cross
    }

    /// gβ + Ω₁, the mean irradiance.
    fn mean_power(&self) -> f64 {
        self.g() * self.beta as f64 + self.omega1()
    }

    /// Normalising constant of the mixture density.
    pub fn a_d(&self) -> f64 {
        let (a, b, g) = (self.alpha, self.beta as f64, self.g());
        let ln = std::f64::consts::LN_2 + 0.5 * a * a.ln() - (1.0 + 0.5 * a) * g.ln() - ln_gamma(a).expect("alpha > 0")
            + (b + 0.5 * a) * (g * b / self.mean_power()).ln();
        ln.exp()
    }

    /// Mixture weight b_h for h = 1..=beta.
    pub fn b_h(&self, h: u32) -> f64 {
        assert!(h >= 1 && h <= self.beta);
        let (a, b, g, o1) = (self.alpha, self.beta as f64, self.g(), self.omega1());
        let hf = h as f64;
        let s = self.mean_power();
        let mut ln = ln_factorial(self.beta as usize - 1) + (1.0 - 0.5 * hf) * s.ln() + 0.5 * hf * a.ln()
            - 2.0 * ln_factorial(h as usize - 1)
            - ln_factorial((self.beta - h) as usize)
            - 0.5 * hf * b.ln()
            - (hf - 1.0) * g.ln()
            - 0.5 * (a + hf) * (a * b / s).ln();
        if h > 1 {
            if o1 == 0.0 {
                return 0.0;
            }
            ln += (hf - 1.0) * o1.ln();
        }
        ln.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingParams {
    pub xi: f64,
    pub a0: f64,
}

impl PointingParams {
    pub fn new(xi: f64, a0: f64) -> Result<Self> {
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(RffsoError::invalid("xi", format!("{xi} must be positive")));
        }
        if !(a0 > 0.0 && a0 <= 1.0) {
            return Err(RffsoError::invalid("a0", format!("{a0} must lie in (0, 1]")));
        }
        Ok(PointingParams { xi, a0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    /// r = 1
    Heterodyne,
    /// r = 2
    IntensityModulation,
}

impl Detection {
    pub fn r(self) -> u32 {
        match self {
            Detection::Heterodyne => 1,
            Detection::IntensityModulation => 2,
        }
    }

    pub fn from_r(r: u32) -> Result<Self> {
        match r {
            1 => Ok(Detection::Heterodyne),
            2 => Ok(Detection::IntensityModulation),
            _ => Err(RffsoError::invalid("r", format!("{r} must be 1 (heterodyne) or 2 (IM/DD)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoLink {
    pub malaga: MalagaParams,
    pub pointing: PointingParams,
    pub path_loss: f64,
    pub rho_fso: f64,
    pub detection: Detection,
    pub mean_snr: f64,
}

impl FsoLink {
    pub fn new(
        malaga: MalagaParams,
        pointing: PointingParams,
        path_loss: f64,
        rho_fso: f64,
        detection: Detection,
        mean_snr: f64,
    ) -> Result<Self> {
        if !(path_loss > 0.0) || !path_loss.is_finite() {
            return Err(RffsoError::invalid("path_loss", format!("{path_loss} must be positive")));
        }
        if !(rho_fso > 0.0 && rho_fso < 1.0) {
            return Err(RffsoError::invalid("rho_fso", format!("{rho_fso} must lie strictly inside (0, 1)")));
        }
        if !(mean_snr > 0.0) || !mean_snr.is_finite() {
            return Err(RffsoError::invalid("mean_snr_rd", format!("{mean_snr} must be positive")));
        }
        Ok(FsoLink { malaga, pointing, path_loss, rho_fso, detection, mean_snr })
    }

    pub fn r(&self) -> u32 {
        self.detection.r()
    }

    /// Scale of the true gain: h_RD * delta_0 has the unit-free mixture law.
    pub fn delta0(&self) -> f64 {
        let m = &self.malaga;
        m.alpha * m.beta as f64 / (m.mean_power() * self.path_loss * self.pointing.a0)
    }

    /// Same scale for the attenuated gain rho * h_RD.
    pub fn delta(&self) -> f64 {
        self.delta0() / self.rho_fso
    }

    pub fn psi1(&self) -> f64 {
        let r = self.r() as f64;
        1.0 / (2.0 * self.mean_snr.powf(2.0 / r) * (1.0 - self.rho_fso * self.rho_fso))
    }
}

/// Convergence evidence for the truncated k-series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCertificate {
    pub k_extended: usize,
    pub z0_extended: f64,
    /// |Z0(K + 40) - Z0(K)| / Z0(K + 40)
    pub relative_drift: f64,
    /// Magnitude of the k = K term of Z0 over the partial sum.
    pub last_term_ratio: f64,
    /// Set when `last_term_ratio` exceeds 1e-9.
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsoSeriesTable {
    pub k_max: usize,
    pub r: u32,
    pub a_d: f64,
    pub b_d: f64,
    pub delta: f64,
    pub psi1: f64,
    pub b_h: Vec<f64>,
    /// ln |G_k| indexed [h - 1][k].
    pub ln_g_k: Vec<Vec<f64>>,
    pub g_k_sign: Vec<Vec<f64>>,
    pub h1: Vec<Vec<f64>>,
    /// ln of the density coefficient, indexed [h - 1][k].
    pub ln_phi1_lemma: Vec<Vec<f64>>,
    /// B_D H_1 Gamma((k + 1)/2): the share of Z0 carried by each term.
    pub z0_terms: Vec<Vec<f64>>,
    pub z0: f64,
    pub certificate: TruncationCertificate,
}

fn g_k_spec(link: &FsoLink, k: usize, h: u32) -> Result<MeijerGSpec> {
    let xi2 = link.pointing.xi * link.pointing.xi;
    let alpha = link.malaga.alpha;
    let hf = h as f64;
    let a = [
        (1.0 - xi2) / 2.0,
        (2.0 - xi2) / 2.0,
        (1.0 - alpha) / 2.0,
        (2.0 - alpha) / 2.0,
        (1.0 - hf) / 2.0,
        (2.0 - hf) / 2.0,
    ];
    let b = [k as f64 / 2.0, -xi2 / 2.0, (1.0 - xi2) / 2.0];
    MeijerGSpec::new(1, 6, &a, &b).map_err(RffsoError::numerical("G_k parameters"))
}

/// Argument of the G_k kernels.
pub fn g_k_argument(link: &FsoLink) -> f64 {
    let d = link.delta();
    8.0 / (d * d * (1.0 - link.rho_fso * link.rho_fso))
}

/// Builds the k-series coefficient table with `k_max + 1` terms per h, plus
/// a certificate computed with 40 more.
pub fn build_series_table(link: &FsoLink, k_max: usize) -> Result<FsoSeriesTable> {
    if k_max < 1 {
        return Err(RffsoError::invalid("k_truncation", "must be at least 1"));
    }
    let m = &link.malaga;
    let xi2 = link.pointing.xi * link.pointing.xi;
    let r = link.r();
    let rf = r as f64;
    let rho2 = link.rho_fso * link.rho_fso;
    let a_d = m.a_d();
    let b_d = xi2 * a_d * 2f64.powf(m.alpha - 4.5) / PI.powf(1.5);
    let psi1 = link.psi1();
    let z = g_k_argument(link);
    let k_ext = k_max + CERTIFICATE_EXTRA_TERMS;
    let beta = m.beta as usize;

    let mut b_h = Vec::with_capacity(beta);
    let mut ln_g_k = vec![Vec::with_capacity(k_max + 1); beta];
    let mut g_k_sign = vec![Vec::with_capacity(k_max + 1); beta];
    let mut h1 = vec![Vec::with_capacity(k_max + 1); beta];
    let mut ln_phi1 = vec![Vec::with_capacity(k_max + 1); beta];
    let mut z0_terms = vec![Vec::with_capacity(k_max + 1); beta];
    let mut z0 = 0.0;
    let mut z0_ext = 0.0;
    let mut last_term = 0.0;
    for hi in 0..beta {
        let h = hi as u32 + 1;
        let bh = m.b_h(h);
        b_h.push(bh);
        for k in 0..=k_ext {
            let spec = g_k_spec(link, k, h)?;
            let g = meijer_g_detailed(&spec, z).map_err(RffsoError::numerical(format!("G_k at h={h}, k={k}")))?;
            let (ln_g, sign) = (g.ln_abs(), g.signum());
            let kf = k as f64;
            let ln_h1 = bh.ln() + (kf + h as f64 - 0.5) * std::f64::consts::LN_2 + ln_g - ln_factorial(k);
            let h1_v = sign * ln_h1.exp();
            let ln_gamma_half = ln_gamma((kf + 1.0) / 2.0).expect("positive");
            let term = b_d * sign * (ln_h1 + ln_gamma_half).exp();
            z0_ext += term;
            if k <= k_max {
                z0 += term;
                if k == k_max {
                    last_term += term.abs();
                }
                ln_g_k[hi].push(ln_g);
                g_k_sign[hi].push(sign);
                h1[hi].push(h1_v);
                z0_terms[hi].push(term);
                let ln_p = (0.5 * kf + h as f64) * std::f64::consts::LN_2 + ln_g
                    - rf.ln()
                    - ln_factorial(k)
                    - (1.0 + kf) / rf * link.mean_snr.ln()
                    - 0.5 * (kf + 1.0) * (1.0 - rho2).ln();
                ln_phi1[hi].push(ln_p);
            }
        }
    }
    let drift = ((z0_ext - z0) / z0_ext).abs();
    let last_term_ratio = last_term / z0.abs();
    Ok(FsoSeriesTable {
        k_max,
        r,
        a_d,
        b_d,
        delta: link.delta(),
        psi1,
        b_h,
        ln_g_k,
        g_k_sign,
        h1,
        ln_phi1_lemma: ln_phi1,
        z0_terms,
        z0,
        certificate: TruncationCertificate {
            k_extended: k_ext,
            z0_extended: z0_ext,
            relative_drift: drift,
            last_term_ratio,
            warning: last_term_ratio > 1e-9,
        },
    })
}

impl FsoSeriesTable {
    pub fn g_k(&self, h: u32, k: usize) -> f64 {
        let i = h as usize - 1;
        self.g_k_sign[i][k] * self.ln_g_k[i][k].exp()
    }

    /// Mass of the atom at zero SNR.
    pub fn atom_mass(&self) -> f64 {
        1.0 - self.z0
    }

    /// Plain-text `key = value` dump for diffing.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k_max = {}", self.k_max);
        let _ = writeln!(out, "r = {}", self.r);
        let _ = writeln!(out, "a_d = {:.17e}", self.a_d);
        let _ = writeln!(out, "b_d = {:.17e}", self.b_d);
        let _ = writeln!(out, "delta = {:.17e}", self.delta);
        let _ = writeln!(out, "psi1 = {:.17e}", self.psi1);
        let _ = writeln!(out, "z0 = {:.17e}", self.z0);
        let _ = writeln!(out, "z0_extended = {:.17e}", self.certificate.z0_extended);
        let _ = writeln!(out, "z0_relative_drift = {:.3e}", self.certificate.relative_drift);
        let _ = writeln!(out, "truncation_warning = {}", self.certificate.warning);
        for (i, bh) in self.b_h.iter().enumerate() {
            let h = i + 1;
            let _ = writeln!(out, "b_h[{h}] = {bh:.17e}");
            for k in 0..=self.k_max {
                let _ = writeln!(
                    out,
                    "g_k[{h}][{k}] = {:.17e}  h1[{h}][{k}] = {:.17e}",
                    self.g_k(h as u32, k),
                    self.h1[i][k]
                );
            }
        }
        out
    }
}

/// Density of the estimated electrical SNR on (0, inf). The atom at zero is
/// not included; see [`FsoSeriesTable::atom_mass`].
pub fn fso_snr_pdf(table: &FsoSeriesTable, link: &FsoLink, gamma: f64) -> f64 {
    if !(gamma > 0.0) {
        return 0.0;
    }
    let rf = link.r() as f64;
    let arg = table.psi1 * gamma.powf(2.0 / rf);
    let ln_gamma_v = gamma.ln();
    let mut sum = 0.0;
    for (i, bh) in table.b_h.iter().enumerate() {
        for k in 0..=table.k_max {
            let kf = k as f64;
            let ln_t = table.ln_phi1_lemma[i][k] + ((kf + 1.0) / rf - 1.0) * ln_gamma_v - arg;
            sum += bh * table.g_k_sign[i][k] * ln_t.exp();
        }
    }
    table.b_d * sum
}

/// CDF of the estimated electrical SNR, including the atom: F(0) = 1 - Z0.
pub fn fso_snr_cdf(table: &FsoSeriesTable, link: &FsoLink, gamma: f64) -> f64 {
    if !(gamma > 0.0) {
        return table.atom_mass();
    }
    if gamma.is_infinite() {
        return 1.0;
    }
    let arg = table.psi1 * gamma.powf(2.0 / link.r() as f64);
    // 1 - Z0 + sum z_k P(a_k, x) = 1 - sum z_k Q(a_k, x)
    let mut tail = 0.0;
    for terms in &table.z0_terms {
        for (k, zk) in terms.iter().enumerate() {
            let q = gamma_q((k as f64 + 1.0) / 2.0, arg).expect("valid incomplete gamma arguments");
            tail += zk * q;
        }
    }
    1.0 - tail
}

/// Density of the true gain h_RD (no estimation error).
pub fn h_rd_pdf(link: &FsoLink, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Ok(0.0);
    }
    let m = &link.malaga;
    let xi2 = link.pointing.xi * link.pointing.xi;
    let mut sum = 0.0;
    for h in 1..=m.beta {
        let spec = MeijerGSpec::new(3, 0, &[xi2 + 1.0], &[xi2, m.alpha, h as f64])
            .map_err(RffsoError::numerical("h_RD density kernel"))?;
        sum += m.b_h(h) * meijer_g(&spec, link.delta0() * x).map_err(RffsoError::numerical("h_RD density kernel"))?;
    }
    Ok(xi2 * m.a_d() / (2.0 * x) * sum)
}

/// CDF of the true gain h_RD (no estimation error).
pub fn h_rd_cdf(link: &FsoLink, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Ok(0.0);
    }
    let m = &link.malaga;
    let xi2 = link.pointing.xi * link.pointing.xi;
    let mut sum = 0.0;
    for h in 1..=m.beta {
        let spec = MeijerGSpec::new(3, 1, &[1.0, xi2 + 1.0], &[xi2, m.alpha, h as f64, 0.0])
            .map_err(RffsoError::numerical("h_RD distribution kernel"))?;
        sum +=
            m.b_h(h) * meijer_g(&spec, link.delta0() * x).map_err(RffsoError::numerical("h_RD distribution kernel"))?;
    }
    Ok(xi2 * m.a_d() / 2.0 * sum)
}

/// Generative sampler for the optical hop. Holds the prepared distributions so
/// that drawing is allocation-free.
#[derive(Debug, Clone)]
pub struct FsoSampler {
    large_scale: Gamma<f64>,
    shadowing: Gamma<f64>,
    omega1: f64,
    scatter_std: f64,
    inv_xi2: f64,
    a0: f64,
    path_loss: f64,
    rho: f64,
    noise_std: f64,
    mean_snr: f64,
    r: u32,
}

impl FsoSampler {
    pub fn new(link: &FsoLink) -> Self {
        let m = &link.malaga;
        let beta = m.beta as f64;
        FsoSampler {
            large_scale: Gamma::new(m.alpha, 1.0 / m.alpha).expect("alpha > 0"),
            shadowing: Gamma::new(beta, 1.0 / beta).expect("beta > 0"),
            omega1: m.omega1(),
            scatter_std: (m.g() / 2.0).sqrt(),
            inv_xi2: 1.0 / (link.pointing.xi * link.pointing.xi),
            a0: link.pointing.a0,
            path_loss: link.path_loss,
            rho: link.rho_fso,
            noise_std: (1.0 - link.rho_fso * link.rho_fso).sqrt(),
            mean_snr: link.mean_snr,
            r: link.r(),
        }
    }

    /// True gain h_RD = I_l * X * Y * I_p.
    pub fn true_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.large_scale.sample(rng);
        let zeta = self.shadowing.sample(rng);
        let re_n: f64 = rng.sample(StandardNormal);
        let im_n: f64 = rng.sample(StandardNormal);
        let re = (zeta * self.omega1).sqrt() + self.scatter_std * re_n;
        let im = self.scatter_std * im_n;
        let y = re * re + im * im;
        let u: f64 = rng.random();
        // 1 - u keeps the argument in (0, 1].
        let pointing = self.a0 * (1.0 - u).powf(self.inv_xi2);
        self.path_loss * x * y * pointing
    }

    /// Estimated gain, clamped at zero.
    pub fn gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h = self.true_gain(rng);
        let e: f64 = rng.sample(StandardNormal);
        (self.rho * h + self.noise_std * e).max(0.0)
    }

    pub fn snr_from_gain(&self, gain: f64) -> f64 {
        if self.r == 1 {
            self.mean_snr * gain
        } else {
            self.mean_snr * gain * gain
        }
    }

    pub fn snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = self.gain(rng);
        self.snr_from_gain(g)
    }
}

pub fn sample_fso_gain<R: Rng + ?Sized>(link: &FsoLink, rng: &mut R) -> f64 {
    FsoSampler::new(link).gain(rng)
}

pub fn sample_fso_snr<R: Rng + ?Sized>(link: &FsoLink, rng: &mut R) -> f64 {
    FsoSampler::new(link).snr(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn reference_link(rho: f64, r: u32, mean_snr: f64) -> FsoLink {
        FsoLink::new(
            MalagaParams::reference(),
            PointingParams::new(6.7, 1.0).unwrap(),
            0.9,
            rho,
            Detection::from_r(r).unwrap(),
            mean_snr,
        )
        .unwrap()
    }

    #[test]
    fn derived_malaga_quantities() {
        let (g, o1) = derive_malaga(1.3265, 0.1079, 0.596, PI / 2.0).unwrap();
        assert_relative_eq!(g, 0.087_183_2, max_relative = 1e-6);
        assert_relative_eq!(o1, 1.455_116_8, max_relative = 1e-7);
        assert_eq!(derive_malaga(1.0, 0.5, 0.0, 0.3).unwrap(), (1.0, 1.0));
        let (g, o1) = derive_malaga(0.0, 0.5, 0.5, 0.0).unwrap();
        assert_relative_eq!(g, 0.5);
        assert_relative_eq!(o1, 0.5);
        assert!(matches!(derive_malaga(1.0, 0.5, 1.0, 0.0), Err(RffsoError::Degenerate(_))));
    }

    #[test]
    fn mixture_is_normalised() {
        // (A_D / 2) sum_h b_h Gamma(alpha) Gamma(h) = 1
        for m in [
            MalagaParams::reference(),
            MalagaParams::new(4.3, 3, 1.3265, 0.1079, 0.596, PI / 2.0).unwrap(),
            MalagaParams::new(1.5, 1, 1.3265, 0.1079, 0.596, 0.4).unwrap(),
        ] {
            let s: f64 = (1..=m.beta)
                .map(|h| m.b_h(h) * ln_gamma(m.alpha).unwrap().exp() * ln_gamma(h as f64).unwrap().exp())
                .sum();
            assert_relative_eq!(0.5 * m.a_d() * s, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn validation_rejects_bad_links() {
        let m = MalagaParams::reference();
        let p = PointingParams::new(6.7, 1.0).unwrap();
        assert!(FsoLink::new(m, p, 0.9, 1.0, Detection::Heterodyne, 1.0).is_err());
        assert!(FsoLink::new(m, p, 0.9, 0.0, Detection::Heterodyne, 1.0).is_err());
        assert!(FsoLink::new(m, p, 0.0, 0.5, Detection::Heterodyne, 1.0).is_err());
        assert!(PointingParams::new(1.0, 1.2).is_err());
        assert!(MalagaParams::new(2.0, 0, 1.0, 0.1, 0.5, 0.0).is_err());
        assert!(Detection::from_r(3).is_err());
    }

    #[test]
    fn table_is_consistent() {
        let link = reference_link(0.5, 2, 1.0);
        let t = build_series_table(&link, 30).unwrap();
        assert!(t.z0 > 0.5 && t.z0 < 1.0, "z0 = {}", t.z0);
        assert_eq!(fso_snr_cdf(&t, &link, 0.0), 1.0 - t.z0);
        assert!(fso_snr_cdf(&t, &link, 1e12) > 1.0 - 1e-10);
        let mut last = 0.0;
        for i in 0..200 {
            let c = fso_snr_cdf(&t, &link, 0.01 * i as f64 * i as f64);
            assert!(c >= last - 1e-15);
            last = c;
        }
        // Z0 does not depend on the mean SNR.
        let other = build_series_table(&reference_link(0.5, 2, 1e4), 30).unwrap();
        assert_relative_eq!(t.z0, other.z0, max_relative = 1e-12);
        assert!(t.to_key_value().contains("z0 = "));
    }

    #[test]
    fn density_is_derivative_of_cdf() {
        for r in [1, 2] {
            let link = reference_link(0.5, r, 2.0);
            let t = build_series_table(&link, 40).unwrap();
            for &x in &[0.05, 0.3, 1.0, 4.0] {
                let d = 1e-5 * x;
                let num = (fso_snr_cdf(&t, &link, x + d) - fso_snr_cdf(&t, &link, x - d)) / (2.0 * d);
                assert_relative_eq!(fso_snr_pdf(&t, &link, x), num, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn heterodyne_cdf_below_intensity_modulation() {
        let l1 = reference_link(0.5, 1, 3.0);
        let l2 = reference_link(0.5, 2, 3.0);
        let t1 = build_series_table(&l1, 40).unwrap();
        let t2 = build_series_table(&l2, 40).unwrap();
        for i in 1..=30 {
            let x = 3.0 * i as f64 / 30.0;
            assert!(fso_snr_cdf(&t1, &l1, x) <= fso_snr_cdf(&t2, &l2, x) + 1e-12);
        }
    }

    #[test]
    fn sampler_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut link = reference_link(0.5, 1, 2.0);
        link.pointing.xi = 1e3;
        let s = FsoSampler::new(&link);
        let n = 20_000;
        let mean_p: f64 = (0..n).map(|_| s.a0 * (1.0 - rng.random::<f64>()).powf(s.inv_xi2)).sum::<f64>() / n as f64;
        assert!(mean_p >= 0.999 * link.pointing.a0);
        assert_eq!(s.snr_from_gain(0.0), 0.0);
        assert_eq!(s.snr_from_gain(0.3), 0.6);
        // Mean irradiance of the turbulence part is g + Omega1.
        let m = MalagaParams::reference();
        let mut acc = 0.0;
        let n = 200_000;
        let mut plain = link;
        plain.pointing = PointingParams::new(1e6, 1.0).unwrap();
        plain.path_loss = 1.0;
        let s = FsoSampler::new(&plain);
        for _ in 0..n {
            acc += s.true_gain(&mut rng);
        }
        assert_relative_eq!(acc / n as f64, m.g() + m.omega1(), max_relative = 0.02);
    }

    #[test]
    fn h_rd_cdf_limits() {
        let link = reference_link(0.5, 2, 1.0);
        assert_eq!(h_rd_cdf(&link, 0.0).unwrap(), 0.0);
        assert_relative_eq!(h_rd_cdf(&link, 200.0).unwrap(), 1.0, max_relative = 1e-6);
        let x = 0.7;
        let d = 1e-5;
        let num = (h_rd_cdf(&link, x + d).unwrap() - h_rd_cdf(&link, x - d).unwrap()) / (2.0 * d);
        assert_relative_eq!(h_rd_pdf(&link, x).unwrap(), num, max_relative = 1e-5);
    }
}
