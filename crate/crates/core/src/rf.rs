//! Nakagami-m RF hops with MRC reception and outdated antenna-selection CSI.
//!
//! Each antenna-to-array link is a sum of `tau = m * n_rx` unit complex
//! Gaussian powers, so the MRC SNR is Gamma(tau, rate lambda = m / mean_snr).
//! The selection-time gain `g` and the transmission-time gain `g^` share
//! correlation `rho`.

use rand::Rng;
use rand_distr::StandardNormal;
use specfun::{gamma_p, ln_factorial, ln_gamma};

use crate::error::{Result, RffsoError};

/// Default cap on the number of multinomial index sets.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Relative size below which an alternating sum is flagged as cancelled.
const CANCELLATION_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfLink {
    pub m: u32,
    pub n_rx: u32,
    pub mean_snr: f64,
    pub rho: f64,
}

impl RfLink {
    pub fn new(m: u32, n_rx: u32, mean_snr: f64, rho: f64) -> Result<Self> {
        if m == 0 {
            return Err(RffsoError::invalid("m", "Nakagami m must be a positive integer"));
        }
        if n_rx == 0 {
            return Err(RffsoError::invalid("n_rx", "at least one receive antenna is required"));
        }
        if !(mean_snr > 0.0) || !mean_snr.is_finite() {
            return Err(RffsoError::invalid("mean_snr", format!("{mean_snr} must be positive")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(RffsoError::invalid("rho", format!("{rho} must lie strictly inside (0, 1)")));
        }
        Ok(RfLink { m, n_rx, mean_snr, rho })
    }

    pub fn lambda(&self) -> f64 {
        self.m as f64 / self.mean_snr
    }

    pub fn tau(&self) -> u32 {
        self.m * self.n_rx
    }
}

pub fn mrc_pdf(link: &RfLink, x: f64) -> f64 {
    if !(x > 0.0) {
        return if x == 0.0 && link.tau() == 1 { link.lambda() } else { 0.0 };
    }
    let tau = link.tau() as f64;
    let lam = link.lambda();
    (tau * lam.ln() + (tau - 1.0) * x.ln() - lam * x - ln_factorial(link.tau() as usize - 1)).exp()
}

pub fn mrc_cdf(link: &RfLink, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    gamma_p(link.tau() as f64, link.lambda() * x).expect("valid arguments")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMode {
    /// Pick the strongest antenna (TASR).
    Max,
    /// Pick the weakest antenna (TASE).
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialTerm {
    pub n_tuple: Vec<u32>,
    /// Signed coefficient including the multinomial factor.
    pub a: f64,
    pub b: u32,
    pub c: u32,
    pub alpha: f64,
    pub upsilon: f64,
    /// ln |Lambda_q| for q = 0..=b.
    pub ln_lambda: Vec<f64>,
    /// Sign shared by every Lambda_q of this term.
    pub sign: f64,
}

impl MultinomialTerm {
    pub fn lambda_q(&self, q: u32) -> f64 {
        self.sign * self.ln_lambda[q as usize].exp()
    }

    /// Coefficient of gamma^t e^{-upsilon gamma} in the complementary CDF,
    /// before the table prefactor.
    pub fn varphi(&self, tau: u32, q: u32, t: u32) -> f64 {
        let ln = self.ln_lambda[q as usize]
            + ln_factorial((q + tau - 1) as usize)
            + (t as f64 - q as f64 - tau as f64) * self.upsilon.ln()
            - ln_factorial(t as usize);
        self.sign * ln.exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTable {
    pub link: RfLink,
    pub n_s: u32,
    pub mode: SelectionMode,
    pub terms: Vec<MultinomialTerm>,
    pub phi: f64,
}

/// A sum together with the largest magnitude that entered it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckedSum {
    pub value: f64,
    pub largest_term: f64,
}

impl CheckedSum {
    pub fn precision_loss(&self) -> bool {
        self.largest_term > 0.0 && self.value.abs() < CANCELLATION_RATIO * self.largest_term
    }
}

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
    largest: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.largest = self.largest.max(x.abs());
    }

    pub(crate) fn finish(self) -> CheckedSum {
        CheckedSum { value: self.sum + self.comp, largest_term: self.largest }
    }
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Visits every tuple of `len` non-negative integers summing to `total`.
fn for_each_composition(total: u32, len: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(rest: u32, slot: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if slot + 1 == buf.len() {
            buf[slot] = rest;
            f(buf);
            return;
        }
        for v in (0..=rest).rev() {
            buf[slot] = v;
            rec(rest - v, slot + 1, buf, f);
        }
    }
    let mut buf = vec![0; len];
    rec(total, 0, &mut buf, f);
}

pub fn enumerate_selection_table(link: &RfLink, n_s: u32, mode: SelectionMode) -> Result<SelectionTable> {
    enumerate_selection_table_with_cap(link, n_s, mode, DEFAULT_TERM_CAP)
}

pub fn enumerate_selection_table_with_cap(
    link: &RfLink,
    n_s: u32,
    mode: SelectionMode,
    cap: usize,
) -> Result<SelectionTable> {
    if n_s == 0 {
        return Err(RffsoError::invalid("n_s", "at least one transmit antenna is required"));
    }
    let tau = link.tau();
    let len = match mode {
        SelectionMode::Max => tau as usize + 1,
        SelectionMode::Min => tau as usize,
    };
    let count = binomial_u128((n_s - 1) as u128 + len as u128 - 1, len as u128 - 1);
    if count > cap as u128 {
        return Err(RffsoError::Capacity { terms: count, cap });
    }
    let lam = link.lambda();
    let rho2 = link.rho * link.rho;
    let one_minus = 1.0 - rho2;
    let ln_lam_beta = (lam * link.rho / one_minus).ln();
    let ln_multinomial = ln_factorial((n_s - 1) as usize);
    let mut terms = Vec::with_capacity(count as usize);
    for_each_composition(n_s - 1, len, &mut |tuple: &[u32]| {
        let mut ln_a = ln_multinomial;
        let (mut b, mut c) = (0u32, 0u32);
        for (idx, &n) in tuple.iter().enumerate() {
            ln_a -= ln_factorial(n as usize);
            // Exponent offset: p - 2 for max-mode (p = idx + 1 >= 2), p - 1 for min-mode.
            let power = match mode {
                SelectionMode::Max if idx == 0 => continue,
                SelectionMode::Max => idx as u32 - 1,
                SelectionMode::Min => idx as u32,
            };
            if n > 0 {
                ln_a += n as f64 * (power as f64 * lam.ln() - ln_factorial(power as usize));
                b += n * power;
                c += n;
            }
        }
        let sign = match mode {
            SelectionMode::Max if c % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let alpha = lam * (rho2 / one_minus + c as f64 + 1.0);
        let upsilon = lam / one_minus - (lam * link.rho / one_minus).powi(2) / alpha;
        let ln_lambda = (0..=b)
            .map(|q| {
                ln_a + ln_factorial(b as usize)
                    + (2 * q + tau - 1) as f64 * ln_lam_beta
                    + ln_factorial((b + tau - 1) as usize)
                    - ln_factorial(q as usize)
                    - (b + tau + q) as f64 * alpha.ln()
                    - ln_factorial((b - q) as usize)
                    - ln_factorial((tau + q - 1) as usize)
            })
            .collect();
        terms.push(MultinomialTerm {
            n_tuple: tuple.to_vec(),
            a: sign * ln_a.exp(),
            b,
            c,
            alpha,
            upsilon,
            ln_lambda,
            sign,
        });
    });
    let ln_phi = (n_s as f64).ln() + (tau + 1) as f64 * lam.ln() + (1.0 - tau as f64) * link.rho.ln()
        - one_minus.ln()
        - ln_gamma(tau as f64).expect("tau >= 1");
    Ok(SelectionTable { link: *link, n_s, mode, terms, phi: ln_phi.exp() })
}

impl SelectionTable {
    pub fn tau(&self) -> u32 {
        self.link.tau()
    }
}

pub fn selected_snr_pdf_checked(table: &SelectionTable, gamma: f64) -> CheckedSum {
    if !(gamma >= 0.0) {
        return CheckedSum { value: 0.0, largest_term: 0.0 };
    }
    let tau = table.tau();
    let ln_g = gamma.ln();
    let mut acc = Neumaier::default();
    for term in &table.terms {
        for q in 0..=term.b {
            let power = (q + tau - 1) as f64;
            let ln_x = if power == 0.0 { 0.0 } else { power * ln_g };
            let v = term.sign * (term.ln_lambda[q as usize] + ln_x - term.upsilon * gamma).exp();
            acc.add(table.phi * v);
        }
    }
    acc.finish()
}

pub fn selected_snr_pdf(table: &SelectionTable, gamma: f64) -> f64 {
    selected_snr_pdf_checked(table, gamma).value
}

/// Returns 1 - F, the complementary CDF, with the cancellation check applied
/// to the alternating sum.
pub fn selected_snr_ccdf_checked(table: &SelectionTable, gamma: f64) -> CheckedSum {
    if !(gamma > 0.0) {
        return CheckedSum { value: 1.0, largest_term: 1.0 };
    }
    let tau = table.tau();
    let ln_g = gamma.ln();
    let mut acc = Neumaier::default();
    for term in &table.terms {
        let ln_u = term.upsilon.ln();
        for q in 0..=term.b {
            let base = term.ln_lambda[q as usize] + ln_factorial((q + tau - 1) as usize)
                - (q + tau) as f64 * ln_u
                - term.upsilon * gamma;
            for t in 0..(q + tau) {
                let ln_t = base + t as f64 * (ln_u + ln_g) - ln_factorial(t as usize);
                acc.add(table.phi * term.sign * ln_t.exp());
            }
        }
    }
    acc.finish()
}

pub fn selected_snr_cdf(table: &SelectionTable, gamma: f64) -> f64 {
    if gamma.is_infinite() {
        return 1.0;
    }
    (1.0 - selected_snr_ccdf_checked(table, gamma).value).clamp(0.0, 1.0)
}

/// Generates per-antenna (selection-time, transmission-time) MRC SNR pairs.
#[derive(Debug, Clone, Copy)]
pub struct RfSampler {
    components: u32,
    component_std: f64,
    rho: f64,
    noise: f64,
}

impl RfSampler {
    pub fn new(link: &RfLink) -> Self {
        RfSampler {
            components: link.tau(),
            // Each complex component has power mean 1 / lambda.
            component_std: (0.5 / link.lambda()).sqrt(),
            rho: link.rho,
            noise: (1.0 - link.rho * link.rho).sqrt(),
        }
    }

    /// Draws one antenna's pair of MRC SNRs.
    pub fn pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let (mut sel, mut trans) = (0.0, 0.0);
        for _ in 0..self.components {
            let gr: f64 = rng.sample(StandardNormal);
            let gi: f64 = rng.sample(StandardNormal);
            let er: f64 = rng.sample(StandardNormal);
            let ei: f64 = rng.sample(StandardNormal);
            let hr = self.rho * gr + self.noise * er;
            let hi = self.rho * gi + self.noise * ei;
            sel += gr * gr + gi * gi;
            trans += hr * hr + hi * hi;
        }
        let s2 = self.component_std * self.component_std;
        (sel * s2, trans * s2)
    }

    /// Fills both slices antenna by antenna.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, selection: &mut [f64], transmission: &mut [f64]) {
        for (s, t) in selection.iter_mut().zip(transmission.iter_mut()) {
            (*s, *t) = self.pair(rng);
        }
    }
}

/// Index picked by the selection rule; ties keep the lowest index.
pub fn select_index(selection: &[f64], mode: SelectionMode) -> usize {
    let mut best = 0;
    for (i, &v) in selection.iter().enumerate().skip(1) {
        let better = match mode {
            SelectionMode::Max => v > selection[best],
            SelectionMode::Min => v < selection[best],
        };
        if better {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionDraw {
    pub index: usize,
    pub selected_transmission_snr: f64,
    pub selection: Vec<f64>,
    pub transmission: Vec<f64>,
}

pub fn sample_selection_pair<R: Rng + ?Sized>(
    link: &RfLink,
    n_s: u32,
    mode: SelectionMode,
    rng: &mut R,
) -> SelectionDraw {
    let sampler = RfSampler::new(link);
    let mut selection = vec![0.0; n_s as usize];
    let mut transmission = vec![0.0; n_s as usize];
    sampler.fill(rng, &mut selection, &mut transmission);
    let index = select_index(&selection, mode);
    SelectionDraw { index, selected_transmission_snr: transmission[index], selection, transmission }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use specfun::bessel_i;
    use specfun::quad::{integrate_to_infinity, Tolerance};

    /// Density of the transmission-time SNR by direct integration of the
    /// bivariate-gamma conditional against the order-statistic density.
    fn oracle_pdf(link: &RfLink, n_s: u32, mode: SelectionMode, x: f64) -> f64 {
        let tau = link.tau() as f64;
        let lam = link.lambda();
        let (rho, om) = (link.rho, 1.0 - link.rho * link.rho);
        let cond = |y: f64| {
            let z = 2.0 * lam * rho * (x * y).sqrt() / om;
            let ln =
                lam.ln() - om.ln() + 0.5 * (tau - 1.0) * (x / (rho * rho * y)).ln() - lam * (x + rho * rho * y) / om;
            // Past the Bessel overflow the exponential factor has already vanished.
            if ln < -700.0 {
                return 0.0;
            }
            ln.exp() * bessel_i(tau - 1.0, z).unwrap()
        };
        let order = |y: f64| {
            let f = mrc_pdf(link, y);
            let c = mrc_cdf(link, y);
            let w = match mode {
                SelectionMode::Max => c.powi(n_s as i32 - 1),
                SelectionMode::Min => (1.0 - c).powi(n_s as i32 - 1),
            };
            n_s as f64 * w * f
        };
        integrate_to_infinity(
            |y| if y > 0.0 { cond(y) * order(y) } else { 0.0 },
            0.0,
            tau / lam,
            Tolerance::relative(1e-11),
        )
        .unwrap()
        .value
    }

    #[test]
    fn mrc_reductions() {
        let l = RfLink::new(1, 1, 1.0, 0.5).unwrap();
        assert_relative_eq!(mrc_cdf(&l, 1.0), 1.0 - (-1.0f64).exp(), max_relative = 1e-14);
        assert_eq!(mrc_cdf(&l, 0.0), 0.0);
        assert_relative_eq!(mrc_pdf(&l, 2.0), (-2.0f64).exp(), max_relative = 1e-14);
        // m=2, n=2, mean 2: P(4, 3); reference value from a regularized gamma oracle.
        let l = RfLink::new(2, 2, 2.0, 0.5).unwrap();
        assert_relative_eq!(mrc_cdf(&l, 3.0), 0.352_768_111_217_768_7, max_relative = 1e-12);
    }

    #[test]
    fn term_counts() {
        let l = RfLink::new(2, 2, 1.0, 0.85).unwrap();
        assert_eq!(enumerate_selection_table(&l, 5, SelectionMode::Max).unwrap().terms.len(), 70);
        assert_eq!(enumerate_selection_table(&l, 5, SelectionMode::Min).unwrap().terms.len(), 35);
        let t = enumerate_selection_table(&l, 1, SelectionMode::Max).unwrap();
        assert_eq!(t.terms.len(), 1);
        assert_eq!((t.terms[0].a, t.terms[0].b, t.terms[0].c), (1.0, 0, 0));
        assert!(t.terms[0].n_tuple.iter().all(|&n| n == 0));
        let err = enumerate_selection_table_with_cap(&l, 5, SelectionMode::Max, 10).unwrap_err();
        assert!(matches!(err, RffsoError::Capacity { terms: 70, cap: 10 }));
    }

    #[test]
    fn single_antenna_matches_mrc() {
        let l = RfLink::new(2, 2, 1.3, 0.6).unwrap();
        for mode in [SelectionMode::Max, SelectionMode::Min] {
            let t = enumerate_selection_table(&l, 1, mode).unwrap();
            for &x in &[0.0, 0.1, 0.7, 2.0, 9.0] {
                assert!((selected_snr_cdf(&t, x) - mrc_cdf(&l, x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn density_matches_integral_oracle() {
        for &(n_s, m, n, rho, mean) in &[(2, 1, 1, 0.5, 1.0), (5, 2, 2, 0.85, 1.0), (4, 2, 2, 0.7, 0.4)] {
            let l = RfLink::new(m, n, mean, rho).unwrap();
            for mode in [SelectionMode::Max, SelectionMode::Min] {
                let t = enumerate_selection_table(&l, n_s, mode).unwrap();
                for &x in &[0.05, 0.5, 1.5, 4.0] {
                    let want = oracle_pdf(&l, n_s, mode, x);
                    let got = selected_snr_pdf(&t, x);
                    assert!((got - want).abs() <= 1e-8 * want.max(1e-3), "{mode:?} {n_s} x={x}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn density_integrates_to_cdf() {
        let l = RfLink::new(2, 2, 0.4, 0.85).unwrap();
        for mode in [SelectionMode::Max, SelectionMode::Min] {
            let t = enumerate_selection_table(&l, 5, mode).unwrap();
            let total =
                integrate_to_infinity(|x| selected_snr_pdf(&t, x), 0.0, 5.0, Tolerance::relative(1e-10)).unwrap();
            assert!((total.value - 1.0).abs() < 1e-4);
            assert_eq!(selected_snr_cdf(&t, 0.0), 0.0);
            assert!(selected_snr_cdf(&t, 1e3) > 1.0 - 1e-12);
            let x = 1.1;
            let d = 1e-5;
            let num = (selected_snr_cdf(&t, x + d) - selected_snr_cdf(&t, x - d)) / (2.0 * d);
            assert_relative_eq!(selected_snr_pdf(&t, x), num, max_relative = 1e-6);
        }
    }

    #[test]
    fn cancellation_is_flagged() {
        let s = CheckedSum { value: 1e-12, largest_term: 1.0 };
        assert!(s.precision_loss());
        let l = RfLink::new(2, 2, 1.0, 0.85).unwrap();
        let t = enumerate_selection_table(&l, 5, SelectionMode::Max).unwrap();
        assert!(!selected_snr_ccdf_checked(&t, 1.0).precision_loss());
    }

    #[test]
    fn max_selection_dominates() {
        let l = RfLink::new(1, 1, 1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let (mut sel, mut other) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let d = sample_selection_pair(&l, 2, SelectionMode::Max, &mut rng);
            sel.push(d.selection[d.index]);
            other.push(d.selection[1 - d.index]);
            assert_eq!(d.selected_transmission_snr, d.transmission[d.index]);
        }
        for i in 1..40 {
            let x = 0.1 * i as f64;
            let f_sel = sel.iter().filter(|&&v| v <= x).count();
            let f_other = other.iter().filter(|&&v| v <= x).count();
            assert!(f_sel <= f_other);
        }
    }

    #[test]
    fn rejects_invalid_links() {
        assert!(RfLink::new(0, 1, 1.0, 0.5).is_err());
        assert!(RfLink::new(1, 0, 1.0, 0.5).is_err());
        assert!(RfLink::new(1, 1, -1.0, 0.5).is_err());
        assert!(RfLink::new(1, 1, 1.0, 1.0).is_err());
        let l = RfLink::new(1, 1, 1.0, 0.5).unwrap();
        assert!(enumerate_selection_table(&l, 0, SelectionMode::Max).is_err());
    }

    proptest! {
        #[test]
        fn selection_is_scale_invariant(seed in 0u64..10_000, scale in 1e-3f64..1e3, n_s in 1u32..8) {
            let l = RfLink::new(2, 2, 1.0, 0.7).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = sample_selection_pair(&l, n_s, SelectionMode::Max, &mut rng);
            let scaled: Vec<f64> = d.selection.iter().map(|v| v * scale).collect();
            prop_assert_eq!(select_index(&scaled, SelectionMode::Max), d.index);
            prop_assert_eq!(select_index(&scaled, SelectionMode::Min), select_index(&d.selection, SelectionMode::Min));
        }

        #[test]
        fn cdf_is_monotone(x in 0.0f64..10.0, dx in 0.0f64..1.0, rho in 0.05f64..0.95, n_s in 1u32..6) {
            let l = RfLink::new(2, 1, 0.8, rho).unwrap();
            for mode in [SelectionMode::Max, SelectionMode::Min] {
                let t = enumerate_selection_table(&l, n_s, mode).unwrap();
                prop_assert!(selected_snr_cdf(&t, x) <= selected_snr_cdf(&t, x + dx) + 1e-12);
            }
        }
    }
}
