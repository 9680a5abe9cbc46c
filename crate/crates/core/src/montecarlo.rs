//! Monte-Carlo simulation of all four antenna-selection schemes.
//!
//! Every trial draws the full channel state once (both RF links for every
//! transmit antenna plus one FSO gain) and evaluates each requested scheme on
//! that same draw, so scheme comparisons use common random numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics::{atas_select, Scheme, SystemModel};
use crate::error::{Result, RffsoError};
use crate::fso::FsoSampler;
use crate::rf::{select_index, RfSampler, SelectionMode};

/// Smallest plan size accepted by [`estimate_sop`].
pub const MIN_SAMPLES: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

impl McEstimate {
    pub fn from_counts(hits: u64, n: u64) -> Self {
        assert!(n >= 1, "an estimate needs at least one trial");
        let p = hits as f64 / n as f64;
        McEstimate { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Whether `x` lies within `k` standard errors of the estimate.
    pub fn covers(&self, x: f64, k: f64) -> bool {
        (x - self.value).abs() <= k * self.stderr
    }
}

/// Which RF gains OTAS looks at when ranking antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OtasCsi {
    /// Outdated (selection-time) RF gains, as available at the source.
    #[default]
    SelectionTime,
    /// The gains the data will actually see; an idealised variant.
    TransmissionTime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationPlan {
    pub model: SystemModel,
    pub scheme: Scheme,
    pub n_samples: u64,
    pub seed: u64,
    pub stream_count: u32,
    pub otas_csi: OtasCsi,
}

impl SimulationPlan {
    pub fn new(model: SystemModel, scheme: Scheme, n_samples: u64, seed: u64) -> Self {
        SimulationPlan { model, scheme, n_samples, seed, stream_count: 16, otas_csi: OtasCsi::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(RffsoError::invalid(
                "n_samples",
                format!("{} is below the minimum of {MIN_SAMPLES}", self.n_samples),
            ));
        }
        if self.stream_count == 0 {
            return Err(RffsoError::invalid("stream_count", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Secrecy capacity at or below Rs.
    pub exact: bool,
    /// gamma_eq <= Theta gamma_E.
    pub bound: bool,
}

/// One trial's channel state plus the prepared samplers.
#[derive(Debug, Clone)]
pub struct Simulator {
    model: SystemModel,
    theta: f64,
    sr: RfSampler,
    se: RfSampler,
    fso: FsoSampler,
    otas_csi: OtasCsi,
    pub sr_selection: Vec<f64>,
    pub sr_transmission: Vec<f64>,
    pub se_selection: Vec<f64>,
    pub se_transmission: Vec<f64>,
    pub fso_snr: f64,
}

impl Simulator {
    pub fn new(model: &SystemModel, otas_csi: OtasCsi) -> Self {
        let n = model.n_s as usize;
        Simulator {
            model: *model,
            theta: model.theta(),
            sr: RfSampler::new(&model.rf_sr),
            se: RfSampler::new(&model.rf_se),
            fso: FsoSampler::new(&model.fso),
            otas_csi,
            sr_selection: vec![0.0; n],
            sr_transmission: vec![0.0; n],
            se_selection: vec![0.0; n],
            se_transmission: vec![0.0; n],
            fso_snr: 0.0,
        }
    }

    pub fn draw<R: rand::Rng + ?Sized>(&mut self, rng: &mut R) {
        self.sr.fill(rng, &mut self.sr_selection, &mut self.sr_transmission);
        self.se.fill(rng, &mut self.se_selection, &mut self.se_transmission);
        if self.model.n_s == 1 {
            // Nothing is selected, so the CSI vintage is irrelevant.
            self.sr_transmission[0] = self.sr_selection[0];
            self.se_transmission[0] = self.se_selection[0];
        }
        self.fso_snr = self.fso.snr(rng);
    }

    fn outcome(&self, gamma_sr: f64, gamma_e: f64) -> TrialOutcome {
        let gamma_eq = gamma_sr.min(self.fso_snr);
        TrialOutcome {
            exact: gamma_eq <= self.theta * gamma_e + self.theta - 1.0,
            bound: gamma_eq <= self.theta * gamma_e,
        }
    }

    /// Antenna index the scheme picks on the current draw.
    pub fn selected(&self, scheme: Scheme) -> usize {
        match scheme {
            Scheme::Tasr => select_index(&self.sr_selection, SelectionMode::Max),
            Scheme::Tase => select_index(&self.se_selection, SelectionMode::Min),
            Scheme::Atas => self.selected(atas_select(&self.model)),
            Scheme::Otas => {
                let (sr, se) = match self.otas_csi {
                    OtasCsi::SelectionTime => (&self.sr_selection, &self.se_selection),
                    OtasCsi::TransmissionTime => (&self.sr_transmission, &self.se_transmission),
                };
                let mut best = 0;
                let mut best_ratio = f64::NEG_INFINITY;
                for i in 0..sr.len() {
                    let ratio = (1.0 + sr[i].min(self.fso_snr)) / (1.0 + se[i]);
                    if ratio > best_ratio {
                        best_ratio = ratio;
                        best = i;
                    }
                }
                best
            }
        }
    }

    pub fn evaluate(&self, scheme: Scheme) -> TrialOutcome {
        let b = self.selected(scheme);
        match scheme {
            Scheme::Atas => self.evaluate(atas_select(&self.model)),
            // The eavesdropper link is not the one being selected on.
            Scheme::Tasr => self.outcome(self.sr_transmission[b], self.se_selection[b]),
            Scheme::Tase => self.outcome(self.sr_selection[b], self.se_transmission[b]),
            Scheme::Otas => self.outcome(self.sr_transmission[b], self.se_transmission[b]),
        }
    }
}

pub fn simulate_trial<R: rand::Rng + ?Sized>(model: &SystemModel, scheme: Scheme, rng: &mut R) -> TrialOutcome {
    let mut sim = Simulator::new(model, OtasCsi::default());
    sim.draw(rng);
    sim.evaluate(scheme)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimates {
    pub exact: McEstimate,
    pub bound: McEstimate,
    pub est: McEstimate,
}

impl SopEstimates {
    fn from_counts(exact: u64, bound: u64, n: u64, rs: f64) -> Self {
        let exact = McEstimate::from_counts(exact, n);
        let bound = McEstimate::from_counts(bound, n);
        let est = McEstimate { value: rs * (1.0 - exact.value), stderr: rs * exact.stderr, n };
        SopEstimates { exact, bound, est }
    }
}

/// Random stream `index` of the family rooted at `seed`.
pub fn stream_rng(seed: u64, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn stream_sizes(n: u64, streams: u32) -> Vec<u64> {
    let base = n / streams as u64;
    let extra = n % streams as u64;
    (0..streams as u64).map(|i| base + u64::from(i < extra)).collect()
}

/// Simulates several schemes on shared draws. Results are a pure function of
/// the model, schemes, sample count, seed and stream count.
pub fn estimate_schemes(
    model: &SystemModel,
    schemes: &[Scheme],
    n_samples: u64,
    seed: u64,
    stream_count: u32,
    otas_csi: OtasCsi,
) -> Result<Vec<(Scheme, SopEstimates)>> {
    let plan = SimulationPlan { model: *model, scheme: Scheme::Tasr, n_samples, seed, stream_count, otas_csi };
    plan.validate()?;
    let counts: Vec<Vec<(u64, u64)>> = stream_sizes(n_samples, stream_count)
        .into_par_iter()
        .enumerate()
        .map(|(i, n)| {
            let mut rng = stream_rng(seed, i as u32);
            let mut sim = Simulator::new(model, otas_csi);
            let mut c = vec![(0u64, 0u64); schemes.len()];
            for _ in 0..n {
                sim.draw(&mut rng);
                for (slot, &s) in c.iter_mut().zip(schemes) {
                    let o = sim.evaluate(s);
                    slot.0 += o.exact as u64;
                    slot.1 += o.bound as u64;
                }
            }
            c
        })
        .collect();
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let (e, b) = counts.iter().fold((0, 0), |acc, c| (acc.0 + c[j].0, acc.1 + c[j].1));
            (s, SopEstimates::from_counts(e, b, n_samples, model.rs))
        })
        .collect())
}

pub fn estimate_sop(plan: &SimulationPlan) -> Result<SopEstimates> {
    let r = estimate_schemes(&plan.model, &[plan.scheme], plan.n_samples, plan.seed, plan.stream_count, plan.otas_csi)?;
    Ok(r[0].1)
}

/// One-sample KS statistic, evaluating `cdf` at every sample.
pub fn kolmogorov_smirnov(samples: &mut [f64], mut cdf: impl FnMut(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Upper bound on the KS statistic using `nodes` CDF evaluations at
/// empirical quantiles. Between two nodes the CDF is bracketed by its node
/// values, so the bound exceeds the true statistic by at most the largest CDF
/// increment between neighbouring nodes plus 1/nodes.
pub fn kolmogorov_smirnov_bracketed(samples: &mut [f64], mut cdf: impl FnMut(f64) -> f64, nodes: usize) -> f64 {
    samples.sort_by(f64::total_cmp);
    let len = samples.len();
    if len == 0 {
        return 0.0;
    }
    let n = len as f64;
    let nodes = nodes.clamp(2, len);
    let mut idx: Vec<usize> =
        (0..nodes).map(|j| ((j as f64 / (nodes - 1) as f64) * (len - 1) as f64).round() as usize).collect();
    idx.dedup();
    let values: Vec<f64> = idx.iter().map(|&i| cdf(samples[i])).collect();
    // Samples tied with the first node share its CDF value.
    let mut d: f64 = 0.0;
    for w in 0..idx.len() {
        let (i, f) = (idx[w], values[w]);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
        if w + 1 < idx.len() {
            let (ib, fb) = (idx[w + 1], values[w + 1]);
            d = d.max(ib as f64 / n - f).max(fb - (i as f64 + 1.0) / n);
        }
    }
    d
}

/// Critical value of the one-sample KS statistic at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fso::{Detection, FsoLink, MalagaParams, PointingParams};
    use crate::rf::RfLink;
    use rand::Rng;

    fn model(n_s: u32, rs: f64) -> SystemModel {
        let fso = FsoLink::new(
            MalagaParams::reference(),
            PointingParams::new(6.7, 1.0).unwrap(),
            0.9,
            0.5,
            Detection::IntensityModulation,
            2.0,
        )
        .unwrap();
        SystemModel::new(n_s, RfLink::new(2, 2, 0.8, 0.7).unwrap(), RfLink::new(2, 2, 0.3, 0.7).unwrap(), fso, rs)
            .unwrap()
    }

    #[test]
    fn stderr_formula() {
        let e = McEstimate::from_counts(25, 100);
        assert_eq!(e.value, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.covers(0.3, 2.0));
        assert!(!e.covers(0.4, 3.0));
    }

    #[test]
    fn huge_rate_always_outage() {
        let m = model(3, 30.0);
        let mut rng = stream_rng(1, 0);
        for s in Scheme::ALL {
            for _ in 0..2_000 {
                assert!(simulate_trial(&m, s, &mut rng).exact);
            }
        }
    }

    #[test]
    fn deterministic_and_bound_below_exact() {
        let m = model(3, 0.5);
        let a = estimate_schemes(&m, &Scheme::ALL, 20_000, 9, 4, OtasCsi::default()).unwrap();
        let b = estimate_schemes(&m, &Scheme::ALL, 20_000, 9, 4, OtasCsi::default()).unwrap();
        assert_eq!(a, b);
        for (_, e) in &a {
            assert!(e.bound.value <= e.exact.value);
            assert!((e.est.value - 0.5 * (1.0 - e.exact.value)).abs() < 1e-15);
        }
        let single = estimate_sop(&SimulationPlan::new(m, Scheme::Tase, 20_000, 9)).unwrap();
        assert_eq!(single.exact.n, 20_000);
        assert!(estimate_sop(&SimulationPlan::new(m, Scheme::Tase, 10, 9)).is_err());
    }

    #[test]
    fn single_antenna_schemes_coincide() {
        let m = model(1, 0.2);
        for csi in [OtasCsi::SelectionTime, OtasCsi::TransmissionTime] {
            let mut sim = Simulator::new(&m, csi);
            let mut rng = stream_rng(4, 2);
            for _ in 0..5_000 {
                sim.draw(&mut rng);
                let first = sim.evaluate(Scheme::Otas);
                for s in [Scheme::Tasr, Scheme::Tase, Scheme::Atas] {
                    assert_eq!(sim.evaluate(s), first);
                }
            }
        }
    }

    #[test]
    fn ks_self_test_and_power() {
        let n = 10_000;
        let crit = ks_critical_1pct(n);
        let mut rng = stream_rng(7, 0);
        let mut passes = 0;
        for _ in 0..100 {
            let mut s: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            if kolmogorov_smirnov(&mut s, |x| 1.0 - (-x).exp()) < crit {
                passes += 1;
            }
        }
        assert!(passes >= 95, "{passes}");
        let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        assert!(kolmogorov_smirnov(&mut u, |x| 1.0 - (-x).exp()) > crit);
    }

    #[test]
    fn bracketed_ks_bounds_exact() {
        let mut rng = stream_rng(8, 0);
        for shift in [0.0, 0.05, 0.3] {
            let mut s: Vec<f64> = (0..50_000).map(|_| shift - (1.0 - rng.random::<f64>()).ln()).collect();
            let cdf = |x: f64| if x > 0.0 { 1.0 - (-x).exp() } else { 0.0 };
            let exact = kolmogorov_smirnov(&mut s, cdf);
            let upper = kolmogorov_smirnov_bracketed(&mut s, cdf, 2_000);
            assert!(upper >= exact - 1e-15);
            assert!(upper <= exact + 2e-3, "{upper} vs {exact}");
        }
    }
}
