//! Closed-form secrecy metrics for the TASR and TASE schemes, the exact
//! outage by quadrature, the high-SNR floor, and the ATAS dispatch rule.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use specfun::quad::{integrate_to_infinity, Tolerance};
use specfun::{ln_factorial, meijer_g_detailed, meijer_g_residue_tail, MeijerGSpec};

use crate::error::{Result, RffsoError};
use crate::fso::{build_series_table, fso_snr_cdf, FsoLink, FsoSeriesTable, DEFAULT_TRUNCATION};
use crate::rf::{
    enumerate_selection_table, mrc_cdf, mrc_pdf, selected_snr_cdf, selected_snr_pdf, Neumaier, RfLink, SelectionMode,
    SelectionTable,
};

/// Raw bounds outside `[-SLACK, 1 + SLACK]` are reported as out of range.
const CLAMP_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Otas,
    Tasr,
    Tase,
    Atas,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Otas, Scheme::Tasr, Scheme::Tase, Scheme::Atas];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Otas => "otas",
            Scheme::Tasr => "tasr",
            Scheme::Tase => "tase",
            Scheme::Atas => "atas",
        }
    }

    pub fn has_closed_form(self) -> bool {
        self != Scheme::Otas
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = RffsoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "otas" => Ok(Scheme::Otas),
            "tasr" => Ok(Scheme::Tasr),
            "tase" => Ok(Scheme::Tase),
            "atas" => Ok(Scheme::Atas),
            _ => Err(RffsoError::invalid("scheme", format!("unknown scheme '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemModel {
    pub n_s: u32,
    pub rf_sr: RfLink,
    pub rf_se: RfLink,
    pub fso: FsoLink,
    /// Target secrecy rate in bit/s/Hz.
    pub rs: f64,
}

impl SystemModel {
    pub fn new(n_s: u32, rf_sr: RfLink, rf_se: RfLink, fso: FsoLink, rs: f64) -> Result<Self> {
        if n_s == 0 {
            return Err(RffsoError::invalid("n_s", "at least one transmit antenna is required"));
        }
        if !(rs > 0.0) || !rs.is_finite() {
            return Err(RffsoError::invalid("rs", format!("{rs} must be positive")));
        }
        Ok(SystemModel { n_s, rf_sr, rf_se, fso, rs })
    }

    pub fn theta(&self) -> f64 {
        2f64.powf(self.rs)
    }
}

/// Returns TASR iff mean SNRs satisfy SE < SR < RD; ties go to TASE.
pub fn atas_select(model: &SystemModel) -> Scheme {
    let (sr, se, rd) = (model.rf_sr.mean_snr, model.rf_se.mean_snr, model.fso.mean_snr);
    if se < sr && sr < rd {
        Scheme::Tasr
    } else {
        Scheme::Tase
    }
}

/// Model plus the coefficient tables every closed form draws on.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub model: SystemModel,
    pub fso_table: FsoSeriesTable,
    /// Max-selection table on the S-R link.
    pub sr_table: SelectionTable,
    /// Min-selection table on the S-E link.
    pub se_table: SelectionTable,
}

impl Analysis {
    pub fn new(model: SystemModel) -> Result<Self> {
        Self::with_truncation(model, DEFAULT_TRUNCATION)
    }

    pub fn with_truncation(model: SystemModel, k_truncation: usize) -> Result<Self> {
        let fso_table = build_series_table(&model.fso, k_truncation)?;
        Self::with_table(model, fso_table)
    }

    /// Reuses an FSO table; only valid when the optical link is unchanged.
    pub fn with_table(model: SystemModel, fso_table: FsoSeriesTable) -> Result<Self> {
        let sr_table = enumerate_selection_table(&model.rf_sr, model.n_s, SelectionMode::Max)?;
        let se_table = enumerate_selection_table(&model.rf_se, model.n_s, SelectionMode::Min)?;
        Ok(Analysis { model, fso_table, sr_table, se_table })
    }

    fn resolve(&self, scheme: Scheme) -> Result<Scheme> {
        match scheme {
            Scheme::Atas => Ok(atas_select(&self.model)),
            Scheme::Otas => Err(RffsoError::invalid("scheme", "OTAS has no closed form; use the simulator")),
            s => Ok(s),
        }
    }
}

/// CDF of min(RF-hop SNR, estimated FSO SNR) under the given scheme.
pub fn equivalent_snr_cdf(an: &Analysis, scheme: Scheme, gamma: f64) -> Result<f64> {
    let f_fso = fso_snr_cdf(&an.fso_table, &an.model.fso, gamma);
    let f_rf = match an.resolve(scheme)? {
        Scheme::Tasr => selected_snr_cdf(&an.sr_table, gamma),
        _ => mrc_cdf(&an.model.rf_sr, gamma),
    };
    Ok(1.0 - (1.0 - f_rf) * (1.0 - f_fso))
}

/// Density of the eavesdropper SNR under the given scheme.
fn eavesdropper_pdf(an: &Analysis, scheme: Scheme, gamma: f64) -> f64 {
    match scheme {
        Scheme::Tasr => mrc_pdf(&an.model.rf_se, gamma),
        _ => selected_snr_pdf(&an.se_table, gamma),
    }
}

/// Sum over k of one Meijer-kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
struct KernelSum {
    value: f64,
    /// Same sum with the residue expansion in place of each kernel.
    expansion: f64,
    regularized: bool,
}

fn delta_block(n: usize, a: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (a + i as f64) / n as f64)
}

fn sop_kernel_spec(r: usize, k: usize, s: u32) -> Result<MeijerGSpec> {
    let a: Vec<f64> = delta_block(r, 1.0).chain(delta_block(2, 1.0 - s as f64)).collect();
    let b: Vec<f64> = delta_block(r, (1.0 + k as f64) / 2.0).chain(delta_block(r, 0.0)).collect();
    MeijerGSpec::new(r, r + 2, &a, &b).map_err(RffsoError::numerical("SOP kernel parameters"))
}

/// B_D sum_h sum_k phi_G G[upsilon]: the FSO part of the eavesdropper
/// average, for SNR exponent `s` and exponential rate `shift`.
fn kernel_sum(an: &Analysis, s: u32, shift: f64, with_expansion: bool) -> Result<KernelSum> {
    let table = &an.fso_table;
    let r = table.r as usize;
    let rf = r as f64;
    let theta = an.model.theta();
    let upsilon = 4.0 * table.psi1.powi(r as i32) * theta * theta / (rf.powi(r as i32) * shift * shift);
    let ln_prefix = (s as f64 - 0.5) * LN_2 - 0.5 * rf * (2.0 * PI).ln();
    let per_k: Vec<Result<(f64, f64, bool)>> = (0..=table.k_max)
        .into_par_iter()
        .map(|k| {
            let h_sum: f64 = table.h1.iter().map(|row| row[k]).sum();
            if h_sum == 0.0 {
                return Ok((0.0, 0.0, false));
            }
            let spec = sop_kernel_spec(r, k, s)?;
            let g = meijer_g_detailed(&spec, upsilon)
                .map_err(RffsoError::numerical(format!("SOP kernel at k={k}, s={s}, argument {upsilon:e}")))?;
            let ln_w = h_sum.abs().ln() + 0.5 * k as f64 * rf.ln() + ln_prefix;
            let value = h_sum.signum() * g.signum() * (ln_w + g.ln_abs()).exp();
            let (expansion, reg) = if with_expansion {
                let tail = meijer_g_residue_tail(&spec, upsilon)
                    .map_err(RffsoError::numerical(format!("SOP kernel expansion at k={k}, s={s}")))?;
                (h_sum.signum() * ln_w.exp() * tail.value, tail.regularized)
            } else {
                (0.0, false)
            };
            Ok((value, expansion, reg))
        })
        .collect();
    let mut out = KernelSum { value: 0.0, expansion: 0.0, regularized: false };
    for item in per_k {
        let (v, e, reg) = item?;
        out.value += v;
        out.expansion += e;
        out.regularized |= reg;
    }
    out.value *= table.b_d;
    out.expansion *= table.b_d;
    Ok(out)
}

/// One group of the outer RF sums: every term shares the SNR exponent `s`
/// and the exponential rate `shift`, so they share a kernel sum.
#[derive(Debug, Clone, Copy)]
struct OuterGroup {
    s: u32,
    shift: f64,
    coefficient: f64,
}

/// Collects the outer coefficients so that
/// P = 1 - sum coefficient * (Z0 (s - 1)! - kernel_sum(s, shift)).
fn outer_groups(an: &Analysis, scheme: Scheme) -> Vec<OuterGroup> {
    let m = &an.model;
    let theta = m.theta();
    let mut groups: BTreeMap<(u32, u32), (f64, Neumaier)> = BTreeMap::new();
    match scheme {
        Scheme::Tasr => {
            let t_tab = &an.sr_table;
            let tau_r = t_tab.tau();
            let tau_e = m.rf_se.tau();
            let lam_e = m.rf_se.lambda();
            let ln_e = tau_e as f64 * lam_e.ln() - ln_factorial(tau_e as usize - 1);
            for term in &t_tab.terms {
                let shift = term.upsilon * theta + lam_e;
                for q in 0..=term.b {
                    for t in 0..(q + tau_r) {
                        let s = t + tau_e;
                        let ln_rest = t as f64 * theta.ln() + ln_e - s as f64 * shift.ln();
                        let c = t_tab.phi * term.varphi(tau_r, q, t) * ln_rest.exp();
                        groups.entry((term.c, s)).or_insert_with(|| (shift, Neumaier::default())).1.add(c);
                    }
                }
            }
        }
        _ => {
            let t_tab = &an.se_table;
            let tau_r = m.rf_sr.tau();
            let lam_r = m.rf_sr.lambda();
            for term in &t_tab.terms {
                let shift = theta * lam_r + term.upsilon;
                for q in 0..=term.b {
                    for i in 0..tau_r {
                        let s = i + q + t_tab.tau();
                        let ln_rest =
                            i as f64 * (theta * lam_r).ln() - s as f64 * shift.ln() - ln_factorial(i as usize);
                        let c = t_tab.phi * term.lambda_q(q) * ln_rest.exp();
                        groups.entry((term.c, s)).or_insert_with(|| (shift, Neumaier::default())).1.add(c);
                    }
                }
            }
        }
    }
    groups.into_iter().map(|((_, s), (shift, acc))| OuterGroup { s, shift, coefficient: acc.finish().value }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    /// Clamped to [0, 1].
    pub value: f64,
    pub raw: f64,
    /// Set when the raw value left [-1e-6, 1 + 1e-6].
    pub out_of_range: bool,
}

/// Closed-form lower bound of the secrecy outage probability.
pub fn sop_bound(an: &Analysis, scheme: Scheme) -> Result<BoundValue> {
    let scheme = an.resolve(scheme)?;
    let z0 = an.fso_table.z0;
    let mut acc = Neumaier::default();
    acc.add(1.0);
    for g in outer_groups(an, scheme) {
        let ks = kernel_sum(an, g.s, g.shift, false)?;
        let avg = z0 * ln_factorial(g.s as usize - 1).exp() - ks.value;
        acc.add(-g.coefficient * avg);
    }
    let raw = acc.finish().value;
    Ok(BoundValue { value: raw.clamp(0.0, 1.0), raw, out_of_range: !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&raw) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    /// Limit as the FSO mean SNR grows without bound.
    pub floor: f64,
    /// Floor plus the leading residue terms at the current FSO mean SNR.
    pub expansion: f64,
    /// Some residue terms needed the perturbation of coincident parameters.
    pub regularized: bool,
}

/// High-SNR floor of the bound. Does not depend on the FSO mean SNR.
pub fn sop_asymptotic(an: &Analysis, scheme: Scheme) -> Result<f64> {
    let scheme = an.resolve(scheme)?;
    let z0 = an.fso_table.z0;
    let mut acc = Neumaier::default();
    acc.add(1.0);
    for g in outer_groups(an, scheme) {
        acc.add(-g.coefficient * z0 * ln_factorial(g.s as usize - 1).exp());
    }
    Ok(acc.finish().value.clamp(0.0, 1.0))
}

pub fn sop_asymptotic_detailed(an: &Analysis, scheme: Scheme) -> Result<AsymptoticValue> {
    let scheme = an.resolve(scheme)?;
    let z0 = an.fso_table.z0;
    let (mut floor, mut expansion) = (Neumaier::default(), Neumaier::default());
    floor.add(1.0);
    expansion.add(1.0);
    let mut regularized = false;
    for g in outer_groups(an, scheme) {
        let base = g.coefficient * z0 * ln_factorial(g.s as usize - 1).exp();
        let ks = kernel_sum(an, g.s, g.shift, true)?;
        floor.add(-base);
        expansion.add(-base);
        expansion.add(g.coefficient * ks.expansion);
        regularized |= ks.regularized;
    }
    Ok(AsymptoticValue {
        floor: floor.finish().value.clamp(0.0, 1.0),
        expansion: expansion.finish().value,
        regularized,
    })
}

fn outage_by_quadrature(an: &Analysis, scheme: Scheme, exact: bool) -> Result<f64> {
    let scheme = an.resolve(scheme)?;
    let theta = an.model.theta();
    let offset = if exact { theta - 1.0 } else { 0.0 };
    let e_link = &an.model.rf_se;
    let scale = e_link.tau() as f64 / e_link.lambda();
    let integrand = |g: f64| {
        let f = eavesdropper_pdf(an, scheme, g);
        if f == 0.0 {
            return 0.0;
        }
        let x = theta * g + offset;
        let f_rf = match scheme {
            Scheme::Tasr => selected_snr_cdf(&an.sr_table, x),
            _ => mrc_cdf(&an.model.rf_sr, x),
        };
        let f_fso = fso_snr_cdf(&an.fso_table, &an.model.fso, x);
        (1.0 - (1.0 - f_rf) * (1.0 - f_fso)) * f
    };
    let tol = Tolerance::relative(1e-10).with_abs(1e-11);
    let r = integrate_to_infinity(integrand, 0.0, scale, tol)
        .map_err(RffsoError::numerical("secrecy outage quadrature"))?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Exact secrecy outage probability by adaptive quadrature.
pub fn sop_exact_numeric(an: &Analysis, scheme: Scheme) -> Result<f64> {
    outage_by_quadrature(an, scheme, true)
}

/// Lower bound by quadrature; an independent check on [`sop_bound`].
pub fn sop_bound_numeric(an: &Analysis, scheme: Scheme) -> Result<f64> {
    outage_by_quadrature(an, scheme, false)
}

pub fn sop_bound_atas(an: &Analysis) -> Result<BoundValue> {
    sop_bound(an, atas_select(&an.model))
}

/// Effective secrecy throughput Rs (1 - sop).
pub fn est(model: &SystemModel, sop: f64) -> f64 {
    model.rs * (1.0 - sop)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub bound_out_of_range: bool,
    pub truncation_warning: bool,
    pub regularized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyResult {
    pub scheme: Scheme,
    pub sop_bound: f64,
    pub sop_exact: Option<f64>,
    pub sop_asymptotic: Option<f64>,
    /// Throughput from the exact outage when present, else from the bound.
    pub est: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub exact: bool,
    pub asymptotic: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { exact: true, asymptotic: true }
    }
}

pub fn analyze(an: &Analysis, scheme: Scheme, opts: AnalysisOptions) -> Result<SecrecyResult> {
    let resolved = an.resolve(scheme)?;
    let bound = sop_bound(an, resolved)?;
    let exact = if opts.exact { Some(sop_exact_numeric(an, resolved)?.max(bound.value)) } else { None };
    let (asym, regularized) = if opts.asymptotic {
        let d = sop_asymptotic_detailed(an, resolved)?;
        (Some(d.floor), d.regularized)
    } else {
        (None, false)
    };
    let sop = exact.unwrap_or(bound.value);
    Ok(SecrecyResult {
        scheme,
        sop_bound: bound.value,
        sop_exact: exact,
        sop_asymptotic: asym,
        est: est(&an.model, sop),
        diagnostics: Diagnostics {
            bound_out_of_range: bound.out_of_range,
            truncation_warning: an.fso_table.certificate.warning,
            regularized,
        },
    })
}
