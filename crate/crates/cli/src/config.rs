//! Scenario files: TOML with `[system]`, `[fso]`, `[numerics]` and `[sweep]`
//! sections. Every key is optional; missing ones take the reference values.

use std::path::Path;

use rffso::analytics::Scheme;
use rffso::fso::{MalagaParams, DEFAULT_TRUNCATION};
use rffso::montecarlo::OtasCsi;
use rffso::scenario::Scenario;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub n_s: u32,
    pub n_r: u32,
    pub n_e: u32,
    pub m: u32,
    pub rho_rf: f64,
    pub sr_db: f64,
    pub se_db: f64,
    pub rd_db: f64,
    pub rs: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsoSection {
    pub alpha: f64,
    pub beta: u32,
    pub omega: f64,
    pub b0: f64,
    pub rho0: f64,
    pub phase_diff: f64,
    pub xi: f64,
    pub a0: f64,
    pub path_loss: f64,
    pub rho_fso: f64,
    pub r: u32,
    /// Echoed only; turbulence enters through alpha and beta.
    pub link_length_km: f64,
    /// Echoed only.
    pub wavelength_nm: f64,
    /// Echoed only.
    pub cn2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OtasCsiSetting {
    #[default]
    Selection,
    Transmission,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    pub k_truncation: usize,
    pub samples: u64,
    pub seed: u64,
    pub stream_count: u32,
    pub otas_csi: OtasCsiSetting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "rd_db")]
    Rd,
    #[serde(rename = "sr_db")]
    Sr,
    #[serde(rename = "se_db")]
    Se,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_variable")]
    pub variable: SweepVariable,
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

fn default_variable() -> SweepVariable {
    SweepVariable::Rd
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub system: SystemSection,
    pub fso: FsoSection,
    pub numerics: NumericsSection,
    pub sweep: Option<SweepSection>,
    pub schemes: Vec<String>,
}

impl Default for SystemSection {
    fn default() -> Self {
        let s = Scenario::default();
        SystemSection {
            n_s: s.n_s,
            n_r: s.n_r,
            n_e: s.n_e,
            m: s.m,
            rho_rf: s.rho_rf,
            sr_db: s.sr_db,
            se_db: s.se_db,
            rd_db: s.rd_db,
            rs: s.rs,
        }
    }
}

impl Default for FsoSection {
    fn default() -> Self {
        let s = Scenario::default();
        let m = MalagaParams::reference();
        FsoSection {
            alpha: m.alpha,
            beta: m.beta,
            omega: m.omega,
            b0: m.b0,
            rho0: m.rho0,
            phase_diff: m.phase_diff,
            xi: s.xi,
            a0: s.a0,
            path_loss: s.path_loss,
            rho_fso: s.rho_fso,
            r: s.r,
            link_length_km: 1.0,
            wavelength_nm: 785.0,
            cn2: 1.2e-13,
        }
    }
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            k_truncation: DEFAULT_TRUNCATION,
            samples: 1_000_000,
            seed: 1,
            stream_count: 16,
            otas_csi: OtasCsiSetting::Selection,
        }
    }
}

impl Default for RawConfig {
    fn default() -> Self {
        RawConfig {
            system: SystemSection::default(),
            fso: FsoSection::default(),
            numerics: NumericsSection::default(),
            sweep: None,
            schemes: Scheme::ALL.iter().map(|s| s.name().to_string()).collect(),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub k_truncation: usize,
    pub samples: u64,
    pub seed: u64,
    pub stream_count: u32,
    pub otas_csi: OtasCsi,
    pub sweep: Option<SweepSection>,
    pub schemes: Vec<Scheme>,
    pub echo: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        RawConfig::default().validate().expect("defaults are valid")
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().trim().to_string();
        match e.span() {
            Some(span) => CliError::Config(format!("line {}: {msg}", line_of(text, span.start))),
            None => CliError::Config(msg),
        }
    })?;
    raw.validate()
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

impl RawConfig {
    pub fn validate(self) -> Result<ScenarioConfig, CliError> {
        let (sys, fso, num) = (&self.system, &self.fso, &self.numerics);
        let malaga = MalagaParams::new(fso.alpha, fso.beta, fso.omega, fso.b0, fso.rho0, fso.phase_diff)?;
        let scenario = Scenario {
            n_s: sys.n_s,
            n_r: sys.n_r,
            n_e: sys.n_e,
            m: sys.m,
            rho_rf: sys.rho_rf,
            sr_db: sys.sr_db,
            se_db: sys.se_db,
            rd_db: sys.rd_db,
            malaga,
            xi: fso.xi,
            a0: fso.a0,
            path_loss: fso.path_loss,
            rho_fso: fso.rho_fso,
            r: fso.r,
            rs: sys.rs,
        };
        scenario.model()?;
        let field = |name: &str, detail: String| CliError::Config(format!("invalid {name}: {detail}"));
        if num.k_truncation == 0 {
            return Err(field("k_truncation", "must be at least 1".into()));
        }
        if num.samples < rffso::montecarlo::MIN_SAMPLES {
            return Err(field("samples", format!("must be at least {}", rffso::montecarlo::MIN_SAMPLES)));
        }
        if num.stream_count == 0 {
            return Err(field("stream_count", "must be positive".into()));
        }
        if let Some(sw) = &self.sweep {
            if !(sw.step_db > 0.0) || !sw.step_db.is_finite() {
                return Err(field("step_db", format!("{} must be positive", sw.step_db)));
            }
            if !(sw.stop_db >= sw.start_db) || !sw.start_db.is_finite() || !sw.stop_db.is_finite() {
                return Err(field("stop_db", format!("range {}..{} is empty", sw.start_db, sw.stop_db)));
            }
        }
        let schemes = parse_schemes(&self.schemes)?;
        let echo = format!(
            "link_length_km={} wavelength_nm={} cn2={:e} (echoed, not used in computation)",
            fso.link_length_km, fso.wavelength_nm, fso.cn2
        );
        Ok(ScenarioConfig {
            scenario,
            k_truncation: num.k_truncation,
            samples: num.samples,
            seed: num.seed,
            stream_count: num.stream_count,
            otas_csi: match num.otas_csi {
                OtasCsiSetting::Selection => OtasCsi::SelectionTime,
                OtasCsiSetting::Transmission => OtasCsi::TransmissionTime,
            },
            sweep: self.sweep,
            schemes,
            echo,
        })
    }
}

/// Accepts scheme names plus `all`, keeping the canonical order.
pub fn parse_schemes(names: &[String]) -> Result<Vec<Scheme>, CliError> {
    if names.is_empty() {
        return Err(CliError::Config("invalid schemes: list is empty".into()));
    }
    let mut out = Vec::new();
    for n in names {
        if n.eq_ignore_ascii_case("all") {
            out.extend(Scheme::ALL);
        } else {
            out.push(n.parse::<Scheme>()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

impl ScenarioConfig {
    /// Sweep points in dB; a single point at the configured value without a sweep.
    pub fn grid(&self) -> Vec<f64> {
        match &self.sweep {
            None => vec![self.scenario.rd_db],
            Some(sw) => {
                let n = ((sw.stop_db - sw.start_db) / sw.step_db + 1e-9).floor() as usize;
                (0..=n).map(|i| sw.start_db + i as f64 * sw.step_db).collect()
            }
        }
    }

    pub fn at(&self, value_db: f64) -> Scenario {
        let mut s = self.scenario;
        match self.sweep.as_ref().map(|sw| sw.variable).unwrap_or(SweepVariable::Rd) {
            SweepVariable::Rd => s.rd_db = value_db,
            SweepVariable::Sr => s.sr_db = value_db,
            SweepVariable::Se => s.se_db = value_db,
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(c.scenario, Scenario::default());
        assert_eq!(c.k_truncation, 80);
        assert_eq!(c.schemes, Scheme::ALL.to_vec());
        assert_eq!(c.grid(), vec![10.0]);
    }

    #[test]
    fn range_error_names_field() {
        let err = parse_config("[fso]\nrho_fso = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("rho_fso"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config("[system]\nn_s = 3\n\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_config("[system]\nn_s = = 3\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn pointing_overrides_give_two_scenarios() {
        for xi in [1.1, 6.7] {
            let c = parse_config(&format!("[system]\nrho_rf = 0.85\n[fso]\nxi = {xi}\n")).unwrap();
            assert_eq!(c.scenario, Scenario::fig_pointing(xi));
        }
    }

    #[test]
    fn sweep_grid_and_variable() {
        let c = parse_config("[sweep]\nvariable = \"sr_db\"\nstart_db = -10\nstop_db = 20\nstep_db = 5\n").unwrap();
        assert_eq!(c.grid(), vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(c.at(5.0).sr_db, 5.0);
        assert_eq!(c.at(5.0).rd_db, c.scenario.rd_db);
        assert!(parse_config("[sweep]\nstart_db = 1\nstop_db = 0\nstep_db = 1\n")
            .unwrap_err()
            .to_string()
            .contains("stop_db"));
        assert!(parse_config("[sweep]\nstart_db = 0\nstop_db = 1\nstep_db = 0\n")
            .unwrap_err()
            .to_string()
            .contains("step_db"));
    }

    #[test]
    fn schemes_parse() {
        let c = parse_config("schemes = [\"tase\", \"tasr\", \"tase\"]\n").unwrap();
        assert_eq!(c.schemes, vec![Scheme::Tasr, Scheme::Tase]);
        assert!(parse_config("schemes = [\"best\"]\n").is_err());
    }
}
