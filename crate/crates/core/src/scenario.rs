//! Flat, dB-denominated description of a system configuration and the named
//! configurations of the numerical study.

use crate::analytics::SystemModel;
use crate::error::{Result, RffsoError};
use crate::fso::{Detection, FsoLink, MalagaParams, PointingParams};
use crate::rf::RfLink;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub n_s: u32,
    pub n_r: u32,
    pub n_e: u32,
    pub m: u32,
    pub rho_rf: f64,
    pub sr_db: f64,
    pub se_db: f64,
    pub rd_db: f64,
    pub malaga: MalagaParams,
    pub xi: f64,
    pub a0: f64,
    pub path_loss: f64,
    pub rho_fso: f64,
    pub r: u32,
    pub rs: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n_s: 5,
            n_r: 2,
            n_e: 2,
            m: 2,
            rho_rf: 0.7,
            sr_db: -1.0,
            se_db: -5.0,
            rd_db: 10.0,
            malaga: MalagaParams::reference(),
            xi: 6.7,
            a0: 1.0,
            path_loss: 0.9,
            rho_fso: 0.5,
            r: 2,
            rs: 0.01,
        }
    }
}

/// Reports link-level field names under their scenario names.
fn rename(err: RffsoError, names: &[(&str, &'static str)]) -> RffsoError {
    match err {
        RffsoError::InvalidParameter { field, detail } => {
            let field = names.iter().find(|(from, _)| *from == field).map_or(field, |&(_, to)| to);
            RffsoError::InvalidParameter { field, detail }
        }
        other => other,
    }
}

impl Scenario {
    pub fn fso_link(&self) -> Result<FsoLink> {
        let link = FsoLink::new(
            self.malaga,
            PointingParams::new(self.xi, self.a0)?,
            self.path_loss,
            self.rho_fso,
            Detection::from_r(self.r)?,
            db_to_linear(self.rd_db),
        );
        link.map_err(|e| rename(e, &[("mean_snr_rd", "rd_db")]))
    }

    pub fn model(&self) -> Result<SystemModel> {
        let sr = RfLink::new(self.m, self.n_r, db_to_linear(self.sr_db), self.rho_rf)
            .map_err(|e| rename(e, &[("n_rx", "n_r"), ("mean_snr", "sr_db"), ("rho", "rho_rf")]))?;
        let se = RfLink::new(self.m, self.n_e, db_to_linear(self.se_db), self.rho_rf)
            .map_err(|e| rename(e, &[("n_rx", "n_e"), ("mean_snr", "se_db"), ("rho", "rho_rf")]))?;
        SystemModel::new(self.n_s, sr, se, self.fso_link()?, self.rs)
    }

    /// EST against the FSO mean SNR while the eavesdropper's mean SNR varies.
    pub fn fig_se(se_db: f64) -> Self {
        Scenario { rho_rf: 0.85, sr_db: -4.0, se_db, ..Default::default() }
    }

    /// Heterodyne (r = 1) against IM/DD (r = 2).
    pub fn fig_detection(r: u32) -> Self {
        Scenario { r, ..Default::default() }
    }

    /// Pointing-error severity.
    pub fn fig_pointing(xi: f64) -> Self {
        Scenario { rho_rf: 0.85, xi, ..Default::default() }
    }

    /// Turbulence strength.
    pub fn fig_turbulence(alpha: f64, beta: u32) -> Self {
        let malaga = MalagaParams { alpha, beta, ..MalagaParams::reference() };
        Scenario { n_s: 4, malaga, ..Default::default() }
    }

    /// FSO estimation quality, swept over the S-R mean SNR.
    pub fn fig_rho_fso(rho_fso: f64) -> Self {
        Scenario { n_s: 4, rho_fso, rd_db: -5.0, ..Default::default() }
    }

    /// RF CSI freshness, swept over the S-R mean SNR.
    pub fn fig_rho_rf(rho_rf: f64) -> Self {
        Scenario { rho_rf, rd_db: -5.0, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_builds() {
        let m = Scenario::default().model().unwrap();
        assert_eq!(m.n_s, 5);
        assert!((m.rf_sr.mean_snr - db_to_linear(-1.0)).abs() < 1e-15);
        assert_eq!(m.fso.r(), 2);
    }

    #[test]
    fn invalid_field_is_named() {
        let err = Scenario { rho_fso: 1.5, ..Default::default() }.model().unwrap_err();
        assert!(err.to_string().contains("rho_fso"), "{err}");
        let err = Scenario { rho_rf: 1.0, ..Default::default() }.model().unwrap_err();
        assert!(err.to_string().contains("rho_rf"), "{err}");
        let err = Scenario { n_e: 0, ..Default::default() }.model().unwrap_err();
        assert!(err.to_string().contains("n_e"), "{err}");
    }
}
