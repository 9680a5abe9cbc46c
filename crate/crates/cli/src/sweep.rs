//! Sweep evaluation and CSV emission.

use std::io::Write;

use rayon::prelude::*;
use rffso::analytics::{analyze, atas_select, Analysis, AnalysisOptions, Scheme};
use rffso::montecarlo::estimate_schemes;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Closed,
    Simulated,
    Both,
}

impl Mode {
    fn closed(self) -> bool {
        self != Mode::Simulated
    }

    fn simulated(self) -> bool {
        self != Mode::Closed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "sweep_value_dB")]
    pub sweep_value_db: f64,
    #[serde(serialize_with = "scheme_name")]
    pub scheme: Scheme,
    pub sop_bound: Option<f64>,
    pub sop_exact: Option<f64>,
    pub sop_asymptotic: Option<f64>,
    pub sop_mc: Option<f64>,
    pub sop_mc_stderr: Option<f64>,
    pub est_closed: Option<f64>,
    pub est_mc: Option<f64>,
    pub flags: String,
}

fn scheme_name<S: serde::Serializer>(scheme: &Scheme, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(scheme.name())
}

fn point(cfg: &ScenarioConfig, value_db: f64, mode: Mode) -> Result<Vec<SweepRow>, CliError> {
    let at = |e: rffso::RffsoError, scheme: Option<Scheme>| {
        let mut err = CliError::from(e);
        let tag = match scheme {
            Some(s) => format!("sweep value {value_db} dB, scheme {s}"),
            None => format!("sweep value {value_db} dB"),
        };
        match &mut err {
            CliError::Numerical(m) | CliError::Config(m) => *m = format!("{tag}: {m}"),
            _ => {}
        }
        err
    };
    let model = cfg.at(value_db).model().map_err(|e| at(e, None))?;
    let analysis = if mode.closed() {
        Some(Analysis::with_truncation(model, cfg.k_truncation).map_err(|e| at(e, None))?)
    } else {
        None
    };
    let mc = if mode.simulated() {
        Some(
            estimate_schemes(&model, &cfg.schemes, cfg.samples, cfg.seed, cfg.stream_count, cfg.otas_csi)
                .map_err(|e| at(e, None))?,
        )
    } else {
        None
    };
    let mut rows = Vec::new();
    for (j, &scheme) in cfg.schemes.iter().enumerate() {
        let mut row = SweepRow {
            sweep_value_db: value_db,
            scheme,
            sop_bound: None,
            sop_exact: None,
            sop_asymptotic: None,
            sop_mc: None,
            sop_mc_stderr: None,
            est_closed: None,
            est_mc: None,
            flags: String::new(),
        };
        let mut flags = Vec::new();
        if scheme == Scheme::Atas {
            flags.push(format!("atas={}", atas_select(&model)));
        }
        if let (Some(an), true) = (&analysis, scheme.has_closed_form()) {
            let r = analyze(an, scheme, AnalysisOptions::default()).map_err(|e| at(e, Some(scheme)))?;
            row.sop_bound = Some(r.sop_bound);
            row.sop_exact = r.sop_exact;
            row.sop_asymptotic = r.sop_asymptotic;
            row.est_closed = Some(r.est);
            let d = r.diagnostics;
            for (set, name) in [
                (d.bound_out_of_range, "bound_out_of_range"),
                (d.truncation_warning, "truncation_warning"),
                (d.regularized, "regularized"),
            ] {
                if set {
                    flags.push(name.to_string());
                }
            }
        }
        if let Some(mc) = &mc {
            let e = mc[j].1;
            row.sop_mc = Some(e.exact.value);
            row.sop_mc_stderr = Some(e.exact.stderr);
            row.est_mc = Some(e.est.value);
        }
        row.flags = flags.join(";");
        rows.push(row);
    }
    Ok(rows)
}

/// Rows ordered by sweep index then scheme, whatever the completion order.
pub fn run_sweep(cfg: &ScenarioConfig, mode: Mode) -> Result<Vec<SweepRow>, CliError> {
    let per_point: Vec<Result<Vec<SweepRow>, CliError>> =
        cfg.grid().into_par_iter().map(|v| point(cfg, v, mode)).collect();
    let mut rows = Vec::new();
    for p in per_point {
        rows.extend(p?);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "sweep_value_dB",
            "scheme",
            "sop_bound",
            "sop_exact",
            "sop_asymptotic",
            "sop_mc",
            "sop_mc_stderr",
            "est_closed",
            "est_mc",
            "flags",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small() -> ScenarioConfig {
        parse_config(
            "schemes = [\"tasr\", \"otas\"]\n[system]\nn_s = 2\n[numerics]\nsamples = 2000\nk_truncation = 20\n\
             [sweep]\nstart_db = 0\nstop_db = 10\nstep_db = 10\n",
        )
        .unwrap()
    }

    #[test]
    fn header_and_order() {
        let rows = run_sweep(&small(), Mode::Both).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sweep_value_dB,scheme,sop_bound,sop_exact,sop_asymptotic,sop_mc,sop_mc_stderr,est_closed,est_mc,flags"
        );
        let keys: Vec<(f64, Scheme)> = rows.iter().map(|r| (r.sweep_value_db, r.scheme)).collect();
        assert_eq!(keys, vec![(0.0, Scheme::Otas), (0.0, Scheme::Tasr), (10.0, Scheme::Otas), (10.0, Scheme::Tasr)]);
        assert!(lines.next().unwrap().starts_with("0.0,otas,,,,"));
    }

    #[test]
    fn rows_respect_ranges() {
        let cfg = small();
        for r in run_sweep(&cfg, Mode::Both).unwrap() {
            for p in [r.sop_bound, r.sop_exact, r.sop_asymptotic, r.sop_mc].into_iter().flatten() {
                assert!((0.0..=1.0).contains(&p));
            }
            for e in [r.est_closed, r.est_mc].into_iter().flatten() {
                assert!((0.0..=cfg.scenario.rs).contains(&e));
            }
        }
    }

    #[test]
    fn closed_mode_skips_simulation() {
        let rows = run_sweep(&small(), Mode::Closed).unwrap();
        assert!(rows.iter().all(|r| r.sop_mc.is_none()));
        let rows = run_sweep(&small(), Mode::Simulated).unwrap();
        assert!(rows.iter().all(|r| r.sop_bound.is_none() && r.sop_mc.is_some()));
    }
}
