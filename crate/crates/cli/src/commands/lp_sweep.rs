//! `fbh lp-sweep`: Lp ratio table of the tuned Gaussian witness family with a
//! verdict per exponent.

use fbh_core::kernels::FockWeight;
use fbh_core::lplab::{
    classify_sweep, fbh_lp_experiment, lp_ratio_quadrature, tune_witness, ExperimentSpec,
    GaussianBump,
};
use fbh_core::projection::NestedSpec;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::LpSweepConfig;
use crate::{numerical, CliError, Report};

/// Columns: kind, p, gamma, center_norm, beta, ratio_analytic,
/// fock_quadrature, fock_std_error, domain_ratio, domain_std_error,
/// lift_constant, exponent_rate, flagged, verdict. Summary rows carry only
/// p, gamma, beta, exponent_rate and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub kind: &'static str,
    pub p: f64,
    pub gamma: f64,
    pub center_norm: Option<f64>,
    pub beta: f64,
    pub ratio_analytic: Option<f64>,
    pub fock_quadrature: Option<f64>,
    pub fock_std_error: Option<f64>,
    pub domain_ratio: Option<f64>,
    pub domain_std_error: Option<f64>,
    pub lift_constant: Option<f64>,
    pub exponent_rate: f64,
    pub flagged: Option<bool>,
    pub verdict: Option<&'static str>,
}

fn sweep_one(p: f64, cfg: &LpSweepConfig) -> Result<Vec<SweepRow>, CliError> {
    let ctx = || format!("lp-sweep p={p}");
    let params = cfg.validate()?;
    let weight = FockWeight::reduced(&params);
    let nested = NestedSpec {
        inner: cfg.inner.spec()?,
        outer: cfg.outer.spec()?,
    };
    let tuning = tune_witness(p, &weight).map_err(|e| numerical(ctx(), e))?;
    let spec = ExperimentSpec {
        quadrature: nested,
        max_quadrature_center: cfg.domain_quadrature_max_center,
    };
    let reports =
        fbh_lp_experiment(p, &params, &spec, &cfg.centers).map_err(|e| numerical(ctx(), e))?;
    let mut rows = Vec::with_capacity(reports.len() + 1);
    for r in &reports {
        let mut row = SweepRow {
            kind: "ratio",
            p,
            gamma: r.family.gamma,
            center_norm: Some(r.family.center_norm),
            beta: r.family.beta,
            ratio_analytic: Some(r.ratio_analytic),
            fock_quadrature: None,
            fock_std_error: None,
            domain_ratio: r.ratio_quadrature,
            domain_std_error: r.std_error,
            lift_constant: r.lift_constant,
            exponent_rate: r.exponent_rate,
            flagged: Some(r.flagged),
            verdict: None,
        };
        if r.family.center_norm <= cfg.fock_quadrature_max_center {
            let bump = GaussianBump::on_axis(r.family.gamma, r.family.center_norm, params.n())
                .map_err(|e| numerical(ctx(), e))?;
            let q =
                lp_ratio_quadrature(&bump, p, &weight, &nested).map_err(|e| numerical(ctx(), e))?;
            row.fock_quadrature = q.ratio_quadrature;
            row.fock_std_error = q.std_error;
            row.flagged = Some(r.flagged || q.flagged);
        }
        rows.push(row);
    }
    let verdict = classify_sweep(&reports, &tuning, cfg.tolerance);
    rows.push(SweepRow {
        kind: "summary",
        p,
        gamma: tuning.gamma_star,
        center_norm: None,
        beta: weight.beta(),
        ratio_analytic: None,
        fock_quadrature: None,
        fock_std_error: None,
        domain_ratio: None,
        domain_std_error: None,
        lift_constant: None,
        exponent_rate: tuning.rate,
        flagged: None,
        verdict: Some(verdict.as_str()),
    });
    Ok(rows)
}

pub fn run(cfg: &LpSweepConfig) -> Result<Report<SweepRow>, CliError> {
    cfg.validate()?;
    let per_p = cfg
        .ps
        .par_iter()
        .map(|&p| sweep_one(p, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report {
        rows: per_p.into_iter().flatten().collect(),
        failures: Vec::new(),
    })
}
