//! `fbh identities`: base-slice restriction, cylinder norm and projection
//! identities, and the sub-mean lower bound.

use fbh_core::domain::DomainParams;
use fbh_core::kernels::{restriction_identity_check, SeriesControl};
use fbh_core::projection::{
    cylinder_norm_identity, cylinder_projection_identity, submean_lower_bound_check, NestedSpec,
    TestFunction,
};
use fbh_core::quadrature::{stream_rng, QuadratureSpec};
use fbh_core::C64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::IdentitiesConfig;
use crate::output::fmt_point;
use crate::{numerical, CliError, Report};

/// Columns: identity, case, lhs_re, lhs_im, rhs_re, rhs_im, rel_diff, error,
/// c_eff, ok.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub case: String,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub rel_diff: Option<f64>,
    pub error: Option<f64>,
    pub c_eff: Option<f64>,
    pub ok: bool,
}

impl IdentityRow {
    fn new(identity: &'static str, case: String, lhs: C64, rhs: C64) -> Self {
        IdentityRow {
            identity,
            case,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            rel_diff: None,
            error: None,
            c_eff: None,
            ok: false,
        }
    }
}

/// The cylinder functions exercised by every cylinder identity (`n = 1`).
pub fn cylinder_functions() -> Vec<TestFunction> {
    let one = C64::new(1.0, 0.0);
    vec![
        TestFunction::base("shifted-gaussian", move |z| {
            C64::new((-(z[0] - one).norm_sqr()).exp(), 0.0)
        })
        .with_envelope(1.0, vec![one])
        .expect("valid envelope"),
        TestFunction::base("conj-gaussian", move |z| {
            z[0].conj() * (-(z[0] - one).norm_sqr()).exp()
        })
        .with_envelope(1.0, vec![one])
        .expect("valid envelope"),
        TestFunction::base("radial-gaussian", |z| {
            let r2 = z[0].norm_sqr();
            C64::new(r2 * (-0.5 * r2).exp(), 0.0)
        })
        .with_envelope(0.5, vec![C64::new(0.0, 0.0)])
        .expect("valid envelope"),
    ]
}

/// Query points for the projection identity.
pub fn projection_queries() -> Vec<Vec<C64>> {
    [(0.0, 0.0), (0.5, 0.0), (-0.3, 0.4), (1.0, 0.2), (0.0, 0.8)]
        .into_iter()
        .map(|(re, im)| vec![C64::new(re, im)])
        .collect()
}

fn ball_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| {
                C64::new(
                    rng.random_range(-radius..radius),
                    rng.random_range(-radius..radius),
                )
            })
            .collect();
        if v.iter().map(|z| z.norm_sqr()).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

fn restriction_rows(cfg: &IdentitiesConfig) -> Result<Vec<IdentityRow>, CliError> {
    let ctl = SeriesControl::default();
    let mut rows = Vec::new();
    let mut stream = 0u64;
    for &[n, m] in &cfg.restriction_dims {
        for &alpha in &cfg.restriction_alphas {
            let params = DomainParams::new(n, m, cfg.mu, alpha)
                .map_err(|e| CliError::config(e.to_string()))?;
            let mut rng = stream_rng(cfg.seed, stream);
            stream += 1;
            for i in 0..cfg.restriction_points {
                let x = ball_point(&mut rng, n, cfg.restriction_radius);
                let s = ball_point(&mut rng, n, cfg.restriction_radius);
                let case = format!(
                    "n={n} m={m} alpha={alpha} #{i} x={} s={}",
                    fmt_point(&x),
                    fmt_point(&s)
                );
                let r = restriction_identity_check(&x, &s, &params, &ctl)
                    .map_err(|e| numerical(&case, e))?;
                let mut row = IdentityRow::new("restriction", case, r.lhs, r.rhs);
                row.rel_diff = Some(r.rel_diff);
                row.ok = r.rel_diff <= cfg.restriction_tol;
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn cylinder_norm_rows(
    cfg: &IdentitiesConfig,
    params: &DomainParams,
) -> Result<Vec<IdentityRow>, CliError> {
    let functions = cylinder_functions();
    let cases: Vec<(usize, &TestFunction, f64)> = functions
        .iter()
        .flat_map(|f| cfg.norm_exponents.iter().map(move |&p| (f, p)))
        .enumerate()
        .map(|(i, (f, p))| (i, f, p))
        .collect();
    cases
        .par_iter()
        .map(|&(i, f, p)| {
            let case = format!("{} p={p}", f.id());
            let spec = QuadratureSpec::monte_carlo(cfg.samples, cfg.seed.wrapping_add(i as u64));
            let r = cylinder_norm_identity(f, p, params, &spec).map_err(|e| numerical(&case, e))?;
            let mut row = IdentityRow::new("cylinder-norm", case, r.lhs.value, r.rhs.value);
            row.rel_diff = Some(r.rel_diff);
            row.error = Some(r.rel_error);
            row.ok = r.rel_diff <= 3.0 * r.rel_error.max(1e-14);
            Ok(row)
        })
        .collect()
}

fn cylinder_projection_rows(
    cfg: &IdentitiesConfig,
    params: &DomainParams,
    spec: &QuadratureSpec,
) -> Result<Vec<IdentityRow>, CliError> {
    let queries = projection_queries();
    let per_function = cylinder_functions()
        .par_iter()
        .map(|f| {
            let r = cylinder_projection_identity(f, params, spec, &queries)
                .map_err(|e| numerical(f.id(), e))?;
            let ok = (r.c_eff - cfg.c_eff_golden).abs() <= cfg.c_eff_tol;
            let rows: Vec<IdentityRow> = r
                .lhs
                .iter()
                .zip(&r.rhs)
                .zip(&queries)
                .map(|((l, rhs), x)| {
                    let mut row = IdentityRow::new(
                        "cylinder-projection",
                        format!("{} x={}", f.id(), fmt_point(x)),
                        l.value,
                        rhs.value,
                    );
                    row.rel_diff = Some((l.value - rhs.value).norm() / rhs.value.norm());
                    row.error = Some(r.c_eff_error);
                    row.c_eff = Some(r.c_eff);
                    row.ok = ok;
                    row
                })
                .collect();
            Ok((r.c_eff, rows))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let c_effs: Vec<f64> = per_function.iter().map(|(c, _)| *c).collect();
    let spread = c_effs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - c_effs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut rows: Vec<IdentityRow> = per_function.into_iter().flat_map(|(_, r)| r).collect();
    let mean = c_effs.iter().sum::<f64>() / c_effs.len() as f64;
    let mut summary = IdentityRow::new(
        "c-eff-consistency",
        format!("{} functions", c_effs.len()),
        C64::new(mean, 0.0),
        C64::new(cfg.c_eff_golden, 0.0),
    );
    summary.rel_diff = Some(spread);
    summary.c_eff = Some(mean);
    summary.ok = spread <= cfg.c_eff_tol;
    rows.push(summary);
    Ok(rows)
}

fn submean_rows(
    cfg: &IdentitiesConfig,
    params: &DomainParams,
    inner: &QuadratureSpec,
) -> Result<Vec<IdentityRow>, CliError> {
    let functions = cylinder_functions();
    let cases: Vec<(usize, &TestFunction, f64)> = functions
        .iter()
        .flat_map(|f| cfg.submean_exponents.iter().map(move |&p| (f, p)))
        .enumerate()
        .map(|(i, (f, p))| (i, f, p))
        .collect();
    cases
        .par_iter()
        .map(|&(i, f, p)| {
            let case = format!("{} p={p}", f.id());
            let spec = NestedSpec {
                inner: *inner,
                outer: QuadratureSpec::monte_carlo(
                    cfg.submean_samples,
                    cfg.seed.wrapping_add(1000 + i as u64),
                ),
            };
            let r =
                submean_lower_bound_check(f, p, params, &spec).map_err(|e| numerical(&case, e))?;
            let mut row = IdentityRow::new(
                "submean",
                case,
                C64::new(r.full_norm_p, 0.0),
                C64::new(r.slice_bound_p, 0.0),
            );
            row.rel_diff = Some((r.full_norm_p - r.slice_bound_p) / r.slice_bound_p.abs());
            row.error = Some(r.rel_error());
            row.ok = r.ok;
            Ok(row)
        })
        .collect()
}

pub fn run(cfg: &IdentitiesConfig) -> Result<Report<IdentityRow>, CliError> {
    let params = cfg.validate()?;
    let inner = cfg.inner.spec()?;
    let mut rows = restriction_rows(cfg)?;
    rows.extend(cylinder_norm_rows(cfg, &params)?);
    rows.extend(cylinder_projection_rows(cfg, &params, &inner)?);
    rows.extend(submean_rows(cfg, &params, &inner)?);
    let failures = rows
        .iter()
        .filter(|r| !r.ok)
        .map(|r| format!("{} {}: rel_diff {:?}", r.identity, r.case, r.rel_diff))
        .collect();
    Ok(Report { rows, failures })
}
