//! `fbh norms`: monomial norms in closed form against Monte Carlo and the
//! tensor rule.

use fbh_core::domain::DomainParams;
use fbh_core::kernels::monomial_norm_sq;
use fbh_core::math::MultiIndex;
use fbh_core::quadrature::{integrate_fbh, integrate_fbh_with, Proposal, QuadratureSpec};
use fbh_core::C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::NormsConfig;
use crate::{numerical, CliError, Report};

/// Columns: cell, mu, alpha, p, q, closed_form, mc_estimate, std_error,
/// z_score, tensor_estimate, tensor_rel_diff. Multi-indices are `;`-joined.
#[derive(Debug, Clone, Serialize)]
pub struct NormsRow {
    pub cell: usize,
    pub mu: f64,
    pub alpha: f64,
    pub p: String,
    pub q: String,
    pub closed_form: f64,
    pub mc_estimate: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub tensor_estimate: Option<f64>,
    pub tensor_rel_diff: Option<f64>,
}

struct Cell {
    params: DomainParams,
    p: MultiIndex,
    q: MultiIndex,
}

fn join(m: &MultiIndex) -> String {
    m.entries()
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn integrand<'a>(
    p: &'a MultiIndex,
    q: &'a MultiIndex,
) -> impl Fn(&[C64], &[C64]) -> fbh_core::Result<C64> + Sync + 'a {
    move |z, w| {
        Ok(C64::new(
            p.monomial(z).norm_sqr() * q.monomial(w).norm_sqr(),
            0.0,
        ))
    }
}

/// `(estimate − closed)/std_error`, with the standard error floored at
/// `1e-14·closed` so exactly integrated constant cells score 0 rather than NaN.
fn z_score(estimate: f64, closed: f64, std_error: f64) -> f64 {
    (estimate - closed) / std_error.max(1e-14 * closed.abs())
}

fn run_cell(index: usize, cell: &Cell, cfg: &NormsConfig) -> Result<NormsRow, CliError> {
    let ctx = || {
        format!(
            "norms cell {index} (p={}, q={})",
            join(&cell.p),
            join(&cell.q)
        )
    };
    let closed =
        monomial_norm_sq(&cell.p, &cell.q, &cell.params).map_err(|e| numerical(ctx(), e))?;
    let spec = QuadratureSpec::monte_carlo(cfg.samples, cfg.seed.wrapping_add(index as u64));
    let mc = integrate_fbh(integrand(&cell.p, &cell.q), &cell.params, &spec)
        .map_err(|e| numerical(ctx(), e))?;
    let mut row = NormsRow {
        cell: index,
        mu: cell.params.mu(),
        alpha: cell.params.alpha(),
        p: join(&cell.p),
        q: join(&cell.q),
        closed_form: closed,
        mc_estimate: mc.value.re,
        std_error: mc.std_error,
        z_score: z_score(mc.value.re, closed, mc.std_error),
        tensor_estimate: None,
        tensor_rel_diff: None,
    };
    if cfg.tensor && cell.params.n() == 1 && cell.params.m() == 1 {
        // |w|^{2q} carries e^{−qμ|z|²}; folding it into the base density keeps
        // the radial integrand polynomial.
        let tau = cell.params.base_beta() + cell.q.order() as f64 * cell.params.mu();
        let proposal = Proposal::standard(1, tau);
        let t = integrate_fbh_with(
            integrand(&cell.p, &cell.q),
            &cell.params,
            &QuadratureSpec::tensor(),
            &proposal,
        )
        .map_err(|e| numerical(ctx(), e))?;
        row.tensor_estimate = Some(t.value.re);
        row.tensor_rel_diff = Some((t.value.re - closed).abs() / closed);
    }
    Ok(row)
}

pub fn run(cfg: &NormsConfig) -> Result<Report<NormsRow>, CliError> {
    let params = cfg.validate()?;
    let cells: Vec<Cell> = params
        .iter()
        .flat_map(|params| {
            let ps = MultiIndex::all_up_to(params.n(), cfg.max_degree);
            let qs = MultiIndex::all_up_to(params.m(), cfg.max_degree);
            ps.into_iter().flat_map(move |p| {
                qs.clone().into_iter().map(move |q| Cell {
                    params: *params,
                    p: p.clone(),
                    q,
                })
            })
        })
        .collect();
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| run_cell(i, cell, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut failures = Vec::new();
    for r in &rows {
        if !(r.z_score.abs() <= cfg.max_abs_z) {
            failures.push(format!(
                "norms cell {}: |z| = {:.3} > {}",
                r.cell,
                r.z_score.abs(),
                cfg.max_abs_z
            ));
        }
        if let Some(d) = r.tensor_rel_diff {
            if !(d <= cfg.tensor_tol) {
                failures.push(format!(
                    "norms cell {}: tensor rel diff {d:e} > {:e}",
                    r.cell, cfg.tensor_tol
                ));
            }
        }
    }
    Ok(Report { rows, failures })
}
