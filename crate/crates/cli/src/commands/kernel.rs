//! `fbh kernel`: series evaluation at configured point pairs.

use fbh_core::kernels::{fbh_kernel_basis_oracle, FbhKernel};
use serde::Serialize;

use crate::config::KernelConfig;
use crate::output::fmt_point;
use crate::{numerical, CliError, Report};

/// Columns: pair, x, y, s, t, value_re, value_im, terms, tail_bound,
/// oracle_re, oracle_im, rel_diff. Oracle columns are empty without `--oracle`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelRow {
    pub pair: usize,
    pub x: String,
    pub y: String,
    pub s: String,
    pub t: String,
    pub value_re: f64,
    pub value_im: f64,
    pub terms: usize,
    pub tail_bound: f64,
    pub oracle_re: Option<f64>,
    pub oracle_im: Option<f64>,
    pub rel_diff: Option<f64>,
}

pub fn run(cfg: &KernelConfig) -> Result<Report<KernelRow>, CliError> {
    let (params, ctl, pairs) = cfg.validate()?;
    let kernel = FbhKernel::new(&params, &ctl);
    let mut rows = Vec::with_capacity(pairs.len());
    let mut failures = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let k = kernel
            .evaluate(a, b)
            .map_err(|e| numerical(format!("kernel pair {i}"), e))?;
        let mut row = KernelRow {
            pair: i,
            x: fmt_point(&a.z),
            y: fmt_point(&a.w),
            s: fmt_point(&b.z),
            t: fmt_point(&b.w),
            value_re: k.value.re,
            value_im: k.value.im,
            terms: k.terms,
            tail_bound: k.tail_bound,
            oracle_re: None,
            oracle_im: None,
            rel_diff: None,
        };
        if cfg.oracle {
            let o = fbh_kernel_basis_oracle(a, b, &params, cfg.oracle_cap)
                .map_err(|e| numerical(format!("oracle for kernel pair {i}"), e))?;
            let rel = (k.value - o).norm() / o.norm();
            if !(rel <= cfg.oracle_tol) {
                failures.push(format!(
                    "kernel pair {i}: oracle rel_diff {rel:e} > {:e}",
                    cfg.oracle_tol
                ));
            }
            row.oracle_re = Some(o.re);
            row.oracle_im = Some(o.im);
            row.rel_diff = Some(rel);
        }
        rows.push(row);
    }
    Ok(Report { rows, failures })
}
